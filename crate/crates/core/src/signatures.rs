//! Circuit and cocircuit signatures: basis fourientations, the triangulating
//! and acyclic conditions, minors, enumeration and the signature file format.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::sync::OnceLock;

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::chains::{ElementSet, Fourientation, GroundSet, SimpleChain};
use crate::error::{Error, Result};
use crate::lp;
use crate::matroid::{Basis, ChainKind, RegularMatroid};

/// One chosen signed chain per circuit (or cocircuit) support, stored in the
/// matroid's support order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Signature {
    kind: ChainKind,
    chains: Vec<SimpleChain>,
}

impl Signature {
    /// Validates that `chains` picks exactly one signed chain of `kind` per
    /// support of `m`.
    pub fn from_chains<I: IntoIterator<Item = SimpleChain>>(
        m: &RegularMatroid,
        kind: ChainKind,
        chains: I,
    ) -> Result<Self> {
        let family = m.family(kind);
        let mut slots: Vec<Option<SimpleChain>> = vec![None; family.len()];
        for c in chains {
            if !family.contains(&c) {
                return Err(Error::InvalidSignature(format!(
                    "{} is not a signed {kind} of the matroid",
                    m.ground().format_chain(&c)
                )));
            }
            let i = family.support_index(c.support()).expect("member of the family");
            if slots[i].replace(c).is_some() {
                return Err(Error::InvalidSignature(format!(
                    "two chains chosen for {{{}}}",
                    m.ground().format_set(c.support())
                )));
            }
        }
        let chains = slots
            .into_iter()
            .enumerate()
            .map(|(i, c)| {
                c.ok_or_else(|| {
                    Error::InvalidSignature(format!(
                        "no chain chosen for {{{}}}",
                        m.ground().format_set(family.supports()[i])
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Signature { kind, chains })
    }

    /// Signature selecting, for support `i`, the chain with leading `+1` when
    /// `choices[i]` is false and its negation otherwise.
    pub fn from_choices(m: &RegularMatroid, kind: ChainKind, choices: &[bool]) -> Self {
        let family = m.family(kind);
        assert_eq!(choices.len(), family.len(), "one choice per support");
        let chains = choices
            .iter()
            .enumerate()
            .map(|(i, &negative)| {
                let (p, n) = family.pair(i);
                if negative {
                    n
                } else {
                    p
                }
            })
            .collect();
        Signature { kind, chains }
    }

    /// The signature induced by the functional `w`, lexicographically
    /// perturbed: `C` is chosen when `<w, C> > 0`, ties broken by the sign of
    /// the first nonzero coefficient. Such signatures are acyclic.
    pub fn from_functional(m: &RegularMatroid, kind: ChainKind, w: &[i64]) -> Self {
        let family = m.family(kind);
        let choices: Vec<bool> = (0..family.len())
            .map(|i| {
                let (p, _) = family.pair(i);
                let value: i64 = p.support().iter().map(|e| p.coeff(e) * w[e]).sum();
                value < 0
            })
            .collect();
        Signature::from_choices(m, kind, &choices)
    }

    pub fn kind(&self) -> ChainKind {
        self.kind
    }

    pub fn chains(&self) -> &[SimpleChain] {
        &self.chains
    }

    pub fn len(&self) -> usize {
        self.chains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chains.is_empty()
    }

    /// Chosen chain for support index `i` of the matroid's family.
    pub fn chosen(&self, i: usize) -> SimpleChain {
        self.chains[i]
    }

    pub fn contains(&self, chain: &SimpleChain) -> bool {
        self.chains
            .binary_search_by(|c| c.support().cmp(&chain.support()))
            .map(|i| self.chains[i] == *chain)
            .unwrap_or(false)
    }

    /// `true` for supports where the negative of the leading-`+1` chain is
    /// chosen.
    pub fn choices(&self) -> Vec<bool> {
        self.chains
            .iter()
            .map(|c| c.support().first().is_some_and(|i| c.coeff(i) < 0))
            .collect()
    }

    /// The signature of a single-element minor: restrict every chosen chain
    /// and keep the restrictions that are signed chains of `minor`.
    pub fn minor(&self, m: &RegularMatroid, minor: &RegularMatroid, e: usize) -> Result<Signature> {
        debug_assert_eq!(m.len(), minor.len() + 1);
        let family = minor.family(self.kind);
        let kept: Vec<SimpleChain> = self
            .chains
            .iter()
            .map(|c| c.restrict(e))
            .filter(|c| !c.is_zero() && family.contains(c))
            .collect();
        Signature::from_chains(minor, self.kind, kept)
    }

    /// One line per support, `{f1,f2,f3}: +f1-f2+f3`.
    pub fn to_text(&self, ground: &GroundSet) -> String {
        let mut out = String::new();
        for c in &self.chains {
            let _ = writeln!(
                out,
                "{{{}}}: {}",
                ground.format_set(c.support()),
                ground.format_chain(c)
            );
        }
        out
    }
}

/// `σ \ e` on `M \ e`.
pub fn delete_sig(m: &RegularMatroid, sig: &Signature, e: usize) -> Result<Signature> {
    let minor = m.delete(e)?;
    sig.minor(m, &minor, e)
}

/// `σ / e` on `M / e`.
pub fn contract_sig(m: &RegularMatroid, sig: &Signature, e: usize) -> Result<Signature> {
    let minor = m.contract(e)?;
    sig.minor(m, &minor, e)
}

/// A circuit signature together with a cocircuit signature.
#[derive(Clone, Debug)]
pub struct SignaturePair {
    circuit: Signature,
    cocircuit: Signature,
    triangulating: OnceLock<bool>,
    acyclic: OnceLock<bool>,
}

impl PartialEq for SignaturePair {
    fn eq(&self, other: &Self) -> bool {
        self.circuit == other.circuit && self.cocircuit == other.cocircuit
    }
}

impl Eq for SignaturePair {}

impl SignaturePair {
    pub fn new(circuit: Signature, cocircuit: Signature) -> Result<Self> {
        if circuit.kind != ChainKind::Circuit || cocircuit.kind != ChainKind::Cocircuit {
            return Err(Error::InvalidSignature(
                "expected a circuit and a cocircuit signature".into(),
            ));
        }
        Ok(SignaturePair {
            circuit,
            cocircuit,
            triangulating: OnceLock::new(),
            acyclic: OnceLock::new(),
        })
    }

    pub fn circuit(&self) -> &Signature {
        &self.circuit
    }

    pub fn cocircuit(&self) -> &Signature {
        &self.cocircuit
    }

    pub fn get(&self, kind: ChainKind) -> &Signature {
        match kind {
            ChainKind::Circuit => &self.circuit,
            ChainKind::Cocircuit => &self.cocircuit,
        }
    }

    /// Cached verdict of [`is_triangulating`] on both halves.
    pub fn is_triangulating(&self, m: &RegularMatroid) -> bool {
        *self
            .triangulating
            .get_or_init(|| is_triangulating(m, &self.circuit) && is_triangulating(m, &self.cocircuit))
    }

    /// Cached verdict of [`acyclicity`] on both halves.
    pub fn is_acyclic(&self, _m: &RegularMatroid) -> bool {
        *self
            .acyclic
            .get_or_init(|| acyclicity(&self.circuit).acyclic && acyclicity(&self.cocircuit).acyclic)
    }

    /// Both halves restricted to a single-element minor.
    pub fn minor(&self, m: &RegularMatroid, minor: &RegularMatroid, e: usize) -> Result<SignaturePair> {
        SignaturePair::new(self.circuit.minor(m, minor, e)?, self.cocircuit.minor(m, minor, e)?)
    }

    /// The pair `(σ*, σ)` read on the dual matroid.
    pub fn dual(&self, dual: &RegularMatroid) -> Result<SignaturePair> {
        SignaturePair::new(
            Signature::from_chains(dual, ChainKind::Circuit, self.cocircuit.chains.iter().copied())?,
            Signature::from_chains(dual, ChainKind::Cocircuit, self.circuit.chains.iter().copied())?,
        )
    }

    /// Signature file text: a `[circuits]` and a `[cocircuits]` section.
    pub fn to_text(&self, ground: &GroundSet) -> String {
        format!(
            "[circuits]\n{}[cocircuits]\n{}",
            self.circuit.to_text(ground),
            self.cocircuit.to_text(ground)
        )
    }

    /// Parses a signature file. Section headers may be omitted when every
    /// line's support is unambiguously a circuit or a cocircuit.
    pub fn parse(m: &RegularMatroid, text: &str) -> Result<Self> {
        let mut section: Option<ChainKind> = None;
        let mut circuits = Vec::new();
        let mut cocircuits = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line_no = n + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            match line {
                "[circuits]" => {
                    section = Some(ChainKind::Circuit);
                    continue;
                }
                "[cocircuits]" => {
                    section = Some(ChainKind::Cocircuit);
                    continue;
                }
                _ => {}
            }
            let (support, chain) = line
                .split_once(':')
                .ok_or_else(|| Error::parse(line_no, "expected `{support}: chain`"))?;
            let support = m
                .ground()
                .parse_set(support)
                .map_err(|e| Error::parse(line_no, e.to_string()))?;
            let chain = m
                .ground()
                .parse_chain(chain.trim())
                .map_err(|e| Error::parse(line_no, e.to_string()))?;
            if chain.support() != support {
                return Err(Error::parse(line_no, "chain support differs from the listed support"));
            }
            let kind = match section {
                Some(kind) => kind,
                None => {
                    let in_circuits = m.circuits().contains(&chain);
                    let in_cocircuits = m.cocircuits().contains(&chain);
                    match (in_circuits, in_cocircuits) {
                        (true, false) => ChainKind::Circuit,
                        (false, true) => ChainKind::Cocircuit,
                        (true, true) => {
                            return Err(Error::parse(
                                line_no,
                                "support is both a circuit and a cocircuit; add section headers",
                            ))
                        }
                        (false, false) => {
                            return Err(Error::parse(line_no, "neither a signed circuit nor a signed cocircuit"))
                        }
                    }
                }
            };
            if !m.family(kind).contains(&chain) {
                return Err(Error::parse(line_no, format!("not a signed {kind}")));
            }
            match kind {
                ChainKind::Circuit => circuits.push(chain),
                ChainKind::Cocircuit => cocircuits.push(chain),
            }
        }
        SignaturePair::new(
            Signature::from_chains(m, ChainKind::Circuit, circuits)?,
            Signature::from_chains(m, ChainKind::Cocircuit, cocircuits)?,
        )
    }
}

/// `F(B, σ)` for a circuit signature, `F(B, σ*)` for a cocircuit signature.
pub fn basis_fourientation(m: &RegularMatroid, basis: &Basis, sig: &Signature) -> Result<Fourientation> {
    let b = m.basis_index(basis.set()).ok_or_else(|| m.not_a_basis(basis.set()))?;
    Ok(fourientation_at(m, b, sig))
}

/// [`basis_fourientation`] by basis index.
pub(crate) fn fourientation_at(m: &RegularMatroid, b: usize, sig: &Signature) -> Fourientation {
    let n = m.len();
    let basis = m.bases()[b].set();
    let bioriented = match sig.kind {
        ChainKind::Circuit => basis,
        ChainKind::Cocircuit => basis.complement(n),
    };
    let mut minus = bioriented;
    let mut plus = bioriented;
    for e in ElementSet::full(n).difference(bioriented).iter() {
        let (_, support) = m.fundamental(b, e);
        if sig.chosen(support).coeff(e) > 0 {
            plus = plus.with(e);
        } else {
            minus = minus.with(e);
        }
    }
    Fourientation::from_parts(n, minus, plus)
}

/// Two distinct bases and a signed chain compatible with
/// `F(B1, σ) ∩ -F(B2, σ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriangulationWitness {
    pub first: Basis,
    pub second: Basis,
    pub chain: SimpleChain,
}

pub fn triangulation_witness(m: &RegularMatroid, sig: &Signature) -> Option<TriangulationWitness> {
    let fouris: Vec<Fourientation> = (0..m.bases().len()).map(|b| fourientation_at(m, b, sig)).collect();
    let negated: Vec<Fourientation> = fouris.iter().map(Fourientation::negate).collect();
    let chains = m.family(sig.kind).chains();
    for (i, fi) in fouris.iter().enumerate() {
        for (j, nj) in negated.iter().enumerate() {
            if i == j {
                continue;
            }
            let meet = fi.meet(nj);
            if let Some(c) = chains.iter().find(|c| c.compatible_with_fourientation(&meet)) {
                return Some(TriangulationWitness {
                    first: m.bases()[i],
                    second: m.bases()[j],
                    chain: *c,
                });
            }
        }
    }
    None
}

pub fn is_triangulating(m: &RegularMatroid, sig: &Signature) -> bool {
    triangulation_witness(m, sig).is_none()
}

/// Certificate attached to an acyclicity verdict.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "vector")]
pub enum AcyclicCertificate {
    /// `y` with `<y, C> > 0` for every chosen chain.
    Separating(Vec<i64>),
    /// Nonnegative, nonzero `λ` (aligned with the chosen chains) whose
    /// combination is the zero chain.
    Cycle(Vec<i64>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AcyclicVerdict {
    pub acyclic: bool,
    pub certificate: AcyclicCertificate,
}

impl AcyclicVerdict {
    /// Re-checks the certificate against the signature.
    pub fn verify(&self, sig: &Signature) -> bool {
        match &self.certificate {
            AcyclicCertificate::Separating(y) => {
                self.acyclic
                    && sig
                        .chains
                        .iter()
                        .all(|c| c.support().iter().map(|e| c.coeff(e) * y[e]).sum::<i64>() > 0)
            }
            AcyclicCertificate::Cycle(lambda) => {
                let n = sig.chains.first().map_or(0, SimpleChain::len);
                !self.acyclic
                    && lambda.len() == sig.chains.len()
                    && lambda.iter().all(|&l| l >= 0)
                    && lambda.iter().any(|&l| l > 0)
                    && (0..n).all(|e| sig.chains.iter().zip(lambda).map(|(c, l)| c.coeff(e) * l).sum::<i64>() == 0)
            }
        }
    }
}

/// Decides acyclicity by Gordan's alternative: either some `λ >= 0`,
/// `Σλ = 1` combines the chosen chains to zero, or some `y` has `<y, C> >= 1`
/// on every chosen chain. Both systems are solved exactly.
pub fn acyclicity(sig: &Signature) -> AcyclicVerdict {
    let k = sig.chains.len();
    let n = sig.chains.first().map_or(0, SimpleChain::len);
    if k == 0 {
        return AcyclicVerdict {
            acyclic: true,
            certificate: AcyclicCertificate::Separating(vec![0; n]),
        };
    }
    let mut a: Vec<Vec<_>> = (0..n)
        .map(|e| sig.chains.iter().map(|c| lp::rational(c.coeff(e))).collect())
        .collect();
    a.push(vec![lp::rational(1); k]);
    let mut b = vec![lp::rational(0); n];
    b.push(lp::rational(1));
    if let Some(lambda) = lp::nonnegative_solution(&a, &b) {
        return AcyclicVerdict {
            acyclic: false,
            certificate: AcyclicCertificate::Cycle(to_i64(lp::primitive_integer(&lambda))),
        };
    }
    // y = u - v, <y, C_i> - s_i = 1
    let a: Vec<Vec<_>> = sig
        .chains
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let mut row: Vec<_> = (0..n).map(|e| lp::rational(c.coeff(e))).collect();
            row.extend((0..n).map(|e| lp::rational(-c.coeff(e))));
            row.extend((0..k).map(|j| lp::rational(if i == j { -1 } else { 0 })));
            row
        })
        .collect();
    let b = vec![lp::rational(1); k];
    let x = lp::nonnegative_solution(&a, &b).expect("Gordan's alternative: one of the two systems is feasible");
    let y: Vec<_> = (0..n).map(|e| &x[e] - &x[n + e]).collect();
    AcyclicVerdict {
        acyclic: true,
        certificate: AcyclicCertificate::Separating(to_i64(lp::primitive_integer(&y))),
    }
}

fn to_i64(v: Vec<num_bigint::BigInt>) -> Vec<i64> {
    v.into_iter()
        .map(|x| x.to_i64().expect("certificate entries are bounded by subdeterminants"))
        .collect()
}

pub fn is_acyclic(sig: &Signature) -> bool {
    acyclicity(sig).acyclic
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SignatureFilter {
    #[default]
    All,
    Triangulating,
    Acyclic,
}

impl SignatureFilter {
    pub fn accepts(self, m: &RegularMatroid, sig: &Signature) -> bool {
        match self {
            SignatureFilter::All => true,
            SignatureFilter::Triangulating => is_triangulating(m, sig),
            SignatureFilter::Acyclic => is_acyclic(sig),
        }
    }
}

/// Every signature of `kind`, in lexicographic order of the choice vectors
/// (leading-`+1` chain before its negation, first support most significant),
/// filtered. Fails if `2^#supports` exceeds `max_signatures`.
pub fn enumerate_signatures(
    m: &RegularMatroid,
    kind: ChainKind,
    filter: SignatureFilter,
    max_signatures: u128,
) -> Result<impl Iterator<Item = Signature> + '_> {
    let k = m.family(kind).len();
    let needed = if k >= 127 { u128::MAX } else { 1u128 << k };
    if needed > max_signatures {
        return Err(Error::BudgetExceeded {
            what: "signatures",
            needed,
            budget: max_signatures,
        });
    }
    Ok((0..needed).filter_map(move |mask| {
        let choices: Vec<bool> = (0..k).map(|i| mask >> (k - 1 - i) & 1 == 1).collect();
        let sig = Signature::from_choices(m, kind, &choices);
        filter.accepts(m, &sig).then_some(sig)
    }))
}

/// Distinct signatures induced by the functionals `w ∈ {-1, 0, 1}^E`
/// (see [`Signature::from_functional`]), in lexicographic choice order,
/// truncated to `limit`. All of them are acyclic.
pub fn functional_signatures(
    m: &RegularMatroid,
    kind: ChainKind,
    limit: usize,
    max_functionals: u128,
) -> Result<Vec<Signature>> {
    let n = m.len();
    let needed = 3u128.checked_pow(n as u32).unwrap_or(u128::MAX);
    if needed > max_functionals {
        return Err(Error::BudgetExceeded {
            what: "functionals",
            needed,
            budget: max_functionals,
        });
    }
    let mut seen = BTreeSet::new();
    let mut w = vec![-1i64; n];
    loop {
        seen.insert(Signature::from_functional(m, kind, &w).choices());
        // next vector in {-1,0,1}^n
        let Some(i) = w.iter().rposition(|&x| x < 1) else { break };
        w[i] += 1;
        for x in w.iter_mut().skip(i + 1) {
            *x = -1;
        }
    }
    Ok(seen
        .into_iter()
        .take(limit)
        .map(|choices| Signature::from_choices(m, kind, &choices))
        .collect())
}
