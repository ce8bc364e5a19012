//! Exhaustive verification sweeps over small regular matroids: every
//! connected multigraph up to an edge budget, plus R10.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;

use crate::bby::{self, BbyInstance, Replay, Scope, Status, Violation};
use crate::budget::Budget;
use crate::chains::{Orientation, SimpleChain};
use crate::error::{Error, Result};
use crate::io;
use crate::matroid::{ChainKind, GraphEdge, MinorKind, RegularMatroid, TuCheck};
use crate::sandpile::{self, ReversalClasses, SandpileGroup};
use crate::signatures::{
    enumerate_signatures, functional_signatures, is_acyclic, is_triangulating, Signature, SignatureFilter,
    SignaturePair,
};

pub const R10_MATRIX: &str = include_str!("../fixtures/r10.matrix");

/// The bundled R10 matrix, checked for total unimodularity.
pub fn r10() -> RegularMatroid {
    io::parse_matrix(R10_MATRIX)
        .and_then(|f| f.matroid(TuCheck::Exhaustive))
        .expect("bundled R10 fixture is totally unimodular")
}

/// A multigraph on vertices `0..vertices` with edges `(i, j)`, `i <= j`,
/// directed from `i` to `j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Multigraph {
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Multigraph {
    pub fn name(&self) -> String {
        format!(
            "v{}:{}",
            self.vertices,
            self.edges.iter().map(|(i, j)| format!("{i}-{j}")).join(",")
        )
    }

    pub fn matroid(&self) -> RegularMatroid {
        let edges: Vec<GraphEdge> = self
            .edges
            .iter()
            .enumerate()
            .map(|(k, (i, j))| GraphEdge::new(i.to_string(), j.to_string(), Some(&format!("e{k}"))))
            .collect();
        RegularMatroid::from_graph(&edges).expect("graphic matroids are regular")
    }

    /// Lexicographically least relabelling.
    fn canonical(&self) -> Multigraph {
        let best = (0..self.vertices)
            .permutations(self.vertices)
            .map(|p| {
                let mut edges: Vec<(usize, usize)> = self
                    .edges
                    .iter()
                    .map(|&(i, j)| (p[i].min(p[j]), p[i].max(p[j])))
                    .collect();
                edges.sort_unstable();
                edges
            })
            .min()
            .unwrap_or_default();
        Multigraph {
            vertices: self.vertices,
            edges: best,
        }
    }
}

/// Every connected multigraph (loops and parallel edges allowed, no isolated
/// vertices) with `1..=max_edges` edges, up to isomorphism, ordered by edge
/// count then canonical form.
pub fn connected_multigraphs(max_edges: usize) -> Vec<Multigraph> {
    let mut out = Vec::new();
    if max_edges == 0 {
        return out;
    }
    let mut level: BTreeSet<Multigraph> = [
        Multigraph {
            vertices: 1,
            edges: vec![(0, 0)],
        },
        Multigraph {
            vertices: 2,
            edges: vec![(0, 1)],
        },
    ]
    .into_iter()
    .collect();
    for _ in 1..max_edges {
        let mut next = BTreeSet::new();
        for g in &level {
            let v = g.vertices;
            let grow = |vertices: usize, edge: (usize, usize)| {
                let mut edges = g.edges.clone();
                edges.push(edge);
                Multigraph { vertices, edges }.canonical()
            };
            for i in 0..v {
                for j in i..v {
                    next.insert(grow(v, (i, j)));
                }
                next.insert(grow(v + 1, (i, v)));
            }
        }
        out.extend(std::mem::replace(&mut level, next));
    }
    out.extend(level);
    out
}

/// Where a matroid's signature pairs came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PairSource {
    /// Every triangulating circuit signature times every triangulating
    /// cocircuit signature.
    Triangulating,
    /// Acyclic signatures induced by `{-1, 0, 1}` functionals, truncated.
    Functional,
}

/// The signature pairs swept on `m`: all triangulating pairs when
/// `2^(#circuits + #cocircuits)` fits `max_pairs`, else functional acyclic
/// pairs with at most `functional_limit` signatures per side.
pub fn sweep_pairs(
    m: &RegularMatroid,
    budget: &Budget,
    functional_limit: usize,
) -> Result<(PairSource, Vec<SignaturePair>)> {
    let k = m.circuits().len() + m.cocircuits().len();
    let (source, circuits, cocircuits) = if k < 127 && (1u128 << k) <= budget.max_pairs {
        let all = |kind| -> Result<Vec<Signature>> {
            Ok(enumerate_signatures(m, kind, SignatureFilter::Triangulating, budget.max_signatures)?.collect())
        };
        (
            PairSource::Triangulating,
            all(ChainKind::Circuit)?,
            all(ChainKind::Cocircuit)?,
        )
    } else {
        let some = |kind| functional_signatures(m, kind, functional_limit, budget.max_functionals);
        (
            PairSource::Functional,
            some(ChainKind::Circuit)?,
            some(ChainKind::Cocircuit)?,
        )
    };
    let pairs = circuits
        .iter()
        .cartesian_product(&cocircuits)
        .map(|(c, d)| SignaturePair::new(c.clone(), d.clone()))
        .collect::<Result<Vec<_>>>()?;
    Ok((source, pairs))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Check {
    /// `|classes| = |bases| = |S(M)|`.
    Counting,
    /// The BBY instance of a swept pair could be built.
    Instance,
    /// Latin square and well-definedness of the action table.
    Torsor,
    Consistency,
    Structure,
    Duality,
    /// Acyclic implies triangulating; both survive minors; basis
    /// fourientations restrict to minors.
    Signatures,
    /// Class-scan and greedy representatives agree.
    Representatives,
    Decompose,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub check: Check,
    pub matroid: String,
    pub pair: Option<usize>,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation: Option<Violation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub replay: Option<Replay>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MatroidRow {
    pub name: String,
    pub elements: usize,
    pub rank: usize,
    pub bases: u64,
    pub classes: u64,
    pub group_order: u64,
    pub invariant_factors: Vec<u64>,
    pub pair_source: PairSource,
    pub pairs: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepReport {
    pub status: Status,
    pub matroids: Vec<MatroidRow>,
    /// Number of individual assertions evaluated per check.
    pub checked: BTreeMap<Check, u64>,
    pub triples_checked: u64,
    pub failures: Vec<Failure>,
}

impl SweepReport {
    pub fn is_ok(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn failures_of(&self, check: Check) -> impl Iterator<Item = &Failure> {
        self.failures.iter().filter(move |f| f.check == check)
    }

    pub fn checked(&self, check: Check) -> u64 {
        self.checked.get(&check).copied().unwrap_or(0)
    }
}

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub max_edges: usize,
    pub include_r10: bool,
    /// Per-side cap on functional signatures when pairs are not enumerated
    /// exhaustively.
    pub functional_limit: usize,
    pub budget: Budget,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            max_edges: 5,
            include_r10: true,
            functional_limit: 4,
            budget: Budget::default(),
        }
    }
}

/// The named test matroids of a sweep.
pub fn test_matroids(max_edges: usize, include_r10: bool) -> Vec<(String, RegularMatroid)> {
    let mut out: Vec<(String, RegularMatroid)> = connected_multigraphs(max_edges)
        .into_iter()
        .map(|g| (g.name(), g.matroid()))
        .collect();
    if include_r10 {
        out.push(("R10".to_string(), r10()));
    }
    out
}

#[derive(Default)]
struct Tally {
    checked: BTreeMap<Check, u64>,
    triples: u64,
    failures: Vec<Failure>,
}

impl Tally {
    fn count(&mut self, check: Check, n: u64) {
        *self.checked.entry(check).or_default() += n;
    }

    fn fail(&mut self, check: Check, matroid: &str, pair: Option<usize>, detail: String) {
        self.failures.push(Failure {
            check,
            matroid: matroid.to_string(),
            pair,
            detail,
            violation: None,
            replay: None,
        });
    }

    fn merge(&mut self, other: Tally) {
        for (k, v) in other.checked {
            self.count(k, v);
        }
        self.triples += other.triples;
        self.failures.extend(other.failures);
    }
}

pub fn sweep(config: &SweepConfig) -> Result<SweepReport> {
    let budget = &config.budget;
    let mut tally = Tally::default();
    let mut rows = Vec::new();
    for (name, m) in test_matroids(config.max_edges, config.include_r10) {
        budget.check_time()?;
        let (row, t) = sweep_matroid(&name, &m, budget, config.functional_limit)?;
        rows.push(row);
        tally.merge(t);
    }
    Ok(SweepReport {
        status: if tally.failures.is_empty() {
            Status::Ok
        } else {
            Status::Violations
        },
        matroids: rows,
        checked: tally.checked,
        triples_checked: tally.triples,
        failures: tally.failures,
    })
}

/// All per-matroid and per-pair checks on one matroid.
pub fn sweep_one(name: &str, m: &RegularMatroid, budget: &Budget, functional_limit: usize) -> Result<SweepReport> {
    let (row, t) = sweep_matroid(name, m, budget, functional_limit)?;
    Ok(SweepReport {
        status: if t.failures.is_empty() {
            Status::Ok
        } else {
            Status::Violations
        },
        matroids: vec![row],
        checked: t.checked,
        triples_checked: t.triples,
        failures: t.failures,
    })
}

fn sweep_matroid(
    name: &str,
    m: &RegularMatroid,
    budget: &Budget,
    functional_limit: usize,
) -> Result<(MatroidRow, Tally)> {
    let mut tally = Tally::default();
    let classes = ReversalClasses::compute(m, budget)?;
    let group = SandpileGroup::new(m);
    let bases = m.bases().len() as u64;
    tally.count(Check::Counting, 1);
    if classes.len() as u64 != bases || group.order() != bases {
        tally.fail(
            Check::Counting,
            name,
            None,
            format!(
                "{} classes, {} bases, group order {}",
                classes.len(),
                bases,
                group.order()
            ),
        );
    }
    tally.merge(signature_theory(name, m, budget, functional_limit)?);
    tally.merge(decompose_checks(name, m));

    let (source, pairs) = sweep_pairs(m, budget, functional_limit)?;
    let cells: Vec<Result<Tally>> = pairs
        .par_iter()
        .enumerate()
        .map(|(i, pair)| check_cell(name, m, i, pair, budget))
        .collect();
    for cell in cells {
        tally.merge(cell?);
    }
    let row = MatroidRow {
        name: name.to_string(),
        elements: m.len(),
        rank: m.rank(),
        bases,
        classes: classes.len() as u64,
        group_order: group.order(),
        invariant_factors: group.invariant_factors().to_vec(),
        pair_source: source,
        pairs: pairs.len() as u64,
    };
    Ok((row, tally))
}

fn check_cell(name: &str, m: &RegularMatroid, index: usize, pair: &SignaturePair, budget: &Budget) -> Result<Tally> {
    let mut tally = Tally::default();
    let pair_id = Some(index);
    tally.count(Check::Instance, 1);
    let inst = match BbyInstance::new(m.clone(), pair.clone(), budget) {
        Ok(inst) => inst,
        Err(e) if e.is_budget() => return Err(e),
        Err(e) => {
            tally.fail(Check::Instance, name, pair_id, e.to_string());
            return Ok(tally);
        }
    };

    let torsor = bby::verify_torsor(&inst);
    tally.count(Check::Torsor, 1);
    if !torsor.is_ok() {
        tally.fail(Check::Torsor, name, pair_id, format!("{torsor:?}"));
    }

    let report = bby::verify_consistency(&inst, &Scope::default())?;
    tally.triples += report.triples_checked;
    tally.count(Check::Consistency, report.triples_checked + report.checks.restriction);
    if report.phrasing_mismatches > 0 {
        tally.fail(
            Check::Consistency,
            name,
            pair_id,
            format!("{} checks where the two phrasings disagree", report.phrasing_mismatches),
        );
    }
    for v in report.violations {
        tally.failures.push(Failure {
            check: Check::Consistency,
            matroid: name.to_string(),
            pair: pair_id,
            detail: v.detail.clone(),
            violation: Some(v),
            replay: Some(report.replay.clone()),
        });
    }

    let structure = bby::verify_action_structure(&inst);
    tally.count(Check::Structure, structure.traces_checked);
    for f in structure.failures {
        tally.fail(
            Check::Structure,
            name,
            pair_id,
            format!("{} on {{{}}}: {}", f.arc, f.basis, f.reason),
        );
    }

    match bby::verify_duality(&inst) {
        Ok(d) => {
            tally.count(Check::Duality, d.bases_checked + d.arcs_checked);
            if !d.is_ok() {
                tally.fail(Check::Duality, name, pair_id, format!("{d:?}"));
            }
        }
        Err(e) if e.is_budget() => return Err(e),
        Err(e) => tally.fail(Check::Duality, name, pair_id, format!("dual instance: {e}")),
    }

    let classes = inst.classes();
    for o in Orientation::all(m.len()) {
        tally.count(Check::Representatives, 1);
        let scan = classes.representative_of(&o);
        match sandpile::greedy_representative(m, pair, &o) {
            Ok(greedy) if greedy == scan => {}
            Ok(greedy) => tally.fail(
                Check::Representatives,
                name,
                pair_id,
                format!("{o}: class scan gives {scan}, greedy gives {greedy}"),
            ),
            Err(e) => tally.fail(Check::Representatives, name, pair_id, format!("{o}: {e}")),
        }
    }
    budget.check_time()?;
    Ok(tally)
}

/// Signatures examined for the signature-theory checks: all of them when
/// the enumeration fits the budget, else the functional ones.
fn theory_signatures(m: &RegularMatroid, kind: ChainKind, budget: &Budget, limit: usize) -> Result<Vec<Signature>> {
    match enumerate_signatures(m, kind, SignatureFilter::All, budget.max_signatures) {
        Ok(it) => Ok(it.collect()),
        Err(Error::BudgetExceeded { .. }) => functional_signatures(m, kind, limit, budget.max_functionals),
        Err(e) => Err(e),
    }
}

fn signature_theory(name: &str, m: &RegularMatroid, budget: &Budget, limit: usize) -> Result<Tally> {
    let mut tally = Tally::default();
    let n = m.len();
    let minors: Vec<(MinorKind, usize, RegularMatroid)> = (0..n)
        .flat_map(|e| {
            let mut v = Vec::new();
            if !m.is_coloop(e) {
                v.push((MinorKind::Deletion, e, m.delete(e).expect("not a coloop")));
            }
            if !m.is_loop(e) {
                v.push((MinorKind::Contraction, e, m.contract(e).expect("not a loop")));
            }
            v
        })
        .collect();
    for kind in [ChainKind::Circuit, ChainKind::Cocircuit] {
        let sigs = theory_signatures(m, kind, budget, limit)?;
        let results: Vec<Tally> = sigs
            .par_iter()
            .map(|sig| {
                let mut t = Tally::default();
                let label = || sig.to_text(m.ground()).trim_end().replace('\n', "; ");
                let acyclic = is_acyclic(sig);
                let triangulating = is_triangulating(m, sig);
                t.count(Check::Signatures, 1);
                if acyclic && !triangulating {
                    t.fail(
                        Check::Signatures,
                        name,
                        None,
                        format!("acyclic but not triangulating: {}", label()),
                    );
                }
                for (mk, e, minor) in &minors {
                    let restricted = match sig.minor(m, minor, *e) {
                        Ok(s) => s,
                        Err(err) => {
                            t.fail(Check::Signatures, name, None, format!("{mk:?} at {e}: {err}"));
                            continue;
                        }
                    };
                    t.count(Check::Signatures, 1);
                    if acyclic && !is_acyclic(&restricted) {
                        t.fail(
                            Check::Signatures,
                            name,
                            None,
                            format!("{mk:?} at {e} loses acyclicity: {}", label()),
                        );
                    }
                    if triangulating && !is_triangulating(minor, &restricted) {
                        t.fail(
                            Check::Signatures,
                            name,
                            None,
                            format!("{mk:?} at {e} loses the triangulating property: {}", label()),
                        );
                    }
                    for (b, basis) in m.bases().iter().enumerate() {
                        let applies = match mk {
                            MinorKind::Deletion => !basis.contains(*e),
                            MinorKind::Contraction => basis.contains(*e),
                        };
                        if !applies {
                            continue;
                        }
                        t.count(Check::Signatures, 1);
                        let expected = crate::signatures::fourientation_at(m, b, sig).restrict(*e);
                        let set = basis.set().without(*e).remove_position(*e);
                        let found = minor
                            .basis_index(set)
                            .map(|i| crate::signatures::fourientation_at(minor, i, &restricted));
                        if found != Some(expected) {
                            t.fail(
                                Check::Signatures,
                                name,
                                None,
                                format!(
                                    "{mk:?} at {e}, basis {{{}}}: restriction identity fails for {}",
                                    m.ground().format_set(basis.set()),
                                    label()
                                ),
                            );
                        }
                    }
                }
                t
            })
            .collect();
        for r in results {
            tally.merge(r);
        }
    }
    Ok(tally)
}

/// Decomposes every sum of two signed chains of each kind and checks the
/// sum, the sign agreement and, for simple input, disjointness.
fn decompose_checks(name: &str, m: &RegularMatroid) -> Tally {
    let mut tally = Tally::default();
    for kind in [ChainKind::Circuit, ChainKind::Cocircuit] {
        let chains = m.family(kind).chains();
        for (i, a) in chains.iter().enumerate() {
            for b in &chains[i..] {
                let p = a.to_chain().add(&b.to_chain());
                if p.is_zero() {
                    continue;
                }
                tally.count(Check::Decompose, 1);
                if let Err(detail) = check_decomposition(m, &p, kind) {
                    tally.fail(Check::Decompose, name, None, format!("{p}: {detail}"));
                }
            }
        }
    }
    tally
}

/// Verifies one call of [`RegularMatroid::decompose`].
pub fn check_decomposition(
    m: &RegularMatroid,
    p: &crate::chains::Chain,
    kind: ChainKind,
) -> std::result::Result<(), String> {
    let parts: Vec<SimpleChain> = m.decompose(p, kind).map_err(|e| e.to_string())?;
    let family = m.family(kind);
    let mut sum = crate::chains::Chain::zero(m.len());
    for c in &parts {
        if !family.contains(c) {
            return Err(format!("{c} is not a signed {kind}"));
        }
        if c.support().iter().any(|x| p.coeff(x) * c.coeff(x) <= 0) {
            return Err(format!("{c} disagrees in sign"));
        }
        sum = sum.add(&c.to_chain());
    }
    if &sum != p {
        return Err(format!("parts sum to {sum}"));
    }
    if p.coeffs().iter().all(|c| c.abs() <= 1)
        && parts
            .iter()
            .tuple_combinations()
            .any(|(a, b)| !a.support().is_disjoint(b.support()))
    {
        return Err("parts of a simple chain overlap".into());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multigraph_counts() {
        // connected multigraphs with loops allowed, by edge count
        let all = connected_multigraphs(5);
        let counts: Vec<usize> = (1..=5)
            .map(|k| all.iter().filter(|g| g.edges.len() == k).count())
            .collect();
        assert_eq!(counts, vec![2, 4, 11, 30, 95]);
    }

    #[test]
    fn r10_is_the_expected_matroid() {
        let m = r10();
        assert_eq!(m.len(), 10);
        assert_eq!(m.rank(), 5);
        assert_eq!(m.bases().len(), 162);
        let sizes: BTreeSet<usize> = m.circuits().supports().iter().map(|s| s.len()).collect();
        assert_eq!(sizes, BTreeSet::from([4, 6]));
        assert_eq!(m.dual().bases().len(), 162);
    }

    #[test]
    fn small_sweep_is_clean() {
        let config = SweepConfig {
            max_edges: 3,
            include_r10: false,
            ..SweepConfig::default()
        };
        let report = sweep(&config).unwrap();
        assert!(report.is_ok(), "{:#?}", report.failures);
        assert_eq!(report.matroids.len(), 17);
        assert!(report.triples_checked > 0);
    }
}
