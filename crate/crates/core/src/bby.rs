//! The BBY bijection `B ↦ F(B, σ) ∩ F(B, σ*)`, the torsor it induces on
//! bases, and verifiers for consistency under minors, duality, the
//! three-step structure of arc actions and generating pairs.

use std::collections::{HashMap, VecDeque};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::budget::Budget;
use crate::chains::{Arc, Chain, ElementSet, GroundSet, Orientation, Sign};
use crate::error::{Error, Result};
use crate::matroid::{Basis, ChainKind, MinorKind, RegularMatroid, TuCheck};
use crate::sandpile::{self, GroupElement, ReversalClasses, SandpileGroup};
use crate::signatures::{fourientation_at, SignaturePair};

/// A regular matroid with a triangulating signature pair, its reversal
/// classes, the BBY bijection in both directions and the arc action on bases.
#[derive(Clone, Debug)]
pub struct BbyInstance {
    matroid: RegularMatroid,
    pair: SignaturePair,
    budget: Budget,
    group: SandpileGroup,
    classes: ReversalClasses,
    forward: Vec<Orientation>,
    /// Basis index of each class.
    backward: Vec<usize>,
    /// `arc_table[arc.index()][b]` is the basis index of `[arc] · b`.
    arc_table: Vec<Vec<usize>>,
}

impl BbyInstance {
    /// Builds the instance and checks that the BBY map is a bijection onto
    /// the `(σ, σ*)`-compatible orientations.
    pub fn new(matroid: RegularMatroid, pair: SignaturePair, budget: &Budget) -> Result<Self> {
        if !pair.is_triangulating(&matroid) {
            return Err(Error::NotTriangulating(
                "the pair fails the triangulating condition".into(),
            ));
        }
        let mut classes = ReversalClasses::compute(&matroid, budget)?;
        classes.attach(&matroid, &pair)?;
        let ground = matroid.ground();
        let nb = matroid.bases().len();
        if classes.len() != nb {
            return Err(Error::NotABijection(format!(
                "{} classes for {} bases",
                classes.len(),
                nb
            )));
        }
        let mut forward = Vec::with_capacity(nb);
        let mut backward = vec![usize::MAX; nb];
        for (b, basis) in matroid.bases().iter().enumerate() {
            let f =
                fourientation_at(&matroid, b, pair.circuit()).meet(&fourientation_at(&matroid, b, pair.cocircuit()));
            let name = ground.format_set(basis.set());
            let o = f
                .to_orientation()
                .ok_or_else(|| Error::NotABijection(format!("image {f} of {{{name}}} is not an orientation")))?;
            if classes.representative_of(&o) != o {
                return Err(Error::NotABijection(format!(
                    "image {o} of {{{name}}} is not compatible"
                )));
            }
            let c = classes.class_of(&o);
            if backward[c] != usize::MAX {
                return Err(Error::NotABijection(format!(
                    "{{{}}} and {{{name}}} share the image {o}",
                    ground.format_set(matroid.bases()[backward[c]].set())
                )));
            }
            backward[c] = b;
            forward.push(o);
        }
        let arc_table = Arc::all(matroid.len())
            .map(|arc| {
                forward
                    .iter()
                    .map(|o| backward[classes.class_of(&sandpile::canonical_arc_action(&matroid, &classes, arc, o))])
                    .collect()
            })
            .collect();
        let group = SandpileGroup::new(&matroid);
        Ok(BbyInstance {
            matroid,
            pair,
            budget: budget.clone(),
            group,
            classes,
            forward,
            backward,
            arc_table,
        })
    }

    pub fn matroid(&self) -> &RegularMatroid {
        &self.matroid
    }

    pub fn pair(&self) -> &SignaturePair {
        &self.pair
    }

    pub fn group(&self) -> &SandpileGroup {
        &self.group
    }

    pub fn classes(&self) -> &ReversalClasses {
        &self.classes
    }

    pub fn budget(&self) -> &Budget {
        &self.budget
    }

    pub fn basis_count(&self) -> usize {
        self.forward.len()
    }

    fn index_of(&self, basis: &Basis) -> Result<usize> {
        self.matroid
            .basis_index(basis.set())
            .ok_or_else(|| Error::NotABasis(self.matroid.ground().format_set(basis.set())))
    }

    pub fn bby_map(&self, basis: &Basis) -> Result<Orientation> {
        Ok(self.forward[self.index_of(basis)?])
    }

    pub fn bby_map_index(&self, b: usize) -> Orientation {
        self.forward[b]
    }

    pub fn bby_inverse(&self, o: &Orientation) -> Result<Basis> {
        self.inverse_index(o).map(|b| self.matroid.bases()[b])
    }

    pub fn inverse_index(&self, o: &Orientation) -> Result<usize> {
        if o.len() != self.matroid.len() || self.classes.representative_of(o) != *o {
            return Err(Error::NotCompatibleOrientation(o.to_string()));
        }
        Ok(self.backward[self.classes.class_of(o)])
    }

    pub fn act_arc(&self, arc: Arc, basis: &Basis) -> Result<Basis> {
        Ok(self.matroid.bases()[self.act_arc_index(arc, self.index_of(basis)?)])
    }

    pub fn act_arc_index(&self, arc: Arc, b: usize) -> usize {
        self.arc_table[arc.index()][b]
    }

    /// `[p] · B`, one arc at a time.
    pub fn act_chain(&self, p: &Chain, b: usize) -> usize {
        let mut current = b;
        for (e, &c) in p.coeffs().iter().enumerate() {
            if let Some(sign) = Sign::of(c) {
                for _ in 0..c.unsigned_abs() {
                    current = self.act_arc_index(Arc::new(e, sign), current);
                }
            }
        }
        current
    }

    pub fn act(&self, s: &GroupElement, b: usize) -> usize {
        self.act_chain(&self.group.lift(s), b)
    }

    /// `table[g][b]`: the basis index of `g · b`, rows in group index order.
    pub fn action_table(&self) -> Vec<Vec<usize>> {
        self.group
            .elements()
            .map(|g| (0..self.basis_count()).map(|b| self.act(&g, b)).collect())
            .collect()
    }

    /// The instance on `M \ e` or `M / e` with the restricted signatures,
    /// rebuilt from scratch.
    pub fn minor(&self, kind: MinorKind, e: usize) -> Result<BbyInstance> {
        let minor = self.matroid.minor(kind, e)?;
        let pair = self.pair.minor(&self.matroid, &minor, e)?;
        BbyInstance::new(minor, pair, &self.budget)
    }

    /// The instance `(M*, σ*, σ)`.
    pub fn dual(&self) -> Result<BbyInstance> {
        let dual = self.matroid.dual();
        let pair = self.pair.dual(&dual)?;
        BbyInstance::new(dual, pair, &self.budget)
    }
}

/// Anything that acts by arcs on the bases of a [`BbyInstance`]. Minors are
/// always rebuilt from the underlying instance.
pub trait TorsorAction: Sync {
    fn instance(&self) -> &BbyInstance;
    fn act_arc_index(&self, arc: Arc, b: usize) -> usize;
}

impl TorsorAction for BbyInstance {
    fn instance(&self) -> &BbyInstance {
        self
    }

    fn act_arc_index(&self, arc: Arc, b: usize) -> usize {
        BbyInstance::act_arc_index(self, arc, b)
    }
}

/// A BBY instance with some arc actions overridden, for exercising the
/// verifiers.
#[derive(Clone, Debug)]
pub struct MutatedTorsor {
    pub inner: BbyInstance,
    pub overrides: HashMap<(Arc, usize), usize>,
}

impl TorsorAction for MutatedTorsor {
    fn instance(&self) -> &BbyInstance {
        &self.inner
    }

    fn act_arc_index(&self, arc: Arc, b: usize) -> usize {
        self.overrides
            .get(&(arc, b))
            .copied()
            .unwrap_or_else(|| self.inner.act_arc_index(arc, b))
    }
}

/// Which arcs, bases and elements [`verify_consistency`] covers; `None`
/// means all.
#[derive(Clone, Debug, Default)]
pub struct Scope {
    pub arcs: Option<Vec<Arc>>,
    pub bases: Option<Vec<usize>>,
    pub elements: Option<Vec<usize>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Part {
    /// `[f]·B1 = B2` on `M \ e` for `e ∉ B1 ∪ B2 ∪ f`.
    Deletion,
    /// `[f]·(B1 \ e) = B2 \ e` on `M / e` for `e ∈ (B1 ∩ B2) \ f`.
    Contraction,
    /// `e ∈ B1 ⇔ e ∈ B2` for `e` outside the component of `f`.
    Component,
    /// The minor's BBY map agrees with the restriction of the original one.
    Restriction,
    /// A minor instance could not be built.
    Minor,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phrasing {
    /// Only the torsor outputs disagree.
    Torsor,
    /// Only the orientation-class computation disagrees.
    Orientation,
    Both,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub part: Part,
    pub arc: Option<String>,
    pub basis: Option<String>,
    /// The post-action basis `B2` the check assumed.
    pub image: Option<String>,
    pub element: String,
    pub phrasing: Option<Phrasing>,
    pub detail: String,
}

/// Everything needed to rebuild an instance and rerun one triple.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Replay {
    pub elements: Vec<String>,
    pub matrix: Vec<Vec<i64>>,
    pub signature: String,
}

impl Replay {
    pub fn of(inst: &BbyInstance) -> Self {
        let m = inst.matroid();
        Replay {
            elements: m.ground().names().to_vec(),
            matrix: m.matrix().rows().to_vec(),
            signature: inst.pair().to_text(m.ground()),
        }
    }

    pub fn instance(&self, budget: &Budget) -> Result<BbyInstance> {
        let ground = GroundSet::new(self.elements.iter().cloned())?;
        let m = crate::io::matroid_from_rows(ground, self.matrix.clone(), TuCheck::Auto)?;
        let pair = SignaturePair::parse(&m, &self.signature)?;
        BbyInstance::new(m, pair, budget)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartCounts {
    pub deletion: u64,
    pub contraction: u64,
    pub component: u64,
    pub restriction: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Violations,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub status: Status,
    pub matroid_hash: String,
    pub signature_hash: String,
    pub triples_checked: u64,
    pub checks: PartCounts,
    /// Checks where the torsor and orientation phrasings gave different
    /// verdicts.
    pub phrasing_mismatches: u64,
    pub violations: Vec<Violation>,
    pub replay: Replay,
}

impl ConsistencyReport {
    pub fn is_ok(&self) -> bool {
        self.status == Status::Ok
    }
}

fn sha256_hex(text: &str) -> String {
    Sha256::digest(text.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Hash of the ground set names and the reduced realization.
pub fn matroid_hash(m: &RegularMatroid) -> String {
    let mut text = m.ground().names().join(" ");
    for row in m.matrix().rows() {
        text.push('\n');
        text.push_str(&row.iter().map(i64::to_string).collect::<Vec<_>>().join(" "));
    }
    sha256_hex(&text)
}

pub fn signature_hash(m: &RegularMatroid, pair: &SignaturePair) -> String {
    sha256_hex(&pair.to_text(m.ground()))
}

fn minor_arc(arc: Arc, e: usize) -> Arc {
    Arc::new(if arc.element > e { arc.element - 1 } else { arc.element }, arc.sign)
}

/// One deletion or contraction check on a prebuilt minor instance.
/// Returns `(torsor_ok, orientation_ok, detail)`.
fn check_minor_triple(
    minor: &BbyInstance,
    kind: MinorKind,
    e: usize,
    arc: Arc,
    b1: ElementSet,
    b2: ElementSet,
) -> (bool, bool, String) {
    let (s1, s2) = match kind {
        MinorKind::Deletion => (b1.remove_position(e), b2.remove_position(e)),
        MinorKind::Contraction => (b1.without(e).remove_position(e), b2.without(e).remove_position(e)),
    };
    let mm = minor.matroid();
    let (Some(i1), Some(i2)) = (mm.basis_index(s1), mm.basis_index(s2)) else {
        return (false, false, "restricted sets are not bases of the minor".into());
    };
    let arc = minor_arc(arc, e);
    let got = TorsorAction::act_arc_index(minor, arc, i1);
    let torsor_ok = got == i2;
    let classes = minor.classes();
    let orientation_ok = sandpile::class_arc_action(classes, arc, classes.class_of(&minor.bby_map_index(i1)))
        == Some(classes.class_of(&minor.bby_map_index(i2)));
    let detail = format!(
        "minor gives {{{}}}, expected {{{}}}",
        mm.ground().format_set(mm.bases()[got].set()),
        mm.ground().format_set(s2)
    );
    (torsor_ok, orientation_ok, detail)
}

fn phrasing(torsor_ok: bool, orientation_ok: bool) -> Option<Phrasing> {
    match (torsor_ok, orientation_ok) {
        (true, true) => None,
        (false, true) => Some(Phrasing::Torsor),
        (true, false) => Some(Phrasing::Orientation),
        (false, false) => Some(Phrasing::Both),
    }
}

/// Checks the three consistency properties, and the restriction identities of
/// the minor BBY maps, for every arc, basis and element in `scope`.
pub fn verify_consistency<T: TorsorAction>(t: &T, scope: &Scope) -> Result<ConsistencyReport> {
    let inst = t.instance();
    let m = inst.matroid();
    let ground = m.ground();
    let n = m.len();
    let arcs: Vec<Arc> = scope.arcs.clone().unwrap_or_else(|| Arc::all(n).collect());
    let bases: Vec<usize> = scope.bases.clone().unwrap_or_else(|| (0..inst.basis_count()).collect());
    let elements: Vec<usize> = scope.elements.clone().unwrap_or_else(|| (0..n).collect());

    let wanted: Vec<(MinorKind, usize)> = elements
        .iter()
        .flat_map(|&e| {
            let mut v = Vec::new();
            if !m.is_coloop(e) {
                v.push((MinorKind::Deletion, e));
            }
            if !m.is_loop(e) {
                v.push((MinorKind::Contraction, e));
            }
            v
        })
        .collect();
    let built: Vec<Result<BbyInstance>> = wanted.par_iter().map(|&(k, e)| inst.minor(k, e)).collect();
    let mut minors: HashMap<(MinorKind, usize), BbyInstance> = HashMap::new();
    let mut violations = Vec::new();
    let mut checks = PartCounts::default();
    for (&(kind, e), result) in wanted.iter().zip(built) {
        match result {
            Ok(mi) => {
                minors.insert((kind, e), mi);
            }
            Err(err) if err.is_budget() => return Err(err),
            Err(err) => violations.push(Violation {
                part: Part::Minor,
                arc: None,
                basis: None,
                image: None,
                element: ground.name(e).to_string(),
                phrasing: None,
                detail: format!("{kind:?} instance failed: {err}"),
            }),
        }
    }
    inst.budget().check_time()?;

    for &(kind, e) in &wanted {
        let Some(mi) = minors.get(&(kind, e)) else { continue };
        for &b in &bases {
            let set = m.bases()[b].set();
            let applies = match kind {
                MinorKind::Deletion => !set.contains(e),
                MinorKind::Contraction => set.contains(e),
            };
            if !applies {
                continue;
            }
            checks.restriction += 1;
            let minor_set = set.without(e).remove_position(e);
            let expected = inst.bby_map_index(b).restrict(e);
            let found = mi.matroid().basis_index(minor_set).map(|i| mi.bby_map_index(i));
            if found != Some(expected) {
                violations.push(Violation {
                    part: Part::Restriction,
                    arc: None,
                    basis: Some(ground.format_set(set)),
                    image: None,
                    element: ground.name(e).to_string(),
                    phrasing: None,
                    detail: format!(
                        "expected {expected}, minor gives {}",
                        found.map_or("no basis".to_string(), |o| o.to_string())
                    ),
                });
            }
        }
    }

    let cells: Vec<(Arc, usize)> = arcs.iter().flat_map(|&a| bases.iter().map(move |&b| (a, b))).collect();
    let results: Vec<(PartCounts, u64, Vec<Violation>)> = cells
        .par_iter()
        .map(|&(arc, b)| {
            let mut counts = PartCounts::default();
            let mut mismatches = 0;
            let mut found = Vec::new();
            let f = arc.element;
            let b1 = m.bases()[b].set();
            let b2 = m.bases()[t.act_arc_index(arc, b)].set();
            let component = m.component_of(f);
            for &e in &elements {
                if e == f {
                    continue;
                }
                let mut record = |part: Part, ph: Option<Phrasing>, detail: String| {
                    found.push(Violation {
                        part,
                        arc: Some(ground.format_arc(arc)),
                        basis: Some(ground.format_set(b1)),
                        image: Some(ground.format_set(b2)),
                        element: ground.name(e).to_string(),
                        phrasing: ph,
                        detail,
                    })
                };
                for kind in [MinorKind::Deletion, MinorKind::Contraction] {
                    let applies = match kind {
                        MinorKind::Deletion => !b1.contains(e) && !b2.contains(e),
                        MinorKind::Contraction => b1.contains(e) && b2.contains(e),
                    };
                    if !applies {
                        continue;
                    }
                    let Some(mi) = minors.get(&(kind, e)) else { continue };
                    match kind {
                        MinorKind::Deletion => counts.deletion += 1,
                        MinorKind::Contraction => counts.contraction += 1,
                    }
                    let (t_ok, o_ok, detail) = check_minor_triple(mi, kind, e, arc, b1, b2);
                    if t_ok != o_ok {
                        mismatches += 1;
                    }
                    if let Some(ph) = phrasing(t_ok, o_ok) {
                        let part = match kind {
                            MinorKind::Deletion => Part::Deletion,
                            MinorKind::Contraction => Part::Contraction,
                        };
                        record(part, Some(ph), detail);
                    }
                }
                if !component.contains(e) {
                    counts.component += 1;
                    if b1.contains(e) != b2.contains(e) {
                        record(
                            Part::Component,
                            None,
                            "membership changed outside the arc's component".into(),
                        );
                    }
                }
            }
            (counts, mismatches, found)
        })
        .collect();
    inst.budget().check_time()?;

    let mut phrasing_mismatches = 0;
    for (c, mm, v) in results {
        checks.deletion += c.deletion;
        checks.contraction += c.contraction;
        checks.component += c.component;
        checks.restriction += c.restriction;
        phrasing_mismatches += mm;
        violations.extend(v);
    }
    let triples_checked = checks.deletion + checks.contraction + checks.component;
    Ok(ConsistencyReport {
        status: if violations.is_empty() {
            Status::Ok
        } else {
            Status::Violations
        },
        matroid_hash: matroid_hash(m),
        signature_hash: signature_hash(m, inst.pair()),
        triples_checked,
        checks,
        phrasing_mismatches,
        violations,
        replay: Replay::of(inst),
    })
}

/// Reruns a reported violation on an instance rebuilt from the replay data,
/// using the recorded `B2`. `Ok(true)` when the violation reproduces.
pub fn replay_violation(replay: &Replay, v: &Violation, budget: &Budget) -> Result<bool> {
    let inst = replay.instance(budget)?;
    let m = inst.matroid();
    let ground = m.ground();
    let e = ground.position(&v.element)?;
    let set = |s: &Option<String>| -> Result<ElementSet> {
        ground.parse_set(
            s.as_deref()
                .ok_or_else(|| Error::PreconditionViolated("missing basis".into()))?,
        )
    };
    match v.part {
        Part::Minor => {
            let kind = if v.detail.starts_with("Deletion") {
                MinorKind::Deletion
            } else {
                MinorKind::Contraction
            };
            Ok(inst.minor(kind, e).is_err())
        }
        Part::Restriction => {
            let b1 = set(&v.basis)?;
            let kind = if b1.contains(e) {
                MinorKind::Contraction
            } else {
                MinorKind::Deletion
            };
            let mi = inst.minor(kind, e)?;
            let expected = inst.bby_map(&m.basis(b1)?)?.restrict(e);
            let found = mi
                .matroid()
                .basis_index(b1.without(e).remove_position(e))
                .map(|i| mi.bby_map_index(i));
            Ok(found != Some(expected))
        }
        Part::Component => {
            let (b1, b2) = (set(&v.basis)?, set(&v.image)?);
            Ok(b1.contains(e) != b2.contains(e))
        }
        Part::Deletion | Part::Contraction => {
            let kind = if v.part == Part::Deletion {
                MinorKind::Deletion
            } else {
                MinorKind::Contraction
            };
            let arc = ground.parse_arc(v.arc.as_deref().unwrap_or(""))?;
            let (b1, b2) = (set(&v.basis)?, set(&v.image)?);
            let mi = inst.minor(kind, e)?;
            let (t_ok, o_ok, _) = check_minor_triple(&mi, kind, e, arc, b1, b2);
            Ok(!(t_ok && o_ok))
        }
    }
}

/// Disagreements between `(M, σ, σ*)` and `(M*, σ*, σ)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualityReport {
    pub bases_checked: u64,
    pub arcs_checked: u64,
    /// Bases whose BBY orientation differs from the dual's at the complement.
    pub pointwise: Vec<String>,
    /// `(arc, basis)` cells where the dual torsor does not act on complements.
    pub torsor: Vec<(String, String)>,
}

impl DualityReport {
    pub fn is_ok(&self) -> bool {
        self.pointwise.is_empty() && self.torsor.is_empty()
    }
}

pub fn verify_duality(inst: &BbyInstance) -> Result<DualityReport> {
    let dual = inst.dual()?;
    compare_with_dual(inst, &dual)
}

/// Compares an instance against a prebuilt dual instance.
pub fn compare_with_dual(inst: &BbyInstance, dual: &BbyInstance) -> Result<DualityReport> {
    let m = inst.matroid();
    let n = m.len();
    let ground = m.ground();
    let complement = |b: usize| -> Result<usize> {
        let set = m.bases()[b].set().complement(n);
        dual.matroid()
            .basis_index(set)
            .ok_or_else(|| Error::NotABasis(ground.format_set(set)))
    };
    let mut report = DualityReport::default();
    for b in 0..inst.basis_count() {
        report.bases_checked += 1;
        if inst.bby_map_index(b) != dual.bby_map_index(complement(b)?) {
            report.pointwise.push(ground.format_set(m.bases()[b].set()));
        }
        for arc in Arc::all(n) {
            report.arcs_checked += 1;
            let b2 = inst.act_arc_index(arc, b);
            if dual.act_arc_index(arc, complement(b)?) != complement(b2)? {
                report
                    .torsor
                    .push((ground.format_arc(arc), ground.format_set(m.bases()[b].set())));
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureFailure {
    pub arc: String,
    pub basis: String,
    pub reason: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureReport {
    pub traces_checked: u64,
    /// Conforming decompositions to which the circuit-avoidance corollary
    /// applied.
    pub corollary_checked: u64,
    pub failures: Vec<StructureFailure>,
}

impl StructureReport {
    pub fn is_ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// For every arc and basis, decomposes `β(B1) -> β([f]·B1)` into reversal,
/// flip, reversal and checks conditions (a)–(d). On decompositions meeting
/// them where `C` is the circuit (no first reversal and a circuit after the
/// flip, or a circuit before and a cocircuit after), also checks
/// `(B1^c ∩ B2^c ∩ C) \ f = ∅`.
pub fn verify_action_structure(inst: &BbyInstance) -> StructureReport {
    let m = inst.matroid();
    let ground = m.ground();
    let n = m.len();
    let mut report = StructureReport::default();
    for arc in Arc::all(n) {
        for b in 0..inst.basis_count() {
            report.traces_checked += 1;
            let b2 = inst.act_arc_index(arc, b);
            let (o1, o2) = (inst.bby_map_index(b), inst.bby_map_index(b2));
            let (s1, s2) = (m.bases()[b].set(), m.bases()[b2].set());
            let mut fail = |reason: String| {
                report.failures.push(StructureFailure {
                    arc: ground.format_arc(arc),
                    basis: ground.format_set(s1),
                    reason,
                })
            };
            let trace = sandpile::trace_between(m, arc, &o1, &o2);
            if !trace.is_valid() {
                fail(format!(
                    "no decomposition of {o1} -> {o2} meets (a)-(d): {:?}",
                    trace.conditions
                ));
                continue;
            }
            let outside = s1.union(s2).complement(n).without(arc.element);
            for d in trace.all.iter().filter(|d| d.conditions(arc, &o1, &o2).all()) {
                let circuit = match (d.pre, d.post) {
                    (None, Some(q)) if q.kind == ChainKind::Circuit => Some(q.chain),
                    (Some(p), Some(q)) if p.kind == ChainKind::Circuit && q.kind == ChainKind::Cocircuit => {
                        Some(p.chain)
                    }
                    _ => None,
                };
                if let Some(c) = circuit {
                    report.corollary_checked += 1;
                    if !c.support().is_disjoint(outside) {
                        fail(format!("circuit {} meets (B1^c ∩ B2^c) \\ f", ground.format_chain(&c)));
                    }
                }
            }
        }
    }
    report
}

/// Simple transitivity and well-definedness of the torsor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsorReport {
    pub group_order: u64,
    pub bases: u64,
    pub classes: u64,
    /// Every row and every column of the action table is a permutation.
    pub latin_square: bool,
    pub identity_fixes: bool,
    /// Every signed circuit and cocircuit acts trivially.
    pub lattice_trivial: bool,
    pub arcs_commute: bool,
    /// Acting by `[arc] + g` equals acting by `g` and then the arc.
    pub compatible_with_addition: bool,
}

impl TorsorReport {
    pub fn counts_agree(&self) -> bool {
        self.group_order == self.bases && self.bases == self.classes
    }

    pub fn is_ok(&self) -> bool {
        self.counts_agree()
            && self.latin_square
            && self.identity_fixes
            && self.lattice_trivial
            && self.arcs_commute
            && self.compatible_with_addition
    }
}

fn is_permutation(v: impl Iterator<Item = usize>, n: usize) -> bool {
    let mut seen = vec![false; n];
    let mut count = 0;
    for x in v {
        if x >= n || std::mem::replace(&mut seen[x], true) {
            return false;
        }
        count += 1;
    }
    count == n
}

pub fn verify_torsor(inst: &BbyInstance) -> TorsorReport {
    let m = inst.matroid();
    let nb = inst.basis_count();
    let group = inst.group();
    let table = inst.action_table();
    let square = table.len() == nb;
    let latin_square = square
        && table.iter().all(|row| is_permutation(row.iter().copied(), nb))
        && (0..nb).all(|b| is_permutation(table.iter().map(|row| row[b]), nb));
    let identity_fixes = table
        .first()
        .is_some_and(|row| row.iter().enumerate().all(|(b, &x)| b == x));
    let lattice_trivial = m
        .signed_circuits()
        .iter()
        .chain(m.signed_cocircuits())
        .all(|c| (0..nb).all(|b| inst.act_chain(&c.to_chain(), b) == b));
    let arcs: Vec<Arc> = Arc::all(m.len()).collect();
    let arcs_commute = arcs.iter().all(|&a| {
        arcs.iter().all(|&c| {
            (0..nb).all(|b| {
                inst.act_arc_index(a, inst.act_arc_index(c, b)) == inst.act_arc_index(c, inst.act_arc_index(a, b))
            })
        })
    });
    let compatible_with_addition = arcs.iter().all(|&a| {
        let ga = group.arc(a);
        group.elements().all(|g| {
            let sum = group.add(&ga, &g);
            (0..nb).all(|b| table[group.index_of(&sum)][b] == inst.act_arc_index(a, table[group.index_of(&g)][b]))
        })
    });
    TorsorReport {
        group_order: group.order(),
        bases: nb as u64,
        classes: inst.classes().len() as u64,
        latin_square,
        identity_fixes,
        lattice_trivial,
        arcs_commute,
        compatible_with_addition,
    }
}

/// Whether `pairs` generates the action: from `(0, B)`, moves along pairs
/// `(s_i, B_i)` with `B_i` the current basis must reach every group sum.
/// The empty sequence counts, so `(0, B)` is always reached.
pub fn check_generating_pairs(inst: &BbyInstance, pairs: &[(GroupElement, usize)]) -> Result<bool> {
    let group = inst.group();
    let order = group.order() as usize;
    let nb = inst.basis_count();
    crate::budget::Budget::check("states", (order as u128) * (nb as u128), inst.budget().max_states)?;
    let mut moves: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nb];
    for (s, b) in pairs {
        let target = inst.act(s, *b);
        moves[*b].push((group.index_of(s), target));
    }
    let elements: Vec<GroupElement> = group.elements().collect();
    for start in 0..nb {
        let mut seen = vec![false; order * nb];
        let mut sums = vec![false; order];
        let mut queue = VecDeque::from([(0usize, start)]);
        seen[start] = true;
        while let Some((g, b)) = queue.pop_front() {
            sums[g] = true;
            for &(s, target) in &moves[b] {
                let next = group.index_of(&group.add(&elements[g], &elements[s]));
                if !std::mem::replace(&mut seen[next * nb + target], true) {
                    queue.push_back((next, target));
                }
            }
        }
        if sums.iter().any(|x| !x) {
            return Ok(false);
        }
        inst.budget().check_time()?;
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signatures::Signature;

    fn fig1() -> RegularMatroid {
        RegularMatroid::from_matrix_with(
            GroundSet::new(["f1", "f2", "f3", "f4"]).unwrap(),
            vec![vec![1, 0, -1, -1], vec![-1, -1, 0, 0], vec![0, 1, 1, 1]],
            TuCheck::Auto,
        )
        .unwrap()
    }

    fn example(m: RegularMatroid) -> BbyInstance {
        let c = |s: &str| m.ground().parse_chain(s).unwrap();
        let pair = SignaturePair::new(
            Signature::from_chains(&m, ChainKind::Circuit, [c("+f1-f2+f3"), c("+f1-f2+f4"), c("-f3+f4")]).unwrap(),
            Signature::from_chains(&m, ChainKind::Cocircuit, [c("-f1+f3+f4"), c("-f1-f2"), c("+f2+f3+f4")]).unwrap(),
        )
        .unwrap();
        BbyInstance::new(m, pair, &Budget::default()).unwrap()
    }

    fn basis(inst: &BbyInstance, s: &str) -> Basis {
        inst.matroid()
            .basis(inst.matroid().ground().parse_set(s).unwrap())
            .unwrap()
    }

    fn o(s: &str) -> Orientation {
        Orientation::parse(s).unwrap()
    }

    #[test]
    fn example_bijection() {
        let inst = example(fig1());
        assert_eq!(inst.bby_map(&basis(&inst, "f1,f3")).unwrap(), o("-,-,+,+"));
        assert_eq!(inst.bby_map(&basis(&inst, "f2,f3")).unwrap(), o("+,-,+,+"));
        assert_eq!(inst.bby_inverse(&o("+,-,+,+")).unwrap(), basis(&inst, "f2,f3"));
        for b in inst.matroid().bases() {
            assert_eq!(inst.bby_inverse(&inst.bby_map(b).unwrap()).unwrap(), *b);
        }
        assert!(matches!(
            inst.bby_inverse(&o("+,-,+,-")),
            Err(Error::NotCompatibleOrientation(_))
        ));
        let not_basis = Basis(inst.matroid().ground().parse_set("f3,f4").unwrap());
        assert!(matches!(inst.bby_map(&not_basis), Err(Error::NotABasis(_))));
    }

    #[test]
    fn example_action() {
        let inst = example(fig1());
        let g = inst.matroid().ground();
        let arc = g.parse_arc("+f1").unwrap();
        assert_eq!(
            inst.act_arc(arc, &basis(&inst, "f1,f3")).unwrap(),
            basis(&inst, "f2,f3")
        );
        let b = inst
            .act_arc(g.parse_arc("+f3").unwrap(), &basis(&inst, "f1,f3"))
            .unwrap();
        assert_eq!(inst.bby_map(&b).unwrap(), o("+,-,-,+"));
        let id = inst.group().identity();
        assert!((0..5).all(|b| inst.act(&id, b) == b));
    }

    #[test]
    fn free_matroid_orientation_comes_from_cocircuits() {
        let m = RegularMatroid::from_matrix(vec![vec![1, 0], vec![0, 1]]).unwrap();
        let cocircuits: Vec<_> = m.signed_cocircuits().iter().step_by(2).map(|c| c.neg()).collect();
        let pair = SignaturePair::new(
            Signature::from_chains(&m, ChainKind::Circuit, []).unwrap(),
            Signature::from_chains(&m, ChainKind::Cocircuit, cocircuits).unwrap(),
        )
        .unwrap();
        let inst = BbyInstance::new(m, pair, &Budget::default()).unwrap();
        assert_eq!(inst.bby_map_index(0), o("-,-"));
    }

    #[test]
    fn example_consistency() {
        let inst = example(fig1());
        let report = verify_consistency(&inst, &Scope::default()).unwrap();
        assert!(report.is_ok(), "{:?}", report.violations);
        assert_eq!(report.phrasing_mismatches, 0);
        assert!(report.checks.deletion > 0 && report.checks.contraction > 0 && report.checks.restriction > 0);
        let g = inst.matroid().ground();
        let single = Scope {
            arcs: Some(vec![g.parse_arc("+f1").unwrap()]),
            bases: Some(vec![inst.matroid().basis_index(g.parse_set("f1,f3").unwrap()).unwrap()]),
            elements: Some(vec![3]),
        };
        let report = verify_consistency(&inst, &single).unwrap();
        assert!(report.is_ok());
        assert_eq!(report.checks.deletion, 1);
        assert_eq!(report.triples_checked, 1);
    }

    #[test]
    fn mutation_is_caught_and_replays() {
        let inst = example(fig1());
        let g = inst.matroid().ground().clone();
        let b13 = inst.matroid().basis_index(g.parse_set("f1,f3").unwrap()).unwrap();
        let b12 = inst.matroid().basis_index(g.parse_set("f1,f2").unwrap()).unwrap();
        let arc = g.parse_arc("+f1").unwrap();
        let mutated = MutatedTorsor {
            inner: inst.clone(),
            overrides: HashMap::from([((arc, b13), b12)]),
        };
        let report = verify_consistency(&mutated, &Scope::default()).unwrap();
        assert_eq!(report.status, Status::Violations);
        let v = report
            .violations
            .iter()
            .find(|v| v.part == Part::Deletion && v.element == "f4")
            .expect("deletion of f4 exposes the mutation");
        assert_eq!(v.phrasing, Some(Phrasing::Both));
        assert!(replay_violation(&report.replay, v, &Budget::default()).unwrap());
    }

    #[test]
    fn duality() {
        let inst = example(fig1());
        let report = verify_duality(&inst).unwrap();
        assert!(report.is_ok(), "{report:?}");
        assert_eq!(report.bases_checked, 5);
        assert_eq!(report.arcs_checked, 40);
        let back = inst.dual().unwrap().dual().unwrap();
        assert_eq!(back.matroid(), inst.matroid());
        assert!((0..5).all(|b| back.bby_map_index(b) == inst.bby_map_index(b)));
    }

    #[test]
    fn structure_and_torsor() {
        let inst = example(fig1());
        let s = verify_action_structure(&inst);
        assert!(s.is_ok(), "{:?}", s.failures);
        assert_eq!(s.traces_checked, 40);
        let t = verify_torsor(&inst);
        assert!(t.is_ok(), "{t:?}");
        assert_eq!(t.group_order, 5);
    }

    #[test]
    fn generating_pairs() {
        let inst = example(fig1());
        let g = inst.group();
        let all: Vec<(GroupElement, usize)> = Arc::all(4).flat_map(|a| (0..5).map(move |b| (g.arc(a), b))).collect();
        assert!(check_generating_pairs(&inst, &all).unwrap());
        assert!(!check_generating_pairs(&inst, &[]).unwrap());
        let generator = g.arc(Arc::new(0, Sign::Plus));
        let loops: Vec<(GroupElement, usize)> = (0..5).map(|b| (generator.clone(), b)).collect();
        assert!(check_generating_pairs(&inst, &loops).unwrap());
        assert!(!check_generating_pairs(&inst, &loops[..1]).unwrap());
    }
}
