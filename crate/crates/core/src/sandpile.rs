//! The sandpile group `Z^E / (Λ ⊕ Λ*)`, circuit-cocircuit reversal classes,
//! `(σ, σ*)`-compatible representatives and the canonical action.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::budget::Budget;
use crate::chains::{Arc, Chain, ElementSet, GroundSet, Orientation, Sign, SimpleChain};
use crate::error::{Error, Result};
use crate::matroid::{ChainKind, Painting, RegularMatroid};
use crate::signatures::SignaturePair;
use crate::snf;

/// An element of the sandpile group in invariant-factor coordinates,
/// `0 <= coords[i] < factors[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct GroupElement(Vec<u64>);

impl GroupElement {
    pub fn coords(&self) -> &[u64] {
        &self.0
    }
}

#[derive(Clone, Debug)]
pub struct SandpileGroup {
    n: usize,
    factors: Vec<u64>,
    /// Diagonal position of each factor in the Smith form.
    positions: Vec<usize>,
    v: Vec<Vec<BigInt>>,
    v_inv: Vec<Vec<BigInt>>,
}

impl SandpileGroup {
    /// Smith normal form of the lattice spanned by every signed circuit and
    /// cocircuit.
    pub fn new(m: &RegularMatroid) -> Self {
        let n = m.len();
        let rows: Vec<Vec<i64>> = m
            .signed_circuits()
            .iter()
            .chain(m.signed_cocircuits())
            .step_by(2)
            .map(|c| c.to_chain().coeffs().to_vec())
            .collect();
        let smith = snf::smith_normal_form(&rows, n);
        let mut factors = Vec::new();
        let mut positions = Vec::new();
        for (t, d) in smith.diagonal.iter().enumerate() {
            assert!(!d.is_zero(), "circuits and cocircuits span a full-rank lattice");
            if *d > BigInt::from(1) {
                factors.push(d.to_u64().expect("group order fits in u64"));
                positions.push(t);
            }
        }
        SandpileGroup {
            n,
            factors,
            positions,
            v: smith.v,
            v_inv: smith.v_inv,
        }
    }

    /// Invariant factors `d_1 | d_2 | ...`, all greater than one.
    pub fn invariant_factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn order(&self) -> u64 {
        self.factors.iter().product()
    }

    /// Largest invariant factor; it annihilates every element.
    pub fn exponent(&self) -> u64 {
        self.factors.last().copied().unwrap_or(1)
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement(vec![0; self.factors.len()])
    }

    /// `[p]` for an integral chain `p`.
    pub fn reduce(&self, p: &Chain) -> GroupElement {
        assert_eq!(p.len(), self.n, "chain length");
        GroupElement(
            self.positions
                .iter()
                .zip(&self.factors)
                .map(|(&t, &d)| {
                    let x: BigInt = p
                        .coeffs()
                        .iter()
                        .zip(&self.v)
                        .map(|(&c, row)| BigInt::from(c) * &row[t])
                        .sum();
                    x.mod_floor(&BigInt::from(d)).to_u64().expect("reduced coordinate")
                })
                .collect(),
        )
    }

    pub fn arc(&self, arc: Arc) -> GroupElement {
        self.reduce(&arc.to_chain(self.n).to_chain())
    }

    /// A chain in the class `g`, each coefficient in `(-exp/2, exp/2]`.
    pub fn lift(&self, g: &GroupElement) -> Chain {
        let exp = BigInt::from(self.exponent());
        let coeffs = (0..self.n)
            .map(|e| {
                let x: BigInt = self
                    .positions
                    .iter()
                    .zip(&g.0)
                    .map(|(&t, &c)| BigInt::from(c) * &self.v_inv[t][e])
                    .sum();
                let mut r = x.mod_floor(&exp);
                if &r * 2 > exp {
                    r -= &exp;
                }
                r.to_i64().expect("balanced coefficient")
            })
            .collect();
        Chain::from_coeffs(coeffs)
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        GroupElement(
            a.0.iter()
                .zip(&b.0)
                .zip(&self.factors)
                .map(|((x, y), d)| (x + y) % d)
                .collect(),
        )
    }

    pub fn neg(&self, a: &GroupElement) -> GroupElement {
        GroupElement(a.0.iter().zip(&self.factors).map(|(x, d)| (d - x) % d).collect())
    }

    /// Mixed-radix index in `0..order`.
    pub fn index_of(&self, g: &GroupElement) -> usize {
        g.0.iter()
            .zip(&self.factors)
            .fold(0usize, |acc, (&c, &d)| acc * d as usize + c as usize)
    }

    pub fn element(&self, mut index: usize) -> GroupElement {
        let mut coords = vec![0u64; self.factors.len()];
        for (c, &d) in coords.iter_mut().zip(&self.factors).rev() {
            *c = (index % d as usize) as u64;
            index /= d as usize;
        }
        GroupElement(coords)
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.order() as usize).map(|i| self.element(i))
    }
}

/// The partition of all orientations into circuit-cocircuit reversal
/// classes, optionally with the `(σ, σ*)`-compatible member of each class.
#[derive(Clone, Debug)]
pub struct ReversalClasses {
    n: usize,
    class_of: Vec<u32>,
    members: Vec<Vec<Orientation>>,
    representatives: Vec<Orientation>,
}

impl ReversalClasses {
    /// Breadth-first closure under reversing compatible signed circuits and
    /// cocircuits. Classes are numbered by their smallest member.
    pub fn compute(m: &RegularMatroid, budget: &Budget) -> Result<Self> {
        let n = m.len();
        Budget::check("orientations", 1u128 << n, budget.max_orientations)?;
        let chains: Vec<SimpleChain> = m
            .signed_circuits()
            .iter()
            .chain(m.signed_cocircuits())
            .copied()
            .collect();
        let mut class_of = vec![u32::MAX; 1 << n];
        let mut members = Vec::new();
        for start in Orientation::all(n) {
            if class_of[start.index()] != u32::MAX {
                continue;
            }
            let id = members.len() as u32;
            class_of[start.index()] = id;
            let mut class = vec![start];
            let mut head = 0;
            while head < class.len() {
                let o = class[head];
                head += 1;
                for c in chains.iter().filter(|c| c.compatible_with(&o)) {
                    let next = o.reverse(c.support());
                    if class_of[next.index()] == u32::MAX {
                        class_of[next.index()] = id;
                        class.push(next);
                    }
                }
            }
            class.sort();
            members.push(class);
            budget.check_time()?;
        }
        Ok(ReversalClasses {
            n,
            class_of,
            members,
            representatives: Vec::new(),
        })
    }

    /// Selects the unique `(σ, σ*)`-compatible member of every class.
    pub fn attach(&mut self, m: &RegularMatroid, pair: &SignaturePair) -> Result<()> {
        if !pair.is_triangulating(m) {
            return Err(Error::NotTriangulating(
                "the pair fails the triangulating condition".into(),
            ));
        }
        let mut reps = Vec::with_capacity(self.members.len());
        for class in &self.members {
            let compatible: Vec<&Orientation> = class.iter().filter(|o| is_sigma_compatible(m, pair, o)).collect();
            match compatible.as_slice() {
                [one] => reps.push(**one),
                _ => {
                    return Err(Error::NotTriangulating(format!(
                        "class of {} has {} compatible members",
                        class[0],
                        compatible.len()
                    )))
                }
            }
        }
        self.representatives = reps;
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn class_of(&self, o: &Orientation) -> usize {
        assert_eq!(o.len(), self.n, "orientation length");
        self.class_of[o.index()] as usize
    }

    pub fn members(&self, class: usize) -> &[Orientation] {
        &self.members[class]
    }

    pub fn has_representatives(&self) -> bool {
        !self.representatives.is_empty() || self.members.is_empty()
    }

    pub fn representative(&self, class: usize) -> Orientation {
        self.representatives[class]
    }

    /// `O°`, the compatible member of the class of `o`.
    pub fn representative_of(&self, o: &Orientation) -> Orientation {
        self.representatives[self.class_of(o)]
    }

    pub fn representatives(&self) -> &[Orientation] {
        &self.representatives
    }
}

/// Every compatible signed circuit lies in `σ` and every compatible signed
/// cocircuit in `σ*`.
pub fn is_sigma_compatible(m: &RegularMatroid, pair: &SignaturePair, o: &Orientation) -> bool {
    m.signed_circuits()
        .iter()
        .filter(|c| c.compatible_with(o))
        .all(|c| pair.circuit().contains(c))
        && m.signed_cocircuits()
            .iter()
            .filter(|c| c.compatible_with(o))
            .all(|c| pair.cocircuit().contains(c))
}

/// `O°` by scanning the explicit class of `o`.
pub fn compatible_representative(
    m: &RegularMatroid,
    pair: &SignaturePair,
    o: &Orientation,
    budget: &Budget,
) -> Result<Orientation> {
    let mut classes = ReversalClasses::compute(m, budget)?;
    classes.attach(m, pair)?;
    Ok(classes.representative_of(o))
}

/// `O°` without class tables: search for pairwise disjoint compatible signed
/// circuits and cocircuits outside the signatures whose joint reversal is
/// `(σ, σ*)`-compatible.
pub fn greedy_representative(m: &RegularMatroid, pair: &SignaturePair, o: &Orientation) -> Result<Orientation> {
    let candidates: Vec<SimpleChain> = m
        .signed_circuits()
        .iter()
        .filter(|c| c.compatible_with(o) && !pair.circuit().contains(c))
        .chain(
            m.signed_cocircuits()
                .iter()
                .filter(|c| c.compatible_with(o) && !pair.cocircuit().contains(c)),
        )
        .copied()
        .collect();
    fn search(
        m: &RegularMatroid,
        pair: &SignaturePair,
        candidates: &[SimpleChain],
        from: usize,
        used: ElementSet,
        current: Orientation,
    ) -> Option<Orientation> {
        if is_sigma_compatible(m, pair, &current) {
            return Some(current);
        }
        for (i, c) in candidates.iter().enumerate().skip(from) {
            if c.support().is_disjoint(used) {
                let found = search(
                    m,
                    pair,
                    candidates,
                    i + 1,
                    used.union(c.support()),
                    current.reverse(c.support()),
                );
                if found.is_some() {
                    return found;
                }
            }
        }
        None
    }
    search(m, pair, &candidates, 0, ElementSet::EMPTY, *o)
        .ok_or_else(|| Error::NotTriangulating(format!("no disjoint reversal of {o} is compatible")))
}

/// `[arc] · O`: make `O` incompatible with the arc (reversing a compatible
/// signed circuit or cocircuit through it if needed), flip the arc's element
/// and return the representative of the resulting class.
pub fn canonical_arc_action(m: &RegularMatroid, classes: &ReversalClasses, arc: Arc, o: &Orientation) -> Orientation {
    let f = arc.element;
    let flipped = if o.sign(f) == arc.sign {
        let chain = match m.circuit_or_cocircuit(o, f) {
            Painting::Circuit(c) | Painting::Cocircuit(c) => c,
        };
        o.reverse(chain.support().without(f))
    } else {
        o.flip(f)
    };
    classes.representative_of(&flipped)
}

/// `[arc] · [O]` on classes: flip the arc's element in any member of the
/// class compatible with the reversed arc. `None` if no such member exists.
pub fn class_arc_action(classes: &ReversalClasses, arc: Arc, class: usize) -> Option<usize> {
    classes
        .members(class)
        .iter()
        .find(|o| o.sign(arc.element) == -arc.sign)
        .map(|o| classes.class_of(&o.flip(arc.element)))
}

/// Acts by an integral chain, one arc at a time.
pub fn chain_action(m: &RegularMatroid, classes: &ReversalClasses, p: &Chain, o: &Orientation) -> Orientation {
    let mut current = classes.representative_of(o);
    for (e, &c) in p.coeffs().iter().enumerate() {
        let Some(sign) = Sign::of(c) else { continue };
        for _ in 0..c.unsigned_abs() {
            current = canonical_arc_action(m, classes, Arc::new(e, sign), &current);
        }
    }
    current
}

/// `s · O` for a group element, through a lift of `s` to a chain.
pub fn canonical_action(
    m: &RegularMatroid,
    group: &SandpileGroup,
    classes: &ReversalClasses,
    s: &GroupElement,
    o: &Orientation,
) -> Orientation {
    chain_action(m, classes, &group.lift(s), o)
}

/// A reversal step of the three-step description of an arc action.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Reversal {
    pub kind: ChainKind,
    pub chain: SimpleChain,
}

/// Optional reversal, flip of the arc's element, optional reversal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Decomposition {
    pub pre: Option<Reversal>,
    pub post: Option<Reversal>,
}

/// The four structural conditions on a decomposition `O1 -> O2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct StructureConditions {
    /// A first reversal happens iff the arc is compatible with `O1`.
    pub a: bool,
    /// A last reversal happens iff the reversed arc is compatible with `O2`.
    pub b: bool,
    /// Two reversals are one circuit and one cocircuit.
    pub c: bool,
    /// With two reversals `C`, `C*`: `C ∩ C* = {f, g}` and
    /// `O2 = reverse((C ∪ C*) \ g, O1)`.
    pub d: bool,
}

impl StructureConditions {
    pub fn all(&self) -> bool {
        self.a && self.b && self.c && self.d
    }
}

fn reversals_through(m: &RegularMatroid, f: usize, o: &Orientation) -> Vec<Reversal> {
    let mut out = Vec::new();
    for (kind, chains) in [
        (ChainKind::Circuit, m.signed_circuits()),
        (ChainKind::Cocircuit, m.signed_cocircuits()),
    ] {
        out.extend(
            chains
                .iter()
                .filter(|c| c.support().contains(f) && c.compatible_with(o))
                .map(|&chain| Reversal { kind, chain }),
        );
    }
    out
}

/// Every way of reaching `o2` from `o1` by an optional compatible reversal
/// through `f`, the flip of `f`, and an optional compatible reversal through
/// `f`.
pub fn decompositions(m: &RegularMatroid, arc: Arc, o1: &Orientation, o2: &Orientation) -> Vec<Decomposition> {
    let f = arc.element;
    let mut pres = vec![None];
    pres.extend(reversals_through(m, f, o1).into_iter().map(Some));
    let mut out = Vec::new();
    for pre in pres {
        let after_pre = pre.map_or(*o1, |r| o1.reverse(r.chain.support()));
        let flipped = after_pre.flip(f);
        let mut posts = vec![None];
        posts.extend(reversals_through(m, f, &flipped).into_iter().map(Some));
        for post in posts {
            let end = post.map_or(flipped, |r| flipped.reverse(r.chain.support()));
            if end == *o2 {
                out.push(Decomposition { pre, post });
            }
        }
    }
    out
}

impl Decomposition {
    pub fn conditions(&self, arc: Arc, o1: &Orientation, o2: &Orientation) -> StructureConditions {
        let f = arc.element;
        let a = self.pre.is_some() == (o1.sign(f) == arc.sign);
        let b = self.post.is_some() == (o2.sign(f) == -arc.sign);
        let (c, d) = match (self.pre, self.post) {
            (Some(p), Some(q)) => {
                let mixed = p.kind != q.kind;
                let both = p.chain.support().intersection(q.chain.support());
                let d = mixed
                    && both.len() == 2
                    && both.contains(f)
                    && both
                        .without(f)
                        .first()
                        .map(|g| *o2 == o1.reverse(p.chain.support().union(q.chain.support()).without(g)))
                        .unwrap_or(false);
                (mixed, d)
            }
            _ => (true, true),
        };
        StructureConditions { a, b, c, d }
    }
}

/// The canonical action of an arc on a representative, with its three-step
/// decomposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionTrace {
    pub arc: Arc,
    pub start: Orientation,
    pub end: Orientation,
    /// First decomposition meeting all four conditions, else the first one
    /// found, else `None`.
    pub decomposition: Option<Decomposition>,
    pub conditions: StructureConditions,
    /// Every valid decomposition, conforming or not.
    pub all: Vec<Decomposition>,
}

impl ActionTrace {
    pub fn is_valid(&self) -> bool {
        self.decomposition.is_some() && self.conditions.all()
    }

    pub fn to_json(&self, ground: &GroundSet) -> Value {
        let step = |r: Option<Reversal>| match r {
            Some(r) => json!({"kind": r.kind.to_string(), "chain": ground.format_chain(&r.chain)}),
            None => json!({"kind": "none"}),
        };
        let d = self.decomposition.unwrap_or_default();
        json!({
            "pre": step(d.pre),
            "flip": ground.format_arc(self.arc),
            "post": step(d.post),
            "start": self.start.to_string(),
            "end": self.end.to_string(),
            "conditions": self.conditions,
        })
    }
}

pub fn arc_action_trace(m: &RegularMatroid, classes: &ReversalClasses, arc: Arc, o1: &Orientation) -> ActionTrace {
    trace_between(m, arc, o1, &canonical_arc_action(m, classes, arc, o1))
}

/// The decompositions of a prescribed step `o1 -> end` under `arc`.
pub fn trace_between(m: &RegularMatroid, arc: Arc, o1: &Orientation, end: &Orientation) -> ActionTrace {
    let end = *end;
    let all = decompositions(m, arc, o1, &end);
    let chosen = all
        .iter()
        .find(|d| d.conditions(arc, o1, &end).all())
        .or_else(|| all.first())
        .copied();
    let conditions = chosen.map_or(
        StructureConditions {
            a: false,
            b: false,
            c: false,
            d: false,
        },
        |d| d.conditions(arc, o1, &end),
    );
    ActionTrace {
        arc,
        start: *o1,
        end,
        decomposition: chosen,
        conditions,
        all,
    }
}
