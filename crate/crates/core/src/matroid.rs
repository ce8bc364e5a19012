//! Regular matroids realized by totally unimodular matrices.
//!
//! A [`RegularMatroid`] keeps a full-row-rank TU realization and lazily
//! derives its bases, signed circuits and signed cocircuits. Every circuit is
//! the fundamental circuit of some basis (extend `C \ e` to a basis avoiding
//! `e`), so both families are collected from the standard forms `A_B^{-1} A`,
//! which stay integral with entries in `{-1, 0, 1}`.

use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::chains::{Chain, ElementSet, Fourientation, GroundSet, Orientation, SimpleChain, MAX_ELEMENTS};
use crate::error::{Error, Result};
use crate::linalg::{self, IntMatrix};

/// Columns up to which the exhaustive determinant check is the default.
pub const EXHAUSTIVE_TU_COLUMNS: usize = 12;

/// How [`RegularMatroid::from_matrix_with`] verifies total unimodularity.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TuCheck {
    /// Exhaustive up to [`EXHAUSTIVE_TU_COLUMNS`] columns, Ghouila-Houri beyond.
    #[default]
    Auto,
    Exhaustive,
    GhouilaHouri,
    /// Trust the caller. Only entries are checked.
    Skip,
}

/// Evidence that a matrix is not totally unimodular.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TuWitness {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    /// Determinant of the witness submatrix; `None` for a row set without an
    /// equitable signing (Ghouila-Houri).
    pub determinant: Option<i128>,
}

impl fmt::Display for TuWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.determinant {
            Some(d) => write!(
                f,
                "submatrix rows {:?} cols {:?} has determinant {d}",
                self.rows, self.cols
            ),
            None => write!(f, "rows {:?} admit no equitable signing", self.rows),
        }
    }
}

/// A totally unimodular matrix of full row rank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TuMatrix {
    rows: IntMatrix,
    ncols: usize,
}

impl TuMatrix {
    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }
}

/// Checks every square submatrix.
pub fn check_tu_exhaustive(m: &[Vec<i64>], ncols: usize) -> Result<(), TuWitness> {
    let r = m.len();
    for k in 1..=r.min(ncols) {
        for rows in (0..r).combinations(k) {
            for cols in (0..ncols).combinations(k) {
                let d = linalg::determinant(&linalg::submatrix(m, &rows, &cols));
                if d.abs() > 1 {
                    return Err(TuWitness {
                        rows,
                        cols,
                        determinant: Some(d),
                    });
                }
            }
        }
    }
    Ok(())
}

/// Ghouila-Houri: every subset of rows can be signed so that the signed sum
/// has entries in `{-1, 0, 1}`. Runs over the rows or, for wide matrices, the
/// columns, whichever is fewer.
pub fn check_tu_ghouila_houri(m: &[Vec<i64>], ncols: usize) -> Result<(), TuWitness> {
    let r = m.len();
    let transposed = ncols < r;
    let vectors: IntMatrix = if transposed {
        (0..ncols).map(|j| m.iter().map(|row| row[j]).collect()).collect()
    } else {
        m.to_vec()
    };
    let width = if transposed { r } else { ncols };
    let count = vectors.len();
    for subset in 1u32..(1 << count) {
        let members: Vec<usize> = ElementSet::from_bits(subset).iter().collect();
        let mut ok = false;
        // the first member's sign can be fixed
        for signs in 0u32..(1 << (members.len() - 1)) {
            let mut sum = vec![0i64; width];
            for (k, &v) in members.iter().enumerate() {
                let s = if k > 0 && signs >> (k - 1) & 1 == 1 { -1 } else { 1 };
                for (acc, x) in sum.iter_mut().zip(&vectors[v]) {
                    *acc += s * x;
                }
            }
            if sum.iter().all(|x| x.abs() <= 1) {
                ok = true;
                break;
            }
        }
        if !ok {
            let (rows, cols) = if transposed {
                ((0..r).collect(), members)
            } else {
                (members, (0..ncols).collect())
            };
            return Err(TuWitness {
                rows,
                cols,
                determinant: None,
            });
        }
    }
    Ok(())
}

/// A basis, as a subset of the ground set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Basis(pub ElementSet);

impl Basis {
    pub fn set(&self) -> ElementSet {
        self.0
    }

    pub fn contains(&self, e: usize) -> bool {
        self.0.contains(e)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Deletion or contraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MinorKind {
    Deletion,
    Contraction,
}

/// Kernel (circuit) side or row-space (cocircuit) side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChainKind {
    Circuit,
    Cocircuit,
}

impl ChainKind {
    pub fn dual(self) -> Self {
        match self {
            ChainKind::Circuit => ChainKind::Cocircuit,
            ChainKind::Cocircuit => ChainKind::Circuit,
        }
    }
}

impl fmt::Display for ChainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChainKind::Circuit => "circuit",
            ChainKind::Cocircuit => "cocircuit",
        })
    }
}

/// Outcome of the 3-painting dichotomy at an element.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Painting {
    /// A signed circuit through the element compatible with `F`.
    Circuit(SimpleChain),
    /// A signed cocircuit through the element compatible with `(-F)^c`.
    Cocircuit(SimpleChain),
}

/// Signed chains of one kind: supports in lexicographic order, and for each
/// support the chain whose first coefficient is `+1` followed by its negation.
#[derive(Clone, Debug, Default)]
pub struct SignedFamily {
    supports: Vec<ElementSet>,
    chains: Vec<SimpleChain>,
    index: HashMap<u32, usize>,
}

impl SignedFamily {
    fn from_positive(mut positive: Vec<SimpleChain>) -> Self {
        positive.sort_by_key(|c| c.support());
        positive.dedup_by_key(|c| c.support());
        let supports: Vec<ElementSet> = positive.iter().map(|c| c.support()).collect();
        let chains = positive.iter().flat_map(|c| [*c, c.neg()]).collect();
        let index = supports.iter().enumerate().map(|(i, s)| (s.bits(), i)).collect();
        SignedFamily {
            supports,
            chains,
            index,
        }
    }

    pub fn supports(&self) -> &[ElementSet] {
        &self.supports
    }

    /// Both signed chains of every support, closed under negation.
    pub fn chains(&self) -> &[SimpleChain] {
        &self.chains
    }

    pub fn len(&self) -> usize {
        self.supports.len()
    }

    pub fn is_empty(&self) -> bool {
        self.supports.is_empty()
    }

    pub fn support_index(&self, support: ElementSet) -> Option<usize> {
        self.index.get(&support.bits()).copied()
    }

    /// The two opposite chains on support `i`, leading `+1` first.
    pub fn pair(&self, i: usize) -> (SimpleChain, SimpleChain) {
        (self.chains[2 * i], self.chains[2 * i + 1])
    }

    pub fn contains(&self, chain: &SimpleChain) -> bool {
        self.support_index(chain.support())
            .map(|i| {
                let (a, b) = self.pair(i);
                a == *chain || b == *chain
            })
            .unwrap_or(false)
    }
}

/// Fundamental chains of one basis: for `e ∉ B` the signed circuit in
/// `B ∪ e`, for `e ∈ B` the signed cocircuit in `(E \ B) ∪ e`, each
/// normalized to coefficient `+1` at `e`, plus the support index.
#[derive(Clone, Debug)]
struct Fundamentals {
    chains: Vec<SimpleChain>,
    support: Vec<usize>,
}

#[derive(Clone, Debug)]
struct Derived {
    bases: Vec<Basis>,
    basis_index: HashMap<u32, usize>,
    fundamentals: Vec<Fundamentals>,
    circuits: SignedFamily,
    cocircuits: SignedFamily,
}

/// A regular matroid with a fixed totally unimodular realization.
#[derive(Clone, Debug)]
pub struct RegularMatroid {
    ground: GroundSet,
    matrix: TuMatrix,
    derived: OnceLock<Derived>,
}

/// A directed edge for [`RegularMatroid::from_graph`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphEdge {
    pub tail: String,
    pub head: String,
    pub name: Option<String>,
}

impl GraphEdge {
    pub fn new(tail: impl Into<String>, head: impl Into<String>, name: Option<&str>) -> Self {
        GraphEdge {
            tail: tail.into(),
            head: head.into(),
            name: name.map(str::to_string),
        }
    }
}

/// Vertices in order of first appearance and the signed incidence matrix
/// (`+1` at the head, `-1` at the tail, a zero column for a loop).
pub fn incidence_matrix(edges: &[GraphEdge]) -> (Vec<String>, IntMatrix) {
    let mut vertices: Vec<String> = Vec::new();
    let mut position = HashMap::new();
    for e in edges {
        for v in [&e.tail, &e.head] {
            if !position.contains_key(v) {
                position.insert(v.clone(), vertices.len());
                vertices.push(v.clone());
            }
        }
    }
    let mut rows = vec![vec![0i64; edges.len()]; vertices.len()];
    for (j, e) in edges.iter().enumerate() {
        if e.tail != e.head {
            rows[position[&e.tail]][j] -= 1;
            rows[position[&e.head]][j] += 1;
        }
    }
    (vertices, rows)
}

impl RegularMatroid {
    /// Matroid of an integer matrix on the ground set `e0, e1, ...`.
    pub fn from_matrix(rows: Vec<Vec<i64>>) -> Result<Self> {
        let ncols = rows.first().map(Vec::len).ok_or(Error::EmptyMatrix)?;
        RegularMatroid::from_matrix_with(GroundSet::indexed(ncols)?, rows, TuCheck::Auto)
    }

    /// Matroid of `rows` on a named ground set. Rank-deficient input is
    /// reduced to an independent subset of its rows, which is again TU.
    pub fn from_matrix_with(ground: GroundSet, rows: Vec<Vec<i64>>, check: TuCheck) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyMatrix);
        }
        let ncols = ground.len();
        for row in &rows {
            if row.len() != ncols {
                return Err(Error::LengthMismatch {
                    expected: ncols,
                    found: row.len(),
                });
            }
        }
        for (i, row) in rows.iter().enumerate() {
            if let Some(j) = row.iter().position(|x| x.abs() > 1) {
                return Err(Error::NotTotallyUnimodular(TuWitness {
                    rows: vec![i],
                    cols: vec![j],
                    determinant: Some(row[j] as i128),
                }));
            }
        }
        let verdict = match check {
            TuCheck::Skip => Ok(()),
            TuCheck::Exhaustive => check_tu_exhaustive(&rows, ncols),
            TuCheck::GhouilaHouri => check_tu_ghouila_houri(&rows, ncols),
            TuCheck::Auto if ncols <= EXHAUSTIVE_TU_COLUMNS => check_tu_exhaustive(&rows, ncols),
            TuCheck::Auto => check_tu_ghouila_houri(&rows, ncols),
        };
        verdict.map_err(Error::NotTotallyUnimodular)?;
        let keep = linalg::independent_rows(&rows, ncols);
        let reduced = keep.into_iter().map(|i| rows[i].clone()).collect();
        Ok(RegularMatroid::from_full_rank(ground, reduced))
    }

    /// Graphic matroid of a directed multigraph (loops allowed).
    pub fn from_graph(edges: &[GraphEdge]) -> Result<Self> {
        let names: Vec<String> = edges
            .iter()
            .enumerate()
            .map(|(j, e)| e.name.clone().unwrap_or_else(|| format!("e{j}")))
            .collect();
        let ground = GroundSet::new(names)?;
        let (_, rows) = incidence_matrix(edges);
        if rows.is_empty() {
            return Ok(RegularMatroid::from_full_rank(ground, Vec::new()));
        }
        RegularMatroid::from_matrix_with(ground, rows, TuCheck::Skip)
    }

    /// Internal constructor for realizations already known to be TU and of
    /// full row rank (minors, duals, reductions).
    pub(crate) fn from_full_rank(ground: GroundSet, rows: IntMatrix) -> Self {
        let ncols = ground.len();
        RegularMatroid {
            ground,
            matrix: TuMatrix { rows, ncols },
            derived: OnceLock::new(),
        }
    }

    /// Empty matroid on an empty ground set.
    pub fn empty() -> Self {
        RegularMatroid::from_full_rank(GroundSet::indexed(0).expect("empty ground set"), Vec::new())
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn matrix(&self) -> &TuMatrix {
        &self.matrix
    }

    pub fn len(&self) -> usize {
        self.ground.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ground.is_empty()
    }

    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }

    /// Populates every cache; afterwards all queries are read-only.
    pub fn freeze(&self) -> &Self {
        self.derived();
        self
    }

    fn derived(&self) -> &Derived {
        self.derived.get_or_init(|| self.derive())
    }

    fn derive(&self) -> Derived {
        let m = self.len();
        let r = self.rank();
        let rows = self.matrix.rows();
        let mut bases = Vec::new();
        let mut standard_forms = Vec::new();
        for cols in (0..m).combinations(r) {
            if let Some(s) = linalg::standard_form(rows, &cols) {
                bases.push(Basis(ElementSet::from_indices(cols.iter().copied())));
                standard_forms.push((cols, s));
            }
        }
        let mut circuit_pos = Vec::new();
        let mut cocircuit_pos = Vec::new();
        let mut raw = Vec::with_capacity(bases.len());
        for (cols, s) in &standard_forms {
            let basis = ElementSet::from_indices(cols.iter().copied());
            let mut chains = vec![SimpleChain::zero(m); m];
            for e in 0..m {
                let coeffs: Vec<i64> = if basis.contains(e) {
                    let k = cols.iter().position(|&c| c == e).expect("basis column");
                    s[k].clone()
                } else {
                    let mut v = vec![0i64; m];
                    v[e] = 1;
                    for (k, &b) in cols.iter().enumerate() {
                        v[b] = -s[k][e];
                    }
                    v
                };
                let chain = SimpleChain::from_coeffs(&coeffs).expect("TU standard form is simple");
                chains[e] = chain;
                let positive = leading_positive(chain);
                if basis.contains(e) {
                    cocircuit_pos.push(positive);
                } else {
                    circuit_pos.push(positive);
                }
            }
            raw.push((basis, chains));
        }
        let circuits = SignedFamily::from_positive(circuit_pos);
        let cocircuits = SignedFamily::from_positive(cocircuit_pos);
        let fundamentals = raw
            .into_iter()
            .map(|(basis, chains)| {
                let support = chains
                    .iter()
                    .enumerate()
                    .map(|(e, c)| {
                        let family = if basis.contains(e) { &cocircuits } else { &circuits };
                        family.support_index(c.support()).expect("fundamental chain is listed")
                    })
                    .collect();
                Fundamentals { chains, support }
            })
            .collect();
        let basis_index = bases.iter().enumerate().map(|(i, b)| (b.0.bits(), i)).collect();
        Derived {
            bases,
            basis_index,
            fundamentals,
            circuits,
            cocircuits,
        }
    }

    /// All bases in lexicographic order.
    pub fn bases(&self) -> &[Basis] {
        &self.derived().bases
    }

    pub fn basis_index(&self, set: ElementSet) -> Option<usize> {
        self.derived().basis_index.get(&set.bits()).copied()
    }

    pub fn is_basis(&self, set: ElementSet) -> bool {
        self.basis_index(set).is_some()
    }

    pub fn basis(&self, set: ElementSet) -> Result<Basis> {
        if self.is_basis(set) {
            Ok(Basis(set))
        } else {
            Err(Error::NotABasis(format!("{{{}}}", self.ground.format_set(set))))
        }
    }

    pub fn circuits(&self) -> &SignedFamily {
        &self.derived().circuits
    }

    pub fn cocircuits(&self) -> &SignedFamily {
        &self.derived().cocircuits
    }

    pub fn family(&self, kind: ChainKind) -> &SignedFamily {
        match kind {
            ChainKind::Circuit => self.circuits(),
            ChainKind::Cocircuit => self.cocircuits(),
        }
    }

    /// Every signed circuit (both signs of each circuit).
    pub fn signed_circuits(&self) -> &[SimpleChain] {
        self.circuits().chains()
    }

    /// Every signed cocircuit (both signs of each cocircuit).
    pub fn signed_cocircuits(&self) -> &[SimpleChain] {
        self.cocircuits().chains()
    }

    /// Fundamental chain of `e` for basis index `b`, coefficient `+1` at `e`,
    /// and the index of its support in the circuit family (`e ∉ B`) or the
    /// cocircuit family (`e ∈ B`).
    pub(crate) fn fundamental(&self, b: usize, e: usize) -> (SimpleChain, usize) {
        let f = &self.derived().fundamentals[b];
        (f.chains[e], f.support[e])
    }

    /// The two signed fundamental circuits of `e ∉ B`.
    pub fn fundamental_circuit(&self, basis: &Basis, e: usize) -> Result<(SimpleChain, SimpleChain)> {
        let b = self.basis_index(basis.0).ok_or_else(|| self.not_a_basis(basis.0))?;
        if basis.contains(e) {
            return Err(Error::WrongSide {
                element: self.ground.name(e).to_string(),
                expected: "outside the basis",
            });
        }
        let (c, _) = self.fundamental(b, e);
        Ok((c, c.neg()))
    }

    /// The two signed fundamental cocircuits of `e ∈ B`.
    pub fn fundamental_cocircuit(&self, basis: &Basis, e: usize) -> Result<(SimpleChain, SimpleChain)> {
        let b = self.basis_index(basis.0).ok_or_else(|| self.not_a_basis(basis.0))?;
        if !basis.contains(e) {
            return Err(Error::WrongSide {
                element: self.ground.name(e).to_string(),
                expected: "inside the basis",
            });
        }
        let (c, _) = self.fundamental(b, e);
        Ok((c, c.neg()))
    }

    pub(crate) fn not_a_basis(&self, set: ElementSet) -> Error {
        Error::NotABasis(format!("{{{}}}", self.ground.format_set(set)))
    }

    /// Elements in no basis.
    pub fn loops(&self) -> ElementSet {
        let any = self.bases().iter().fold(ElementSet::EMPTY, |acc, b| acc.union(b.0));
        self.ground.full().difference(any)
    }

    /// Elements in every basis.
    pub fn coloops(&self) -> ElementSet {
        self.bases()
            .iter()
            .fold(self.ground.full(), |acc, b| acc.intersection(b.0))
    }

    pub fn is_loop(&self, e: usize) -> bool {
        self.loops().contains(e)
    }

    pub fn is_coloop(&self, e: usize) -> bool {
        self.coloops().contains(e)
    }

    /// Connected components: classes of "some circuit contains both".
    pub fn components(&self) -> Vec<ElementSet> {
        let m = self.len();
        let mut parent: Vec<usize> = (0..m).collect();
        fn find(parent: &mut [usize], x: usize) -> usize {
            let mut root = x;
            while parent[root] != root {
                root = parent[root];
            }
            let mut y = x;
            while parent[y] != root {
                let next = parent[y];
                parent[y] = root;
                y = next;
            }
            root
        }
        for support in self.circuits().supports() {
            if let Some(first) = support.first() {
                for x in support.iter() {
                    let (a, b) = (find(&mut parent, first), find(&mut parent, x));
                    parent[a] = b;
                }
            }
        }
        let mut classes: Vec<ElementSet> = Vec::new();
        let mut class_of_root: HashMap<usize, usize> = HashMap::new();
        for x in 0..m {
            let root = find(&mut parent, x);
            let k = *class_of_root.entry(root).or_insert_with(|| {
                classes.push(ElementSet::EMPTY);
                classes.len() - 1
            });
            classes[k] = classes[k].with(x);
        }
        classes
    }

    pub fn component_of(&self, e: usize) -> ElementSet {
        self.components()
            .into_iter()
            .find(|c| c.contains(e))
            .unwrap_or(ElementSet::singleton(e))
    }

    /// Dual matroid on the same ground set, realized as `[-D^T | I]` from the
    /// standard form `[I | D]` of the first basis. Its signed circuits are
    /// exactly the signed cocircuits of `self` and vice versa.
    pub fn dual(&self) -> RegularMatroid {
        let m = self.len();
        let basis = self.bases()[0];
        let cols: Vec<usize> = basis.0.iter().collect();
        let s = linalg::standard_form(self.matrix.rows(), &cols).expect("basis has a standard form");
        let rows: IntMatrix = (0..m)
            .filter(|e| !basis.contains(*e))
            .map(|n| {
                let mut row = vec![0i64; m];
                row[n] = 1;
                for (k, &b) in cols.iter().enumerate() {
                    row[b] = -s[k][n];
                }
                row
            })
            .collect();
        RegularMatroid::from_full_rank(self.ground.clone(), rows)
    }

    /// `M \ e`: the realization with column `e` removed.
    pub fn delete(&self, e: usize) -> Result<RegularMatroid> {
        self.check_element(e)?;
        if self.is_coloop(e) {
            return Err(Error::IsColoop(self.ground.name(e).to_string()));
        }
        let rows = self
            .matrix
            .rows()
            .iter()
            .map(|r| r.iter().enumerate().filter(|&(j, _)| j != e).map(|(_, &x)| x).collect())
            .collect();
        Ok(RegularMatroid::from_full_rank(self.ground.without(e), rows))
    }

    /// `M / e`: pivot on a nonzero entry of column `e`, then drop that row and
    /// the column.
    pub fn contract(&self, e: usize) -> Result<RegularMatroid> {
        self.check_element(e)?;
        let mut rows = self.matrix.rows().to_vec();
        let Some(p) = rows.iter().position(|r| r[e] != 0) else {
            return Err(Error::IsLoop(self.ground.name(e).to_string()));
        };
        linalg::pivot(&mut rows, p, e);
        rows.remove(p);
        for r in rows.iter_mut() {
            r.remove(e);
        }
        Ok(RegularMatroid::from_full_rank(self.ground.without(e), rows))
    }

    pub fn minor(&self, kind: MinorKind, e: usize) -> Result<RegularMatroid> {
        match kind {
            MinorKind::Deletion => self.delete(e),
            MinorKind::Contraction => self.contract(e),
        }
    }

    fn check_element(&self, e: usize) -> Result<()> {
        if e < self.len() {
            Ok(())
        } else {
            Err(Error::UnknownElement(format!("#{e}")))
        }
    }

    /// 3-painting at `x`: a signed circuit through `x` compatible with `f`,
    /// or a signed cocircuit through `x` compatible with `(-f)^c`. Among
    /// several candidates the one with the smallest support wins, ties broken
    /// by chain order.
    pub fn three_painting(&self, f: &Fourientation, x: usize) -> Result<Painting> {
        self.check_element(x)?;
        if f.minus_set().contains(x) == f.plus_set().contains(x) {
            return Err(Error::PreconditionViolated(format!(
                "element {} must be oriented one way",
                self.ground.name(x)
            )));
        }
        let (circuits, cocircuits) = self.three_painting_candidates(f, x);
        let smallest = |list: Vec<SimpleChain>| list.into_iter().min_by_key(|c| (c.support().len(), *c));
        if let Some(c) = smallest(circuits) {
            return Ok(Painting::Circuit(c));
        }
        smallest(cocircuits)
            .map(Painting::Cocircuit)
            .ok_or_else(|| Error::PreconditionViolated("neither 3-painting branch is inhabited".into()))
    }

    /// Both 3-painting candidate lists, in chain order.
    pub fn three_painting_candidates(&self, f: &Fourientation, x: usize) -> (Vec<SimpleChain>, Vec<SimpleChain>) {
        let dual = f.negate().complement();
        let circuits = self
            .signed_circuits()
            .iter()
            .filter(|c| c.support().contains(x) && c.compatible_with_fourientation(f))
            .copied()
            .collect();
        let cocircuits = self
            .signed_cocircuits()
            .iter()
            .filter(|c| c.support().contains(x) && c.compatible_with_fourientation(&dual))
            .copied()
            .collect();
        (circuits, cocircuits)
    }

    /// The orientation special case: a compatible signed circuit or cocircuit
    /// through `x`.
    pub fn circuit_or_cocircuit(&self, o: &Orientation, x: usize) -> Painting {
        self.three_painting(&o.to_fourientation(), x)
            .expect("orientations are one-way everywhere")
    }

    /// Whether `p` lies in the kernel (`Circuit`) or row space (`Cocircuit`)
    /// of the realization.
    pub fn in_space(&self, p: &Chain, space: ChainKind) -> bool {
        if p.len() != self.len() {
            return false;
        }
        match space {
            ChainKind::Circuit => self
                .matrix
                .rows()
                .iter()
                .all(|row| row.iter().zip(p.coeffs()).map(|(a, b)| a * b).sum::<i64>() == 0),
            ChainKind::Cocircuit => self
                .circuits()
                .chains()
                .iter()
                .step_by(2)
                .all(|c| c.to_chain().dot(p) == 0),
        }
    }

    /// Writes `p` as a sum of signed circuits (resp. cocircuits) each agreeing
    /// in sign with `p` on its support, by repeatedly peeling off the largest
    /// multiple of a conformal chain.
    pub fn decompose(&self, p: &Chain, space: ChainKind) -> Result<Vec<SimpleChain>> {
        if !self.in_space(p, space) {
            return Err(Error::NotInSpace(match space {
                ChainKind::Circuit => "kernel",
                ChainKind::Cocircuit => "row space",
            }));
        }
        let family = self.family(space);
        let mut rest = p.clone();
        let mut parts = Vec::new();
        while !rest.is_zero() {
            let conformal = family
                .chains()
                .iter()
                .find(|c| c.support().iter().all(|e| c.coeff(e) * rest.coeff(e) > 0));
            let Some(c) = conformal else {
                return Err(Error::PreconditionViolated(
                    "no conformal chain found while decomposing".into(),
                ));
            };
            let k = c
                .support()
                .iter()
                .map(|e| rest.coeff(e).abs())
                .min()
                .expect("nonempty support");
            rest = rest.sub(&c.to_chain().scale(k));
            parts.extend(std::iter::repeat_n(*c, k as usize));
        }
        Ok(parts)
    }
}

/// The chain of `{c, -c}` whose first nonzero coefficient is `+1`.
fn leading_positive(c: SimpleChain) -> SimpleChain {
    match c.support().first() {
        Some(i) if c.coeff(i) < 0 => c.neg(),
        _ => c,
    }
}

impl PartialEq for RegularMatroid {
    /// Same ground set, bases and signed circuits; realizations may differ.
    fn eq(&self, other: &Self) -> bool {
        self.ground == other.ground
            && self.bases() == other.bases()
            && self.signed_circuits() == other.signed_circuits()
            && self.signed_cocircuits() == other.signed_cocircuits()
    }
}

/// Check applied to named-matrix input sizes.
pub fn check_size(n: usize) -> Result<()> {
    if n > MAX_ELEMENTS {
        Err(Error::TooManyElements {
            found: n,
            max: MAX_ELEMENTS,
        })
    } else {
        Ok(())
    }
}
