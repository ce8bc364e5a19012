//! Integral 1-chains, orientations and fourientations over a fixed ground set.
//!
//! Every value here is indexed by positions `0..n` of a [`GroundSet`]; the
//! ground set's order is the coordinate order of all chains. Sets of elements
//! are bitmasks ([`ElementSet`]), which caps ground sets at [`MAX_ELEMENTS`].

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported ground set.
pub const MAX_ELEMENTS: usize = 20;

/// A subset of the ground set, stored as a bitmask over element positions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ElementSet(u32);

impl ElementSet {
    pub const EMPTY: ElementSet = ElementSet(0);

    pub fn from_bits(bits: u32) -> Self {
        ElementSet(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn full(n: usize) -> Self {
        if n >= 32 {
            ElementSet(u32::MAX)
        } else {
            ElementSet((1u32 << n) - 1)
        }
    }

    pub fn singleton(i: usize) -> Self {
        ElementSet(1 << i)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        ElementSet(indices.into_iter().fold(0, |acc, i| acc | (1 << i)))
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn with(self, i: usize) -> Self {
        ElementSet(self.0 | 1 << i)
    }

    pub fn without(self, i: usize) -> Self {
        ElementSet(self.0 & !(1 << i))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: Self) -> Self {
        ElementSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        ElementSet(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        ElementSet(self.0 & !other.0)
    }

    /// Complement inside a ground set of size `n`.
    pub fn complement(self, n: usize) -> Self {
        ElementSet(!self.0 & ElementSet::full(n).0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: Self) -> bool {
        self.0 & other.0 == 0
    }

    pub fn first(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }

    /// Drops position `i` and shifts the higher positions down by one.
    pub fn remove_position(self, i: usize) -> Self {
        ElementSet(compact_bits(self.0, i))
    }

    /// Inverse of [`ElementSet::remove_position`]: opens an empty slot at `i`.
    pub fn insert_position(self, i: usize) -> Self {
        let low = self.0 & ((1u32 << i) - 1);
        let high = (self.0 >> i) << (i + 1);
        ElementSet(low | high)
    }
}

/// Lexicographic order of the sorted index lists.
impl Ord for ElementSet {
    fn cmp(&self, other: &Self) -> Ordering {
        let (mut a, mut b) = (self.0, other.0);
        loop {
            if a == b {
                return Ordering::Equal;
            }
            if a == 0 {
                return Ordering::Less;
            }
            if b == 0 {
                return Ordering::Greater;
            }
            let (la, lb) = (a.trailing_zeros(), b.trailing_zeros());
            if la != lb {
                return la.cmp(&lb);
            }
            a &= a - 1;
            b &= b - 1;
        }
    }
}

impl PartialOrd for ElementSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn compact_bits(bits: u32, i: usize) -> u32 {
    let low = bits & ((1u32 << i) - 1);
    let high = if i + 1 >= 32 { 0 } else { (bits >> (i + 1)) << i };
    low | high
}

/// Named, ordered ground set. The order is the coordinate order of every chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundSet {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl GroundSet {
    pub fn new<S: Into<String>, I: IntoIterator<Item = S>>(names: I) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.len() > MAX_ELEMENTS {
            return Err(Error::TooManyElements {
                found: names.len(),
                max: MAX_ELEMENTS,
            });
        }
        let mut index = HashMap::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            if name.is_empty() || name.contains(|c: char| c.is_whitespace() || ",:{}+-".contains(c)) {
                return Err(Error::parse(0, format!("invalid element name `{name}`")));
            }
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::DuplicateElement(name.clone()));
            }
        }
        Ok(GroundSet { names, index })
    }

    /// Ground set `e0, e1, ..., e{n-1}`.
    pub fn indexed(n: usize) -> Result<Self> {
        GroundSet::new((0..n).map(|i| format!("e{i}")))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn position(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownElement(name.to_string()))
    }

    pub fn full(&self) -> ElementSet {
        ElementSet::full(self.len())
    }

    /// The ground set with element `i` removed.
    pub fn without(&self, i: usize) -> GroundSet {
        let names = self
            .names
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, n)| n.clone());
        GroundSet::new(names).expect("subset of a valid ground set")
    }

    pub fn format_set(&self, set: ElementSet) -> String {
        set.iter().map(|i| self.name(i)).collect::<Vec<_>>().join(",")
    }

    /// Parses `f1,f3` (braces and whitespace tolerated).
    pub fn parse_set(&self, text: &str) -> Result<ElementSet> {
        let trimmed = text.trim().trim_start_matches('{').trim_end_matches('}');
        let mut set = ElementSet::EMPTY;
        for token in trimmed.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            set = set.with(self.position(token)?);
        }
        Ok(set)
    }

    /// Named form of a simple chain, e.g. `+f1-f2+f3`; the zero chain is `0`.
    pub fn format_chain(&self, chain: &SimpleChain) -> String {
        if chain.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for i in chain.support().iter() {
            out.push(if chain.coeff(i) > 0 { '+' } else { '-' });
            out.push_str(self.name(i));
        }
        out
    }

    /// Parses the named form produced by [`GroundSet::format_chain`].
    pub fn parse_chain(&self, text: &str) -> Result<SimpleChain> {
        let text: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let mut chain = SimpleChain::zero(self.len());
        if text == "0" {
            return Ok(chain);
        }
        let mut rest = text.as_str();
        if rest.is_empty() {
            return Err(Error::parse(0, "empty chain"));
        }
        while !rest.is_empty() {
            let sign = match rest.as_bytes()[0] {
                b'+' => Sign::Plus,
                b'-' => Sign::Minus,
                _ => return Err(Error::parse(0, format!("expected sign in chain `{text}`"))),
            };
            rest = &rest[1..];
            let end = rest.find(['+', '-']).unwrap_or(rest.len());
            let i = self.position(&rest[..end])?;
            if chain.support().contains(i) {
                return Err(Error::parse(0, format!("element repeated in chain `{text}`")));
            }
            chain = chain.with_coeff(i, sign);
            rest = &rest[end..];
        }
        Ok(chain)
    }

    pub fn format_arc(&self, arc: Arc) -> String {
        format!("{}{}", arc.sign.symbol(), self.name(arc.element))
    }

    /// Parses `+f1` / `-f1`; a bare name means the positive arc.
    pub fn parse_arc(&self, text: &str) -> Result<Arc> {
        let text = text.trim();
        let (sign, name) = match text.as_bytes().first() {
            Some(b'+') => (Sign::Plus, &text[1..]),
            Some(b'-') => (Sign::Minus, &text[1..]),
            _ => (Sign::Plus, text),
        };
        Ok(Arc::new(self.position(name)?, sign))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Minus,
    Plus,
}

impl std::ops::Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        match self {
            Sign::Minus => Sign::Plus,
            Sign::Plus => Sign::Minus,
        }
    }
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Minus => -1,
            Sign::Plus => 1,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Minus => '-',
            Sign::Plus => '+',
        }
    }

    pub fn of(value: i64) -> Option<Sign> {
        match value.signum() {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }
}

/// An arc: a simple chain with a single nonzero entry, `sign * element`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Arc {
    pub element: usize,
    pub sign: Sign,
}

impl std::ops::Neg for Arc {
    type Output = Arc;

    fn neg(self) -> Arc {
        Arc::new(self.element, -self.sign)
    }
}

impl Arc {
    pub fn new(element: usize, sign: Sign) -> Self {
        Arc { element, sign }
    }

    pub fn to_chain(self, n: usize) -> SimpleChain {
        SimpleChain::zero(n).with_coeff(self.element, self.sign)
    }

    /// Position in the order of [`Arc::all`].
    pub fn index(self) -> usize {
        2 * self.element + usize::from(self.sign == Sign::Minus)
    }

    /// All `2n` arcs, `+e0, -e0, +e1, ...`.
    pub fn all(n: usize) -> impl Iterator<Item = Arc> {
        (0..n).flat_map(|e| [Arc::new(e, Sign::Plus), Arc::new(e, Sign::Minus)])
    }
}

/// An integral 1-chain.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Chain(Vec<i64>);

impl Chain {
    pub fn zero(n: usize) -> Self {
        Chain(vec![0; n])
    }

    pub fn from_coeffs(coeffs: Vec<i64>) -> Self {
        Chain(coeffs)
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coeff(&self, i: usize) -> i64 {
        self.0[i]
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn support(&self) -> ElementSet {
        ElementSet::from_indices(self.0.iter().enumerate().filter(|(_, &c)| c != 0).map(|(i, _)| i))
    }

    /// The chain on `E \ e` with the remaining coefficients unchanged.
    pub fn restrict(&self, e: usize) -> Result<Chain> {
        if e >= self.len() {
            return Err(Error::UnknownElement(format!("#{e}")));
        }
        let mut coeffs = self.0.clone();
        coeffs.remove(e);
        Ok(Chain(coeffs))
    }

    pub fn add(&self, other: &Chain) -> Chain {
        Chain(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Chain) -> Chain {
        Chain(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: i64) -> Chain {
        Chain(self.0.iter().map(|a| a * k).collect())
    }

    pub fn neg(&self) -> Chain {
        self.scale(-1)
    }

    pub fn dot(&self, other: &Chain) -> i64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn l1_norm(&self) -> i64 {
        self.0.iter().map(|c| c.abs()).sum()
    }

    pub fn to_simple(&self) -> Result<SimpleChain> {
        SimpleChain::from_coeffs(&self.0)
    }

    pub fn parse(text: &str) -> Result<Chain> {
        let coeffs = split_fields(text)
            .map(|t| {
                t.parse::<i64>()
                    .map_err(|_| Error::parse(0, format!("bad chain coefficient `{t}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Chain(coeffs))
    }
}

impl fmt::Display for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|&c| if c > 0 { format!("+{c}") } else { c.to_string() })
            .collect();
        write!(f, "{}", parts.join(","))
    }
}

fn split_fields(text: &str) -> impl Iterator<Item = &str> {
    text.trim()
        .trim_start_matches('(')
        .trim_end_matches(')')
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
}

/// A 1-chain with coefficients in `{-1, 0, +1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SimpleChain {
    len: u8,
    pos: u32,
    neg: u32,
}

impl SimpleChain {
    pub fn zero(n: usize) -> Self {
        debug_assert!(n <= 32);
        SimpleChain {
            len: n as u8,
            pos: 0,
            neg: 0,
        }
    }

    /// From positive and negative parts; the two must be disjoint.
    pub fn from_parts(n: usize, pos: ElementSet, neg: ElementSet) -> Self {
        assert!(pos.is_disjoint(neg), "positive and negative parts overlap");
        SimpleChain {
            len: n as u8,
            pos: pos.bits(),
            neg: neg.bits(),
        }
    }

    pub fn from_coeffs(coeffs: &[i64]) -> Result<Self> {
        if coeffs.len() > MAX_ELEMENTS {
            return Err(Error::TooManyElements {
                found: coeffs.len(),
                max: MAX_ELEMENTS,
            });
        }
        let mut chain = SimpleChain::zero(coeffs.len());
        for (i, &c) in coeffs.iter().enumerate() {
            match c {
                0 => {}
                1 => chain.pos |= 1 << i,
                -1 => chain.neg |= 1 << i,
                other => return Err(Error::NotSimple(other)),
            }
        }
        Ok(chain)
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn positive(&self) -> ElementSet {
        ElementSet(self.pos)
    }

    pub fn negative(&self) -> ElementSet {
        ElementSet(self.neg)
    }

    pub fn support(&self) -> ElementSet {
        ElementSet(self.pos | self.neg)
    }

    pub fn is_zero(&self) -> bool {
        self.pos | self.neg == 0
    }

    pub fn coeff(&self, i: usize) -> i64 {
        if self.pos >> i & 1 == 1 {
            1
        } else if self.neg >> i & 1 == 1 {
            -1
        } else {
            0
        }
    }

    pub fn sign_at(&self, i: usize) -> Option<Sign> {
        Sign::of(self.coeff(i))
    }

    pub(crate) fn with_coeff(mut self, i: usize, sign: Sign) -> Self {
        let bit = 1 << i;
        self.pos &= !bit;
        self.neg &= !bit;
        match sign {
            Sign::Plus => self.pos |= bit,
            Sign::Minus => self.neg |= bit,
        }
        self
    }

    pub fn neg(&self) -> Self {
        SimpleChain {
            len: self.len,
            pos: self.neg,
            neg: self.pos,
        }
    }

    /// Drops coordinate `e`.
    pub fn restrict(&self, e: usize) -> Self {
        SimpleChain {
            len: self.len - 1,
            pos: compact_bits(self.pos, e),
            neg: compact_bits(self.neg, e),
        }
    }

    /// Chain on `E` that vanishes at the inserted coordinate `e`.
    pub fn extend_at(&self, e: usize) -> Self {
        SimpleChain {
            len: self.len + 1,
            pos: ElementSet(self.pos).insert_position(e).bits(),
            neg: ElementSet(self.neg).insert_position(e).bits(),
        }
    }

    pub fn to_chain(&self) -> Chain {
        Chain((0..self.len()).map(|i| self.coeff(i)).collect())
    }

    pub fn dot(&self, other: &SimpleChain) -> i64 {
        let agree = (self.pos & other.pos) | (self.neg & other.neg);
        let disagree = (self.pos & other.neg) | (self.neg & other.pos);
        agree.count_ones() as i64 - disagree.count_ones() as i64
    }

    /// Compatibility with an orientation: every nonzero coefficient has the
    /// orientation's sign.
    pub fn compatible_with(&self, o: &Orientation) -> bool {
        self.pos & !o.plus == 0 && self.neg & o.plus == 0
    }

    /// Compatibility with a fourientation: the sign of every nonzero
    /// coefficient is contained in the state of its element.
    pub fn compatible_with_fourientation(&self, f: &Fourientation) -> bool {
        self.pos & !f.plus == 0 && self.neg & !f.minus == 0
    }

    pub fn parse(text: &str) -> Result<Self> {
        Chain::parse(text)?.to_simple()
    }
}

/// Chains are ordered by support (lexicographically), then by coefficients.
impl Ord for SimpleChain {
    fn cmp(&self, other: &Self) -> Ordering {
        self.support()
            .cmp(&other.support())
            .then_with(|| {
                let a: Vec<i64> = self.support().iter().map(|i| self.coeff(i)).collect();
                let b: Vec<i64> = other.support().iter().map(|i| other.coeff(i)).collect();
                b.cmp(&a)
            })
            .then_with(|| self.len.cmp(&other.len))
    }
}

impl PartialOrd for SimpleChain {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SimpleChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.to_chain(), f)
    }
}

/// `compatible(p, F)` for an arbitrary integral chain.
pub fn compatible(p: &Chain, f: &Fourientation) -> bool {
    p.coeffs().iter().enumerate().all(|(i, &c)| match c.signum() {
        0 => true,
        1 => f.state(i).contains(Sign::Plus),
        _ => f.state(i).contains(Sign::Minus),
    })
}

/// A total map `E -> {-, +}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Orientation {
    len: u8,
    plus: u32,
}

impl Orientation {
    /// Orientation whose positive elements are `plus`.
    pub fn from_plus_set(n: usize, plus: ElementSet) -> Self {
        Orientation {
            len: n as u8,
            plus: plus.bits() & ElementSet::full(n).bits(),
        }
    }

    pub fn from_signs(signs: &[Sign]) -> Self {
        let plus = ElementSet::from_indices(
            signs
                .iter()
                .enumerate()
                .filter(|(_, &s)| s == Sign::Plus)
                .map(|(i, _)| i),
        );
        Orientation::from_plus_set(signs.len(), plus)
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn plus_set(&self) -> ElementSet {
        ElementSet(self.plus)
    }

    /// Dense index in `0..2^n`, equal to the bitmask of positive elements.
    pub fn index(&self) -> usize {
        self.plus as usize
    }

    pub fn sign(&self, i: usize) -> Sign {
        if self.plus >> i & 1 == 1 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn signs(&self) -> Vec<Sign> {
        (0..self.len()).map(|i| self.sign(i)).collect()
    }

    pub fn flip(&self, i: usize) -> Self {
        Orientation {
            len: self.len,
            plus: self.plus ^ (1 << i),
        }
    }

    /// Switches the sign of every element of `set`.
    pub fn reverse(&self, set: ElementSet) -> Self {
        Orientation {
            len: self.len,
            plus: self.plus ^ set.bits(),
        }
    }

    pub fn restrict(&self, e: usize) -> Self {
        Orientation {
            len: self.len - 1,
            plus: compact_bits(self.plus, e),
        }
    }

    pub fn negate(&self) -> Self {
        self.reverse(ElementSet::full(self.len()))
    }

    pub fn to_chain(&self) -> SimpleChain {
        SimpleChain {
            len: self.len,
            pos: self.plus,
            neg: !self.plus & ElementSet::full(self.len()).bits(),
        }
    }

    pub fn to_fourientation(&self) -> Fourientation {
        let full = ElementSet::full(self.len()).bits();
        Fourientation {
            len: self.len,
            plus: self.plus,
            minus: !self.plus & full,
        }
    }

    /// All `2^n` orientations in index order.
    pub fn all(n: usize) -> impl Iterator<Item = Orientation> {
        (0..1u32 << n).map(move |bits| Orientation {
            len: n as u8,
            plus: bits,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let signs = split_fields(text)
            .map(|t| match t {
                "+" => Ok(Sign::Plus),
                "-" | "−" => Ok(Sign::Minus),
                other => Err(Error::parse(0, format!("bad orientation entry `{other}`"))),
            })
            .collect::<Result<Vec<_>>>()?;
        if signs.len() > MAX_ELEMENTS {
            return Err(Error::TooManyElements {
                found: signs.len(),
                max: MAX_ELEMENTS,
            });
        }
        Ok(Orientation::from_signs(&signs))
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = (0..self.len()).map(|i| self.sign(i).symbol().to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// One of the four states of a fourientation: a subset of `{-, +}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FourState {
    Empty,
    Minus,
    Plus,
    Both,
}

impl FourState {
    fn bits(self) -> (bool, bool) {
        match self {
            FourState::Empty => (false, false),
            FourState::Minus => (true, false),
            FourState::Plus => (false, true),
            FourState::Both => (true, true),
        }
    }

    fn from_bits(minus: bool, plus: bool) -> Self {
        match (minus, plus) {
            (false, false) => FourState::Empty,
            (true, false) => FourState::Minus,
            (false, true) => FourState::Plus,
            (true, true) => FourState::Both,
        }
    }

    pub fn contains(self, sign: Sign) -> bool {
        let (m, p) = self.bits();
        match sign {
            Sign::Minus => m,
            Sign::Plus => p,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            FourState::Empty => "0",
            FourState::Minus => "-",
            FourState::Plus => "+",
            FourState::Both => "±",
        }
    }
}

/// A total map `E -> {∅, -, +, ±}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fourientation {
    len: u8,
    minus: u32,
    plus: u32,
}

impl Fourientation {
    pub fn from_states(states: &[FourState]) -> Self {
        let mut f = Fourientation::empty(states.len());
        for (i, s) in states.iter().enumerate() {
            f = f.with_state(i, *s);
        }
        f
    }

    pub fn from_parts(n: usize, minus: ElementSet, plus: ElementSet) -> Self {
        let full = ElementSet::full(n).bits();
        Fourientation {
            len: n as u8,
            minus: minus.bits() & full,
            plus: plus.bits() & full,
        }
    }

    /// Every element unoriented.
    pub fn empty(n: usize) -> Self {
        Fourientation {
            len: n as u8,
            minus: 0,
            plus: 0,
        }
    }

    /// Every element bioriented.
    pub fn all_bioriented(n: usize) -> Self {
        let full = ElementSet::full(n).bits();
        Fourientation {
            len: n as u8,
            minus: full,
            plus: full,
        }
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn minus_set(&self) -> ElementSet {
        ElementSet(self.minus)
    }

    pub fn plus_set(&self) -> ElementSet {
        ElementSet(self.plus)
    }

    pub fn state(&self, i: usize) -> FourState {
        FourState::from_bits(self.minus >> i & 1 == 1, self.plus >> i & 1 == 1)
    }

    pub fn states(&self) -> Vec<FourState> {
        (0..self.len()).map(|i| self.state(i)).collect()
    }

    pub fn with_state(mut self, i: usize, state: FourState) -> Self {
        let bit = 1 << i;
        let (m, p) = state.bits();
        self.minus = if m { self.minus | bit } else { self.minus & !bit };
        self.plus = if p { self.plus | bit } else { self.plus & !bit };
        self
    }

    /// `-F`: swaps `-` and `+`, fixes `∅` and `±`.
    pub fn negate(&self) -> Self {
        Fourientation {
            len: self.len,
            minus: self.plus,
            plus: self.minus,
        }
    }

    /// `F^c`: pointwise complement inside `{-, +}`.
    pub fn complement(&self) -> Self {
        let full = ElementSet::full(self.len()).bits();
        Fourientation {
            len: self.len,
            minus: !self.minus & full,
            plus: !self.plus & full,
        }
    }

    /// Pointwise intersection.
    pub fn meet(&self, other: &Fourientation) -> Self {
        Fourientation {
            len: self.len,
            minus: self.minus & other.minus,
            plus: self.plus & other.plus,
        }
    }

    /// Pointwise union.
    pub fn join(&self, other: &Fourientation) -> Self {
        Fourientation {
            len: self.len,
            minus: self.minus | other.minus,
            plus: self.plus | other.plus,
        }
    }

    /// Negates the one-way oriented elements of `set`; `∅` and `±` stay fixed.
    pub fn reverse(&self, set: ElementSet) -> Self {
        let one_way = (self.minus ^ self.plus) & set.bits();
        Fourientation {
            len: self.len,
            minus: self.minus ^ one_way,
            plus: self.plus ^ one_way,
        }
    }

    pub fn restrict(&self, e: usize) -> Self {
        Fourientation {
            len: self.len - 1,
            minus: compact_bits(self.minus, e),
            plus: compact_bits(self.plus, e),
        }
    }

    /// `Some` when every element is oriented exactly one way.
    pub fn to_orientation(&self) -> Option<Orientation> {
        let full = ElementSet::full(self.len()).bits();
        (self.minus ^ self.plus == full).then_some(Orientation {
            len: self.len,
            plus: self.plus,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let states = split_fields(text)
            .map(|t| match t {
                "0" | "∅" => Ok(FourState::Empty),
                "-" | "−" => Ok(FourState::Minus),
                "+" => Ok(FourState::Plus),
                "±" | "+-" | "*" => Ok(FourState::Both),
                other => Err(Error::parse(0, format!("bad fourientation entry `{other}`"))),
            })
            .collect::<Result<Vec<_>>>()?;
        if states.len() > MAX_ELEMENTS {
            return Err(Error::TooManyElements {
                found: states.len(),
                max: MAX_ELEMENTS,
            });
        }
        Ok(Fourientation::from_states(&states))
    }
}

impl fmt::Display for Fourientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<&str> = (0..self.len()).map(|i| self.state(i).symbol()).collect();
        write!(f, "{}", parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fig1() -> GroundSet {
        GroundSet::new(["f1", "f2", "f3", "f4"]).unwrap()
    }

    fn four(s: &str) -> Fourientation {
        Fourientation::parse(s).unwrap()
    }

    fn ori(s: &str) -> Orientation {
        Orientation::parse(s).unwrap()
    }

    #[test]
    fn support_examples() {
        let g = fig1();
        assert!(Chain::zero(4).support().is_empty());
        let c = g.parse_chain("+f1-f2+f3").unwrap();
        assert_eq!(g.format_set(c.support()), "f1,f2,f3");
        let arc = Arc::new(3, Sign::Plus).to_chain(4);
        assert_eq!(arc.support(), ElementSet::singleton(3));
    }

    #[test]
    fn restrict_examples() {
        let g = fig1();
        let c = g.parse_chain("+f1-f2+f3").unwrap();
        assert_eq!(c.restrict(3).to_chain(), Chain::from_coeffs(vec![1, -1, 1]));
        let c = g.parse_chain("-f1+f3+f4").unwrap().to_chain();
        assert_eq!(c.restrict(3).unwrap(), Chain::from_coeffs(vec![-1, 0, 1]));
        assert!(Chain::zero(4).restrict(1).unwrap().is_zero());
        assert!(matches!(Chain::zero(4).restrict(4), Err(Error::UnknownElement(_))));
    }

    #[test]
    fn compatible_examples() {
        let g = fig1();
        let minus_f1 = Chain::from_coeffs(vec![-1, 0, 0, 0]);
        assert!(compatible(&minus_f1, &ori("-,-,+,+").to_fourientation()));
        let c = g.parse_chain("+f1-f2+f3").unwrap();
        assert!(c.compatible_with_fourientation(&Fourientation::all_bioriented(4)));
        assert!(c.compatible_with_fourientation(&four("±,-,±,+")));
        assert!(compatible(&c.to_chain(), &four("±,-,±,+")));
        assert!(!c.compatible_with_fourientation(&four("±,+,±,+")));
    }

    #[test]
    fn reverse_examples() {
        let o = ori("-,-,+,+").to_fourientation();
        assert_eq!(o.reverse(ElementSet::singleton(0)), ori("+,-,+,+").to_fourientation());
        assert_eq!(o.reverse(ElementSet::EMPTY), o);
        let o = ori("+,-,+,-");
        assert_eq!(o.reverse(ElementSet::from_indices([2, 3])), ori("+,-,-,+"));
        // ∅ and ± are fixed
        assert_eq!(four("±,0,+,-").reverse(ElementSet::full(4)), four("±,0,-,+"));
    }

    #[test]
    fn negate_and_complement_tables() {
        assert_eq!(four("±,0,+,-").negate(), four("±,0,-,+"));
        assert_eq!(four("±,0,+,-").complement(), four("0,±,-,+"));
        // - then c: + -> - -> +, ± -> ± -> ∅, ∅ -> ∅ -> ±
        assert_eq!(four("+,+,±,0").negate().complement(), four("+,+,0,±"));
        // on orientations the composition is the identity
        let o = ori("-,+,+,-").to_fourientation();
        assert_eq!(o.negate().complement(), o);
    }

    #[test]
    fn meet_join_examples() {
        assert_eq!(four("±,-,±,+").meet(&four("-,±,+,±")), four("-,-,+,+"));
        let f = four("±,0,-,+");
        assert_eq!(f.meet(&f), f);
        assert_eq!(four("+,0,0,-").join(&four("-,0,+,-")), four("±,0,+,-"));
    }

    #[test]
    fn text_forms_round_trip() {
        assert_eq!(ori("+,-,+,+").to_string(), "+,-,+,+");
        assert_eq!(Chain::parse("+1,-1,+1,0").unwrap().to_string(), "+1,-1,+1,0");
        assert_eq!(four("+,-,±,0").to_string(), "+,-,±,0");
        let g = fig1();
        let c = g.parse_chain("-f1+f3+f4").unwrap();
        assert_eq!(g.format_chain(&c), "-f1+f3+f4");
        assert_eq!(g.parse_arc("-f2").unwrap(), Arc::new(1, Sign::Minus));
        assert!(g.parse_chain("+f1+f1").is_err());
        assert!(g.parse_chain("+f9").is_err());
        assert!(SimpleChain::parse("2,0").is_err());
    }

    #[test]
    fn element_set_order_is_lexicographic() {
        let a = ElementSet::from_indices([0, 1]);
        let b = ElementSet::from_indices([0, 2]);
        let c = ElementSet::from_indices([1, 2]);
        let d = ElementSet::from_indices([0]);
        let mut v = vec![c, b, a, d];
        v.sort();
        assert_eq!(v, vec![d, a, b, c]);
        let s = ElementSet::from_indices([0, 3, 5]);
        assert_eq!(s.remove_position(3), ElementSet::from_indices([0, 4]));
        assert_eq!(s.remove_position(3).insert_position(3), s.without(3));
    }

    fn arb_four(n: usize) -> impl Strategy<Value = Fourientation> {
        (0u32..1 << n, 0u32..1 << n).prop_map(move |(m, p)| Fourientation::from_parts(n, ElementSet(m), ElementSet(p)))
    }

    fn arb_simple(n: usize) -> impl Strategy<Value = SimpleChain> {
        proptest::collection::vec(-1i64..=1, n).prop_map(|c| SimpleChain::from_coeffs(&c).unwrap())
    }

    /// Per-coordinate conditions for `p + q` to be compatible with `f` at an
    /// element of `supp(p) ∪ supp(q)`: `f` bioriented there, a nonzero
    /// coefficient of `p` or `q` whose sign `f` contains, or `p = -q` there.
    /// A zero coefficient does not count as compatible here; with that
    /// reading `(+1, 0)` against `-` would be accepted although `p + q` is not.
    fn sum_condition(p: &SimpleChain, q: &SimpleChain, f: &Fourientation, x: usize) -> bool {
        let (a, b) = (p.coeff(x), q.coeff(x));
        let state = f.state(x);
        let signed_ok = |c: i64| Sign::of(c).is_some_and(|s| state.contains(s));
        state == FourState::Both || signed_ok(a) || signed_ok(b) || a == -b
    }

    proptest! {
        #[test]
        fn fourientation_properties(
            f1 in arb_four(5), f2 in arb_four(5), p in arb_simple(5), s in 0u32..32
        ) {
            let set = ElementSet(s);
            prop_assert_eq!(
                p.compatible_with_fourientation(&f1),
                p.neg().compatible_with_fourientation(&f1.negate())
            );
            prop_assert_eq!(
                p.compatible_with_fourientation(&f1.meet(&f2)),
                p.compatible_with_fourientation(&f1) && p.compatible_with_fourientation(&f2)
            );
            prop_assert_eq!(f1.join(&f2).reverse(set), f1.reverse(set).join(&f2.reverse(set)));
            prop_assert_eq!(f1.meet(&f2).reverse(set), f1.reverse(set).meet(&f2.reverse(set)));
            prop_assert_eq!(f1.reverse(set).reverse(set), f1);
            prop_assert_eq!(f1.negate().negate(), f1);
            prop_assert_eq!(f1.complement().complement(), f1);
            prop_assert_eq!(compatible(&p.to_chain(), &f1), p.compatible_with_fourientation(&f1));
        }
    }

    #[test]
    fn sum_compatibility_exhaustive() {
        // every simple pair and fourientation on three elements
        let n = 3;
        let chains: Vec<SimpleChain> = (0..27)
            .map(|k| {
                let c: Vec<i64> = (0..n).map(|i| (k / 3i64.pow(i as u32)) % 3 - 1).collect();
                SimpleChain::from_coeffs(&c).unwrap()
            })
            .collect();
        for p in &chains {
            for q in &chains {
                let sum = p.to_chain().add(&q.to_chain());
                for m in 0..8 {
                    for pl in 0..8 {
                        let f = Fourientation::from_parts(n, ElementSet(m), ElementSet(pl));
                        let support = p.support().union(q.support());
                        let by_conditions = support.iter().all(|x| sum_condition(p, q, &f, x));
                        assert_eq!(compatible(&sum, &f), by_conditions, "{p} {q} {f}");
                    }
                }
            }
        }
    }
}
