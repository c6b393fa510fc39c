//! Markov triples and the mutation tree.
//!
//! A Markov triple is a positive solution of `a² + b² + c² = 3abc`. Every
//! triple is reachable from `(1, 1, 1)` by mutations `x -> 3yz - x`, and the
//! entries grow doubly exponentially along a branch, so everything here is
//! arbitrary precision.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MarkovError {
    #[error("({0}, {1}, {2}) is not a Markov triple")]
    NotMarkov(BigInt, BigInt, BigInt),
    #[error("slot index {0} out of range (expected 0, 1 or 2)")]
    InvalidSlot(usize),
    #[error("cannot parse triple {0:?}: {1}")]
    Parse(String, String),
}

impl MarkovError {
    /// Variant name, stable across releases.
    pub fn kind(&self) -> &'static str {
        match self {
            MarkovError::NotMarkov(..) => "NotMarkov",
            MarkovError::InvalidSlot(_) => "InvalidSlot",
            MarkovError::Parse(..) => "Parse",
        }
    }
}

/// Position of an entry inside a triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "usize", try_from = "usize")]
pub enum Slot {
    A,
    B,
    C,
}

impl Slot {
    pub const ALL: [Slot; 3] = [Slot::A, Slot::B, Slot::C];

    pub fn index(self) -> usize {
        match self {
            Slot::A => 0,
            Slot::B => 1,
            Slot::C => 2,
        }
    }

    /// The two other slots, in increasing order.
    pub fn others(self) -> (Slot, Slot) {
        match self {
            Slot::A => (Slot::B, Slot::C),
            Slot::B => (Slot::A, Slot::C),
            Slot::C => (Slot::A, Slot::B),
        }
    }
}

impl TryFrom<usize> for Slot {
    type Error = MarkovError;

    fn try_from(i: usize) -> Result<Self, Self::Error> {
        match i {
            0 => Ok(Slot::A),
            1 => Ok(Slot::B),
            2 => Ok(Slot::C),
            _ => Err(MarkovError::InvalidSlot(i)),
        }
    }
}

impl From<Slot> for usize {
    fn from(s: Slot) -> usize {
        s.index()
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

/// Returns true iff all three integers are positive and satisfy the Markov
/// equation.
pub fn is_markov(a: &BigInt, b: &BigInt, c: &BigInt) -> bool {
    if !(a.is_positive() && b.is_positive() && c.is_positive()) {
        return false;
    }
    a * a + b * b + c * c == BigInt::from(3) * a * b * c
}

/// A solution of the Markov equation. Entries keep the order they were
/// given in; [`MarkovTriple::sorted`] gives the canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "TripleJson", into = "TripleJson")]
pub struct MarkovTriple {
    entries: [BigInt; 3],
}

#[derive(Serialize, Deserialize)]
struct TripleJson {
    #[serde(with = "crate::json::int_array")]
    triple: [BigInt; 3],
}

impl TryFrom<TripleJson> for MarkovTriple {
    type Error = MarkovError;

    fn try_from(j: TripleJson) -> Result<Self, Self::Error> {
        let [a, b, c] = j.triple;
        MarkovTriple::new(a, b, c)
    }
}

impl From<MarkovTriple> for TripleJson {
    fn from(t: MarkovTriple) -> Self {
        TripleJson { triple: t.entries }
    }
}

impl MarkovTriple {
    pub fn new(
        a: impl Into<BigInt>,
        b: impl Into<BigInt>,
        c: impl Into<BigInt>,
    ) -> Result<Self, MarkovError> {
        let (a, b, c) = (a.into(), b.into(), c.into());
        if !is_markov(&a, &b, &c) {
            return Err(MarkovError::NotMarkov(a, b, c));
        }
        Ok(MarkovTriple { entries: [a, b, c] })
    }

    pub fn root() -> Self {
        MarkovTriple {
            entries: [BigInt::one(), BigInt::one(), BigInt::one()],
        }
    }

    pub fn entries(&self) -> &[BigInt; 3] {
        &self.entries
    }

    pub fn get(&self, slot: Slot) -> &BigInt {
        &self.entries[slot.index()]
    }

    pub fn a(&self) -> &BigInt {
        &self.entries[0]
    }

    pub fn b(&self) -> &BigInt {
        &self.entries[1]
    }

    pub fn c(&self) -> &BigInt {
        &self.entries[2]
    }

    pub fn is_root(&self) -> bool {
        self.entries.iter().all(One::is_one)
    }

    pub fn is_sorted(&self) -> bool {
        self.entries[0] <= self.entries[1] && self.entries[1] <= self.entries[2]
    }

    /// Canonical form `a ≤ b ≤ c`.
    pub fn sorted(&self) -> Self {
        let mut entries = self.entries.clone();
        entries.sort();
        MarkovTriple { entries }
    }

    /// The mutated value `3yz - x` for the given slot.
    pub fn partner(&self, slot: Slot) -> BigInt {
        let (i, j) = slot.others();
        BigInt::from(3) * self.get(i) * self.get(j) - self.get(slot)
    }

    /// Vieta jump at `slot`. Always yields a Markov triple.
    pub fn mutate(&self, slot: Slot) -> Self {
        let mut entries = self.entries.clone();
        entries[slot.index()] = self.partner(slot);
        MarkovTriple { entries }
    }

    /// Checks `x · x' = y² + z²` at `slot`.
    pub fn partner_identity(&self, slot: Slot) -> bool {
        let (i, j) = slot.others();
        let (y, z) = (self.get(i), self.get(j));
        self.get(slot) * self.partner(slot) == y * y + z * z
    }

    pub fn pairwise_coprime(&self) -> bool {
        let [a, b, c] = &self.entries;
        a.gcd(b).is_one() && b.gcd(c).is_one() && a.gcd(c).is_one()
    }

    /// The slot mutated by one step of descent: the strictly largest entry,
    /// or the highest slot holding the maximum when it is not strict.
    /// `None` at the root.
    pub fn descent_slot(&self) -> Option<Slot> {
        if self.is_root() {
            return None;
        }
        let max = self.entries.iter().max().expect("three entries");
        Slot::ALL.into_iter().rev().find(|s| self.get(*s) == max)
    }

    /// Position of `slot` after sorting; ties resolve to the highest
    /// matching sorted position, which mutates to the same sorted triple.
    pub fn sorted_slot(&self, slot: Slot) -> Slot {
        let sorted = self.sorted();
        let value = self.get(slot);
        Slot::ALL
            .into_iter()
            .rev()
            .find(|s| sorted.get(*s) == value)
            .expect("value present after sorting")
    }
}

impl fmt::Display for MarkovTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c] = &self.entries;
        write!(f, "({a},{b},{c})")
    }
}

/// Parses the command-line form `a,b,c`.
impl FromStr for MarkovTriple {
    type Err = MarkovError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(MarkovError::Parse(s.into(), "expected three comma-separated integers".into()));
        }
        let mut vals = Vec::with_capacity(3);
        for p in parts {
            let v = crate::json::parse_int(p).map_err(|e| MarkovError::Parse(s.into(), e))?;
            vals.push(v);
        }
        let c = vals.pop().unwrap();
        let b = vals.pop().unwrap();
        let a = vals.pop().unwrap();
        MarkovTriple::new(a, b, c)
    }
}

/// A sequence of mutations applied to a starting triple.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MutationPath {
    pub start: MarkovTriple,
    pub steps: Vec<Slot>,
}

impl MutationPath {
    /// Every triple along the path, starting with `start`.
    pub fn replay(&self) -> Vec<MarkovTriple> {
        let mut out = Vec::with_capacity(self.steps.len() + 1);
        out.push(self.start.clone());
        for s in &self.steps {
            let next = out.last().unwrap().mutate(*s);
            out.push(next);
        }
        out
    }

    pub fn end(&self) -> MarkovTriple {
        self.steps.iter().fold(self.start.clone(), |t, s| t.mutate(*s))
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// The path read backwards, from its end to its start. Mutation is an
    /// involution, so the same slots undo each step.
    pub fn reversed(&self) -> MutationPath {
        MutationPath {
            start: self.end(),
            steps: self.steps.iter().rev().copied().collect(),
        }
    }
}

/// Vieta descent to `(1, 1, 1)`.
pub fn reduce(t: &MarkovTriple) -> MutationPath {
    let mut steps = Vec::new();
    let mut cur = t.clone();
    while let Some(slot) = cur.descent_slot() {
        cur = cur.mutate(slot);
        steps.push(slot);
    }
    MutationPath {
        start: t.clone(),
        steps,
    }
}

/// All canonical triples with largest entry at most `max_entry`, found by a
/// breadth-first walk of the mutation graph from the root. Sorted
/// lexicographically.
pub fn enumerate(max_entry: &BigInt) -> Vec<MarkovTriple> {
    let mut seen: HashSet<MarkovTriple> = HashSet::new();
    let mut queue = VecDeque::new();
    let root = MarkovTriple::root();
    if max_entry < root.c() {
        return Vec::new();
    }
    seen.insert(root.clone());
    queue.push_back(root);
    while let Some(t) = queue.pop_front() {
        for slot in Slot::ALL {
            let next = t.mutate(slot).sorted();
            if next.c() <= max_entry && !seen.contains(&next) {
                seen.insert(next.clone());
                queue.push_back(next);
            }
        }
    }
    let ordered: BTreeSet<MarkovTriple> = seen.into_iter().collect();
    ordered.into_iter().collect()
}
