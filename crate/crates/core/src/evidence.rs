//! Frames of discernment, simple support functions and their conflict.
//!
//! Focal elements are bitmasks: bit `k` stands for frame element `k + 1`.
//! Conflict is the mass that lands on the empty set when simple support
//! functions are combined conjunctively without renormalization.

use std::fmt;

use crate::error::{Error, Result};

/// Largest supported frame.
pub const MAX_FRAME_SIZE: usize = 16;

/// Largest list accepted by [`brute_force_conflict`].
pub const BRUTE_FORCE_MAX_EVIDENCE: usize = 20;

/// Frame of discernment `{1, .., size}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Frame {
    size: usize,
}

impl Frame {
    pub fn new(size: usize) -> Result<Self> {
        if (1..=MAX_FRAME_SIZE).contains(&size) {
            Ok(Self { size })
        } else {
            Err(Error::BadFrameSize(size))
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// The whole frame as a focal set.
    pub fn theta(&self) -> FocalSet {
        FocalSet(((1u32 << self.size) - 1) as u16)
    }

    pub fn contains(&self, set: FocalSet) -> bool {
        set.0 & !self.theta().0 == 0
    }
}

/// A subset of the frame encoded as a bitmask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FocalSet(u16);

impl FocalSet {
    pub const EMPTY: FocalSet = FocalSet(0);

    pub fn from_bits(bits: u16) -> Self {
        Self(bits)
    }

    /// Builds a set from 1-based frame elements.
    pub fn from_elements<I: IntoIterator<Item = usize>>(elements: I) -> Result<Self> {
        let mut bits = 0u16;
        for e in elements {
            if e == 0 || e > MAX_FRAME_SIZE {
                return Err(Error::ElementOutOfFrame {
                    element: e,
                    frame_size: MAX_FRAME_SIZE,
                });
            }
            bits |= 1 << (e - 1);
        }
        Ok(Self(bits))
    }

    pub fn bits(&self) -> u16 {
        self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn intersect(self, other: FocalSet) -> FocalSet {
        FocalSet(self.0 & other.0)
    }

    pub fn is_disjoint(self, other: FocalSet) -> bool {
        self.0 & other.0 == 0
    }

    /// Smallest 1-based element, if any.
    pub fn min_element(&self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize + 1)
    }

    /// 1-based elements in ascending order.
    pub fn elements(&self) -> Vec<usize> {
        (0..16).filter(|k| self.0 >> k & 1 == 1).map(|k| k + 1).collect()
    }
}

impl fmt::Display for FocalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.elements().iter().map(|e| e.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// One simple support function: `mass` on `focal`, the rest on the frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimpleEvidence {
    pub id: usize,
    pub focal: FocalSet,
    pub mass: f64,
}

/// Validates and builds a piece of evidence.
pub fn make_evidence(focal: FocalSet, mass: f64, id: usize) -> Result<SimpleEvidence> {
    if focal.is_empty() {
        return Err(Error::EmptyFocal);
    }
    // NaN fails both comparisons
    if !(mass > 0.0 && mass < 1.0) {
        return Err(Error::MassOutOfRange(mass));
    }
    Ok(SimpleEvidence { id, focal, mass })
}

/// Conflict between two simple support functions.
pub fn pairwise_conflict(a: &SimpleEvidence, b: &SimpleEvidence) -> f64 {
    if a.focal.is_disjoint(b.focal) {
        a.mass * b.mass
    } else {
        0.0
    }
}

/// Weight of evidence `-ln(1 - c)`.
pub fn weight_of_conflict(c: f64) -> Result<f64> {
    if c >= 1.0 || c.is_nan() {
        return Err(Error::ConflictAtOne(c));
    }
    // -ln(1-c) == -ln_1p(-c), and ln_1p keeps precision for small c
    Ok(-(-c).ln_1p())
}

/// Mass assignment over the subsets of a frame, kept unnormalized so that
/// mass on the empty set accumulates as conflict.
#[derive(Debug, Clone, PartialEq)]
pub struct BodyOfEvidence {
    frame_bits: u32,
    masses: Vec<f64>,
}

impl BodyOfEvidence {
    /// All mass on the frame.
    pub fn vacuous(frame: Frame) -> Self {
        Self::vacuous_bits(frame.size() as u32)
    }

    fn vacuous_bits(frame_bits: u32) -> Self {
        let len = 1usize << frame_bits;
        let mut masses = vec![0.0; len];
        masses[len - 1] = 1.0;
        Self { frame_bits, masses }
    }

    /// Conjunctive combination with one simple support function.
    ///
    /// Mass only ever moves from a set to one of its subsets, which is
    /// numerically smaller, so an ascending in-place sweep never revisits
    /// mass that has already moved.
    pub fn fold(&mut self, evidence: &SimpleEvidence) {
        let focal = evidence.focal.bits() as usize;
        debug_assert!(focal < self.masses.len());
        let m = evidence.mass;
        for set in 0..self.masses.len() {
            let x = self.masses[set];
            if x == 0.0 {
                continue;
            }
            let target = set & focal;
            if target != set {
                self.masses[target] += x * m;
                self.masses[set] = x * (1.0 - m);
            }
        }
    }

    /// Mass on the empty set.
    pub fn conflict(&self) -> f64 {
        self.masses[0]
    }

    pub fn mass_of(&self, set: FocalSet) -> f64 {
        self.masses.get(set.bits() as usize).copied().unwrap_or(0.0)
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    /// Nonzero masses in ascending bitmask order.
    pub fn focal_masses(&self) -> impl Iterator<Item = (FocalSet, f64)> + '_ {
        self.masses
            .iter()
            .enumerate()
            .filter(|(_, &m)| m != 0.0)
            .map(|(s, &m)| (FocalSet(s as u16), m))
    }

    pub fn frame_bits(&self) -> u32 {
        self.frame_bits
    }
}

fn covering_bits<'a, I: IntoIterator<Item = &'a SimpleEvidence>>(evidence: I) -> u32 {
    let union = evidence.into_iter().fold(0u16, |acc, e| acc | e.focal.bits());
    16 - union.leading_zeros()
}

/// Conflict of the conjunctive combination of all listed evidence.
pub fn combine_conflict(evidence: &[SimpleEvidence]) -> f64 {
    combine_conflict_iter(evidence.iter())
}

/// Same as [`combine_conflict`] over any borrowed sequence. The sequence is
/// walked twice, so it must be cheap to clone.
pub fn combine_conflict_iter<'a, I>(evidence: I) -> f64
where
    I: Iterator<Item = &'a SimpleEvidence> + Clone,
{
    let mut it = evidence.clone();
    match (it.next(), it.next()) {
        (None, _) | (Some(_), None) => return 0.0,
        _ => {}
    }
    let mut body = BodyOfEvidence::vacuous_bits(covering_bits(evidence.clone()));
    for e in evidence {
        body.fold(e);
    }
    body.conflict()
}

/// Conflict by enumerating every subset of the evidence list: the selected
/// evidence commit to their focal sets, the rest to the frame.
pub fn brute_force_conflict(evidence: &[SimpleEvidence]) -> Result<f64> {
    let n = evidence.len();
    if n > BRUTE_FORCE_MAX_EVIDENCE {
        return Err(Error::TooLarge(format!(
            "{n} pieces of evidence (at most {BRUTE_FORCE_MAX_EVIDENCE})"
        )));
    }
    let mut total = 0.0;
    for selection in 1u32..(1u32 << n) {
        let mut meet = u16::MAX;
        let mut weight = 1.0;
        for (j, e) in evidence.iter().enumerate() {
            if selection >> j & 1 == 1 {
                meet &= e.focal.bits();
                weight *= e.mass;
            } else {
                weight *= 1.0 - e.mass;
            }
        }
        if meet == 0 {
            total += weight;
        }
    }
    Ok(total)
}
