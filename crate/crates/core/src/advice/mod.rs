//! The perfect-advice model: every participant receives the same `b` bits,
//! computed with full knowledge of the participant set.

mod deterministic;
mod randomized;
mod selective;

pub use deterministic::{
    run_deterministic, DetCdScheme, DetNoCdScheme, DeterministicScheme, Execution,
};
pub use randomized::{
    block_of, block_ranges, block_size, RandCdScheme, RandNoCdScheme, RandomizedScheme,
};
pub use selective::{
    exhaustive_family_search, is_selective, is_strongly_selective,
    is_strongly_selective_with_limit, noninteractive_verify, parse_family, FamilySearchReport,
    NonInteractiveReport, NonInteractiveScheme, SelectivityReport, TrivialScheme,
    DEFAULT_EXHAUSTIVE_LIMIT,
};

use std::fmt;

use crate::{Error, Result};

/// A nonempty set of participant ids from `0..n`, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ParticipantSet {
    n: u64,
    ids: Vec<u64>,
}

impl ParticipantSet {
    pub fn new(n: u64, ids: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut ids: Vec<u64> = ids.into_iter().collect();
        ids.sort_unstable();
        if ids.is_empty() {
            return Err(Error::InvalidParameter("participant set is empty".into()));
        }
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter("participant ids repeat".into()));
        }
        if let Some(&id) = ids.last().filter(|&&id| id >= n) {
            return Err(Error::InvalidParameter(format!("id {id} outside 0..{n}")));
        }
        Ok(ParticipantSet { n, ids })
    }

    /// The set whose members are the one bits of `mask`.
    pub fn from_mask(n: u64, mask: u64) -> Result<Self> {
        Self::new(n, (0..64).filter(|i| mask >> i & 1 == 1))
    }

    pub fn universe(&self) -> u64 {
        self.n
    }

    pub fn ids(&self) -> &[u64] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn min_id(&self) -> u64 {
        self.ids[0]
    }

    pub fn contains(&self, id: u64) -> bool {
        self.ids.binary_search(&id).is_ok()
    }
}

/// A bit string of at most 64 bits; bit 0 is the first one given out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Advice {
    bits: u64,
    len: u32,
}

impl Advice {
    pub fn empty() -> Self {
        Advice::default()
    }

    pub fn from_bits(bits: impl IntoIterator<Item = bool>) -> Self {
        let mut a = Advice::empty();
        for b in bits {
            a.push(b);
        }
        a
    }

    /// The low `len` bits of `value`, most significant first.
    pub fn from_value(value: u64, len: u32) -> Self {
        Advice::from_bits((0..len).rev().map(|i| value >> i & 1 == 1))
    }

    pub fn push(&mut self, bit: bool) {
        assert!(self.len < 64, "advice longer than 64 bits");
        self.bits |= (bit as u64) << self.len;
        self.len += 1;
    }

    pub fn len(&self) -> u32 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bit(&self, i: u32) -> bool {
        self.bits >> i & 1 == 1
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(|i| self.bit(i))
    }

    /// Bits read as a binary number, first bit most significant.
    pub fn value(&self) -> u64 {
        self.iter().fold(0, |acc, b| (acc << 1) | b as u64)
    }
}

impl fmt::Display for Advice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len == 0 {
            return f.write_str("-");
        }
        self.iter()
            .try_for_each(|b| f.write_str(if b { "1" } else { "0" }))
    }
}

/// The id interval `[lo, hi)` of a node in the balanced id tree, where a node
/// of size `s` splits at `lo + ceil(s / 2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IdInterval {
    pub lo: u64,
    pub hi: u64,
}

impl IdInterval {
    pub fn root(n: u64) -> Self {
        IdInterval { lo: 0, hi: n }
    }

    pub fn size(&self) -> u64 {
        self.hi - self.lo
    }

    pub fn is_leaf(&self) -> bool {
        self.size() <= 1
    }

    fn mid(&self) -> u64 {
        self.lo + self.size().div_ceil(2)
    }

    /// Left (`false`) or right (`true`) child; a leaf stays put.
    pub fn child(&self, right: bool) -> Self {
        if self.is_leaf() {
            return *self;
        }
        let mid = self.mid();
        if right {
            IdInterval {
                lo: mid,
                hi: self.hi,
            }
        } else {
            IdInterval {
                lo: self.lo,
                hi: mid,
            }
        }
    }

    pub fn contains(&self, id: u64) -> bool {
        (self.lo..self.hi).contains(&id)
    }

    pub fn right_half_contains(&self, id: u64) -> bool {
        !self.is_leaf() && id >= self.mid() && id < self.hi
    }

    /// First `steps` moves from this node toward `id`, padded with `false`
    /// once a leaf is reached.
    pub fn path_toward(&self, id: u64, steps: u32) -> Advice {
        let mut node = *self;
        let mut advice = Advice::empty();
        for _ in 0..steps {
            let right = node.right_half_contains(id);
            advice.push(right);
            node = node.child(right);
        }
        advice
    }

    pub fn descend(&self, path: impl IntoIterator<Item = bool>) -> Self {
        path.into_iter().fold(*self, |node, bit| node.child(bit))
    }
}
