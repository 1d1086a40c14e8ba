//! Randomized block schemes: advice names which block of consecutive
//! ranges holds the true range, and a uniform algorithm searches only that
//! block.

use rand::Rng;

use super::Advice;
use crate::algorithms::{
    execute, CyclePolicy, RepeatedSearch, RunResult, UniformPolicy, WillardSearch,
};
use crate::channel::ChannelMode;
use crate::dist::{range_count, range_of};
use crate::{Error, Result};

/// Ranges per block: `ceil(m / 2^b)`.
pub fn block_size(m: u32, b: u32) -> u32 {
    if b >= 32 {
        1
    } else {
        m.div_ceil(1 << b).max(1)
    }
}

/// Zero-based block holding `range`.
pub fn block_of(range: u32, m: u32, b: u32) -> u32 {
    (range - 1) / block_size(m, b)
}

/// The ranges of block `index`; the last block may be short.
pub fn block_ranges(index: u32, m: u32, b: u32) -> Vec<u32> {
    let size = block_size(m, b);
    let lo = index * size + 1;
    (lo..=(lo + size - 1).min(m)).collect()
}

/// A randomized advice scheme. Only the participant count matters to a
/// uniform algorithm, so advice is computed from `k`.
pub trait RandomizedScheme {
    fn universe(&self) -> u64;
    fn advice_bits(&self) -> u32;
    fn mode(&self) -> ChannelMode;
    fn advise(&self, k: u64) -> Advice;
    fn policy(&self, advice: &Advice) -> Box<dyn UniformPolicy>;

    /// Advises, then runs the policy with `k` participants.
    fn run<R: Rng + ?Sized>(&self, k: u64, horizon: Option<u64>, rng: &mut R) -> RunResult
    where
        Self: Sized,
    {
        let advice = self.advise(k);
        execute(self.policy(&advice).as_mut(), k, self.mode(), horizon, rng)
    }
}

fn check_k(n: u64, k: u64) {
    assert!(
        (2..=n).contains(&k),
        "participant count {k} outside 2..={n}"
    );
}

/// Truncated decay: cycles `2^-r` over the advised block only.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandNoCdScheme {
    n: u64,
    b: u32,
}

impl RandNoCdScheme {
    pub fn new(n: u64, b: u32) -> Result<Self> {
        let m = range_count(n);
        if n < 2 || b >= m {
            return Err(Error::InvalidParameter(format!(
                "randomized no-CD advice needs b < {m}, got {b}"
            )));
        }
        Ok(RandNoCdScheme { n, b })
    }

    pub fn block_size(&self) -> u32 {
        block_size(range_count(self.n), self.b)
    }
}

impl RandomizedScheme for RandNoCdScheme {
    fn universe(&self) -> u64 {
        self.n
    }

    fn advice_bits(&self) -> u32 {
        self.b
    }

    fn mode(&self) -> ChannelMode {
        ChannelMode::NoCd
    }

    fn advise(&self, k: u64) -> Advice {
        check_k(self.n, k);
        let m = range_count(self.n);
        Advice::from_value(block_of(range_of(k), m, self.b) as u64, self.b)
    }

    fn policy(&self, advice: &Advice) -> Box<dyn UniformPolicy> {
        let m = range_count(self.n);
        Box::new(CyclePolicy::new(block_ranges(
            advice.value() as u32,
            m,
            self.b,
        )))
    }
}

/// Willard search restricted to the advised block, restarted until it
/// succeeds. A block of one range is probed directly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandCdScheme {
    n: u64,
    b: u32,
    reps: u32,
}

impl RandCdScheme {
    pub fn new(n: u64, b: u32, reps: u32) -> Result<Self> {
        if n < 2 || b > 63 || reps == 0 {
            return Err(Error::InvalidParameter(format!(
                "randomized CD advice needs n >= 2, b <= 63, reps >= 1 (n={n}, b={b}, reps={reps})"
            )));
        }
        Ok(RandCdScheme { n, b, reps })
    }

    pub fn block_size(&self) -> u32 {
        block_size(range_count(self.n), self.b)
    }

    /// True when advice pins down the range exactly.
    pub fn is_direct(&self) -> bool {
        self.block_size() == 1
    }
}

impl RandomizedScheme for RandCdScheme {
    fn universe(&self) -> u64 {
        self.n
    }

    fn advice_bits(&self) -> u32 {
        self.b
    }

    fn mode(&self) -> ChannelMode {
        ChannelMode::Cd
    }

    fn advise(&self, k: u64) -> Advice {
        check_k(self.n, k);
        let m = range_count(self.n);
        let index = block_of(range_of(k), m, self.b) as u64;
        Advice::from_value(index, self.b)
    }

    fn policy(&self, advice: &Advice) -> Box<dyn UniformPolicy> {
        let m = range_count(self.n);
        let ranges = block_ranges(advice.value() as u32, m, self.b);
        if ranges.len() == 1 {
            Box::new(CyclePolicy::new(ranges))
        } else {
            let search = WillardSearch::new(ranges, self.reps).expect("nonempty ascending block");
            Box::new(RepeatedSearch::new(search))
        }
    }
}
