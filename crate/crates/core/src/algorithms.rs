//! Uniform contention-resolution algorithms.
//!
//! A uniform algorithm gives every participant the same transmit probability
//! each round. Without collision detection that probability depends only on
//! the round index; with collision detection it depends on the history of
//! silences and collisions. Both are driven here through [`UniformPolicy`].

use rand::Rng;

use crate::channel::{exact_success_prob, run_round, ChannelMode, Heard};
use crate::coding::{shannon_lengths, PrefixCode};
use crate::dist::{range_count, CondensedDistribution};
use crate::{Error, Result};

/// Default number of repetitions of each search probe.
pub const DEFAULT_REPS: u32 = 3;

/// Transmit probability for range `r`: `2^-r`.
pub fn range_probability(range: u32) -> f64 {
    2f64.powi(-(range as i32))
}

/// A finite round-indexed list of transmit probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformScheduleNoCd {
    probs: Vec<f64>,
}

impl UniformScheduleNoCd {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if let Some(p) = probs.iter().find(|&&p| !(p > 0.0 && p <= 1.0)) {
            return Err(Error::InvalidParameter(format!(
                "schedule probability {p} outside (0, 1]"
            )));
        }
        Ok(UniformScheduleNoCd { probs })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Repeats the schedule cyclically until it is `horizon` rounds long.
    pub fn cycled(&self, horizon: usize) -> Self {
        UniformScheduleNoCd {
            probs: self.probs.iter().copied().cycle().take(horizon).collect(),
        }
    }

    /// Reads one probability per line; blank lines and `#` comments are skipped.
    pub fn from_text(text: &str) -> std::result::Result<Self, (usize, String)> {
        let mut probs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let p: f64 = line
                .parse()
                .map_err(|_| (i + 1, format!("bad probability {line:?}")))?;
            probs.push(p);
        }
        Self::new(probs).map_err(|e| (text.lines().count(), e.to_string()))
    }
}

/// One pass of decay: `1/2, 1/4, .., 2^-ceil(log2 n)`.
pub fn decay_schedule(n: u64) -> UniformScheduleNoCd {
    UniformScheduleNoCd {
        probs: (1..=range_count(n)).map(range_probability).collect(),
    }
}

/// Decay repeated until `horizon` rounds.
pub fn decay_schedule_with_horizon(n: u64, horizon: usize) -> UniformScheduleNoCd {
    decay_schedule(n).cycled(horizon)
}

/// Exact expected rounds of decay cycled forever with `k` participants.
pub fn decay_expected_rounds(n: u64, k: u64) -> f64 {
    let mut survive = 1.0;
    let mut total = 0.0;
    for r in 1..=range_count(n) {
        total += survive;
        survive *= 1.0 - exact_success_prob(k, range_probability(r));
    }
    total / (1.0 - survive)
}

/// Ranges ordered most likely first (ties by ascending index), followed by
/// the zero-probability ranges in ascending order.
pub fn entropy_order(q: &CondensedDistribution) -> Vec<u32> {
    let m = q.range_count() as u32;
    let mut coded: Vec<u32> = (1..=m).filter(|&r| q.prob(r) > 0.0).collect();
    coded.sort_by(|&a, &b| q.prob(b).total_cmp(&q.prob(a)).then(a.cmp(&b)));
    coded.extend((1..=m).filter(|&r| q.prob(r) == 0.0));
    coded
}

/// One pass over all ranges in [`entropy_order`], round `i` using `2^-pi_i`.
pub fn entropy_ordered_schedule(q: &CondensedDistribution) -> UniformScheduleNoCd {
    UniformScheduleNoCd {
        probs: entropy_order(q)
            .into_iter()
            .map(range_probability)
            .collect(),
    }
}

/// A collision-detection schedule: transmit probability for every
/// silence(0)/collision(1) history shorter than `max_depth`.
///
/// Stored heap-style: history `h` of length `l` with bits read as a binary
/// number `v` sits at index `2^l - 1 + v`.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformScheduleCd {
    max_depth: u32,
    table: Vec<f64>,
}

impl UniformScheduleCd {
    pub fn from_fn(max_depth: u32, mut rule: impl FnMut(&[bool]) -> f64) -> Result<Self> {
        if max_depth == 0 || max_depth > 24 {
            return Err(Error::InvalidParameter(format!(
                "collision-history depth {max_depth} outside 1..=24"
            )));
        }
        let mut table = Vec::with_capacity((1usize << max_depth) - 1);
        let mut history = Vec::with_capacity(max_depth as usize);
        for len in 0..max_depth {
            for v in 0..(1u64 << len) {
                history.clear();
                history.extend((0..len).rev().map(|bit| (v >> bit) & 1 == 1));
                let p = rule(&history);
                if !(p > 0.0 && p <= 1.0) {
                    return Err(Error::InvalidParameter(format!(
                        "probability {p} outside (0, 1] for history {history:?}"
                    )));
                }
                table.push(p);
            }
        }
        Ok(UniformScheduleCd { max_depth, table })
    }

    /// Number of rounds the rule covers.
    pub fn max_depth(&self) -> u32 {
        self.max_depth
    }

    pub fn probability(&self, history: &[bool]) -> Option<f64> {
        if history.len() >= self.max_depth as usize {
            return None;
        }
        let v = history
            .iter()
            .fold(0usize, |acc, &b| (acc << 1) | b as usize);
        Some(self.table[(1usize << history.len()) - 1 + v])
    }
}

/// Outcome of one execution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunResult {
    pub solved: bool,
    /// Round of the first success, or the number of rounds run if unsolved.
    pub rounds: u64,
}

/// The shared state machine behind every uniform algorithm.
pub trait UniformPolicy {
    /// Probability for the next round, or `None` once there is nothing left to try.
    fn next_probability(&mut self) -> Option<f64>;

    /// Feedback from a round that did not succeed.
    fn observe(&mut self, _heard: Heard) {}
}

/// Runs `policy` with `k` participants until success, exhaustion, or `horizon` rounds.
pub fn execute<P, R>(
    policy: &mut P,
    k: u64,
    mode: ChannelMode,
    horizon: Option<u64>,
    rng: &mut R,
) -> RunResult
where
    P: UniformPolicy + ?Sized,
    R: Rng + ?Sized,
{
    let mut rounds = 0;
    while horizon.is_none_or(|h| rounds < h) {
        let Some(p) = policy.next_probability() else {
            break;
        };
        rounds += 1;
        let outcome = run_round(k, p, rng);
        if outcome.is_success() {
            return RunResult {
                solved: true,
                rounds,
            };
        }
        policy.observe(mode.observe(outcome));
    }
    RunResult {
        solved: false,
        rounds,
    }
}

/// Walks a no-CD schedule once.
#[derive(Debug, Clone)]
pub struct SchedulePolicy<'a> {
    probs: &'a [f64],
    next: usize,
}

impl<'a> SchedulePolicy<'a> {
    pub fn new(schedule: &'a UniformScheduleNoCd) -> Self {
        SchedulePolicy {
            probs: &schedule.probs,
            next: 0,
        }
    }
}

impl UniformPolicy for SchedulePolicy<'_> {
    fn next_probability(&mut self) -> Option<f64> {
        let p = self.probs.get(self.next).copied();
        self.next += 1;
        p
    }
}

/// Cycles `2^-r` over a list of ranges forever.
#[derive(Debug, Clone)]
pub struct CyclePolicy {
    ranges: Vec<u32>,
    next: usize,
}

impl CyclePolicy {
    pub fn new(ranges: Vec<u32>) -> Self {
        assert!(!ranges.is_empty(), "cannot cycle over no ranges");
        CyclePolicy { ranges, next: 0 }
    }
}

impl UniformPolicy for CyclePolicy {
    fn next_probability(&mut self) -> Option<f64> {
        let r = self.ranges[self.next];
        self.next = (self.next + 1) % self.ranges.len();
        Some(range_probability(r))
    }
}

/// Follows a collision-detection schedule along the observed history.
#[derive(Debug, Clone)]
pub struct CdSchedulePolicy<'a> {
    schedule: &'a UniformScheduleCd,
    history: Vec<bool>,
}

impl<'a> CdSchedulePolicy<'a> {
    pub fn new(schedule: &'a UniformScheduleCd) -> Self {
        CdSchedulePolicy {
            schedule,
            history: Vec::new(),
        }
    }
}

impl UniformPolicy for CdSchedulePolicy<'_> {
    fn next_probability(&mut self) -> Option<f64> {
        self.schedule.probability(&self.history)
    }

    fn observe(&mut self, heard: Heard) {
        self.history.push(heard == Heard::Collision);
    }
}

/// Binary search over an ascending set of ranges.
///
/// Each probe transmits with `2^-median` for `reps` rounds. A collision in
/// any of them sends the search to the larger ranges; otherwise it goes to
/// the smaller ones. The search ends when no candidates remain.
#[derive(Debug, Clone)]
pub struct WillardSearch {
    ranges: Vec<u32>,
    lo: usize,
    hi: usize,
    reps: u32,
    done_reps: u32,
    saw_collision: bool,
}

impl WillardSearch {
    pub fn new(ranges: Vec<u32>, reps: u32) -> Result<Self> {
        if ranges.is_empty() {
            return Err(Error::InvalidParameter("search over no ranges".into()));
        }
        if reps == 0 {
            return Err(Error::InvalidParameter("reps must be at least 1".into()));
        }
        if ranges.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(format!(
                "search ranges must be strictly ascending: {ranges:?}"
            )));
        }
        let hi = ranges.len();
        Ok(WillardSearch {
            ranges,
            lo: 0,
            hi,
            reps,
            done_reps: 0,
            saw_collision: false,
        })
    }

    /// Range currently being probed (the lower median of the candidates).
    pub fn current_probe(&self) -> Option<u32> {
        (self.lo < self.hi).then(|| self.ranges[self.lo + (self.hi - self.lo - 1) / 2])
    }

    /// Candidates still in play.
    pub fn candidates(&self) -> &[u32] {
        &self.ranges[self.lo..self.hi]
    }

    /// Upper bound on rounds for one full search: `reps * ceil(log2(len + 1))`.
    pub fn max_rounds(&self) -> u64 {
        self.reps as u64 * crate::dist::ceil_log2(self.ranges.len() as u64 + 1) as u64
    }
}

impl UniformPolicy for WillardSearch {
    fn next_probability(&mut self) -> Option<f64> {
        self.current_probe().map(range_probability)
    }

    fn observe(&mut self, heard: Heard) {
        if self.lo >= self.hi {
            return;
        }
        let mid = self.lo + (self.hi - self.lo - 1) / 2;
        self.saw_collision |= heard == Heard::Collision;
        self.done_reps += 1;
        if self.done_reps == self.reps {
            if self.saw_collision {
                self.lo = mid + 1;
            } else {
                self.hi = mid;
            }
            self.done_reps = 0;
            self.saw_collision = false;
        }
    }
}

/// Restarts a search from scratch every time it runs out of candidates.
#[derive(Debug, Clone)]
pub struct RepeatedSearch {
    fresh: WillardSearch,
    current: WillardSearch,
}

impl RepeatedSearch {
    pub fn new(search: WillardSearch) -> Self {
        RepeatedSearch {
            current: search.clone(),
            fresh: search,
        }
    }
}

impl UniformPolicy for RepeatedSearch {
    fn next_probability(&mut self) -> Option<f64> {
        if self.current.current_probe().is_none() {
            self.current = self.fresh.clone();
        }
        self.current.next_probability()
    }

    fn observe(&mut self, heard: Heard) {
        self.current.observe(heard);
    }
}

/// Searches a sequence of range classes one after another.
#[derive(Debug, Clone)]
pub struct PhasedSearch {
    phases: Vec<WillardSearch>,
    phase: usize,
}

impl PhasedSearch {
    pub fn new(classes: Vec<Vec<u32>>, reps: u32) -> Result<Self> {
        let phases = classes
            .into_iter()
            .filter(|c| !c.is_empty())
            .map(|c| WillardSearch::new(c, reps))
            .collect::<Result<Vec<_>>>()?;
        Ok(PhasedSearch { phases, phase: 0 })
    }

    pub fn phase_count(&self) -> usize {
        self.phases.len()
    }
}

impl UniformPolicy for PhasedSearch {
    fn next_probability(&mut self) -> Option<f64> {
        while let Some(search) = self.phases.get_mut(self.phase) {
            if let Some(p) = search.next_probability() {
                return Some(p);
            }
            self.phase += 1;
        }
        None
    }

    fn observe(&mut self, heard: Heard) {
        if let Some(search) = self.phases.get_mut(self.phase) {
            search.observe(heard);
        }
    }
}

/// Groups ranges by codeword length, shortest first, ranges ascending within
/// a class. Uncoded ranges form a final class.
pub fn length_classes(code: &PrefixCode) -> Vec<Vec<u32>> {
    let mut lengths: Vec<u32> = code.lengths().iter().flatten().copied().collect();
    lengths.sort_unstable();
    lengths.dedup();
    let m = code.alphabet_size() as u32;
    let mut classes: Vec<Vec<u32>> = lengths
        .iter()
        .map(|&l| (1..=m).filter(|&r| code.length(r) == Some(l)).collect())
        .collect();
    let uncoded: Vec<u32> = (1..=m).filter(|&r| code.length(r).is_none()).collect();
    if !uncoded.is_empty() {
        classes.push(uncoded);
    }
    classes
}

/// Runs a no-CD schedule once.
pub fn run_nocd<R: Rng + ?Sized>(schedule: &UniformScheduleNoCd, k: u64, rng: &mut R) -> RunResult {
    execute(
        &mut SchedulePolicy::new(schedule),
        k,
        ChannelMode::NoCd,
        None,
        rng,
    )
}

/// One search over `ranges` with collision detection.
pub fn willard_search<R: Rng + ?Sized>(
    ranges: &[u32],
    k: u64,
    reps: u32,
    rng: &mut R,
) -> Result<RunResult> {
    let mut search = WillardSearch::new(ranges.to_vec(), reps)?;
    Ok(execute(&mut search, k, ChannelMode::Cd, None, rng))
}

/// The prediction-driven CD algorithm: searches the Shannon-length classes
/// of `q` in order of increasing length.
pub fn cd_prediction_policy(q: &CondensedDistribution, reps: u32) -> Result<PhasedSearch> {
    PhasedSearch::new(length_classes(&shannon_lengths(q)), reps)
}

pub fn cd_prediction_run<R: Rng + ?Sized>(
    q: &CondensedDistribution,
    k: u64,
    reps: u32,
    rng: &mut R,
) -> Result<RunResult> {
    let mut policy = cd_prediction_policy(q, reps)?;
    Ok(execute(&mut policy, k, ChannelMode::Cd, None, rng))
}
