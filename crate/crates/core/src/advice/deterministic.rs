//! Deterministic tree-traversal schemes.

use super::{Advice, IdInterval, ParticipantSet};
use crate::channel::ChannelMode;
use crate::dist::ceil_log2;
use crate::{Error, Result};

/// A deterministic advice scheme: an advice function plus the per-player
/// transmit rule.
pub trait DeterministicScheme {
    fn universe(&self) -> u64;
    fn advice_bits(&self) -> u32;
    fn mode(&self) -> ChannelMode;
    fn advise(&self, participants: &ParticipantSet) -> Advice;
    /// Whether `id` transmits in the round after `history` (one entry per
    /// earlier round; `true` is a collision, always `false` without detection).
    fn transmits(&self, id: u64, advice: &Advice, history: &[bool]) -> bool;
    /// Rounds after which the scheme gives up.
    fn round_limit(&self) -> u64;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Execution {
    pub advice: Advice,
    pub rounds: u64,
    pub solved: bool,
    pub winner: Option<u64>,
}

/// Runs every participant's rule independently with the one shared advice string.
pub fn run_deterministic<S: DeterministicScheme + ?Sized>(
    scheme: &S,
    participants: &ParticipantSet,
) -> Execution {
    let advice = scheme.advise(participants);
    let mut history = Vec::new();
    for round in 1..=scheme.round_limit() {
        let mut sending = participants
            .ids()
            .iter()
            .copied()
            .filter(|&id| scheme.transmits(id, &advice, &history));
        let first = sending.next();
        let collided = sending.next().is_some();
        if let (Some(id), false) = (first, collided) {
            return Execution {
                advice,
                rounds: round,
                solved: true,
                winner: Some(id),
            };
        }
        history.push(scheme.mode() == ChannelMode::Cd && collided);
    }
    Execution {
        advice,
        rounds: scheme.round_limit(),
        solved: false,
        winner: None,
    }
}

fn check_bits(n: u64, b: u32) -> Result<()> {
    if n < 1 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    if b > ceil_log2(n) {
        return Err(Error::InvalidParameter(format!(
            "{b} advice bits exceed ceil(log2 {n}) = {}",
            ceil_log2(n)
        )));
    }
    Ok(())
}

/// Advice names the first `b` steps toward the minimum id; the remaining
/// ids of that subtree then take one round each, in order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DetNoCdScheme {
    n: u64,
    b: u32,
}

impl DetNoCdScheme {
    pub fn new(n: u64, b: u32) -> Result<Self> {
        check_bits(n, b)?;
        Ok(DetNoCdScheme { n, b })
    }
}

impl DeterministicScheme for DetNoCdScheme {
    fn universe(&self) -> u64 {
        self.n
    }

    fn advice_bits(&self) -> u32 {
        self.b
    }

    fn mode(&self) -> ChannelMode {
        ChannelMode::NoCd
    }

    fn advise(&self, participants: &ParticipantSet) -> Advice {
        IdInterval::root(self.n).path_toward(participants.min_id(), self.b)
    }

    fn transmits(&self, id: u64, advice: &Advice, history: &[bool]) -> bool {
        let subtree = IdInterval::root(self.n).descend(advice.iter());
        id == subtree.lo + history.len() as u64
    }

    fn round_limit(&self) -> u64 {
        self.n.div_ceil(1 << self.b)
    }
}

/// Advice names the first `b` steps toward the minimum id; players finish
/// the descent with the collision detector. In each round the right half
/// of the current subtree transmits: silence moves left, a collision moves
/// right, and at a leaf its owner transmits alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DetCdScheme {
    n: u64,
    b: u32,
}

impl DetCdScheme {
    pub fn new(n: u64, b: u32) -> Result<Self> {
        check_bits(n, b)?;
        Ok(DetCdScheme { n, b })
    }
}

impl DeterministicScheme for DetCdScheme {
    fn universe(&self) -> u64 {
        self.n
    }

    fn advice_bits(&self) -> u32 {
        self.b
    }

    fn mode(&self) -> ChannelMode {
        ChannelMode::Cd
    }

    fn advise(&self, participants: &ParticipantSet) -> Advice {
        IdInterval::root(self.n).path_toward(participants.min_id(), self.b)
    }

    fn transmits(&self, id: u64, advice: &Advice, history: &[bool]) -> bool {
        let node = IdInterval::root(self.n)
            .descend(advice.iter())
            .descend(history.iter().copied());
        if node.is_leaf() {
            node.contains(id)
        } else {
            node.right_half_contains(id)
        }
    }

    fn round_limit(&self) -> u64 {
        (ceil_log2(self.n) - self.b) as u64 + 1
    }
}
