//! One synchronous round on the shared channel.

use rand::Rng;
use rand_distr::{Binomial, Distribution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tag {
    Silence,
    Success,
    Collision,
}

/// What happened in one round: nobody, exactly one, or several transmitters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoundOutcome {
    transmitters: u64,
}

impl RoundOutcome {
    pub fn from_count(transmitters: u64) -> Self {
        RoundOutcome { transmitters }
    }

    pub fn transmitters(&self) -> u64 {
        self.transmitters
    }

    pub fn tag(&self) -> Tag {
        match self.transmitters {
            0 => Tag::Silence,
            1 => Tag::Success,
            _ => Tag::Collision,
        }
    }

    pub fn is_success(&self) -> bool {
        self.transmitters == 1
    }
}

/// Feedback a participant receives after an unsuccessful round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Heard {
    /// No collision detection: silence and collision look the same.
    Nothing,
    Silence,
    Collision,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChannelMode {
    NoCd,
    Cd,
}

impl ChannelMode {
    /// The feedback participants get for a round that did not succeed.
    pub fn observe(self, outcome: RoundOutcome) -> Heard {
        match (self, outcome.tag()) {
            (ChannelMode::NoCd, _) => Heard::Nothing,
            (ChannelMode::Cd, Tag::Silence) => Heard::Silence,
            (ChannelMode::Cd, _) => Heard::Collision,
        }
    }

    pub fn has_collision_detection(self) -> bool {
        self == ChannelMode::Cd
    }
}

impl std::str::FromStr for ChannelMode {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "nocd" | "no-cd" => Ok(ChannelMode::NoCd),
            "cd" => Ok(ChannelMode::Cd),
            other => Err(crate::Error::InvalidParameter(format!(
                "unknown channel mode {other:?} (expected nocd or cd)"
            ))),
        }
    }
}

impl std::fmt::Display for ChannelMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ChannelMode::NoCd => "nocd",
            ChannelMode::Cd => "cd",
        })
    }
}

/// How transmitter counts are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sampling {
    /// One binomial draw per round.
    #[default]
    Binomial,
    /// One Bernoulli draw per participant.
    PerParticipant,
}

/// `k` participants each transmit independently with probability `p`.
pub fn run_round<R: Rng + ?Sized>(k: u64, p: f64, rng: &mut R) -> RoundOutcome {
    run_round_with(Sampling::Binomial, k, p, rng)
}

pub fn run_round_with<R: Rng + ?Sized>(
    sampling: Sampling,
    k: u64,
    p: f64,
    rng: &mut R,
) -> RoundOutcome {
    debug_assert!((0.0..=1.0).contains(&p), "probability {p} out of range");
    let count = match sampling {
        _ if p <= 0.0 => 0,
        _ if p >= 1.0 => k,
        Sampling::Binomial => Binomial::new(k, p)
            .expect("valid binomial parameters")
            .sample(rng),
        Sampling::PerParticipant => (0..k).filter(|_| rng.random_bool(p)).count() as u64,
    };
    RoundOutcome::from_count(count)
}

/// Probability that exactly one of `k` participants transmits: `k p (1-p)^(k-1)`.
pub fn exact_success_prob(k: u64, p: f64) -> f64 {
    if k == 0 || p <= 0.0 {
        return 0.0;
    }
    if p >= 1.0 {
        return if k == 1 { 1.0 } else { 0.0 };
    }
    k as f64 * p * ((k - 1) as f64 * (-p).ln_1p()).exp()
}
