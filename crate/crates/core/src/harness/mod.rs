//! Seeded Monte Carlo experiments over the algorithms, with CSV output.
//!
//! Trial `t` of an experiment with master seed `s` draws its size and all
//! of its channel randomness from [`trial_rng`]`(s, t)`, so results do not
//! depend on how trials are spread across workers.

mod config;
mod table;

pub use config::{Algorithm, DistSource, ExperimentConfig, DEFAULT_HORIZON};
pub use table::{Proportion, ResultTable, SweepTable, TrialRow, ROW_HEADER, SCHEMA_LINE, Z95};

use std::fmt;
use std::str::FromStr;

use crate::advice::{RandCdScheme, RandNoCdScheme, RandomizedScheme};
use crate::algorithms::{
    cd_prediction_policy, entropy_ordered_schedule, execute, CyclePolicy, PhasedSearch,
    SchedulePolicy, UniformPolicy, UniformScheduleNoCd, WillardSearch,
};
use crate::dist::{range_count, CondensedDistribution, NamedDistribution, SizeDistribution};
use crate::parallel::map_trials;
use crate::seed::trial_rng;
use crate::{Error, Result};

enum Prepared {
    Decay(Vec<u32>),
    Entropy(UniformScheduleNoCd),
    Willard(WillardSearch),
    CdPrediction(PhasedSearch),
    RandNoCd(RandNoCdScheme),
    RandCd(RandCdScheme),
}

impl Prepared {
    fn policy(&self, k: u64) -> Box<dyn UniformPolicy + '_> {
        match self {
            Prepared::Decay(ranges) => Box::new(CyclePolicy::new(ranges.clone())),
            Prepared::Entropy(schedule) => Box::new(SchedulePolicy::new(schedule)),
            Prepared::Willard(search) => Box::new(search.clone()),
            Prepared::CdPrediction(search) => Box::new(search.clone()),
            Prepared::RandNoCd(scheme) => scheme.policy(&scheme.advise(k)),
            Prepared::RandCd(scheme) => scheme.policy(&scheme.advise(k)),
        }
    }
}

/// The true size distribution and the condensed prediction of `cfg`.
pub fn load_distributions(
    cfg: &ExperimentConfig,
) -> Result<(SizeDistribution, CondensedDistribution)> {
    let truth = cfg.truth.load(cfg.n)?;
    let prediction = match &cfg.prediction {
        Some(DistSource::Condensed(q)) => q.clone(),
        Some(source) => source.load(cfg.n)?.condense(),
        None => truth.condense(),
    };
    if prediction.range_count() != range_count(cfg.n) as usize {
        return Err(Error::RangeCountMismatch {
            left: range_count(cfg.n) as usize,
            right: prediction.range_count(),
        });
    }
    Ok((truth, prediction))
}

fn prepare(cfg: &ExperimentConfig, prediction: &CondensedDistribution) -> Result<Prepared> {
    let m = range_count(cfg.n);
    let b = || cfg.advice_bits.expect("validated");
    Ok(match cfg.algorithm {
        Algorithm::Decay => Prepared::Decay((1..=m).collect()),
        Algorithm::Entropy => Prepared::Entropy(entropy_ordered_schedule(prediction)),
        Algorithm::Willard => Prepared::Willard(WillardSearch::new((1..=m).collect(), cfg.reps)?),
        Algorithm::CdPrediction => {
            Prepared::CdPrediction(cd_prediction_policy(prediction, cfg.reps)?)
        }
        Algorithm::RandNoCd => Prepared::RandNoCd(RandNoCdScheme::new(cfg.n, b())?),
        Algorithm::RandCd => Prepared::RandCd(RandCdScheme::new(cfg.n, b(), cfg.reps)?),
    })
}

/// Runs every trial of `cfg` and returns the rows in trial order.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ResultTable> {
    cfg.validate()?;
    let (truth, prediction) = load_distributions(cfg)?;
    let prepared = prepare(cfg, &prediction)?;
    let mode = cfg.effective_mode();
    let horizon = cfg.effective_horizon();
    let rows = map_trials(cfg.trials, cfg.workers, |trial| {
        let mut rng = trial_rng(cfg.seed, trial);
        let k = truth.sample(&mut rng);
        let mut policy = prepared.policy(k);
        let result = execute(policy.as_mut(), k, mode, Some(horizon), &mut rng);
        TrialRow {
            trial,
            k,
            solved: result.solved,
            rounds: result.rounds,
        }
    })?;
    Ok(ResultTable::new(rows))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    /// Advice bits.
    AdviceBits,
    /// Maximum network size.
    N,
    /// Truth and prediction both `dyadic:H`.
    EntropyTarget,
    /// Prediction perturbed away from the truth to the given divergence.
    DivergenceTarget,
}

impl FromStr for SweepParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "b" => Ok(SweepParameter::AdviceBits),
            "n" => Ok(SweepParameter::N),
            "entropy-target" => Ok(SweepParameter::EntropyTarget),
            "divergence-target" => Ok(SweepParameter::DivergenceTarget),
            other => Err(Error::InvalidParameter(format!(
                "unknown sweep parameter {other:?} (expected b, n, entropy-target or divergence-target)"
            ))),
        }
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepParameter::AdviceBits => "b",
            SweepParameter::N => "n",
            SweepParameter::EntropyTarget => "entropy-target",
            SweepParameter::DivergenceTarget => "divergence-target",
        })
    }
}

fn whole<T: TryFrom<u64>>(parameter: SweepParameter, value: f64) -> Result<T> {
    let bad = || Error::InvalidParameter(format!("{parameter} needs a whole number, got {value}"));
    if value < 0.0 || value.fract() != 0.0 {
        return Err(bad());
    }
    T::try_from(value as u64).map_err(|_| bad())
}

/// The configuration for one sweep point.
pub fn sweep_point(
    base: &ExperimentConfig,
    parameter: SweepParameter,
    value: f64,
    index: usize,
) -> Result<ExperimentConfig> {
    let mut cfg = base.clone();
    cfg.seed = base.seed.wrapping_add(index as u64);
    match parameter {
        SweepParameter::AdviceBits => cfg.advice_bits = Some(whole(parameter, value)?),
        SweepParameter::N => cfg.n = whole(parameter, value)?,
        SweepParameter::EntropyTarget => {
            cfg.truth = DistSource::Named(NamedDistribution::Dyadic(whole(parameter, value)?));
            cfg.prediction = None;
        }
        SweepParameter::DivergenceTarget => {
            let truth = base.truth.load(base.n)?.condense();
            cfg.prediction = Some(DistSource::Condensed(truth.perturb_to_divergence(value)?));
        }
    }
    Ok(cfg)
}

/// One experiment per value; point `i` uses master seed `seed + i`.
pub fn sweep(
    base: &ExperimentConfig,
    parameter: SweepParameter,
    values: &[f64],
) -> Result<SweepTable> {
    let mut entries = Vec::with_capacity(values.len());
    for (i, &value) in values.iter().enumerate() {
        let cfg = sweep_point(base, parameter, value, i)?;
        entries.push((value.to_string(), run_experiment(&cfg)?));
    }
    Ok(SweepTable {
        parameter: parameter.to_string(),
        entries,
    })
}
