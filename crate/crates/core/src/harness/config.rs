use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::algorithms::DEFAULT_REPS;
use crate::channel::ChannelMode;
use crate::dist::{CondensedDistribution, NamedDistribution, SizeDistribution};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Decay,
    Entropy,
    Willard,
    CdPrediction,
    RandNoCd,
    RandCd,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::Decay,
        Algorithm::Entropy,
        Algorithm::Willard,
        Algorithm::CdPrediction,
        Algorithm::RandNoCd,
        Algorithm::RandCd,
    ];

    /// The channel model the algorithm is written for.
    pub fn mode(self) -> ChannelMode {
        match self {
            Algorithm::Decay | Algorithm::Entropy | Algorithm::RandNoCd => ChannelMode::NoCd,
            Algorithm::Willard | Algorithm::CdPrediction | Algorithm::RandCd => ChannelMode::Cd,
        }
    }

    pub fn uses_advice(self) -> bool {
        matches!(self, Algorithm::RandNoCd | Algorithm::RandCd)
    }

    pub fn uses_prediction(self) -> bool {
        matches!(self, Algorithm::Entropy | Algorithm::CdPrediction)
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.to_string() == s)
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "unknown algorithm {s:?} (expected decay, entropy, willard, cd-pred, rand-nocd or rand-cd)"
                ))
            })
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Decay => "decay",
            Algorithm::Entropy => "entropy",
            Algorithm::Willard => "willard",
            Algorithm::CdPrediction => "cd-pred",
            Algorithm::RandNoCd => "rand-nocd",
            Algorithm::RandCd => "rand-cd",
        })
    }
}

/// Where a size distribution comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum DistSource {
    Named(NamedDistribution),
    File(PathBuf),
    /// A condensed distribution, spread evenly over the sizes of each range.
    Condensed(CondensedDistribution),
}

impl DistSource {
    /// A generator name if it parses as one, otherwise a file path.
    pub fn parse(s: &str) -> Self {
        match s.parse() {
            Ok(named) => DistSource::Named(named),
            Err(_) => DistSource::File(PathBuf::from(s)),
        }
    }

    pub fn load(&self, n: u64) -> Result<SizeDistribution> {
        let d = match self {
            DistSource::Named(named) => named.build(n)?,
            DistSource::File(path) => SizeDistribution::from_file(path)?,
            DistSource::Condensed(q) => SizeDistribution::spread_ranges(n, q)?,
        };
        if d.max_size() != n {
            return Err(Error::Config(format!(
                "distribution {self} is over sizes up to {}, experiment uses n = {n}",
                d.max_size()
            )));
        }
        Ok(d)
    }
}

impl fmt::Display for DistSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistSource::Named(named) => write!(f, "{named}"),
            DistSource::File(path) => write!(f, "{}", path.display()),
            DistSource::Condensed(q) => write!(f, "condensed{:?}", q.probs()),
        }
    }
}

/// Everything that determines an experiment's output.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Channel model; defaults to the algorithm's own.
    pub mode: Option<ChannelMode>,
    pub algorithm: Algorithm,
    pub n: u64,
    pub truth: DistSource,
    /// Defaults to the truth.
    pub prediction: Option<DistSource>,
    pub advice_bits: Option<u32>,
    pub trials: u64,
    pub seed: u64,
    /// Round cap per trial; [`DEFAULT_HORIZON`] when absent.
    pub horizon: Option<u64>,
    pub reps: u32,
    /// Worker threads; `0` lets the pool decide. Output does not depend on it.
    pub workers: usize,
    pub out: Option<PathBuf>,
}

pub const DEFAULT_HORIZON: u64 = 1_000_000;

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            mode: None,
            algorithm: Algorithm::Decay,
            n: 1 << 16,
            truth: DistSource::Named(NamedDistribution::Uniform),
            prediction: None,
            advice_bits: None,
            trials: 1000,
            seed: 0,
            horizon: None,
            reps: DEFAULT_REPS,
            workers: 1,
            out: None,
        }
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("bad value {value:?} for {key}")))
}

impl ExperimentConfig {
    pub fn effective_mode(&self) -> ChannelMode {
        self.mode.unwrap_or(self.algorithm.mode())
    }

    pub fn effective_horizon(&self) -> u64 {
        self.horizon.unwrap_or(DEFAULT_HORIZON)
    }

    /// Sets one `key=value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "mode" => {
                self.mode = Some(
                    value
                        .parse()
                        .map_err(|e: Error| Error::Config(e.to_string()))?,
                )
            }
            "algo" | "algorithm" => {
                self.algorithm = value
                    .parse()
                    .map_err(|e: Error| Error::Config(e.to_string()))?
            }
            "n" => self.n = parse_num(key, value)?,
            "true" | "truth" | "true-dist" | "true-file" => self.truth = DistSource::parse(value),
            "pred" | "prediction" | "pred-dist" | "pred-file" => {
                self.prediction = Some(DistSource::parse(value))
            }
            "b" => self.advice_bits = Some(parse_num(key, value)?),
            "trials" => self.trials = parse_num(key, value)?,
            "seed" => self.seed = parse_num(key, value)?,
            "horizon" => self.horizon = Some(parse_num(key, value)?),
            "reps" => self.reps = parse_num(key, value)?,
            "workers" => self.workers = parse_num(key, value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            other => return Err(Error::Config(format!("unknown setting {other:?}"))),
        }
        Ok(())
    }

    /// Applies `key=value` lines; blank lines and `#` comments are skipped.
    pub fn apply_text(&mut self, text: &str, origin: &Path) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                path: origin.to_path_buf(),
                line: i + 1,
                message,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| parse_err(format!("expected key=value, got {line:?}")))?;
            self.set(key.trim(), value.trim())
                .map_err(|e| parse_err(e.to_string()))?;
        }
        Ok(())
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = ExperimentConfig::default();
        cfg.apply_text(&text, path)?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Config(format!(
                "n must be at least 2, got {}",
                self.n
            )));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.horizon == Some(0) {
            return Err(Error::Config("horizon must be at least 1".into()));
        }
        if self.reps == 0 {
            return Err(Error::Config("reps must be at least 1".into()));
        }
        if self.effective_mode() != self.algorithm.mode() {
            return Err(Error::Config(format!(
                "algorithm {} runs on the {} channel, not {}",
                self.algorithm,
                self.algorithm.mode(),
                self.effective_mode()
            )));
        }
        if self.algorithm.uses_advice() && self.advice_bits.is_none() {
            return Err(Error::Config(format!(
                "algorithm {} needs advice bits (b)",
                self.algorithm
            )));
        }
        Ok(())
    }
}
