//! Command-line interface.
//!
//! Exit codes: 0 on success, 1 for usage or input errors, 2 when a check
//! subcommand finds a violation.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;

use crate::advice::{
    is_strongly_selective, parse_family, run_deterministic, DetCdScheme, DetNoCdScheme,
    DeterministicScheme, ParticipantSet,
};
use crate::algorithms::UniformScheduleNoCd;
use crate::channel::ChannelMode;
use crate::coding::shannon_lengths;
use crate::dist::{ceil_log2, range_count};
use crate::harness::{
    load_distributions, run_experiment, sweep, Algorithm, DistSource, ExperimentConfig,
    SweepParameter, SCHEMA_LINE,
};
use crate::rangefind::{rf_construct, rf_radius};
use crate::seed::trial_rng;
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VERIFY: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "contention",
    version,
    about = "Contention resolution with predictions and advice"
)]
struct Cli {
    /// Master seed for all randomness.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (0 = all cores); results do not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// key=value settings file; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run an algorithm for many seeded trials and write per-trial CSV.
    Simulate(ExperimentArgs),
    /// Run one experiment per value of a parameter.
    Sweep(SweepArgs),
    /// Print the Shannon code of a prediction and its cost under the truth.
    Code(CodeArgs),
    /// Turn a no-CD schedule into a range-finding sequence.
    RfTransform(RfArgs),
    /// Check whether a set family is strongly selective.
    VerifyFamily(FamilyArgs),
    /// Run an advice scheme.
    Advice(AdviceArgs),
}

#[derive(Debug, Args, Default)]
struct ExperimentArgs {
    /// Channel model (nocd or cd); defaults to the algorithm's own.
    #[arg(long, value_parser = parse_mode)]
    mode: Option<ChannelMode>,
    /// decay, entropy, willard, cd-pred, rand-nocd or rand-cd.
    #[arg(long, value_parser = parse_algorithm)]
    algo: Option<Algorithm>,
    /// Maximum network size.
    #[arg(long)]
    n: Option<u64>,
    /// True size distribution: a generator (point:K, uniform, geometric:R,
    /// dyadic-ranges, dyadic:H) or a distribution file.
    #[arg(long = "true-dist", visible_alias = "true-file")]
    truth: Option<String>,
    /// Predicted size distribution; defaults to the truth.
    #[arg(long = "pred-dist", visible_alias = "pred-file")]
    pred: Option<String>,
    /// Advice bits for the randomized advice algorithms.
    #[arg(long)]
    b: Option<u32>,
    #[arg(long)]
    trials: Option<u64>,
    /// Repetitions of each search probe.
    #[arg(long)]
    reps: Option<u32>,
    /// Round cap per trial.
    #[arg(long)]
    horizon: Option<u64>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    experiment: ExperimentArgs,
    /// b, n, entropy-target or divergence-target.
    #[arg(long)]
    param: String,
    /// Comma-separated values (may be empty).
    #[arg(long, default_value = "", allow_hyphen_values = true)]
    values: String,
}

#[derive(Debug, Args)]
struct CodeArgs {
    #[arg(long)]
    n: Option<u64>,
    /// Distribution the symbols follow.
    #[arg(long = "p", visible_alias = "p-file", default_value = "uniform")]
    p: String,
    /// Distribution the code is built for; defaults to p.
    #[arg(long = "q", visible_alias = "q-file")]
    q: Option<String>,
}

#[derive(Debug, Args)]
struct RfArgs {
    /// File with one transmit probability per line.
    #[arg(long)]
    schedule: PathBuf,
    #[arg(long)]
    n: u64,
    /// Radius multiplier: radius = floor(alpha * log2 log2 n).
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Explicit radius, overriding alpha.
    #[arg(long)]
    radius: Option<u32>,
}

#[derive(Debug, Args)]
struct FamilyArgs {
    /// One subset per line as comma-separated ids.
    #[arg(long)]
    family: PathBuf,
    #[arg(long)]
    n: u32,
    #[arg(long)]
    k: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SchemeName {
    DetNocd,
    DetCd,
    RandNocd,
    RandCd,
}

#[derive(Debug, Args)]
struct AdviceArgs {
    #[arg(long, value_enum)]
    scheme: SchemeName,
    #[arg(long)]
    n: u64,
    #[arg(long)]
    b: u32,
    /// Every nonempty participant set (deterministic schemes, n <= 20).
    #[arg(long, conflicts_with = "trials")]
    exhaustive: bool,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    reps: Option<u32>,
}

fn parse_mode(s: &str) -> std::result::Result<ChannelMode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_algorithm(s: &str) -> std::result::Result<Algorithm, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn std::io::Write, stderr: &mut dyn std::io::Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = if e.use_stderr() {
                e.render().to_string()
            } else {
                e.to_string()
            };
            if e.use_stderr() {
                let _ = write!(stderr, "{text}");
            } else {
                let _ = write!(stdout, "{text}");
            }
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(Outcome {
            text,
            passed,
            summary,
        }) => {
            if let Some(summary) = summary {
                let _ = writeln!(stderr, "{summary}");
            }
            let written = match &cli.out {
                Some(path) => std::fs::write(path, &text).map_err(|e| Error::io(path, e)),
                None => stdout
                    .write_all(text.as_bytes())
                    .map_err(|e| Error::io("<stdout>", e)),
            };
            if let Err(e) = written {
                let _ = writeln!(stderr, "error: {e}");
                return EXIT_USAGE;
            }
            if passed {
                EXIT_OK
            } else {
                EXIT_VERIFY
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_USAGE
        }
    }
}

struct Outcome {
    text: String,
    passed: bool,
    summary: Option<String>,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome {
            text,
            passed: true,
            summary: None,
        }
    }
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Simulate(args) => simulate(cli, args),
        Command::Sweep(args) => run_sweep(cli, args),
        Command::Code(args) => code(cli, args),
        Command::RfTransform(args) => rf_transform(args),
        Command::VerifyFamily(args) => verify_family(args),
        Command::Advice(args) => advice(cli, args),
    }
}

fn base_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(workers) = cli.workers {
        cfg.workers = workers;
    }
    if let Some(out) = &cli.out {
        cfg.out = Some(out.clone());
    }
    Ok(cfg)
}

fn experiment_config(cli: &Cli, args: &ExperimentArgs) -> Result<ExperimentConfig> {
    let mut cfg = base_config(cli)?;
    if let Some(mode) = args.mode {
        cfg.mode = Some(mode);
    }
    if let Some(algo) = args.algo {
        cfg.algorithm = algo;
    }
    if let Some(n) = args.n {
        cfg.n = n;
    }
    if let Some(truth) = &args.truth {
        cfg.truth = DistSource::parse(truth);
    }
    if let Some(pred) = &args.pred {
        cfg.prediction = Some(DistSource::parse(pred));
    }
    if let Some(b) = args.b {
        cfg.advice_bits = Some(b);
    }
    if let Some(trials) = args.trials {
        cfg.trials = trials;
    }
    if let Some(reps) = args.reps {
        cfg.reps = reps;
    }
    if let Some(horizon) = args.horizon {
        cfg.horizon = Some(horizon);
    }
    Ok(cfg)
}

fn simulate(cli: &Cli, args: &ExperimentArgs) -> Result<Outcome> {
    let cfg = experiment_config(cli, args)?;
    let table = run_experiment(&cfg)?;
    let solved = table.solved();
    Ok(Outcome {
        text: table.to_csv(),
        passed: true,
        summary: Some(format!(
            "{} trials: solved {:.4} [{:.4}, {:.4}], mean rounds {:.3}, median {}",
            table.len(),
            solved.rate,
            solved.lower,
            solved.upper,
            table.mean_rounds(),
            table.median_rounds()
        )),
    })
}

fn run_sweep(cli: &Cli, args: &SweepArgs) -> Result<Outcome> {
    let cfg = experiment_config(cli, &args.experiment)?;
    let parameter: SweepParameter = args.param.parse()?;
    let values = args
        .values
        .split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(|v| {
            v.parse::<f64>()
                .map_err(|_| Error::InvalidParameter(format!("bad sweep value {v:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let table = sweep(&cfg, parameter, &values)?;
    let mut summary = String::new();
    for (value, t) in &table.entries {
        let _ = writeln!(
            summary,
            "{parameter}={value}: mean rounds {:.3}",
            t.mean_rounds()
        );
    }
    Ok(Outcome {
        text: table.to_csv(),
        passed: true,
        summary: (!summary.is_empty()).then(|| summary.trim_end().to_string()),
    })
}

fn code(cli: &Cli, args: &CodeArgs) -> Result<Outcome> {
    let base = base_config(cli)?;
    let cfg = ExperimentConfig {
        n: args.n.unwrap_or(base.n),
        truth: DistSource::parse(&args.p),
        prediction: args.q.as_deref().map(DistSource::parse),
        ..base
    };
    let (truth, q) = load_distributions(&cfg)?;
    let p = truth.condense();
    let code = shannon_lengths(&q);
    let mut text = String::from("range,q,length,codeword\n");
    for r in 1..=q.range_count() as u32 {
        let _ = writeln!(
            text,
            "{r},{},{},{}",
            q.prob(r),
            code.length(r).map(|l| l.to_string()).unwrap_or_default(),
            code.word(r).map(|w| w.to_string()).unwrap_or_default()
        );
    }
    let entropy = p.entropy();
    let _ = writeln!(text, "# H(p) = {entropy}");
    match p.kl_divergence(&q) {
        Ok(d) => {
            let _ = writeln!(text, "# D_KL(p||q) = {d}");
        }
        Err(e) => {
            let _ = writeln!(text, "# D_KL(p||q) = inf ({e})");
        }
    }
    match code.expected_length(&p) {
        Ok(e) => {
            let _ = writeln!(text, "# E(S) = {e}");
        }
        Err(e) => {
            let _ = writeln!(text, "# E(S) = inf ({e})");
        }
    }
    Ok(Outcome::ok(text))
}

fn rf_transform(args: &RfArgs) -> Result<Outcome> {
    let text = std::fs::read_to_string(&args.schedule).map_err(|e| Error::io(&args.schedule, e))?;
    let schedule =
        UniformScheduleNoCd::from_text(&text).map_err(|(line, message)| Error::Parse {
            path: args.schedule.clone(),
            line,
            message,
        })?;
    if args.n < 2 {
        return Err(Error::InvalidParameter("n must be at least 2".into()));
    }
    let sequence = rf_construct(&schedule, args.n);
    let radius = args.radius.unwrap_or_else(|| rf_radius(args.n, args.alpha));
    let mut out = String::new();
    let values: Vec<String> = sequence.values().iter().map(u32::to_string).collect();
    let _ = writeln!(out, "# sequence: {}", values.join(" "));
    let _ = writeln!(out, "# radius: {radius}");
    out.push_str("range,step\n");
    for r in 1..=range_count(args.n) {
        let step = sequence
            .solve(r, radius)
            .map(|s| s.to_string())
            .unwrap_or_default();
        let _ = writeln!(out, "{r},{step}");
    }
    Ok(Outcome::ok(out))
}

fn verify_family(args: &FamilyArgs) -> Result<Outcome> {
    let text = std::fs::read_to_string(&args.family).map_err(|e| Error::io(&args.family, e))?;
    let family = parse_family(&text, args.n).map_err(|(line, message)| Error::Parse {
        path: args.family.clone(),
        line,
        message,
    })?;
    let report = is_strongly_selective(&family, args.n, args.k)?;
    let text = match report.witness {
        None => format!(
            "strongly selective: yes (n={}, k={}, {} sets)\n",
            args.n,
            args.k,
            family.len()
        ),
        Some((z, e)) => {
            let ids: Vec<String> = (0..args.n)
                .filter(|i| z >> i & 1 == 1)
                .map(|i| i.to_string())
                .collect();
            format!(
                "strongly selective: no (n={}, k={}, {} sets)\nwitness: Z={{{}}} z={e}\n",
                args.n,
                args.k,
                family.len(),
                ids.join(",")
            )
        }
    };
    Ok(Outcome {
        text,
        passed: report.holds,
        summary: None,
    })
}

fn advice(cli: &Cli, args: &AdviceArgs) -> Result<Outcome> {
    let base = base_config(cli)?;
    match args.scheme {
        SchemeName::DetNocd => det_advice(&DetNoCdScheme::new(args.n, args.b)?, args, &base),
        SchemeName::DetCd => det_advice(&DetCdScheme::new(args.n, args.b)?, args, &base),
        SchemeName::RandNocd | SchemeName::RandCd => {
            if args.exhaustive {
                return Err(Error::InvalidParameter(
                    "--exhaustive applies to the deterministic schemes".into(),
                ));
            }
            let cfg = ExperimentConfig {
                algorithm: if args.scheme == SchemeName::RandNocd {
                    Algorithm::RandNoCd
                } else {
                    Algorithm::RandCd
                },
                mode: None,
                n: args.n,
                truth: DistSource::Named(crate::dist::NamedDistribution::Uniform),
                prediction: None,
                advice_bits: Some(args.b),
                trials: args.trials.unwrap_or(base.trials),
                reps: args.reps.unwrap_or(base.reps),
                ..base
            };
            let table = run_experiment(&cfg)?;
            Ok(Outcome {
                text: table.to_csv(),
                passed: true,
                summary: Some(format!("mean rounds {:.3}", table.mean_rounds())),
            })
        }
    }
}

fn det_advice<S: DeterministicScheme>(
    scheme: &S,
    args: &AdviceArgs,
    base: &ExperimentConfig,
) -> Result<Outcome> {
    let n = args.n;
    let sets: Vec<ParticipantSet> = if args.exhaustive {
        if n > 20 {
            return Err(Error::Infeasible {
                n: n as usize,
                limit: 20,
            });
        }
        (1..1u64 << n)
            .map(|mask| ParticipantSet::from_mask(n, mask))
            .collect::<Result<_>>()?
    } else {
        let trials = args.trials.unwrap_or(base.trials);
        (0..trials)
            .map(|t| {
                let mut rng = trial_rng(base.seed, t);
                let size = rng.random_range(1..=n.min(64));
                let ids = rand::seq::index::sample(&mut rng, n as usize, size as usize);
                ParticipantSet::new(n, ids.into_iter().map(|i| i as u64))
            })
            .collect::<Result<_>>()?
    };
    let bound = match scheme.mode() {
        ChannelMode::NoCd => n.div_ceil(1 << args.b),
        ChannelMode::Cd => (ceil_log2(n) - args.b) as u64 + 1,
    };
    let mut text = format!("{SCHEMA_LINE}\nparticipants,advice,rounds,solved,winner\n");
    let mut passed = true;
    let mut worst = 0;
    for p in &sets {
        let e = run_deterministic(scheme, p);
        let ok = e.solved && e.rounds <= bound && e.winner.is_some_and(|w| p.contains(w));
        passed &= ok;
        worst = worst.max(e.rounds);
        let ids: Vec<String> = p.ids().iter().map(u64::to_string).collect();
        let _ = writeln!(
            text,
            "{},{},{},{},{}",
            ids.join(" "),
            e.advice,
            e.rounds,
            e.solved as u8,
            e.winner.map(|w| w.to_string()).unwrap_or_default()
        );
    }
    Ok(Outcome {
        text,
        passed,
        summary: Some(format!(
            "{} sets, worst rounds {worst}, bound {bound}: {}",
            sets.len(),
            if passed { "ok" } else { "VIOLATED" }
        )),
    })
}

/// Entry point used by the binary.
pub fn main_exit_code() -> i32 {
    run(
        std::env::args_os(),
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    )
}
