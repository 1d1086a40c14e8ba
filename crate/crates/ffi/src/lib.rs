//! C ABI for the `contention` crate.
//!
//! Every fallible function returns a [`CrStatus`]; on failure a message for
//! the calling thread is available from [`cr_last_error_message`]. Objects
//! are handed out as opaque pointers and released with their `_free`
//! function. Strings returned by the library are released with
//! [`cr_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use contention::advice::{
    is_strongly_selective, run_deterministic, DetCdScheme, DetNoCdScheme, ParticipantSet,
};
use contention::channel::exact_success_prob;
use contention::dist::{NamedDistribution, SizeDistribution};
use contention::harness::{run_experiment, ExperimentConfig, ResultTable};
use contention::Error;

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidDistribution = 3,
    AbsoluteContinuity = 4,
    Parse = 5,
    Io = 6,
    Infeasible = 7,
    Precondition = 8,
    Panic = 9,
}

/// Which deterministic advice scheme to run.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrDetScheme {
    NoCd = 0,
    Cd = 1,
}

/// A network-size distribution.
pub struct CrDistribution(SizeDistribution);

/// Per-trial results of an experiment.
pub struct CrResultTable(ResultTable);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CrTrialRow {
    pub trial: u64,
    pub k: u64,
    pub solved: bool,
    pub rounds: u64,
}

/// A proportion with its Wilson 95% interval.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CrProportion {
    pub rate: f64,
    pub lower: f64,
    pub upper: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: impl Into<String>) {
    let message = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(message).unwrap_or_default());
}

fn status_of(err: &Error) -> CrStatus {
    match err {
        Error::InvalidDistribution(_) | Error::RangeCountMismatch { .. } => {
            CrStatus::InvalidDistribution
        }
        Error::AbsoluteContinuity { .. } => CrStatus::AbsoluteContinuity,
        Error::Parse { .. } | Error::Config(_) => CrStatus::Parse,
        Error::Io { .. } => CrStatus::Io,
        Error::Infeasible { .. } => CrStatus::Infeasible,
        Error::Precondition(_) | Error::Coverage { .. } => CrStatus::Precondition,
        _ => CrStatus::InvalidArgument,
    }
}

enum Failure {
    Null(&'static str),
    Arg(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

/// Runs `body`, translating errors and panics into status codes.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> CrStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => CrStatus::Ok,
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("{what} is null"));
            CrStatus::NullPointer
        }
        Ok(Err(Failure::Arg(message))) => {
            set_error(message);
            CrStatus::InvalidArgument
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic");
            CrStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::Arg(format!("{what} is not UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(what))
}

/// Message describing the last failure on this thread. Valid until the
/// next failing call on the same thread; never null.
#[no_mangle]
pub extern "C" fn cr_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn cr_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a generator distribution (`point:K`, `uniform`, `geometric:R`,
/// `dyadic-ranges`, `dyadic:H`) over sizes `2..=n`.
///
/// # Safety
/// `spec` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cr_distribution_named(
    spec: *const c_char,
    n: u64,
    out: *mut *mut CrDistribution,
) -> CrStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let named: NamedDistribution = str_arg(spec, "spec")?.parse()?;
        *out = Box::into_raw(Box::new(CrDistribution(named.build(n)?)));
        Ok(())
    })
}

/// Reads a distribution file (first line `n`, then `k p_k` lines).
///
/// # Safety
/// `path` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cr_distribution_from_file(
    path: *const c_char,
    out: *mut *mut CrDistribution,
) -> CrStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let path = str_arg(path, "path")?;
        *out = Box::into_raw(Box::new(CrDistribution(SizeDistribution::from_file(
            Path::new(path),
        )?)));
        Ok(())
    })
}

/// # Safety
/// `dist` must come from this library and not be used afterwards; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn cr_distribution_free(dist: *mut CrDistribution) {
    if !dist.is_null() {
        drop(Box::from_raw(dist));
    }
}

/// Entropy in bits of the distribution condensed onto ranges.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn cr_distribution_entropy(
    dist: *const CrDistribution,
    out: *mut f64,
) -> CrStatus {
    guard(|| {
        *out_arg(out, "out")? = ref_arg(dist, "dist")?.0.condense().entropy();
        Ok(())
    })
}

/// KL divergence in bits between the condensed forms of `p` and `q`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn cr_distribution_kl(
    p: *const CrDistribution,
    q: *const CrDistribution,
    out: *mut f64,
) -> CrStatus {
    guard(|| {
        let p = ref_arg(p, "p")?.0.condense();
        let q = ref_arg(q, "q")?.0.condense();
        *out_arg(out, "out")? = p.kl_divergence(&q)?;
        Ok(())
    })
}

/// Probability that exactly one of `k` participants transmits with probability `p`.
#[no_mangle]
pub extern "C" fn cr_exact_success_prob(k: u64, p: f64) -> f64 {
    exact_success_prob(k, p)
}

/// Runs an experiment described by `key=value` lines (the CLI config format).
///
/// # Safety
/// `config` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cr_run_experiment(
    config: *const c_char,
    out: *mut *mut CrResultTable,
) -> CrStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let mut cfg = ExperimentConfig::default();
        cfg.apply_text(str_arg(config, "config")?, Path::new("<config>"))?;
        *out = Box::into_raw(Box::new(CrResultTable(run_experiment(&cfg)?)));
        Ok(())
    })
}

/// # Safety
/// `table` must come from this library and not be used afterwards; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn cr_result_free(table: *mut CrResultTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Number of rows; 0 for null.
///
/// # Safety
/// `table` must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn cr_result_len(table: *const CrResultTable) -> usize {
    table.as_ref().map_or(0, |t| t.0.len())
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn cr_result_row(
    table: *const CrResultTable,
    index: usize,
    out: *mut CrTrialRow,
) -> CrStatus {
    guard(|| {
        let table = ref_arg(table, "table")?;
        let row = table.0.rows.get(index).ok_or_else(|| {
            Failure::Arg(format!("row {index} outside table of {}", table.0.len()))
        })?;
        *out_arg(out, "out")? = CrTrialRow {
            trial: row.trial,
            k: row.k,
            solved: row.solved,
            rounds: row.rounds,
        };
        Ok(())
    })
}

/// Fraction of trials solved within `budget` rounds.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn cr_result_success_within(
    table: *const CrResultTable,
    budget: u64,
    out: *mut CrProportion,
) -> CrStatus {
    guard(|| {
        let p = ref_arg(table, "table")?.0.success_within(budget);
        *out_arg(out, "out")? = CrProportion {
            rate: p.rate,
            lower: p.lower,
            upper: p.upper,
        };
        Ok(())
    })
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn cr_result_mean_rounds(
    table: *const CrResultTable,
    out: *mut f64,
) -> CrStatus {
    guard(|| {
        *out_arg(out, "out")? = ref_arg(table, "table")?.0.mean_rounds();
        Ok(())
    })
}

/// The table as CSV; free the string with [`cr_string_free`].
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn cr_result_to_csv(
    table: *const CrResultTable,
    out: *mut *mut c_char,
) -> CrStatus {
    guard(|| {
        let csv = ref_arg(table, "table")?.0.to_csv();
        *out_arg(out, "out")? = CString::new(csv)
            .map_err(|_| Failure::Arg("CSV contains a NUL byte".into()))?
            .into_raw();
        Ok(())
    })
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn cr_result_write_csv(
    table: *const CrResultTable,
    path: *const c_char,
) -> CrStatus {
    guard(|| {
        let table = ref_arg(table, "table")?;
        table.0.write_csv(str_arg(path, "path")?)?;
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn cr_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Runs a deterministic advice scheme with `b` bits on the participants
/// `ids[0..len]` of a universe of `n`. Writes the round of the first lone
/// transmission and its sender; `winner` is `UINT64_MAX` if unsolved.
///
/// # Safety
/// `ids` must point to `len` readable values; outputs must be valid.
#[no_mangle]
pub unsafe extern "C" fn cr_det_advice_run(
    scheme: CrDetScheme,
    n: u64,
    b: u32,
    ids: *const u64,
    len: usize,
    rounds: *mut u64,
    winner: *mut u64,
) -> CrStatus {
    guard(|| {
        if ids.is_null() {
            return Err(Failure::Null("ids"));
        }
        let rounds = out_arg(rounds, "rounds")?;
        let winner = out_arg(winner, "winner")?;
        let set = ParticipantSet::new(n, std::slice::from_raw_parts(ids, len).iter().copied())?;
        let e = match scheme {
            CrDetScheme::NoCd => run_deterministic(&DetNoCdScheme::new(n, b)?, &set),
            CrDetScheme::Cd => run_deterministic(&DetCdScheme::new(n, b)?, &set),
        };
        *rounds = e.rounds;
        *winner = e.winner.unwrap_or(u64::MAX);
        Ok(())
    })
}

/// Checks whether `family[0..len]` (subsets of `{0..n-1}` as bit masks) is
/// `(n, k)`-strongly selective. When it is not, writes a set `Z` and an
/// element `z` of it that no member isolates.
///
/// # Safety
/// `family` must point to `len` readable masks (or be null with `len == 0`);
/// outputs must be valid.
#[no_mangle]
pub unsafe extern "C" fn cr_is_strongly_selective(
    family: *const u32,
    len: usize,
    n: u32,
    k: u32,
    holds: *mut bool,
    witness_set: *mut u32,
    witness_element: *mut u32,
) -> CrStatus {
    guard(|| {
        let family = if len == 0 {
            &[][..]
        } else if family.is_null() {
            return Err(Failure::Null("family"));
        } else {
            std::slice::from_raw_parts(family, len)
        };
        let holds = out_arg(holds, "holds")?;
        let witness_set = out_arg(witness_set, "witness_set")?;
        let witness_element = out_arg(witness_element, "witness_element")?;
        let report = is_strongly_selective(family, n, k)?;
        *holds = report.holds;
        let (z, e) = report.witness.unwrap_or((0, 0));
        *witness_set = z;
        *witness_element = e;
        Ok(())
    })
}
