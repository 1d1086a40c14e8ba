//! Network-size distributions and their condensation onto geometric ranges.
//!
//! Sizes live in `2..=n`. Range `i` (1-based) covers the sizes in
//! `(2^(i-1), 2^i]`, so `L(n) = {1, .., ceil(log2 n)}`.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand::Rng;

use crate::{Error, Result};

/// Absolute tolerance for "sums to one" checks.
pub const TOLERANCE: f64 = 1e-12;

/// Smallest `j` with `2^j >= x`. `x` must be at least 1.
pub fn ceil_log2(x: u64) -> u32 {
    assert!(x >= 1, "ceil_log2 of zero");
    if x == 1 {
        0
    } else {
        64 - (x - 1).leading_zeros()
    }
}

/// Number of ranges for maximum network size `n`, i.e. `ceil(log2 n)`.
pub fn range_count(n: u64) -> u32 {
    ceil_log2(n)
}

/// The range containing size `k >= 2`.
pub fn range_of(k: u64) -> u32 {
    ceil_log2(k)
}

/// Inclusive size bounds of range `i` truncated to `2..=n`.
pub fn range_sizes(i: u32, n: u64) -> (u64, u64) {
    let lo = (1u64 << (i - 1)) + 1;
    let hi = if i >= 64 { u64::MAX } else { 1u64 << i };
    (lo.max(2), hi.min(n))
}

/// `ceil(log2(1/p))` for `p` in `(0, 1]`, computed exactly: the smallest
/// integer `l >= 0` with `2^-l <= p`.
pub fn ceil_log2_recip(p: f64) -> u32 {
    assert!(p > 0.0 && p <= 1.0, "probability {p} outside (0, 1]");
    let mut l = (-p.log2()).ceil().max(0.0) as i32;
    while l > 0 && 2f64.powi(-(l - 1)) <= p {
        l -= 1;
    }
    while 2f64.powi(-l) > p {
        l += 1;
    }
    l as u32
}

/// `log2(log2 n)`, the scale of range-finding radii.
pub fn log2_log2(n: u64) -> f64 {
    (n as f64).log2().log2()
}

/// Neumaier-compensated sum.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    sum + c
}

fn check_probabilities<'a>(values: impl Iterator<Item = &'a f64>) -> Result<f64> {
    let mut all = Vec::new();
    for &p in values {
        if !p.is_finite() || p < 0.0 {
            return Err(Error::InvalidDistribution(format!(
                "probability {p} is not a finite non-negative number"
            )));
        }
        all.push(p);
    }
    let total = compensated_sum(all);
    if (total - 1.0).abs() > TOLERANCE {
        return Err(Error::InvalidDistribution(format!(
            "probabilities sum to {total}, not 1"
        )));
    }
    Ok(total)
}

/// A probability distribution over network sizes `2..=n`.
///
/// Only the support (sizes with positive probability) is stored, sorted by
/// size, together with its cumulative distribution for sampling.
#[derive(Debug, Clone, PartialEq)]
pub struct SizeDistribution {
    n: u64,
    support: Vec<(u64, f64)>,
    cdf: Vec<f64>,
}

impl SizeDistribution {
    /// Builds a distribution from `(size, probability)` pairs. Sizes must be
    /// distinct and lie in `2..=n`; unlisted sizes have probability zero.
    pub fn new(n: u64, entries: impl IntoIterator<Item = (u64, f64)>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDistribution(format!(
                "maximum network size must be at least 2, got {n}"
            )));
        }
        let mut entries: Vec<(u64, f64)> = entries.into_iter().collect();
        entries.sort_by_key(|&(k, _)| k);
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidDistribution(format!(
                    "size {} listed twice",
                    w[0].0
                )));
            }
        }
        if let Some(&(k, _)) = entries.iter().find(|&&(k, _)| k < 2 || k > n) {
            return Err(Error::InvalidDistribution(format!(
                "size {k} outside 2..={n}"
            )));
        }
        check_probabilities(entries.iter().map(|(_, p)| p))?;
        entries.retain(|&(_, p)| p > 0.0);

        let mut cdf = Vec::with_capacity(entries.len());
        let mut acc = 0.0;
        let mut comp = 0.0;
        for &(_, p) in &entries {
            let t = acc + p;
            if acc.abs() >= p.abs() {
                comp += (acc - t) + p;
            } else {
                comp += (p - t) + acc;
            }
            acc = t;
            cdf.push(acc + comp);
        }
        Ok(SizeDistribution {
            n,
            support: entries,
            cdf,
        })
    }

    /// Point mass at size `k`.
    pub fn point(n: u64, k: u64) -> Result<Self> {
        Self::new(n, [(k, 1.0)])
    }

    /// Uniform over every size in `2..=n`.
    pub fn uniform(n: u64) -> Result<Self> {
        if n < 2 {
            return Self::new(n, []);
        }
        let p = 1.0 / (n - 1) as f64;
        Self::new(n, (2..=n).map(|k| (k, p)))
    }

    /// Truncated geometric: `P(k)` proportional to `r^(k-2)` on `2..=n`.
    pub fn geometric(n: u64, r: f64) -> Result<Self> {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "geometric ratio must lie in (0, 1), got {r}"
            )));
        }
        let weights: Vec<(u64, f64)> = (2..=n)
            .map(|k| (k, r.powf((k - 2) as f64)))
            .take_while(|&(_, w)| w > 0.0)
            .collect();
        let total = compensated_sum(weights.iter().map(|&(_, w)| w));
        Self::new(n, weights.into_iter().map(|(k, w)| (k, w / total)))
    }

    /// Spreads each range's mass uniformly over that range's sizes.
    pub fn spread_ranges(n: u64, q: &CondensedDistribution) -> Result<Self> {
        if q.range_count() != range_count(n) as usize {
            return Err(Error::RangeCountMismatch {
                left: q.range_count(),
                right: range_count(n) as usize,
            });
        }
        let mut entries = Vec::new();
        for (idx, &mass) in q.probs().iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            let (lo, hi) = range_sizes(idx as u32 + 1, n);
            let each = mass / (hi - lo + 1) as f64;
            entries.extend((lo..=hi).map(|k| (k, each)));
        }
        Self::new(n, entries)
    }

    pub fn max_size(&self) -> u64 {
        self.n
    }

    pub fn range_count(&self) -> u32 {
        range_count(self.n)
    }

    /// Sizes with positive probability, ascending.
    pub fn support(&self) -> &[(u64, f64)] {
        &self.support
    }

    pub fn probability(&self, k: u64) -> f64 {
        self.support
            .binary_search_by_key(&k, |&(s, _)| s)
            .map(|i| self.support[i].1)
            .unwrap_or(0.0)
    }

    /// Inverts the CDF at `u` in `[0, 1)`: the smallest supported size whose
    /// cumulative probability exceeds `u`.
    pub fn size_at_quantile(&self, u: f64) -> u64 {
        let idx = self.cdf.partition_point(|&c| c <= u);
        self.support[idx.min(self.support.len() - 1)].0
    }

    /// Draws a network size.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let u: f64 = rng.random();
        self.size_at_quantile(u)
    }

    /// Aggregates probability mass onto ranges.
    pub fn condense(&self) -> CondensedDistribution {
        let m = self.range_count() as usize;
        let mut buckets: Vec<Vec<f64>> = vec![Vec::new(); m];
        for &(k, p) in &self.support {
            buckets[range_of(k) as usize - 1].push(p);
        }
        CondensedDistribution {
            probs: buckets.into_iter().map(compensated_sum).collect(),
        }
    }

    /// Reads the plain-text format: first line `n`, then `k p_k` lines.
    /// Blank lines and lines starting with `#` are ignored.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|(line, message)| Error::Parse {
            path: path.to_path_buf(),
            line,
            message,
        })
    }

    fn parse(text: &str) -> std::result::Result<Self, (usize, String)> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (first, header) = lines.next().ok_or((1, "empty file".to_string()))?;
        let n: u64 = header
            .parse()
            .map_err(|_| (first, format!("expected network size, got {header:?}")))?;
        let mut entries = Vec::new();
        let mut last_line = first;
        for (line, content) in lines {
            last_line = line;
            let mut parts = content.split_whitespace();
            let (Some(k), Some(p), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err((line, format!("expected `k p_k`, got {content:?}")));
            };
            let k: u64 = k.parse().map_err(|_| (line, format!("bad size {k:?}")))?;
            let p: f64 = p
                .parse()
                .map_err(|_| (line, format!("bad probability {p:?}")))?;
            entries.push((k, p));
        }
        SizeDistribution::new(n, entries).map_err(|e| (last_line, e.to_string()))
    }

    /// Serialises to the plain-text format read by [`SizeDistribution::from_file`].
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for &(k, p) in &self.support {
            out.push_str(&format!("{k} {p:e}\n"));
        }
        out
    }
}

/// A probability vector over ranges `1..=m`.
#[derive(Debug, Clone, PartialEq)]
pub struct CondensedDistribution {
    probs: Vec<f64>,
}

impl CondensedDistribution {
    /// `probs[i - 1]` is the mass of range `i`.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("no ranges".into()));
        }
        check_probabilities(probs.iter())?;
        Ok(CondensedDistribution { probs })
    }

    /// Uniform over all `m` ranges.
    pub fn uniform(m: usize) -> Result<Self> {
        Self::new(vec![1.0 / m as f64; m])
    }

    pub fn point(m: usize, range: u32) -> Result<Self> {
        if range == 0 || range as usize > m {
            return Err(Error::InvalidParameter(format!(
                "range {range} outside 1..={m}"
            )));
        }
        let mut probs = vec![0.0; m];
        probs[range as usize - 1] = 1.0;
        Self::new(probs)
    }

    pub fn range_count(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Mass of range `i` (1-based); zero outside `1..=m`.
    pub fn prob(&self, range: u32) -> f64 {
        if range == 0 {
            return 0.0;
        }
        self.probs.get(range as usize - 1).copied().unwrap_or(0.0)
    }

    /// Shannon entropy in bits; zero-mass ranges contribute nothing.
    pub fn entropy(&self) -> f64 {
        compensated_sum(
            self.probs
                .iter()
                .filter(|&&q| q > 0.0)
                .map(|&q| -q * q.log2()),
        )
    }

    /// `D_KL(self || other)` in bits.
    pub fn kl_divergence(&self, other: &CondensedDistribution) -> Result<f64> {
        if self.probs.len() != other.probs.len() {
            return Err(Error::RangeCountMismatch {
                left: self.probs.len(),
                right: other.probs.len(),
            });
        }
        let mut terms = Vec::with_capacity(self.probs.len());
        for (i, (&p, &q)) in self.probs.iter().zip(&other.probs).enumerate() {
            if p == 0.0 {
                continue;
            }
            if q == 0.0 {
                return Err(Error::AbsoluteContinuity {
                    range: i as u32 + 1,
                });
            }
            terms.push(p * (p / q).log2());
        }
        // Rounding can leave a tiny negative value when the inputs agree.
        Ok(compensated_sum(terms).max(0.0))
    }

    /// Mixes `self` with a point mass on its least likely range until
    /// `D_KL(self || result)` equals `target` bits (to about 1e-10).
    ///
    /// The result stays absolutely continuous with respect to `self`.
    pub fn perturb_to_divergence(&self, target: f64) -> Result<CondensedDistribution> {
        if !(target >= 0.0 && target.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "target divergence must be finite and non-negative, got {target}"
            )));
        }
        if target == 0.0 {
            return Ok(self.clone());
        }
        let m = self.probs.len();
        if m < 2 {
            return Err(Error::InvalidParameter(
                "cannot perturb a single-range distribution".into(),
            ));
        }
        let mode = (0..m)
            .max_by(|&a, &b| self.probs[a].total_cmp(&self.probs[b]).then(b.cmp(&a)))
            .unwrap();
        // Least likely range; ties go to the one farthest from the mode.
        let far = (0..m)
            .min_by(|&a, &b| {
                self.probs[a]
                    .total_cmp(&self.probs[b])
                    .then(b.abs_diff(mode).cmp(&a.abs_diff(mode)))
            })
            .unwrap();
        let mix = |lambda: f64| -> Vec<f64> {
            self.probs
                .iter()
                .enumerate()
                .map(|(i, &p)| (1.0 - lambda) * p + if i == far { lambda } else { 0.0 })
                .collect()
        };
        let divergence = |lambda: f64| -> f64 {
            let q = mix(lambda);
            compensated_sum(
                self.probs
                    .iter()
                    .zip(&q)
                    .filter(|(&p, _)| p > 0.0)
                    .map(|(&p, &q)| p * (p / q).log2()),
            )
        };
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if divergence(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-15 {
                break;
            }
        }
        let q = mix(0.5 * (lo + hi));
        let total = compensated_sum(q.iter().copied());
        CondensedDistribution::new(q.into_iter().map(|v| v / total).collect())
    }
}

/// Built-in distribution generators, parsed from `point:K`, `uniform`,
/// `geometric:R`, `dyadic-ranges` and `dyadic:H`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NamedDistribution {
    /// All mass on one size.
    Point(u64),
    /// Uniform over sizes `2..=n`.
    Uniform,
    /// Truncated geometric over sizes with ratio `r`.
    Geometric(f64),
    /// Range `i` gets `2^-i` (the last range takes the remainder), spread
    /// uniformly inside each range.
    DyadicRanges,
    /// Uniform over `2^h` evenly spaced ranges, so the condensed entropy is
    /// exactly `h` bits.
    Dyadic(u32),
}

impl NamedDistribution {
    pub fn build(&self, n: u64) -> Result<SizeDistribution> {
        match *self {
            NamedDistribution::Point(k) => SizeDistribution::point(n, k),
            NamedDistribution::Uniform => SizeDistribution::uniform(n),
            NamedDistribution::Geometric(r) => SizeDistribution::geometric(n, r),
            NamedDistribution::DyadicRanges => {
                SizeDistribution::spread_ranges(n, &dyadic_ranges(range_count(n) as usize)?)
            }
            NamedDistribution::Dyadic(h) => {
                SizeDistribution::spread_ranges(n, &dyadic_uniform(range_count(n) as usize, h)?)
            }
        }
    }
}

impl FromStr for NamedDistribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((name, arg)) => (name.trim(), Some(arg.trim())),
            None => (s.trim(), None),
        };
        let bad = |what: &str| Error::InvalidParameter(format!("{what} in distribution {s:?}"));
        match (name, arg) {
            ("point", Some(k)) => Ok(NamedDistribution::Point(
                k.parse().map_err(|_| bad("bad size"))?,
            )),
            ("uniform", None) => Ok(NamedDistribution::Uniform),
            ("geometric", Some(r)) => Ok(NamedDistribution::Geometric(
                r.parse().map_err(|_| bad("bad ratio"))?,
            )),
            ("dyadic-ranges", None) => Ok(NamedDistribution::DyadicRanges),
            ("dyadic", Some(h)) => Ok(NamedDistribution::Dyadic(
                h.parse().map_err(|_| bad("bad entropy"))?,
            )),
            _ => Err(bad("unknown generator")),
        }
    }
}

impl fmt::Display for NamedDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NamedDistribution::Point(k) => write!(f, "point:{k}"),
            NamedDistribution::Uniform => write!(f, "uniform"),
            NamedDistribution::Geometric(r) => write!(f, "geometric:{r}"),
            NamedDistribution::DyadicRanges => write!(f, "dyadic-ranges"),
            NamedDistribution::Dyadic(h) => write!(f, "dyadic:{h}"),
        }
    }
}

/// `q_i = 2^-i` for `i < m`, `q_m = 2^-(m-1)`.
pub fn dyadic_ranges(m: usize) -> Result<CondensedDistribution> {
    let mut probs: Vec<f64> = (1..=m).map(|i| 2f64.powi(-(i as i32))).collect();
    if m == 1 {
        probs[0] = 1.0;
    } else {
        probs[m - 1] = 2f64.powi(-(m as i32 - 1));
    }
    CondensedDistribution::new(probs)
}

/// Uniform over `2^h` ranges spaced evenly through `1..=m`.
pub fn dyadic_uniform(m: usize, h: u32) -> Result<CondensedDistribution> {
    let count = 1usize
        .checked_shl(h)
        .filter(|&c| c <= m)
        .ok_or_else(|| Error::InvalidParameter(format!("2^{h} ranges do not fit in {m} ranges")))?;
    let mut probs = vec![0.0; m];
    for j in 0..count {
        probs[m * (j + 1) / count - 1] = 1.0 / count as f64;
    }
    CondensedDistribution::new(probs)
}
