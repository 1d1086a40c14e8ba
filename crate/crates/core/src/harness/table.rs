use std::fmt::Write as _;
use std::path::Path;

use crate::dist::compensated_sum;
use crate::{Error, Result};

/// First line of every CSV this crate writes.
pub const SCHEMA_LINE: &str = "# contention-results schema 1";
pub const ROW_HEADER: &str = "trial,k,solved,rounds";

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959964;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialRow {
    pub trial: u64,
    pub k: u64,
    pub solved: bool,
    pub rounds: u64,
}

/// A binomial proportion with its Wilson 95% interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Proportion {
    pub successes: u64,
    pub trials: u64,
    pub rate: f64,
    pub lower: f64,
    pub upper: f64,
}

impl Proportion {
    pub fn wilson(successes: u64, trials: u64) -> Self {
        if trials == 0 {
            return Proportion {
                successes,
                trials,
                rate: 0.0,
                lower: 0.0,
                upper: 1.0,
            };
        }
        let n = trials as f64;
        let p = successes as f64 / n;
        let z2 = Z95 * Z95;
        let denom = 1.0 + z2 / n;
        let centre = (p + z2 / (2.0 * n)) / denom;
        let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
        Proportion {
            successes,
            trials,
            rate: p,
            lower: (centre - half).max(0.0),
            upper: (centre + half).min(1.0),
        }
    }

    pub fn half_width(&self) -> f64 {
        (self.upper - self.lower) / 2.0
    }
}

/// Per-trial results in trial order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ResultTable {
    pub rows: Vec<TrialRow>,
}

impl ResultTable {
    pub fn new(rows: Vec<TrialRow>) -> Self {
        ResultTable { rows }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Fraction of trials solved within `budget` rounds.
    pub fn success_within(&self, budget: u64) -> Proportion {
        let hits = self
            .rows
            .iter()
            .filter(|r| r.solved && r.rounds <= budget)
            .count() as u64;
        Proportion::wilson(hits, self.rows.len() as u64)
    }

    pub fn solved(&self) -> Proportion {
        Proportion::wilson(
            self.rows.iter().filter(|r| r.solved).count() as u64,
            self.rows.len() as u64,
        )
    }

    /// Mean rounds over all rows (unsolved rows count their round cap).
    pub fn mean_rounds(&self) -> f64 {
        compensated_sum(self.rows.iter().map(|r| r.rounds as f64)) / self.rows.len() as f64
    }

    /// Standard error of [`Self::mean_rounds`].
    pub fn std_error(&self) -> f64 {
        let n = self.rows.len() as f64;
        if self.rows.len() < 2 {
            return 0.0;
        }
        let mean = self.mean_rounds();
        let var =
            compensated_sum(self.rows.iter().map(|r| (r.rounds as f64 - mean).powi(2))) / (n - 1.0);
        (var / n).sqrt()
    }

    pub fn median_rounds(&self) -> f64 {
        let mut rounds: Vec<u64> = self.rows.iter().map(|r| r.rounds).collect();
        rounds.sort_unstable();
        match rounds.len() {
            0 => f64::NAN,
            len if len % 2 == 1 => rounds[len / 2] as f64,
            len => (rounds[len / 2 - 1] + rounds[len / 2]) as f64 / 2.0,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("{SCHEMA_LINE}\n{ROW_HEADER}\n");
        for r in &self.rows {
            writeln!(out, "{},{},{},{}", r.trial, r.k, r.solved as u8, r.rounds).unwrap();
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }

    /// Reads a table written by [`Self::to_csv`].
    pub fn from_csv(text: &str) -> Result<Self> {
        let bad = |line: usize, message: String| Error::Parse {
            path: "<csv>".into(),
            line,
            message,
        };
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, SCHEMA_LINE)) => {}
            other => return Err(bad(1, format!("expected {SCHEMA_LINE:?}, got {other:?}"))),
        }
        match lines.next() {
            Some((_, ROW_HEADER)) => {}
            other => return Err(bad(2, format!("expected {ROW_HEADER:?}, got {other:?}"))),
        }
        let mut rows = Vec::new();
        for (i, line) in lines {
            let fields: Vec<&str> = line.split(',').collect();
            let num = |s: &str| {
                s.parse::<u64>()
                    .map_err(|_| bad(i + 1, format!("bad number {s:?}")))
            };
            let [trial, k, solved, rounds] = fields[..] else {
                return Err(bad(
                    i + 1,
                    format!("expected 4 fields, got {}", fields.len()),
                ));
            };
            rows.push(TrialRow {
                trial: num(trial)?,
                k: num(k)?,
                solved: match solved {
                    "1" => true,
                    "0" => false,
                    s => return Err(bad(i + 1, format!("bad solved flag {s:?}"))),
                },
                rounds: num(rounds)?,
            });
        }
        Ok(ResultTable { rows })
    }
}

/// Tables from a sweep, tagged with the swept parameter and value.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepTable {
    pub parameter: String,
    pub entries: Vec<(String, ResultTable)>,
}

impl SweepTable {
    pub fn to_csv(&self) -> String {
        let mut out = format!("{SCHEMA_LINE}\nparameter,value,{ROW_HEADER}\n");
        for (value, table) in &self.entries {
            for r in &table.rows {
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    self.parameter, value, r.trial, r.k, r.solved as u8, r.rounds
                )
                .unwrap();
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(rounds: &[(bool, u64)]) -> ResultTable {
        ResultTable::new(
            rounds
                .iter()
                .enumerate()
                .map(|(i, &(solved, rounds))| TrialRow {
                    trial: i as u64,
                    k: 2,
                    solved,
                    rounds,
                })
                .collect(),
        )
    }

    #[test]
    fn success_examples() {
        let all_first = table(&[(true, 1); 5]);
        assert_eq!(all_first.success_within(1).rate, 1.0);
        let none = table(&[(true, 5), (false, 3)]);
        assert_eq!(none.success_within(2).rate, 0.0);
        let mut rows = vec![(true, 1); 3];
        rows.extend([(true, 9); 7]);
        let p = table(&rows).success_within(1);
        assert_eq!(p.rate, 0.3);
        // Wilson interval for 3/10.
        assert!((p.lower - 0.10779).abs() < 1e-4, "{p:?}");
        assert!((p.upper - 0.60322).abs() < 1e-4, "{p:?}");
    }

    #[test]
    fn aggregates() {
        let t = table(&[(true, 1), (true, 3), (false, 8), (true, 4)]);
        assert_eq!(t.mean_rounds(), 4.0);
        assert_eq!(t.median_rounds(), 3.5);
        assert_eq!(t.solved().successes, 3);
    }

    #[test]
    fn csv_round_trip() {
        let t = table(&[(true, 1), (false, 30)]);
        let csv = t.to_csv();
        assert!(csv.starts_with("# contention-results schema 1\ntrial,k,solved,rounds\n0,2,1,1\n"));
        assert_eq!(ResultTable::from_csv(&csv).unwrap(), t);
        assert!(ResultTable::from_csv("trial,k\n").is_err());
        assert!(ResultTable::from_csv(&format!("{SCHEMA_LINE}\n{ROW_HEADER}\n1,2,3\n")).is_err());
    }
}
