//! Prefix codes over ranges and the target-distance code.

use std::fmt;

use crate::dist::{ceil_log2, ceil_log2_recip, CondensedDistribution};
use crate::rangefind::RangeFindingSequence;
use crate::{Error, Result};

/// A binary codeword, most significant bit first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Codeword(Vec<bool>);

impl Codeword {
    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_prefix_of(&self, other: &Codeword) -> bool {
        other.0.starts_with(&self.0)
    }
}

impl fmt::Display for Codeword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// A canonical prefix code over ranges `1..=m`. Ranges with zero
/// probability under the source get no codeword.
#[derive(Debug, Clone, PartialEq)]
pub struct PrefixCode {
    lengths: Vec<Option<u32>>,
    words: Vec<Option<Codeword>>,
}

impl PrefixCode {
    /// Canonical codewords for the given lengths, assigned in order of
    /// (length, range index).
    pub fn canonical(lengths: Vec<Option<u32>>) -> Result<Self> {
        if let Some(i) = lengths.iter().position(|l| *l == Some(0)) {
            return Err(Error::InvalidParameter(format!(
                "range {} has a zero-length codeword",
                i + 1
            )));
        }
        let mut order: Vec<(u32, usize)> = lengths
            .iter()
            .enumerate()
            .filter_map(|(i, l)| l.map(|l| (l, i)))
            .collect();
        order.sort_unstable();

        let mut words = vec![None; lengths.len()];
        let mut code: Vec<bool> = Vec::new();
        let mut first = true;
        for (len, idx) in order {
            if first {
                code = vec![false; len as usize];
                first = false;
            } else {
                // Increment, then extend with zeros to the new length.
                let mut pos = code.len();
                loop {
                    if pos == 0 {
                        return Err(Error::InvalidParameter(
                            "codeword lengths violate the Kraft inequality".into(),
                        ));
                    }
                    pos -= 1;
                    if code[pos] {
                        code[pos] = false;
                    } else {
                        code[pos] = true;
                        break;
                    }
                }
                code.resize(len as usize, false);
            }
            words[idx] = Some(Codeword(code.clone()));
        }
        Ok(PrefixCode { lengths, words })
    }

    pub fn alphabet_size(&self) -> usize {
        self.lengths.len()
    }

    /// Codeword length of range `i` (1-based), if coded.
    pub fn length(&self, range: u32) -> Option<u32> {
        self.lengths.get(range as usize - 1).copied().flatten()
    }

    pub fn lengths(&self) -> &[Option<u32>] {
        &self.lengths
    }

    pub fn word(&self, range: u32) -> Option<&Codeword> {
        self.words.get(range as usize - 1).and_then(Option::as_ref)
    }

    /// `sum 2^-l` over coded ranges.
    pub fn kraft_sum(&self) -> f64 {
        self.lengths
            .iter()
            .flatten()
            .map(|&l| 2f64.powi(-(l as i32)))
            .sum()
    }

    /// Whether no codeword is a prefix of another.
    pub fn is_prefix_free(&self) -> bool {
        let words: Vec<&Codeword> = self.words.iter().flatten().collect();
        words.iter().enumerate().all(|(i, a)| {
            words
                .iter()
                .enumerate()
                .all(|(j, b)| i == j || !a.is_prefix_of(b))
        })
    }

    /// Expected codeword length `sum p_i l_i` when symbols follow `p`.
    pub fn expected_length(&self, p: &CondensedDistribution) -> Result<f64> {
        if p.range_count() != self.lengths.len() {
            return Err(Error::RangeCountMismatch {
                left: p.range_count(),
                right: self.lengths.len(),
            });
        }
        let mut total = 0.0;
        for (i, (&mass, len)) in p.probs().iter().zip(&self.lengths).enumerate() {
            if mass == 0.0 {
                continue;
            }
            let len = len.ok_or(Error::AbsoluteContinuity {
                range: i as u32 + 1,
            })?;
            total += mass * len as f64;
        }
        Ok(total)
    }
}

/// Shannon lengths `ceil(log2(1/q_i))`, with length 1 for a sole certain
/// symbol, and their canonical codewords.
pub fn shannon_lengths(q: &CondensedDistribution) -> PrefixCode {
    let lengths = q
        .probs()
        .iter()
        .map(|&p| (p > 0.0).then(|| ceil_log2_recip(p.min(1.0)).max(1)))
        .collect();
    PrefixCode::canonical(lengths).expect("Shannon lengths satisfy Kraft")
}

/// A range encoded as the first sequence step within the radius plus the
/// signed offset from that step's value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TargetDistanceCodeword {
    /// 1-based hit step.
    pub step: usize,
    pub offset: i64,
}

impl TargetDistanceCodeword {
    /// Bits charged to the codeword: `ceil(log2 step) + ceil(log2 radius) + 1`,
    /// the last bit carrying the sign of the offset.
    pub fn bit_length(&self, radius: u32) -> u32 {
        ceil_log2(self.step as u64) + ceil_log2(radius.max(1) as u64) + 1
    }
}

pub fn td_encode(
    sequence: &RangeFindingSequence,
    target: u32,
    radius: u32,
) -> Result<TargetDistanceCodeword> {
    let step = sequence
        .solve(target, radius)
        .ok_or(Error::NotEncodable { target, radius })?;
    let value = sequence.values()[step - 1];
    Ok(TargetDistanceCodeword {
        step,
        offset: target as i64 - value as i64,
    })
}

pub fn td_decode(sequence: &RangeFindingSequence, word: TargetDistanceCodeword) -> Result<u32> {
    let len = sequence.len();
    if word.step == 0 || word.step > len {
        return Err(Error::MalformedCodeword {
            step: word.step,
            len,
        });
    }
    let value = sequence.values()[word.step - 1] as i64 + word.offset;
    u32::try_from(value)
        .ok()
        .filter(|&v| v >= 1)
        .ok_or(Error::MalformedCodeword {
            step: word.step,
            len,
        })
}
