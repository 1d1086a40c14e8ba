//! Strongly selective families and non-interactive contention resolution.
//!
//! Families are lists of subsets of `{0..n-1}` stored as bit masks.

use rayon::prelude::*;

use super::{Advice, ParticipantSet};
use crate::dist::ceil_log2;
use crate::{Error, Result};

/// Largest universe enumerated exhaustively by default.
pub const DEFAULT_EXHAUSTIVE_LIMIT: u32 = 20;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectivityReport {
    pub holds: bool,
    /// A set `Z` and an element `z` of it that no family member isolates.
    pub witness: Option<(u32, u32)>,
}

fn check_universe(n: u32, k: u32, limit: u32) -> Result<()> {
    if n > limit || n > 31 {
        return Err(Error::Infeasible {
            n: n as usize,
            limit: limit.min(31) as usize,
        });
    }
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!("k = {k} outside 1..={n}")));
    }
    Ok(())
}

/// Masks with exactly `size` bits among the low `n`, ascending.
fn masks_of_size(n: u32, size: u32) -> impl Iterator<Item = u32> {
    let end = 1u64 << n;
    let first = if size == 0 { 0 } else { (1u64 << size) - 1 };
    std::iter::successors((first < end).then_some(first), move |&m| {
        if m == 0 {
            return None;
        }
        let c = m & m.wrapping_neg();
        let r = m + c;
        let next = (((r ^ m) >> 2) / c) | r;
        (next < end).then_some(next)
    })
    .map(|m| m as u32)
}

/// Elements of `z` that some member of `family` meets alone.
fn isolated(family: &[u32], z: u32) -> u32 {
    family
        .iter()
        .map(|&f| f & z)
        .filter(|x| x.count_ones() == 1)
        .fold(0, |acc, x| acc | x)
}

fn strong_witness(family: &[u32], n: u32, k: u32) -> Option<(u32, u32)> {
    (1..=k).rev().find_map(|size| {
        masks_of_size(n, size).find_map(|z| {
            let missing = z & !isolated(family, z);
            (missing != 0).then(|| (z, missing.trailing_zeros()))
        })
    })
}

/// Checks that for every `Z` with `1 <= |Z| <= k` and every `z` in `Z`,
/// some member `F` has `Z ∩ F = {z}`. Sets are searched largest first
/// (ascending masks within a size), and the witness names the smallest
/// element left unisolated.
pub fn is_strongly_selective(family: &[u32], n: u32, k: u32) -> Result<SelectivityReport> {
    is_strongly_selective_with_limit(family, n, k, DEFAULT_EXHAUSTIVE_LIMIT)
}

pub fn is_strongly_selective_with_limit(
    family: &[u32],
    n: u32,
    k: u32,
    limit: u32,
) -> Result<SelectivityReport> {
    check_universe(n, k, limit)?;
    let witness = strong_witness(family, n, k);
    Ok(SelectivityReport {
        holds: witness.is_none(),
        witness,
    })
}

/// The weaker property: every `Z` with `1 <= |Z| <= k` meets some member in
/// exactly one element. The witness `z` is the least element of `Z`.
pub fn is_selective(family: &[u32], n: u32, k: u32) -> Result<SelectivityReport> {
    check_universe(n, k, DEFAULT_EXHAUSTIVE_LIMIT)?;
    let witness = (1..=k).rev().find_map(|size| {
        masks_of_size(n, size)
            .find(|&z| isolated(family, z) == 0)
            .map(|z| (z, z.trailing_zeros()))
    });
    Ok(SelectivityReport {
        holds: witness.is_none(),
        witness,
    })
}

/// Parses one subset per line as comma-separated ids; blank lines and `#`
/// comments are skipped, and a line `-` is the empty set.
pub fn parse_family(text: &str, n: u32) -> std::result::Result<Vec<u32>, (usize, String)> {
    let mut family = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut mask = 0u32;
        if line != "-" {
            for part in line.split(',') {
                let id: u32 = part
                    .trim()
                    .parse()
                    .map_err(|_| (i + 1, format!("bad id {:?}", part.trim())))?;
                if id >= n || id >= 32 {
                    return Err((i + 1, format!("id {id} outside 0..{n}")));
                }
                mask |= 1 << id;
            }
        }
        family.push(mask);
    }
    Ok(family)
}

/// A single-round scheme: each player decides from its id and the advice alone.
pub trait NonInteractiveScheme {
    fn universe(&self) -> u32;
    fn advice_bits(&self) -> u32;
    fn advise(&self, participants: &ParticipantSet) -> Advice;
    fn transmits(&self, id: u32, advice: &Advice) -> bool;
}

/// Advice is the minimum participant id; only that player transmits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrivialScheme {
    n: u32,
}

impl TrivialScheme {
    pub fn new(n: u32) -> Result<Self> {
        if n == 0 || n > 31 {
            return Err(Error::InvalidParameter(format!(
                "universe {n} outside 1..=31"
            )));
        }
        Ok(TrivialScheme { n })
    }
}

impl NonInteractiveScheme for TrivialScheme {
    fn universe(&self) -> u32 {
        self.n
    }

    fn advice_bits(&self) -> u32 {
        ceil_log2(self.n as u64)
    }

    fn advise(&self, participants: &ParticipantSet) -> Advice {
        Advice::from_value(participants.min_id(), self.advice_bits())
    }

    fn transmits(&self, id: u32, advice: &Advice) -> bool {
        id as u64 == advice.value()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonInteractiveReport {
    pub correct: bool,
    /// A participant set (as a mask) without exactly one transmitter.
    pub failing_set: Option<u32>,
    /// Distinct transmitter sets `V(s)` over the advice strings in use, ascending.
    pub family: Vec<u32>,
    /// Whether the induced family has at least `n` members.
    pub meets_size_bound: bool,
}

impl NonInteractiveReport {
    pub fn family_size(&self) -> usize {
        self.family.len()
    }
}

/// Runs the scheme on every nonempty participant set.
pub fn noninteractive_verify<S: NonInteractiveScheme + ?Sized>(
    scheme: &S,
) -> Result<NonInteractiveReport> {
    let n = scheme.universe();
    check_universe(n, n.max(1), DEFAULT_EXHAUSTIVE_LIMIT)?;
    let mut family = Vec::new();
    let mut failing_set = None;
    for mask in 1..(1u32 << n) {
        let p = ParticipantSet::from_mask(n as u64, mask as u64)?;
        let advice = scheme.advise(&p);
        if advice.len() > scheme.advice_bits() {
            return Err(Error::Precondition(format!(
                "advice {advice} longer than {} bits",
                scheme.advice_bits()
            )));
        }
        let v = (0..n)
            .filter(|&id| scheme.transmits(id, &advice))
            .fold(0u32, |acc, id| acc | 1 << id);
        family.push(v);
        if failing_set.is_none() && (v & mask).count_ones() != 1 {
            failing_set = Some(mask);
        }
    }
    family.sort_unstable();
    family.dedup();
    let correct = failing_set.is_none();
    Ok(NonInteractiveReport {
        correct,
        failing_set,
        meets_size_bound: family.len() >= n as usize,
        family,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilySearchReport {
    pub n: u32,
    pub family_size: usize,
    pub families_checked: u64,
    /// Families passing the strongly selective check at `k = n`.
    pub strongly_selective: u64,
    /// Families passing the weaker selective check at `k = n`.
    pub selective: u64,
    /// The witness against the first family in enumeration order.
    pub first_witness: Option<(Vec<u32>, u32, u32)>,
}

/// Enumerates every family of `size` distinct subsets of `{0..n-1}` and
/// checks each for the strongly selective and selective properties at
/// `k = n`. Any family of at most `size` sets extends to one of these, and
/// both properties survive adding sets, so a zero count covers them all.
pub fn exhaustive_family_search(n: u32, size: usize) -> Result<FamilySearchReport> {
    if !(1..=8).contains(&n) {
        return Err(Error::Infeasible {
            n: n as usize,
            limit: 8,
        });
    }
    let subsets = 1usize << n;
    if size == 0 || size > subsets {
        return Err(Error::InvalidParameter(format!(
            "family size {size} outside 1..={subsets}"
        )));
    }
    // hits[f] is the set of Z (as a 256-bit set) that f meets in exactly one element.
    let hits: Vec<[u64; 4]> = (0..subsets as u32)
        .map(|f| {
            let mut row = [0u64; 4];
            for z in 0..subsets as u32 {
                if (f & z).count_ones() == 1 {
                    row[(z / 64) as usize] |= 1 << (z % 64);
                }
            }
            row
        })
        .collect();
    let mut target = [0u64; 4];
    for z in 1..subsets as u32 {
        target[(z / 64) as usize] |= 1 << (z % 64);
    }
    let first: Vec<u32> = (0..size as u32).collect();
    let first_witness = strong_witness(&first, n, n).map(|(z, e)| (first, z, e));

    let (checked, strong, selective) = (0..subsets)
        .into_par_iter()
        .map(|head| {
            let mut counts = (0u64, 0u64, 0u64);
            let mut rest: Vec<usize> = (head + 1..head + size).collect();
            if size > 1 && *rest.last().unwrap() >= subsets {
                return counts;
            }
            let mut family = vec![0u32; size];
            loop {
                family[0] = head as u32;
                for (slot, &r) in family[1..].iter_mut().zip(&rest) {
                    *slot = r as u32;
                }
                counts.0 += 1;
                if strong_witness(&family, n, n).is_none() {
                    counts.1 += 1;
                }
                let mut covered = [0u64; 4];
                for &f in &family {
                    for (c, h) in covered.iter_mut().zip(&hits[f as usize]) {
                        *c |= h;
                    }
                }
                if covered.iter().zip(&target).all(|(c, t)| c & t == *t) {
                    counts.2 += 1;
                }
                if !next_combination(&mut rest, subsets) {
                    return counts;
                }
            }
        })
        .reduce(|| (0, 0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
    Ok(FamilySearchReport {
        n,
        family_size: size,
        families_checked: checked,
        strongly_selective: strong,
        selective,
        first_witness,
    })
}

/// Advances an ascending combination of values below `end`, keeping the
/// lower bound fixed by the first element's starting value.
fn next_combination(c: &mut [usize], end: usize) -> bool {
    let len = c.len();
    for i in (0..len).rev() {
        if c[i] < end - (len - i) {
            c[i] += 1;
            for j in i + 1..len {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    fn singletons(n: u32) -> Vec<u32> {
        (0..n).map(|i| 1 << i).collect()
    }

    #[test]
    fn singletons_are_strongly_selective() {
        for n in 1..=8 {
            for k in 1..=n {
                assert!(is_strongly_selective(&singletons(n), n, k).unwrap().holds);
            }
        }
    }

    #[test]
    fn single_member_witness() {
        let r = is_strongly_selective(&[0b01], 2, 2).unwrap();
        assert!(!r.holds);
        assert_eq!(r.witness, Some((0b11, 1)));
    }

    #[test]
    fn full_set_for_singletons() {
        assert!(is_strongly_selective(&[0b1111], 4, 1).unwrap().holds);
        assert!(!is_strongly_selective(&[0b1111], 4, 2).unwrap().holds);
    }

    #[test]
    fn limits() {
        assert!(matches!(
            is_strongly_selective(&[], 21, 2),
            Err(Error::Infeasible { n: 21, limit: 20 })
        ));
        assert!(is_strongly_selective(&[], 4, 5).is_err());
        assert!(is_strongly_selective_with_limit(&[], 12, 1, 10).is_err());
    }

    #[test]
    fn gosper_enumerates_all_sizes() {
        for n in 0..=10u32 {
            let total: usize = (0..=n).map(|s| masks_of_size(n, s).count()).sum();
            assert_eq!(total, 1 << n);
        }
        assert_eq!(
            masks_of_size(4, 2).collect::<Vec<_>>(),
            vec![3, 5, 6, 9, 10, 12]
        );
    }

    #[test]
    fn family_file_parsing() {
        assert_eq!(
            parse_family("0,2\n# c\n\n-\n3\n", 4).unwrap(),
            vec![0b101, 0, 0b1000]
        );
        assert_eq!(parse_family("0,x\n", 4).unwrap_err().0, 1);
        assert_eq!(parse_family("1\n7\n", 4).unwrap_err().0, 2);
    }

    #[test]
    fn trivial_scheme_is_correct() {
        for n in 1..=12 {
            let r = noninteractive_verify(&TrivialScheme::new(n).unwrap()).unwrap();
            assert!(r.correct);
            assert_eq!(r.family, singletons(n));
            assert!(r.meets_size_bound);
        }
    }

    /// Advice names the minimum id but drops its lowest bit.
    struct Halved(u32);

    impl NonInteractiveScheme for Halved {
        fn universe(&self) -> u32 {
            self.0
        }
        fn advice_bits(&self) -> u32 {
            ceil_log2(self.0 as u64) - 1
        }
        fn advise(&self, p: &ParticipantSet) -> Advice {
            Advice::from_value(p.min_id() >> 1, self.advice_bits())
        }
        fn transmits(&self, id: u32, advice: &Advice) -> bool {
            (id >> 1) as u64 == advice.value()
        }
    }

    #[test]
    fn one_bit_short_scheme_fails() {
        for n in [2u32, 4, 8, 16] {
            let r = noninteractive_verify(&Halved(n)).unwrap();
            assert!(!r.correct);
            let bad = r.failing_set.unwrap();
            assert_eq!(bad.count_ones(), 2);
            assert!(!r.meets_size_bound);
        }
    }

    #[test]
    fn exhaustive_search_small() {
        let r = exhaustive_family_search(4, 2).unwrap();
        assert_eq!(r.families_checked, 120);
        assert_eq!(r.strongly_selective, 0);
        assert_eq!(r.selective, 0);
        assert!(r.first_witness.is_some());
        // n sets suffice: singletons are among the families of size n.
        let r = exhaustive_family_search(3, 3).unwrap();
        assert_eq!(r.families_checked, 56);
        assert!(r.strongly_selective >= 1);
        let r = exhaustive_family_search(3, 2).unwrap();
        assert_eq!((r.strongly_selective, r.selective), (0, 0));
    }

    #[test]
    fn next_combination_counts() {
        let mut c = vec![1, 2];
        let mut count = 1;
        while next_combination(&mut c, 5) {
            count += 1;
        }
        assert_eq!(count, 6);
    }
}
