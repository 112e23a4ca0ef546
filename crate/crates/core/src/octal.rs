//! Octal games: code parsing, heap moves, Grundy sequences, normal-play
//! periodicity certificates and the closed-form misère Nim rule.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::games::Outcome;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OctalError {
    #[error("octal code must start with `0.`")]
    MissingPrefix,
    #[error("digit `{0}` is not an octal digit")]
    BadDigit(char),
    #[error("octal code has no nonzero digit")]
    AllZero,
}

/// A finite octal code `0.d1 d2 ... dk`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OctalCode {
    digits: Vec<u8>,
}

impl OctalCode {
    pub fn new(digits: Vec<u8>) -> Result<Self, OctalError> {
        if let Some(&d) = digits.iter().find(|&&d| d > 7) {
            return Err(OctalError::BadDigit(char::from(b'0' + d.min(9))));
        }
        if digits.iter().all(|&d| d == 0) {
            return Err(OctalError::AllZero);
        }
        Ok(OctalCode { digits })
    }

    /// Digit `d_r` for removal size `r >= 1`; zero beyond the code.
    pub fn digit(&self, r: usize) -> u8 {
        if r == 0 {
            0
        } else {
            self.digits.get(r - 1).copied().unwrap_or(0)
        }
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    /// Largest removal size with a nonzero digit.
    pub fn k(&self) -> usize {
        self.digits.iter().rposition(|&d| d != 0).map_or(0, |i| i + 1)
    }

    /// Every position reachable in one move from a heap of size `n`, as sorted
    /// multisets of positive heap sizes.
    pub fn heap_moves(&self, n: usize) -> BTreeSet<HeapPosition> {
        let mut moves = BTreeSet::new();
        for r in 1..=n.min(self.k()) {
            let d = self.digit(r);
            if d & 1 != 0 && n == r {
                moves.insert(HeapPosition::default());
            }
            if d & 2 != 0 && n > r {
                moves.insert(HeapPosition::from_heaps(vec![n - r]));
            }
            if d & 4 != 0 && n >= r + 2 {
                let rest = n - r;
                for a in 1..=rest / 2 {
                    moves.insert(HeapPosition::from_heaps(vec![a, rest - a]));
                }
            }
        }
        moves
    }
}

impl FromStr for OctalCode {
    type Err = OctalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let rest = s.trim().strip_prefix("0.").ok_or(OctalError::MissingPrefix)?;
        let digits = rest
            .chars()
            .map(|c| match c {
                '0'..='7' => Ok(c as u8 - b'0'),
                other => Err(OctalError::BadDigit(other)),
            })
            .collect::<Result<Vec<_>, _>>()?;
        if digits.is_empty() {
            return Err(OctalError::AllZero);
        }
        OctalCode::new(digits)
    }
}

impl fmt::Display for OctalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("0.")?;
        for d in &self.digits {
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl Serialize for OctalCode {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for OctalCode {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A sum of heaps; the empty multiset is the terminal position.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HeapPosition(Vec<usize>);

impl HeapPosition {
    /// Builds a position, discarding empty heaps.
    pub fn from_heaps(mut heaps: Vec<usize>) -> Self {
        heaps.retain(|&h| h > 0);
        heaps.sort_unstable();
        HeapPosition(heaps)
    }

    pub fn heaps(&self) -> &[usize] {
        &self.0
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }
}

/// Grundy values of `H_0 ..= H_max`.
pub fn grundy_sequence(code: &OctalCode, max: usize) -> Vec<u32> {
    let mut values: Vec<u32> = Vec::with_capacity(max + 1);
    let mut seen: Vec<bool> = Vec::new();
    for n in 0..=max {
        seen.clear();
        let mut mark = |v: u32| {
            let v = v as usize;
            if v >= seen.len() {
                seen.resize(v + 1, false);
            }
            seen[v] = true;
        };
        for r in 1..=n.min(code.k()) {
            let d = code.digit(r);
            if d & 1 != 0 && n == r {
                mark(0);
            }
            if d & 2 != 0 && n > r {
                mark(values[n - r]);
            }
            if d & 4 != 0 && n >= r + 2 {
                let rest = n - r;
                for a in 1..=rest / 2 {
                    mark(values[a] ^ values[rest - a]);
                }
            }
        }
        let g = seen.iter().position(|&s| !s).unwrap_or(seen.len()) as u32;
        values.push(g);
    }
    values
}

/// A verified normal-play period: `G(H_{n+p}) = G(H_n)` for every
/// `n0 <= n < 2 n0 + p + k`, which extends to all `n >= n0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalPeriodCertificate {
    pub code: OctalCode,
    pub p: usize,
    pub n0: usize,
    pub k: usize,
    /// Half-open range `[n0, 2 n0 + p + k)` of checked heap sizes.
    pub window: (usize, usize),
    /// Largest heap size whose Grundy value was computed.
    #[serde(rename = "N")]
    pub n_max: usize,
}

impl NormalPeriodCertificate {
    /// Re-checks the window against a Grundy sequence.
    pub fn verify(&self, values: &[u32]) -> bool {
        let (lo, hi) = self.window;
        self.p > 0
            && hi == 2 * self.n0 + self.p + self.k
            && hi + self.p <= values.len()
            && (lo..hi).all(|n| values[n + self.p] == values[n])
    }
}

/// Finds the smallest period `p`, then the smallest preperiod `n0`, whose
/// hypothesis window fits inside `values` (which holds `H_0 ..= H_N`).
pub fn detect_normal_period(code: &OctalCode, values: &[u32]) -> Option<NormalPeriodCertificate> {
    let k = code.k();
    let n_max = values.len().checked_sub(1)?;
    for p in 1..=n_max {
        // Any certificate for p forbids mismatches at every n >= n0 in range,
        // so the least admissible n0 is one past the last mismatch.
        let n0 = (0..=n_max - p)
            .rev()
            .find(|&n| values[n + p] != values[n])
            .map_or(0, |n| n + 1);
        let hi = 2 * n0 + p + k;
        if hi + p - 1 <= n_max {
            return Some(NormalPeriodCertificate {
                code: code.clone(),
                p,
                n0,
                k,
                window: (n0, hi),
                n_max,
            });
        }
    }
    None
}

/// Misère Nim: `P` iff the nim-sum is 0, unless every heap is at most 1, in
/// which case `P` iff the nim-sum is 1.
pub fn misere_nim_outcome(heaps: &[u64]) -> Outcome {
    let x = heaps.iter().fold(0, |acc, &h| acc ^ h);
    let small = heaps.iter().all(|&h| h <= 1);
    Outcome::from_is_p(if small { x == 1 } else { x == 0 })
}

/// Normal-play Nim: `P` iff the nim-sum is 0.
pub fn normal_nim_outcome(heaps: &[u64]) -> Outcome {
    Outcome::from_is_p(heaps.iter().fold(0, |acc, &h| acc ^ h) == 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code(s: &str) -> OctalCode {
        s.parse().unwrap()
    }

    #[test]
    fn parse_codes() {
        assert_eq!(code("0.77").k(), 2);
        assert_eq!(code("0.07").k(), 2);
        assert_eq!(code("0.070").k(), 2);
        assert_eq!(code("0.007").k(), 3);
        assert_eq!("0.8".parse::<OctalCode>(), Err(OctalError::BadDigit('8')));
        assert_eq!("0.00".parse::<OctalCode>(), Err(OctalError::AllZero));
        assert_eq!("0.".parse::<OctalCode>(), Err(OctalError::AllZero));
        assert_eq!("77".parse::<OctalCode>(), Err(OctalError::MissingPrefix));
        assert_eq!(code("0.137").to_string(), "0.137");
    }

    #[test]
    fn dawson_moves() {
        let dk = code("0.07");
        let pos = |v: Vec<usize>| HeapPosition::from_heaps(v);
        assert_eq!(
            dk.heap_moves(5),
            BTreeSet::from([pos(vec![3]), pos(vec![1, 2])])
        );
        assert_eq!(dk.heap_moves(2), BTreeSet::from([pos(vec![])]));
        assert!(dk.heap_moves(1).is_empty());
        assert!(dk.heap_moves(0).is_empty());
        assert!(code("0.77").heap_moves(0).is_empty());
    }

    #[test]
    fn move_sizes_stay_in_range() {
        for c in ["0.77", "0.07", "0.137", "0.4", "0.6", "0.3122", "0.75"] {
            let c = code(c);
            for n in 0..30 {
                for m in c.heap_moves(n) {
                    assert!(m.total() < n && m.total() + c.k() >= n, "{c} {n} {m:?}");
                }
            }
        }
    }

    #[test]
    fn dawson_small_values() {
        assert_eq!(grundy_sequence(&code("0.07"), 6), vec![0, 0, 1, 1, 2, 0, 3]);
        // d1 = 3: take one box from the end or a whole strip of one, so values alternate.
        assert_eq!(grundy_sequence(&code("0.3"), 4), vec![0, 1, 0, 1, 0]);
    }

    #[test]
    fn normal_periods() {
        let kayles = code("0.77");
        let values = grundy_sequence(&kayles, 500);
        let cert = detect_normal_period(&kayles, &values).unwrap();
        assert_eq!(cert.p, 12);
        assert!(cert.verify(&values));
        // Short data cannot certify anything.
        assert!(detect_normal_period(&kayles, &values[..40]).is_none());
    }

    #[test]
    fn misere_nim() {
        assert_eq!(misere_nim_outcome(&[1]), Outcome::P);
        assert_eq!(misere_nim_outcome(&[2, 2]), Outcome::P);
        assert_eq!(misere_nim_outcome(&[1, 1]), Outcome::N);
        assert_eq!(misere_nim_outcome(&[5, 3, 2, 1]), Outcome::N);
        assert_eq!(misere_nim_outcome(&[]), Outcome::N);
        assert_eq!(normal_nim_outcome(&[]), Outcome::P);
        assert_eq!(normal_nim_outcome(&[5, 3, 2, 1]), Outcome::N);
    }
}
