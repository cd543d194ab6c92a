use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest number of marked points representable by the `u32` vertex masks.
pub const MAX_POINTS: usize = 30;

/// The representative of `a` modulo `m` in `{0, ..., m-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModRep(i64);

impl ModRep {
    pub fn of(a: i64, m: i64) -> Self {
        debug_assert!(m >= 1);
        ModRep(a.rem_euclid(m))
    }

    pub fn value(self) -> i64 {
        self.0
    }
}

pub(crate) fn modp(a: i64, m: i64) -> i64 {
    ModRep::of(a, m).value()
}

/// `<a>_m <m - a>_m`, the coefficient attached to a block of degree `a`.
pub(crate) fn bracket(a: i64, m: i64) -> i64 {
    modp(a, m) * modp(m - a, m)
}

/// Degrees `d_1, ..., d_n` together with a modulus `m` dividing their sum.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DegreeProblem {
    degrees: Vec<i64>,
    modulus: i64,
}

impl DegreeProblem {
    /// A problem on `n >= 4` marked points.
    pub fn new(degrees: Vec<i64>, modulus: i64) -> Result<Self> {
        if degrees.len() < 4 {
            return Err(Error::DomainTooSmall(format!(
                "need at least 4 marked points, got {}",
                degrees.len()
            )));
        }
        Self::local(degrees, modulus)
    }

    /// Same validation as [`DegreeProblem::new`] except that any `n >= 1` is
    /// accepted. Sub-configurations built during recursion live here.
    pub fn local(degrees: Vec<i64>, modulus: i64) -> Result<Self> {
        if modulus < 2 {
            return Err(Error::ModulusTooSmall(modulus));
        }
        if degrees.is_empty() {
            return Err(Error::DomainTooSmall("no marked points".into()));
        }
        if degrees.len() > MAX_POINTS {
            return Err(Error::DomainTooSmall(format!(
                "at most {MAX_POINTS} marked points are supported"
            )));
        }
        let sum: i64 = degrees.iter().sum();
        if sum.rem_euclid(modulus) != 0 {
            return Err(Error::ModulusMismatch { modulus, sum });
        }
        Ok(DegreeProblem { degrees, modulus })
    }

    pub fn n(&self) -> usize {
        self.degrees.len()
    }

    pub fn degrees(&self) -> &[i64] {
        &self.degrees
    }

    pub fn modulus(&self) -> i64 {
        self.modulus
    }

    /// Degree of the 1-based vertex `i`.
    pub fn degree(&self, i: usize) -> i64 {
        self.degrees[i - 1]
    }

    pub fn total(&self) -> i64 {
        self.degrees.iter().sum()
    }

    /// `s = (sum d_i) / m`.
    pub fn s(&self) -> i64 {
        self.total() / self.modulus
    }

    /// `d(I)` for a vertex mask (bit `i-1` is vertex `i`).
    pub fn mask_degree(&self, mask: u32) -> i64 {
        self.degrees
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, d)| d)
            .sum()
    }

    /// Every degree lies in `[1, m-1]`.
    pub fn is_reduced(&self) -> bool {
        self.degrees.iter().all(|&d| 1 <= d && d < self.modulus)
    }

    pub(crate) fn require_reduced(&self) -> Result<()> {
        if self.is_reduced() {
            Ok(())
        } else {
            Err(Error::DegreesNotReduced(format!(
                "{:?} with m = {}",
                self.degrees, self.modulus
            )))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mod_rep_is_nonnegative() {
        assert_eq!(ModRep::of(-1, 3).value(), 2);
        assert_eq!(ModRep::of(7, 7).value(), 0);
        assert_eq!(bracket(0, 5), 0);
        assert_eq!(bracket(2, 5), 6);
        assert_eq!(bracket(-1, 5), 4);
    }

    #[test]
    fn rejects_bad_problems() {
        assert!(matches!(
            DegreeProblem::new(vec![1, 1, 1], 3),
            Err(Error::DomainTooSmall(_))
        ));
        assert!(matches!(
            DegreeProblem::new(vec![1, 1, 1, 1], 3),
            Err(Error::ModulusMismatch { .. })
        ));
        assert!(matches!(
            DegreeProblem::new(vec![1, 1, 1, 1], 1),
            Err(Error::ModulusTooSmall(1))
        ));
        let p = DegreeProblem::new(vec![1, 1, 1, 1, 2], 3).unwrap();
        assert_eq!(p.s(), 2);
        assert_eq!(p.mask_degree(0b10001), 3);
        assert!(p.is_reduced());
    }
}
