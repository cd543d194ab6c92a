//! F-curves: one-dimensional boundary strata indexed by partitions of the
//! marked points into four nonempty parts.

use std::cmp::Ordering;
use std::fmt;

use rayon::prelude::*;

use crate::class::DivisorClass;
use crate::error::{Error, Result};
use crate::partition::{full_mask, mask_to_vec, vec_to_mask, ProperPartition};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FCurve {
    n: u8,
    parts: [u32; 4],
}

impl FCurve {
    pub fn new(parts: &[Vec<usize>], n: usize) -> Result<Self> {
        if parts.len() != 4 {
            return Err(Error::InvalidPartition(format!(
                "an F-curve needs 4 parts, got {}",
                parts.len()
            )));
        }
        let mut masks = [0u32; 4];
        for (slot, part) in masks.iter_mut().zip(parts) {
            *slot = vec_to_mask(part, n)?;
        }
        Self::from_masks(masks, n)
    }

    pub(crate) fn from_masks(mut masks: [u32; 4], n: usize) -> Result<Self> {
        if n < 4 {
            return Err(Error::DomainTooSmall(format!("F-curves need n >= 4, got {n}")));
        }
        let mut union = 0u32;
        for &mask in &masks {
            if mask == 0 || union & mask != 0 {
                return Err(Error::InvalidPartition(
                    "F-curve parts must be nonempty and disjoint".into(),
                ));
            }
            union |= mask;
        }
        if union != full_mask(n) {
            return Err(Error::InvalidPartition(format!(
                "F-curve parts must cover 1..={n}"
            )));
        }
        masks.sort_by_key(|m| m.trailing_zeros());
        Ok(FCurve {
            n: n as u8,
            parts: masks,
        })
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn parts(&self) -> [Vec<usize>; 4] {
        self.parts.map(mask_to_vec)
    }

    pub fn part_masks(&self) -> [u32; 4] {
        self.parts
    }

    pub fn part_sizes(&self) -> [usize; 4] {
        self.parts.map(|m| m.count_ones() as usize)
    }
}

impl Ord for FCurve {
    /// Lexicographic on the sorted element lists of the parts, in order.
    fn cmp(&self, other: &Self) -> Ordering {
        self.n
            .cmp(&other.n)
            .then_with(|| self.parts().cmp(&other.parts()))
    }
}

impl PartialOrd for FCurve {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for FCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .parts()
            .iter()
            .map(|p| {
                let items: Vec<String> = p.iter().map(|v| v.to_string()).collect();
                format!("{{{}}}", items.join(","))
            })
            .collect();
        write!(f, "{}", parts.join("|"))
    }
}

/// All partitions of `{1..n}` into four nonempty parts, generated as
/// restricted growth strings in increasing order.
pub fn enumerate_fcurves(n: usize) -> Result<Vec<FCurve>> {
    if n < 4 {
        return Err(Error::DomainTooSmall(format!("F-curves need n >= 4, got {n}")));
    }
    let mut out = Vec::new();
    let mut masks = [0u32; 4];
    fn go(v: usize, n: usize, used: usize, masks: &mut [u32; 4], out: &mut Vec<FCurve>) {
        if n - v < 4 - used {
            return;
        }
        if v == n {
            out.push(FCurve {
                n: n as u8,
                parts: *masks,
            });
            return;
        }
        for b in 0..(used + 1).min(4) {
            masks[b] |= 1 << v;
            go(v + 1, n, used.max(b + 1), masks, out);
            masks[b] &= !(1 << v);
        }
    }
    go(0, n, 0, &mut masks, &mut out);
    Ok(out)
}

/// Degree of `a` on `f`: singleton parts contribute their psi coefficient,
/// each pair `N1 ∪ Na` contributes `-b`, and each part of size at least two
/// contributes `+b`.
pub fn fcurve_degree(a: &DivisorClass, f: &FCurve) -> Result<Rational> {
    let n = f.n();
    if a.n() != n {
        return Err(Error::AmbientMismatch {
            left: a.n(),
            right: n,
        });
    }
    let b = |mask: u32| -> Result<Rational> { Ok(a.b(&ProperPartition::from_mask(mask, n)?)) };
    let mut total = Rational::from_integer(0.into());
    for &part in &f.parts {
        if part.count_ones() == 1 {
            total += a.psi(part.trailing_zeros() as usize + 1);
        } else {
            total += b(part)?;
        }
    }
    for &other in &f.parts[1..] {
        total -= b(f.parts[0] | other)?;
    }
    Ok(total)
}

/// Minimum degree over all F-curves, with the smallest minimizing curve in
/// the [`FCurve`] order.
pub fn min_fcurve_degree(a: &DivisorClass) -> Result<(Rational, FCurve)> {
    let curves = enumerate_fcurves(a.n())?;
    let degrees = curves
        .par_iter()
        .map(|f| fcurve_degree(a, f).map(|d| (d, *f)))
        .collect::<Result<Vec<_>>>()?;
    Ok(degrees
        .into_iter()
        .min()
        .expect("at least one F-curve for n >= 4"))
}
