//! Proper two-block partitions of `{1, ..., n}`.
//!
//! A partition is stored by its canonical block, the side containing vertex 1,
//! as a bitmask with bit `i-1` standing for vertex `i`.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::problem::MAX_POINTS;

pub(crate) fn full_mask(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

pub(crate) fn mask_to_vec(mask: u32) -> Vec<usize> {
    (0..32).filter(|k| mask >> k & 1 == 1).map(|k| k + 1).collect()
}

pub(crate) fn vec_to_mask(vertices: &[usize], n: usize) -> Result<u32> {
    let mut mask = 0u32;
    for &v in vertices {
        if v == 0 || v > n {
            return Err(Error::VertexOutOfRange { vertex: v, n });
        }
        let bit = 1u32 << (v - 1);
        if mask & bit != 0 {
            return Err(Error::InvalidPartition(format!("vertex {v} repeated")));
        }
        mask |= bit;
    }
    Ok(mask)
}

/// Lexicographic comparison of two equal-size vertex sets viewed as sorted lists.
pub(crate) fn lex_cmp_same_size(a: u32, b: u32) -> Ordering {
    let diff = a ^ b;
    if diff == 0 {
        Ordering::Equal
    } else if a & diff & diff.wrapping_neg() != 0 {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

/// An unordered partition `{I, J}` of `{1, ..., n}` with `|I|, |J| >= 2`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct ProperPartition {
    block: u32,
    n: u8,
}

impl ProperPartition {
    /// Canonicalizes `subset` (or its complement) to the side containing 1.
    pub fn new(subset: &[usize], n: usize) -> Result<Self> {
        let mask = vec_to_mask(subset, n)?;
        Self::from_mask(mask, n)
    }

    pub fn from_mask(mask: u32, n: usize) -> Result<Self> {
        if n > MAX_POINTS {
            return Err(Error::DomainTooSmall(format!("n = {n} exceeds {MAX_POINTS}")));
        }
        let full = full_mask(n);
        if mask & !full != 0 {
            return Err(Error::InvalidPartition(format!(
                "mask {mask:#b} has vertices outside 1..={n}"
            )));
        }
        let size = mask.count_ones() as usize;
        if size < 2 || size + 2 > n {
            return Err(Error::InvalidPartition(format!(
                "block {:?} has size {size}, need 2..={}",
                mask_to_vec(mask),
                n.saturating_sub(2)
            )));
        }
        let block = if mask & 1 == 1 { mask } else { full & !mask };
        Ok(ProperPartition { block, n: n as u8 })
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    /// Mask of the canonical block (the side containing vertex 1).
    pub fn mask(&self) -> u32 {
        self.block
    }

    pub fn complement_mask(&self) -> u32 {
        full_mask(self.n()) & !self.block
    }

    pub fn block(&self) -> Vec<usize> {
        mask_to_vec(self.block)
    }

    pub fn complement(&self) -> Vec<usize> {
        mask_to_vec(self.complement_mask())
    }

    pub fn block_len(&self) -> usize {
        self.block.count_ones() as usize
    }

    /// `min(|I|, |J|)`.
    pub fn min_side(&self) -> usize {
        self.block_len().min(self.n() - self.block_len())
    }

    pub fn contains(&self, v: usize) -> bool {
        v >= 1 && v <= self.n() && self.block >> (v - 1) & 1 == 1
    }

    pub fn separates(&self, i: usize, j: usize) -> bool {
        self.contains(i) != self.contains(j)
    }

    /// True if some side of `self` and some side of `other` are disjoint.
    pub fn is_compatible(&self, other: &ProperPartition) -> bool {
        let (a, b) = (self.block, self.complement_mask());
        let (c, d) = (other.block, other.complement_mask());
        a & c == 0 || a & d == 0 || b & c == 0 || b & d == 0
    }

    /// All four pairwise intersections are nonempty.
    pub fn is_transverse(&self, other: &ProperPartition) -> bool {
        !self.is_compatible(other)
    }
}

impl Ord for ProperPartition {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n
            .cmp(&other.n)
            .then(self.block_len().cmp(&other.block_len()))
            .then_with(|| lex_cmp_same_size(self.block, other.block))
    }
}

impl PartialOrd for ProperPartition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for ProperPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for ProperPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: Vec<usize>| v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",");
        write!(f, "{{{}}}|{{{}}}", join(self.block()), join(self.complement()))
    }
}

/// Canonical blocks of every proper partition of `{1, ..., n}`, ordered by
/// block size and then lexicographically. Empty for `n < 4`.
pub(crate) fn proper_masks(n: usize) -> Vec<u32> {
    if n < 4 {
        return Vec::new();
    }
    let rest = n - 1;
    let mut out = Vec::with_capacity((1usize << rest) - n - 1);
    for size in 2..=n - 2 {
        // choose size-1 elements from {2..n} in lex order
        let mut chosen: Vec<usize> = (0..size - 1).collect();
        loop {
            let mask = chosen.iter().fold(1u32, |acc, &k| acc | 1 << (k + 1));
            out.push(mask);
            // advance combination
            let r = chosen.len();
            let mut i = r;
            while i > 0 && chosen[i - 1] == rest - r + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            chosen[i - 1] += 1;
            for j in i..r {
                chosen[j] = chosen[j - 1] + 1;
            }
        }
    }
    out
}

/// All `2^(n-1) - n - 1` proper partitions, each once, in canonical order.
pub fn enumerate_proper_partitions(n: usize) -> Result<Vec<ProperPartition>> {
    if n < 4 {
        return Err(Error::DomainTooSmall(format!(
            "proper partitions need n >= 4, got {n}"
        )));
    }
    if n > MAX_POINTS {
        return Err(Error::DomainTooSmall(format!("n = {n} exceeds {MAX_POINTS}")));
    }
    Ok(proper_masks(n)
        .into_iter()
        .map(|block| ProperPartition { block, n: n as u8 })
        .collect())
}

/// Canonical partition for a subset given as a vertex list.
pub fn canonical_partition(subset: &[usize], n: usize) -> Result<ProperPartition> {
    ProperPartition::new(subset, n)
}
