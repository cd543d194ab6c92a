//! Relations `psi_i + psi_j = sum_{i in I, j in J} Delta_{I,J}`, linear
//! equivalence over the rationals, and the normal form supported on
//! partitions with both sides of size at least 3.

use num_traits::Zero;

use crate::class::DivisorClass;
use crate::error::{Error, Result};
use crate::linalg::solve;
use crate::partition::{enumerate_proper_partitions, ProperPartition};
use crate::rational::{one, Rational};

/// The relation for the pair `(i, j)`, as a class linearly equivalent to zero:
/// `psi_i + psi_j - sum_{P separates i, j} Delta_P`.
#[derive(Debug, Clone, PartialEq)]
pub struct RelationVector {
    pub i: usize,
    pub j: usize,
    pub as_class: DivisorClass,
}

fn check_pair(i: usize, j: usize, n: usize) -> Result<()> {
    for v in [i, j] {
        if v == 0 || v > n {
            return Err(Error::VertexOutOfRange { vertex: v, n });
        }
    }
    if i == j {
        return Err(Error::InvalidRelation(format!(
            "vertices must differ, got {i} twice"
        )));
    }
    if n < 4 {
        return Err(Error::DomainTooSmall(format!("relations need n >= 4, got {n}")));
    }
    Ok(())
}

pub fn relation_vector(i: usize, j: usize, n: usize) -> Result<RelationVector> {
    check_pair(i, j, n)?;
    let mut c = DivisorClass::zero(n);
    c.set_psi(i, one())?;
    c.set_psi(j, one())?;
    for p in enumerate_proper_partitions(n)? {
        if p.separates(i, j) {
            c.set_b(p, one())?;
        }
    }
    Ok(RelationVector { i, j, as_class: c })
}

/// Pairs `(i, j)` with `i < j` in lexicographic order.
pub fn relation_pairs(n: usize) -> Vec<(usize, usize)> {
    (1..=n).flat_map(|i| (i + 1..=n).map(move |j| (i, j))).collect()
}

/// Outcome of an equivalence query.
#[derive(Debug, Clone, PartialEq)]
pub struct Equivalence {
    pub equivalent: bool,
    /// When equivalent: `w(i-j)` with `A - B = sum w(i-j) R_{ij}`.
    pub coefficients: Vec<((usize, usize), Rational)>,
}

fn relation_matrix(n: usize, partitions: &[ProperPartition], pairs: &[(usize, usize)]) -> Vec<Vec<Rational>> {
    // coordinates: psi_1..psi_n, then b_P in canonical partition order
    let mut matrix = vec![vec![Rational::zero(); pairs.len()]; n + partitions.len()];
    for (col, &(i, j)) in pairs.iter().enumerate() {
        matrix[i - 1][col] = one();
        matrix[j - 1][col] = one();
        for (k, p) in partitions.iter().enumerate() {
            if p.separates(i, j) {
                matrix[n + k][col] = one();
            }
        }
    }
    matrix
}

fn coordinates(a: &DivisorClass, partitions: &[ProperPartition]) -> Vec<Rational> {
    let mut out: Vec<Rational> = a.psi_coeffs().to_vec();
    out.extend(partitions.iter().map(|p| a.b(p)));
    out
}

/// Decides whether `A - B` lies in the rational span of the relations.
pub fn are_linearly_equivalent(a: &DivisorClass, b: &DivisorClass) -> Result<Equivalence> {
    let diff = a.sub(b)?;
    let n = diff.n();
    let partitions = enumerate_proper_partitions(n)?;
    let pairs = relation_pairs(n);
    let matrix = relation_matrix(n, &partitions, &pairs);
    let rhs = coordinates(&diff, &partitions);

    Ok(match solve(matrix, rhs, pairs.len()) {
        Some(sol) => Equivalence {
            equivalent: true,
            coefficients: pairs.into_iter().zip(sol.values).collect(),
        },
        None => Equivalence {
            equivalent: false,
            coefficients: Vec::new(),
        },
    })
}

/// A scalar `c` with `A ~ c B`, if one exists. When `B ~ 0` and `A ~ 0` any
/// scalar works and zero is returned.
pub fn equivalence_scalar(a: &DivisorClass, b: &DivisorClass) -> Result<Option<Rational>> {
    if a.n() != b.n() {
        return Err(Error::AmbientMismatch {
            left: a.n(),
            right: b.n(),
        });
    }
    let n = a.n();
    let partitions = enumerate_proper_partitions(n)?;
    let pairs = relation_pairs(n);
    let mut matrix = relation_matrix(n, &partitions, &pairs);
    for (row, x) in matrix.iter_mut().zip(coordinates(b, &partitions)) {
        row.push(x);
    }
    let rhs = coordinates(a, &partitions);
    Ok(solve(matrix, rhs, pairs.len() + 1).map(|sol| sol.values[pairs.len()].clone()))
}

/// The unique representative of the class of `a` whose boundary part avoids
/// every partition with a side of size 2.
pub fn normal_form(a: &DivisorClass) -> Result<DivisorClass> {
    let n = a.n();
    if n < 5 {
        return Err(Error::NormalFormUnavailable(n));
    }
    let pairs = relation_pairs(n);
    // for n >= 5 the partitions with a 2-element side are indexed by that side
    let small: Vec<ProperPartition> = pairs
        .iter()
        .map(|&(x, y)| ProperPartition::new(&[x, y], n))
        .collect::<Result<_>>()?;
    let ncols = pairs.len();
    let matrix: Vec<Vec<Rational>> = small
        .iter()
        .map(|p| {
            pairs
                .iter()
                .map(|&(i, j)| {
                    if p.separates(i, j) {
                        one()
                    } else {
                        Rational::zero()
                    }
                })
                .collect()
        })
        .collect();
    let rhs: Vec<Rational> = small.iter().map(|p| a.b(p)).collect();
    let sol = solve(matrix, rhs, ncols)
        .filter(|s| s.rank == ncols)
        .ok_or_else(|| Error::Singular(format!("size-2 elimination system at n = {n}")))?;

    let mut out = a.clone();
    for (&(i, j), w) in pairs.iter().zip(&sol.values) {
        if w.is_zero() {
            continue;
        }
        let r = relation_vector(i, j, n)?;
        out = DivisorClass::combine(&out, &r.as_class, &one(), &-w.clone())?;
    }
    debug_assert!(small.iter().all(|p| out.b(p).is_zero()));
    Ok(out)
}

/// `sum_{I : i in I; j, k not in I} Delta_I`, an effective boundary
/// representative of `psi_i`.
pub fn psi_as_boundary(i: usize, j: usize, k: usize, n: usize) -> Result<DivisorClass> {
    check_pair(i, j, n)?;
    check_pair(i, k, n)?;
    check_pair(j, k, n)?;
    let mut c = DivisorClass::zero(n);
    for p in enumerate_proper_partitions(n)? {
        let side_i = p.contains(i);
        if p.contains(j) != side_i && p.contains(k) != side_i {
            c.set_b(p, -one())?;
        }
    }
    Ok(c)
}

/// `psi_as_boundary` with `j, k` the two smallest indices other than `i`.
pub fn psi_as_boundary_default(i: usize, n: usize) -> Result<DivisorClass> {
    let mut others = (1..=n).filter(|&v| v != i);
    let (j, k) = (others.next(), others.next());
    match (j, k) {
        (Some(j), Some(k)) => psi_as_boundary(i, j, k, n),
        _ => Err(Error::DomainTooSmall(format!("n = {n}"))),
    }
}
