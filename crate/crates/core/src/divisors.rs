//! The divisor families `D(d, m)` and `E(d, m)` and the Hodge eigenbundle
//! determinant class.
//!
//! `D(d, m) = sum <d_i>_m <m - d_i>_m psi_i - sum <d(I)>_m <d(J)>_m Delta_{I,J}`
//! and `E(d, m) = D(d, m) + m (sum_{m | d_i} psi_i - sum_{m | d(I)} Delta_{I,J})`.
//!
//! `D` is, up to a positive constant, the type A level one conformal block
//! divisor for `sl_m`; no conformal block machinery is implemented here.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::class::DivisorClass;
use crate::error::{Error, Result};
use crate::partition::enumerate_proper_partitions;
use crate::problem::{bracket, modp, DegreeProblem};
use crate::rational::{int, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    D,
    E,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::D => "D",
            Family::E => "E",
        })
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "D" | "d" => Ok(Family::D),
            "E" | "e" => Ok(Family::E),
            other => Err(Error::Parse(format!("unknown family {other:?}, expected D or E"))),
        }
    }
}

/// A family together with the degree data it is evaluated on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisorFamilyTag {
    pub family: Family,
    pub problem: DegreeProblem,
}

impl DivisorFamilyTag {
    pub fn new(family: Family, problem: DegreeProblem) -> Result<Self> {
        if family == Family::E && problem.modulus() < 3 {
            return Err(Error::ModulusTooSmall(problem.modulus()));
        }
        Ok(DivisorFamilyTag { family, problem })
    }

    pub fn class(&self) -> Result<DivisorClass> {
        family_class(self.family, &self.problem)
    }
}

pub fn family_class(family: Family, problem: &DegreeProblem) -> Result<DivisorClass> {
    match family {
        Family::D => divisor_d(problem),
        Family::E => divisor_e(problem),
    }
}

pub fn divisor_d(problem: &DegreeProblem) -> Result<DivisorClass> {
    let n = problem.n();
    let m = problem.modulus();
    let mut c = DivisorClass::zero(n);
    for i in 1..=n {
        c.set_psi(i, int(bracket(problem.degree(i), m)))?;
    }
    for p in enumerate_proper_partitions(n)? {
        c.set_b(p, int(bracket(problem.mask_degree(p.mask()), m)))?;
    }
    Ok(c)
}

pub fn divisor_e(problem: &DegreeProblem) -> Result<DivisorClass> {
    let m = problem.modulus();
    if m < 3 {
        return Err(Error::ModulusTooSmall(m));
    }
    let mut c = divisor_d(problem)?;
    for i in 1..=problem.n() {
        if modp(problem.degree(i), m) == 0 {
            let a = c.psi(i) + int(m);
            c.set_psi(i, a)?;
        }
    }
    for p in enumerate_proper_partitions(problem.n())? {
        if modp(problem.mask_degree(p.mask()), m) == 0 {
            c.add_b(p, &int(m));
        }
    }
    Ok(c)
}

/// `det E_j = (1 / 2m^2) D((<j d_1>_m, ..., <j d_n>_m), m)`.
pub fn hodge_eigenbundle_det(problem: &DegreeProblem, j: i64) -> Result<DivisorClass> {
    let m = problem.modulus();
    let twisted: Vec<i64> = problem.degrees().iter().map(|&d| modp(j * d, m)).collect();
    let twisted = DegreeProblem::local(twisted, m)?;
    let scale = Rational::new(1.into(), (2 * m * m).into());
    Ok(divisor_d(&twisted)?.scale(&scale))
}

/// Which marked points survive reduction of the degrees modulo `m`.
///
/// For family `D` the class is pulled back along the map forgetting the
/// dropped points; for family `E` each dropped point additionally
/// contributes `m psi_i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reduction {
    pub original_n: usize,
    /// 1-based indices with `<d_i>_m != 0`, increasing.
    pub kept: Vec<usize>,
    /// 1-based indices with `<d_i>_m = 0`, increasing.
    pub dropped: Vec<usize>,
}

/// Reduces every degree modulo `m` and drops the points whose degree
/// vanishes. Fails with `DomainTooSmall` when fewer than 4 points remain.
pub fn reduce_degrees(problem: &DegreeProblem) -> Result<(DegreeProblem, Reduction)> {
    let m = problem.modulus();
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    let mut degrees = Vec::new();
    for i in 1..=problem.n() {
        let r = modp(problem.degree(i), m);
        if r == 0 {
            dropped.push(i);
        } else {
            kept.push(i);
            degrees.push(r);
        }
    }
    let reduction = Reduction {
        original_n: problem.n(),
        kept,
        dropped,
    };
    if degrees.len() < 4 {
        return Err(Error::DomainTooSmall(format!(
            "only {} marked points remain after dropping {:?}",
            degrees.len(),
            reduction.dropped
        )));
    }
    Ok((DegreeProblem::new(degrees, m)?, reduction))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::ProperPartition;
    use crate::rational::ratio;

    fn part(b: &[usize], n: usize) -> ProperPartition {
        ProperPartition::new(b, n).unwrap()
    }

    #[test]
    fn d_examples() {
        let c = divisor_d(&DegreeProblem::new(vec![1, 1, 1, 1], 2).unwrap()).unwrap();
        assert!(c.psi_coeffs().iter().all(|a| *a == int(1)));
        assert!(c.boundary().is_empty());

        let c = divisor_d(&DegreeProblem::new(vec![1, 1, 1, 1, 2], 3).unwrap()).unwrap();
        assert!(c.psi_coeffs().iter().all(|a| *a == int(2)));
        assert_eq!(c.b(&part(&[1, 2], 5)), int(2));
        assert_eq!(c.b(&part(&[1, 5], 5)), int(0));

        let c = divisor_d(&DegreeProblem::new(vec![1; 9], 3).unwrap()).unwrap();
        for p in enumerate_proper_partitions(9).unwrap() {
            let k = p.block_len() as i64;
            assert_eq!(c.b(&p), int((k % 3) * ((9 - k) % 3)));
        }

        let c =
            divisor_d(&DegreeProblem::new(vec![3, 2, 1, 2, 4, 1, 1, 2, 3, 1, 1, 1], 11).unwrap()).unwrap();
        assert_eq!(c.psi(1), &int(24));
    }

    #[test]
    fn d_rejects_bad_modulus() {
        assert!(matches!(
            DegreeProblem::new(vec![1, 1, 1, 2], 3),
            Err(Error::ModulusMismatch { .. })
        ));
    }

    #[test]
    fn e_examples() {
        let p = DegreeProblem::new(vec![1; 9], 3).unwrap();
        let c = divisor_e(&p).unwrap();
        assert!(c.psi_coeffs().iter().all(|a| *a == int(2)));
        for q in enumerate_proper_partitions(9).unwrap() {
            let k = q.block_len() as i64;
            let extra = if k % 3 == 0 { 3 } else { 0 };
            assert_eq!(c.b(&q), int((k % 3) * ((9 - k) % 3) + extra));
        }
        assert!(matches!(
            divisor_e(&DegreeProblem::new(vec![1, 1, 1, 1], 2).unwrap()),
            Err(Error::ModulusTooSmall(2))
        ));
        // no m-divisible degree and no m-divisible proper block
        let p = DegreeProblem::new(vec![1, 1, 1, 2], 5).unwrap();
        assert_eq!(divisor_e(&p).unwrap(), divisor_d(&p).unwrap());
    }

    #[test]
    fn d_depends_only_on_residues() {
        let a = DegreeProblem::new(vec![4, 1, 7, 3, 3], 3).unwrap();
        let b = DegreeProblem::new(vec![1, 1, 1, 0, 0], 3).unwrap();
        assert_eq!(divisor_d(&a).unwrap(), divisor_d(&b).unwrap());
        assert_eq!(divisor_e(&a).unwrap(), divisor_e(&b).unwrap());
    }

    #[test]
    fn equivariance_under_permutation() {
        let d = vec![1, 2, 3, 4, 5];
        let perm = [3usize, 1, 4, 5, 2]; // vertex i goes to perm[i-1]
        let mut permuted = vec![0; 5];
        for (k, &v) in perm.iter().enumerate() {
            permuted[v - 1] = d[k];
        }
        let a = divisor_d(&DegreeProblem::new(d, 5).unwrap()).unwrap();
        let b = divisor_d(&DegreeProblem::new(permuted, 5).unwrap()).unwrap();
        for i in 1..=5 {
            assert_eq!(a.psi(i), b.psi(perm[i - 1]));
        }
        for p in enumerate_proper_partitions(5).unwrap() {
            let image: Vec<usize> = p.block().iter().map(|&v| perm[v - 1]).collect();
            assert_eq!(a.b(&p), b.b(&part(&image, 5)));
        }
    }

    #[test]
    fn e_minus_d_on_reduced_problems() {
        let p = DegreeProblem::new(vec![1, 1, 1, 2, 4], 3).unwrap();
        let p = reduce_degrees(&p).unwrap().0;
        let diff = divisor_e(&p).unwrap().sub(&divisor_d(&p).unwrap()).unwrap();
        assert!(diff.is_pure_boundary());
        for q in enumerate_proper_partitions(5).unwrap() {
            let divisible = p.mask_degree(q.mask()) % 3 == 0;
            assert_eq!(diff.b(&q), if divisible { int(3) } else { int(0) });
        }
    }

    #[test]
    fn hodge_examples() {
        let p = DegreeProblem::new(vec![1, 1, 1, 2], 5).unwrap();
        let h1 = hodge_eigenbundle_det(&p, 1).unwrap();
        assert_eq!(h1, divisor_d(&p).unwrap().scale(&ratio(1, 50)));
        assert!(hodge_eigenbundle_det(&p, 0).unwrap().is_zero());
        assert!(hodge_eigenbundle_det(&p, 5).unwrap().is_zero());
        let h2 = hodge_eigenbundle_det(&p, 2).unwrap();
        let a: Vec<_> = h2.psi_coeffs().to_vec();
        assert_eq!(a, vec![ratio(6, 50), ratio(6, 50), ratio(6, 50), ratio(4, 50)]);
        for j in 1..5 {
            assert_eq!(
                hodge_eigenbundle_det(&p, j).unwrap(),
                hodge_eigenbundle_det(&p, 5 - j).unwrap()
            );
        }
    }

    #[test]
    fn reduction_examples() {
        let (r, red) = reduce_degrees(&DegreeProblem::new(vec![5, 1, 1, 2], 3).unwrap()).unwrap();
        assert_eq!(r.degrees(), &[2, 1, 1, 2]);
        assert!(red.dropped.is_empty());

        assert!(matches!(
            reduce_degrees(&DegreeProblem::new(vec![3, 1, 1, 1], 3).unwrap()),
            Err(Error::DomainTooSmall(_))
        ));
        let (r, red) = reduce_degrees(&DegreeProblem::new(vec![3, 1, 1, 1, 2, 1], 3).unwrap()).unwrap();
        assert_eq!(r.degrees(), &[1, 1, 1, 2, 1]);
        assert_eq!(red.dropped, vec![1]);
        assert_eq!(red.kept, vec![2, 3, 4, 5, 6]);
    }

    #[test]
    fn family_parsing() {
        assert_eq!("E".parse::<Family>().unwrap(), Family::E);
        assert!("F".parse::<Family>().is_err());
        assert!(DivisorFamilyTag::new(Family::E, DegreeProblem::new(vec![1; 4], 2).unwrap()).is_err());
    }
}
