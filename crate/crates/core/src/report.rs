//! Symmetric profiles of `S_n`-invariant classes.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::class::DivisorClass;
use crate::partition::proper_masks;
use crate::partition::ProperPartition;
use crate::rational::{format_rational, Rational};

/// `a sum psi_i + sum_k c_k Delta_k`, where `Delta_k` is the sum of the
/// boundary divisors whose smaller side has `k` points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetricProfile {
    pub n: usize,
    pub psi: Rational,
    /// Keyed by the smaller side size, `2..=n/2`; every size is present.
    pub delta: BTreeMap<usize, Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SymmetryReport {
    Symmetric(SymmetricProfile),
    NotSymmetric,
}

pub fn symmetrize_report(a: &DivisorClass) -> SymmetryReport {
    let n = a.n();
    let psi = a.psi(1).clone();
    if a.psi_coeffs().iter().any(|x| *x != psi) {
        return SymmetryReport::NotSymmetric;
    }
    let mut delta: BTreeMap<usize, Rational> = BTreeMap::new();
    for mask in proper_masks(n) {
        let p = ProperPartition::from_mask(mask, n).expect("proper mask");
        let c = a.delta_coeff(&p);
        match delta.get(&p.min_side()) {
            Some(prev) if *prev != c => return SymmetryReport::NotSymmetric,
            Some(_) => {}
            None => {
                delta.insert(p.min_side(), c);
            }
        }
    }
    SymmetryReport::Symmetric(SymmetricProfile { n, psi, delta })
}

impl fmt::Display for SymmetricProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        if !self.psi.is_zero() {
            terms.push(format!("psi: {}", format_rational(&self.psi)));
        }
        for (k, c) in &self.delta {
            terms.push(format!("Δ{k}: {}", format_rational(c)));
        }
        write!(f, "({})", terms.join(", "))
    }
}

impl fmt::Display for SymmetryReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymmetryReport::Symmetric(p) => p.fmt(f),
            SymmetryReport::NotSymmetric => f.write_str("NotSymmetric"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divisors::divisor_d;
    use crate::partition::enumerate_proper_partitions;
    use crate::problem::DegreeProblem;
    use crate::rational::int;

    #[test]
    fn nine_point_profile() {
        let coeffs: Vec<(ProperPartition, Rational)> = enumerate_proper_partitions(9)
            .unwrap()
            .into_iter()
            .map(|p| {
                let c = if p.min_side() == 4 { 2 } else { 1 };
                (p, int(c))
            })
            .collect();
        let a = DivisorClass::from_boundary_coeffs(9, coeffs.iter().map(|(p, c)| (p, c))).unwrap();
        match symmetrize_report(&a) {
            SymmetryReport::Symmetric(p) => {
                assert_eq!(p.psi, int(0));
                assert_eq!(p.delta, BTreeMap::from([(2, int(1)), (3, int(1)), (4, int(2))]));
                assert_eq!(p.to_string(), "(Δ2: 1/1, Δ3: 1/1, Δ4: 2/1)");
            }
            SymmetryReport::NotSymmetric => panic!("profile expected"),
        }
    }

    #[test]
    fn asymmetric_and_zero() {
        let d = divisor_d(&DegreeProblem::new(vec![1, 1, 1, 2, 4], 3).unwrap()).unwrap();
        assert_eq!(symmetrize_report(&d), SymmetryReport::NotSymmetric);
        match symmetrize_report(&DivisorClass::zero(7)) {
            SymmetryReport::Symmetric(p) => {
                assert_eq!(p.delta.len(), 2);
                assert!(p.psi.is_zero() && p.delta.values().all(|c| c.is_zero()));
            }
            SymmetryReport::NotSymmetric => panic!("zero is symmetric"),
        }
    }
}
