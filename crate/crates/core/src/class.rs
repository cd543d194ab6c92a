//! Divisor classes `sum a_i psi_i - sum b_P Delta_P` with exact coefficients.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partition::ProperPartition;
use crate::problem::MAX_POINTS;
use crate::rational::{format_rational, parse_rational, Rational};

/// A class in the free module on `{psi_i} ∪ {Delta_P}`.
///
/// Boundary coefficients are stored as `b_P`, so the class is
/// `sum a_i psi_i - sum b_P Delta_P`. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ClassFile", into = "ClassFile")]
pub struct DivisorClass {
    n: usize,
    psi: Vec<Rational>,
    boundary: BTreeMap<ProperPartition, Rational>,
}

impl DivisorClass {
    pub fn zero(n: usize) -> Self {
        DivisorClass {
            n,
            psi: vec![Rational::zero(); n],
            boundary: BTreeMap::new(),
        }
    }

    /// The class `psi_i`.
    pub fn psi_class(i: usize, n: usize) -> Result<Self> {
        let mut c = Self::zero(n);
        c.set_psi(i, crate::rational::one())?;
        Ok(c)
    }

    /// The class `Delta_P`, i.e. `b_P = -1`.
    pub fn boundary_class(p: ProperPartition) -> Self {
        let mut c = Self::zero(p.n());
        c.boundary.insert(p, -crate::rational::one());
        c
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn psi(&self, i: usize) -> &Rational {
        &self.psi[i - 1]
    }

    pub fn psi_coeffs(&self) -> &[Rational] {
        &self.psi
    }

    /// `b_P`; zero when absent.
    pub fn b(&self, p: &ProperPartition) -> Rational {
        self.boundary.get(p).cloned().unwrap_or_else(Rational::zero)
    }

    /// Coefficient of `Delta_P` in the class, i.e. `-b_P`.
    pub fn delta_coeff(&self, p: &ProperPartition) -> Rational {
        -self.b(p)
    }

    pub fn boundary(&self) -> &BTreeMap<ProperPartition, Rational> {
        &self.boundary
    }

    fn check_vertex(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.n {
            return Err(Error::VertexOutOfRange { vertex: i, n: self.n });
        }
        Ok(())
    }

    pub fn set_psi(&mut self, i: usize, value: Rational) -> Result<()> {
        self.check_vertex(i)?;
        self.psi[i - 1] = value;
        Ok(())
    }

    pub fn set_b(&mut self, p: ProperPartition, value: Rational) -> Result<()> {
        if p.n() != self.n {
            return Err(Error::AmbientMismatch {
                left: self.n,
                right: p.n(),
            });
        }
        if value.is_zero() {
            self.boundary.remove(&p);
        } else {
            self.boundary.insert(p, value);
        }
        Ok(())
    }

    pub(crate) fn add_b(&mut self, p: ProperPartition, delta: &Rational) {
        debug_assert_eq!(p.n(), self.n);
        let v = self.b(&p) + delta;
        if v.is_zero() {
            self.boundary.remove(&p);
        } else {
            self.boundary.insert(p, v);
        }
    }

    /// Pure boundary class `sum c_P Delta_P`.
    pub fn from_boundary_coeffs<'a, I>(n: usize, coeffs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a ProperPartition, &'a Rational)>,
    {
        let mut c = Self::zero(n);
        for (p, v) in coeffs {
            c.set_b(*p, -v.clone())?;
        }
        Ok(c)
    }

    pub fn is_zero(&self) -> bool {
        self.boundary.is_empty() && self.psi.iter().all(Zero::is_zero)
    }

    pub fn is_pure_boundary(&self) -> bool {
        self.psi.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, s: &Rational) -> Self {
        let mut out = Self::zero(self.n);
        if s.is_zero() {
            return out;
        }
        out.psi = self.psi.iter().map(|a| a * s).collect();
        out.boundary = self.boundary.iter().map(|(p, b)| (*p, b * s)).collect();
        out
    }

    /// Coefficient-wise `s A + t B`.
    pub fn combine(a: &Self, b: &Self, s: &Rational, t: &Rational) -> Result<Self> {
        if a.n != b.n {
            return Err(Error::AmbientMismatch {
                left: a.n,
                right: b.n,
            });
        }
        let mut out = a.scale(s);
        for (x, y) in out.psi.iter_mut().zip(&b.psi) {
            *x += y * t;
        }
        for (p, v) in &b.boundary {
            out.add_b(*p, &(v * t));
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Self::combine(self, other, &crate::rational::one(), &-crate::rational::one())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Self::combine(self, other, &crate::rational::one(), &crate::rational::one())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("class serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct BoundaryEntry {
    block: Vec<usize>,
    coeff: String,
}

/// Wire format: `{"n", "psi": ["p/q"], "boundary": [{"block", "coeff"}]}`
/// where `coeff` is `b_P`.
#[derive(Debug, Serialize, Deserialize)]
struct ClassFile {
    n: usize,
    psi: Vec<String>,
    boundary: Vec<BoundaryEntry>,
}

impl From<DivisorClass> for ClassFile {
    fn from(c: DivisorClass) -> Self {
        ClassFile {
            n: c.n,
            psi: c.psi.iter().map(format_rational).collect(),
            boundary: c
                .boundary
                .iter()
                .map(|(p, v)| BoundaryEntry {
                    block: p.block(),
                    coeff: format_rational(v),
                })
                .collect(),
        }
    }
}

impl TryFrom<ClassFile> for DivisorClass {
    type Error = Error;

    fn try_from(f: ClassFile) -> Result<Self> {
        if f.n > MAX_POINTS {
            return Err(Error::Parse(format!("n = {} is too large", f.n)));
        }
        if f.psi.len() != f.n {
            return Err(Error::Parse(format!(
                "expected {} psi coefficients, got {}",
                f.n,
                f.psi.len()
            )));
        }
        let mut c = DivisorClass::zero(f.n);
        for (k, s) in f.psi.iter().enumerate() {
            c.psi[k] = parse_rational(s)?;
        }
        for e in f.boundary {
            let p = ProperPartition::new(&e.block, f.n)?;
            if c.boundary.contains_key(&p) {
                return Err(Error::Parse(format!("partition {p} listed twice")));
            }
            c.set_b(p, parse_rational(&e.coeff)?)?;
        }
        Ok(c)
    }
}
