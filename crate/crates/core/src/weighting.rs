//! Edge weightings of the complete graph on `{1, ..., n}` and their flows.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::class::DivisorClass;
use crate::error::{Error, Result};
use crate::partition::{enumerate_proper_partitions, ProperPartition};
use crate::rational::{format_rational, parse_rational, Rational};

/// Rational weights on the edges `(i-j)`, stored densely; absent means zero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "WeightingFile", into = "WeightingFile")]
pub struct Weighting {
    n: usize,
    weights: Vec<Rational>,
}

fn edge_index(i: usize, j: usize, n: usize) -> usize {
    let (a, b) = if i < j { (i - 1, j - 1) } else { (j - 1, i - 1) };
    a * n - a * (a + 1) / 2 + (b - a - 1)
}

impl Weighting {
    pub fn zero(n: usize) -> Self {
        Weighting {
            n,
            weights: vec![Rational::zero(); n * n.saturating_sub(1) / 2],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn check_edge(&self, i: usize, j: usize) -> Result<()> {
        for v in [i, j] {
            if v == 0 || v > self.n {
                return Err(Error::VertexOutOfRange { vertex: v, n: self.n });
            }
        }
        if i == j {
            return Err(Error::InvalidPartition(format!("edge ({i}-{i}) is a loop")));
        }
        Ok(())
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.weights[edge_index(i, j, self.n)]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Rational) -> Result<()> {
        self.check_edge(i, j)?;
        self.weights[edge_index(i, j, self.n)] = value;
        Ok(())
    }

    pub fn add_to(&mut self, i: usize, j: usize, value: &Rational) -> Result<()> {
        self.check_edge(i, j)?;
        self.weights[edge_index(i, j, self.n)] += value;
        Ok(())
    }

    /// Edges `(i, j, w)` with `i < j`, including zero weights.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, &Rational)> + '_ {
        let n = self.n;
        (1..=n)
            .flat_map(move |i| (i + 1..=n).map(move |j| (i, j)))
            .zip(&self.weights)
            .map(|((i, j), w)| (i, j, w))
    }

    pub fn total_weight(&self) -> Rational {
        self.weights.iter().sum()
    }

    pub fn scaled(&self, s: &Rational) -> Self {
        Weighting {
            n: self.n,
            weights: self.weights.iter().map(|w| w * s).collect(),
        }
    }

    pub fn add_assign(&mut self, other: &Weighting) -> Result<()> {
        if self.n != other.n {
            return Err(Error::AmbientMismatch {
                left: self.n,
                right: other.n,
            });
        }
        for (a, b) in self.weights.iter_mut().zip(&other.weights) {
            *a += b;
        }
        Ok(())
    }

    /// Arithmetic mean of a nonempty family on a common vertex set.
    pub fn average(family: &[Weighting]) -> Result<Weighting> {
        let first = family
            .first()
            .ok_or_else(|| Error::InvalidPartition("cannot average an empty family".into()))?;
        let mut sum = Weighting::zero(first.n);
        for w in family {
            sum.add_assign(w)?;
        }
        Ok(sum.scaled(&Rational::new(1.into(), (family.len() as i64).into())))
    }

    /// Re-indexes onto `{1, ..., n}`: local vertex `l` becomes `vertices[l-1]`.
    pub fn embed(&self, vertices: &[usize], n: usize) -> Result<Weighting> {
        if vertices.len() != self.n {
            return Err(Error::AmbientMismatch {
                left: self.n,
                right: vertices.len(),
            });
        }
        let mut out = Weighting::zero(n);
        for (i, j, w) in self.edges() {
            if !w.is_zero() {
                out.set(vertices[i - 1], vertices[j - 1], w.clone())?;
            }
        }
        Ok(out)
    }

    /// Flow through vertex `k`: `sum_{i != k} w(k-i)`.
    pub fn vertex_flow(&self, k: usize) -> Result<Rational> {
        if k == 0 || k > self.n {
            return Err(Error::VertexOutOfRange { vertex: k, n: self.n });
        }
        Ok((1..=self.n).filter(|&i| i != k).map(|i| self.get(k, i)).sum())
    }

    /// Sum of weights on edges with exactly one endpoint in `mask`.
    pub fn mask_flow(&self, mask: u32) -> Rational {
        self.edges()
            .filter(|&(i, j, _)| (mask >> (i - 1) & 1) != (mask >> (j - 1) & 1))
            .map(|(_, _, w)| w)
            .sum()
    }

    /// Flow across a proper partition.
    pub fn partition_flow(&self, p: &ProperPartition) -> Result<Rational> {
        if p.n() != self.n {
            return Err(Error::AmbientMismatch {
                left: self.n,
                right: p.n(),
            });
        }
        Ok(self.mask_flow(p.mask()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("weighting serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Given `vertex_flow(w, i) = a_i` for every `i`, returns
/// `c_P = flow(P) - b_P` for every proper partition; `sum c_P Delta_P` is then
/// linearly equivalent to `a`. Nonnegativity is not checked here.
pub fn rewrite_to_boundary(a: &DivisorClass, w: &Weighting) -> Result<BTreeMap<ProperPartition, Rational>> {
    if a.n() != w.n() {
        return Err(Error::AmbientMismatch {
            left: a.n(),
            right: w.n(),
        });
    }
    for i in 1..=a.n() {
        let actual = w.vertex_flow(i)?;
        if &actual != a.psi(i) {
            return Err(Error::FlowMismatch {
                vertex: i,
                expected: Box::new(a.psi(i).clone()),
                actual: Box::new(actual),
            });
        }
    }
    Ok(enumerate_proper_partitions(a.n())?
        .into_iter()
        .map(|p| {
            let c = w.mask_flow(p.mask()) - a.b(&p);
            (p, c)
        })
        .collect())
}

#[derive(Debug, Serialize, Deserialize)]
struct EdgeEntry {
    edge: [usize; 2],
    value: String,
}

/// Wire format `{"n", "edges": [{"edge": [i, j], "value": "p/q"}]}`, `i < j`,
/// zero edges omitted.
#[derive(Debug, Serialize, Deserialize)]
struct WeightingFile {
    n: usize,
    edges: Vec<EdgeEntry>,
}

impl From<Weighting> for WeightingFile {
    fn from(w: Weighting) -> Self {
        WeightingFile {
            n: w.n,
            edges: w
                .edges()
                .filter(|(_, _, v)| !v.is_zero())
                .map(|(i, j, v)| EdgeEntry {
                    edge: [i, j],
                    value: format_rational(v),
                })
                .collect(),
        }
    }
}

impl TryFrom<WeightingFile> for Weighting {
    type Error = Error;

    fn try_from(f: WeightingFile) -> Result<Self> {
        if f.n > crate::problem::MAX_POINTS {
            return Err(Error::Parse(format!("n = {} is too large", f.n)));
        }
        let mut w = Weighting::zero(f.n);
        let mut seen = std::collections::BTreeSet::new();
        for e in f.edges {
            let [i, j] = e.edge;
            if i >= j {
                return Err(Error::Parse(format!("edge [{i}, {j}] must satisfy i < j")));
            }
            if !seen.insert((i, j)) {
                return Err(Error::Parse(format!("edge [{i}, {j}] listed twice")));
            }
            w.set(i, j, parse_rational(&e.value)?)?;
        }
        Ok(w)
    }
}
