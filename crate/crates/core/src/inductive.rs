//! Weightings with flow `d_i (m - d_i)` through every vertex (P1), at least
//! `<d(I)>_m <d(J)>_m` across every proper partition (P2) and at least `m`
//! across every proper m-partition (P3), built by induction on `sum d_i`.
//!
//! The recursion splits the vertex set along m-partitions, builds weightings
//! on both halves, glues them with zero weight on crossing edges, and
//! averages several such gluings so that every m-partition ends up with flow
//! at least `m`. Every result is checked before it is returned.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::partition::{full_mask, mask_to_vec, proper_masks, ProperPartition};
use crate::problem::{bracket, DegreeProblem};
use crate::rational::{int, Rational};
use crate::standard::{sigma_unbalancing, standard_weighting, CyclicOrder};
use crate::weighting::Weighting;

/// Violations of (P1), (P2), (P3); all empty means the weighting passes.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PropertyReport {
    /// `(vertex, expected, actual)`
    pub p1_violations: Vec<(usize, Rational, Rational)>,
    /// `(partition, bound, actual)`
    pub p2_violations: Vec<(ProperPartition, Rational, Rational)>,
    /// `(m-partition, m, actual)`
    pub p3_violations: Vec<(ProperPartition, Rational, Rational)>,
}

impl PropertyReport {
    pub fn is_clean(&self) -> bool {
        self.p1_violations.is_empty() && self.p2_violations.is_empty() && self.p3_violations.is_empty()
    }
}

/// Checks (P1)-(P3) exhaustively. The problem may have any number of points;
/// below four there are no proper partitions and only (P1) applies.
pub fn verify_p123(w: &Weighting, problem: &DegreeProblem) -> Result<PropertyReport> {
    problem.require_reduced()?;
    let n = problem.n();
    if w.n() != n {
        return Err(Error::AmbientMismatch {
            left: n,
            right: w.n(),
        });
    }
    let m = problem.modulus();
    let mut report = PropertyReport::default();
    for i in 1..=n {
        let d = problem.degree(i);
        let expected = int(d * (m - d));
        let actual = w.vertex_flow(i)?;
        if actual != expected {
            report.p1_violations.push((i, expected, actual));
        }
    }
    for mask in proper_masks(n) {
        let flow = w.mask_flow(mask);
        let d = problem.mask_degree(mask);
        let floor = int(bracket(d, m));
        let p = || ProperPartition::from_mask(mask, n).expect("proper mask");
        if flow < floor {
            report.p2_violations.push((p(), floor, flow.clone()));
        }
        if d % m == 0 && flow < int(m) {
            report.p3_violations.push((p(), int(m), flow));
        }
    }
    Ok(report)
}

fn m_partition_masks(problem: &DegreeProblem) -> Vec<u32> {
    let m = problem.modulus();
    proper_masks(problem.n())
        .into_iter()
        .filter(|&mask| problem.mask_degree(mask) % m == 0)
        .collect()
}

/// Proper partitions `I|J` with `m | d(I)`, in canonical order.
pub fn m_partitions(problem: &DegreeProblem) -> Result<Vec<ProperPartition>> {
    problem.require_reduced()?;
    m_partition_masks(problem)
        .into_iter()
        .map(|mask| ProperPartition::from_mask(mask, problem.n()))
        .collect()
}

/// Copies `w1` onto the canonical block of `split` and `w2` onto its
/// complement (local vertex `l` is the `l`-th smallest element of its
/// block); crossing edges get weight zero.
pub fn glue_weighting(w1: &Weighting, w2: &Weighting, split: &ProperPartition) -> Result<Weighting> {
    let (s1, s2) = (split.block(), split.complement());
    if w1.n() != s1.len() || w2.n() != s2.len() {
        return Err(Error::AmbientMismatch {
            left: s1.len() + s2.len(),
            right: w1.n() + w2.n(),
        });
    }
    let n = split.n();
    let mut out = w1.embed(&s1, n)?;
    out.add_assign(&w2.embed(&s2, n)?)?;
    Ok(out)
}

/// One gluing performed during the recursion, in the local labels of the
/// sub-problem where it happened.
#[derive(Debug, Clone, PartialEq)]
pub struct GlueRecord {
    pub degrees: Vec<i64>,
    pub modulus: i64,
    pub split: ProperPartition,
    pub weighting: Weighting,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GlueBoundViolation {
    pub partition: ProperPartition,
    pub bound: Rational,
    pub actual: Rational,
    pub transverse: bool,
}

/// Checks the flow bounds a glued weighting must satisfy: zero across the
/// split, at least `2m - 2` across transverse m-partitions (at least `2m`
/// when `m` divides `d(S1 ∩ I)`), at least `m` across the other m-partitions.
pub fn check_glue_bounds(record: &GlueRecord) -> Result<Vec<GlueBoundViolation>> {
    let problem = DegreeProblem::local(record.degrees.clone(), record.modulus)?;
    let n = problem.n();
    let m = record.modulus;
    let s1 = record.split.mask();
    let mut out = Vec::new();
    for mask in m_partition_masks(&problem) {
        let p = ProperPartition::from_mask(mask, n)?;
        let flow = record.weighting.mask_flow(mask);
        let (bound, exact, transverse) = if p == record.split {
            (int(0), true, false)
        } else if p.is_transverse(&record.split) {
            let b = if problem.mask_degree(s1 & mask) % m == 0 {
                2 * m
            } else {
                2 * m - 2
            };
            (int(b), false, true)
        } else {
            (int(m), false, false)
        };
        let ok = if exact { flow == bound } else { flow >= bound };
        if !ok {
            out.push(GlueBoundViolation {
                partition: p,
                bound,
                actual: flow,
                transverse,
            });
        }
    }
    Ok(out)
}

/// Which branch of the construction produced a weighting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Case {
    /// `sum d_i = m`, or fewer than four points: the circle construction.
    Base,
    /// No proper m-partition: the circle construction.
    NoMPartition,
    /// One m-partition, unbalanced by the choice of cyclic order.
    SingleMPartition,
    /// Two transverse m-partitions: mean of the two unbalancing weightings.
    TwoMPartitions,
    /// Four m-divisible parts `A, B, C, D`: mean of the three pairings.
    FourSplit,
    /// Three m-divisible parts, each pairwise union with a unique m-partition.
    ThreeSplitReinforced,
    /// Three m-divisible parts, refined by an m-partition `A|B` of `S1 ∪ S2`.
    ThreeSplitRefined,
    /// Mean of the gluings along all m-partitions.
    General,
    /// The primary branch failed verification and a wider average was used.
    Fallback,
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InductiveOutcome {
    pub weighting: Weighting,
    pub case: Case,
    pub glues: Vec<GlueRecord>,
}

/// A weighting satisfying (P1)-(P3) for a reduced problem with `m >= 3`.
pub fn inductive_weighting(problem: &DegreeProblem) -> Result<Weighting> {
    Ok(run(problem, false)?.weighting)
}

/// Like [`inductive_weighting`], also returning the top-level branch and
/// every gluing performed on the way.
pub fn inductive_weighting_traced(problem: &DegreeProblem) -> Result<InductiveOutcome> {
    run(problem, true)
}

fn run(problem: &DegreeProblem, trace: bool) -> Result<InductiveOutcome> {
    problem.require_reduced()?;
    if problem.modulus() < 3 {
        return Err(Error::ModulusTooSmall(problem.modulus()));
    }
    let mut builder = Builder {
        m: problem.modulus(),
        cache: HashMap::new(),
        glues: trace.then(Vec::new),
    };
    let (weighting, case) = builder.build(problem.degrees())?;
    Ok(InductiveOutcome {
        weighting,
        case,
        glues: builder.glues.unwrap_or_default(),
    })
}

/// Compresses the bits of `mask` that lie in `within` to the low bits.
fn restrict_mask(mask: u32, within: u32) -> u32 {
    let mut out = 0;
    for (k, v) in mask_to_vec(within).into_iter().enumerate() {
        if mask >> (v - 1) & 1 == 1 {
            out |= 1 << k;
        }
    }
    out
}

/// Inverse of [`restrict_mask`].
fn expand_mask(local: u32, within: u32) -> u32 {
    let mut out = 0;
    for (k, v) in mask_to_vec(within).into_iter().enumerate() {
        if local >> k & 1 == 1 {
            out |= 1 << (v - 1);
        }
    }
    out
}

fn sub_degrees(degrees: &[i64], mask: u32) -> Vec<i64> {
    mask_to_vec(mask).into_iter().map(|v| degrees[v - 1]).collect()
}

/// A partition of `set` into exactly `parts` nonempty m-divisible blocks,
/// ordered by smallest element.
fn split_into(degrees: &[i64], m: i64, set: u32, parts: usize) -> Option<Vec<u32>> {
    let d = |mask: u32| sub_degrees(degrees, mask).iter().sum::<i64>();
    if parts == 1 {
        return (set != 0 && d(set) % m == 0).then(|| vec![set]);
    }
    let low = set & set.wrapping_neg();
    let rest = set & !low;
    let mut sub = rest;
    loop {
        let block = low | sub;
        if block != set && d(block) % m == 0 {
            if let Some(mut others) = split_into(degrees, m, set & !block, parts - 1) {
                others.insert(0, block);
                return Some(others);
            }
        }
        if sub == 0 {
            return None;
        }
        sub = (sub - 1) & rest;
    }
}

struct Builder {
    m: i64,
    cache: HashMap<Vec<i64>, (Weighting, Case)>,
    glues: Option<Vec<GlueRecord>>,
}

impl Builder {
    fn build(&mut self, degrees: &[i64]) -> Result<(Weighting, Case)> {
        if let Some(hit) = self.cache.get(degrees) {
            return Ok(hit.clone());
        }
        let problem = DegreeProblem::local(degrees.to_vec(), self.m)?;
        let k = degrees.len();
        let identity = || standard_weighting(&problem, &CyclicOrder::identity(k));

        let primary: Result<(Weighting, Case)> = if k < 4 || problem.s() == 1 {
            identity().map(|w| (w, Case::Base))
        } else {
            let mparts = m_partition_masks(&problem);
            match mparts.len() {
                0 => identity().map(|w| (w, Case::NoMPartition)),
                1 => self
                    .unbalanced(&problem, mparts[0])
                    .map(|w| (w, Case::SingleMPartition)),
                2 => self.two_partitions(&problem, &mparts),
                _ => self.many_partitions(&problem, &mparts),
            }
        };

        let mut result = None;
        if let Ok((w, case)) = primary {
            if verify_p123(&w, &problem)?.is_clean() {
                result = Some((w, case));
            }
        }
        if result.is_none() {
            result = self.fallback(&problem)?;
        }
        let out = result.ok_or_else(|| {
            Error::CertificateSearchFailed(format!(
                "no weighting with (P1)-(P3) for degrees {degrees:?}, m = {}",
                self.m
            ))
        })?;
        self.cache.insert(degrees.to_vec(), out.clone());
        Ok(out)
    }

    fn unbalanced(&self, problem: &DegreeProblem, mask: u32) -> Result<Weighting> {
        let p = ProperPartition::from_mask(mask, problem.n())?;
        let sigma = sigma_unbalancing(&p, problem)?;
        standard_weighting(problem, &sigma)
    }

    fn two_partitions(&mut self, problem: &DegreeProblem, mparts: &[u32]) -> Result<(Weighting, Case)> {
        let n = problem.n();
        let a = ProperPartition::from_mask(mparts[0], n)?;
        let b = ProperPartition::from_mask(mparts[1], n)?;
        if !a.is_transverse(&b) {
            return Err(Error::CertificateSearchFailed(format!(
                "the two m-partitions {a} and {b} are not transverse"
            )));
        }
        let w1 = self.unbalanced(problem, mparts[0])?;
        let w2 = self.unbalanced(problem, mparts[1])?;
        Ok((Weighting::average(&[w1, w2])?, Case::TwoMPartitions))
    }

    fn many_partitions(&mut self, problem: &DegreeProblem, mparts: &[u32]) -> Result<(Weighting, Case)> {
        let degrees = problem.degrees();
        let full = full_mask(problem.n());
        if let Some(p) = split_into(degrees, self.m, full, 4) {
            let family = vec![
                self.glue(degrees, p[0] | p[1], None)?,
                self.glue(degrees, p[0] | p[2], None)?,
                self.glue(degrees, p[0] | p[3], None)?,
            ];
            return Ok((Weighting::average(&family)?, Case::FourSplit));
        }
        if let Some(s) = split_into(degrees, self.m, full, 3) {
            return self.three_split(degrees, &s);
        }
        let family = mparts
            .iter()
            .map(|&mask| self.glue(degrees, mask, None))
            .collect::<Result<Vec<_>>>()?;
        Ok((Weighting::average(&family)?, Case::General))
    }

    fn three_split(&mut self, degrees: &[i64], s: &[u32]) -> Result<(Weighting, Case)> {
        let pairs = [(0, 1, 2), (0, 2, 1), (1, 2, 0)];
        // m-partitions of each pairwise union, in the union's local labels
        let mut refinement = None;
        for &(i, j, k) in &pairs {
            let union = s[i] | s[j];
            let local = DegreeProblem::local(sub_degrees(degrees, union), self.m)?;
            let own = ProperPartition::from_mask(restrict_mask(s[i], union), local.n())?.mask();
            if let Some(&other) = m_partition_masks(&local).iter().find(|&&q| q != own) {
                refinement = Some((i, j, k, expand_mask(other, union)));
                break;
            }
        }
        match refinement {
            None => {
                let mut family = Vec::new();
                for &(i, j, _) in &pairs {
                    let union = s[i] | s[j];
                    let local = DegreeProblem::local(sub_degrees(degrees, union), self.m)?;
                    let reinforced = self.unbalanced(&local, restrict_mask(s[i], union))?;
                    family.push(self.glue(degrees, union, Some((union, reinforced)))?);
                }
                Ok((Weighting::average(&family)?, Case::ThreeSplitReinforced))
            }
            Some((i, j, _k, a)) => {
                let union = s[i] | s[j];
                let b = union & !a;
                let family = vec![
                    self.glue(degrees, s[i], None)?,
                    self.glue(degrees, s[j], None)?,
                    self.glue(degrees, a, None)?,
                    self.glue(degrees, b, None)?,
                ];
                Ok((Weighting::average(&family)?, Case::ThreeSplitRefined))
            }
        }
    }

    /// Glues recursive weightings along `side | complement`. `preset` supplies
    /// the weighting for one side (given by its mask) instead of recursing.
    fn glue(&mut self, degrees: &[i64], side: u32, preset: Option<(u32, Weighting)>) -> Result<Weighting> {
        let n = degrees.len();
        let split = ProperPartition::from_mask(side, n)?;
        let mut halves = Vec::with_capacity(2);
        for mask in [split.mask(), split.complement_mask()] {
            let w = match &preset {
                Some((pm, w)) if *pm == mask => w.clone(),
                _ => self.build(&sub_degrees(degrees, mask))?.0,
            };
            halves.push(w);
        }
        let glued = glue_weighting(&halves[0], &halves[1], &split)?;
        if let Some(glues) = self.glues.as_mut() {
            glues.push(GlueRecord {
                degrees: degrees.to_vec(),
                modulus: self.m,
                split,
                weighting: glued.clone(),
            });
        }
        Ok(glued)
    }

    /// Averages of progressively wider candidate families: all gluings along
    /// m-partitions, then those together with every unbalancing circle
    /// weighting, then the unbalancing weightings alone.
    fn fallback(&mut self, problem: &DegreeProblem) -> Result<Option<(Weighting, Case)>> {
        let degrees = problem.degrees().to_vec();
        let mparts = m_partition_masks(problem);
        if mparts.is_empty() {
            return Ok(None);
        }
        let mut glued = Vec::new();
        for &mask in &mparts {
            glued.push(self.glue(&degrees, mask, None)?);
        }
        let unbalanced: Vec<Weighting> = mparts
            .iter()
            .filter_map(|&mask| self.unbalanced(problem, mask).ok())
            .collect();
        let mut both = glued.clone();
        both.extend(unbalanced.iter().cloned());
        for family in [glued, both, unbalanced] {
            if family.is_empty() {
                continue;
            }
            let w = Weighting::average(&family)?;
            if verify_p123(&w, problem)?.is_clean() {
                return Ok(Some((w, Case::Fallback)));
            }
        }
        Ok(None)
    }
}

/// Smallest flow across a proper m-partition, if any exists.
pub fn min_m_partition_flow(w: &Weighting, problem: &DegreeProblem) -> Option<Rational> {
    m_partition_masks(problem)
        .into_iter()
        .map(|mask| w.mask_flow(mask))
        .min()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn problem(d: &[i64], m: i64) -> DegreeProblem {
        DegreeProblem::new(d.to_vec(), m).unwrap()
    }

    #[test]
    fn m_partition_examples() {
        assert_eq!(m_partitions(&problem(&[1; 6], 3)).unwrap().len(), 10);
        let got: Vec<Vec<usize>> = m_partitions(&problem(&[1, 1, 1, 2, 1], 3))
            .unwrap()
            .iter()
            .map(|p| p.block())
            .collect();
        assert_eq!(got, vec![vec![1, 4], vec![1, 2, 3], vec![1, 2, 5], vec![1, 3, 5]]);
        assert!(m_partitions(&problem(&[1, 1, 1, 1, 1], 5)).unwrap().is_empty());
    }

    #[test]
    fn glue_examples() {
        let tri = standard_weighting(
            &DegreeProblem::local(vec![1, 1, 1], 3).unwrap(),
            &CyclicOrder::identity(3),
        )
        .unwrap();
        let split = ProperPartition::new(&[1, 2, 3], 6).unwrap();
        let glued = glue_weighting(&tri, &tri, &split).unwrap();
        assert_eq!(glued.partition_flow(&split).unwrap(), int(0));
        for v in 1..=6 {
            assert_eq!(glued.vertex_flow(v).unwrap(), int(2));
        }
        let cross = ProperPartition::new(&[1, 4], 6).unwrap();
        assert_eq!(glued.partition_flow(&cross).unwrap(), int(4));
        assert!(glue_weighting(&tri, &Weighting::zero(2), &split).is_err());
    }

    #[test]
    fn uniform_example() {
        let p = problem(&[1; 6], 3);
        let out = inductive_weighting_traced(&p).unwrap();
        assert_eq!(out.case, Case::General);
        for (_, _, w) in out.weighting.edges() {
            assert_eq!(w, &ratio(2, 5));
        }
        for q in m_partitions(&p).unwrap() {
            assert_eq!(out.weighting.partition_flow(&q).unwrap(), ratio(18, 5));
        }
        assert_eq!(out.glues.len(), 10);
    }

    #[test]
    fn verify_examples() {
        let p = problem(&[1; 6], 3);
        let report = verify_p123(&Weighting::zero(6), &p).unwrap();
        assert_eq!(report.p1_violations.len(), 6);
        assert_eq!(report.p1_violations[0], (1, int(2), int(0)));
        assert!(!report.is_clean());

        let mut uniform = Weighting::zero(6);
        for i in 1..=6 {
            for j in i + 1..=6 {
                uniform.set(i, j, ratio(2, 5)).unwrap();
            }
        }
        assert!(verify_p123(&uniform, &p).unwrap().is_clean());
        assert_eq!(min_m_partition_flow(&uniform, &p), Some(ratio(18, 5)));
        // (k - 1)(2m - 2)/k with k = 10, m = 3
        assert_eq!(ratio(9 * 4, 10), ratio(18, 5));
    }

    #[test]
    fn base_and_general_cases() {
        let p = problem(&[1, 1, 2, 2], 6);
        let out = inductive_weighting_traced(&p).unwrap();
        assert_eq!(out.case, Case::Base);
        assert!(verify_p123(&out.weighting, &p).unwrap().is_clean());

        let p = problem(&[1, 1, 1, 2, 1], 3);
        let out = inductive_weighting_traced(&p).unwrap();
        assert_eq!(out.case, Case::General);
        assert!(verify_p123(&out.weighting, &p).unwrap().is_clean());
        assert_eq!(out.glues.iter().filter(|g| g.degrees.len() == 5).count(), 4);
    }

    #[test]
    fn rejects_small_modulus_and_unreduced() {
        assert!(matches!(
            inductive_weighting(&problem(&[1, 1, 1, 1], 2)),
            Err(Error::ModulusTooSmall(2))
        ));
        assert!(matches!(
            inductive_weighting(&problem(&[3, 1, 1, 1], 3)),
            Err(Error::DegreesNotReduced(_))
        ));
    }

    #[test]
    fn splits() {
        let d = [1, 2, 1, 2, 1, 2];
        let s = split_into(&d, 3, full_mask(6), 3).unwrap();
        assert_eq!(s.len(), 3);
        assert!(s.iter().all(|&b| sub_degrees(&d, b).iter().sum::<i64>() % 3 == 0));
        assert_eq!(s.iter().fold(0, |a, b| a | b), full_mask(6));
        assert!(split_into(&d, 3, full_mask(6), 4).is_none());
        assert_eq!(restrict_mask(0b10100, 0b10110), 0b110);
        assert_eq!(expand_mask(0b110, 0b10110), 0b10100);
    }
}
