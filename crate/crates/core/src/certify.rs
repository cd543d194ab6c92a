//! Effectivity certificates: a weighting whose vertex flows are the psi
//! coefficients of a family divisor, together with the resulting nonnegative
//! boundary coefficients `c_P = flow(P) - b_P`, and an independent verifier.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::divisors::{family_class, reduce_degrees, Family, Reduction};
use crate::error::{Error, Result};
use crate::inductive::{inductive_weighting, verify_p123};
use crate::partition::{proper_masks, vec_to_mask, ProperPartition};
use crate::problem::{modp, DegreeProblem};
use crate::rational::{format_rational, parse_rational, ratio, Rational};
use crate::standard::{
    is_balanced, sigma_for_stable_tree, sigma_unbalancing, standard_weighting, tree_adapted_orders,
    CyclicOrder,
};
use crate::tree::StableTree;
use crate::weighting::Weighting;

/// How many tree-adapted orders to try when avoidance and positivity are
/// both requested.
pub const TREE_ORDER_CAP: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Claim {
    P1,
    P2,
    P3,
    #[serde(rename = "avoidance")]
    Avoidance,
    #[serde(rename = "positivity")]
    Positivity,
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Claim::P1 => "P1",
            Claim::P2 => "P2",
            Claim::P3 => "P3",
            Claim::Avoidance => "avoidance",
            Claim::Positivity => "positivity",
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CertifyOptions {
    /// Every partition of this tree must get coefficient zero.
    pub avoid_tree: Option<StableTree>,
    /// This partition must get a positive coefficient.
    pub positive_on: Option<ProperPartition>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EffectivityCertificate {
    pub problem: DegreeProblem,
    pub family: Family,
    /// Cyclic order used by the circle construction, in original labels,
    /// over the points with nonzero residue.
    pub sigma: Option<Vec<usize>>,
    pub weighting: Weighting,
    /// Nonzero coefficients only.
    pub boundary_coefficients: BTreeMap<ProperPartition, Rational>,
    pub options: CertifyOptions,
    pub claims: Vec<Claim>,
}

/// Restricts a partition of `{1..n}` to `kept`, relabelled `1..kept.len()`.
/// `None` when the restriction is not proper.
fn restrict(p: &ProperPartition, kept: &[usize]) -> Option<ProperPartition> {
    let local: Vec<usize> = kept
        .iter()
        .enumerate()
        .filter(|(_, &v)| p.contains(v))
        .map(|(k, _)| k + 1)
        .collect();
    ProperPartition::new(&local, kept.len()).ok()
}

fn restrict_tree(tree: &StableTree, kept: &[usize]) -> Result<StableTree> {
    let nodes: Vec<ProperPartition> = tree.nodes().iter().filter_map(|p| restrict(p, kept)).collect();
    StableTree::new(nodes, kept.len())
}

fn sigma_for_options(
    reduced: &DegreeProblem,
    reduction: &Reduction,
    options: &CertifyOptions,
) -> Result<CyclicOrder> {
    let k = reduced.n();
    let tree = options
        .avoid_tree
        .as_ref()
        .map(|t| restrict_tree(t, &reduction.kept))
        .transpose()?;
    let positive = match &options.positive_on {
        None => None,
        Some(p) => Some(restrict(p, &reduction.kept).ok_or_else(|| {
            Error::UnsupportedOptionCombo(format!(
                "{p} becomes improper once the points {:?} with zero residue are forgotten, \
                 so its coefficient is always zero",
                reduction.dropped
            ))
        })?),
    };
    match (tree, positive) {
        (None, None) => Ok(CyclicOrder::identity(k)),
        (Some(t), None) => sigma_for_stable_tree(&t, k),
        (None, Some(p)) => sigma_unbalancing(&p, reduced),
        (Some(t), Some(p)) => {
            if t.contains(&p) {
                return Err(Error::UnsupportedOptionCombo(format!(
                    "{p} belongs to the tree to be avoided"
                )));
            }
            for sigma in tree_adapted_orders(&t, k, TREE_ORDER_CAP)? {
                if !is_balanced(&p, reduced, &sigma)? {
                    return Ok(sigma);
                }
            }
            Err(Error::CertificateSearchFailed(format!(
                "no tree-adapted cyclic order leaves {p} unbalanced"
            )))
        }
    }
}

/// Adds `scale * psi_i`-weighting: `w(i-j) = w(i-k) = 1/2`, `w(j-k) = -1/2`.
fn add_psi_weighting(w: &mut Weighting, i: usize, j: usize, k: usize, scale: &Rational) -> Result<()> {
    let half = ratio(1, 2) * scale;
    w.add_to(i, j, &half)?;
    w.add_to(i, k, &half)?;
    w.add_to(j, k, &-half)
}

/// Builds and self-checks a certificate that `family(problem)` is an
/// effective boundary combination.
pub fn certify_effective(
    problem: &DegreeProblem,
    family: Family,
    options: &CertifyOptions,
) -> Result<EffectivityCertificate> {
    let n = problem.n();
    let m = problem.modulus();
    if family == Family::E && m < 3 {
        return Err(Error::ModulusTooSmall(m));
    }
    if family == Family::E && (options.avoid_tree.is_some() || options.positive_on.is_some()) {
        return Err(Error::UnsupportedOptionCombo(
            "tree avoidance and forced positivity are available for family D only".into(),
        ));
    }
    let option_sizes = [
        options.avoid_tree.as_ref().map(|t| t.n()),
        options.positive_on.as_ref().map(|p| p.n()),
    ];
    if let Some(s) = option_sizes.into_iter().flatten().find(|&s| s != n) {
        return Err(Error::AmbientMismatch { left: n, right: s });
    }
    let (reduced, reduction) = reduce_degrees(problem)?;

    let (local, sigma) = match family {
        Family::D => {
            let sigma = sigma_for_options(&reduced, &reduction, options)?;
            (standard_weighting(&reduced, &sigma)?, Some(sigma))
        }
        Family::E => (inductive_weighting(&reduced)?, None),
    };
    let mut weighting = local.embed(&reduction.kept, n)?;
    if family == Family::E {
        let (j, k) = (reduction.kept[0], reduction.kept[1]);
        for &i in &reduction.dropped {
            add_psi_weighting(&mut weighting, i, j, k, &Rational::from_integer(m.into()))?;
        }
    }

    let mut claims = Vec::new();
    if reduction.dropped.is_empty() {
        claims.extend([Claim::P1, Claim::P2]);
        if family == Family::E {
            claims.push(Claim::P3);
        }
    }
    if options.avoid_tree.is_some() {
        claims.push(Claim::Avoidance);
    }
    if options.positive_on.is_some() {
        claims.push(Claim::Positivity);
    }

    let class = family_class(family, problem)?;
    let coefficients = crate::weighting::rewrite_to_boundary(&class, &weighting)?;
    let cert = EffectivityCertificate {
        problem: problem.clone(),
        family,
        sigma: sigma.map(|s| s.sequence().iter().map(|&l| reduction.kept[l - 1]).collect()),
        weighting,
        boundary_coefficients: coefficients.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        options: options.clone(),
        claims,
    };
    let verdict = verify_certificate(&cert);
    if !verdict.accepted() {
        return Err(Error::CertificateSearchFailed(format!(
            "generated certificate failed verification: {}",
            verdict.failures[0]
        )));
    }
    Ok(cert)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Failure {
    Malformed(String),
    FlowMismatch {
        vertex: usize,
        expected: Rational,
        actual: Rational,
    },
    NegativeCoefficient {
        partition: ProperPartition,
        value: Rational,
    },
    CoefficientMismatch {
        partition: ProperPartition,
        stored: Rational,
        recomputed: Rational,
    },
    AvoidanceViolated {
        partition: ProperPartition,
        value: Rational,
    },
    PositivityViolated {
        partition: ProperPartition,
        value: Rational,
    },
    ClaimViolated {
        claim: Claim,
        detail: String,
    },
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = format_rational;
        match self {
            Failure::Malformed(s) => write!(f, "Malformed: {s}"),
            Failure::FlowMismatch {
                vertex,
                expected,
                actual,
            } => write!(
                f,
                "FlowMismatch at vertex {vertex}: expected {}, got {}",
                r(expected),
                r(actual)
            ),
            Failure::NegativeCoefficient { partition, value } => {
                write!(f, "NegativeCoefficient on {partition}: {}", r(value))
            }
            Failure::CoefficientMismatch {
                partition,
                stored,
                recomputed,
            } => write!(
                f,
                "CoefficientMismatch on {partition}: stored {}, recomputed {}",
                r(stored),
                r(recomputed)
            ),
            Failure::AvoidanceViolated { partition, value } => {
                write!(f, "AvoidanceViolated on {partition}: {}", r(value))
            }
            Failure::PositivityViolated { partition, value } => {
                write!(f, "PositivityViolated on {partition}: {}", r(value))
            }
            Failure::ClaimViolated { claim, detail } => write!(f, "ClaimViolated {claim}: {detail}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Verdict {
    pub failures: Vec<Failure>,
}

impl Verdict {
    pub fn accepted(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Recomputes the class, every flow and every coefficient from the degree
/// data and the weighting alone; stored coefficients are only compared.
pub fn verify_certificate(cert: &EffectivityCertificate) -> Verdict {
    let mut failures = Vec::new();
    let problem = &cert.problem;
    let n = problem.n();
    let m = problem.modulus();
    let class = match family_class(cert.family, problem) {
        Ok(c) => c,
        Err(e) => {
            return Verdict {
                failures: vec![Failure::Malformed(e.to_string())],
            }
        }
    };
    if cert.weighting.n() != n {
        failures.push(Failure::Malformed(format!(
            "weighting on {} points for a problem on {n}",
            cert.weighting.n()
        )));
        return Verdict { failures };
    }
    for i in 1..=n {
        let actual = cert.weighting.vertex_flow(i).expect("vertex in range");
        if &actual != class.psi(i) {
            failures.push(Failure::FlowMismatch {
                vertex: i,
                expected: class.psi(i).clone(),
                actual,
            });
        }
    }

    let recomputed: Vec<(ProperPartition, Rational)> = proper_masks(n)
        .into_par_iter()
        .map(|mask| {
            let p = ProperPartition::from_mask(mask, n).expect("proper mask");
            let c = cert.weighting.mask_flow(mask) - class.b(&p);
            (p, c)
        })
        .collect();
    let by_partition: BTreeMap<ProperPartition, Rational> = recomputed.iter().cloned().collect();
    for (p, c) in &recomputed {
        if c.is_negative() {
            failures.push(Failure::NegativeCoefficient {
                partition: *p,
                value: c.clone(),
            });
        }
        let stored = cert
            .boundary_coefficients
            .get(p)
            .cloned()
            .unwrap_or_else(Rational::zero);
        if &stored != c {
            failures.push(Failure::CoefficientMismatch {
                partition: *p,
                stored,
                recomputed: c.clone(),
            });
        }
    }
    for p in cert.boundary_coefficients.keys() {
        if p.n() != n {
            failures.push(Failure::Malformed(format!(
                "coefficient on {p} has the wrong ambient size"
            )));
        }
    }

    let claims = &cert.claims;
    if claims.contains(&Claim::Avoidance) {
        match &cert.options.avoid_tree {
            None => failures.push(Failure::ClaimViolated {
                claim: Claim::Avoidance,
                detail: "no tree recorded".into(),
            }),
            Some(t) => {
                for p in t.nodes() {
                    match by_partition.get(p) {
                        Some(c) if c.is_zero() => {}
                        Some(c) => failures.push(Failure::AvoidanceViolated {
                            partition: *p,
                            value: c.clone(),
                        }),
                        None => failures.push(Failure::Malformed(format!(
                            "tree partition {p} has the wrong ambient size"
                        ))),
                    }
                }
            }
        }
    }
    if claims.contains(&Claim::Positivity) {
        match &cert.options.positive_on {
            None => failures.push(Failure::ClaimViolated {
                claim: Claim::Positivity,
                detail: "no partition recorded".into(),
            }),
            Some(p) => match by_partition.get(p) {
                Some(c) if c.is_positive() => {}
                Some(c) => failures.push(Failure::PositivityViolated {
                    partition: *p,
                    value: c.clone(),
                }),
                None => failures.push(Failure::Malformed(format!(
                    "partition {p} has the wrong ambient size"
                ))),
            },
        }
    }

    let property_claims: Vec<Claim> = claims
        .iter()
        .copied()
        .filter(|c| matches!(c, Claim::P1 | Claim::P2 | Claim::P3))
        .collect();
    if !property_claims.is_empty() {
        check_property_claims(cert, &property_claims, m, &mut failures);
    }
    Verdict { failures }
}

fn check_property_claims(
    cert: &EffectivityCertificate,
    claims: &[Claim],
    m: i64,
    failures: &mut Vec<Failure>,
) {
    let residues: Vec<i64> = cert.problem.degrees().iter().map(|&d| modp(d, m)).collect();
    if residues.contains(&0) {
        for &claim in claims {
            failures.push(Failure::ClaimViolated {
                claim,
                detail: "(P1)-(P3) are only defined when every residue is nonzero".into(),
            });
        }
        return;
    }
    let report = match DegreeProblem::new(residues, m).and_then(|p| verify_p123(&cert.weighting, &p)) {
        Ok(r) => r,
        Err(e) => {
            failures.push(Failure::Malformed(e.to_string()));
            return;
        }
    };
    let r = format_rational;
    if claims.contains(&Claim::P1) {
        for (v, e, a) in &report.p1_violations {
            failures.push(Failure::ClaimViolated {
                claim: Claim::P1,
                detail: format!("vertex {v}: expected {}, got {}", r(e), r(a)),
            });
        }
    }
    if claims.contains(&Claim::P2) {
        for (p, b, a) in &report.p2_violations {
            failures.push(Failure::ClaimViolated {
                claim: Claim::P2,
                detail: format!("{p}: flow {} below {}", r(a), r(b)),
            });
        }
    }
    if claims.contains(&Claim::P3) {
        for (p, b, a) in &report.p3_violations {
            failures.push(Failure::ClaimViolated {
                claim: Claim::P3,
                detail: format!("{p}: flow {} below {}", r(a), r(b)),
            });
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct WeightEntry {
    edge: [usize; 2],
    value: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct CoefficientEntry {
    block: Vec<usize>,
    coeff: String,
}

#[derive(Debug, Default, Serialize, Deserialize)]
struct OptionsFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    avoid_tree: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    positive_on: Option<Vec<usize>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CertificateFile {
    version: u32,
    n: usize,
    m: i64,
    degrees: Vec<i64>,
    family: Family,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sigma: Option<Vec<usize>>,
    weights: Vec<WeightEntry>,
    coefficients: Vec<CoefficientEntry>,
    #[serde(default)]
    options: OptionsFile,
    #[serde(default)]
    claims: Vec<Claim>,
}

impl EffectivityCertificate {
    pub fn to_json(&self) -> String {
        let file = CertificateFile {
            version: 1,
            n: self.problem.n(),
            m: self.problem.modulus(),
            degrees: self.problem.degrees().to_vec(),
            family: self.family,
            sigma: self.sigma.clone(),
            weights: self
                .weighting
                .edges()
                .filter(|(_, _, v)| !v.is_zero())
                .map(|(i, j, v)| WeightEntry {
                    edge: [i, j],
                    value: format_rational(v),
                })
                .collect(),
            coefficients: self
                .boundary_coefficients
                .iter()
                .map(|(p, c)| CoefficientEntry {
                    block: p.block(),
                    coeff: format_rational(c),
                })
                .collect(),
            options: OptionsFile {
                avoid_tree: self
                    .options
                    .avoid_tree
                    .as_ref()
                    .map(|t| t.nodes().iter().map(|p| p.block()).collect()),
                positive_on: self.options.positive_on.as_ref().map(|p| p.block()),
            },
            claims: self.claims.clone(),
        };
        serde_json::to_string_pretty(&file).expect("certificate serializes")
    }

    /// Parses the file format. Structural problems are errors; mathematical
    /// ones are left for [`verify_certificate`].
    pub fn from_json(s: &str) -> Result<Self> {
        let f: CertificateFile = serde_json::from_str(s)?;
        if f.version != 1 {
            return Err(Error::Parse(format!(
                "unsupported certificate version {}",
                f.version
            )));
        }
        if f.degrees.len() != f.n {
            return Err(Error::Parse(format!(
                "n = {} but {} degrees given",
                f.n,
                f.degrees.len()
            )));
        }
        let problem = DegreeProblem::new(f.degrees, f.m)?;
        let n = f.n;
        let mut weighting = Weighting::zero(n);
        let mut seen = std::collections::BTreeSet::new();
        for e in f.weights {
            let [i, j] = e.edge;
            if i >= j || !seen.insert((i, j)) {
                return Err(Error::Parse(format!("bad or repeated edge [{i}, {j}]")));
            }
            weighting.set(i, j, parse_rational(&e.value)?)?;
        }
        let mut coefficients = BTreeMap::new();
        for c in f.coefficients {
            let p = ProperPartition::new(&c.block, n)?;
            if coefficients.insert(p, parse_rational(&c.coeff)?).is_some() {
                return Err(Error::Parse(format!("partition {p} listed twice")));
            }
        }
        if let Some(sigma) = &f.sigma {
            let mask = vec_to_mask(sigma, n)?;
            if mask.count_ones() as usize != sigma.len() {
                return Err(Error::Parse("sigma repeats a point".into()));
            }
        }
        let options = CertifyOptions {
            avoid_tree: f
                .options
                .avoid_tree
                .map(|blocks| StableTree::from_blocks(&blocks, n))
                .transpose()?,
            positive_on: f
                .options
                .positive_on
                .map(|b| ProperPartition::new(&b, n))
                .transpose()?,
        };
        Ok(EffectivityCertificate {
            problem,
            family: f.family,
            sigma: f.sigma,
            weighting,
            boundary_coefficients: coefficients,
            options,
            claims: f.claims,
        })
    }
}
