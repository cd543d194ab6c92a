//! Exact Picard-class arithmetic on the moduli space of stable pointed
//! rational curves, together with generators and verifiers of certificates
//! that exhibit the divisor families `D(d, m)` and `E(d, m)` as nonnegative
//! combinations of boundary divisors.
//!
//! A certificate is an edge weighting of the complete graph on the marked
//! points. Its flow through each vertex must equal the `psi` coefficient of
//! the class, and the flow across each proper partition minus the boundary
//! coefficient `b_P` gives the coefficient `c_P` of the boundary
//! representative. The class is effective when every `c_P >= 0`.

pub mod certify;
pub mod class;
pub mod divisors;
pub mod error;
pub mod fcurves;
pub mod grid;
pub mod inductive;
pub mod keel;
mod linalg;
pub mod partition;
pub mod problem;
pub mod rational;
pub mod report;
pub mod standard;
pub mod tree;
pub mod weighting;

pub use certify::{certify_effective, verify_certificate, CertifyOptions, EffectivityCertificate};
pub use class::DivisorClass;
pub use divisors::{Family, Reduction};
pub use error::{Error, Result};
pub use fcurves::FCurve;
pub use partition::ProperPartition;
pub use problem::{DegreeProblem, ModRep};
pub use rational::Rational;
pub use standard::CyclicOrder;
pub use tree::StableTree;
pub use weighting::Weighting;
