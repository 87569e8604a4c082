//! Sampling analysis: α-vector, fundamental matrix, the joint determinant
//! test, brute-force rank oracles, factorization identities and degree
//! metrics.

pub mod degree;
pub mod factorization;
pub mod fundamental;
pub mod oracle;
pub mod sequence;

pub use degree::{
    degree_from_vectors, degree_metrics, degree_metrics_observability, frame_vectors,
    DegreeMetrics,
};
pub use factorization::{verify_factorizations, FactorizationCheck};
pub use fundamental::{
    fundamental_matrix, joint_test, joint_test_with, FundamentalMatrix, JointTest,
    ADMISSIBILITY_TOL,
};
pub use oracle::{bruteforce_controllability_matrix, bruteforce_observability_matrix, has_full_rank};
pub use sequence::{alphas, AlphaVector, SamplingSequence};

use crate::error::Result;
use crate::lti::{check_minimality, Minimality, SystemSpec};

#[derive(Debug, Clone)]
pub struct AnalysisReport {
    pub alphas: AlphaVector,
    pub joint: JointTest,
    pub minimality: Minimality,
    /// Present for minimal systems only.
    pub degree: Option<DegreeMetrics>,
    /// Present for minimal systems only.
    pub factors: Option<FactorizationCheck>,
}

impl AnalysisReport {
    pub fn determinant(&self) -> f64 {
        self.joint.determinant
    }

    /// The determinant verdict on the sampling sequence alone.
    pub fn is_admissible(&self) -> bool {
        self.joint.admissible
    }

    pub fn condition_number(&self) -> f64 {
        self.joint.condition_number
    }
}

/// Runs the joint test on `seq` and, for minimal systems, the degree metrics
/// and factorization identities.
pub fn analyze(spec: &SystemSpec, seq: &SamplingSequence, tolerance: f64) -> Result<AnalysisReport> {
    let av = alphas(seq);
    let fm = fundamental_matrix(spec.eigen(), &av)?;
    let joint = joint_test_with(&fm, tolerance);
    let minimality = check_minimality(spec);
    let (degree, factors) = if minimality.minimal {
        (Some(degree_metrics(spec, &av)?), Some(verify_factorizations(spec, &av)?))
    } else {
        (None, None)
    };
    Ok(AnalysisReport { alphas: av, joint, minimality, degree, factors })
}
