use thiserror::Error;

use crate::design::DesignResult;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid eigenstructure: {0}")]
    InvalidEigenStructure(String),

    #[error("invalid sampling sequence: {0}")]
    InvalidSequence(String),

    #[error("expected {expected} values for a system of order {expected}, found {found}")]
    OrderMismatch { expected: usize, found: usize },

    #[error("root finding failed: {0}")]
    RootFinding(String),

    #[error("impulse response has imaginary residue {residue:e}; conjugate coefficients are inconsistent")]
    ComplexResponse { residue: f64 },

    #[error("system is not minimal: highest-order coefficient vanishes in block(s) {blocks:?}")]
    NonMinimal { blocks: Vec<usize> },

    #[error("Wronskian of the fundamental basis at zero is singular")]
    SingularWronskian,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("controllability matrix is singular (condition number {condition_number:e})")]
    Singular { condition_number: f64 },

    #[error("observation system is rank deficient (smallest singular value {smallest_singular_value:e})")]
    RankDeficient { smallest_singular_value: f64 },

    #[error("geometric design failed: {0}")]
    Geometry(String),

    #[error("no admissible sampling sequence found on the search grid (best normalized gram determinant {:e})", .best.metric.normalized_gram_det)]
    NoAdmissibleDesign { best: Box<DesignResult> },

    #[error("sampling sequence needs a final instant for the controllability leg")]
    MissingFinalInstant,

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("internal error: {0}")]
    Internal(String),
}
