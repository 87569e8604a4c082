//! Brute-force reachability and observability matrices built directly from
//! the state-space solution, independent of the fundamental matrix.

use nalgebra::DMatrix;

use super::sequence::{AlphaVector, SamplingSequence};
use crate::error::{Error, Result};
use crate::linalg::{self, RANK_TOL};
use crate::lti::LinearModel;

/// `[G_{n−1}, …, G₀]` with `G_i = exp(A(t_n − t_i))·b`: the state reached at
/// `t_n` from a unit impulse at `t_i`.
pub fn bruteforce_controllability_matrix(
    model: &LinearModel,
    seq: &SamplingSequence,
) -> Result<DMatrix<f64>> {
    let n = model.order();
    let tn = seq.final_instant().ok_or(Error::MissingFinalInstant)?;
    if seq.len() != n {
        return Err(Error::OrderMismatch { expected: n, found: seq.len() });
    }
    let b = &model.realization.b;
    let mut g = DMatrix::zeros(n, n);
    for (col, &ti) in seq.instants().iter().rev().enumerate() {
        g.set_column(col, &(model.transition_matrix(tn - ti) * b));
    }
    Ok(g)
}

/// Rows `c·exp(Aα_m)`.
pub fn bruteforce_observability_matrix(model: &LinearModel, av: &AlphaVector) -> Result<DMatrix<f64>> {
    let n = model.order();
    if av.len() != n {
        return Err(Error::OrderMismatch { expected: n, found: av.len() });
    }
    let c = &model.realization.c;
    let mut o = DMatrix::zeros(n, n);
    for (m, &alpha) in av.as_slice().iter().enumerate() {
        o.set_row(m, &(c * model.transition_matrix(alpha)));
    }
    Ok(o)
}

/// Full rank at the shared relative singular-value threshold.
pub fn has_full_rank(m: &DMatrix<f64>) -> bool {
    linalg::numerical_rank(m, RANK_TOL) == m.nrows().min(m.ncols())
}
