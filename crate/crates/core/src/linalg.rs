//! Dense linear-algebra helpers shared by the analysis and simulation code.

use nalgebra::{DMatrix, DVector};

/// Numerical rank threshold on `σ_min / σ_max`.
pub const RANK_TOL: f64 = 1e-8;

/// Singular values in descending order.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// `σ_max / σ_min`; infinite for an exactly singular matrix.
pub fn condition_number(m: &DMatrix<f64>) -> f64 {
    let s = singular_values(m);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        _ => f64::INFINITY,
    }
}

/// Number of singular values above `rel * σ_max`.
pub fn numerical_rank(m: &DMatrix<f64>, rel: f64) -> usize {
    let s = singular_values(m);
    let Some(&hi) = s.first() else { return 0 };
    if hi == 0.0 {
        return 0;
    }
    s.iter().filter(|&&v| v > rel * hi).count()
}

pub fn determinant(m: &DMatrix<f64>) -> f64 {
    m.clone().full_piv_lu().determinant()
}

/// Failure of [`solve_full_rank`]: the matrix is numerically singular.
#[derive(Debug, Clone, Copy)]
pub struct RankFailure {
    pub smallest_singular_value: f64,
    pub condition_number: f64,
}

/// Solves a square system through the SVD, refusing when `σ_min/σ_max ≤ rel`.
pub fn solve_full_rank(
    m: &DMatrix<f64>,
    rhs: &DVector<f64>,
    rel: f64,
) -> Result<DVector<f64>, RankFailure> {
    let svd = m.clone().svd(true, true);
    let s = &svd.singular_values;
    let hi = s.max();
    let lo = s.min();
    if !(hi > 0.0) || lo <= rel * hi {
        return Err(RankFailure {
            smallest_singular_value: lo,
            condition_number: if lo > 0.0 { hi / lo } else { f64::INFINITY },
        });
    }
    svd.solve(rhs, 0.0).map_err(|_| RankFailure {
        smallest_singular_value: lo,
        condition_number: hi / lo,
    })
}

/// Product of the Euclidean norms of the rows (Hadamard bound on `|det|`).
pub fn row_norm_product(m: &DMatrix<f64>) -> f64 {
    m.row_iter().map(|r| r.norm()).product()
}
