use nalgebra::DMatrix;
use serde::Serialize;

use super::sequence::AlphaVector;
use crate::error::{Error, Result};
use crate::linalg;
use crate::lti::{evaluate_fundamental_basis, EigenStructure};

/// Default relative admissibility tolerance: `|det| > tol · Π‖row‖`.
pub const ADMISSIBILITY_TOL: f64 = 1e-9;

/// `M[m][i] = φᵢ(α_m)`.
#[derive(Debug, Clone)]
pub struct FundamentalMatrix {
    pub matrix: DMatrix<f64>,
    eigen: EigenStructure,
}

impl FundamentalMatrix {
    pub fn eigen(&self) -> &EigenStructure {
        &self.eigen
    }
}

pub fn fundamental_matrix(es: &EigenStructure, av: &AlphaVector) -> Result<FundamentalMatrix> {
    let n = es.order();
    if av.len() != n {
        return Err(Error::OrderMismatch { expected: n, found: av.len() });
    }
    let mut matrix = DMatrix::zeros(n, n);
    for (m, &alpha) in av.as_slice().iter().enumerate() {
        matrix.set_row(m, &evaluate_fundamental_basis(es, alpha).transpose());
    }
    Ok(FundamentalMatrix { matrix, eigen: es.clone() })
}

/// Determinant test on the fundamental matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JointTest {
    pub determinant: f64,
    /// Product of the row norms; the admissibility threshold is `tol` times this.
    pub scale: f64,
    pub tolerance: f64,
    pub admissible: bool,
    pub smallest_singular_value: f64,
    pub largest_singular_value: f64,
    pub condition_number: f64,
}

impl JointTest {
    pub fn threshold(&self) -> f64 {
        self.tolerance * self.scale
    }
}

pub fn joint_test(fm: &FundamentalMatrix) -> JointTest {
    joint_test_with(fm, ADMISSIBILITY_TOL)
}

pub fn joint_test_with(fm: &FundamentalMatrix, tolerance: f64) -> JointTest {
    let determinant = linalg::determinant(&fm.matrix);
    let scale = linalg::row_norm_product(&fm.matrix);
    let s = linalg::singular_values(&fm.matrix);
    let largest = s[0];
    let smallest = s[s.len() - 1];
    JointTest {
        determinant,
        scale,
        tolerance,
        admissible: determinant.abs() > tolerance * scale,
        smallest_singular_value: smallest,
        largest_singular_value: largest,
        condition_number: if smallest > 0.0 { largest / smallest } else { f64::INFINITY },
    }
}
