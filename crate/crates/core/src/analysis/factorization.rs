//! Factorization of the reachability and observability determinants through
//! the fundamental-matrix determinant.
//!
//! In the real Jordan frame, `[Y₀ … Y_{n−1}] = H(y₀)·Ψᵀ` where `Ψ[m][j]` are
//! the frame functions at `α_m` and `H(y₀)` is block-diagonal with
//! anti-triangular Hankel blocks built from `y₀`. Since `Ψ = Φ·diag(d)`,
//! both identities hold up to the constant `Π d_j / N₁ = (−1)^{#sine terms}`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::degree::frame_vectors;
use super::fundamental::fundamental_matrix;
use super::sequence::AlphaVector;
use crate::error::{Error, Result};
use crate::linalg;
use crate::lti::{check_minimality, EigenStructure, LinearModel, ModeBlock, SystemSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FactorizationCheck {
    /// `det[exp(Jα_m)·y₀]`.
    pub lhs_ctrl: f64,
    /// `N₁·N₂·det[φᵢ(α_m)]`.
    pub rhs_ctrl: f64,
    /// `det[cB·exp(Jα_m)]`.
    pub lhs_obs: f64,
    /// `M₁·M₂·det[φᵢ(α_m)]`.
    pub rhs_obs: f64,
    pub n1: f64,
    pub n2: f64,
    pub m1: f64,
    pub m2: f64,
    /// Expected value of both `lhs / rhs` ratios for the real basis.
    pub basis_constant: f64,
}

impl FactorizationCheck {
    pub fn ratio_ctrl(&self) -> f64 {
        self.lhs_ctrl / self.rhs_ctrl
    }

    pub fn ratio_obs(&self) -> f64 {
        self.lhs_obs / self.rhs_obs
    }
}

/// Block-diagonal matrix of anti-triangular Hankel blocks in the entries of
/// `y₀`; for pairs each entry is the 2×2 cell `[[p, q], [q, −p]]`.
pub fn hankel_factor(es: &EigenStructure, y0: &DVector<f64>) -> DMatrix<f64> {
    let n = es.order();
    let mut h = DMatrix::zeros(n, n);
    for (b, &off) in es.blocks().iter().zip(es.block_offsets()) {
        match *b {
            ModeBlock::Real { multiplicity: m, .. } => {
                for r in 0..m {
                    for j in 0..m - r {
                        h[(off + r, off + j)] = y0[off + r + j];
                    }
                }
            }
            ModeBlock::Oscillatory { multiplicity: m, .. } => {
                for r in 0..m {
                    for j in 0..m - r {
                        let cell = off + 2 * (r + j);
                        let (p, q) = (y0[cell], y0[cell + 1]);
                        let (row, col) = (off + 2 * r, off + 2 * j);
                        h[(row, col)] = p;
                        h[(row, col + 1)] = q;
                        h[(row + 1, col)] = q;
                        h[(row + 1, col + 1)] = -p;
                    }
                }
            }
        }
    }
    h
}

fn block_identity_det(es: &EigenStructure) -> f64 {
    es.blocks()
        .iter()
        .map(|b| linalg::determinant(&DMatrix::identity(b.dim(), b.dim())))
        .product()
}

pub fn verify_factorizations(spec: &SystemSpec, av: &AlphaVector) -> Result<FactorizationCheck> {
    let minimality = check_minimality(spec);
    if !minimality.minimal {
        return Err(Error::NonMinimal { blocks: minimality.offending_blocks });
    }
    let es = spec.eigen();
    let n = es.order();
    let det_phi = linalg::determinant(&fundamental_matrix(es, av)?.matrix);
    let n1 = es.factorial_factor();
    let m1 = n1;

    let co = LinearModel::controllability(spec)?;
    let y0 = &co.jordan.y0;
    let ys = frame_vectors(es, y0, av);
    let lhs_ctrl = linalg::determinant(&DMatrix::from_columns(&ys));
    let n2 = linalg::determinant(&hankel_factor(es, y0));

    let ob = LinearModel::observability(spec)?;
    let cb = &ob.realization.c * &ob.jordan.basis;
    let mut rows = DMatrix::zeros(n, n);
    for (m, &a) in av.as_slice().iter().enumerate() {
        rows.set_row(m, &(&cb * ob.jordan.exp(a)));
    }
    let lhs_obs = linalg::determinant(&rows);
    let m2 = block_identity_det(es);

    let basis_constant = if es.sine_count().is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(FactorizationCheck {
        lhs_ctrl,
        rhs_ctrl: n1 * n2 * det_phi,
        lhs_obs,
        rhs_obs: m1 * m2 * det_phi,
        n1,
        n2,
        m1,
        m2,
        basis_constant,
    })
}
