//! Real Jordan frame of the canonical realizations and the closed-form
//! exponential `exp(Jt)`.
//!
//! Frame coordinate functions are the first rows of `exp(Jt)`: `t^k/k! e^{λt}`
//! for a real root, and the interleaved `t^k/k! e^{at} cos(bt)`,
//! `−t^k/k! e^{at} sin(bt)` for a pair `a ± jb`. The change of basis is never
//! obtained from a numerical eigendecomposition:
//!
//! * observability form: `B` is the Wronskian of the frame functions at zero
//!   (a confluent Vandermonde matrix), so `c·B` is the block indicator row;
//! * controllability form: `B = K⁻¹` with `K = [z, Jz, …, J^{n−1}z]` and `z`
//!   the frame coordinates of `h`, so `B⁻¹b = z` and `c·B` is again the block
//!   indicator row.

use nalgebra::{DMatrix, DVector, RowDVector};

use super::eigen::{wronskian_at_zero, EigenStructure, ModeBlock};
use super::realization::{
    controllability_canonical, observability_canonical, Realization, RealizationKind,
};
use super::system::{check_minimality, SystemSpec};
use crate::error::{Error, Result};
use crate::linalg;

/// Condition number of `B` above which a warning is attached.
pub const ILL_CONDITIONED: f64 = 1e12;

/// Block-diagonal real Jordan matrix of the eigenstructure.
pub fn jordan_matrix(es: &EigenStructure) -> DMatrix<f64> {
    let n = es.order();
    let mut j = DMatrix::zeros(n, n);
    for (b, &off) in es.blocks().iter().zip(es.block_offsets()) {
        match *b {
            ModeBlock::Real { lambda, multiplicity, .. } => {
                for k in 0..multiplicity {
                    j[(off + k, off + k)] = lambda;
                    if k + 1 < multiplicity {
                        j[(off + k, off + k + 1)] = 1.0;
                    }
                }
            }
            ModeBlock::Oscillatory { re, im, multiplicity, .. } => {
                for k in 0..multiplicity {
                    let p = off + 2 * k;
                    j[(p, p)] = re;
                    j[(p, p + 1)] = -im;
                    j[(p + 1, p)] = im;
                    j[(p + 1, p + 1)] = re;
                    if k + 1 < multiplicity {
                        j[(p, p + 2)] = 1.0;
                        j[(p + 1, p + 3)] = 1.0;
                    }
                }
            }
        }
    }
    j
}

/// Closed-form `exp(Jt)`: finite nilpotent series per Jordan block, times a
/// rotation-scaling cell for complex pairs.
pub fn jordan_exp(es: &EigenStructure, t: f64) -> DMatrix<f64> {
    let n = es.order();
    let mut e = DMatrix::zeros(n, n);
    for (b, &off) in es.blocks().iter().zip(es.block_offsets()) {
        match *b {
            ModeBlock::Real { lambda, multiplicity, .. } => {
                let g = (lambda * t).exp();
                for r in 0..multiplicity {
                    let mut coef = g;
                    for k in r..multiplicity {
                        e[(off + r, off + k)] = coef;
                        coef *= t / (k - r + 1) as f64;
                    }
                }
            }
            ModeBlock::Oscillatory { re, im, multiplicity, .. } => {
                let g = (re * t).exp();
                let (s, c) = (im * t).sin_cos();
                for r in 0..multiplicity {
                    let mut coef = g;
                    for k in r..multiplicity {
                        let (p, q) = (off + 2 * r, off + 2 * k);
                        e[(p, q)] = coef * c;
                        e[(p, q + 1)] = -coef * s;
                        e[(p + 1, q)] = coef * s;
                        e[(p + 1, q + 1)] = coef * c;
                        coef *= t / (k - r + 1) as f64;
                    }
                }
            }
        }
    }
    e
}

/// First entry of each Jordan block set to one.
pub fn block_indicator(es: &EigenStructure) -> RowDVector<f64> {
    let mut v = RowDVector::zeros(es.order());
    for &off in es.block_offsets() {
        v[off] = 1.0;
    }
    v
}

/// Krylov matrix `[v, Jv, …, J^{n−1}v]`.
pub(crate) fn krylov(j: &DMatrix<f64>, v: &DVector<f64>) -> DMatrix<f64> {
    let n = j.nrows();
    let mut k = DMatrix::zeros(n, n);
    let mut col = v.clone();
    for i in 0..n {
        k.set_column(i, &col);
        col = j * col;
    }
    k
}

#[derive(Debug, Clone)]
pub struct RealJordanForm {
    eigen: EigenStructure,
    pub j: DMatrix<f64>,
    /// Change of basis `B`, with `A = B J B⁻¹`.
    pub basis: DMatrix<f64>,
    pub basis_inv: DMatrix<f64>,
    /// `B⁻¹ b`.
    pub y0: DVector<f64>,
    pub condition_number: f64,
    pub warning: Option<String>,
}

impl RealJordanForm {
    pub fn eigen(&self) -> &EigenStructure {
        &self.eigen
    }

    pub fn exp(&self, t: f64) -> DMatrix<f64> {
        jordan_exp(&self.eigen, t)
    }

    /// `exp(At) = B exp(Jt) B⁻¹`.
    pub fn transition_matrix(&self, t: f64) -> DMatrix<f64> {
        if t == 0.0 {
            let n = self.j.nrows();
            return DMatrix::identity(n, n);
        }
        &self.basis * self.exp(t) * &self.basis_inv
    }

    /// `B⁻¹ x`.
    pub fn to_frame(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.basis_inv * x
    }
}

pub fn real_jordan(spec: &SystemSpec, real: &Realization) -> Result<RealJordanForm> {
    let es = spec.eigen();
    let n = es.order();
    if real.order() != n {
        return Err(Error::OrderMismatch { expected: n, found: real.order() });
    }
    let j = jordan_matrix(es);
    let scaling = DMatrix::from_diagonal(&DVector::from_vec(es.jordan_scaling()));
    let (basis, basis_inv) = match real.kind {
        RealizationKind::ObservabilityCanonical => {
            let basis = wronskian_at_zero(es) * scaling;
            let inv = basis.clone().try_inverse().ok_or(Error::SingularWronskian)?;
            (basis, inv)
        }
        RealizationKind::ControllabilityCanonical => {
            let minimality = check_minimality(spec);
            if !minimality.minimal {
                return Err(Error::NonMinimal { blocks: minimality.offending_blocks });
            }
            let k = krylov(&j, &spec.jordan_coordinates());
            let basis = k.clone().try_inverse().ok_or_else(|| Error::NonMinimal {
                blocks: (1..=es.roots().len()).collect(),
            })?;
            (basis, k)
        }
        RealizationKind::General => {
            return Err(Error::Unsupported(
                "real Jordan form of a general realization (only canonical forms are handled)"
                    .into(),
            ));
        }
    };
    let y0 = &basis_inv * &real.b;
    let condition_number = linalg::condition_number(&basis);
    let warning = (condition_number > ILL_CONDITIONED).then(|| {
        format!("change of basis is ill-conditioned (condition number {condition_number:e})")
    });
    Ok(RealJordanForm { eigen: es.clone(), j, basis, basis_inv, y0, condition_number, warning })
}

/// A canonical realization together with its real Jordan frame.
#[derive(Debug, Clone)]
pub struct LinearModel {
    pub realization: Realization,
    pub jordan: RealJordanForm,
}

impl LinearModel {
    pub fn new(spec: &SystemSpec, realization: Realization) -> Result<Self> {
        let jordan = real_jordan(spec, &realization)?;
        Ok(Self { realization, jordan })
    }

    pub fn observability(spec: &SystemSpec) -> Result<Self> {
        Self::new(spec, observability_canonical(spec))
    }

    pub fn controllability(spec: &SystemSpec) -> Result<Self> {
        Self::new(spec, controllability_canonical(spec))
    }

    pub fn order(&self) -> usize {
        self.realization.order()
    }

    pub fn transition_matrix(&self, t: f64) -> DMatrix<f64> {
        self.jordan.transition_matrix(t)
    }
}
