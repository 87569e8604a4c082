//! Degree of reachability/observability: how close the frame vectors
//! `Y_i = exp(Jα_i)·y₀` are to mutual orthogonality.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::sequence::AlphaVector;
use crate::error::{Error, Result};
use crate::lti::jordan::krylov;
use crate::lti::{jordan_exp, EigenStructure, LinearModel, ModeBlock, SystemSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DegreeMetrics {
    /// Gram determinant of the unit-normalized vectors, in `[0, 1]`.
    pub normalized_gram_det: f64,
    /// Smallest angle between a vector and the span of the others, radians.
    pub min_principal_angle: f64,
    /// Condition number of the matrix of normalized vectors.
    pub condition_number: f64,
}

impl DegreeMetrics {
    pub fn is_full_rank(&self) -> bool {
        self.condition_number.is_finite() && 1.0 / self.condition_number > crate::linalg::RANK_TOL
    }
}

/// Metrics of an arbitrary set of at most `dim` vectors.
pub fn degree_from_vectors(vectors: &[DVector<f64>]) -> Result<DegreeMetrics> {
    let Some(first) = vectors.first() else {
        return Err(Error::Internal("no vectors to measure".into()));
    };
    let dim = first.len();
    let k = vectors.len();
    if k > dim {
        return Err(Error::Internal(format!("{k} vectors in dimension {dim}")));
    }
    let mut y = DMatrix::zeros(dim, k);
    for (i, v) in vectors.iter().enumerate() {
        let norm = v.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Internal(format!("vector Y{i} has zero or non-finite norm")));
        }
        y.set_column(i, &(v / norm));
    }
    let s = y.clone().svd(false, false).singular_values;
    let gram: f64 = s.iter().map(|v| v * v).product();
    let (hi, lo) = (s.max(), s.min());
    let condition_number = if lo > 0.0 { hi / lo } else { f64::INFINITY };

    let mut min_angle = std::f64::consts::FRAC_PI_2;
    if k > 1 {
        for i in 0..k {
            let others = y.clone().remove_column(i);
            let svd = others.svd(true, false);
            let u = svd.u.unwrap();
            let top = svd.singular_values.max();
            let col = y.column(i);
            let mut projected = DVector::zeros(dim);
            for (j, &sv) in svd.singular_values.iter().enumerate() {
                if sv > f64::EPSILON * top * k as f64 {
                    let uj = u.column(j);
                    projected += uj * uj.dot(&col);
                }
            }
            let residual = (col - &projected).norm();
            min_angle = min_angle.min(residual.atan2(projected.norm()));
        }
    }
    Ok(DegreeMetrics {
        normalized_gram_det: gram.clamp(0.0, 1.0),
        min_principal_angle: min_angle,
        condition_number,
    })
}

/// `Y_i = exp(Jα_i)·y₀` for the frame vector `y₀`.
pub fn frame_vectors(es: &EigenStructure, y0: &DVector<f64>, av: &AlphaVector) -> Vec<DVector<f64>> {
    av.as_slice().iter().map(|&a| jordan_exp(es, a) * y0).collect()
}

/// Metrics on the reachability side, `y₀` being the Jordan-frame image of
/// the input vector of the controllability canonical form.
pub fn degree_metrics(spec: &SystemSpec, av: &AlphaVector) -> Result<DegreeMetrics> {
    let model = LinearModel::controllability(spec)?;
    degree_from_vectors(&frame_vectors(spec.eigen(), &model.jordan.y0, av))
}

/// Metrics from the transposed observability matrix.
///
/// The realization is taken to a Jordan frame `B̃ = [b, Ab, …]·K_f⁻¹` where
/// `B̃⁻¹b = f` has a single unit entry at the end of every block; the
/// vectors are then the columns `exp(Jᵀα_m)·(cB̃)ᵀ`. For distinct eigenvalues
/// they are an orthogonal image of the reachability vectors.
pub fn degree_metrics_observability(model: &LinearModel, av: &AlphaVector) -> Result<DegreeMetrics> {
    let es = model.jordan.eigen();
    let real = &model.realization;
    let n = es.order();
    let mut f = DVector::zeros(n);
    for (b, &off) in es.blocks().iter().zip(es.block_offsets()) {
        match *b {
            ModeBlock::Real { multiplicity, .. } => f[off + multiplicity - 1] = 1.0,
            ModeBlock::Oscillatory { multiplicity, .. } => f[off + 2 * (multiplicity - 1)] = 1.0,
        }
    }
    let kf = krylov(&model.jordan.j, &f);
    let kf_inv = kf
        .try_inverse()
        .ok_or_else(|| Error::Internal("block-end vector is not cyclic".into()))?;
    let krylov_a = krylov(&real.a, &real.b);
    let w = (&real.c * krylov_a * kf_inv).transpose();
    let vectors: Vec<DVector<f64>> =
        av.as_slice().iter().map(|&a| jordan_exp(es, a).transpose() * &w).collect();
    degree_from_vectors(&vectors)
}
