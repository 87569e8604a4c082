//! Third-order step for one real root `λ` and one pair `a ± jb`.
//!
//! The curve `Y(α) = (e^{aα}cos bα, e^{aα}sin bα, e^{λα})` lies on the
//! surface of revolution `z = (x² + y²)^{λ/2a}`. Given `Y₀ = Y(0)` and
//! `Y₁ = Y(t₁ − t₀)`, the next instant puts the XY-projection of `Y₂` in the
//! direction of `Y₀ × Y₁`, and among those turns picks the one whose height
//! best matches the point where `Y₀ × Y₁` meets the surface.
//!
//! Offsets here are measured forward from `t₀`. The rotation angle is taken
//! from `P₀`, the projection of `Y₀`; measuring from `P₁` instead is an
//! equally plausible reading that this module does not implement.

use std::f64::consts::PI;
use std::io::Write;

use nalgebra::{DVector, Vector2, Vector3};

use super::{real_and_pair, require_minimal, sequence_metric, DesignMethod, DesignOutcome, DesignRequest, DesignResult, DesignStrategy};
use crate::analysis::{degree_from_vectors, DegreeMetrics, SamplingSequence};
use crate::error::{Error, Result};
use crate::format::number;
use crate::lti::SystemSpec;

pub const DEFAULT_M_MAX: u32 = 8;

const SPIRAL_POINTS: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spiral {
    pub lambda: f64,
    pub a: f64,
    pub b: f64,
}

impl Spiral {
    pub fn from_spec(spec: &SystemSpec) -> Result<Self> {
        let (lambda, a, b) = real_and_pair(spec).ok_or_else(|| {
            Error::Unsupported(
                "the geometric step needs a 3rd-order system with one simple real root and one simple complex pair"
                    .into(),
            )
        })?;
        Ok(Self { lambda, a, b })
    }

    pub fn point(&self, alpha: f64) -> Vector3<f64> {
        let r = (self.a * alpha).exp();
        let (s, c) = (self.b * alpha).sin_cos();
        Vector3::new(r * c, r * s, (self.lambda * alpha).exp())
    }

    /// `λ/2a`; `None` when `a = 0`.
    pub fn surface_exponent(&self) -> Option<f64> {
        (self.a != 0.0).then(|| self.lambda / (2.0 * self.a))
    }

    /// `z − (x² + y²)^{λ/2a}`.
    pub fn surface_residual(&self, p: &Vector3<f64>) -> Option<f64> {
        self.surface_exponent().map(|k| p.z - (p.x * p.x + p.y * p.y).powf(k))
    }
}

pub fn spiral_point(spec: &SystemSpec, alpha: f64) -> Result<Vector3<f64>> {
    Ok(Spiral::from_spec(spec)?.point(alpha))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchCandidate {
    pub m: u32,
    pub alpha: f64,
    pub instant: f64,
    /// `|z(Q₂) − e^{λα}|`.
    pub mismatch: f64,
    /// Whether the candidate instant follows `t₁`.
    pub feasible: bool,
}

#[derive(Debug, Clone)]
pub struct GeometryTrace {
    pub spiral: Spiral,
    /// Sampled curve `(α, Y(α))`.
    pub points: Vec<(f64, Vector3<f64>)>,
    /// Forward offsets of `Y₀, Y₁, Y₂` from `t₀`.
    pub alphas: [f64; 3],
    pub vectors: [Vector3<f64>; 3],
    /// `P₀, P₁` are projections of `Y₀, Y₁`; `P₂` of the oriented `Y₀ × Y₁`.
    pub projections: [Vector2<f64>; 3],
    /// Oriented `Y₀ × Y₁` (positive z-component).
    pub cross: Vector3<f64>,
    pub mu: f64,
    pub q2: Vector3<f64>,
    /// Counterclockwise angle from `P₀` to `P₂`, in `[0, 2π)`.
    pub rotation: f64,
    pub surface_exponent: f64,
    pub candidates: Vec<BranchCandidate>,
    pub chosen: u32,
    /// Metrics of `Y₀, Y₁, Y₂` themselves.
    pub frame_metric: DegreeMetrics,
}

impl GeometryTrace {
    /// Projection angle of `Y₂` minus that of `P₂`, wrapped to `(−π, π]`.
    pub fn angle_error(&self) -> f64 {
        let y2 = self.vectors[2];
        let p2 = self.projections[2];
        let d = y2.y.atan2(y2.x) - p2.y.atan2(p2.x);
        let w = d.rem_euclid(2.0 * PI);
        if w > PI { w - 2.0 * PI } else { w }
    }

    /// CSV with columns `alpha, x, y, z, kind`; `alpha` is empty for `P₂` and
    /// `Q₂`, which are not points of the curve.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let csv_err = |e: csv::Error| Error::Internal(format!("CSV export failed: {e}"));
        w.write_record(["alpha", "x", "y", "z", "kind"]).map_err(csv_err)?;
        let mut row = |alpha: Option<f64>, p: Vector3<f64>, kind: &str| {
            let alpha = alpha.map(number).unwrap_or_default();
            w.write_record([alpha, number(p.x), number(p.y), number(p.z), kind.to_string()])
        };
        for &(alpha, p) in &self.points {
            row(Some(alpha), p, "spiral").map_err(csv_err)?;
        }
        for (i, (&a, &v)) in self.alphas.iter().zip(&self.vectors).enumerate() {
            row(Some(a), v, &format!("Y{i}")).map_err(csv_err)?;
        }
        for (i, p) in self.projections.iter().enumerate() {
            let alpha = (i < 2).then(|| self.alphas[i]);
            row(alpha, Vector3::new(p.x, p.y, 0.0), &format!("P{i}")).map_err(csv_err)?;
        }
        row(None, self.q2, "Q2").map_err(csv_err)?;
        w.flush()?;
        Ok(())
    }
}

/// Picks `t₂` for the sequence `t₀ < t₁` among `t₀ + (M + 2πm)/b`,
/// `m = 0..=m_max`, keeping only candidates after `t₁`.
pub fn next_instant_third_order(
    spec: &SystemSpec,
    t0: f64,
    t1: f64,
    m_max: u32,
) -> Result<(DesignResult, GeometryTrace)> {
    let spiral = Spiral::from_spec(spec)?;
    let Spiral { lambda, a, b } = spiral;
    let k = spiral.surface_exponent().ok_or_else(|| {
        Error::Unsupported(
            "the geometric step is undefined for an undamped pair (a = 0): the surface exponent λ/2a does not exist; use the generic search".into(),
        )
    })?;
    if (lambda - a).abs() <= 1e-12 * (1.0 + a.abs()) {
        return Err(Error::Geometry(
            "λ = a makes the surface a cone through the origin; Y₀ × Y₁ meets it nowhere or everywhere".into(),
        ));
    }
    if !(t0.is_finite() && t1.is_finite() && t1 > t0) {
        return Err(Error::InvalidSequence(format!("need t₀ < t₁, got t₀ = {t0}, t₁ = {t1}")));
    }
    require_minimal(spec)?;

    let alpha1 = t1 - t0;
    let y0 = spiral.point(0.0);
    let y1 = spiral.point(alpha1);
    let mut cross = y0.cross(&y1);
    if cross.norm() <= 1e-12 * y0.norm() * y1.norm() {
        return Err(Error::Geometry("Y₀ and Y₁ are parallel; there is no orthogonal direction".into()));
    }
    if cross.z < 0.0 {
        cross = -cross;
    }
    let p0 = Vector2::new(y0.x, y0.y);
    let p1 = Vector2::new(y1.x, y1.y);
    let p2 = Vector2::new(cross.x, cross.y);
    let rho = p2.norm();
    if cross.z <= 1e-12 * cross.norm() {
        return Err(Error::Geometry(
            "Y₀ × Y₁ is horizontal (b·(t₁ − t₀) is a multiple of π); it never reaches the surface".into(),
        ));
    }
    if rho <= 1e-12 * cross.norm() {
        return Err(Error::Geometry("Y₀ × Y₁ is vertical; its projection has no direction".into()));
    }

    let rotation = (p2.y.atan2(p2.x) - p0.y.atan2(p0.x)).rem_euclid(2.0 * PI);
    // μ·cross on the surface: μ z_c = (μ² ρ²)^k.
    let ln_mu = (2.0 * k * rho.ln() - cross.z.ln()) / (1.0 - 2.0 * k);
    let mu = ln_mu.exp();
    let q2 = cross * mu;
    let target = (k * (2.0 * ln_mu + 2.0 * rho.ln())).exp();

    let candidates: Vec<BranchCandidate> = (0..=m_max)
        .map(|m| {
            let alpha = (rotation + 2.0 * PI * m as f64) / b;
            BranchCandidate {
                m,
                alpha,
                instant: t0 + alpha,
                mismatch: (target - (lambda * alpha).exp()).abs(),
                feasible: alpha > alpha1,
            }
        })
        .collect();
    let mut best: Option<&BranchCandidate> = None;
    for c in candidates.iter().filter(|c| c.feasible) {
        if best.is_none_or(|b| c.mismatch < b.mismatch) {
            best = Some(c);
        }
    }
    let best = *best.ok_or_else(|| {
        Error::Geometry(format!("no candidate turn m ≤ {m_max} places t₂ after t₁ = {t1}"))
    })?;

    let y2 = spiral.point(best.alpha);
    let sequence = SamplingSequence::new(vec![t0, t1, best.instant], None)?;
    let metric = sequence_metric(spec, &sequence)?;
    let dv = |v: Vector3<f64>| DVector::from_column_slice(v.as_slice());
    let frame_metric = degree_from_vectors(&[dv(y0), dv(y1), dv(y2)])?;

    let span = best.alpha * 1.05;
    let points = (0..SPIRAL_POINTS)
        .map(|i| {
            let alpha = span * i as f64 / (SPIRAL_POINTS - 1) as f64;
            (alpha, spiral.point(alpha))
        })
        .collect();

    let trace = GeometryTrace {
        spiral,
        points,
        alphas: [0.0, alpha1, best.alpha],
        vectors: [y0, y1, y2],
        projections: [p0, p1, p2],
        cross,
        mu,
        q2,
        rotation,
        surface_exponent: k,
        candidates,
        chosen: best.m,
        frame_metric,
    };
    let result = DesignResult { sequence, metric, method: DesignMethod::GeometricThird, branch: Some(best.m) };
    Ok((result, trace))
}

/// Planar counterpart for a lone pair `a ± jb`: the curve
/// `e^{aα}(cos bα, sin bα, 0)` and the vectors at the given forward offsets,
/// in the same CSV layout as [`GeometryTrace::write_csv`].
pub fn write_planar_csv<W: Write>(a: f64, b: f64, offsets: &[f64], out: W) -> Result<()> {
    let point = |alpha: f64| {
        let r = (a * alpha).exp();
        let (s, c) = (b * alpha).sin_cos();
        (r * c, r * s)
    };
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::Internal(format!("CSV export failed: {e}"));
    w.write_record(["alpha", "x", "y", "z", "kind"]).map_err(csv_err)?;
    let span = offsets.iter().copied().fold(2.0 * PI / b, f64::max) * 1.05;
    for i in 0..SPIRAL_POINTS {
        let alpha = span * i as f64 / (SPIRAL_POINTS - 1) as f64;
        let (x, y) = point(alpha);
        w.write_record([number(alpha), number(x), number(y), "0".into(), "spiral".into()]).map_err(csv_err)?;
    }
    for (i, &alpha) in offsets.iter().enumerate() {
        let (x, y) = point(alpha);
        w.write_record([number(alpha), number(x), number(y), "0".into(), format!("Y{i}")]).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub struct GeometricThird;

impl DesignStrategy for GeometricThird {
    fn name(&self) -> &'static str {
        "geometric-3rd"
    }

    fn aliases(&self) -> &'static [&'static str] {
        &["geometric"]
    }

    fn method(&self) -> DesignMethod {
        DesignMethod::GeometricThird
    }

    fn supports(&self, spec: &SystemSpec) -> bool {
        matches!(real_and_pair(spec), Some((l, a, _)) if a != 0.0 && (l - a).abs() > 1e-12 * (1.0 + a.abs()))
    }

    fn design(&self, spec: &SystemSpec, request: &DesignRequest) -> Result<DesignOutcome> {
        let spiral = Spiral::from_spec(spec)?;
        let t1 = request.t1.unwrap_or(request.t0 + PI / (2.0 * spiral.b));
        let (result, trace) = next_instant_third_order(spec, request.t0, t1, request.m_max)?;
        Ok(DesignOutcome { result, trace: Some(trace) })
    }
}
