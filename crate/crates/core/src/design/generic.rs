//! Greedy sequential search for any order: each new interval is picked on a
//! grid to maximize the Gram determinant of the frame vectors so far. One
//! pass of coordinate ascent follows: each interval is rescanned on the grid
//! with the others held fixed, then polished by golden section within a
//! grid step.
//!
//! The uniform schedule at the midpoint period is refined the same way and
//! kept if it ends up better, so the result never loses to it.

use nalgebra::DVector;

use super::{require_minimal, sequence_metric, DesignMethod, DesignOutcome, DesignRequest, DesignResult, DesignStrategy};
use crate::analysis::{degree_from_vectors, frame_vectors, AlphaVector, SamplingSequence};
use crate::error::{Error, Result};
use crate::lti::{LinearModel, SystemSpec};

/// Below this normalized Gram determinant a design is reported as failed.
pub const DESIGN_FLOOR: f64 = 1e-16;

const GOLDEN_ITERATIONS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchBounds {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Default for SearchBounds {
    fn default() -> Self {
        Self { min: 0.05, max: 3.0, steps: 600 }
    }
}

impl SearchBounds {
    fn validate(&self) -> Result<()> {
        if !(self.min > 0.0 && self.min.is_finite() && self.max.is_finite() && self.max >= self.min) {
            return Err(Error::InvalidSequence(format!(
                "search bounds must satisfy 0 < Δmin ≤ Δmax, got [{}, {}]",
                self.min, self.max
            )));
        }
        if self.steps == 0 {
            return Err(Error::InvalidSequence("search needs at least one grid point".into()));
        }
        Ok(())
    }

    fn grid_step(&self) -> f64 {
        if self.steps < 2 { 0.0 } else { (self.max - self.min) / (self.steps - 1) as f64 }
    }

    fn grid(&self) -> impl Iterator<Item = f64> + '_ {
        let h = self.grid_step();
        (0..self.steps).map(move |j| if j + 1 == self.steps { self.max } else { self.min + h * j as f64 })
    }
}

struct Objective<'a> {
    spec: &'a SystemSpec,
    y0: DVector<f64>,
}

impl Objective<'_> {
    /// Normalized Gram determinant of the vectors for `t₀, t₀ + T₁, …`.
    fn gram(&self, intervals: &[f64]) -> f64 {
        let mut alphas = Vec::with_capacity(intervals.len() + 1);
        alphas.push(0.0);
        let mut acc = 0.0;
        for &dt in intervals.iter().rev() {
            acc += dt;
            alphas.push(acc);
        }
        let Ok(av) = AlphaVector::new(alphas) else { return 0.0 };
        degree_from_vectors(&frame_vectors(self.spec.eigen(), &self.y0, &av))
            .map(|m| m.normalized_gram_det)
            .unwrap_or(0.0)
    }

    fn greedy(&self, bounds: &SearchBounds, n: usize) -> Vec<f64> {
        let mut intervals = Vec::with_capacity(n.saturating_sub(1));
        for _ in 1..n {
            let mut best = (f64::NEG_INFINITY, bounds.min);
            for dt in bounds.grid() {
                intervals.push(dt);
                let g = self.gram(&intervals);
                intervals.pop();
                if g > best.0 {
                    best = (g, dt);
                }
            }
            intervals.push(best.1);
        }
        intervals
    }

    fn refine(&self, bounds: &SearchBounds, intervals: &mut [f64]) -> f64 {
        let h = bounds.grid_step();
        let mut current = self.gram(intervals);
        if h == 0.0 {
            return current;
        }
        let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
        for i in 0..intervals.len() {
            let mut centre = intervals[i];
            for dt in bounds.grid() {
                intervals[i] = dt;
                let g = self.gram(intervals);
                if g > current {
                    current = g;
                    centre = dt;
                }
            }
            intervals[i] = centre;
            let (mut lo, mut hi) = ((centre - h).max(bounds.min), (centre + h).min(bounds.max));
            let eval = |x: f64, iv: &mut [f64]| {
                iv[i] = x;
                self.gram(iv)
            };
            let mut x1 = hi - inv_phi * (hi - lo);
            let mut x2 = lo + inv_phi * (hi - lo);
            let mut f1 = eval(x1, intervals);
            let mut f2 = eval(x2, intervals);
            for _ in 0..GOLDEN_ITERATIONS {
                if f1 >= f2 {
                    hi = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = hi - inv_phi * (hi - lo);
                    f1 = eval(x1, intervals);
                } else {
                    lo = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = lo + inv_phi * (hi - lo);
                    f2 = eval(x2, intervals);
                }
            }
            let (x, f) = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
            if f > current {
                intervals[i] = x;
                current = f;
            } else {
                intervals[i] = centre;
            }
        }
        current
    }
}

pub fn design_sequence_generic(spec: &SystemSpec, t0: f64, bounds: &SearchBounds) -> Result<DesignResult> {
    bounds.validate()?;
    if !t0.is_finite() {
        return Err(Error::InvalidSequence(format!("t₀ must be finite, got {t0}")));
    }
    require_minimal(spec)?;
    let model = LinearModel::controllability(spec)?;
    let objective = Objective { spec, y0: model.jordan.y0.clone() };
    let n = spec.order();

    let mut greedy = objective.greedy(bounds, n);
    let g_greedy = objective.refine(bounds, &mut greedy);
    let mut uniform = vec![0.5 * (bounds.min + bounds.max); n - 1];
    let g_uniform = objective.refine(bounds, &mut uniform);
    let intervals = if g_uniform > g_greedy { uniform } else { greedy };

    let sequence = SamplingSequence::from_intervals(t0, &intervals, None)?;
    let metric = sequence_metric(spec, &sequence)?;
    let result = DesignResult { sequence, metric, method: DesignMethod::GenericSearch, branch: None };
    if !(metric.normalized_gram_det >= DESIGN_FLOOR) {
        return Err(Error::NoAdmissibleDesign { best: Box::new(result) });
    }
    Ok(result)
}

pub struct GenericSearch;

impl DesignStrategy for GenericSearch {
    fn name(&self) -> &'static str {
        "generic-search"
    }

    fn aliases(&self) -> &'static [&'static str] {
        &["generic"]
    }

    fn method(&self) -> DesignMethod {
        DesignMethod::GenericSearch
    }

    fn supports(&self, _spec: &SystemSpec) -> bool {
        true
    }

    fn design(&self, spec: &SystemSpec, request: &DesignRequest) -> Result<DesignOutcome> {
        let result = design_sequence_generic(spec, request.t0, &request.bounds)?;
        Ok(DesignOutcome { result, trace: None })
    }
}
