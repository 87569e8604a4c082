//! Complex pair `a ± jb`: the two frame vectors are a rotation by `bα` apart,
//! so they are orthogonal exactly when `bα` is an odd multiple of `π/2`.

use std::f64::consts::PI;

use nalgebra::DVector;

use super::{require_minimal, sequence_metric, simple_pair, DesignMethod, DesignOutcome, DesignRequest, DesignResult, DesignStrategy};
use crate::analysis::{degree_from_vectors, SamplingSequence};
use crate::error::{Error, Result};
use crate::lti::{jordan_exp, EigenStructure, Root, SystemSpec};

/// Two instants `t₀, t₀ + (2m+1)π/(2b)`.
pub fn optimal_interval_second_order(a: f64, b: f64, t0: f64, m: u32) -> Result<DesignResult> {
    if !(b > 0.0) || !b.is_finite() {
        return Err(Error::InvalidEigenStructure(format!("imaginary part must be positive, got {b}")));
    }
    if !a.is_finite() || !t0.is_finite() {
        return Err(Error::InvalidEigenStructure("non-finite parameter".into()));
    }
    let alpha = (2 * m + 1) as f64 * PI / (2.0 * b);
    let sequence = SamplingSequence::new(vec![t0, t0 + alpha], None)?;
    let es = EigenStructure::new(vec![Root::complex(a, b, 1), Root::complex(a, -b, 1)])?;
    let y0 = DVector::from_vec(vec![1.0, 0.0]);
    let metric = degree_from_vectors(&[y0.clone(), jordan_exp(&es, alpha) * y0])?;
    Ok(DesignResult { sequence, metric, method: DesignMethod::ClosedFormSecond, branch: Some(m) })
}

pub struct ClosedFormSecond;

impl DesignStrategy for ClosedFormSecond {
    fn name(&self) -> &'static str {
        "closed-form-2nd"
    }

    fn aliases(&self) -> &'static [&'static str] {
        &["closed"]
    }

    fn method(&self) -> DesignMethod {
        DesignMethod::ClosedFormSecond
    }

    fn supports(&self, spec: &SystemSpec) -> bool {
        simple_pair(spec).is_some()
    }

    fn design(&self, spec: &SystemSpec, request: &DesignRequest) -> Result<DesignOutcome> {
        let (a, b) = simple_pair(spec).ok_or_else(|| {
            Error::Unsupported("the closed form needs a 2nd-order system with one complex pair".into())
        })?;
        require_minimal(spec)?;
        let mut result = optimal_interval_second_order(a, b, request.t0, request.branch)?;
        result.metric = sequence_metric(spec, &result.sequence)?;
        Ok(DesignOutcome { result, trace: None })
    }
}
