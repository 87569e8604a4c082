//! Sampling-schedule synthesis. Each method is a [`DesignStrategy`] held in a
//! [`StrategyRegistry`] and looked up by name, or picked automatically from
//! the shape of the eigenstructure.

pub mod closed_form;
pub mod generic;
pub mod geometric;

use std::fmt;

use serde::Serialize;

use crate::analysis::{alphas, degree_metrics, DegreeMetrics, SamplingSequence};
use crate::error::{Error, Result};
use crate::lti::{check_minimality, ModeBlock, SystemSpec};

pub use closed_form::{optimal_interval_second_order, ClosedFormSecond};
pub use generic::{design_sequence_generic, GenericSearch, SearchBounds};
pub use geometric::{
    next_instant_third_order, spiral_point, write_planar_csv, BranchCandidate, GeometricThird, GeometryTrace, Spiral,
    DEFAULT_M_MAX,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DesignMethod {
    ClosedFormSecond,
    GeometricThird,
    GenericSearch,
}

impl DesignMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            DesignMethod::ClosedFormSecond => "closed-form-2nd",
            DesignMethod::GeometricThird => "geometric-3rd",
            DesignMethod::GenericSearch => "generic-search",
        }
    }
}

impl fmt::Display for DesignMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignResult {
    pub sequence: SamplingSequence,
    pub metric: DegreeMetrics,
    pub method: DesignMethod,
    /// Number of extra half-turns (closed form) or full turns (geometric).
    pub branch: Option<u32>,
}

/// Inputs shared by all strategies; each one reads what it needs.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignRequest {
    pub t0: f64,
    /// Second instant for the geometric step; defaults to a quarter turn.
    pub t1: Option<f64>,
    /// Branch of the closed form.
    pub branch: u32,
    pub m_max: u32,
    pub bounds: SearchBounds,
}

impl DesignRequest {
    pub fn new(t0: f64) -> Self {
        Self { t0, t1: None, branch: 0, m_max: DEFAULT_M_MAX, bounds: SearchBounds::default() }
    }
}

#[derive(Debug, Clone)]
pub struct DesignOutcome {
    pub result: DesignResult,
    pub trace: Option<GeometryTrace>,
}

pub trait DesignStrategy: Send + Sync {
    /// Registry key, also accepted by `--method`.
    fn name(&self) -> &'static str;

    /// Short aliases accepted on the command line.
    fn aliases(&self) -> &'static [&'static str] {
        &[]
    }

    fn method(&self) -> DesignMethod;

    /// Whether automatic dispatch should pick this strategy for `spec`.
    fn supports(&self, spec: &SystemSpec) -> bool;

    fn design(&self, spec: &SystemSpec, request: &DesignRequest) -> Result<DesignOutcome>;
}

pub struct StrategyRegistry {
    strategies: Vec<Box<dyn DesignStrategy>>,
}

impl Default for StrategyRegistry {
    fn default() -> Self {
        Self::with_defaults()
    }
}

impl StrategyRegistry {
    pub fn empty() -> Self {
        Self { strategies: Vec::new() }
    }

    /// Closed form, geometric step and generic search, in dispatch priority.
    pub fn with_defaults() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(ClosedFormSecond));
        r.register(Box::new(GeometricThird));
        r.register(Box::new(GenericSearch));
        r
    }

    /// Later registrations take lower dispatch priority; a strategy with an
    /// existing name replaces the old one in place.
    pub fn register(&mut self, strategy: Box<dyn DesignStrategy>) {
        match self.strategies.iter().position(|s| s.name() == strategy.name()) {
            Some(i) => self.strategies[i] = strategy,
            None => self.strategies.push(strategy),
        }
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.strategies.iter().map(|s| s.name()).collect()
    }

    pub fn get(&self, name: &str) -> Option<&dyn DesignStrategy> {
        self.strategies
            .iter()
            .find(|s| s.name() == name || s.aliases().contains(&name))
            .map(|s| s.as_ref())
    }

    pub fn auto(&self, spec: &SystemSpec) -> Option<&dyn DesignStrategy> {
        self.strategies.iter().find(|s| s.supports(spec)).map(|s| s.as_ref())
    }

    /// Runs the strategy named `method`, or the automatic choice for `"auto"`.
    pub fn design(&self, method: &str, spec: &SystemSpec, request: &DesignRequest) -> Result<DesignOutcome> {
        let strategy = if method == "auto" {
            self.auto(spec)
                .ok_or_else(|| Error::Unsupported("no registered design method accepts this system".into()))?
        } else {
            self.get(method).ok_or_else(|| {
                Error::Unsupported(format!(
                    "unknown design method '{method}' (available: auto, {})",
                    self.names().join(", ")
                ))
            })?
        };
        strategy.design(spec, request)
    }
}

/// The metric a design result carries, recomputed from its sequence.
pub fn sequence_metric(spec: &SystemSpec, seq: &SamplingSequence) -> Result<DegreeMetrics> {
    degree_metrics(spec, &alphas(seq))
}

pub(crate) fn require_minimal(spec: &SystemSpec) -> Result<()> {
    let m = check_minimality(spec);
    if m.minimal {
        Ok(())
    } else {
        Err(Error::NonMinimal { blocks: m.offending_blocks })
    }
}

/// `(a, b)` of a system whose only block is a simple conjugate pair.
pub(crate) fn simple_pair(spec: &SystemSpec) -> Option<(f64, f64)> {
    match spec.eigen().blocks() {
        [ModeBlock::Oscillatory { re, im, multiplicity: 1, .. }] => Some((*re, *im)),
        _ => None,
    }
}

/// `(λ, a, b)` of a system with one simple real root and one simple pair.
pub(crate) fn real_and_pair(spec: &SystemSpec) -> Option<(f64, f64, f64)> {
    let mut lambda = None;
    let mut pair = None;
    for b in spec.eigen().blocks() {
        match *b {
            ModeBlock::Real { lambda: l, multiplicity: 1, .. } => lambda = Some(l),
            ModeBlock::Oscillatory { re, im, multiplicity: 1, .. } => pair = Some((re, im)),
            _ => return None,
        }
    }
    match (spec.eigen().blocks().len(), lambda, pair) {
        (2, Some(l), Some((a, b))) => Some((l, a, b)),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lti::{EigenStructure, ModeCoefficients, Root};
    use num_complex::Complex64;

    fn pair(a: f64, b: f64) -> SystemSpec {
        let es = EigenStructure::new(vec![Root::complex(a, b, 1), Root::complex(a, -b, 1)]).unwrap();
        SystemSpec::from_markov(es, &[0.0, 1.0]).unwrap()
    }

    fn third(lambda: f64, a: f64, b: f64) -> SystemSpec {
        let es = EigenStructure::new(vec![
            Root::real(lambda, 1),
            Root::complex(a, b, 1),
            Root::complex(a, -b, 1),
        ])
        .unwrap();
        let c = vec![Complex64::new(1.0, 0.0), Complex64::new(0.5, -0.25), Complex64::new(0.5, 0.25)];
        SystemSpec::new(es, ModeCoefficients(c)).unwrap()
    }

    #[test]
    fn auto_dispatch_by_shape() {
        let reg = StrategyRegistry::with_defaults();
        assert_eq!(reg.auto(&pair(0.0, 1.0)).unwrap().method(), DesignMethod::ClosedFormSecond);
        assert_eq!(reg.auto(&third(-1.0, -0.3, 1.0)).unwrap().method(), DesignMethod::GeometricThird);
        assert_eq!(reg.auto(&third(-1.0, 0.0, 1.0)).unwrap().method(), DesignMethod::GenericSearch);
        let es = EigenStructure::new(vec![Root::real(-1.0, 2)]).unwrap();
        let spec = SystemSpec::new(es, ModeCoefficients::real(&[1.0, 1.0])).unwrap();
        assert_eq!(reg.auto(&spec).unwrap().method(), DesignMethod::GenericSearch);
    }

    #[test]
    fn lookup_by_name_and_alias() {
        let reg = StrategyRegistry::with_defaults();
        assert_eq!(reg.names(), vec!["closed-form-2nd", "geometric-3rd", "generic-search"]);
        for (name, m) in [
            ("closed", DesignMethod::ClosedFormSecond),
            ("geometric", DesignMethod::GeometricThird),
            ("generic-search", DesignMethod::GenericSearch),
        ] {
            assert_eq!(reg.get(name).unwrap().method(), m);
        }
        assert!(reg.get("simplex").is_none());
        let err = reg.design("simplex", &pair(0.0, 1.0), &DesignRequest::new(0.0)).unwrap_err();
        assert!(matches!(err, Error::Unsupported(_)));
    }

    #[test]
    fn geometric_on_undamped_pair_is_rejected() {
        let reg = StrategyRegistry::with_defaults();
        let err = reg.design("geometric", &third(-1.0, 0.0, 1.0), &DesignRequest::new(0.0)).unwrap_err();
        assert!(matches!(err, Error::Unsupported(_)), "{err}");
    }

    #[test]
    fn results_carry_their_own_metric() {
        let reg = StrategyRegistry::with_defaults();
        for spec in [pair(-0.2, 1.3), third(-0.7, 0.4, 1.1)] {
            for m in ["auto", "generic"] {
                let out = reg.design(m, &spec, &DesignRequest::new(2.0)).unwrap();
                let again = sequence_metric(&spec, &out.result.sequence).unwrap();
                assert_eq!(out.result.metric, again);
            }
        }
    }
}
