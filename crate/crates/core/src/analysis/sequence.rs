use crate::error::{Error, Result};

/// Strictly increasing sampling instants `t₀ < … < t_{n−1}`, optionally
/// followed by a final instant `t_n` used by the controllability leg.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingSequence {
    instants: Vec<f64>,
    final_instant: Option<f64>,
}

impl SamplingSequence {
    pub fn new(instants: Vec<f64>, final_instant: Option<f64>) -> Result<Self> {
        if instants.is_empty() {
            return Err(Error::InvalidSequence("no sampling instants".into()));
        }
        if instants.iter().chain(final_instant.iter()).any(|t| !t.is_finite()) {
            return Err(Error::InvalidSequence("non-finite sampling instant".into()));
        }
        for (i, w) in instants.windows(2).enumerate() {
            if w[1] <= w[0] {
                return Err(Error::InvalidSequence(format!(
                    "instants must be strictly increasing (t{} = {} ≥ t{} = {})",
                    i,
                    w[0],
                    i + 1,
                    w[1]
                )));
            }
        }
        if let Some(tn) = final_instant {
            let last = *instants.last().unwrap();
            if tn <= last {
                return Err(Error::InvalidSequence(format!(
                    "final instant {tn} must follow the last instant {last}"
                )));
            }
        }
        Ok(Self { instants, final_instant })
    }

    /// `t₀, t₀ + T₁, t₀ + T₁ + T₂, …` from interval lengths.
    pub fn from_intervals(t0: f64, intervals: &[f64], final_interval: Option<f64>) -> Result<Self> {
        let mut instants = Vec::with_capacity(intervals.len() + 1);
        let mut t = t0;
        instants.push(t);
        for &dt in intervals {
            t += dt;
            instants.push(t);
        }
        Self::new(instants, final_interval.map(|dt| t + dt))
    }

    pub fn len(&self) -> usize {
        self.instants.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instants.is_empty()
    }

    pub fn instants(&self) -> &[f64] {
        &self.instants
    }

    pub fn final_instant(&self) -> Option<f64> {
        self.final_instant
    }

    /// `T_{i+1} = t_{i+1} − t_i` between the regular instants.
    pub fn intervals(&self) -> Vec<f64> {
        self.instants.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn shifted(&self, offset: f64) -> Result<Self> {
        Self::new(
            self.instants.iter().map(|t| t + offset).collect(),
            self.final_instant.map(|t| t + offset),
        )
    }

    pub fn with_final_instant(&self, tn: f64) -> Result<Self> {
        Self::new(self.instants.clone(), Some(tn))
    }
}

/// Backward differences `α_m = t_{n−1} − t_{n−m−1}`; `α₀ = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaVector(Vec<f64>);

impl AlphaVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.first() != Some(&0.0) {
            return Err(Error::InvalidSequence("α₀ must be 0".into()));
        }
        if values.windows(2).any(|w| !(w[1] > w[0])) || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSequence("α must be finite and strictly increasing".into()));
        }
        Ok(Self(values))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub fn alphas(seq: &SamplingSequence) -> AlphaVector {
    let t = seq.instants();
    let last = t[t.len() - 1];
    AlphaVector((0..t.len()).map(|m| last - t[t.len() - 1 - m]).collect())
}
