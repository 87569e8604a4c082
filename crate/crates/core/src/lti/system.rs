use nalgebra::DVector;
use num_complex::Complex64;

use super::eigen::{wronskian_at_zero, EigenStructure, ModeBlock};
use crate::error::{Error, Result};

/// Relative threshold under which a block's leading modal coefficient counts as zero.
pub const MINIMALITY_TOL: f64 = 1e-9;

const RESIDUE_TOL: f64 = 1e-10;

/// Complex modal coefficients `Cᵢ`, ordered root by root as listed in the
/// [`EigenStructure`], and within a root by increasing power of `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeCoefficients(pub Vec<Complex64>);

impl ModeCoefficients {
    pub fn real(values: &[f64]) -> Self {
        Self(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }
}

/// Outcome of [`check_minimality`].
#[derive(Debug, Clone, PartialEq)]
pub struct Minimality {
    pub minimal: bool,
    /// 1-based root indices whose highest-order coefficient vanishes.
    pub offending_blocks: Vec<usize>,
}

impl std::fmt::Display for Minimality {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.minimal {
            write!(f, "minimal")
        } else {
            let blocks: Vec<String> = self.offending_blocks.iter().map(|b| b.to_string()).collect();
            write!(f, "not minimal: leading coefficient vanishes in block(s) {}", blocks.join(", "))
        }
    }
}

/// A continuous-time SISO system given by its characteristic roots and the
/// modal expansion of its impulse response.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    eigen: EigenStructure,
    modes: ModeCoefficients,
    /// Coefficients on the real fundamental basis.
    real: DVector<f64>,
}

impl SystemSpec {
    pub fn new(eigen: EigenStructure, modes: ModeCoefficients) -> Result<Self> {
        if modes.0.len() != eigen.order() {
            return Err(Error::OrderMismatch { expected: eigen.order(), found: modes.0.len() });
        }
        if modes.0.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidEigenStructure("non-finite modal coefficient".into()));
        }
        let real = real_coefficients(&eigen, &modes)?;
        Ok(Self { eigen, modes, real })
    }

    /// Builds the modal form from the first `n` Markov parameters.
    pub fn from_markov(eigen: EigenStructure, markov: &[f64]) -> Result<Self> {
        let modes = modes_from_markov(&eigen, markov)?;
        Self::new(eigen, modes)
    }

    pub fn order(&self) -> usize {
        self.eigen.order()
    }

    pub fn eigen(&self) -> &EigenStructure {
        &self.eigen
    }

    pub fn modes(&self) -> &ModeCoefficients {
        &self.modes
    }

    /// Coefficients of `h(t)` on the real fundamental basis.
    pub fn real_coefficients(&self) -> &DVector<f64> {
        &self.real
    }

    /// Coordinates of `h` on the real Jordan frame functions (real coefficient
    /// divided by the frame scaling).
    pub fn jordan_coordinates(&self) -> DVector<f64> {
        let d = self.eigen.jordan_scaling();
        DVector::from_iterator(self.order(), self.real.iter().zip(d).map(|(r, s)| r / s))
    }
}

fn real_coefficients(es: &EigenStructure, modes: &ModeCoefficients) -> Result<DVector<f64>> {
    let c = modes.as_slice();
    let scale = c.iter().map(|v| v.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let offsets = es.root_offsets();
    let mut out = DVector::zeros(es.order());
    for (b, &off) in es.blocks().iter().zip(es.block_offsets()) {
        match *b {
            ModeBlock::Real { multiplicity, root, .. } => {
                for k in 0..multiplicity {
                    let v = c[offsets[root] + k];
                    if v.im.abs() > RESIDUE_TOL * scale {
                        return Err(Error::ComplexResponse { residue: v.im.abs() });
                    }
                    out[off + k] = v.re;
                }
            }
            ModeBlock::Oscillatory { multiplicity, upper, lower, .. } => {
                for k in 0..multiplicity {
                    let u = c[offsets[upper] + k];
                    let l = c[offsets[lower] + k];
                    let residue = (u - l.conj()).norm();
                    if residue > RESIDUE_TOL * scale {
                        return Err(Error::ComplexResponse { residue });
                    }
                    let u = (u + l.conj()) / 2.0;
                    out[off + 2 * k] = 2.0 * u.re;
                    out[off + 2 * k + 1] = -2.0 * u.im;
                }
            }
        }
    }
    Ok(out)
}

fn modes_from_real(es: &EigenStructure, real: &DVector<f64>) -> ModeCoefficients {
    let offsets = es.root_offsets();
    let mut c = vec![Complex64::new(0.0, 0.0); es.order()];
    for (b, &off) in es.blocks().iter().zip(es.block_offsets()) {
        match *b {
            ModeBlock::Real { multiplicity, root, .. } => {
                for k in 0..multiplicity {
                    c[offsets[root] + k] = Complex64::new(real[off + k], 0.0);
                }
            }
            ModeBlock::Oscillatory { multiplicity, upper, lower, .. } => {
                for k in 0..multiplicity {
                    let v = Complex64::new(real[off + 2 * k] / 2.0, -real[off + 2 * k + 1] / 2.0);
                    c[offsets[upper] + k] = v;
                    c[offsets[lower] + k] = v.conj();
                }
            }
        }
    }
    ModeCoefficients(c)
}

/// `h(t) = Σ Cᵢ φᵢ(t)`, evaluated on the complex modal form.
pub fn impulse_response(spec: &SystemSpec, t: f64) -> Result<f64> {
    let es = spec.eigen();
    let c = spec.modes().as_slice();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut magnitude = 0.0;
    for (r, &off) in es.roots().iter().zip(es.root_offsets()) {
        let e = (r.value * t).exp();
        for k in 0..r.multiplicity {
            let term = c[off + k] * e * t.powi(k as i32);
            magnitude += term.norm();
            sum += term;
        }
    }
    if sum.im.abs() > RESIDUE_TOL * (1.0 + magnitude) {
        return Err(Error::ComplexResponse { residue: sum.im.abs() });
    }
    Ok(sum.re)
}

/// Markov parameters `h_{i+1} = h^{(i)}(0)`, `i = 0..n`.
pub fn markov_from_modes(spec: &SystemSpec) -> DVector<f64> {
    wronskian_at_zero(spec.eigen()) * spec.real_coefficients()
}

/// Inverse of [`markov_from_modes`].
pub fn modes_from_markov(es: &EigenStructure, markov: &[f64]) -> Result<ModeCoefficients> {
    if markov.len() != es.order() {
        return Err(Error::OrderMismatch { expected: es.order(), found: markov.len() });
    }
    let w = wronskian_at_zero(es);
    let real = w
        .lu()
        .solve(&DVector::from_column_slice(markov))
        .ok_or(Error::SingularWronskian)?;
    Ok(modes_from_real(es, &real))
}

pub fn check_minimality(spec: &SystemSpec) -> Minimality {
    let c = spec.modes().as_slice();
    let scale = c.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let es = spec.eigen();
    let offending_blocks: Vec<usize> = es
        .roots()
        .iter()
        .zip(es.root_offsets())
        .enumerate()
        .filter(|(_, (r, &off))| c[off + r.multiplicity - 1].norm() <= MINIMALITY_TOL * scale)
        .map(|(j, _)| j + 1)
        .collect();
    Minimality { minimal: offending_blocks.is_empty(), offending_blocks }
}
