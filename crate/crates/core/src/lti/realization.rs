use nalgebra::{DMatrix, DVector, RowDVector};

use super::eigen::coefficients_from_roots;
use super::system::{markov_from_modes, SystemSpec};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RealizationKind {
    ObservabilityCanonical,
    ControllabilityCanonical,
    General,
}

/// State-space triple `ẋ = Ax + bu, y = cx`.
#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    pub c: RowDVector<f64>,
    pub kind: RealizationKind,
}

impl Realization {
    pub fn general(a: DMatrix<f64>, b: DVector<f64>, c: RowDVector<f64>) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n || b.len() != n || c.len() != n || n == 0 {
            return Err(Error::InvalidEigenStructure(format!(
                "inconsistent realization shapes: A {}x{}, b {}, c {}",
                a.nrows(),
                a.ncols(),
                b.len(),
                c.len()
            )));
        }
        Ok(Self { a, b, c, kind: RealizationKind::General })
    }

    pub fn order(&self) -> usize {
        self.a.nrows()
    }
}

/// Bottom-companion `A` with last row `(−a_n, …, −a₁)`, `b = (h₁, …, h_n)ᵀ`,
/// `c = (1, 0, …, 0)`.
pub fn observability_canonical(spec: &SystemSpec) -> Realization {
    let n = spec.order();
    let coeffs = coefficients_from_roots(spec.eigen());
    let mut a = DMatrix::zeros(n, n);
    for i in 0..n - 1 {
        a[(i, i + 1)] = 1.0;
    }
    for j in 0..n {
        a[(n - 1, j)] = -coeffs[n - 1 - j];
    }
    let b = markov_from_modes(spec);
    let mut c = RowDVector::zeros(n);
    c[0] = 1.0;
    Realization { a, b, c, kind: RealizationKind::ObservabilityCanonical }
}

/// Dual of [`observability_canonical`]: `A_co = A_obᵀ`, `b_co = c_obᵀ`, `c_co = b_obᵀ`.
pub fn controllability_canonical(spec: &SystemSpec) -> Realization {
    let ob = observability_canonical(spec);
    Realization {
        a: ob.a.transpose(),
        b: ob.c.transpose(),
        c: ob.b.transpose(),
        kind: RealizationKind::ControllabilityCanonical,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lti::eigen::{EigenStructure, Root};

    fn sine() -> SystemSpec {
        let es = EigenStructure::new(vec![Root::complex(0.0, 1.0, 1), Root::complex(0.0, -1.0, 1)])
            .unwrap();
        SystemSpec::from_markov(es, &[0.0, 1.0]).unwrap()
    }

    #[test]
    fn harmonic_oscillator_forms() {
        let ob = observability_canonical(&sine());
        assert_eq!(ob.a, DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]));
        assert!((ob.b[0]).abs() < 1e-15 && (ob.b[1] - 1.0).abs() < 1e-15);
        assert_eq!(ob.c.as_slice(), &[1.0, 0.0]);

        let co = controllability_canonical(&sine());
        assert_eq!(co.a, DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]));
        assert_eq!(co.b.as_slice(), &[1.0, 0.0]);
        assert!((co.c[1] - 1.0).abs() < 1e-15);
        assert_eq!(co.a, ob.a.transpose());
    }

    #[test]
    fn first_order_forms_coincide() {
        let es = EigenStructure::new(vec![Root::real(-1.0, 1)]).unwrap();
        let spec = SystemSpec::from_markov(es, &[1.0]).unwrap();
        let ob = observability_canonical(&spec);
        let co = controllability_canonical(&spec);
        assert_eq!(ob.a, DMatrix::from_element(1, 1, -1.0));
        assert_eq!((ob.a.clone(), ob.b.clone()), (co.a.clone(), co.b.clone()));
        assert_eq!(ob.c.as_slice(), co.c.as_slice());
    }

    #[test]
    fn general_shape_check() {
        let a = DMatrix::<f64>::identity(2, 2);
        assert!(Realization::general(a.clone(), DVector::zeros(3), RowDVector::zeros(2)).is_err());
        let r = Realization::general(a, DVector::zeros(2), RowDVector::zeros(2)).unwrap();
        assert_eq!(r.kind, RealizationKind::General);
    }
}
