//! Characteristic roots of the homogeneous ODE and the real fundamental basis
//! built from them.
//!
//! Basis ordering is block-wise in the order roots first appear:
//!
//! * real root `λ` with multiplicity `m`: `t^k e^{λt}` for `k = 0..m`;
//! * conjugate pair `a ± jb` with multiplicity `m`: the interleaved sequence
//!   `t^k e^{at} cos(bt), t^k e^{at} sin(bt)` for `k = 0..m`.
//!
//! The pair block occupies the position of whichever conjugate is listed first.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Two roots closer than `CLUSTER_TOL * (1 + |λ|)` are one multiple root.
pub const CLUSTER_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub value: Complex64,
    pub multiplicity: usize,
}

impl Root {
    pub fn real(lambda: f64, multiplicity: usize) -> Self {
        Self { value: Complex64::new(lambda, 0.0), multiplicity }
    }

    pub fn complex(re: f64, im: f64, multiplicity: usize) -> Self {
        Self { value: Complex64::new(re, im), multiplicity }
    }
}

/// One real block of the fundamental basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModeBlock {
    Real {
        lambda: f64,
        multiplicity: usize,
        /// Index into [`EigenStructure::roots`].
        root: usize,
    },
    Oscillatory {
        re: f64,
        /// Always positive.
        im: f64,
        multiplicity: usize,
        /// Root index of `re + j·im`.
        upper: usize,
        /// Root index of `re − j·im`.
        lower: usize,
    },
}

impl ModeBlock {
    pub fn multiplicity(&self) -> usize {
        match *self {
            ModeBlock::Real { multiplicity, .. } | ModeBlock::Oscillatory { multiplicity, .. } => {
                multiplicity
            }
        }
    }

    /// Number of real basis functions contributed by the block.
    pub fn dim(&self) -> usize {
        match *self {
            ModeBlock::Real { multiplicity, .. } => multiplicity,
            ModeBlock::Oscillatory { multiplicity, .. } => 2 * multiplicity,
        }
    }

    fn eigenvalue(&self) -> Complex64 {
        match *self {
            ModeBlock::Real { lambda, .. } => Complex64::new(lambda, 0.0),
            ModeBlock::Oscillatory { re, im, .. } => Complex64::new(re, im),
        }
    }
}

/// Distinct characteristic roots with multiplicities.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenStructure {
    roots: Vec<Root>,
    blocks: Vec<ModeBlock>,
    /// Offset of each root's coefficients in a modal coefficient vector.
    root_offsets: Vec<usize>,
    /// Offset of each block in the real basis.
    block_offsets: Vec<usize>,
    order: usize,
}

impl EigenStructure {
    pub fn new(roots: Vec<Root>) -> Result<Self> {
        if roots.is_empty() {
            return Err(Error::InvalidEigenStructure("no roots given".into()));
        }
        let mut roots = roots;
        for (i, r) in roots.iter_mut().enumerate() {
            if r.multiplicity == 0 {
                return Err(Error::InvalidEigenStructure(format!(
                    "root {} has multiplicity 0",
                    i + 1
                )));
            }
            if !(r.value.re.is_finite() && r.value.im.is_finite()) {
                return Err(Error::InvalidEigenStructure(format!("root {} is not finite", i + 1)));
            }
            if r.value.im.abs() <= CLUSTER_TOL * (1.0 + r.value.norm()) {
                r.value.im = 0.0;
            }
        }
        for i in 0..roots.len() {
            for j in i + 1..roots.len() {
                let (a, b) = (roots[i].value, roots[j].value);
                let scale = 1.0 + a.norm().max(b.norm());
                if (a - b).norm() < CLUSTER_TOL * scale {
                    return Err(Error::InvalidEigenStructure(format!(
                        "roots {} and {} are closer than the clustering tolerance",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }

        let mut blocks = Vec::new();
        let mut paired = vec![false; roots.len()];
        for i in 0..roots.len() {
            if paired[i] {
                continue;
            }
            let r = roots[i];
            if r.value.im == 0.0 {
                blocks.push(ModeBlock::Real {
                    lambda: r.value.re,
                    multiplicity: r.multiplicity,
                    root: i,
                });
                paired[i] = true;
                continue;
            }
            let partner = (i + 1..roots.len())
                .filter(|&j| !paired[j])
                .min_by(|&p, &q| {
                    let dp = (roots[p].value - r.value.conj()).norm();
                    let dq = (roots[q].value - r.value.conj()).norm();
                    dp.total_cmp(&dq)
                })
                .filter(|&j| {
                    (roots[j].value - r.value.conj()).norm()
                        < CLUSTER_TOL * (1.0 + r.value.norm())
                });
            let Some(j) = partner else {
                return Err(Error::InvalidEigenStructure(format!(
                    "complex root {} has no conjugate partner",
                    i + 1
                )));
            };
            if roots[j].multiplicity != r.multiplicity {
                return Err(Error::InvalidEigenStructure(format!(
                    "conjugate roots {} and {} have different multiplicities",
                    i + 1,
                    j + 1
                )));
            }
            // exact conjugates from here on
            let (upper, lower) = if r.value.im > 0.0 { (i, j) } else { (j, i) };
            let re = r.value.re;
            let im = r.value.im.abs();
            roots[upper].value = Complex64::new(re, im);
            roots[lower].value = Complex64::new(re, -im);
            paired[i] = true;
            paired[j] = true;
            blocks.push(ModeBlock::Oscillatory { re, im, multiplicity: r.multiplicity, upper, lower });
        }

        let mut root_offsets = Vec::with_capacity(roots.len());
        let mut acc = 0;
        for r in &roots {
            root_offsets.push(acc);
            acc += r.multiplicity;
        }
        let order = acc;
        let mut block_offsets = Vec::with_capacity(blocks.len());
        let mut acc = 0;
        for b in &blocks {
            block_offsets.push(acc);
            acc += b.dim();
        }
        debug_assert_eq!(acc, order);
        Ok(Self { roots, blocks, root_offsets, block_offsets, order })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn roots(&self) -> &[Root] {
        &self.roots
    }

    pub fn blocks(&self) -> &[ModeBlock] {
        &self.blocks
    }

    pub fn block_offsets(&self) -> &[usize] {
        &self.block_offsets
    }

    pub fn root_offsets(&self) -> &[usize] {
        &self.root_offsets
    }

    pub fn has_repeated_roots(&self) -> bool {
        self.roots.iter().any(|r| r.multiplicity > 1)
    }

    /// Number of `t^k e^{at} sin(bt)` functions in the basis.
    pub fn sine_count(&self) -> usize {
        self.blocks
            .iter()
            .map(|b| match b {
                ModeBlock::Oscillatory { multiplicity, .. } => *multiplicity,
                ModeBlock::Real { .. } => 0,
            })
            .sum()
    }

    /// Diagonal scaling from the fundamental basis to the coordinate functions
    /// of the real Jordan frame: `1/k!` for real and cosine terms, `−1/k!` for
    /// sine terms.
    pub fn jordan_scaling(&self) -> Vec<f64> {
        let mut d = Vec::with_capacity(self.order);
        for b in &self.blocks {
            match *b {
                ModeBlock::Real { multiplicity, .. } => {
                    d.extend((0..multiplicity).map(|k| 1.0 / factorial(k)));
                }
                ModeBlock::Oscillatory { multiplicity, .. } => {
                    for k in 0..multiplicity {
                        d.push(1.0 / factorial(k));
                        d.push(-1.0 / factorial(k));
                    }
                }
            }
        }
        d
    }

    /// `Π_j Π_{k<m_j} 1/k!` over all (complex) roots.
    pub fn factorial_factor(&self) -> f64 {
        self.roots
            .iter()
            .map(|r| (0..r.multiplicity).map(|k| 1.0 / factorial(k)).product::<f64>())
            .product()
    }
}

pub(crate) fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// `i! / (i - k)!`, zero when `k > i`.
fn falling(i: usize, k: usize) -> f64 {
    if k > i {
        0.0
    } else {
        ((i - k + 1)..=i).map(|v| v as f64).product()
    }
}

/// `(φ₁(t), …, φ_n(t))` in the fixed real basis.
pub fn evaluate_fundamental_basis(es: &EigenStructure, t: f64) -> DVector<f64> {
    let mut out = DVector::zeros(es.order());
    for (b, &off) in es.blocks().iter().zip(es.block_offsets()) {
        match *b {
            ModeBlock::Real { lambda, multiplicity, .. } => {
                let e = (lambda * t).exp();
                for k in 0..multiplicity {
                    out[off + k] = t.powi(k as i32) * e;
                }
            }
            ModeBlock::Oscillatory { re, im, multiplicity, .. } => {
                let e = (re * t).exp();
                let (s, c) = (im * t).sin_cos();
                for k in 0..multiplicity {
                    let p = t.powi(k as i32) * e;
                    out[off + 2 * k] = p * c;
                    out[off + 2 * k + 1] = p * s;
                }
            }
        }
    }
    out
}

/// Wronskian at `t = 0`: entry `(i, j)` is `φ_j^{(i)}(0)`, computed from the
/// closed form `d^i/dt^i [t^k e^{λt}]_{t=0} = i!/(i−k)! · λ^{i−k}`.
pub fn wronskian_at_zero(es: &EigenStructure) -> DMatrix<f64> {
    let n = es.order();
    let mut w = DMatrix::zeros(n, n);
    for (b, &off) in es.blocks().iter().zip(es.block_offsets()) {
        let lambda = b.eigenvalue();
        for i in 0..n {
            for k in 0..b.multiplicity() {
                if k > i {
                    continue;
                }
                let v = lambda.powu((i - k) as u32) * falling(i, k);
                match b {
                    ModeBlock::Real { .. } => w[(i, off + k)] = v.re,
                    ModeBlock::Oscillatory { .. } => {
                        w[(i, off + 2 * k)] = v.re;
                        w[(i, off + 2 * k + 1)] = v.im;
                    }
                }
            }
        }
    }
    w
}

fn cluster_radius(size: usize) -> f64 {
    CLUSTER_TOL.max((256.0 * f64::EPSILON).powf(1.0 / size as f64))
}

fn centroid(points: &[Complex64]) -> Complex64 {
    points.iter().sum::<Complex64>() / points.len() as f64
}

/// Connected components of the graph linking points closer than
/// `radius * (1 + |p|)`.
fn single_linkage(points: &[Complex64], radius: f64) -> Vec<Vec<Complex64>> {
    let n = points.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn find(label: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while label[r] != r {
            r = label[r];
        }
        label[i] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            let scale = 1.0 + points[i].norm().max(points[j].norm());
            if (points[i] - points[j]).norm() < radius * scale {
                let (a, b) = (find(&mut label, i), find(&mut label, j));
                label[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: Vec<(usize, Vec<Complex64>)> = Vec::new();
    for (i, &p) in points.iter().enumerate() {
        let r = find(&mut label, i);
        match groups.iter_mut().find(|(l, _)| *l == r) {
            Some((_, g)) => g.push(p),
            None => groups.push((r, vec![p])),
        }
    }
    groups.into_iter().map(|(_, g)| g).collect()
}

/// Split a linked group into clusters whose members all lie within the
/// size-dependent radius of their centroid.
fn split_group(points: Vec<Complex64>) -> Vec<(Complex64, usize)> {
    let k = points.len();
    if k == 1 {
        return vec![(points[0], 1)];
    }
    let c = centroid(&points);
    let spread = points.iter().map(|p| (p - c).norm()).fold(0.0, f64::max);
    if spread <= cluster_radius(k) * (1.0 + c.norm()) {
        return vec![(c, k)];
    }
    for size in (2..k).rev() {
        let parts = single_linkage(&points, 2.0 * cluster_radius(size));
        if parts.len() > 1 {
            return parts.into_iter().flat_map(split_group).collect();
        }
    }
    points.into_iter().map(|p| (p, 1)).collect()
}

fn horner_derivative(coeffs_desc: &[f64], order: usize, s: Complex64) -> Complex64 {
    // coeffs_desc: leading coefficient first
    let deg = coeffs_desc.len() - 1;
    if order > deg {
        return Complex64::new(0.0, 0.0);
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, &c) in coeffs_desc.iter().enumerate().take(deg - order + 1) {
        let power = deg - i;
        acc = acc * s + c * falling(power, order);
    }
    acc
}

/// Roots of `s^n + a₁ s^{n−1} + … + a_n`, with clustered roots merged into
/// multiple roots.
pub fn roots_from_coefficients(a: &[f64]) -> Result<EigenStructure> {
    let n = a.len();
    if n == 0 {
        return Err(Error::InvalidEigenStructure("polynomial of degree 0".into()));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidEigenStructure("non-finite coefficient".into()));
    }
    let mut companion = DMatrix::<f64>::zeros(n, n);
    for i in 0..n - 1 {
        companion[(i, i + 1)] = 1.0;
    }
    for j in 0..n {
        companion[(n - 1, j)] = -a[n - 1 - j];
    }
    let schur = nalgebra::linalg::Schur::try_new(companion, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::RootFinding("Schur iteration did not converge".into()))?;
    let raw: Vec<Complex64> = schur.complex_eigenvalues().iter().copied().collect();

    let mut clusters = Vec::new();
    for group in single_linkage(&raw, 2.0 * cluster_radius(n.max(2))) {
        clusters.extend(split_group(group));
    }

    let mut desc = Vec::with_capacity(n + 1);
    desc.push(1.0);
    desc.extend_from_slice(a);
    // polish each cluster on the (m-1)th derivative, where it is a simple root
    for (c, m) in clusters.iter_mut() {
        let start = *c;
        let mut z = start;
        for _ in 0..30 {
            let f = horner_derivative(&desc, *m - 1, z);
            let df = horner_derivative(&desc, *m, z);
            if df.norm() == 0.0 {
                break;
            }
            let step = f / df;
            z -= step;
            if step.norm() <= 4.0 * f64::EPSILON * (1.0 + z.norm()) {
                break;
            }
        }
        if z.is_finite() && (z - start).norm() <= cluster_radius(*m) * (1.0 + start.norm()) {
            *c = z;
        }
    }

    let mut real = Vec::new();
    let mut upper = Vec::new();
    let mut lower = Vec::new();
    for &(c, m) in &clusters {
        if c.im.abs() <= cluster_radius(m) * (1.0 + c.norm()) {
            real.push(Root::real(c.re, m));
        } else if c.im > 0.0 {
            upper.push((c, m));
        } else {
            lower.push((c, m));
        }
    }
    if upper.len() != lower.len() {
        return Err(Error::RootFinding("complex roots without conjugate partners".into()));
    }
    let mut roots = real;
    for (c, m) in upper {
        let idx = lower
            .iter()
            .enumerate()
            .filter(|(_, (_, lm))| *lm == m)
            .min_by(|(_, (p, _)), (_, (q, _))| {
                (p - c.conj()).norm().total_cmp(&(q - c.conj()).norm())
            })
            .map(|(i, _)| i)
            .ok_or_else(|| Error::RootFinding("complex roots without conjugate partners".into()))?;
        let (w, _) = lower.swap_remove(idx);
        let avg = (c + w.conj()) / 2.0;
        roots.push(Root::complex(avg.re, avg.im.abs(), m));
        roots.push(Root::complex(avg.re, -avg.im.abs(), m));
    }
    roots.sort_by(|p, q| {
        q.value.re.total_cmp(&p.value.re).then(q.value.im.total_cmp(&p.value.im))
    });
    EigenStructure::new(roots)
}

/// Coefficients `a₁…a_n` of the monic polynomial with the given roots.
pub fn coefficients_from_roots(es: &EigenStructure) -> Vec<f64> {
    // poly[k] is the coefficient of s^{n-k}
    let mut poly = vec![Complex64::new(1.0, 0.0)];
    for r in es.roots() {
        for _ in 0..r.multiplicity {
            let mut next = vec![Complex64::new(0.0, 0.0); poly.len() + 1];
            for (k, &p) in poly.iter().enumerate() {
                next[k] += p;
                next[k + 1] -= p * r.value;
            }
            poly = next;
        }
    }
    let scale = poly.iter().map(|c| c.norm()).fold(1.0, f64::max);
    poly.iter()
        .skip(1)
        .map(|c| {
            debug_assert!(c.im.abs() <= 1e-12 * scale, "imaginary residue {}", c.im);
            c.re
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly_at(a: &[f64], s: Complex64) -> Complex64 {
        let mut desc = vec![1.0];
        desc.extend_from_slice(a);
        horner_derivative(&desc, 0, s)
    }

    #[test]
    fn pure_imaginary_pair() {
        let es = roots_from_coefficients(&[0.0, 1.0]).unwrap();
        assert_eq!(es.roots().len(), 2);
        assert!((es.roots()[0].value - Complex64::new(0.0, 1.0)).norm() < 1e-12);
        assert!((es.roots()[1].value - Complex64::new(0.0, -1.0)).norm() < 1e-12);
        assert!(es.roots().iter().all(|r| r.multiplicity == 1));
    }

    #[test]
    fn perfect_square_merges() {
        let es = roots_from_coefficients(&[-2.0, 1.0]).unwrap();
        assert_eq!(es.roots().len(), 1);
        assert_eq!(es.roots()[0].multiplicity, 2);
        assert!((es.roots()[0].value.re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn factored_quadratic() {
        let a = [1.0, 0.0];
        let es = roots_from_coefficients(&a).unwrap();
        let values: Vec<f64> = es.roots().iter().map(|r| r.value.re).collect();
        assert_eq!(values.len(), 2);
        assert!((values[0] - 0.0).abs() < 1e-12 && (values[1] + 1.0).abs() < 1e-12);
        for r in es.roots() {
            assert!(poly_at(&a, r.value).norm() < 1e-10);
        }
    }

    #[test]
    fn triple_root_is_recovered() {
        // (s + 1)^3 (s - 2)
        let es = EigenStructure::new(vec![Root::real(-1.0, 3), Root::real(2.0, 1)]).unwrap();
        let a = coefficients_from_roots(&es);
        let back = roots_from_coefficients(&a).unwrap();
        assert_eq!(back.roots().len(), 2);
        let triple = back.roots().iter().find(|r| r.multiplicity == 3).unwrap();
        assert!((triple.value.re + 1.0).abs() < 1e-9);
    }

    #[test]
    fn degree_zero_rejected() {
        assert!(matches!(roots_from_coefficients(&[]), Err(Error::InvalidEigenStructure(_))));
    }

    #[test]
    fn expansion_examples() {
        let es = EigenStructure::new(vec![Root::real(0.0, 1), Root::real(-1.0, 1)]).unwrap();
        assert_eq!(coefficients_from_roots(&es), vec![1.0, 0.0]);
        let es = EigenStructure::new(vec![Root::complex(0.0, 1.0, 1), Root::complex(0.0, -1.0, 1)])
            .unwrap();
        assert_eq!(coefficients_from_roots(&es), vec![0.0, 1.0]);
        let es = EigenStructure::new(vec![Root::real(1.0, 2)]).unwrap();
        assert_eq!(coefficients_from_roots(&es), vec![-2.0, 1.0]);
    }

    #[test]
    fn basis_examples() {
        let pair = EigenStructure::new(vec![Root::complex(0.0, 1.0, 1), Root::complex(0.0, -1.0, 1)])
            .unwrap();
        assert_eq!(evaluate_fundamental_basis(&pair, 0.0).as_slice(), &[1.0, 0.0]);

        let distinct = EigenStructure::new(vec![Root::real(0.0, 1), Root::real(-1.0, 1)]).unwrap();
        let v = evaluate_fundamental_basis(&distinct, 1.0);
        assert_eq!(v[0], 1.0);
        assert!((v[1] - (-1.0f64).exp()).abs() < 1e-15);

        let double = EigenStructure::new(vec![Root::real(-1.0, 2)]).unwrap();
        let v = evaluate_fundamental_basis(&double, 2.0);
        let e2 = (-2.0f64).exp();
        assert!((v[0] - e2).abs() < 1e-15 && (v[1] - 2.0 * e2).abs() < 1e-15);
    }

    #[test]
    fn validation_errors() {
        assert!(EigenStructure::new(vec![]).is_err());
        assert!(EigenStructure::new(vec![Root::real(1.0, 0)]).is_err());
        assert!(EigenStructure::new(vec![Root::complex(0.0, 1.0, 1)]).is_err());
        assert!(EigenStructure::new(vec![Root::complex(0.0, 1.0, 1), Root::complex(0.0, -1.0, 2)])
            .is_err());
        assert!(EigenStructure::new(vec![Root::real(1.0, 1), Root::real(1.0 + 1e-9, 1)]).is_err());
    }

    #[test]
    fn pair_block_sits_at_first_member() {
        let es = EigenStructure::new(vec![
            Root::real(-2.0, 1),
            Root::complex(0.5, -1.5, 2),
            Root::complex(0.5, 1.5, 2),
        ])
        .unwrap();
        assert_eq!(es.order(), 5);
        assert_eq!(es.block_offsets(), &[0, 1]);
        match es.blocks()[1] {
            ModeBlock::Oscillatory { im, upper, lower, .. } => {
                assert_eq!(im, 1.5);
                assert_eq!((upper, lower), (2, 1));
            }
            _ => panic!("expected a pair block"),
        }
        assert_eq!(es.sine_count(), 2);
    }

    #[test]
    fn wronskian_matches_finite_differences() {
        let es = EigenStructure::new(vec![
            Root::real(-0.7, 2),
            Root::complex(0.2, 1.3, 1),
            Root::complex(0.2, -1.3, 1),
        ])
        .unwrap();
        let w = wronskian_at_zero(&es);
        // first derivative row against a central difference
        let h = 1e-6;
        let d = (evaluate_fundamental_basis(&es, h) - evaluate_fundamental_basis(&es, -h)) / (2.0 * h);
        for j in 0..es.order() {
            assert!((w[(1, j)] - d[j]).abs() < 1e-8, "column {j}");
        }
        assert_eq!(w.row(0).transpose(), evaluate_fundamental_basis(&es, 0.0));
    }
}
