#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nusample::analysis::SamplingSequence;
use nusample::lti::{EigenStructure, LinearModel, ModeBlock, ModeCoefficients, Root, SystemSpec};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `exp(M)` by Taylor series with scaling and squaring; independent of the
/// closed-form Jordan evaluator.
pub fn expm(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    let norm = m.iter().map(|v| v.abs()).sum::<f64>().max(1e-300);
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let scaled = m / 2f64.powi(squarings);
    let mut term = DMatrix::<f64>::identity(n, n);
    let mut sum = term.clone();
    for k in 1..=30 {
        term = &term * &scaled / k as f64;
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

fn far_enough(candidate: Complex64, taken: &[Complex64]) -> bool {
    taken.iter().all(|&z| (z - candidate).norm() >= 0.25 && (z.conj() - candidate).norm() >= 0.25)
}

/// Random eigenstructure of order `n` mixing real roots, pairs and
/// multiplicities up to 3, every two roots at least 0.25 apart.
pub fn random_eigen(r: &mut ChaCha8Rng, n: usize) -> EigenStructure {
    loop {
        let mut roots = Vec::new();
        let mut taken: Vec<Complex64> = Vec::new();
        let mut left = n;
        let mut attempts = 0;
        while left > 0 && attempts < 200 {
            attempts += 1;
            let pair = left >= 2 && r.random_bool(0.5);
            let max_mult = if pair { (left / 2).min(3) } else { left.min(3) };
            let mult = if r.random_bool(0.7) { 1 } else { r.random_range(1..=max_mult) };
            if pair {
                let z = Complex64::new(r.random_range(-1.0..0.5), r.random_range(0.4..2.0));
                if !far_enough(z, &taken) {
                    continue;
                }
                taken.push(z);
                roots.push(Root::complex(z.re, z.im, mult));
                roots.push(Root::complex(z.re, -z.im, mult));
                left -= 2 * mult;
            } else {
                let z = Complex64::new(r.random_range(-1.5..1.0), 0.0);
                if !far_enough(z, &taken) {
                    continue;
                }
                taken.push(z);
                roots.push(Root::real(z.re, mult));
                left -= mult;
            }
        }
        if left == 0 {
            return EigenStructure::new(roots).expect("generated roots are valid");
        }
    }
}

fn signed(r: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let v = r.random_range(lo..hi);
    if r.random_bool(0.5) { v } else { -v }
}

/// Random minimal system: every root's last modal coefficient has modulus ≥ 0.3.
pub fn random_minimal_system(r: &mut ChaCha8Rng, n: usize) -> SystemSpec {
    let es = random_eigen(r, n);
    let mut c = vec![Complex64::new(0.0, 0.0); n];
    let offsets = es.root_offsets().to_vec();
    for b in es.blocks() {
        match *b {
            ModeBlock::Real { multiplicity, root, .. } => {
                for k in 0..multiplicity {
                    let v = if k + 1 == multiplicity { signed(r, 0.3, 1.5) } else { r.random_range(-1.5..1.5) };
                    c[offsets[root] + k] = Complex64::new(v, 0.0);
                }
            }
            ModeBlock::Oscillatory { multiplicity, upper, lower, .. } => {
                for k in 0..multiplicity {
                    let z = if k + 1 == multiplicity {
                        Complex64::from_polar(r.random_range(0.3..1.2), r.random_range(0.0..std::f64::consts::TAU))
                    } else {
                        Complex64::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0))
                    };
                    c[offsets[upper] + k] = z;
                    c[offsets[lower] + k] = z.conj();
                }
            }
        }
    }
    SystemSpec::new(es, ModeCoefficients(c)).expect("conjugate coefficients")
}

pub fn random_order(r: &mut ChaCha8Rng) -> usize {
    r.random_range(2..=5)
}

/// Random intervals in `[0.15, 1.2]` plus a final interval.
pub fn random_sequence(r: &mut ChaCha8Rng, n: usize) -> SamplingSequence {
    let t0 = r.random_range(-3.0..3.0);
    let intervals: Vec<f64> = (1..n).map(|_| r.random_range(0.15..1.2)).collect();
    SamplingSequence::from_intervals(t0, &intervals, Some(r.random_range(0.15..1.2))).unwrap()
}

/// Uniform period `π/b` for one of the system's pairs, if it has any.
pub fn pathological_sequence(r: &mut ChaCha8Rng, spec: &SystemSpec) -> Option<SamplingSequence> {
    let pairs: Vec<f64> = spec
        .eigen()
        .blocks()
        .iter()
        .filter_map(|b| match *b {
            ModeBlock::Oscillatory { im, .. } => Some(im),
            _ => None,
        })
        .collect();
    if pairs.is_empty() {
        return None;
    }
    let b = pairs[r.random_range(0..pairs.len())];
    let period = std::f64::consts::PI / b;
    let n = spec.order();
    let t0 = r.random_range(-3.0..3.0);
    SamplingSequence::from_intervals(t0, &vec![period; n - 1], Some(period)).ok()
}

/// A random case: about 15% of them sample a pair at its pathological period.
pub fn random_case(r: &mut ChaCha8Rng) -> (SystemSpec, SamplingSequence) {
    let n = random_order(r);
    let spec = random_minimal_system(r, n);
    if r.random_bool(0.15) {
        if let Some(seq) = pathological_sequence(r, &spec) {
            return (spec, seq);
        }
    }
    let seq = random_sequence(r, n);
    (spec, seq)
}

/// `[exp(A(t_n − t_{n−1}))b, …, exp(A(t_n − t₀))b]` with the Taylor exponential.
pub fn taylor_controllability(model: &LinearModel, seq: &SamplingSequence) -> DMatrix<f64> {
    let real = &model.realization;
    let tn = seq.final_instant().unwrap();
    let cols: Vec<DVector<f64>> =
        seq.instants().iter().rev().map(|&t| expm(&(&real.a * (tn - t))) * &real.b).collect();
    DMatrix::from_columns(&cols)
}

/// Rows `c·exp(Aα_m)` with the Taylor exponential.
pub fn taylor_observability(model: &LinearModel, alphas: &[f64]) -> DMatrix<f64> {
    let real = &model.realization;
    let rows: Vec<_> = alphas.iter().map(|&a| &real.c * expm(&(&real.a * a))).collect();
    DMatrix::from_rows(&rows)
}

pub fn rel_err(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

/// Instants that make `{±jb}` pathological: `0, π/b, 2π/b, …`.
pub fn pure_pair(b: f64) -> SystemSpec {
    let es = EigenStructure::new(vec![Root::complex(0.0, b, 1), Root::complex(0.0, -b, 1)]).unwrap();
    SystemSpec::from_markov(es, &[0.0, 1.0]).unwrap()
}

pub fn pair(a: f64, b: f64) -> SystemSpec {
    let es = EigenStructure::new(vec![Root::complex(a, b, 1), Root::complex(a, -b, 1)]).unwrap();
    SystemSpec::from_markov(es, &[1.0, 0.5]).unwrap()
}

pub fn third_order(lambda: f64, a: f64, b: f64, c_real: f64, c_pair: Complex64) -> SystemSpec {
    let es = EigenStructure::new(vec![Root::real(lambda, 1), Root::complex(a, b, 1), Root::complex(a, -b, 1)])
        .unwrap();
    SystemSpec::new(es, ModeCoefficients(vec![Complex64::new(c_real, 0.0), c_pair, c_pair.conj()])).unwrap()
}

pub fn normal(r: &mut ChaCha8Rng) -> f64 {
    rand_distr::Distribution::<f64>::sample(&rand_distr::StandardNormal, r)
}

pub fn normal_vector(r: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_iterator(n, (0..n).map(|_| normal(r)))
}

/// (system, sequence) file stems under tests/data covered by the analyze goldens.
pub const ANALYZE_CASES: &[(&str, &str)] = &[
    ("sine", "quarter_turn"),
    ("sine", "half_turn"),
    ("damped_pair", "quarter_turn"),
    ("third_order", "three_instants"),
    ("repeated_root", "three_instants"),
    ("fifth_order", "five_instants"),
    ("non_minimal", "two_instants"),
];

pub fn data(name: &str) -> String {
    format!("{}/tests/data/{name}.toml", env!("CARGO_MANIFEST_DIR"))
}
