//! Continuous-time system model: characteristic roots, modal coefficients,
//! canonical realizations and their real Jordan frames.

pub mod eigen;
pub mod jordan;
pub mod realization;
pub mod system;

pub use eigen::{
    coefficients_from_roots, evaluate_fundamental_basis, roots_from_coefficients, EigenStructure,
    ModeBlock, Root, CLUSTER_TOL,
};
pub use jordan::{jordan_exp, jordan_matrix, real_jordan, LinearModel, RealJordanForm};
pub use realization::{
    controllability_canonical, observability_canonical, Realization, RealizationKind,
};
pub use system::{
    check_minimality, impulse_response, markov_from_modes, modes_from_markov, Minimality,
    ModeCoefficients, SystemSpec,
};
