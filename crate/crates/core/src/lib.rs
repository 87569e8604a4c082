//! Joint n-reachability / n-observability of nonuniformly sampled SISO LTI
//! systems, degree-of-orthogonality metrics, and sampling-sequence design.
//!
//! A system is described by its characteristic roots and the modal expansion
//! of its impulse response ([`lti::SystemSpec`]). Sampling instants enter only
//! through the backward differences `α_m = t_{n−1} − t_{n−m−1}`; the sampled
//! system is jointly reachable and observable in `n` steps exactly when the
//! fundamental-solution matrix `[φᵢ(α_m)]` is nonsingular.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod design;
pub mod error;
pub mod format;
pub mod io;
pub mod linalg;
pub mod lti;
pub mod sim;

pub use error::{Error, Result};
