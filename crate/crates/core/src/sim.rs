//! Impulse-train simulation: deadbeat inputs that drive a state to the
//! origin in `n` impulses, and initial-state reconstruction from `n` output
//! samples. Everything is propagated with the closed-form exponential.
//!
//! The initial state `X₀` is the state just before the first impulse at
//! `t₀`; an impulse of weight `u_i` at `t_i` makes the state jump by `b·u_i`.

use nalgebra::{DMatrix, DVector};

use crate::analysis::{bruteforce_controllability_matrix, bruteforce_observability_matrix};
use crate::analysis::{AlphaVector, SamplingSequence};
use crate::error::{Error, Result};
use crate::linalg::{solve_full_rank, RANK_TOL};
use crate::lti::LinearModel;

#[derive(Debug, Clone, PartialEq)]
pub struct ImpulsePlan {
    /// `u₀ … u_{n−1}`.
    pub inputs: Vec<f64>,
    pub sequence: SamplingSequence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Pre,
    Post,
}

impl Side {
    pub fn as_str(&self) -> &'static str {
        match self {
            Side::Pre => "pre",
            Side::Post => "post",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub time: f64,
    pub side: Side,
    pub state: DVector<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub checkpoints: Vec<Checkpoint>,
}

impl Trajectory {
    pub fn final_state(&self) -> &DVector<f64> {
        &self.checkpoints.last().expect("trajectory has checkpoints").state
    }
}

/// `exp(A·dt)·x`.
pub fn state_transition(model: &LinearModel, x: &DVector<f64>, dt: f64) -> DVector<f64> {
    if dt == 0.0 {
        return x.clone();
    }
    model.transition_matrix(dt) * x
}

/// Solves `exp(A(t_n − t₀))X₀ + [G_{n−1} … G₀]·(u_{n−1} … u₀)ᵀ = 0`.
pub fn deadbeat_inputs(
    model: &LinearModel,
    x0: &DVector<f64>,
    seq: &SamplingSequence,
) -> Result<ImpulsePlan> {
    let g = bruteforce_controllability_matrix(model, seq)?;
    let tn = seq.final_instant().ok_or(Error::MissingFinalInstant)?;
    let free = state_transition(model, x0, tn - seq.instants()[0]);
    let reversed = solve_full_rank(&g, &(-free), RANK_TOL)
        .map_err(|f| Error::Singular { condition_number: f.condition_number })?;
    let inputs = reversed.iter().rev().copied().collect();
    Ok(ImpulsePlan { inputs, sequence: seq.clone() })
}

/// Free flow between instants and a jump `b·u_i` at each `t_i`; ends with a
/// single checkpoint at `t_n` when the plan has a final instant.
pub fn simulate_impulse_train(model: &LinearModel, x0: &DVector<f64>, plan: &ImpulsePlan) -> Trajectory {
    let b = &model.realization.b;
    let instants = plan.sequence.instants();
    let mut checkpoints = Vec::with_capacity(2 * instants.len() + 1);
    let mut state = x0.clone();
    let mut time = instants[0];
    for (i, &ti) in instants.iter().enumerate() {
        state = state_transition(model, &state, ti - time);
        time = ti;
        checkpoints.push(Checkpoint { time, side: Side::Pre, state: state.clone() });
        let u = plan.inputs.get(i).copied().unwrap_or(0.0);
        state += b * u;
        checkpoints.push(Checkpoint { time, side: Side::Post, state: state.clone() });
    }
    if let Some(tn) = plan.sequence.final_instant() {
        state = state_transition(model, &state, tn - time);
        checkpoints.push(Checkpoint { time: tn, side: Side::Pre, state });
    }
    Trajectory { checkpoints }
}

/// Solves `y(α_m) = c·exp(Aα_m)·X₀` for `X₀`.
pub fn reconstruct_initial_state(
    model: &LinearModel,
    outputs: &[f64],
    av: &AlphaVector,
) -> Result<DVector<f64>> {
    let o = bruteforce_observability_matrix(model, av)?;
    if outputs.len() != o.nrows() {
        return Err(Error::OrderMismatch { expected: o.nrows(), found: outputs.len() });
    }
    solve_full_rank(&o, &DVector::from_column_slice(outputs), RANK_TOL).map_err(|f| {
        Error::RankDeficient { smallest_singular_value: f.smallest_singular_value }
    })
}

/// Noiseless samples `c·exp(Aα_m)·X₀`.
pub fn sample_outputs(model: &LinearModel, x0: &DVector<f64>, av: &AlphaVector) -> Vec<f64> {
    av.as_slice()
        .iter()
        .map(|&a| (&model.realization.c * state_transition(model, x0, a))[0])
        .collect()
}

/// The closed-form final state `exp(A(t_n − t₀))X₀ + Σ G_i u_i`.
pub fn final_state_closed_form(model: &LinearModel, x0: &DVector<f64>, plan: &ImpulsePlan) -> Result<DVector<f64>> {
    let g: DMatrix<f64> = bruteforce_controllability_matrix(model, &plan.sequence)?;
    let tn = plan.sequence.final_instant().ok_or(Error::MissingFinalInstant)?;
    let u = DVector::from_iterator(plan.inputs.len(), plan.inputs.iter().rev().copied());
    Ok(state_transition(model, x0, tn - plan.sequence.instants()[0]) + g * u)
}
