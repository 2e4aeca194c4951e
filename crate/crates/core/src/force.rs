//! The self-force on the charge, two independent ways.
//!
//! Momentum balance across the charge defines the force as
//! `f = -qdot [pi] - [tau]`, the jump bracket taken right-minus-left across
//! the path, with momentum density `pi = u_s u_t` and flux
//! `tau = (u_s^2 + u_t^2)/2`. Substituting the one-sided gradients of the
//! reconstructed field collapses this to a closed form: the smooth incoming
//! wave pushes with `a V_s` and the charge's own radiation brakes with
//! `-(a^2/2) qdot / (1 - qdot^2)`. [`force_jump`] evaluates the first route
//! numerically from the field; [`force_closed`] evaluates the second; they
//! must agree on every reachable state.

use crate::field::{self, FieldSolution, Trajectory};
use crate::model::{PhysicalParams, RadiationPulse};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ForceError {
    #[error("force is undefined at |qdot| >= 1, got {qdot}")]
    LightSpeed { qdot: f64 },
    #[error(transparent)]
    Field(#[from] field::FieldError),
}

/// Pointwise quadratic densities of the field gradient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StressSample {
    /// Momentum density `u_s u_t`.
    pub pi: f64,
    /// Momentum flux `(u_s^2 + u_t^2)/2`.
    pub tau: f64,
    /// Energy density; for this field identical to the flux.
    pub eps: f64,
}

pub fn stress(u_t: f64, u_s: f64) -> StressSample {
    let tau = 0.5 * (u_s * u_s + u_t * u_t);
    StressSample {
        pi: u_s * u_t,
        tau,
        eps: tau,
    }
}

/// Closed-form force at a charge state: incoming-wave push plus radiation
/// braking. Needs only the pulse, not the reconstructed field.
pub fn force_closed(
    params: &PhysicalParams,
    pulse: &RadiationPulse,
    t: f64,
    q: f64,
    qdot: f64,
) -> Result<f64, ForceError> {
    if !(qdot.abs() < 1.0) {
        return Err(ForceError::LightSpeed { qdot });
    }
    let v_s = field::free_field(pulse, t, q).v_s;
    Ok(params.a * v_s - 0.5 * params.a * params.a * qdot / (1.0 - qdot * qdot))
}

/// Momentum-balance force from the one-sided field gradients across the
/// path. Goes through retarded-time root finding and the branch closed
/// forms, sharing no algebra with [`force_closed`] beyond the field itself.
pub fn force_jump(
    params: &PhysicalParams,
    trajectory: &Trajectory,
    pulse: &RadiationPulse,
    t: f64,
) -> Result<f64, ForceError> {
    let solution = FieldSolution::new(params, trajectory, pulse)?;
    force_jump_at(&solution, t)
}

/// Same as [`force_jump`] for a prebuilt field solution; use this in loops.
pub fn force_jump_at(solution: &FieldSolution<'_>, t: f64) -> Result<f64, ForceError> {
    let q = solution.trajectory().q(t);
    let qdot = solution.trajectory().qdot(t);
    let sample = solution.sample(t, q)?;
    let left = stress(sample.u_t_left, sample.u_s_left);
    let right = stress(sample.u_t_right, sample.u_s_right);
    Ok(-qdot * (right.pi - left.pi) - (right.tau - left.tau))
}
