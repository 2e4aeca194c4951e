//! Simulator and verification toolkit for the joint evolution of a massless
//! scalar field on a line and the point charge sitting at its singularity.
//!
//! The field obeys the 1+1 wave equation with a Dirac source moving along the
//! charge trajectory `q(t)`; the charge in turn is driven by the self-force
//! defined through momentum balance of the field across the singular point. Everything downstream of that coupling is exactly solvable up to
//! one scalar ODE, and this crate exploits that:
//!
//! * [`model`] holds the physical parameters, the incoming radiation pulse
//!   (compactly supported initial data given by closed-form descriptors), and
//!   the characteristic profiles derived from it.
//! * [`field`] reconstructs the field and its one-sided gradients anywhere in
//!   spacetime from a trajectory, via retarded times along both characteristic
//!   families.
//! * [`force`] evaluates the self-force two independent ways: from the jump
//!   of the field stress across the charge, and from the closed form in the
//!   smooth incoming wave.
//! * [`dynamics`] integrates the reduced autonomous system in characteristic
//!   coordinates, with event detection for radiation boundaries and the
//!   light-speed blow-up, plus closed-form solutions and sensitivity checks
//!   used as cross-validation.
//! * [`oracle`] is an independent finite-difference solver for the sourced
//!   wave equation together with momentum- and energy-balance diagnostics.
//! * [`verify`] packages the toolkit's end-to-end checks with pinned
//!   tolerances; the `acceptance` integration test and the CLI `verify`
//!   subcommand both run it.

// Validation guards are written `!(x > 0.0)` rather than `x <= 0.0` on
// purpose: the negated form also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod defaults;
pub mod dynamics;
pub mod field;
pub mod force;
pub mod model;
pub mod ode;
pub mod oracle;
pub mod quad;
pub mod verify;

pub use model::{CharacteristicState, ParticleState, PhysicalParams, ProfilePair, RadiationPulse};
