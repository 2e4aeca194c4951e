//! Joint evolution of the charge under the self-force, in characteristic
//! coordinates.
//!
//! With forward label `d = q + t`, backward label `b = q - t`, and velocity
//! angle `theta = asin(qdot)`, the equation of motion closes into the
//! autonomous system
//!
//! ```text
//!   d'     = sin(theta) + 1
//!   b'     = sin(theta) - 1
//!   theta' = (a/2m) (F(d) + G(b)) cos^2(theta) - (a^2/2m) sin(theta)
//! ```
//!
//! so the charge meets the incoming pulse exactly where the profile
//! supports say, and away from them `theta` obeys a closed-form law: the
//! combination `cot(theta/2) exp(-(a^2/2m) t)` is conserved. For `m > 0`
//! that means exponential decay of `theta` at rate `a^2/2m`; for `m < 0` it
//! means finite-time blow-up to `|theta| = pi/2`, where the charge would
//! reach light speed. Integration stops at a margin before that point.
//!
//! The module also carries the machinery for the instability analysis: the
//! time-reversed `(b, theta)` flow through the radiation window, the
//! first-order sensitivity of the crossing angle to the pulse amplitude
//! (computed three independent ways), and a direct `(q, p)` integration of
//! the same motion used as a cross-formulation check.

use crate::defaults;
use crate::field::{FieldError, Knot, Trajectory};
use crate::force;
use crate::model::{CharacteristicState, ModelError, PhysicalParams, ProfilePair, RadiationPulse};
use crate::ode::{self, Crossing, EventFn, OdeError, OdeOptions, OdeSolution};
use crate::quad;
use std::f64::consts::{FRAC_PI_2, PI};
use thiserror::Error;

/// Internal agreement demanded of the three sensitivity routes.
const SENSITIVITY_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Ode(#[from] OdeError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("initial angle {theta} is not inside the light-speed margin")]
    BadInitialAngle { theta: f64 },
    #[error("sensitivity analysis requires a > 0, got a = {a}")]
    RequiresPositiveCoupling { a: f64 },
    #[error("crossing flow left its domain at x = {x} (y = {y})")]
    DomainStop { x: f64, y: f64 },
    #[error(
        "sensitivity routes disagree: closed {closed_form:e}, quadrature {quadrature:e}, variational {variational:e}"
    )]
    SensitivityMismatch {
        closed_form: f64,
        quadrature: f64,
        variational: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeCrossing {
    Enter,
    Exit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    /// `|theta|` reached the light-speed margin; integration stopped there.
    LightSpeed,
    /// The forward label `d` crossed an edge of the `F` support.
    ForwardEdge(EdgeCrossing),
    /// The backward label `b` crossed an edge of the `G` support.
    BackwardEdge(EdgeCrossing),
    /// Charge at rest with all radiation passed.
    Rest,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub kind: EventKind,
    pub state: CharacteristicState,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Outcome {
    /// At rest with no radiation left to come.
    Rest,
    /// Radiation has passed and `theta` is decaying toward rest (`m > 0`).
    Decaying,
    /// Hit the light-speed margin at the given time (`m < 0` blow-up).
    LightSpeed { t: f64 },
    /// The requested span ended before anything was decided.
    SpanEnded,
}

#[derive(Debug, Clone, Copy)]
pub struct IntegrateOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
    pub max_steps: usize,
    pub light_speed_margin: f64,
    pub rest_tol: f64,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        Self {
            rtol: defaults::RTOL,
            atol: defaults::ATOL,
            max_step: defaults::MAX_STEP,
            max_steps: 2_000_000,
            light_speed_margin: defaults::LIGHT_SPEED_MARGIN,
            rest_tol: defaults::REST_TOL,
        }
    }
}

impl IntegrateOptions {
    /// Tightened tolerances for conservation-law and cross-formulation
    /// checks, where the interesting signal sits near 1e-8.
    pub fn tight() -> Self {
        Self {
            rtol: 1e-12,
            atol: 1e-14,
            max_step: 0.05,
            ..Self::default()
        }
    }

    fn ode(&self) -> OdeOptions {
        OdeOptions {
            rtol: self.rtol,
            atol: self.atol,
            max_step: self.max_step,
            max_steps: self.max_steps,
        }
    }
}

/// Right-hand side of the characteristic system at one state.
pub fn characteristic_rhs(
    params: &PhysicalParams,
    profiles: &ProfilePair,
    state: &CharacteristicState,
) -> [f64; 3] {
    rhs3(params, profiles, &[state.d, state.b, state.theta])
}

fn rhs3(params: &PhysicalParams, profiles: &ProfilePair, y: &[f64; 3]) -> [f64; 3] {
    let (sin, cos) = y[2].sin_cos();
    let drive = profiles.f(y[0]) + profiles.g(y[1]);
    let half_a_over_m = 0.5 * params.a / params.m;
    [
        sin + 1.0,
        sin - 1.0,
        half_a_over_m * drive * cos * cos - half_a_over_m * params.a * sin,
    ]
}

fn profiles_passed(profiles: &ProfilePair, d: f64, b: f64) -> bool {
    let f_done = profiles.f_support().is_none_or(|(_, hi)| d >= hi);
    let g_done = profiles.g_support().is_none_or(|(lo, _)| b <= lo);
    f_done && g_done
}

/// Result of one joint-evolution run.
pub struct SolveResult {
    pub params: PhysicalParams,
    /// States at the accepted integrator steps.
    pub path: Vec<CharacteristicState>,
    pub events: Vec<Event>,
    pub outcome: Outcome,
    /// Earliest time at which no radiation remains ahead, if reached.
    pub radiation_cleared: Option<f64>,
    profiles: ProfilePair,
    sol: OdeSolution<3>,
}

impl SolveResult {
    pub fn span(&self) -> (f64, f64) {
        (self.sol.t_start(), self.sol.t_end())
    }

    pub fn final_state(&self) -> CharacteristicState {
        *self.path.last().expect("path holds at least the start")
    }

    /// Dense-output interpolation, clamped to the covered span.
    pub fn state_at(&self, t: f64) -> CharacteristicState {
        let y = self.sol.sample(t);
        CharacteristicState {
            t: t.clamp(self.sol.t_start(), self.sol.t_end()),
            d: y[0],
            b: y[1],
            theta: y[2],
        }
    }

    /// Export the charge motion for the field layer, with knots every
    /// `knot_dt` and trimmed where the motion approaches the subluminal
    /// margin that the field layer enforces.
    pub fn trajectory_with(&self, knot_dt: f64) -> Result<Trajectory, DynamicsError> {
        let (t0, mut t1) = self.span();
        // sin(theta_cap) stays a factor 2 inside the field-layer margin
        let theta_cap = (1.0 - 2.0 * defaults::SUBLUMINAL_MARGIN).asin();
        if let Some(k) = self.path.iter().position(|s| s.theta.abs() > theta_cap) {
            let mut lo = if k == 0 { t0 } else { self.path[k - 1].t };
            let mut hi = self.path[k].t;
            while hi - lo > defaults::EVENT_TIME_TOL {
                let mid = 0.5 * (lo + hi);
                if self.state_at(mid).theta.abs() > theta_cap {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            t1 = lo;
        }
        let n = ((t1 - t0) / knot_dt).ceil().max(2.0) as usize;
        let knots = (0..=n)
            .map(|i| {
                let t = t0 + (t1 - t0) * i as f64 / n as f64;
                let state = self.state_at(t);
                Knot {
                    t,
                    q: state.q(),
                    qdot: state.qdot(),
                }
            })
            .collect();
        Ok(Trajectory::from_knots(knots)?)
    }

    pub fn trajectory(&self) -> Result<Trajectory, DynamicsError> {
        self.trajectory_with(defaults::TRAJECTORY_KNOT_DT)
    }

    /// Least-squares decay rate of `ln |theta|` over the second half of the
    /// post-radiation arc. `None` when there is no such arc or the angle is
    /// numerically zero there.
    pub fn fit_decay_rate(&self) -> Option<f64> {
        let cleared = self.radiation_cleared?;
        let (_, t_end) = self.span();
        if !(t_end > cleared) {
            return None;
        }
        let t_lo = cleared + 0.5 * (t_end - cleared);
        let pts: Vec<(f64, f64)> = self
            .path
            .iter()
            .filter(|s| s.t >= t_lo && s.theta.abs() > 1e-290)
            .map(|s| (s.t, s.theta.abs().ln()))
            .collect();
        if pts.len() < 4 {
            return None;
        }
        let n = pts.len() as f64;
        let mean_t = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let mut sxx = 0.0;
        let mut sxy = 0.0;
        for (t, y) in &pts {
            sxx += (t - mean_t) * (t - mean_t);
            sxy += (t - mean_t) * (y - mean_y);
        }
        if sxx == 0.0 {
            return None;
        }
        Some(-sxy / sxx)
    }
}

/// Integrate the joint evolution from `init` to `t_end`, detecting profile
/// edges, rest, and the light-speed stop.
pub fn integrate(
    params: &PhysicalParams,
    profiles: &ProfilePair,
    init: CharacteristicState,
    t_end: f64,
    opts: &IntegrateOptions,
) -> Result<SolveResult, DynamicsError> {
    params.validate()?;
    if !(init.theta.abs() < FRAC_PI_2 - opts.light_speed_margin) {
        return Err(DynamicsError::BadInitialAngle { theta: init.theta });
    }

    let margin = opts.light_speed_margin;
    let mut events: Vec<EventFn<'_, 3>> = Vec::new();
    let mut kinds: Vec<EventKind> = Vec::new();
    events.push(EventFn {
        label: "light-speed",
        crossing: Crossing::Falling,
        terminal: true,
        g: Box::new(move |_t, y: &[f64; 3]| (FRAC_PI_2 - margin) - y[2].abs()),
    });
    kinds.push(EventKind::LightSpeed);
    if let Some((lo, hi)) = profiles.f_support() {
        events.push(EventFn {
            label: "forward-enter",
            crossing: Crossing::Rising,
            terminal: false,
            g: Box::new(move |_t, y: &[f64; 3]| y[0] - lo),
        });
        kinds.push(EventKind::ForwardEdge(EdgeCrossing::Enter));
        events.push(EventFn {
            label: "forward-exit",
            crossing: Crossing::Rising,
            terminal: false,
            g: Box::new(move |_t, y: &[f64; 3]| y[0] - hi),
        });
        kinds.push(EventKind::ForwardEdge(EdgeCrossing::Exit));
    }
    if let Some((lo, hi)) = profiles.g_support() {
        events.push(EventFn {
            label: "backward-enter",
            crossing: Crossing::Falling,
            terminal: false,
            g: Box::new(move |_t, y: &[f64; 3]| y[1] - hi),
        });
        kinds.push(EventKind::BackwardEdge(EdgeCrossing::Enter));
        events.push(EventFn {
            label: "backward-exit",
            crossing: Crossing::Falling,
            terminal: false,
            g: Box::new(move |_t, y: &[f64; 3]| y[1] - lo),
        });
        kinds.push(EventKind::BackwardEdge(EdgeCrossing::Exit));
    }

    let p = *params;
    let prof = profiles.clone();
    let system = move |_t: f64, y: &[f64; 3]| rhs3(&p, &prof, y);
    let sol = ode::solve(
        &system,
        init.t,
        [init.d, init.b, init.theta],
        t_end,
        &opts.ode(),
        &events,
    )?;

    let path: Vec<CharacteristicState> = sol
        .ts
        .iter()
        .zip(&sol.ys)
        .map(|(&t, y)| CharacteristicState {
            t,
            d: y[0],
            b: y[1],
            theta: y[2],
        })
        .collect();

    let mut out_events: Vec<Event> = sol
        .events
        .iter()
        .map(|e| Event {
            kind: kinds[e.index],
            state: CharacteristicState {
                t: e.t,
                d: e.y[0],
                b: e.y[1],
                theta: e.y[2],
            },
        })
        .collect();

    let radiation_cleared = path
        .iter()
        .find(|s| profiles_passed(profiles, s.d, s.b))
        .map(|s| s.t);
    if let Some(rest) = path
        .iter()
        .find(|s| s.theta.abs() <= opts.rest_tol && profiles_passed(profiles, s.d, s.b))
    {
        out_events.push(Event {
            kind: EventKind::Rest,
            state: *rest,
        });
    }
    out_events.sort_by(|x, y| x.state.t.partial_cmp(&y.state.t).unwrap());

    let outcome = match sol.terminated_by {
        Some(ev) if kinds[ev.index] == EventKind::LightSpeed => Outcome::LightSpeed { t: ev.t },
        _ => {
            let last = path.last().unwrap();
            if profiles_passed(profiles, last.d, last.b) {
                if last.theta.abs() <= opts.rest_tol {
                    Outcome::Rest
                } else if params.m > 0.0 {
                    Outcome::Decaying
                } else {
                    Outcome::SpanEnded
                }
            } else {
                Outcome::SpanEnded
            }
        }
    };

    Ok(SolveResult {
        params: *params,
        path,
        events: out_events,
        outcome,
        radiation_cleared,
        profiles: profiles.clone(),
        sol,
    })
}

impl SolveResult {
    pub fn profiles(&self) -> &ProfilePair {
        &self.profiles
    }
}

/// Closed-form angle evolution with no radiation present:
/// `cot(theta/2)` grows (or shrinks) exponentially at rate `a^2/2m`.
pub fn theta_no_radiation(params: &PhysicalParams, t0: f64, theta0: f64, t: f64) -> f64 {
    if theta0 == 0.0 {
        return 0.0;
    }
    let rate = 0.5 * params.a * params.a / params.m;
    let half = 0.5 * theta0.abs();
    let u = 2.0 * (half.tan() * (-rate * (t - t0)).exp()).atan();
    theta0.signum() * u
}

/// Conserved combination `cot(theta/2) exp(-(a^2/2m) t)` along arcs with no
/// radiation. `None` at `theta = 0` where the expression is singular.
pub fn no_radiation_invariant(params: &PhysicalParams, t: f64, theta: f64) -> Option<f64> {
    if theta == 0.0 {
        return None;
    }
    let rate = 0.5 * params.a * params.a / params.m;
    Some(1.0 / (0.5 * theta).tan() * (-rate * t).exp())
}

/// Time at which the no-radiation blow-up reaches `|theta| = pi/2`, for
/// `m < 0` and a nonzero starting angle. `None` when there is no blow-up.
pub fn light_speed_time_no_radiation(params: &PhysicalParams, t0: f64, theta0: f64) -> Option<f64> {
    if params.m > 0.0 || theta0 == 0.0 || theta0.abs() >= FRAC_PI_2 {
        return None;
    }
    let rate = 0.5 * params.a * params.a / params.m.abs();
    Some(t0 + (1.0 / (0.5 * theta0.abs()).tan()).ln() / rate)
}

/// Right-hand side of the time-reversed `(b, theta)` flow used by the
/// instability analysis (negative mass, radiation entirely in `G`).
pub fn reverse_flow_rhs(
    params: &PhysicalParams,
    profiles: &ProfilePair,
    b: f64,
    theta: f64,
) -> [f64; 2] {
    let (sin, cos) = theta.sin_cos();
    let am = 0.5 * params.a / params.m.abs();
    [
        1.0 - sin,
        am * profiles.g(b) * cos * cos - am * params.a * sin,
    ]
}

/// Integrate the reversed flow for `duration` from `(b0, theta0)`.
pub fn reverse_flow(
    params: &PhysicalParams,
    profiles: &ProfilePair,
    b0: f64,
    theta0: f64,
    duration: f64,
    opts: &IntegrateOptions,
) -> Result<OdeSolution<2>, DynamicsError> {
    params.validate()?;
    let p = *params;
    let prof = profiles.clone();
    let system = move |_t: f64, y: &[f64; 2]| reverse_flow_rhs(&p, &prof, y[0], y[1]);
    let margin = opts.light_speed_margin;
    let guard = [EventFn {
        label: "light-speed",
        crossing: Crossing::Falling,
        terminal: true,
        g: Box::new(move |_t, y: &[f64; 2]| (FRAC_PI_2 - margin) - y[1].abs()),
    }];
    Ok(ode::solve(
        &system,
        0.0,
        [b0, theta0],
        duration,
        &opts.ode(),
        &guard,
    )?)
}

/// Angle with which the reversed flow leaves the rescaled radiation window
/// `x in [-1, 1]` when driven by a sine profile of amplitude `beta`,
/// starting from `y(-1) = 0`.
pub fn radiation_crossing_angle(params: &PhysicalParams, beta: f64) -> Result<f64, DynamicsError> {
    params.validate()?;
    if params.a <= 0.0 {
        return Err(DynamicsError::RequiresPositiveCoupling { a: params.a });
    }
    let am = 0.5 * params.a / params.m.abs();
    let a = params.a;
    let system = move |x: f64, y: &[f64; 1]| {
        let (sin, cos) = y[0].sin_cos();
        [am * (1.0 + sin) * (beta * (PI * x).sin() - a * sin / (cos * cos))]
    };
    let guard = [EventFn {
        label: "domain",
        crossing: Crossing::Falling,
        terminal: true,
        g: Box::new(|_x, y: &[f64; 1]| (FRAC_PI_2 - defaults::LIGHT_SPEED_MARGIN) - y[0].abs()),
    }];
    let opts = OdeOptions {
        rtol: 1e-12,
        atol: 1e-16,
        max_step: 0.02,
        ..OdeOptions::default()
    };
    let sol = ode::solve(&system, -1.0, [0.0], 1.0, &opts, &guard)?;
    if let Some(stop) = sol.terminated_by {
        return Err(DynamicsError::DomainStop {
            x: stop.t,
            y: stop.y[0],
        });
    }
    Ok(sol.ys.last().unwrap()[0])
}

/// The three independent evaluations of the crossing sensitivity
/// `Z = d/d beta` of [`radiation_crossing_angle`] at `beta = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensitivityCheck {
    pub closed_form: f64,
    pub quadrature: f64,
    pub variational: f64,
}

impl SensitivityCheck {
    pub fn value(&self) -> f64 {
        self.closed_form
    }

    pub fn spread(&self) -> f64 {
        let lo = self.closed_form.min(self.quadrature).min(self.variational);
        let hi = self.closed_form.max(self.quadrature).max(self.variational);
        hi - lo
    }
}

pub fn sensitivity_closed_form(params: &PhysicalParams) -> f64 {
    let (a, m) = (params.a, params.m.abs());
    2.0 * PI * a * m * (1.0 - (-a * a / m).exp()) / (4.0 * PI * PI * m * m + a * a * a * a)
}

/// First-order coefficient of the *forward* exit angle: a charge entering
/// the sine radiation window at rest leaves it with
/// `theta ≈ -beta * forward_crossing_sensitivity`.
///
/// This differs from the reversed-flow sensitivity by the factor
/// `exp(a^2/|m|)`: integrating forward, the anti-damped angle equation
/// amplifies by `exp(+kappa (t_exit - s))` what the damped reversed flow
/// attenuates by `exp(-kappa (x_exit - x))`, and the window is two units
/// wide, so the two first-order kernels differ by `exp(2 kappa)` with
/// `kappa = a^2/2|m|`. The sign of the exit angle matches `-beta * Z`
/// either way.
pub fn forward_crossing_sensitivity(params: &PhysicalParams) -> f64 {
    let (a, m) = (params.a, params.m.abs());
    (a * a / m).exp() * sensitivity_closed_form(params)
}

pub fn sensitivity_quadrature(params: &PhysicalParams) -> f64 {
    let (a, m) = (params.a, params.m.abs());
    let kappa = 0.5 * a * a / m;
    let integral = quad::integrate(
        &|t: f64| (PI * t).sin() * (kappa * (t - 1.0)).exp(),
        -1.0,
        1.0,
        1e-14,
    );
    0.5 * a / m * integral
}

pub fn sensitivity_variational(params: &PhysicalParams) -> Result<f64, DynamicsError> {
    let am = 0.5 * params.a / params.m.abs();
    let a = params.a;
    let system = move |x: f64, z: &[f64; 1]| [am * ((PI * x).sin() - a * z[0])];
    let opts = OdeOptions {
        rtol: 1e-13,
        atol: 1e-16,
        max_step: 0.02,
        ..OdeOptions::default()
    };
    let sol = ode::solve(&system, -1.0, [0.0], 1.0, &opts, &[])?;
    Ok(sol.ys.last().unwrap()[0])
}

/// Compute the crossing sensitivity all three ways and insist they agree.
pub fn radiation_crossing_sensitivity(
    params: &PhysicalParams,
) -> Result<SensitivityCheck, DynamicsError> {
    params.validate()?;
    if params.a <= 0.0 {
        return Err(DynamicsError::RequiresPositiveCoupling { a: params.a });
    }
    let check = SensitivityCheck {
        closed_form: sensitivity_closed_form(params),
        quadrature: sensitivity_quadrature(params),
        variational: sensitivity_variational(params)?,
    };
    if check.spread() > SENSITIVITY_TOL {
        return Err(DynamicsError::SensitivityMismatch {
            closed_form: check.closed_form,
            quadrature: check.quadrature,
            variational: check.variational,
        });
    }
    Ok(check)
}

/// Direct `(q, p)` integration of the same motion, driven by the closed-form
/// force. Used as a cross-check of the characteristic formulation; the two
/// must agree wherever the momentum stays finite.
pub struct PositionSolution {
    params: PhysicalParams,
    sol: OdeSolution<2>,
    /// Set when the momentum guard stopped the run before the span end.
    pub stopped_early: Option<f64>,
}

impl PositionSolution {
    pub fn q_at(&self, t: f64) -> f64 {
        self.sol.sample(t)[0]
    }

    pub fn p_at(&self, t: f64) -> f64 {
        self.sol.sample(t)[1]
    }

    pub fn theta_at(&self, t: f64) -> f64 {
        self.params.theta_from_p(self.p_at(t))
    }

    pub fn t_end(&self) -> f64 {
        self.sol.t_end()
    }
}

pub fn integrate_positions(
    params: &PhysicalParams,
    pulse: &RadiationPulse,
    t_end: f64,
    opts: &IntegrateOptions,
) -> Result<PositionSolution, DynamicsError> {
    params.validate()?;
    let p = *params;
    let pl = pulse.clone();
    let system = move |t: f64, y: &[f64; 2]| {
        let qdot = p.qdot_from_p(y[1]);
        let f = force::force_closed(&p, &pl, t, y[0], qdot).expect("momentum map keeps |qdot| < 1");
        [qdot, f]
    };
    // stop before tan(theta) overflows; float comparison stays meaningful
    let p_cap = params.m.abs() * (FRAC_PI_2 - 1e-4).tan();
    let guard = [EventFn {
        label: "momentum-cap",
        crossing: Crossing::Falling,
        terminal: true,
        g: Box::new(move |_t, y: &[f64; 2]| p_cap - y[1].abs()),
    }];
    let sol = ode::solve(&system, 0.0, [0.0, 0.0], t_end, &opts.ode(), &guard)?;
    let stopped_early = sol.terminated_by.map(|e| e.t);
    Ok(PositionSolution {
        params: *params,
        sol,
        stopped_early,
    })
}
