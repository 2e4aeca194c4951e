//! Field reconstruction from a trajectory.
//!
//! Once the charge trajectory `q(t)` is known, the field is determined in
//! closed form. Splitting off the smooth incoming wave `V` (the source-free
//! evolution of the pulse data), the sourced remainder `w` is piecewise
//! built from the two retarded times: `T+` inverts `tau -> q(tau) + tau`
//! along forward characteristics, `T-` inverts `tau -> q(tau) - tau` along
//! backward ones. Both maps are strictly monotone for subluminal motion, so
//! the inverses are global and root-finding is safe.
//!
//! The full field is `u = w + V` with
//!
//! ```text
//!          (a/2) * s                      s < -t        (undisturbed left)
//!   w   =  (a/2) * (T+(s + t) - t)       -t < s < q(t)  (behind the charge)
//!          (a/2) * (T-(s - t) - t)       q(t) < s < t   (ahead of the charge)
//!          (a/2) * (-s)                   s > t         (undisturbed right)
//! ```
//!
//! `u` is continuous everywhere and C1 across the light cone `s = +-t`; its
//! gradient jumps only across the charge path, and those jumps have the
//! closed forms in [`jump_set`]. Evaluation at a branch boundary returns
//! both one-sided gradients rather than failing.

use crate::defaults;
use crate::model::{PhysicalParams, RadiationPulse};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldError {
    #[error("trajectory needs at least two knots")]
    TooFewKnots,
    #[error("trajectory knots must have strictly increasing, finite times")]
    UnorderedKnots,
    #[error("trajectory reaches |qdot| = {qdot} beyond the subluminal margin")]
    NotSubluminal { qdot: f64 },
    #[error("trajectory must start from rest at the origin, got q(0) = {q}, qdot(0) = {qdot}")]
    NotFromRest { q: f64, qdot: f64 },
    #[error("trajectory leaves the light cone of the origin at t = {t} (q = {q})")]
    OutsideCone { t: f64, q: f64 },
    #[error("characteristic label {x} outside the reachable range [{lo}, {hi}]")]
    OutOfDomain { x: f64, lo: f64, hi: f64 },
    #[error("time {t} outside the trajectory span [{lo}, {hi}]")]
    OutOfSpan { t: f64, lo: f64, hi: f64 },
    #[error("retarded-time iteration stalled at residual {residual:e} for label {x}")]
    RootFind { x: f64, residual: f64 },
    #[error("jump formulas are singular at |qdot| >= 1, got {qdot}")]
    LightSpeed { qdot: f64 },
}

/// One sample of the trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Knot {
    pub t: f64,
    pub q: f64,
    pub qdot: f64,
}

/// Piecewise-cubic Hermite trajectory. The interpolant reproduces the knot
/// positions and velocities exactly, so `qdot` is the true derivative of the
/// interpolated `q` at every knot.
#[derive(Debug, Clone)]
pub struct Trajectory {
    knots: Vec<Knot>,
}

impl Trajectory {
    pub fn from_knots(knots: Vec<Knot>) -> Result<Self, FieldError> {
        if knots.len() < 2 {
            return Err(FieldError::TooFewKnots);
        }
        for pair in knots.windows(2) {
            if !(pair[1].t > pair[0].t) {
                return Err(FieldError::UnorderedKnots);
            }
        }
        for k in &knots {
            if !(k.t.is_finite() && k.q.is_finite() && k.qdot.is_finite()) {
                return Err(FieldError::UnorderedKnots);
            }
            if k.qdot.abs() > 1.0 - defaults::SUBLUMINAL_MARGIN {
                return Err(FieldError::NotSubluminal { qdot: k.qdot });
            }
        }
        Ok(Self { knots })
    }

    /// The charge that never moves.
    pub fn stationary(t_end: f64) -> Self {
        Self::from_knots(vec![
            Knot {
                t: 0.0,
                q: 0.0,
                qdot: 0.0,
            },
            Knot {
                t: t_end,
                q: 0.0,
                qdot: 0.0,
            },
        ])
        .expect("stationary trajectory is always valid")
    }

    /// Tabulate a closed-form trajectory `t -> (q, qdot)` on `n + 1` knots.
    pub fn tabulate(
        t0: f64,
        t1: f64,
        n: usize,
        f: impl Fn(f64) -> (f64, f64),
    ) -> Result<Self, FieldError> {
        let knots = (0..=n)
            .map(|i| {
                let t = t0 + (t1 - t0) * i as f64 / n as f64;
                let (q, qdot) = f(t);
                Knot { t, q, qdot }
            })
            .collect();
        Self::from_knots(knots)
    }

    pub fn knots(&self) -> &[Knot] {
        &self.knots
    }

    pub fn span(&self) -> (f64, f64) {
        (self.knots[0].t, self.knots[self.knots.len() - 1].t)
    }

    fn segment(&self, t: f64) -> usize {
        // index i with knots[i].t <= t <= knots[i+1].t (clamped)
        let n = self.knots.len();
        let mut lo = 0usize;
        let mut hi = n - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.knots[mid].t <= t {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    fn check_span(&self, t: f64) -> Result<(), FieldError> {
        let (lo, hi) = self.span();
        let slack = 1e-12 * (1.0 + hi.abs());
        if t < lo - slack || t > hi + slack {
            return Err(FieldError::OutOfSpan { t, lo, hi });
        }
        Ok(())
    }

    pub fn q(&self, t: f64) -> f64 {
        self.hermite(t).0
    }

    pub fn qdot(&self, t: f64) -> f64 {
        self.hermite(t).1
    }

    fn hermite(&self, t: f64) -> (f64, f64) {
        let i = self.segment(t.clamp(self.knots[0].t, self.knots[self.knots.len() - 1].t));
        let k0 = self.knots[i];
        let k1 = self.knots[i + 1];
        let h = k1.t - k0.t;
        let x = (t - k0.t) / h;
        let x2 = x * x;
        let x3 = x2 * x;
        let q = (2.0 * x3 - 3.0 * x2 + 1.0) * k0.q
            + (x3 - 2.0 * x2 + x) * h * k0.qdot
            + (-2.0 * x3 + 3.0 * x2) * k1.q
            + (x3 - x2) * h * k1.qdot;
        let qdot = (6.0 * x2 - 6.0 * x) / h * k0.q
            + (3.0 * x2 - 4.0 * x + 1.0) * k0.qdot
            + (-6.0 * x2 + 6.0 * x) / h * k1.q
            + (3.0 * x2 - 2.0 * x) * k1.qdot;
        (q, qdot)
    }

    /// Retarded time along forward characteristics: the unique `tau` in the
    /// span with `q(tau) + tau = x`. Monotone because `qdot > -1`.
    pub fn retarded_time_plus(&self, x: f64) -> Result<f64, FieldError> {
        let (t0, t1) = self.span();
        let g = |tau: f64| self.q(tau) + tau;
        self.invert_monotone(x, g, |tau| self.qdot(tau) + 1.0, t0, t1, g(t0), g(t1))
    }

    /// Retarded time along backward characteristics: the unique `tau` with
    /// `q(tau) - tau = x`. Monotone (decreasing) because `qdot < 1`.
    pub fn retarded_time_minus(&self, x: f64) -> Result<f64, FieldError> {
        let (t0, t1) = self.span();
        let g = |tau: f64| self.q(tau) - tau;
        self.invert_monotone(x, g, |tau| self.qdot(tau) - 1.0, t0, t1, g(t0), g(t1))
    }

    #[allow(clippy::too_many_arguments)] // private solver kernel; callers pass precomputed endpoint values
    fn invert_monotone(
        &self,
        x: f64,
        g: impl Fn(f64) -> f64,
        gprime: impl Fn(f64) -> f64,
        t0: f64,
        t1: f64,
        g0: f64,
        g1: f64,
    ) -> Result<f64, FieldError> {
        let (lo_val, hi_val) = if g0 <= g1 { (g0, g1) } else { (g1, g0) };
        let slack = defaults::ROOT_TOL.max(1e-14 * (1.0 + x.abs()));
        if x < lo_val - slack || x > hi_val + slack {
            return Err(FieldError::OutOfDomain {
                x,
                lo: lo_val,
                hi: hi_val,
            });
        }
        if (g0 - x).abs() <= slack {
            return Ok(t0);
        }
        if (g1 - x).abs() <= slack {
            return Ok(t1);
        }

        // bisection bracket, then Newton polish inside it
        let increasing = g1 > g0;
        let (mut lo, mut hi) = (t0, t1);
        for _ in 0..80 {
            if hi - lo <= 1e-15 * (1.0 + hi.abs()) {
                break;
            }
            let mid = 0.5 * (lo + hi);
            let gm = g(mid);
            if (gm - x).abs() <= defaults::ROOT_TOL {
                return Ok(mid);
            }
            if (gm < x) == increasing {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-6 {
                // Newton from the midpoint; the slope is bounded away from
                // zero by the subluminal margin, so this converges fast
                let mut tau = 0.5 * (lo + hi);
                for _ in 0..8 {
                    let r = g(tau) - x;
                    if r.abs() <= defaults::ROOT_TOL {
                        return Ok(tau);
                    }
                    let next = tau - r / gprime(tau);
                    if !(next >= lo && next <= hi) {
                        break;
                    }
                    tau = next;
                }
            }
        }
        let tau = 0.5 * (lo + hi);
        let residual = (g(tau) - x).abs();
        if residual <= defaults::ROOT_TOL * 10.0 {
            Ok(tau)
        } else {
            Err(FieldError::RootFind { x, residual })
        }
    }
}

/// The smooth incoming wave `V` and its first derivatives: the source-free
/// evolution of the pulse data, valid on the whole plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeField {
    pub v: f64,
    pub v_t: f64,
    pub v_s: f64,
}

pub fn free_field(pulse: &RadiationPulse, t: f64, s: f64) -> FreeField {
    let v0 = pulse.v0();
    let v1 = pulse.v1();
    let (l, r) = (s - t, s + t);
    FreeField {
        v: 0.5 * (v0.value(l) + v0.value(r)) + 0.5 * (v1.integral(r) - v1.integral(l)),
        v_t: 0.5 * (v0.derivative(r) - v0.derivative(l)) + 0.5 * (v1.value(r) + v1.value(l)),
        v_s: 0.5 * (v0.derivative(r) + v0.derivative(l)) + 0.5 * (v1.value(r) - v1.value(l)),
    }
}

/// Which closed-form piece of `w` applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    OutsideLeft,
    InnerLeft,
    InnerRight,
    OutsideRight,
}

/// Field value with one-sided gradients. Off the branch boundaries the left
/// and right entries coincide.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub t: f64,
    pub s: f64,
    pub u: f64,
    pub u_t_left: f64,
    pub u_t_right: f64,
    pub u_s_left: f64,
    pub u_s_right: f64,
}

impl FieldSample {
    pub fn is_two_sided(&self) -> bool {
        self.u_t_left != self.u_t_right || self.u_s_left != self.u_s_right
    }
}

/// Residual of the C1 match across one light-cone line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeResidual {
    pub du_t: f64,
    pub du_s: f64,
}

/// The reconstructed field of a given trajectory and pulse.
pub struct FieldSolution<'a> {
    a: f64,
    trajectory: &'a Trajectory,
    pulse: &'a RadiationPulse,
}

impl<'a> FieldSolution<'a> {
    /// The closed form assumes the charge starts at rest at the origin and
    /// therefore never leaves the light cone of the initial kink; both are
    /// checked here.
    pub fn new(
        params: &PhysicalParams,
        trajectory: &'a Trajectory,
        pulse: &'a RadiationPulse,
    ) -> Result<Self, FieldError> {
        let first = trajectory.knots()[0];
        if first.t != 0.0 || first.q.abs() > 1e-12 || first.qdot.abs() > 1e-12 {
            return Err(FieldError::NotFromRest {
                q: first.q,
                qdot: first.qdot,
            });
        }
        for k in trajectory.knots() {
            if k.q.abs() > k.t + 1e-12 {
                return Err(FieldError::OutsideCone { t: k.t, q: k.q });
            }
        }
        Ok(Self {
            a: params.a,
            trajectory,
            pulse,
        })
    }

    pub fn trajectory(&self) -> &Trajectory {
        self.trajectory
    }

    /// Evaluate one branch's closed form at `(t, s)`, returning
    /// `(u, u_t, u_s)`. The branch need not contain `(t, s)`; this is what
    /// one-sided limits are made of.
    pub fn branch_gradient(
        &self,
        t: f64,
        s: f64,
        branch: Branch,
    ) -> Result<(f64, f64, f64), FieldError> {
        let half_a = 0.5 * self.a;
        let fv = free_field(self.pulse, t, s);
        match branch {
            Branch::OutsideLeft => Ok((half_a * s + fv.v, fv.v_t, half_a + fv.v_s)),
            Branch::OutsideRight => Ok((-half_a * s + fv.v, fv.v_t, -half_a + fv.v_s)),
            Branch::InnerLeft => {
                let tau = self.trajectory.retarded_time_plus(s + t)?;
                let den = self.trajectory.qdot(tau) + 1.0;
                Ok((
                    half_a * (tau - t) + fv.v,
                    half_a * (1.0 / den - 1.0) + fv.v_t,
                    half_a / den + fv.v_s,
                ))
            }
            Branch::InnerRight => {
                let tau = self.trajectory.retarded_time_minus(s - t)?;
                let den = self.trajectory.qdot(tau) - 1.0;
                Ok((
                    half_a * (tau - t) + fv.v,
                    half_a * (-1.0 / den - 1.0) + fv.v_t,
                    half_a / den + fv.v_s,
                ))
            }
        }
    }

    fn classify(&self, s: f64, cone_left: f64, q: f64, cone_right: f64) -> Branch {
        if s < cone_left {
            Branch::OutsideLeft
        } else if s < q {
            Branch::InnerLeft
        } else if s < cone_right {
            Branch::InnerRight
        } else {
            Branch::OutsideRight
        }
    }

    /// Evaluate the field at `(t, s)`. On a branch boundary the two
    /// gradient sides are the one-sided limits of the adjacent branches;
    /// the value itself is continuous.
    pub fn sample(&self, t: f64, s: f64) -> Result<FieldSample, FieldError> {
        self.trajectory.check_span(t)?;
        if t < -1e-12 {
            let (lo, hi) = self.trajectory.span();
            return Err(FieldError::OutOfSpan { t, lo, hi });
        }
        let q = self.trajectory.q(t);
        let btol = 1e-12 * (1.0 + t.abs() + s.abs());
        let left = self.classify(s - 2.0 * btol, -t, q, t);
        let right = self.classify(s + 2.0 * btol, -t, q, t);
        let (u, u_t_left, u_s_left) = self.branch_gradient(t, s, left)?;
        let (u_t_right, u_s_right) = if right == left {
            (u_t_left, u_s_left)
        } else {
            let (_, u_t, u_s) = self.branch_gradient(t, s, right)?;
            (u_t, u_s)
        };
        Ok(FieldSample {
            t,
            s,
            u,
            u_t_left,
            u_t_right,
            u_s_left,
            u_s_right,
        })
    }

    /// One-sided C1 residuals across the light-cone lines `s = -t` and
    /// `s = +t`.
    pub fn light_cone_residual(&self, t: f64) -> Result<(ConeResidual, ConeResidual), FieldError> {
        let at = |s: f64, inner: Branch, outer: Branch| -> Result<ConeResidual, FieldError> {
            let (_, out_t, out_s) = self.branch_gradient(t, s, outer)?;
            let (_, in_t, in_s) = self.branch_gradient(t, s, inner)?;
            Ok(ConeResidual {
                du_t: (in_t - out_t).abs(),
                du_s: (in_s - out_s).abs(),
            })
        };
        Ok((
            at(-t, Branch::InnerLeft, Branch::OutsideLeft)?,
            at(t, Branch::InnerRight, Branch::OutsideRight)?,
        ))
    }
}

/// Closed-form jumps across the charge path at velocity `qdot`, for the
/// sourced part `w` of the field: the gradient jumps, and the jumps of the
/// quadratic monomials entering momentum density and flux.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpSet {
    pub w_s: f64,
    pub w_t: f64,
    pub w_s_w_t: f64,
    pub w_t_sq: f64,
    pub w_s_sq: f64,
}

pub fn jump_set(a: f64, qdot: f64) -> Result<JumpSet, FieldError> {
    if !(qdot.abs() < 1.0) {
        return Err(FieldError::LightSpeed { qdot });
    }
    let den = qdot * qdot - 1.0;
    let den2 = den * den;
    Ok(JumpSet {
        w_s: a / den,
        w_t: -a * qdot / den,
        w_s_w_t: -a * a * qdot * qdot / den2,
        w_t_sq: a * a * qdot * qdot * qdot / den2,
        w_s_sq: a * a * qdot / den2,
    })
}
