//! Adaptive Dormand-Prince 5(4) integration with dense output and event
//! localization.
//!
//! This is deliberately small: fixed-dimension state via const generics, an
//! embedded 4th-order error estimate driving the step controller, the
//! standard quartic continuous extension for interpolation, and bisection of
//! sign-crossing event functions on that interpolant. All tolerances are
//! caller-supplied; defaults live in [`crate::defaults`].

use crate::defaults;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OdeError {
    #[error("span end {end} does not lie after start {start}")]
    EmptySpan { start: f64, end: f64 },
    #[error("step size underflow at t = {t} (h = {h:e}); last state retained")]
    StepUnderflow { t: f64, h: f64 },
    #[error("step budget of {max_steps} exhausted at t = {t}")]
    TooManySteps { t: f64, max_steps: usize },
    #[error("right-hand side returned a non-finite value at t = {t}")]
    NonFiniteRhs { t: f64 },
}

pub trait OdeSystem<const N: usize> {
    fn rhs(&self, t: f64, y: &[f64; N]) -> [f64; N];
}

impl<const N: usize, F: Fn(f64, &[f64; N]) -> [f64; N]> OdeSystem<N> for F {
    fn rhs(&self, t: f64, y: &[f64; N]) -> [f64; N] {
        self(t, y)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: defaults::RTOL,
            atol: defaults::ATOL,
            max_step: defaults::MAX_STEP,
            max_steps: 2_000_000,
        }
    }
}

/// Which way an event function must cross zero to fire.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Crossing {
    Rising,
    Falling,
    Any,
}

/// Scalar function of `(t, y)` whose sign change fires an event.
pub type EventGuard<'a, const N: usize> = Box<dyn Fn(f64, &[f64; N]) -> f64 + 'a>;

pub struct EventFn<'a, const N: usize> {
    pub label: &'a str,
    pub crossing: Crossing,
    pub terminal: bool,
    pub g: EventGuard<'a, N>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeEvent<const N: usize> {
    /// Index into the caller's event list.
    pub index: usize,
    pub t: f64,
    pub y: [f64; N],
}

/// One accepted step's quartic interpolant on `[t0, t0 + h]`.
#[derive(Debug, Clone, Copy)]
struct DenseSegment<const N: usize> {
    t0: f64,
    h: f64,
    rcont: [[f64; N]; 5],
}

impl<const N: usize> DenseSegment<N> {
    fn eval(&self, t: f64) -> [f64; N] {
        let s = (t - self.t0) / self.h;
        let s1 = 1.0 - s;
        let mut out = [0.0; N];
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = self.rcont[0][i]
                + s * (self.rcont[1][i]
                    + s1 * (self.rcont[2][i] + s * (self.rcont[3][i] + s1 * self.rcont[4][i])));
        }
        out
    }
}

pub struct OdeSolution<const N: usize> {
    pub ts: Vec<f64>,
    pub ys: Vec<[f64; N]>,
    pub events: Vec<OdeEvent<N>>,
    /// Event that stopped integration early, if any.
    pub terminated_by: Option<OdeEvent<N>>,
    segments: Vec<DenseSegment<N>>,
}

impl<const N: usize> OdeSolution<N> {
    pub fn t_start(&self) -> f64 {
        self.ts[0]
    }

    pub fn t_end(&self) -> f64 {
        *self.ts.last().expect("solution holds at least the start")
    }

    /// Interpolated state; clamps to the covered span.
    pub fn sample(&self, t: f64) -> [f64; N] {
        if self.segments.is_empty() || t <= self.t_start() {
            return self.ys[0];
        }
        if t >= self.t_end() {
            return *self.ys.last().unwrap();
        }
        let idx = match self
            .segments
            .binary_search_by(|seg| seg.t0.partial_cmp(&t).unwrap())
        {
            Ok(i) => i,
            Err(0) => 0,
            Err(i) => i - 1,
        };
        self.segments[idx].eval(t)
    }
}

// Dormand-Prince coefficients.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A2: [f64; 1] = [0.2];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [
    19372.0 / 6561.0,
    -25360.0 / 2187.0,
    64448.0 / 6561.0,
    -212.0 / 729.0,
];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
const A7: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];
// 5th-minus-4th order error weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
// Dense-output weights.
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

pub fn solve<const N: usize>(
    system: &impl OdeSystem<N>,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    opts: &OdeOptions,
    events: &[EventFn<'_, N>],
) -> Result<OdeSolution<N>, OdeError> {
    if !(t_end > t0) {
        return Err(OdeError::EmptySpan {
            start: t0,
            end: t_end,
        });
    }

    let mut sol = OdeSolution {
        ts: vec![t0],
        ys: vec![y0],
        events: Vec::new(),
        terminated_by: None,
        segments: Vec::new(),
    };

    let mut t = t0;
    let mut y = y0;
    let mut k1 = system.rhs(t, &y);
    let mut g_prev: Vec<f64> = events.iter().map(|e| (e.g)(t, &y)).collect();
    let mut h = (opts.max_step).min((t_end - t0) / 10.0).max(1e-8);
    let mut steps = 0usize;

    while t < t_end {
        if steps >= opts.max_steps {
            return Err(OdeError::TooManySteps {
                t,
                max_steps: opts.max_steps,
            });
        }
        steps += 1;
        h = h.min(t_end - t).min(opts.max_step);
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(OdeError::StepUnderflow { t, h });
        }

        let stage = |acc: &[f64], ks: &[[f64; N]]| -> [f64; N] {
            let mut out = y;
            for (a, k) in acc.iter().zip(ks) {
                for i in 0..N {
                    out[i] += h * a * k[i];
                }
            }
            out
        };

        let k2 = system.rhs(t + C[1] * h, &stage(&A2, &[k1]));
        let k3 = system.rhs(t + C[2] * h, &stage(&A3, &[k1, k2]));
        let k4 = system.rhs(t + C[3] * h, &stage(&A4, &[k1, k2, k3]));
        let k5 = system.rhs(t + C[4] * h, &stage(&A5, &[k1, k2, k3, k4]));
        let k6 = system.rhs(t + C[5] * h, &stage(&A6, &[k1, k2, k3, k4, k5]));
        let y_next = stage(&A7, &[k1, k2, k3, k4, k5, k6]);
        let k7 = system.rhs(t + h, &y_next);
        let ks = [k1, k2, k3, k4, k5, k6, k7];

        // weighted RMS of the embedded error estimate
        let mut err_sq = 0.0;
        let mut finite = true;
        for i in 0..N {
            let mut e = 0.0;
            for (w, k) in E.iter().zip(&ks) {
                e += w * k[i];
            }
            e *= h;
            let scale = opts.atol + opts.rtol * y[i].abs().max(y_next[i].abs());
            err_sq += (e / scale) * (e / scale);
            finite &= y_next[i].is_finite();
        }
        if !finite {
            return Err(OdeError::NonFiniteRhs { t });
        }
        let err = (err_sq / N as f64).sqrt();

        if err > 1.0 {
            h *= (0.9 * err.powf(-0.2)).max(0.2);
            continue;
        }

        // accepted: build the dense segment
        let mut rcont = [[0.0; N]; 5];
        for i in 0..N {
            let ydiff = y_next[i] - y[i];
            let bspl = h * k1[i] - ydiff;
            rcont[0][i] = y[i];
            rcont[1][i] = ydiff;
            rcont[2][i] = bspl;
            rcont[3][i] = ydiff - h * k7[i] - bspl;
            let mut dsum = 0.0;
            for (d, k) in D.iter().zip(&ks) {
                dsum += d * k[i];
            }
            rcont[4][i] = h * dsum;
        }
        let segment = DenseSegment { t0: t, h, rcont };

        let t_next = t + h;
        let mut stop: Option<OdeEvent<N>> = None;
        for (idx, ev) in events.iter().enumerate() {
            let g0 = g_prev[idx];
            let g1 = (ev.g)(t_next, &y_next);
            // a step landing exactly on zero fires once: the follow-up step
            // starting from zero must not re-fire the same crossing
            let fired = match ev.crossing {
                Crossing::Rising => g0 < 0.0 && g1 >= 0.0,
                Crossing::Falling => g0 > 0.0 && g1 <= 0.0,
                Crossing::Any => (g0 < 0.0 && g1 >= 0.0) || (g0 > 0.0 && g1 <= 0.0),
            };
            g_prev[idx] = g1;
            if !fired {
                continue;
            }
            let t_ev = bisect_event(&segment, &ev.g, t, t_next, g0);
            let event = OdeEvent {
                index: idx,
                t: t_ev,
                y: segment.eval(t_ev),
            };
            sol.events.push(event);
            if ev.terminal && stop.is_none_or(|s| event.t < s.t) {
                stop = Some(event);
            }
        }

        if let Some(event) = stop {
            // truncate the segment at the event and stop
            sol.segments.push(segment);
            sol.ts.push(event.t);
            sol.ys.push(event.y);
            sol.events.retain(|e| e.t <= event.t);
            sol.terminated_by = Some(event);
            return Ok(sol);
        }

        sol.segments.push(segment);
        sol.ts.push(t_next);
        sol.ys.push(y_next);
        t = t_next;
        y = y_next;
        k1 = k7; // FSAL

        let grow = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= grow;
    }

    Ok(sol)
}

fn bisect_event<const N: usize>(
    segment: &DenseSegment<N>,
    g: &(dyn Fn(f64, &[f64; N]) -> f64 + '_),
    mut lo: f64,
    mut hi: f64,
    g_lo: f64,
) -> f64 {
    let mut sign_lo = g_lo.signum();
    if sign_lo == 0.0 {
        return lo;
    }
    while hi - lo > defaults::EVENT_TIME_TOL {
        let mid = 0.5 * (lo + hi);
        let gm = g(mid, &segment.eval(mid));
        if gm.signum() == sign_lo {
            lo = mid;
            sign_lo = gm.signum();
        } else {
            hi = mid;
        }
    }
    hi
}
