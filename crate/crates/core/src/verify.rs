//! End-to-end verification suite.
//!
//! Each check exercises one headline guarantee of the crate across module
//! boundaries — field against dynamics, closed forms against quadrature,
//! analytic solution against the finite-difference oracle — and returns a
//! structured report instead of panicking, so the same suite backs both the
//! acceptance test target and the command-line `verify` run.
//!
//! Tolerances are pinned here, next to the check that owns them, with a
//! note on why each number is attainable.

use crate::dynamics::{self, EdgeCrossing, EventKind, IntegrateOptions, Outcome};
use crate::field::{FieldSolution, Trajectory};
use crate::force;
use crate::model::{CharacteristicState, PhysicalParams, RadiationPulse};
use crate::oracle;
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::Write as _;
use std::time::Instant;

/// Outcome of one verification check.
#[derive(Debug, Clone)]
pub struct CheckReport {
    pub name: &'static str,
    pub passed: bool,
    /// Key measured numbers, and the failures if any.
    pub details: String,
    pub seconds: f64,
}

struct Check {
    name: &'static str,
    start: Instant,
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Check {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            start: Instant::now(),
            failures: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn require(&mut self, ok: bool, what: String) {
        if !ok {
            self.failures.push(what);
        }
    }

    fn note(&mut self, what: String) {
        self.notes.push(what);
    }

    fn finish(self) -> CheckReport {
        let seconds = self.start.elapsed().as_secs_f64();
        let passed = self.failures.is_empty();
        let mut details = String::new();
        for f in &self.failures {
            let _ = write!(details, "FAIL: {f}; ");
        }
        details.push_str(&self.notes.join("; "));
        CheckReport {
            name: self.name,
            passed,
            details,
            seconds,
        }
    }
}

/// Deterministic low-discrepancy samples in `[lo, hi)` (golden-ratio
/// sequence): reproducible "random" coverage without carrying an RNG.
fn golden_samples(n: usize, lo: f64, hi: f64) -> Vec<f64> {
    const PHI_FRAC: f64 = 0.618_033_988_749_894_9;
    (0..n)
        .map(|i| {
            let u = ((i as f64 + 1.0) * PHI_FRAC).fract();
            lo + (hi - lo) * u
        })
        .collect()
}

fn stability_setup() -> (PhysicalParams, RadiationPulse) {
    (
        PhysicalParams::new(1.0, 1.0).unwrap(),
        RadiationPulse::sine_burst(1.0, 2.0, 1.0).unwrap(),
    )
}

fn instability_setup(beta: f64) -> (PhysicalParams, RadiationPulse) {
    (
        PhysicalParams::new(1.0, -1.0).unwrap(),
        RadiationPulse::incoming_sine(beta),
    )
}

/// Negative-mass setup driven by a pulse with a C3 closure at its support
/// edges. Pulses that close only continuously (sine windows) shed
/// reduced-order solver error along the characteristics through their
/// edges, which would mask the grid oracle's interior second-order rate.
fn smooth_instability_setup(amplitude: f64) -> (PhysicalParams, RadiationPulse) {
    (
        PhysicalParams::new(1.0, -1.0).unwrap(),
        RadiationPulse::new(
            Vec::new(),
            vec![crate::model::Primitive::Bump {
                amplitude,
                power: 4,
                support: [-3.0, -1.0],
            }],
        )
        .unwrap(),
    )
}

/// Largest time with `|theta| <= cap` along a run, for confining samples to
/// states where both force routes are numerically meaningful.
fn time_while_theta_below(run: &dynamics::SolveResult, cap: f64) -> f64 {
    let (t0, t1) = run.span();
    match run.path.iter().find(|s| s.theta.abs() > cap) {
        None => t1,
        Some(first) => {
            let mut lo = t0;
            let mut hi = first.t;
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if run.state_at(mid).theta.abs() > cap {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            lo
        }
    }
}

/// Gate 1: The equilibrium is preserved exactly: zero pulse holds the charge at
/// the origin for both mass signs, and the field is the static kink.
pub fn check_static_exactness() -> CheckReport {
    let mut c = Check::new("static-exactness");
    let mut worst_state: f64 = 0.0;
    let mut worst_field: f64 = 0.0;
    for m in [1.0, -1.0] {
        let params = PhysicalParams::new(1.0, m).unwrap();
        let pulse = RadiationPulse::zero();
        let run = match dynamics::integrate(
            &params,
            &pulse.profiles(),
            CharacteristicState::initial(),
            100.0,
            &IntegrateOptions::default(),
        ) {
            Ok(run) => run,
            Err(e) => {
                c.require(false, format!("integration failed (m = {m}): {e}"));
                continue;
            }
        };
        for s in &run.path {
            worst_state = worst_state
                .max((s.d - s.t).abs())
                .max((s.b + s.t).abs())
                .max(s.theta.abs());
        }
        let traj = run.trajectory_with(0.05).unwrap();
        let field = FieldSolution::new(&params, &traj, &pulse).unwrap();
        for &t in &[0.5, 7.25, 43.0, 99.0] {
            for &s in &golden_samples(25, -90.0, 90.0) {
                if s.abs() < 1e-3 {
                    continue;
                }
                let u = field.sample(t, s).unwrap().u;
                worst_field = worst_field.max((u + 0.5 * s.abs()).abs());
            }
        }
    }
    c.require(
        worst_state <= 1e-9,
        format!("state deviation {worst_state:.3e} > 1e-9"),
    );
    c.require(
        worst_field <= 1e-10,
        format!("field deviation {worst_field:.3e} > 1e-10"),
    );
    let fast_enough = c.start.elapsed().as_secs_f64() < 1.0;
    c.require(fast_enough, "runtime >= 1 s".into());
    c.note(format!(
        "max state dev {worst_state:.2e}, max field dev {worst_field:.2e}"
    ));
    c.finish()
}

/// Gate 2: The field is C^1 across the light cone: one-sided gradients agree at
/// s = ±t along integrator trajectories.
pub fn check_cone_smoothness() -> CheckReport {
    let mut c = Check::new("cone-smoothness");
    let mut worst: f64 = 0.0;
    let scenarios: Vec<(PhysicalParams, RadiationPulse, f64)> = vec![
        {
            let (p, pulse) = stability_setup();
            (p, pulse, 8.0)
        },
        {
            let (p, pulse) = instability_setup(0.3);
            (p, pulse, 6.0)
        },
    ];
    for (params, pulse, t_end) in scenarios {
        let run = dynamics::integrate(
            &params,
            &pulse.profiles(),
            CharacteristicState::initial(),
            t_end,
            &IntegrateOptions::default(),
        )
        .unwrap();
        let traj = run.trajectory().unwrap();
        let field = FieldSolution::new(&params, &traj, &pulse).unwrap();
        let (_, t_hi) = traj.span();
        for &t in &golden_samples(20, 0.3, t_hi - 0.05) {
            match field.light_cone_residual(t) {
                Ok((left, right)) => {
                    worst = worst
                        .max(left.du_t.abs())
                        .max(left.du_s.abs())
                        .max(right.du_t.abs())
                        .max(right.du_s.abs());
                }
                Err(e) => c.require(false, format!("residual at t = {t} failed: {e}")),
            }
        }
    }
    c.require(
        worst <= 1e-8,
        format!("cone gradient mismatch {worst:.3e} > 1e-8"),
    );
    c.note(format!("max one-sided gradient mismatch {worst:.2e}"));
    c.finish()
}

/// Gate 3: The jump force and the closed-form force agree along driven runs.
/// Sampling stays at `|theta| <= pi/2 - 1e-2`: nearer light speed both
/// routes lose all absolute precision to 1/cos^2 cancellations, so an
/// absolute 1e-8 comparison is meaningful only on this range.
pub fn check_force_equivalence() -> CheckReport {
    let mut c = Check::new("force-equivalence");
    let mut worst: f64 = 0.0;
    let mut n_samples = 0usize;
    let scenarios: Vec<(PhysicalParams, RadiationPulse, f64)> = vec![
        {
            let (p, pulse) = stability_setup();
            (p, pulse, 8.0)
        },
        {
            let (p, pulse) = instability_setup(0.2);
            (p, pulse, 10.0)
        },
    ];
    for (params, pulse, t_end) in scenarios {
        let run = dynamics::integrate(
            &params,
            &pulse.profiles(),
            CharacteristicState::initial(),
            t_end,
            &IntegrateOptions::default(),
        )
        .unwrap();
        let t_cap = time_while_theta_below(&run, FRAC_PI_2 - 1e-2).min(run.span().1);
        let traj = run.trajectory().unwrap();
        let field = FieldSolution::new(&params, &traj, &pulse).unwrap();
        let t_hi = t_cap.min(traj.span().1) - 0.02;
        for &t in &golden_samples(500, 0.05, t_hi) {
            // both routes read the same tabulated trajectory the field was
            // built on; mixing in the integrator's dense output here would
            // measure interpolation differences, not the force identity
            let jump = force::force_jump_at(&field, t).unwrap();
            let closed = force::force_closed(&params, &pulse, t, traj.q(t), traj.qdot(t)).unwrap();
            worst = worst.max((jump - closed).abs());
            n_samples += 1;
        }
    }
    c.require(
        worst <= 1e-8,
        format!("force route mismatch {worst:.3e} > 1e-8"),
    );
    c.note(format!(
        "max |f_jump - f_closed| {worst:.2e} over {n_samples} states"
    ));
    c.finish()
}

/// Gate 4: The five closed-form jump quantities match one-sided derivatives of
/// the sampled field at a ladder of velocities.
pub fn check_jump_table() -> CheckReport {
    let mut c = Check::new("jump-table");
    let pulse = RadiationPulse::sine_burst(-9.0, -7.0, 0.4).unwrap();
    let t_probe = 3.0;
    let mut worst: f64 = 0.0;
    for &v in &[0.0, 0.3, -0.3, 0.9, -0.9] {
        // smooth ramp from rest to cruise velocity v by t = 1
        let traj = Trajectory::tabulate(0.0, 5.0, 2500, |t| {
            if t < 1.0 {
                (
                    v * (t.powi(3) - 0.5 * t.powi(4)),
                    v * (3.0 * t * t - 2.0 * t.powi(3)),
                )
            } else {
                (v * (t - 0.5), v)
            }
        })
        .unwrap();
        let params = PhysicalParams::new(1.0, 1.0).unwrap();
        let field = FieldSolution::new(&params, &traj, &pulse).unwrap();
        let qdot = traj.qdot(t_probe);
        let expect = crate::field::jump_set(params.a, qdot).unwrap();
        let fs = field.sample(t_probe, traj.q(t_probe)).unwrap();
        let free = crate::field::free_field(&pulse, t_probe, traj.q(t_probe));
        let (wsl, wsr) = (fs.u_s_left - free.v_s, fs.u_s_right - free.v_s);
        let (wtl, wtr) = (fs.u_t_left - free.v_t, fs.u_t_right - free.v_t);
        let got = [
            wsr - wsl,
            wtr - wtl,
            wsr * wtr - wsl * wtl,
            wtr * wtr - wtl * wtl,
            wsr * wsr - wsl * wsl,
        ];
        let want = [
            expect.w_s,
            expect.w_t,
            expect.w_s_w_t,
            expect.w_t_sq,
            expect.w_s_sq,
        ];
        for (g, w) in got.iter().zip(&want) {
            worst = worst.max((g - w).abs());
        }
    }
    c.require(
        worst <= 1e-8,
        format!("jump-table mismatch {worst:.3e} > 1e-8"),
    );
    c.note(format!("max jump mismatch {worst:.2e} at 5 velocities"));
    c.finish()
}

/// Gate 5: Positive mass is quantitatively stable: the post-radiation arc obeys
/// the conserved combination to 1e-8 relative, the fitted decay rate is
/// a^2/2m within 5%, and no fuzzed positive-mass scenario ever reaches the
/// light-speed stop.
pub fn check_stability_quantitative() -> CheckReport {
    let mut c = Check::new("stability-quantitative");
    let (params, pulse) = stability_setup();
    // tight tolerances: the invariant is compared at the 1e-8 level, which
    // default tolerances (rtol 1e-10) do not reach over a 30-unit span
    let run = dynamics::integrate(
        &params,
        &pulse.profiles(),
        CharacteristicState::initial(),
        30.0,
        &IntegrateOptions::tight(),
    )
    .unwrap();
    let cleared = run.radiation_cleared;
    c.require(cleared.is_some(), "radiation never cleared".into());
    if let Some(t_clear) = cleared {
        let mut reference = None;
        let mut worst_drift: f64 = 0.0;
        for s in run.path.iter().filter(|s| s.t >= t_clear) {
            // below ~1e-3 the invariant's relative error is dominated by
            // absolute integration error divided by theta — not signal
            if s.theta.abs() < 1e-3 {
                continue;
            }
            let inv = dynamics::no_radiation_invariant(&params, s.t, s.theta).unwrap();
            match reference {
                None => reference = Some(inv),
                Some(r) => worst_drift = worst_drift.max(((inv - r) / r).abs()),
            }
        }
        c.require(
            worst_drift <= 1e-8,
            format!("invariant drift {worst_drift:.3e} > 1e-8"),
        );
        c.note(format!("invariant drift {worst_drift:.2e}"));
    }
    let rate = run.fit_decay_rate();
    let expect = 0.5 * params.a * params.a / params.m;
    match rate {
        Some(r) => {
            c.require(
                ((r - expect) / expect).abs() <= 0.05,
                format!("decay rate {r:.4} not within 5% of {expect}"),
            );
            c.note(format!("fitted decay rate {r:.4} (target {expect})"));
        }
        None => c.require(false, "decay-rate fit unavailable".into()),
    }

    // scenario fuzz: positive mass must never hit the light-speed stop
    let ms = golden_samples(50, 0.2, 4.0);
    let amps = golden_samples(50, -2.0, 2.0);
    let los = golden_samples(50, 0.5, 3.0);
    let widths = golden_samples(50, 0.5, 2.0);
    let a_vals = golden_samples(50, 0.3, 2.0);
    let mut light_speed_hits = 0usize;
    for i in 0..50 {
        let p = PhysicalParams::new(a_vals[i], ms[i]).unwrap();
        let fuzz_pulse = RadiationPulse::sine_burst(los[i], los[i] + widths[i], amps[i]).unwrap();
        let fuzz_run = dynamics::integrate(
            &p,
            &fuzz_pulse.profiles(),
            CharacteristicState::initial(),
            20.0,
            &IntegrateOptions::default(),
        );
        match fuzz_run {
            Ok(r) => {
                if matches!(r.outcome, Outcome::LightSpeed { .. }) {
                    light_speed_hits += 1;
                }
            }
            Err(e) => c.require(false, format!("fuzz case {i} failed: {e}")),
        }
    }
    c.require(
        light_speed_hits == 0,
        format!("{light_speed_hits}/50 positive-mass runs hit light speed"),
    );
    c.note("50 fuzzed positive-mass scenarios stayed subluminal".into());
    c.finish()
}

/// Gate 6: The negative-mass blow-up time matches its closed form.
pub fn check_blow_up_time() -> CheckReport {
    let mut c = Check::new("blow-up-time");
    let params = PhysicalParams::new(1.0, -1.0).unwrap();
    let init = CharacteristicState {
        t: 0.0,
        d: 0.0,
        b: 0.0,
        theta: -PI / 6.0,
    };
    let run = dynamics::integrate(
        &params,
        &RadiationPulse::zero().profiles(),
        init,
        10.0,
        &IntegrateOptions::default(),
    )
    .unwrap();
    let expect = 2.0 * (2.0 + 3.0f64.sqrt()).ln();
    match run.outcome {
        Outcome::LightSpeed { t } => {
            let rel = ((t - expect) / expect).abs();
            c.require(
                rel <= 1e-4,
                format!("stop time {t:.6} vs closed form {expect:.6} (rel {rel:.2e})"),
            );
            c.note(format!("stop at t = {t:.6}, closed form {expect:.6}"));
        }
        other => c.require(false, format!("expected light-speed stop, got {other:?}")),
    }
    let fast_enough = c.start.elapsed().as_secs_f64() < 1.0;
    c.require(fast_enough, "runtime >= 1 s".into());
    c.finish()
}

/// Gate 7: The crossing sensitivity agrees across its three independent
/// evaluations, matches the frozen unit-parameter value, and is the
/// first-order limit of the crossing angle.
pub fn check_sensitivity_triple() -> CheckReport {
    let mut c = Check::new("sensitivity-triple");
    let params = PhysicalParams::new(1.0, -1.0).unwrap();
    match dynamics::radiation_crossing_sensitivity(&params) {
        Ok(check) => {
            c.require(
                check.spread() <= 1e-8,
                format!("triple spread {:.3e} > 1e-8", check.spread()),
            );
            let z = check.value();
            c.require(
                (z - 0.0981197).abs() <= 1e-6,
                format!("value {z:.7} departs from 0.0981197"),
            );
            c.note(format!("Z = {z:.7}, spread {:.1e}", check.spread()));
            // first-order limit: the ratio error shrinks linearly in beta
            let mut errs = Vec::new();
            for &beta in &[1e-2, 1e-3, 1e-4] {
                let y = dynamics::radiation_crossing_angle(&params, beta).unwrap();
                errs.push((y / beta - z).abs());
            }
            for pair in errs.windows(2) {
                let ratio = pair[0] / pair[1];
                c.require(
                    (5.0..=20.0).contains(&ratio),
                    format!("ratio-error decade step {ratio:.2} not O(beta)"),
                );
            }
            c.note(format!(
                "crossing-angle ratio errors {:.2e}/{:.2e}/{:.2e}",
                errs[0], errs[1], errs[2]
            ));
        }
        Err(e) => c.require(false, format!("sensitivity computation failed: {e}")),
    }
    c.finish()
}

/// Gate 8: End-to-end instability: the charge leaves the radiation window with a
/// negative angle (sign matching the first-order prediction) and reaches
/// the light-speed stop in finite time, across the whole amplitude sweep.
pub fn check_instability_end_to_end() -> CheckReport {
    let mut c = Check::new("instability-end-to-end");
    let sweep_start = Instant::now();
    let betas = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5];
    let mut focus_ratio = None;
    for &beta in &betas {
        let (params, pulse) = instability_setup(beta);
        let run = dynamics::integrate(
            &params,
            &pulse.profiles(),
            CharacteristicState::initial(),
            60.0,
            &IntegrateOptions::default(),
        )
        .unwrap();
        let exit = run
            .events
            .iter()
            .find(|e| e.kind == EventKind::BackwardEdge(EdgeCrossing::Exit));
        match exit {
            Some(e) => {
                c.require(
                    e.state.theta < 0.0,
                    format!("beta {beta:.0e}: exit angle {} not negative", e.state.theta),
                );
                if beta == 1e-3 {
                    focus_ratio = Some(e.state.theta / beta);
                }
            }
            None => c.require(false, format!("beta {beta:.0e}: no window exit")),
        }
        c.require(
            matches!(run.outcome, Outcome::LightSpeed { .. }),
            format!(
                "beta {beta:.0e}: outcome {:?} is not a light-speed stop",
                run.outcome
            ),
        );
    }
    let sweep_seconds = sweep_start.elapsed().as_secs_f64();
    c.require(
        sweep_seconds < 10.0,
        format!("sweep took {sweep_seconds:.1} s >= 10 s"),
    );
    if let Some(r) = focus_ratio {
        let params = PhysicalParams::new(1.0, -1.0).unwrap();
        c.note(format!(
            "beta 1e-3: theta/beta = {r:.5} (first-order forward coefficient {:.5})",
            -dynamics::forward_crossing_sensitivity(&params)
        ));
    }
    c.note(format!("sweep over 5 amplitudes in {sweep_seconds:.2} s"));
    c.finish()
}

/// Gate 9: The finite-difference oracle corroborates the analytic field at
/// second order, and the momentum-balance residual vanishes linearly with
/// the tube width.
pub fn check_fd_oracle() -> CheckReport {
    let mut c = Check::new("fd-oracle");
    let t_end = 5.0;
    let (params, pulse) = smooth_instability_setup(-0.5);
    let run = dynamics::integrate(
        &params,
        &pulse.profiles(),
        CharacteristicState::initial(),
        t_end,
        &IntegrateOptions::default(),
    )
    .unwrap();
    let traj = run.trajectory().unwrap();
    let field = FieldSolution::new(&params, &traj, &pulse).unwrap();
    match oracle::convergence_study(
        &field,
        params.a,
        &pulse,
        &traj,
        t_end,
        &[(0.02, 0.08), (0.01, 0.04), (0.005, 0.02)],
    ) {
        Ok(report) => {
            let errs: Vec<f64> = report.levels.iter().map(|l| l.max_err).collect();
            let order = report.min_order();
            c.require(
                order >= 1.8,
                format!("empirical order {order:.2} < 1.8 (errors {errs:?})"),
            );
            c.note(format!(
                "FD errors {:.2e}/{:.2e}/{:.2e}, min order {order:.2}",
                errs[0], errs[1], errs[2]
            ));
        }
        Err(e) => c.require(false, format!("convergence study failed: {e}")),
    }

    let (sp, spulse) = stability_setup();
    let srun = dynamics::integrate(
        &sp,
        &spulse.profiles(),
        CharacteristicState::initial(),
        6.0,
        &IntegrateOptions::default(),
    )
    .unwrap();
    let straj = srun.trajectory().unwrap();
    let sfield = FieldSolution::new(&sp, &straj, &spulse).unwrap();
    let epses = [1e-1, 1e-2, 1e-3];
    let mut residuals = Vec::new();
    for &eps in &epses {
        match oracle::momentum_balance_residual(&sfield, 1.0, 3.0, eps, 1e-9) {
            Ok(r) => residuals.push(r),
            Err(e) => c.require(false, format!("balance at eps {eps} failed: {e}")),
        }
    }
    if residuals.len() == 3 {
        c.require(
            residuals[0] > residuals[1] && residuals[1] > residuals[2],
            format!("residuals not decreasing: {residuals:?}"),
        );
        let slope = (residuals[0] / residuals[2]).ln() / (epses[0] / epses[2]).ln();
        c.require(
            slope >= 0.7,
            format!("residual decay slope {slope:.2} below linear"),
        );
        c.note(format!(
            "balance residuals {:.2e}/{:.2e}/{:.2e} (slope {slope:.2})",
            residuals[0], residuals[1], residuals[2]
        ));
    }
    let seconds = c.start.elapsed().as_secs_f64();
    c.require(seconds < 60.0, format!("oracle checks took {seconds:.1} s"));
    c.finish()
}

/// Gate 10: The characteristic system and a direct (q, p) integration of the
/// same motion agree while the angle stays a safe distance from light
/// speed.
pub fn check_cross_formulation() -> CheckReport {
    let mut c = Check::new("cross-formulation");
    let scenarios: Vec<(PhysicalParams, RadiationPulse, f64)> = vec![
        {
            let (p, pulse) = stability_setup();
            (p, pulse, 10.0)
        },
        {
            let (p, pulse) = instability_setup(1e-2);
            (p, pulse, 60.0)
        },
    ];
    let mut worst_q: f64 = 0.0;
    let mut worst_theta: f64 = 0.0;
    for (params, pulse, t_end) in scenarios {
        let run = dynamics::integrate(
            &params,
            &pulse.profiles(),
            CharacteristicState::initial(),
            t_end,
            &IntegrateOptions::tight(),
        )
        .unwrap();
        let t_cap = time_while_theta_below(&run, FRAC_PI_2 - 1e-3);
        let pos = dynamics::integrate_positions(&params, &pulse, t_cap, &IntegrateOptions::tight());
        let pos = match pos {
            Ok(p) => p,
            Err(e) => {
                c.require(false, format!("(q, p) integration failed: {e}"));
                continue;
            }
        };
        let t_hi = t_cap.min(pos.t_end());
        for &t in &golden_samples(100, 0.0, t_hi) {
            let cs = run.state_at(t);
            worst_q = worst_q.max((cs.q() - pos.q_at(t)).abs());
            worst_theta = worst_theta.max((cs.theta - pos.theta_at(t)).abs());
        }
    }
    c.require(
        worst_q <= 1e-8,
        format!("position mismatch {worst_q:.3e} > 1e-8"),
    );
    c.require(
        worst_theta <= 1e-8,
        format!("angle mismatch {worst_theta:.3e} > 1e-8"),
    );
    c.note(format!(
        "max |q| mismatch {worst_q:.2e}, max angle mismatch {worst_theta:.2e}"
    ));
    c.finish()
}

/// Run every check in order.
pub fn run_all() -> Vec<CheckReport> {
    vec![
        check_static_exactness(),
        check_cone_smoothness(),
        check_force_equivalence(),
        check_jump_table(),
        check_stability_quantitative(),
        check_blow_up_time(),
        check_sensitivity_triple(),
        check_instability_end_to_end(),
        check_fd_oracle(),
        check_cross_formulation(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_samples_are_deterministic_and_in_range() {
        let a = golden_samples(100, 2.0, 3.0);
        let b = golden_samples(100, 2.0, 3.0);
        assert_eq!(a, b);
        assert!(a.iter().all(|&x| (2.0..3.0).contains(&x)));
        // low discrepancy: no two consecutive samples collide
        let mut sorted = a.clone();
        sorted.sort_by(|x, y| x.partial_cmp(y).unwrap());
        for w in sorted.windows(2) {
            assert!(w[1] - w[0] > 1e-4);
        }
    }

    #[test]
    fn report_shape_is_usable() {
        let report = check_blow_up_time();
        assert_eq!(report.name, "blow-up-time");
        assert!(!report.details.is_empty());
        assert!(report.seconds >= 0.0);
    }
}
