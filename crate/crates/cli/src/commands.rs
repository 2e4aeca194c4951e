//! The four subcommands: scenario runs, amplitude sweeps, the built-in
//! verification suite, and one-off field snapshots.

use crate::artifacts::{self, DiagnosticsRow, Manifest, OutDir, SweepRow};
use crate::scenario::{self, OutputKind, Preset, Scenario};
use crate::Failure;
use anyhow::{anyhow, Context, Result};
use pointfield::dynamics::{self, EdgeCrossing, EventKind, IntegrateOptions, Outcome, SolveResult};
use pointfield::field::{FieldSolution, Trajectory};
use pointfield::model::CharacteristicState;
use pointfield::{force, verify, PhysicalParams, RadiationPulse};
use std::f64::consts::FRAC_PI_2;
use std::path::Path;

/// Force formulas and retarded-time inversion both degrade within this
/// margin of light speed (1/cos^2 cancellations), so derived artifacts
/// stop sampling there; the integration itself runs to its own margin.
const ARTIFACT_THETA_CAP: f64 = FRAC_PI_2 - 1e-2;

pub fn verdict(run: &SolveResult) -> String {
    match run.outcome {
        Outcome::Rest => format!("REST({})", run.final_state().theta),
        Outcome::Decaying => match run.fit_decay_rate() {
            Some(rate) => format!("DECAYING({rate})"),
            None => "DECAYING(rate unfitted)".to_string(),
        },
        Outcome::LightSpeed { t } => format!("LIGHTSPEED({t})"),
        Outcome::SpanEnded => format!("UNDECIDED({})", run.span().1),
    }
}

fn outcome_label(run: &SolveResult) -> &'static str {
    match run.outcome {
        Outcome::Rest => "rest",
        Outcome::Decaying => "decaying",
        Outcome::LightSpeed { .. } => "light_speed",
        Outcome::SpanEnded => "span_ended",
    }
}

/// Last time with `|theta| <= cap`, bisected on the dense output.
fn theta_cap_time(run: &SolveResult, cap: f64) -> f64 {
    let (t0, t1) = run.span();
    match run.path.iter().find(|s| s.theta.abs() > cap) {
        None => t1,
        Some(first) => {
            let mut lo = t0;
            let mut hi = first.t;
            for _ in 0..60 {
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

/// Resample the run into a trajectory that stays clear of light speed, so
/// the field reconstruction accepts it even after a blow-up run.
fn subluminal_trajectory(run: &SolveResult) -> Result<(Trajectory, f64)> {
    let t_cap = theta_cap_time(run, ARTIFACT_THETA_CAP);
    let n = ((t_cap / pointfield::defaults::TRAJECTORY_KNOT_DT).ceil() as usize).max(8);
    let traj = Trajectory::tabulate(0.0, t_cap, n, |t| {
        let s = run.state_at(t);
        (s.q(), s.qdot())
    })?;
    Ok((traj, t_cap))
}

fn diagnostics_rows(
    params: &PhysicalParams,
    pulse: &RadiationPulse,
    field: &FieldSolution<'_>,
    t_cap: f64,
) -> Result<Vec<DiagnosticsRow>> {
    let traj = field.trajectory();
    let n = 201;
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let t = t_cap * i as f64 / (n - 1) as f64;
        let f_jump = force::force_jump_at(field, t)?;
        let f_closed = force::force_closed(params, pulse, t, traj.q(t), traj.qdot(t))?;
        rows.push(DiagnosticsRow {
            t,
            f_closed,
            f_jump,
        });
    }
    Ok(rows)
}

fn default_snapshot_grid(t_max: f64, pulse: &RadiationPulse) -> (f64, f64, usize) {
    let extent = pulse
        .support()
        .map(|(lo, hi)| lo.abs().max(hi.abs()))
        .unwrap_or(0.0);
    let half = t_max + extent + 2.0;
    (-half, half, 801)
}

fn lemma1_line(params: &PhysicalParams) -> Result<String> {
    let check = dynamics::radiation_crossing_sensitivity(params)?;
    Ok(format!(
        "SENSITIVITY(Z = {}, spread = {:e})",
        check.value(),
        check.spread()
    ))
}

pub fn run(scenario_path: &Path, out: &OutDir) -> Result<(), Failure> {
    let sc = scenario::load(scenario_path).map_err(Failure::Config)?;
    let mut artifacts: Vec<String> = Vec::new();

    let verdict_line = if sc.preset == Preset::Lemma1 {
        lemma1_line(&sc.params).map_err(Failure::Numerical)?
    } else {
        let run = dynamics::integrate(
            &sc.params,
            &sc.pulse.profiles(),
            CharacteristicState::initial(),
            sc.t_end,
            &sc.options,
        )
        .map_err(|e| {
            Failure::Numerical(anyhow!(e).context(format!(
                "integration of preset `{}` failed",
                sc.preset.name()
            )))
        })?;
        write_run_artifacts(&sc, &run, out, &mut artifacts).map_err(Failure::Numerical)?;
        verdict(&run)
    };

    let manifest_path = out.file("manifest.json");
    artifacts.push("manifest.json".to_string());
    artifacts::write_manifest(
        &manifest_path,
        &Manifest {
            schema_version: scenario::SCHEMA_VERSION,
            command: "run",
            preset: sc.preset.name(),
            a: sc.params.a,
            m: sc.params.m,
            beta: sc.beta,
            pulse: sc.pulse_spec.clone(),
            t_end: sc.t_end,
            outputs: sc.outputs.iter().map(|o| o.name()).collect(),
            tolerances: (&sc.options).into(),
            verdict: verdict_line.clone(),
            artifacts,
        },
    )
    .map_err(Failure::Config)?;

    println!("{verdict_line}");
    Ok(())
}

fn write_run_artifacts(
    sc: &Scenario,
    run: &SolveResult,
    out: &OutDir,
    artifacts: &mut Vec<String>,
) -> Result<()> {
    if sc.outputs.contains(&OutputKind::Trajectory) {
        artifacts::write_trajectory(&out.file("trajectory.csv"), run)?;
        artifacts.push("trajectory.csv".to_string());
    }
    if sc.outputs.contains(&OutputKind::Events) {
        artifacts::write_events(&out.file("events.csv"), &run.events)?;
        artifacts.push("events.csv".to_string());
    }

    let wants_diag = sc.outputs.contains(&OutputKind::Diagnostics);
    let wants_snaps = sc.outputs.contains(&OutputKind::FieldSnapshots);
    if !(wants_diag || wants_snaps) {
        return Ok(());
    }

    let (traj, t_cap) = subluminal_trajectory(run)?;
    let field = FieldSolution::new(&sc.params, &traj, &sc.pulse)?;
    if wants_diag {
        let rows = diagnostics_rows(&sc.params, &sc.pulse, &field, t_cap)?;
        artifacts::write_diagnostics(&out.file("diagnostics.csv"), &rows)?;
        artifacts.push("diagnostics.csv".to_string());
    }
    if wants_snaps {
        let t_max = sc.snapshot_times.iter().cloned().fold(0.0, f64::max);
        let grid = sc
            .snapshot_grid
            .map(|g| (g.lo, g.hi, g.n))
            .unwrap_or_else(|| default_snapshot_grid(t_max, &sc.pulse));
        for (i, &t) in sc.snapshot_times.iter().enumerate() {
            if t > t_cap {
                return Err(anyhow!(
                    "snapshot time {t} is past the subluminal range [0, {t_cap:.6}] \
                     of this run; pick an earlier time"
                ));
            }
            let name = format!("field_snapshot_{i}.csv");
            artifacts::write_snapshot(&out.file(&name), &field, t, grid)?;
            artifacts.push(name);
        }
    }
    Ok(())
}

pub struct SweepConfig {
    pub betas: Vec<f64>,
    pub a: f64,
    pub m: f64,
    pub t_end: f64,
}

fn sweep_point(params: &PhysicalParams, beta: f64, t_end: f64) -> SweepRow {
    let pulse = if beta == 0.0 {
        RadiationPulse::zero()
    } else {
        RadiationPulse::incoming_sine(beta)
    };
    let run = dynamics::integrate(
        params,
        &pulse.profiles(),
        CharacteristicState::initial(),
        t_end,
        &IntegrateOptions::default(),
    );
    match run {
        Ok(run) => {
            let theta_at_exit = run
                .events
                .iter()
                .find(|e| e.kind == EventKind::BackwardEdge(EdgeCrossing::Exit))
                .map(|e| e.state.theta);
            let t_lightspeed = match run.outcome {
                Outcome::LightSpeed { t } => Some(t),
                _ => None,
            };
            SweepRow {
                beta,
                outcome: outcome_label(&run).to_string(),
                theta_at_exit,
                t_lightspeed,
                error: None,
            }
        }
        Err(e) => SweepRow {
            beta,
            outcome: "error".to_string(),
            theta_at_exit: None,
            t_lightspeed: None,
            error: Some(e.to_string()),
        },
    }
}

pub fn sweep(cfg: &SweepConfig, out: &OutDir) -> Result<(), Failure> {
    let check = || -> Result<PhysicalParams> {
        if cfg.betas.is_empty() {
            anyhow::bail!("--betas needs at least one amplitude");
        }
        for &b in &cfg.betas {
            if !b.is_finite() || b < 0.0 {
                anyhow::bail!("amplitudes must be finite and >= 0, got {b}");
            }
        }
        if !(cfg.m < 0.0) {
            anyhow::bail!(
                "the sweep runs the instability preset and needs m < 0, got {}",
                cfg.m
            );
        }
        if !(cfg.a > 0.0) {
            anyhow::bail!("the instability preset needs a > 0, got {}", cfg.a);
        }
        if !(cfg.t_end > 0.0) || !cfg.t_end.is_finite() {
            anyhow::bail!("--t-end must be positive and finite, got {}", cfg.t_end);
        }
        Ok(PhysicalParams::new(cfg.a, cfg.m)?)
    };
    let params = check().map_err(Failure::Config)?;

    // points are independent; run them on scoped threads, results in order
    let mut rows: Vec<Option<SweepRow>> = Vec::new();
    rows.resize_with(cfg.betas.len(), || None);
    std::thread::scope(|scope| {
        for (slot, &beta) in rows.iter_mut().zip(&cfg.betas) {
            let params = &params;
            scope.spawn(move || {
                *slot = Some(sweep_point(params, beta, cfg.t_end));
            });
        }
    });
    let rows: Vec<SweepRow> = rows
        .into_iter()
        .map(|r| r.expect("thread filled slot"))
        .collect();

    let path = out.file("sweep.csv");
    artifacts::write_sweep(&path, &rows).map_err(Failure::Config)?;
    artifacts::write_manifest(
        &out.file("manifest.json"),
        &Manifest {
            schema_version: scenario::SCHEMA_VERSION,
            command: "sweep",
            preset: Preset::Instability.name(),
            a: cfg.a,
            m: cfg.m,
            beta: None,
            pulse: Default::default(),
            t_end: cfg.t_end,
            outputs: Vec::new(),
            tolerances: (&IntegrateOptions::default()).into(),
            verdict: format!("SWEEP({} points)", rows.len()),
            artifacts: vec!["sweep.csv".to_string(), "manifest.json".to_string()],
        },
    )
    .map_err(Failure::Config)?;

    println!("SWEEP({} points) -> {}", rows.len(), path.display());
    Ok(())
}

pub fn verify_suite() -> Result<(), Failure> {
    let reports = verify::run_all();
    let mut failed = 0usize;
    for r in &reports {
        let status = if r.passed { "PASS" } else { "FAIL" };
        println!("{status} {}: {}", r.name, r.details);
        eprintln!("  {} took {:.2} s", r.name, r.seconds);
        if !r.passed {
            failed += 1;
        }
    }
    if failed > 0 {
        return Err(Failure::Numerical(anyhow!(
            "{failed} of {} checks failed",
            reports.len()
        )));
    }
    Ok(())
}

pub fn field_snapshot(
    scenario_path: &Path,
    t: f64,
    grid: Option<(f64, f64, usize)>,
    out: &OutDir,
) -> Result<(), Failure> {
    let sc = scenario::load(scenario_path).map_err(Failure::Config)?;
    if sc.preset == Preset::Lemma1 {
        return Err(Failure::Config(anyhow!(
            "lemma1 has no field; snapshot one of the other presets"
        )));
    }
    if !(0.0..=sc.t_end).contains(&t) {
        return Err(Failure::Config(anyhow!(
            "snapshot time {t} outside the scenario span [0, {}]",
            sc.t_end
        )));
    }
    let run = dynamics::integrate(
        &sc.params,
        &sc.pulse.profiles(),
        CharacteristicState::initial(),
        sc.t_end,
        &sc.options,
    )
    .map_err(|e| Failure::Numerical(anyhow!(e)))?;
    let (traj, t_cap) = subluminal_trajectory(&run).map_err(Failure::Numerical)?;
    if t > t_cap {
        return Err(Failure::Numerical(anyhow!(
            "snapshot time {t} is past the subluminal range [0, {t_cap:.6}] of this run"
        )));
    }
    let field = FieldSolution::new(&sc.params, &traj, &sc.pulse)
        .map_err(|e| Failure::Numerical(anyhow!(e)))?;
    let grid = grid.unwrap_or_else(|| default_snapshot_grid(t, &sc.pulse));
    let path = out.file("field_snapshot.csv");
    artifacts::write_snapshot(&path, &field, t, grid)
        .context("field snapshot")
        .map_err(Failure::Numerical)?;
    println!("FIELD_SNAPSHOT(t = {t}) -> {}", path.display());
    Ok(())
}
