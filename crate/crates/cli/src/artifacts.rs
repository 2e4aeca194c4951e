//! Artifact files: CSV emitters and the run manifest.
//!
//! Everything written here is deterministic for a given scenario file —
//! floats go through the shortest round-trip formatting and the manifest
//! carries no clocks — so reruns diff clean.

use anyhow::{Context, Result};
use pointfield::dynamics::{EdgeCrossing, Event, EventKind, SolveResult};
use pointfield::field::FieldSolution;
use pointfield::model::CharacteristicState;
use serde::Serialize;
use std::path::{Path, PathBuf};

/// Where artifacts land: `--out-dir` flag, else `POINTFIELD_OUT_DIR`, else
/// the current directory.
pub struct OutDir {
    root: PathBuf,
}

impl OutDir {
    pub fn resolve(flag: Option<PathBuf>) -> Result<Self> {
        let root = flag
            .or_else(|| std::env::var_os("POINTFIELD_OUT_DIR").map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."));
        std::fs::create_dir_all(&root)
            .with_context(|| format!("cannot create output directory {}", root.display()))?;
        Ok(Self { root })
    }

    pub fn file(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }
}

fn open(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    csv::Writer::from_path(path).with_context(|| format!("cannot write {}", path.display()))
}

fn state_fields(s: &CharacteristicState) -> [f64; 6] {
    [s.t, s.d, s.b, s.theta, s.q(), s.qdot()]
}

/// Accepted integrator states, one row per step: `t,d,b,theta,q,qdot`.
pub fn write_trajectory(path: &Path, run: &SolveResult) -> Result<()> {
    let mut w = open(path)?;
    w.write_record(["t", "d", "b", "theta", "q", "qdot"])?;
    for s in &run.path {
        w.serialize(state_fields(s))?;
    }
    w.flush()?;
    Ok(())
}

pub fn event_label(kind: EventKind) -> &'static str {
    match kind {
        EventKind::LightSpeed => "light_speed",
        EventKind::ForwardEdge(EdgeCrossing::Enter) => "forward_edge_enter",
        EventKind::ForwardEdge(EdgeCrossing::Exit) => "forward_edge_exit",
        EventKind::BackwardEdge(EdgeCrossing::Enter) => "backward_edge_enter",
        EventKind::BackwardEdge(EdgeCrossing::Exit) => "backward_edge_exit",
        EventKind::Rest => "rest",
    }
}

/// Detected events with the state at each: `t,kind,d,b,theta,q,qdot`.
pub fn write_events(path: &Path, events: &[Event]) -> Result<()> {
    let mut w = open(path)?;
    w.write_record(["t", "kind", "d", "b", "theta", "q", "qdot"])?;
    for e in events {
        let f = state_fields(&e.state);
        w.write_record([
            f[0].to_string(),
            event_label(e.kind).to_string(),
            f[1].to_string(),
            f[2].to_string(),
            f[3].to_string(),
            f[4].to_string(),
            f[5].to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// One force-consistency row per sample: `t,f_closed,f_jump,residual`.
pub struct DiagnosticsRow {
    pub t: f64,
    pub f_closed: f64,
    pub f_jump: f64,
}

pub fn write_diagnostics(path: &Path, rows: &[DiagnosticsRow]) -> Result<()> {
    let mut w = open(path)?;
    w.write_record(["t", "f_closed", "f_jump", "residual"])?;
    for r in rows {
        w.serialize((r.t, r.f_closed, r.f_jump, (r.f_jump - r.f_closed).abs()))?;
    }
    w.flush()?;
    Ok(())
}

/// Field values on a grid at a fixed time: `t,s,u,u_t,u_s`. On-path rows
/// (where the gradient jumps) carry the two-sided means.
pub fn write_snapshot(
    path: &Path,
    field: &FieldSolution<'_>,
    t: f64,
    grid: (f64, f64, usize),
) -> Result<()> {
    let (lo, hi, n) = grid;
    let mut w = open(path)?;
    w.write_record(["t", "s", "u", "u_t", "u_s"])?;
    for i in 0..n {
        let s = lo + (hi - lo) * i as f64 / (n - 1) as f64;
        let sample = field
            .sample(t, s)
            .with_context(|| format!("field sample at t = {t}, s = {s}"))?;
        let u_t = 0.5 * (sample.u_t_left + sample.u_t_right);
        let u_s = 0.5 * (sample.u_s_left + sample.u_s_right);
        w.serialize((t, s, sample.u, u_t, u_s))?;
    }
    w.flush()?;
    Ok(())
}

/// One sweep point. `error` is set when that run failed; the sweep itself
/// carries on.
pub struct SweepRow {
    pub beta: f64,
    pub outcome: String,
    pub theta_at_exit: Option<f64>,
    pub t_lightspeed: Option<f64>,
    pub error: Option<String>,
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Sweep summary: `beta,outcome,theta_at_exit,t_lightspeed,theta_over_beta,error`.
pub fn write_sweep(path: &Path, rows: &[SweepRow]) -> Result<()> {
    let mut w = open(path)?;
    w.write_record([
        "beta",
        "outcome",
        "theta_at_exit",
        "t_lightspeed",
        "theta_over_beta",
        "error",
    ])?;
    for r in rows {
        let ratio = match (r.theta_at_exit, r.beta) {
            (Some(th), b) if b > 0.0 => Some(th / b),
            _ => None,
        };
        w.write_record([
            r.beta.to_string(),
            r.outcome.clone(),
            opt(r.theta_at_exit),
            opt(r.t_lightspeed),
            opt(ratio),
            r.error.clone().unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Everything needed to reproduce and interpret a run, minus wall-clock
/// noise: parameters, tolerances, the verdict, and the artifact names.
#[derive(Serialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub command: &'static str,
    pub preset: &'static str,
    pub a: f64,
    pub m: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    pub pulse: crate::scenario::PulseSpec,
    pub t_end: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub outputs: Vec<&'static str>,
    pub tolerances: Tolerances,
    pub verdict: String,
    pub artifacts: Vec<String>,
}

#[derive(Serialize)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
    pub light_speed_margin: f64,
    pub rest_tol: f64,
}

impl From<&pointfield::dynamics::IntegrateOptions> for Tolerances {
    fn from(o: &pointfield::dynamics::IntegrateOptions) -> Self {
        Self {
            rtol: o.rtol,
            atol: o.atol,
            max_step: o.max_step,
            light_speed_margin: o.light_speed_margin,
            rest_tol: o.rest_tol,
        }
    }
}

pub fn write_manifest(path: &Path, manifest: &Manifest) -> Result<()> {
    let mut text = serde_json::to_string_pretty(manifest)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}
