//! Scenario files: a small versioned JSON schema and its resolution into
//! core types.
//!
//! Unknown keys are rejected so a typo fails loudly instead of silently
//! running the defaults. Every preset fills in params, pulse, and span;
//! explicit fields override the fills where that makes sense and error
//! where it does not (a pulse on the `static` preset, say).

use anyhow::{bail, Context, Result};
use pointfield::dynamics::IntegrateOptions;
use pointfield::model::Primitive;
use pointfield::{PhysicalParams, RadiationPulse};
use serde::{Deserialize, Serialize};
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    /// Zero pulse; the charge never leaves the origin.
    Static,
    /// Positive bare mass driven by a finite pulse (defaults provided).
    Stability,
    /// Negative bare mass hit by the incoming sine of amplitude `beta`.
    Instability,
    /// No time evolution: the crossing-sensitivity triple check only.
    Lemma1,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Static => "static",
            Preset::Stability => "stability",
            Preset::Instability => "instability",
            Preset::Lemma1 => "lemma1",
        }
    }
}

/// One pulse term; mirrors the model's primitives plus a convenience arch.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum TermSpec {
    SineWindow {
        amplitude: f64,
        wavenumber: f64,
        phase: f64,
        support: [f64; 2],
    },
    Bump {
        amplitude: f64,
        power: u32,
        support: [f64; 2],
    },
    /// Single sine arch on `[lo, hi]`: wavenumber and phase are derived so
    /// the window closes at both ends.
    SineArch { lo: f64, hi: f64, amplitude: f64 },
}

impl TermSpec {
    fn primitive(&self) -> Result<Primitive> {
        Ok(match *self {
            TermSpec::SineWindow {
                amplitude,
                wavenumber,
                phase,
                support,
            } => Primitive::SineWindow {
                amplitude,
                wavenumber,
                phase,
                support,
            },
            TermSpec::Bump {
                amplitude,
                power,
                support,
            } => Primitive::Bump {
                amplitude,
                power,
                support,
            },
            TermSpec::SineArch { lo, hi, amplitude } => {
                if !(lo < hi) {
                    bail!("sine_arch needs lo < hi, got [{lo}, {hi}]");
                }
                let w = std::f64::consts::PI / (hi - lo);
                Primitive::SineWindow {
                    amplitude,
                    wavenumber: w,
                    phase: -w * lo,
                    support: [lo, hi],
                }
            }
        })
    }
}

/// Pulse data: terms of the initial position profile and of the initial
/// velocity profile.
#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct PulseSpec {
    #[serde(default)]
    pub position: Vec<TermSpec>,
    #[serde(default)]
    pub velocity: Vec<TermSpec>,
}

impl PulseSpec {
    fn build(&self) -> Result<RadiationPulse> {
        let v0 = self
            .position
            .iter()
            .map(TermSpec::primitive)
            .collect::<Result<Vec<_>>>()?;
        let v1 = self
            .velocity
            .iter()
            .map(TermSpec::primitive)
            .collect::<Result<Vec<_>>>()?;
        Ok(RadiationPulse::new(v0, v1)?)
    }
}

#[derive(Debug, Clone, Copy, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSpec {
    pub rtol: Option<f64>,
    pub atol: Option<f64>,
    pub max_step: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    Trajectory,
    Events,
    Diagnostics,
    FieldSnapshots,
}

impl OutputKind {
    pub fn name(self) -> &'static str {
        match self {
            OutputKind::Trajectory => "trajectory",
            OutputKind::Events => "events",
            OutputKind::Diagnostics => "diagnostics",
            OutputKind::FieldSnapshots => "field_snapshots",
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

/// The scenario file as written on disk.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub version: u32,
    pub preset: Preset,
    pub a: Option<f64>,
    pub m: Option<f64>,
    /// Incoming-sine amplitude; instability preset only.
    pub beta: Option<f64>,
    pub pulse: Option<PulseSpec>,
    /// Integration window `[0, t_end]`; the joint problem always starts at
    /// the origin at rest, so the left endpoint must be 0.
    pub span: Option<[f64; 2]>,
    pub integrator: Option<IntegratorSpec>,
    pub outputs: Option<Vec<OutputKind>>,
    pub snapshot_times: Option<Vec<f64>>,
    pub snapshot_grid: Option<GridSpec>,
}

/// A scenario with every blank filled in and every cross-field rule checked.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub preset: Preset,
    pub params: PhysicalParams,
    pub beta: Option<f64>,
    pub pulse: RadiationPulse,
    /// Echo of the pulse terms for the manifest.
    pub pulse_spec: PulseSpec,
    pub t_end: f64,
    pub options: IntegrateOptions,
    pub outputs: Vec<OutputKind>,
    pub snapshot_times: Vec<f64>,
    pub snapshot_grid: Option<GridSpec>,
}

pub fn load(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read scenario file {}", path.display()))?;
    let file: ScenarioFile = serde_json::from_str(&text)
        .with_context(|| format!("schema error in {}", path.display()))?;
    resolve(file).with_context(|| format!("invalid scenario in {}", path.display()))
}

fn default_span(preset: Preset) -> f64 {
    match preset {
        Preset::Static => 10.0,
        Preset::Stability => 40.0,
        Preset::Instability => 60.0,
        Preset::Lemma1 => 0.0,
    }
}

pub fn resolve(file: ScenarioFile) -> Result<Scenario> {
    if file.version != SCHEMA_VERSION {
        bail!(
            "unsupported schema version {} (this build reads version {SCHEMA_VERSION})",
            file.version
        );
    }
    let preset = file.preset;
    let a = file.a.unwrap_or(1.0);
    let m = file.m.unwrap_or(match preset {
        Preset::Instability | Preset::Lemma1 => -1.0,
        _ => 1.0,
    });
    let params = PhysicalParams::new(a, m).context("params")?;

    if preset == Preset::Lemma1 {
        // pure closed-form check: nothing below applies
        if file.pulse.is_some()
            || file.span.is_some()
            || file.beta.is_some()
            || file.outputs.is_some()
            || file.snapshot_times.is_some()
            || file.snapshot_grid.is_some()
        {
            bail!("lemma1 takes only `a` and `m`");
        }
        if !(a > 0.0) {
            bail!("lemma1 requires a > 0, got a = {a}");
        }
        return Ok(Scenario {
            preset,
            params,
            beta: None,
            pulse: RadiationPulse::zero(),
            pulse_spec: PulseSpec::default(),
            t_end: 0.0,
            options: IntegrateOptions::default(),
            outputs: Vec::new(),
            snapshot_times: Vec::new(),
            snapshot_grid: None,
        });
    }

    let (pulse, pulse_spec, beta) = match preset {
        Preset::Static => {
            if file.pulse.is_some() {
                bail!("the static preset has no pulse; use the stability preset");
            }
            if file.beta.is_some() {
                bail!("`beta` belongs to the instability preset");
            }
            (RadiationPulse::zero(), PulseSpec::default(), None)
        }
        Preset::Stability => {
            if !(m > 0.0) {
                bail!("the stability preset needs m > 0, got m = {m}");
            }
            if file.beta.is_some() {
                bail!("`beta` belongs to the instability preset");
            }
            let spec = file.pulse.unwrap_or(PulseSpec {
                position: Vec::new(),
                velocity: vec![TermSpec::SineArch {
                    lo: 1.0,
                    hi: 2.0,
                    amplitude: 1.0,
                }],
            });
            let pulse = spec.build().context("pulse")?;
            (pulse, spec, None)
        }
        Preset::Instability => {
            if !(m < 0.0) {
                bail!("the instability preset needs m < 0, got m = {m}");
            }
            if !(a > 0.0) {
                bail!("the instability preset needs a > 0, got a = {a}");
            }
            if file.pulse.is_some() {
                bail!("the instability preset builds its pulse from `beta`");
            }
            let beta = file
                .beta
                .context("the instability preset needs `beta` (incoming amplitude)")?;
            if !beta.is_finite() || beta < 0.0 {
                bail!("`beta` must be finite and >= 0, got {beta}");
            }
            let pulse = if beta == 0.0 {
                RadiationPulse::zero()
            } else {
                RadiationPulse::incoming_sine(beta)
            };
            (pulse, PulseSpec::default(), Some(beta))
        }
        Preset::Lemma1 => unreachable!(),
    };

    let span = file.span.unwrap_or([0.0, default_span(preset)]);
    if span[0] != 0.0 {
        bail!("span must start at 0 (the joint problem starts at rest at the origin)");
    }
    if !(span[1] > 0.0) || !span[1].is_finite() {
        bail!("span end must be positive and finite, got {}", span[1]);
    }

    let mut options = IntegrateOptions::default();
    if let Some(integ) = file.integrator {
        if let Some(rtol) = integ.rtol {
            options.rtol = rtol;
        }
        if let Some(atol) = integ.atol {
            options.atol = atol;
        }
        if let Some(max_step) = integ.max_step {
            options.max_step = max_step;
        }
    }

    let outputs = file
        .outputs
        .unwrap_or_else(|| vec![OutputKind::Trajectory, OutputKind::Events]);
    let wants_snapshots = outputs.contains(&OutputKind::FieldSnapshots);
    if !wants_snapshots && (file.snapshot_times.is_some() || file.snapshot_grid.is_some()) {
        bail!("snapshot settings given but `field_snapshots` is not in outputs");
    }
    let snapshot_times = file.snapshot_times.unwrap_or_else(|| vec![span[1]]);
    if wants_snapshots {
        for &t in &snapshot_times {
            if !(0.0..=span[1]).contains(&t) {
                bail!("snapshot time {t} outside the span [0, {}]", span[1]);
            }
        }
    }
    if let Some(g) = file.snapshot_grid {
        if !(g.lo < g.hi) || g.n < 2 {
            bail!("snapshot grid needs lo < hi and n >= 2");
        }
    }

    Ok(Scenario {
        preset,
        params,
        beta,
        pulse,
        pulse_spec,
        t_end: span[1],
        options,
        outputs,
        snapshot_times,
        snapshot_grid: file.snapshot_grid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Scenario> {
        resolve(serde_json::from_str(text)?)
    }

    #[test]
    fn minimal_presets_resolve() {
        let s = parse(r#"{"version": 1, "preset": "static"}"#).unwrap();
        assert!(s.pulse.is_zero());
        assert_eq!(s.t_end, 10.0);

        let s = parse(r#"{"version": 1, "preset": "stability"}"#).unwrap();
        assert!(!s.pulse.is_zero());
        assert_eq!(s.params.m, 1.0);

        let s = parse(r#"{"version": 1, "preset": "instability", "beta": 1e-3}"#).unwrap();
        assert_eq!(s.params.m, -1.0);
        assert_eq!(s.beta, Some(1e-3));
    }

    #[test]
    fn unknown_keys_and_bad_versions_are_rejected() {
        assert!(parse(r#"{"version": 1, "preset": "static", "spam": 1}"#).is_err());
        assert!(parse(r#"{"version": 7, "preset": "static"}"#).is_err());
    }

    #[test]
    fn cross_field_rules() {
        // pulse on static, beta on stability, missing beta on instability
        assert!(parse(r#"{"version": 1, "preset": "static", "pulse": {}}"#).is_err());
        assert!(parse(r#"{"version": 1, "preset": "stability", "beta": 0.1}"#).is_err());
        assert!(parse(r#"{"version": 1, "preset": "instability"}"#).is_err());
        // wrong mass signs
        assert!(parse(r#"{"version": 1, "preset": "stability", "m": -1.0}"#).is_err());
        assert!(
            parse(r#"{"version": 1, "preset": "instability", "m": 1.0, "beta": 0.1}"#).is_err()
        );
        // span must start at zero
        assert!(parse(r#"{"version": 1, "preset": "static", "span": [1.0, 2.0]}"#).is_err());
    }

    #[test]
    fn custom_pulse_terms_build() {
        let s = parse(
            r#"{
                "version": 1, "preset": "stability",
                "pulse": {"velocity": [
                    {"shape": "bump", "amplitude": 0.4, "power": 4, "support": [-3.0, -1.0]},
                    {"shape": "sine_arch", "lo": -6.0, "hi": -4.5, "amplitude": -0.2}
                ]}
            }"#,
        )
        .unwrap();
        let (lo, hi) = s.pulse.support().unwrap();
        assert_eq!((lo, hi), (-6.0, -1.0));
        // incoming data sitting across the charge is not a radiation pulse
        assert!(parse(
            r#"{
                "version": 1, "preset": "stability",
                "pulse": {"velocity": [
                    {"shape": "sine_arch", "lo": -1.0, "hi": 1.0, "amplitude": 0.3}
                ]}
            }"#,
        )
        .is_err());
    }
}
