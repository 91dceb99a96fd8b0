use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::delay::{DelaySpec, GainSpec, InitialHistory, PositionProfile, VelocityProfile};
use crate::dynamics::{AuditToggles, IntegratorConfig, Model, SimulationOptions};
use crate::kernel::{KernelSpec, PronyTerm};
use crate::operators::{build_feedback, build_nonlinearity, build_spectrum, NonlinearitySpec};
use crate::{Error, Result};

/// Galerkin truncation of the Dirichlet Laplacian on `(0, length)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct SpectrumConfig {
    pub n_modes: usize,
    pub length: f64,
}

/// Observation sub-interval `(a, b)` of the feedback indicator.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct ObservationConfig {
    pub a: f64,
    pub b: f64,
}

/// Prony terms; an empty list switches memory off.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct KernelConfig {
    pub terms: Vec<PronyTerm>,
}

/// Modal shape as `(wavenumber, coefficient)` pairs, wavenumbers from 1.
pub type Shape = Vec<(usize, f64)>;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields))]
pub enum PositionHistoryConfig {
    /// `u₀(t) = shape`.
    Constant { shape: Shape },
    /// `u₀(t) = shape · (1 + slope · max(t, −t_hist))`.
    Ramp { shape: Shape, slope: f64, t_hist: f64 },
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields))]
pub enum VelocityHistoryConfig {
    /// `g(s) = shape`.
    Constant { shape: Shape },
    /// `g(s) = shape · cos(frequency · s)`.
    Sinusoidal { shape: Shape, frequency: f64 },
    /// `g = u₀'`.
    Consistent,
}

/// Initial data; both shapes are multiplied by `amplitude`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct HistoryConfig {
    pub amplitude: f64,
    pub position: PositionHistoryConfig,
    pub velocity: VelocityHistoryConfig,
}

#[cfg(feature = "serde")]
fn default_cadence() -> usize {
    10
}

#[cfg(feature = "serde")]
fn default_true() -> bool {
    true
}

/// A complete problem description.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct ScenarioConfig {
    pub name: String,
    pub spectrum: SpectrumConfig,
    /// Full domain when absent.
    #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
    pub observation: Option<ObservationConfig>,
    pub kernel: KernelConfig,
    pub delay: DelaySpec,
    pub gain: GainSpec,
    pub nonlinearity: NonlinearitySpec,
    pub history: HistoryConfig,
    pub integrator: IntegratorConfig,
    pub horizon: f64,
    /// Steps between recorded samples.
    #[cfg_attr(feature = "serde", serde(default = "default_cadence"))]
    pub cadence: usize,
    #[cfg_attr(feature = "serde", serde(default))]
    pub audits: AuditToggles,
    /// Compute energies (and therefore audits) during runs.
    #[cfg_attr(feature = "serde", serde(default = "default_true"))]
    pub energy: bool,
    /// Allow runs whose hypotheses fail.
    #[cfg_attr(feature = "serde", serde(default))]
    pub exploratory: bool,
}

fn expand(shape: &Shape, n: usize, what: &str) -> Result<Vec<f64>> {
    let mut out = vec![0.0; n];
    for &(mode, c) in shape {
        if mode == 0 || mode > n {
            return Err(Error::InconsistentConfig(format!("{what} shape names mode {mode}, valid range is 1..={n}")));
        }
        out[mode - 1] += c;
    }
    Ok(out)
}

impl ScenarioConfig {
    /// Cross-field checks that make the config unusable when they fail.
    pub fn check_consistency(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InconsistentConfig(m));
        let s = &self.spectrum;
        if s.n_modes == 0 {
            return bad("n_modes must be at least 1".into());
        }
        if !(s.length.is_finite() && s.length > 0.0) {
            return bad(format!("domain length must be positive, got {}", s.length));
        }
        if let Some(o) = self.observation {
            if !(0.0 <= o.a && o.a < o.b && o.b <= s.length) {
                return bad(format!("observation interval ({}, {}) must lie inside (0, {})", o.a, o.b, s.length));
            }
        }
        if !(self.integrator.dt.is_finite() && self.integrator.dt > 0.0) {
            return bad("dt must be positive".into());
        }
        if !(self.horizon.is_finite() && self.horizon >= 0.0) {
            return bad("horizon must be finite and non-negative".into());
        }
        if self.cadence == 0 {
            return bad("cadence must be at least 1".into());
        }
        if !self.history.amplitude.is_finite() {
            return bad("history amplitude must be finite".into());
        }
        if self.integrator.dt > self.delay.tau_bar {
            return bad(format!("dt = {} exceeds tau_bar = {}", self.integrator.dt, self.delay.tau_bar));
        }
        Ok(())
    }

    /// The kernel, `None` when memory is off. Hypothesis violations surface
    /// as the kernel constructor's errors.
    pub fn kernel_spec(&self) -> Result<Option<KernelSpec>> {
        if self.kernel.terms.is_empty() {
            Ok(None)
        } else {
            KernelSpec::new(self.kernel.terms.clone()).map(Some)
        }
    }

    pub fn initial_history(&self) -> Result<InitialHistory> {
        let n = self.spectrum.n_modes;
        let a = self.history.amplitude;
        let (pshape, pprof) = match &self.history.position {
            PositionHistoryConfig::Constant { shape } => (expand(shape, n, "position")?, PositionProfile::Constant),
            PositionHistoryConfig::Ramp { shape, slope, t_hist } => {
                (expand(shape, n, "position")?, PositionProfile::Ramp { slope: *slope, t_hist: *t_hist })
            }
        };
        let (vshape, vprof) = match &self.history.velocity {
            VelocityHistoryConfig::Constant { shape } => (expand(shape, n, "velocity")?, VelocityProfile::Constant),
            VelocityHistoryConfig::Sinusoidal { shape, frequency } => {
                (expand(shape, n, "velocity")?, VelocityProfile::Sinusoidal { frequency: *frequency })
            }
            VelocityHistoryConfig::Consistent => (vec![0.0; n], VelocityProfile::Consistent),
        };
        let h = InitialHistory::new(pshape, pprof, vshape, vprof)?;
        Ok(h.scaled(a))
    }

    /// Assembles the model. Fails on inconsistent fields and invalid parts.
    pub fn build_model(&self) -> Result<Model> {
        self.check_consistency()?;
        let spectrum = build_spectrum(self.spectrum.n_modes, self.spectrum.length)?;
        let memory = self.kernel_spec()?;
        let (a, b) = self.observation.map_or((0.0, self.spectrum.length), |o| (o.a, o.b));
        let feedback = build_feedback(&spectrum, a, b)?;
        let nonlinearity = build_nonlinearity(&self.nonlinearity, &spectrum)?;
        self.delay.validate()?;
        self.gain.validate()?;
        let history = self.initial_history()?;
        Ok(Model { spectrum, memory, feedback, nonlinearity, delay: self.delay.clone(), gain: self.gain.clone(), history })
    }

    /// Simulation settings taken from the config.
    pub fn simulation_options(&self) -> SimulationOptions {
        SimulationOptions {
            integrator: self.integrator,
            horizon: self.horizon,
            cadence: self.cadence,
            energy: self.energy,
            audits: self.audits,
            ..SimulationOptions::default()
        }
    }

    /// Copy with the initial data scaled to `amplitude`.
    pub fn with_amplitude(&self, amplitude: f64) -> ScenarioConfig {
        let mut c = self.clone();
        c.history.amplitude = amplitude;
        c
    }
}
