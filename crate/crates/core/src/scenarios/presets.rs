use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use super::config::{
    HistoryConfig, KernelConfig, ObservationConfig, PositionHistoryConfig, ScenarioConfig, SpectrumConfig,
    VelocityHistoryConfig,
};
use super::validate::validate;
use crate::delay::{DelayFamily, DelaySpec, GainSpec};
use crate::dynamics::{AuditToggles, IntegratorConfig};
use crate::kernel::PronyTerm;
use crate::operators::NonlinearitySpec;
use crate::{Error, Result};

/// Names accepted by [`preset`].
pub const PRESET_NAMES: [&str; 4] = ["power-source-small", "integral-source-small", "no-delay-linear", "destabilizing-gain"];

/// Fraction of `ρ` the small presets scale their data to.
pub const SMALL_FRACTION: f64 = 0.5;

fn base(name: &str) -> ScenarioConfig {
    ScenarioConfig {
        name: name.into(),
        spectrum: SpectrumConfig { n_modes: 32, length: PI },
        observation: None,
        kernel: KernelConfig { terms: vec![PronyTerm { weight: 1.0, rate: 2.0 }] },
        delay: DelaySpec { tau_bar: 1.0, profile: DelayFamily::Constant { tau: 0.5 } },
        gain: GainSpec::Constant { k0: 0.0 },
        nonlinearity: NonlinearitySpec::None,
        history: HistoryConfig {
            amplitude: 1.0,
            position: PositionHistoryConfig::Ramp { shape: vec![(1, 1.0), (2, 0.5), (3, -0.25)], slope: 0.5, t_hist: 2.0 },
            velocity: VelocityHistoryConfig::Sinusoidal { shape: vec![(1, 0.5), (2, -0.3)], frequency: 2.0 },
        },
        integrator: IntegratorConfig::default(),
        horizon: 50.0,
        cadence: 10,
        audits: AuditToggles::default(),
        energy: true,
        exploratory: false,
    }
}

/// The unscaled configuration behind a preset name.
pub fn preset_template(name: &str) -> Result<ScenarioConfig> {
    let mut c = base(name);
    match name {
        "power-source-small" => {
            c.observation = Some(ObservationConfig { a: 0.0, b: PI / 2.0 });
            c.delay.profile = DelayFamily::Sinusoidal { mean: 0.5, amplitude: 0.4, frequency: 1.0 };
            c.gain = GainSpec::Constant { k0: 0.02 };
            c.nonlinearity = NonlinearitySpec::Power { exponent: 2.0, c_h: None, max_exponent: None, grid_points: None };
        }
        "integral-source-small" => {
            c.observation = Some(ObservationConfig { a: PI / 4.0, b: 3.0 * PI / 4.0 });
            c.delay.profile = DelayFamily::PiecewiseLinear { knots: vec![(0.0, 0.8), (5.0, 0.2), (10.0, 0.6)] };
            c.gain = GainSpec::ExponentialDecay { k0: 0.3, rate: 0.5 };
            c.nonlinearity = NonlinearitySpec::Integral { exponent: 2.0, c_h: None };
            c.history.position = PositionHistoryConfig::Constant { shape: vec![(1, 1.0), (3, 0.3)] };
            c.history.velocity = VelocityHistoryConfig::Constant { shape: vec![(1, -0.4), (2, 0.2)] };
        }
        "no-delay-linear" => {}
        "destabilizing-gain" => {
            c.delay.profile = DelayFamily::Constant { tau: 1.0 };
            c.gain = GainSpec::Constant { k0: 4.0 };
            c.nonlinearity = NonlinearitySpec::Power { exponent: 2.0, c_h: None, max_exponent: None, grid_points: None };
            c.history.amplitude = 0.5;
            c.exploratory = true;
        }
        other => return Err(Error::UnknownPreset(String::from(other))),
    }
    Ok(c)
}

/// A built-in scenario. The `*-small` presets have their data rescaled so
/// that the initial size is half the certified radius `ρ`.
pub fn preset(name: &str) -> Result<ScenarioConfig> {
    let c = preset_template(name)?;
    if !name.ends_with("-small") {
        return Ok(c);
    }
    let report = validate(&c)?;
    let rho = report.certificate.as_ref().and_then(|r| r.rho);
    let size = report.measures.map(|m| m.size());
    match (rho, size) {
        (Some(rho), Some(size)) if rho.is_finite() && size > 0.0 => {
            Ok(c.with_amplitude(c.history.amplitude * SMALL_FRACTION * rho / size))
        }
        (Some(rho), _) if !rho.is_finite() => Ok(c),
        _ => {
            let failed: Vec<String> = report.failures().map(|f| format!("{}: {}", f.name, f.detail)).collect();
            Err(Error::InfeasibleHypothesis(format!("preset {name} is not certified ({})", failed.join("; "))))
        }
    }
}
