use alloc::vec::Vec;
#[allow(unused_imports)] // unused when std is in the dependency graph
use num_traits::Float;

use super::integrator::{Integrator, IntegratorConfig, StepStats};
use super::model::Model;
use crate::analysis::{audit_energy_derivative, audit_gronwall, audit_lower_bound, EnergyReport};
use crate::kernel::EtaQuadrature;
use crate::{Error, Result};

/// Which audits [`simulate`] runs on the energy report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct AuditToggles {
    pub gronwall: bool,
    pub lower_bound: bool,
    pub energy_derivative: bool,
}

impl Default for AuditToggles {
    fn default() -> Self {
        AuditToggles { gronwall: true, lower_bound: true, energy_derivative: true }
    }
}

impl AuditToggles {
    pub fn none() -> Self {
        AuditToggles { gronwall: false, lower_bound: false, energy_derivative: false }
    }
}

/// Settings for [`simulate`].
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationOptions {
    pub integrator: IntegratorConfig,
    pub horizon: f64,
    /// Steps between recorded samples.
    pub cadence: usize,
    /// Compute the energy at every recorded sample.
    pub energy: bool,
    pub audits: AuditToggles,
    pub eta: EtaQuadrature,
    /// Whether the lower-bound hypotheses hold. `None` checks only
    /// `h(‖A^{1/2}u₀(0)‖) < (1−β̃)/2`.
    pub lower_bound_hypothesis: Option<bool>,
    pub gronwall_tol: f64,
    pub lower_bound_slack: f64,
    pub derivative_slack: f64,
}

impl Default for SimulationOptions {
    fn default() -> Self {
        SimulationOptions {
            integrator: IntegratorConfig::default(),
            horizon: 50.0,
            cadence: 10,
            energy: true,
            audits: AuditToggles::default(),
            eta: EtaQuadrature::default(),
            lower_bound_hypothesis: None,
            gronwall_tol: 1e-6,
            lower_bound_slack: 1e-9,
            derivative_slack: 1e-4,
        }
    }
}

/// Modal samples `t, u, v` at the recording cadence.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trajectory {
    pub n_modes: usize,
    pub t: Vec<f64>,
    /// Row-major, one row of `n_modes` per sample.
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl Trajectory {
    pub fn new(n_modes: usize) -> Self {
        Trajectory { n_modes, ..Default::default() }
    }

    pub fn push(&mut self, t: f64, u: &[f64], v: &[f64]) {
        self.t.push(t);
        self.u.extend_from_slice(u);
        self.v.extend_from_slice(v);
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn u_at(&self, i: usize) -> &[f64] {
        &self.u[i * self.n_modes..(i + 1) * self.n_modes]
    }

    pub fn v_at(&self, i: usize) -> &[f64] {
        &self.v[i * self.n_modes..(i + 1) * self.n_modes]
    }

    /// Largest componentwise difference in `u` and `v` over common samples.
    pub fn sup_distance(&self, other: &Trajectory) -> f64 {
        self.u
            .iter()
            .zip(&other.u)
            .chain(self.v.iter().zip(&other.v))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// How a run ended.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "status", rename_all = "kebab-case"))]
pub enum Termination {
    Completed,
    BlowUp { t: f64, norm: f64 },
    NonFinite { t: f64 },
}

#[derive(Debug, Clone)]
pub struct SimulationOutput {
    pub trajectory: Trajectory,
    pub energy: EnergyReport,
    pub termination: Termination,
    pub stats: StepStats,
}

/// Integrates `model` on `[0, horizon]`, recording state and energy every
/// `cadence` steps and auditing the energy series. Blow-up ends the run early
/// and is reported in [`SimulationOutput::termination`] with the partial data.
pub fn simulate(model: &Model, opts: &SimulationOptions) -> Result<SimulationOutput> {
    if !(opts.horizon.is_finite() && opts.horizon >= 0.0) {
        return Err(Error::InvalidParameter("horizon must be finite and non-negative".into()));
    }
    if opts.cadence == 0 {
        return Err(Error::InvalidParameter("cadence must be at least one step".into()));
    }
    let mut it = Integrator::new(model, opts.integrator)?;
    let steps = (opts.horizon / opts.integrator.dt).round() as u64;
    let mut trajectory = Trajectory::new(model.n_modes());
    let mut report = EnergyReport::new(model);
    let mut record = |it: &Integrator<'_>, report: &mut EnergyReport| -> Result<()> {
        let t = it.time();
        trajectory.push(t, it.u(), it.v());
        if opts.energy {
            let timeline = it.timeline();
            report.push(crate::analysis::energy_sample(model, t, it.u(), it.v(), &timeline, &opts.eta)?);
        }
        Ok(())
    };
    record(&it, &mut report)?;
    let mut termination = Termination::Completed;
    for n in 1..=steps {
        match it.step() {
            Ok(()) => {}
            Err(Error::BlowUp { t, norm }) => {
                termination = Termination::BlowUp { t, norm };
                break;
            }
            Err(Error::NonFiniteValue { t }) => {
                termination = Termination::NonFinite { t };
                break;
            }
            Err(e) => return Err(e),
        }
        if n % opts.cadence as u64 == 0 || n == steps {
            record(&it, &mut report)?;
        }
    }
    let stats = it.stats();

    if opts.energy {
        let hypothesis = match opts.lower_bound_hypothesis {
            Some(h) => h,
            None => {
                let state = model.initial_state()?;
                let h0 = model.nonlinearity.h(model.spectrum.energy_norm_sq(&state.u).sqrt())?;
                h0 < 0.5 * (1.0 - model.beta_tilde())
            }
        };
        let mut audits = Vec::new();
        if opts.audits.gronwall {
            audits.push(audit_gronwall(&report, opts.gronwall_tol));
        }
        if opts.audits.lower_bound {
            audits.push(audit_lower_bound(&report, hypothesis, opts.lower_bound_slack));
        }
        if opts.audits.energy_derivative {
            audits.push(audit_energy_derivative(&report, opts.derivative_slack));
        }
        report.audits = audits;
    }
    Ok(SimulationOutput { trajectory, energy: report, termination, stats })
}
