//! Validation followed by simulation and post-processing, shared by the
//! `run` and `sweep` commands.

use serde::Serialize;
use viscodelay_core::analysis::{decay_bound_violations, decay_fit, AuditResult, DecayFit};
use viscodelay_core::dynamics::{simulate, SimulationOptions, SimulationOutput, Termination};
use viscodelay_core::scenarios::{HypothesisReport, ScenarioConfig};

use crate::Result;

/// Fraction of the time span used by the decay fit unless overridden.
pub const DEFAULT_FIT_WINDOW: f64 = 0.5;

/// Everything a run produces.
#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub output: SimulationOutput,
    pub summary: RunSummary,
}

/// Condensed, serialisable outcome of a run.
#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub scenario: String,
    pub termination: Termination,
    pub steps: u64,
    pub corrected_steps: u64,
    pub samples: usize,
    pub hypotheses_passed: bool,
    pub certified: bool,
    pub initial_energy: Option<f64>,
    pub final_energy: Option<f64>,
    pub running_max: Option<f64>,
    pub audits: Vec<AuditResult>,
    pub fit: Option<DecayFit>,
    pub fit_error: Option<String>,
    /// Certified rate `μ` and amplitude `C̃` of the bound `E ≤ C̃e^{−μt}`.
    pub mu: Option<f64>,
    pub decay_amplitude: Option<f64>,
    pub decay_bound_violations: Option<usize>,
}

impl RunSummary {
    pub fn audit_violations(&self) -> usize {
        self.audits.iter().map(|a| a.violations.len()).sum()
    }
}

/// Simulates `cfg` with `opts`, using `report` (from `validate`) for the
/// lower-bound hypothesis and the certified decay envelope.
pub fn run_scenario(
    cfg: &ScenarioConfig,
    report: &HypothesisReport,
    opts: &SimulationOptions,
    fit_window: f64,
) -> Result<RunArtifacts> {
    let model = cfg.build_model()?;
    let opts = SimulationOptions { lower_bound_hypothesis: Some(report.lower_bound_hypothesis()), ..*opts };
    let output = simulate(&model, &opts)?;
    let energies = output.energy.energies();
    let (fit, fit_error) = if energies.is_empty() {
        (None, None)
    } else {
        match decay_fit(&output.energy, fit_window) {
            Ok(f) => (Some(f), None),
            Err(e) => (None, Some(e.to_string())),
        }
    };
    let certified = report.is_certified();
    let mu = report.certificate.as_ref().and_then(|c| c.mu);
    let decay_amplitude = report.decay_amplitude;
    let decay_violations = match (certified, mu, decay_amplitude, energies.is_empty()) {
        (true, Some(mu), Some(c), false) => {
            let samples: Vec<(f64, f64)> = output.energy.samples.iter().map(|s| (s.t, s.energy)).collect();
            Some(decay_bound_violations(&samples, c, mu, cfg.delay.tau_bar).len())
        }
        _ => None,
    };
    let summary = RunSummary {
        scenario: cfg.name.clone(),
        termination: output.termination,
        steps: output.stats.steps,
        corrected_steps: output.stats.corrected_steps,
        samples: output.trajectory.len(),
        hypotheses_passed: report.all_passed(),
        certified,
        initial_energy: energies.first().copied(),
        final_energy: energies.last().copied(),
        running_max: output.energy.samples.last().map(|s| s.running_max),
        audits: output.energy.audits.clone(),
        fit,
        fit_error,
        mu,
        decay_amplitude,
        decay_bound_violations: decay_violations,
    };
    Ok(RunArtifacts { output, summary })
}
