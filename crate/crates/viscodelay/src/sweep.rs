//! One-parameter sweeps, evaluated in parallel and reported in input order.

use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use viscodelay_core::delay::DelayFamily;
use viscodelay_core::dynamics::{AuditToggles, Termination};
use viscodelay_core::scenarios::{validate, ScenarioConfig};

use crate::format::{csv_error, fmt_f64};
use crate::pipeline::{run_scenario, DEFAULT_FIT_WINDOW};
use crate::{Error, Result};

/// The parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    /// `k0` or `amplitude` of the gain family.
    GainAmplitude,
    /// Scale factor of the initial history.
    HistoryAmplitude,
    /// Value of a constant delay.
    DelayTau,
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gain.amplitude" => Ok(SweepParam::GainAmplitude),
            "history.amplitude" => Ok(SweepParam::HistoryAmplitude),
            "delay.tau" => Ok(SweepParam::DelayTau),
            other => Err(Error::Usage(format!(
                "unknown sweep parameter `{other}` (expected gain.amplitude, history.amplitude or delay.tau)"
            ))),
        }
    }
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::GainAmplitude => "gain.amplitude",
            SweepParam::HistoryAmplitude => "history.amplitude",
            SweepParam::DelayTau => "delay.tau",
        }
    }

    /// Copy of `cfg` with the parameter set to `value`.
    pub fn apply(self, cfg: &ScenarioConfig, value: f64) -> Result<ScenarioConfig> {
        let mut c = cfg.clone();
        match self {
            SweepParam::GainAmplitude => c.gain = c.gain.with_amplitude(value),
            SweepParam::HistoryAmplitude => c.history.amplitude = value,
            SweepParam::DelayTau => match &mut c.delay.profile {
                DelayFamily::Constant { tau } => *tau = value,
                _ => return Err(Error::Usage("delay.tau sweeps need a constant delay".into())),
            },
        }
        Ok(c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    /// Also simulate each point (otherwise only validate and certify).
    pub simulate: bool,
    pub horizon: Option<f64>,
    pub fit_window: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions { simulate: false, horizon: None, fit_window: DEFAULT_FIT_WINDOW }
    }
}

/// One evaluated sweep point.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub value: f64,
    /// `certified` or `infeasible` from the certificate chain, `unavailable`
    /// when an earlier hypothesis failure stopped the chain, or `error`.
    pub verdict: String,
    pub hypotheses_passed: bool,
    pub failed_checks: Vec<String>,
    pub rho: Option<f64>,
    pub mu: Option<f64>,
    pub omega_prime: Option<f64>,
    pub error: Option<String>,
    pub termination: Option<String>,
    pub fitted_rate: Option<f64>,
    pub audit_violations: Option<usize>,
    pub decay_bound_violations: Option<usize>,
}

fn evaluate(cfg: &ScenarioConfig, param: SweepParam, value: f64, opts: &SweepOptions) -> SweepRow {
    let mut row = SweepRow {
        value,
        verdict: "unavailable".into(),
        hypotheses_passed: false,
        failed_checks: Vec::new(),
        rho: None,
        mu: None,
        omega_prime: None,
        error: None,
        termination: None,
        fitted_rate: None,
        audit_violations: None,
        decay_bound_violations: None,
    };
    let result = (|| -> Result<()> {
        let mut c = param.apply(cfg, value)?;
        if let Some(h) = opts.horizon {
            c.horizon = h;
        }
        let report = validate(&c)?;
        row.hypotheses_passed = report.all_passed();
        row.failed_checks = report.failures().map(|f| f.name.clone()).collect();
        if let Some(cert) = &report.certificate {
            row.verdict = if cert.is_certified() { "certified" } else { "infeasible" }.into();
            row.rho = cert.rho;
            row.mu = cert.mu;
            row.omega_prime = cert.omega_prime;
        }
        if opts.simulate {
            let mut sim = c.simulation_options();
            if !report.all_passed() && !c.exploratory {
                sim.audits = AuditToggles::none();
            }
            let run = run_scenario(&c, &report, &sim, opts.fit_window)?;
            row.termination = Some(
                match run.summary.termination {
                    Termination::Completed => "completed",
                    Termination::BlowUp { .. } => "blow-up",
                    Termination::NonFinite { .. } => "non-finite",
                }
                .into(),
            );
            row.fitted_rate = run.summary.fit.as_ref().map(|f| f.rate);
            row.audit_violations = Some(run.summary.audit_violations());
            row.decay_bound_violations = run.summary.decay_bound_violations;
        }
        Ok(())
    })();
    if let Err(e) = result {
        row.verdict = "error".into();
        row.error = Some(e.to_string());
    }
    row
}

/// Evaluates every value on the rayon pool; rows keep the order of `values`.
pub fn run_sweep(cfg: &ScenarioConfig, param: SweepParam, values: &[f64], opts: &SweepOptions) -> Vec<SweepRow> {
    values.par_iter().map(|&v| evaluate(cfg, param, v, opts)).collect()
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(String::new, fmt_f64)
}

fn opt_count(x: Option<usize>) -> String {
    x.map_or_else(String::new, |n| n.to_string())
}

pub fn write_sweep_csv(path: &Path, param: SweepParam, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    let header = [
        param.name(),
        "verdict",
        "hypotheses_passed",
        "failed_checks",
        "rho",
        "mu",
        "omega_prime",
        "termination",
        "fitted_rate",
        "audit_violations",
        "decay_bound_violations",
    ];
    w.write_record(header).map_err(|e| csv_error(path, e))?;
    for r in rows {
        w.write_record([
            fmt_f64(r.value),
            r.verdict.clone(),
            r.hypotheses_passed.to_string(),
            r.failed_checks.join(";"),
            opt(r.rho),
            opt(r.mu),
            opt(r.omega_prime),
            r.termination.clone().unwrap_or_default(),
            opt(r.fitted_rate),
            opt_count(r.audit_violations),
            opt_count(r.decay_bound_violations),
        ])
        .map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
