use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
#[allow(unused_imports)] // unused when std is in the dependency graph
use num_traits::Float;

use super::ScenarioConfig;
use crate::analysis::{
    constants_chain, decay_amplitude, estimate_semigroup_constants, initial_data_measures, CertificateReport,
    InitialMeasures, SemigroupConstants, SemigroupOptions, Verdict,
};
use crate::delay::gain_budget;
use crate::dynamics::Model;
use crate::operators::{sampled_gradient_mismatch, sampled_growth_ratio, sampled_lipschitz_ratio};
use crate::Result;

/// Verdict of a single hypothesis check.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "status", rename_all = "kebab-case"))]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped { reason: String },
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HypothesisCheck {
    pub name: String,
    pub status: CheckStatus,
    pub detail: String,
}

/// Every hypothesis verdict for one scenario, plus the constants computed on
/// the way.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HypothesisReport {
    pub scenario: String,
    pub checks: Vec<HypothesisCheck>,
    pub semigroup: Option<SemigroupConstants>,
    pub certificate: Option<CertificateReport>,
    pub measures: Option<InitialMeasures>,
    /// `C̃` in `E(t) ≤ C̃e^{−μt}`.
    pub decay_amplitude: Option<f64>,
}

impl HypothesisReport {
    /// No check failed.
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &HypothesisCheck> {
        self.checks.iter().filter(|c| c.status == CheckStatus::Fail)
    }

    pub fn check(&self, name: &str) -> Option<&HypothesisCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// The certificate is issued and the data are small enough.
    pub fn is_certified(&self) -> bool {
        self.all_passed() && self.certificate.as_ref().is_some_and(|c| c.is_certified())
    }

    /// Hypotheses of the energy lower bound: `h(‖A^{1/2}u₀(0)‖) < (1−β̃)/2`
    /// and both smallness conditions.
    pub fn lower_bound_hypothesis(&self) -> bool {
        ["lower-bound-initial", "smallness"]
            .iter()
            .all(|n| self.check(n).is_some_and(|c| c.status == CheckStatus::Pass))
    }

    fn push(&mut self, name: &str, pass: bool, detail: String) {
        let status = if pass { CheckStatus::Pass } else { CheckStatus::Fail };
        self.checks.push(HypothesisCheck { name: name.into(), status, detail });
    }

    fn skip(&mut self, name: &str, reason: &str) {
        self.checks.push(HypothesisCheck {
            name: name.into(),
            status: CheckStatus::Skipped { reason: reason.into() },
            detail: String::new(),
        });
    }
}

/// Names of the checks that need an assembled model, in report order.
const MODEL_CHECKS: [&str; 12] = [
    "delay-bound",
    "gain-budget",
    "source-gradient",
    "source-lipschitz",
    "source-growth",
    "history-continuity",
    "semigroup",
    "gain-growth",
    "certificate",
    "lower-bound-initial",
    "smallness",
    "delay-step",
];

fn kernel_checks(cfg: &ScenarioConfig, rep: &mut HypothesisReport) {
    let terms = &cfg.kernel.terms;
    if terms.is_empty() {
        for n in ["kernel-integrable", "kernel-positive", "kernel-mass", "kernel-decay"] {
            rep.skip(n, "memory is off");
        }
        return;
    }
    let finite = terms.iter().all(|t| t.weight.is_finite() && t.rate.is_finite());
    let rates = terms.iter().all(|t| t.rate > 0.0);
    rep.push("kernel-integrable", finite && rates, format!("{} Prony terms", terms.len()));
    let weights = terms.iter().all(|t| t.weight > 0.0);
    let beta0: f64 = terms.iter().map(|t| t.weight).sum();
    rep.push("kernel-positive", weights && beta0 > 0.0, format!("beta(0) = {beta0}"));
    let mass: f64 = terms.iter().map(|t| t.weight / t.rate).sum();
    rep.push("kernel-mass", mass < 1.0, format!("beta_tilde = {mass}, must be below 1"));
    let delta = terms.iter().map(|t| t.rate).fold(f64::INFINITY, f64::min);
    let worst = (0..=2000)
        .map(|i| {
            let s = 40.0 / delta * i as f64 / 2000.0;
            terms.iter().map(|t| t.weight * (delta - t.rate) * (-t.rate * s).exp()).sum::<f64>()
        })
        .fold(f64::NEG_INFINITY, f64::max);
    rep.push(
        "kernel-decay",
        weights && rates && worst <= 0.0,
        format!("max of beta' + delta*beta on the grid = {worst:e}, delta = {delta}"),
    );
}

/// Runs every hypothesis check on `cfg`. Only structurally inconsistent
/// configs are errors; failed hypotheses are reported.
pub fn validate(cfg: &ScenarioConfig) -> Result<HypothesisReport> {
    cfg.check_consistency()?;
    let mut rep = HypothesisReport {
        scenario: cfg.name.clone(),
        checks: Vec::new(),
        semigroup: None,
        certificate: None,
        measures: None,
        decay_amplitude: None,
    };
    kernel_checks(cfg, &mut rep);
    let model = match cfg.build_model() {
        Ok(m) => {
            rep.push("model", true, String::new());
            m
        }
        Err(e) => {
            rep.push("model", false, e.to_string());
            for n in MODEL_CHECKS {
                rep.skip(n, "model could not be assembled");
            }
            return Ok(rep);
        }
    };
    model_checks(cfg, &model, &mut rep)?;
    Ok(rep)
}

fn model_checks(cfg: &ScenarioConfig, model: &Model, rep: &mut HypothesisReport) -> Result<()> {
    let tau_bar = model.delay.tau_bar;
    let violation = model.delay.grid_violation(cfg.horizon.max(tau_bar), 20_000);
    rep.push(
        "delay-bound",
        violation <= 0.0,
        format!("0 <= tau(t) <= {tau_bar}; largest sampled excess {violation:e}"),
    );
    let k_budget = gain_budget(&model.gain, tau_bar);
    match &k_budget {
        Ok(k) => rep.push("gain-budget", k.is_finite(), format!("K = {k}")),
        Err(e) => rep.push("gain-budget", false, e.to_string()),
    }

    let nl = &model.nonlinearity;
    let spectrum = &model.spectrum;
    if nl.is_none() {
        for n in ["source-gradient", "source-lipschitz", "source-growth"] {
            rep.skip(n, "no source term");
        }
    } else {
        let mismatch = sampled_gradient_mismatch(nl, spectrum, 64, 11);
        rep.push("source-gradient", mismatch < 1e-5, format!("largest relative finite-difference mismatch {mismatch:e}"));
        let lip = sampled_lipschitz_ratio(nl, spectrum, 256, 12);
        rep.push("source-lipschitz", lip <= 1.0, format!("largest sampled ratio to L(r): {lip}"));
        let growth = sampled_growth_ratio(nl, spectrum, 256, 13) / nl.c_h();
        rep.push("source-growth", growth <= 1.0, format!("largest sampled ratio to h(r)r: {growth}, c_h = {}", nl.c_h()));
    }
    rep.push(
        "history-continuity",
        model.history.velocity_continuous_on(tau_bar),
        "velocity history continuous on [-tau_bar, 0]".into(),
    );

    let consts = match estimate_semigroup_constants(spectrum, model.memory.as_ref(), &SemigroupOptions::default()) {
        Ok(c) => {
            rep.push("semigroup", true, format!("M = {}, omega = {} (reduced-system constants)", c.m, c.omega));
            c
        }
        Err(e) => {
            rep.push("semigroup", false, e.to_string());
            for n in ["gain-growth", "certificate", "lower-bound-initial", "smallness"] {
                rep.skip(n, "no semigroup constants");
            }
            delay_step(cfg, model, rep);
            return Ok(());
        }
    };
    let measures = initial_data_measures(model)?;
    rep.measures = Some(measures);
    if k_budget.is_err() {
        for n in ["gain-growth", "certificate"] {
            rep.skip(n, "gain budget unbounded");
        }
    } else {
        let cert = constants_chain(model, &consts, cfg.horizon)?;
        match (cert.gamma, cert.omega_prime) {
            (Some(g), Some(w)) => rep.push("gain-growth", true, format!("gamma = {g}, omega' = {w} < omega")),
            _ => rep.push("gain-growth", false, "no slope omega' below omega".into()),
        }
        match &cert.verdict {
            Verdict::Certified => rep.push(
                "certificate",
                true,
                format!("rho = {}, mu = {}", cert.rho.unwrap_or(f64::NAN), cert.mu.unwrap_or(f64::NAN)),
            ),
            Verdict::Infeasible { reason } => rep.push("certificate", false, reason.clone()),
        }
        rep.decay_amplitude = decay_amplitude(&cert, model, &measures);
        rep.certificate = Some(cert);
    }
    let half_gap = 0.5 * (1.0 - model.beta_tilde());
    rep.push(
        "lower-bound-initial",
        measures.h_of_u0 < half_gap,
        format!("h(|A^1/2 u0(0)|) = {} against (1 - beta_tilde)/2 = {half_gap}", measures.h_of_u0),
    );
    match rep.certificate.as_ref().and_then(|c| c.rho) {
        Some(rho) => rep.push(
            "smallness",
            measures.is_small(rho),
            format!("initial size {} and max |g| = {} against rho = {rho}", measures.smallness.sqrt(), measures.g_max),
        ),
        None => rep.skip("smallness", "no radius rho"),
    }
    delay_step(cfg, model, rep);
    rep.semigroup = Some(consts);
    Ok(())
}

fn delay_step(cfg: &ScenarioConfig, model: &Model, rep: &mut HypothesisReport) {
    let tau_min = model.delay.tau_min();
    let detail = if cfg.integrator.dt <= tau_min {
        format!("dt = {} <= tau_min = {tau_min}", cfg.integrator.dt)
    } else {
        format!("dt = {} > tau_min = {tau_min}; the step corrector handles lookups inside a step", cfg.integrator.dt)
    };
    rep.push("delay-step", true, detail);
}
