use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
#[allow(unused_imports)] // unused when std is in the dependency graph
use num_traits::Float;

use super::energy::energy;
use super::semigroup::{reduced_norm_sq, SemigroupConstants};
use crate::delay::{fit_gain_growth, gain_budget, HistoryBuffer, Timeline};
use crate::dynamics::Model;
use crate::kernel::EtaQuadrature;
use crate::operators::Nonlinearity;
use crate::{Error, Result};

/// Outcome of the small-data decay certificate.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "verdict", rename_all = "kebab-case"))]
pub enum Verdict {
    Certified,
    Infeasible { reason: String },
}

/// The constants chain from the semigroup bound to the decay rate `μ`.
/// Entries after the failing step are `None` for infeasible verdicts.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CertificateReport {
    pub b: f64,
    /// Gain budget `K`.
    pub k_budget: f64,
    pub tau_bar: f64,
    pub m: f64,
    pub omega: f64,
    pub beta_tilde: f64,
    pub c_h: f64,
    pub h_exponent: f64,
    pub gamma: Option<f64>,
    pub omega_prime: Option<f64>,
    /// Window length `T`.
    pub t_window: Option<f64>,
    pub c_t: Option<f64>,
    /// `C*_T` used for `ρ` (an upper bound over all windows).
    pub c_star_t: Option<f64>,
    /// `C*_T` sampled over windows up to the horizon.
    pub c_star_t_sampled: Option<f64>,
    pub rho: Option<f64>,
    pub c_rho: Option<f64>,
    /// `L_F(C_ρ)`, the state-space Lipschitz modulus at radius `C_ρ`.
    pub l_c_rho: Option<f64>,
    /// `(ω − ω′)/(2M)`.
    pub lipschitz_threshold: Option<f64>,
    pub mu: Option<f64>,
    /// Number of halvings applied to the initial `ρ`.
    pub rho_halvings: u32,
    pub verdict: Verdict,
}

impl CertificateReport {
    pub fn is_certified(&self) -> bool {
        self.verdict == Verdict::Certified
    }
}

/// Lipschitz modulus of `F(U) = (0, ∇ψ(u), 0)` on the ball of radius `r` in
/// the state norm, where `‖A^{1/2}u‖ ≤ r/√(1−β̃)`.
pub fn lipschitz_state(nl: &Nonlinearity, beta_tilde: f64, r: f64) -> Result<f64> {
    let s = (1.0 - beta_tilde).sqrt();
    Ok(nl.lipschitz(r / s)? / s)
}

/// Runs the constants chain for `model` with semigroup constants `consts`;
/// `horizon` bounds the sampled window checks.
pub fn constants_chain(model: &Model, consts: &SemigroupConstants, horizon: f64) -> Result<CertificateReport> {
    let b = model.feedback.b_norm();
    let tau_bar = model.delay.tau_bar;
    let k_budget = gain_budget(&model.gain, tau_bar)?;
    let (m, omega) = (consts.m, consts.omega);
    let beta_tilde = model.beta_tilde();
    let nl = &model.nonlinearity;
    let mut rep = CertificateReport {
        b,
        k_budget,
        tau_bar,
        m,
        omega,
        beta_tilde,
        c_h: nl.c_h(),
        h_exponent: nl.exponent(),
        gamma: None,
        omega_prime: None,
        t_window: None,
        c_t: None,
        c_star_t: None,
        c_star_t_sampled: None,
        rho: None,
        c_rho: None,
        l_c_rho: None,
        lipschitz_threshold: None,
        mu: None,
        rho_halvings: 0,
        verdict: Verdict::Certified,
    };
    let growth = match fit_gain_growth(&model.gain, b, m, omega, tau_bar, horizon) {
        Ok(g) => g,
        Err(Error::InfeasibleHypothesis(reason)) => {
            rep.verdict = Verdict::Infeasible { reason };
            return Ok(rep);
        }
        Err(e) => return Err(e),
    };
    let (gamma, omega_prime) = (growth.gamma, growth.omega_prime);
    rep.gamma = Some(gamma);
    rep.omega_prime = Some(omega_prime);
    let mu = omega - omega_prime;
    rep.mu = Some(mu);

    let b2 = b * b;
    let ewt = (omega * tau_bar).exp();
    let log_prefactor = (4.0 * m * m).ln()
        + 2.0 * gamma
        + (1.0 + k_budget * b2 * ewt).max(ewt).ln()
        + (1.0 + ewt * ewt * k_budget * k_budget * b2 * b2).ln();
    let mut found = None;
    for i in 0..200 {
        let t = tau_bar * 2f64.powi(i);
        let log_ct = log_prefactor - mu * t;
        if log_ct < 0.0 {
            found = Some((t, log_ct.exp()));
            break;
        }
    }
    let Some((t_window, c_t)) = found else {
        rep.verdict = Verdict::Infeasible { reason: "no window length T with C_T < 1".into() };
        return Ok(rep);
    };
    rep.t_window = Some(t_window);
    rep.c_t = Some(c_t);

    let exact = (3.0 * b2 * model.gain.window_sup(t_window, 0.0)).exp();
    let fallback = (3.0 * b2 * k_budget * (t_window / tau_bar + 1.0)).exp();
    let c_star = exact.min(fallback).max(1.0);
    let windows = ((horizon / t_window).ceil() as usize).max(1);
    let sampled = (0..windows)
        .map(|n| {
            let a = n as f64 * t_window;
            (3.0 * b2 * model.gain.abs_integral(a, a + t_window)).exp()
        })
        .fold(1.0, f64::max);
    rep.c_star_t = Some(c_star);
    rep.c_star_t_sampled = Some(sampled);

    let threshold = mu / (2.0 * m);
    rep.lipschitz_threshold = Some(threshold);
    let mut rho = (1.0 - beta_tilde).sqrt() / (2.0 * c_star.sqrt()) * nl.h_inverse(0.5 * (1.0 - beta_tilde))?;
    let mut c_rho = 2.0 * c_star.sqrt() * rho;
    let mut l = if rho.is_finite() { lipschitz_state(nl, beta_tilde, c_rho)? } else { 0.0 };
    let mut halvings = 0;
    while l >= threshold {
        if halvings >= 4000 || rho == 0.0 {
            rep.verdict = Verdict::Infeasible { reason: format!("no radius with L(C_rho) below {threshold}") };
            return Ok(rep);
        }
        rho *= 0.5;
        c_rho = 2.0 * c_star.sqrt() * rho;
        l = lipschitz_state(nl, beta_tilde, c_rho)?;
        halvings += 1;
    }
    rep.rho = Some(rho);
    rep.c_rho = Some(c_rho);
    rep.l_c_rho = Some(l);
    rep.rho_halvings = halvings;
    if !(rho > 0.0) {
        rep.verdict = Verdict::Infeasible { reason: "radius collapsed to zero".into() };
    }
    Ok(rep)
}

/// Size measures of the initial data.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InitialMeasures {
    /// `‖u₁‖²`.
    pub velocity_sq: f64,
    /// `‖A^{1/2}u₀(0)‖²`.
    pub elastic_sq: f64,
    /// `∫β(s)‖A^{1/2}η₀(s)‖² ds`.
    pub memory: f64,
    /// `∫_{−τ̄}^0 |k|‖B*g‖²`.
    pub window: f64,
    /// `max_{[−τ̄,0]} ‖g‖`.
    pub g_max: f64,
    /// Left-hand side of the first smallness condition (compared with `ρ²`).
    pub smallness: f64,
    /// `‖U₀‖` with the exact history energy.
    pub state_norm: f64,
    /// `max_{[−τ̄,0]} ‖(u₀(0), g(r), η₀)‖` in the reduced norm.
    pub history_sup_reduced: f64,
    /// `h(‖A^{1/2}u₀(0)‖)`.
    pub h_of_u0: f64,
}

impl InitialMeasures {
    /// Both smallness conditions hold for radius `rho`.
    pub fn is_small(&self, rho: f64) -> bool {
        self.smallness < rho * rho && self.g_max < rho
    }

    /// `max(√smallness, g_max)`: scaling the data by `c` scales this by `|c|`.
    pub fn size(&self) -> f64 {
        self.smallness.sqrt().max(self.g_max)
    }
}

fn history_grid(tau_bar: f64) -> impl Iterator<Item = f64> {
    (0..=400).map(move |i| -tau_bar * i as f64 / 400.0)
}

/// Computes [`InitialMeasures`] for the model's initial history.
pub fn initial_data_measures(model: &Model) -> Result<InitialMeasures> {
    let state = model.initial_state()?;
    let spectrum = &model.spectrum;
    let empty = HistoryBuffer::new(model.n_modes());
    let timeline = Timeline { buffer: &empty, history: &model.history };
    let e0 = energy(model, 0.0, &state.u, &state.v, &timeline, &EtaQuadrature::default())?;
    let velocity_sq = spectrum.norm_sq(&state.v);
    let elastic_sq = spectrum.energy_norm_sq(&state.u);
    let memory = 2.0 * e0.memory;
    let window = 2.0 * e0.gain_window;
    let beta_tilde = model.beta_tilde();
    let w = model.history.velocity_shape();
    let wsq: f64 = w.iter().map(|x| x * x).sum();
    let g_max = (wsq * model.history.max_velocity_factor_sq(model.delay.tau_bar)).sqrt();
    let smallness = velocity_sq + (1.0 - beta_tilde) * elastic_sq + window + memory;
    let state_norm = (velocity_sq + (1.0 - beta_tilde) * elastic_sq + memory).sqrt();
    let eig = spectrum.eigenvalues();
    let rest = reduced_norm_sq(model.memory.as_ref(), eig, &state.u, &alloc::vec![0.0; w.len()], state.z.as_slice());
    let history_sup_reduced = history_grid(model.delay.tau_bar)
        .map(|r| {
            let q = model.history.velocity_factor(r);
            (rest + wsq * q * q).sqrt()
        })
        .fold(0.0, f64::max);
    Ok(InitialMeasures {
        velocity_sq,
        elastic_sq,
        memory,
        window,
        g_max,
        smallness,
        state_norm,
        history_sup_reduced,
        h_of_u0: model.nonlinearity.h(elastic_sq.sqrt())?,
    })
}

/// Decay amplitude `C̃` with `E(t) ≤ C̃e^{−μt}` for `t ≥ τ̄`:
/// `Ĉ = Me^γ(‖U₀‖ + e^{ωτ̄}Kb² max_r e^{ωr}‖g̃(r)‖)` and
/// `C̃ = Ĉ²(1 + b²Ke^{ωτ̄}/2)`.
pub fn decay_amplitude(cert: &CertificateReport, model: &Model, measures: &InitialMeasures) -> Option<f64> {
    let gamma = cert.gamma?;
    let (m, omega, k, b2) = (cert.m, cert.omega, cert.k_budget, cert.b * cert.b);
    let w = model.history.velocity_shape();
    let wsq: f64 = w.iter().map(|x| x * x).sum();
    let rest = measures.state_norm * measures.state_norm - measures.velocity_sq;
    let sup: f64 = history_grid(cert.tau_bar)
        .map(|r| {
            let q = model.history.velocity_factor(r);
            (omega * r).exp() * (rest.max(0.0) + wsq * q * q).sqrt()
        })
        .fold(0.0, f64::max);
    let ewt = (omega * cert.tau_bar).exp();
    let c_hat = m * gamma.exp() * (measures.state_norm + ewt * k * b2 * sup);
    Some(c_hat * c_hat * (1.0 + 0.5 * b2 * k * ewt))
}

/// Convenience: all `(t, E)` samples at or after `t_min` violating `E ≤ C̃e^{−μt}`.
pub fn decay_bound_violations(samples: &[(f64, f64)], c_tilde: f64, mu: f64, t_min: f64) -> Vec<(f64, f64)> {
    samples.iter().copied().filter(|&(t, e)| t >= t_min && e > c_tilde * (-mu * t).exp()).collect()
}
