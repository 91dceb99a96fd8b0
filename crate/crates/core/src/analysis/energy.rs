use alloc::vec;
use alloc::vec::Vec;

use crate::delay::Timeline;
use crate::dynamics::Model;
use crate::kernel::{eta_energy, EtaQuadrature};
use crate::quad::{gauss5, simpson_refined, simpson_samples, Refinement};
use crate::Result;

use super::AuditResult;

/// The five parts of the energy.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EnergyComponents {
    /// `½‖v‖²`.
    pub kinetic: f64,
    /// `((1−β̃)/2)‖A^{1/2}u‖²`.
    pub elastic: f64,
    /// `−ψ(u)`.
    pub potential: f64,
    /// `½∫β(s)‖A^{1/2}η(s)‖² ds`.
    pub memory: f64,
    /// `½∫_{t−τ̄}^t |k(s)|‖B*v(s)‖² ds`.
    pub gain_window: f64,
}

impl EnergyComponents {
    pub fn total(&self) -> f64 {
        self.kinetic + self.elastic + self.potential + self.memory + self.gain_window
    }
}

/// Energy at one sample plus the auxiliary quantities the audits need.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EnergySample {
    pub t: f64,
    pub energy: f64,
    pub components: EnergyComponents,
    /// Running maximum `𝓔(t)`.
    pub running_max: f64,
    /// `‖v‖²`.
    pub velocity_sq: f64,
    /// `‖A^{1/2}u‖²`.
    pub elastic_sq: f64,
    /// `max_{[t−τ̄, t]} ‖B*v‖²`.
    pub observed_window_max: f64,
    /// `|k(t)|`.
    pub abs_gain: f64,
    /// `∫₀^t |k|`.
    pub gain_integral: f64,
}

/// Energy time series with the audits run on it.
#[derive(Debug, Clone, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EnergyReport {
    pub samples: Vec<EnergySample>,
    /// `½ max_{[−τ̄, 0]} ‖g‖²`.
    pub initial_velocity_term: f64,
    /// `𝓔(0) = max{½ max‖g‖², E(0)}`.
    pub initial_running_max: f64,
    /// Operator norm `b` of the observation.
    pub b: f64,
    pub beta_tilde: f64,
    pub audits: Vec<AuditResult>,
}

impl EnergyReport {
    /// Starts an empty report for `model`.
    pub fn new(model: &Model) -> Self {
        let w = model.history.velocity_shape();
        let wsq: f64 = w.iter().map(|x| x * x).sum();
        let initial_velocity_term = 0.5 * wsq * model.history.max_velocity_factor_sq(model.delay.tau_bar);
        EnergyReport {
            samples: Vec::new(),
            initial_velocity_term,
            initial_running_max: initial_velocity_term,
            b: model.feedback.b_norm(),
            beta_tilde: model.beta_tilde(),
            audits: Vec::new(),
        }
    }

    /// Appends a sample, maintaining the running maximum.
    pub fn push(&mut self, mut sample: EnergySample) {
        if self.samples.is_empty() {
            self.initial_running_max = self.initial_velocity_term.max(sample.energy);
            sample.running_max = self.initial_running_max;
        } else {
            let prev = self.samples[self.samples.len() - 1].running_max;
            sample.running_max = prev.max(sample.energy);
        }
        self.samples.push(sample);
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn energies(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.energy).collect()
    }
}

/// `½∫_{t−τ̄}^t |k(s)| ‖B*v(s)‖² ds`: Simpson over buffer samples, Gauss on a
/// partial first cell, and a scalar quadrature over the velocity history.
fn gain_window(model: &Model, t: f64, timeline: &Timeline<'_>) -> Result<f64> {
    let gain = &model.gain;
    let start = t - model.delay.tau_bar;
    let mut total = 0.0;
    if start < 0.0 {
        let w = model.history.velocity_shape();
        let obs = model.feedback.observed_sq(w);
        if obs != 0.0 {
            let end = t.min(0.0);
            let mut cuts = vec![start];
            cuts.extend(gain.breakpoints(start, end));
            cuts.push(end);
            let f = |s: f64| {
                let q = model.history.velocity_factor(s);
                gain.value(s).abs() * q * q
            };
            let opts = Refinement { n0: 64, rtol: 1e-12, atol: 1e-300, max_doublings: 10 };
            for c in cuts.windows(2) {
                if c[1] > c[0] {
                    total += obs * simpson_refined(f, c[0], c[1], opts);
                }
            }
        }
    }
    let a = start.max(0.0);
    if t > a {
        let buffer = timeline.buffer;
        let times = buffer.times();
        let eps = 1e-9 * if times.len() > 1 { times[1] - times[0] } else { 1.0 };
        let i0 = times.partition_point(|&s| s < a - eps);
        let i1 = times.partition_point(|&s| s <= t + eps).saturating_sub(1);
        let n = model.n_modes();
        let mut vbuf = vec![0.0; n];
        let mut partial = |lo: f64, hi: f64| -> Result<f64> {
            let mut err = Ok(());
            let val = gauss5(
                |s| {
                    if timeline.velocity(s, &mut vbuf).is_err() {
                        err = Err(crate::Error::HistoryGap { t: s });
                        return 0.0;
                    }
                    gain.value(s).abs() * model.feedback.observed_sq(&vbuf)
                },
                lo,
                hi,
            );
            err.map(|_| val)
        };
        if i0 > i1 || i0 >= times.len() {
            total += partial(a, t)?;
        } else {
            if times[i0] > a + eps {
                total += partial(a, times[i0])?;
            }
            if i1 > i0 {
                let h = (times[i1] - times[i0]) / (i1 - i0) as f64;
                let ys: Vec<f64> = (i0..=i1).map(|i| gain.value(times[i]).abs() * buffer.observed(i)).collect();
                total += simpson_samples(&ys, h);
            }
            if times[i1] < t - eps {
                total += partial(times[i1], t)?;
            }
        }
    }
    Ok(0.5 * total)
}

/// Energy components at time `t` for the state `(u, v)` with past `timeline`.
pub fn energy(
    model: &Model,
    t: f64,
    u: &[f64],
    v: &[f64],
    timeline: &Timeline<'_>,
    eta: &EtaQuadrature,
) -> Result<EnergyComponents> {
    let spectrum = &model.spectrum;
    let kinetic = 0.5 * spectrum.norm_sq(v);
    let elastic = 0.5 * (1.0 - model.beta_tilde()) * spectrum.energy_norm_sq(u);
    let potential = -model.nonlinearity.psi(u)?;
    let memory = match &model.memory {
        Some(k) => eta_energy(k, spectrum.eigenvalues(), t, u, timeline, eta)?,
        None => 0.0,
    };
    let gain_window = gain_window(model, t, timeline)?;
    Ok(EnergyComponents { kinetic, elastic, potential, memory, gain_window })
}

/// Energy plus audit inputs at `t`.
pub(crate) fn energy_sample(
    model: &Model,
    t: f64,
    u: &[f64],
    v: &[f64],
    timeline: &Timeline<'_>,
    eta: &EtaQuadrature,
) -> Result<EnergySample> {
    let components = energy(model, t, u, v, timeline, eta)?;
    let tau_bar = model.delay.tau_bar;
    let mut window_max = timeline.buffer.observed_max(t - tau_bar, t);
    if t - tau_bar < 0.0 {
        let w = model.history.velocity_shape();
        window_max = window_max.max(model.feedback.observed_sq(w) * model.history.max_velocity_factor_sq(tau_bar));
    }
    Ok(EnergySample {
        t,
        energy: components.total(),
        components,
        running_max: 0.0,
        velocity_sq: model.spectrum.norm_sq(v),
        elastic_sq: model.spectrum.energy_norm_sq(u),
        observed_window_max: window_max,
        abs_gain: model.gain.value(t).abs(),
        gain_integral: model.gain.abs_integral(0.0, t),
    })
}
