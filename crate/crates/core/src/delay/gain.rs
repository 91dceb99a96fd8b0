use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // unused when std is in the dependency graph
use num_traits::Float;

use crate::{Error, Result};

/// Feedback gain schedule `k(t)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields))]
pub enum GainSpec {
    /// `k(t) = k0`.
    Constant { k0: f64 },
    /// `k(t) = k0 · e^{−rate·t}` for `t ≥ 0` and zero before.
    ExponentialDecay { k0: f64, rate: f64 },
    /// `k(t) = amplitude` while `t mod period < width`, zero otherwise.
    PeriodicPulses { amplitude: f64, period: f64, width: f64 },
    /// `k(t) = amplitude · sin(2πt/period)`.
    SignAlternating { amplitude: f64, period: f64 },
}

fn rem_euclid(x: f64, p: f64) -> f64 {
    let r = x - p * (x / p).floor();
    if r >= p {
        0.0
    } else {
        r
    }
}

/// `|sin|`-antiderivative constant for the sign-alternating family: the
/// largest excess of `∫₀^t |sin(ωs)| ds` over its mean line, times `ω`.
fn sine_excess_factor() -> f64 {
    let c = 2.0 / PI;
    (1.0 - c * c).sqrt() - 1.0 + c * c.asin()
}

impl GainSpec {
    pub fn validate(&self) -> Result<()> {
        let finite = |x: f64, what: &str| -> Result<()> {
            if x.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("gain {what} must be finite")))
            }
        };
        match *self {
            GainSpec::Constant { k0 } => finite(k0, "k0"),
            GainSpec::ExponentialDecay { k0, rate } => {
                finite(k0, "k0")?;
                finite(rate, "rate")?;
                if rate < 0.0 {
                    // A growing exponential has no finite window bound.
                    return Err(Error::UnboundedBudget);
                }
                Ok(())
            }
            GainSpec::PeriodicPulses { amplitude, period, width } => {
                finite(amplitude, "amplitude")?;
                if !(period.is_finite() && period > 0.0) {
                    return Err(Error::InvalidParameter("pulse period must be positive".into()));
                }
                if !(width >= 0.0 && width <= period) {
                    return Err(Error::InvalidParameter("pulse width must lie in [0, period]".into()));
                }
                Ok(())
            }
            GainSpec::SignAlternating { amplitude, period } => {
                finite(amplitude, "amplitude")?;
                if !(period.is_finite() && period > 0.0) {
                    return Err(Error::InvalidParameter("gain period must be positive".into()));
                }
                Ok(())
            }
        }
    }

    /// `k(t)`.
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            GainSpec::Constant { k0 } => k0,
            GainSpec::ExponentialDecay { k0, rate } => {
                if t < 0.0 {
                    0.0
                } else {
                    k0 * (-rate * t).exp()
                }
            }
            GainSpec::PeriodicPulses { amplitude, period, width } => {
                if rem_euclid(t, period) < width {
                    amplitude
                } else {
                    0.0
                }
            }
            GainSpec::SignAlternating { amplitude, period } => amplitude * (2.0 * PI * t / period).sin(),
        }
    }

    /// The amplitude parameter (`k0` or `amplitude`).
    pub fn amplitude(&self) -> f64 {
        match *self {
            GainSpec::Constant { k0 } | GainSpec::ExponentialDecay { k0, .. } => k0,
            GainSpec::PeriodicPulses { amplitude, .. } | GainSpec::SignAlternating { amplitude, .. } => amplitude,
        }
    }

    /// Copy with the amplitude parameter replaced.
    pub fn with_amplitude(&self, a: f64) -> GainSpec {
        let mut g = self.clone();
        match &mut g {
            GainSpec::Constant { k0 } | GainSpec::ExponentialDecay { k0, .. } => *k0 = a,
            GainSpec::PeriodicPulses { amplitude, .. } | GainSpec::SignAlternating { amplitude, .. } => {
                *amplitude = a
            }
        }
        g
    }

    /// `F(x) = ∫₀^x |k|` (negative for `x < 0`).
    pub fn abs_antiderivative(&self, x: f64) -> f64 {
        match *self {
            GainSpec::Constant { k0 } => k0.abs() * x,
            GainSpec::ExponentialDecay { k0, rate } => {
                if x <= 0.0 {
                    0.0
                } else if rate == 0.0 {
                    k0.abs() * x
                } else {
                    k0.abs() * (1.0 - (-rate * x).exp()) / rate
                }
            }
            GainSpec::PeriodicPulses { amplitude, period, width } => {
                let n = (x / period).floor();
                let r = x - n * period;
                amplitude.abs() * (n * width + r.min(width))
            }
            GainSpec::SignAlternating { amplitude, period } => {
                let w = 2.0 * PI / period;
                let y = w * x;
                let m = (y / PI).floor();
                amplitude.abs() / w * (2.0 * m + 1.0 - (y - PI * m).cos())
            }
        }
    }

    /// `∫_a^b |k|`, exact for every family.
    pub fn abs_integral(&self, a: f64, b: f64) -> f64 {
        self.abs_antiderivative(b) - self.abs_antiderivative(a)
    }

    /// Long-run average of `|k|`.
    pub fn mean_abs(&self) -> f64 {
        match *self {
            GainSpec::Constant { k0 } => k0.abs(),
            GainSpec::ExponentialDecay { k0, rate } => {
                if rate == 0.0 {
                    k0.abs()
                } else {
                    0.0
                }
            }
            GainSpec::PeriodicPulses { amplitude, period, width } => amplitude.abs() * width / period,
            GainSpec::SignAlternating { amplitude, .. } => 2.0 * amplitude.abs() / PI,
        }
    }

    /// `sup_{t ≥ 0} (∫₀^t |k| − mean_abs · t)` in closed form.
    pub fn growth_excess(&self) -> f64 {
        match *self {
            GainSpec::Constant { .. } => 0.0,
            GainSpec::ExponentialDecay { k0, rate } => {
                if rate == 0.0 {
                    0.0
                } else {
                    k0.abs() / rate
                }
            }
            GainSpec::PeriodicPulses { amplitude, period, width } => amplitude.abs() * width * (1.0 - width / period),
            GainSpec::SignAlternating { amplitude, period } => {
                amplitude.abs() * period / (2.0 * PI) * sine_excess_factor()
            }
        }
    }

    /// `sup_{s ≥ s_min} ∫_s^{s+len} |k|`, exact for every family.
    pub fn window_sup(&self, len: f64, s_min: f64) -> f64 {
        let w = |s: f64| self.abs_integral(s, s + len);
        match *self {
            GainSpec::Constant { k0 } => k0.abs() * len,
            GainSpec::ExponentialDecay { .. } => w(s_min.max(0.0)),
            GainSpec::PeriodicPulses { period, width, .. } => {
                // The window integral is piecewise linear in s with kinks where
                // either window end crosses a pulse edge.
                let mut best = 0.0f64;
                for edge in [0.0, width] {
                    for off in [0.0, len] {
                        let s = rem_euclid(edge - off, period);
                        best = best.max(w(s));
                    }
                }
                best
            }
            GainSpec::SignAlternating { period, .. } => {
                let om = 2.0 * PI / period;
                let c = om * len;
                let mut best = 0.0f64;
                for j in 0..4 {
                    let jp = j as f64 * PI;
                    for x in [(jp - c) / 2.0, jp, jp - c] {
                        best = best.max(w(x / om));
                    }
                }
                best
            }
        }
    }

    /// Window sup sampled on `n + 1` window starts over `[s_min, s_min + span]`.
    pub fn sampled_window_sup(&self, len: f64, s_min: f64, span: f64, n: usize) -> f64 {
        (0..=n)
            .map(|i| {
                let s = s_min + span * i as f64 / n.max(1) as f64;
                self.abs_integral(s, s + len)
            })
            .fold(0.0, f64::max)
    }

    /// Times in `(a, b)` where `|k|` is not smooth.
    pub fn breakpoints(&self, a: f64, b: f64) -> Vec<f64> {
        let mut out = Vec::new();
        let mut push_grid = |step: f64, offset: f64| {
            let mut n = ((a - offset) / step).ceil();
            loop {
                let t = offset + n * step;
                if t >= b {
                    break;
                }
                if t > a {
                    out.push(t);
                }
                n += 1.0;
            }
        };
        match *self {
            GainSpec::Constant { .. } => {}
            GainSpec::ExponentialDecay { .. } => {
                if a < 0.0 && b > 0.0 {
                    out.push(0.0);
                }
            }
            GainSpec::PeriodicPulses { period, width, .. } => {
                push_grid(period, 0.0);
                push_grid(period, width);
            }
            GainSpec::SignAlternating { period, .. } => push_grid(period / 2.0, 0.0),
        }
        out.sort_by(|x, y| x.partial_cmp(y).unwrap_or(core::cmp::Ordering::Equal));
        out
    }
}

/// Gain budget `K = sup_{t ≥ 0} ∫_{t−τ̄}^t |k|`.
pub fn gain_budget(gain: &GainSpec, tau_bar: f64) -> Result<f64> {
    gain.validate()?;
    let k = gain.window_sup(tau_bar, -tau_bar);
    if k.is_finite() {
        Ok(k)
    } else {
        Err(Error::UnboundedBudget)
    }
}

/// Line `γ + ω′t` dominating `b²Me^{ωτ̄}∫₀^t|k|`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GainGrowth {
    pub gamma: f64,
    pub omega_prime: f64,
    /// The factor `b²Me^{ωτ̄}`.
    pub coefficient: f64,
}

/// Smallest slope `ω′` (then smallest intercept `γ`) such that
/// `b²Me^{ωτ̄}∫₀^t|k| ≤ γ + ω′t` for all `t ≥ 0`.
///
/// The slope is the long-run mean of `|k|` scaled by the coefficient; the
/// intercept is the closed-form excess, cross-checked against a grid over
/// `[0, horizon]`. Fails with [`Error::InfeasibleHypothesis`] when `ω′ ≥ ω`.
pub fn fit_gain_growth(
    gain: &GainSpec,
    b: f64,
    m: f64,
    omega: f64,
    tau_bar: f64,
    horizon: f64,
) -> Result<GainGrowth> {
    gain.validate()?;
    let coefficient = b * b * m * (omega * tau_bar).exp();
    let mean = gain.mean_abs();
    let omega_prime = coefficient * mean;
    if omega_prime >= omega {
        return Err(Error::InfeasibleHypothesis(format!(
            "gain growth slope {omega_prime} is not below omega = {omega}"
        )));
    }
    let n = 20_000usize;
    let grid_excess = (0..=n)
        .map(|i| {
            let t = horizon * i as f64 / n as f64;
            gain.abs_antiderivative(t) - mean * t
        })
        .fold(0.0, f64::max);
    let excess = gain.growth_excess().max(grid_excess).max(0.0);
    Ok(GainGrowth { gamma: coefficient * excess, omega_prime, coefficient })
}
