use alloc::format;
use alloc::vec::Vec;
#[allow(unused_imports)] // unused when std is in the dependency graph
use num_traits::Float;

use crate::{Error, Result};

/// Shape of the delay function `τ(t)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields))]
pub enum DelayFamily {
    /// `τ(t) = tau`.
    Constant { tau: f64 },
    /// `τ(t) = mean + amplitude · sin(frequency · t)`.
    Sinusoidal { mean: f64, amplitude: f64, frequency: f64 },
    /// Linear interpolation between `(time, value)` knots, constant outside.
    PiecewiseLinear { knots: Vec<(f64, f64)> },
}

/// A delay function together with its declared upper bound `τ̄`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct DelaySpec {
    pub tau_bar: f64,
    pub profile: DelayFamily,
}

impl DelaySpec {
    /// Validates the family parameters and `0 ≤ τ(t) ≤ τ̄` for `t ≥ 0`.
    pub fn new(tau_bar: f64, profile: DelayFamily) -> Result<Self> {
        let spec = DelaySpec { tau_bar, profile };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau_bar.is_finite() && self.tau_bar > 0.0) {
            return Err(Error::InvalidParameter(format!("tau_bar must be positive, got {}", self.tau_bar)));
        }
        match &self.profile {
            DelayFamily::Constant { tau } => {
                if !tau.is_finite() {
                    return Err(Error::InvalidParameter("delay must be finite".into()));
                }
            }
            DelayFamily::Sinusoidal { mean, amplitude, frequency } => {
                if !(mean.is_finite() && amplitude.is_finite() && frequency.is_finite()) {
                    return Err(Error::InvalidParameter("sinusoidal delay parameters must be finite".into()));
                }
            }
            DelayFamily::PiecewiseLinear { knots } => {
                if knots.is_empty() {
                    return Err(Error::InvalidParameter("piecewise-linear delay needs at least one knot".into()));
                }
                for w in knots.windows(2) {
                    if !(w[1].0 > w[0].0) {
                        return Err(Error::InvalidParameter("delay knot times must increase strictly".into()));
                    }
                }
                if knots.iter().any(|(t, v)| !t.is_finite() || !v.is_finite()) {
                    return Err(Error::InvalidParameter("delay knots must be finite".into()));
                }
            }
        }
        let (lo, hi) = (self.tau_min(), self.tau_max());
        if lo < 0.0 {
            return Err(Error::InvalidParameter(format!("delay takes the negative value {lo}")));
        }
        if hi > self.tau_bar {
            return Err(Error::InvalidParameter(format!(
                "delay reaches {hi}, above tau_bar = {}",
                self.tau_bar
            )));
        }
        Ok(())
    }

    /// `τ(t)`.
    pub fn tau(&self, t: f64) -> f64 {
        match &self.profile {
            DelayFamily::Constant { tau } => *tau,
            DelayFamily::Sinusoidal { mean, amplitude, frequency } => mean + amplitude * (frequency * t).sin(),
            DelayFamily::PiecewiseLinear { knots } => {
                let first = knots[0];
                let last = knots[knots.len() - 1];
                if t <= first.0 {
                    return first.1;
                }
                if t >= last.0 {
                    return last.1;
                }
                let i = knots.partition_point(|k| k.0 <= t) - 1;
                let (t0, v0) = knots[i];
                let (t1, v1) = knots[i + 1];
                v0 + (v1 - v0) * (t - t0) / (t1 - t0)
            }
        }
    }

    /// Infimum of `τ` over `t ≥ 0`.
    pub fn tau_min(&self) -> f64 {
        match &self.profile {
            DelayFamily::Constant { tau } => *tau,
            DelayFamily::Sinusoidal { mean, amplitude, frequency } => {
                if *frequency == 0.0 {
                    *mean
                } else {
                    mean - amplitude.abs()
                }
            }
            DelayFamily::PiecewiseLinear { knots } => knots
                .iter()
                .filter(|k| k.0 > 0.0)
                .map(|k| k.1)
                .fold(self.tau(0.0), f64::min),
        }
    }

    /// Supremum of `τ` over `t ≥ 0`.
    pub fn tau_max(&self) -> f64 {
        match &self.profile {
            DelayFamily::Constant { tau } => *tau,
            DelayFamily::Sinusoidal { mean, amplitude, frequency } => {
                if *frequency == 0.0 {
                    *mean
                } else {
                    mean + amplitude.abs()
                }
            }
            DelayFamily::PiecewiseLinear { knots } => knots
                .iter()
                .filter(|k| k.0 > 0.0)
                .map(|k| k.1)
                .fold(self.tau(0.0), f64::max),
        }
    }

    /// Largest violation of `0 ≤ τ ≤ τ̄` on a uniform grid of `n + 1` points
    /// over `[0, horizon]`; zero when the bound holds everywhere on the grid.
    pub fn grid_violation(&self, horizon: f64, n: usize) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..=n {
            let t = horizon * i as f64 / n.max(1) as f64;
            let tau = self.tau(t);
            worst = worst.max(-tau).max(tau - self.tau_bar);
        }
        worst
    }
}
