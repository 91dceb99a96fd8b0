use alloc::format;
use alloc::vec::Vec;
#[allow(unused_imports)] // unused when std is in the dependency graph
use num_traits::Float;

use crate::{Error, Result};

/// Time profile `p(t)` of the position history `u₀(t) = shape · p(t)`, `t ≤ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PositionProfile {
    /// `p ≡ 1`.
    Constant,
    /// `p(t) = 1 + slope · max(t, −t_hist)`: linear on `[−t_hist, 0]`, flat before.
    Ramp { slope: f64, t_hist: f64 },
}

/// Time profile of the velocity history `g(s)` on `[−τ̄, 0]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VelocityProfile {
    /// `g(s) = w`.
    Constant,
    /// `g(s) = w · cos(frequency · s)`.
    Sinusoidal { frequency: f64 },
    /// `g = u₀'`, the derivative of the position history.
    Consistent,
}

/// Initial data on `(−∞, 0]`: position history, velocity history and the
/// derived `u₁ = g(0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialHistory {
    position_shape: Vec<f64>,
    position: PositionProfile,
    velocity_shape: Vec<f64>,
    velocity: VelocityProfile,
    flat_value: Vec<f64>,
}

impl InitialHistory {
    /// Builds a history. For [`VelocityProfile::Consistent`] the velocity shape
    /// is ignored and the position shape is used instead.
    pub fn new(
        position_shape: Vec<f64>,
        position: PositionProfile,
        velocity_shape: Vec<f64>,
        velocity: VelocityProfile,
    ) -> Result<Self> {
        let n = position_shape.len();
        let velocity_shape = if velocity == VelocityProfile::Consistent { position_shape.clone() } else { velocity_shape };
        if velocity_shape.len() != n {
            return Err(Error::ShapeMismatch { expected: n, found: velocity_shape.len() });
        }
        if position_shape.iter().chain(velocity_shape.iter()).any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("history shapes must be finite".into()));
        }
        if let PositionProfile::Ramp { slope, t_hist } = position {
            if !slope.is_finite() {
                return Err(Error::InvalidParameter("ramp slope must be finite".into()));
            }
            if !t_hist.is_finite() {
                return Err(Error::UnsupportedHistoryFamily("ramp history must become flat at a finite time"));
            }
            if t_hist <= 0.0 {
                return Err(Error::InvalidParameter(format!("ramp length t_hist must be positive, got {t_hist}")));
            }
        }
        if let VelocityProfile::Sinusoidal { frequency } = velocity {
            if !frequency.is_finite() {
                return Err(Error::InvalidParameter("velocity frequency must be finite".into()));
            }
        }
        let mut h = InitialHistory { position_shape, position, velocity_shape, velocity, flat_value: Vec::new() };
        let pf = h.position_factor(h.flat_before());
        h.flat_value = h.position_shape.iter().map(|a| a * pf).collect();
        Ok(h)
    }

    /// Zero data with `n` modes.
    pub fn zero(n: usize) -> Self {
        let z = alloc::vec![0.0; n];
        InitialHistory {
            position_shape: z.clone(),
            position: PositionProfile::Constant,
            velocity_shape: z.clone(),
            velocity: VelocityProfile::Constant,
            flat_value: z,
        }
    }

    pub fn n_modes(&self) -> usize {
        self.position_shape.len()
    }

    pub fn position_shape(&self) -> &[f64] {
        &self.position_shape
    }

    /// Shape `w` of the velocity history (`g(s) = w · q(s)`).
    pub fn velocity_shape(&self) -> &[f64] {
        &self.velocity_shape
    }

    pub fn position_profile(&self) -> PositionProfile {
        self.position
    }

    pub fn velocity_profile(&self) -> VelocityProfile {
        self.velocity
    }

    /// The time before which the position history is constant.
    pub fn flat_before(&self) -> f64 {
        match self.position {
            PositionProfile::Constant => 0.0,
            PositionProfile::Ramp { t_hist, .. } => -t_hist,
        }
    }

    /// Constant value of the position before [`Self::flat_before`].
    pub fn flat_value(&self) -> &[f64] {
        &self.flat_value
    }

    /// Scalar profile `p(t)`; times above zero are clamped to zero.
    pub fn position_factor(&self, t: f64) -> f64 {
        let t = t.min(0.0);
        match self.position {
            PositionProfile::Constant => 1.0,
            PositionProfile::Ramp { slope, t_hist } => 1.0 + slope * t.max(-t_hist),
        }
    }

    /// Scalar profile `q(s)` of the velocity history.
    pub fn velocity_factor(&self, s: f64) -> f64 {
        match self.velocity {
            VelocityProfile::Constant => 1.0,
            VelocityProfile::Sinusoidal { frequency } => (frequency * s).cos(),
            VelocityProfile::Consistent => match self.position {
                PositionProfile::Constant => 0.0,
                PositionProfile::Ramp { slope, t_hist } => {
                    if s > -t_hist {
                        slope
                    } else {
                        0.0
                    }
                }
            },
        }
    }

    /// `u₀(t)`.
    pub fn position(&self, t: f64, out: &mut [f64]) {
        let p = self.position_factor(t);
        for (o, a) in out.iter_mut().zip(&self.position_shape) {
            *o = a * p;
        }
    }

    /// `g(s)`.
    pub fn velocity(&self, s: f64, out: &mut [f64]) {
        let q = self.velocity_factor(s);
        for (o, w) in out.iter_mut().zip(&self.velocity_shape) {
            *o = w * q;
        }
    }

    /// `u₀(0)`.
    pub fn u0(&self) -> Vec<f64> {
        let mut out = alloc::vec![0.0; self.n_modes()];
        self.position(0.0, &mut out);
        out
    }

    /// `u₁ = g(0)`.
    pub fn u1(&self) -> Vec<f64> {
        let mut out = alloc::vec![0.0; self.n_modes()];
        self.velocity(0.0, &mut out);
        out
    }

    /// `max_{s ∈ [−τ̄, 0]} q(s)²`, so that `max ‖g‖² = ‖w‖² · max q²`.
    pub fn max_velocity_factor_sq(&self, _tau_bar: f64) -> f64 {
        // Every family attains its largest |q| at s = 0.
        let q0 = self.velocity_factor(0.0);
        q0 * q0
    }

    /// `g` is continuous on `[−τ̄, 0]` (fails only for a consistent ramp whose
    /// kink lies inside the window).
    pub fn velocity_continuous_on(&self, tau_bar: f64) -> bool {
        match (self.velocity, self.position) {
            (VelocityProfile::Consistent, PositionProfile::Ramp { slope, t_hist }) => slope == 0.0 || t_hist >= tau_bar,
            _ => true,
        }
    }

    /// Copy with both shapes multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> InitialHistory {
        let mut h = self.clone();
        for x in h.position_shape.iter_mut().chain(h.velocity_shape.iter_mut()).chain(h.flat_value.iter_mut()) {
            *x *= factor;
        }
        h
    }

    pub fn is_zero(&self) -> bool {
        self.position_shape.iter().chain(self.velocity_shape.iter()).all(|&x| x == 0.0)
            || (self.position_shape.iter().all(|&x| x == 0.0)
                && self.velocity == VelocityProfile::Consistent)
    }
}
