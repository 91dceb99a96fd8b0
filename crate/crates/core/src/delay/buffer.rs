use alloc::vec;
use alloc::vec::Vec;

use super::{DelaySpec, InitialHistory};
use crate::kernel::PastTrajectory;
use crate::{Error, Result};

/// Dense-output record of the computed trajectory.
///
/// Each sample stores `(t, u, v, v')` plus the scalar `⟨Gv, v⟩` needed by the
/// energy's gain window. Between samples, `u` is the cubic Hermite interpolant
/// of `(u, v)` and `v` the cubic Hermite interpolant of `(v, v')`.
#[derive(Debug, Clone, Default)]
pub struct HistoryBuffer {
    n: usize,
    base: usize,
    times: Vec<f64>,
    u: Vec<f64>,
    v: Vec<f64>,
    a: Vec<f64>,
    observed: Vec<f64>,
}

#[inline]
fn hermite(theta: f64, h: f64, y0: f64, m0: f64, y1: f64, m1: f64) -> f64 {
    let t2 = theta * theta;
    let t3 = t2 * theta;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + theta;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    h00 * y0 + h10 * h * m0 + h01 * y1 + h11 * h * m1
}

impl HistoryBuffer {
    pub fn new(n_modes: usize) -> Self {
        HistoryBuffer { n: n_modes, ..Default::default() }
    }

    pub fn n_modes(&self) -> usize {
        self.n
    }

    /// Number of retained samples.
    pub fn len(&self) -> usize {
        self.times.len() - self.base
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Appends a sample; times must increase strictly.
    pub fn push(&mut self, t: f64, u: &[f64], v: &[f64], a: &[f64], observed: f64) -> Result<()> {
        let n = self.n;
        for s in [u, v, a] {
            if s.len() != n {
                return Err(Error::ShapeMismatch { expected: n, found: s.len() });
            }
        }
        if let Some(&last) = self.times.last() {
            if !(t > last) {
                return Err(Error::HistoryGap { t });
            }
        }
        self.times.push(t);
        self.u.extend_from_slice(u);
        self.v.extend_from_slice(v);
        self.a.extend_from_slice(a);
        self.observed.push(observed);
        Ok(())
    }

    /// Drops samples strictly older than the last sample at or before `t_min`.
    pub fn drop_before(&mut self, t_min: f64) {
        let times = &self.times[self.base..];
        let keep_from = times.partition_point(|&t| t <= t_min).saturating_sub(1);
        self.base += keep_from;
        if self.base > 4096 && self.base * 2 > self.times.len() {
            let n = self.n;
            self.times.drain(..self.base);
            self.observed.drain(..self.base);
            self.u.drain(..self.base * n);
            self.v.drain(..self.base * n);
            self.a.drain(..self.base * n);
            self.base = 0;
        }
    }

    /// Sample times currently retained.
    pub fn times(&self) -> &[f64] {
        &self.times[self.base..]
    }

    pub fn time(&self, i: usize) -> f64 {
        self.times[self.base + i]
    }

    pub fn u(&self, i: usize) -> &[f64] {
        let j = (self.base + i) * self.n;
        &self.u[j..j + self.n]
    }

    pub fn v(&self, i: usize) -> &[f64] {
        let j = (self.base + i) * self.n;
        &self.v[j..j + self.n]
    }

    pub fn acceleration(&self, i: usize) -> &[f64] {
        let j = (self.base + i) * self.n;
        &self.a[j..j + self.n]
    }

    /// Stored `⟨Gv, v⟩` of sample `i`.
    pub fn observed(&self, i: usize) -> f64 {
        self.observed[self.base + i]
    }

    pub fn first_time(&self) -> Option<f64> {
        self.times().first().copied()
    }

    pub fn last_time(&self) -> Option<f64> {
        self.times().last().copied()
    }

    /// Index `i` with `t_i ≤ t ≤ t_{i+1}`, or `None` outside the stored range.
    fn interval(&self, t: f64) -> Option<usize> {
        let times = self.times();
        let m = times.len();
        if m == 0 || t < times[0] || t > times[m - 1] {
            return None;
        }
        if m == 1 {
            return Some(0);
        }
        let i = times.partition_point(|&s| s <= t);
        Some(i.saturating_sub(1).min(m - 2))
    }

    fn interpolate(&self, t: f64, y: &[f64], dy: &[f64], out: &mut [f64]) -> Result<()> {
        let i = self.interval(t).ok_or(Error::HistoryGap { t })?;
        let n = self.n;
        let times = self.times();
        if times.len() == 1 {
            let j = self.base * n;
            out.copy_from_slice(&y[j..j + n]);
            return Ok(());
        }
        let (t0, t1) = (times[i], times[i + 1]);
        let h = t1 - t0;
        let theta = (t - t0) / h;
        let j0 = (self.base + i) * n;
        let j1 = j0 + n;
        for k in 0..n {
            out[k] = hermite(theta, h, y[j0 + k], dy[j0 + k], y[j1 + k], dy[j1 + k]);
        }
        Ok(())
    }

    /// Interpolated position.
    pub fn position(&self, t: f64, out: &mut [f64]) -> Result<()> {
        self.interpolate(t, &self.u, &self.v, out)
    }

    /// Interpolated velocity.
    pub fn velocity(&self, t: f64, out: &mut [f64]) -> Result<()> {
        self.interpolate(t, &self.v, &self.a, out)
    }

    /// Largest stored `⟨Gv, v⟩` among samples with time in `[a, b]`.
    pub fn observed_max(&self, a: f64, b: f64) -> f64 {
        let times = self.times();
        let lo = times.partition_point(|&t| t < a);
        let hi = times.partition_point(|&t| t <= b);
        (lo..hi).map(|i| self.observed(i)).fold(0.0, f64::max)
    }
}

/// The computed trajectory for `t ≥ 0` joined with the initial history.
#[derive(Debug, Clone, Copy)]
pub struct Timeline<'a> {
    pub buffer: &'a HistoryBuffer,
    pub history: &'a InitialHistory,
}

impl Timeline<'_> {
    /// `v(t)`, from `g` before the first stored sample.
    pub fn velocity(&self, t: f64, out: &mut [f64]) -> Result<()> {
        match self.buffer.first_time() {
            Some(t0) if t >= t0 => self.buffer.velocity(t, out),
            _ if t <= 0.0 => {
                self.history.velocity(t, out);
                Ok(())
            }
            _ => Err(Error::HistoryGap { t }),
        }
    }
}

impl PastTrajectory for Timeline<'_> {
    fn position(&self, t: f64, out: &mut [f64]) -> Result<()> {
        match self.buffer.first_time() {
            Some(t0) if t >= t0 => self.buffer.position(t, out),
            _ if t <= 0.0 => {
                self.history.position(t, out);
                Ok(())
            }
            _ => Err(Error::HistoryGap { t }),
        }
    }

    fn flat_position(&self) -> Option<(f64, &[f64])> {
        Some((self.history.flat_before(), self.history.flat_value()))
    }
}

/// Result of a delayed-velocity lookup.
#[derive(Debug, Clone, PartialEq)]
pub struct DelayedVelocity {
    pub values: Vec<f64>,
    /// The lookup time lies beyond the last committed sample and the value is
    /// a linear extrapolation that a corrector must refine.
    pub predicted: bool,
}

/// `v(t − τ(t))` from the velocity history, the buffer, or (beyond the last
/// committed sample) a first-order extrapolation flagged as predicted.
pub fn delayed_velocity(
    buffer: &HistoryBuffer,
    history: &InitialHistory,
    t: f64,
    delay: &DelaySpec,
) -> Result<DelayedVelocity> {
    let r = t - delay.tau(t);
    let n = history.n_modes();
    let mut values = vec![0.0; n];
    if r <= 0.0 || buffer.is_empty() {
        if r < -delay.tau_bar * (1.0 + 1e-12) || r > 0.0 {
            return Err(Error::HistoryGap { t: r });
        }
        history.velocity(r, &mut values);
        return Ok(DelayedVelocity { values, predicted: false });
    }
    let last = buffer.len() - 1;
    let t_last = buffer.time(last);
    if r <= t_last {
        Timeline { buffer, history }.velocity(r, &mut values)?;
        return Ok(DelayedVelocity { values, predicted: false });
    }
    let dt = r - t_last;
    for ((o, v), a) in values.iter_mut().zip(buffer.v(last)).zip(buffer.acceleration(last)) {
        *o = v + a * dt;
    }
    Ok(DelayedVelocity { values, predicted: true })
}
