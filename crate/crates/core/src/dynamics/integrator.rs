use alloc::vec;
use alloc::vec::Vec;

use super::model::{acceleration_into, rhs_into, Model, SimState, Workspace};
use crate::delay::{HistoryBuffer, Timeline};
use crate::kernel::MemoryState;
use crate::{Error, Result};

/// Fixed-step RK4 settings.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct IntegratorConfig {
    pub dt: f64,
    /// Accept a vanishing-delay corrector pass once the update is below this.
    #[cfg_attr(feature = "serde", serde(default = "default_tol"))]
    pub corrector_tol: f64,
    #[cfg_attr(feature = "serde", serde(default = "default_iters"))]
    pub max_corrector_iters: u32,
    /// Sup-norm above which a run is declared blown up.
    #[cfg_attr(feature = "serde", serde(default = "default_blowup"))]
    pub blowup_threshold: f64,
}

#[cfg(feature = "serde")]
fn default_tol() -> f64 {
    1e-9
}
#[cfg(feature = "serde")]
fn default_iters() -> u32 {
    4
}
#[cfg(feature = "serde")]
fn default_blowup() -> f64 {
    1e12
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig { dt: 1e-3, corrector_tol: 1e-9, max_corrector_iters: 4, blowup_threshold: 1e12 }
    }
}

/// Counters describing the work done so far.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StepStats {
    pub steps: u64,
    /// Steps whose delayed lookups reached into the step being computed.
    pub corrected_steps: u64,
    pub corrector_iterations: u64,
    /// Largest final corrector update.
    pub max_correction: f64,
}

/// Classical RK4 for the delayed modal system.
///
/// Delayed velocities are read from the dense-output buffer (or the initial
/// history). When a stage needs `v` inside the current step, which happens
/// when `τ(t) < dt`, the step is repeated with the freshly computed end point
/// until the update falls below the corrector tolerance.
#[derive(Debug, Clone)]
pub struct Integrator<'m> {
    model: &'m Model,
    cfg: IntegratorConfig,
    buffer: HistoryBuffer,
    n: usize,
    step_index: u64,
    y: Vec<f64>,
    ws: Workspace,
    stats: StepStats,
    stages: [Vec<f64>; 4],
    tmp: Vec<f64>,
    next: Vec<f64>,
    vd: Vec<f64>,
    a_next: Vec<f64>,
    retention: Option<f64>,
}

impl<'m> Integrator<'m> {
    pub fn new(model: &'m Model, cfg: IntegratorConfig) -> Result<Self> {
        if !(cfg.dt.is_finite() && cfg.dt > 0.0) {
            return Err(Error::InvalidParameter("dt must be positive".into()));
        }
        let state = model.initial_state()?;
        let n = model.n_modes();
        let mut y = Vec::with_capacity(2 * n + state.z.as_slice().len());
        y.extend_from_slice(&state.u);
        y.extend_from_slice(&state.v);
        y.extend_from_slice(state.z.as_slice());
        let d = y.len();
        let mut it = Integrator {
            model,
            cfg,
            buffer: HistoryBuffer::new(n),
            n,
            step_index: 0,
            y,
            ws: Workspace::new(model),
            stats: StepStats::default(),
            stages: [vec![0.0; d], vec![0.0; d], vec![0.0; d], vec![0.0; d]],
            tmp: vec![0.0; d],
            next: vec![0.0; d],
            vd: vec![0.0; n],
            a_next: vec![0.0; n],
            retention: None,
        };
        let r = -model.delay.tau(0.0);
        model.history.velocity(r, &mut it.vd);
        let mut a0 = vec![0.0; n];
        acceleration_into(model, 0.0, &it.y[..n], &it.y[2 * n..], &it.vd, &mut a0, &mut it.ws);
        let obs = model.feedback.observed_sq(&it.y[n..2 * n]);
        it.buffer.push(0.0, &it.y[..n], &it.y[n..2 * n], &a0, obs)?;
        Ok(it)
    }

    /// Keeps only the last `window` time units of samples in the buffer.
    pub fn set_retention(&mut self, window: Option<f64>) {
        self.retention = window;
    }

    pub fn config(&self) -> &IntegratorConfig {
        &self.cfg
    }

    pub fn time(&self) -> f64 {
        self.step_index as f64 * self.cfg.dt
    }

    pub fn stats(&self) -> StepStats {
        self.stats
    }

    pub fn buffer(&self) -> &HistoryBuffer {
        &self.buffer
    }

    pub fn timeline(&self) -> Timeline<'_> {
        Timeline { buffer: &self.buffer, history: &self.model.history }
    }

    pub fn u(&self) -> &[f64] {
        &self.y[..self.n]
    }

    pub fn v(&self) -> &[f64] {
        &self.y[self.n..2 * self.n]
    }

    pub fn z(&self) -> &[f64] {
        &self.y[2 * self.n..]
    }

    pub fn state(&self) -> SimState {
        let n = self.n;
        SimState {
            t: self.time(),
            u: self.u().to_vec(),
            v: self.v().to_vec(),
            z: MemoryState::from_vec(self.model.n_terms(), n, self.z().to_vec()).expect("consistent layout"),
        }
    }

    /// Delayed velocity at lookup time `r` given the tentative end point
    /// `(v1, a1)` of the current step `[t0, t0 + dt]`.
    fn lookup(&self, r: f64, t0: f64, v1: &[f64], a1: &[f64], out: &mut [f64]) -> Result<bool> {
        if r <= t0 {
            self.timeline().velocity(r, out)?;
            return Ok(false);
        }
        let last = self.buffer.len() - 1;
        let v0 = self.buffer.v(last);
        let a0 = self.buffer.acceleration(last);
        let h = self.cfg.dt;
        let th = ((r - t0) / h).min(1.0);
        let t2 = th * th;
        let t3 = t2 * th;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + th;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        for k in 0..self.n {
            out[k] = h00 * v0[k] + h10 * h * a0[k] + h01 * v1[k] + h11 * h * a1[k];
        }
        Ok(true)
    }

    /// One RK4 pass with the given tentative end velocity/acceleration.
    /// Returns whether any lookup used the tentative segment.
    fn rk4_pass(&mut self, t0: f64, v1: &[f64], a1: &[f64]) -> Result<bool> {
        let model = self.model;
        let n = self.n;
        let h = self.cfg.dt;
        let d = self.y.len();
        let last = self.buffer.len() - 1;
        let mut used = false;
        // Stage 1 reuses the stored acceleration of the current sample.
        {
            let k1 = &mut self.stages[0];
            k1[..n].copy_from_slice(&self.y[n..2 * n]);
            k1[n..2 * n].copy_from_slice(self.buffer.acceleration(last));
            if let Some(kernel) = &model.memory {
                let (u, z) = (&self.y[..n], &self.y[2 * n..]);
                crate::kernel::memory_rhs_into(kernel, z, u, &mut k1[2 * n..]);
            }
        }
        let offsets = [0.5, 0.5, 1.0];
        for s in 1..4 {
            let c = offsets[s - 1];
            let ts = t0 + c * h;
            for i in 0..d {
                self.tmp[i] = self.y[i] + c * h * self.stages[s - 1][i];
            }
            let r = ts - model.delay.tau(ts);
            let mut vd = core::mem::take(&mut self.vd);
            used |= self.lookup(r, t0, v1, a1, &mut vd)?;
            let (du_dv, dz) = self.stages[s].split_at_mut(2 * n);
            let (du, dv) = du_dv.split_at_mut(n);
            rhs_into(model, ts, &self.tmp[..n], &self.tmp[n..2 * n], &self.tmp[2 * n..], &vd, du, dv, dz, &mut self.ws);
            self.vd = vd;
        }
        for i in 0..d {
            self.next[i] = self.y[i]
                + h / 6.0 * (self.stages[0][i] + 2.0 * self.stages[1][i] + 2.0 * self.stages[2][i] + self.stages[3][i]);
        }
        let t1 = t0 + h;
        let r = t1 - model.delay.tau(t1);
        let mut vd = core::mem::take(&mut self.vd);
        used |= self.lookup(r, t0, v1, a1, &mut vd)?;
        let mut a_next = core::mem::take(&mut self.a_next);
        acceleration_into(model, t1, &self.next[..n], &self.next[2 * n..], &vd, &mut a_next, &mut self.ws);
        self.vd = vd;
        self.a_next = a_next;
        Ok(used)
    }

    /// Advances by one step and records the new sample.
    pub fn step(&mut self) -> Result<()> {
        let n = self.n;
        let t0 = self.time();
        let h = self.cfg.dt;
        let last = self.buffer.len() - 1;
        let mut v1: Vec<f64> = self.buffer.v(last).to_vec();
        let mut a1: Vec<f64> = self.buffer.acceleration(last).to_vec();
        for k in 0..n {
            v1[k] += h * a1[k];
        }
        let used = self.rk4_pass(t0, &v1, &a1)?;
        if used {
            self.stats.corrected_steps += 1;
            let mut prev = f64::INFINITY;
            let mut first = f64::NAN;
            let mut iters = 0;
            loop {
                let mut change = 0.0f64;
                for k in 0..n {
                    change = change.max((self.next[n + k] - v1[k]).abs()).max(h * (self.a_next[k] - a1[k]).abs());
                }
                if !change.is_finite() {
                    return Err(Error::NonFiniteValue { t: t0 + h });
                }
                if first.is_nan() {
                    first = change;
                }
                if change <= self.cfg.corrector_tol || iters >= self.cfg.max_corrector_iters {
                    if iters >= 2 && change > prev && change > first {
                        return Err(Error::CorrectorDiverged { t: t0 + h });
                    }
                    self.stats.max_correction = self.stats.max_correction.max(change);
                    break;
                }
                prev = change;
                v1.copy_from_slice(&self.next[n..2 * n]);
                a1.copy_from_slice(&self.a_next);
                self.rk4_pass(t0, &v1, &a1)?;
                iters += 1;
                self.stats.corrector_iterations += 1;
            }
        }
        let mut sup = 0.0f64;
        for x in self.next.iter().chain(self.a_next.iter()) {
            if !x.is_finite() {
                return Err(Error::NonFiniteValue { t: t0 + h });
            }
        }
        for x in self.next.iter() {
            sup = sup.max(x.abs());
        }
        if sup > self.cfg.blowup_threshold {
            return Err(Error::BlowUp { t: t0 + h, norm: sup });
        }
        core::mem::swap(&mut self.y, &mut self.next);
        self.step_index += 1;
        self.stats.steps += 1;
        let t1 = self.time();
        let obs = self.model.feedback.observed_sq(&self.y[n..2 * n]);
        let (u, rest) = self.y.split_at(n);
        self.buffer.push(t1, u, &rest[..n], &self.a_next, obs)?;
        if let Some(w) = self.retention {
            self.buffer.drop_before(t1 - w);
        }
        Ok(())
    }
}
