use alloc::vec;
use alloc::vec::Vec;

use crate::delay::{DelaySpec, GainSpec, InitialHistory};
use crate::kernel::{init_memory_state, memory_rhs_into, KernelSpec, MemoryState};
use crate::operators::{FeedbackOperator, Nonlinearity, Spectrum};
use crate::{Error, Result};

/// Every ingredient of the evolution problem, assembled and validated.
#[derive(Debug, Clone)]
pub struct Model {
    pub spectrum: Spectrum,
    /// `None` switches the memory term off.
    pub memory: Option<KernelSpec>,
    pub feedback: FeedbackOperator,
    pub nonlinearity: Nonlinearity,
    pub delay: DelaySpec,
    pub gain: GainSpec,
    pub history: InitialHistory,
}

impl Model {
    pub fn n_modes(&self) -> usize {
        self.spectrum.n_modes()
    }

    pub fn n_terms(&self) -> usize {
        self.memory.as_ref().map_or(0, |k| k.n_terms())
    }

    /// `β̃`, zero without memory.
    pub fn beta_tilde(&self) -> f64 {
        self.memory.as_ref().map_or(0.0, |k| k.beta_tilde())
    }

    /// Initial state `(u₀(0), g(0), z(0))`.
    pub fn initial_state(&self) -> Result<SimState> {
        let n = self.n_modes();
        if self.history.n_modes() != n {
            return Err(Error::ShapeMismatch { expected: n, found: self.history.n_modes() });
        }
        let z = match &self.memory {
            Some(k) => init_memory_state(k, &self.history)?,
            None => MemoryState::zeros(0, n),
        };
        Ok(SimState { t: 0.0, u: self.history.u0(), v: self.history.u1(), z })
    }

    /// Copy with a different initial history.
    pub fn with_history(&self, history: InitialHistory) -> Model {
        Model { history, ..self.clone() }
    }
}

/// Modal state at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub t: f64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub z: MemoryState,
}

/// Scratch buffers for right-hand-side evaluations.
#[derive(Debug, Clone)]
pub struct Workspace {
    grad: Vec<f64>,
    gv: Vec<f64>,
    grid: Vec<f64>,
}

impl Workspace {
    pub fn new(model: &Model) -> Self {
        let n = model.n_modes();
        Workspace { grad: vec![0.0; n], gv: vec![0.0; n], grid: vec![0.0; model.nonlinearity.scratch_len()] }
    }
}

/// Acceleration `dv` at time `t` for position `u`, memory `z` and delayed
/// velocity `vd`.
#[inline]
pub(crate) fn acceleration_into(
    model: &Model,
    t: f64,
    u: &[f64],
    z: &[f64],
    vd: &[f64],
    dv: &mut [f64],
    ws: &mut Workspace,
) {
    let n = u.len();
    let eig = model.spectrum.eigenvalues();
    let k = model.gain.value(t);
    model.nonlinearity.grad_psi_into(u, &mut ws.grad, &mut ws.grid);
    if k != 0.0 {
        model.feedback.apply(vd, &mut ws.gv);
    } else {
        ws.gv.iter_mut().for_each(|x| *x = 0.0);
    }
    let terms = model.n_terms();
    for i in 0..n {
        let mut conv = 0.0;
        for j in 0..terms {
            conv += z[j * n + i];
        }
        dv[i] = -eig[i] * u[i] + eig[i] * conv - k * ws.gv[i] + ws.grad[i];
    }
}

/// Full right-hand side; `dz` is left untouched without memory.
#[allow(clippy::too_many_arguments)]
#[inline]
pub(crate) fn rhs_into(
    model: &Model,
    t: f64,
    u: &[f64],
    v: &[f64],
    z: &[f64],
    vd: &[f64],
    du: &mut [f64],
    dv: &mut [f64],
    dz: &mut [f64],
    ws: &mut Workspace,
) {
    du.copy_from_slice(v);
    acceleration_into(model, t, u, z, vd, dv, ws);
    if let Some(kernel) = &model.memory {
        memory_rhs_into(kernel, z, u, dz);
    }
}

/// `(du, dv, dz)` of the modal system at `state` with delayed velocity
/// `delayed_v = v(t − τ(t))`.
pub fn rhs(model: &Model, state: &SimState, delayed_v: &[f64]) -> Result<(Vec<f64>, Vec<f64>, MemoryState)> {
    let n = model.n_modes();
    for len in [state.u.len(), state.v.len(), delayed_v.len()] {
        if len != n {
            return Err(Error::ShapeMismatch { expected: n, found: len });
        }
    }
    let mut ws = Workspace::new(model);
    let mut du = vec![0.0; n];
    let mut dv = vec![0.0; n];
    let mut dz = MemoryState::zeros(model.n_terms(), n);
    rhs_into(model, state.t, &state.u, &state.v, state.z.as_slice(), delayed_v, &mut du, &mut dv, dz.as_mut_slice(), &mut ws);
    if du.iter().chain(&dv).chain(dz.as_slice()).any(|x| !x.is_finite()) {
        return Err(Error::NonFiniteValue { t: state.t });
    }
    Ok((du, dv, dz))
}
