//! Prony-sum memory kernels `β(s) = Σ_j b_j e^{−δ_j s}`.
//!
//! For such kernels the modal convolution `∫₀^∞ b_j e^{−δ_j s} u_k(t−s) ds`
//! obeys the local ODE `z' = b_j u_k − δ_j z`, which is what the integrator
//! evolves. The history energy `½∫β(s)‖A^{1/2}(u(t) − u(t−s))‖² ds` is
//! evaluated separately by quadrature along the stored past.

use alloc::vec;
use core::cell::RefCell;
use alloc::vec::Vec;
#[allow(unused_imports)] // unused when std is in the dependency graph
use num_traits::Float;

use crate::delay::InitialHistory;
use crate::quad::SimpsonRefiner;
use crate::{Error, Result};

/// One exponential term `weight · e^{−rate·s}` of a Prony kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct PronyTerm {
    pub weight: f64,
    pub rate: f64,
}

/// A validated Prony kernel together with its derived constants.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSpec {
    terms: Vec<PronyTerm>,
    beta0: f64,
    beta_tilde: f64,
    delta: f64,
}

/// Builds a kernel from `(weight, rate)` pairs.
pub fn make_kernel(terms: &[(f64, f64)]) -> Result<KernelSpec> {
    KernelSpec::new(terms.iter().map(|&(weight, rate)| PronyTerm { weight, rate }).collect())
}

impl KernelSpec {
    /// Validates positivity of every term and `Σ b_j/δ_j < 1`.
    pub fn new(terms: Vec<PronyTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::EmptyKernel);
        }
        for (index, t) in terms.iter().enumerate() {
            let ok = t.weight.is_finite() && t.rate.is_finite() && t.weight > 0.0 && t.rate > 0.0;
            if !ok {
                return Err(Error::NonPositiveTerm { index });
            }
        }
        let beta0 = terms.iter().map(|t| t.weight).sum();
        let beta_tilde: f64 = terms.iter().map(|t| t.weight / t.rate).sum();
        let delta = terms.iter().map(|t| t.rate).fold(f64::INFINITY, f64::min);
        if beta_tilde >= 1.0 {
            return Err(Error::MassNotLessThanOne { mass: beta_tilde });
        }
        Ok(KernelSpec { terms, beta0, beta_tilde, delta })
    }

    pub fn terms(&self) -> &[PronyTerm] {
        &self.terms
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    /// `β(0) = Σ b_j`.
    pub fn beta0(&self) -> f64 {
        self.beta0
    }

    /// Total mass `β̃ = Σ b_j/δ_j`.
    pub fn beta_tilde(&self) -> f64 {
        self.beta_tilde
    }

    /// Decay floor `δ = min_j δ_j`, the best constant with `β' ≤ −δβ`.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn beta(&self, s: f64) -> f64 {
        self.terms.iter().map(|t| t.weight * (-t.rate * s).exp()).sum()
    }

    pub fn beta_prime(&self, s: f64) -> f64 {
        self.terms.iter().map(|t| -t.rate * t.weight * (-t.rate * s).exp()).sum()
    }

    /// `∫_s^∞ β`.
    pub fn tail_mass(&self, s: f64) -> f64 {
        self.terms.iter().map(|t| t.weight / t.rate * (-t.rate * s).exp()).sum()
    }
}

/// Prony convolution state, laid out term-major: entry `j * n_modes + k`.
#[derive(Debug, Clone, PartialEq)]
pub struct MemoryState {
    n_terms: usize,
    n_modes: usize,
    z: Vec<f64>,
}

impl MemoryState {
    pub fn zeros(n_terms: usize, n_modes: usize) -> Self {
        MemoryState { n_terms, n_modes, z: vec![0.0; n_terms * n_modes] }
    }

    /// Wraps term-major data.
    pub fn from_vec(n_terms: usize, n_modes: usize, z: Vec<f64>) -> Result<Self> {
        if z.len() != n_terms * n_modes {
            return Err(Error::ShapeMismatch { expected: n_terms * n_modes, found: z.len() });
        }
        Ok(MemoryState { n_terms, n_modes, z })
    }

    pub fn n_terms(&self) -> usize {
        self.n_terms
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.z[j * self.n_modes + k]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.z
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.z
    }

    /// `Σ_j z_{j,k}`, the modal convolution `∫β(s)u_k(t−s)ds`.
    pub fn convolution(&self, k: usize) -> f64 {
        (0..self.n_terms).map(|j| self.z[j * self.n_modes + k]).sum()
    }
}

/// `z'_{j,k} = b_j u_k − δ_j z_{j,k}`.
pub fn memory_rhs(kernel: &KernelSpec, z: &MemoryState, u: &[f64]) -> Result<MemoryState> {
    if z.n_terms != kernel.n_terms() {
        return Err(Error::ShapeMismatch { expected: kernel.n_terms(), found: z.n_terms });
    }
    if u.len() != z.n_modes {
        return Err(Error::ShapeMismatch { expected: z.n_modes, found: u.len() });
    }
    let mut out = MemoryState::zeros(z.n_terms, z.n_modes);
    memory_rhs_into(kernel, &z.z, u, &mut out.z);
    Ok(out)
}

/// Slice form of [`memory_rhs`] for hot loops; shapes are the caller's duty.
#[inline]
pub fn memory_rhs_into(kernel: &KernelSpec, z: &[f64], u: &[f64], out: &mut [f64]) {
    let n = u.len();
    for (j, term) in kernel.terms.iter().enumerate() {
        let zj = &z[j * n..(j + 1) * n];
        let oj = &mut out[j * n..(j + 1) * n];
        for k in 0..n {
            oj[k] = term.weight * u[k] - term.rate * zj[k];
        }
    }
}

/// Memory state at `t = 0` from the initial position history:
/// `z_{j,k}(0) = ∫₀^∞ b_j e^{−δ_j s} u₀,k(−s) ds`.
///
/// The history is `shape · p(t)` with a scalar profile `p` that is constant for
/// `t ≤ −T_hist`, so the integral is a composite Simpson sum on `[0, T_hist]`
/// plus a closed-form exponential tail.
pub fn init_memory_state(kernel: &KernelSpec, history: &InitialHistory) -> Result<MemoryState> {
    let shape = history.position_shape();
    let n = shape.len();
    let t_flat = history.flat_before();
    if !t_flat.is_finite() || t_flat > 0.0 {
        return Err(Error::UnsupportedHistoryFamily("position history must be flat before some finite time <= 0"));
    }
    let s_flat = -t_flat;
    let p_flat = history.position_factor(t_flat);
    let mut out = MemoryState::zeros(kernel.n_terms(), n);
    for (j, term) in kernel.terms.iter().enumerate() {
        let mut integral = p_flat * (-term.rate * s_flat).exp() / term.rate;
        if s_flat > 0.0 {
            let mut f = |s: f64| (-term.rate * s).exp() * history.position_factor(-s);
            let mut r = SimpsonRefiner::new(&mut f, 0.0, s_flat, 400);
            for _ in 0..12 {
                let change = r.double(&mut f);
                if change <= 1e-13 * r.estimate().abs() || change <= 1e-300 {
                    break;
                }
            }
            integral += r.estimate();
        }
        for k in 0..n {
            out.z[j * n + k] = term.weight * shape[k] * integral;
        }
    }
    Ok(out)
}

/// Read access to the position of a trajectory at past times, used by the
/// history-energy quadrature.
pub trait PastTrajectory {
    /// Writes `u(t)` into `out`.
    fn position(&self, t: f64, out: &mut [f64]) -> Result<()>;

    /// `Some((t_flat, u_flat))` when `u(t) = u_flat` for every `t ≤ t_flat`.
    fn flat_position(&self) -> Option<(f64, &[f64])>;

    /// Times across which `u` may be only once differentiable; the quadrature
    /// splits there.
    fn breakpoints(&self) -> Vec<f64> {
        vec![0.0]
    }
}

/// Tuning for [`eta_energy`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaQuadrature {
    /// Truncation point; `None` means `max(20/δ, now + T_hist)`.
    pub s_cut: Option<f64>,
    /// Intervals per sub-piece in the first pass.
    pub n0: usize,
    /// Relative tolerance of the whole integral.
    pub rtol: f64,
}

impl Default for EtaQuadrature {
    fn default() -> Self {
        EtaQuadrature { s_cut: None, n0: 64, rtol: 1e-8 }
    }
}

/// History energy `½∫₀^∞ β(s) Σ_k λ_k (u_k(now) − u_k(now−s))² ds`.
///
/// The `s` axis is cut at the trajectory's breakpoints and at the start of its
/// flat pre-history. Pieces in between are split geometrically in units of
/// `1/δ` and integrated by refined Simpson sums; the flat part and the tail
/// beyond `S_cut` are closed-form.
pub fn eta_energy(
    kernel: &KernelSpec,
    eigs: &[f64],
    now: f64,
    u_now: &[f64],
    past: &dyn PastTrajectory,
    opts: &EtaQuadrature,
) -> Result<f64> {
    let n = eigs.len();
    if u_now.len() != n {
        return Err(Error::ShapeMismatch { expected: n, found: u_now.len() });
    }
    let flat = past.flat_position();
    let s_flat = flat.map(|(tf, _)| now - tf);
    let s_cut = opts.s_cut.unwrap_or_else(|| {
        let base = 20.0 / kernel.delta();
        match s_flat {
            Some(s) => base.max(s),
            None => base,
        }
    });
    // Upper end of the quadrature region.
    let s_end = match s_flat {
        Some(s) => s.min(s_cut).max(0.0),
        None => s_cut,
    };

    let mut scratch = vec![0.0; n];
    let first_error: RefCell<Option<Error>> = RefCell::new(None);
    let mut integrand = |s: f64| -> f64 {
        if first_error.borrow().is_some() {
            return 0.0;
        }
        if let Err(e) = past.position(now - s, &mut scratch) {
            *first_error.borrow_mut() = Some(e);
            return 0.0;
        }
        let mut d = 0.0;
        for k in 0..n {
            let diff = u_now[k] - scratch[k];
            d += eigs[k] * diff * diff;
        }
        kernel.beta(s) * d
    };

    // Piece boundaries in s.
    let mut cuts: Vec<f64> = vec![0.0, s_end];
    for tb in past.breakpoints() {
        let s = now - tb;
        if s > 0.0 && s < s_end {
            cuts.push(s);
        }
    }
    let w = 1.0 / kernel.delta();
    let mut g = w;
    while g < s_end {
        cuts.push(g);
        g *= 2.0;
    }
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    cuts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1.0 + b.abs()));

    let mut pieces: Vec<SimpsonRefiner> = Vec::with_capacity(cuts.len());
    let mut changes: Vec<f64> = Vec::with_capacity(cuts.len());
    for win in cuts.windows(2) {
        if win[1] <= win[0] {
            continue;
        }
        let mut r = SimpsonRefiner::new(&mut integrand, win[0], win[1], opts.n0);
        let change = r.double(&mut integrand);
        pieces.push(r);
        changes.push(change);
    }

    // Closed-form part: flat history region and tail.
    let mut analytic = 0.0;
    match flat {
        Some((_, u_flat)) => {
            let d: f64 = (0..n).map(|k| eigs[k] * (u_now[k] - u_flat[k]).powi(2)).sum();
            analytic += 0.5 * kernel.tail_mass(s_end) * d;
        }
        None => {
            let mut far = vec![0.0; n];
            past.position(now - s_cut, &mut far)?;
            let d: f64 = (0..n).map(|k| eigs[k] * (u_now[k] - far[k]).powi(2)).sum();
            analytic += 0.5 * kernel.tail_mass(s_cut) * d;
        }
    }
    if let Some(e) = first_error.borrow_mut().take() {
        return Err(e);
    }

    let total0: f64 = 0.5 * pieces.iter().map(|p| p.estimate()).sum::<f64>() + analytic;
    let atol = opts.rtol * total0.abs() / (pieces.len().max(1) as f64);
    for (p, c) in pieces.iter_mut().zip(changes.iter_mut()) {
        let mut doublings = 0;
        while 0.5 * *c > atol && doublings < 12 {
            *c = p.double(&mut integrand);
            doublings += 1;
        }
    }
    if let Some(e) = first_error.borrow_mut().take() {
        return Err(e);
    }
    let value = 0.5 * pieces.iter().map(|p| p.estimate()).sum::<f64>() + analytic;
    Ok(value.max(0.0))
}
