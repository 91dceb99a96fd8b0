use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // unused when std is in the dependency graph
use num_traits::Float;

use super::model::Model;
use super::simulate::Trajectory;
use crate::analysis::{initial_data_measures, lipschitz_state, propagator, SemigroupConstants};
use crate::linalg::Mat;
use crate::quad::{GAUSS5_NODES, GAUSS5_WEIGHTS};
use crate::{Error, Result};

/// Settings for [`picard_oracle`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PicardOptions {
    /// Length `ξ` of the existence interval.
    pub xi: f64,
    /// Number of uniform cells on `[0, ξ]`.
    pub cells: usize,
    /// Stop once successive iterates differ by less than this in sup norm.
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for PicardOptions {
    fn default() -> Self {
        PicardOptions { xi: 0.1, cells: 100, tol: 1e-10, max_iterations: 200 }
    }
}

#[derive(Debug, Clone)]
pub struct PicardResult {
    /// Fixed point on the uniform grid.
    pub trajectory: Trajectory,
    pub iterations: usize,
    /// `M(L(C)ξ + b²∫₀^ξ|k|)`, required to be below `1/4`.
    pub contraction_factor: f64,
    /// Radius `C` of the ball the iteration is confined to.
    pub radius: f64,
    /// Sup-norm difference of the last two iterates.
    pub last_change: f64,
}

/// Cubic Lagrange interpolation of node values `y[i * stride + k]`, `k < n`,
/// at `t` on the grid `i·h`.
#[allow(clippy::too_many_arguments)]
fn interpolate(y: &[f64], stride: usize, offset: usize, n: usize, h: f64, nodes: usize, t: f64, out: &mut [f64]) {
    let x = t / h;
    let mut i0 = x.floor() as isize - 1;
    i0 = i0.clamp(0, nodes as isize - 4).max(0);
    let i0 = i0 as usize;
    let m = nodes.min(4);
    let mut w = [0.0; 4];
    for a in 0..m {
        let xa = (i0 + a) as f64;
        let mut l = 1.0;
        for b in 0..m {
            if a != b {
                let xb = (i0 + b) as f64;
                l *= (x - xb) / (xa - xb);
            }
        }
        w[a] = l;
    }
    for k in 0..n {
        out[k] = (0..m).map(|a| w[a] * y[(i0 + a) * stride + offset + k]).sum();
    }
}

/// Fixed point of the Duhamel map
/// `Γ U(t) = S(t)U₀ + ∫₀^t S(t−s)[F(U(s)) − k(s)𝓑U(s−τ(s))] ds`
/// on `[0, ξ]`, iterated from the constant extension of the initial state.
///
/// `S(t)` is the per-mode exponential of the linear block in the Prony
/// variables. Each cell is advanced by `S(h)` and the forcing integral uses
/// five-point Gauss with the previous iterate interpolated cubically.
pub fn picard_oracle(model: &Model, consts: &SemigroupConstants, opts: &PicardOptions) -> Result<PicardResult> {
    if !(opts.xi > 0.0 && opts.xi.is_finite()) || opts.cells < 3 {
        return Err(Error::InvalidParameter("picard oracle needs xi > 0 and at least three cells".into()));
    }
    let measures = initial_data_measures(model)?;
    let radius = 2.0 * consts.m.max(1.0) * measures.history_sup_reduced;
    let b = model.feedback.b_norm();
    let l = lipschitz_state(&model.nonlinearity, model.beta_tilde(), radius)?;
    let factor = consts.m * (l * opts.xi + b * b * model.gain.abs_integral(0.0, opts.xi));
    if !(factor < 0.25) {
        return Err(Error::NotAContraction { factor });
    }

    let n = model.n_modes();
    let terms = model.n_terms();
    let d = 2 + terms;
    let stride = n * (2 + terms);
    let h = opts.xi / opts.cells as f64;
    let nodes = opts.cells + 1;
    let eig = model.spectrum.eigenvalues();
    let kernel = model.memory.as_ref();
    // Per mode: S(h) and the velocity column of S(h − c_q h).
    let step_maps: Vec<Mat> = eig.iter().map(|&lam| propagator(kernel, lam, h)).collect();
    let columns: Vec<[Vec<f64>; 5]> = eig
        .iter()
        .map(|&lam| {
            core::array::from_fn(|q| {
                let p = propagator(kernel, lam, h * (1.0 - 0.5 * (GAUSS5_NODES[q] + 1.0)));
                (0..d).map(|r| p.get(r, 1)).collect()
            })
        })
        .collect();

    // Node layout: [u (n), v (n), z (terms·n, term-major)].
    let state = model.initial_state()?;
    let mut x0 = Vec::with_capacity(stride);
    x0.extend_from_slice(&state.u);
    x0.extend_from_slice(&state.v);
    x0.extend_from_slice(state.z.as_slice());
    let mut current: Vec<f64> = x0.iter().copied().cycle().take(stride * nodes).collect();
    let mut next = current.clone();

    let mut u_s = vec![0.0; n];
    let mut vd = vec![0.0; n];
    let mut gv = vec![0.0; n];
    let mut grad = vec![0.0; n];
    let mut scratch = vec![0.0; model.nonlinearity.scratch_len()];
    let mut forcing = vec![[0.0; 5]; n];
    let mut local = vec![0.0; d];
    let mut advanced = vec![0.0; d];

    let mut iterations = 0;
    let mut change = f64::INFINITY;
    while change >= opts.tol {
        if iterations >= opts.max_iterations {
            return Err(Error::NoConvergence { iterations });
        }
        next[..stride].copy_from_slice(&x0);
        for c in 0..opts.cells {
            let t0 = c as f64 * h;
            for q in 0..5 {
                let s = t0 + h * 0.5 * (GAUSS5_NODES[q] + 1.0);
                interpolate(&current, stride, 0, n, h, nodes, s, &mut u_s);
                let r = s - model.delay.tau(s);
                if r <= 0.0 {
                    model.history.velocity(r, &mut vd);
                } else {
                    interpolate(&current, stride, n, n, h, nodes, r, &mut vd);
                }
                model.nonlinearity.grad_psi_into(&u_s, &mut grad, &mut scratch);
                let k = model.gain.value(s);
                model.feedback.apply(&vd, &mut gv);
                for i in 0..n {
                    forcing[i][q] = grad[i] - k * gv[i];
                }
            }
            let (done, rest) = next.split_at_mut((c + 1) * stride);
            let prev = &done[c * stride..];
            let out = &mut rest[..stride];
            for i in 0..n {
                local[0] = prev[i];
                local[1] = prev[n + i];
                for j in 0..terms {
                    local[2 + j] = prev[(2 + j) * n + i];
                }
                step_maps[i].mul_vec(&local, &mut advanced);
                for q in 0..5 {
                    let w = 0.5 * h * GAUSS5_WEIGHTS[q] * forcing[i][q];
                    for r in 0..d {
                        advanced[r] += w * columns[i][q][r];
                    }
                }
                out[i] = advanced[0];
                out[n + i] = advanced[1];
                for j in 0..terms {
                    out[(2 + j) * n + i] = advanced[2 + j];
                }
            }
        }
        change = current.iter().zip(&next).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if !change.is_finite() {
            return Err(Error::NonFiniteValue { t: opts.xi });
        }
        core::mem::swap(&mut current, &mut next);
        iterations += 1;
    }

    let mut trajectory = Trajectory::new(n);
    for c in 0..nodes {
        let row = &current[c * stride..(c + 1) * stride];
        trajectory.push(c as f64 * h, &row[..n], &row[n..2 * n]);
    }
    Ok(PicardResult { trajectory, iterations, contraction_factor: factor, radius, last_change: change })
}
