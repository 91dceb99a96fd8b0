use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // unused when std is in the dependency graph
use num_traits::Float;

use crate::kernel::KernelSpec;
use crate::linalg::{poly_mul, poly_roots, Mat};
use crate::operators::Spectrum;
use crate::quad::golden_max;
use crate::{Error, Result};

/// Linear block of one mode acting on `(u_k, v_k, z_{1,k}, …, z_{J,k})`.
pub fn mode_block(kernel: Option<&KernelSpec>, lambda: f64) -> Mat {
    let terms = kernel.map_or(&[][..], |k| k.terms());
    let d = 2 + terms.len();
    let mut b = Mat::zeros(d);
    b.set(0, 1, 1.0);
    b.set(1, 0, -lambda);
    for (j, t) in terms.iter().enumerate() {
        b.set(1, 2 + j, lambda);
        b.set(2 + j, 0, t.weight);
        b.set(2 + j, 2 + j, -t.rate);
    }
    b
}

/// Matrix `R` with `‖x‖_W = ‖R x‖₂` for the reduced norm of one mode:
/// `(1−β̃)λu² + v² + Σ_j (λδ_j/b_j)((b_j/δ_j)u − z_j)²`.
///
/// The memory part is a Cauchy–Schwarz lower bound of the history energy
/// `∫β(s)λ(u(t) − u(t−s))² ds` expressed in the Prony variables.
pub fn reduced_weight_matrix(kernel: Option<&KernelSpec>, lambda: f64) -> Mat {
    let terms = kernel.map_or(&[][..], |k| k.terms());
    let beta_tilde = kernel.map_or(0.0, |k| k.beta_tilde());
    let d = 2 + terms.len();
    let mut r = Mat::zeros(d);
    r.set(0, 0, ((1.0 - beta_tilde) * lambda).sqrt());
    r.set(1, 1, 1.0);
    for (j, t) in terms.iter().enumerate() {
        let w = (lambda * t.rate / t.weight).sqrt();
        r.set(2 + j, 0, w * t.weight / t.rate);
        r.set(2 + j, 2 + j, -w);
    }
    r
}

/// Squared reduced norm of a full modal state; `z` is term-major.
pub fn reduced_norm_sq(kernel: Option<&KernelSpec>, eigenvalues: &[f64], u: &[f64], v: &[f64], z: &[f64]) -> f64 {
    let n = eigenvalues.len();
    let beta_tilde = kernel.map_or(0.0, |k| k.beta_tilde());
    let terms = kernel.map_or(&[][..], |k| k.terms());
    let mut s = 0.0;
    for k in 0..n {
        let l = eigenvalues[k];
        s += (1.0 - beta_tilde) * l * u[k] * u[k] + v[k] * v[k];
        for (j, t) in terms.iter().enumerate() {
            let zeta = t.weight / t.rate * u[k] - z[j * n + k];
            s += l * t.rate / t.weight * zeta * zeta;
        }
    }
    s
}

/// Options for [`estimate_semigroup_constants`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemigroupOptions {
    /// Minimum number of uniform grid points per mode.
    pub grid_points: usize,
    /// Time horizon of the sampling; `None` means `max(20/ω, 10)`.
    pub t_max: Option<f64>,
    /// Fold the `λ → ∞` limit of the per-mode decay rates into `ω`.
    pub include_asymptotic: bool,
    /// Number of sampled local maxima refined by golden-section search.
    pub refine_peaks: usize,
}

impl Default for SemigroupOptions {
    fn default() -> Self {
        SemigroupOptions { grid_points: 4000, t_max: None, include_asymptotic: true, refine_peaks: 8 }
    }
}

/// Transient bound `M` and rate `ω` with `‖S(t)‖_W ≤ M e^{−ωt}` for the
/// reduced linear system.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SemigroupConstants {
    pub m: f64,
    pub omega: f64,
    /// `min_k(−α_k)` over the retained modes.
    pub omega_modes: f64,
    /// Limit of the per-mode rates as `λ → ∞` (infinite when not requested).
    pub omega_asymptotic: f64,
    /// Spectral abscissa of each mode block.
    pub abscissae: Vec<f64>,
    /// Mode attaining `M`.
    pub m_mode: usize,
    /// Time at which `M` is attained.
    pub m_time: f64,
    pub n_modes: usize,
    pub grid_points: usize,
    pub t_max: f64,
}

/// Spectral abscissa of the block for eigenvalue `lambda`, from the roots of
/// `(s² + λ)Π(s + δ_j) − λ Σ_j b_j Π_{i≠j}(s + δ_i)`.
pub fn mode_abscissa(kernel: Option<&KernelSpec>, lambda: f64) -> f64 {
    let terms = kernel.map_or(&[][..], |k| k.terms());
    let mut prod = vec![1.0];
    for t in terms {
        prod = poly_mul(&prod, &[t.rate, 1.0]);
    }
    let mut p = poly_mul(&[lambda, 0.0, 1.0], &prod);
    for (j, t) in terms.iter().enumerate() {
        let mut q = vec![1.0];
        for (i, ti) in terms.iter().enumerate() {
            if i != j {
                q = poly_mul(&q, &[ti.rate, 1.0]);
            }
        }
        for (c, x) in q.iter().enumerate() {
            p[c] -= lambda * t.weight * x;
        }
    }
    poly_roots(&p).iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)
}

/// `min(β₀/2, −s*)` where `s*` is the root of `Σ b_j/(s + δ_j) = 1` above `−δ`.
fn asymptotic_rate(kernel: &KernelSpec) -> f64 {
    let f = |s: f64| kernel.terms().iter().map(|t| t.weight / (s + t.rate)).sum::<f64>() - 1.0;
    let mut lo = -kernel.delta() * (1.0 - 1e-15);
    let mut hi = 0.0;
    // f(lo) > 0 near the pole and f(0) = β̃ − 1 < 0.
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (0.5 * kernel.beta0()).min(-0.5 * (lo + hi))
}

fn weighted_norm(r: &Mat, p: &Mat, rinv: &Mat) -> f64 {
    r.mul(p).mul(rinv).spectral_norm()
}

pub fn estimate_semigroup_constants(
    spectrum: &Spectrum,
    kernel: Option<&KernelSpec>,
    opts: &SemigroupOptions,
) -> Result<SemigroupConstants> {
    let eig = spectrum.eigenvalues();
    let mut abscissae = Vec::with_capacity(eig.len());
    for (mode, &l) in eig.iter().enumerate() {
        let a = mode_abscissa(kernel, l);
        if !(a < 0.0) {
            return Err(Error::NotExponentiallyStable { mode, abscissa: a });
        }
        abscissae.push(a);
    }
    let omega_modes = abscissae.iter().map(|a| -a).fold(f64::INFINITY, f64::min);
    let omega_asymptotic = match (kernel, opts.include_asymptotic) {
        (Some(k), true) => asymptotic_rate(k),
        _ => f64::INFINITY,
    };
    let omega = omega_modes.min(omega_asymptotic);
    let t_max = opts.t_max.unwrap_or((20.0 / omega).max(10.0));

    let mut m = 1.0f64;
    let mut m_mode = 0;
    let mut m_time = 0.0;
    for (mode, &l) in eig.iter().enumerate() {
        let b = mode_block(kernel, l);
        let r = reduced_weight_matrix(kernel, l);
        let rinv = r.inverse().ok_or(Error::InvalidDimension("singular weight matrix"))?;
        let gap = -abscissae[mode] - omega;
        let horizon = if gap > 1e-9 { t_max.min(40.0 / gap).max(1.0) } else { t_max };
        let dt_res = core::f64::consts::PI / (8.0 * (l.sqrt() + 1.0));
        let points = ((horizon / dt_res).ceil() as usize).max(opts.grid_points.max(1));
        let dt = horizon / points as f64;
        let f = |t: f64| (omega * t).exp() * weighted_norm(&r, &b.scaled(t).expm(), &rinv);

        let mut values = Vec::with_capacity(points + 1);
        let step = b.scaled(dt).expm();
        let mut p = Mat::identity(b.dim());
        values.push(1.0);
        for i in 1..=points {
            p = p.mul(&step);
            values.push((omega * dt * i as f64).exp() * weighted_norm(&r, &p, &rinv));
        }
        // Extra resolution near t = 0, where transients start.
        for j in 1..=40 {
            let t = dt * 10f64.powf(-(j as f64) / 10.0);
            let v = f(t);
            if v > m {
                m = v;
                m_mode = mode;
                m_time = t;
            }
        }
        let mut peaks: Vec<usize> =
            (1..points).filter(|&i| values[i] >= values[i - 1] && values[i] >= values[i + 1]).collect();
        peaks.sort_by(|&a, &b| values[b].partial_cmp(&values[a]).unwrap_or(core::cmp::Ordering::Equal));
        for (i, &v) in values.iter().enumerate() {
            if v > m {
                m = v;
                m_mode = mode;
                m_time = dt * i as f64;
            }
        }
        for &i in peaks.iter().take(opts.refine_peaks) {
            let lo = dt * (i - 1) as f64;
            let hi = dt * (i + 1) as f64;
            let (t, v) = golden_max(f, lo, hi, 1e-11 * (1.0 + hi));
            if v > m {
                m = v;
                m_mode = mode;
                m_time = t;
            }
        }
    }
    Ok(SemigroupConstants {
        m,
        omega,
        omega_modes,
        omega_asymptotic,
        abscissae,
        m_mode,
        m_time,
        n_modes: eig.len(),
        grid_points: opts.grid_points,
        t_max,
    })
}

/// `e^{tB}` for the block of eigenvalue `lambda`.
pub(crate) fn propagator(kernel: Option<&KernelSpec>, lambda: f64, t: f64) -> Mat {
    mode_block(kernel, lambda).scaled(t).expm()
}
