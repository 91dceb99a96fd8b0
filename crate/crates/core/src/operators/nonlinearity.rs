use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::SQRT_2;
#[allow(unused_imports)] // unused when std is in the dependency graph
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Spectrum;
use crate::{Error, Result};

/// Source term configuration.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields))]
pub enum NonlinearitySpec {
    /// `ψ ≡ 0`.
    None,
    /// `ψ(u) = (1/(σ+2))∫|u|^{σ+2}`, `∇ψ(u) = |u|^σ u`.
    Power {
        exponent: f64,
        /// Coefficient of `h(z) = c_h z^σ`; derived when absent.
        #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
        c_h: Option<f64>,
        /// Upper end of the admissible exponent range; unrestricted when absent.
        #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
        max_exponent: Option<f64>,
        /// Collocation points; `4 · n_modes` when absent.
        #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
        grid_points: Option<usize>,
    },
    /// `ψ(u) = ‖u‖^{p+2}/(p+2)`, `∇ψ(u) = ‖u‖^p u`.
    Integral {
        exponent: f64,
        #[cfg_attr(feature = "serde", serde(default, skip_serializing_if = "Option::is_none"))]
        c_h: Option<f64>,
    },
}

/// Where the coefficient `c_h` came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoefficientSource {
    Configured,
    /// Derived from Poincaré and discrete Sobolev bounds.
    Analytic,
    /// No source term, `h ≡ 0`.
    Absent,
}

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    None,
    Power { sigma: f64 },
    Integral { p: f64 },
}

/// Collocation grid for the pointwise power nonlinearity.
#[derive(Debug, Clone, PartialEq)]
struct Collocation {
    points: usize,
    weight: f64,
    /// `φ_k(x_m)` at entry `m * n + k`.
    table: Vec<f64>,
}

/// A ready-to-evaluate source term with its growth function
/// `h(z) = c_h z^q` and Lipschitz modulus `L(r) = √2 c_h r^q`.
#[derive(Debug, Clone, PartialEq)]
pub struct Nonlinearity {
    kind: Kind,
    n: usize,
    c_h: f64,
    source: CoefficientSource,
    growth_constant: f64,
    colloc: Option<Collocation>,
}

pub fn build_nonlinearity(spec: &NonlinearitySpec, spectrum: &Spectrum) -> Result<Nonlinearity> {
    let n = spectrum.n_modes();
    let lambda1 = spectrum.lambda1();
    let check_c = |c: Option<f64>| -> Result<()> {
        match c {
            Some(c) if !(c.is_finite() && c > 0.0) => {
                Err(Error::InvalidParameter(format!("c_h must be positive, got {c}")))
            }
            _ => Ok(()),
        }
    };
    match *spec {
        NonlinearitySpec::None => Ok(Nonlinearity {
            kind: Kind::None,
            n,
            c_h: 0.0,
            source: CoefficientSource::Absent,
            growth_constant: 0.0,
            colloc: None,
        }),
        NonlinearitySpec::Integral { exponent: p, c_h } => {
            if !(p.is_finite() && p >= 1.0) {
                return Err(Error::InvalidParameter(format!("integral exponent must be >= 1, got {p}")));
            }
            check_c(c_h)?;
            let growth = lambda1.powf(-(p + 1.0) / 2.0);
            let (c, source) = resolve(c_h, growth, p);
            Ok(Nonlinearity { kind: Kind::Integral { p }, n, c_h: c, source, growth_constant: growth, colloc: None })
        }
        NonlinearitySpec::Power { exponent: sigma, c_h, max_exponent, grid_points } => {
            if !(sigma.is_finite() && sigma > 0.0) {
                return Err(Error::InvalidParameter(format!("power exponent must be positive, got {sigma}")));
            }
            if let Some(max) = max_exponent {
                if sigma > max {
                    return Err(Error::InvalidParameter(format!(
                        "power exponent {sigma} exceeds the admissible maximum {max}"
                    )));
                }
            }
            check_c(c_h)?;
            let points = grid_points.unwrap_or(4 * n);
            if points < n {
                return Err(Error::InvalidParameter("collocation grid must have at least n_modes points".into()));
            }
            let length = spectrum.length();
            let weight = length / (points + 1) as f64;
            let mut table = vec![0.0; points * n];
            let mut sobolev = 0.0f64;
            for m in 0..points {
                let x = (m + 1) as f64 * weight;
                let mut s = 0.0;
                for k in 0..n {
                    let phi = spectrum.phi(k, x);
                    table[m * n + k] = phi;
                    s += phi * phi / spectrum.eigenvalues()[k];
                }
                sobolev = sobolev.max(s);
            }
            let growth = sobolev.sqrt().powf(sigma) * lambda1.powf(-0.5);
            let (c, source) = resolve(c_h, growth, sigma);
            Ok(Nonlinearity {
                kind: Kind::Power { sigma },
                n,
                c_h: c,
                source,
                growth_constant: growth,
                colloc: Some(Collocation { points, weight, table }),
            })
        }
    }
}

/// Configured coefficient, or the smallest `c_h` for which both the growth
/// bound `‖∇ψ(u)‖ ≤ c_h r^{q+1}` and the Lipschitz bound with modulus
/// `√2 c_h r^q` follow from the directional derivative `(q+1)·growth·r^q`.
fn resolve(configured: Option<f64>, growth: f64, q: f64) -> (f64, CoefficientSource) {
    match configured {
        Some(c) => (c, CoefficientSource::Configured),
        None => (growth * 1.0f64.max((q + 1.0) / SQRT_2), CoefficientSource::Analytic),
    }
}

impl Nonlinearity {
    pub fn is_none(&self) -> bool {
        self.kind == Kind::None
    }

    /// Exponent `q` of `h(z) = c_h z^q` (zero without a source).
    pub fn exponent(&self) -> f64 {
        match self.kind {
            Kind::None => 0.0,
            Kind::Power { sigma } => sigma,
            Kind::Integral { p } => p,
        }
    }

    pub fn c_h(&self) -> f64 {
        self.c_h
    }

    pub fn coefficient_source(&self) -> CoefficientSource {
        self.source
    }

    /// Rigorous constant `c` with `‖∇ψ(u)‖ ≤ c‖A^{1/2}u‖^{q+1}` on the
    /// discretised system.
    pub fn growth_constant(&self) -> f64 {
        self.growth_constant
    }

    /// Scratch length required by [`Self::grad_psi_into`].
    pub fn scratch_len(&self) -> usize {
        self.colloc.as_ref().map_or(0, |c| c.points)
    }

    fn grid_values(&self, c: &Collocation, u: &[f64], grid: &mut [f64]) {
        let n = self.n;
        for m in 0..c.points {
            let row = &c.table[m * n..(m + 1) * n];
            grid[m] = row.iter().zip(u).map(|(p, x)| p * x).sum();
        }
    }

    /// `out = ∇ψ(u)`; `scratch` must hold [`Self::scratch_len`] values.
    pub fn grad_psi_into(&self, u: &[f64], out: &mut [f64], scratch: &mut [f64]) {
        match self.kind {
            Kind::None => out.iter_mut().for_each(|o| *o = 0.0),
            Kind::Integral { p } => {
                let norm_sq: f64 = u.iter().map(|x| x * x).sum();
                let f = if norm_sq == 0.0 { 0.0 } else { norm_sq.powf(0.5 * p) };
                for (o, x) in out.iter_mut().zip(u) {
                    *o = f * x;
                }
            }
            Kind::Power { sigma } => {
                let c = self.colloc.as_ref().expect("power family has a grid");
                let grid = &mut scratch[..c.points];
                self.grid_values(c, u, grid);
                for g in grid.iter_mut() {
                    let a = g.abs();
                    *g = if a == 0.0 { 0.0 } else { a.powf(sigma) * *g };
                }
                let n = self.n;
                out.iter_mut().for_each(|o| *o = 0.0);
                for m in 0..c.points {
                    let f = grid[m] * c.weight;
                    if f == 0.0 {
                        continue;
                    }
                    let row = &c.table[m * n..(m + 1) * n];
                    for (o, p) in out.iter_mut().zip(row) {
                        *o += f * p;
                    }
                }
            }
        }
    }

    /// `∇ψ(u)`.
    pub fn grad_psi(&self, u: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; u.len()];
        let mut scratch = vec![0.0; self.scratch_len()];
        self.grad_psi_into(u, &mut out, &mut scratch);
        if out.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFiniteValue { t: f64::NAN });
        }
        Ok(out)
    }

    /// `ψ(u)`; for the power family the collocation sum whose exact gradient
    /// is [`Self::grad_psi`].
    pub fn psi(&self, u: &[f64]) -> Result<f64> {
        let v = match self.kind {
            Kind::None => 0.0,
            Kind::Integral { p } => {
                let norm: f64 = u.iter().map(|x| x * x).sum::<f64>().sqrt();
                norm.powf(p + 2.0) / (p + 2.0)
            }
            Kind::Power { sigma } => {
                let c = self.colloc.as_ref().expect("power family has a grid");
                let mut grid = vec![0.0; c.points];
                self.grid_values(c, u, &mut grid);
                c.weight / (sigma + 2.0) * grid.iter().map(|g| g.abs().powf(sigma + 2.0)).sum::<f64>()
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFiniteValue { t: f64::NAN })
        }
    }

    /// `h(z) = c_h z^q`.
    pub fn h(&self, z: f64) -> Result<f64> {
        if z < 0.0 {
            return Err(Error::NegativeArgument);
        }
        Ok(if self.is_none() { 0.0 } else { self.c_h * z.powf(self.exponent()) })
    }

    /// `h^{-1}(y) = (y/c_h)^{1/q}`; infinite without a source.
    pub fn h_inverse(&self, y: f64) -> Result<f64> {
        if y < 0.0 {
            return Err(Error::NegativeArgument);
        }
        Ok(if self.is_none() { f64::INFINITY } else { (y / self.c_h).powf(1.0 / self.exponent()) })
    }

    /// `L(r) = √2 c_h r^q`.
    pub fn lipschitz(&self, r: f64) -> Result<f64> {
        if r < 0.0 {
            return Err(Error::NegativeArgument);
        }
        Ok(if self.is_none() { 0.0 } else { SQRT_2 * self.c_h * r.powf(self.exponent()) })
    }
}

/// Largest sampled ratio `‖∇ψ(u)‖ / ‖A^{1/2}u‖^{q+1}` over `samples` random
/// modal vectors with spectrally decaying coefficients. This is the empirical
/// counterpart of [`Nonlinearity::growth_constant`].
pub fn sampled_growth_ratio(nl: &Nonlinearity, spectrum: &Spectrum, samples: usize, seed: u64) -> f64 {
    if nl.is_none() {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = spectrum.n_modes();
    let q = nl.exponent();
    let mut best = 0.0f64;
    let mut u = vec![0.0; n];
    let mut out = vec![0.0; n];
    let mut scratch = vec![0.0; nl.scratch_len()];
    for _ in 0..samples {
        let decay: f64 = rng.random_range(0.0..2.0);
        let active = rng.random_range(1..=n);
        for (k, x) in u.iter_mut().enumerate() {
            *x = if k < active { rng.random_range(-1.0..1.0) / ((k + 1) as f64).powf(decay) } else { 0.0 };
        }
        let scale: f64 = 10f64.powf(rng.random_range(-3.0..1.0));
        u.iter_mut().for_each(|x| *x *= scale);
        let r = spectrum.energy_norm_sq(&u).sqrt();
        if r == 0.0 {
            continue;
        }
        nl.grad_psi_into(&u, &mut out, &mut scratch);
        let g = out.iter().map(|x| x * x).sum::<f64>().sqrt();
        best = best.max(g / r.powf(q + 1.0));
    }
    best
}

fn random_modal(rng: &mut ChaCha8Rng, n: usize, u: &mut [f64]) {
    let decay: f64 = rng.random_range(0.0..2.0);
    let active = rng.random_range(1..=n);
    for (k, x) in u.iter_mut().enumerate() {
        *x = if k < active { rng.random_range(-1.0..1.0) / ((k + 1) as f64).powf(decay) } else { 0.0 };
    }
}

/// Largest sampled ratio `‖∇ψ(u) − ∇ψ(w)‖ / (L(r)‖A^{1/2}(u − w)‖)` over
/// random pairs inside the ball `‖A^{1/2}·‖ ≤ r`, with `r` drawn per pair.
pub fn sampled_lipschitz_ratio(nl: &Nonlinearity, spectrum: &Spectrum, samples: usize, seed: u64) -> f64 {
    if nl.is_none() {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = spectrum.n_modes();
    let (mut u, mut w, mut d) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let (mut gu, mut gw) = (vec![0.0; n], vec![0.0; n]);
    let mut scratch = vec![0.0; nl.scratch_len()];
    let mut best = 0.0f64;
    for _ in 0..samples {
        let r: f64 = 10f64.powf(rng.random_range(-3.0..1.0));
        for x in [&mut u, &mut w] {
            random_modal(&mut rng, n, x);
            let norm = spectrum.energy_norm_sq(x).sqrt();
            if norm == 0.0 {
                continue;
            }
            let target = r * rng.random_range(0.0..1.0);
            x.iter_mut().for_each(|c| *c *= target / norm);
        }
        for k in 0..n {
            d[k] = u[k] - w[k];
        }
        let dist = spectrum.energy_norm_sq(&d).sqrt();
        if dist == 0.0 {
            continue;
        }
        nl.grad_psi_into(&u, &mut gu, &mut scratch);
        nl.grad_psi_into(&w, &mut gw, &mut scratch);
        let diff = gu.iter().zip(&gw).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        let l = nl.lipschitz(r).unwrap_or(f64::INFINITY);
        best = best.max(diff / (l * dist));
    }
    best
}

/// Largest relative mismatch between `⟨∇ψ(u), w⟩` and the extrapolated
/// central difference of `ψ` along `w` over random `u, w`.
pub fn sampled_gradient_mismatch(nl: &Nonlinearity, spectrum: &Spectrum, samples: usize, seed: u64) -> f64 {
    if nl.is_none() {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = spectrum.n_modes();
    let (mut u, mut w, mut g) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let (mut up, mut um) = (vec![0.0; n], vec![0.0; n]);
    let mut scratch = vec![0.0; nl.scratch_len()];
    let mut worst = 0.0f64;
    for _ in 0..samples {
        random_modal(&mut rng, n, &mut u);
        random_modal(&mut rng, n, &mut w);
        let mut central = |eps: f64| -> Option<f64> {
            for k in 0..n {
                up[k] = u[k] + eps * w[k];
                um[k] = u[k] - eps * w[k];
            }
            Some((nl.psi(&up).ok()? - nl.psi(&um).ok()?) / (2.0 * eps))
        };
        // One Richardson step removes the leading O(eps²) error.
        let (Some(coarse), Some(fine)) = (central(2e-4), central(1e-4)) else {
            return f64::INFINITY;
        };
        let fd = (4.0 * fine - coarse) / 3.0;
        nl.grad_psi_into(&u, &mut g, &mut scratch);
        let exact: f64 = g.iter().zip(&w).map(|(a, b)| a * b).sum();
        let scale = g.iter().map(|x| x * x).sum::<f64>().sqrt() * w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if scale > 0.0 {
            worst = worst.max((fd - exact).abs() / scale);
        }
    }
    worst
}
