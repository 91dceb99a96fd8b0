use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // unused when std is in the dependency graph
use num_traits::Float;

use crate::{Error, Result};

/// First `n_modes` Dirichlet eigenpairs of `−d²/dx²` on `(0, L)`:
/// `λ_k = (kπ/L)²`, `φ_k(x) = √(2/L) sin(kπx/L)`. Mode index `i` (0-based)
/// carries wavenumber `k = i + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    length: f64,
    eigenvalues: Vec<f64>,
}

pub fn build_spectrum(n_modes: usize, length: f64) -> Result<Spectrum> {
    if n_modes == 0 {
        return Err(Error::InvalidDimension("at least one mode is required"));
    }
    if !(length.is_finite() && length > 0.0) {
        return Err(Error::InvalidDimension("domain length must be positive"));
    }
    let eigenvalues = (1..=n_modes).map(|k| (k as f64 * PI / length).powi(2)).collect();
    Ok(Spectrum { length, eigenvalues })
}

impl Spectrum {
    pub fn n_modes(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn lambda1(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// `φ_{i+1}(x)`.
    pub fn phi(&self, i: usize, x: f64) -> f64 {
        (2.0 / self.length).sqrt() * ((i + 1) as f64 * PI * x / self.length).sin()
    }

    /// `‖u‖² = Σ u_k²`.
    pub fn norm_sq(&self, u: &[f64]) -> f64 {
        u.iter().map(|x| x * x).sum()
    }

    /// `‖A^{1/2}u‖² = Σ λ_k u_k²`.
    pub fn energy_norm_sq(&self, u: &[f64]) -> f64 {
        u.iter().zip(&self.eigenvalues).map(|(x, l)| l * x * x).sum()
    }

    /// Evaluates `Σ u_k φ_k(x)`.
    pub fn synthesize(&self, u: &[f64], x: f64) -> f64 {
        u.iter().enumerate().map(|(i, c)| c * self.phi(i, x)).sum()
    }
}
