use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // unused when std is in the dependency graph
use num_traits::Float;

use super::Spectrum;
use crate::{Error, Result};

/// Multiplication by the indicator of the observation interval `(a, b)`,
/// projected on the modal basis: `G_jk = ∫_a^b φ_j φ_k dx`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeedbackOperator {
    interval: (f64, f64),
    full: bool,
    gram: Vec<f64>,
    n: usize,
}

pub fn build_feedback(spectrum: &Spectrum, a: f64, b: f64) -> Result<FeedbackOperator> {
    let length = spectrum.length();
    if !(a.is_finite() && b.is_finite()) || a < 0.0 || b > length || a >= b {
        return Err(Error::EmptyObservationSet);
    }
    let n = spectrum.n_modes();
    let full = a == 0.0 && b == length;
    let mut gram = vec![0.0; n * n];
    let c = PI / length;
    for j in 0..n {
        for k in j..n {
            let g = if full {
                if j == k {
                    1.0
                } else {
                    0.0
                }
            } else if j == k {
                let w = 2.0 * (j + 1) as f64 * c;
                let f = |x: f64| x - (w * x).sin() / w;
                (f(b) - f(a)) / length
            } else {
                let d = (j as f64 - k as f64) * c;
                let s = (j + k + 2) as f64 * c;
                let f = |x: f64| (d * x).sin() / d - (s * x).sin() / s;
                (f(b) - f(a)) / length
            };
            gram[j * n + k] = g;
            gram[k * n + j] = g;
        }
    }
    Ok(FeedbackOperator { interval: (a, b), full, gram, n })
}

impl FeedbackOperator {
    pub fn interval(&self) -> (f64, f64) {
        self.interval
    }

    /// Row-major Gram matrix.
    pub fn gram(&self) -> &[f64] {
        &self.gram
    }

    pub fn n_modes(&self) -> usize {
        self.n
    }

    /// Operator norm `b` of `B`; an indicator multiplier has norm one.
    pub fn b_norm(&self) -> f64 {
        1.0
    }

    pub fn is_full(&self) -> bool {
        self.full
    }

    /// `out = G v`.
    pub fn apply(&self, v: &[f64], out: &mut [f64]) {
        if self.full {
            out.copy_from_slice(v);
            return;
        }
        let n = self.n;
        for j in 0..n {
            let row = &self.gram[j * n..(j + 1) * n];
            out[j] = row.iter().zip(v).map(|(g, x)| g * x).sum();
        }
    }

    /// `‖B*v‖² = ⟨Gv, v⟩`.
    pub fn observed_sq(&self, v: &[f64]) -> f64 {
        if self.full {
            return v.iter().map(|x| x * x).sum();
        }
        let n = self.n;
        let mut s = 0.0;
        for j in 0..n {
            let row = &self.gram[j * n..(j + 1) * n];
            let gv: f64 = row.iter().zip(v).map(|(g, x)| g * x).sum();
            s += gv * v[j];
        }
        s
    }
}
