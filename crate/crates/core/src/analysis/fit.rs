use alloc::vec::Vec;
#[allow(unused_imports)] // unused when std is in the dependency graph
use num_traits::Float;

use super::EnergyReport;
use crate::{Error, Result};

/// Samples used by [`decay_fit_series`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum FitMethod {
    /// Every sample in the window.
    Raw,
    /// Local maxima of `E` only, used when the raw fit is poor.
    Envelope,
}

/// Least-squares fit `log E ≈ log(amplitude) − rate·t`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DecayFit {
    /// Positive for decay.
    pub rate: f64,
    pub amplitude: f64,
    pub r2: f64,
    pub method: FitMethod,
    pub points: usize,
}

/// Raw fits with `r²` below this fall back to the envelope.
const ENVELOPE_THRESHOLD: f64 = 0.9;

fn line_fit(t: &[f64], y: &[f64]) -> Option<(f64, f64, f64)> {
    let n = t.len();
    if n < 2 {
        return None;
    }
    let nf = n as f64;
    let tm = t.iter().sum::<f64>() / nf;
    let ym = y.iter().sum::<f64>() / nf;
    let (mut stt, mut sty, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in t.iter().zip(y) {
        let (dt, dy) = (a - tm, b - ym);
        stt += dt * dt;
        sty += dt * dy;
        syy += dy * dy;
    }
    if stt == 0.0 {
        return None;
    }
    let slope = sty / stt;
    let intercept = ym - slope * tm;
    let sse: f64 = t.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let r2 = if syy == 0.0 { 1.0 } else { 1.0 - sse / syy };
    Some((slope, intercept, r2))
}

/// Fits the last `window_fraction` of the time span of `(t, e)`.
pub fn decay_fit_series(t: &[f64], e: &[f64], window_fraction: f64) -> Result<DecayFit> {
    if t.len() != e.len() {
        return Err(Error::ShapeMismatch { expected: t.len(), found: e.len() });
    }
    if !(window_fraction > 0.0 && window_fraction <= 1.0) {
        return Err(Error::InvalidParameter("window fraction must lie in (0, 1]".into()));
    }
    let (Some(&t0), Some(&t1)) = (t.first(), t.last()) else {
        return Err(Error::InvalidParameter("empty series".into()));
    };
    let start = t1 - window_fraction * (t1 - t0);
    let i0 = t.partition_point(|&s| s < start);
    let (tw, ew) = (&t[i0..], &e[i0..]);
    if ew.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
        return Err(Error::NonPositiveEnergy);
    }
    let logs: Vec<f64> = ew.iter().map(|x| x.ln()).collect();
    let insufficient = || Error::InvalidParameter("fewer than two samples in the fit window".into());
    let (slope, icpt, r2) = line_fit(tw, &logs).ok_or_else(insufficient)?;
    let raw = DecayFit { rate: -slope, amplitude: icpt.exp(), r2, method: FitMethod::Raw, points: tw.len() };
    if r2 >= ENVELOPE_THRESHOLD {
        return Ok(raw);
    }
    let peaks: Vec<usize> = (1..logs.len().saturating_sub(1))
        .filter(|&i| logs[i] >= logs[i - 1] && logs[i] > logs[i + 1])
        .collect();
    let pt: Vec<f64> = peaks.iter().map(|&i| tw[i]).collect();
    let py: Vec<f64> = peaks.iter().map(|&i| logs[i]).collect();
    match line_fit(&pt, &py) {
        Some((slope, icpt, r2)) => {
            Ok(DecayFit { rate: -slope, amplitude: icpt.exp(), r2, method: FitMethod::Envelope, points: pt.len() })
        }
        None => Ok(raw),
    }
}

/// [`decay_fit_series`] on the energy samples of `report`.
pub fn decay_fit(report: &EnergyReport, window_fraction: f64) -> Result<DecayFit> {
    decay_fit_series(&report.times(), &report.energies(), window_fraction)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    #[test]
    fn exact_exponential() {
        let t: Vec<f64> = (0..=500).map(|i| i as f64 * 0.1).collect();
        let e: Vec<f64> = t.iter().map(|s| 3.0 * (-0.7 * s).exp()).collect();
        let fit = decay_fit_series(&t, &e, 1.0).unwrap();
        assert!((fit.rate - 0.7).abs() < 1e-10);
        assert!((fit.amplitude - 3.0).abs() < 1e-9);
        assert!((fit.r2 - 1.0).abs() < 1e-10);
        assert_eq!(fit.method, FitMethod::Raw);
    }

    #[test]
    fn oscillating_uses_envelope() {
        let t: Vec<f64> = (0..=4000).map(|i| i as f64 * 0.01).collect();
        let e: Vec<f64> = t.iter().map(|s| (-0.2 * s).exp() * (1e-3 + (3.0 * s).cos().powi(2))).collect();
        let fit = decay_fit_series(&t, &e, 1.0).unwrap();
        assert_eq!(fit.method, FitMethod::Envelope);
        assert!((fit.rate - 0.2).abs() < 0.01, "{}", fit.rate);
    }

    #[test]
    fn rejects_non_positive() {
        let t = [0.0, 1.0, 2.0];
        assert_eq!(decay_fit_series(&t, &[1.0, 0.0, 1.0], 1.0), Err(Error::NonPositiveEnergy));
    }
}
