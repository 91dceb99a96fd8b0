use alloc::string::String;
use alloc::vec::Vec;
#[allow(unused_imports)] // unused when std is in the dependency graph
use num_traits::Float;

use super::EnergyReport;

/// Which inequality an audit checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum AuditKind {
    /// `E(t) ≤ exp(3b²∫₀^t|k|)·𝓔(0)`.
    Gronwall,
    /// `E(t) > ¼(‖v‖² + (1−β̃)‖A^{1/2}u‖² + window + memory)`.
    LowerBound,
    /// `dE/dt ≤ (3/2)|k(t)| max_{[t−τ̄,t]}‖B*v‖² + slack`.
    EnergyDerivative,
}

impl AuditKind {
    pub fn name(self) -> &'static str {
        match self {
            AuditKind::Gronwall => "gronwall",
            AuditKind::LowerBound => "lower-bound",
            AuditKind::EnergyDerivative => "energy-derivative",
        }
    }
}

/// A single sample where an audited inequality failed.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Violation {
    pub t: f64,
    /// The quantity that should be small.
    pub lhs: f64,
    /// Its allowed bound (slack included).
    pub rhs: f64,
}

/// Outcome of an audit.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "status", rename_all = "kebab-case"))]
pub enum AuditStatus {
    Passed,
    Violated,
    Skipped { reason: String },
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AuditResult {
    pub kind: AuditKind,
    pub status: AuditStatus,
    pub checked: usize,
    pub violations: Vec<Violation>,
}

impl AuditResult {
    fn from_violations(kind: AuditKind, checked: usize, violations: Vec<Violation>) -> Self {
        let status = if violations.is_empty() { AuditStatus::Passed } else { AuditStatus::Violated };
        AuditResult { kind, status, checked, violations }
    }

    fn skipped(kind: AuditKind, reason: &str) -> Self {
        AuditResult { kind, status: AuditStatus::Skipped { reason: reason.into() }, checked: 0, violations: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.status == AuditStatus::Passed
    }

    pub fn is_skipped(&self) -> bool {
        matches!(self.status, AuditStatus::Skipped { .. })
    }
}

/// Gronwall bound with relative tolerance `tol` (the default audits use 1e-6).
/// Skipped when some sample has `E < ¼‖v‖²`, the bound's hypothesis.
pub fn audit_gronwall(report: &EnergyReport, tol: f64) -> AuditResult {
    let kind = AuditKind::Gronwall;
    if report.samples.iter().any(|s| s.energy < 0.25 * s.velocity_sq) {
        return AuditResult::skipped(kind, "hypothesis-not-met");
    }
    let b2 = report.b * report.b;
    let e0 = report.initial_running_max;
    let violations = report
        .samples
        .iter()
        .filter_map(|s| {
            let bound = (3.0 * b2 * s.gain_integral).exp() * e0 * (1.0 + tol);
            (s.energy > bound).then_some(Violation { t: s.t, lhs: s.energy, rhs: bound })
        })
        .collect();
    AuditResult::from_violations(kind, report.samples.len(), violations)
}

/// Strict lower bound `E − Q > −slack` with
/// `Q = ¼(‖v‖² + (1−β̃)‖A^{1/2}u‖² + window + memory)`.
///
/// `hypothesis_met` carries the smallness condition the bound needs; when it
/// is false, or the solution is identically zero, the audit is skipped.
pub fn audit_lower_bound(report: &EnergyReport, hypothesis_met: bool, slack: f64) -> AuditResult {
    let kind = AuditKind::LowerBound;
    if !hypothesis_met {
        return AuditResult::skipped(kind, "hypothesis-not-met");
    }
    let zero = report.samples.iter().all(|s| s.energy == 0.0 && s.velocity_sq == 0.0 && s.elastic_sq == 0.0);
    if zero {
        return AuditResult::skipped(kind, "zero-solution");
    }
    let violations = report
        .samples
        .iter()
        .filter_map(|s| {
            let c = &s.components;
            let q = 0.5 * (c.kinetic + c.elastic + c.gain_window + c.memory);
            let gap = s.energy - q;
            (gap < -slack).then_some(Violation { t: s.t, lhs: q, rhs: s.energy })
        })
        .collect();
    AuditResult::from_violations(kind, report.samples.len(), violations)
}

/// Central-difference `dE/dt` against `(3/2)|k(t)|·max‖B*v‖²` plus
/// `slack_rel · max(1, E(0))`.
pub fn audit_energy_derivative(report: &EnergyReport, slack_rel: f64) -> AuditResult {
    let kind = AuditKind::EnergyDerivative;
    let s = &report.samples;
    if s.len() < 3 {
        return AuditResult::skipped(kind, "too-few-samples");
    }
    let slack = slack_rel * s[0].energy.abs().max(1.0);
    let violations = (1..s.len() - 1)
        .filter_map(|i| {
            let d = (s[i + 1].energy - s[i - 1].energy) / (s[i + 1].t - s[i - 1].t);
            let bound = 1.5 * s[i].abs_gain * s[i].observed_window_max + slack;
            (d > bound).then_some(Violation { t: s[i].t, lhs: d, rhs: bound })
        })
        .collect();
    AuditResult::from_violations(kind, s.len() - 2, violations)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::EnergySample;

    fn report(energies: &[f64]) -> EnergyReport {
        let mut r = EnergyReport { b: 1.0, ..Default::default() };
        for (i, &e) in energies.iter().enumerate() {
            r.push(EnergySample { t: i as f64 * 0.1, energy: e, velocity_sq: 0.0, ..Default::default() });
        }
        r
    }

    #[test]
    fn gronwall_flags_growth_without_gain() {
        assert!(audit_gronwall(&report(&[1.0, 0.9, 0.8]), 1e-6).passed());
        let bad = audit_gronwall(&report(&[1.0, 0.9, 1.5]), 1e-6);
        assert_eq!(bad.violations.len(), 1);
    }

    #[test]
    fn derivative_audit_needs_three_samples() {
        assert!(audit_energy_derivative(&report(&[1.0, 0.5]), 1e-4).is_skipped());
        let r = audit_energy_derivative(&report(&[1.0, 0.5, 2.0, 2.5]), 1e-4);
        assert_eq!(r.violations.len(), 2);
    }
}
