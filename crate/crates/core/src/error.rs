use alloc::string::String;
use core::fmt;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A kernel needs at least one Prony term.
    EmptyKernel,
    /// Prony term `index` has a non-positive (or non-finite) weight or rate.
    NonPositiveTerm { index: usize },
    /// The kernel mass `Σ b_j/δ_j` is not below one.
    MassNotLessThanOne { mass: f64 },
    /// Two arrays that must agree in length do not.
    ShapeMismatch { expected: usize, found: usize },
    /// The initial history cannot be handled (for example it never becomes flat).
    UnsupportedHistoryFamily(&'static str),
    /// A lookup fell outside the stored or modelled past.
    HistoryGap { t: f64 },
    /// Spectrum parameters are not admissible.
    InvalidDimension(&'static str),
    /// The observation interval is empty or leaves the domain.
    EmptyObservationSet,
    /// A parameter is out of range.
    InvalidParameter(String),
    /// A quantity that must be finite is not.
    NonFiniteValue { t: f64 },
    /// The solution left the blow-up threshold.
    BlowUp { t: f64, norm: f64 },
    /// A function that requires a non-negative argument received a negative one.
    NegativeArgument,
    /// The gain window integral is not bounded.
    UnboundedBudget,
    /// The gain growth hypothesis cannot be met.
    InfeasibleHypothesis(String),
    /// The vanishing-delay corrector iteration grew instead of shrinking.
    CorrectorDiverged { t: f64 },
    /// The Picard contraction precondition fails.
    NotAContraction { factor: f64 },
    /// An iteration did not converge.
    NoConvergence { iterations: usize },
    /// A linear mode does not decay.
    NotExponentiallyStable { mode: usize, abscissa: f64 },
    /// A decay fit needs strictly positive energies.
    NonPositiveEnergy,
    /// Configuration fields contradict each other.
    InconsistentConfig(String),
    /// No preset with that name exists.
    UnknownPreset(String),
}

/// Result alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyKernel => write!(f, "kernel has no terms"),
            Error::NonPositiveTerm { index } => {
                write!(f, "kernel term {index} has a non-positive weight or rate")
            }
            Error::MassNotLessThanOne { mass } => {
                write!(f, "kernel mass {mass} is not below 1 (hypothesis (iii))")
            }
            Error::ShapeMismatch { expected, found } => {
                write!(f, "shape mismatch: expected {expected}, found {found}")
            }
            Error::UnsupportedHistoryFamily(why) => write!(f, "unsupported history: {why}"),
            Error::HistoryGap { t } => write!(f, "no history available at t = {t}"),
            Error::InvalidDimension(why) => write!(f, "invalid dimension: {why}"),
            Error::EmptyObservationSet => write!(f, "observation interval is empty"),
            Error::InvalidParameter(why) => write!(f, "invalid parameter: {why}"),
            Error::NonFiniteValue { t } => write!(f, "non-finite value at t = {t}"),
            Error::BlowUp { t, norm } => write!(f, "blow-up at t = {t} (sup norm {norm:e})"),
            Error::NegativeArgument => write!(f, "negative argument"),
            Error::UnboundedBudget => write!(f, "gain window integral is unbounded"),
            Error::InfeasibleHypothesis(why) => write!(f, "infeasible: {why}"),
            Error::CorrectorDiverged { t } => write!(f, "delay corrector diverged at t = {t}"),
            Error::NotAContraction { factor } => {
                write!(f, "contraction factor {factor} is not below 1/4")
            }
            Error::NoConvergence { iterations } => {
                write!(f, "no convergence after {iterations} iterations")
            }
            Error::NotExponentiallyStable { mode, abscissa } => {
                write!(f, "mode {mode} has spectral abscissa {abscissa} >= 0")
            }
            Error::NonPositiveEnergy => write!(f, "energy is not strictly positive on the fit window"),
            Error::InconsistentConfig(why) => write!(f, "inconsistent configuration: {why}"),
            Error::UnknownPreset(name) => write!(f, "unknown preset '{name}'"),
        }
    }
}

impl core::error::Error for Error {}
