//! Energy functional, inequality audits, semigroup constants, the small-data
//! certificate and decay-rate fitting.

mod audit;
mod certificate;
mod energy;
mod fit;
mod semigroup;

pub use audit::{
    audit_energy_derivative, audit_gronwall, audit_lower_bound, AuditKind, AuditResult, AuditStatus, Violation,
};
pub use certificate::{
    constants_chain, decay_amplitude, decay_bound_violations, initial_data_measures, lipschitz_state, CertificateReport, InitialMeasures,
    Verdict,
};
pub use energy::{energy, EnergyComponents, EnergyReport, EnergySample};
pub(crate) use energy::energy_sample;
pub(crate) use semigroup::propagator;
pub use fit::{decay_fit, decay_fit_series, DecayFit, FitMethod};
pub use semigroup::{
    estimate_semigroup_constants, mode_abscissa, mode_block, reduced_norm_sq, reduced_weight_matrix, SemigroupConstants,
    SemigroupOptions,
};
