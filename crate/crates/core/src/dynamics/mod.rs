//! Time integration of the modal system `(u, v, z)` and an independent
//! Duhamel/Picard oracle.

mod integrator;
mod model;
mod picard;
mod simulate;

pub use integrator::{Integrator, IntegratorConfig, StepStats};
pub use model::{rhs, Model, SimState, Workspace};
pub use picard::{picard_oracle, PicardOptions, PicardResult};
pub use simulate::{simulate, AuditToggles, SimulationOptions, SimulationOutput, Termination, Trajectory};
