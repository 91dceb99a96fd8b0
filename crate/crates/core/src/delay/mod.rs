//! Time-varying delays, feedback gains, initial histories and the dense-output
//! buffer that serves delayed lookups.

mod buffer;
mod gain;
mod history;
mod profile;

pub use buffer::{delayed_velocity, DelayedVelocity, HistoryBuffer, Timeline};
pub use gain::{fit_gain_growth, gain_budget, GainGrowth, GainSpec};
pub use history::{InitialHistory, PositionProfile, VelocityProfile};
pub use profile::{DelayFamily, DelaySpec};
