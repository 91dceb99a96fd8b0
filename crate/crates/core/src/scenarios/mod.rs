//! Scenario configuration, hypothesis validation and built-in presets.

mod config;
mod presets;
mod validate;

pub use config::{
    HistoryConfig, KernelConfig, ObservationConfig, PositionHistoryConfig, ScenarioConfig, Shape, SpectrumConfig,
    VelocityHistoryConfig,
};
pub use presets::{preset, preset_template, PRESET_NAMES, SMALL_FRACTION};
pub use validate::{validate, CheckStatus, HypothesisCheck, HypothesisReport};
