//! Scenario files, batch protocols and their CSV/report outputs.

pub mod config;
pub mod output;
pub mod pchip;
pub mod protocols;
pub mod scenario;

pub use config::{parse_config, parse_config_with, serialize_config, ScenarioConfig};
pub use protocols::{continuation_study, convergence_study, preservation_test, run_scenario, RunReport};
pub use scenario::Scenario;
