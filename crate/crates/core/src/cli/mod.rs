//! Scenario files, output writers and the runs behind the `kleinflow`
//! binary.

pub mod commands;
pub mod config;
pub mod output;

pub use commands::{cmd_identities, cmd_packet, cmd_plane, exit_code, RunContext};
pub use config::{Mode, ScenarioConfig, Window};
