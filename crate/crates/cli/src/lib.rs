//! Sweep driver behind the `aia` binary: config parsing, row computation,
//! CSV output and power-law fits of the resulting tables.

pub mod config;
pub mod fit;
pub mod output;
pub mod sweep;

pub use config::{ConfigError, Model, ScenarioSel, SweepConfig};
pub use sweep::{run_dtau_scan, run_sweep, with_threads, SweepOutput, SweepRow};

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const CONFIG: i32 = 1;
    pub const NUMERICAL: i32 = 2;
}
