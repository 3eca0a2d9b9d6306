//! Study driver for the viscoelastic DG solver: configuration parsing,
//! convergence, penalty and stability studies, CSV output and rate tables.

pub mod config;
pub mod study;

pub use config::{parse_config, ConfigError, DataKind, SchemeChoice, StepSize, StudyConfig, StudyKind};
pub use study::{rate_table, run_study, to_csv, ErrorRow, StabilityRow, StudyError, StudyOutput};
