//! Scenario files, the outage-to-ruin assessment pipeline, parameter sweeps
//! and reproducible run manifests on top of `hwnrisk-core`.

pub mod assess;
pub mod config;
pub mod error;
pub mod figures;
pub mod output;
pub mod run;
pub mod sweep;

pub use assess::{assess, AssessOptions, AssessmentReport};
pub use config::ScenarioConfig;
pub use error::{HarnessError, Result};
pub use run::{execute, produce, verify, Job, Manifest};
pub use sweep::{sweep, Axis, SweepRow};
