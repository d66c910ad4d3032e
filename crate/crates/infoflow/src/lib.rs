//! Std companion to `infoflow-core`: price-file ingestion, universe
//! configuration, rayon-parallel drivers, the full per-firm pipeline and
//! report emission. The `infoflow` binary exposes all of it on the command
//! line.

pub mod config;
pub mod error;
pub mod format;
pub mod ingest;
pub mod parallel;
pub mod pipeline;
pub mod report;
pub mod synth;

pub use config::{FirmEntry, UniverseConfig};
pub use error::{Error, Result};
pub use ingest::{load_prices, load_prices_as, write_prices};
pub use parallel::{rolling_te_par, shuffle_test_par, te_both_par, with_threads};
pub use pipeline::{run_pipeline, run_pipeline_with, PipelineOptions, ReportBundle};
pub use report::{read_report, write_report};
