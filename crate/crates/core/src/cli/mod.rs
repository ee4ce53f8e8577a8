//! Metric files, the built-in catalog, analysis reports and the command line.

pub mod catalog;
pub mod command;
pub mod config;
pub mod metric_file;
pub mod report;

pub use command::{run, Cli};
pub use config::AnalysisConfig;
pub use metric_file::{load_metric, parse_metric_file, parse_point, LoadedMetric};
pub use report::{analyze, compare, resolve_point, Comparison, Report, COMPARISON_SCHEMA, REPORT_SCHEMA, SCHEMA_VERSION};
