//! File formats: dataset TSV, definition grammar, friction-index inputs and
//! report output.

pub mod dataset;
pub mod defs;
pub mod report;
pub mod series;

pub use dataset::{parse_dataset, parse_dataset_str};
pub use defs::{parse_indicator_defs, parse_indicator_defs_str};
pub use report::{emit_reports, explain, present};
pub use series::{parse_cf_config, parse_cf_config_str, parse_sector_series, parse_sector_series_str, CfConfig};
