//! Bundled fixture inputs, embedded at compile time.

use std::path::{Path, PathBuf};

use crate::io::{parse_cf_config_str, CfConfig};
use crate::pipeline::{PipelineInputs, Precision};

pub const DATASET: &str = include_str!("../fixtures/reference/dataset.tsv");
pub const DEFS: &str = include_str!("../fixtures/reference/defs.txt");
pub const RULES: &str = include_str!("../fixtures/reference/rules.toml");
pub const HYPOTHESES: &str = include_str!("../fixtures/reference/hypotheses.toml");
pub const CFINDEX_CONFIG: &str = include_str!("../fixtures/reference/cfindex.toml");
pub const SECTOR_SERIES: &str = include_str!("../fixtures/reference/sector_series.tsv");

/// Source directory of the fixture files, for tools that want paths.
pub fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join("reference")
}

pub fn cfindex_config() -> CfConfig {
    parse_cf_config_str(CFINDEX_CONFIG, "cfindex.toml", Path::new(""))
        .expect("bundled friction-index config is valid")
}

/// The bundled inputs, with or without the synthetic friction-index series.
pub fn inputs(with_cfindex: bool) -> PipelineInputs {
    PipelineInputs {
        dataset: DATASET.to_string(),
        defs: DEFS.to_string(),
        rules: RULES.to_string(),
        hypotheses: HYPOTHESES.to_string(),
        cfindex: with_cfindex.then(|| (cfindex_config(), SECTOR_SERIES.to_string())),
        precision: Precision::default(),
    }
}
