//! Friction-index configuration (TOML) and sector-series TSV.
//!
//! Series columns: `sector period LAT DISP ERR PROT AUDGAP ENB OVR [outcome]`.
//! Rows of one sector must appear in strictly increasing period order.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::cfindex::{
    CfWeights, ComponentKind, FrictionComponent, Normalization, Observation, SectorSeries,
    WeightScheme,
};
use crate::error::IngestError;
use crate::evidence::EvidenceStatus;
use crate::quantity::{Period, Unit, UnitKind};

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    series: PathBuf,
    provenance: String,
    status: EvidenceStatus,
    #[serde(default = "default_normalization")]
    normalization: String,
    #[serde(default = "default_scheme")]
    scheme: WeightScheme,
    #[serde(default)]
    weights: BTreeMap<String, f64>,
}

fn default_normalization() -> String {
    "minmax".into()
}

fn default_scheme() -> WeightScheme {
    WeightScheme::Equal
}

#[derive(Debug, Clone, PartialEq)]
pub struct CfConfig {
    /// Resolved against the config file's directory.
    pub series: PathBuf,
    pub provenance: String,
    pub status: EvidenceStatus,
    pub normalization: Normalization,
    pub weights: CfWeights,
}

/// Parses the config. `base` resolves a relative series path.
pub fn parse_cf_config_str(text: &str, path: &str, base: &Path) -> Result<CfConfig, IngestError> {
    let bad = |message: String| IngestError::Malformed {
        path: path.to_string(),
        line: 0,
        column: 0,
        message,
    };
    let raw: RawConfig = toml::from_str(text).map_err(|e| bad(e.to_string()))?;
    if !raw.status.is_ingestible() {
        return Err(bad(format!("status `{}` cannot label input data", raw.status)));
    }
    if raw.provenance.trim().is_empty() {
        return Err(bad("provenance label is required".into()));
    }
    let normalization: Normalization = raw.normalization.parse().map_err(bad)?;
    let weights = match raw.scheme {
        WeightScheme::Equal if raw.weights.is_empty() => CfWeights::equal(),
        WeightScheme::Equal => return Err(bad("equal weighting takes no explicit weights".into())),
        scheme => {
            let mut w = BTreeMap::new();
            for (k, v) in &raw.weights {
                w.insert(k.parse::<ComponentKind>().map_err(bad)?, *v);
            }
            CfWeights::new(scheme, w).map_err(|e| bad(e.to_string()))?
        }
    };
    Ok(CfConfig {
        series: base.join(raw.series),
        provenance: raw.provenance,
        status: raw.status,
        normalization,
        weights,
    })
}

pub fn parse_cf_config(path: &Path) -> Result<CfConfig, IngestError> {
    let label = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| IngestError::Io {
        path: label.clone(),
        message: e.to_string(),
    })?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_cf_config_str(&text, &label, base)
}

/// Sector series in sector-name order.
pub fn parse_sector_series_str(text: &str, path: &str) -> Result<Vec<SectorSeries>, IngestError> {
    let err = |line: usize, column: usize, message: String| IngestError::Malformed {
        path: path.to_string(),
        line,
        column,
        message,
    };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.strip_suffix('\r').unwrap_or(l)))
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'));
    let Some((hline, header)) = lines.next() else {
        return Ok(Vec::new());
    };
    let cols: Vec<&str> = header.split('\t').map(str::trim).collect();
    let mut expected = vec!["sector", "period"];
    expected.extend(ComponentKind::ALL.iter().map(|k| k.token()));
    for (i, want) in expected.iter().enumerate() {
        if cols.get(i) != Some(want) {
            return Err(err(hline, i + 1, format!("expected column `{want}`")));
        }
    }
    let has_outcome = match &cols[expected.len()..] {
        [] => false,
        ["outcome"] => true,
        _ => return Err(err(hline, expected.len() + 1, "only `outcome` may follow the components".into())),
    };

    struct Acc {
        observations: Vec<Observation>,
        outcomes: Vec<(Period, Option<f64>)>,
        last_line: usize,
    }
    let mut sectors: BTreeMap<String, Acc> = BTreeMap::new();
    for (line, row) in lines {
        let cells: Vec<&str> = row.split('\t').map(str::trim).collect();
        if cells.len() != cols.len() {
            return Err(err(line, cells.len().min(cols.len()) + 1, format!("expected {} fields, found {}", cols.len(), cells.len())));
        }
        let sector = cells[0];
        if sector.is_empty() {
            return Err(err(line, 1, "empty sector".into()));
        }
        let year: i32 = cells[1]
            .parse()
            .map_err(|_| err(line, 2, format!("`{}` is not a year", cells[1])))?;
        let period = Period::year(year);
        let mut components = BTreeMap::new();
        for (i, kind) in ComponentKind::ALL.into_iter().enumerate() {
            let raw = cells[i + 2];
            let v: f64 = raw
                .parse()
                .map_err(|_| err(line, i + 3, format!("`{raw}` is not a number")))?;
            if !v.is_finite() || v < 0.0 {
                return Err(err(line, i + 3, format!("{kind} must be a nonnegative number")));
            }
            components.insert(
                kind,
                FrictionComponent {
                    kind,
                    raw_value: v,
                    unit: Unit::from(UnitKind::Dimensionless),
                    period,
                },
            );
        }
        let outcome = if has_outcome && !cells[9].is_empty() {
            Some(
                cells[9]
                    .parse::<f64>()
                    .map_err(|_| err(line, 10, format!("`{}` is not a number", cells[9])))?,
            )
        } else {
            None
        };
        let acc = sectors.entry(sector.to_string()).or_insert(Acc {
            observations: Vec::new(),
            outcomes: Vec::new(),
            last_line: line,
        });
        if acc.observations.last().is_some_and(|o| o.period >= period) {
            return Err(err(line, 2, format!("{sector}: period {period} is not after the previous row")));
        }
        acc.observations.push(Observation { period, components });
        acc.outcomes.push((period, outcome));
        acc.last_line = line;
    }

    sectors
        .into_iter()
        .map(|(sector, acc)| {
            let present = acc.outcomes.iter().filter(|(_, o)| o.is_some()).count();
            let outcomes = if present == 0 {
                None
            } else if present == acc.outcomes.len() {
                Some(acc.outcomes.into_iter().map(|(p, o)| (p, o.unwrap_or_default())).collect())
            } else {
                return Err(err(acc.last_line, 10, format!("{sector}: outcome given for some periods only")));
            };
            Ok(SectorSeries {
                sector,
                observations: acc.observations,
                outcomes,
            })
        })
        .collect()
}

pub fn parse_sector_series(path: &Path) -> Result<Vec<SectorSeries>, IngestError> {
    let label = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| IngestError::Io {
        path: label.clone(),
        message: e.to_string(),
    })?;
    parse_sector_series_str(&text, &label)
}
