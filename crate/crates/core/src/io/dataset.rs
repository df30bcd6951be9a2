//! Strict TSV reader for source datasets.
//!
//! Required columns, in order: id, concept, quantity, unit, period_start,
//! period_end, source_family, status, notes. Two optional trailing columns
//! follow: `domain` and `flags` (comma-separated). Lines starting with `#`
//! and blank lines are skipped.

use std::collections::HashSet;
use std::path::Path;

use crate::error::IngestError;
use crate::evidence::EvidenceStatus;
use crate::indicator::SourceFlags;
use crate::ledger::CandidateSource;
use crate::quantity::{Period, Unit, UnitKind};

pub const REQUIRED_COLUMNS: [&str; 9] = [
    "id",
    "concept",
    "quantity",
    "unit",
    "period_start",
    "period_end",
    "source_family",
    "status",
    "notes",
];
pub const OPTIONAL_COLUMNS: [&str; 2] = ["domain", "flags"];

/// Domains the vetting step treats as relevant.
pub const RELEVANT_DOMAINS: [&str; 4] = ["ai", "robotics", "compute_energy", "labour"];

pub fn parse_dataset(path: &Path) -> Result<Vec<CandidateSource>, IngestError> {
    let label = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| IngestError::Io {
        path: label.clone(),
        message: e.to_string(),
    })?;
    parse_dataset_str(&text, &label)
}

pub fn parse_dataset_str(text: &str, path: &str) -> Result<Vec<CandidateSource>, IngestError> {
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

    let Some((header_line, header)) = lines.next() else {
        return Ok(Vec::new());
    };
    let columns: Vec<&str> = header.split('\t').map(str::trim).collect();
    for (i, want) in REQUIRED_COLUMNS.iter().enumerate() {
        match columns.get(i) {
            Some(got) if got == want => {}
            Some(got) => {
                return Err(err(header_line, i + 1, format!("expected column `{want}`, found `{got}`")))
            }
            None => return Err(err(header_line, i + 1, format!("missing column `{want}`"))),
        }
    }
    let extra = &columns[REQUIRED_COLUMNS.len()..];
    if extra.len() > OPTIONAL_COLUMNS.len() || extra.iter().zip(OPTIONAL_COLUMNS).any(|(a, b)| *a != b) {
        return Err(err(
            header_line,
            REQUIRED_COLUMNS.len() + 1,
            format!("optional columns must be {:?}, in order", OPTIONAL_COLUMNS),
        ));
    }
    let width = columns.len();

    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (line, row) in lines {
        let cells: Vec<&str> = row.split('\t').collect();
        if cells.len() != width {
            return Err(err(
                line,
                cells.len().min(width) + 1,
                format!("expected {width} fields, found {}", cells.len()),
            ));
        }
        let cell = |i: usize| cells[i].trim();

        let id = cell(0);
        if id.is_empty() {
            return Err(err(line, 1, "empty id".into()));
        }
        if !seen.insert(id.to_string()) {
            return Err(IngestError::DuplicateId {
                path: path.to_string(),
                line,
                id: id.to_string(),
            });
        }
        if cell(1).is_empty() {
            return Err(err(line, 2, "empty concept".into()));
        }
        let quantity = match cell(2) {
            "" => None,
            raw => {
                let v: f64 = raw
                    .parse()
                    .map_err(|_| err(line, 3, format!("`{raw}` is not a number")))?;
                if !v.is_finite() {
                    return Err(err(line, 3, format!("`{raw}` is not finite")));
                }
                Some(v)
            }
        };
        let unit: UnitKind = cell(3).parse().map_err(|m| err(line, 4, m))?;
        let year = |i: usize| -> Result<i32, IngestError> {
            cell(i)
                .parse()
                .map_err(|_| err(line, i + 1, format!("`{}` is not a year", cell(i))))
        };
        let period = Period::new(year(4)?, year(5)?).map_err(|e| err(line, 5, e.to_string()))?;
        let status: EvidenceStatus = cell(7).parse().map_err(|m| err(line, 8, m))?;
        if !status.is_ingestible() {
            return Err(err(
                line,
                8,
                format!("status `{status}` cannot be assigned to an input value"),
            ));
        }
        let domain = cells
            .get(9)
            .map(|d| d.trim())
            .filter(|d| !d.is_empty())
            .map(str::to_string);
        let mut flags = SourceFlags::default();
        let mut unsupported = false;
        if let Some(raw) = cells.get(10) {
            for flag in raw.split(',').map(str::trim).filter(|f| !f.is_empty()) {
                match flag {
                    "over100" => flags.over100 = true,
                    "residual" => flags.residual = true,
                    "unsupported_assumption" => unsupported = true,
                    other => return Err(err(line, 11, format!("unknown flag `{other}`"))),
                }
            }
        }
        out.push(CandidateSource {
            id: id.to_string(),
            concept: cell(1).to_string(),
            quantity,
            unit: Unit::from(unit),
            period,
            source_family: cell(6).to_string(),
            evidence_status: status,
            notes: cell(8).to_string(),
            domain_relevant: domain
                .as_deref()
                .is_none_or(|d| RELEVANT_DOMAINS.contains(&d)),
            domain,
            flags,
            has_numeric_value: quantity.is_some(),
            requires_unsupported_assumption: unsupported,
            line,
        });
    }
    Ok(out)
}
