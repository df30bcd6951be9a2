//! Append-only audit trail.
//!
//! Each derived value gets one record holding a snapshot of its inputs, the
//! formula, the parameters and the value obtained by re-evaluating the
//! formula over that snapshot. Verification is recomputation; there is no
//! hash chain. The on-disk form is one JSON object per line with a fixed
//! field order so that runs diff cleanly.

use std::collections::{BTreeMap, HashSet};
use std::fs::{File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::LedgerError;
use crate::evidence::{EvidenceStatus, InterpretationBoundary};
use crate::formula::{self, EvalInput, FormulaId, FormulaParams};
use crate::indicator::{within, Declared, DerivedIndicator, SourceRegistry, AUTHOR_CALCULATED};
use crate::quantity::{Period, Quantity, UnitKind};

pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditInput {
    pub id: String,
    pub value: f64,
    pub unit: UnitKind,
    pub period: Period,
    pub status: EvidenceStatus,
    pub source: String,
}

impl AuditInput {
    fn eval_input(&self) -> Result<EvalInput, LedgerError> {
        Ok(EvalInput {
            id: self.id.clone(),
            quantity: Quantity::new(self.value, self.unit)?,
            status: self.status,
            period: self.period,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditRecord {
    pub result_id: String,
    pub formula_id: FormulaId,
    pub label: String,
    pub params: FormulaParams,
    pub inputs: Vec<AuditInput>,
    pub recomputed: f64,
    pub declared: f64,
    pub declared_text: Option<String>,
    pub tolerance: f64,
    #[serde(rename = "match")]
    pub matched: bool,
    pub boundary: InterpretationBoundary,
    pub supersedes: Option<String>,
    pub engine_version: String,
}

/// Looks up the snapshot of an input id.
pub trait ResolveInput {
    fn resolve(&self, id: &str) -> Option<AuditInput>;
}

impl ResolveInput for SourceRegistry {
    fn resolve(&self, id: &str) -> Option<AuditInput> {
        self.get(id).map(|v| AuditInput {
            id: v.id.clone(),
            value: v.quantity,
            unit: v.unit.kind,
            period: v.period,
            status: v.evidence_status,
            source: v.source_family.clone(),
        })
    }
}

fn recompute(
    formula: FormulaId,
    inputs: &[AuditInput],
    params: &FormulaParams,
) -> Result<f64, LedgerError> {
    let eval: Vec<EvalInput> = inputs
        .iter()
        .map(AuditInput::eval_input)
        .collect::<Result<_, _>>()?;
    Ok(formula::evaluate(formula, &eval, params)?.value)
}

/// Builds the audit record for `d`, re-evaluating its formula from the
/// resolved inputs.
pub fn record_audit(
    d: &DerivedIndicator,
    resolver: &impl ResolveInput,
) -> Result<AuditRecord, LedgerError> {
    let inputs: Vec<AuditInput> = d
        .inputs
        .iter()
        .map(|id| {
            resolver.resolve(id).ok_or_else(|| LedgerError::Lineage {
                indicator: d.id.clone(),
                input: id.clone(),
            })
        })
        .collect::<Result<_, _>>()?;
    let recomputed = recompute(d.formula, &inputs, &d.params)?;
    let (declared, declared_text, tolerance) = match &d.declared {
        Some(p) => (p.value, Some(p.text.clone()), p.tolerance),
        None => (d.quantity, None, 0.0),
    };
    let matched =
        recomputed.to_bits() == d.quantity.to_bits() && within(recomputed, declared, tolerance);
    Ok(AuditRecord {
        result_id: d.id.clone(),
        formula_id: d.formula,
        label: AUTHOR_CALCULATED.to_string(),
        params: d.params.clone(),
        inputs,
        recomputed,
        declared,
        declared_text,
        tolerance,
        matched,
        boundary: d.boundary,
        supersedes: None,
        engine_version: ENGINE_VERSION.to_string(),
    })
}

/// In-memory audit log. Records are only ever appended.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AuditLog {
    records: Vec<AuditRecord>,
}

impl AuditLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn append(&mut self, record: AuditRecord) -> Result<(), LedgerError> {
        let exists = self.records.iter().any(|r| r.result_id == record.result_id);
        match (&record.supersedes, exists) {
            (None, true) => return Err(LedgerError::DuplicateRecord(record.result_id)),
            (Some(orig), _) if !self.records.iter().any(|r| &r.result_id == orig) => {
                return Err(LedgerError::UnknownSuperseded(orig.clone()))
            }
            _ => {}
        }
        self.records.push(record);
        Ok(())
    }

    /// Appends a correction for `original_id`; the original stays in the log.
    pub fn supersede(
        &mut self,
        original_id: &str,
        mut correction: AuditRecord,
    ) -> Result<(), LedgerError> {
        correction.supersedes = Some(original_id.to_string());
        self.append(correction)
    }

    pub fn records(&self) -> &[AuditRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// The latest record for `result_id`.
    pub fn get(&self, result_id: &str) -> Option<&AuditRecord> {
        self.records.iter().rev().find(|r| r.result_id == result_id)
    }

    /// Latest record per result id, in id order.
    pub fn current(&self) -> BTreeMap<&str, &AuditRecord> {
        self.records
            .iter()
            .map(|r| (r.result_id.as_str(), r))
            .collect()
    }

    pub fn to_jsonl(&self) -> Result<String, LedgerError> {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r)?);
            out.push('\n');
        }
        Ok(out)
    }

    pub fn parse_jsonl(text: &str) -> Result<Self, LedgerError> {
        let mut log = AuditLog::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let record: AuditRecord =
                serde_json::from_str(line).map_err(|e| LedgerError::Parse {
                    line: i + 1,
                    message: e.to_string(),
                })?;
            log.append(record).map_err(|e| LedgerError::Parse {
                line: i + 1,
                message: e.to_string(),
            })?;
        }
        Ok(log)
    }

    pub fn load(path: &Path) -> Result<Self, LedgerError> {
        Self::parse_jsonl(&std::fs::read_to_string(path)?)
    }

    /// Writes the whole log, replacing any existing file.
    pub fn write_to(&self, path: &Path) -> Result<(), LedgerError> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(self.to_jsonl()?.as_bytes())?;
        w.flush()?;
        Ok(())
    }

    /// Appends one record to an on-disk log.
    pub fn append_to_file(path: &Path, record: &AuditRecord) -> Result<(), LedgerError> {
        let mut f = OpenOptions::new().create(true).append(true).open(path)?;
        writeln!(f, "{}", serde_json::to_string(record)?)?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditFailure {
    pub result_id: String,
    /// 1-based position in the log.
    pub position: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub total: usize,
    pub passed: usize,
    pub superseded: usize,
    pub failed: Vec<AuditFailure>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.failed.is_empty()
    }

    pub fn failed_ids(&self) -> Vec<&str> {
        self.failed.iter().map(|f| f.result_id.as_str()).collect()
    }
}

fn check_record(r: &AuditRecord) -> Result<(), String> {
    if r.label != AUTHOR_CALCULATED {
        return Err(format!("label is `{}`", r.label));
    }
    let fresh = recompute(r.formula_id, &r.inputs, &r.params)
        .map_err(|e| format!("recomputation failed: {e}"))?;
    if fresh.to_bits() != r.recomputed.to_bits() {
        return Err(format!(
            "stored value {} but inputs give {fresh}",
            r.recomputed
        ));
    }
    let tolerance = match &r.declared_text {
        Some(text) => {
            let published =
                Declared::parse(text).map_err(|e| format!("declared text unreadable: {e}"))?;
            if published.value.to_bits() != r.declared.to_bits() {
                return Err(format!(
                    "declared value {} disagrees with declared text `{text}`",
                    r.declared
                ));
            }
            published.tolerance
        }
        None => 0.0,
    };
    if tolerance.to_bits() != r.tolerance.to_bits() {
        return Err(format!("tolerance {} is not {tolerance}", r.tolerance));
    }
    let matched = within(fresh, r.declared, tolerance);
    if matched != r.matched {
        return Err(format!("stored match flag {} is wrong", r.matched));
    }
    if !matched {
        return Err(format!(
            "recomputed {fresh} differs from declared {} (tolerance {tolerance})",
            r.declared
        ));
    }
    let projected = r.inputs.iter().any(|i| i.status == EvidenceStatus::Projection);
    if projected && r.boundary != InterpretationBoundary::ProjectionBased {
        return Err(format!(
            "projection input but boundary is {}",
            r.boundary
        ));
    }
    Ok(())
}

/// Recomputes every record. Deterministic; failures are listed in log order.
pub fn verify_audit_log(log: &AuditLog) -> VerifyReport {
    let superseded: HashSet<usize> = log
        .records
        .iter()
        .enumerate()
        .filter(|(i, r)| {
            log.records[i + 1..]
                .iter()
                .any(|later| later.supersedes.as_deref() == Some(r.result_id.as_str()))
        })
        .map(|(i, _)| i)
        .collect();

    let mut report = VerifyReport {
        total: log.records.len(),
        passed: 0,
        superseded: superseded.len(),
        failed: Vec::new(),
    };
    for (i, r) in log.records.iter().enumerate() {
        if superseded.contains(&i) {
            continue;
        }
        match check_record(r) {
            Ok(()) => report.passed += 1,
            Err(reason) => report.failed.push(AuditFailure {
                result_id: r.result_id.clone(),
                position: i + 1,
                reason,
            }),
        }
    }
    report
}
