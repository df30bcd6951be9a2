//! Source vetting: which candidate values are admitted as primary inputs.

use serde::{Deserialize, Serialize};

use crate::evidence::EvidenceStatus;
use crate::indicator::{SourceFlags, SourceValue};
use crate::quantity::{Period, Unit};

/// A dataset row before vetting. Flags are fixed at ingestion.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSource {
    pub id: String,
    pub concept: String,
    /// `None` when the source gives no explicit number.
    pub quantity: Option<f64>,
    pub unit: Unit,
    pub period: Period,
    pub source_family: String,
    pub evidence_status: EvidenceStatus,
    pub notes: String,
    pub domain: Option<String>,
    pub flags: SourceFlags,
    pub has_numeric_value: bool,
    pub requires_unsupported_assumption: bool,
    pub domain_relevant: bool,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rejection {
    pub id: String,
    /// Vetting step that failed: 1 numeric + relevant, 3 assumptions, 4 record completeness.
    pub step: u8,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum VetOutcome {
    Accepted(SourceValue),
    Rejected(Rejection),
}

impl VetOutcome {
    pub fn is_accepted(&self) -> bool {
        matches!(self, VetOutcome::Accepted(_))
    }
}

pub fn vet_source(c: &CandidateSource) -> VetOutcome {
    let reject = |step: u8, reason: &str| {
        VetOutcome::Rejected(Rejection {
            id: c.id.clone(),
            step,
            reason: reason.to_string(),
        })
    };
    let quantity = match c.quantity {
        Some(q) if c.has_numeric_value => q,
        _ => return reject(1, "no explicit numeric value"),
    };
    if !c.domain_relevant {
        return reject(1, "not relevant to AI, robotics, compute-energy or labour");
    }
    if c.requires_unsupported_assumption {
        return reject(
            3,
            "requires an unsupported assumption or undocumented conversion",
        );
    }
    let value = SourceValue {
        id: c.id.clone(),
        concept: c.concept.clone(),
        quantity,
        unit: c.unit.clone(),
        period: c.period,
        source_family: c.source_family.clone(),
        evidence_status: c.evidence_status,
        notes: c.notes.clone(),
        domain: c.domain.clone(),
        flags: c.flags,
    };
    if c.source_family.trim().is_empty() {
        return reject(4, "missing source family");
    }
    match value.validate() {
        Ok(()) => VetOutcome::Accepted(value),
        Err(e) => reject(4, &e.to_string()),
    }
}
