//! Evidence-status classes and interpretation boundaries.
//!
//! Every value belongs to exactly one class. Ingestion may only produce
//! `Reported` or `Projection`; `Calculated` comes from the engine and
//! `Interpretation` is reserved for narrative artifacts (mapping entries and
//! verdicts), never for numbers.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::LedgerError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvidenceStatus {
    Reported,
    Projection,
    Calculated,
    Interpretation,
}

impl EvidenceStatus {
    pub fn token(self) -> &'static str {
        match self {
            EvidenceStatus::Reported => "reported",
            EvidenceStatus::Projection => "projection",
            EvidenceStatus::Calculated => "calculated",
            EvidenceStatus::Interpretation => "interpretation",
        }
    }

    /// Whether ingestion is allowed to assign this class.
    pub fn is_ingestible(self) -> bool {
        matches!(self, EvidenceStatus::Reported | EvidenceStatus::Projection)
    }
}

impl fmt::Display for EvidenceStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for EvidenceStatus {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "reported" => Ok(EvidenceStatus::Reported),
            "projection" => Ok(EvidenceStatus::Projection),
            "calculated" => Ok(EvidenceStatus::Calculated),
            "interpretation" => Ok(EvidenceStatus::Interpretation),
            other => Err(format!("unknown evidence status `{other}`")),
        }
    }
}

/// Qualifier attached to every derived result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InterpretationBoundary {
    ObservedFact,
    ProjectionBased,
    ScaleComparison,
}

impl InterpretationBoundary {
    pub fn token(self) -> &'static str {
        match self {
            InterpretationBoundary::ObservedFact => "observed_fact",
            InterpretationBoundary::ProjectionBased => "projection_based",
            InterpretationBoundary::ScaleComparison => "scale_comparison",
        }
    }

    /// Boundary of a raw source value.
    pub fn of_status(status: EvidenceStatus) -> Self {
        match status {
            EvidenceStatus::Projection => InterpretationBoundary::ProjectionBased,
            _ => InterpretationBoundary::ObservedFact,
        }
    }
}

impl fmt::Display for InterpretationBoundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for InterpretationBoundary {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "observed_fact" | "observedfact" => Ok(InterpretationBoundary::ObservedFact),
            "projection_based" | "projectionbased" => Ok(InterpretationBoundary::ProjectionBased),
            "scale_comparison" | "scalecomparison" => Ok(InterpretationBoundary::ScaleComparison),
            other => Err(format!("unknown interpretation boundary `{other}`")),
        }
    }
}

/// Whether a value describes something that already happened.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Temporality {
    Realized,
    Scenario,
    Unknown,
}

/// What the classifier is told about a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValueDescriptor {
    pub temporality: Temporality,
    pub engine_derived: bool,
    pub narrative: bool,
}

impl ValueDescriptor {
    pub fn realized() -> Self {
        Self {
            temporality: Temporality::Realized,
            engine_derived: false,
            narrative: false,
        }
    }

    pub fn scenario() -> Self {
        Self {
            temporality: Temporality::Scenario,
            ..Self::realized()
        }
    }

    pub fn engine_output() -> Self {
        Self {
            temporality: Temporality::Unknown,
            engine_derived: true,
            narrative: false,
        }
    }

    pub fn narrative() -> Self {
        Self {
            temporality: Temporality::Unknown,
            engine_derived: false,
            narrative: true,
        }
    }
}

/// Assigns the evidence class. Ambiguous descriptors are rejected, not guessed.
pub fn classify(desc: &ValueDescriptor) -> Result<EvidenceStatus, LedgerError> {
    match (desc.engine_derived, desc.narrative, desc.temporality) {
        (true, true, _) => Err(LedgerError::Classification(
            "descriptor is both engine-derived and narrative".into(),
        )),
        (true, false, _) => Ok(EvidenceStatus::Calculated),
        (false, true, _) => Ok(EvidenceStatus::Interpretation),
        (false, false, Temporality::Realized) => Ok(EvidenceStatus::Reported),
        (false, false, Temporality::Scenario) => Ok(EvidenceStatus::Projection),
        (false, false, Temporality::Unknown) => Err(LedgerError::Classification(
            "source value does not declare whether it is realized or a scenario".into(),
        )),
    }
}
