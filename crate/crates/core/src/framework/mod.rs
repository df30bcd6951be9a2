//! Action-capacity mapping and hypothesis assessment.
//!
//! Everything produced here is interpretation: it never feeds back into the
//! numeric tables.

pub mod hypothesis;
pub mod mapping;
pub mod variables;

pub use hypothesis::{
    assess, ClaimKind, EvidenceItem, EvidencePool, HypothesisAssessment, HypothesisSet,
    HypothesisSpec, ProjectionSensitivity, Verdict,
};
pub use mapping::{
    map_indicator, IndicatorOrigin, Mappable, MappingEntry, MappingRule, RuleSet,
    UnmappedIndicator, UnmeasuredVariable,
};
pub use variables::{ActionCapacityVariable, MeasurementLevel};
