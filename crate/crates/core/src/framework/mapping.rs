//! Declarative mapping of indicators onto action-capacity variables.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::variables::ActionCapacityVariable;
use crate::error::FrameworkError;
use crate::evidence::{EvidenceStatus, InterpretationBoundary};
use crate::indicator::{DerivedIndicator, SourceValue};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MappingRule {
    pub name: String,
    /// Case-insensitive substrings; any one matching is enough.
    #[serde(default)]
    pub concept: Vec<String>,
    /// Interpretation boundaries this rule applies to.
    #[serde(default)]
    pub boundary: Vec<InterpretationBoundary>,
    pub targets: Vec<ActionCapacityVariable>,
    pub statement: String,
}

impl MappingRule {
    fn matches(&self, concept: &str, boundary: InterpretationBoundary) -> bool {
        let concept = concept.to_lowercase();
        let concept_ok = self.concept.is_empty()
            || self
                .concept
                .iter()
                .any(|p| concept.contains(&p.to_lowercase()));
        let boundary_ok = self.boundary.is_empty() || self.boundary.contains(&boundary);
        concept_ok && boundary_ok
    }
}

/// A variable the dataset cannot measure, with what would be needed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnmeasuredVariable {
    pub variable: ActionCapacityVariable,
    pub note: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleSet {
    #[serde(default, rename = "rule")]
    pub rules: Vec<MappingRule>,
    #[serde(default)]
    pub unmeasured: Vec<UnmeasuredVariable>,
}

impl RuleSet {
    pub fn from_toml_str(text: &str) -> Result<Self, FrameworkError> {
        let set: RuleSet = toml::from_str(text)?;
        set.validate()?;
        Ok(set)
    }

    pub fn validate(&self) -> Result<(), FrameworkError> {
        let mut names = BTreeSet::new();
        for r in &self.rules {
            if !names.insert(r.name.as_str()) {
                return Err(FrameworkError::Rule(format!("duplicate rule `{}`", r.name)));
            }
            if r.targets.is_empty() {
                return Err(FrameworkError::Rule(format!("rule `{}` has no targets", r.name)));
            }
            if r.statement.trim().is_empty() {
                return Err(FrameworkError::Rule(format!(
                    "rule `{}` has no boundary statement",
                    r.name
                )));
            }
            if r.concept.is_empty() && r.boundary.is_empty() {
                return Err(FrameworkError::Rule(format!(
                    "rule `{}` matches everything; give a concept or boundary",
                    r.name
                )));
            }
            if r.concept.iter().any(|p| p.trim().is_empty()) {
                return Err(FrameworkError::Rule(format!(
                    "rule `{}` has an empty concept pattern",
                    r.name
                )));
            }
        }
        Ok(())
    }

    pub fn is_measured(&self, v: ActionCapacityVariable) -> bool {
        !self.unmeasured.iter().any(|u| u.variable == v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndicatorOrigin {
    Source,
    Derived,
}

/// Anything the mapper can place.
pub trait Mappable {
    fn mapping_id(&self) -> &str;
    fn mapping_concept(&self) -> &str;
    fn mapping_boundary(&self) -> InterpretationBoundary;
    fn origin(&self) -> IndicatorOrigin;
}

impl Mappable for SourceValue {
    fn mapping_id(&self) -> &str {
        &self.id
    }
    fn mapping_concept(&self) -> &str {
        &self.concept
    }
    fn mapping_boundary(&self) -> InterpretationBoundary {
        InterpretationBoundary::of_status(self.evidence_status)
    }
    fn origin(&self) -> IndicatorOrigin {
        IndicatorOrigin::Source
    }
}

impl Mappable for DerivedIndicator {
    fn mapping_id(&self) -> &str {
        &self.id
    }
    fn mapping_concept(&self) -> &str {
        &self.concept
    }
    fn mapping_boundary(&self) -> InterpretationBoundary {
        self.boundary
    }
    fn origin(&self) -> IndicatorOrigin {
        IndicatorOrigin::Derived
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MappingEntry {
    pub indicator_id: String,
    pub origin: IndicatorOrigin,
    pub concept: String,
    pub targets: BTreeSet<ActionCapacityVariable>,
    pub boundary_statement: String,
    pub evidence_status: EvidenceStatus,
    pub rules: Vec<String>,
    pub multi_rule: bool,
    /// Set when a target is not measured by this dataset; such entries are
    /// reported under future measurement.
    pub future_measurement: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[error("no mapping rule matches `{indicator_id}` ({concept})")]
pub struct UnmappedIndicator {
    pub indicator_id: String,
    pub origin: IndicatorOrigin,
    pub concept: String,
}

/// Applies every matching rule. No rule matching is reported, never guessed.
pub fn map_indicator(
    item: &impl Mappable,
    rules: &RuleSet,
) -> Result<MappingEntry, UnmappedIndicator> {
    let matched: Vec<&MappingRule> = rules
        .rules
        .iter()
        .filter(|r| r.matches(item.mapping_concept(), item.mapping_boundary()))
        .collect();
    if matched.is_empty() {
        return Err(UnmappedIndicator {
            indicator_id: item.mapping_id().to_string(),
            origin: item.origin(),
            concept: item.mapping_concept().to_string(),
        });
    }
    let targets: BTreeSet<ActionCapacityVariable> =
        matched.iter().flat_map(|r| r.targets.iter().copied()).collect();
    let future_measurement = targets.iter().any(|v| !rules.is_measured(*v));
    Ok(MappingEntry {
        indicator_id: item.mapping_id().to_string(),
        origin: item.origin(),
        concept: item.mapping_concept().to_string(),
        boundary_statement: matched
            .iter()
            .map(|r| r.statement.trim())
            .collect::<Vec<_>>()
            .join("; "),
        evidence_status: EvidenceStatus::Interpretation,
        rules: matched.iter().map(|r| r.name.clone()).collect(),
        multi_rule: matched.len() > 1,
        targets,
        future_measurement,
    })
}
