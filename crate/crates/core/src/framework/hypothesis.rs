//! Conservative hypothesis and proposition assessment.
//!
//! A claim is only `Supported` when every required item is present, verified
//! by the audit, free of projection inputs, and bounded by a stated
//! interpretation limit. Anything weaker is downgraded, never upgraded.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::mapping::MappingEntry;
use super::variables::ActionCapacityVariable;
use crate::error::FrameworkError;
use crate::evidence::{EvidenceStatus, InterpretationBoundary};
use crate::indicator::{DerivedIndicator, SourceRegistry};
use crate::ledger::{AuditLog, VerifyReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClaimKind {
    Empirical,
    Conceptual,
}

/// Which qualified verdict a projection-dependent claim receives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProjectionSensitivity {
    UnderProjection,
    Caution,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisSpec {
    pub id: String,
    pub kind: ClaimKind,
    pub claim: String,
    #[serde(default)]
    pub required: Option<Vec<String>>,
    /// Defaults to `caution`.
    #[serde(default)]
    pub projection_sensitivity: Option<ProjectionSensitivity>,
    #[serde(default)]
    pub boundary: String,
    /// Variables a conceptual proposition needs evidence converging on.
    #[serde(default)]
    pub convergence: Vec<ActionCapacityVariable>,
}

impl HypothesisSpec {
    pub fn required_ids(&self) -> Result<&[String], FrameworkError> {
        match &self.required {
            Some(ids) if !ids.is_empty() => Ok(ids),
            _ => Err(FrameworkError::Spec(format!(
                "hypothesis `{}` lists no required indicators",
                self.id
            ))),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisSet {
    #[serde(default, rename = "hypothesis")]
    pub hypotheses: Vec<HypothesisSpec>,
}

impl HypothesisSet {
    pub fn from_toml_str(text: &str) -> Result<Self, FrameworkError> {
        let set: HypothesisSet = toml::from_str(text)?;
        let mut ids = HashSet::new();
        for h in &set.hypotheses {
            if !ids.insert(h.id.as_str()) {
                return Err(FrameworkError::Spec(format!("duplicate hypothesis `{}`", h.id)));
            }
            h.required_ids()?;
        }
        Ok(set)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Supported,
    SupportedUnderProjection,
    SupportedWithCaution,
    SupportedAsConceptualProposition,
    NotEstablished,
}

impl Verdict {
    pub fn token(self) -> &'static str {
        match self {
            Verdict::Supported => "Supported",
            Verdict::SupportedUnderProjection => "SupportedUnderProjection",
            Verdict::SupportedWithCaution => "SupportedWithCaution",
            Verdict::SupportedAsConceptualProposition => "SupportedAsConceptualProposition",
            Verdict::NotEstablished => "NotEstablished",
        }
    }

    /// Rank for empirical verdicts; higher is stronger.
    pub fn strength(self) -> u8 {
        match self {
            Verdict::Supported => 3,
            Verdict::SupportedUnderProjection => 2,
            Verdict::SupportedWithCaution | Verdict::SupportedAsConceptualProposition => 1,
            Verdict::NotEstablished => 0,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// What the assessment knows about one required item.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvidenceItem {
    pub id: String,
    pub classes: BTreeSet<EvidenceStatus>,
    pub projection: bool,
    pub verified: bool,
}

/// Available evidence: items by id plus the variables covered by mapping.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EvidencePool {
    items: BTreeMap<String, EvidenceItem>,
    covered: BTreeSet<ActionCapacityVariable>,
}

impl EvidencePool {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, item: EvidenceItem) {
        self.items.insert(item.id.clone(), item);
    }

    pub fn cover(&mut self, v: ActionCapacityVariable) {
        self.covered.insert(v);
    }

    pub fn get(&self, id: &str) -> Option<&EvidenceItem> {
        self.items.get(id)
    }

    pub fn get_mut(&mut self, id: &str) -> Option<&mut EvidenceItem> {
        self.items.get_mut(id)
    }

    pub fn covered(&self) -> &BTreeSet<ActionCapacityVariable> {
        &self.covered
    }

    /// Builds the pool from one pipeline run. Derived items count as verified
    /// only when their audit record matched and passed verification.
    pub fn from_run(
        sources: &SourceRegistry,
        derived: &[DerivedIndicator],
        log: &AuditLog,
        report: &VerifyReport,
        entries: &[MappingEntry],
    ) -> Self {
        let mut pool = EvidencePool::new();
        for v in sources.iter() {
            pool.insert(EvidenceItem {
                id: v.id.clone(),
                classes: BTreeSet::from([v.evidence_status]),
                projection: v.evidence_status == EvidenceStatus::Projection,
                verified: true,
            });
        }
        let failed: HashSet<&str> = report.failed_ids().into_iter().collect();
        for d in derived {
            let record = log.get(&d.id);
            let mut classes = BTreeSet::from([EvidenceStatus::Calculated]);
            if let Some(r) = record {
                classes.extend(r.inputs.iter().map(|i| i.status));
            }
            pool.insert(EvidenceItem {
                id: d.id.clone(),
                classes,
                projection: d.boundary == InterpretationBoundary::ProjectionBased,
                verified: record.is_some_and(|r| r.matched) && !failed.contains(d.id.as_str()),
            });
        }
        for e in entries {
            pool.covered.extend(e.targets.iter().copied());
        }
        pool
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HypothesisAssessment {
    pub id: String,
    pub kind: ClaimKind,
    pub claim: String,
    pub required_indicator_ids: Vec<String>,
    pub evidence_classes_present: BTreeSet<EvidenceStatus>,
    pub projection_items: Vec<String>,
    pub boundary_statement: String,
    pub verdict: Verdict,
    pub evidence_status: EvidenceStatus,
    pub reasons: Vec<String>,
}

pub fn assess(spec: &HypothesisSpec, pool: &EvidencePool) -> Result<HypothesisAssessment, FrameworkError> {
    let required = spec.required_ids()?;
    let mut reasons = Vec::new();
    let mut classes = BTreeSet::new();
    let mut projection_items = Vec::new();
    let mut complete = true;
    for id in required {
        match pool.get(id) {
            None => {
                complete = false;
                reasons.push(format!("missing {id}"));
            }
            Some(item) => {
                classes.extend(item.classes.iter().copied());
                if !item.verified {
                    complete = false;
                    reasons.push(format!("{id} failed audit"));
                }
                if item.projection {
                    projection_items.push(id.clone());
                }
            }
        }
    }
    let bounded = !spec.boundary.trim().is_empty();

    let verdict = if !complete {
        Verdict::NotEstablished
    } else {
        match spec.kind {
            ClaimKind::Conceptual => {
                let uncovered: Vec<_> = spec
                    .convergence
                    .iter()
                    .filter(|v| !pool.covered().contains(v))
                    .collect();
                if spec.convergence.is_empty() {
                    reasons.push("no convergence variables declared".into());
                    Verdict::NotEstablished
                } else if !uncovered.is_empty() {
                    for v in uncovered {
                        reasons.push(format!("no mapped evidence for {v}"));
                    }
                    Verdict::NotEstablished
                } else {
                    Verdict::SupportedAsConceptualProposition
                }
            }
            ClaimKind::Empirical if !projection_items.is_empty() => {
                reasons.push(format!("projection-based: {}", projection_items.join(", ")));
                match spec.projection_sensitivity.unwrap_or(ProjectionSensitivity::Caution) {
                    ProjectionSensitivity::UnderProjection if bounded => {
                        Verdict::SupportedUnderProjection
                    }
                    _ => Verdict::SupportedWithCaution,
                }
            }
            ClaimKind::Empirical if !bounded => {
                reasons.push("no interpretation boundary stated".into());
                Verdict::SupportedWithCaution
            }
            ClaimKind::Empirical => Verdict::Supported,
        }
    };

    Ok(HypothesisAssessment {
        id: spec.id.clone(),
        kind: spec.kind,
        claim: spec.claim.clone(),
        required_indicator_ids: required.to_vec(),
        evidence_classes_present: classes,
        projection_items,
        boundary_statement: spec.boundary.trim().to_string(),
        verdict,
        evidence_status: EvidenceStatus::Interpretation,
        reasons,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn item(id: &str, projection: bool) -> EvidenceItem {
        EvidenceItem {
            id: id.into(),
            classes: BTreeSet::from([if projection {
                EvidenceStatus::Projection
            } else {
                EvidenceStatus::Reported
            }]),
            projection,
            verified: true,
        }
    }

    fn spec(id: &str, kind: ClaimKind, required: &[&str], sens: Option<ProjectionSensitivity>) -> HypothesisSpec {
        HypothesisSpec {
            id: id.into(),
            kind,
            claim: "claim".into(),
            required: Some(required.iter().map(|s| s.to_string()).collect()),
            projection_sensitivity: sens,
            boundary: "stated limit".into(),
            convergence: Vec::new(),
        }
    }

    fn pool() -> EvidencePool {
        let mut p = EvidencePool::new();
        p.insert(item("eu_cagr", false));
        p.insert(item("oecd_cagr", false));
        p.insert(item("dc_cagr", true));
        p.insert(item("labour_ndr", true));
        p
    }

    #[test]
    fn reported_evidence_is_supported() {
        let a = assess(&spec("H1", ClaimKind::Empirical, &["eu_cagr", "oecd_cagr"], None), &pool()).unwrap();
        assert_eq!(a.verdict, Verdict::Supported);
        assert_eq!(a.evidence_status, EvidenceStatus::Interpretation);
    }

    #[test]
    fn projection_verdicts_follow_the_flag() {
        let h2 = spec("H2", ClaimKind::Empirical, &["dc_cagr"], Some(ProjectionSensitivity::UnderProjection));
        assert_eq!(assess(&h2, &pool()).unwrap().verdict, Verdict::SupportedUnderProjection);
        let h4 = spec("H4", ClaimKind::Empirical, &["labour_ndr"], Some(ProjectionSensitivity::Caution));
        assert_eq!(assess(&h4, &pool()).unwrap().verdict, Verdict::SupportedWithCaution);
        let default = spec("Hx", ClaimKind::Empirical, &["labour_ndr"], None);
        assert_eq!(assess(&default, &pool()).unwrap().verdict, Verdict::SupportedWithCaution);
    }

    #[test]
    fn missing_or_unverified_is_not_established() {
        let mut p = pool();
        p.items.remove("eu_cagr");
        let h1 = spec("H1", ClaimKind::Empirical, &["eu_cagr", "oecd_cagr"], None);
        let a = assess(&h1, &p).unwrap();
        assert_eq!(a.verdict, Verdict::NotEstablished);
        assert_eq!(a.reasons, vec!["missing eu_cagr"]);

        let mut p = pool();
        p.get_mut("oecd_cagr").unwrap().verified = false;
        assert_eq!(assess(&h1, &p).unwrap().verdict, Verdict::NotEstablished);
    }

    #[test]
    fn empty_boundary_is_never_plain_supported() {
        let mut h = spec("H1", ClaimKind::Empirical, &["eu_cagr"], None);
        h.boundary = "  ".into();
        assert_eq!(assess(&h, &pool()).unwrap().verdict, Verdict::SupportedWithCaution);
    }

    #[test]
    fn conceptual_needs_convergence_coverage() {
        let mut p5 = spec("P5", ClaimKind::Conceptual, &["eu_cagr"], None);
        assert_eq!(assess(&p5, &pool()).unwrap().verdict, Verdict::NotEstablished);
        p5.convergence = vec![ActionCapacityVariable::M, ActionCapacityVariable::H];
        let mut p = pool();
        p.cover(ActionCapacityVariable::M);
        assert_eq!(assess(&p5, &p).unwrap().verdict, Verdict::NotEstablished);
        p.cover(ActionCapacityVariable::H);
        assert_eq!(assess(&p5, &p).unwrap().verdict, Verdict::SupportedAsConceptualProposition);
    }

    #[test]
    fn spec_without_required_list_is_an_error() {
        let mut h = spec("H1", ClaimKind::Empirical, &[], None);
        assert!(matches!(assess(&h, &pool()), Err(FrameworkError::Spec(_))));
        h.required = None;
        assert!(assess(&h, &pool()).is_err());
        let text = "[[hypothesis]]\nid = \"H1\"\nkind = \"empirical\"\nclaim = \"c\"\n";
        assert!(matches!(HypothesisSet::from_toml_str(text), Err(FrameworkError::Spec(_))));
    }

    #[test]
    fn parses_toml_specs() {
        let text = r#"
[[hypothesis]]
id = "H2"
kind = "empirical"
claim = "compute growth adds electricity pressure"
required = ["dc_cagr"]
projection_sensitivity = "under_projection"
boundary = "2030 values are projections"

[[hypothesis]]
id = "P5"
kind = "conceptual"
claim = "c"
required = ["eu_cagr"]
convergence = ["M", "C", "En"]
"#;
        let set = HypothesisSet::from_toml_str(text).unwrap();
        assert_eq!(set.hypotheses.len(), 2);
        assert_eq!(set.hypotheses[0].projection_sensitivity, Some(ProjectionSensitivity::UnderProjection));
        assert_eq!(set.hypotheses[1].convergence.len(), 3);
    }

    proptest! {
        #[test]
        fn downgrading_evidence_never_strengthens(
            flags in prop::collection::vec(any::<bool>(), 1..6),
            flip in 0usize..6,
            under in any::<bool>(),
            bounded in any::<bool>(),
        ) {
            let ids: Vec<String> = (0..flags.len()).map(|i| format!("i{i}")).collect();
            let mut p = EvidencePool::new();
            for (id, f) in ids.iter().zip(&flags) {
                p.insert(item(id, *f));
            }
            let refs: Vec<&str> = ids.iter().map(String::as_str).collect();
            let sens = if under { ProjectionSensitivity::UnderProjection } else { ProjectionSensitivity::Caution };
            let mut h = spec("H", ClaimKind::Empirical, &refs, Some(sens));
            if !bounded {
                h.boundary.clear();
            }
            let before = assess(&h, &p).unwrap().verdict;
            let target = &ids[flip % ids.len()];
            *p.get_mut(target).unwrap() = item(target, true);
            let after = assess(&h, &p).unwrap().verdict;
            prop_assert!(after.strength() <= before.strength());
            prop_assert_ne!(after, Verdict::Supported);
        }
    }
}
