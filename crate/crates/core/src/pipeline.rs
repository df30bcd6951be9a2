//! End-to-end run: ingest, vet, classify, compute, audit, map, assess.
//!
//! The run is sequential and deterministic. Numbers go into the audit log
//! before anything interprets them.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::cfindex::{self, ComponentKind, Normalization};
use crate::error::{CalcError, DefinitionParseError, FrameworkError, IngestError, LedgerError};
use crate::evidence::{classify, EvidenceStatus, InterpretationBoundary, ValueDescriptor};
use crate::formula::FormulaId;
use crate::framework::{
    assess, map_indicator, EvidencePool, HypothesisAssessment, HypothesisSet, MappingEntry,
    RuleSet, UnmappedIndicator, UnmeasuredVariable,
};
use crate::indicator::{compute, DerivedIndicator, SourceRegistry};
use crate::io::{dataset, defs, series, CfConfig};
use crate::ledger::{
    record_audit, vet_source, verify_audit_log, AuditInput, AuditLog, Rejection, ResolveInput,
    VetOutcome, VerifyReport,
};
use crate::quantity::{Period, Unit, UnitKind};

/// Decimal places used when rendering each table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Precision {
    pub percent: usize,
    pub ratio: usize,
    pub hhi: usize,
    pub index: usize,
}

impl Default for Precision {
    fn default() -> Self {
        Self {
            percent: 2,
            ratio: 2,
            hhi: 4,
            index: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub dataset: PathBuf,
    pub defs: PathBuf,
    pub rules: PathBuf,
    pub hypotheses: PathBuf,
    pub cfindex: Option<PathBuf>,
    pub out: PathBuf,
    pub precision: Precision,
}

impl PipelineConfig {
    /// Fails fast on any path that does not exist.
    pub fn check_paths(&self) -> Result<(), PipelineError> {
        let mut paths = vec![&self.dataset, &self.defs, &self.rules, &self.hypotheses];
        paths.extend(self.cfindex.iter());
        for p in paths {
            if !p.is_file() {
                return Err(PipelineError::MissingPath(p.clone()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("input file not found: {}", .0.display())]
    MissingPath(PathBuf),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Definition(#[from] DefinitionParseError),
    #[error(transparent)]
    Framework(#[from] FrameworkError),
    #[error(transparent)]
    Ledger(#[from] LedgerError),
    #[error("`{id}` cannot be computed: {source}")]
    Compute { id: String, source: CalcError },
    #[error("friction index: {0}")]
    CfIndex(CalcError),
    #[error("cannot write reports: {0}")]
    Io(#[from] std::io::Error),
}

impl PipelineError {
    /// Exit status for configuration and input failures.
    pub fn exit_code(&self) -> i32 {
        2
    }
}

/// Text inputs of one run. `cfindex` holds the parsed config and the series text.
#[derive(Debug, Clone)]
pub struct PipelineInputs {
    pub dataset: String,
    pub defs: String,
    pub rules: String,
    pub hypotheses: String,
    pub cfindex: Option<(CfConfig, String)>,
    pub precision: Precision,
}

impl PipelineInputs {
    pub fn load(config: &PipelineConfig) -> Result<Self, PipelineError> {
        config.check_paths()?;
        let read = |p: &Path| std::fs::read_to_string(p).map_err(PipelineError::Io);
        let cfindex = match &config.cfindex {
            Some(path) => {
                let cf = series::parse_cf_config(path)?;
                if !cf.series.is_file() {
                    return Err(PipelineError::MissingPath(cf.series.clone()));
                }
                let text = read(&cf.series)?;
                Some((cf, text))
            }
            None => None,
        };
        Ok(Self {
            dataset: read(&config.dataset)?,
            defs: read(&config.defs)?,
            rules: read(&config.rules)?,
            hypotheses: read(&config.hypotheses)?,
            cfindex,
            precision: config.precision,
        })
    }
}

/// A definition that was not computed because an input failed vetting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockedDefinition {
    pub id: String,
    pub rejected_inputs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CfRow {
    pub sector: String,
    pub period: Period,
    pub components: cfindex::ComponentValues,
    pub indicator: DerivedIndicator,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CfValidation {
    pub sector: String,
    pub points: usize,
    pub rank_correlation: Result<f64, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CfRun {
    pub provenance: String,
    pub normalization: Normalization,
    pub rows: Vec<CfRow>,
    pub validations: Vec<CfValidation>,
    /// (sector, message) pairs from normalization.
    pub warnings: Vec<(String, String)>,
}

#[derive(Debug, Clone)]
pub struct ReportBundle {
    pub sources: SourceRegistry,
    pub rejected: Vec<Rejection>,
    pub blocked: Vec<BlockedDefinition>,
    pub derived: Vec<DerivedIndicator>,
    pub audit: AuditLog,
    pub verification: VerifyReport,
    pub mapping: Vec<MappingEntry>,
    pub unmapped: Vec<UnmappedIndicator>,
    pub unmeasured: Vec<UnmeasuredVariable>,
    pub hypotheses: Vec<HypothesisAssessment>,
    pub cfindex: Option<CfRun>,
    pub precision: Precision,
}

impl ReportBundle {
    /// Every derived value, definition-based first, then index values.
    pub fn all_derived(&self) -> impl Iterator<Item = &DerivedIndicator> {
        self.derived
            .iter()
            .chain(self.cfindex.iter().flat_map(|c| c.rows.iter().map(|r| &r.indicator)))
    }

    pub fn get(&self, id: &str) -> Option<&DerivedIndicator> {
        self.all_derived().find(|d| d.id == id)
    }

    /// Ids whose audit record did not match or failed verification.
    pub fn mismatches(&self) -> Vec<String> {
        let mut ids: BTreeSet<String> = self
            .audit
            .records()
            .iter()
            .filter(|r| !r.matched)
            .map(|r| r.result_id.clone())
            .collect();
        ids.extend(self.verification.failed.iter().map(|f| f.result_id.clone()));
        ids.into_iter().collect()
    }

    pub fn exit_code(&self) -> i32 {
        if self.mismatches().is_empty() {
            0
        } else {
            1
        }
    }
}

/// Resolves ids against accepted sources first, then extra snapshots.
struct Resolver<'a> {
    sources: &'a SourceRegistry,
    extra: Vec<AuditInput>,
}

impl ResolveInput for Resolver<'_> {
    fn resolve(&self, id: &str) -> Option<AuditInput> {
        self.sources
            .resolve(id)
            .or_else(|| self.extra.iter().find(|i| i.id == id).cloned())
    }
}

fn descriptor(status: EvidenceStatus) -> ValueDescriptor {
    match status {
        EvidenceStatus::Projection => ValueDescriptor::scenario(),
        _ => ValueDescriptor::realized(),
    }
}

fn run_cfindex(
    cf: &CfConfig,
    series_text: &str,
    audit: &mut AuditLog,
) -> Result<CfRun, PipelineError> {
    let label = cf.series.display().to_string();
    let all = series::parse_sector_series_str(series_text, &label)?;
    let params = cfindex::audit_params(cf.normalization, &cf.weights, &cf.provenance);
    let boundary = InterpretationBoundary::of_status(cf.status);
    let source = format!("{} ({} normalized)", cf.provenance, cf.normalization.token());

    let mut run = CfRun {
        provenance: cf.provenance.clone(),
        normalization: cf.normalization,
        rows: Vec::new(),
        validations: Vec::new(),
        warnings: Vec::new(),
    };
    for s in &all {
        let normalized = cfindex::normalize(s, cf.normalization).map_err(PipelineError::CfIndex)?;
        run.warnings.extend(normalized.warnings.iter().map(|w| (s.sector.clone(), w.clone())));
        let mut index_values = Vec::new();
        for (period, comps) in &normalized.rows {
            let value = cfindex::cf_index(comps, &cf.weights).map_err(PipelineError::CfIndex)?;
            let id = format!("cf:{}:{}", s.sector, period);
            let snapshot: Vec<AuditInput> = ComponentKind::ALL
                .into_iter()
                .map(|k| AuditInput {
                    id: format!("{}:{}:{k}", s.sector, period),
                    value: comps[&k],
                    unit: UnitKind::Dimensionless,
                    period: *period,
                    status: cf.status,
                    source: source.clone(),
                })
                .collect();
            let indicator = DerivedIndicator {
                id: id.clone(),
                formula: FormulaId::CfIndex,
                inputs: snapshot.iter().map(|i| i.id.clone()).collect(),
                params: params.clone(),
                quantity: value,
                unit: Unit::from(UnitKind::Dimensionless),
                evidence_status: EvidenceStatus::Calculated,
                boundary,
                concept: format!("Coordination-friction index: {}", s.sector),
                period: *period,
                declared: None,
            };
            let resolver = Resolver {
                sources: &SourceRegistry::new(),
                extra: snapshot,
            };
            audit.append(record_audit(&indicator, &resolver)?)?;
            index_values.push(value);
            run.rows.push(CfRow {
                sector: s.sector.clone(),
                period: *period,
                components: comps.clone(),
                indicator,
            });
        }
        run.validations.push(match &s.outcomes {
            Some(outcomes) => {
                let ys: Vec<f64> = outcomes.iter().map(|(_, y)| *y).collect();
                CfValidation {
                    sector: s.sector.clone(),
                    points: ys.len(),
                    rank_correlation: cfindex::validate_against_outcomes(&index_values, &ys)
                        .map_err(|e| e.to_string()),
                }
            }
            None => CfValidation {
                sector: s.sector.clone(),
                points: 0,
                rank_correlation: Err("no outcome series".into()),
            },
        });
    }
    Ok(run)
}

/// Runs every step over in-memory inputs.
pub fn run_inputs(inputs: &PipelineInputs, labels: &InputLabels) -> Result<ReportBundle, PipelineError> {
    // ingest
    let candidates = dataset::parse_dataset_str(&inputs.dataset, &labels.dataset)?;
    let rules = RuleSet::from_toml_str(&inputs.rules)?;
    let hypotheses = HypothesisSet::from_toml_str(&inputs.hypotheses)?;

    // vet, then classify what was accepted
    let mut sources = SourceRegistry::new();
    let mut rejected = Vec::new();
    for c in &candidates {
        match vet_source(c) {
            VetOutcome::Accepted(v) => {
                let class = classify(&descriptor(v.evidence_status))?;
                debug_assert_eq!(class, v.evidence_status);
                sources.insert(v);
            }
            VetOutcome::Rejected(r) => rejected.push(r),
        }
    }

    // compute, skipping definitions that touch rejected sources
    let known: BTreeSet<String> = candidates.iter().map(|c| c.id.clone()).collect();
    let definitions = defs::parse_indicator_defs_str(&inputs.defs, &labels.defs, Some(&known))?;
    let mut derived = Vec::new();
    let mut blocked = Vec::new();
    for def in &definitions {
        let rejected_inputs: Vec<String> = def
            .inputs
            .iter()
            .filter(|id| !sources.contains(id))
            .cloned()
            .collect();
        if !rejected_inputs.is_empty() {
            blocked.push(BlockedDefinition {
                id: def.id.clone(),
                rejected_inputs,
            });
            continue;
        }
        let d = compute(def, &sources).map_err(|source| PipelineError::Compute {
            id: def.id.clone(),
            source,
        })?;
        derived.push(d);
    }

    // audit
    let mut audit = AuditLog::new();
    for d in &derived {
        audit.append(record_audit(d, &sources)?)?;
    }
    let cf_run = match &inputs.cfindex {
        Some((cf, text)) => Some(run_cfindex(cf, text, &mut audit)?),
        None => None,
    };
    let verification = verify_audit_log(&audit);

    // map every accepted source and every derived value
    let mut mapping = Vec::new();
    let mut unmapped = Vec::new();
    let mut push = |r: Result<MappingEntry, UnmappedIndicator>| match r {
        Ok(e) => mapping.push(e),
        Err(u) => unmapped.push(u),
    };
    for v in sources.iter() {
        push(map_indicator(v, &rules));
    }
    for d in derived
        .iter()
        .chain(cf_run.iter().flat_map(|c| c.rows.iter().map(|r| &r.indicator)))
    {
        push(map_indicator(d, &rules));
    }

    // assess
    let pool = EvidencePool::from_run(&sources, &derived, &audit, &verification, &mapping);
    let assessments = hypotheses
        .hypotheses
        .iter()
        .map(|h| assess(h, &pool))
        .collect::<Result<Vec<_>, _>>()?;

    Ok(ReportBundle {
        sources,
        rejected,
        blocked,
        derived,
        audit,
        verification,
        mapping,
        unmapped,
        unmeasured: rules.unmeasured.clone(),
        hypotheses: assessments,
        cfindex: cf_run,
        precision: inputs.precision,
    })
}

/// Names used in error positions for in-memory inputs.
#[derive(Debug, Clone)]
pub struct InputLabels {
    pub dataset: String,
    pub defs: String,
}

impl Default for InputLabels {
    fn default() -> Self {
        Self {
            dataset: "dataset.tsv".into(),
            defs: "defs.txt".into(),
        }
    }
}

/// Loads files, runs, and writes the reports into `config.out`.
pub fn run_pipeline(config: &PipelineConfig) -> Result<ReportBundle, PipelineError> {
    let inputs = PipelineInputs::load(config)?;
    let labels = InputLabels {
        dataset: config.dataset.display().to_string(),
        defs: config.defs.display().to_string(),
    };
    let bundle = run_inputs(&inputs, &labels)?;
    crate::io::report::emit_reports(&bundle, &config.out)?;
    Ok(bundle)
}
