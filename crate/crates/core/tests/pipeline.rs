use std::collections::BTreeSet;

use capdiag_core::framework::Verdict;
use capdiag_core::ledger::{verify_audit_log, AuditLog};
use capdiag_core::pipeline::{run_inputs, InputLabels, PipelineConfig, Precision};
use capdiag_core::{fixtures, run_pipeline, InterpretationBoundary, PipelineError};

const HEADER: &str = "id\tconcept\tquantity\tunit\tperiod_start\tperiod_end\tsource_family\tstatus\tnotes\tdomain\tflags\n";

fn run(mutate: impl FnOnce(&mut capdiag_core::PipelineInputs)) -> Result<capdiag_core::ReportBundle, PipelineError> {
    let mut inputs = fixtures::inputs(false);
    mutate(&mut inputs);
    run_inputs(&inputs, &InputLabels::default())
}

fn replace_row_cell(dataset: &str, id: &str, column: usize, value: &str) -> String {
    dataset
        .lines()
        .map(|l| {
            let mut cells: Vec<&str> = l.split('\t').collect();
            if cells[0] == id {
                cells[column] = value;
            }
            cells.join("\t")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn empty_dataset_and_definitions_produce_empty_reports() {
    let b = run(|i| {
        i.dataset = HEADER.to_string();
        i.defs = String::new();
        i.hypotheses = String::new();
    })
    .unwrap();
    assert!(b.sources.is_empty());
    assert!(b.derived.is_empty());
    assert!(b.audit.is_empty());
    assert_eq!(b.exit_code(), 0);
}

#[test]
fn definitions_over_an_empty_dataset_are_rejected() {
    let err = run(|i| i.dataset = HEADER.to_string()).unwrap_err();
    assert!(matches!(err, PipelineError::Definition(_)), "{err}");
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn vetting_rejection_blocks_only_dependent_definitions() {
    let b = run(|i| i.dataset = replace_row_cell(fixtures::DATASET, "dc_elec_2030", 2, "")).unwrap();
    assert_eq!(b.rejected.len(), 1);
    assert_eq!(b.rejected[0].id, "dc_elec_2030");
    let blocked: BTreeSet<&str> = b.blocked.iter().map(|d| d.id.as_str()).collect();
    assert_eq!(blocked, BTreeSet::from(["dc_abs_2030", "dc_gm_2030", "dc_cagr_2030"]));
    assert!(b.get("dc_cagr_2035").is_some());
    assert!(b.get("dc_cagr_2030").is_none());
    let h2 = b.hypotheses.iter().find(|h| h.id == "H2").unwrap();
    assert_eq!(h2.verdict, Verdict::NotEstablished);
    assert_eq!(b.exit_code(), 0);
}

#[test]
fn wrong_published_value_fails_exactly_that_indicator() {
    let b = run(|i| i.defs = fixtures::DEFS.replace("=> 26.95%", "=> 27.95%")).unwrap();
    assert_eq!(b.mismatches(), vec!["eu_cagr".to_string()]);
    assert_eq!(b.exit_code(), 1);
    let h1 = b.hypotheses.iter().find(|h| h.id == "H1").unwrap();
    assert_ne!(h1.verdict, Verdict::Supported);
}

#[test]
fn projection_input_taints_only_its_dependents() {
    let b = run(|i| i.dataset = replace_row_cell(fixtures::DATASET, "eu_ai_2025", 7, "projection")).unwrap();
    for d in &b.derived {
        let touches = d.inputs.iter().any(|id| id == "eu_ai_2025");
        assert_eq!(d.boundary == InterpretationBoundary::ProjectionBased, touches || d.id.starts_with("dc_") || d.id.starts_with("labour_"), "{}", d.id);
    }
    let h1 = b.hypotheses.iter().find(|h| h.id == "H1").unwrap();
    assert_ne!(h1.verdict, Verdict::Supported);
}

#[test]
fn every_result_has_one_audit_record_and_a_mapping_outcome() {
    let b = run_inputs(&fixtures::inputs(true), &InputLabels::default()).unwrap();
    let derived: BTreeSet<&str> = b.all_derived().map(|d| d.id.as_str()).collect();
    let audited: Vec<&str> = b.audit.records().iter().map(|r| r.result_id.as_str()).collect();
    assert_eq!(audited.len(), derived.len());
    assert_eq!(audited.iter().copied().collect::<BTreeSet<_>>(), derived);

    let mut outcomes: Vec<&str> = b.mapping.iter().map(|m| m.indicator_id.as_str()).collect();
    outcomes.extend(b.unmapped.iter().map(|u| u.indicator_id.as_str()));
    let unique: BTreeSet<&str> = outcomes.iter().copied().collect();
    assert_eq!(unique.len(), outcomes.len(), "an indicator was mapped twice");
    let expected: BTreeSet<&str> = b.sources.iter().map(|s| s.id.as_str()).chain(derived).collect();
    assert_eq!(unique, expected);
}

#[test]
fn labour_projection_maps_to_human_capacity_only() {
    let b = run(|_| {}).unwrap();
    let entry = b.mapping.iter().find(|m| m.indicator_id == "wef_new_2030").unwrap();
    let targets: Vec<String> = entry.targets.iter().map(|t| t.to_string()).collect();
    assert_eq!(targets, vec!["H"]);
}

#[test]
fn run_from_files_writes_verifiable_reports() {
    let dir = fixtures::fixture_dir();
    let out = tempfile::tempdir().unwrap();
    let config = PipelineConfig {
        dataset: dir.join("dataset.tsv"),
        defs: dir.join("defs.txt"),
        rules: dir.join("rules.toml"),
        hypotheses: dir.join("hypotheses.toml"),
        cfindex: Some(dir.join("cfindex.toml")),
        out: out.path().to_path_buf(),
        precision: Precision::default(),
    };
    let b = run_pipeline(&config).unwrap();
    assert_eq!(b.exit_code(), 0);
    for f in ["indicators.tsv", "concentration.tsv", "hypotheses.tsv", "mapping.tsv", "vetting.tsv", "audit.log", "cfindex.tsv", "cfindex_validation.tsv"] {
        assert!(out.path().join(f).is_file(), "{f} missing");
    }
    let log = AuditLog::load(&out.path().join("audit.log")).unwrap();
    assert!(verify_audit_log(&log).all_passed());
}

#[test]
fn missing_input_file_is_a_usage_error() {
    let config = PipelineConfig {
        dataset: "/nonexistent/dataset.tsv".into(),
        defs: "/nonexistent/defs.txt".into(),
        rules: "/nonexistent/rules.toml".into(),
        hypotheses: "/nonexistent/h.toml".into(),
        cfindex: None,
        out: std::env::temp_dir(),
        precision: Precision::default(),
    };
    let err = run_pipeline(&config).unwrap_err();
    assert!(matches!(err, PipelineError::MissingPath(_)));
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn malformed_dataset_row_is_an_ingest_error() {
    let err = run(|i| i.dataset = replace_row_cell(fixtures::DATASET, "eu_ai_2021", 2, "n/a")).unwrap_err();
    assert!(matches!(err, PipelineError::Ingest(_)), "{err}");
    assert!(err.to_string().contains(":3"), "{err}");
}
