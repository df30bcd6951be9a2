use std::collections::BTreeSet;

use capdiag_core::fixtures;
use capdiag_core::io::report::{render_concentration, render_indicators, render_mapping};
use capdiag_core::io::{parse_cf_config, parse_dataset, parse_indicator_defs, parse_sector_series};
use capdiag_core::pipeline::{run_inputs, InputLabels};
use capdiag_core::{EvidenceStatus, FormulaId};

#[test]
fn fixture_files_parse_from_disk() {
    let dir = fixtures::fixture_dir();
    let rows = parse_dataset(&dir.join("dataset.tsv")).unwrap();
    assert_eq!(rows.len(), 27);
    let projections: BTreeSet<&str> = rows
        .iter()
        .filter(|r| r.evidence_status == EvidenceStatus::Projection)
        .map(|r| r.id.as_str())
        .collect();
    assert!(projections.contains("dc_elec_2030"));
    assert!(!projections.contains("dc_elec_2024"));

    let known: BTreeSet<String> = rows.iter().map(|r| r.id.clone()).collect();
    let defs = parse_indicator_defs(&dir.join("defs.txt"), Some(&known)).unwrap();
    assert!(defs.iter().all(|d| d.declared.is_some()));
    let hhi_pct = defs.iter().find(|d| d.id == "robot_region_hhi").unwrap();
    assert_eq!(hhi_pct.formula, FormulaId::HhiReportedPercent);
    assert_eq!(hhi_pct.inputs.len(), 4);

    let cf = parse_cf_config(&dir.join("cfindex.toml")).unwrap();
    assert_eq!(cf.status, EvidenceStatus::Projection);
    let series = parse_sector_series(&cf.series).unwrap();
    assert_eq!(series.len(), 2);
    assert!(series.iter().all(|s| s.outcomes.is_some()));
}

#[test]
fn unknown_definition_input_reports_its_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("defs.txt");
    std::fs::write(&path, "# header\nx = PP(a, missing)\n").unwrap();
    let known = BTreeSet::from(["a".to_string()]);
    let err = parse_indicator_defs(&path, Some(&known)).unwrap_err();
    assert_eq!((err.line, err.column), (2, 11));
}

#[test]
fn reports_show_published_precision_and_scope() {
    let b = run_inputs(&fixtures::inputs(false), &InputLabels::default()).unwrap();
    let indicators = render_indicators(&b);
    let row = |id: &str| {
        indicators
            .lines()
            .find(|l| l.starts_with(&format!("{id}\t")))
            .unwrap_or_else(|| panic!("{id} missing"))
            .to_string()
    };
    assert!(row("robot_region_hhi").contains("\t0.5814\t"));
    assert!(row("eu_pp").contains("\t12.30 pp\t"));
    assert!(row("dc_gm_2030").contains("\t2.28x\t"));
    assert!(row("labour_net").contains("\t78.00 million\t"));
    assert!(row("dc_cagr_2030").contains("projection_based"));

    let concentration = render_concentration(&b);
    assert!(concentration.lines().skip(1).all(|l| l.contains("reported_comparison") || l.contains("regional")));

    let mapping = render_mapping(&b);
    assert!(mapping.lines().any(|l| l.starts_with("unmeasured\t") && l.contains("\tP\t")));
}
