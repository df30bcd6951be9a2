//! Report files. Numeric tables hold numbers only; interpretation text lives
//! in hypotheses.tsv and mapping.tsv. Output is byte-for-byte deterministic.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::cfindex::ComponentKind;
use crate::formula::FormulaId;
use crate::indicator::DerivedIndicator;
use crate::pipeline::{Precision, ReportBundle};
use crate::quantity::UnitKind;

pub const INDICATORS: &str = "indicators.tsv";
pub const CONCENTRATION: &str = "concentration.tsv";
pub const HYPOTHESES: &str = "hypotheses.tsv";
pub const MAPPING: &str = "mapping.tsv";
pub const VETTING: &str = "vetting.tsv";
pub const AUDIT_LOG: &str = "audit.log";
pub const CFINDEX: &str = "cfindex.tsv";
pub const CFINDEX_VALIDATION: &str = "cfindex_validation.tsv";

fn cell(s: &str) -> String {
    s.replace(['\t', '\n', '\r'], " ")
}

fn row(out: &mut String, cells: &[String]) {
    let line: Vec<String> = cells.iter().map(|c| cell(c)).collect();
    out.push_str(&line.join("\t"));
    out.push('\n');
}

fn header(cols: &[&str]) -> String {
    let mut s = cols.join("\t");
    s.push('\n');
    s
}

fn fixed(v: f64, dp: usize) -> String {
    let s = format!("{v:.dp$}");
    // avoid "-0.00"
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

/// Rounded presentation of a derived value.
pub fn present(formula: FormulaId, value: f64, unit: UnitKind, p: &Precision) -> String {
    let percent = |v: f64| format!("{}%", fixed(v * 100.0, p.percent));
    let multiple = |v: f64| format!("{}x", fixed(v, p.ratio));
    match formula {
        FormulaId::RelativeChange
        | FormulaId::Cagr
        | FormulaId::InstallationShare
        | FormulaId::DisplacementRelativeToNew
        | FormulaId::NetGainRatio
        | FormulaId::Share => percent(value),
        FormulaId::GrowthMultiplier | FormulaId::DemandMultiplier => multiple(value),
        FormulaId::ScaleRatio if value < 1.0 => percent(value),
        FormulaId::ScaleRatio => multiple(value),
        FormulaId::StockFlowRatio | FormulaId::NewToDisplaced => fixed(value, p.ratio),
        FormulaId::Hhi | FormulaId::HhiReportedPercent => fixed(value, p.hhi),
        FormulaId::CfIndex => fixed(value, p.index),
        FormulaId::AbsoluteChange | FormulaId::PercentagePointChange | FormulaId::NetLabourChange => {
            format!("{}{}", fixed(value, p.ratio), unit.display_suffix())
        }
    }
}

fn presentation(d: &DerivedIndicator, p: &Precision) -> String {
    present(d.formula, d.quantity, d.unit.kind, p)
}

pub fn render_indicators(b: &ReportBundle) -> String {
    let mut out = header(&[
        "id", "formula", "inputs", "period", "value", "unit", "reported", "declared", "match",
        "boundary", "evidence_status",
    ]);
    for d in &b.derived {
        let record = b.audit.get(&d.id);
        row(
            &mut out,
            &[
                d.id.clone(),
                d.formula.keyword().to_string(),
                d.inputs.join(","),
                d.period.to_string(),
                format!("{:?}", d.quantity),
                d.unit.kind.token().to_string(),
                presentation(d, &b.precision),
                d.declared.as_ref().map(|p| p.text.clone()).unwrap_or_default(),
                record.map_or("missing".into(), |r| r.matched.to_string()),
                d.boundary.token().to_string(),
                d.evidence_status.token().to_string(),
            ],
        );
    }
    out
}

pub fn render_concentration(b: &ReportBundle) -> String {
    let mut out = header(&[
        "id", "formula", "scope", "members", "value", "reported", "scale_0_100", "scope_statement",
    ]);
    for d in b.derived.iter().filter(|d| d.formula.is_concentration()) {
        let scope = d.params.scope;
        let members = match d.formula {
            FormulaId::Share => d.inputs.len() - 1,
            _ => d.inputs.len(),
        };
        let scaled = match d.formula {
            FormulaId::Share => String::new(),
            _ => fixed(d.quantity * 100.0, b.precision.ratio),
        };
        row(
            &mut out,
            &[
                d.id.clone(),
                d.formula.keyword().to_string(),
                scope.map(|s| s.token().to_string()).unwrap_or_default(),
                members.to_string(),
                format!("{:?}", d.quantity),
                presentation(d, &b.precision),
                scaled,
                scope.map(|s| s.boundary_statement().to_string()).unwrap_or_default(),
            ],
        );
    }
    out
}

pub fn render_hypotheses(b: &ReportBundle) -> String {
    let mut out = header(&[
        "id", "kind", "verdict", "required", "evidence_classes", "projection_items",
        "boundary_statement", "reasons", "evidence_status", "claim",
    ]);
    for h in &b.hypotheses {
        row(
            &mut out,
            &[
                h.id.clone(),
                format!("{:?}", h.kind).to_lowercase(),
                h.verdict.token().to_string(),
                h.required_indicator_ids.join(","),
                h.evidence_classes_present
                    .iter()
                    .map(|s| s.token())
                    .collect::<Vec<_>>()
                    .join(","),
                h.projection_items.join(","),
                h.boundary_statement.clone(),
                h.reasons.join("; "),
                h.evidence_status.token().to_string(),
                h.claim.clone(),
            ],
        );
    }
    out
}

pub fn render_mapping(b: &ReportBundle) -> String {
    let mut out = header(&[
        "section", "indicator_id", "origin", "targets", "rules", "multi_rule",
        "boundary_statement", "evidence_status", "concept",
    ]);
    let origin = |o: crate::framework::IndicatorOrigin| format!("{o:?}").to_lowercase();
    for section in ["mapped", "future_measurement"] {
        for e in b
            .mapping
            .iter()
            .filter(|e| e.future_measurement == (section == "future_measurement"))
        {
            row(
                &mut out,
                &[
                    section.to_string(),
                    e.indicator_id.clone(),
                    origin(e.origin),
                    e.targets.iter().map(|t| t.symbol()).collect::<Vec<_>>().join(","),
                    e.rules.join(","),
                    e.multi_rule.to_string(),
                    e.boundary_statement.clone(),
                    e.evidence_status.token().to_string(),
                    e.concept.clone(),
                ],
            );
        }
    }
    for u in &b.unmapped {
        row(
            &mut out,
            &[
                "unmapped".into(),
                u.indicator_id.clone(),
                origin(u.origin),
                String::new(),
                String::new(),
                "false".into(),
                String::new(),
                String::new(),
                u.concept.clone(),
            ],
        );
    }
    for v in &b.unmeasured {
        row(
            &mut out,
            &[
                "unmeasured".into(),
                String::new(),
                String::new(),
                v.variable.symbol().to_string(),
                String::new(),
                "false".into(),
                v.note.clone(),
                "interpretation".into(),
                v.variable.description().to_string(),
            ],
        );
    }
    out
}

pub fn render_vetting(b: &ReportBundle) -> String {
    let mut out = header(&["id", "outcome", "step", "reason"]);
    for v in b.sources.iter() {
        row(&mut out, &[v.id.clone(), "accepted".into(), String::new(), String::new()]);
    }
    for r in &b.rejected {
        row(&mut out, &[r.id.clone(), "rejected".into(), r.step.to_string(), r.reason.clone()]);
    }
    for d in &b.blocked {
        row(
            &mut out,
            &[
                d.id.clone(),
                "blocked".into(),
                String::new(),
                format!("uses rejected input {}", d.rejected_inputs.join(",")),
            ],
        );
    }
    out
}

pub fn render_cfindex(b: &ReportBundle) -> Option<String> {
    let cf = b.cfindex.as_ref()?;
    let mut cols = vec!["id", "sector", "period"];
    cols.extend(ComponentKind::ALL.iter().map(|k| k.token()));
    cols.extend(["index", "boundary", "provenance", "normalization"]);
    let mut out = header(&cols);
    for r in &cf.rows {
        let mut cells = vec![r.indicator.id.clone(), r.sector.clone(), r.period.to_string()];
        cells.extend(
            ComponentKind::ALL
                .iter()
                .map(|k| fixed(r.components[k], b.precision.index)),
        );
        cells.push(fixed(r.indicator.quantity, b.precision.index));
        cells.push(r.indicator.boundary.token().to_string());
        cells.push(cf.provenance.clone());
        cells.push(cf.normalization.token().to_string());
        row(&mut out, &cells);
    }
    Some(out)
}

pub fn render_cfindex_validation(b: &ReportBundle) -> Option<String> {
    let cf = b.cfindex.as_ref()?;
    let mut out = header(&["sector", "points", "rank_correlation", "note"]);
    for v in &cf.validations {
        let (rho, mut notes) = match &v.rank_correlation {
            Ok(r) => (fixed(*r, b.precision.index), Vec::new()),
            Err(e) => (String::new(), vec![e.clone()]),
        };
        notes.extend(
            cf.warnings
                .iter()
                .filter(|(s, _)| *s == v.sector)
                .map(|(_, w)| w.clone()),
        );
        row(&mut out, &[v.sector.clone(), v.points.to_string(), rho, notes.join("; ")]);
    }
    Some(out)
}

/// Every report file name and body, in a fixed order.
pub fn render_all(b: &ReportBundle) -> Result<Vec<(&'static str, String)>, crate::error::LedgerError> {
    let mut files = vec![
        (INDICATORS, render_indicators(b)),
        (CONCENTRATION, render_concentration(b)),
        (HYPOTHESES, render_hypotheses(b)),
        (MAPPING, render_mapping(b)),
        (VETTING, render_vetting(b)),
        (AUDIT_LOG, b.audit.to_jsonl()?),
    ];
    if let Some(t) = render_cfindex(b) {
        files.push((CFINDEX, t));
    }
    if let Some(t) = render_cfindex_validation(b) {
        files.push((CFINDEX_VALIDATION, t));
    }
    Ok(files)
}

pub fn emit_reports(b: &ReportBundle, dir: &Path) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    let files = render_all(b).map_err(std::io::Error::other)?;
    for (name, body) in files {
        fs::write(dir.join(name), body)?;
    }
    Ok(())
}

/// Human-readable lineage of one result, read from an audit log.
pub fn explain(log: &crate::ledger::AuditLog, id: &str, p: &Precision) -> Option<String> {
    let r = log.get(id)?;
    let mut s = String::new();
    let _ = writeln!(s, "{} = {}", r.result_id, r.formula_id.keyword());
    let _ = writeln!(s, "  formula: {}", r.formula_id.expression());
    let unit = match r.formula_id {
        FormulaId::PercentagePointChange => UnitKind::PercentagePoint,
        _ => r.inputs.first().map_or(UnitKind::Dimensionless, |i| i.unit),
    };
    let _ = writeln!(s, "  value: {:?} ({})", r.recomputed, present(r.formula_id, r.recomputed, unit, p));
    if let Some(t) = &r.declared_text {
        let _ = writeln!(s, "  declared: {t} (tolerance {:?}), match: {}", r.tolerance, r.matched);
    } else {
        let _ = writeln!(s, "  declared: none, match: {}", r.matched);
    }
    let _ = writeln!(s, "  boundary: {}", r.boundary);
    let params = serde_json::to_string(&r.params).unwrap_or_default();
    if params != "{}" {
        let _ = writeln!(s, "  params: {params}");
    }
    let _ = writeln!(s, "  inputs:");
    for i in &r.inputs {
        let _ = writeln!(
            s,
            "    {} = {:?} {} [{}] {} ({})",
            i.id, i.value, i.unit, i.period, i.status, i.source
        );
    }
    if let Some(orig) = &r.supersedes {
        let _ = writeln!(s, "  supersedes: {orig}");
    }
    Some(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presentation_rules() {
        let p = Precision::default();
        assert_eq!(present(FormulaId::Cagr, 0.269_51, UnitKind::Percent, &p), "26.95%");
        assert_eq!(present(FormulaId::ScaleRatio, 0.134_363, UnitKind::CurrencyBillion, &p), "13.44%");
        assert_eq!(present(FormulaId::ScaleRatio, 11.731_18, UnitKind::CurrencyBillion, &p), "11.73x");
        assert_eq!(present(FormulaId::DemandMultiplier, 2.277_108, UnitKind::EnergyTwh, &p), "2.28x");
        assert_eq!(present(FormulaId::StockFlowRatio, 8.603_402, UnitKind::PhysicalUnits, &p), "8.60");
        assert_eq!(present(FormulaId::HhiReportedPercent, 0.5814, UnitKind::Dimensionless, &p), "0.5814");
        assert_eq!(present(FormulaId::PercentagePointChange, 12.3, UnitKind::PercentagePoint, &p), "12.30 pp");
        assert_eq!(present(FormulaId::NetLabourChange, 78.0, UnitKind::JobsMillion, &p), "78.00 million");
    }

    #[test]
    fn no_negative_zero() {
        assert_eq!(fixed(-0.0001, 2), "0.00");
        assert_eq!(fixed(-0.5, 2), "-0.50");
    }

    #[test]
    fn cells_are_sanitized() {
        let mut s = String::new();
        row(&mut s, &["a\tb".into(), "c\nd".into()]);
        assert_eq!(s, "a b\tc d\n");
    }
}
