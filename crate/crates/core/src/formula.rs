//! Formula identifiers and the single dispatch used both for computing
//! indicators and for re-deriving them during an audit.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::concentration::{self, Scope, ShareGroup, ShareMember};
use crate::error::CalcError;
use crate::evidence::EvidenceStatus;
use crate::metrics::{self, LabourProjection, RobotStockSnapshot};
use crate::quantity::{Period, Quantity, UnitKind};
use crate::transform;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormulaId {
    AbsoluteChange,
    PercentagePointChange,
    RelativeChange,
    Cagr,
    GrowthMultiplier,
    ScaleRatio,
    Share,
    Hhi,
    HhiReportedPercent,
    StockFlowRatio,
    InstallationShare,
    DemandMultiplier,
    NewToDisplaced,
    DisplacementRelativeToNew,
    NetLabourChange,
    NetGainRatio,
    CfIndex,
}

/// How many positional inputs a formula accepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arity {
    Exactly(usize),
    AtLeast(usize),
}

impl FormulaId {
    pub const ALL: [FormulaId; 17] = [
        FormulaId::AbsoluteChange,
        FormulaId::PercentagePointChange,
        FormulaId::RelativeChange,
        FormulaId::Cagr,
        FormulaId::GrowthMultiplier,
        FormulaId::ScaleRatio,
        FormulaId::Share,
        FormulaId::Hhi,
        FormulaId::HhiReportedPercent,
        FormulaId::StockFlowRatio,
        FormulaId::InstallationShare,
        FormulaId::DemandMultiplier,
        FormulaId::NewToDisplaced,
        FormulaId::DisplacementRelativeToNew,
        FormulaId::NetLabourChange,
        FormulaId::NetGainRatio,
        FormulaId::CfIndex,
    ];

    /// Name used in the definition grammar.
    pub fn keyword(self) -> &'static str {
        match self {
            FormulaId::AbsoluteChange => "ABS",
            FormulaId::PercentagePointChange => "PP",
            FormulaId::RelativeChange => "REL",
            FormulaId::Cagr => "CAGR",
            FormulaId::GrowthMultiplier => "GM",
            FormulaId::ScaleRatio => "SCALE",
            FormulaId::Share => "SHARE",
            FormulaId::Hhi => "HHI",
            FormulaId::HhiReportedPercent => "HHI_PCT",
            FormulaId::StockFlowRatio => "SFR",
            FormulaId::InstallationShare => "AIS",
            FormulaId::DemandMultiplier => "DCM",
            FormulaId::NewToDisplaced => "NDR",
            FormulaId::DisplacementRelativeToNew => "DRN",
            FormulaId::NetLabourChange => "NLMC",
            FormulaId::NetGainRatio => "NGR",
            FormulaId::CfIndex => "CFINDEX",
        }
    }

    pub fn expression(self) -> &'static str {
        match self {
            FormulaId::AbsoluteChange => "Xt - X0",
            FormulaId::PercentagePointChange => "Xt - X0 (percentage points)",
            FormulaId::RelativeChange => "(Xt - X0) / X0",
            FormulaId::Cagr => "(Xt / X0)^(1/n) - 1",
            FormulaId::GrowthMultiplier => "Xt / X0",
            FormulaId::ScaleRatio => "Xi / Xref",
            FormulaId::Share => "Xi / sum(X)",
            FormulaId::Hhi => "sum(s_i^2), s_i = Xi / sum(X)",
            FormulaId::HhiReportedPercent => "sum((p_i / 100)^2)",
            FormulaId::StockFlowRatio => "operational stock / annual installations",
            FormulaId::InstallationShare => "annual installations / operational stock",
            FormulaId::DemandMultiplier => "demand_t / demand_0",
            FormulaId::NewToDisplaced => "new roles / displaced roles",
            FormulaId::DisplacementRelativeToNew => "displaced roles / new roles",
            FormulaId::NetLabourChange => "new roles - displaced roles",
            FormulaId::NetGainRatio => "(new roles - displaced roles) / new roles",
            FormulaId::CfIndex => "sum(w_k * component_k) over seven normalized components",
        }
    }

    pub fn arity(self) -> Arity {
        match self {
            FormulaId::Share => Arity::AtLeast(2),
            FormulaId::Hhi | FormulaId::HhiReportedPercent => Arity::AtLeast(1),
            FormulaId::CfIndex => Arity::Exactly(7),
            _ => Arity::Exactly(2),
        }
    }

    pub fn takes_years(self) -> bool {
        self == FormulaId::Cagr
    }

    pub fn is_concentration(self) -> bool {
        matches!(
            self,
            FormulaId::Share | FormulaId::Hhi | FormulaId::HhiReportedPercent
        )
    }

    /// Two-point formulas comparing an earlier and a later value of one concept.
    pub fn is_two_point_change(self) -> bool {
        matches!(
            self,
            FormulaId::AbsoluteChange
                | FormulaId::PercentagePointChange
                | FormulaId::RelativeChange
                | FormulaId::Cagr
                | FormulaId::GrowthMultiplier
                | FormulaId::DemandMultiplier
        )
    }

    /// Results that are scale comparisons whatever their inputs.
    pub fn is_scale_comparison(self) -> bool {
        matches!(self, FormulaId::ScaleRatio | FormulaId::InstallationShare)
    }
}

impl fmt::Display for FormulaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

impl FromStr for FormulaId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FormulaId::ALL
            .into_iter()
            .find(|f| f.keyword() == s)
            .ok_or_else(|| format!("unknown formula `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum YearsOrigin {
    /// Given in the definition.
    Explicit,
    /// Derived from the input periods.
    Period,
}

/// Weighting and normalization choices recorded with every index value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CfParams {
    pub normalization: String,
    pub scheme: String,
    pub weights: Vec<(String, f64)>,
    pub provenance: String,
}

/// Everything besides the input values that a formula needs.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FormulaParams {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub years: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub years_origin: Option<YearsOrigin>,
    /// Explicit years that disagree with the period span.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub period_years: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub scope: Option<Scope>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub residual_allowed: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cf: Option<CfParams>,
}

/// One input as seen by a formula.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalInput {
    pub id: String,
    pub quantity: Quantity,
    pub status: EvidenceStatus,
    pub period: Period,
}

fn check_arity(formula: FormulaId, n: usize) -> Result<(), CalcError> {
    let ok = match formula.arity() {
        Arity::Exactly(k) => n == k,
        Arity::AtLeast(k) => n >= k,
    };
    if ok {
        Ok(())
    } else {
        Err(CalcError::Arity(format!(
            "{formula} got {n} inputs, expects {:?}",
            formula.arity()
        )))
    }
}

fn require_unit(inputs: &[EvalInput], unit: UnitKind, formula: FormulaId) -> Result<(), CalcError> {
    match inputs.iter().find(|i| i.quantity.unit != unit) {
        Some(bad) => Err(CalcError::Unit(format!(
            "{formula} needs {unit} inputs; `{}` is {}",
            bad.id, bad.quantity.unit
        ))),
        None => Ok(()),
    }
}

fn labour(inputs: &[EvalInput]) -> Result<LabourProjection, CalcError> {
    let (new, displaced) = (&inputs[0], &inputs[1]);
    let status = if new.status == displaced.status {
        new.status
    } else {
        EvidenceStatus::Reported
    };
    LabourProjection::new(
        new.quantity.value,
        displaced.quantity.value,
        new.period.cover(&displaced.period),
        status,
    )
}

fn robots(inputs: &[EvalInput]) -> Result<RobotStockSnapshot, CalcError> {
    let (stock, flow) = (&inputs[0], &inputs[1]);
    RobotStockSnapshot::new(
        stock.quantity.value,
        flow.quantity.value,
        stock.period.cover(&flow.period),
    )
}

fn share_group(inputs: &[EvalInput], scope: Scope) -> ShareGroup {
    ShareGroup::new(
        "definition group",
        scope,
        inputs
            .iter()
            .map(|i| ShareMember::new(i.id.clone(), i.quantity.value))
            .collect(),
    )
}

fn scope_of(formula: FormulaId, params: &FormulaParams) -> Result<Scope, CalcError> {
    params.scope.ok_or_else(|| {
        CalcError::MalformedShares(format!("{formula} requires a declared denominator scope"))
    })
}

/// Evaluates `formula` over `inputs` in positional order.
///
/// Input conventions: two-point changes take (start, end); SCALE takes
/// (value, reference); SHARE takes (member, group...); SFR and AIS take
/// (stock, installations); labour formulas take (new, displaced).
pub fn evaluate(
    formula: FormulaId,
    inputs: &[EvalInput],
    params: &FormulaParams,
) -> Result<Quantity, CalcError> {
    check_arity(formula, inputs.len())?;
    let q = |i: usize| &inputs[i].quantity;
    match formula {
        FormulaId::AbsoluteChange => transform::absolute_change(q(0), q(1)),
        FormulaId::PercentagePointChange => transform::percentage_point_change(q(0), q(1)),
        FormulaId::RelativeChange => transform::relative_change(q(0), q(1)),
        FormulaId::Cagr => {
            let years = params.years.ok_or_else(|| {
                CalcError::Period("CAGR evaluated without a resolved year count".into())
            })?;
            transform::cagr(q(0), q(1), years)
        }
        FormulaId::GrowthMultiplier => transform::growth_multiplier(q(0), q(1)),
        FormulaId::ScaleRatio => transform::scale_ratio(q(0), q(1)),
        FormulaId::Share => {
            let scope = scope_of(formula, params)?;
            let member = &inputs[0].id;
            let group = &inputs[1..];
            let Some(in_group) = group.iter().find(|g| &g.id == member) else {
                return Err(CalcError::MalformedShares(format!(
                    "share member `{member}` is not part of its group"
                )));
            };
            if in_group.quantity.value.to_bits() != inputs[0].quantity.value.to_bits() {
                return Err(CalcError::MalformedShares(format!(
                    "share member `{member}` has two different values"
                )));
            }
            let unit = group[0].quantity.unit;
            require_unit(group, unit, formula)?;
            let v = concentration::shares(&share_group(group, scope))?;
            Quantity::new(v.share_of(member).expect("member present"), UnitKind::Ratio)
        }
        FormulaId::Hhi => {
            let scope = scope_of(formula, params)?;
            require_unit(inputs, inputs[0].quantity.unit, formula)?;
            let v = concentration::shares(&share_group(inputs, scope))?;
            Quantity::new(concentration::hhi(&v)?.value, UnitKind::Dimensionless)
        }
        FormulaId::HhiReportedPercent => {
            let scope = scope_of(formula, params)?;
            require_unit(inputs, UnitKind::Percent, formula)?;
            let percents: Vec<f64> = inputs.iter().map(|i| i.quantity.value).collect();
            let c = concentration::hhi_from_reported_percentages(
                &percents,
                params.residual_allowed.unwrap_or(false),
                scope,
            )?;
            Quantity::new(c.value, UnitKind::Dimensionless)
        }
        FormulaId::StockFlowRatio => {
            require_unit(inputs, UnitKind::PhysicalUnits, formula)?;
            metrics::stock_flow_ratio(&robots(inputs)?)
        }
        FormulaId::InstallationShare => {
            require_unit(inputs, UnitKind::PhysicalUnits, formula)?;
            metrics::installation_share_of_stock(&robots(inputs)?)
        }
        FormulaId::DemandMultiplier => metrics::demand_multiplier(q(0), q(1)),
        FormulaId::NewToDisplaced => {
            require_unit(inputs, UnitKind::JobsMillion, formula)?;
            metrics::new_to_displaced_ratio(&labour(inputs)?)
        }
        FormulaId::DisplacementRelativeToNew => {
            require_unit(inputs, UnitKind::JobsMillion, formula)?;
            metrics::displacement_relative_to_new(&labour(inputs)?)
        }
        FormulaId::NetLabourChange => {
            require_unit(inputs, UnitKind::JobsMillion, formula)?;
            metrics::net_labour_change(&labour(inputs)?)
        }
        FormulaId::NetGainRatio => {
            require_unit(inputs, UnitKind::JobsMillion, formula)?;
            metrics::net_gain_ratio(&labour(inputs)?)
        }
        FormulaId::CfIndex => crate::cfindex::evaluate_audited(inputs, params),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn input(id: &str, v: f64, unit: UnitKind, status: EvidenceStatus) -> EvalInput {
        EvalInput {
            id: id.into(),
            quantity: Quantity::new(v, unit).unwrap(),
            status,
            period: Period::year(2024),
        }
    }

    #[test]
    fn keywords_round_trip() {
        for f in FormulaId::ALL {
            assert_eq!(f.keyword().parse::<FormulaId>().unwrap(), f);
        }
        assert!("CAGR2".parse::<FormulaId>().is_err());
    }

    #[test]
    fn arity_is_enforced() {
        let a = input("a", 1.0, UnitKind::Ratio, EvidenceStatus::Reported);
        let err = evaluate(FormulaId::GrowthMultiplier, &[a], &FormulaParams::default());
        assert!(matches!(err, Err(CalcError::Arity(_))));
    }

    #[test]
    fn cagr_needs_resolved_years() {
        let a = input("a", 7.7, UnitKind::Percent, EvidenceStatus::Reported);
        let b = input("b", 20.0, UnitKind::Percent, EvidenceStatus::Reported);
        assert!(evaluate(FormulaId::Cagr, &[a.clone(), b.clone()], &FormulaParams::default()).is_err());
        let params = FormulaParams {
            years: Some(4),
            ..Default::default()
        };
        let r = evaluate(FormulaId::Cagr, &[a, b], &params).unwrap();
        assert!((r.value - 0.2695).abs() <= 5e-5);
    }

    #[test]
    fn share_requires_scope_and_membership() {
        let us = input("us", 109.1, UnitKind::CurrencyBillion, EvidenceStatus::Reported);
        let cn = input("cn", 9.3, UnitKind::CurrencyBillion, EvidenceStatus::Reported);
        let group = [us.clone(), us.clone(), cn.clone()];
        assert!(evaluate(FormulaId::Share, &group, &FormulaParams::default()).is_err());
        let params = FormulaParams {
            scope: Some(Scope::ReportedComparison),
            ..Default::default()
        };
        let s = evaluate(FormulaId::Share, &[us.clone(), us.clone(), cn.clone()], &params).unwrap();
        assert!((s.value - 109.1 / 118.4).abs() < 1e-15);
        let outsider = input("uk", 4.5, UnitKind::CurrencyBillion, EvidenceStatus::Reported);
        assert!(evaluate(FormulaId::Share, &[outsider, us.clone(), cn.clone()], &params).is_err());
        let altered = input("us", 110.0, UnitKind::CurrencyBillion, EvidenceStatus::Reported);
        assert!(evaluate(FormulaId::Share, &[altered, us, cn], &params).is_err());
    }

    #[test]
    fn labour_formulas_require_projections() {
        let new = input("new", 170.0, UnitKind::JobsMillion, EvidenceStatus::Reported);
        let disp = input("disp", 92.0, UnitKind::JobsMillion, EvidenceStatus::Projection);
        assert!(matches!(
            evaluate(FormulaId::NewToDisplaced, &[new, disp], &FormulaParams::default()),
            Err(CalcError::Evidence(_))
        ));
    }

    #[test]
    fn domain_formulas_check_units() {
        let a = input("a", 4.0, UnitKind::Ratio, EvidenceStatus::Reported);
        let b = input("b", 2.0, UnitKind::Ratio, EvidenceStatus::Reported);
        assert!(matches!(
            evaluate(FormulaId::StockFlowRatio, &[a, b], &FormulaParams::default()),
            Err(CalcError::Unit(_))
        ));
    }
}
