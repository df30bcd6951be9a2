//! Source values, indicator definitions and derived indicators.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::concentration::Scope;
use crate::error::CalcError;
use crate::evidence::{EvidenceStatus, InterpretationBoundary};
use crate::formula::{self, EvalInput, FormulaId, FormulaParams, YearsOrigin};
use crate::quantity::{Period, Quantity, Unit, UnitKind};

pub const AUTHOR_CALCULATED: &str = "author-calculated";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceFlags {
    /// Percent value legitimately above 100.
    pub over100: bool,
    /// Residual "other/rounding" category of a share group.
    pub residual: bool,
}

/// A statistic as reported by an institutional source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceValue {
    pub id: String,
    pub concept: String,
    pub quantity: f64,
    pub unit: Unit,
    pub period: Period,
    pub source_family: String,
    pub evidence_status: EvidenceStatus,
    pub notes: String,
    pub domain: Option<String>,
    pub flags: SourceFlags,
}

impl SourceValue {
    /// Checks the ingestion invariants.
    pub fn validate(&self) -> Result<(), CalcError> {
        if !self.quantity.is_finite() {
            return Err(CalcError::Domain(format!(
                "`{}` has a non-finite quantity",
                self.id
            )));
        }
        if !self.evidence_status.is_ingestible() {
            return Err(CalcError::Evidence(format!(
                "`{}`: status {} cannot be assigned at ingestion",
                self.id, self.evidence_status
            )));
        }
        if self.unit.kind == UnitKind::Percent
            && !self.flags.over100
            && !(0.0..=100.0).contains(&self.quantity)
        {
            return Err(CalcError::Domain(format!(
                "`{}`: percent value {} outside [0, 100] without an over-100 flag",
                self.id, self.quantity
            )));
        }
        Ok(())
    }

    pub fn as_quantity(&self) -> Quantity {
        Quantity {
            value: self.quantity,
            unit: self.unit.kind,
        }
    }

    pub fn eval_input(&self) -> EvalInput {
        EvalInput {
            id: self.id.clone(),
            quantity: self.as_quantity(),
            status: self.evidence_status,
            period: self.period,
        }
    }
}

/// Accepted source values by id, in id order.
#[derive(Debug, Clone, Default)]
pub struct SourceRegistry {
    values: BTreeMap<String, SourceValue>,
}

impl SourceRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the previous value when the id was already present.
    pub fn insert(&mut self, value: SourceValue) -> Option<SourceValue> {
        self.values.insert(value.id.clone(), value)
    }

    pub fn get(&self, id: &str) -> Option<&SourceValue> {
        self.values.get(id)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.values.contains_key(id)
    }

    pub fn iter(&self) -> impl Iterator<Item = &SourceValue> {
        self.values.values()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl FromIterator<SourceValue> for SourceRegistry {
    fn from_iter<T: IntoIterator<Item = SourceValue>>(iter: T) -> Self {
        let mut r = SourceRegistry::new();
        for v in iter {
            r.insert(v);
        }
        r
    }
}

/// Presentation of a published value a derived indicator is checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeclaredStyle {
    Plain,
    Percent,
    Multiple,
    PercentagePoint,
}

/// A rounded published output, e.g. `26.95%`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Declared {
    pub text: String,
    pub value: f64,
    pub tolerance: f64,
    pub style: DeclaredStyle,
}

impl Declared {
    /// Parses `12.3`, `26.95%`, `11.73x` or `6.5pp`. The tolerance is half a
    /// unit in the last written digit, in the value's own scale.
    pub fn parse(text: &str) -> Result<Self, String> {
        let t = text.trim();
        let (number, style) = if let Some(n) = t.strip_suffix('%') {
            (n, DeclaredStyle::Percent)
        } else if let Some(n) = t.strip_suffix("pp") {
            (n, DeclaredStyle::PercentagePoint)
        } else if let Some(n) = t.strip_suffix('x') {
            (n, DeclaredStyle::Multiple)
        } else {
            (t, DeclaredStyle::Plain)
        };
        let number = number.trim();
        if number.is_empty()
            || !number
                .chars()
                .all(|c| c.is_ascii_digit() || c == '.' || c == '-')
        {
            return Err(format!("`{text}` is not a published number"));
        }
        let raw: f64 = number
            .parse()
            .map_err(|_| format!("`{text}` is not a published number"))?;
        let decimals = number.split_once('.').map_or(0, |(_, frac)| frac.len()) as i32;
        let half_unit = 0.5 * 10f64.powi(-decimals);
        let (value, tolerance) = match style {
            DeclaredStyle::Percent => (raw / 100.0, half_unit / 100.0),
            _ => (raw, half_unit),
        };
        Ok(Self {
            text: t.to_string(),
            value,
            tolerance,
            style,
        })
    }

    pub fn accepts(&self, value: f64) -> bool {
        within(value, self.value, self.tolerance)
    }
}

/// `|a - b| <= tol`, with a relative allowance of 1e-9 on the tolerance so a
/// value sitting on a rounding edge is not rejected by representation error.
pub fn within(a: f64, b: f64, tol: f64) -> bool {
    if tol == 0.0 {
        return a.to_bits() == b.to_bits() || a == b;
    }
    (a - b).abs() <= tol * (1.0 + 1e-9)
}

/// One line of the definition file.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorDef {
    pub id: String,
    pub formula: FormulaId,
    pub scope: Option<Scope>,
    pub inputs: Vec<String>,
    pub years: Option<u32>,
    pub declared: Option<Declared>,
    pub line: usize,
}

/// A value computed by the engine from source values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivedIndicator {
    pub id: String,
    pub formula: FormulaId,
    pub inputs: Vec<String>,
    pub params: FormulaParams,
    pub quantity: f64,
    pub unit: Unit,
    pub evidence_status: EvidenceStatus,
    pub boundary: InterpretationBoundary,
    pub concept: String,
    pub period: Period,
    pub declared: Option<Declared>,
}

impl DerivedIndicator {
    pub fn as_quantity(&self) -> Quantity {
        Quantity {
            value: self.quantity,
            unit: self.unit.kind,
        }
    }
}

/// Boundary of a result computed from inputs with the given statuses and concepts.
///
/// Any projection input taints the result; otherwise scale ratios, and
/// two-point changes across different concepts, are scale comparisons.
pub fn derive_boundary(
    formula: FormulaId,
    inputs: &[(EvidenceStatus, &str)],
) -> InterpretationBoundary {
    if inputs
        .iter()
        .any(|(s, _)| *s == EvidenceStatus::Projection)
    {
        return InterpretationBoundary::ProjectionBased;
    }
    if formula.is_scale_comparison() {
        return InterpretationBoundary::ScaleComparison;
    }
    if formula.is_two_point_change() {
        if let Some((_, first)) = inputs.first() {
            if inputs.iter().any(|(_, c)| c != first) {
                return InterpretationBoundary::ScaleComparison;
            }
        }
    }
    InterpretationBoundary::ObservedFact
}

fn joined_concepts(inputs: &[&SourceValue]) -> String {
    let mut seen: Vec<&str> = Vec::new();
    for v in inputs {
        if !seen.contains(&v.concept.as_str()) {
            seen.push(&v.concept);
        }
    }
    seen.join(" / ")
}

/// Evaluates one definition against accepted source values.
pub fn compute(def: &IndicatorDef, sources: &SourceRegistry) -> Result<DerivedIndicator, CalcError> {
    let inputs: Vec<&SourceValue> = def
        .inputs
        .iter()
        .map(|id| {
            sources
                .get(id)
                .ok_or_else(|| CalcError::Domain(format!("`{}` uses unknown input `{id}`", def.id)))
        })
        .collect::<Result<_, _>>()?;

    let mut params = FormulaParams::default();
    if def.formula.takes_years() && inputs.len() == 2 {
        let span = inputs[0].period.years_until(&inputs[1].period);
        match def.years {
            Some(n) => {
                params.years = Some(n);
                params.years_origin = Some(YearsOrigin::Explicit);
                if i64::from(n) != span {
                    params.period_years = Some(span);
                }
            }
            None => {
                if span < 1 {
                    return Err(CalcError::Period(format!(
                        "`{}`: input periods span {span} years; CAGR needs at least one",
                        def.id
                    )));
                }
                params.years = Some(span as u32);
                params.years_origin = Some(YearsOrigin::Period);
            }
        }
    }
    if def.formula.is_concentration() {
        params.scope = def.scope;
    }
    if def.formula == FormulaId::HhiReportedPercent {
        params.residual_allowed = Some(inputs.iter().any(|v| v.flags.residual));
    }

    let eval_inputs: Vec<EvalInput> = inputs.iter().map(|v| v.eval_input()).collect();
    let q = formula::evaluate(def.formula, &eval_inputs, &params)?;

    let tags: Vec<(EvidenceStatus, &str)> = inputs
        .iter()
        .map(|v| (v.evidence_status, v.concept.as_str()))
        .collect();
    let period = inputs
        .iter()
        .map(|v| v.period)
        .reduce(|a, b| a.cover(&b))
        .expect("formulas take at least one input");

    Ok(DerivedIndicator {
        id: def.id.clone(),
        formula: def.formula,
        inputs: def.inputs.clone(),
        params,
        quantity: q.value,
        unit: Unit::from(q.unit),
        evidence_status: EvidenceStatus::Calculated,
        boundary: derive_boundary(def.formula, &tags),
        concept: joined_concepts(&inputs),
        period,
        declared: def.declared.clone(),
    })
}
