//! Sector-level coordination-friction index.
//!
//! Seven friction components are normalized per sector series, weighted and
//! summed. No published index values exist, so the shipped series is
//! synthetic and labelled as such. Normalization is per series, not against
//! external reference ranges.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::CalcError;
use crate::formula::{CfParams, EvalInput, FormulaParams};
use crate::quantity::{Period, Quantity, Unit, UnitKind};

/// Weight sums must hit 1 within this.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ComponentKind {
    /// Latency.
    Lat,
    /// Dispute or failed-match rate.
    Disp,
    /// Model-error cost.
    Err,
    /// Protocol-failure pressure.
    Prot,
    /// Audit-gap intensity.
    Audgap,
    /// Energy or infrastructure bottleneck.
    Enb,
    /// Human-override burden.
    Ovr,
}

impl ComponentKind {
    pub const ALL: [ComponentKind; 7] = [
        ComponentKind::Lat,
        ComponentKind::Disp,
        ComponentKind::Err,
        ComponentKind::Prot,
        ComponentKind::Audgap,
        ComponentKind::Enb,
        ComponentKind::Ovr,
    ];

    pub fn token(self) -> &'static str {
        match self {
            ComponentKind::Lat => "LAT",
            ComponentKind::Disp => "DISP",
            ComponentKind::Err => "ERR",
            ComponentKind::Prot => "PROT",
            ComponentKind::Audgap => "AUDGAP",
            ComponentKind::Enb => "ENB",
            ComponentKind::Ovr => "OVR",
        }
    }
}

impl fmt::Display for ComponentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for ComponentKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let upper = s.trim().to_ascii_uppercase();
        ComponentKind::ALL
            .into_iter()
            .find(|k| k.token() == upper)
            .ok_or_else(|| format!("unknown friction component `{s}`"))
    }
}

/// The wider coordination-cost taxonomy. Documentation only; just the seven
/// [`ComponentKind`]s are computable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CostCategory {
    Search,
    Bargain,
    Contract,
    Monitor,
    Latency,
    Model,
    Protocol,
    Energy,
    Audit,
    Override,
}

/// A proposed trust/sovereignty indicator that would extend a component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComponentTemplate {
    pub name: &'static str,
    pub extends: ComponentKind,
    pub definition: &'static str,
}

/// Candidate sector-level indicators for override burden and audit gaps.
/// Not computed; listed so sector datasets can adopt consistent names.
pub const SOVEREIGNTY_TEMPLATES: &[ComponentTemplate] = &[
    ComponentTemplate {
        name: "human_review_share",
        extends: ComponentKind::Ovr,
        definition: "share of AI-assisted decisions reviewed by a person",
    },
    ComponentTemplate {
        name: "override_frequency",
        extends: ComponentKind::Ovr,
        definition: "human overrides per 1,000 automated decisions",
    },
    ComponentTemplate {
        name: "decision_reversal_rate",
        extends: ComponentKind::Ovr,
        definition: "automated decisions later reversed, as a share of all decisions",
    },
    ComponentTemplate {
        name: "audit_log_completeness",
        extends: ComponentKind::Audgap,
        definition: "1 minus the share of decisions with a complete audit log",
    },
    ComponentTemplate {
        name: "contestability",
        extends: ComponentKind::Audgap,
        definition: "absence of an appeal or contestability mechanism (0/1)",
    },
    ComponentTemplate {
        name: "model_documentation_gap",
        extends: ComponentKind::Audgap,
        definition: "share of deployed models without documentation",
    },
    ComponentTemplate {
        name: "protocol_failure_incidents",
        extends: ComponentKind::Prot,
        definition: "protocol failure incidents per period",
    },
    ComponentTemplate {
        name: "api_failure_rate",
        extends: ComponentKind::Prot,
        definition: "API downtime or failed-call rate",
    },
    ComponentTemplate {
        name: "liability_clarity_gap",
        extends: ComponentKind::Audgap,
        definition: "absence of a clear liability allocation (0/1)",
    },
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrictionComponent {
    pub kind: ComponentKind,
    pub raw_value: f64,
    pub unit: Unit,
    pub period: Period,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightScheme {
    Equal,
    Expert,
    /// Externally estimated weights; the engine does not estimate them.
    Empirical,
}

impl WeightScheme {
    pub fn token(self) -> &'static str {
        match self {
            WeightScheme::Equal => "equal",
            WeightScheme::Expert => "expert",
            WeightScheme::Empirical => "empirical",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CfWeights {
    pub scheme: WeightScheme,
    weights: BTreeMap<ComponentKind, f64>,
}

impl CfWeights {
    pub fn equal() -> Self {
        Self {
            scheme: WeightScheme::Equal,
            weights: ComponentKind::ALL
                .into_iter()
                .map(|k| (k, 1.0 / 7.0))
                .collect(),
        }
    }

    pub fn new(
        scheme: WeightScheme,
        weights: BTreeMap<ComponentKind, f64>,
    ) -> Result<Self, CalcError> {
        for kind in ComponentKind::ALL {
            match weights.get(&kind) {
                None => return Err(CalcError::Weight(format!("no weight for {kind}"))),
                Some(w) if !w.is_finite() || *w < 0.0 => {
                    return Err(CalcError::Weight(format!("weight for {kind} is {w}")))
                }
                _ => {}
            }
        }
        let sum: f64 = weights.values().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(CalcError::Weight(format!("weights sum to {sum}, not 1")));
        }
        Ok(Self { scheme, weights })
    }

    pub fn get(&self, kind: ComponentKind) -> f64 {
        self.weights[&kind]
    }

    pub fn iter(&self) -> impl Iterator<Item = (ComponentKind, f64)> + '_ {
        self.weights.iter().map(|(k, w)| (*k, *w))
    }
}

/// One period of a sector: every component present.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub period: Period,
    pub components: BTreeMap<ComponentKind, FrictionComponent>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectorSeries {
    pub sector: String,
    pub observations: Vec<Observation>,
    /// Aligned with `observations` when present.
    pub outcomes: Option<Vec<(Period, f64)>>,
}

impl SectorSeries {
    pub fn validate(&self) -> Result<(), CalcError> {
        for obs in &self.observations {
            for kind in ComponentKind::ALL {
                match obs.components.get(&kind) {
                    None => {
                        return Err(CalcError::IncompleteObservation(format!(
                            "{} {}: missing {kind}",
                            self.sector, obs.period
                        )))
                    }
                    Some(c) if !c.raw_value.is_finite() || c.raw_value < 0.0 => {
                        return Err(CalcError::Domain(format!(
                            "{} {}: {kind} is {}",
                            self.sector, obs.period, c.raw_value
                        )))
                    }
                    _ => {}
                }
            }
        }
        if self
            .observations
            .windows(2)
            .any(|w| w[0].period >= w[1].period)
        {
            return Err(CalcError::Period(format!(
                "{}: periods are not strictly increasing",
                self.sector
            )));
        }
        if let Some(outcomes) = &self.outcomes {
            if outcomes.len() != self.observations.len() {
                return Err(CalcError::Alignment(format!(
                    "{}: {} outcomes for {} observations",
                    self.sector,
                    outcomes.len(),
                    self.observations.len()
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    MinMax,
    ZScore,
}

impl Normalization {
    pub fn token(self) -> &'static str {
        match self {
            Normalization::MinMax => "minmax",
            Normalization::ZScore => "zscore",
        }
    }
}

impl FromStr for Normalization {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "minmax" | "min_max" => Ok(Normalization::MinMax),
            "zscore" | "z_score" => Ok(Normalization::ZScore),
            other => Err(format!("unknown normalization `{other}`")),
        }
    }
}

pub type ComponentValues = BTreeMap<ComponentKind, f64>;

#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedSeries {
    pub sector: String,
    pub normalization: Normalization,
    pub rows: Vec<(Period, ComponentValues)>,
    pub warnings: Vec<String>,
}

fn normalize_column(
    values: &[f64],
    scheme: Normalization,
    label: &str,
    warnings: &mut Vec<String>,
) -> Result<Vec<f64>, CalcError> {
    match scheme {
        Normalization::MinMax => {
            if values.len() < 2 {
                return Err(CalcError::Domain(format!(
                    "{label}: min-max normalization needs at least two observations"
                )));
            }
            let min = values.iter().copied().fold(f64::INFINITY, f64::min);
            let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if max == min {
                warnings.push(format!("{label}: constant over the series; mapped to 0"));
                return Ok(vec![0.0; values.len()]);
            }
            Ok(values.iter().map(|v| (v - min) / (max - min)).collect())
        }
        Normalization::ZScore => {
            let n = values.len() as f64;
            let mean = values.iter().sum::<f64>() / n;
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
            if values.len() < 2 || var == 0.0 {
                return Err(CalcError::DegenerateVariance(format!(
                    "{label}: zero variance"
                )));
            }
            let sd = var.sqrt();
            Ok(values.iter().map(|v| (v - mean) / sd).collect())
        }
    }
}

/// Maps each component onto a common scale over the series.
pub fn normalize(series: &SectorSeries, scheme: Normalization) -> Result<NormalizedSeries, CalcError> {
    series.validate()?;
    let mut warnings = Vec::new();
    let mut rows: Vec<(Period, ComponentValues)> = series
        .observations
        .iter()
        .map(|o| (o.period, ComponentValues::new()))
        .collect();
    for kind in ComponentKind::ALL {
        let column: Vec<f64> = series
            .observations
            .iter()
            .map(|o| o.components[&kind].raw_value)
            .collect();
        let label = format!("{} {kind}", series.sector);
        let scaled = normalize_column(&column, scheme, &label, &mut warnings)?;
        for (row, v) in rows.iter_mut().zip(scaled) {
            row.1.insert(kind, v);
        }
    }
    Ok(NormalizedSeries {
        sector: series.sector.clone(),
        normalization: scheme,
        rows,
        warnings,
    })
}

/// Weighted sum of the seven normalized components, matched by kind.
pub fn cf_index(components: &ComponentValues, weights: &CfWeights) -> Result<f64, CalcError> {
    let mut total = 0.0;
    for kind in ComponentKind::ALL {
        let v = components.get(&kind).ok_or_else(|| {
            CalcError::IncompleteObservation(format!("missing component {kind}"))
        })?;
        total += weights.get(kind) * v;
    }
    Ok(total)
}

fn mid_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|a, b| values[*a].total_cmp(&values[*b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // positions i..=j share the average of ranks i+1..=j+1
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation (Pearson over mid-ranks). Sign is reported as is.
pub fn validate_against_outcomes(index: &[f64], outcomes: &[f64]) -> Result<f64, CalcError> {
    if index.len() != outcomes.len() {
        return Err(CalcError::Alignment(format!(
            "{} index values vs {} outcomes",
            index.len(),
            outcomes.len()
        )));
    }
    if index.len() < 3 {
        return Err(CalcError::Alignment(format!(
            "rank correlation needs at least 3 aligned points, got {}",
            index.len()
        )));
    }
    let rx = mid_ranks(index);
    let ry = mid_ranks(outcomes);
    let n = rx.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in rx.iter().zip(&ry) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx).powi(2);
        syy += (y - my).powi(2);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(CalcError::DegenerateVariance(
            "a series has all-tied ranks".into(),
        ));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Re-evaluates an index value from its audit snapshot. Input ids end in
/// `:<KIND>`; weights come from the recorded parameters.
pub(crate) fn evaluate_audited(
    inputs: &[EvalInput],
    params: &FormulaParams,
) -> Result<Quantity, CalcError> {
    let cf = params
        .cf
        .as_ref()
        .ok_or_else(|| CalcError::Weight("no recorded weights".into()))?;
    let scheme = match cf.scheme.as_str() {
        "equal" => WeightScheme::Equal,
        "expert" => WeightScheme::Expert,
        "empirical" => WeightScheme::Empirical,
        other => return Err(CalcError::Weight(format!("unknown scheme `{other}`"))),
    };
    let weights = cf
        .weights
        .iter()
        .map(|(k, w)| Ok((k.parse::<ComponentKind>().map_err(CalcError::Weight)?, *w)))
        .collect::<Result<BTreeMap<_, _>, CalcError>>()?;
    let weights = CfWeights::new(scheme, weights)?;
    let mut values = ComponentValues::new();
    for input in inputs {
        let kind = input
            .id
            .rsplit(':')
            .next()
            .unwrap_or_default()
            .parse::<ComponentKind>()
            .map_err(CalcError::IncompleteObservation)?;
        if values.insert(kind, input.quantity.value).is_some() {
            return Err(CalcError::IncompleteObservation(format!(
                "component {kind} given twice"
            )));
        }
    }
    Quantity::new(cf_index(&values, &weights)?, UnitKind::Dimensionless)
}

/// Parameters recorded with every index value.
pub fn audit_params(
    normalization: Normalization,
    weights: &CfWeights,
    provenance: &str,
) -> FormulaParams {
    FormulaParams {
        cf: Some(CfParams {
            normalization: normalization.token().to_string(),
            scheme: weights.scheme.token().to_string(),
            weights: weights
                .iter()
                .map(|(k, w)| (k.token().to_string(), w))
                .collect(),
            provenance: provenance.to_string(),
        }),
        ..FormulaParams::default()
    }
}
