//! Boundary-controlled shares and Herfindahl-Hirschman concentration.
//!
//! A group must declare its denominator scope before any share is computed,
//! and every HHI carries that scope forward. A comparison-group HHI is never
//! relabelled as a global one.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::CalcError;

/// Sum-of-shares tolerance for shares computed from raw values.
pub const EXACT_SHARE_TOLERANCE: f64 = 1e-9;
/// Sum-of-shares tolerance for pre-rounded percentages with a residual category.
pub const ROUNDED_SHARE_TOLERANCE: f64 = 0.01;

const SUM_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scope {
    Global,
    Regional,
    Sectoral,
    ReportedComparison,
}

impl Scope {
    pub fn token(self) -> &'static str {
        match self {
            Scope::Global => "global",
            Scope::Regional => "regional",
            Scope::Sectoral => "sectoral",
            Scope::ReportedComparison => "reported_comparison",
        }
    }

    pub fn boundary_statement(self) -> &'static str {
        match self {
            Scope::Global => "global denominator covering all reporting units",
            Scope::Regional => "regional denominator; interpret only across the listed regions",
            Scope::Sectoral => "sectoral denominator; interpret only within the stated sector",
            Scope::ReportedComparison => {
                "reported comparison group only; not a global concentration index"
            }
        }
    }
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Scope {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "global" => Ok(Scope::Global),
            "regional" => Ok(Scope::Regional),
            "sectoral" => Ok(Scope::Sectoral),
            "reported_comparison" | "reportedcomparison" => Ok(Scope::ReportedComparison),
            other => Err(format!("unknown concentration scope `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShareMember {
    pub id: String,
    pub value: f64,
}

impl ShareMember {
    pub fn new(id: impl Into<String>, value: f64) -> Self {
        Self {
            id: id.into(),
            value,
        }
    }
}

/// Units whose shares are taken over a declared denominator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShareGroup {
    pub label: String,
    pub scope: Scope,
    pub members: Vec<ShareMember>,
    /// "Other/rounding" category; summed like any other member.
    pub residual: Option<ShareMember>,
}

impl ShareGroup {
    pub fn new(label: impl Into<String>, scope: Scope, members: Vec<ShareMember>) -> Self {
        Self {
            label: label.into(),
            scope,
            members,
            residual: None,
        }
    }

    pub fn with_residual(mut self, residual: ShareMember) -> Self {
        self.residual = Some(residual);
        self
    }

    fn all_members(&self) -> impl Iterator<Item = &ShareMember> {
        self.members.iter().chain(self.residual.iter())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShareBasis {
    /// Normalized from raw values.
    Exact,
    /// Ingested as already-rounded percentages.
    PreRounded,
}

impl ShareBasis {
    pub fn tolerance(self) -> f64 {
        match self {
            ShareBasis::Exact => EXACT_SHARE_TOLERANCE,
            ShareBasis::PreRounded => ROUNDED_SHARE_TOLERANCE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShareVector {
    pub scope: Scope,
    pub basis: ShareBasis,
    pub shares: Vec<(String, f64)>,
}

impl ShareVector {
    /// Shares supplied as decimals that were rounded upstream.
    pub fn pre_rounded(scope: Scope, shares: Vec<(String, f64)>) -> Self {
        Self {
            scope,
            basis: ShareBasis::PreRounded,
            shares,
        }
    }

    pub fn share_of(&self, member: &str) -> Option<f64> {
        self.shares
            .iter()
            .find(|(id, _)| id == member)
            .map(|(_, s)| *s)
    }

    fn validate(&self) -> Result<(), CalcError> {
        if self.shares.is_empty() {
            return Err(CalcError::MalformedShares("no shares".into()));
        }
        for (id, s) in &self.shares {
            if !s.is_finite() || !(0.0..=1.0).contains(s) {
                return Err(CalcError::MalformedShares(format!(
                    "share of `{id}` is {s}; shares are decimals in [0, 1]"
                )));
            }
        }
        let sum: f64 = self.shares.iter().map(|(_, s)| s).sum();
        let tol = self.basis.tolerance();
        // Slack for the rounding of p/100 so a sum exactly on the boundary passes.
        if (sum - 1.0).abs() > tol + SUM_SLACK {
            return Err(CalcError::MalformedShares(format!(
                "shares sum to {sum}, outside 1 ± {tol}"
            )));
        }
        Ok(())
    }
}

/// An HHI on the [0, 1] scale together with its denominator boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Concentration {
    pub value: f64,
    pub scope: Scope,
    pub members: usize,
    pub boundary_statement: String,
}

impl Concentration {
    /// The 0-100 presentation.
    pub fn scaled_100(&self) -> f64 {
        self.value * 100.0
    }
}

/// `value_i / Σ values` over the whole group, residual included.
pub fn shares(group: &ShareGroup) -> Result<ShareVector, CalcError> {
    let mut total = 0.0;
    for m in group.all_members() {
        if !m.value.is_finite() || m.value < 0.0 {
            return Err(CalcError::Domain(format!(
                "member `{}` of `{}` has value {}",
                m.id, group.label, m.value
            )));
        }
        total += m.value;
    }
    if total <= 0.0 {
        return Err(CalcError::EmptyDenominator(format!(
            "group `{}` has no positive member",
            group.label
        )));
    }
    Ok(ShareVector {
        scope: group.scope,
        basis: ShareBasis::Exact,
        shares: group
            .all_members()
            .map(|m| (m.id.clone(), m.value / total))
            .collect(),
    })
}

/// Sum of squared shares.
pub fn hhi(shares: &ShareVector) -> Result<Concentration, CalcError> {
    shares.validate()?;
    let value = shares.shares.iter().map(|(_, s)| s * s).sum();
    Ok(Concentration {
        value,
        scope: shares.scope,
        members: shares.shares.len(),
        boundary_statement: shares.scope.boundary_statement().to_string(),
    })
}

/// HHI over percentages that were already rounded at the source.
///
/// The percentages are squared as given; they are not renormalized. With
/// `residual_allowed` the sum may be off 100 by up to one point.
pub fn hhi_from_reported_percentages(
    percents: &[f64],
    residual_allowed: bool,
    scope: Scope,
) -> Result<Concentration, CalcError> {
    let vector = reported_percentages_to_shares(percents, residual_allowed, scope)?;
    hhi(&vector)
}

pub fn reported_percentages_to_shares(
    percents: &[f64],
    residual_allowed: bool,
    scope: Scope,
) -> Result<ShareVector, CalcError> {
    if percents.is_empty() {
        return Err(CalcError::MalformedShares("no percentages".into()));
    }
    if let Some(bad) = percents
        .iter()
        .find(|p| !p.is_finite() || !(0.0..=100.0).contains(*p))
    {
        return Err(CalcError::MalformedShares(format!(
            "percentage {bad} outside [0, 100]"
        )));
    }
    let sum: f64 = percents.iter().sum();
    let tol = if residual_allowed {
        ROUNDED_SHARE_TOLERANCE * 100.0
    } else {
        EXACT_SHARE_TOLERANCE * 100.0
    };
    if (sum - 100.0).abs() > tol {
        return Err(CalcError::MalformedShares(format!(
            "percentages sum to {sum}, outside 100 ± {tol}"
        )));
    }
    let basis = if residual_allowed {
        ShareBasis::PreRounded
    } else {
        ShareBasis::Exact
    };
    Ok(ShareVector {
        scope,
        basis,
        shares: percents
            .iter()
            .enumerate()
            .map(|(i, p)| (format!("m{i}"), p / 100.0))
            .collect(),
    })
}
