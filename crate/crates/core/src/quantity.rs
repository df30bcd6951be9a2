//! Units, periods and unit-tagged quantities.
//!
//! Percent values are stored as reported (`20.0` means 20%). Conversion to a
//! fraction happens only inside the formulas that need it.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::CalcError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitKind {
    Percent,
    PercentagePoint,
    CurrencyBillion,
    PhysicalUnits,
    EnergyTwh,
    JobsMillion,
    Ratio,
    Dimensionless,
}

impl UnitKind {
    pub const ALL: [UnitKind; 8] = [
        UnitKind::Percent,
        UnitKind::PercentagePoint,
        UnitKind::CurrencyBillion,
        UnitKind::PhysicalUnits,
        UnitKind::EnergyTwh,
        UnitKind::JobsMillion,
        UnitKind::Ratio,
        UnitKind::Dimensionless,
    ];

    /// Token used in dataset files and audit records.
    pub fn token(self) -> &'static str {
        match self {
            UnitKind::Percent => "percent",
            UnitKind::PercentagePoint => "pp",
            UnitKind::CurrencyBillion => "usd_bn",
            UnitKind::PhysicalUnits => "units",
            UnitKind::EnergyTwh => "twh",
            UnitKind::JobsMillion => "jobs_m",
            UnitKind::Ratio => "ratio",
            UnitKind::Dimensionless => "dimensionless",
        }
    }

    /// Short suffix for human-readable report cells.
    pub fn display_suffix(self) -> &'static str {
        match self {
            UnitKind::Percent => "%",
            UnitKind::PercentagePoint => " pp",
            UnitKind::CurrencyBillion => " USD bn",
            UnitKind::PhysicalUnits => " units",
            UnitKind::EnergyTwh => " TWh",
            UnitKind::JobsMillion => " million",
            UnitKind::Ratio | UnitKind::Dimensionless => "",
        }
    }
}

impl fmt::Display for UnitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for UnitKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        UnitKind::ALL
            .into_iter()
            .find(|k| k.token() == lower)
            .ok_or_else(|| format!("unknown unit token `{s}`"))
    }
}

/// A unit kind plus the label it was reported with.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Unit {
    pub kind: UnitKind,
    pub label: String,
}

impl Unit {
    pub fn new(kind: UnitKind, label: impl Into<String>) -> Self {
        Self {
            kind,
            label: label.into(),
        }
    }
}

impl From<UnitKind> for Unit {
    fn from(kind: UnitKind) -> Self {
        Unit::new(kind, kind.token())
    }
}

/// Closed year interval. Point-in-time values have `start_year == end_year`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Period {
    pub start_year: i32,
    pub end_year: i32,
}

impl Period {
    pub fn new(start_year: i32, end_year: i32) -> Result<Self, CalcError> {
        if start_year > end_year {
            return Err(CalcError::Period(format!(
                "start year {start_year} is after end year {end_year}"
            )));
        }
        Ok(Self {
            start_year,
            end_year,
        })
    }

    pub fn year(year: i32) -> Self {
        Self {
            start_year: year,
            end_year: year,
        }
    }

    pub fn span_years(&self) -> u32 {
        (self.end_year - self.start_year) as u32
    }

    /// Years elapsed from the start of `self` to the end of `later`.
    pub fn years_until(&self, later: &Period) -> i64 {
        i64::from(later.end_year) - i64::from(self.start_year)
    }

    /// Smallest period covering both.
    pub fn cover(&self, other: &Period) -> Period {
        Period {
            start_year: self.start_year.min(other.start_year),
            end_year: self.end_year.max(other.end_year),
        }
    }
}

impl fmt::Display for Period {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.start_year == self.end_year {
            write!(f, "{}", self.start_year)
        } else {
            write!(f, "{}-{}", self.start_year, self.end_year)
        }
    }
}

/// A finite value with its unit kind. This is what the formulas operate on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quantity {
    pub value: f64,
    pub unit: UnitKind,
}

impl Quantity {
    pub fn new(value: f64, unit: UnitKind) -> Result<Self, CalcError> {
        if !value.is_finite() {
            return Err(CalcError::Domain(format!("non-finite value {value}")));
        }
        Ok(Self { value, unit })
    }

    pub fn percent(value: f64) -> Self {
        Self::new(value, UnitKind::Percent).expect("finite percent")
    }

    pub fn ratio(value: f64) -> Self {
        Self::new(value, UnitKind::Ratio).expect("finite ratio")
    }

    /// Unit-free helper for tests and callers that only deal in magnitudes.
    pub fn scalar(value: f64) -> Self {
        Self::new(value, UnitKind::Dimensionless).expect("finite scalar")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_tokens_round_trip() {
        for kind in UnitKind::ALL {
            assert_eq!(kind.token().parse::<UnitKind>().unwrap(), kind);
        }
        assert!("furlongs".parse::<UnitKind>().is_err());
    }

    #[test]
    fn period_rejects_inverted_range() {
        assert!(Period::new(2025, 2021).is_err());
        let p = Period::new(2025, 2030).unwrap();
        assert_eq!(p.span_years(), 5);
        assert_eq!(Period::year(2021).years_until(&Period::year(2025)), 4);
        assert_eq!(p.to_string(), "2025-2030");
        assert_eq!(Period::year(2024).to_string(), "2024");
    }

    #[test]
    fn quantity_rejects_non_finite() {
        assert!(Quantity::new(f64::NAN, UnitKind::Ratio).is_err());
        assert!(Quantity::new(f64::INFINITY, UnitKind::Ratio).is_err());
    }
}
