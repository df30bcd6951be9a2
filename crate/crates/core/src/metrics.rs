//! Domain metrics: robot stock-flow, data-centre demand and labour reallocation.

use serde::{Deserialize, Serialize};

use crate::error::CalcError;
use crate::evidence::EvidenceStatus;
use crate::quantity::{Period, Quantity, UnitKind};
use crate::transform;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobotStockSnapshot {
    pub operational_stock: f64,
    pub annual_installations: f64,
    pub period: Period,
}

impl RobotStockSnapshot {
    pub fn new(
        operational_stock: f64,
        annual_installations: f64,
        period: Period,
    ) -> Result<Self, CalcError> {
        for (name, v) in [
            ("operational stock", operational_stock),
            ("annual installations", annual_installations),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(CalcError::Domain(format!("{name} must be >= 0, got {v}")));
            }
        }
        Ok(Self {
            operational_stock,
            annual_installations,
            period,
        })
    }
}

/// Gross labour flows. Always institutional projections, never realised outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabourProjection {
    pub new_roles: f64,
    pub displaced_roles: f64,
    pub period: Period,
    pub evidence_status: EvidenceStatus,
}

impl LabourProjection {
    pub fn new(
        new_roles: f64,
        displaced_roles: f64,
        period: Period,
        evidence_status: EvidenceStatus,
    ) -> Result<Self, CalcError> {
        if evidence_status != EvidenceStatus::Projection {
            return Err(CalcError::Evidence(format!(
                "labour reallocation inputs must be projections, got {evidence_status}"
            )));
        }
        for (name, v) in [("new roles", new_roles), ("displaced roles", displaced_roles)] {
            if !v.is_finite() || v < 0.0 {
                return Err(CalcError::Domain(format!("{name} must be >= 0, got {v}")));
            }
        }
        Ok(Self {
            new_roles,
            displaced_roles,
            period,
            evidence_status,
        })
    }
}

/// Operational stock over annual installations.
pub fn stock_flow_ratio(s: &RobotStockSnapshot) -> Result<Quantity, CalcError> {
    if s.annual_installations == 0.0 {
        return Err(CalcError::DivisionByZeroBase(
            "stock-flow ratio with zero annual installations".into(),
        ));
    }
    Quantity::new(s.operational_stock / s.annual_installations, UnitKind::Ratio)
}

/// Annual installations over operational stock. A scale indicator; not a depreciation rate.
pub fn installation_share_of_stock(s: &RobotStockSnapshot) -> Result<Quantity, CalcError> {
    if s.operational_stock == 0.0 {
        return Err(CalcError::DivisionByZeroBase(
            "installation share of a zero operational stock".into(),
        ));
    }
    Quantity::new(s.annual_installations / s.operational_stock, UnitKind::Ratio)
}

/// Growth multiplier restricted to electricity demand.
pub fn demand_multiplier(e0: &Quantity, et: &Quantity) -> Result<Quantity, CalcError> {
    for q in [e0, et] {
        if q.unit != UnitKind::EnergyTwh {
            return Err(CalcError::Unit(format!(
                "demand multiplier needs TWh operands, got {}",
                q.unit
            )));
        }
    }
    transform::growth_multiplier(e0, et)
}

pub fn new_to_displaced_ratio(p: &LabourProjection) -> Result<Quantity, CalcError> {
    if p.displaced_roles == 0.0 {
        return Err(CalcError::DivisionByZeroBase(
            "new-to-displaced ratio with zero displaced roles".into(),
        ));
    }
    Quantity::new(p.new_roles / p.displaced_roles, UnitKind::Ratio)
}

pub fn displacement_relative_to_new(p: &LabourProjection) -> Result<Quantity, CalcError> {
    if p.new_roles == 0.0 {
        return Err(CalcError::DivisionByZeroBase(
            "displacement relative to zero new roles".into(),
        ));
    }
    Quantity::new(p.displaced_roles / p.new_roles, UnitKind::Ratio)
}

/// Signed: displacement may exceed creation.
pub fn net_labour_change(p: &LabourProjection) -> Result<Quantity, CalcError> {
    Quantity::new(p.new_roles - p.displaced_roles, UnitKind::JobsMillion)
}

/// `(new - displaced) / new`, evaluated as `1 - displaced/new` so that it
/// sums with [`displacement_relative_to_new`] to exactly 1.
pub fn net_gain_ratio(p: &LabourProjection) -> Result<Quantity, CalcError> {
    let drn = displacement_relative_to_new(p)?;
    Quantity::new(1.0 - drn.value, UnitKind::Ratio)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn robots(stock: f64, inst: f64) -> RobotStockSnapshot {
        RobotStockSnapshot::new(stock, inst, Period::year(2024)).unwrap()
    }

    fn labour(new: f64, displaced: f64) -> LabourProjection {
        LabourProjection::new(
            new,
            displaced,
            Period::new(2025, 2030).unwrap(),
            EvidenceStatus::Projection,
        )
        .unwrap()
    }

    fn twh(v: f64) -> Quantity {
        Quantity::new(v, UnitKind::EnergyTwh).unwrap()
    }

    #[test]
    fn stock_flow_examples() {
        // 4,663,698 / 542,076 by rational arithmetic
        let sfr = stock_flow_ratio(&robots(4_663_698.0, 542_076.0)).unwrap().value;
        assert!((sfr - 8.603402474929714).abs() < 1e-12);
        assert!((sfr - 8.60).abs() <= 5e-3);
        assert_eq!(stock_flow_ratio(&robots(7.0, 7.0)).unwrap().value, 1.0);
        assert_eq!(stock_flow_ratio(&robots(100.0, 25.0)).unwrap().value, 4.0);
        assert!(matches!(
            stock_flow_ratio(&robots(100.0, 0.0)),
            Err(CalcError::DivisionByZeroBase(_))
        ));
    }

    #[test]
    fn installation_share_examples() {
        let s = robots(4_663_698.0, 542_076.0);
        let ais = installation_share_of_stock(&s).unwrap().value;
        assert!((ais - 0.1162).abs() <= 5e-5);
        assert_eq!(installation_share_of_stock(&robots(3.0, 3.0)).unwrap().value, 1.0);
        let product = ais * stock_flow_ratio(&s).unwrap().value;
        assert!((product - 1.0).abs() < 1e-12);
        assert!(matches!(
            installation_share_of_stock(&robots(0.0, 5.0)),
            Err(CalcError::DivisionByZeroBase(_))
        ));
    }

    #[test]
    fn demand_multiplier_examples() {
        assert!((demand_multiplier(&twh(415.0), &twh(945.0)).unwrap().value - 2.28).abs() <= 5e-3);
        assert!((demand_multiplier(&twh(415.0), &twh(1200.0)).unwrap().value - 2.89).abs() <= 5e-3);
        assert_eq!(demand_multiplier(&twh(9.0), &twh(9.0)).unwrap().value, 1.0);
        assert!(matches!(
            demand_multiplier(&Quantity::percent(1.0), &Quantity::percent(2.0)),
            Err(CalcError::Unit(_))
        ));
        assert!(demand_multiplier(&twh(0.0), &twh(2.0)).is_err());
    }

    #[test]
    fn labour_examples() {
        let p = labour(170.0, 92.0);
        assert!((new_to_displaced_ratio(&p).unwrap().value - 1.85).abs() <= 5e-3);
        assert!((displacement_relative_to_new(&p).unwrap().value - 0.5412).abs() <= 5e-5);
        assert_eq!(net_labour_change(&p).unwrap().value, 78.0);
        assert!((net_gain_ratio(&p).unwrap().value - 0.4588).abs() <= 5e-5);

        assert_eq!(new_to_displaced_ratio(&labour(5.0, 5.0)).unwrap().value, 1.0);
        assert_eq!(new_to_displaced_ratio(&labour(0.0, 92.0)).unwrap().value, 0.0);
        assert_eq!(displacement_relative_to_new(&labour(5.0, 5.0)).unwrap().value, 1.0);
        assert_eq!(displacement_relative_to_new(&labour(100.0, 0.0)).unwrap().value, 0.0);
        assert_eq!(net_labour_change(&labour(5.0, 5.0)).unwrap().value, 0.0);
        assert_eq!(net_labour_change(&labour(92.0, 170.0)).unwrap().value, -78.0);
        assert_eq!(net_gain_ratio(&labour(5.0, 0.0)).unwrap().value, 1.0);
        assert_eq!(net_gain_ratio(&labour(5.0, 5.0)).unwrap().value, 0.0);
    }

    #[test]
    fn labour_errors() {
        assert!(matches!(
            new_to_displaced_ratio(&labour(5.0, 0.0)),
            Err(CalcError::DivisionByZeroBase(_))
        ));
        assert!(displacement_relative_to_new(&labour(0.0, 5.0)).is_err());
        assert!(net_gain_ratio(&labour(0.0, 5.0)).is_err());
        // both zero: no 0/0 convention
        assert!(new_to_displaced_ratio(&labour(0.0, 0.0)).is_err());
        assert!(displacement_relative_to_new(&labour(0.0, 0.0)).is_err());
        assert!(matches!(
            LabourProjection::new(1.0, 1.0, Period::year(2025), EvidenceStatus::Reported),
            Err(CalcError::Evidence(_))
        ));
        assert!(LabourProjection::new(-1.0, 1.0, Period::year(2025), EvidenceStatus::Projection).is_err());
    }

    proptest! {
        #[test]
        fn drn_plus_ngr_is_exactly_one(new in 1e-3f64..1e6, displaced in 0.0f64..1e6) {
            let p = labour(new, displaced);
            let sum = displacement_relative_to_new(&p).unwrap().value + net_gain_ratio(&p).unwrap().value;
            prop_assert_eq!(sum, 1.0);
        }

        #[test]
        fn ndr_times_drn_is_one(new in 1e-3f64..1e6, displaced in 1e-3f64..1e6) {
            let p = labour(new, displaced);
            let prod = new_to_displaced_ratio(&p).unwrap().value * displacement_relative_to_new(&p).unwrap().value;
            prop_assert!((prod - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn sfr_times_ais_is_one(stock in 1.0f64..1e9, inst in 1.0f64..1e9) {
            let s = robots(stock, inst);
            let prod = stock_flow_ratio(&s).unwrap().value * installation_share_of_stock(&s).unwrap().value;
            prop_assert!((prod - 1.0).abs() <= 1e-12);
        }
    }
}
