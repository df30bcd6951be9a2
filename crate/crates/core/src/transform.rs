//! The six elementary transformations applied to reported values.
//!
//! All arithmetic is binary64; rounding only happens when reports are written.

use crate::error::CalcError;
use crate::quantity::{Quantity, UnitKind};

fn same_unit(x0: &Quantity, xt: &Quantity) -> Result<(), CalcError> {
    if x0.unit != xt.unit {
        return Err(CalcError::Unit(format!(
            "operands have different units ({} vs {})",
            x0.unit, xt.unit
        )));
    }
    Ok(())
}

fn positive(q: &Quantity, role: &str) -> Result<(), CalcError> {
    if q.value <= 0.0 {
        return Err(CalcError::Domain(format!(
            "{role} must be positive, got {}",
            q.value
        )));
    }
    Ok(())
}

/// `xt - x0`, unit preserved.
pub fn absolute_change(x0: &Quantity, xt: &Quantity) -> Result<Quantity, CalcError> {
    same_unit(x0, xt)?;
    Quantity::new(xt.value - x0.value, xt.unit)
}

/// `xt - x0` for percent operands, reported in percentage points.
pub fn percentage_point_change(x0: &Quantity, xt: &Quantity) -> Result<Quantity, CalcError> {
    for q in [x0, xt] {
        if q.unit != UnitKind::Percent {
            return Err(CalcError::Unit(format!(
                "percentage-point change needs percent operands, got {}",
                q.unit
            )));
        }
    }
    Quantity::new(xt.value - x0.value, UnitKind::PercentagePoint)
}

/// `(xt - x0) / x0` as a fraction.
///
/// Evaluated as `xt / x0 - 1` so it equals `growth_multiplier - 1` bit for bit.
pub fn relative_change(x0: &Quantity, xt: &Quantity) -> Result<Quantity, CalcError> {
    same_unit(x0, xt)?;
    if x0.value == 0.0 {
        return Err(CalcError::DivisionByZeroBase(
            "relative change from a zero starting value".into(),
        ));
    }
    Quantity::new(xt.value / x0.value - 1.0, UnitKind::Ratio)
}

/// `(xt / x0)^(1/n) - 1`.
pub fn cagr(x0: &Quantity, xt: &Quantity, years: u32) -> Result<Quantity, CalcError> {
    same_unit(x0, xt)?;
    if years == 0 {
        return Err(CalcError::Period(
            "compound growth needs at least one year".into(),
        ));
    }
    positive(x0, "CAGR start value")?;
    positive(xt, "CAGR end value")?;
    let multiplier = xt.value / x0.value;
    Quantity::new(multiplier.powf(1.0 / f64::from(years)) - 1.0, UnitKind::Ratio)
}

/// `xt / x0`.
pub fn growth_multiplier(x0: &Quantity, xt: &Quantity) -> Result<Quantity, CalcError> {
    same_unit(x0, xt)?;
    positive(x0, "growth multiplier base")?;
    Quantity::new(xt.value / x0.value, UnitKind::Ratio)
}

/// `xi / xref`. Callers mark the result as a scale comparison.
pub fn scale_ratio(xi: &Quantity, xref: &Quantity) -> Result<Quantity, CalcError> {
    same_unit(xi, xref)?;
    positive(xref, "scale reference")?;
    Quantity::new(xi.value / xref.value, UnitKind::Ratio)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pct(v: f64) -> Quantity {
        Quantity::percent(v)
    }

    fn twh(v: f64) -> Quantity {
        Quantity::new(v, UnitKind::EnergyTwh).unwrap()
    }

    fn usd(v: f64) -> Quantity {
        Quantity::new(v, UnitKind::CurrencyBillion).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn absolute_change_examples() {
        assert!(close(absolute_change(&pct(7.7), &pct(20.0)).unwrap().value, 12.3, 1e-12));
        assert_eq!(absolute_change(&twh(415.0), &twh(945.0)).unwrap().value, 530.0);
        assert_eq!(absolute_change(&twh(3.0), &twh(3.0)).unwrap().value, 0.0);
        assert_eq!(absolute_change(&twh(1.0), &twh(2.0)).unwrap().unit, UnitKind::EnergyTwh);
    }

    #[test]
    fn absolute_change_rejects_unit_mismatch() {
        assert!(matches!(
            absolute_change(&twh(1.0), &pct(2.0)),
            Err(CalcError::Unit(_))
        ));
    }

    #[test]
    fn percentage_point_examples() {
        let r = percentage_point_change(&pct(13.5), &pct(20.0)).unwrap();
        assert_eq!(r.unit, UnitKind::PercentagePoint);
        assert!(close(r.value, 6.5, 1e-12));
        assert!(close(percentage_point_change(&pct(14.2), &pct(20.2)).unwrap().value, 6.0, 1e-12));
        assert_eq!(percentage_point_change(&pct(50.0), &pct(50.0)).unwrap().value, 0.0);
        assert!(matches!(
            percentage_point_change(&twh(1.0), &twh(2.0)),
            Err(CalcError::Unit(_))
        ));
    }

    #[test]
    fn relative_change_examples() {
        assert!(close(relative_change(&pct(7.7), &pct(20.0)).unwrap().value, 1.5974, 5e-5));
        assert!(close(relative_change(&pct(78.0), &pct(88.0)).unwrap().value, 0.1282, 5e-5));
        assert_eq!(relative_change(&pct(9.0), &pct(9.0)).unwrap().value, 0.0);
        assert!(matches!(
            relative_change(&pct(0.0), &pct(9.0)),
            Err(CalcError::DivisionByZeroBase(_))
        ));
    }

    #[test]
    fn cagr_examples() {
        assert!(close(cagr(&pct(7.7), &pct(20.0), 4).unwrap().value, 0.2695, 5e-5));
        assert!(close(cagr(&pct(8.7), &pct(20.2), 2).unwrap().value, 0.5238, 5e-5));
        assert!(close(cagr(&twh(415.0), &twh(945.0), 6).unwrap().value, 0.1470, 5e-5));
        assert!(close(cagr(&twh(415.0), &twh(1200.0), 11).unwrap().value, 0.1013, 5e-5));
        assert_eq!(cagr(&twh(5.0), &twh(5.0), 3).unwrap().value, 0.0);
    }

    #[test]
    fn cagr_errors() {
        assert!(matches!(cagr(&twh(0.0), &twh(5.0), 3), Err(CalcError::Domain(_))));
        assert!(matches!(cagr(&twh(5.0), &twh(-1.0), 3), Err(CalcError::Domain(_))));
        assert!(matches!(cagr(&twh(5.0), &twh(6.0), 0), Err(CalcError::Period(_))));
    }

    #[test]
    fn multiplier_and_scale_examples() {
        assert!(close(growth_multiplier(&twh(415.0), &twh(945.0)).unwrap().value, 2.28, 5e-3));
        assert!(close(growth_multiplier(&twh(415.0), &twh(1200.0)).unwrap().value, 2.89, 5e-3));
        assert_eq!(growth_multiplier(&twh(7.0), &twh(7.0)).unwrap().value, 1.0);
        assert!(matches!(
            growth_multiplier(&twh(0.0), &twh(7.0)),
            Err(CalcError::Domain(_))
        ));

        assert!(close(scale_ratio(&usd(33.9), &usd(252.3)).unwrap().value, 0.1344, 5e-5));
        assert!(close(scale_ratio(&usd(109.1), &usd(9.3)).unwrap().value, 11.73, 5e-3));
        assert!(close(scale_ratio(&usd(109.1), &usd(4.5)).unwrap().value, 24.24, 5e-3));
        assert!(matches!(
            scale_ratio(&usd(1.0), &usd(-2.0)),
            Err(CalcError::Domain(_))
        ));
    }

    proptest! {
        #[test]
        fn cagr_compounds_back_to_multiplier(x0 in 0.01f64..1e6, xt in 0.01f64..1e6, n in 1u32..40) {
            let a = Quantity::scalar(x0);
            let b = Quantity::scalar(xt);
            let g = cagr(&a, &b, n).unwrap().value;
            let m = growth_multiplier(&a, &b).unwrap().value;
            prop_assert!(((1.0 + g).powi(n as i32) - m).abs() <= 1e-9 * m);
        }

        #[test]
        fn relative_change_is_multiplier_minus_one(x0 in 0.01f64..1e6, xt in -1e6f64..1e6) {
            let a = Quantity::scalar(x0);
            let b = Quantity::scalar(xt);
            let rc = relative_change(&a, &b).unwrap().value;
            let m = growth_multiplier(&a, &b).unwrap().value;
            prop_assert_eq!(rc, m - 1.0);
        }

        #[test]
        fn changes_are_antisymmetric(a in 0.0f64..100.0, b in 0.0f64..100.0) {
            let (pa, pb) = (pct(a), pct(b));
            prop_assert_eq!(
                absolute_change(&pa, &pb).unwrap().value,
                -absolute_change(&pb, &pa).unwrap().value
            );
            prop_assert_eq!(
                percentage_point_change(&pa, &pb).unwrap().value,
                -percentage_point_change(&pb, &pa).unwrap().value
            );
        }

        #[test]
        fn cagr_strictly_increasing_in_end_value(x0 in 0.1f64..1e3, xt in 0.1f64..1e3, bump in 1e-3f64..1e3, n in 1u32..20) {
            let a = Quantity::scalar(x0);
            let lo = cagr(&a, &Quantity::scalar(xt), n).unwrap().value;
            let hi = cagr(&a, &Quantity::scalar(xt + bump), n).unwrap().value;
            prop_assert!(hi > lo);
        }
    }
}
