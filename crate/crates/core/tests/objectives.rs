use ffd_adapt::objectives::{penalized_cost, AeroCoefficients, PenaltyConfig};
use proptest::prelude::*;

const BASELINE: AeroCoefficients = AeroCoefficients {
    lift: 0.319192893,
    drag: 0.026352608,
};

fn cost(lift: f64, drag: f64) -> f64 {
    penalized_cost(AeroCoefficients { lift, drag }, BASELINE, PenaltyConfig::default())
}

#[test]
fn baseline_costs_one() {
    assert_eq!(cost(BASELINE.lift, BASELINE.drag), 1.0);
}

#[test]
fn rows_above_the_lift_floor_cost_their_drag_ratio() {
    // 30-digit drag ratios; both lift ratios exceed 0.999.
    assert!((cost(0.318874966, 0.017450289) - 0.662184516993536275).abs() <= 1e-15);
    assert!((cost(0.318999078, 0.016299483) - 0.618514987207338264).abs() <= 1e-15);
}

#[test]
fn penalty_kinks_at_the_floor() {
    let at = 0.999 * BASELINE.lift;
    let drag = 0.02;
    assert!((cost(at, drag) - drag / BASELINE.drag).abs() <= 1e-15);
    let below = cost(at - 1e-6, drag);
    let slope = (below - cost(at, drag)) / 1e-6;
    assert!((slope - 1e4 / BASELINE.lift).abs() <= 1e-3 * slope, "{slope}");
}

proptest! {
    #[test]
    fn monotone_in_drag_and_lift(
        l1 in 0.2f64..0.4, l2 in 0.2f64..0.4, d1 in 0.01f64..0.04, d2 in 0.01f64..0.04,
    ) {
        let (dlo, dhi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
        let (llo, lhi) = if l1 <= l2 { (l1, l2) } else { (l2, l1) };
        prop_assert!(cost(l1, dlo) <= cost(l1, dhi));
        prop_assert!(cost(lhi, d1) <= cost(llo, d1));
    }
}
