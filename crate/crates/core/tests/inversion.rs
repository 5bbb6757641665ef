use underlay_core::inversion::{solve_parameter, tradeoff_curve, write_tradeoff_csv, Family, InversionError};
use underlay_core::network_metrics::{noise_only_outage, outage_probability};
use underlay_core::{InterferenceKernel, Protocol};

mod common;

#[test]
fn round_trip_random_targets() {
    common::inversion_round_trip().unwrap();
}

#[test]
fn solved_parameters_order_with_target() {
    let s = common::quad(100);
    let r = |t: f64| solve_parameter(&s, Family::GuardZone, t, 1e-7).unwrap().parameter;
    let g = |t: f64| solve_parameter(&s, Family::Threshold, t, 1e-7).unwrap().parameter;
    // looser target: smaller guard zone, larger threshold
    assert!(r(0.005) > r(0.01));
    assert!(g(0.005) < g(0.01));
}

#[test]
fn unreachable_targets_are_reported() {
    let s = common::quad(100);
    let floor = noise_only_outage(s.m0(), s.beta(), s.rho0());
    let full = outage_probability(&InterferenceKernel::new(&s, Protocol::FullActivity).unwrap()).unwrap();
    for family in [Family::GuardZone, Family::Threshold, Family::Cooperation { r_c: 8.0 }] {
        for target in [floor * 0.5, (full + 0.01).min(0.99)] {
            let err = solve_parameter(&s, family, target, 1e-6).unwrap_err();
            assert!(
                matches!(err, InversionError::Unreachable { .. }),
                "{}: {err}",
                family.name()
            );
        }
    }
    assert!(matches!(
        solve_parameter(&s, Family::Threshold, 0.01, 0.0),
        Err(InversionError::BadTolerance(_))
    ));
}

#[test]
fn tradeoff_rows_and_ordering() {
    let s = common::quad(100);
    let grid = [0.005, 0.01, 0.02];
    let guard = tradeoff_curve(&s, Family::GuardZone, &grid).unwrap();
    let threshold = tradeoff_curve(&s, Family::Threshold, &grid).unwrap();
    let mut buf = Vec::new();
    write_tradeoff_csv(&guard, &mut buf, true).unwrap();
    write_tradeoff_csv(&threshold, &mut buf, false).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "protocol,target_pout,solved_parameter,mean_active");
    assert_eq!(lines.len(), 7);
    for (g, t) in guard.iter().zip(&threshold) {
        let (ga, ta) = (g.result.as_ref().unwrap().1, t.result.as_ref().unwrap().1);
        assert!(ga >= ta, "target {}: guard {ga}, threshold {ta}", g.target_pout);
    }
    // more tolerance, more active users
    let actives: Vec<f64> = guard.iter().map(|p| p.result.as_ref().unwrap().1).collect();
    assert!(actives.windows(2).all(|w| w[0] < w[1]));
}
