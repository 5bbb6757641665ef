use underlay_core::montecarlo::{run, run_with, write_records_csv, McConfig, OutageEstimator};
use underlay_core::network_metrics::{analyze, noise_only_outage};
use underlay_core::{InterferenceKernel, Protocol};

mod common;

#[test]
fn same_seed_same_report() {
    let s = common::pentagon(20);
    let p = Protocol::Cooperation { gamma: 1e-4, r_c: 10.0 };
    let a = run(&s, p, 5_000, 9).unwrap();
    let b = run(&s, p, 5_000, 9).unwrap();
    assert_eq!(a, b);
    let c = run(&s, p, 5_000, 10).unwrap();
    assert_ne!(a.raw_moments[0].value, c.raw_moments[0].value);
}

#[test]
fn prefix_of_a_longer_run_matches() {
    // trial i uses substream i, so the first records coincide
    let s = common::quad(10);
    let mut cfg = McConfig::new(1_000, 4);
    cfg.keep_records = true;
    let short = run_with(&s, Protocol::Threshold { gamma: 1e-4 }, &cfg).unwrap();
    cfg.trials = 5_000;
    let long = run_with(&s, Protocol::Threshold { gamma: 1e-4 }, &cfg).unwrap();
    assert_eq!(short.records.unwrap()[..], long.records.unwrap()[..1_000]);
}

#[test]
fn small_run_agrees_with_analysis() {
    let s = common::quad(100);
    for p in [
        Protocol::FullActivity,
        Protocol::GuardZone { r_f: 30.0 },
        Protocol::Threshold { gamma: 1e-4 },
    ] {
        let a = analyze(&InterferenceKernel::new(&s, p).unwrap(), 3).unwrap();
        let mc = run(&s, p, 20_000, 2).unwrap();
        let raw = a.cumulants.aggregate_raw_moments();
        assert!(mc.raw_moments[0].z_score(raw[0]).abs() < 4.0, "{}", p.name());
        assert!(mc.outage.z_score(a.outage).abs() < 4.0, "{}", p.name());
        assert!(mc.mean_active.z_score(a.mean_active).abs() < 4.0, "{}", p.name());
    }
}

#[test]
fn estimators_agree() {
    let s = common::disk(100.0, 100);
    let p = Protocol::GuardZone { r_f: 20.0 };
    let cond = run(&s, p, 20_000, 3).unwrap().outage;
    let mut cfg = McConfig::new(20_000, 3);
    cfg.estimator = OutageEstimator::Indicator;
    let ind = run_with(&s, p, &cfg).unwrap().outage;
    assert!(cond.std_error < ind.std_error);
    let se = (cond.std_error.powi(2) + ind.std_error.powi(2)).sqrt();
    assert!((cond.value - ind.value).abs() < 4.0 * se);
}

#[test]
fn full_activity_counts_everyone() {
    let s = common::hexagon(80.0, 33);
    let rep = run(&s, Protocol::FullActivity, 2_000, 1).unwrap();
    assert_eq!(rep.mean_active.value, 33.0);
    assert_eq!(rep.mean_active.std_error, 0.0);
}

#[test]
fn silenced_network_is_noise_limited() {
    let s = common::disk(50.0, 40);
    let rep = run(&s, Protocol::GuardZone { r_f: 50.0 }, 2_000, 1).unwrap();
    assert_eq!(rep.raw_moments[0].value, 0.0);
    let floor = noise_only_outage(s.m0(), s.beta(), s.rho0());
    assert!((rep.outage.value - floor).abs() < 1e-15);
}

#[test]
fn record_csv_layout() {
    let s = common::quad(5);
    let mut cfg = McConfig::new(10, 1);
    cfg.keep_records = true;
    let rep = run_with(&s, Protocol::FullActivity, &cfg).unwrap();
    let mut buf = Vec::new();
    write_records_csv(rep.records.as_ref().unwrap(), &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "trial,aggregate_interference,active_count,outage_indicator,outage_conditional"
    );
    assert_eq!(lines.len(), 11);
    assert!(lines[1..].iter().all(|l| l.split(',').count() == 5));
}
