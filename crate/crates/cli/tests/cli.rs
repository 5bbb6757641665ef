use std::path::PathBuf;
use std::process::{Command, Output};

fn scenario(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name)
}

fn underlay(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_underlay"))
        .args(args)
        .output()
        .unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("underlay-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn analyze_table_lists_each_protocol() {
    let quad = scenario("quadrilateral_d150.toml");
    let out = underlay(&["analyze", quad.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 4);
    for name in ["guard_zone", "threshold", "cooperation"] {
        assert!(text.contains(name), "{text}");
    }
}

#[test]
fn full_protocol_reports_every_user_active() {
    let disk = scenario("disk_w100_m100.toml");
    let out = underlay(&[
        "analyze",
        disk.to_str().unwrap(),
        "--protocol",
        "full",
        "--format",
        "csv",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let row = text.lines().nth(1).unwrap();
    assert!(row.starts_with("full,"));
    let active: f64 = row.rsplit(',').next().unwrap().parse().unwrap();
    assert_eq!(active, 100.0);
}

#[test]
fn json_lines_output() {
    let quad = scenario("quadrilateral_d150.toml");
    let out = underlay(&[
        "analyze",
        quad.to_str().unwrap(),
        "--protocol",
        "threshold",
        "--format",
        "json-lines",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 1);
    assert!(
        text.starts_with("{\"protocol\":\"threshold\",\"gamma\":1e-4,"),
        "{text}"
    );
}

#[test]
fn concave_polygon_is_a_usage_error() {
    let path = scratch("concave.toml");
    std::fs::write(
        &path,
        "m_sus = 10\n[region]\nshape = \"polygon\"\nvertices = [[0.0, 0.0], [10.0, 0.0], [5.0, 2.0], [10.0, 10.0], [0.0, 10.0]]\npu_rx = [5.0, 6.0]\n",
    )
    .unwrap();
    let out = underlay(&["analyze", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("vertex 2"), "{}", stderr(&out));
}

#[test]
fn zero_trials_rejected() {
    let quad = scenario("quadrilateral_d150.toml");
    let out = underlay(&["simulate", quad.to_str().unwrap(), "--trials", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn empty_or_invalid_grid_rejected() {
    let quad = scenario("quadrilateral_d150.toml");
    let out = underlay(&["tradeoff", quad.to_str().unwrap(), "--pout-grid", ""]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    let out = underlay(&["tradeoff", quad.to_str().unwrap(), "--pout-grid", "0.01,1.5"]);
    assert_eq!(out.status.code(), Some(2));
    let out = underlay(&["tradeoff", quad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_protocol_section_is_usage_error() {
    let hex = scenario("hexagon_w100.toml");
    let out = underlay(&["analyze", hex.to_str().unwrap(), "--protocol", "cooperation"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulation_is_reproducible() {
    let quad = scenario("quadrilateral_d150.toml");
    let args = [
        "simulate",
        quad.to_str().unwrap(),
        "--trials",
        "3000",
        "--seed",
        "42",
        "--format",
        "csv",
    ];
    let a = underlay(&args);
    let b = underlay(&args);
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert_eq!(
        text.lines().next().unwrap(),
        "protocol,parameters,quantity,analytic,simulation,std_error,z,trials"
    );
    assert_eq!(text.lines().count(), 1 + 3 * 5);
}

#[test]
fn dump_writes_one_file_per_protocol() {
    let quad = scenario("quadrilateral_d150.toml");
    let dump = scratch("trials.csv");
    let out = underlay(&[
        "simulate",
        quad.to_str().unwrap(),
        "--protocol",
        "guard-zone",
        "--protocol",
        "threshold",
        "--trials",
        "50",
        "--dump",
        dump.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    for tag in ["guard_zone", "threshold"] {
        let text = std::fs::read_to_string(dump.with_file_name(format!("trials_{tag}.csv"))).unwrap();
        assert_eq!(text.lines().count(), 51);
    }
}

#[test]
fn tradeoff_three_families() {
    let quad = scenario("quadrilateral_d150.toml");
    let csv = scratch("tradeoff.csv");
    let out = underlay(&[
        "tradeoff",
        quad.to_str().unwrap(),
        "--families",
        "guard-zone,threshold,cooperation",
        "--pout-grid",
        "0.005,0.01,0.02",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = std::fs::read_to_string(&csv).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 9);
    let active = |family: &str, target: f64| -> f64 {
        rows.iter()
            .find(|r| r[0] == family && r[1].parse::<f64>().unwrap() == target)
            .unwrap()[3]
            .parse()
            .unwrap()
    };
    for t in [0.005, 0.01, 0.02] {
        assert!(active("guard_zone", t) >= active("threshold", t));
    }
}

#[test]
fn profile_table() {
    let quad = scenario("quadrilateral_d150.toml");
    let out = underlay(&["profile", quad.to_str().unwrap(), "--points", "11"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "r,angular_measure,pdf,cdf");
    assert_eq!(lines.len(), 12);
    let last_cdf: f64 = lines[11].rsplit(',').next().unwrap().parse().unwrap();
    assert!((last_cdf - 1.0).abs() < 1e-12);
}

#[test]
fn unreadable_file_is_config_error() {
    let out = underlay(&["analyze", "/nonexistent/scenario.toml"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("/nonexistent/scenario.toml"));
}
