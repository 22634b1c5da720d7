use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_noctest"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn validate_reports_summary() {
    let o = run(&["validate", &fixture("d695_like.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "valid: 10 cores, 6 processors, 2 io ports on a 4x4 grid\n");
}

#[test]
fn validate_off_grid_names_field_and_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    let doc = fs::read_to_string(fixture("two_core.json")).unwrap();
    let mut sys: serde_json::Value = serde_json::from_str(&doc).unwrap();
    sys["cores"][1]["position"] = serde_json::json!([7, 0]);
    fs::write(&path, serde_json::to_string_pretty(&sys).unwrap()).unwrap();
    let o = run(&["validate", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("cores[1].position"), "{err}");
    assert!(err.contains("line "), "{err}");
}

#[test]
fn missing_file_is_usage_error() {
    assert_eq!(run(&["validate", "/no/such/system.json"]).status.code(), Some(2));
    assert_eq!(run(&["plan", "/no/such/system.json"]).status.code(), Some(2));
}

#[test]
fn plan_single_core() {
    let o = run(&["plan", &fixture("single_core.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "makespan=52 peak_power=30\n");
}

#[test]
fn zero_budget_is_infeasible() {
    let o = run(&["plan", &fixture("single_core.json"), "--power-fraction", "0"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("infeasible"));
}

#[test]
fn bad_flags_are_usage_errors() {
    let f = fixture("single_core.json");
    assert_eq!(run(&["plan", &f, "--processors", "2"]).status.code(), Some(2));
    assert_eq!(run(&["plan", &f, "--dynamic-priority"]).status.code(), Some(2));
    assert_eq!(run(&["plan", &f, "--power-fraction", "half"]).status.code(), Some(2));
    assert_eq!(run(&["sweep", &f, "--processors", ""]).status.code(), Some(2));
    assert_eq!(run(&["sweep", &f, "--processors", "0..3"]).status.code(), Some(2));
}

#[test]
fn gen_over_capacity_fails_validation() {
    let o = run(&["gen", "--seed", "1", "--grid", "2x2", "--cores", "3", "--processors", "2"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn generated_system_validates_and_plans() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gen.json");
    let p = path.to_str().unwrap();
    let g = run(&["gen", "--seed", "9", "--grid", "3x3", "--cores", "4", "--processors", "2", "--out", p]);
    assert_eq!(g.status.code(), Some(0));
    assert_eq!(run(&["validate", p]).status.code(), Some(0));
    assert_eq!(run(&["plan", p]).status.code(), Some(0));
}

#[test]
fn sweep_single_core_rows_agree() {
    let o = run(&["sweep", &fixture("single_core.json"), "--processors", "0,1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "processors,power_fraction,makespan,peak_power,feasible\n0,none,52,30,true\n1,none,52,30,true\n"
    );
}

#[test]
fn sweep_cells_match_standalone_plans() {
    let f = fixture("d695_like.json");
    let o = run(&["sweep", &f, "--processors", "0,3..4,6", "--power-fractions", "none,0.5"]);
    assert_eq!(o.status.code(), Some(0));
    let csv = stdout(&o);
    assert_eq!(csv.lines().count(), 9);
    for line in csv.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        let p = run(&["plan", &f, "--processors", cols[0], "--power-fraction", cols[1]]);
        if cols[4] == "true" {
            assert_eq!(stdout(&p), format!("makespan={} peak_power={}\n", cols[2], cols[3]));
        } else {
            assert_eq!(p.status.code(), Some(3));
        }
    }
}

#[test]
fn plan_csv_is_consistent_with_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("s.csv");
    let svg = dir.path().join("s.svg");
    let o = run(&[
        "plan",
        &fixture("d695_like.json"),
        "--power-fraction",
        "0.5",
        "--out",
        csv.to_str().unwrap(),
        "--gantt",
        svg.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let summary = stdout(&o);
    let text = fs::read_to_string(&csv).unwrap();
    let trailer = text.lines().last().unwrap();
    assert_eq!(format!("# {summary}"), format!("{trailer}\n"));
    let max_end = text
        .lines()
        .skip(1)
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').nth(6).unwrap().parse::<u64>().unwrap())
        .max()
        .unwrap();
    assert!(summary.starts_with(&format!("makespan={max_end} ")));
    assert!(fs::read_to_string(&svg).unwrap().starts_with("<svg"));
}

#[test]
fn compare_anomaly() {
    let o = run(&["compare", &fixture("anomaly.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "greedy=1250 optimal=757 gap=1.6513 exact=true\n");
}
