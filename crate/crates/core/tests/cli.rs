use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn simplexwalk(args: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_simplexwalk"))
        .args(args.split_whitespace())
        .output()
        .expect("binary runs")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn compare_writes_a_passing_result() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("born.json");
    let run = simplexwalk(&format!(
        "compare --point 0.3,0.7 --trials 100000 --seed 42 --out {}",
        out.display()
    ));
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    let stdout = String::from_utf8(run.stdout).unwrap();
    assert!(stdout.contains("expected") && stdout.contains("PASS"), "{stdout}");

    let json = read_json(&out);
    let observed = json["observed"][0].as_f64().unwrap();
    assert!((observed - 0.3).abs() < 3.0 * (0.21f64 / 1e5).sqrt());
    assert_eq!(json["trials"], 100_000);
    assert_eq!(json["seed"], 42);
    assert_eq!(json["incomplete"], 0);
}

#[test]
fn analytic_mfpt_prints_an_eighth() {
    let run = simplexwalk("analytic mfpt --point 0.5,0.5");
    assert_eq!(run.status.code(), Some(0));
    let json: Value = serde_json::from_slice(&run.stdout).unwrap();
    assert_eq!(json["mfpt"].as_f64(), Some(0.125));
    assert!(String::from_utf8(run.stderr).unwrap().contains("0.125"));
}

#[test]
fn analytic_fpp_three_states() {
    let run = simplexwalk("analytic fpp --point 0.5,0.3,0.2 --format csv");
    assert_eq!(run.status.code(), Some(0));
    assert_eq!(
        String::from_utf8(run.stdout).unwrap(),
        "vertex,probability\n0,0.5\n1,0.3\n2,0.2\n"
    );
}

#[test]
fn analytic_green_reports_fluxes() {
    let run = simplexwalk("analytic green --point 0.5,0.3,0.2 --x 0.2,0.3,0.5 --s 1e-8");
    assert_eq!(run.status.code(), Some(0));
    let json: Value = serde_json::from_slice(&run.stdout).unwrap();
    let fluxes: Vec<f64> = json["vertex_fluxes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    for (p, x) in fluxes.iter().zip([0.5, 0.3, 0.2]) {
        assert!((p - x).abs() < 1e-6);
    }
}

#[test]
fn usage_errors_are_one_line() {
    for args in [
        "simulate --point 0.3,0.6",
        "simulate --point 0.5,0.5 --amps 1,0",
        "simulate --point 0.5,0.5 --frobnicate",
        "simulate --point 0.5,0.5 --mode sideways",
        "frobnicate",
    ] {
        let run = simplexwalk(args);
        assert_eq!(run.status.code(), Some(1), "{args}");
        let stderr = String::from_utf8(run.stderr).unwrap();
        assert_eq!(stderr.lines().count(), 1, "{args}: {stderr}");
        assert!(stderr.starts_with("error: "), "{stderr}");
        assert!(run.stdout.is_empty());
    }
}

#[test]
fn help_exits_cleanly() {
    let run = simplexwalk("--help");
    assert_eq!(run.status.code(), Some(0));
    assert!(String::from_utf8(run.stdout).unwrap().contains("simulate"));
}

#[test]
fn statistical_failure_exits_with_two() {
    // a step cap well below the mean passage time keeps only short walks
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let run = simplexwalk(&format!(
        "mfpt --point 0.5,0.5 --trials 5000 --max-steps 500 --out {}",
        out.display()
    ));
    assert_eq!(run.status.code(), Some(2));
    let stdout = String::from_utf8(run.stdout).unwrap();
    assert!(stdout.contains("FAIL"), "{stdout}");
    let json = read_json(&out);
    assert!(json["incomplete"].as_u64().unwrap() > 0);
    assert!(json["mfpt"]["observed"].as_f64().unwrap() < 0.05);
}

#[test]
fn results_do_not_depend_on_threads() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for threads in [1, 4, 16] {
        let out = dir.path().join(format!("t{threads}.json"));
        let run = simplexwalk(&format!(
            "simulate --point 0.5,0.3,0.2 --trials 5000 --seed 9 --dt 1e-3 --threads {threads} --out {}",
            out.display()
        ));
        assert_eq!(run.status.code(), Some(0));
        outputs.push(std::fs::read(&out).unwrap());
    }
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));

    let out = dir.path().join("again.json");
    simplexwalk(&format!(
        "simulate --point 0.5,0.3,0.2 --trials 5000 --seed 9 --dt 1e-3 --out {}",
        out.display()
    ));
    assert_eq!(std::fs::read(&out).unwrap(), outputs[0]);
}

#[test]
fn phases_do_not_change_outcomes() {
    let dir = tempfile::tempdir().unwrap();
    let mut observed = Vec::new();
    for amps in ["0.6,0.8", "0.6,0.8i", "-0.6i,0.48+0.64i"] {
        let out = dir.path().join("p.json");
        let run = simplexwalk(&format!(
            "simulate --amps {amps} --trials 2000 --seed 5 --mode discrete --chips 25 --out {}",
            out.display()
        ));
        assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
        let json = read_json(&out);
        observed.push((json["observed"].clone(), json["mfpt"]["observed"].clone()));
    }
    assert!(observed.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn density_csv_has_three_columns() {
    let run = simplexwalk("density --point 0.5,0.5 --trials 20000 --seed 1");
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    let text = String::from_utf8(run.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,analytic_density,empirical_density"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 200);
    assert!(rows.iter().all(|r| r.len() == 3));
}
