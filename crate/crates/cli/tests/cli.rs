use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::atomic::{AtomicUsize, Ordering};

use ecd_cli::config::RunConfig;
use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_ecd");
const GOLDEN: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/golden");
/// Set to rewrite the golden files from the current build.
const UPDATE_ENV: &str = "ECD_UPDATE_GOLDEN";

const LAMBDA: &str = "0.8,1.2,1.3,1.9";
const MU: &str = "0.5,0.7,1.5,2.5";

fn ecd(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("ECD_OUT_DIR")
        .output()
        .expect("run ecd")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn scratch(tag: &str) -> PathBuf {
    static N: AtomicUsize = AtomicUsize::new(0);
    let d = std::env::temp_dir().join(format!(
        "ecd-cli-{tag}-{}-{}",
        std::process::id(),
        N.fetch_add(1, Ordering::Relaxed)
    ));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn files(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    v.sort();
    v
}

fn example1_systems(alpha: &str) -> Vec<String> {
    [
        "--kind", "series", "--a-alpha", alpha, "--a-beta", "2", "--a-lambda", LAMBDA, "--b-alpha", alpha,
        "--b-beta", "2", "--b-lambda", MU,
    ]
    .iter()
    .map(|s| s.to_string())
    .collect()
}

fn run_with(head: &[&str], tail: &[String]) -> Output {
    let mut args: Vec<&str> = head.to_vec();
    args.extend(tail.iter().map(String::as_str));
    ecd(&args)
}

#[test]
fn examples_match_golden_files() {
    let dir = scratch("golden");
    let o = ecd(&["examples", "all", "--output", dir.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    if std::env::var_os(UPDATE_ENV).is_some() {
        std::fs::create_dir_all(GOLDEN).unwrap();
        for f in files(&dir) {
            std::fs::copy(dir.join(&f), Path::new(GOLDEN).join(&f)).unwrap();
        }
    }
    assert_eq!(files(&dir), files(Path::new(GOLDEN)));
    for f in files(&dir) {
        let got = std::fs::read(dir.join(&f)).unwrap();
        let want = std::fs::read(Path::new(GOLDEN).join(&f)).unwrap();
        assert!(got == want, "{f} differs from its golden copy");
    }
}

#[test]
fn outputs_are_byte_deterministic() {
    let (d1, d2) = (scratch("det"), scratch("det"));
    let first = ecd(&["examples", "all", "-o", d1.to_str().unwrap()]);
    let second = Command::new(BIN)
        .args(["examples", "all"])
        .env("ECD_OUT_DIR", &d2)
        .output()
        .unwrap();
    assert!(first.status.success() && second.status.success());
    assert_eq!(files(&d1), files(&d2));
    for f in files(&d1) {
        assert_eq!(std::fs::read(d1.join(&f)).unwrap(), std::fs::read(d2.join(&f)).unwrap(), "{f}");
    }
    let mc = ["mc-verify", "--kind", "series", "--a-alpha", "0.7", "--a-beta", "2", "--a-lambda", LAMBDA, "--seed", "11", "-n", "20000", "--format", "csv"];
    assert_eq!(ecd(&mc).stdout, ecd(&mc).stdout);
}

#[test]
fn summaries_round_trip_through_the_config_parser() {
    let dir = scratch("roundtrip");
    for f in files(Path::new(GOLDEN)).iter().filter(|f| f.ends_with(".json")) {
        let text = std::fs::read_to_string(Path::new(GOLDEN).join(f)).unwrap();
        let summary: Value = serde_json::from_str(&text).unwrap();
        let config_text = serde_json::to_string(&summary["config"]).unwrap();
        let config = RunConfig::parse(&config_text).unwrap();
        assert_eq!(serde_json::to_value(&config).unwrap(), summary["config"], "{f}");

        let path = dir.join(format!("config-{f}"));
        std::fs::write(&path, &config_text).unwrap();
        let out = dir.join(f.trim_end_matches(".json"));
        let o = ecd(&["examples", "--config", path.to_str().unwrap(), "-o", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", stderr(&o));
        assert_eq!(std::fs::read_to_string(out.join(f)).unwrap(), text, "{f}");
    }
}

#[test]
fn every_quoted_value_appears_once() {
    let mut seen = vec![];
    for f in files(Path::new(GOLDEN)).iter().filter(|f| f.ends_with(".json")) {
        let v: Value = serde_json::from_str(&std::fs::read_to_string(Path::new(GOLDEN).join(f)).unwrap()).unwrap();
        for e in v["values"].as_array().into_iter().flatten() {
            for key in ["reported", "computed", "abs_dev", "rel_dev"] {
                assert!(e[key].is_number(), "{f}: {e}");
            }
            let key = format!("{} {} {}", e["quantity"], e["alpha"], e["x"]);
            assert!(!seen.contains(&key), "{key} listed twice");
            seen.push(key);
        }
    }
    // 8 for f1, 6 for f2, 3 each for f3 and f4
    assert_eq!(seen.len(), 20);
}

fn summary_value(file: &str, quantity: &str, x: f64, alpha: Option<f64>) -> Value {
    let v: Value = serde_json::from_str(&std::fs::read_to_string(Path::new(GOLDEN).join(file)).unwrap()).unwrap();
    v["values"]
        .as_array()
        .unwrap()
        .iter()
        .find(|e| e["quantity"] == quantity && e["x"].as_f64() == Some(x) && e["alpha"].as_f64() == alpha)
        .cloned()
        .unwrap_or_else(|| panic!("{quantity}({x}) missing from {file}"))
}

#[test]
fn example1_summary_reproduces_f1() {
    let e = summary_value("example1.json", "f1", 0.4, Some(0.7));
    assert_eq!(e["reported"].as_f64(), Some(1.032));
    assert!((e["computed"].as_f64().unwrap() - 1.032).abs() < 0.002);
}

#[test]
fn example3_summary_lists_f3() {
    let e = summary_value("example3.json", "f3", 0.086, None);
    assert_eq!(e["reported"].as_f64(), Some(0.0488));
    let (c, d) = (e["computed"].as_f64().unwrap(), e["abs_dev"].as_f64().unwrap());
    assert!(((c - 0.0488).abs() - d).abs() < 1e-15);
}

#[test]
fn fig2_difference_is_nonpositive() {
    let text = std::fs::read_to_string(Path::new(GOLDEN).join("fig2.csv")).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(header[0], "x");
    let col = header.iter().position(|h| *h == "diff").unwrap();
    let mut rows = 0;
    for line in lines {
        let d: f64 = line.split(',').nth(col).unwrap().parse().unwrap();
        assert!(d <= 0.0, "{line}");
        rows += 1;
    }
    assert_eq!(rows, 400);
}

#[test]
fn dist_table() {
    let o = ecd(&["dist", "--alpha", "1", "--beta", "1", "--lambda", "1", "--x", "0,1", "--format", "json"]);
    assert!(o.status.success());
    let rows: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(rows[0]["cdf"].as_f64(), Some(0.0));
    assert_eq!(rows[0]["sf"].as_f64(), Some(1.0));
    assert!((rows[1]["cdf"].as_f64().unwrap() - 0.820625).abs() < 1e-6);
    for key in ["sf", "pdf", "hazard", "reversed_hazard"] {
        assert!(rows[1][key].is_number(), "{key}");
    }

    let csv = stdout(&ecd(&["dist", "--alpha", "1", "--beta", "1", "--lambda", "1", "--x", "1", "--format", "csv"]));
    assert_eq!(csv.lines().next(), Some("x,cdf,sf,pdf,hazard,reversed_hazard"));
    assert!(csv.lines().nth(1).unwrap().starts_with("1,0.820625921,"));
}

#[test]
fn dist_rejects_bad_input() {
    let o = ecd(&["dist", "--alpha", "-1", "--beta", "1", "--lambda", "1", "--x", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("alpha") && stderr(&o).contains("-1"));
    let o = ecd(&["dist", "--alpha", "1", "--beta", "1", "--lambda", "1", "--x", "-2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("-2"));
    assert_eq!(ecd(&["dist", "--alpha", "1"]).status.code(), Some(1));
    assert_eq!(ecd(&["bogus"]).status.code(), Some(1));
    assert_eq!(ecd(&["--help"]).status.code(), Some(0));
}

#[test]
fn order_check_st_is_conclusive() {
    let o = run_with(&["order-check", "--relation", "st"], &example1_systems("0.7"));
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("A_le_B"));
    let o = run_with(&["order-check", "--relation", "st"], &example1_systems("1.5"));
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("B_le_A"));
}

#[test]
fn order_check_hr_reports_a_witness() {
    let o = run_with(
        &["order-check", "--relation", "hr", "--grid-points", "0.4,0.6,1.2,1.4", "--format", "json"],
        &example1_systems("0.7"),
    );
    assert_eq!(o.status.code(), Some(2));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let verdict = &v["verdicts"][0];
    assert_eq!(verdict["direction"], "Neither");
    let xs: Vec<f64> = verdict["witnesses"][0]["x"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    assert!(xs.contains(&0.6) && xs.contains(&1.2), "{xs:?}");
    assert!(RunConfig::parse(&v["config"].to_string()).is_ok());
}

#[test]
fn order_check_theorem_mode() {
    let o = run_with(&["order-check", "--theorem", "1"], &example1_systems("0.7"));
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("theorem 1: predicts A_le_B in st"));
    assert!(stdout(&o).contains("consistent"));

    let mut args = example1_systems("0.7");
    let i = args.iter().position(|a| a == "--b-lambda").unwrap();
    args[i + 1] = "0.5,0.7,1.5".into();
    let o = run_with(&["order-check", "--theorem", "1"], &args);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("equal component counts"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = scratch("config");
    let path = dir.join("run.json");
    std::fs::write(
        &path,
        format!(
            r#"{{"command": "order-check", "relation": "st",
                "system_a": {{"kind": "series", "alpha": [0.7], "beta": [2], "lambda": [{LAMBDA}]}},
                "system_b": {{"kind": "series", "alpha": [0.7], "beta": [2], "lambda": [{MU}]}}}}"#
        ),
    )
    .unwrap();
    let p = path.to_str().unwrap();
    let o = ecd(&["order-check", "--config", p]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("A_le_B"));
    // flags override the file: alpha 1.5 reverses the order
    let o = ecd(&["order-check", "--config", p, "--a-alpha", "1.5", "--b-alpha", "1.5"]);
    assert!(stdout(&o).contains("B_le_A"));
    // the file names a different command
    assert_eq!(ecd(&["mc-verify", "--config", p, "--seed", "1"]).status.code(), Some(1));

    std::fs::write(&path, r#"{"relation": "st", "colour": "red"}"#).unwrap();
    let o = ecd(&["order-check", "--config", p]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("unknown field"));
}

#[test]
fn output_flag_writes_a_file() {
    let dir = scratch("out");
    let path = dir.join("dist.csv");
    let o = ecd(&["dist", "--alpha", "2", "--beta", "1", "--lambda", "1", "--x", "0.5", "--format", "csv", "-o", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    assert!(std::fs::read_to_string(path).unwrap().starts_with("x,cdf"));
}

#[test]
fn schur_scan_verdicts() {
    let scan = |target: &str, vector: &str| {
        let o = ecd(&["schur-scan", "--target", target, "--alpha", "0.7", "--beta", "2", "--vector", vector, "--format", "json"]);
        assert!(o.status.success(), "{}", stderr(&o));
        serde_json::from_str::<Value>(&stdout(&o)).unwrap()["report"].clone()
    };
    assert_eq!(scan("series-sf-lambda", LAMBDA)["verdict"], "SchurConvex");
    assert_eq!(scan("parallel-cdf-lambda", LAMBDA)["verdict"], "SchurConcave");
    let tie = scan("series-sf-lambda", "1.3,1.3,1.3");
    assert_eq!(tie["verdict"], "Indeterminate");
    assert_eq!(tie["ties_skipped"], 3);
    assert!(tie["note"].as_str().unwrap().contains("no informative pair"));
}

#[test]
fn mc_verify_example1() {
    let o = run_with(&["mc-verify", "--seed", "20240601", "-n", "100000", "--format", "json"], &example1_systems("0.7"));
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    for s in v["systems"].as_array().unwrap() {
        let (k, n) = (s["within_band"].as_f64().unwrap(), s["points"].as_f64().unwrap());
        assert!(k / n >= 0.95, "{s}");
    }
    assert_eq!(v["st"]["direction"], "A_le_B");
}

#[test]
fn mc_verify_edge_cases() {
    let o = ecd(&["mc-verify", "--kind", "parallel", "--a-alpha", "1", "--a-beta", "1", "--a-lambda", "1", "-n", "500", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("warning"));

    let same = [
        "mc-verify", "--kind", "series", "--a-alpha", "0.7", "--a-beta", "2", "--a-lambda", LAMBDA, "--b-alpha", "0.7",
        "--b-beta", "2", "--b-lambda", LAMBDA, "--seed", "5", "-n", "20000",
    ];
    let o = ecd(&same);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("all 10 points inconclusive"), "{}", stdout(&o));

    let o = ecd(&["mc-verify", "--kind", "series", "--a-alpha", "1", "--a-beta", "1", "--a-lambda", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--seed"));
}
