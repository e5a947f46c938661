use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn heatbound(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heatbound"))
        .args(args)
        .env_remove("HEATBOUND_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

const GOOD_SWEEP: &str = r#"
[domain]
kind = "box"
dim = 2
bcs = ["DNND", "DDDD"]

[sampling]
mode = "random"
samples = 12
seed = 3

[bounds]
select = ["11", "22", "dirichlet", "vdb-hull"]
"#;

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn constants_csv_is_stable_and_complete() {
    let a = heatbound(&["constants", "--dim", "2"]);
    let b = heatbound(&["constants", "--dim", "2"]);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let header = text.lines().next().unwrap();
    for col in ["c1", "c2", "c3", "c4", "c5", "c6"] {
        assert!(header.split(',').any(|c| c == col), "missing {col} in {header}");
    }
    // 1/(4 pi) printed to 17 significant digits
    assert!(text.contains("7.9577471545947673e-2"), "{text}");
}

#[test]
fn constants_json_mirrors_csv() {
    let csv = stdout(&heatbound(&["constants", "--dim", "3", "--m", "3"]));
    let json = stdout(&heatbound(&["constants", "--dim", "3", "--m", "3", "--format", "json"]));
    let rows: serde_json::Value = serde_json::from_str(&json).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), csv.lines().count() - 1);
    let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
    let keys: Vec<&str> = rows[0].as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(header, keys);
}

#[test]
fn order_below_minimum_is_a_usage_error() {
    let out = heatbound(&["constants", "--dim", "4", "--m", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("error"));
}

#[test]
fn bound_outside_validity_range_exits_2() {
    // R = 1, so R^2/8 = 0.125
    let out = heatbound(&["bound", "--thm", "11", "--dim", "2", "--rho-x", "0.5", "--t", "0.2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("R^2/8"), "{}", stderr(&out));
}

#[test]
fn bound_reports_breakdown() {
    let out = heatbound(&["bound", "--thm", "22", "--dim", "3", "--rho-x", "0.5", "--t", "0.05", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let row = &v[0];
    let prefactor = row["prefactor"].as_f64().unwrap();
    let jm = row["jm_value"].as_f64().unwrap();
    let time = row["time_factor"].as_f64().unwrap();
    let bound = row["value"].as_f64().unwrap();
    assert!((prefactor * jm * time - bound).abs() <= 1e-12 * bound);
}

#[test]
fn zero_boundary_distance_is_rejected() {
    let out = heatbound(&["bound", "--thm", "dirichlet", "--dim", "2", "--rho-x", "0", "--t", "0.1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_theorem_is_a_usage_error() {
    let out = heatbound(&["bound", "--thm", "99", "--dim", "2", "--rho-x", "0.5", "--t", "0.1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unreachable_trace_tolerance_exits_3() {
    let out = heatbound(&[
        "bound", "--thm", "neumann41", "--dim", "2", "--rho-x", "0.5", "--t", "0.01", "--trace-tol", "1e-12",
    ]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
}

#[test]
fn verify_passes_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "sweep.toml", GOOD_SWEEP);
    let out_a = dir.path().join("a.csv");
    let out_b = dir.path().join("b.csv");
    for out in [&out_a, &out_b] {
        let run = heatbound(&["verify", &cfg, "--out", out.to_str().unwrap()]);
        assert_eq!(run.status.code(), Some(0), "{}", stderr(&run));
    }
    let a = fs::read_to_string(&out_a).unwrap();
    assert_eq!(a, fs::read_to_string(&out_b).unwrap());
    // header plus 12 samples for each of two boundary choices
    assert_eq!(a.lines().count(), 1 + 24);
    assert!(a.lines().skip(1).all(|l| l.contains(",pass,")), "{a}");

    let reseeded = dir.path().join("c.csv");
    heatbound(&["verify", &cfg, "--seed", "4", "--out", reseeded.to_str().unwrap()]);
    assert_ne!(a, fs::read_to_string(&reseeded).unwrap());
}

#[test]
fn config_errors_carry_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let text = "[domain]\nkind = \"box\"\ndim = 2\nbcs = [\"DDDD\"]\n[sampling]\nmode = \"random\"\nsamples = 4\n[bounds]\nselect = [\"11\"]\n";
    let cfg = write_config(dir.path(), "noseed.toml", text);
    let out = heatbound(&["verify", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 6"), "{}", stderr(&out));

    let text = "[domain]\nkind = \"box\"\ndim = 2\nbcs = [\"DDD\"]\n[sampling]\nmode = \"grid\"\n[bounds]\nselect = [\"11\"]\n";
    let cfg = write_config(dir.path(), "badbc.toml", text);
    let out = heatbound(&["verify", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 4"), "{}", stderr(&out));
}

#[test]
fn missing_config_file_is_a_usage_error() {
    let out = heatbound(&["verify", "/nonexistent/sweep.toml"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn compare_reports_crossover_in_dimension_five() {
    let out = heatbound(&["compare", "--dim", "5", "--points", "8"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    let first = text.lines().nth(1).unwrap();
    assert!(first.ends_with(",true,") || first.contains(",true,"), "{first}");
    assert!(stderr(&out).contains("crossover"), "{}", stderr(&out));
}

#[test]
fn cutoff_table_lists_known_polynomials() {
    let out = heatbound(&["cutoff-table", "--n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("3s^2 - 2s^3"));
    assert!(text.contains("10s^3 - 15s^4 + 6s^5"));
    assert!(text.contains("1.5000000000000000e0"));
}

#[test]
fn spectrum_is_cached_between_runs() {
    let dir = tempfile::tempdir().unwrap();
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_heatbound"))
            .args(["spectrum", "--dim", "2", "--lambda-max", "200"])
            .env("HEATBOUND_CACHE_DIR", dir.path())
            .output()
            .unwrap()
    };
    let first = run();
    assert_eq!(first.status.code(), Some(0), "{}", stderr(&first));
    let cached: Vec<_> = fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(cached.len(), 1);
    let second = run();
    assert_eq!(second.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
}
