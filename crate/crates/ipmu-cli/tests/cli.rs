//! End-to-end tests driving the compiled binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const LINE3: &str = "\
IPMU 1
3 4 1 3
1 1
2 1
3 1
1 2 1 2 2
2 1 1 2 2
2 3 1 4 4
3 2 1 4 4
";

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ipmu"))
}

fn run_ok(args: &[&str], dir: &Path) -> Output {
    let out = bin().args(args).current_dir(dir).output().expect("spawn ipmu");
    assert!(
        out.status.success(),
        "ipmu {args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Record JSON with the timing field removed, for rerun comparisons.
fn without_timing(json: &str) -> serde_json::Value {
    let mut value: serde_json::Value = serde_json::from_str(json).unwrap();
    value.as_object_mut().unwrap().remove("wall_time_ms");
    value
}

fn write_line3(dir: &Path) -> PathBuf {
    let path = dir.join("line3.ipmu");
    std::fs::write(&path, LINE3).unwrap();
    path
}

#[test]
fn generate_is_deterministic_and_named_predictably() {
    let tmp = TempDir::new().unwrap();
    let args = [
        "generate", "--n", "40", "--m", "100", "--p", "2", "--budget", "50", "--type", "P",
        "--count", "5", "--seed", "11", "--out", "a",
    ];
    run_ok(&args, tmp.path());
    let mut again = args;
    again[again.len() - 1] = "b";
    run_ok(&again, tmp.path());
    for k in 0..5 {
        let name = format!("P_n40_m100_p2_B50_s11_i{k}.ipmu");
        let first = std::fs::read(tmp.path().join("a").join(&name)).unwrap();
        let second = std::fs::read(tmp.path().join("b").join(&name)).unwrap();
        assert_eq!(first, second, "{name} differs between runs");
    }
}

#[test]
fn generate_density_resolves_arc_count() {
    let tmp = TempDir::new().unwrap();
    let out = run_ok(
        &[
            "generate", "--n", "100", "--density", "0.25", "--p", "5", "--budget", "100",
            "--type", "R", "--out", ".",
        ],
        tmp.path(),
    );
    let path = stdout_of(&out).trim().to_string();
    assert!(path.contains("_m2475_"), "unexpected name {path}");
    let text = std::fs::read_to_string(tmp.path().join(path)).unwrap();
    assert!(text.starts_with("IPMU 1\n100 2475 5 100\n"));
}

#[test]
fn generate_rejects_invalid_median_count() {
    let tmp = TempDir::new().unwrap();
    let out = bin()
        .args(["generate", "--n", "10", "--m", "30", "--p", "0", "--budget", "1", "--type", "R"])
        .current_dir(tmp.path())
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("p must satisfy"));
}

#[test]
fn kh_solve_is_deterministic_and_consumes_no_seed() {
    let tmp = TempDir::new().unwrap();
    let instance = write_line3(tmp.path());
    let instance = instance.to_str().unwrap();
    let a = run_ok(&["solve", "--algorithm", "kh", instance], tmp.path());
    let b = run_ok(&["solve", "--algorithm", "kh", instance], tmp.path());
    let record = without_timing(&stdout_of(&a));
    assert_eq!(record, without_timing(&stdout_of(&b)));
    assert_eq!(record["objective"], 3.0);
    assert_eq!(record["medians"][0], 1);
    assert!(record["config"].get("seed").is_none());
}

#[test]
fn grasp_solve_reruns_identically_for_a_seed() {
    let tmp = TempDir::new().unwrap();
    run_ok(
        &[
            "generate", "--n", "20", "--m", "80", "--p", "3", "--budget", "60", "--type", "R",
            "--seed", "9", "--out", ".",
        ],
        tmp.path(),
    );
    let instance = "R_n20_m80_p3_B60_s9_i0.ipmu";
    let args = ["solve", "--algorithm", "grasp", "--seed", "42", instance];
    let a = run_ok(&args, tmp.path());
    let b = run_ok(&args, tmp.path());
    assert_eq!(without_timing(&stdout_of(&a)), without_timing(&stdout_of(&b)));

    // thread count must not change the result
    let one = run_ok(
        &["solve", "--algorithm", "grasp", "--seed", "42", "--threads", "1", instance],
        tmp.path(),
    );
    let mut lhs = without_timing(&stdout_of(&a));
    let mut rhs = without_timing(&stdout_of(&one));
    lhs["config"].as_object_mut().unwrap().remove("threads");
    rhs["config"].as_object_mut().unwrap().remove("threads");
    assert_eq!(lhs, rhs);
}

#[test]
fn records_revalidate_against_the_library() {
    let tmp = TempDir::new().unwrap();
    let instance_path = write_line3(tmp.path());
    let out = run_ok(
        &["solve", "--algorithm", "grasp", "--seed", "1", instance_path.to_str().unwrap()],
        tmp.path(),
    );
    let record: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    let instance = ipmu::instance::Instance::parse(LINE3).unwrap();
    let cache = ipmu::paths::PathCache::compute(&instance).unwrap();
    let medians: Vec<usize> =
        record["medians"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap() as usize).collect();
    let mut b = vec![0.0; instance.m()];
    for entry in record["upgrades"].as_array().unwrap() {
        b[entry["arc"].as_u64().unwrap() as usize] = entry["amount"].as_f64().unwrap();
    }
    let recomputed =
        ipmu::upgrade::objective_with_plan(&instance, &cache, &medians, &b).unwrap();
    assert!((recomputed - record["objective"].as_f64().unwrap()).abs() < 1e-6);
}

#[test]
fn exact_certifies_line3_and_compares_at_zero_deviation() {
    let tmp = TempDir::new().unwrap();
    let instance = write_line3(tmp.path());
    let instance = instance.to_str().unwrap();
    run_ok(
        &["solve", "--algorithm", "grasp", "--seed", "7", "--out", "run.json", instance],
        tmp.path(),
    );
    let out = run_ok(&["exact", "--compare", "run.json", instance], tmp.path());
    let record: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(record["optimality"], "certified");
    assert_eq!(record["objective"], 3.0);
    assert_eq!(record["ties"], 2);
    assert_eq!(record["explored"], 3);
    assert_eq!(record["deviation_percent"], 0.0);
}

#[test]
fn exact_refuses_oversized_enumerations_with_the_count() {
    let tmp = TempDir::new().unwrap();
    run_ok(
        &[
            "generate", "--n", "100", "--density", "0.25", "--p", "10", "--budget", "100",
            "--type", "R", "--out", ".",
        ],
        tmp.path(),
    );
    let out = bin()
        .args(["exact", "R_n100_m2475_p10_B100_s0_i0.ipmu"])
        .current_dir(tmp.path())
        .output()
        .unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("17310309456440"), "missing C(100,10) in: {stderr}");
}

#[test]
fn ssg_reports_stats_and_renders_dot() {
    let tmp = TempDir::new().unwrap();
    let instance = write_line3(tmp.path());
    let out = run_ok(
        &["ssg", "--dot", "line3.dot", instance.to_str().unwrap()],
        tmp.path(),
    );
    let csv = stdout_of(&out);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "rank,objective,basin_size");
    assert_eq!(lines.len(), 3); // two local optima
    let dot = std::fs::read_to_string(tmp.path().join("line3.dot")).unwrap();
    assert!(dot.starts_with("digraph"));
    assert_eq!(dot.matches("->").count(), 1);
}

#[test]
fn bench_continues_past_broken_instances_but_exits_nonzero() {
    let tmp = TempDir::new().unwrap();
    let batch = tmp.path().join("batch");
    std::fs::create_dir(&batch).unwrap();
    std::fs::write(batch.join("a_good.ipmu"), LINE3).unwrap();
    std::fs::write(batch.join("b_broken.ipmu"), "not an instance\n").unwrap();
    let out = bin()
        .args(["bench", "--algorithms", "kh", "batch"])
        .current_dir(tmp.path())
        .output()
        .unwrap();
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("b_broken"), "no skip notice in: {stderr}");
    let csv = String::from_utf8_lossy(&out.stdout);
    assert!(csv.lines().count() == 2 && csv.contains("U,kh,1,"), "csv: {csv}");
}

#[test]
fn bench_aggregates_and_reruns_identically_modulo_timing() {
    let tmp = TempDir::new().unwrap();
    for (kind, seed) in [("P", "21"), ("R", "22")] {
        run_ok(
            &[
                "generate", "--n", "12", "--m", "40", "--p", "2", "--budget", "30", "--type",
                kind, "--count", "2", "--seed", seed, "--out", "batch",
            ],
            tmp.path(),
        );
    }
    let args = ["bench", "--algorithms", "grasp,kh,exact", "--seed", "3", "batch"];
    let a = run_ok(&args, tmp.path());
    let b = run_ok(&args, tmp.path());

    let strip_timing = |csv: &str| -> Vec<String> {
        csv.lines()
            .map(|line| {
                let mut fields: Vec<&str> = line.split(',').collect();
                fields.remove(4); // avg_time_ms
                fields.join(",")
            })
            .collect()
    };
    let table_a = strip_timing(&stdout_of(&a));
    assert_eq!(table_a, strip_timing(&stdout_of(&b)));

    // one row per (type, algorithm); kh aggregate deviation >= grasp's
    assert_eq!(table_a.len(), 1 + 6);
    let dev_of = |kind: &str, algo: &str| -> f64 {
        let row = table_a
            .iter()
            .find(|r| r.starts_with(&format!("{kind},{algo},")))
            .unwrap_or_else(|| panic!("no row for {kind},{algo}"));
        row.split(',').nth(4).unwrap().parse().unwrap()
    };
    for kind in ["P", "R"] {
        assert!(dev_of(kind, "kh") >= dev_of(kind, "grasp"));
        assert_eq!(dev_of(kind, "exact"), 0.0);
    }
}
