use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(cmd: &str, dir: &Path, config: &str) -> Output {
    let path = dir.join("config.toml");
    fs::write(&path, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_hidbf"))
        .args([cmd, "--config", path.to_str().unwrap(), "--out", dir.join("out").to_str().unwrap(), "--threads", "2"])
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const SMALL: &str = "[run]\nn_targets = [256, 512]\n[compression]\nleaf_size = 64\n";

#[test]
fn empty_targets_is_a_usage_error() {
    let dir = scratch("empty_targets");
    let o = run("solve", &dir, "[run]\nn_targets = []\n");
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("usage"));
}

#[test]
fn missing_config_is_a_usage_error() {
    let o = Command::new(env!("CARGO_BIN_EXE_hidbf"))
        .args(["verify", "--config", "/nonexistent/cfg.toml"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_passes_at_512() {
    let dir = scratch("verify_pass");
    let o = run("verify", &dir, "[run]\nn_targets = [512]\n[compression]\nleaf_size = 64\n");
    let text = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{text}");
    assert!(text.contains("PASS matvec"));
    assert!(text.contains("PASS reconstruction"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn verify_reports_an_injected_fault() {
    let dir = scratch("verify_fault");
    let o = run("verify", &dir, "[run]\nn_targets = [512]\n[compression]\nleaf_size = 64\n[verify]\ninject_fault = true\n");
    let text = stdout(&o);
    assert_eq!(o.status.code(), Some(1), "{text}");
    assert!(text.contains("FAIL matvec"));
}

#[test]
fn verify_refuses_sizes_above_the_dense_limit() {
    let dir = scratch("verify_limit");
    let o = run("verify", &dir, "[run]\nn_targets = [512, 9000]\n");
    assert_eq!(o.status.code(), Some(2));
    let o = run("verify", &dir, "[run]\nn_targets = [512]\ndense_limit = 300\n");
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bench_needs_three_targets() {
    let dir = scratch("bench_refuse");
    assert_eq!(run("bench", &dir, "[run]\nn_targets = [256]\n").status.code(), Some(2));
    assert_eq!(run("bench", &dir, SMALL).status.code(), Some(2));
}

/// Drops the wall-clock columns of a CSV file.
fn without_timings(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header: Vec<String> = r.headers().unwrap().iter().map(String::from).collect();
    let keep: Vec<usize> = (0..header.len()).filter(|&i| !header[i].ends_with("_s")).collect();
    let mut rows = vec![keep.iter().map(|&i| header[i].clone()).collect::<Vec<_>>()];
    for rec in r.records() {
        let rec = rec.unwrap();
        rows.push(keep.iter().map(|&i| rec[i].to_string()).collect());
    }
    rows
}

#[test]
fn solve_is_deterministic_apart_from_timings() {
    let a = scratch("solve_a");
    let b = scratch("solve_b");
    let cfg = "[run]\nn_targets = [256, 512]\nseed = 7\nwrite_mesh = true\n[compression]\nleaf_size = 64\n";
    for dir in [&a, &b] {
        let o = run("solve", dir, cfg);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let runs = without_timings(&a.join("out/runs.csv"));
    assert_eq!(runs[0], ["N", "iters", "nonzeros", "max_rank", "solution_error", "converged"]);
    assert_eq!(runs.len(), 3);
    assert_eq!(runs, without_timings(&b.join("out/runs.csv")));
    for row in &runs[1..] {
        assert_eq!(row[5], "true");
        assert!(row[4].parse::<f64>().unwrap() <= 1e-3);
    }
    for file in ["residuals_256.csv", "residuals_512.csv", "mesh_256.csv", "mesh_512.csv"] {
        assert_eq!(fs::read(a.join("out").join(file)).unwrap(), fs::read(b.join("out").join(file)).unwrap(), "{file}");
    }
}

#[test]
fn bench_writes_csv_and_well_formed_svg() {
    let dir = scratch("bench");
    let o = run("bench", &dir, "[run]\nn_targets = [256, 512, 1024]\n[compression]\nleaf_size = 64\n");
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = without_timings(&dir.join("out/scaling.csv"));
    assert_eq!(rows[0], ["N", "iters", "nonzeros", "max_rank"]);
    assert_eq!(rows.len(), 4);
    let svg = fs::read_to_string(dir.join("out/scaling.svg")).unwrap();
    let doc = roxmltree::Document::parse(&svg).unwrap();
    assert_eq!(doc.root_element().tag_name().name(), "svg");
    assert!(doc.descendants().any(|n| n.tag_name().name() == "polyline"));
    assert!(stdout(&o).contains("fit nonzeros"));
}

#[test]
fn iters_flags_capped_runs() {
    let dir = scratch("iters");
    let cfg = "[run]\nn_targets = [512]\n[compression]\nleaf_size = 64\n[solver]\nmax_iterations = 10\n";
    let o = run("iters", &dir, cfg);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let mut r = csv::Reader::from_path(dir.join("out/iters.csv")).unwrap();
    let header: Vec<String> = r.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, ["N", "sweep_value", "iters_precond", "iters_none", "precond_capped", "none_capped"]);
    let rec = r.records().next().unwrap().unwrap();
    assert_eq!(&rec[5], "true");
    assert!(rec[3].parse::<usize>().unwrap() <= 10);
    assert!(stdout(&o).contains("(capped)"));
    roxmltree::Document::parse(&fs::read_to_string(dir.join("out/iters.svg")).unwrap()).unwrap();
}

#[test]
fn iters_sweep_logs_the_trend() {
    let dir = scratch("iters_sweep");
    let cfg = "[run]\nn_targets = [400]\n[geometry]\nshape = \"open_arc\"\n[compression]\nleaf_size = 50\n[sweep]\nparam = \"angle\"\nvalues = [1.5707963, 3.1415926]\n";
    let o = run("iters", &dir, cfg);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("trend over angle"));
    let rows = csv::Reader::from_path(dir.join("out/iters.csv")).unwrap().records().count();
    assert_eq!(rows, 2);
}

#[test]
fn semicircle_5000_solution_error_in_csv() {
    let dir = scratch("solve_5000");
    let o = run("solve", &dir, "[run]\nn_targets = [5000]\n");
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = without_timings(&dir.join("out/runs.csv"));
    assert_eq!(rows[1][0], "5000");
    assert!(rows[1][4].parse::<f64>().unwrap() <= 1e-4, "{:?}", rows[1]);
}

/// Every CSV header the CLI writes appears verbatim in the README.
#[test]
fn readme_documents_csv_schemas() {
    let readme = include_str!("../../../README.md");
    let dir = scratch("schemas");
    let cfg = "[run]\nn_targets = [256, 300, 400]\nwrite_mesh = true\n[compression]\nleaf_size = 64\n";
    for cmd in ["solve", "bench", "iters"] {
        assert_eq!(run(cmd, &dir, cfg).status.code(), Some(0), "{cmd}");
    }
    for file in ["runs.csv", "residuals_256.csv", "scaling.csv", "iters.csv", "mesh_256.csv"] {
        let text = fs::read_to_string(dir.join("out").join(file)).unwrap();
        let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
        assert!(readme.contains(&format!("\n{header}\n")), "{file}: {header}");
    }
}
