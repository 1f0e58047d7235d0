use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use hidbf::efie::{dense_matvec, EntryOracle, RescaleStrategy};
use hidbf::geometry::generate_mesh;
use hidbf::hidbf::{hidbf_construct, lu_split, HidbfNode};
use hidbf::linalg::{rel_error, unit_lower_solve_in_place, upper_solve_in_place, C64};
use hidbf::scaling::fit_polylog_exponent;
use hidbf::solver::{random_solution, solve_preconditioned, Preconditioner, SolveConfig, SolveReport};

use crate::config::ExperimentConfig;
use crate::svg::{self, Panel, Series};

/// Largest N whose full H-IDBF reconstruction `verify` compares against the dense matrix.
const RECONSTRUCTION_LIMIT: usize = 2048;

/// Above this size the synthetic right-hand side uses the compressed operator.
const DENSE_RHS_LIMIT: usize = 10_000;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(String),
}

impl From<hidbf::Error> for CliError {
    fn from(e: hidbf::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

struct Built {
    oracle: EntryOracle,
    h: HidbfNode,
    construct_s: f64,
}

fn build(cfg: &ExperimentConfig, n: usize, extra: Option<(&str, f64)>) -> CliResult<Built> {
    let spec = cfg.curve_for(n, extra)?;
    let mesh = generate_mesh(&spec, cfg.geometry.points_per_wavelength)?;
    let oracle = EntryOracle::rescaled(mesh, RescaleStrategy::MaxFirstColumn)?;
    let start = Instant::now();
    let h = hidbf_construct(&oracle, 0..oracle.len(), &cfg.butterfly())?;
    Ok(Built { oracle, h, construct_s: start.elapsed().as_secs_f64() })
}

fn synthetic_problem(b: &Built, seed: u64) -> CliResult<(Vec<C64>, Vec<C64>)> {
    let n = b.oracle.len();
    let x_true = random_solution(n, seed);
    let rhs = if n <= DENSE_RHS_LIMIT { dense_matvec(&b.oracle, &x_true) } else { b.h.matvec(&x_true)? };
    Ok((x_true, rhs))
}

fn solve(b: &Built, rhs: &[C64], cfg: &SolveConfig) -> CliResult<SolveReport> {
    let (l, u) = lu_split(&b.h);
    Ok(solve_preconditioned(&b.h, &l, &u, rhs, cfg)?)
}

fn out_dir(cfg: &ExperimentConfig, out: Option<&Path>) -> CliResult<PathBuf> {
    let dir = out.map(Path::to_path_buf).unwrap_or_else(|| cfg.run.output.clone());
    fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn csv_writer(path: &Path) -> CliResult<csv::Writer<BufWriter<File>>> {
    Ok(csv::Writer::from_writer(BufWriter::new(File::create(path)?)))
}

pub fn cmd_solve(cfg: &ExperimentConfig, out: Option<&Path>) -> CliResult<i32> {
    let dir = out_dir(cfg, out)?;
    let mut runs = csv_writer(&dir.join("runs.csv"))?;
    runs.write_record(["N", "construct_s", "solve_s", "iters", "nonzeros", "max_rank", "solution_error", "converged"])?;
    for &target in &cfg.run.n_targets {
        let built = build(cfg, target, None)?;
        let n = built.oracle.len();
        if cfg.run.write_mesh {
            built.oracle.mesh().write_csv(BufWriter::new(File::create(dir.join(format!("mesh_{n}.csv")))?))?;
        }
        let (x_true, rhs) = synthetic_problem(&built, cfg.run.seed)?;
        let report = solve(&built, &rhs, &cfg.solve_config())?;
        let err = rel_error(&report.solution, &x_true);
        let solve_s = report.timings.get("solve").copied().unwrap_or(0.0);
        runs.write_record([
            n.to_string(),
            format!("{:.6}", built.construct_s),
            format!("{solve_s:.6}"),
            report.iterations.to_string(),
            built.h.nonzeros().to_string(),
            built.h.max_rank().to_string(),
            format!("{err:.6e}"),
            report.converged.to_string(),
        ])?;
        runs.flush()?;
        report.write_residual_csv(BufWriter::new(File::create(dir.join(format!("residuals_{n}.csv")))?))?;
        println!(
            "N={n} construct={:.3}s solve={solve_s:.3}s iters={} converged={} max_rank={} nonzeros={} solution_error={err:.3e}",
            built.construct_s,
            report.iterations,
            report.converged,
            built.h.max_rank(),
            built.h.nonzeros()
        );
    }
    Ok(0)
}

struct Checks {
    failed: Vec<String>,
}

impl Checks {
    fn check(&mut self, name: &str, n: usize, value: f64, tol: f64) {
        let pass = value <= tol;
        println!("{} {name} N={n} value={value:.3e} tol={tol:.1e}", if pass { "PASS" } else { "FAIL" });
        if !pass {
            self.failed.push(format!("{name} (N={n})"));
        }
    }
}

pub fn cmd_verify(cfg: &ExperimentConfig) -> CliResult<i32> {
    let limit = cfg.run.dense_limit;
    if let Some(&n) = cfg.run.n_targets.iter().find(|&&n| n > limit) {
        return Err(CliError::Usage(format!("verify needs dense oracles; N = {n} exceeds the dense limit {limit}")));
    }
    let eps = cfg.compression.epsilon;
    let mut checks = Checks { failed: Vec::new() };
    for &target in &cfg.run.n_targets {
        let mut built = build(cfg, target, None)?;
        if cfg.verify.inject_fault && !built.h.perturb_first_butterfly(C64::new(1.0, 0.0)) {
            println!("note: N={target} has no off-diagonal blocks to corrupt");
        }
        let n = built.oracle.len();
        let x = random_solution(n, cfg.run.seed);

        let fast = built.h.matvec(&x)?;
        let exact = dense_matvec(&built.oracle, &x);
        checks.check("matvec", n, rel_error(&fast, &exact), 10.0 * eps);

        let (l, u) = lu_split(&built.h);
        let (ld, ud) = (l.to_dense(), u.to_dense());
        let xl = l.solve(&x)?;
        let mut xl_dense = x.clone();
        unit_lower_solve_in_place(&ld, &mut xl_dense);
        checks.check("lower_solve_vs_substitution", n, rel_error(&xl, &xl_dense), 1e-9);
        checks.check("lower_solve_residual", n, rel_error(&ld.matvec(&xl), &x), 1e-9);
        let xu = u.solve(&x)?;
        let mut xu_dense = x.clone();
        upper_solve_in_place(&ud, &mut xu_dense, 0)?;
        checks.check("upper_solve_vs_substitution", n, rel_error(&xu, &xu_dense), 1e-9);
        checks.check("upper_solve_residual", n, rel_error(&ud.matvec(&xu), &x), 1e-9);

        if n <= RECONSTRUCTION_LIMIT {
            let fd = built.h.to_dense();
            let ad = hidbf::efie::assemble_dense(&built.oracle, limit)?;
            checks.check("reconstruction", n, fd.sub(&ad).frobenius_norm() / ad.frobenius_norm(), 10.0 * eps);
        } else {
            println!("SKIP reconstruction N={n} (above {RECONSTRUCTION_LIMIT})");
        }
    }
    if checks.failed.is_empty() {
        println!("all checks passed");
        Ok(0)
    } else {
        println!("failed: {}", checks.failed.join(", "));
        Ok(1)
    }
}

pub fn cmd_bench(cfg: &ExperimentConfig, out: Option<&Path>) -> CliResult<i32> {
    if cfg.run.n_targets.len() < 3 {
        return Err(CliError::Usage("bench needs at least three n_targets".into()));
    }
    let dir = out_dir(cfg, out)?;
    let mut rows: Vec<(f64, f64, f64, usize, f64, f64, usize)> = Vec::new();
    let mut w = csv_writer(&dir.join("scaling.csv"))?;
    w.write_record(["N", "construct_s", "solve_s", "iters", "solve_per_iter_s", "nonzeros", "max_rank"])?;
    for &target in &cfg.run.n_targets {
        let mut last: Option<(Built, SolveReport)> = None;
        let mut construct_min = f64::INFINITY;
        let mut solve_min = f64::INFINITY;
        for _ in 0..cfg.run.repeats {
            let built = build(cfg, target, None)?;
            let (_, rhs) = synthetic_problem(&built, cfg.run.seed)?;
            let report = solve(&built, &rhs, &cfg.solve_config())?;
            construct_min = construct_min.min(built.construct_s);
            solve_min = solve_min.min(report.timings.get("solve").copied().unwrap_or(0.0));
            last = Some((built, report));
        }
        let (built, report) = last.expect("at least one repeat");
        let n = built.oracle.len();
        let per_iter = solve_min / report.iterations.max(1) as f64;
        let nnz = built.h.nonzeros();
        w.write_record([
            n.to_string(),
            format!("{construct_min:.6}"),
            format!("{solve_min:.6}"),
            report.iterations.to_string(),
            format!("{per_iter:.6e}"),
            nnz.to_string(),
            built.h.max_rank().to_string(),
        ])?;
        w.flush()?;
        println!("N={n} construct={construct_min:.3}s solve={solve_min:.3}s iters={} nonzeros={nnz}", report.iterations);
        rows.push((n as f64, construct_min, solve_min, report.iterations, per_iter, nnz as f64, built.h.max_rank()));
    }
    let ns: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let construct: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let per_iter: Vec<f64> = rows.iter().map(|r| r.4).collect();
    let nnz: Vec<f64> = rows.iter().map(|r| r.5).collect();
    let mut fits = Vec::new();
    for (name, ys) in [("construct_s", &construct), ("solve_per_iter_s", &per_iter), ("nonzeros", &nnz)] {
        match fit_polylog_exponent(&ns, ys) {
            Ok((p, c)) => {
                println!("fit {name}: p={p:.3} c={c:.3e}");
                fits.push(format!("{name} p={p:.2}"));
            }
            Err(e) => println!("fit {name}: unavailable ({e})"),
        }
    }

    let reference = |ys: &[f64]| -> Vec<(f64, f64)> {
        // N log^2 N through the first measurement
        let k = ys[0] / (ns[0] * ns[0].log2().powi(2));
        ns.iter().map(|n| (*n, k * n * n.log2().powi(2))).collect()
    };
    let time_panel = Panel {
        title: "time".into(),
        x_label: "N".into(),
        y_label: "seconds".into(),
        series: vec![
            Series { name: "construction".into(), points: ns.iter().copied().zip(construct.iter().copied()).collect(), dashed: false },
            Series { name: "solve per iteration".into(), points: ns.iter().copied().zip(per_iter.iter().copied()).collect(), dashed: false },
            Series { name: "N log^2 N".into(), points: reference(&construct), dashed: true },
        ],
    };
    let memory_panel = Panel {
        title: format!("memory ({})", fits.join(", ")),
        x_label: "N".into(),
        y_label: "stored nonzeros".into(),
        series: vec![
            Series { name: "nonzeros".into(), points: ns.iter().copied().zip(nnz.iter().copied()).collect(), dashed: false },
            Series { name: "N log^2 N".into(), points: reference(&nnz), dashed: true },
        ],
    };
    fs::write(dir.join("scaling.svg"), svg::render(&[time_panel, memory_panel]))?;
    Ok(0)
}

pub fn cmd_iters(cfg: &ExperimentConfig, out: Option<&Path>) -> CliResult<i32> {
    let dir = out_dir(cfg, out)?;
    let sweep: Vec<Option<(String, f64)>> = match &cfg.sweep {
        Some(s) => s.values.iter().map(|v| Some((s.param.clone(), *v))).collect(),
        None => vec![None],
    };
    let mut w = csv_writer(&dir.join("iters.csv"))?;
    w.write_record(["N", "sweep_value", "iters_precond", "iters_none", "precond_capped", "none_capped"])?;
    let mut series = Vec::new();
    for entry in &sweep {
        let label = entry.as_ref().map(|(k, v)| format!("{k}={v}")).unwrap_or_else(|| cfg.geometry.shape.clone());
        let mut pre_pts = Vec::new();
        let mut none_pts = Vec::new();
        for &target in &cfg.run.n_targets {
            let built = build(cfg, target, entry.as_ref().map(|(k, v)| (k.as_str(), *v)))?;
            let n = built.oracle.len();
            let (_, rhs) = synthetic_problem(&built, cfg.run.seed)?;
            let base = cfg.solve_config();
            let pre = solve(&built, &rhs, &SolveConfig { preconditioner: Preconditioner::HidbfLu, ..base })?;
            let none = solve(&built, &rhs, &SolveConfig { preconditioner: Preconditioner::None, ..base })?;
            let value = entry.as_ref().map(|(_, v)| v.to_string()).unwrap_or_default();
            w.write_record([
                n.to_string(),
                value,
                pre.iterations.to_string(),
                none.iterations.to_string(),
                (!pre.converged).to_string(),
                (!none.converged).to_string(),
            ])?;
            w.flush()?;
            println!(
                "N={n} {label} iters_precond={}{} iters_none={}{}",
                pre.iterations,
                if pre.converged { "" } else { " (capped)" },
                none.iterations,
                if none.converged { "" } else { " (capped)" }
            );
            pre_pts.push((n as f64, pre.iterations as f64));
            none_pts.push((n as f64, none.iterations as f64));
        }
        series.push(Series { name: format!("{label} preconditioned"), points: pre_pts, dashed: false });
        series.push(Series { name: format!("{label} none"), points: none_pts, dashed: true });
    }
    if let Some(s) = &cfg.sweep {
        let pre: Vec<String> = series.iter().step_by(2).map(|s| s.points.last().map_or(0.0, |p| p.1).to_string()).collect();
        println!("trend over {} at largest N: preconditioned iterations {}", s.param, pre.join(" -> "));
    }
    let panel = Panel { title: "iteration counts".into(), x_label: "N".into(), y_label: "operator applications".into(), series };
    fs::write(dir.join("iters.svg"), svg::render(&[panel]))?;
    Ok(0)
}
