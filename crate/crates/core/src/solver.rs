//! TFQMR with and without the H-IDBF-LU preconditioner, plus dense
//! oracles (LU solve, eigenvalues) used for verification.

use std::collections::BTreeMap;
use std::io::Write;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hidbf::{lower_solve, upper_solve, HidbfNode, TriangularView};
use crate::linalg::{dot_h, eigenvalues, norm2, CMatrix, LuFactors, C64, ZERO};

/// Largest matrix accepted by [`spectrum_diagnostic`].
pub const SPECTRUM_LIMIT: usize = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preconditioner {
    None,
    HidbfLu,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveConfig {
    /// Relative residual tolerance.
    pub tolerance: f64,
    /// Budget of operator applications.
    pub max_iterations: usize,
    pub preconditioner: Preconditioner,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self { tolerance: 1e-5, max_iterations: 3000, preconditioner: Preconditioner::HidbfLu }
    }
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub solution: Vec<C64>,
    /// Operator applications spent in the recurrence.
    pub iterations: usize,
    /// Estimated relative residual after each half-iteration, paired with the
    /// true relative residual when one was computed (restart checks).
    pub residual_history: Vec<ResidualSample>,
    pub converged: bool,
    /// `||b - A x|| / ||b||` of the system handed to the solver. For a
    /// preconditioned solve this is the original, unpreconditioned system.
    pub true_residual: f64,
    /// Wall-clock seconds per phase.
    pub timings: BTreeMap<String, f64>,
    /// Stored nonzeros of the operator representation, when known.
    pub peak_nonzeros: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResidualSample {
    pub iteration: usize,
    pub quasi_residual: f64,
    pub true_residual: Option<f64>,
}

impl SolveReport {
    /// Writes `iter,quasi_residual,true_residual`; the last column is empty where not computed.
    pub fn write_residual_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["iter", "quasi_residual", "true_residual"])?;
        for s in &self.residual_history {
            let t = s.true_residual.map(|v| format!("{v:e}")).unwrap_or_default();
            w.write_record([s.iteration.to_string(), format!("{:e}", s.quasi_residual), t])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn residual(op: &mut dyn FnMut(&[C64]) -> Result<Vec<C64>>, b: &[C64], x: &[C64]) -> Result<Vec<C64>> {
    let ax = op(x)?;
    Ok(b.iter().zip(ax).map(|(bi, ai)| bi - ai).collect())
}

fn axpy(y: &mut [C64], a: C64, x: &[C64]) {
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += a * xi);
}

/// Outcome of one TFQMR cycle.
enum Cycle {
    Converged,
    Restart,
    Breakdown(String),
    Exhausted,
}

/// Transpose-free QMR on `op(x) = b`.
///
/// Convergence needs the quasi-residual bound `tau sqrt(m + 1)` below
/// `tolerance ||r0||` and a true residual within `10 * tolerance`; otherwise
/// the recurrence restarts from the current iterate. A breakdown restarts
/// once with a perturbed shadow vector.
pub fn tfqmr(
    op: &mut dyn FnMut(&[C64]) -> Result<Vec<C64>>,
    b: &[C64],
    cfg: &SolveConfig,
) -> Result<SolveReport> {
    let start = Instant::now();
    let n = b.len();
    let bnorm = norm2(b);
    let mut report = SolveReport {
        solution: vec![ZERO; n],
        iterations: 0,
        residual_history: Vec::new(),
        converged: false,
        true_residual: 0.0,
        timings: BTreeMap::new(),
        peak_nonzeros: 0,
    };
    if bnorm == 0.0 {
        report.converged = true;
        report.timings.insert("solve".into(), start.elapsed().as_secs_f64());
        return Ok(report);
    }
    if !(cfg.tolerance > 0.0) {
        return Err(Error::Config("tolerance must be positive".into()));
    }

    let mut x = vec![ZERO; n];
    let mut r0 = b.to_vec();
    let mut perturb_shadow = false;
    let mut breakdowns = 0;
    loop {
        let outcome = tfqmr_cycle(op, b, bnorm, &mut x, &r0, perturb_shadow, cfg, &mut report)?;
        match outcome {
            Cycle::Converged => {
                report.converged = true;
                break;
            }
            Cycle::Exhausted => break,
            Cycle::Restart => {
                r0 = residual(op, b, &x)?;
            }
            Cycle::Breakdown(reason) => {
                breakdowns += 1;
                if breakdowns > 1 {
                    return Err(Error::Breakdown { iterations: report.iterations, reason });
                }
                perturb_shadow = true;
                r0 = residual(op, b, &x)?;
            }
        }
    }
    let r = residual(op, b, &x)?;
    report.true_residual = norm2(&r) / bnorm;
    report.solution = x;
    report.timings.insert("solve".into(), start.elapsed().as_secs_f64());
    Ok(report)
}

#[allow(clippy::too_many_arguments)]
fn tfqmr_cycle(
    op: &mut dyn FnMut(&[C64]) -> Result<Vec<C64>>,
    b: &[C64],
    bnorm: f64,
    x: &mut [C64],
    r0: &[C64],
    perturb_shadow: bool,
    cfg: &SolveConfig,
    report: &mut SolveReport,
) -> Result<Cycle> {
    let r0norm = norm2(r0);
    if r0norm <= cfg.tolerance * bnorm {
        return Ok(Cycle::Converged);
    }
    let shadow: Vec<C64> = if perturb_shadow {
        r0.iter()
            .enumerate()
            .map(|(i, v)| v + C64::new(1e-3 * r0norm / (r0.len() as f64).sqrt(), 0.0) * if i % 2 == 0 { 1.0 } else { -1.0 })
            .collect()
    } else {
        r0.to_vec()
    };
    let budget_left = |report: &SolveReport| report.iterations < cfg.max_iterations;
    if !budget_left(report) {
        return Ok(Cycle::Exhausted);
    }

    let mut w = r0.to_vec();
    let mut u = r0.to_vec();
    let mut au = op(&u)?;
    report.iterations += 1;
    let mut v = au.clone();
    let mut d = vec![ZERO; x.len()];
    let mut tau = r0norm;
    let mut theta = 0.0f64;
    let mut eta = ZERO;
    let mut rho = dot_h(&shadow, r0);
    let scale = norm2(&shadow);
    let target = cfg.tolerance * bnorm;
    let mut m = 0usize;

    loop {
        let sigma = dot_h(&shadow, &v);
        if sigma.norm() <= 1e-300 || sigma.norm() <= 1e-15 * scale * norm2(&v) {
            return Ok(Cycle::Breakdown(format!("sigma = {sigma:e}")));
        }
        let alpha = rho / sigma;
        let mut u_odd = u.clone();
        axpy(&mut u_odd, -alpha, &v);
        let mut au_odd: Option<Vec<C64>> = None;

        for half in 0..2 {
            if half == 1 {
                if !budget_left(report) {
                    return Ok(Cycle::Exhausted);
                }
                au_odd = Some(op(&u_odd)?);
                report.iterations += 1;
            }
            let (um, aum) = if half == 0 { (&u, &au) } else { (&u_odd, au_odd.as_ref().unwrap()) };
            axpy(&mut w, -alpha, aum);
            let coef = eta * (theta * theta) / alpha;
            d.iter_mut().zip(um.iter()).for_each(|(di, ui)| *di = ui + coef * *di);
            theta = norm2(&w) / tau;
            let c = 1.0 / (1.0 + theta * theta).sqrt();
            tau *= theta * c;
            eta = alpha * (c * c);
            axpy(x, eta, &d);
            let quasi = tau * ((m + 1) as f64).sqrt();
            report.residual_history.push(ResidualSample {
                iteration: report.iterations,
                quasi_residual: quasi / bnorm,
                true_residual: None,
            });
            m += 1;
            if quasi <= target {
                let r = residual(op, b, x)?;
                let true_rel = norm2(&r) / bnorm;
                if let Some(last) = report.residual_history.last_mut() {
                    last.true_residual = Some(true_rel);
                }
                return Ok(if true_rel <= 10.0 * cfg.tolerance { Cycle::Converged } else { Cycle::Restart });
            }
        }

        let rho_new = dot_h(&shadow, &w);
        if rho_new.norm() <= 1e-300 || rho_new.norm() <= 1e-15 * scale * norm2(&w) {
            return Ok(Cycle::Breakdown(format!("rho = {rho_new:e}")));
        }
        let beta = rho_new / rho;
        rho = rho_new;
        let au_odd = au_odd.expect("second half computed");
        // u_{2j+2} = w + beta u_{2j+1}
        u = w.clone();
        axpy(&mut u, beta, &u_odd);
        if !budget_left(report) {
            return Ok(Cycle::Exhausted);
        }
        au = op(&u)?;
        report.iterations += 1;
        // v = A u_{2j+2} + beta (A u_{2j+1} + beta v)
        for ((vi, ai), oi) in v.iter_mut().zip(&au).zip(&au_odd) {
            *vi = ai + beta * (oi + beta * *vi);
        }
    }
}

/// Solves `F x = b` through `L~^{-1} F U~^{-1} y = L~^{-1} b`, `x = U~^{-1} y`.
/// With `Preconditioner::None` this is plain TFQMR on `F`.
pub fn solve_preconditioned(
    a: &HidbfNode,
    lower: &TriangularView<'_>,
    upper: &TriangularView<'_>,
    b: &[C64],
    cfg: &SolveConfig,
) -> Result<SolveReport> {
    if b.len() != a.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), got: b.len() });
    }
    let nnz = a.nonzeros();
    let mut report = match cfg.preconditioner {
        Preconditioner::None => tfqmr(&mut |v| a.matvec(v), b, cfg)?,
        Preconditioner::HidbfLu => {
            let start = Instant::now();
            let rhs = lower_solve(lower, b)?;
            let mut op = |v: &[C64]| -> Result<Vec<C64>> {
                let t = upper_solve(upper, v)?;
                lower_solve(lower, &a.matvec(&t)?)
            };
            let mut rep = tfqmr(&mut op, &rhs, cfg)?;
            rep.solution = upper_solve(upper, &rep.solution)?;
            let bnorm = norm2(b);
            rep.true_residual = if bnorm == 0.0 {
                0.0
            } else {
                let ax = a.matvec(&rep.solution)?;
                norm2(&b.iter().zip(ax).map(|(bi, ai)| bi - ai).collect::<Vec<_>>()) / bnorm
            };
            rep.timings.insert("solve".into(), start.elapsed().as_secs_f64());
            rep
        }
    };
    report.peak_nonzeros = nnz;
    Ok(report)
}

/// Dense partial-pivoted LU solve.
pub fn dense_lu_solve(matrix: &CMatrix, b: &[C64]) -> Result<Vec<C64>> {
    if matrix.rows() != matrix.cols() {
        return Err(Error::DimensionMismatch { expected: matrix.rows(), got: matrix.cols() });
    }
    if b.len() != matrix.rows() {
        return Err(Error::DimensionMismatch { expected: matrix.rows(), got: b.len() });
    }
    Ok(LuFactors::new(matrix.clone())?.solve(b))
}

/// Eigenvalues sorted by increasing modulus, truncated to `count`.
pub fn spectrum_diagnostic(matrix: &CMatrix, count: usize) -> Result<Vec<C64>> {
    if matrix.rows() > SPECTRUM_LIMIT {
        return Err(Error::DenseLimit { n: matrix.rows(), limit: SPECTRUM_LIMIT });
    }
    let mut ev = eigenvalues(matrix)?;
    ev.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
    ev.truncate(count);
    Ok(ev)
}

/// Random vector with real and imaginary parts uniform on `[-1, 1]`.
pub fn random_solution(n: usize, seed: u64) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| C64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0))).collect()
}
