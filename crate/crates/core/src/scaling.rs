//! Fitting `y = c N log2(N)^p` to measured costs.

use crate::error::{Error, Result};

/// Least-squares fit of `ln(y / N) = ln c + p ln(log2 N)`; returns `(p, c)`.
pub fn fit_polylog_exponent(ns: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    if ns.len() != ys.len() {
        return Err(Error::DimensionMismatch { expected: ns.len(), got: ys.len() });
    }
    if ns.len() < 2 {
        return Err(Error::Config("need at least two points to fit".into()));
    }
    if ns.iter().chain(ys).any(|v| !(*v > 0.0 && v.is_finite())) || ns.iter().any(|n| *n <= 2.0) {
        return Err(Error::Domain("fit needs N > 2 and positive values".into()));
    }
    let xs: Vec<f64> = ns.iter().map(|n| n.log2().ln()).collect();
    let zs: Vec<f64> = ns.iter().zip(ys).map(|(n, y)| (y / n).ln()).collect();
    let m = xs.len() as f64;
    let (mx, mz) = (xs.iter().sum::<f64>() / m, zs.iter().sum::<f64>() / m);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Domain("all N are equal".into()));
    }
    let sxz: f64 = xs.iter().zip(&zs).map(|(x, z)| (x - mx) * (z - mz)).sum();
    let p = sxz / sxx;
    Ok((p, (mz - p * mx).exp()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_exponent() {
        let ns = [4096.0, 8192.0, 16384.0, 32768.0];
        let ys: Vec<f64> = ns.iter().map(|n: &f64| 3e-7 * n * n.log2().powi(2)).collect();
        let (p, c) = fit_polylog_exponent(&ns, &ys).unwrap();
        assert!((p - 2.0).abs() < 1e-10);
        assert!((c - 3e-7).abs() < 1e-15);
    }

    #[test]
    fn rejects_degenerate_input() {
        assert!(fit_polylog_exponent(&[100.0], &[1.0]).is_err());
        assert!(fit_polylog_exponent(&[100.0, 100.0], &[1.0, 2.0]).is_err());
        assert!(fit_polylog_exponent(&[100.0, 200.0], &[1.0, 0.0]).is_err());
    }
}
