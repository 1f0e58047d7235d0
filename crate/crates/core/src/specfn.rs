//! Zeroth-order Bessel functions of real positive argument and the Hankel
//! function of the second kind, `H0^(2)(x) = J0(x) - i Y0(x)`.
//!
//! Three regimes are used:
//!
//! * `x <= SERIES_MAX`: ascending power series (logarithmic series for `Y0`);
//! * `SERIES_MAX < x < ASYMPTOTIC_MIN`: Miller backward recurrence for the
//!   even-order `J_{2k}`, normalized by `J0 + 2 sum J_{2k} = 1`, with `Y0`
//!   from the Neumann series in the same `J_{2k}`;
//! * `x >= ASYMPTOTIC_MIN`: Hankel asymptotic expansion truncated once the
//!   terms fall below double precision.
//!
//! The asymptotic series alone tops out near `1e-7` at `x = 8`, which is why
//! the recurrence band exists.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Upper end of the power-series regime.
pub const SERIES_MAX: f64 = 8.0;

/// Lower end of the asymptotic regime.
pub const ASYMPTOTIC_MIN: f64 = 20.0;

fn check_domain(x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("Bessel argument must be finite and positive, got {x}")))
    }
}

/// Bessel function of the first kind, order zero.
pub fn bessel_j0(x: f64) -> Result<f64> {
    check_domain(x)?;
    Ok(j0_unchecked(x))
}

/// Bessel function of the second kind, order zero.
pub fn bessel_y0(x: f64) -> Result<f64> {
    check_domain(x)?;
    Ok(y0_unchecked(x))
}

/// Zeroth-order Hankel function of the second kind.
pub fn hankel0_second(x: f64) -> Result<Complex64> {
    check_domain(x)?;
    Ok(hankel0_second_unchecked(x))
}

pub(crate) fn j0_unchecked(x: f64) -> f64 {
    if x <= SERIES_MAX {
        j0_series(x)
    } else if x < ASYMPTOTIC_MIN {
        miller(x).0
    } else {
        asymptotic(x).0
    }
}

pub(crate) fn y0_unchecked(x: f64) -> f64 {
    if x <= SERIES_MAX {
        y0_series(x, j0_series(x))
    } else if x < ASYMPTOTIC_MIN {
        miller(x).1
    } else {
        asymptotic(x).1
    }
}

#[inline]
pub(crate) fn hankel0_second_unchecked(x: f64) -> Complex64 {
    let (j0, y0) = if x <= SERIES_MAX {
        let j = j0_series(x);
        (j, y0_series(x, j))
    } else if x < ASYMPTOTIC_MIN {
        miller(x)
    } else {
        asymptotic(x)
    };
    Complex64::new(j0, -y0)
}

pub(crate) fn j0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut m = 1.0;
    loop {
        term *= -q / (m * m);
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) || m > 200.0 {
            break;
        }
        m += 1.0;
    }
    sum
}

pub(crate) fn y0_series(x: f64, j0: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut harmonic = 0.0;
    let mut sum = 0.0;
    let mut m = 1.0;
    loop {
        term *= -q / (m * m);
        harmonic += 1.0 / m;
        let t = -term * harmonic;
        sum += t;
        if t.abs() < 1e-17 * sum.abs().max(1e-300) || m > 200.0 {
            break;
        }
        m += 1.0;
    }
    (2.0 / PI) * (((0.5 * x).ln() + EULER_GAMMA) * j0 + sum)
}

/// `(J0, Y0)` by backward recurrence; valid for moderate `x`.
pub(crate) fn miller(x: f64) -> (f64, f64) {
    let start = x + 30.0 + 10.0 * x.cbrt();
    let mut k = 2 * ((start as usize) / 2 + 1);
    let mut next = 0.0; // J_{k+1}
    let mut cur = 1e-200; // J_k
    let mut norm = 0.0;
    let mut neumann = 0.0;
    while k > 0 {
        if k.is_multiple_of(2) {
            norm += 2.0 * cur;
            let kk = (k / 2) as f64;
            let sign = if (k / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
            neumann += sign * cur / kk;
        }
        let prev = (2.0 * k as f64 / x) * cur - next;
        next = cur;
        cur = prev;
        k -= 1;
    }
    // cur = unnormalized J0
    norm += cur;
    let j0 = cur / norm;
    let neumann = neumann / norm;
    let y0 = (2.0 / PI) * ((0.5 * x).ln() + EULER_GAMMA) * j0 - (4.0 / PI) * neumann;
    (j0, y0)
}

/// `(J0, Y0)` from the Hankel asymptotic expansion.
pub(crate) fn asymptotic(x: f64) -> (f64, f64) {
    let (p, q) = asymptotic_pq(x);
    let (s, c) = x.sin_cos();
    // chi = x - pi/4
    let cos_chi = (c + s) * FRAC_1_SQRT_2;
    let sin_chi = (s - c) * FRAC_1_SQRT_2;
    let amp = (2.0 / (PI * x)).sqrt();
    (amp * (p * cos_chi - q * sin_chi), amp * (p * sin_chi + q * cos_chi))
}

fn asymptotic_pq(x: f64) -> (f64, f64) {
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0f64;
    let mut last = f64::MAX;
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        term *= -(odd * odd) / (k as f64 * 8.0 * x);
        let mag = term.abs();
        if mag > last {
            break;
        }
        last = mag;
        // P takes t0 - t2 + t4 ..., Q takes t1 - t3 + ...
        match k % 4 {
            0 => p += term,
            1 => q += term,
            2 => p -= term,
            _ => q -= term,
        }
        if mag < 1e-18 {
            break;
        }
    }
    (p, q)
}
