//! J0/Y0 oracles that share no code with the library: double-double power
//! series for moderate arguments, integral representations beyond.

use std::f64::consts::PI;

/// Unevaluated sum `hi + lo`, roughly 32 significant digits.
#[derive(Clone, Copy, Debug)]
pub struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    fn new(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    fn two_sum(a: f64, b: f64) -> Self {
        let s = a + b;
        let bb = s - a;
        let err = (a - (s - bb)) + (b - bb);
        Dd { hi: s, lo: err }
    }

    fn add(self, o: Dd) -> Dd {
        let s = Dd::two_sum(self.hi, o.hi);
        let t = Dd::two_sum(self.lo, o.lo);
        let s = Dd::two_sum(s.hi, s.lo + t.hi);
        Dd::two_sum(s.hi, s.lo + t.lo)
    }

    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    fn mul(self, o: Dd) -> Dd {
        let p = self.hi * o.hi;
        let err = self.hi.mul_add(o.hi, -p);
        Dd::two_sum(p, err + self.hi * o.lo + self.lo * o.hi)
    }

    fn div_f(self, d: f64) -> Dd {
        let q1 = self.hi / d;
        let r = self.add(Dd::new(d).mul(Dd::new(q1)).neg());
        let q2 = r.hi / d;
        Dd::two_sum(q1, q2)
    }

    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

/// `(J0(x), Y0(x))` from the ascending series evaluated in double-double.
pub fn series_oracle(x: f64) -> (f64, f64) {
    let q = Dd::new(x).mul(Dd::new(x)).div_f(4.0);
    let mut term = Dd::new(1.0);
    let mut j = Dd::new(1.0);
    let mut harmonic = Dd::new(0.0);
    let mut s = Dd::new(0.0);
    for m in 1..400 {
        let mf = m as f64;
        term = term.mul(q).div_f(mf * mf).neg();
        harmonic = harmonic.add(Dd::new(1.0).div_f(mf));
        j = j.add(term);
        s = s.add(term.mul(harmonic).neg());
        if term.hi.abs() < 1e-40 && mf > x {
            break;
        }
    }
    let j0 = j.to_f64();
    let y0 = (2.0 / PI) * (((0.5 * x).ln() + 0.577_215_664_901_532_9) * j0 + s.to_f64());
    (j0, y0)
}

/// Nodes and weights of the 20-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre() -> Vec<(f64, f64)> {
    let n = 20;
    (0..n)
        .map(|i| {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

pub fn composite(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize, rule: &[(f64, f64)]) -> f64 {
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        total += rule.iter().map(|(t, w)| w * f(mid + 0.5 * h * t)).sum::<f64>() * 0.5 * h;
    }
    total
}

/// `(J0(x), Y0(x))` from the Bessel and Neumann integrals; meant for large `x`.
pub fn integral_oracle(x: f64, rule: &[(f64, f64)]) -> (f64, f64) {
    // Periodic analytic integrand: the trapezoid rule converges geometrically.
    let m = (2.0 * x) as usize + 200;
    let j0 = (0..m).map(|k| (x * (2.0 * PI * k as f64 / m as f64).sin()).cos()).sum::<f64>() / m as f64;
    let osc = composite(|t| (x * t.sin()).sin(), 0.0, PI, x as usize + 20, rule) / PI;
    let tail_end = (45.0 / x).asinh();
    let tail = composite(|t| (-x * t.sinh()).exp(), 0.0, tail_end, 60, rule);
    (j0, osc - 2.0 / PI * tail)
}

/// Series below 30, integrals above; the two overlap to 1e-13 near the switch.
pub fn oracle(x: f64, rule: &[(f64, f64)]) -> (f64, f64) {
    if x <= 30.0 {
        series_oracle(x)
    } else {
        integral_oracle(x, rule)
    }
}
