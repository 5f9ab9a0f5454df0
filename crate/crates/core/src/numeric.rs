//! Log-space helpers shared by the MGF, oracle and bound code.

use statrs::function::factorial::ln_factorial;

/// Below this magnitude `x * ln(x)` is treated as exactly zero.
pub const XLOGX_FLOOR: f64 = 1e-300;

/// `x ln x` with the convention `0 ln 0 = 0`.
pub fn xlogx(x: f64) -> f64 {
    if x < XLOGX_FLOOR {
        0.0
    } else {
        x * x.ln()
    }
}

/// `ln(1 - p)` without cancellation for small `p`.
pub fn ln_one_minus(p: f64) -> f64 {
    (-p).ln_1p()
}

/// `ln(e^a + e^b)`.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `ln|e^a - e^b|`.
pub fn log_abs_diff_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    if hi == lo {
        return f64::NEG_INFINITY;
    }
    hi + (-(lo - hi).exp_m1()).ln()
}

/// A signed number stored as `sign * exp(log_abs)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedLog {
    pub sign: f64,
    pub log_abs: f64,
}

impl SignedLog {
    pub const ZERO: SignedLog = SignedLog {
        sign: 0.0,
        log_abs: f64::NEG_INFINITY,
    };

    pub fn new(sign: f64, log_abs: f64) -> Self {
        if sign == 0.0 || log_abs == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            SignedLog {
                sign: sign.signum(),
                log_abs,
            }
        }
    }

    pub fn value(self) -> f64 {
        self.sign * self.log_abs.exp()
    }

    pub fn add(self, other: SignedLog) -> SignedLog {
        if self.sign == 0.0 {
            return other;
        }
        if other.sign == 0.0 {
            return self;
        }
        if self.sign == other.sign {
            return SignedLog::new(self.sign, log_add_exp(self.log_abs, other.log_abs));
        }
        let sign = if self.log_abs >= other.log_abs {
            self.sign
        } else {
            other.sign
        };
        SignedLog::new(sign, log_abs_diff_exp(self.log_abs, other.log_abs))
    }
}

/// `ln(m!)`, exact table below 171 and log-gamma above.
pub fn log_factorial(m: u64) -> f64 {
    ln_factorial(m)
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.carry
    }
}

/// `count` points log-uniformly spaced between `lo` and `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..count)
                .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
                .collect()
        }
    }
}

/// Grid over (0,1) that is log-spaced toward both endpoints: half the points
/// approach 0 as `lo..0.5` and the mirror half approach 1 as `1 - lo..0.5`.
pub fn log_symmetric_unit_grid(lo: f64, count: usize) -> Vec<f64> {
    let left = count.div_ceil(2);
    let right = count - left;
    let mut grid = log_grid(lo, 0.5, left);
    let mut mirrored: Vec<f64> = log_grid(lo, 0.5, right + 1)
        .into_iter()
        .take(right)
        .map(|q| 1.0 - q)
        .collect();
    mirrored.reverse();
    grid.extend(mirrored);
    grid.sort_by(f64::total_cmp);
    grid
}

/// `count` points evenly spaced between `lo` and `hi` inclusive.
pub fn linear_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..count)
            .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xlogx_convention() {
        assert_eq!(xlogx(0.0), 0.0);
        assert_eq!(xlogx(1e-301), 0.0);
        assert_eq!(xlogx(1.0), 0.0);
        assert!((xlogx(0.5) - 0.5 * 0.5f64.ln()).abs() < 1e-16);
    }

    #[test]
    fn log_add_and_diff() {
        let a = 2.0f64.ln();
        let b = 3.0f64.ln();
        assert!((log_add_exp(a, b) - 5.0f64.ln()).abs() < 1e-15);
        assert!((log_abs_diff_exp(a, b) - 0.0).abs() < 1e-15);
        assert_eq!(log_abs_diff_exp(a, a), f64::NEG_INFINITY);
        assert_eq!(log_add_exp(f64::NEG_INFINITY, a), a);
    }

    #[test]
    fn signed_log_cancels() {
        let x = SignedLog::new(-1.0, 4.0f64.ln());
        let y = SignedLog::new(1.0, 1.0f64.ln());
        assert!((x.add(y).value() + 3.0).abs() < 1e-14);
        assert_eq!(x.add(SignedLog::new(1.0, 4.0f64.ln())), SignedLog::ZERO);
    }

    #[test]
    fn factorial_matches_product() {
        let direct: f64 = (1..=20).map(|k| (k as f64).ln()).sum();
        assert!((log_factorial(20) - direct).abs() < 1e-12);
        assert!(log_factorial(200).is_finite());
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::default();
        s.add(1e16);
        for _ in 0..10 {
            s.add(1.0);
        }
        s.add(-1e16);
        assert_eq!(s.total(), 10.0);
    }

    #[test]
    fn symmetric_grid_shape() {
        let g = log_symmetric_unit_grid(1e-12, 400);
        assert_eq!(g.len(), 400);
        assert!((g[0] - 1e-12).abs() < 1e-24);
        assert!((g[399] - (1.0 - 1e-12)).abs() < 1e-15);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert!(g.iter().all(|&p| p > 0.0 && p < 1.0));
    }
}
