//! Derivative-free one-dimensional minimization.

const INV_PHI: f64 = 0.618_033_988_749_894_9; // (sqrt(5) - 1) / 2

/// Golden-section search for the minimizer of a unimodal `f` on the open
/// interval `(lo, hi)`; stops once the bracket is narrower than `tol`.
/// The endpoints themselves are never evaluated.
pub fn golden_section_min<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> f64 {
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        // bracket collapsed to adjacent floats
        if c <= a || d >= b || c >= d {
            break;
        }
    }
    if fc <= fd {
        c
    } else {
        d
    }
}
