//! Bracketed root refinement: bisection to safety, secant to polish.

/// Refine a root of `f` inside [lo, hi] where f(lo) and f(hi) have opposite
/// signs; relative accuracy `rel_tol` on the abscissa.
pub fn bisect_secant(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64, rel_tol: f64) -> f64 {
    let (mut a, mut b) = (lo, hi);
    let mut fa = f(a);
    let fb = f(b);
    debug_assert!(fa * fb <= 0.0, "root not bracketed");
    if fa == 0.0 {
        return a;
    }
    if fb == 0.0 {
        return b;
    }
    for _ in 0..80 {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fa * fm < 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
        if (b - a).abs() <= rel_tol * 0.25 * (a.abs() + b.abs()) {
            break;
        }
    }
    // Secant polish from the bracket ends.
    let (mut x0, mut x1) = (a, b);
    let (mut f0, mut f1) = (f(x0), f(x1));
    for _ in 0..8 {
        if (f1 - f0).abs() < 1e-300 {
            break;
        }
        let x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        if !x2.is_finite() || x2 < lo.min(hi) || x2 > lo.max(hi) {
            break;
        }
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = f(x1);
        if (x1 - x0).abs() <= 1e-15 * x1.abs() {
            break;
        }
    }
    x1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_cubic_root() {
        let r = bisect_secant(|x| x * x * x - 2.0, 0.0, 2.0, 1e-12);
        assert!((r - 2.0_f64.powf(1.0 / 3.0)).abs() < 1e-12);
    }
}
