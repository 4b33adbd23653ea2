//! Flat-torus heat kernel as a product of circle kernels, evaluated in
//! whichever of the two theta-dual regimes converges fastest.

use super::Point;

/// Nearest-image displacement magnitude, in [0, L/2].  Evaluated through
/// |delta| so that swapping the endpoints gives bit-identical results.
pub(crate) fn min_image(delta: f64, l: f64) -> f64 {
    let d = delta.abs().rem_euclid(l);
    d.min(l - d)
}

/// Circle kernel by Gaussian image sum: (4 pi kt)^{-1/2} sum_w e^{-(d+wL)^2/4kt}.
fn circle_image(delta: f64, kt: f64, l: f64) -> f64 {
    let pref = 1.0 / (4.0 * std::f64::consts::PI * kt).sqrt();
    let mut acc = (-delta * delta / (4.0 * kt)).exp();
    let mut w = 1;
    loop {
        let a = delta + w as f64 * l;
        let b = delta - w as f64 * l;
        let term = (-a * a / (4.0 * kt)).exp() + (-b * b / (4.0 * kt)).exp();
        acc += term;
        if term < 1e-19 * acc || w > 64 {
            break;
        }
        w += 1;
    }
    pref * acc
}

/// Circle kernel by mode sum: (1/L)[1 + 2 sum_n e^{-(2 pi n/L)^2 kt} cos(2 pi n d/L)].
fn circle_mode(delta: f64, kt: f64, l: f64) -> f64 {
    let base = 2.0 * std::f64::consts::PI / l;
    let mut acc = 1.0;
    let mut n = 1;
    loop {
        let lam = (base * n as f64).powi(2);
        let damp = (-lam * kt).exp();
        if damp < 1e-19 {
            break;
        }
        acc += 2.0 * damp * (base * n as f64 * delta).cos();
        n += 1;
        if n > 4096 {
            break;
        }
    }
    acc / l
}

pub(crate) fn circle_kernel(delta: f64, kt: f64, l: f64, image_regime: bool) -> f64 {
    if image_regime {
        circle_image(delta, kt, l)
    } else {
        circle_mode(delta, kt, l)
    }
}

/// Product kernel on the rectangular torus; `kt` = kappa * t.
pub(crate) fn heat_kernel(lengths: &[f64], kt: f64, x: Point, y: Point) -> f64 {
    let lmin = lengths.iter().cloned().fold(f64::INFINITY, f64::min);
    let image_regime = kt <= 0.25 * lmin * lmin;
    let mut k = 1.0;
    for (d, l) in lengths.iter().enumerate() {
        let delta = min_image(x.0[d] - y.0[d], *l);
        k *= circle_kernel(delta, kt, *l, image_regime);
    }
    k
}
