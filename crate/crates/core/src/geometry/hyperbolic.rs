//! Heat kernel on the hyperbolic plane via McKean's integral representation
//! for constant curvature -1/rho^2 (no discrete spectral basis exists).

use crate::special::gl_nodes_on;

/// K_t at geodesic separation delta = d/rho on H2 of radius rho; `kt` = kappa t.
///
/// With tau = kt/rho^2,
///   K = rho^{-2} (sqrt 2 / (4 pi)^{3/2}) tau^{-3/2} e^{-tau/4}
///       int_delta^inf s e^{-s^2/4tau} / sqrt(cosh s - cosh delta) ds,
/// and the substitution s = delta + v^2 with
/// cosh s - cosh delta = 2 sinh(delta + v^2/2) sinh(v^2/2) removes the
/// inverse-square-root endpoint.
pub(crate) fn heat_kernel(rho: f64, kt: f64, delta: f64) -> f64 {
    let tau = kt / (rho * rho);
    // Range where the Gaussian still contributes: (delta+v^2)^2 <= delta^2 + 190 tau.
    let smax = (delta * delta + 190.0 * tau).sqrt();
    let vmax = (smax - delta).max(1e-12).sqrt();
    let mut integral = 0.0;
    for panel in 0..6 {
        let lo = panel as f64 * vmax / 6.0;
        let hi = lo + vmax / 6.0;
        for &(x, w) in &gl_nodes_on(lo, hi, 32) {
            integral += w * integrand(delta, tau, x);
        }
    }
    let pref = 2.0_f64.sqrt() / (4.0 * std::f64::consts::PI).powf(1.5);
    pref * tau.powf(-1.5) * (-tau / 4.0).exp() * integral / (rho * rho)
}

/// Integrand with the 1/v from sqrt(sinh(v^2/2)) cancelled analytically, so
/// the v = 0 endpoint is regular:
/// f(v) = 2 sqrt(2) (delta+v^2) e^{-(delta+v^2)^2/4tau}
///        / [ sqrt(2 sinh(delta + v^2/2)) sqrt(sinh(x)/x) ],  x = v^2/2.
fn integrand(delta: f64, tau: f64, v: f64) -> f64 {
    let x = 0.5 * v * v;
    let s = delta + v * v;
    let sh_ratio = if x < 1e-4 {
        1.0 + x * x / 6.0 + x * x * x * x / 120.0
    } else {
        x.sinh() / x
    };
    let den = (2.0 * (delta + x).sinh()).sqrt() * sh_ratio.sqrt();
    if den <= 0.0 {
        // Only at delta = 0, v = 0, where the integrand vanishes linearly.
        return 0.0;
    }
    2.0 * std::f64::consts::SQRT_2 * s * (-s * s / (4.0 * tau)).exp() / den
}
