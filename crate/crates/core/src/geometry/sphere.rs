//! Heat kernel on the round 2-sphere: Legendre mode sum with a two-term
//! geodesic parametrix for very short times, where the series is both long
//! and badly conditioned off-diagonal.

/// K_t on a sphere of radius rho at angular separation theta; `kt` = kappa t.
pub(crate) fn heat_kernel(rho: f64, kt: f64, theta: f64) -> f64 {
    let tau = kt / (rho * rho);
    // The mode sum's cancellation noise floor sits at ~1e-16 of its largest
    // term, so once the Gaussian suppression e^{-theta^2/4tau} is deeper
    // than e^{-35} the parametrix is the accurate branch (its own relative
    // error is O(tau^2), and tau < pi^2/140 whenever that branch fires).
    // The handover at tau = 2e-5 keeps the branch mismatch below ~4e-10 so
    // quadrature refinement across the switch still converges.
    if tau < 2e-5 || theta * theta / (4.0 * tau) > 35.0 {
        parametrix(rho, tau, theta)
    } else {
        mode_sum(rho, tau, theta)
    }
}

/// sum_l (2l+1) P_l(cos theta) e^{-l(l+1) tau} / (4 pi rho^2).
fn mode_sum(rho: f64, tau: f64, theta: f64) -> f64 {
    let x = theta.cos();
    let lmax = ((42.0 / tau).sqrt() as usize).max(8) + 8;
    let mut p0 = 1.0;
    let mut p1 = x;
    let mut acc = (-0.0_f64).exp() * 1.0; // l = 0 term
    acc += 3.0 * x * (-2.0 * tau).exp();
    for l in 2..=lmax {
        let lf = l as f64;
        let p2 = ((2.0 * lf - 1.0) * x * p1 - (lf - 1.0) * p0) / lf;
        p0 = p1;
        p1 = p2;
        acc += (2.0 * lf + 1.0) * p2 * (-lf * (lf + 1.0) * tau).exp();
    }
    acc / (4.0 * std::f64::consts::PI * rho * rho)
}

/// Two-term short-time parametrix
/// (4 pi kt)^{-1} e^{-r^2/4kt} [u0 + u1 * tau], relative error O(tau^2):
/// u0 = sqrt(theta / sin theta),
/// u1 = u0 * [ (1/theta^2 - cot theta / theta) / 4 + 1/4 ].
fn parametrix(rho: f64, tau: f64, theta: f64) -> f64 {
    let u0;
    let u1;
    if theta < 1e-2 {
        // Series of theta/sin(theta) and the u1 bracket around theta = 0.
        let t2 = theta * theta;
        u0 = 1.0 + t2 / 12.0 + t2 * t2 / 160.0;
        u1 = u0 * (1.0 / 3.0 + t2 / 180.0);
    } else {
        let s = theta.sin().max(1e-280);
        u0 = (theta / s).sqrt();
        let bracket = (1.0 / (theta * theta) - theta.cos() / (s * theta)) / 4.0 + 0.25;
        u1 = u0 * bracket;
    }
    let kt = tau * rho * rho;
    let gauss = (-(rho * theta).powi(2) / (4.0 * kt)).exp() / (4.0 * std::f64::consts::PI * kt);
    gauss * (u0 + u1 * tau)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn diagonal_matches_spec_series() {
        // rho = 1, kappa t = 0.5: sum_l (2l+1) e^{-l(l+1)/2} / 4 pi.
        let mut expect = 0.0;
        for l in 0..40 {
            let lf = l as f64;
            expect += (2.0 * lf + 1.0) * (-lf * (lf + 1.0) * 0.5).exp();
        }
        expect /= 4.0 * std::f64::consts::PI;
        let k = heat_kernel(1.0, 0.5, 0.0);
        assert_relative_eq!(k, expect, max_relative = 1e-14);
    }

    #[test]
    fn parametrix_matches_mode_sum_at_handover() {
        // Compare the branches on both sides of tau = 1e-4 where the mode
        // sum is still well conditioned (small theta).
        for &theta in &[0.0, 0.02, 0.05] {
            let a = mode_sum(1.0, 1.2e-4, theta);
            let b = parametrix(1.0, 1.2e-4, theta);
            assert_relative_eq!(a, b, max_relative = 5e-8);
        }
    }

    #[test]
    fn long_time_limit_is_inverse_area() {
        let k = heat_kernel(2.0, 120.0, 1.3);
        assert_relative_eq!(k, 1.0 / (16.0 * std::f64::consts::PI), max_relative = 1e-12);
    }

    #[test]
    fn diagonal_short_time_expansion() {
        // K_t(x,x) = (4 pi kt)^{-1} (1 + tau/3 + O(tau^2)) on the unit sphere.
        let tau = 5e-4;
        let k = heat_kernel(1.0, tau, 0.0);
        let leading = 1.0 / (4.0 * std::f64::consts::PI * tau);
        assert_relative_eq!(k / leading, 1.0 + tau / 3.0, max_relative = 1e-6);
    }
}
