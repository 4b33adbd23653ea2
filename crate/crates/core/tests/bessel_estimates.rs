//! Closed-form checks of the three Bessel-product moments that control the
//! D-dimensional resolvent estimates:
//!
//!   int r^{D+1}   K_1^2(ar) dr         = sqrt(pi) G(1+D/2) G(2+D/2) G(D/2)
//!                                        / (4 a^{D+2} G((3+D)/2)),
//!   int r         K_{D/2-1}^2(ar) dr   = 1/(2a^2)  (D=2),  pi/(4a^2) (D=3),
//!   int r^{D/2+1} K_1(ar) K_{D/2-1}(ar) dr = 2^{D/2} G(D/2) / ((D+2) a^{D/2+2}),
//!
//! each evaluated by the semi-infinite Laplace-style quadrature against
//! K-products that decay like e^{-2ar}.  (The middle closed form is the
//! absolute value of the csc expression, which carries a spurious sign for
//! 2 < D < 4.)

use krein::quad::{laplace_integral_scaled, QuadratureSpec};
use krein::special::{bessel_k, gamma};

fn quad_moment(power: f64, orders: (f64, f64), a: f64) -> f64 {
    let spec = QuadratureSpec::default();
    laplace_integral_scaled(
        |r| {
            r.powf(power)
                * bessel_k(orders.0, a * r).unwrap()
                * bessel_k(orders.1, a * r).unwrap()
        },
        2.0 * a,
        2.0 * a,
        &spec,
    )
    .unwrap()
}

#[test]
fn bessel_product_moments_match_gamma_closed_forms() {
    for &d in &[2.0_f64, 3.0] {
        for &a in &[0.5_f64, 1.0, 3.0] {
            // First moment: r^{D+1} K_1^2.
            let got = quad_moment(d + 1.0, (1.0, 1.0), a);
            let expect = std::f64::consts::PI.sqrt()
                * gamma(1.0 + d / 2.0)
                * gamma(2.0 + d / 2.0)
                * gamma(d / 2.0)
                / (4.0 * a.powf(d + 2.0) * gamma((3.0 + d) / 2.0));
            assert!(
                (got - expect).abs() <= 1e-8 * expect,
                "D={d}, a={a}: first moment {got} vs {expect}"
            );

            // Second moment: r K_{D/2-1}^2.
            let nu = d / 2.0 - 1.0;
            let got = quad_moment(1.0, (nu, nu), a);
            let expect = if d == 2.0 {
                1.0 / (2.0 * a * a)
            } else {
                std::f64::consts::PI / (4.0 * a * a)
            };
            assert!(
                (got - expect).abs() <= 1e-8 * expect,
                "D={d}, a={a}: second moment {got} vs {expect}"
            );

            // Third moment: r^{D/2+1} K_1 K_{D/2-1}.
            let got = quad_moment(d / 2.0 + 1.0, (1.0, nu), a);
            let expect =
                2.0_f64.powf(d / 2.0) * gamma(d / 2.0) / ((d + 2.0) * a.powf(d / 2.0 + 2.0));
            assert!(
                (got - expect).abs() <= 1e-8 * expect,
                "D={d}, a={a}: third moment {got} vs {expect}"
            );
        }
    }
}
