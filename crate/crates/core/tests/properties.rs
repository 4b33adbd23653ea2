//! Property-based invariants for the quadrature and special-function layer.

use proptest::prelude::*;

use krein::quad::{laplace_integral, QuadratureSpec};
use krein::special::{bessel_k, sn};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Exponential moments: int t^p e^{-at} dt = Gamma(p+1)/a^{p+1}.
    #[test]
    fn laplace_exponential_moments(a in 0.05f64..50.0, p in 0u32..4) {
        let spec = QuadratureSpec::default();
        let v = laplace_integral(|t| t.powi(p as i32) * (-a * t).exp(), a, &spec).unwrap();
        let mut expect = 1.0 / a;
        for k in 1..=p {
            expect *= k as f64 / a;
        }
        prop_assert!((v - expect).abs() <= 1e-9 * expect,
            "a={a} p={p}: {v} vs {expect}");
    }

    /// Determinism: identical inputs give bit-identical quadrature values.
    #[test]
    fn laplace_bit_deterministic(a in 0.1f64..20.0, c in 0.1f64..3.0) {
        let spec = QuadratureSpec::default();
        let f = |t: f64| (-a * t).exp() / (1.0 + c * t);
        let x = laplace_integral(f, a, &spec).unwrap();
        let y = laplace_integral(f, a, &spec).unwrap();
        prop_assert_eq!(x.to_bits(), y.to_bits());
    }

    /// K_{1/2} Wronskian-free sanity on [0.1, 100].
    #[test]
    fn bessel_half_wronskian(x in 0.1f64..100.0) {
        let v = bessel_k(0.5, x).unwrap() * (2.0 * x / std::f64::consts::PI).sqrt() * x.exp();
        prop_assert!((v - 1.0).abs() < 1e-12);
    }

    /// sn is continuous in the curvature at K = 0 and the deviation from
    /// flatness is controlled by e^{|K| r^2 / 6} - 1 on both branches.
    #[test]
    fn sn_continuity(k in -4.0f64..4.0, r in 1e-6f64..1.0) {
        let v = sn(k, r).unwrap();
        let v0 = sn(1e-14 * k, r).unwrap();
        let envelope = r * ((k.abs() * r * r / 6.0).exp() - 1.0);
        prop_assert!((v - r).abs() <= envelope * 1.05 + 1e-15);
        prop_assert!((v0 - r).abs() <= 1e-12 * r);
    }

    /// Monotone decay of K_0 and K_1.
    #[test]
    fn bessel_k_monotone(x in 0.01f64..50.0, f in 1.01f64..4.0) {
        prop_assert!(bessel_k(0.0, x * f).unwrap() < bessel_k(0.0, x).unwrap());
        prop_assert!(bessel_k(1.0, x * f).unwrap() < bessel_k(1.0, x).unwrap());
    }
}
