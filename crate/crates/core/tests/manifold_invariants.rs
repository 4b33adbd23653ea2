//! Global heat-kernel invariants: the semigroup property, stochastic
//! completeness, cross-regime agreement and pointwise bound domination.

use krein::geometry::{ManifoldSpec, Point};

fn l2pi() -> f64 {
    2.0 * std::f64::consts::PI
}

#[test]
fn semigroup_property_on_torus_and_sphere() {
    let cases: Vec<(ManifoldSpec, Point, Point, usize)> = vec![
        (
            ManifoldSpec::torus(&[l2pi(), l2pi()], 0.5).unwrap(),
            Point::xy(0.4, 1.0),
            Point::xy(2.8, 4.4),
            48,
        ),
        (
            ManifoldSpec::sphere(1.0, 0.5).unwrap(),
            Point::xyz(0.0, 0.0, 1.0),
            Point::xyz(0.8, 0.0, 0.6),
            48,
        ),
    ];
    for (spec, x, y, res) in cases {
        let grid = spec.grid(res);
        for &(t1, t2) in &[(0.1, 0.1), (0.1, 0.5), (0.5, 0.5)] {
            let mut conv = 0.0;
            for (z, w) in grid.points.iter().zip(grid.weights.iter()) {
                conv += w
                    * spec.heat_kernel(x, *z, t1).unwrap()
                    * spec.heat_kernel(*z, y, t2).unwrap();
            }
            let direct = spec.heat_kernel(x, y, t1 + t2).unwrap();
            let rel = (conv - direct).abs() / direct;
            assert!(
                rel < 1e-8,
                "{} (t1={t1}, t2={t2}): semigroup defect {rel:.3e}",
                spec.label()
            );
        }
    }
}

#[test]
fn stochastic_completeness_on_all_geometries() {
    let specs = vec![
        ManifoldSpec::flat(2, 0.5).unwrap(),
        ManifoldSpec::flat(3, 0.5).unwrap(),
        ManifoldSpec::torus(&[l2pi(), l2pi()], 0.5).unwrap(),
        ManifoldSpec::sphere(1.0, 0.5).unwrap(),
        ManifoldSpec::hyperbolic(1.0, 0.5).unwrap(),
    ];
    for spec in specs {
        let x = match spec.label().as_str() {
            "sphere2" => Point::xyz(0.6, 0.0, 0.8),
            "hyperbolic2" => spec.point_polar(0.7, 0.3).unwrap(),
            _ => spec.point([0.3, 0.8, 0.2]).unwrap(),
        };
        let grid = spec.grid(72);
        for &t in &[0.1, 0.5] {
            let mass: f64 = grid
                .points
                .iter()
                .zip(grid.weights.iter())
                .map(|(y, w)| w * spec.heat_kernel(x, *y, t).unwrap())
                .sum();
            assert!(
                (mass - 1.0).abs() < 1e-8,
                "{} t={t}: heat mass {mass}",
                spec.label()
            );
        }
    }
}

#[test]
fn heat_kernel_symmetry_is_structural() {
    // K_t(x, y) = K_t(y, x) exactly (bitwise) because the kernels only see
    // the invariant separation.
    let specs = vec![
        ManifoldSpec::torus(&[1.0, 1.7], 0.5).unwrap(),
        ManifoldSpec::sphere(1.3, 0.5).unwrap(),
        ManifoldSpec::hyperbolic(0.8, 0.5).unwrap(),
        ManifoldSpec::flat(3, 0.5).unwrap(),
    ];
    for spec in specs {
        let x = spec.point([0.21, 0.55, 0.4]).unwrap();
        let y = spec.point([0.8, 0.13, 0.02]).unwrap();
        for &t in &[0.01, 0.3, 2.0] {
            let a = spec.heat_kernel(x, y, t).unwrap();
            let b = spec.heat_kernel(y, x, t).unwrap();
            assert_eq!(a.to_bits(), b.to_bits(), "{} t={t}", spec.label());
        }
    }
}

#[test]
fn spectral_sum_matches_kernel_on_diagonal() {
    // Completeness: sum |f_sigma(x)|^2 e^{-kappa lambda t} -> K_t(x, x).
    let spec = ManifoldSpec::sphere(1.0, 0.5).unwrap();
    let basis = spec.spectral_basis(400).unwrap();
    let x = Point::xyz(0.36, -0.48, 0.8);
    let t = 0.2;
    let mut s = 0.0;
    for m in &basis.modes {
        let f = m.eval(x);
        s += f * f * (-spec.kappa * m.lambda * t).exp();
    }
    let k = spec.heat_kernel(x, x, t).unwrap();
    assert!((s - k).abs() < 1e-10 * k, "defect {:.3e}", (s - k).abs() / k);
}
