//! Conjugate-symmetry probes: R(E)^dag = R(E^*) at kernel, matrix and
//! scalar level for the three models.

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::error::Result;
use crate::geometry::Geometry;
use crate::lee::LeeModel;
use crate::point_interaction::PointSystem;
use crate::relativistic::RelativisticModel;

/// max over sample pairs of |R(x,y|E) - conj(R(y,x|E*))| / |R(x,y|E)|.
pub fn check_symmetry_kernel(
    sys: &PointSystem,
    e: Complex64,
    pairs: usize,
    seed: u64,
) -> Result<f64> {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..pairs {
        let (x, y) = random_pair(sys, &mut rng);
        let rxy = sys.resolvent_kernel(x, y, e)?;
        let ryx = sys.resolvent_kernel(y, x, e.conj())?;
        worst = worst.max((rxy - ryx.conj()).norm() / rxy.norm().max(1e-300));
    }
    Ok(worst)
}

fn random_pair(
    sys: &PointSystem,
    rng: &mut StdRng,
) -> (crate::geometry::Point, crate::geometry::Point) {
    let mut pick = || loop {
        let p = match &sys.manifold.geometry {
            Geometry::FlatSpace { .. } => sys
                .manifold
                .point([
                    rng.random_range(-1.5..1.5),
                    rng.random_range(-1.5..1.5),
                    0.0,
                ])
                .unwrap(),
            Geometry::FlatTorus { lengths } => {
                let c = [
                    rng.random_range(0.0..lengths[0]),
                    rng.random_range(0.0..lengths[1]),
                    if lengths.len() > 2 {
                        rng.random_range(0.0..lengths[2])
                    } else {
                        0.0
                    },
                ];
                sys.manifold.point(c).unwrap()
            }
            Geometry::Sphere2 { .. } => {
                let v = [
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                ];
                match sys.manifold.point(v) {
                    Ok(p) => p,
                    Err(_) => continue,
                }
            }
            Geometry::Hyperbolic2 { .. } => sys
                .manifold
                .point_polar(
                    rng.random_range(0.05..2.0),
                    rng.random_range(0.0..std::f64::consts::TAU),
                )
                .unwrap(),
        };
        // Stay away from the centers where R_0 diverges.
        if sys
            .centers
            .positions
            .iter()
            .all(|&a| sys.manifold.geodesic_distance(a, p) > 0.2)
        {
            return p;
        }
    };
    (pick(), pick())
}

/// Relativistic principal matrix: max_ij |Phi(E*)_ij - conj(Phi(E)_ji)|,
/// with the complex matrix evaluated from the two real spectral sums.
pub fn check_relativistic_symmetry(model: &RelativisticModel, e: Complex64) -> Result<f64> {
    let a = relativistic_complex_phi(model, e)?;
    let b = relativistic_complex_phi(model, e.conj())?;
    let n = model.n();
    let mut worst: f64 = 0.0;
    let scale = a.iter().map(|z| z.norm()).fold(0.0_f64, f64::max).max(1e-300);
    for i in 0..n {
        for j in 0..n {
            worst = worst.max((b[(i, j)] - a[(j, i)].conj()).norm() / scale);
        }
    }
    Ok(worst)
}

fn relativistic_complex_phi(
    model: &RelativisticModel,
    e: Complex64,
) -> Result<nalgebra::DMatrix<Complex64>> {
    let n = model.n();
    let m = model.boson_mass;
    let mut phi = nalgebra::DMatrix::<Complex64>::zeros(n, n);
    // 1/(w(w - E)) = (w - x + i y)/(w ((w-x)^2 + y^2)) for E = x + i y; the
    // real and imaginary parts are separate real lattice sums.
    let (x, y) = (e.re, e.im);
    let scale = m + e.norm();
    for i in 0..n {
        let mu = model.bindings[i];
        let re = model.spectral_sum(
            model.centers[i],
            model.centers[i],
            &move |w: f64| {
                let den = w * ((w - x) * (w - x) + y * y);
                1.0 / (w * (w - mu)) - (w - x) / den
            },
            m + mu.abs(),
            scale + mu.abs(),
        )?;
        let im = model.spectral_sum(
            model.centers[i],
            model.centers[i],
            &move |w: f64| {
                let den = w * ((w - x) * (w - x) + y * y);
                -y / den
            },
            m,
            scale,
        )?;
        phi[(i, i)] = Complex64::new(re.value, im.value);
        for j in (i + 1)..n {
            let re = model.spectral_sum(
                model.centers[i],
                model.centers[j],
                &move |w: f64| {
                    let den = w * ((w - x) * (w - x) + y * y);
                    -(w - x) / den
                },
                m,
                scale,
            )?;
            let im = model.spectral_sum(
                model.centers[i],
                model.centers[j],
                &move |w: f64| {
                    let den = w * ((w - x) * (w - x) + y * y);
                    y / den
                },
                m,
                scale,
            )?;
            phi[(i, j)] = Complex64::new(re.value, im.value);
            phi[(j, i)] = phi[(i, j)];
        }
    }
    Ok(phi)
}

/// Lee vacuum scalar: |Phi(E*) - conj(Phi(E))| / |Phi(E)|.
pub fn check_lee_symmetry(model: &LeeModel, e: Complex64) -> Result<f64> {
    let a = model.vacuum_principal(e)?;
    let b = model.vacuum_principal(e.conj())?;
    Ok((b - a.conj()).norm() / a.norm().max(1e-300))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Geometry, Point};
    use crate::point_interaction::CenterSet;

    #[test]
    fn kernel_symmetry_on_torus() {
        let l = 2.0 * std::f64::consts::PI;
        let sys = PointSystem::new(
            Geometry::FlatTorus {
                lengths: vec![l, l],
            },
            CenterSet::new(
                vec![Point::xy(0.7, 1.1), Point::xy(3.9, 4.4)],
                vec![1.0, 0.8],
                1.0,
            )
            .unwrap(),
        )
        .unwrap();
        let r = check_symmetry_kernel(&sys, Complex64::new(-5.0, 2.0), 6, 3).unwrap();
        assert!(r < 1e-9, "residual {r}");
    }

    #[test]
    fn relativistic_matrix_symmetry() {
        let l = 2.0 * std::f64::consts::PI;
        let model = RelativisticModel::new(
            Geometry::FlatTorus {
                lengths: vec![l, l],
            },
            vec![Point::xy(1.0, 1.3), Point::xy(4.0, 3.9)],
            vec![0.5, 0.3],
            1.0,
        )
        .unwrap();
        let r = check_relativistic_symmetry(&model, Complex64::new(-2.0, 1.5)).unwrap();
        assert!(r < 1e-9, "residual {r}");
    }

    #[test]
    fn lee_scalar_symmetry() {
        let l = 2.0 * std::f64::consts::PI;
        let model = LeeModel::new(
            Geometry::FlatTorus {
                lengths: vec![l, l],
            },
            [1.0, 1.2, 0.0],
            0.8,
            1.0,
            0.5,
            9,
        )
        .unwrap();
        let r = check_lee_symmetry(&model, Complex64::new(-1.5, 0.9)).unwrap();
        assert!(r < 1e-10, "residual {r}");
    }
}
