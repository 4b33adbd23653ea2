//! Real orthonormal Laplace-Beltrami eigenbases for the compact geometries:
//! plane waves on tori, real spherical harmonics on the sphere.

use super::Point;

/// One real eigenfunction with its (geometric) Laplace eigenvalue.
#[derive(Debug, Clone)]
pub struct Mode {
    pub lambda: f64,
    kind: ModeKind,
}

#[derive(Debug, Clone)]
enum ModeKind {
    TorusConst {
        inv_sqrt_v: f64,
    },
    /// sqrt(2/V) cos(k.x) or sqrt(2/V) sin(k.x) with k_d = 2 pi n_d / L_d.
    TorusWave {
        k: [f64; 3],
        dims: usize,
        norm: f64,
        sin: bool,
    },
    /// Real spherical harmonic of degree l; m > 0 cosine, m < 0 sine.
    Sphere {
        l: usize,
        m: i64,
        radius: f64,
    },
}

impl Mode {
    pub fn eval(&self, p: Point) -> f64 {
        match &self.kind {
            ModeKind::TorusConst { inv_sqrt_v } => *inv_sqrt_v,
            ModeKind::TorusWave { k, dims, norm, sin } => {
                let mut phase = 0.0;
                for d in 0..*dims {
                    phase += k[d] * p.0[d];
                }
                if *sin {
                    norm * phase.sin()
                } else {
                    norm * phase.cos()
                }
            }
            ModeKind::Sphere { l, m, radius } => {
                let theta = p.0[2].clamp(-1.0, 1.0).acos();
                let phi = p.0[1].atan2(p.0[0]);
                real_spherical_harmonic(*l, *m, theta, phi) / radius
            }
        }
    }
}

/// Orthonormal eigenbasis truncated to `mode_count` modes, eigenvalues
/// ascending with multiplicity.
#[derive(Debug, Clone)]
pub struct SpectralBasis {
    pub modes: Vec<Mode>,
}

impl SpectralBasis {
    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.modes.iter().map(|m| m.lambda).collect()
    }

    /// sup_x |sum_sigma |f_sigma(x)|^2 e^{-kappa lambda t} - K_t(x,x)| over
    /// the sample points: the completeness defect of the truncation.
    pub fn completeness_defect(
        &self,
        spec: &super::ManifoldSpec,
        samples: &[Point],
        t: f64,
    ) -> f64 {
        let mut worst: f64 = 0.0;
        for &x in samples {
            let mut s = 0.0;
            for m in &self.modes {
                let f = m.eval(x);
                s += f * f * (-spec.kappa * m.lambda * t).exp();
            }
            let k = spec.heat_kernel(x, x, t).unwrap_or(f64::NAN);
            worst = worst.max((s - k).abs());
        }
        worst
    }
}

/// Plane-wave basis on the rectangular torus.
pub(crate) fn torus_basis(lengths: &[f64], mode_count: usize) -> SpectralBasis {
    let dims = lengths.len();
    let volume: f64 = lengths.iter().product();
    // Enough lattice range to cover mode_count modes (each shell adds >= 2).
    let kmax = ((mode_count as f64).sqrt() as i64 + 3).max(2);
    let mut reps: Vec<([i64; 3], f64)> = Vec::new();
    let zrange = if dims == 3 { kmax } else { 0 };
    for n1 in -kmax..=kmax {
        for n2 in -kmax..=kmax {
            for n3 in -zrange..=zrange {
                let n = [n1, n2, n3];
                if !is_canonical(&n) {
                    continue;
                }
                let mut lam = 0.0;
                for d in 0..dims {
                    let k = 2.0 * std::f64::consts::PI * n[d] as f64 / lengths[d];
                    lam += k * k;
                }
                reps.push((n, lam));
            }
        }
    }
    reps.sort_by(|a, b| {
        a.1.partial_cmp(&b.1)
            .unwrap()
            .then_with(|| a.0.cmp(&b.0))
    });

    let mut modes = Vec::with_capacity(mode_count);
    for (n, lam) in reps {
        if modes.len() >= mode_count {
            break;
        }
        if n == [0, 0, 0] {
            modes.push(Mode {
                lambda: 0.0,
                kind: ModeKind::TorusConst {
                    inv_sqrt_v: 1.0 / volume.sqrt(),
                },
            });
            continue;
        }
        let mut k = [0.0; 3];
        for d in 0..dims {
            k[d] = 2.0 * std::f64::consts::PI * n[d] as f64 / lengths[d];
        }
        let norm = (2.0 / volume).sqrt();
        for &sin in &[false, true] {
            if modes.len() >= mode_count {
                break;
            }
            modes.push(Mode {
                lambda: lam,
                kind: ModeKind::TorusWave { k, dims, norm, sin },
            });
        }
    }
    SpectralBasis { modes }
}

/// Half-lattice representative: one of {n, -n} with the first nonzero
/// component positive.
fn is_canonical(n: &[i64; 3]) -> bool {
    if n[0] != 0 {
        return n[0] > 0;
    }
    if n[1] != 0 {
        return n[1] > 0;
    }
    n[2] >= 0
}

/// Real spherical-harmonic basis on the sphere of radius rho.
pub(crate) fn sphere_basis(radius: f64, mode_count: usize) -> SpectralBasis {
    let mut modes = Vec::with_capacity(mode_count);
    let mut l = 0usize;
    'outer: loop {
        let lam = (l * (l + 1)) as f64 / (radius * radius);
        let mut ms: Vec<i64> = vec![0];
        for m in 1..=l as i64 {
            ms.push(m);
            ms.push(-m);
        }
        for m in ms {
            if modes.len() >= mode_count {
                break 'outer;
            }
            modes.push(Mode {
                lambda: lam,
                kind: ModeKind::Sphere { l, m, radius },
            });
        }
        l += 1;
    }
    SpectralBasis { modes }
}

/// Fully normalized real spherical harmonic on the unit sphere.
///
/// m = 0: N_l0 P_l(cos theta); m > 0: sqrt(2) N_lm P_l^m cos(m phi);
/// m < 0: sqrt(2) N_l|m| P_l^|m| sin(|m| phi).  Stable normalized column
/// recurrence in l for fixed |m|.
pub fn real_spherical_harmonic(l: usize, m: i64, theta: f64, phi: f64) -> f64 {
    let am = m.unsigned_abs() as usize;
    debug_assert!(am <= l);
    let x = theta.cos();
    let s = theta.sin();

    // Normalized P~_mm = sqrt((2m+1)/(4pi)) * sqrt((2m-1)!!/(2m)!!) * s^m
    // built multiplicatively to avoid overflow.
    let mut pmm = (1.0 / (4.0 * std::f64::consts::PI)).sqrt();
    for k in 1..=am {
        let kf = k as f64;
        pmm *= -((2.0 * kf + 1.0) / (2.0 * kf)).sqrt() * s;
    }
    let plm = if l == am {
        pmm
    } else {
        let mut p_prev = pmm;
        let mut p_cur = ((2 * am + 3) as f64).sqrt() * x * pmm;
        if l > am + 1 {
            for ll in (am + 2)..=l {
                let lf = ll as f64;
                let mf = am as f64;
                let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
                let b = (((2.0 * lf + 1.0) * ((lf - 1.0) * (lf - 1.0) - mf * mf))
                    / ((2.0 * lf - 3.0) * (lf * lf - mf * mf)))
                    .sqrt();
                let p_next = a * x * p_cur - b * p_prev;
                p_prev = p_cur;
                p_cur = p_next;
            }
        }
        p_cur
    };

    if m == 0 {
        plm
    } else if m > 0 {
        std::f64::consts::SQRT_2 * plm * (am as f64 * phi).cos()
    } else {
        std::f64::consts::SQRT_2 * plm * (am as f64 * phi).sin()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ManifoldSpec;
    use approx::assert_relative_eq;

    #[test]
    fn torus_constant_mode_normalization() {
        // L = (2pi, 2pi): f0 = 1/(2pi), lambda0 = 0.
        let basis = torus_basis(&[2.0 * std::f64::consts::PI, 2.0 * std::f64::consts::PI], 5);
        assert_eq!(basis.modes[0].lambda, 0.0);
        let v = basis.modes[0].eval(Point::xy(1.0, 2.0));
        assert_relative_eq!(v, 1.0 / (2.0 * std::f64::consts::PI), max_relative = 1e-14);
    }

    #[test]
    fn torus_eigenvalues_ascending_with_multiplicity() {
        let basis = torus_basis(&[1.0, 1.0], 30);
        let ev = basis.eigenvalues();
        for w in ev.windows(2) {
            assert!(w[0] <= w[1] + 1e-12);
        }
        // First shell on the unit torus: lambda = (2 pi)^2 with 4 modes.
        let shell = (2.0 * std::f64::consts::PI).powi(2);
        assert_relative_eq!(ev[1], shell, max_relative = 1e-13);
        assert_relative_eq!(ev[4], shell, max_relative = 1e-13);
    }

    #[test]
    fn torus_orthonormality_on_grid() {
        let spec = ManifoldSpec::torus(&[1.0, 2.0], 1.0).unwrap();
        let basis = spec.spectral_basis(12).unwrap();
        let grid = spec.grid(32);
        for i in 0..basis.len() {
            for j in i..basis.len() {
                let mut ip = 0.0;
                for (p, w) in grid.points.iter().zip(grid.weights.iter()) {
                    ip += w * basis.modes[i].eval(*p) * basis.modes[j].eval(*p);
                }
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!(
                    (ip - expect).abs() < 1e-12,
                    "modes {i},{j}: inner product {ip}"
                );
            }
        }
    }

    #[test]
    fn sphere_eigenvalue_multiplicities() {
        let basis = sphere_basis(1.0, 16);
        let ev = basis.eigenvalues();
        assert_eq!(ev[0], 0.0);
        for e in ev.iter().take(4).skip(1) {
            assert_relative_eq!(*e, 2.0, max_relative = 1e-14); // l=1: l(l+1)=2, x3
        }
        for e in ev.iter().take(9).skip(4) {
            assert_relative_eq!(*e, 6.0, max_relative = 1e-14); // l=2: x5
        }
    }

    #[test]
    fn sphere_orthonormality_on_gauss_grid() {
        let spec = ManifoldSpec::sphere(1.0, 1.0).unwrap();
        let basis = spec.spectral_basis(16).unwrap();
        let grid = spec.grid(24);
        for i in 0..basis.len() {
            for j in i..basis.len() {
                let mut ip = 0.0;
                for (p, w) in grid.points.iter().zip(grid.weights.iter()) {
                    ip += w * basis.modes[i].eval(*p) * basis.modes[j].eval(*p);
                }
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!(
                    (ip - expect).abs() < 1e-11,
                    "modes {i},{j}: inner product {ip}"
                );
            }
        }
    }

    #[test]
    fn completeness_defect_small_for_moderate_time() {
        let spec = ManifoldSpec::torus(&[1.0, 1.0], 1.0).unwrap();
        let basis = spec.spectral_basis(200).unwrap();
        let samples = [Point::xy(0.1, 0.7), Point::xy(0.5, 0.5)];
        // t >= t_min(M): all neglected modes damped below 1e-10.
        let defect = basis.completeness_defect(&spec, &samples, 0.05);
        assert!(defect < 1e-10, "defect {defect}");
    }
}
