//! Non-relativistic N-center delta interactions: the renormalized principal
//! matrix, resolvent kernel, bound-state spectra and the norm-bound
//! machinery of the existence argument.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{ManifoldSpec, Point, QuadGrid, SpectralBasis};
use crate::quad::{laplace_integral_scaled, QuadratureSpec};
use crate::rootfind::bisect_secant;

/// e^z - 1 with full relative accuracy near z = 0.
pub(crate) fn expm1c(z: Complex64) -> Complex64 {
    let (x, y) = (z.re, z.im);
    if y == 0.0 {
        return Complex64::new(x.exp_m1(), 0.0);
    }
    // e^z - 1 = expm1(x) cos y - 2 sin^2(y/2) + i e^x sin y.
    let s = (0.5 * y).sin();
    Complex64::new(x.exp_m1() * y.cos() - 2.0 * s * s, x.exp() * y.sin())
}

/// Delta-interaction centers with their binding parameters mu_i (the
/// single-center bound state sits at E = -mu_i^2) and the common mass.
#[derive(Debug, Clone)]
pub struct CenterSet {
    pub positions: Vec<Point>,
    pub bindings: Vec<f64>,
    pub mass: f64,
}

impl CenterSet {
    pub fn new(positions: Vec<Point>, bindings: Vec<f64>, mass: f64) -> Result<Self> {
        if positions.is_empty() || positions.len() != bindings.len() {
            return Err(Error::InvalidParameter(
                "need N >= 1 centers with one binding parameter each".into(),
            ));
        }
        if !(mass > 0.0) || bindings.iter().any(|m| !(*m > 0.0)) {
            return Err(Error::InvalidParameter(
                "mass and binding parameters must be positive".into(),
            ));
        }
        Ok(Self {
            positions,
            bindings,
            mass,
        })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

/// One bound state: energy, normalized amplitude vector on the centers, and
/// the residual minimal eigenvalue of Phi at the root.
#[derive(Debug, Clone)]
pub struct BoundState {
    pub energy: f64,
    pub amplitude: Vec<f64>,
    pub min_eigenvalue: f64,
}

#[derive(Debug, Clone, Default)]
pub struct Spectrum {
    pub states: Vec<BoundState>,
    pub warnings: Vec<String>,
}

/// A manifold together with a center set (kappa = 1/2m is enforced).
#[derive(Debug, Clone)]
pub struct PointSystem {
    pub manifold: ManifoldSpec,
    pub centers: CenterSet,
    pub quad: QuadratureSpec,
}

impl PointSystem {
    pub fn new(geometry: crate::geometry::Geometry, centers: CenterSet) -> Result<Self> {
        let manifold = ManifoldSpec::new(geometry, 1.0 / (2.0 * centers.mass))?;
        for i in 0..centers.len() {
            for j in (i + 1)..centers.len() {
                if manifold.geodesic_distance(centers.positions[i], centers.positions[j])
                    <= 1e-12
                {
                    return Err(Error::InvalidParameter(format!(
                        "centers {i} and {j} coincide"
                    )));
                }
            }
        }
        Ok(Self {
            manifold,
            centers,
            quad: QuadratureSpec::default(),
        })
    }

    pub fn n(&self) -> usize {
        self.centers.len()
    }

    fn check_half_plane(&self, e: Complex64) -> Result<()> {
        if !(e.re < 0.0) {
            return Err(Error::Domain(format!(
                "resolvent requires Re(E) < 0, got {}",
                e.re
            )));
        }
        Ok(())
    }

    /// Free resolvent kernel R_0(x, y | E) = int_0^inf e^{tE} K_t(x, y) dt.
    pub fn free_resolvent(&self, x: Point, y: Point, e: Complex64) -> Result<Complex64> {
        self.check_half_plane(e)?;
        let d = self.manifold.geodesic_distance(x, y);
        if d <= 0.0 {
            return Err(Error::Domain(
                "free resolvent diverges on the diagonal x = y".into(),
            ));
        }
        let kappa = self.manifold.kappa;
        let slow = -e.re;
        let fast = slow.max(100.0 * kappa / (d * d));
        laplace_integral_scaled(
            |t| {
                let k = self.manifold.heat_kernel(x, y, t).unwrap_or(0.0);
                (e * t).exp() * k
            },
            slow,
            fast,
            &self.quad,
        )
    }

    /// int_0^inf K_t(a_i, a_i) (e^{t E1} - e^{t E2}) dt: the finite
    /// diagonal difference of free resolvents.
    pub fn free_resolvent_diag_difference(
        &self,
        i: usize,
        e1: Complex64,
        e2: Complex64,
    ) -> Result<Complex64> {
        self.check_half_plane(e1)?;
        self.check_half_plane(e2)?;
        let a = self.centers.positions[i];
        let slow = (-e1.re).min(-e2.re);
        let fast = (-e1.re).max(-e2.re);
        // e^{tE1} - e^{tE2} = -e^{tE1} (e^{t(E2-E1)} - 1): the expm1 form
        // keeps full relative accuracy when E1 and E2 nearly coincide; away
        // from cancellation the direct difference avoids expm1 overflow.
        let de = e2 - e1;
        laplace_integral_scaled(
            |t| {
                let k = self.manifold.heat_kernel(a, a, t).unwrap_or(0.0);
                if (de * t).norm() <= 0.5 {
                    -(e1 * t).exp() * expm1c(de * t) * k
                } else {
                    ((e1 * t).exp() - (e2 * t).exp()) * k
                }
            },
            slow,
            fast,
            &self.quad,
        )
    }

    /// The principal matrix Phi(E):
    /// diagonal  int K_t(a_i,a_i) (e^{-t mu_i^2} - e^{tE}) dt,
    /// off-diag  -R_0(a_i, a_j | E).
    pub fn principal_matrix(&self, e: Complex64) -> Result<DMatrix<Complex64>> {
        self.check_half_plane(e)?;
        let n = self.n();
        let mut phi = DMatrix::<Complex64>::zeros(n, n);
        for i in 0..n {
            let a = self.centers.positions[i];
            let mu2 = self.centers.bindings[i] * self.centers.bindings[i];
            let slow = mu2.min(-e.re);
            let fast = mu2.max(-e.re);
            // e^{-t mu^2} - e^{tE} = -e^{-t mu^2} (e^{t(E+mu^2)} - 1) near
            // cancellation; direct difference elsewhere.
            let shift = e + Complex64::from(mu2);
            phi[(i, i)] = laplace_integral_scaled(
                |t| {
                    let k = self.manifold.heat_kernel(a, a, t).unwrap_or(0.0);
                    if (shift * t).norm() <= 0.5 {
                        -Complex64::from((-t * mu2).exp()) * expm1c(shift * t) * k
                    } else {
                        (Complex64::from((-t * mu2).exp()) - (e * t).exp()) * k
                    }
                },
                slow,
                fast,
                &self.quad,
            )?;
            for j in (i + 1)..n {
                let r0 = self.free_resolvent(
                    self.centers.positions[i],
                    self.centers.positions[j],
                    e,
                )?;
                phi[(i, j)] = -r0;
                phi[(j, i)] = -r0;
            }
        }
        Ok(phi)
    }

    /// Real symmetric principal matrix for real E < 0.
    pub fn principal_matrix_real(&self, e: f64) -> Result<DMatrix<f64>> {
        let phi = self.principal_matrix(Complex64::new(e, 0.0))?;
        Ok(phi.map(|z| z.re))
    }

    /// Full resolvent kernel R(x, y | E).  Refuses when Phi is within 1e12
    /// of singular (E is essentially a bound state).
    pub fn resolvent_kernel(&self, x: Point, y: Point, e: Complex64) -> Result<Complex64> {
        let phi = self.principal_matrix(e)?;
        let inv = invert_principal(&phi)?;
        let mut r = self.free_resolvent(x, y, e)?;
        let n = self.n();
        let rx: Vec<Complex64> = (0..n)
            .map(|i| self.free_resolvent(x, self.centers.positions[i], e))
            .collect::<Result<_>>()?;
        let ry: Vec<Complex64> = (0..n)
            .map(|j| self.free_resolvent(self.centers.positions[j], y, e))
            .collect::<Result<_>>()?;
        for i in 0..n {
            for j in 0..n {
                r += rx[i] * inv[(i, j)] * ry[j];
            }
        }
        Ok(r)
    }

    /// alpha_{il}(E) = int_0^inf t K_t(a_i, a_l) e^{-t|E|} dt
    ///              = int_M R_0(a_i, x|E) R_0(x, a_l|E) dx.
    pub fn alpha(&self, i: usize, l: usize, e: f64) -> Result<f64> {
        if !(e < 0.0) {
            return Err(Error::Domain("alpha requires E < 0".into()));
        }
        let x = self.centers.positions[i];
        let y = self.centers.positions[l];
        let d = self.manifold.geodesic_distance(x, y);
        let kappa = self.manifold.kappa;
        let slow = -e;
        let fast = if d > 0.0 {
            slow.max(100.0 * kappa / (d * d))
        } else {
            slow
        };
        laplace_integral_scaled(
            |t| t * self.manifold.heat_kernel(x, y, t).unwrap_or(0.0) * (e * t).exp(),
            slow,
            fast,
            &self.quad,
        )
    }

    /// Count of negative eigenvalues of Phi(E); exact by monotonicity.
    fn negative_count(&self, e: f64) -> Result<usize> {
        let phi = self.principal_matrix_real(e)?;
        let eig = phi.symmetric_eigen();
        Ok(eig.eigenvalues.iter().filter(|v| **v < 0.0).count())
    }

    fn min_eig_and_vector(&self, e: f64) -> Result<(f64, Vec<f64>)> {
        let phi = self.principal_matrix_real(e)?;
        let eig = phi.symmetric_eigen();
        let mut idx = 0;
        for (k, v) in eig.eigenvalues.iter().enumerate() {
            if v.abs() < eig.eigenvalues[idx].abs() {
                idx = k;
            }
        }
        let mut vec: Vec<f64> = eig.eigenvectors.column(idx).iter().cloned().collect();
        // Canonical sign for determinism.
        if let Some(first) = vec.iter().find(|v| v.abs() > 1e-10) {
            if *first < 0.0 {
                for v in &mut vec {
                    *v = -*v;
                }
            }
        }
        Ok((eig.eigenvalues[idx], vec))
    }

    /// All bound states in the window (E_lo, E_hi), E_hi < 0: the energies
    /// where an eigenvalue of Phi(E) crosses zero.  The eigenvalues of Phi
    /// are strictly decreasing in E (dPhi/dE = -alpha-Gram < 0), so the
    /// negative-eigenvalue count locates every root exactly.
    pub fn bound_states(&self, window: (f64, f64), scan_points: usize) -> Result<Spectrum> {
        let (e_lo, e_hi) = window;
        if !(e_lo < e_hi && e_hi < 0.0) {
            return Err(Error::Domain(format!(
                "window must satisfy E_lo < E_hi < 0, got ({e_lo}, {e_hi})"
            )));
        }
        let mut out = Spectrum::default();
        let scan = scan_points.max(8);
        // Log-spaced scan in |E| for the resolution warning.
        let (ulo, uhi) = ((-e_lo).ln(), (-e_hi).ln());
        let grid: Vec<f64> = (0..=scan)
            .map(|k| -((ulo + (uhi - ulo) * k as f64 / scan as f64).exp()))
            .collect();
        let counts: Vec<usize> = grid
            .iter()
            .map(|&e| self.negative_count(e))
            .collect::<Result<_>>()?;
        for w in counts.windows(2) {
            if w[1] > w[0] + 1 {
                out.warnings.push(
                    "window scan grid leaves multiple eigenvalue crossings in one cell; \
                     roots are still isolated by count bisection"
                        .into(),
                );
                break;
            }
        }
        let n_lo = counts[0];
        let n_hi = *counts.last().unwrap();
        let mut left = e_lo;
        for j in 1..=(n_hi.saturating_sub(n_lo)) {
            // Bisect the boundary where the count first reaches n_lo + j.
            let target = n_lo + j;
            let (mut a, mut b) = (left, e_hi);
            for _ in 0..64 {
                let m = 0.5 * (a + b);
                if self.negative_count(m)? >= target {
                    b = m;
                } else {
                    a = m;
                }
                if (b - a).abs() < 1e-12 * b.abs().max(1e-12) {
                    break;
                }
            }
            // Secant polish on the crossing eigenvalue.
            let root = {
                let f = |e: f64| self.min_eig_and_vector(e).map(|p| p.0).unwrap_or(f64::NAN);
                bisect_secant(f, a, b, 1e-12)
            };
            let (residual, vector) = self.min_eig_and_vector(root)?;
            out.states.push(BoundState {
                energy: root,
                amplitude: vector,
                min_eigenvalue: residual,
            });
            left = b;
        }
        Ok(out)
    }

    /// (R(E) f)(x) on the grid of `f`: spectral free part plus the rank-N
    /// interaction term with grid-quadrature inner products.
    pub fn apply_resolvent(
        &self,
        f: &SampledFunction,
        basis: &SpectralBasis,
        e: f64,
    ) -> Result<SampledFunction> {
        if !(e < 0.0) {
            return Err(Error::Domain("apply_resolvent requires E < 0".into()));
        }
        let kappa = self.manifold.kappa;
        let coeffs = project(basis, &f.grid, &f.values);
        let ec = Complex64::new(e, 0.0);
        // Free part in the eigenbasis.
        let mut values: Vec<f64> = vec![0.0; f.grid.len()];
        for (m, c) in basis.modes.iter().zip(coeffs.iter()) {
            let gain = c / (kappa * m.lambda - e);
            for (v, p) in values.iter_mut().zip(f.grid.points.iter()) {
                *v += gain * m.eval(*p);
            }
        }
        // Interaction term.
        let n = self.n();
        let mut w = DVector::<f64>::zeros(n);
        let mut r0_center: Vec<Vec<f64>> = Vec::with_capacity(n);
        for j in 0..n {
            let a = self.centers.positions[j];
            let col: Vec<f64> = f
                .grid
                .points
                .iter()
                .map(|&p| {
                    if self.manifold.geodesic_distance(a, p) <= 1e-12 {
                        0.0
                    } else {
                        self.free_resolvent(a, p, ec).map(|z| z.re).unwrap_or(0.0)
                    }
                })
                .collect();
            w[j] = f
                .grid
                .weights
                .iter()
                .zip(col.iter().zip(f.values.iter()))
                .map(|(wt, (r, fv))| wt * r * fv)
                .sum();
            r0_center.push(col);
        }
        let phi = self.principal_matrix_real(e)?;
        let u = solve_real(&phi, &w)?;
        for (idx, v) in values.iter_mut().enumerate() {
            for j in 0..n {
                *v += u[j] * r0_center[j][idx];
            }
        }
        Ok(SampledFunction {
            grid: f.grid.clone(),
            values,
        })
    }
}

/// Phi = D - K split bound on ||Phi^{-1}||: if ||D^{-1}K|| < 1 the geometric
/// series gives ||Phi^{-1}|| <= ||D^{-1}|| / (1 - ||D^{-1}K||).
pub fn phi_inverse_norm_bound(phi: &DMatrix<f64>) -> (f64, bool) {
    let n = phi.nrows();
    let mut dk = phi.clone();
    for i in 0..n {
        for j in 0..n {
            dk[(i, j)] = if i == j {
                0.0
            } else {
                -phi[(i, j)] / phi[(i, i)]
            };
        }
    }
    let dk_norm = dk.singular_values().max();
    let dinv_norm = (0..n)
        .map(|i| 1.0 / phi[(i, i)].abs())
        .fold(0.0_f64, f64::max);
    if dk_norm < 1.0 {
        (dinv_norm / (1.0 - dk_norm), true)
    } else {
        (f64::INFINITY, false)
    }
}

/// Operator 2-norm of Phi^{-1} for real symmetric Phi.
pub fn phi_inverse_norm(phi: &DMatrix<f64>) -> f64 {
    let eig = phi.clone().symmetric_eigen();
    1.0 / eig.eigenvalues.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min)
}

/// Invert Phi, refusing when the condition number exceeds 1e12.
pub fn invert_principal(phi: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    let sv = phi.clone().singular_values();
    let smax = sv.max();
    let smin = sv.min();
    if smin < 1e-12 * smax {
        return Err(Error::SingularMatrix {
            condition: smax / smin.max(1e-300),
        });
    }
    phi.clone()
        .lu()
        .try_inverse()
        .ok_or(Error::SingularMatrix {
            condition: f64::INFINITY,
        })
}

fn solve_real(phi: &DMatrix<f64>, rhs: &DVector<f64>) -> Result<DVector<f64>> {
    let sv = phi.clone().singular_values();
    if sv.min() < 1e-12 * sv.max() {
        return Err(Error::SingularMatrix {
            condition: sv.max() / sv.min().max(1e-300),
        });
    }
    phi.clone().lu().solve(rhs).ok_or(Error::SingularMatrix {
        condition: f64::INFINITY,
    })
}

/// Function sampled on an integration grid.
#[derive(Debug, Clone)]
pub struct SampledFunction {
    pub grid: QuadGrid,
    pub values: Vec<f64>,
}

impl SampledFunction {
    pub fn norm(&self) -> f64 {
        self.grid.norm(&self.values)
    }
}

/// Grid projection of sampled values onto the eigenbasis.
pub fn project(basis: &SpectralBasis, grid: &QuadGrid, values: &[f64]) -> Vec<f64> {
    basis
        .modes
        .iter()
        .map(|m| {
            grid.weights
                .iter()
                .zip(grid.points.iter().zip(values.iter()))
                .map(|(w, (p, v))| w * m.eval(*p) * v)
                .sum()
        })
        .collect()
}

/// Band-limited synthesis on arbitrary points.
pub fn synthesize(basis: &SpectralBasis, coeffs: &[f64], points: &[Point]) -> Vec<f64> {
    points
        .iter()
        .map(|&p| {
            basis
                .modes
                .iter()
                .zip(coeffs.iter())
                .map(|(m, c)| c * m.eval(p))
                .sum()
        })
        .collect()
}
