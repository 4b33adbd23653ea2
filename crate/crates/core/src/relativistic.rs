//! Relativistic point interactions on two-dimensional compact manifolds,
//! restricted to the no-particle/one-particle sectors: the principal matrix
//! by two independent routes (subordinated (s, u) quadrature and spectral
//! mode sums), the subordination identity, the decay functional I(E), and
//! bound states.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::geometry::{Geometry, ManifoldSpec, Point};
use crate::lattice::{sum_smooth_semi_infinite, LatticeSum, TorusLattice};
use crate::point_interaction::{BoundState, Spectrum};
use crate::quad::{double_integral_su, QuadratureSpec};
use crate::rootfind::bisect_secant;
use crate::special::{gl_nodes_on, legendre_p};

/// Centers with bound-state energies mu_i < m on a kappa = 1 manifold.
#[derive(Debug, Clone)]
pub struct RelativisticModel {
    pub manifold: ManifoldSpec,
    pub centers: Vec<Point>,
    pub bindings: Vec<f64>,
    pub boson_mass: f64,
    pub quad: QuadratureSpec,
    /// Tolerance the mode-sum tail estimate must meet.
    pub mode_tolerance: f64,
    /// Cartan-Hadamard mass-like scale entering the inverse-principal-matrix
    /// log shape on noncompact geometries.  Externally defined; exposed as a
    /// configuration parameter and never asserted (defaults to the boson
    /// mass).
    pub m_ch: Option<f64>,
}

/// Principal matrix from the spectral route, with the reported tail bound.
#[derive(Debug, Clone)]
pub struct ModeSumMatrix {
    pub matrix: DMatrix<f64>,
    pub tail_bound: f64,
}

impl RelativisticModel {
    pub fn new(
        geometry: Geometry,
        centers: Vec<Point>,
        bindings: Vec<f64>,
        boson_mass: f64,
    ) -> Result<Self> {
        let manifold = ManifoldSpec::new(geometry, 1.0)?;
        if manifold.dim() != 2 {
            return Err(Error::Unsupported(
                "the relativistic model is two-dimensional".into(),
            ));
        }
        if centers.is_empty() || centers.len() != bindings.len() {
            return Err(Error::InvalidParameter(
                "need N >= 1 centers with one binding energy each".into(),
            ));
        }
        if !(boson_mass > 0.0) {
            return Err(Error::InvalidParameter("boson mass must be positive".into()));
        }
        if bindings.iter().any(|mu| !(*mu < boson_mass)) {
            return Err(Error::InvalidParameter(
                "bound-state energies must satisfy mu_i < m".into(),
            ));
        }
        Ok(Self {
            manifold,
            centers,
            bindings,
            boson_mass,
            quad: QuadratureSpec::default(),
            mode_tolerance: 1e-9,
            m_ch: None,
        })
    }

    pub fn n(&self) -> usize {
        self.centers.len()
    }

    /// Mass scale for the Cartan-Hadamard log shape (m_CH when set).
    pub fn ch_mass(&self) -> f64 {
        self.m_ch.unwrap_or(self.boson_mass)
    }

    pub fn min_binding(&self) -> f64 {
        self.bindings.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    fn check_window(&self, e: f64) -> Result<()> {
        if !(e <= self.min_binding()) {
            return Err(Error::WindowViolation(format!(
                "E = {e} is not below the one-particle threshold min mu = {}",
                self.min_binding()
            )));
        }
        Ok(())
    }

    /// Phi(E) by the subordinated double integral:
    /// diag  (1/sqrt pi) int ds du e^{-s^2/4} (e^{s mu sqrt u} - e^{s E sqrt u})
    ///        e^{-u m^2} K_u(a_i, a_i),
    /// off   -(1/sqrt pi) int ds du e^{-s^2/4} e^{s E sqrt u} e^{-u m^2} K_u(a_i, a_j).
    pub fn principal_matrix_quadrature(&self, e: f64) -> Result<DMatrix<f64>> {
        self.check_window(e)?;
        let m = self.boson_mass;
        let n = self.n();
        let inv_sqrt_pi = 1.0 / std::f64::consts::PI.sqrt();
        let mut phi = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            let mu = self.bindings[i];
            let a = self.centers[i];
            // Fused exponents keep every factor <= 1:
            //   -s^2/4 + s c sqrt(u) - (m^2 - decay) u = -(s/2 - c sqrt u)^2
            // when decay = m^2 - c^2 for the dominant c.
            let c_plus = mu.max(e).max(0.0);
            let decay = (m * m - c_plus * c_plus).max(1e-6 * m * m);
            let rest = m * m - decay;
            let u_star = 42.0 / decay;
            let s_max = 2.0 * c_plus * u_star.sqrt() + 14.0;
            let u_fast = decay.max(e * e).max(mu * mu).max(m * m);
            let val = double_integral_su(
                |s, u| {
                    let k = self.manifold.heat_kernel(a, a, u).unwrap_or(0.0);
                    let su = s * u.sqrt();
                    let base = -s * s / 4.0 + mu * su - rest * u;
                    let dmu = (e - mu) * su;
                    // e^{base}(1 - e^{dmu}) with expm1 near cancellation.
                    let diff = if dmu.abs() <= 0.5 {
                        -base.exp() * dmu.exp_m1()
                    } else {
                        base.exp() - (base + dmu).exp()
                    };
                    diff * k
                },
                false,
                s_max,
                decay,
                u_fast,
                &self.quad,
            )?;
            phi[(i, i)] = inv_sqrt_pi * val;
            for j in (i + 1)..n {
                let b = self.centers[j];
                let d = self.manifold.geodesic_distance(a, b);
                let e_plus = e.max(0.0);
                let decay = (m * m - e_plus * e_plus).max(1e-6 * m * m);
                let rest = m * m - decay;
                let s_max = 2.0 * e_plus * (42.0 / decay).sqrt() + 14.0;
                let u_fast = decay.max(e * e).max(160.0 / (d * d)).max(m * m);
                let val = double_integral_su(
                    |s, u| {
                        let k = self.manifold.heat_kernel(a, b, u).unwrap_or(0.0);
                        (-s * s / 4.0 + e * s * u.sqrt() - rest * u).exp() * k
                    },
                    false,
                    s_max,
                    decay,
                    u_fast,
                    &self.quad,
                )?;
                phi[(i, j)] = -inv_sqrt_pi * val;
                phi[(j, i)] = phi[(i, j)];
            }
        }
        Ok(phi)
    }

    /// Psi_ij(E) = sum_sigma f_sigma*(a_i) f_sigma(a_j) / (omega (omega - E)),
    /// with the closed lattice/degree-sum tails; diagonal entries only enter
    /// through the renormalized combination Psi_ii(mu) - Psi_ii(E).
    pub fn principal_matrix_modesum(&self, e: f64) -> Result<ModeSumMatrix> {
        self.check_window(e)?;
        let m = self.boson_mass;
        let n = self.n();
        let mut phi = DMatrix::<f64>::zeros(n, n);
        let mut tail = 0.0_f64;
        for i in 0..n {
            let mu = self.bindings[i];
            // (mu - E)/(omega (omega - mu)(omega - E)): no cancellation.
            let diag = self.spectral_sum(
                self.centers[i],
                self.centers[i],
                &|w: f64| (mu - e) / (w * (w - mu) * (w - e)),
                m + mu.abs(),
                m + e.abs() + mu.abs(),
            )?;
            phi[(i, i)] = diag.value;
            tail += diag.tail_bound;
            for j in (i + 1)..n {
                let off = self.spectral_sum(
                    self.centers[i],
                    self.centers[j],
                    &|w: f64| 1.0 / (w * (w - e)),
                    m,
                    m + e.abs(),
                )?;
                phi[(i, j)] = -off.value;
                phi[(j, i)] = -off.value;
                tail += 2.0 * off.tail_bound;
            }
        }
        let scale = phi.iter().map(|v| v.abs()).fold(0.0_f64, f64::max).max(1e-300);
        if tail > self.mode_tolerance * scale {
            return Err(Error::TruncationInsufficient {
                tail,
                tol: self.mode_tolerance * scale,
            });
        }
        Ok(ModeSumMatrix { matrix: phi, tail_bound: tail })
    }

    /// sum_sigma f*(x) f(y) g(omega_sigma) over the full spectrum, exact
    /// tails included; g must decay at least like omega^{-2} off-diagonal
    /// and omega^{-3} on the diagonal.
    pub fn spectral_sum(
        &self,
        x: Point,
        y: Point,
        g: &dyn Fn(f64) -> f64,
        smooth_scale: f64,
        extent_scale: f64,
    ) -> Result<LatticeSum> {
        let m = self.boson_mass;
        match &self.manifold.geometry {
            Geometry::FlatTorus { lengths } => {
                let volume: f64 = lengths.iter().product();
                let lat = TorusLattice::new(lengths)?;
                let phi = [
                    2.0 * std::f64::consts::PI * (x.0[0] - y.0[0]) / lengths[0],
                    2.0 * std::f64::consts::PI * (x.0[1] - y.0[1]) / lengths[1],
                ];
                let h = |lam: f64| g((lam + m * m).sqrt());
                let s = lat.sum(phi, smooth_scale, extent_scale, &h)?;
                Ok(LatticeSum {
                    value: s.value / volume,
                    tail_bound: s.tail_bound / volume,
                })
            }
            Geometry::Sphere2 { radius } => {
                let rho = *radius;
                let theta = self.manifold.geodesic_distance(x, y) / rho;
                let area = 4.0 * std::f64::consts::PI * rho * rho;
                let head = ((3.0 * smooth_scale * rho) as usize).max(8) + 48;
                if theta.abs() < 1e-12 {
                    // Degree sum with multiplicity 2l+1.
                    let gfun = move |l: f64| {
                        let lam = l * (l + 1.0) / (rho * rho);
                        (2.0 * l + 1.0) * g((lam + m * m).sqrt()) / area
                    };
                    Ok(sum_smooth_semi_infinite(
                        &gfun,
                        head,
                        extent_scale.max(smooth_scale) * rho,
                    ))
                } else {
                    // Legendre sum: truncate and report the envelope bound.
                    let xx = theta.cos();
                    let mut acc = 0.0;
                    for l in 0..=(4 * head) {
                        let lf = l as f64;
                        let lam = lf * (lf + 1.0) / (rho * rho);
                        acc += (2.0 * lf + 1.0) * legendre_p(l, xx)
                            * g((lam + m * m).sqrt())
                            / area;
                    }
                    let lf = (4 * head) as f64;
                    let envelope = (2.0 / (std::f64::consts::PI * lf * theta.sin().abs()))
                        .sqrt();
                    let bound = (2.0 * lf + 1.0)
                        * envelope
                        * g((lf * lf / (rho * rho) + m * m).sqrt()).abs()
                        * lf;
                    Ok(LatticeSum {
                        value: acc,
                        tail_bound: bound,
                    })
                }
            }
            _ => Err(Error::Unsupported(
                "the spectral route needs a compact manifold".into(),
            )),
        }
    }

    /// Decay functional I(E) = sum_sigma |f_sigma(a)|^2 / (omega (omega+|E|)^2),
    /// returned with its tail bound.
    pub fn decay_functional(&self, center: usize, e: f64) -> Result<LatticeSum> {
        if !(e < 0.0) {
            return Err(Error::Domain("decay functional needs E < 0".into()));
        }
        let ea = e.abs();
        self.spectral_sum(
            self.centers[center],
            self.centers[center],
            &|w: f64| 1.0 / (w * (w + ea) * (w + ea)),
            self.boson_mass,
            self.boson_mass + ea,
        )
    }

    fn negative_count(&self, e: f64) -> Result<usize> {
        let phi = self.principal_matrix_modesum(e)?.matrix;
        Ok(phi
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .filter(|v| **v < 0.0)
            .count())
    }

    fn min_eig_and_vector(&self, e: f64) -> Result<(f64, Vec<f64>)> {
        let phi = self.principal_matrix_modesum(e)?.matrix;
        let eig = phi.symmetric_eigen();
        let mut idx = 0;
        for (k, v) in eig.eigenvalues.iter().enumerate() {
            if v.abs() < eig.eigenvalues[idx].abs() {
                idx = k;
            }
        }
        let mut vec: Vec<f64> = eig.eigenvectors.column(idx).iter().cloned().collect();
        if let Some(first) = vec.iter().find(|v| v.abs() > 1e-10) {
            if *first < 0.0 {
                for v in &mut vec {
                    *v = -*v;
                }
            }
        }
        Ok((eig.eigenvalues[idx], vec))
    }

    /// Bound states strictly below the threshold min mu_i: zero crossings of
    /// the eigenvalues of Phi(E), located by the monotone negative count.
    pub fn bound_states(&self, window: (f64, f64), scan_points: usize) -> Result<Spectrum> {
        let (e_lo, e_hi) = window;
        if !(e_lo < e_hi && e_hi < self.min_binding()) {
            return Err(Error::WindowViolation(format!(
                "window must satisfy E_lo < E_hi < min mu = {}",
                self.min_binding()
            )));
        }
        let mut out = Spectrum::default();
        let scan = scan_points.max(8);
        let grid: Vec<f64> = (0..=scan)
            .map(|k| e_lo + (e_hi - e_lo) * k as f64 / scan as f64)
            .collect();
        let counts: Vec<usize> = grid
            .iter()
            .map(|&e| self.negative_count(e))
            .collect::<Result<_>>()?;
        for w in counts.windows(2) {
            if w[1] > w[0] + 1 {
                out.warnings
                    .push("multiple eigenvalue crossings inside one scan cell".into());
                break;
            }
        }
        let (n_lo, n_hi) = (counts[0], *counts.last().unwrap());
        let mut left = e_lo;
        for j in 1..=(n_hi.saturating_sub(n_lo)) {
            let target = n_lo + j;
            let (mut a, mut b) = (left, e_hi);
            for _ in 0..64 {
                let mid = 0.5 * (a + b);
                if self.negative_count(mid)? >= target {
                    b = mid;
                } else {
                    a = mid;
                }
                if (b - a).abs() < 1e-12 * b.abs().max(1e-12) {
                    break;
                }
            }
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
}

/// Subordination identity: lhs = e^{-s omega}, omega = sqrt(lambda + m^2);
/// rhs = (s/2 sqrt pi) int_0^inf du u^{-3/2} e^{-s^2/4u - m^2 u - lambda u},
/// evaluated after u = s^2/(4 w^2) as (2/sqrt pi) int e^{-w^2 - q^2/w^2} dw.
pub fn subordination_check(s: f64, m: f64, lambda: f64, _spec: &QuadratureSpec) -> (f64, f64, f64) {
    let omega = (lambda + m * m).sqrt();
    let lhs = (-s * omega).exp();
    let q = 0.5 * s * omega;
    let mut rhs = 0.0;
    if q > 0.0 {
        // w = sqrt(q) e^y turns the boundary layer into the smooth even
        // integrand sqrt(q) e^{-2q cosh 2y + y}.
        let y0 = 0.5 * (45.0 / (2.0 * q) + 1.0).max(2.0).acosh() + 1.0;
        let panels = 10;
        for p in 0..panels {
            let lo = -y0 + 2.0 * y0 * p as f64 / panels as f64;
            let hi = lo + 2.0 * y0 / panels as f64;
            for &(y, wt) in gl_nodes_on(lo, hi, 24).iter() {
                rhs += wt * q.sqrt() * (-2.0 * q * (2.0 * y).cosh() + y).exp();
            }
        }
    } else {
        for &(w, wt) in gl_nodes_on(0.0, 7.0, 64).iter() {
            rhs += wt * (-w * w).exp();
        }
    }
    rhs *= 2.0 / std::f64::consts::PI.sqrt();
    let residual = (lhs - rhs).abs() / lhs.max(1e-300);
    (lhs, rhs, residual)
}
