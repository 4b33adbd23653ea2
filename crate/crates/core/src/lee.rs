//! Non-relativistic Lee model on compact manifolds: truncated-Fock-space
//! principal operator, its K/U splitting, norm bounds, and ground-state
//! energies with the analytic lower-bound forms.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{bound_constants, Geometry, ManifoldClass, ManifoldSpec, Point};
use crate::point_interaction::expm1c;
use crate::quad::{laplace_integral_scaled, QuadratureSpec};
use crate::special::gamma;

/// Truncated bosonic occupation basis over M modes with sum n_sigma <= n_max,
/// enumerated in graded lexicographic order.
#[derive(Debug, Clone)]
pub struct FockBasis {
    pub modes: usize,
    pub n_max: usize,
    pub states: Vec<Vec<u16>>,
    index: HashMap<Vec<u16>, usize>,
}

impl FockBasis {
    pub fn new(modes: usize, n_max: usize) -> Self {
        let mut states = Vec::new();
        for n in 0..=n_max {
            let mut occ = vec![0u16; modes];
            enumerate_sector(&mut occ, 0, n as u16, &mut states);
        }
        let index = states
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, s)| (s, i))
            .collect();
        Self {
            modes,
            n_max,
            states,
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Indices of the states with total boson number n.
    pub fn sector(&self, n: usize) -> Vec<usize> {
        self.states
            .iter()
            .enumerate()
            .filter(|(_, s)| s.iter().map(|v| *v as usize).sum::<usize>() == n)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn position(&self, state: &[u16]) -> Option<usize> {
        self.index.get(state).copied()
    }
}

/// Binomial-coefficient state count sum_{k<=n_max} C(M+k-1, k).
pub fn fock_dimension(modes: usize, n_max: usize) -> usize {
    let mut total = 0usize;
    for k in 0..=n_max {
        let mut c = 1usize;
        for j in 0..k {
            c = c * (modes + j) / (j + 1);
        }
        total += c;
    }
    total
}

fn enumerate_sector(occ: &mut Vec<u16>, mode: usize, left: u16, out: &mut Vec<Vec<u16>>) {
    if mode == occ.len() - 1 {
        occ[mode] = left;
        out.push(occ.clone());
        occ[mode] = 0;
        return;
    }
    for k in (0..=left).rev() {
        occ[mode] = k;
        enumerate_sector(occ, mode + 1, left - k, out);
        occ[mode] = 0;
    }
}

/// Lee model: one static source at `center` on a compact manifold, boson
/// dispersion eps_sigma = lambda_sigma/(2m) + m.
#[derive(Debug, Clone)]
pub struct LeeModel {
    pub manifold: ManifoldSpec,
    pub center: Point,
    pub coupling: f64,
    pub boson_mass: f64,
    pub binding: f64,
    pub quad: QuadratureSpec,
    mode_lambdas: Vec<f64>,
    mode_values: Vec<f64>,
}

/// Ground-state result with its truncation-convergence diagnostics.
#[derive(Debug, Clone)]
pub struct GroundState {
    pub energy: f64,
    /// Energy recomputed with half the modes.
    pub energy_half_modes: f64,
    pub sector_dim: usize,
    pub mode_count: usize,
}

impl LeeModel {
    pub fn new(
        geometry: Geometry,
        center: [f64; 3],
        coupling: f64,
        boson_mass: f64,
        binding: f64,
        mode_count: usize,
    ) -> Result<Self> {
        let manifold = ManifoldSpec::new(geometry, 1.0 / (2.0 * boson_mass))?;
        if manifold.class() != ManifoldClass::Compact {
            return Err(Error::Unsupported(
                "the truncated-Fock Lee model needs a compact manifold".into(),
            ));
        }
        if !(coupling > 0.0) {
            return Err(Error::InvalidParameter("coupling must be positive".into()));
        }
        if !(binding < boson_mass) {
            return Err(Error::InvalidParameter(
                "renormalized binding must satisfy mu < m".into(),
            ));
        }
        let center = manifold.point(center)?;
        let basis = manifold.spectral_basis(mode_count)?;
        let mode_lambdas = basis.eigenvalues();
        let mode_values = basis.modes.iter().map(|m| m.eval(center)).collect();
        Ok(Self {
            manifold,
            center,
            coupling,
            boson_mass,
            binding,
            quad: QuadratureSpec::default(),
            mode_lambdas,
            mode_values,
        })
    }

    pub fn mode_count(&self) -> usize {
        self.mode_lambdas.len()
    }

    /// Single-boson energy eps_sigma = kappa lambda_sigma + m.
    pub fn epsilon(&self, sigma: usize) -> f64 {
        self.manifold.kappa * self.mode_lambdas[sigma] + self.boson_mass
    }

    /// Diagonal of the free Hamiltonian on the given sector states.
    pub fn h0_diagonal(&self, basis: &FockBasis, sector: &[usize]) -> DVector<f64> {
        DVector::from_iterator(
            sector.len(),
            sector.iter().map(|&idx| {
                basis.states[idx]
                    .iter()
                    .enumerate()
                    .map(|(s, occ)| *occ as f64 * self.epsilon(s))
                    .sum()
            }),
        )
    }

    /// S1(h) = int K_t(a,a) [e^{-t(m-mu)} - e^{-t(h+m-E)}] dt, evaluated on
    /// an H0 eigenvalue h.
    fn s1_value(&self, h: f64, e: f64) -> Result<f64> {
        let a_rate = self.boson_mass - self.binding;
        let b_rate = h + self.boson_mass - e;
        if !(b_rate > 0.0) {
            return Err(Error::WindowViolation(format!(
                "S1 integral needs h + m - E > 0, got {b_rate}"
            )));
        }
        let slow = a_rate.min(b_rate);
        let fast = a_rate.max(b_rate);
        let de = a_rate - b_rate;
        laplace_integral_scaled(
            |t| {
                let k = self
                    .manifold
                    .heat_kernel(self.center, self.center, t)
                    .unwrap_or(0.0);
                // e^{-a t} - e^{-b t} = -e^{-a t} (e^{(a-b)t} - 1).
                if (de * t).abs() <= 0.5 {
                    -(-a_rate * t).exp() * (de * t).exp_m1() * k
                } else {
                    ((-a_rate * t).exp() - (-b_rate * t).exp()) * k
                }
            },
            slow,
            fast,
            &self.quad,
        )
    }

    /// The three pieces on a sector: K = H0 - E + mu (diagonal),
    /// U1 = -lambda^2 S1 (diagonal, negative), U2 = lambda^2 S2 (PSD).
    pub fn split_ku(
        &self,
        basis: &FockBasis,
        n: usize,
        e: f64,
    ) -> Result<(DMatrix<f64>, DMatrix<f64>, DMatrix<f64>)> {
        let window = n as f64 * self.boson_mass + self.binding;
        if !(e < window) {
            return Err(Error::WindowViolation(format!(
                "E = {e} must lie below n m + mu = {window}"
            )));
        }
        let sector = basis.sector(n);
        let dim = sector.len();
        if dim == 0 {
            return Err(Error::InvalidParameter(format!(
                "sector n = {n} is empty for this basis"
            )));
        }
        let h0 = self.h0_diagonal(basis, &sector);
        let lam2 = self.coupling * self.coupling;

        let mut k_mat = DMatrix::<f64>::zeros(dim, dim);
        for i in 0..dim {
            let kv = h0[i] - e + self.binding;
            if kv <= 0.0 {
                return Err(Error::PositivityViolation(format!(
                    "K(E) has nonpositive entry {kv} inside the window"
                )));
            }
            k_mat[(i, i)] = kv;
        }

        // U1: diagonal, cached per distinct H0 eigenvalue.
        let mut u1 = DMatrix::<f64>::zeros(dim, dim);
        let mut cache: HashMap<u64, f64> = HashMap::new();
        for i in 0..dim {
            let key = h0[i].to_bits();
            let s1 = match cache.get(&key) {
                Some(v) => *v,
                None => {
                    let v = self.s1_value(h0[i], e)?;
                    cache.insert(key, v);
                    v
                }
            };
            u1[(i, i)] = -lam2 * s1;
        }

        // U2 via a_sigma^dag W(E) a_tau with the exact t-integral
        // W = 1/(kappa(lambda_sigma + lambda_tau) + H0' + 2m - E).
        let mut u2 = DMatrix::<f64>::zeros(dim, dim);
        if n >= 1 {
            let kappa = self.manifold.kappa;
            let m2 = 2.0 * self.boson_mass;
            for (col, &gidx) in sector.iter().enumerate() {
                let gamma_state = &basis.states[gidx];
                for tau in 0..basis.modes {
                    if gamma_state[tau] == 0 {
                        continue;
                    }
                    let mut reduced = gamma_state.clone();
                    reduced[tau] -= 1;
                    let h_red: f64 = reduced
                        .iter()
                        .enumerate()
                        .map(|(s, occ)| *occ as f64 * self.epsilon(s))
                        .sum();
                    let amp_tau = (gamma_state[tau] as f64).sqrt();
                    for sigma in 0..basis.modes {
                        let mut target = reduced.clone();
                        target[sigma] += 1;
                        let Some(bidx) = basis.position(&target) else {
                            continue;
                        };
                        let Some(row) = sector.iter().position(|&s| s == bidx) else {
                            continue;
                        };
                        let amp_sigma = ((reduced[sigma] + 1) as f64).sqrt();
                        let w = 1.0
                            / (kappa
                                * (self.mode_lambdas[sigma] + self.mode_lambdas[tau])
                                + h_red
                                + m2
                                - e);
                        u2[(row, col)] += lam2
                            * self.mode_values[sigma]
                            * self.mode_values[tau]
                            * amp_sigma
                            * amp_tau
                            * w;
                    }
                }
            }
        }
        Ok((k_mat, u1, u2))
    }

    /// Phi(E) = K - U1 - U2 = (H0 - E + mu) + lambda^2 S1 - lambda^2 S2.
    pub fn principal_operator(&self, basis: &FockBasis, n: usize, e: f64) -> Result<DMatrix<f64>> {
        let (k, u1, u2) = self.split_ku(basis, n, e)?;
        Ok(k - &u1 - &u2)
    }

    /// ||K^{-1/2} U2 K^{-1/2}|| on the sector.
    pub fn u2_tilde_norm(&self, basis: &FockBasis, n: usize, e: f64) -> Result<f64> {
        let (k, _u1, u2) = self.split_ku(basis, n, e)?;
        Ok(sandwich_norm(&k, &u2))
    }

    /// ||K^{-1/2} U1 K^{-1/2}|| (U1 is diagonal and nonpositive).
    pub fn u1_tilde_norm(&self, basis: &FockBasis, n: usize, e: f64) -> Result<f64> {
        let (k, u1, _u2) = self.split_ku(basis, n, e)?;
        Ok(sandwich_norm(&k, &u1))
    }

    /// ||U(E) H0^{-1}|| on an n >= 1 sector (H0 >= nm there).
    pub fn u_h0_inverse_norm(&self, basis: &FockBasis, n: usize, e: f64) -> Result<f64> {
        if n == 0 {
            return Err(Error::Domain(
                "relative bound needs an n >= 1 sector".into(),
            ));
        }
        let (_k, u1, u2) = self.split_ku(basis, n, e)?;
        let sector = basis.sector(n);
        let h0 = self.h0_diagonal(basis, &sector);
        let mut m = u1 + u2;
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                m[(i, j)] /= h0[j];
            }
        }
        Ok(m.singular_values().max())
    }

    /// Vacuum-sector scalar Phi(E) for complex E with Re E < mu.
    pub fn vacuum_principal(&self, e: Complex64) -> Result<Complex64> {
        if !(e.re < self.binding) {
            return Err(Error::WindowViolation(format!(
                "vacuum principal operator needs Re E < mu = {}",
                self.binding
            )));
        }
        let a_rate = self.boson_mass - self.binding;
        let b = Complex64::from(self.boson_mass) - e;
        let slow = a_rate.min(b.re);
        let fast = a_rate.max(b.re);
        let lam2 = self.coupling * self.coupling;
        let de = Complex64::from(a_rate) - b;
        let integral = laplace_integral_scaled(
            |t| {
                let k = self
                    .manifold
                    .heat_kernel(self.center, self.center, t)
                    .unwrap_or(0.0);
                if (de * t).norm() <= 0.5 {
                    -Complex64::from((-a_rate * t).exp()) * expm1c(de * t) * k
                } else {
                    (Complex64::from((-a_rate * t).exp()) - (-b * t).exp()) * k
                }
            },
            slow,
            fast,
            &self.quad,
        )?;
        Ok(-e + self.binding + lam2 * integral)
    }

    fn negative_count(&self, basis: &FockBasis, n: usize, e: f64) -> Result<usize> {
        let phi = self.principal_operator(basis, n, e)?;
        Ok(phi
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .filter(|v| **v < 0.0)
            .count())
    }

    /// Smallest E in the window where the minimal eigenvalue of Phi on the
    /// n-boson sector crosses zero; None if Phi stays positive.
    pub fn ground_state_energy(
        &self,
        basis: &FockBasis,
        n: usize,
        window: (f64, f64),
    ) -> Result<Option<f64>> {
        let threshold = n as f64 * self.boson_mass + self.binding;
        let (e_lo, mut e_hi) = window;
        e_hi = e_hi.min(threshold - 1e-9 * threshold.abs().max(1.0));
        if !(e_lo < e_hi) {
            return Err(Error::Domain("empty ground-state window".into()));
        }
        if self.negative_count(basis, n, e_lo)? > 0 {
            return Err(Error::Domain(
                "window low edge already below the ground state".into(),
            ));
        }
        if self.negative_count(basis, n, e_hi)? == 0 {
            return Ok(None);
        }
        let (mut a, mut b) = (e_lo, e_hi);
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if self.negative_count(basis, n, mid)? >= 1 {
                b = mid;
            } else {
                a = mid;
            }
            if (b - a).abs() < 1e-13 * b.abs().max(1e-10) {
                break;
            }
        }
        Ok(Some(0.5 * (a + b)))
    }

    /// Ground state with the mode-truncation convergence diagnostic.
    pub fn ground_state_report(
        &self,
        basis: &FockBasis,
        n: usize,
        window: (f64, f64),
    ) -> Result<Option<GroundState>> {
        let Some(energy) = self.ground_state_energy(basis, n, window)? else {
            return Ok(None);
        };
        let half = LeeModel::new(
            self.manifold.geometry.clone(),
            [0.0; 3],
            self.coupling,
            self.boson_mass,
            self.binding,
            (self.mode_count() / 2).max(1),
        )
        .map(|mut m| {
            m.center = self.center;
            m.mode_values = m
                .manifold
                .spectral_basis(m.mode_count())
                .unwrap()
                .modes
                .iter()
                .map(|md| md.eval(self.center))
                .collect();
            m
        })?;
        let half_basis = FockBasis::new(half.mode_count(), basis.n_max);
        let energy_half = half
            .ground_state_energy(&half_basis, n, window)?
            .unwrap_or(f64::NAN);
        Ok(Some(GroundState {
            energy,
            energy_half_modes: energy_half,
            sector_dim: basis.sector(n).len(),
            mode_count: self.mode_count(),
        }))
    }
}

/// ||K^{-1/2} A K^{-1/2}|| for diagonal positive K and symmetric A.
fn sandwich_norm(k: &DMatrix<f64>, a: &DMatrix<f64>) -> f64 {
    let dim = k.nrows();
    let mut m = a.clone();
    for i in 0..dim {
        for j in 0..dim {
            m[(i, j)] /= (k[(i, i)] * k[(j, j)]).sqrt();
        }
    }
    m.symmetric_eigen()
        .eigenvalues
        .iter()
        .map(|v| v.abs())
        .fold(0.0, f64::max)
}

/// Analytic lower bound on the ground state energy with calibrated
/// constants:
///   compact:         n m + mu - (n lambda^2 C32)^{1/(2 - D/2)},
///   Cartan-Hadamard: n m + mu - (n C31 lambda^2 m^{D/2})^{1/(2 - D/2)}.
pub fn ground_state_lower_bound(
    manifold: &ManifoldSpec,
    n: usize,
    coupling: f64,
    boson_mass: f64,
    binding: f64,
) -> Result<(f64, &'static str)> {
    let d = manifold.dim() as f64;
    let consts = bound_constants(manifold)?;
    let lam2 = coupling * coupling;
    let nf = n as f64;
    let exponent = 1.0 / (2.0 - d / 2.0);
    let m = boson_mass;
    let threshold = nf * m + binding;
    if n == 0 {
        return Ok((binding, consts.provenance));
    }
    match manifold.class() {
        ManifoldClass::Compact => {
            if !(binding > 0.0) {
                return Err(Error::MissingConstants(
                    "the compact-bound bracket needs mu > 0".into(),
                ));
            }
            let v = manifold.volume().unwrap();
            let a_prime = 2.0_f64.powf(d / 2.0) * consts.c2;
            let g = gamma(2.0) / gamma(0.5).powi(2);
            let t1 = 4.0 * consts.c1 / (v * binding.powf(d / 2.0));
            let t2 = 4.0
                * (a_prime * consts.c1).sqrt()
                * m.powf(d / 4.0)
                * std::f64::consts::PI.sqrt()
                * gamma(2.0 - d / 4.0)
                * gamma(1.0 - d / 4.0)
                / (binding.powf(d / 4.0) * v.sqrt() * gamma(1.5 - d / 4.0));
            let t3 = a_prime
                * m.powf(d / 2.0)
                * std::f64::consts::PI
                * gamma(2.0 - d / 2.0)
                * gamma(1.0 - d / 4.0).powi(2)
                / gamma(1.5 - d / 4.0).powi(2);
            let c32 = g * (t1 + t2 + t3);
            Ok((
                threshold - (nf * lam2 * c32).powf(exponent),
                consts.provenance,
            ))
        }
        ManifoldClass::CartanHadamard => {
            let c30 = 2.0_f64.powf(d / 2.0) * consts.c4;
            let c31 = c30 * std::f64::consts::PI * gamma(2.0) * gamma(1.0 - d / 4.0).powi(2)
                * gamma(2.0 - d / 2.0)
                / (gamma(0.5).powi(2) * gamma(1.5 - d / 4.0).powi(2));
            Ok((
                threshold - (nf * c31 * lam2 * m.powf(d / 2.0)).powf(exponent),
                consts.provenance,
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootfind::bisect_secant;
    use approx::assert_relative_eq;

    fn torus_model(coupling: f64, mode_count: usize) -> LeeModel {
        let l = 2.0 * std::f64::consts::PI;
        LeeModel::new(
            Geometry::FlatTorus {
                lengths: vec![l, l],
            },
            [1.0, 1.2, 0.0],
            coupling,
            1.0,
            0.5,
            mode_count,
        )
        .unwrap()
    }

    #[test]
    fn fock_dimension_matches_enumeration() {
        for (m, nm) in [(3usize, 2usize), (5, 3), (25, 2)] {
            let basis = FockBasis::new(m, nm);
            assert_eq!(basis.len(), fock_dimension(m, nm));
        }
        // M=25, n_max=2: 1 + 25 + 325.
        assert_eq!(fock_dimension(25, 2), 351);
    }

    #[test]
    fn h0_diagonal_values() {
        let model = torus_model(0.5, 9);
        let basis = FockBasis::new(9, 2);
        // Vacuum -> 0.
        let vac = model.h0_diagonal(&basis, &basis.sector(0));
        assert_eq!(vac[0], 0.0);
        // One boson in the constant mode -> m.
        let one = basis.sector(1);
        let h1 = model.h0_diagonal(&basis, &one);
        let mut state0 = vec![0u16; 9];
        state0[0] = 1;
        let pos = one
            .iter()
            .position(|&i| basis.states[i] == state0)
            .unwrap();
        assert_relative_eq!(h1[pos], 1.0, max_relative = 1e-15);
        // Two bosons in modes (sigma, tau) -> kappa(l_s + l_t) + 2m.
        let two = basis.sector(2);
        let h2 = model.h0_diagonal(&basis, &two);
        for (row, &idx) in two.iter().enumerate() {
            let expect: f64 = basis.states[idx]
                .iter()
                .enumerate()
                .map(|(s, occ)| *occ as f64 * (0.5 * model.mode_lambdas[s] + 1.0))
                .sum();
            assert_relative_eq!(h2[row], expect, max_relative = 1e-14);
        }
    }

    #[test]
    fn vacuum_sector_matches_flat_limit_closed_form() {
        // Large 3-torus: Phi_vac(E) -> -E + mu + lambda^2 (m/2pi)^{3/2}
        //                              2 sqrt(pi) (sqrt(m-E) - sqrt(m-mu)).
        let l = 100.0;
        let (m, mu, lam) = (1.0, 0.5, 0.7);
        let model = LeeModel::new(
            Geometry::FlatTorus {
                lengths: vec![l, l, l],
            },
            [3.0, 4.0, 5.0],
            lam,
            m,
            mu,
            4,
        )
        .unwrap();
        for &e in &[-1.0, -0.2, 0.3] {
            let phi = model.vacuum_principal(Complex64::new(e, 0.0)).unwrap().re;
            let flat = -e
                + mu
                + lam * lam
                    * (m / (2.0 * std::f64::consts::PI)).powf(1.5)
                    * 2.0
                    * std::f64::consts::PI.sqrt()
                    * ((m - e).sqrt() - (m - mu).sqrt());
            assert_relative_eq!(phi, flat, max_relative = 1e-8);
        }
    }

    #[test]
    fn vacuum_principal_vanishes_at_mu_for_weak_coupling() {
        let l = 2.0 * std::f64::consts::PI;
        let model = LeeModel::new(
            Geometry::FlatTorus {
                lengths: vec![l, l],
            },
            [1.0, 1.0, 0.0],
            1e-6,
            1.0,
            0.5,
            4,
        )
        .unwrap();
        let phi = model
            .vacuum_principal(Complex64::new(0.5 - 1e-12, 0.0))
            .unwrap();
        assert!(phi.norm() < 1e-11, "got {phi}");
    }

    #[test]
    fn principal_operator_is_symmetric() {
        let model = torus_model(0.8, 9);
        let basis = FockBasis::new(9, 2);
        for n in [1usize, 2] {
            let phi = model.principal_operator(&basis, n, -1.0).unwrap();
            let asym = (&phi - phi.transpose()).abs().max();
            assert!(asym < 1e-12 * phi.abs().max(), "sector {n}: {asym}");
        }
    }

    #[test]
    fn split_positivity_properties() {
        let model = torus_model(0.8, 9);
        let basis = FockBasis::new(9, 2);
        let n = 1;
        let e = 0.3; // below n m + mu = 1.5
        let (k, u1, u2) = model.split_ku(&basis, n, e).unwrap();
        // K >= nm - E + mu on the sector.
        let floor = n as f64 * 1.0 - e + 0.5;
        for i in 0..k.nrows() {
            assert!(k[(i, i)] >= floor - 1e-12);
        }
        // U1 <= 0.
        let u1_max = u1
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(u1_max <= 1e-12, "max eig of U1 = {u1_max}");
        // U2 >= 0 (Gram structure).
        let u2_min = u2
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        assert!(u2_min >= -1e-12, "min eig of U2 = {u2_min}");
        // Reconstruction.
        let phi = model.principal_operator(&basis, n, e).unwrap();
        let recon = &k - &u1 - &u2;
        assert!((&phi - recon).abs().max() < 1e-12 * phi.abs().max().max(1.0));
    }

    #[test]
    fn u2_tilde_scales_quadratically_in_coupling_and_decays_in_e() {
        let basis = FockBasis::new(9, 1);
        let a = torus_model(0.3, 9);
        let b = torus_model(0.6, 9);
        let na = a.u2_tilde_norm(&basis, 1, 0.0).unwrap();
        let nb = b.u2_tilde_norm(&basis, 1, 0.0).unwrap();
        assert_relative_eq!(nb / na, 4.0, max_relative = 1e-10);
        // Monotone decrease as E decreases.
        let mut prev = f64::INFINITY;
        for &e in &[0.5, -1.0, -4.0, -16.0] {
            let v = a.u2_tilde_norm(&basis, 1, e).unwrap();
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn ground_state_vacuum_is_pinned_at_binding() {
        // The renormalization condition places the vacuum-sector zero at
        // E = mu exactly; the flat-limit scalar form has the same root.
        let l = 100.0;
        let (m, mu, lam) = (1.0, 0.5, 0.7);
        let model = LeeModel::new(
            Geometry::FlatTorus {
                lengths: vec![l, l, l],
            },
            [0.0, 0.0, 0.0],
            lam,
            m,
            mu,
            2,
        )
        .unwrap();
        let basis = FockBasis::new(2, 1);
        // Strictly below the threshold there is no crossing...
        assert!(model
            .ground_state_energy(&basis, 0, (-10.0, mu - 1e-6))
            .unwrap()
            .is_none());
        // ...and the scalar oracle root sits at mu itself (the scalar form
        // continues smoothly above mu and changes sign there).
        let scalar = |e: f64| {
            -e + mu
                + lam * lam
                    * (m / (2.0 * std::f64::consts::PI)).powf(1.5)
                    * 2.0
                    * std::f64::consts::PI.sqrt()
                    * ((m - e).sqrt() - (m - mu).sqrt())
        };
        let oracle = bisect_secant(scalar, -10.0, 0.9, 1e-13);
        assert_relative_eq!(oracle, mu, max_relative = 1e-10);
        // Phi_vac approaches zero linearly from above as E -> mu^-.
        let phi = model.vacuum_principal(Complex64::new(mu - 1e-7, 0.0)).unwrap();
        assert!(phi.re > 0.0 && phi.re < 2e-7, "got {}", phi.re);
    }

    #[test]
    fn ground_state_approaches_threshold_weak_coupling() {
        let basis = FockBasis::new(9, 1);
        let threshold = 1.0 + 0.5;
        let mut prev_gap = f64::INFINITY;
        for &lam in &[0.4, 0.2, 0.1] {
            let model = torus_model(lam, 9);
            let e = model
                .ground_state_energy(&basis, 1, (-4.0, threshold - 1e-9))
                .unwrap()
                .expect("root");
            let gap = threshold - e;
            assert!(gap > 0.0 && gap < prev_gap);
            prev_gap = gap;
        }
    }

    #[test]
    fn ground_state_monotone_in_mode_count() {
        let basis12 = FockBasis::new(12, 1);
        let basis25 = FockBasis::new(25, 1);
        let m12 = torus_model(1.0, 12);
        let m25 = torus_model(1.0, 25);
        let e12 = m12
            .ground_state_energy(&basis12, 1, (-4.0, 1.4999))
            .unwrap()
            .unwrap();
        let e25 = m25
            .ground_state_energy(&basis25, 1, (-4.0, 1.4999))
            .unwrap()
            .unwrap();
        assert!(e25 <= e12 + 1e-12, "e25={e25} e12={e12}");
        assert!((e12 - e25).abs() < 0.01 * e12.abs(), "poor truncation");
    }

    #[test]
    fn ground_state_dominates_calibrated_lower_bound() {
        let basis = FockBasis::new(16, 1);
        for &lam in &[0.1, 0.5, 1.0] {
            let model = torus_model(lam, 16);
            let e = model
                .ground_state_energy(&basis, 1, (-8.0, 1.4999))
                .unwrap()
                .unwrap();
            let (bound, prov) =
                ground_state_lower_bound(&model.manifold, 1, lam, 1.0, 0.5).unwrap();
            assert_eq!(prov, "calibrated");
            assert!(e >= bound, "lambda={lam}: E_gr={e} < bound={bound}");
        }
    }

    #[test]
    fn strict_positivity_criterion_on_grid() {
        // Wherever ||U2~|| < 1 (U1 <= 0 always), Phi must be positive.
        let basis = FockBasis::new(9, 1);
        for &lam in &[0.2, 0.6, 1.2] {
            let model = torus_model(lam, 9);
            for &e in &[-8.0, -2.0, 0.0, 1.0] {
                let u2n = model.u2_tilde_norm(&basis, 1, e).unwrap();
                let u1max = model
                    .split_ku(&basis, 1, e)
                    .unwrap()
                    .1
                    .symmetric_eigen()
                    .eigenvalues
                    .iter()
                    .cloned()
                    .fold(f64::NEG_INFINITY, f64::max);
                assert!(u1max <= 1e-12);
                if u2n < 1.0 {
                    let mineig = model
                        .principal_operator(&basis, 1, e)
                        .unwrap()
                        .symmetric_eigen()
                        .eigenvalues
                        .iter()
                        .cloned()
                        .fold(f64::INFINITY, f64::min);
                    assert!(
                        mineig > 0.0,
                        "lambda={lam}, E={e}: ||U2~||={u2n} but min eig = {mineig}"
                    );
                }
            }
        }
    }

    #[test]
    fn three_torus_sector_obeys_calibrated_bound() {
        // D = 3: departure exponent 1/(2 - D/2) = 2, so the bound is
        // threshold - (n lambda^2 C32)^2.
        let l = 2.0 * std::f64::consts::PI;
        let model = LeeModel::new(
            Geometry::FlatTorus {
                lengths: vec![l, l, l],
            },
            [1.0, 2.0, 3.0],
            0.4,
            1.0,
            0.5,
            13,
        )
        .unwrap();
        let basis = FockBasis::new(model.mode_count(), 1);
        let (k, u1, u2) = model.split_ku(&basis, 1, 0.2).unwrap();
        assert!(k.diagonal().iter().all(|v| *v > 0.0));
        let recon = &k - &u1 - &u2;
        let phi = model.principal_operator(&basis, 1, 0.2).unwrap();
        assert!((&phi - recon).abs().max() < 1e-12);
        let e_gr = model
            .ground_state_energy(&basis, 1, (-3.0, 1.4999))
            .unwrap()
            .expect("root");
        let (bound, _) = ground_state_lower_bound(&model.manifold, 1, 0.4, 1.0, 0.5).unwrap();
        assert!(e_gr >= bound, "E_gr {e_gr} < bound {bound}");
    }

    #[test]
    fn vacuum_conjugate_symmetry() {
        let model = torus_model(0.9, 4);
        let e = Complex64::new(-1.2, 0.8);
        let a = model.vacuum_principal(e).unwrap();
        let b = model.vacuum_principal(e.conj()).unwrap();
        assert!((a.conj() - b).norm() < 1e-12 * a.norm());
    }

    #[test]
    fn relative_bound_finite_and_linear_in_sector() {
        let model = torus_model(0.7, 16);
        let basis = FockBasis::new(16, 2);
        let e = 0.25; // mu/2
        let n1 = model.u_h0_inverse_norm(&basis, 1, e).unwrap();
        assert!(n1.is_finite() && n1 > 0.0);
        let n2 = model.u_h0_inverse_norm(&basis, 2, e).unwrap();
        let ratio = n2 / (2.0 * n1);
        assert!(ratio < 3.0 && ratio > 1.0 / 3.0, "ratio {ratio}");
        // The U1 part grows like ln|E| in D=2, so the whole norm is bounded
        // only relative to the log envelope (the U2 part decays).
        let mut scaled = Vec::new();
        for &ee in &[0.25, -4.0, -64.0, -1024.0] {
            let v = model.u_h0_inverse_norm(&basis, 1, ee).unwrap();
            scaled.push(v / (1.0 + (2.0 - ee).ln()));
        }
        let hi = scaled.iter().cloned().fold(0.0_f64, f64::max);
        let lo = scaled.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(hi / lo < 2.5, "log-envelope ratio {}", hi / lo);
    }
}
