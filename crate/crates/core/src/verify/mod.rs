//! Numerical probes of the existence-theorem hypotheses (pseudo-resolvent
//! identity, strong limit, conjugate symmetry) and of every analytic bound,
//! each producing a machine-readable verdict.

mod bounds;
mod identity;
mod limit;
mod symmetry;

pub use bounds::{
    check_alpha_scaling, check_decay_functional, check_free_resolvent_bound,
    check_heat_bounds, check_jacobian_bounds, check_lee_ground_state,
    check_lee_relative_bound, check_lee_u1_bound, check_lee_u2_bound,
    check_phi_inverse_scaling,
};
pub use identity::{
    check_lee_vacuum_identity, check_relativistic_matrix_identity,
    check_resolvent_identity, matrix_difference_residual,
};
pub use limit::{check_strong_limit, StrongLimitReport};
pub use symmetry::{
    check_lee_symmetry, check_relativistic_symmetry, check_symmetry_kernel,
};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::geometry::SpectralBasis;
use crate::point_interaction::PointSystem;

/// Outcome of one verification check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    HoldsWithCalibration,
    Violated,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExponentFit {
    pub value: f64,
    pub std_err: f64,
    pub expected: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConstantEntry {
    pub name: String,
    pub value: f64,
    pub provenance: String,
}

/// Sweep-and-compare report: computed quantity against a bound form with
/// calibrated constants, plus an optional fitted scaling exponent.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub check: String,
    pub model: String,
    pub geometry: String,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub bound: Vec<f64>,
    pub exponent_fit: Option<ExponentFit>,
    pub verdict: Verdict,
    pub constants: Vec<ConstantEntry>,
    pub notes: Vec<String>,
}

impl BoundReport {
    pub fn new(check: &str, model: &str, geometry: &str) -> Self {
        Self {
            check: check.into(),
            model: model.into(),
            geometry: geometry.into(),
            grid: Vec::new(),
            values: Vec::new(),
            bound: Vec::new(),
            exponent_fit: None,
            verdict: Verdict::Inconclusive,
            constants: Vec::new(),
            notes: Vec::new(),
        }
    }

    /// Verdict demotion: violated beats calibrated beats holds.
    pub fn set_dominated(&mut self, calibrated: bool, violated: bool) {
        self.verdict = if violated {
            Verdict::Violated
        } else if calibrated {
            Verdict::HoldsWithCalibration
        } else {
            Verdict::Holds
        };
    }
}

/// A named band-limited test function (coefficients in the eigenbasis).
#[derive(Debug, Clone)]
pub struct TestFunction {
    pub name: String,
    pub coeffs: Vec<f64>,
}

/// The four-function battery: a Gaussian bump, a low eigenmode, a seeded
/// random band-limited function and a bump supported away from all centers.
pub fn test_battery(
    sys: &PointSystem,
    basis: &SpectralBasis,
    grid_resolution: usize,
    seed: u64,
) -> Vec<TestFunction> {
    let grid = sys.manifold.grid(grid_resolution);
    let mut battery = Vec::new();

    // Gaussian bump at an arbitrary fixed point.
    let p0 = grid.points[grid.len() / 3];
    let bump = grid.sample(|p| {
        let d = sys.manifold.geodesic_distance(p0, p);
        (-8.0 * d * d).exp()
    });
    battery.push(TestFunction {
        name: "gaussian_bump".into(),
        coeffs: normalize(crate::point_interaction::project(basis, &grid, &bump)),
    });

    // Low eigenmode (first non-constant mode).
    let mut low = vec![0.0; basis.len()];
    if basis.len() > 1 {
        low[1] = 1.0;
    } else {
        low[0] = 1.0;
    }
    battery.push(TestFunction {
        name: "low_eigenmode".into(),
        coeffs: low,
    });

    // Random band-limited function, seeded.
    let mut rng = StdRng::seed_from_u64(seed);
    let coeffs: Vec<f64> = basis
        .modes
        .iter()
        .map(|m| rng.random_range(-1.0..1.0) / (1.0 + m.lambda))
        .collect();
    battery.push(TestFunction {
        name: "random_band_limited".into(),
        coeffs: normalize(coeffs),
    });

    // Bump at the grid point farthest from every center.
    let mut best = (0usize, -1.0);
    for (i, p) in grid.points.iter().enumerate() {
        let dmin = sys
            .centers
            .positions
            .iter()
            .map(|&a| sys.manifold.geodesic_distance(a, *p))
            .fold(f64::INFINITY, f64::min);
        if dmin > best.1 {
            best = (i, dmin);
        }
    }
    let far = grid.points[best.0];
    let far_bump = grid.sample(|p| {
        let d = sys.manifold.geodesic_distance(far, p);
        (-16.0 * d * d).exp()
    });
    battery.push(TestFunction {
        name: "away_from_centers".into(),
        coeffs: normalize(crate::point_interaction::project(basis, &grid, &far_bump)),
    });

    battery
}

fn normalize(mut coeffs: Vec<f64>) -> Vec<f64> {
    let norm = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
    if norm > 0.0 {
        for c in &mut coeffs {
            *c /= norm;
        }
    }
    coeffs
}
