//! Sweep-and-fit verification of the analytic bounds: alpha scaling,
//! inverse-principal-matrix shapes, heat-kernel domination, Bishop-Gunther
//! containment, the free-resolvent decay form, the relativistic decay
//! functional, and the Lee-model norm and ground-state bounds.

use rayon::prelude::*;

use crate::error::Result;
use crate::fit::log_log_slope;
use crate::geometry::{bound_constants, ManifoldClass, ManifoldSpec};
use crate::lee::{ground_state_lower_bound, FockBasis, LeeModel};
use crate::point_interaction::{phi_inverse_norm, PointSystem};
use crate::relativistic::RelativisticModel;
use crate::verify::{BoundReport, ConstantEntry, ExponentFit, Verdict};

use num_complex::Complex64;

fn geometric_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| lo * (hi / lo).powf(k as f64 / (n - 1) as f64))
        .collect()
}

/// Calibrate a prefactor on the first half of a sweep and verify domination
/// on the second half; returns (prefactor, violated).
fn calibrate_and_verify(values: &[f64], shapes: &[f64]) -> (f64, bool) {
    let half = values.len() / 2;
    let mut c = 0.0_f64;
    for i in 0..half {
        if shapes[i] > 0.0 {
            c = c.max(values[i] / shapes[i]);
        }
    }
    c *= 1.05;
    let mut violated = false;
    for i in half..values.len() {
        if values[i] > c * shapes[i] * (1.0 + 1e-9) {
            violated = true;
        }
    }
    (c, violated)
}

/// alpha_i(E) scaling: exponent D/2 - 2 and domination by the bound form
/// C1/(V |E|^2) + C2 Gamma(2 - D/2) (2m)^{D/2} |E|^{D/2 - 2}.
pub fn check_alpha_scaling(sys: &PointSystem) -> Result<BoundReport> {
    let mut rep = BoundReport::new("alpha_scaling", "nonrelativistic", &sys.manifold.label());
    let d = sys.manifold.dim() as f64;
    let m = sys.centers.mass;
    let consts = bound_constants(&sys.manifold)?;
    let grid = geometric_grid(1e2 * m, 1e6 * m, 13);
    let gamma_term = crate::special::gamma(2.0 - d / 2.0) * (2.0 * m).powf(d / 2.0);
    // The sweep points are independent jobs.
    let values: Vec<f64> = grid
        .par_iter()
        .map(|&ea| sys.alpha(0, 0, -ea))
        .collect::<Result<_>>()?;
    for (&ea, &a) in grid.iter().zip(values.iter()) {
        let bound = match sys.manifold.class() {
            ManifoldClass::Compact => {
                let v = sys.manifold.volume().unwrap();
                consts.c1 / (v * ea * ea) + consts.c2 * gamma_term * ea.powf(d / 2.0 - 2.0)
            }
            ManifoldClass::CartanHadamard => {
                consts.c4 * gamma_term * ea.powf(d / 2.0 - 2.0)
            }
        };
        rep.grid.push(ea);
        rep.values.push(a);
        rep.bound.push(bound);
    }
    let tail = rep.grid.len() - 9;
    let (slope, err) = log_log_slope(&rep.grid[tail..], &rep.values[tail..]);
    rep.exponent_fit = Some(ExponentFit {
        value: slope,
        std_err: err,
        expected: d / 2.0 - 2.0,
    });
    let violated = rep
        .values
        .iter()
        .zip(rep.bound.iter())
        .any(|(v, b)| v > &(b * (1.0 + 1e-9)))
        || (slope - (d / 2.0 - 2.0)).abs() > 0.1;
    rep.constants.push(ConstantEntry {
        name: "C2_or_C4".into(),
        value: if sys.manifold.class() == ManifoldClass::Compact {
            consts.c2
        } else {
            consts.c4
        },
        provenance: consts.provenance.into(),
    });
    rep.set_dominated(consts.provenance == "calibrated", violated);
    Ok(rep)
}

/// ||Phi^{-1}(E)|| shape: D=2 log form, D=3 inverse square root.
pub fn check_phi_inverse_scaling(sys: &PointSystem) -> Result<BoundReport> {
    let mut rep =
        BoundReport::new("phi_inverse_scaling", "nonrelativistic", &sys.manifold.label());
    let d = sys.manifold.dim();
    let m = sys.centers.mass;
    let mu2: f64 = sys
        .centers
        .bindings
        .iter()
        .map(|mu| mu * mu)
        .fold(0.0_f64, f64::max);
    let consts = bound_constants(&sys.manifold)?;
    let xi = consts.xi;
    let grid = geometric_grid(1e2 * m, 1e6 * m, 13);
    // Off-diagonal entries are exponentially tiny across this sweep; their
    // own relative accuracy is limited by kernel branch noise, and 1e-9 is
    // ample for a shape check with +/- 50% headroom.
    let mut sweep_sys = sys.clone();
    sweep_sys.quad.relative_tolerance = sys.quad.relative_tolerance.max(1e-9);
    let norms: Vec<f64> = grid
        .par_iter()
        .map(|&ea| {
            sweep_sys
                .principal_matrix_real(-ea)
                .map(|phi| phi_inverse_norm(&phi))
        })
        .collect::<Result<_>>()?;
    rep.notes
        .push("sweep quadrature relative tolerance 1e-9".into());
    let mut shapes = Vec::new();
    for (&ea, &v) in grid.iter().zip(norms.iter()) {
        let shape = match d {
            2 => 1.0 / (2.0 * m * ((ea + xi) / (mu2 + xi)).ln()),
            _ => (2.0 * m).powf(-1.5) / ea.sqrt(),
        };
        rep.grid.push(ea);
        rep.values.push(v);
        shapes.push(shape);
    }
    let (c, violated) = calibrate_and_verify(&rep.values, &shapes);
    rep.bound = shapes.iter().map(|s| c * s).collect();
    rep.constants.push(ConstantEntry {
        name: if d == 2 { "C7_or_C9" } else { "C8_or_C10" }.into(),
        value: c,
        provenance: "calibrated".into(),
    });
    if xi > 0.0 {
        rep.constants.push(ConstantEntry {
            name: "xi".into(),
            value: xi,
            provenance: "externally defined, calibrated".into(),
        });
        rep.notes
            .push("xi is set to the spectral bottom kappa/(4 rho^2)".into());
    }
    // The normalized quantity must stay bounded: ratio over the last decade.
    let tail: Vec<f64> = rep
        .values
        .iter()
        .zip(shapes.iter())
        .rev()
        .take(4)
        .map(|(v, s)| v / s)
        .collect();
    let hi = tail.iter().cloned().fold(0.0_f64, f64::max);
    let lo = tail.iter().cloned().fold(f64::INFINITY, f64::min);
    rep.set_dominated(true, violated || hi / lo > 1.5);
    Ok(rep)
}

/// Pointwise heat-kernel domination on an (x, y, t) grid.
pub fn check_heat_bounds(spec: &ManifoldSpec) -> Result<BoundReport> {
    let mut rep = BoundReport::new("heat_kernel_bound", "manifold", &spec.label());
    let consts = bound_constants(spec)?;
    let scale = match &spec.geometry {
        crate::geometry::Geometry::FlatSpace { .. } => 1.0 / spec.kappa,
        crate::geometry::Geometry::FlatTorus { lengths } => {
            lengths.iter().cloned().fold(f64::INFINITY, f64::min).powi(2) / spec.kappa
        }
        crate::geometry::Geometry::Sphere2 { radius }
        | crate::geometry::Geometry::Hyperbolic2 { radius } => radius * radius / spec.kappa,
    };
    let grid = spec.grid(20);
    let step = (grid.len() / 20).max(1);
    let xs: Vec<_> = grid.points.iter().step_by(step * 4).take(5).cloned().collect();
    let ys: Vec<_> = grid.points.iter().step_by(step).take(20).cloned().collect();
    let ts = geometric_grid(1e-3 * scale, 10.0 * scale, 10);
    let margins: Vec<(f64, bool)> = xs
        .par_iter()
        .map(|&x| {
            let mut worst = f64::INFINITY;
            let mut bad = false;
            for &y in &ys {
                for &t in &ts {
                    let k = spec.heat_kernel(x, y, t)?;
                    let b = spec.heat_kernel_upper_bound(x, y, t)?;
                    let slack = b - k;
                    worst = worst.min(slack / b.max(1e-300));
                    if slack < -1e-12 * k.abs().max(1e-300) {
                        bad = true;
                    }
                }
            }
            Ok((worst, bad))
        })
        .collect::<Result<_>>()?;
    let violated = margins.iter().any(|m| m.1);
    let worst_margin = margins
        .iter()
        .map(|m| m.0)
        .fold(f64::INFINITY, f64::min);
    rep.grid = ts;
    rep.values.push(worst_margin);
    rep.constants.extend([
        ConstantEntry {
            name: "C1".into(),
            value: consts.c1,
            provenance: consts.provenance.into(),
        },
        ConstantEntry {
            name: "C2".into(),
            value: consts.c2,
            provenance: consts.provenance.into(),
        },
        ConstantEntry {
            name: "C4".into(),
            value: consts.c4,
            provenance: consts.provenance.into(),
        },
    ]);
    rep.notes
        .push("values[0] is the worst relative margin (bound - kernel)/bound".into());
    rep.set_dominated(consts.provenance == "calibrated", violated);
    Ok(rep)
}

/// Bishop-Gunther containment of the polar Jacobian.
pub fn check_jacobian_bounds(spec: &ManifoldSpec) -> Result<BoundReport> {
    let mut rep = BoundReport::new("jacobian_bounds", "manifold", &spec.label());
    let inj = spec.injectivity_radius();
    let rmax = if inj.is_finite() { 0.9 * inj } else { 4.0 };
    let mut violated = false;
    for k in 1..=24 {
        let r = rmax * k as f64 / 24.0;
        let (lo, hi) = spec.jacobian_bounds(r)?;
        let j = spec.jacobian(r)?;
        rep.grid.push(r);
        rep.values.push(j);
        rep.bound.push(hi);
        if j > hi * (1.0 + 1e-12) || j < lo * (1.0 - 1e-12) {
            violated = true;
        }
    }
    rep.set_dominated(false, violated);
    Ok(rep)
}

/// D = 3 free-resolvent upper bound over a (d, |E|) grid, with the
/// bound-form envelope and the sqrt|E| exponent fit on flat space.
pub fn check_free_resolvent_bound(sys: &PointSystem) -> Result<BoundReport> {
    let mut rep =
        BoundReport::new("free_resolvent_bound", "nonrelativistic", &sys.manifold.label());
    if sys.manifold.dim() != 3 {
        return Err(crate::error::Error::Unsupported(
            "the free-resolvent bound check is three-dimensional".into(),
        ));
    }
    let m = sys.centers.mass;
    let consts = bound_constants(&sys.manifold)?;
    let a = sys.centers.positions[0];
    let ds = [0.2, 0.45, 0.8, 1.2];
    let es = geometric_grid(1.0 * m, 1e4 * m, 8);
    let c_exp = if sys.manifold.class() == ManifoldClass::CartanHadamard {
        consts.c5
    } else {
        consts.c3
    };
    let mut values = Vec::new();
    let mut shapes = Vec::new();
    for &dd in &ds {
        for &ea in &es {
            let y = offset_point(sys, a, dd);
            let r0 = sys
                .free_resolvent(a, y, Complex64::new(-ea, 0.0))?
                .re;
            let d_real = sys.manifold.geodesic_distance(a, y);
            let mut shape =
                m / d_real * (-2.0 * (m * d_real * d_real * ea / c_exp).sqrt()).exp();
            if sys.manifold.class() == ManifoldClass::Compact {
                let v = sys.manifold.volume().unwrap();
                shape += d_real * m.sqrt() / (v * ea.sqrt())
                    * (1.0 + (c_exp / (m * d_real * d_real * ea)).sqrt())
                    * (-2.0 * (m * d_real * d_real * ea / c_exp).sqrt()).exp();
            }
            values.push(r0);
            shapes.push(shape);
            rep.grid.push(ea);
        }
    }
    let (c, violated) = calibrate_and_verify(&values, &shapes);
    rep.values = values;
    rep.bound = shapes.iter().map(|s| c * s).collect();
    rep.constants.push(ConstantEntry {
        name: "C12_or_C14".into(),
        value: c,
        provenance: "calibrated".into(),
    });
    // Exponent of the exponential argument in |E| on flat space:
    // ln(-ln(R0 2 pi d / m)) against ln |E| has slope 1/2.
    if sys.manifold.class() == ManifoldClass::CartanHadamard {
        let dd = ds[1];
        let mut lx = Vec::new();
        let mut ly = Vec::new();
        for &ea in &es {
            let y = offset_point(sys, a, dd);
            let r0 = sys.free_resolvent(a, y, Complex64::new(-ea, 0.0))?.re;
            let d_real = sys.manifold.geodesic_distance(a, y);
            let arg = -(r0 * 2.0 * std::f64::consts::PI * d_real / m).ln();
            if arg > 0.1 {
                lx.push(ea);
                ly.push(arg);
            }
        }
        let (slope, err) = log_log_slope(&lx, &ly);
        rep.exponent_fit = Some(ExponentFit {
            value: slope,
            std_err: err,
            expected: 0.5,
        });
        if (slope - 0.5).abs() > 0.1 {
            rep.verdict = Verdict::Violated;
            return Ok(rep);
        }
    }
    rep.set_dominated(true, violated);
    Ok(rep)
}

fn offset_point(
    sys: &PointSystem,
    a: crate::geometry::Point,
    d: f64,
) -> crate::geometry::Point {
    match &sys.manifold.geometry {
        crate::geometry::Geometry::FlatSpace { .. } => {
            crate::geometry::Point([a.0[0] + d, a.0[1], a.0[2]])
        }
        crate::geometry::Geometry::FlatTorus { .. } => sys
            .manifold
            .point([a.0[0] + d, a.0[1], a.0[2]])
            .unwrap(),
        _ => unreachable!("D=3 geometries only"),
    }
}

/// Decay functional slope: I(E) ~ C27/|E| leading order.
pub fn check_decay_functional(model: &RelativisticModel) -> Result<BoundReport> {
    let mut rep = BoundReport::new("decay_functional", "relativistic", &model.manifold.label());
    let m = model.boson_mass;
    let grid = geometric_grid(1e2 * m, 1e6 * m, 13);
    let mut shapes = Vec::new();
    for &ea in &grid {
        let v = model.decay_functional(0, -ea)?;
        rep.grid.push(ea);
        rep.values.push(v.value);
        shapes.push(1.0 / ea);
    }
    let (slope, err) = log_log_slope(&rep.grid, &rep.values);
    rep.exponent_fit = Some(ExponentFit {
        value: slope,
        std_err: err,
        expected: -1.0,
    });
    let (c, violated) = calibrate_and_verify(&rep.values, &shapes);
    rep.bound = shapes.iter().map(|s| c * s).collect();
    rep.constants.push(ConstantEntry {
        name: "C27".into(),
        value: c,
        provenance: "calibrated".into(),
    });
    rep.set_dominated(true, violated || (slope + 1.0).abs() > 0.1);
    Ok(rep)
}

/// ||U1~(E)||: sign, quadratic coupling scaling, and decay at least as fast
/// as the |E|^{-1/2} envelope.
pub fn check_lee_u1_bound(model: &LeeModel, basis: &FockBasis, n: usize) -> Result<BoundReport> {
    let mut rep = BoundReport::new("lee_u1_bound", "lee", &model.manifold.label());
    let m = model.boson_mass;
    let lam2 = model.coupling * model.coupling;
    let grid = geometric_grid(1e2 * m, 1e6 * m, 9);
    let mut shapes = Vec::new();
    for &ea in &grid {
        let v = model.u1_tilde_norm(basis, n, -ea)?;
        rep.grid.push(ea);
        rep.values.push(v);
        shapes.push(lam2 / ((m - model.binding).sqrt() * ea.sqrt()));
    }
    let (slope, err) = log_log_slope(&rep.grid, &rep.values);
    rep.exponent_fit = Some(ExponentFit {
        value: slope,
        std_err: err,
        expected: -0.5,
    });
    let (c, violated) = calibrate_and_verify(&rep.values, &shapes);
    rep.bound = shapes.iter().map(|s| c * s).collect();
    rep.constants.push(ConstantEntry {
        name: "C46".into(),
        value: c,
        provenance: "calibrated".into(),
    });
    rep.notes.push(
        "decay exponent must be <= -(1/2) + fit error: at least as fast as the bound"
            .into(),
    );
    let decays_enough = slope <= -0.5 + 2.0 * err + 0.05;
    rep.set_dominated(true, violated || !decays_enough);
    Ok(rep)
}

/// ||U2~(E)|| against the compact-bracket shape (nm + mu - E)^{D/2 - 2}.
pub fn check_lee_u2_bound(model: &LeeModel, basis: &FockBasis, n: usize) -> Result<BoundReport> {
    let mut rep = BoundReport::new("lee_u2_bound", "lee", &model.manifold.label());
    let d = model.manifold.dim() as f64;
    let threshold = n as f64 * model.boson_mass + model.binding;
    let grid: Vec<f64> = geometric_grid(0.5, 1e4, 9)
        .iter()
        .map(|g| threshold - g)
        .collect();
    let mut shapes = Vec::new();
    for &e in &grid {
        let v = model.u2_tilde_norm(basis, n, e)?;
        rep.grid.push(threshold - e);
        rep.values.push(v);
        shapes.push((threshold - e).powf(d / 2.0 - 2.0));
    }
    let (c, violated) = calibrate_and_verify(&rep.values, &shapes);
    rep.bound = shapes.iter().map(|s| c * s).collect();
    rep.constants.push(ConstantEntry {
        name: "C_u2_bracket".into(),
        value: c,
        provenance: "calibrated".into(),
    });
    rep.set_dominated(true, violated);
    Ok(rep)
}

/// Truncated-Fock ground state against the calibrated lower bound, with the
/// weak-coupling departure exponent.
pub fn check_lee_ground_state(
    geometry: crate::geometry::Geometry,
    center: [f64; 3],
    boson_mass: f64,
    binding: f64,
    mode_count: usize,
    n: usize,
    couplings: &[f64],
) -> Result<BoundReport> {
    let mut rep = BoundReport::new("lee_ground_state", "lee", "compact");
    let threshold = n as f64 * boson_mass + binding;
    let mut violated = false;
    for &lam in couplings {
        let model = LeeModel::new(
            geometry.clone(),
            center,
            lam,
            boson_mass,
            binding,
            mode_count,
        )?;
        rep.geometry = model.manifold.label();
        let basis = FockBasis::new(model.mode_count(), n.max(1));
        let e_gr = model
            .ground_state_energy(&basis, n, (threshold - 8.0, threshold - 1e-9))?
            .unwrap_or(threshold);
        let (bound, prov) =
            ground_state_lower_bound(&model.manifold, n, lam, boson_mass, binding)?;
        rep.grid.push(lam);
        rep.values.push(e_gr);
        rep.bound.push(bound);
        if e_gr < bound {
            violated = true;
        }
        if rep.constants.is_empty() {
            rep.constants.push(ConstantEntry {
                name: "C32_assembly".into(),
                value: (threshold - bound) / (n as f64 * lam * lam),
                provenance: prov.into(),
            });
        }
    }
    // Weak-coupling departure: threshold - E_gr ~ lambda^2.
    let mut lx = Vec::new();
    let mut ly = Vec::new();
    for &lam in &[0.05, 0.1, 0.2, 0.4] {
        let model = LeeModel::new(
            geometry.clone(),
            center,
            lam,
            boson_mass,
            binding,
            mode_count,
        )?;
        let basis = FockBasis::new(model.mode_count(), n.max(1));
        if let Some(e_gr) =
            model.ground_state_energy(&basis, n, (threshold - 8.0, threshold - 1e-10))?
        {
            let dep = threshold - e_gr;
            if dep > 1e-12 {
                lx.push(lam);
                ly.push(dep);
            }
        }
    }
    if lx.len() >= 3 {
        let (slope, err) = log_log_slope(&lx, &ly);
        rep.exponent_fit = Some(ExponentFit {
            value: slope,
            std_err: err,
            expected: 2.0,
        });
        if (slope - 2.0).abs() > 0.2 {
            violated = true;
        }
    }
    rep.set_dominated(true, violated);
    Ok(rep)
}

/// Relative bound ||U(E) H0^{-1}||: n-linearity and log-envelope
/// boundedness (the U1 part grows logarithmically in D = 2).
pub fn check_lee_relative_bound(model: &LeeModel, basis: &FockBasis) -> Result<BoundReport> {
    let mut rep = BoundReport::new("lee_relative_bound", "lee", &model.manifold.label());
    let mu = model.binding;
    let m = model.boson_mass;
    let grid: Vec<f64> = geometric_grid(1.0, 1e4, 7)
        .iter()
        .map(|g| mu - 1e-3 * m - g + 1.0)
        .collect();
    let mut shapes = Vec::new();
    for &e in &grid {
        let v = model.u_h0_inverse_norm(basis, 1, e)?;
        rep.grid.push(e);
        rep.values.push(v);
        shapes.push(1.0 + (2.0 * m - e).ln());
    }
    let (c, violated) = calibrate_and_verify(&rep.values, &shapes);
    rep.bound = shapes.iter().map(|s| c * s).collect();
    let n1 = model.u_h0_inverse_norm(basis, 1, 0.5 * mu)?;
    let n2 = model.u_h0_inverse_norm(basis, 2, 0.5 * mu)?;
    let ratio = n2 / (2.0 * n1);
    rep.notes.push(format!(
        "n-linearity ratio ||U H0^-1||(n=2) / 2||.||(n=1) = {ratio:.3}"
    ));
    rep.notes.push(
        "the U1 piece grows like ln|E| in D=2; boundedness is asserted \
         against the log envelope"
            .into(),
    );
    rep.set_dominated(true, violated || !(ratio < 3.0 && ratio > 1.0 / 3.0));
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Geometry, Point};
    use crate::point_interaction::CenterSet;

    fn flat_sys(dim: usize) -> PointSystem {
        let p = if dim == 2 {
            Point::xy(0.0, 0.0)
        } else {
            Point::xyz(0.0, 0.0, 0.0)
        };
        PointSystem::new(
            Geometry::FlatSpace { dim },
            CenterSet::new(vec![p], vec![1.0], 1.0).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn alpha_scaling_flat_2d_and_3d() {
        for dim in [2usize, 3] {
            let rep = check_alpha_scaling(&flat_sys(dim)).unwrap();
            let fit = rep.exponent_fit.as_ref().unwrap();
            assert!(
                (fit.value - fit.expected).abs() < 0.05,
                "dim {dim}: slope {} expected {}",
                fit.value,
                fit.expected
            );
            assert_ne!(rep.verdict, Verdict::Violated);
        }
    }

    #[test]
    fn alpha_scaling_hyperbolic() {
        let sys = PointSystem::new(
            Geometry::Hyperbolic2 { radius: 1.0 },
            CenterSet::new(
                vec![ManifoldSpec::hyperbolic(1.0, 0.5).unwrap().point_polar(0.0, 0.0).unwrap()],
                vec![1.0],
                1.0,
            )
            .unwrap(),
        )
        .unwrap();
        let rep = check_alpha_scaling(&sys).unwrap();
        assert_ne!(rep.verdict, Verdict::Violated);
    }

    #[test]
    fn phi_inverse_scaling_torus_and_flat3() {
        let l = 2.0 * std::f64::consts::PI;
        let torus = PointSystem::new(
            Geometry::FlatTorus {
                lengths: vec![l, l],
            },
            CenterSet::new(vec![Point::xy(1.0, 1.0)], vec![1.0], 1.0).unwrap(),
        )
        .unwrap();
        let rep = check_phi_inverse_scaling(&torus).unwrap();
        assert_ne!(rep.verdict, Verdict::Violated, "torus: {:?}", rep.notes);

        let rep3 = check_phi_inverse_scaling(&flat_sys(3)).unwrap();
        assert_ne!(rep3.verdict, Verdict::Violated);
    }

    #[test]
    fn heat_bounds_hold_on_all_geometries() {
        let l = 2.0 * std::f64::consts::PI;
        let specs = [
            ManifoldSpec::flat(2, 0.5).unwrap(),
            ManifoldSpec::flat(3, 0.5).unwrap(),
            ManifoldSpec::torus(&[l, l], 0.5).unwrap(),
            ManifoldSpec::sphere(1.0, 0.5).unwrap(),
            ManifoldSpec::hyperbolic(1.0, 0.5).unwrap(),
        ];
        for spec in &specs {
            let rep = check_heat_bounds(spec).unwrap();
            assert_ne!(rep.verdict, Verdict::Violated, "{}", spec.label());
        }
    }

    #[test]
    fn jacobian_containment() {
        for spec in [
            ManifoldSpec::sphere(1.0, 0.5).unwrap(),
            ManifoldSpec::hyperbolic(1.0, 0.5).unwrap(),
            ManifoldSpec::flat(3, 0.5).unwrap(),
        ] {
            let rep = check_jacobian_bounds(&spec).unwrap();
            assert_eq!(rep.verdict, Verdict::Holds, "{}", spec.label());
        }
    }

    #[test]
    fn free_resolvent_bound_flat3() {
        let rep = check_free_resolvent_bound(&flat_sys(3)).unwrap();
        assert_ne!(rep.verdict, Verdict::Violated);
        let fit = rep.exponent_fit.unwrap();
        assert!((fit.value - 0.5).abs() < 0.1, "slope {}", fit.value);
    }

    #[test]
    fn free_resolvent_bound_three_torus() {
        let l = 2.0 * std::f64::consts::PI;
        let sys = PointSystem::new(
            Geometry::FlatTorus {
                lengths: vec![l, l, l],
            },
            CenterSet::new(vec![Point::xyz(1.0, 1.0, 1.0)], vec![1.0], 1.0).unwrap(),
        )
        .unwrap();
        let rep = check_free_resolvent_bound(&sys).unwrap();
        assert_ne!(rep.verdict, Verdict::Violated, "{:?}", rep.notes);
    }

    #[test]
    fn lower_bound_without_bosons_is_binding() {
        let spec = ManifoldSpec::torus(&[2.0 * std::f64::consts::PI; 2], 0.5).unwrap();
        let (b, _) = ground_state_lower_bound(&spec, 0, 0.7, 1.0, 0.5).unwrap();
        assert_eq!(b, 0.5);
    }
}
