//! Thin drivers mapping subcommands onto library operations.

use anyhow::{anyhow, bail};
use num_complex::Complex64;
use serde_json::{json, Value};

use krein::lee::FockBasis;
use krein::relativistic::subordination_check;
use krein::verify;
use krein::verify::Verdict;

use crate::config::RunConfig;
use crate::output::{Outcome, Sweep};

const ROOT_TOL: f64 = 1e-10;

fn envelope(command: &str, results: Value) -> Value {
    json!({
        "schema_version": 1,
        "command": command,
        "results": results,
    })
}

fn verdict_exit(verdicts: &[Verdict]) -> u8 {
    if verdicts.iter().any(|v| *v == Verdict::Violated) {
        3
    } else {
        0
    }
}

fn report_value(rep: &verify::BoundReport) -> Value {
    serde_json::to_value(rep).expect("report serialization")
}

fn report_rows(rep: &verify::BoundReport, rows: &mut Vec<Vec<String>>) {
    for (i, g) in rep.grid.iter().enumerate() {
        rows.push(vec![
            rep.check.clone(),
            rep.geometry.clone(),
            format!("{g:.12e}"),
            rep.values.get(i).map_or(String::new(), |v| format!("{v:.12e}")),
            rep.bound.get(i).map_or(String::new(), |b| format!("{b:.12e}")),
            format!("{:?}", rep.verdict),
        ]);
    }
}

fn report_sweep(rep: &verify::BoundReport) -> Sweep {
    Sweep {
        name: format!("{}_{}", rep.check, rep.geometry),
        header: format!(
            "{} on {}: grid value (verdict {:?})",
            rep.check, rep.geometry, rep.verdict
        ),
        columns: (rep.grid.clone(), rep.values.clone()),
    }
}

pub fn spectrum(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let window = cfg
        .task
        .window
        .ok_or_else(|| anyhow!("task.window required for spectrum"))?;
    let scan = cfg.task.scan_points.unwrap_or(60);
    let states;
    let warnings;
    match cfg.model.kind.as_str() {
        "nonrelativistic" => {
            let sys = cfg.point_system()?;
            let spec = sys
                .bound_states((window[0], window[1]), scan)
                .map_err(|e| anyhow!("{e}"))?;
            states = spec.states;
            warnings = spec.warnings;
        }
        "relativistic" => {
            let model = cfg.relativistic()?;
            let spec = model
                .bound_states((window[0], window[1]), scan)
                .map_err(|e| anyhow!("{e}"))?;
            states = spec.states;
            warnings = spec.warnings;
        }
        other => bail!("spectrum supports nonrelativistic|relativistic, got {other:?}"),
    }
    let rows: Vec<Value> = states
        .iter()
        .map(|s| {
            json!({
                "energy": s.energy,
                "amplitude": s.amplitude,
                "residual_min_eigenvalue": s.min_eigenvalue,
                "root_tolerance": ROOT_TOL,
            })
        })
        .collect();
    let mut csv = vec![vec![
        "energy".into(),
        "residual_min_eigenvalue".into(),
        "root_tolerance".into(),
        "amplitude".into(),
    ]];
    for s in &states {
        csv.push(vec![
            format!("{:.12e}", s.energy),
            format!("{:.3e}", s.min_eigenvalue),
            format!("{ROOT_TOL:.1e}"),
            s.amplitude
                .iter()
                .map(|a| format!("{a:.9e}"))
                .collect::<Vec<_>>()
                .join(";"),
        ]);
    }
    let exit = if states.is_empty() { 2 } else { 0 };
    Ok(Outcome {
        document: envelope(
            "spectrum",
            json!({ "bound_states": rows, "warnings": warnings }),
        ),
        csv,
        sweeps: Vec::new(),
        exit_code: exit,
    })
}

pub fn resolvent(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let sys = cfg.point_system()?;
    let pts = cfg
        .task
        .points
        .as_ref()
        .ok_or_else(|| anyhow!("task.points required for resolvent"))?;
    if pts.len() < 2 {
        bail!("task.points needs at least two points");
    }
    let energies = cfg
        .task
        .energies
        .clone()
        .ok_or_else(|| anyhow!("task.energies required for resolvent"))?;
    let mut coords = Vec::new();
    for p in pts {
        let mut c = [0.0; 3];
        c[..p.len().min(3)].copy_from_slice(&p[..p.len().min(3)]);
        coords.push(sys.manifold.point(c).map_err(|e| anyhow!("{e}"))?);
    }
    let mut rows = Vec::new();
    let mut csv = vec![vec![
        "re_e".into(),
        "value".into(),
        "quadrature_tolerance".into(),
    ]];
    for &e in &energies {
        let v = sys
            .resolvent_kernel(coords[0], coords[1], Complex64::new(e, 0.0))
            .map_err(|e| anyhow!("{e}"))?;
        rows.push(json!({
            "energy": e,
            "value_re": v.re,
            "value_im": v.im,
            "quadrature_tolerance": sys.quad.relative_tolerance,
        }));
        csv.push(vec![
            format!("{e:.12e}"),
            format!("{:.12e}", v.re),
            format!("{:.1e}", sys.quad.relative_tolerance),
        ]);
    }
    Ok(Outcome {
        document: envelope("resolvent", json!({ "kernel_values": rows })),
        csv,
        sweeps: Vec::new(),
        exit_code: 0,
    })
}

pub fn check_identity(cfg: &RunConfig, seed: u64) -> anyhow::Result<Outcome> {
    let tol = cfg.task.tolerance.unwrap_or(1e-7);
    let pairs = cfg
        .task
        .energy_pairs
        .clone()
        .unwrap_or_else(|| vec![[-3.0, -7.0]]);
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    match cfg.model.kind.as_str() {
        "nonrelativistic" => {
            let sys = cfg.point_system()?;
            let basis = sys
                .manifold
                .spectral_basis(cfg.task.basis_modes.unwrap_or(41))
                .map_err(|e| anyhow!("{e}"))?;
            let battery = verify::test_battery(&sys, &basis, 32, seed);
            for pair in &pairs {
                for f in &battery {
                    let r = verify::check_resolvent_identity(
                        &sys, &basis, &f.coeffs, pair[0], pair[1],
                    )
                    .map_err(|e| anyhow!("{e}"))?;
                    worst = worst.max(r);
                    rows.push(json!({
                        "test_function": f.name,
                        "e1": pair[0], "e2": pair[1],
                        "residual": r, "tolerance": tol,
                    }));
                }
                let rm = verify::matrix_difference_residual(&sys, pair[0], pair[1])
                    .map_err(|e| anyhow!("{e}"))?;
                worst = worst.max(rm);
                rows.push(json!({
                    "test_function": "principal_difference_matrix",
                    "e1": pair[0], "e2": pair[1],
                    "residual": rm, "tolerance": tol,
                }));
            }
        }
        "relativistic" => {
            let model = cfg.relativistic()?;
            for pair in &pairs {
                let r = verify::check_relativistic_matrix_identity(&model, pair[0], pair[1])
                    .map_err(|e| anyhow!("{e}"))?;
                worst = worst.max(r);
                rows.push(json!({
                    "test_function": "matrix_identity",
                    "e1": pair[0], "e2": pair[1],
                    "residual": r, "tolerance": tol,
                }));
            }
        }
        "lee" => {
            let model = cfg.lee()?;
            for pair in &pairs {
                let r = verify::check_lee_vacuum_identity(&model, pair[0], pair[1])
                    .map_err(|e| anyhow!("{e}"))?;
                worst = worst.max(r);
                rows.push(json!({
                    "test_function": "vacuum_identity",
                    "e1": pair[0], "e2": pair[1],
                    "residual": r, "tolerance": tol,
                }));
            }
        }
        other => bail!("unknown model type {other:?}"),
    }
    let verdict = if worst <= tol {
        Verdict::Holds
    } else {
        Verdict::Violated
    };
    let mut csv = vec![vec![
        "test_function".into(),
        "residual".into(),
        "tolerance".into(),
    ]];
    for r in &rows {
        csv.push(vec![
            r["test_function"].as_str().unwrap_or("").into(),
            format!("{:.3e}", r["residual"].as_f64().unwrap_or(f64::NAN)),
            format!("{tol:.1e}"),
        ]);
    }
    Ok(Outcome {
        document: envelope(
            "check-identity",
            json!({ "residuals": rows, "worst": worst, "tolerance": tol,
                    "verdict": verdict }),
        ),
        csv,
        sweeps: Vec::new(),
        exit_code: verdict_exit(&[verdict]),
    })
}

pub fn check_limit(cfg: &RunConfig, seed: u64) -> anyhow::Result<Outcome> {
    let sys = cfg.point_system()?;
    let basis = sys
        .manifold
        .spectral_basis(cfg.task.basis_modes.unwrap_or(41))
        .map_err(|e| anyhow!("{e}"))?;
    let battery = verify::test_battery(&sys, &basis, 32, seed);
    let f = &battery[0];
    let e0 = cfg.task.e0.unwrap_or(2.0);
    let k_max = cfg.task.k_max.unwrap_or(4096);
    let rep = verify::check_strong_limit(&sys, &basis, &f.coeffs, e0, k_max)
        .map_err(|e| anyhow!("{e}"))?;
    let verdict = rep.verdict;
    let mut csv = vec![vec!["k".into(), "e_k".into(), "interaction".into()]];
    for (i, k) in rep.k_values.iter().enumerate() {
        csv.push(vec![
            format!("{k}"),
            format!("{:.12e}", rep.e_k[i]),
            format!("{:.12e}", rep.interaction_part[i]),
        ]);
    }
    let sweep = Sweep {
        name: "strong_limit_e_k".into(),
        header: "k  e_k = || |E_k| R(E_k) f - f ||".into(),
        columns: (rep.k_values.clone(), rep.e_k.clone()),
    };
    Ok(Outcome {
        document: envelope("check-limit", serde_json::to_value(&rep)?),
        csv,
        sweeps: vec![sweep],
        exit_code: verdict_exit(&[verdict]),
    })
}

pub fn check_symmetry(cfg: &RunConfig, seed: u64) -> anyhow::Result<Outcome> {
    let tol = cfg.task.tolerance.unwrap_or(1e-9);
    let energies = cfg
        .task
        .complex_energies
        .clone()
        .unwrap_or_else(|| vec![[-5.0, 2.0], [-11.0, -3.0]]);
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for e in &energies {
        let ec = Complex64::new(e[0], e[1]);
        let r = match cfg.model.kind.as_str() {
            "nonrelativistic" => {
                let sys = cfg.point_system()?;
                verify::check_symmetry_kernel(&sys, ec, 6, seed).map_err(|e| anyhow!("{e}"))?
            }
            "relativistic" => {
                let model = cfg.relativistic()?;
                verify::check_relativistic_symmetry(&model, ec).map_err(|e| anyhow!("{e}"))?
            }
            "lee" => {
                let model = cfg.lee()?;
                verify::check_lee_symmetry(&model, ec).map_err(|e| anyhow!("{e}"))?
            }
            other => bail!("unknown model type {other:?}"),
        };
        worst = worst.max(r);
        rows.push(json!({
            "energy_re": e[0], "energy_im": e[1],
            "residual": r, "tolerance": tol,
        }));
    }
    let verdict = if worst <= tol {
        Verdict::Holds
    } else {
        Verdict::Violated
    };
    let mut csv = vec![vec!["energy_re".into(), "energy_im".into(), "residual".into()]];
    for r in &rows {
        csv.push(vec![
            format!("{}", r["energy_re"]),
            format!("{}", r["energy_im"]),
            format!("{:.3e}", r["residual"].as_f64().unwrap_or(f64::NAN)),
        ]);
    }
    Ok(Outcome {
        document: envelope(
            "check-symmetry",
            json!({ "residuals": rows, "worst": worst, "tolerance": tol,
                    "verdict": verdict }),
        ),
        csv,
        sweeps: Vec::new(),
        exit_code: verdict_exit(&[verdict]),
    })
}

pub fn check_bounds(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let mut reports = Vec::new();
    match cfg.model.kind.as_str() {
        "nonrelativistic" => {
            let sys = cfg.point_system()?;
            reports.push(verify::check_heat_bounds(&sys.manifold).map_err(|e| anyhow!("{e}"))?);
            reports
                .push(verify::check_jacobian_bounds(&sys.manifold).map_err(|e| anyhow!("{e}"))?);
            reports.push(verify::check_alpha_scaling(&sys).map_err(|e| anyhow!("{e}"))?);
            reports.push(verify::check_phi_inverse_scaling(&sys).map_err(|e| anyhow!("{e}"))?);
            if sys.manifold.dim() == 3 {
                reports
                    .push(verify::check_free_resolvent_bound(&sys).map_err(|e| anyhow!("{e}"))?);
            }
        }
        other => bail!("check-bounds runs on the nonrelativistic model, got {other:?}"),
    }
    let verdicts: Vec<Verdict> = reports.iter().map(|r| r.verdict).collect();
    let mut csv = vec![vec![
        "check".into(),
        "geometry".into(),
        "grid".into(),
        "value".into(),
        "bound".into(),
        "verdict".into(),
    ]];
    let mut sweeps = Vec::new();
    for rep in &reports {
        report_rows(rep, &mut csv);
        sweeps.push(report_sweep(rep));
    }
    Ok(Outcome {
        document: envelope(
            "check-bounds",
            json!({ "reports": reports.iter().map(report_value).collect::<Vec<_>>() }),
        ),
        csv,
        sweeps,
        exit_code: verdict_exit(&verdicts),
    })
}

pub fn check_subordination(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let model = cfg.relativistic()?;
    let tol = cfg.task.tolerance.unwrap_or(1e-9);
    let ss = cfg
        .task
        .subordination_s
        .clone()
        .unwrap_or_else(|| vec![0.5, 1.0, 3.0]);
    let ls = cfg
        .task
        .subordination_lambda
        .clone()
        .unwrap_or_else(|| vec![0.0, 1.0, 2.25]);
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for &s in &ss {
        for &lam in &ls {
            let (lhs, rhs, residual) = subordination_check(s, model.boson_mass, lam, &model.quad);
            worst = worst.max(residual);
            rows.push(json!({
                "s": s, "lambda": lam, "lhs": lhs, "rhs": rhs,
                "residual": residual, "tolerance": tol,
            }));
        }
    }
    let verdict = if worst <= tol {
        Verdict::Holds
    } else {
        Verdict::Violated
    };
    let mut csv = vec![vec!["s".into(), "lambda".into(), "residual".into()]];
    for r in &rows {
        csv.push(vec![
            format!("{}", r["s"]),
            format!("{}", r["lambda"]),
            format!("{:.3e}", r["residual"].as_f64().unwrap_or(f64::NAN)),
        ]);
    }
    Ok(Outcome {
        document: envelope(
            "check-subordination",
            json!({ "grid": rows, "worst": worst, "tolerance": tol, "verdict": verdict }),
        ),
        csv,
        sweeps: Vec::new(),
        exit_code: verdict_exit(&[verdict]),
    })
}

pub fn check_decay(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let model = cfg.relativistic()?;
    let rep = verify::check_decay_functional(&model).map_err(|e| anyhow!("{e}"))?;
    let verdict = rep.verdict;
    let mut csv = vec![vec![
        "check".into(),
        "geometry".into(),
        "grid".into(),
        "value".into(),
        "bound".into(),
        "verdict".into(),
    ]];
    report_rows(&rep, &mut csv);
    let sweeps = vec![report_sweep(&rep)];
    Ok(Outcome {
        document: envelope("check-decay", json!({ "report": report_value(&rep) })),
        csv,
        sweeps,
        exit_code: verdict_exit(&[verdict]),
    })
}

pub fn lee_spectrum(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let model = cfg.lee()?;
    let n = cfg.model.sector.unwrap_or(1);
    let n_max = cfg.model.n_max.unwrap_or(2).max(n);
    let basis = FockBasis::new(model.mode_count(), n_max);
    let threshold = n as f64 * model.boson_mass + model.binding;
    let window = cfg
        .task
        .window
        .unwrap_or([threshold - 8.0, threshold - 1e-9]);
    let report = model
        .ground_state_report(&basis, n, (window[0], window[1]))
        .map_err(|e| anyhow!("{e}"))?;
    let (doc, exit) = match &report {
        Some(gs) => (
            json!({
                "sector": n,
                "ground_state": gs.energy,
                "ground_state_half_modes": gs.energy_half_modes,
                "threshold": threshold,
                "sector_dimension": gs.sector_dim,
                "mode_count": gs.mode_count,
                "root_tolerance": ROOT_TOL,
            }),
            0u8,
        ),
        None => (
            json!({
                "sector": n,
                "ground_state": Value::Null,
                "threshold": threshold,
                "note": "principal operator positive on the whole window",
            }),
            2u8,
        ),
    };
    let mut csv = vec![vec!["sector".into(), "ground_state".into(), "threshold".into()]];
    if let Some(gs) = &report {
        csv.push(vec![
            format!("{n}"),
            format!("{:.12e}", gs.energy),
            format!("{threshold:.12e}"),
        ]);
    }
    Ok(Outcome {
        document: envelope("lee-spectrum", doc),
        csv,
        sweeps: Vec::new(),
        exit_code: exit,
    })
}

pub fn lee_bounds(cfg: &RunConfig) -> anyhow::Result<Outcome> {
    let model = cfg.lee()?;
    let n = cfg.model.sector.unwrap_or(1);
    let n_max = cfg.model.n_max.unwrap_or(2).max(n);
    let basis = FockBasis::new(model.mode_count(), n_max);
    let couplings = cfg
        .task
        .couplings
        .clone()
        .unwrap_or_else(|| vec![0.1, 0.5, 1.0]);
    let mut reports = Vec::new();
    reports.push(verify::check_lee_u1_bound(&model, &basis, n).map_err(|e| anyhow!("{e}"))?);
    reports.push(verify::check_lee_u2_bound(&model, &basis, n).map_err(|e| anyhow!("{e}"))?);
    reports.push(verify::check_lee_relative_bound(&model, &basis).map_err(|e| anyhow!("{e}"))?);
    let mut center = [0.0; 3];
    if let Some(c) = cfg.model.centers.first() {
        center[..c.len().min(3)].copy_from_slice(&c[..c.len().min(3)]);
    }
    reports.push(
        verify::check_lee_ground_state(
            cfg.geometry()?,
            center,
            model.boson_mass,
            model.binding,
            model.mode_count(),
            n,
            &couplings,
        )
        .map_err(|e| anyhow!("{e}"))?,
    );
    let verdicts: Vec<Verdict> = reports.iter().map(|r| r.verdict).collect();
    let mut csv = vec![vec![
        "check".into(),
        "geometry".into(),
        "grid".into(),
        "value".into(),
        "bound".into(),
        "verdict".into(),
    ]];
    let mut sweeps = Vec::new();
    for rep in &reports {
        report_rows(rep, &mut csv);
        sweeps.push(report_sweep(rep));
    }
    Ok(Outcome {
        document: envelope(
            "lee-bounds",
            json!({ "reports": reports.iter().map(report_value).collect::<Vec<_>>() }),
        ),
        csv,
        sweeps,
        exit_code: verdict_exit(&verdicts),
    })
}
