//! Small least-squares helpers for the sweep-and-fit bound checks.

/// Least-squares slope of y against x with its standard error.
pub fn slope_with_err(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    assert!(x.len() == y.len() && x.len() >= 3);
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y.iter()).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x
        .iter()
        .zip(y.iter())
        .map(|(a, b)| {
            let r = b - (intercept + slope * a);
            r * r
        })
        .sum();
    let se = (ss_res / (n - 2.0) / sxx).sqrt();
    (slope, se)
}

/// Log-log power-law fit: returns (exponent, standard error).
pub fn log_log_slope(x: &[f64], y: &[f64]) -> (f64, f64) {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.abs().max(1e-300).ln()).collect();
    slope_with_err(&lx, &ly)
}
