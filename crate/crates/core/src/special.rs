//! Modified Bessel functions of the second kind for the handful of orders
//! the resolvent formulas need, the curvature-normalized sine, Legendre
//! polynomials and a Lanczos gamma function.

use crate::error::{Error, Result};
use crate::quad::{composite_gl, gauss_legendre};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// K_nu(x) for nu in {0, 1/2, 1, 3/2}, relative accuracy ~1e-13 on
/// x in [1e-8, 700]; underflows to 0 for very large x.
pub fn bessel_k(order: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("bessel_k requires x > 0, got {x}")));
    }
    if order == 0.0 {
        Ok(bessel_k0(x))
    } else if order == 0.5 {
        Ok((std::f64::consts::PI / (2.0 * x)).sqrt() * (-x).exp())
    } else if order == 1.0 {
        Ok(bessel_k1(x))
    } else if order == 1.5 {
        Ok((std::f64::consts::PI / (2.0 * x)).sqrt() * (-x).exp() * (1.0 + 1.0 / x))
    } else {
        Err(Error::Domain(format!(
            "bessel_k supports orders 0, 1/2, 1, 3/2; got {order}"
        )))
    }
}

pub fn bessel_k0(x: f64) -> f64 {
    if x <= 2.0 {
        k0_series(x)
    } else {
        k_large_x(0, x)
    }
}

pub fn bessel_k1(x: f64) -> f64 {
    if x <= 2.0 {
        k1_series(x)
    } else {
        k_large_x(1, x)
    }
}

/// K0 by the ascending series: -ln(x/2) I0(x) + sum psi(k+1) (x^2/4)^k / (k!)^2.
fn k0_series(x: f64) -> f64 {
    let q = x * x / 4.0;
    let lnh = (x / 2.0).ln();
    let mut term = 1.0; // (x^2/4)^k / (k!)^2
    let mut psi = -EULER_GAMMA;
    let mut i0 = 1.0;
    let mut acc = psi;
    for k in 1..=30 {
        let kf = k as f64;
        term *= q / (kf * kf);
        psi += 1.0 / kf;
        i0 += term;
        acc += psi * term;
        if term < 1e-18 {
            break;
        }
    }
    acc - lnh * i0
}

/// K1 by the ascending series:
/// 1/x + ln(x/2) I1(x) - (x/4) sum [psi(k+1)+psi(k+2)] (x^2/4)^k / (k! (k+1)!).
fn k1_series(x: f64) -> f64 {
    let q = x * x / 4.0;
    let lnh = (x / 2.0).ln();
    let mut term = 1.0; // (x^2/4)^k / (k! (k+1)!)
    let mut psi1 = -EULER_GAMMA; // psi(k+1)
    let mut psi2 = 1.0 - EULER_GAMMA; // psi(k+2)
    let mut i1 = 0.5; // I1(x)/x = (1/2) sum term
    let mut acc = (psi1 + psi2) * term;
    for k in 1..=30 {
        let kf = k as f64;
        term *= q / (kf * (kf + 1.0));
        psi1 += 1.0 / kf;
        psi2 += 1.0 / (kf + 1.0);
        i1 += 0.5 * term;
        acc += (psi1 + psi2) * term;
        if term < 1e-18 {
            break;
        }
    }
    1.0 / x + lnh * (i1 * x) - (x / 4.0) * acc
}

/// Large-argument branch via the cosh-representation mapped to a Gaussian:
/// K_nu(x) = 2 e^{-x} / sqrt(x) * int_0^inf e^{-q^2} g_nu(q) dq with
/// g_0 = 1/sqrt(q^2/x + 2), g_1 = (1 + q^2/x) g_0.
fn k_large_x(nu: u8, x: f64) -> f64 {
    if x > 740.0 {
        return 0.0;
    }
    let f = |q: f64| {
        let w = q * q / x;
        let base = (-q * q).exp() / (w + 2.0).sqrt();
        match nu {
            0 => base,
            _ => (1.0 + w) * base,
        }
    };
    let integral: f64 = composite_gl(f, 0.0, 6.5, 3, 48);
    2.0 * (-x).exp() / x.sqrt() * integral
}

/// Curvature-normalized sine: sin(sqrt(K) r)/sqrt(K) for K>0, r for K=0,
/// sinh(sqrt(-K) r)/sqrt(-K) for K<0; continuous in K at 0.
pub fn sn(curvature: f64, r: f64) -> Result<f64> {
    if r < 0.0 {
        return Err(Error::Domain(format!("sn requires r >= 0, got {r}")));
    }
    if curvature > 0.0 {
        let sqp = curvature.sqrt();
        if r > std::f64::consts::PI / sqp * (1.0 + 1e-12) {
            return Err(Error::Domain(format!(
                "sn: r = {r} beyond pi/sqrt(K) = {}",
                std::f64::consts::PI / sqp
            )));
        }
    }
    let z = curvature * r * r;
    if z.abs() < 1e-4 {
        // sin(sqrt(K) r)/sqrt(K) = r (1 - z/6 + z^2/120 - z^3/5040), valid
        // for either sign of K.
        return Ok(r * (1.0 - z / 6.0 + z * z / 120.0 - z * z * z / 5040.0));
    }
    if curvature > 0.0 {
        let sqp = curvature.sqrt();
        Ok((sqp * r).sin() / sqp)
    } else {
        let sqm = (-curvature).sqrt();
        Ok((sqm * r).sinh() / sqm)
    }
}

/// Legendre polynomial P_l(x) by the three-term recurrence.
pub fn legendre_p(l: usize, x: f64) -> f64 {
    match l {
        0 => 1.0,
        1 => x,
        _ => {
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=l {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            p1
        }
    }
}

/// Gamma function, Lanczos approximation (g = 7, 9 terms), ~1e-13 relative.
pub fn gamma(x: f64) -> f64 {
    const G: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // Reflection.
        std::f64::consts::PI / ((std::f64::consts::PI * x).sin() * gamma(1.0 - x))
    } else {
        let x = x - 1.0;
        let mut a = G[0];
        let t = x + 7.5;
        for (i, &g) in G.iter().enumerate().skip(1) {
            a += g / (x + i as f64);
        }
        (2.0 * std::f64::consts::PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
    }
}

/// Nodes of an n-point Gauss-Legendre rule mapped to [a, b].
pub fn gl_nodes_on(a: f64, b: f64, n: usize) -> Vec<(f64, f64)> {
    let gl = gauss_legendre(n);
    gl.nodes
        .iter()
        .zip(gl.weights.iter())
        .map(|(x, w)| (a + 0.5 * (b - a) * (x + 1.0), w * 0.5 * (b - a)))
        .collect()
}
