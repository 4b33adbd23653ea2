//! Per-geometry product quadrature grids for L^2(M) inner products.

use super::{Geometry, ManifoldSpec, Point};
use crate::quad::gauss_legendre;

/// Sampled integration grid: sum_i w_i f(p_i) approximates int_M f dV.
#[derive(Debug, Clone)]
pub struct QuadGrid {
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
}

impl QuadGrid {
    pub fn inner_product(&self, f: &[f64], g: &[f64]) -> f64 {
        self.weights
            .iter()
            .zip(f.iter().zip(g.iter()))
            .map(|(w, (a, b))| w * a * b)
            .sum()
    }

    pub fn norm(&self, f: &[f64]) -> f64 {
        self.inner_product(f, f).sqrt()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Evaluate a function on all grid points.
    pub fn sample(&self, mut f: impl FnMut(Point) -> f64) -> Vec<f64> {
        self.points.iter().map(|&p| f(p)).collect()
    }
}

pub(crate) fn build(spec: &ManifoldSpec, resolution: usize) -> QuadGrid {
    match &spec.geometry {
        Geometry::FlatTorus { lengths } => torus_grid(lengths, resolution),
        Geometry::Sphere2 { radius } => sphere_grid(*radius, resolution),
        Geometry::FlatSpace { dim } => flat_grid(*dim, spec.kappa, resolution),
        Geometry::Hyperbolic2 { radius } => hyperbolic_grid(*radius, resolution),
    }
}

/// Uniform tensor grid; trapezoid weights are spectrally accurate for
/// periodic integrands.
fn torus_grid(lengths: &[f64], n: usize) -> QuadGrid {
    let dims = lengths.len();
    let mut points = Vec::new();
    let mut weights = Vec::new();
    let cell: f64 = lengths.iter().map(|l| l / n as f64).product();
    let mut idx = vec![0usize; dims];
    loop {
        let mut c = [0.0; 3];
        for d in 0..dims {
            c[d] = idx[d] as f64 * lengths[d] / n as f64;
        }
        points.push(Point(c));
        weights.push(cell);
        // Odometer increment.
        let mut d = 0;
        loop {
            idx[d] += 1;
            if idx[d] < n {
                break;
            }
            idx[d] = 0;
            d += 1;
            if d == dims {
                return QuadGrid { points, weights };
            }
        }
    }
}

/// Gauss-Legendre in cos(theta) x uniform azimuth.
fn sphere_grid(radius: f64, n: usize) -> QuadGrid {
    let gl = gauss_legendre(n);
    let nphi = 2 * n;
    let dphi = 2.0 * std::f64::consts::PI / nphi as f64;
    let mut points = Vec::with_capacity(n * nphi);
    let mut weights = Vec::with_capacity(n * nphi);
    for (mu, wmu) in gl.nodes.iter().zip(gl.weights.iter()) {
        let st = (1.0 - mu * mu).sqrt();
        for i in 0..nphi {
            let phi = i as f64 * dphi;
            points.push(Point([st * phi.cos(), st * phi.sin(), *mu]));
            weights.push(radius * radius * wmu * dphi);
        }
    }
    QuadGrid { points, weights }
}

/// Radial Gauss x uniform angle, truncated where heat-kernel-weighted
/// integrands fall below ~1e-14 of their peak for kappa*t of order one.
fn flat_grid(dim: usize, kappa: f64, n: usize) -> QuadGrid {
    let rmax = (kappa.max(1.0) * 60.0).sqrt() + 6.0;
    radial_grid(dim, rmax, n, |_r| 1.0)
}

fn hyperbolic_grid(radius: f64, n: usize) -> QuadGrid {
    let rmax = radius * ((60.0_f64).sqrt() + 6.0);
    radial_grid_h2(radius, rmax, n)
}

fn radial_grid(dim: usize, rmax: f64, n: usize, jac: impl Fn(f64) -> f64) -> QuadGrid {
    let gl = gauss_legendre(n);
    let mut points = Vec::new();
    let mut weights = Vec::new();
    let nphi = 2 * n;
    let dphi = 2.0 * std::f64::consts::PI / nphi as f64;
    for (x, w) in gl.nodes.iter().zip(gl.weights.iter()) {
        let r = 0.5 * rmax * (x + 1.0);
        let wr = 0.5 * rmax * w;
        match dim {
            2 => {
                for i in 0..nphi {
                    let phi = i as f64 * dphi;
                    points.push(Point([r * phi.cos(), r * phi.sin(), 0.0]));
                    weights.push(wr * r * jac(r) * dphi);
                }
            }
            _ => {
                // 3D: Gauss in polar cos(theta), uniform azimuth.
                let glz = gauss_legendre(n / 2 + 4);
                for (mu, wmu) in glz.nodes.iter().zip(glz.weights.iter()) {
                    let st = (1.0 - mu * mu).sqrt();
                    for i in 0..nphi {
                        let phi = i as f64 * dphi;
                        points.push(Point([
                            r * st * phi.cos(),
                            r * st * phi.sin(),
                            r * mu,
                        ]));
                        weights.push(wr * r * r * jac(r) * wmu * dphi);
                    }
                }
            }
        }
    }
    QuadGrid { points, weights }
}

fn radial_grid_h2(radius: f64, rmax: f64, n: usize) -> QuadGrid {
    let gl = gauss_legendre(n);
    let nphi = 2 * n;
    let dphi = 2.0 * std::f64::consts::PI / nphi as f64;
    let mut points = Vec::new();
    let mut weights = Vec::new();
    for (x, w) in gl.nodes.iter().zip(gl.weights.iter()) {
        let r = 0.5 * rmax * (x + 1.0);
        let wr = 0.5 * rmax * w;
        // Area element: rho sinh(r/rho) dr dphi.
        let jac = radius * (r / radius).sinh();
        let rho = r / radius;
        for i in 0..nphi {
            let phi = i as f64 * dphi;
            points.push(Point([rho.cosh(), rho.sinh() * phi.cos(), rho.sinh() * phi.sin()]));
            weights.push(wr * jac * dphi);
        }
    }
    QuadGrid { points, weights }
}

#[cfg(test)]
mod tests {
    use crate::geometry::ManifoldSpec;
    use approx::assert_relative_eq;

    #[test]
    fn torus_grid_total_weight_is_volume() {
        let spec = ManifoldSpec::torus(&[1.5, 2.0], 1.0).unwrap();
        let grid = spec.grid(16);
        let total: f64 = grid.weights.iter().sum();
        assert_relative_eq!(total, 3.0, max_relative = 1e-13);
    }

    #[test]
    fn sphere_grid_total_weight_is_area() {
        let spec = ManifoldSpec::sphere(2.0, 1.0).unwrap();
        let grid = spec.grid(20);
        let total: f64 = grid.weights.iter().sum();
        assert_relative_eq!(total, 16.0 * std::f64::consts::PI, max_relative = 1e-12);
    }

    #[test]
    fn flat_grid_integrates_gaussian() {
        let spec = ManifoldSpec::flat(2, 1.0).unwrap();
        let grid = spec.grid(48);
        let f = grid.sample(|p| (-(p.0[0] * p.0[0] + p.0[1] * p.0[1])).exp());
        let ones = vec![1.0; grid.len()];
        let v = grid.inner_product(&f, &ones);
        assert_relative_eq!(v, std::f64::consts::PI, max_relative = 1e-10);
    }

    #[test]
    fn hyperbolic_grid_integrates_gaussian_in_distance() {
        // int e^{-r^2} sinh(r) dr dphi on H2(rho=1): 2 pi int_0^inf e^{-r^2} sinh r dr.
        let spec = ManifoldSpec::hyperbolic(1.0, 1.0).unwrap();
        let grid = spec.grid(64);
        let origin = spec.point_polar(0.0, 0.0).unwrap();
        let f = grid.sample(|p| (-spec.geodesic_distance(origin, p).powi(2)).exp());
        let ones = vec![1.0; grid.len()];
        let v = grid.inner_product(&f, &ones);
        // Reference by dense 1D quadrature.
        let n = 200_000;
        let h = 12.0 / n as f64;
        let mut s = 0.0;
        for i in 0..=n {
            let r = i as f64 * h;
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            s += w * (-r * r).exp() * r.sinh();
        }
        s *= h / 3.0 * 2.0 * std::f64::consts::PI;
        assert_relative_eq!(v, s, max_relative = 1e-9);
    }
}
