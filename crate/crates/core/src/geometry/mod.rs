//! Model geometries: flat space, flat tori, the round 2-sphere and the
//! hyperbolic plane, with heat kernels, geodesic distances, spectral data
//! and the analytic heat-kernel / volume-comparison bounds.

mod bounds;
mod grid;
mod hyperbolic;
mod sphere;
mod spectral;
mod torus;

pub use bounds::{bound_constants, BoundConstants};
pub use grid::QuadGrid;
pub use spectral::{Mode, SpectralBasis};

use crate::error::{Error, Result};
use crate::special::sn;

/// Intrinsic coordinates; the interpretation depends on the geometry:
/// fundamental-domain coordinates on tori, Cartesian coordinates in flat
/// space, unit vectors on the sphere, hyperboloid-model vectors on H2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point(pub [f64; 3]);

impl Point {
    pub fn xy(x: f64, y: f64) -> Self {
        Point([x, y, 0.0])
    }
    pub fn xyz(x: f64, y: f64, z: f64) -> Self {
        Point([x, y, z])
    }
}

/// Manifold class determining which heat-kernel bound form applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ManifoldClass {
    Compact,
    CartanHadamard,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Geometry {
    /// R^D, D in {2, 3}.
    FlatSpace { dim: usize },
    /// Rectangular torus with side lengths `lengths` (D = lengths.len()).
    FlatTorus { lengths: Vec<f64> },
    /// Round 2-sphere of radius rho.
    Sphere2 { radius: f64 },
    /// Hyperbolic plane of curvature -1/rho^2.
    Hyperbolic2 { radius: f64 },
}

/// A geometry together with the diffusion coefficient kappa of the heat
/// semigroup e^{kappa t Laplacian} (kappa = 1/2m non-relativistically,
/// kappa = 1 in the relativistic convention).
#[derive(Debug, Clone, PartialEq)]
pub struct ManifoldSpec {
    pub geometry: Geometry,
    pub kappa: f64,
}

impl ManifoldSpec {
    pub fn new(geometry: Geometry, kappa: f64) -> Result<Self> {
        if !(kappa > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "kappa must be positive, got {kappa}"
            )));
        }
        match &geometry {
            Geometry::FlatSpace { dim } => {
                if *dim != 2 && *dim != 3 {
                    return Err(Error::InvalidParameter(format!(
                        "flat space dimension must be 2 or 3, got {dim}"
                    )));
                }
            }
            Geometry::FlatTorus { lengths } => {
                if lengths.len() != 2 && lengths.len() != 3 {
                    return Err(Error::InvalidParameter(
                        "torus must have 2 or 3 side lengths".into(),
                    ));
                }
                if lengths.iter().any(|l| !(*l > 0.0)) {
                    return Err(Error::InvalidParameter(
                        "torus side lengths must be positive".into(),
                    ));
                }
            }
            Geometry::Sphere2 { radius } | Geometry::Hyperbolic2 { radius } => {
                if !(*radius > 0.0) {
                    return Err(Error::InvalidParameter(
                        "radius must be positive".into(),
                    ));
                }
            }
        }
        Ok(Self { geometry, kappa })
    }

    pub fn flat(dim: usize, kappa: f64) -> Result<Self> {
        Self::new(Geometry::FlatSpace { dim }, kappa)
    }

    pub fn torus(lengths: &[f64], kappa: f64) -> Result<Self> {
        Self::new(
            Geometry::FlatTorus {
                lengths: lengths.to_vec(),
            },
            kappa,
        )
    }

    pub fn sphere(radius: f64, kappa: f64) -> Result<Self> {
        Self::new(Geometry::Sphere2 { radius }, kappa)
    }

    pub fn hyperbolic(radius: f64, kappa: f64) -> Result<Self> {
        Self::new(Geometry::Hyperbolic2 { radius }, kappa)
    }

    pub fn dim(&self) -> usize {
        match &self.geometry {
            Geometry::FlatSpace { dim } => *dim,
            Geometry::FlatTorus { lengths } => lengths.len(),
            Geometry::Sphere2 { .. } | Geometry::Hyperbolic2 { .. } => 2,
        }
    }

    pub fn class(&self) -> ManifoldClass {
        match &self.geometry {
            Geometry::FlatTorus { .. } | Geometry::Sphere2 { .. } => ManifoldClass::Compact,
            Geometry::FlatSpace { .. } | Geometry::Hyperbolic2 { .. } => {
                ManifoldClass::CartanHadamard
            }
        }
    }

    /// V(M); None for infinite volume.
    pub fn volume(&self) -> Option<f64> {
        match &self.geometry {
            Geometry::FlatTorus { lengths } => Some(lengths.iter().product()),
            Geometry::Sphere2 { radius } => Some(4.0 * std::f64::consts::PI * radius * radius),
            _ => None,
        }
    }

    /// (K1, K2): lower Ricci-type and upper sectional curvature bounds.
    /// All four geometries have constant curvature, so K1 = K2.
    pub fn curvature_bounds(&self) -> (f64, f64) {
        match &self.geometry {
            Geometry::FlatSpace { .. } | Geometry::FlatTorus { .. } => (0.0, 0.0),
            Geometry::Sphere2 { radius } => {
                let k = 1.0 / (radius * radius);
                (k, k)
            }
            Geometry::Hyperbolic2 { radius } => {
                let k = -1.0 / (radius * radius);
                (k, k)
            }
        }
    }

    pub fn injectivity_radius(&self) -> f64 {
        match &self.geometry {
            Geometry::FlatSpace { .. } | Geometry::Hyperbolic2 { .. } => f64::INFINITY,
            Geometry::FlatTorus { lengths } => {
                0.5 * lengths.iter().cloned().fold(f64::INFINITY, f64::min)
            }
            Geometry::Sphere2 { radius } => std::f64::consts::PI * radius,
        }
    }

    /// Geodesic distance between two points.
    pub fn geodesic_distance(&self, x: Point, y: Point) -> f64 {
        match &self.geometry {
            Geometry::FlatSpace { dim } => {
                let mut s = 0.0;
                for d in 0..*dim {
                    let dd = x.0[d] - y.0[d];
                    s += dd * dd;
                }
                s.sqrt()
            }
            Geometry::FlatTorus { lengths } => {
                let mut s = 0.0;
                for (d, l) in lengths.iter().enumerate() {
                    let dd = torus::min_image(x.0[d] - y.0[d], *l);
                    s += dd * dd;
                }
                s.sqrt()
            }
            Geometry::Sphere2 { radius } => {
                let dot = (x.0[0] * y.0[0] + x.0[1] * y.0[1] + x.0[2] * y.0[2]).clamp(-1.0, 1.0);
                radius * dot.acos()
            }
            Geometry::Hyperbolic2 { radius } => {
                let q = (x.0[0] * y.0[0] - x.0[1] * y.0[1] - x.0[2] * y.0[2]).max(1.0);
                radius * q.acosh()
            }
        }
    }

    /// Heat kernel K_t(x, y) of d/dt = kappa * Laplacian.
    pub fn heat_kernel(&self, x: Point, y: Point, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::Domain(format!("heat kernel requires t > 0, got {t}")));
        }
        Ok(match &self.geometry {
            Geometry::FlatSpace { dim } => {
                let d = self.geodesic_distance(x, y);
                flat_kernel(*dim, d, self.kappa * t)
            }
            Geometry::FlatTorus { lengths } => torus::heat_kernel(lengths, self.kappa * t, x, y),
            Geometry::Sphere2 { radius } => {
                let theta = self.geodesic_distance(x, y) / radius;
                sphere::heat_kernel(*radius, self.kappa * t, theta)
            }
            Geometry::Hyperbolic2 { radius } => {
                let delta = self.geodesic_distance(x, y) / radius;
                hyperbolic::heat_kernel(*radius, self.kappa * t, delta)
            }
        })
    }

    /// Heat-kernel upper bound with this geometry's calibrated constants:
    /// compact:        [C1/V + C2/(kappa t)^{D/2}] exp(-d^2 / (2 C3 kappa t))
    /// Cartan-Hadamard: C4/(kappa t)^{D/2} exp(-d^2 / (2 C5 kappa t))
    /// (t/2m = kappa t and m/t = 1/(2 kappa t) in the kappa convention).
    pub fn heat_kernel_upper_bound(&self, x: Point, y: Point, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::Domain(format!("bound requires t > 0, got {t}")));
        }
        let c = bound_constants(self)?;
        let d = self.geodesic_distance(x, y);
        let kt = self.kappa * t;
        let dd = self.dim() as f64;
        Ok(match self.class() {
            ManifoldClass::Compact => {
                let v = self.volume().expect("compact manifolds have finite volume");
                (c.c1 / v + c.c2 / kt.powf(dd / 2.0)) * (-d * d / (2.0 * c.c3 * kt)).exp()
            }
            ManifoldClass::CartanHadamard => {
                c.c4 / kt.powf(dd / 2.0) * (-d * d / (2.0 * c.c5 * kt)).exp()
            }
        })
    }

    /// Bishop-Gunther two-sided bounds on the geodesic-polar Jacobian:
    /// (sn_{K2}(r)^{D-1} / r^{D-1}, sn_{K1}(r)^{D-1} / r^{D-1}).
    pub fn jacobian_bounds(&self, r: f64) -> Result<(f64, f64)> {
        if !(r > 0.0) {
            return Err(Error::Domain("jacobian bounds need r > 0".into()));
        }
        if r >= self.injectivity_radius() {
            return Err(Error::Domain(format!(
                "r = {r} is beyond the injectivity radius {}",
                self.injectivity_radius()
            )));
        }
        let (k1, k2) = self.curvature_bounds();
        let p = self.dim() as i32 - 1;
        let lo = (sn(k2, r)? / r).powi(p);
        let hi = (sn(k1, r)? / r).powi(p);
        Ok((lo, hi))
    }

    /// Exact polar-area Jacobian J(r) for the constant-curvature geometries.
    pub fn jacobian(&self, r: f64) -> Result<f64> {
        let (k1, _) = self.curvature_bounds();
        Ok((sn(k1, r)? / r).powi(self.dim() as i32 - 1))
    }

    /// Orthonormal Laplace-Beltrami eigenbasis (compact geometries only).
    pub fn spectral_basis(&self, mode_count: usize) -> Result<SpectralBasis> {
        match &self.geometry {
            Geometry::FlatTorus { lengths } => Ok(spectral::torus_basis(lengths, mode_count)),
            Geometry::Sphere2 { radius } => Ok(spectral::sphere_basis(*radius, mode_count)),
            _ => Err(Error::Unsupported(
                "spectral bases exist only for the compact geometries".into(),
            )),
        }
    }

    /// L^2(M) integration grid; `resolution` controls points per direction.
    pub fn grid(&self, resolution: usize) -> QuadGrid {
        grid::build(self, resolution)
    }

    /// Human-readable tag used in reports.
    pub fn label(&self) -> String {
        match &self.geometry {
            Geometry::FlatSpace { dim } => format!("flat-{dim}d"),
            Geometry::FlatTorus { lengths } => format!("torus-{}d", lengths.len()),
            Geometry::Sphere2 { .. } => "sphere2".into(),
            Geometry::Hyperbolic2 { .. } => "hyperbolic2".into(),
        }
    }

    /// Wrap/validate a coordinate triple into a point of this geometry.
    pub fn point(&self, coords: [f64; 3]) -> Result<Point> {
        match &self.geometry {
            Geometry::FlatSpace { .. } => Ok(Point(coords)),
            Geometry::FlatTorus { lengths } => {
                let mut c = [0.0; 3];
                for (d, l) in lengths.iter().enumerate() {
                    c[d] = coords[d].rem_euclid(*l);
                }
                Ok(Point(c))
            }
            Geometry::Sphere2 { .. } => {
                let n = (coords[0] * coords[0] + coords[1] * coords[1] + coords[2] * coords[2])
                    .sqrt();
                if n < 1e-12 {
                    return Err(Error::InvalidParameter(
                        "sphere point cannot be the zero vector".into(),
                    ));
                }
                Ok(Point([coords[0] / n, coords[1] / n, coords[2] / n]))
            }
            Geometry::Hyperbolic2 { .. } => {
                // Interpret (x1, x2) as the spacelike part; restore x0.
                let (x1, x2) = (coords[1], coords[2]);
                Ok(Point([(1.0 + x1 * x1 + x2 * x2).sqrt(), x1, x2]))
            }
        }
    }

    /// Geodesic polar coordinates around a reference point: sphere around the
    /// north pole, H2 around the hyperboloid apex, flat/torus around origin.
    pub fn point_polar(&self, r: f64, phi: f64) -> Result<Point> {
        match &self.geometry {
            Geometry::FlatSpace { .. } => Ok(Point([r * phi.cos(), r * phi.sin(), 0.0])),
            Geometry::FlatTorus { lengths } => {
                self.point([r * phi.cos(), r * phi.sin(), 0.0]).map(|p| {
                    let _ = lengths;
                    p
                })
            }
            Geometry::Sphere2 { radius } => {
                let theta = r / radius;
                Ok(Point([
                    theta.sin() * phi.cos(),
                    theta.sin() * phi.sin(),
                    theta.cos(),
                ]))
            }
            Geometry::Hyperbolic2 { radius } => {
                let rho = r / radius;
                Ok(Point([rho.cosh(), rho.sinh() * phi.cos(), rho.sinh() * phi.sin()]))
            }
        }
    }
}

/// Flat Gaussian kernel (4 pi kappa t)^{-D/2} e^{-d^2/(4 kappa t)}.
pub(crate) fn flat_kernel(dim: usize, d: f64, kt: f64) -> f64 {
    let pref = (4.0 * std::f64::consts::PI * kt).powf(-(dim as f64) / 2.0);
    pref * (-d * d / (4.0 * kt)).exp()
}
