//! Quadrature engines for semi-infinite Laplace-type integrals and the
//! weighted (s, u) double integrals of the relativistic principal matrix.
//!
//! Semi-infinite integrands here look like `f(t) ~ t^p * (exponential decay)`
//! with p >= -1/2 and possibly two widely separated exponential scales.  The
//! axis is split into three sections:
//!
//! * head `[0, t1]`, mapped by `t = tau^2` and integrated by Gauss-Legendre
//!   (absorbs the `t^{-1/2}` endpoint behaviour of D=3 heat kernels),
//! * middle `[t1, t2]`, log-mapped composite Gauss-Legendre (bridges scale
//!   ratios up to ~1e8 between the fast and slow exponentials),
//! * tail `[t2, inf)`, Gauss-Laguerre against `e^{-decay_rate * t}`.
//!
//! Every rule is refined by node doubling until two successive evaluations
//! agree to the requested relative tolerance.  Nodes and weights are cached
//! per size, so identical inputs always produce bit-identical results.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Controls node counts and refinement of the semi-infinite rules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Base node count per section (>= 8).
    pub node_count: usize,
    /// Relative agreement required between successive refinements.
    pub relative_tolerance: f64,
    /// Maximum number of node-doubling refinements.
    pub max_refinements: usize,
    /// Nominal split between the mapped head rule and the tail rule.
    pub split_point: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            node_count: 64,
            relative_tolerance: 1e-10,
            max_refinements: 4,
            split_point: 1.0,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.node_count < 8 {
            return Err(Error::InvalidParameter(format!(
                "node_count must be >= 8, got {}",
                self.node_count
            )));
        }
        if !(self.relative_tolerance > 0.0 && self.relative_tolerance <= 1e-3) {
            return Err(Error::InvalidParameter(format!(
                "relative_tolerance must lie in (0, 1e-3], got {}",
                self.relative_tolerance
            )));
        }
        if !(self.split_point > 0.0) {
            return Err(Error::InvalidParameter(
                "split_point must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1].
///
/// Newton iteration on the three-term recurrence; standard and stable for
/// the node counts used here (<= 2048).
fn gauss_legendre_raw(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Evaluate P_n(x) and P_n'(x) by recurrence.
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = (n as f64) * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Gauss-Laguerre rule for weight e^{-x} on [0, inf), via Golub-Welsch.
///
/// Returns nodes together with *scaled* weights `w_i e^{x_i}`, which stay
/// O(1) and let callers fold the exponential decay into the integrand.
fn gauss_laguerre_raw(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        jac[(i, i)] = 2.0 * i as f64 + 1.0;
        if i + 1 < n {
            // beta_k = k^2 for Laguerre; off-diagonal is sqrt(beta_k) = k.
            let off = (i + 1) as f64;
            jac[(i, i + 1)] = off;
            jac[(i + 1, i)] = off;
        }
    }
    let eig = jac.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|j| {
            let x = eig.eigenvalues[j];
            let v0 = eig.eigenvectors[(0, j)].abs();
            // Scaled weight w e^x = exp(2 ln v0 + x) (mu_0 = 1).  The first
            // eigenvector components underflow into solver noise for large
            // nodes; the true scaled weights are O(pi x), so clamp there --
            // those nodes only ever multiply integrands that carry e^{-x}.
            let w = if v0 > 0.0 {
                (2.0 * v0.ln() + x).exp().min(10.0 * x + 10.0)
            } else {
                0.0
            };
            (x, w)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let nodes: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let weights: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    (nodes, weights)
}

#[derive(Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

fn rule_cache() -> &'static Mutex<HashMap<(u8, usize), Arc<Rule>>> {
    static CACHE: OnceLock<Mutex<HashMap<(u8, usize), Arc<Rule>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Cached Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> Arc<Rule> {
    let mut cache = rule_cache().lock().unwrap();
    cache
        .entry((0, n))
        .or_insert_with(|| {
            let (nodes, weights) = gauss_legendre_raw(n);
            Arc::new(Rule { nodes, weights })
        })
        .clone()
}

/// Cached Gauss-Laguerre rule (nodes, scaled weights w e^x).
pub fn gauss_laguerre(n: usize) -> Arc<Rule> {
    let mut cache = rule_cache().lock().unwrap();
    cache
        .entry((1, n))
        .or_insert_with(|| {
            let (nodes, weights) = gauss_laguerre_raw(n);
            Arc::new(Rule { nodes, weights })
        })
        .clone()
}

/// Scalar-like values the quadratures can accumulate.
pub trait QuadValue: Copy {
    fn zero() -> Self;
    fn add(self, other: Self) -> Self;
    fn scale(self, factor: f64) -> Self;
    fn abs(self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn scale(self, factor: f64) -> Self {
        self * factor
    }
    fn abs(self) -> f64 {
        f64::abs(self)
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn scale(self, factor: f64) -> Self {
        self * factor
    }
    fn abs(self) -> f64 {
        self.norm()
    }
}

/// Node/weight layout of the three-piece semi-infinite rule.
pub struct LaplaceRule {
    /// (t, weight) pairs for head and middle sections.
    finite: Vec<(f64, f64)>,
    /// Tail start.
    t2: f64,
    /// Tail decay rate used by the Laguerre map.
    rate: f64,
    /// Laguerre nodes/scaled-weights.
    tail: Arc<Rule>,
}

impl LaplaceRule {
    /// Build a rule for integrands decaying like `e^{-slow * t}` with the
    /// fastest feature scale `1/fast` (fast >= slow).
    pub fn build(spec: &QuadratureSpec, slow: f64, fast: f64, n: usize) -> LaplaceRule {
        let slow = slow.max(1e-300);
        let fast = fast.max(slow);
        let t1 = (0.5 / fast).min(spec.split_point);
        let t2 = (8.0 / slow).max(t1 * std::f64::consts::E);
        let mut finite = Vec::new();

        // Head: t = tau^2 on [0, sqrt(t1)].
        let gl = gauss_legendre(n);
        let tau_hi = t1.sqrt();
        for (x, w) in gl.nodes.iter().zip(gl.weights.iter()) {
            let tau = 0.5 * tau_hi * (x + 1.0);
            let jac = 0.5 * tau_hi * 2.0 * tau;
            finite.push((tau * tau, w * jac));
        }

        // Middle: t = t1 e^y, composite panels of <= 2 e-folds each.
        let efolds = (t2 / t1).ln();
        if efolds > 1e-12 {
            let panels = (efolds / 2.0).ceil() as usize;
            let n_mid = (n / 2).max(12);
            let glm = gauss_legendre(n_mid);
            let dy = efolds / panels as f64;
            for p in 0..panels {
                let y0 = p as f64 * dy;
                for (x, w) in glm.nodes.iter().zip(glm.weights.iter()) {
                    let y = y0 + 0.5 * dy * (x + 1.0);
                    let t = t1 * y.exp();
                    finite.push((t, w * 0.5 * dy * t));
                }
            }
        }

        let tail = gauss_laguerre(n.min(220));
        LaplaceRule {
            finite,
            t2,
            rate: slow,
            tail,
        }
    }

    /// Apply to an integrand given as values of f(t); the tail weights
    /// compensate e^{-rate (t - t2)} analytically, so `f` must contain its
    /// own decay (no weight is applied by the rule).
    pub fn apply<V: QuadValue>(&self, mut f: impl FnMut(f64) -> V) -> V {
        self.apply_with_mag(&mut f).0
    }

    /// Like `apply`, also returning sum |w f| — the cancellation scale that
    /// bounds the achievable absolute accuracy.
    pub fn apply_with_mag<V: QuadValue>(&self, f: &mut impl FnMut(f64) -> V) -> (V, f64) {
        let mut acc = V::zero();
        let mut mag = 0.0;
        for &(t, w) in &self.finite {
            let v = f(t).scale(w);
            mag += v.abs();
            acc = acc.add(v);
        }
        // Tail: t = t2 + x/rate with scaled weights w e^{+x}; f carries its
        // own e^{-rate t} decay so the products stay O(f(t2)).
        for (x, w) in self.tail.nodes.iter().zip(self.tail.weights.iter()) {
            let t = self.t2 + x / self.rate;
            let v = f(t).scale(w / self.rate);
            mag += v.abs();
            acc = acc.add(v);
        }
        (acc, mag)
    }
}

/// Integrate `f` over [0, inf) where `f` decays at least like
/// `e^{-decay_rate t}`, refining until convergence.
///
/// `fast_scale` bounds the fastest exponential scale inside `f` (pass
/// `decay_rate` when there is only one).
pub fn laplace_integral_scaled<V: QuadValue>(
    f: impl Fn(f64) -> V,
    decay_rate: f64,
    fast_scale: f64,
    spec: &QuadratureSpec,
) -> Result<V> {
    spec.validate()?;
    if !(decay_rate > 0.0) {
        return Err(Error::Domain(format!(
            "decay_rate must be positive, got {decay_rate}"
        )));
    }
    let mut n = spec.node_count;
    let rule = LaplaceRule::build(spec, decay_rate, fast_scale, n);
    let mut fm = |t: f64| f(t);
    let mut prev = rule.apply_with_mag(&mut fm).0;
    for r in 0..spec.max_refinements {
        n *= 2;
        let rule = LaplaceRule::build(spec, decay_rate, fast_scale, n);
        let (cur, mag) = rule.apply_with_mag(&mut fm);
        let scale = cur.abs().max(prev.abs());
        let delta = cur.add(prev.scale(-1.0)).abs();
        // Converged, identically zero, or at the cancellation noise floor.
        if delta <= spec.relative_tolerance * scale.max(1e-300)
            || scale == 0.0
            || delta <= 1e-13 * mag
        {
            return Ok(cur);
        }
        if r + 1 == spec.max_refinements {
            return Err(Error::NonConvergence {
                residual: delta / scale.max(1e-300),
                tol: spec.relative_tolerance,
                refinements: spec.max_refinements,
            });
        }
        prev = cur;
    }
    Ok(prev)
}

/// Single-scale variant: the integrand's only exponential scale is `decay_rate`.
pub fn laplace_integral<V: QuadValue>(
    f: impl Fn(f64) -> V,
    decay_rate: f64,
    spec: &QuadratureSpec,
) -> Result<V> {
    laplace_integral_scaled(f, decay_rate, decay_rate, spec)
}

/// Composite Gauss-Legendre over [a, b] with `panels` panels of `n` nodes.
pub fn composite_gl<V: QuadValue>(
    mut f: impl FnMut(f64) -> V,
    a: f64,
    b: f64,
    panels: usize,
    n: usize,
) -> V {
    let gl = gauss_legendre(n);
    let h = (b - a) / panels as f64;
    let mut acc = V::zero();
    for p in 0..panels {
        let lo = a + p as f64 * h;
        for (x, w) in gl.nodes.iter().zip(gl.weights.iter()) {
            let t = lo + 0.5 * h * (x + 1.0);
            acc = acc.add(f(t).scale(w * 0.5 * h));
        }
    }
    acc
}

/// Plan for the tensor-product (s, u) double integral.
pub struct SuRule {
    s_nodes: Vec<(f64, f64)>,
    u_rule: LaplaceRule,
    gaussian_weight: bool,
    u_decay: f64,
}

impl SuRule {
    /// `s_max` must cover the support of the s-profile; `u_decay` is the
    /// honest asymptotic decay rate of the u-integrand, and `u_fast` its
    /// fastest scale (for diagonal heat kernels, the 1/sqrt(u) head).
    pub fn build(
        spec: &QuadratureSpec,
        s_max: f64,
        u_decay: f64,
        u_fast: f64,
        gaussian_weight: bool,
        n: usize,
    ) -> SuRule {
        let panels = (s_max / 2.0).ceil().max(4.0) as usize;
        let n_s = (n / 2).max(16);
        let gl = gauss_legendre(n_s);
        let h = s_max / panels as f64;
        let mut s_nodes = Vec::with_capacity(panels * n_s);
        for p in 0..panels {
            let lo = p as f64 * h;
            for (x, w) in gl.nodes.iter().zip(gl.weights.iter()) {
                let s = lo + 0.5 * h * (x + 1.0);
                let mut weight = w * 0.5 * h;
                if gaussian_weight {
                    weight *= (-s * s / 4.0).exp();
                }
                s_nodes.push((s, weight));
            }
        }
        let u_rule = LaplaceRule::build(spec, u_decay, u_fast, n);
        SuRule {
            s_nodes,
            u_rule,
            gaussian_weight,
            u_decay,
        }
    }

    pub fn apply<V: QuadValue>(&self, f: &impl Fn(f64, f64) -> V) -> (V, f64) {
        let mut acc = V::zero();
        let mut mag = 0.0;
        for &(s, ws) in &self.s_nodes {
            let mut g = |u: f64| {
                let w_u = (-self.u_decay * u).exp();
                f(s, u).scale(w_u)
            };
            let (inner, m) = self.u_rule.apply_with_mag(&mut g);
            mag += m * ws.abs();
            acc = acc.add(inner.scale(ws));
        }
        (acc, mag)
    }

    pub fn gaussian_weight(&self) -> bool {
        self.gaussian_weight
    }
}

/// Tensor-product double integral with weights
/// `e^{-s^2/4}` (if `gaussian_weight`) and `e^{-u_decay u}` applied by the
/// rule; refines until both directions agree to tolerance.
pub fn double_integral_su<V: QuadValue>(
    f: impl Fn(f64, f64) -> V,
    gaussian_weight: bool,
    s_max: f64,
    u_decay: f64,
    u_fast: f64,
    spec: &QuadratureSpec,
) -> Result<V> {
    spec.validate()?;
    if !(u_decay > 0.0) {
        return Err(Error::Domain(format!(
            "u_decay must be positive, got {u_decay}"
        )));
    }
    let mut n = spec.node_count.max(32);
    let rule = SuRule::build(spec, s_max, u_decay, u_fast, gaussian_weight, n);
    let mut prev = rule.apply(&f).0;
    for r in 0..spec.max_refinements {
        n *= 2;
        let rule = SuRule::build(spec, s_max, u_decay, u_fast, gaussian_weight, n);
        let (cur, mag) = rule.apply(&f);
        let scale = cur.abs().max(prev.abs());
        let delta = cur.add(prev.scale(-1.0)).abs();
        if delta <= spec.relative_tolerance * scale.max(1e-300)
            || scale == 0.0
            || delta <= 1e-13 * mag
        {
            return Ok(cur);
        }
        if r + 1 == spec.max_refinements {
            return Err(Error::NonConvergence {
                residual: delta / scale.max(1e-300),
                tol: spec.relative_tolerance,
                refinements: spec.max_refinements,
            });
        }
        prev = cur;
    }
    Ok(prev)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let gl = gauss_legendre(8);
        // x^14 over [-1,1] = 2/15, exact for n=8.
        let v: f64 = gl
            .nodes
            .iter()
            .zip(gl.weights.iter())
            .map(|(x, w)| w * x.powi(14))
            .sum();
        assert_relative_eq!(v, 2.0 / 15.0, max_relative = 1e-14);
    }

    #[test]
    fn gauss_laguerre_factorial() {
        let rule = gauss_laguerre(32);
        // int x^5 e^{-x} = 120; scaled weights carry e^{+x}.
        let v: f64 = rule
            .nodes
            .iter()
            .zip(rule.weights.iter())
            .map(|(x, w)| w * (-x).exp() * x.powi(5))
            .sum();
        assert_relative_eq!(v, 120.0, max_relative = 1e-12);
    }

    #[test]
    fn laplace_constant_integrand() {
        let spec = QuadratureSpec::default();
        let v = laplace_integral(|t| (-t).exp(), 1.0, &spec).unwrap();
        assert_relative_eq!(v, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn laplace_frullani_difference() {
        // int (e^{-t} - e^{-4t})/t dt = ln 4.
        let spec = QuadratureSpec::default();
        let v = laplace_integral_scaled(
            |t| ((-t).exp() - (-4.0 * t).exp()) / t,
            1.0,
            4.0,
            &spec,
        )
        .unwrap();
        assert_relative_eq!(v, 4.0_f64.ln(), max_relative = 1e-11);
    }

    #[test]
    fn laplace_inverse_sqrt_endpoint() {
        // int t^{-1/2} e^{-t} dt = Gamma(1/2) = sqrt(pi).
        let spec = QuadratureSpec::default();
        let v = laplace_integral(|t| (-t).exp() / t.sqrt(), 1.0, &spec).unwrap();
        assert_relative_eq!(v, std::f64::consts::PI.sqrt(), max_relative = 1e-11);
    }

    #[test]
    fn laplace_two_scale() {
        // int (e^{-t} - e^{-1e6 t})/t dt = ln 1e6.
        let spec = QuadratureSpec::default();
        let v = laplace_integral_scaled(
            |t| ((-t).exp() - (-1e6 * t).exp()) / t,
            1.0,
            1e6,
            &spec,
        )
        .unwrap();
        assert_relative_eq!(v, 1e6_f64.ln(), max_relative = 1e-10);
    }

    #[test]
    fn laplace_rejects_bad_rate() {
        let spec = QuadratureSpec::default();
        assert!(laplace_integral(|_t| 1.0, 0.0, &spec).is_err());
    }

    #[test]
    fn double_integral_gaussian_weight_unit() {
        // f == 1 with Gaussian s-weight and e^{-u} u-weight -> sqrt(pi) * 1.
        let spec = QuadratureSpec::default();
        let v = double_integral_su(|_s, _u| 1.0, true, 26.0, 1.0, 1.0, &spec).unwrap();
        assert_relative_eq!(v, std::f64::consts::PI.sqrt(), max_relative = 1e-10);
    }

    #[test]
    fn double_integral_separable_product() {
        // f(s,u) = s * u with weights: int s e^{-s^2/4} ds * int u e^{-u} du = 2 * 1.
        let spec = QuadratureSpec::default();
        let v = double_integral_su(|s, u| s * u, true, 30.0, 1.0, 1.0, &spec).unwrap();
        assert_relative_eq!(v, 2.0, max_relative = 1e-10);
    }

    #[test]
    fn quadrature_deterministic_bit_identical() {
        let spec = QuadratureSpec::default();
        let f = |t: f64| (-(1.3 * t)).exp() * (1.0 + t).ln();
        let a = laplace_integral(f, 1.3, &spec).unwrap();
        let b = laplace_integral(f, 1.3, &spec).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn complex_laplace_matches_analytic() {
        // int e^{tE} dt = -1/E for Re E < 0, complex E.
        let spec = QuadratureSpec::default();
        let e = Complex64::new(-2.0, 0.7);
        let v = laplace_integral(|t| (e * t).exp(), 2.0, &spec).unwrap();
        let expect = -1.0 / e;
        assert!((v - expect).norm() < 1e-11 * expect.norm());
    }
}
