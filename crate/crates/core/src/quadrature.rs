//! Integrals over the sphere `S_d` of functions of the first coordinate.
//!
//! `∫_{S_d} φ(ζ_1) dσ = ((d-1)/π) ∫_𝔻 φ(λ) (1-|λ|²)^{d-2} dA(λ)`. With
//! `t = |λ|²` the right side becomes
//! `((d-1)/2π) ∫_0^1 (1-t)^{d-2} ∫_0^{2π} φ(√t e^{iθ}) dθ dt`, which is
//! integrated by Gauss-Legendre in `t` (exact for polynomials in `|λ|²`)
//! times the trapezoid rule in `θ`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureSpec {
    pub radial_nodes: usize,
    pub angular_nodes: usize,
    pub tolerance: f64,
    pub max_refinements: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            radial_nodes: 16,
            angular_nodes: 32,
            tolerance: 1e-9,
            max_refinements: 6,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.radial_nodes < 8 || self.angular_nodes < 8 {
            return Err(Error::invalid(format!(
                "quadrature needs at least 8 radial and 8 angular nodes, got {} and {}",
                self.radial_nodes, self.angular_nodes
            )));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::invalid(format!(
                "quadrature tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        Ok(())
    }
}

/// A quadrature value with the last successive difference as its error
/// estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub est_error: f64,
}

/// A Monte Carlo mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
}

type GaussRule = Arc<Vec<(f64, f64)>>;

/// Gauss-Legendre nodes and weights on `[-1, 1]`, cached per order.
pub fn gauss_legendre(n: usize) -> GaussRule {
    static CACHE: OnceLock<Mutex<HashMap<usize, GaussRule>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(rule) = cache.lock().unwrap().get(&n) {
        return Arc::clone(rule);
    }
    let rule = Arc::new(compute_gauss_legendre(n));
    cache.lock().unwrap().insert(n, Arc::clone(&rule));
    rule
}

fn compute_gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 1);
    let nf = n as f64;
    let mut out = vec![(0.0, 0.0); n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out[i] = (-x, w);
        out[n - 1 - i] = (x, w);
    }
    out
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p, d)
}

#[derive(Clone, Debug)]
struct Layout {
    // radial panels in t = |λ|²
    panels: Vec<(f64, f64)>,
    // angular clustering strength toward θ = 0; 0 means uniform
    beta: f64,
}

impl Layout {
    fn uniform() -> Self {
        Layout {
            panels: vec![(0.0, 1.0)],
            beta: 0.0,
        }
    }

    /// Panels `[1 - 2^{-j}, 1 - 2^{-j-1}]` down to width `floor`, then one
    /// last panel touching `t = 1`.
    fn graded(floor: f64) -> Self {
        let mut edges = vec![0.0];
        let mut gap = 0.5;
        while gap > floor {
            edges.push(1.0 - gap);
            gap *= 0.5;
        }
        edges.push(1.0);
        Layout {
            panels: edges.windows(2).map(|w| (w[0], w[1])).collect(),
            beta: 0.0,
        }
    }
}

fn apply_rule<F>(phi: &F, d: u32, layout: &Layout, radial: usize, angular: usize) -> f64
where
    F: Fn(Complex64) -> f64 + Sync,
{
    let gl = gauss_legendre(radial);
    let mut nodes = Vec::with_capacity(layout.panels.len() * radial);
    for &(a, b) in &layout.panels {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        for &(x, w) in gl.iter() {
            let t = mid + half * x;
            let weight = half * w * (1.0 - t).powi(d as i32 - 2);
            nodes.push((t.sqrt(), weight));
        }
    }
    let beta = layout.beta;
    let h = 2.0 * PI / angular as f64;
    let columns: Vec<f64> = (0..angular)
        .into_par_iter()
        .map(|j| {
            let tau = h * j as f64;
            let theta = tau - beta * tau.sin();
            let jac = 1.0 - beta * tau.cos();
            let dir = Complex64::from_polar(1.0, theta);
            let mut s = 0.0;
            for &(rho, w) in &nodes {
                s += w * phi(dir * rho);
            }
            s * jac
        })
        .collect();
    let total: f64 = columns.iter().sum();
    total * h * f64::from(d - 1) / (2.0 * PI)
}

fn refine<F>(phi: &F, d: u32, spec: &QuadratureSpec, mut layout: Layout) -> Result<Estimate>
where
    F: Fn(Complex64) -> f64 + Sync,
{
    if d < 2 {
        return Err(Error::invalid(format!("slice integration needs d >= 2, got {d}")));
    }
    spec.validate()?;
    let mut radial = spec.radial_nodes;
    let mut angular = spec.angular_nodes;
    let mut prev = apply_rule(phi, d, &layout, radial, angular);
    let mut prev_diff = f64::INFINITY;
    let mut graded = layout.panels.len() > 1;
    let mut previous = f64::NAN;
    for _ in 0..spec.max_refinements {
        radial *= 2;
        angular *= 2;
        let cur = apply_rule(phi, d, &layout, radial, angular);
        let diff = (cur - prev).abs();
        if diff < spec.tolerance {
            return Ok(Estimate {
                value: cur,
                est_error: diff,
            });
        }
        previous = prev;
        prev = cur;
        if d == 2 && !graded && diff > 0.5 * prev_diff {
            // with no boundary damping, stagnation means a feature at the rim
            graded = true;
            layout = Layout {
                beta: layout.beta,
                ..Layout::graded(1e-6)
            };
            previous = prev;
            prev = apply_rule(phi, d, &layout, radial, angular);
            prev_diff = f64::INFINITY;
            continue;
        }
        prev_diff = diff;
    }
    Err(Error::NonConvergence {
        last: prev,
        previous,
    })
}

/// `∫_{S_d} φ(ζ_1) dσ_d` for `φ` defined on the closed unit disk.
pub fn integrate_slice<F>(phi: F, d: u32, spec: &QuadratureSpec) -> Result<Estimate>
where
    F: Fn(Complex64) -> f64 + Sync,
{
    refine(&phi, d, spec, Layout::uniform())
}

/// Like [`integrate_slice`], for integrands concentrated within distance
/// about `width` of `λ = 1`: radial panels are graded geometrically down
/// to `width / 8` from the rim and angular nodes cluster around `θ = 0`.
pub fn integrate_slice_focused<F>(
    phi: F,
    d: u32,
    spec: &QuadratureSpec,
    width: f64,
) -> Result<Estimate>
where
    F: Fn(Complex64) -> f64 + Sync,
{
    if !(width > 0.0) {
        return Err(Error::invalid(format!("focus width must be positive, got {width}")));
    }
    let w = width.min(1.0);
    let mut layout = Layout::graded(w / 8.0);
    // near τ = 0 the map θ = τ - β sin τ behaves like (1-β)τ + τ³/6, so
    // 1 - β = w^{2/3} resolves angular features of size w
    layout.beta = 1.0 - w.powf(2.0 / 3.0);
    refine(&phi, d, spec, layout)
}

/// Plain Monte Carlo over `S_d` with points drawn as normalized Gaussian
/// vectors in `ℂ^d`.
pub fn montecarlo_sphere<F>(phi: F, d: u32, samples: usize, seed: u64) -> Result<McEstimate>
where
    F: Fn(&[Complex64]) -> f64,
{
    if d < 1 {
        return Err(Error::invalid("sphere dimension must be at least 1"));
    }
    if samples < 1000 {
        return Err(Error::invalid(format!(
            "Monte Carlo needs at least 1000 samples, got {samples}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut z = vec![Complex64::new(0.0, 0.0); d as usize];
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for k in 0..samples {
        let mut norm_sq = 0.0;
        for c in z.iter_mut() {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            *c = Complex64::new(re, im);
            norm_sq += re * re + im * im;
        }
        let inv = norm_sq.sqrt().recip();
        for c in z.iter_mut() {
            *c *= inv;
        }
        let v = phi(&z);
        let delta = v - mean;
        mean += delta / (k + 1) as f64;
        m2 += delta * (v - mean);
    }
    let n = samples as f64;
    let var = m2 / (n - 1.0);
    Ok(McEstimate {
        value: mean,
        std_error: (var / n).sqrt(),
    })
}
