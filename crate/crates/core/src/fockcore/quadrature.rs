//! Complex-plane integrals `∫ d²β/π f(β)` by radial Gauss–Legendre times a
//! uniform angular trapezoid, refined 16 nodes at a time until stable.

use crate::error::{domain, Error, Result};
use crate::specfun::{hermite2, PolyIndex};
use num_complex::Complex64;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

/// Nodes and weights on [-1, 1].
#[derive(Debug)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Newton iteration on `P_n` from the Chebyshev-like initial guesses.
    fn build(n: usize) -> Self {
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
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
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    /// Shared rule of order `n`; each order is built once.
    pub fn get(n: usize) -> Arc<GaussLegendre> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
        guard.entry(n).or_insert_with(|| Arc::new(GaussLegendre::build(n))).clone()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

pub const START_NODES: usize = 32;
pub const NODE_STEP: usize = 16;
pub const MAX_NODES: usize = 640;
pub const STABILITY: f64 = 1e-8;

/// `(1/π) ∫_0^R r dr ∫_0^{2π} dθ f(r e^{iθ})` for a vector-valued integrand
/// at a fixed resolution.
fn polar_rule<F>(f: &F, out_len: usize, radius: f64, radial: usize, angular: usize) -> Vec<Complex64>
where
    F: Fn(Complex64, &mut [Complex64]),
{
    let rule = GaussLegendre::get(radial);
    let mut acc = vec![Complex64::new(0.0, 0.0); out_len];
    let mut buf = vec![Complex64::new(0.0, 0.0); out_len];
    let dtheta = 2.0 * PI / angular as f64;
    for (&t, &w) in rule.nodes.iter().zip(rule.weights.iter()) {
        let r = 0.5 * radius * (t + 1.0);
        let wr = 0.5 * radius * w * r * dtheta / PI;
        for a in 0..angular {
            let beta = Complex64::from_polar(r, a as f64 * dtheta);
            f(beta, &mut buf);
            for (o, v) in acc.iter_mut().zip(buf.iter()) {
                *o += *v * wr;
            }
        }
    }
    acc
}

/// Converged integral plus the node counts that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneIntegral {
    pub values: Vec<Complex64>,
    pub radial: usize,
    pub angular: usize,
}

/// Integrates until adding [`NODE_STEP`] nodes in both directions changes
/// every component by less than [`STABILITY`].
pub fn plane_integral<F>(f: F, out_len: usize, radius: f64) -> Result<PlaneIntegral>
where
    F: Fn(Complex64, &mut [Complex64]),
{
    let mut n = START_NODES;
    let mut prev = polar_rule(&f, out_len, radius, n, n);
    loop {
        let next_n = n + NODE_STEP;
        let next = polar_rule(&f, out_len, radius, next_n, next_n);
        let change = prev
            .iter()
            .zip(next.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        if change < STABILITY {
            return Ok(PlaneIntegral {
                values: next,
                radial: next_n,
                angular: next_n,
            });
        }
        if next_n >= MAX_NODES {
            return Err(Error::Quadrature {
                change,
                radial: next_n,
                angular: next_n,
            });
        }
        n = next_n;
        prev = next;
    }
}

/// Both sides of `∫ d²β/π β^n β*^m e^{−|β|² + βα* + β*α} = (−i)^{m+n} H_{m,n}(iα*, iα) e^{|α|²}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianSides {
    pub integral: Complex64,
    pub closed: Complex64,
}

pub fn gaussian_integral_sides(idx: PolyIndex, alpha: Complex64) -> Result<GaussianSides> {
    if idx.m > 3 || idx.n > 3 {
        return domain(format!("Gaussian moment check supports m, n <= 3, got ({}, {})", idx.m, idx.n));
    }
    if !(alpha.norm() <= 1.5) {
        return domain(format!("|alpha| must be at most 1.5, got {}", alpha.norm()));
    }
    let (m, n) = (idx.m as u32, idx.n as u32);
    let integrand = |beta: Complex64, out: &mut [Complex64]| {
        let expo = -beta.norm_sqr() + beta * alpha.conj() + beta.conj() * alpha;
        out[0] = beta.powu(n) * beta.conj().powu(m) * expo.exp();
    };
    let integral = plane_integral(integrand, 1, alpha.norm() + 8.0)?.values[0];
    let i = Complex64::new(0.0, 1.0);
    let h = hermite2(idx, i * alpha.conj(), i * alpha)?;
    let closed = (-i).powu(m + n) * h * alpha.norm_sqr().exp();
    Ok(GaussianSides { integral, closed })
}

/// `|integral − closed form|` of the Gaussian moment identity.
pub fn gaussian_integral_check(idx: PolyIndex, alpha: Complex64) -> Result<f64> {
    gaussian_integral_sides(idx, alpha).map(|s| (s.integral - s.closed).norm())
}

/// `max_{j,k < levels} |∫ d²α/π <j|α><α|k> − δ_jk|` with
/// `<j|α> = e^{−|α|²/2} α^j / √(j!)`.
pub fn coherent_completeness_residual(levels: usize) -> Result<f64> {
    if levels == 0 || levels > 12 {
        return domain(format!("completeness check supports 1..=12 levels, got {levels}"));
    }
    let mut inv_sqrt_fact = vec![1.0; levels];
    for j in 1..levels {
        inv_sqrt_fact[j] = inv_sqrt_fact[j - 1] / (j as f64).sqrt();
    }
    let integrand = |alpha: Complex64, out: &mut [Complex64]| {
        let g = (-alpha.norm_sqr()).exp();
        let mut ket = Vec::with_capacity(levels);
        let mut p = Complex64::new(1.0, 0.0);
        for c in inv_sqrt_fact.iter() {
            ket.push(p * *c);
            p *= alpha;
        }
        for j in 0..levels {
            for k in 0..levels {
                out[j * levels + k] = ket[j] * ket[k].conj() * g;
            }
        }
    };
    let radius = 8.0 + (2.0 * levels as f64).sqrt();
    let res = plane_integral(integrand, levels * levels, radius)?;
    let mut worst: f64 = 0.0;
    for j in 0..levels {
        for k in 0..levels {
            let delta = if j == k { 1.0 } else { 0.0 };
            worst = worst.max((res.values[j * levels + k] - delta).norm());
        }
    }
    Ok(worst)
}
