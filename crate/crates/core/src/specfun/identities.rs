//! Generating-function identities for the Laguerre and two-variable Hermite
//! polynomials, each returned as a residual between a truncated series and
//! its closed form.

use super::combin::binomial;
use super::poly::{hermite2_unchecked, laguerre, LaguerreSeq, PolyIndex};
use super::series::{scaled_residual, sum_truncated};
use crate::error::{domain, Result};
use num_complex::Complex64;

/// A truncated series side by side with its closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    pub series: f64,
    pub closed: f64,
    pub terms_used: usize,
}

impl Comparison {
    /// `|series − closed| / max(1, |closed|)`.
    pub fn residual(&self) -> f64 {
        scaled_residual(self.series, self.closed)
    }
}

fn check_terms(terms: usize) -> Result<()> {
    if terms == 0 {
        return domain("at least one series term is required");
    }
    Ok(())
}

/// `|(1 − z)^-1 e^{zx/(z−1)} − Σ_{n<terms} L_n(x) z^n|`.
pub fn laguerre_genfun_residual(z: f64, x: f64, terms: usize) -> Result<f64> {
    if !(z.abs() < 1.0) {
        return domain(format!("Laguerre generating function diverges for |z| = {}", z.abs()));
    }
    if !x.is_finite() {
        return domain("argument must be finite");
    }
    check_terms(terms)?;
    let closed = (z * x / (z - 1.0)).exp() / (1.0 - z);
    let mut zn = 1.0;
    let partial = sum_truncated(
        LaguerreSeq::new(x).map(|l| {
            let t = l * zn;
            zn *= z;
            t
        }),
        terms,
    );
    Ok((closed - partial.value).abs())
}

/// Compares `L_n(xy)` with `(−1)^n / n! · H_{n,n}(x, y)`.
pub fn hermite_laguerre_link_residual(n: usize, x: f64, y: f64) -> Result<f64> {
    if n > 30 {
        return domain(format!("link check is limited to n <= 30, got {n}"));
    }
    let l = laguerre(n, x * y)?;
    let h = hermite2_unchecked(n, n, Complex64::new(x, 0.0), Complex64::new(y, 0.0)).re;
    let mut scale = 1.0;
    for k in 1..=n {
        scale /= k as f64;
    }
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(scaled_residual(sign * scale * h, l))
}

/// Series `Σ_l λ^l / l! · H_{l+m,l+n}(x, y)` against
/// `(1+λ)^{−(m+n)/2−1} e^{λxy/(1+λ)} H_{m,n}(x/√(1+λ), y/√(1+λ))`.
pub fn shifted_hermite_genfun(
    idx: PolyIndex,
    lam: f64,
    x: f64,
    y: f64,
    terms: usize,
) -> Result<Comparison> {
    if !(lam.abs() < 1.0) {
        return domain(format!("shifted Hermite series needs |lambda| < 1, got {lam}"));
    }
    if !(x.is_finite() && y.is_finite()) {
        return domain("arguments must be finite");
    }
    check_terms(terms)?;
    let (xc, yc) = (Complex64::new(x, 0.0), Complex64::new(y, 0.0));
    let mut coef = 1.0;
    let partial = sum_truncated(
        (0..).map(|l: usize| {
            if l > 0 {
                coef *= lam / l as f64;
            }
            coef * hermite2_unchecked(l + idx.m, l + idx.n, xc, yc).re
        }),
        terms,
    );
    let root = (1.0 + lam).sqrt();
    let h = hermite2_unchecked(idx.m, idx.n, xc / root, yc / root).re;
    let power = -((idx.m + idx.n) as f64) / 2.0 - 1.0;
    let closed = (1.0 + lam).powf(power) * (lam * x * y / (1.0 + lam)).exp() * h;
    Ok(Comparison {
        series: partial.value,
        closed,
        terms_used: partial.terms_used,
    })
}

pub fn shifted_hermite_genfun_residual(
    idx: PolyIndex,
    lam: f64,
    x: f64,
    y: f64,
    terms: usize,
) -> Result<f64> {
    shifted_hermite_genfun(idx, lam, x, y, terms).map(|c| c.residual())
}

/// Series `Σ_l (n+l)! (−λ)^l / (l! n!) · L_{n+l}(z)` against
/// `(1+λ)^{−n−1} e^{λz/(1+λ)} L_n(z/(1+λ))`.
pub fn gen_negbin_laguerre(n: usize, lam: f64, z: f64, terms: usize) -> Result<Comparison> {
    if !(0.0..1.0).contains(&lam) {
        return domain(format!("generalized negative binomial series needs 0 <= lambda < 1, got {lam}"));
    }
    if n > 20 {
        return domain(format!("order {n} exceeds 20"));
    }
    if !z.is_finite() {
        return domain("argument must be finite");
    }
    check_terms(terms)?;
    let partial = sum_truncated(
        LaguerreSeq::new(z)
            .skip(n)
            .enumerate()
            .map(|(l, lag)| binomial(n + l, l) * (-lam).powi(l as i32) * lag),
        terms,
    );
    let closed = (1.0 + lam).powi(-(n as i32) - 1) * (lam * z / (1.0 + lam)).exp() * laguerre(n, z / (1.0 + lam))?;
    Ok(Comparison {
        series: partial.value,
        closed,
        terms_used: partial.terms_used,
    })
}

pub fn gen_negbin_laguerre_residual(n: usize, lam: f64, z: f64, terms: usize) -> Result<f64> {
    gen_negbin_laguerre(n, lam, z, terms).map(|c| c.residual())
}

/// Triangle-ordered and rectangle-ordered double sums of `A_s B_m`.
///
/// The triangle walks `n = 0, 1, ...` summing `A_{n−l} B_l` for `l <= n`
/// over the full padded support, so every pair `(s, m)` appears once.
pub fn cauchy_sums(a: &[f64], b: &[f64]) -> (f64, f64) {
    if a.is_empty() || b.is_empty() {
        return (0.0, 0.0);
    }
    let get_a = |i: usize| a.get(i).copied().unwrap_or(0.0);
    let get_b = |i: usize| b.get(i).copied().unwrap_or(0.0);
    let top = a.len() + b.len() - 2;
    let mut triangle = 0.0;
    for n in 0..=top {
        for l in 0..=n {
            triangle += get_a(n - l) * get_b(l);
        }
    }
    let mut rectangle = 0.0;
    for &x in a {
        for &y in b {
            rectangle += x * y;
        }
    }
    (triangle, rectangle)
}

/// True iff both summation orders agree to 1e-12 (scaled).
pub fn cauchy_rearrange_check(a: &[f64], b: &[f64]) -> bool {
    let (t, r) = cauchy_sums(a, b);
    scaled_residual(t, r) <= 1e-12
}
