//! Normally and anti-normally ordered functions of the number operator,
//! evaluated on the Fock diagonal.
//!
//! A series `f(N) = p(N) e^{rate N}` with polynomial part `p(N) = Σ_l c_l N^l`
//! is read inside an ordering symbol. Within `: :` the power `N^l` stands for
//! `a†^l a^l`, whose diagonal element at `|m>` is `m! / (m − l)!`; within the
//! anti-normal symbol it stands for `a^l a†^l`, with diagonal `(m + l)! / m!`.

use crate::error::{domain, Error, Result};
use crate::specfun::{binomial, falling_factorial, ln_falling_factorial, scaled_residual};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ordering {
    Normal,
    Antinormal,
}

/// `Σ_l c_l N^l · e^{rate N}` under an ordering symbol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderedSeries {
    pub ordering: Ordering,
    /// Plain coefficients `c_l` of the polynomial part.
    pub coeffs: Vec<f64>,
    /// Exponential factor `e^{rate N}`; zero for a pure polynomial.
    pub rate: f64,
}

impl OrderedSeries {
    pub fn new(ordering: Ordering, coeffs: Vec<f64>) -> Self {
        OrderedSeries {
            ordering,
            coeffs,
            rate: 0.0,
        }
    }

    /// `e^{λN}`, i.e. the infinite coefficient list `c_l = λ^l / l!`.
    pub fn exp(ordering: Ordering, lam: f64) -> Self {
        OrderedSeries {
            ordering,
            coeffs: vec![1.0],
            rate: lam,
        }
    }

    pub fn with_rate(mut self, rate: f64) -> Self {
        self.rate = rate;
        self
    }

    pub fn scaled(mut self, k: f64) -> Self {
        for c in self.coeffs.iter_mut() {
            *c *= k;
        }
        self
    }

    /// `l! c_l` for the polynomial part.
    fn factorial_scaled(&self) -> Vec<f64> {
        let mut f = 1.0;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(l, &c)| {
                if l > 0 {
                    f *= l as f64;
                }
                c * f
            })
            .collect()
    }
}

fn require(series: &OrderedSeries, ordering: Ordering) -> Result<()> {
    if series.ordering != ordering {
        return domain(format!("expected a {ordering:?} ordered series, got {:?}", series.ordering));
    }
    if !series.rate.is_finite() || series.coeffs.iter().any(|c| !c.is_finite()) {
        return domain("series coefficients must be finite");
    }
    Ok(())
}

/// `<m| :p(a†a) e^{rate a†a}: |m> = Σ_{l<=m} c_l m!/(m−l)! (1 + rate)^{m−l}`.
///
/// The exponential is resummed exactly, so `rate = −1` gives `|0><0|`
/// without cancellation.
pub fn normal_diag_eval(series: &OrderedSeries, m: usize) -> Result<f64> {
    require(series, Ordering::Normal)?;
    let base = 1.0 + series.rate;
    let mut acc = 0.0;
    for (l, &c) in series.coeffs.iter().enumerate().take(m + 1) {
        if c == 0.0 {
            continue;
        }
        let k = (m - l) as i32;
        let ff = falling_factorial(m, l);
        let v = if ff.is_finite() && base.abs().powi(k).is_finite() {
            c * ff * base.powi(k)
        } else if base == 0.0 {
            0.0
        } else {
            let sign = c.signum() * if base < 0.0 && k % 2 == 1 { -1.0 } else { 1.0 };
            sign * (c.abs().ln() + ln_falling_factorial(m, l) + k as f64 * base.abs().ln()).exp()
        };
        acc += v;
    }
    Ok(acc)
}

/// Relative size below which an anti-normal term ends the sum.
pub const ANTINORMAL_TERM_TOL: f64 = 1e-16;
const ANTINORMAL_MAX_TERMS: usize = 200_000;

/// `Σ_l c_l (m+l)!/m!` summed term by term.
///
/// With a nonzero rate the series is infinite and converges only for
/// `|rate| < 1` (ratio test); larger rates are rejected.
pub fn antinormal_diag_termwise(series: &OrderedSeries, m: usize) -> Result<f64> {
    require(series, Ordering::Antinormal)?;
    let scaled = series.factorial_scaled();
    if series.rate == 0.0 {
        let mut acc = 0.0;
        for (l, &s) in scaled.iter().enumerate() {
            acc += s * binomial(m + l, l);
        }
        return Ok(acc);
    }
    if series.rate.abs() >= 1.0 {
        return Err(Error::Convergence(format!(
            "anti-normal series at level {m} fails the ratio test: |rate| = {} >= 1",
            series.rate.abs()
        )));
    }
    let rate = series.rate;
    // w_l = C(m + l, l) rate^l, advanced by its term ratio.
    let mut w = 1.0;
    let mut acc = 0.0;
    let mut quiet = 0;
    for l in 0..ANTINORMAL_MAX_TERMS {
        if l > 0 {
            w *= rate * (m + l) as f64 / l as f64;
        }
        let mut poly = 0.0;
        for (j, &s) in scaled.iter().enumerate().take(l + 1) {
            if s != 0.0 {
                poly += binomial(l, j) * s * rate.powi(-(j as i32));
            }
        }
        let term = w * poly;
        acc += term;
        if l >= scaled.len() && term.abs() < ANTINORMAL_TERM_TOL * acc.abs() {
            quiet += 1;
            if quiet >= 3 {
                return Ok(acc);
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::Convergence(format!(
        "anti-normal series at level {m} did not settle within {ANTINORMAL_MAX_TERMS} terms"
    )))
}

/// Anti-normal diagonal through the coherent-state moment integral
/// `(1/m!) ∫_0^∞ p(u) e^{rate u} u^m e^{−u} du
///   = Σ_l c_l (m+l)!/m! (1 − rate)^{−(m+l+1)}`,
/// valid for every `rate < 1`.
pub fn antinormal_diag_moment(series: &OrderedSeries, m: usize) -> Result<f64> {
    require(series, Ordering::Antinormal)?;
    if series.rate >= 1.0 {
        return Err(Error::Convergence(format!(
            "anti-normal moment integral diverges for rate {} >= 1",
            series.rate
        )));
    }
    let ln_gap = (-series.rate).ln_1p();
    let mut acc = 0.0;
    for (l, &c) in series.coeffs.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        let ln = ln_falling_factorial(m + l, l) - (m + l + 1) as f64 * ln_gap;
        acc += c * ln.exp();
    }
    Ok(acc)
}

/// `<m| ⋮f(aa†)⋮ |m>`.
///
/// Nonnegative rates below one are summed term by term. Negative rates
/// make the termwise series alternate with heavy cancellation, and it
/// diverges outright for `rate <= −1`; those go through the moment form.
pub fn antinormal_diag_eval(series: &OrderedSeries, m: usize) -> Result<f64> {
    require(series, Ordering::Antinormal)?;
    if (0.0..1.0).contains(&series.rate) {
        antinormal_diag_termwise(series, m)
    } else if series.rate < 1.0 {
        antinormal_diag_moment(series, m)
    } else {
        Err(Error::Convergence(format!(
            "anti-normal series at level {m} diverges for rate {}",
            series.rate
        )))
    }
}

/// Largest scaled gap over `m < levels` between `⋮e^{λaa†}⋮` (termwise) and
/// `(1 − λ)^{-1} :exp[−λ a†a / (λ − 1)]:`.
pub fn ordered_exp_conversion_residual(lam: f64, levels: usize) -> Result<f64> {
    if !(lam > 0.0 && lam < 1.0) {
        return domain(format!("conversion check needs 0 < lambda < 1, got {lam}"));
    }
    let anti = OrderedSeries::exp(Ordering::Antinormal, lam);
    let normal = OrderedSeries::exp(Ordering::Normal, -lam / (lam - 1.0));
    let mut worst: f64 = 0.0;
    for m in 0..levels {
        let a = antinormal_diag_termwise(&anti, m)?;
        let n = normal_diag_eval(&normal, m)? / (1.0 - lam);
        worst = worst.max(scaled_residual(a, n));
    }
    Ok(worst)
}
