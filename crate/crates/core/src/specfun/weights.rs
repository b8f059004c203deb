//! Binomial and negative-binomial photon-number weights in log space.

use super::combin::{binomial, ln_binomial};
use crate::error::{check_open_unit, domain, Result};
use serde::{Deserialize, Serialize};

/// A real number stored as sign and natural log of its magnitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogWeight {
    pub log_magnitude: f64,
    /// −1, 0 or +1; zero iff the weight is exactly zero.
    pub sign: i8,
}

impl LogWeight {
    pub const ZERO: LogWeight = LogWeight {
        log_magnitude: f64::NEG_INFINITY,
        sign: 0,
    };

    pub fn from_ln(log_magnitude: f64) -> Self {
        if log_magnitude == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            LogWeight {
                log_magnitude,
                sign: 1,
            }
        }
    }

    pub fn from_value(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            LogWeight {
                log_magnitude: x.abs().ln(),
                sign: if x > 0.0 { 1 } else { -1 },
            }
        }
    }

    pub fn value(self) -> f64 {
        match self.sign {
            0 => 0.0,
            s => f64::from(s) * self.log_magnitude.exp(),
        }
    }
}

/// `C(n, l) p^l (1 − p)^(n − l)` in log space for `p` in the closed unit
/// interval. Used by the public weight and by the damping kernel, which needs
/// the endpoints.
pub(crate) fn ln_binomial_pmf(n: usize, l: usize, p: f64) -> f64 {
    if l > n {
        return f64::NEG_INFINITY;
    }
    let (lf, rest) = (l as f64, (n - l) as f64);
    let a = if l == 0 { 0.0 } else { lf * p.ln() };
    let b = if l == n { 0.0 } else { rest * (-p).ln_1p() };
    ln_binomial(n, l) + a + b
}

/// Binomial weight `C(n, l) σ^l (1 − σ)^(n − l)`.
pub fn binom_weight(n: usize, l: usize, sigma: f64) -> Result<LogWeight> {
    check_open_unit("sigma", sigma)?;
    if l > n {
        return domain(format!("level {l} exceeds binomial order {n}"));
    }
    Ok(LogWeight::from_ln(ln_binomial_pmf(n, l, sigma)))
}

/// Negative-binomial weight `C(m + s, m) γ^(s + 1) (1 − γ)^m`.
pub fn negbin_weight(s: usize, m: usize, gamma: f64) -> Result<LogWeight> {
    check_open_unit("gamma", gamma)?;
    let ln = ln_binomial(m + s, m) + (s as f64 + 1.0) * gamma.ln() + m as f64 * (-gamma).ln_1p();
    Ok(LogWeight::from_ln(ln))
}

/// Mass of the negative-binomial weights at levels `m >= dim`.
///
/// Computed from the finite identity `P(X >= D) = P(Bin(D + s, γ) <= s)`,
/// so it stays accurate when the tail is far below machine epsilon
/// relative to one.
pub fn negbin_tail(s: usize, gamma: f64, dim: usize) -> Result<f64> {
    check_open_unit("gamma", gamma)?;
    if dim == 0 {
        return Ok(1.0);
    }
    let trials = dim + s;
    let mut lns: Vec<f64> = (0..=s).map(|j| ln_binomial_pmf(trials, j, gamma)).collect();
    let top = lns.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    for v in lns.iter_mut() {
        *v = (*v - top).exp();
    }
    Ok(top.exp() * lns.iter().sum::<f64>())
}

/// Plain binomial probability with `p` allowed at 0 or 1.
pub(crate) fn binomial_pmf(n: usize, l: usize, p: f64) -> f64 {
    if l > n {
        return 0.0;
    }
    if p == 0.0 {
        return if l == 0 { 1.0 } else { 0.0 };
    }
    if p == 1.0 {
        return if l == n { 1.0 } else { 0.0 };
    }
    if n <= 60 {
        binomial(n, l) * p.powi(l as i32) * (1.0 - p).powi((n - l) as i32)
    } else {
        ln_binomial_pmf(n, l, p).exp()
    }
}
