//! Laguerre and two-variable Hermite polynomials.

use super::dd::{Dd, DdComplex};
use crate::error::{domain, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Largest polynomial order accepted at the public API.
pub const MAX_ORDER: usize = 64;

/// Pair of nonnegative orders `(m, n)` of `H_{m,n}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PolyIndex {
    pub m: usize,
    pub n: usize,
}

impl PolyIndex {
    pub fn new(m: usize, n: usize) -> Result<Self> {
        if m > MAX_ORDER || n > MAX_ORDER {
            return domain(format!("polynomial index ({m}, {n}) exceeds {MAX_ORDER}"));
        }
        Ok(PolyIndex { m, n })
    }

    pub fn swapped(self) -> Self {
        PolyIndex {
            m: self.n,
            n: self.m,
        }
    }
}

/// Laguerre polynomial `L_n(x) = Σ_l C(n, l) (−x)^l / l!`.
///
/// Evaluated with the three-term recurrence
/// `(k + 1) L_{k+1} = (2k + 1 − x) L_k − k L_{k−1}`, which avoids the
/// cancellation the alternating power sum suffers for large `|x|`.
pub fn laguerre(n: usize, x: f64) -> Result<f64> {
    if n > MAX_ORDER {
        return domain(format!("Laguerre order {n} exceeds {MAX_ORDER}"));
    }
    if !x.is_finite() {
        return domain(format!("Laguerre argument must be finite, got {x}"));
    }
    Ok(LaguerreSeq::new(x).nth(n).unwrap())
}

/// Unbounded iterator over `L_0(x), L_1(x), ...`.
#[derive(Debug, Clone)]
pub struct LaguerreSeq {
    x: f64,
    k: usize,
    prev: f64,
    cur: f64,
}

impl LaguerreSeq {
    pub fn new(x: f64) -> Self {
        LaguerreSeq {
            x,
            k: 0,
            prev: 0.0,
            cur: 1.0,
        }
    }
}

impl Iterator for LaguerreSeq {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        let out = self.cur;
        let k = self.k as f64;
        let next = ((2.0 * k + 1.0 - self.x) * self.cur - k * self.prev) / (k + 1.0);
        self.prev = self.cur;
        self.cur = next;
        self.k += 1;
        Some(out)
    }
}

/// Two-variable Hermite polynomial
/// `H_{m,n}(x, y) = Σ_l m! n! (−1)^l / (l! (m−l)! (n−l)!) x^(m−l) y^(n−l)`.
pub fn hermite2(idx: PolyIndex, x: Complex64, y: Complex64) -> Result<Complex64> {
    if idx.m > MAX_ORDER || idx.n > MAX_ORDER {
        return domain(format!("polynomial index ({}, {}) exceeds {MAX_ORDER}", idx.m, idx.n));
    }
    Ok(hermite2_unchecked(idx.m, idx.n, x, y))
}

/// Real-argument convenience wrapper around [`hermite2`].
pub fn hermite2_real(idx: PolyIndex, x: f64, y: f64) -> Result<f64> {
    hermite2(idx, Complex64::new(x, 0.0), Complex64::new(y, 0.0)).map(|z| z.re)
}

/// The explicit finite sum in double-double arithmetic.
///
/// Written as `x^(m−p) y^(n−p) Σ_l c_l (xy)^(p−l)` with `p = min(m, n)` and
/// evaluated by Horner's rule; the extra precision absorbs the alternating
/// cancellation that makes the plain double sum lose ~8 digits at order 20.
pub(crate) fn hermite2_unchecked(m: usize, n: usize, x: Complex64, y: Complex64) -> Complex64 {
    let p = m.min(n);
    let xd = DdComplex::from_c64(x);
    let yd = DdComplex::from_c64(y);
    let w = xd * yd;

    // c_l = m! n! (−1)^l / (l! (m−l)! (n−l)!), c_0 = 1.
    let mut coeffs = Vec::with_capacity(p + 1);
    let mut c = Dd::ONE;
    coeffs.push(c);
    for l in 0..p {
        c = -(c.mul_f64(((m - l) * (n - l)) as f64).div_f64((l + 1) as f64));
        coeffs.push(c);
    }

    let mut acc = DdComplex::default();
    for k in 0..=p {
        // Horner from the highest power of w, which carries c_0.
        acc = acc * w
            + DdComplex {
                re: coeffs[k],
                im: Dd::ZERO,
            };
    }
    let prefactor = xd.powu(m - p) * yd.powu(n - p);
    (acc * prefactor).to_c64()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn laguerre_low_orders() {
        assert_eq!(laguerre(0, 7.3).unwrap(), 1.0);
        assert_eq!(laguerre(1, 1.0).unwrap(), 0.0);
        assert_eq!(laguerre(2, 2.0).unwrap(), -1.0);
        assert!(laguerre(65, 1.0).is_err());
        assert!(laguerre(3, f64::INFINITY).is_err());
    }

    #[test]
    fn hermite_low_orders() {
        let h00 = hermite2(PolyIndex::new(0, 0).unwrap(), c(4.2), Complex64::new(0.0, 9.0)).unwrap();
        assert_eq!(h00, c(1.0));
        let h11 = hermite2_real(PolyIndex::new(1, 1).unwrap(), 2.0, 3.0).unwrap();
        assert_eq!(h11, 5.0);
        let h21 = hermite2_real(PolyIndex::new(2, 1).unwrap(), 2.0, 3.0).unwrap();
        assert_eq!(h21, 8.0);
        assert!(PolyIndex::new(65, 0).is_err());
    }

    #[test]
    fn hermite_generating_recurrence() {
        // H_{m+1,n} = x H_{m,n} − n H_{m,n−1}, from differentiating the generating function in t.
        let x = Complex64::new(0.7, -0.4);
        let y = Complex64::new(-1.1, 0.25);
        for m in 0..8 {
            for n in 1..8 {
                let lhs = hermite2_unchecked(m + 1, n, x, y);
                let rhs = x * hermite2_unchecked(m, n, x, y) - (n as f64) * hermite2_unchecked(m, n - 1, x, y);
                assert!((lhs - rhs).norm() < 1e-12 * (1.0 + lhs.norm()));
            }
        }
    }
}
