//! Factorials and binomial coefficients.

use statrs::function::factorial::ln_factorial as ln_fact_u64;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// `ln Γ(x + 1) − [(x + ½) ln x − x + ln √(2π)]`, the Stirling remainder.
fn stirling_remainder(x: usize) -> f64 {
    if x < 16 {
        let xf = x as f64;
        return ln_fact_u64(x as u64) - ((xf + 0.5) * xf.ln() - xf + LN_SQRT_2PI);
    }
    let r = 1.0 / x as f64;
    let r2 = r * r;
    r * (1.0 / 12.0 - r2 * (1.0 / 360.0 - r2 * (1.0 / 1260.0 - r2 / 1680.0)))
}

pub fn ln_factorial(n: usize) -> f64 {
    if n <= 170 {
        return ln_fact_u64(n as u64);
    }
    let x = n as f64;
    (x + 0.5) * x.ln() - x + LN_SQRT_2PI + stirling_remainder(n)
}

/// `ln C(n, k)`; `-inf` when `k > n`.
///
/// Exact while the coefficient fits in `u128`. Beyond that the Stirling
/// form is rearranged so that no two large logarithms are subtracted.
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let k = k.min(n - k);
    if k == 0 {
        return 0.0;
    }
    if let Some(c) = binomial_u128(n, k) {
        return (c as f64).ln();
    }
    let (nf, kf, rf) = (n as f64, k as f64, (n - k) as f64);
    kf * (nf / kf).ln() + rf * (kf / rf).ln_1p() + 0.5 * (nf / (kf * rf)).ln() - LN_SQRT_2PI
        + stirling_remainder(n)
        - stirling_remainder(k)
        - stirling_remainder(n - k)
}

/// `ln(n! / (n − k)!)`; `-inf` when `k > n`.
pub fn ln_falling_factorial(n: usize, k: usize) -> f64 {
    ln_binomial(n, k) + ln_factorial(k)
}

fn binomial_u128(n: usize, k: usize) -> Option<u128> {
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

/// `C(n, k)` as a double.
///
/// Exact integer arithmetic is used while it fits in `u128`, so small
/// coefficients come out as exactly representable integers.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    match binomial_u128(n, k.min(n - k)) {
        Some(c) => c as f64,
        None => ln_binomial(n, k).exp(),
    }
}

/// Falling factorial `n! / (n - k)!`; zero when `k > n`.
pub fn falling_factorial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    if n <= 170 {
        let mut acc = 1.0;
        for i in 0..k {
            acc *= (n - i) as f64;
        }
        acc
    } else {
        ln_falling_factorial(n, k).exp()
    }
}
