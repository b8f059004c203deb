//! Comparisons against exact rational arithmetic.
//!
//! Every f64 input is converted to the rational it actually represents, so
//! the reference values carry no rounding at all.

use fock_partition::partition::{bs_partition, bs_tail, nbs_partition, nbs_tail, partition_table, Family};
use fock_partition::specfun::{hermite2_real, laguerre, negbin_tail, negbin_weight, PolyIndex};
use fock_partition::states::nbs_normal_ordered_diag;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

fn q(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap()
}

fn int(n: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn f(x: &BigRational) -> f64 {
    x.to_f64().unwrap()
}

fn binom(n: usize, k: usize) -> BigRational {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    BigRational::from_integer(acc)
}

fn factorial(n: usize) -> BigRational {
    (1..=n).fold(BigRational::one(), |a, k| a * int(k))
}

fn pow(x: &BigRational, k: usize) -> BigRational {
    (0..k).fold(BigRational::one(), |a, _| a * x)
}

fn exact_laguerre(n: usize, x: &BigRational) -> BigRational {
    (0..=n).fold(BigRational::zero(), |acc, l| {
        let t = binom(n, l) * pow(x, l) / factorial(l);
        if l % 2 == 0 {
            acc + t
        } else {
            acc - t
        }
    })
}

fn exact_hermite(m: usize, n: usize, x: &BigRational, y: &BigRational) -> BigRational {
    (0..=m.min(n)).fold(BigRational::zero(), |acc, l| {
        let t = factorial(m) * factorial(n) / (factorial(l) * factorial(m - l) * factorial(n - l))
            * pow(x, m - l)
            * pow(y, n - l);
        if l % 2 == 0 {
            acc + t
        } else {
            acc - t
        }
    })
}

/// `x = num / den` with `den` a power of two.
fn dyadic(x: f64) -> (BigInt, BigInt) {
    let r = q(x);
    (r.numer().clone(), r.denom().clone())
}

fn ipow(x: &BigInt, k: usize) -> BigInt {
    num_traits::pow(x.clone(), k)
}

fn ibinom(n: usize, k: usize) -> BigInt {
    binom(n, k).to_integer()
}

/// Residual `1 − σ Σ_{n<T} C(n, l) σ^l (1−σ)^(n−l)` of the binomial partition.
fn exact_bs_residual(sigma: f64, terms: usize, level: usize) -> BigRational {
    let (p, d) = dyadic(sigma);
    let c = &d - &p;
    let mut sum = BigInt::zero();
    for n in level..terms {
        sum += ibinom(n, level) * ipow(&p, level + 1) * ipow(&c, n - level) * ipow(&d, terms - 1 - n);
    }
    let den = ipow(&d, terms);
    BigRational::new_raw(&den - sum, den)
}

/// Residual `1 − Σ_{s<T} C(m+s, m) γ^s (1−γ)^(m+1)` of the negative binomial partition.
fn exact_nbs_residual(gamma: f64, terms: usize, level: usize) -> BigRational {
    let (g, d) = dyadic(gamma);
    let c = ipow(&(&d - &g), level + 1);
    let mut sum = BigInt::zero();
    for s in 0..terms {
        sum += ibinom(level + s, level) * ipow(&g, s) * &c * ipow(&d, terms - 1 - s);
    }
    let den = ipow(&d, terms + level);
    BigRational::new_raw(&den - sum, den)
}

/// Mass of `C(m+s, m) γ^(s+1) (1−γ)^m` at levels `m >= dim`.
fn exact_negbin_tail(s: usize, gamma: f64, dim: usize) -> BigRational {
    let (g, d) = dyadic(gamma);
    let c = &d - &g;
    let head_num = ipow(&g, s + 1);
    let mut sum = BigInt::zero();
    for m in 0..dim {
        sum += ibinom(m + s, m) * ipow(&c, m) * ipow(&d, dim - 1 - m);
    }
    let den = ipow(&d, s + dim);
    BigRational::new_raw(&den - head_num * sum, den)
}

fn rel(a: f64, b: &BigRational) -> f64 {
    let b = f(b);
    if b == 0.0 {
        a.abs()
    } else {
        ((a - b) / b).abs()
    }
}

#[test]
fn laguerre_against_exact_sum() {
    let xs = [-50.0, -7.5, -1.25, 0.0, 0.5, 3.75, 12.5, 33.25, 50.0];
    for n in [0, 1, 2, 5, 10, 17, 24, 30] {
        for x in xs {
            let exact = exact_laguerre(n, &q(x));
            let got = laguerre(n, x).unwrap();
            let scale = f(&exact).abs().max(1.0);
            assert!((got - f(&exact)).abs() <= 1e-12 * scale, "L_{n}({x}) = {got}, exact {}", f(&exact));
        }
    }
}

#[test]
fn hermite_against_exact_sum() {
    let pts = [(-2.5, 1.5), (0.75, 0.75), (3.0, -0.125), (-1.0, -4.0), (1.0, 1.0)];
    for m in [0, 1, 3, 6, 10, 15] {
        for n in [0, 2, 5, 9, 15] {
            for (x, y) in pts {
                let exact = exact_hermite(m, n, &q(x), &q(y));
                let got = hermite2_real(PolyIndex::new(m, n).unwrap(), x, y).unwrap();
                let scale = f(&exact).abs().max(1.0);
                assert!((got - f(&exact)).abs() <= 1e-13 * scale, "H_{m},{n}({x},{y}) = {got}, exact {}", f(&exact));
            }
        }
    }
}

#[test]
fn negative_binomial_weights_and_tails() {
    for gamma in [0.2, 0.5, 0.8] {
        let g = q(gamma);
        let c = BigRational::one() - &g;
        for s in [0, 3, 10] {
            for d in [1, 10, 64, 200] {
                let exact = exact_negbin_tail(s, gamma, d);
                let got = negbin_tail(s, gamma, d).unwrap();
                assert!(rel(got, &exact) < 1e-12, "tail s={s} gamma={gamma} D={d}: {got} vs {}", f(&exact));
            }
            for m in 0..40 {
                let w = binom(m + s, m) * pow(&g, s + 1) * pow(&c, m);
                assert!(rel(negbin_weight(s, m, gamma).unwrap().value(), &w) < 1e-13);
                assert!(rel(nbs_normal_ordered_diag(s, gamma, m).unwrap(), &w) < 1e-11);
            }
        }
    }
}

#[test]
fn binomial_partition_residuals_are_exact_tails() {
    for sigma in [0.2, 0.5, 0.8] {
        for terms in [10, 30, 60, 200] {
            let levels = terms.min(20);
            let r = bs_partition(sigma, terms, levels).unwrap();
            for l in 0..levels {
                let exact = exact_bs_residual(sigma, terms, l);
                let got = r.per_level_residuals[l];
                assert!((got - f(&exact)).abs() < 1e-14, "sigma={sigma} T={terms} l={l}: {got} vs {}", f(&exact));
                if f(&exact) > 1e-300 {
                    assert!(rel(bs_tail(sigma, terms, l).unwrap(), &exact) < 1e-11);
                }
            }
        }
    }
}

#[test]
fn negative_binomial_partition_residuals_are_exact_tails() {
    for gamma in [0.2, 0.5, 0.8] {
        for terms in [1, 7, 30, 60, 200] {
            let r = nbs_partition(gamma, terms, 20).unwrap();
            for m in 0..20 {
                let exact = exact_nbs_residual(gamma, terms, m);
                let got = r.per_level_residuals[m];
                assert!((got - f(&exact)).abs() < 1e-14, "gamma={gamma} T={terms} m={m}: {got} vs {}", f(&exact));
                if f(&exact) > 1e-300 {
                    assert!(rel(nbs_tail(gamma, terms, m).unwrap(), &exact) < 1e-11);
                }
            }
        }
    }
}

#[test]
fn frozen_reference_values() {
    let cases: [(Family, usize, usize, f64); 8] = [
        (Family::Binomial { sigma: 0.2 }, 10, 0, 0.1073741824),
        (Family::Binomial { sigma: 0.5 }, 10, 0, 9.765625e-4),
        (Family::Binomial { sigma: 0.3 }, 25, 6, 0.3406549042793918),
        (Family::Binomial { sigma: 0.5 }, 60, 19, 0.0031088013296633353),
        (Family::Binomial { sigma: 0.2 }, 200, 19, 4.5033577283182094e-05),
        (Family::Negbinomial { gamma: 0.3 }, 7, 4, 0.0216191511),
        (Family::Negbinomial { gamma: 0.8 }, 200, 19, 3.7144140488238654e-06),
        (Family::Negbinomial { gamma: 0.5 }, 1, 0, 0.5),
    ];
    for (family, terms, level, want) in cases {
        let exact = match family {
            Family::Binomial { sigma } => exact_bs_residual(sigma, terms, level),
            Family::Negbinomial { gamma } => exact_nbs_residual(gamma, terms, level),
            Family::Number => unreachable!(),
        };
        assert!(rel(want, &exact) < 1e-9, "{family:?}: frozen {want} vs exact {}", f(&exact));
        let rows = partition_table(family, terms, level + 1).unwrap();
        let row = rows.iter().find(|r| r.level == level && r.terms_used == terms).unwrap();
        assert!((row.residual - want).abs() < 1e-13 + 1e-12 * want, "{family:?}: {} vs {want}", row.residual);
    }
    let max = nbs_partition(0.5, 60, 20).unwrap().max_residual;
    assert!((max - 2.097021204462051e-06).abs() < 1e-14);
    assert!(exact_nbs_residual(0.5, 60, 19).is_positive());
}
