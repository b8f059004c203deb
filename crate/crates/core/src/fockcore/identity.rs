//! Matrix-level checks of ordering identities between powers of `a` and `a†`.
//!
//! Every identity involving `a†` powers is compared only on a top-left block
//! that excludes the levels where truncated creation operators leak amplitude.

use super::matrix::{block_frobenius, creation_power_matrix, ladder_amplitude, ladder_power_matrix, FockCutoff, Operator};
use crate::error::{domain, Result};
use crate::specfun::{falling_factorial, PolyIndex};
use num_complex::Complex64;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Coefficient `m! n! (−1)^l / (l! (m−l)! (n−l)!)` of `x^{m−l} y^{n−l}` in `H_{m,n}`.
fn hermite_coefficient(m: usize, n: usize, l: usize) -> f64 {
    let sign = if l.is_multiple_of(2) { 1.0 } else { -1.0 };
    // C(m, l) C(n, l) l! = m!/(m−l)! · n!/(n−l)! / l!
    let mut inv_lfact = 1.0;
    for k in 1..=l {
        inv_lfact /= k as f64;
    }
    sign * falling_factorial(m, l) * falling_factorial(n, l) * inv_lfact
}

/// Relative Frobenius gap on a block: `‖A − B‖ / max(1, ‖A‖)`.
fn block_gap(a: &Operator, b: &Operator, block: usize) -> f64 {
    block_frobenius(&(a - b), block) / block_frobenius(a, block).max(1.0)
}

/// Compares `a^n a†^m` with `(−i)^{m+n} :H_{m,n}(i a†, i a):`, expanded as
/// `Σ_l h_l (−i)^{m+n} i^{m+n−2l} a†^{m−l} a^{n−l}`.
///
/// Requires `2 (m + n) < D`; the comparison block is the top-left
/// `D − m − n` levels. The gap is relative to the Frobenius norm of the
/// product on that block.
pub fn operator_identity_matrix_residual(idx: PolyIndex, cutoff: FockCutoff) -> Result<f64> {
    let (m, n) = (idx.m, idx.n);
    let d = cutoff.dim();
    if 2 * (m + n) >= d {
        return domain(format!(
            "cutoff {d} too small for a^{n} a†^{m}: need more than {} levels",
            2 * (m + n)
        ));
    }
    let lhs = ladder_power_matrix(n, cutoff)? * creation_power_matrix(m, cutoff)?;

    let phase = (-I).powu((m + n) as u32);
    let mut rhs = Operator::zeros(d, d);
    for l in 0..=m.min(n) {
        let coef = phase * I.powu((m + n - 2 * l) as u32) * hermite_coefficient(m, n, l);
        let term = creation_power_matrix(m - l, cutoff)? * ladder_power_matrix(n - l, cutoff)?;
        rhs += term * coef;
    }
    Ok(block_gap(&lhs, &rhs, d - m - n))
}

/// Outcome of the shifted anti-normal comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockResidual {
    pub residual: f64,
    /// Leading levels on which the truncated series had converged.
    pub block: usize,
    pub terms_used: usize,
}

const SERIES_SETTLE: f64 = 1e-15;

/// Compares the series `Σ_l λ^l/l! a^{l+n} a†^{l+m}` built from truncated
/// matrices with the closed normally ordered form
/// `(−i)^{m+n} (1−λ)^{−(m+n)/2−1} :e^{λ a†a/(1−λ)} H_{m,n}(i a†/√(1−λ), i a/√(1−λ)):`.
///
/// The series term `l` touches level `k + m + l` from column `k`, so
/// columns near the cutoff lose their tail. The comparison block is the
/// set of leading levels whose diagonal series settled below the cutoff.
pub fn shifted_antinormal_matrix_residual(idx: PolyIndex, lam: f64, cutoff: FockCutoff) -> Result<BlockResidual> {
    let (m, n) = (idx.m, idx.n);
    if m > 4 || n > 4 {
        return domain(format!("shifted anti-normal check supports indices up to 4, got ({m}, {n})"));
    }
    if !(lam.abs() < 1.0) {
        return domain(format!("shifted anti-normal series needs |lambda| < 1, got {lam}"));
    }
    let d = cutoff.dim();
    if 2 * (m + n) >= d {
        return domain(format!("cutoff {d} too small for indices ({m}, {n})"));
    }

    // Series side: A_0 = a^n a†^m, A_l = a A_{l-1} a† (truncated), with the
    // running scalar λ^l / l!.
    let mut term = ladder_power_matrix(n, cutoff)? * creation_power_matrix(m, cutoff)?;
    let mut lhs = term.clone();
    let mut scalar = 1.0;
    let mut terms_used = 1;
    // Columns without a band entry are structurally zero on both sides.
    let mut settled: Vec<bool> = (0..d)
        .map(|k| (k + m).checked_sub(n).is_none_or(|j| j >= d))
        .collect();
    let mut exhausted = false;
    for l in 1..d {
        scalar *= lam / l as f64;
        if scalar == 0.0 {
            exhausted = true;
            break;
        }
        let mut next = Operator::zeros(d, d);
        for j in 0..d - 1 {
            for k in 0..d - 1 {
                let v = term[(j + 1, k + 1)];
                if v != Complex64::new(0.0, 0.0) {
                    next[(j, k)] = v * (((j + 1) * (k + 1)) as f64).sqrt();
                }
            }
        }
        term = next;
        let mut any = false;
        for k in 0..d {
            let Some(j) = (k + m).checked_sub(n).filter(|&j| j < d) else { continue };
            let t = term[(j, k)] * scalar;
            if t.norm() == 0.0 {
                continue;
            }
            any = true;
            lhs[(j, k)] += t;
            if t.norm() < SERIES_SETTLE * lhs[(j, k)].norm() {
                settled[k] = true;
            }
        }
        if !any {
            break;
        }
        terms_used += 1;
    }
    if exhausted || lam == 0.0 {
        settled.iter_mut().take(d - m).for_each(|s| *s = true);
    }

    let settled_block = settled.iter().take_while(|&&ok| ok).count();
    let block = settled_block.min(d - m - n);
    if block == 0 {
        return domain(format!("cutoff {d} too small for the series at lambda = {lam} to settle"));
    }

    let rhs = closed_normal_form(m, n, lam, d);
    Ok(BlockResidual {
        residual: block_gap(&lhs, &rhs, block),
        block,
        terms_used,
    })
}

/// Matrix of the closed normally ordered form, entry by entry:
/// `:a†^p e^{μ a†a} a^q: = Σ_k μ^k/k! a†^{p+k} a^{q+k}`.
fn closed_normal_form(m: usize, n: usize, lam: f64, d: usize) -> Operator {
    let mu = lam / (1.0 - lam);
    let scale = 1.0 / (1.0 - lam).sqrt();
    let phase = (-I).powu((m + n) as u32);
    let pre = (1.0 - lam).powf(-((m + n) as f64) / 2.0 - 1.0);
    let mut out = Operator::zeros(d, d);
    for l in 0..=m.min(n) {
        let (p, q) = (m - l, n - l);
        let x_pow = (I * scale).powu(p as u32);
        let y_pow = (I * scale).powu(q as u32);
        let coef = phase * pre * hermite_coefficient(m, n, l) * x_pow * y_pow;
        for k in q..d {
            let j = k - q + p;
            if j >= d {
                break;
            }
            // <j| a†^{p+r} a^{q+r} |k> summed against μ^r / r!.
            let mut acc = 0.0;
            let mut w = 1.0;
            for r in 0..=(k - q) {
                if r > 0 {
                    w *= mu / r as f64;
                }
                acc += w * ladder_amplitude(k, q + r) * ladder_amplitude(j, p + r);
            }
            out[(j, k)] += coef * acc;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(m: usize, n: usize) -> PolyIndex {
        PolyIndex::new(m, n).unwrap()
    }

    #[test]
    fn identity_trivial_and_commutator() {
        let c = FockCutoff::new(16).unwrap();
        assert_eq!(operator_identity_matrix_residual(idx(0, 0), c).unwrap(), 0.0);
        assert!(operator_identity_matrix_residual(idx(1, 1), c).unwrap() <= 1e-12);
    }

    #[test]
    fn identity_brute_force_product() {
        let c = FockCutoff::new(64).unwrap();
        assert!(operator_identity_matrix_residual(idx(2, 3), c).unwrap() <= 1e-10);
        assert!(operator_identity_matrix_residual(idx(4, 4), FockCutoff::new(16).unwrap()).is_err());
    }

    #[test]
    fn identity_detects_wrong_phase() {
        // Dropping the i^{m+n−2l} factors breaks the match for m = n = 1.
        let c = FockCutoff::new(12).unwrap();
        let lhs = ladder_power_matrix(1, c).unwrap() * creation_power_matrix(1, c).unwrap();
        let wrong = creation_power_matrix(1, c).unwrap() * ladder_power_matrix(1, c).unwrap()
            - Operator::identity(12, 12);
        assert!(block_gap(&lhs, &wrong, 10) > 0.1);
    }

    #[test]
    fn shifted_examples() {
        let c = FockCutoff::new(128).unwrap();
        let r = shifted_antinormal_matrix_residual(idx(0, 0), 0.0, c).unwrap();
        assert_eq!(r.residual, 0.0);
        let r = shifted_antinormal_matrix_residual(idx(0, 0), 0.5, c).unwrap();
        assert!(r.residual <= 1e-8, "{r:?}");
        assert!(r.block > 10);
        let r = shifted_antinormal_matrix_residual(idx(1, 1), 0.3, c).unwrap();
        assert!(r.residual <= 1e-8, "{r:?}");
        assert!(shifted_antinormal_matrix_residual(idx(1, 1), 1.0, c).is_err());
    }
}
