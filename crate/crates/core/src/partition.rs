//! Truncated partitions of unity by binomial and negative binomial states,
//! with per-level residuals and their closed-form tails.

use crate::error::{check_open_unit, domain, Result};
use crate::fockcore::{antinormal_diag_eval, FockCutoff, Operator, OrderedSeries, Ordering};
use crate::specfun::{binom_weight, cauchy_sums, ln_binomial, negbin_tail, negbin_weight, scaled_residual};
use crate::states::{nbs_normal_ordered_diag_with_exponent, NBS_NORMAL_EXPONENT_SIGN};
use serde::Serialize;

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_LEVELS: usize = 20;
pub const DEFAULT_TERMS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Family {
    Binomial { sigma: f64 },
    Negbinomial { gamma: f64 },
    Number,
}

/// Residual `|1 − partial sum|` at each retained level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionReport {
    #[serde(flatten)]
    pub family: Family,
    pub terms_used: usize,
    pub partial_sums: Vec<f64>,
    pub per_level_residuals: Vec<f64>,
    pub max_residual: f64,
    pub tol: f64,
    pub converged: bool,
}

impl PartitionReport {
    fn from_partials(family: Family, terms_used: usize, partial_sums: Vec<f64>) -> Self {
        let per_level_residuals: Vec<f64> = partial_sums.iter().map(|p| (1.0 - p).abs()).collect();
        let max_residual = per_level_residuals.iter().cloned().fold(0.0, f64::max);
        PartitionReport {
            family,
            terms_used,
            partial_sums,
            per_level_residuals,
            max_residual,
            tol: DEFAULT_TOL,
            converged: max_residual < DEFAULT_TOL,
        }
    }

    /// Same report judged against another tolerance.
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self.converged = self.max_residual < tol;
        self
    }
}

fn check_counts(terms: usize, levels: usize) -> Result<()> {
    if terms == 0 {
        return domain("at least one term is required");
    }
    if levels == 0 {
        return domain("at least one level is required");
    }
    Ok(())
}

/// `σ C(n, l) σ^l (1 − σ)^(n − l)`, the level-`l` weight of `σ ρ_n(σ)`.
fn bs_term(sigma: f64, n: usize, l: usize) -> Result<f64> {
    if l > n {
        return Ok(0.0);
    }
    let w = binom_weight(n, l, sigma)?;
    Ok((w.log_magnitude + sigma.ln()).exp())
}

/// `((1 − γ)/γ) C(m + s, m) γ^(s+1) (1 − γ)^m`.
fn nbs_direct_term(gamma: f64, s: usize, m: usize) -> Result<f64> {
    let w = negbin_weight(s, m, gamma)?;
    Ok((w.log_magnitude + ((1.0 - gamma) / gamma).ln()).exp())
}

/// `σ Σ_{n < terms} ρ_n(σ)` on levels `0..levels`.
pub fn bs_partition(sigma: f64, terms: usize, levels: usize) -> Result<PartitionReport> {
    check_open_unit("sigma", sigma)?;
    check_counts(terms, levels)?;
    if terms < levels {
        return domain(format!(
            "binomial partition needs terms >= levels ({terms} < {levels}): levels at or above the term count have no support"
        ));
    }
    let mut partials = vec![0.0; levels];
    for (l, p) in partials.iter_mut().enumerate() {
        for n in l..terms {
            *p += bs_term(sigma, n, l)?;
        }
    }
    Ok(PartitionReport::from_partials(Family::Binomial { sigma }, terms, partials))
}

/// Analytic remainder `Σ_{n >= terms} C(n, l) σ^(l+1) (1 − σ)^(n − l)`.
pub fn bs_tail(sigma: f64, terms: usize, level: usize) -> Result<f64> {
    check_open_unit("sigma", sigma)?;
    // Reindexed as a negative-binomial tail of order l in m = n − l.
    negbin_tail(level, sigma, terms.saturating_sub(level))
}

/// How each negative-binomial diagonal is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NbsRoute {
    /// The pmf `C(m + s, m) γ^(s+1) (1 − γ)^m`.
    Direct,
    /// `a^s ρ_c a†^s / (s! n_c^s)` with `ρ_c` read off its anti-normal form.
    Antinormal,
    /// Laguerre-weighted normally ordered form.
    NormalOrdered,
}

/// Scaled sums `((1 − γ)/γ) Σ_{s < terms} <m|ρ_s(γ)|m>` for `m < levels`.
pub fn nbs_partial_sums(route: NbsRoute, gamma: f64, terms: usize, levels: usize) -> Result<Vec<f64>> {
    nbs_partial_sums_inner(route, gamma, terms, levels, NBS_NORMAL_EXPONENT_SIGN)
}

pub(crate) fn nbs_partial_sums_inner(
    route: NbsRoute,
    gamma: f64,
    terms: usize,
    levels: usize,
    exponent_sign: f64,
) -> Result<Vec<f64>> {
    check_open_unit("gamma", gamma)?;
    check_counts(terms, levels)?;
    let nc = (1.0 - gamma) / gamma;
    let mut out = vec![0.0; levels];
    match route {
        NbsRoute::Direct => {
            for (m, acc) in out.iter_mut().enumerate() {
                for s in 0..terms {
                    *acc += nbs_direct_term(gamma, s, m)?;
                }
            }
        }
        NbsRoute::NormalOrdered => {
            for (m, acc) in out.iter_mut().enumerate() {
                for s in 0..terms {
                    *acc += nc * nbs_normal_ordered_diag_with_exponent(s, gamma, m, exponent_sign * gamma)?;
                }
            }
        }
        NbsRoute::Antinormal => {
            let thermal = thermal_antinormal_diagonal(gamma, levels + terms)?;
            let ln_nc = nc.ln();
            for (m, acc) in out.iter_mut().enumerate() {
                for s in 0..terms {
                    let p = thermal[m + s];
                    if p > 0.0 {
                        // (1/(s! n_c^s)) · p_c[m+s] (m+s)!/m!, times n_c.
                        *acc += (p.ln() + ln_binomial(m + s, s) - (s as f64 - 1.0) * ln_nc).exp();
                    }
                }
            }
        }
    }
    Ok(out)
}

/// `<m|ρ_c|m>` from `ρ_c = (1/n_c) ⋮e^{γ/(γ−1) a a†}⋮`.
pub fn thermal_antinormal_diagonal(gamma: f64, levels: usize) -> Result<Vec<f64>> {
    check_open_unit("gamma", gamma)?;
    let nc = (1.0 - gamma) / gamma;
    let series = OrderedSeries::exp(Ordering::Antinormal, gamma / (gamma - 1.0));
    (0..levels)
        .map(|m| antinormal_diag_eval(&series, m).map(|v| v / nc))
        .collect()
}

/// `((1 − γ)/γ) Σ_{s < terms} ρ_s(γ)` from the pmf.
pub fn nbs_partition(gamma: f64, terms: usize, levels: usize) -> Result<PartitionReport> {
    let partials = nbs_partial_sums(NbsRoute::Direct, gamma, terms, levels)?;
    Ok(PartitionReport::from_partials(Family::Negbinomial { gamma }, terms, partials))
}

/// Analytic remainder of the negative-binomial partition at level `m`:
/// `Σ_{s >= terms} C(m + s, s) γ^s (1 − γ)^(m+1)`.
pub fn nbs_tail(gamma: f64, terms: usize, level: usize) -> Result<f64> {
    check_open_unit("gamma", gamma)?;
    negbin_tail(level, 1.0 - gamma, terms)
}

/// `max_m |Σ_{s < terms} <m|ρ_s|m> − γ/(1 − γ)|` with each diagonal taken
/// from the anti-normal form.
pub fn nbs_antinormal_resummation(gamma: f64, terms: usize, levels: usize) -> Result<f64> {
    let sums = nbs_partial_sums(NbsRoute::Antinormal, gamma, terms, levels)?;
    let nc = (1.0 - gamma) / gamma;
    Ok(sums.iter().map(|p| (p / nc - 1.0 / nc).abs()).fold(0.0, f64::max))
}

/// `max_m |1 − partial sum|` with each diagonal from the normally ordered form.
pub fn nbs_partition_normal_route(gamma: f64, terms: usize, levels: usize) -> Result<f64> {
    let sums = nbs_partial_sums(NbsRoute::NormalOrdered, gamma, terms, levels)?;
    Ok(sums.iter().map(|p| (1.0 - p).abs()).fold(0.0, f64::max))
}

/// Largest pairwise gap between the three routes' partial sums.
pub fn nbs_route_agreement(gamma: f64, terms: usize, levels: usize) -> Result<f64> {
    route_agreement_inner(gamma, terms, levels, NBS_NORMAL_EXPONENT_SIGN)
}

pub(crate) fn route_agreement_inner(gamma: f64, terms: usize, levels: usize, sign: f64) -> Result<f64> {
    let d = nbs_partial_sums_inner(NbsRoute::Direct, gamma, terms, levels, sign)?;
    let a = nbs_partial_sums_inner(NbsRoute::Antinormal, gamma, terms, levels, sign)?;
    let n = nbs_partial_sums_inner(NbsRoute::NormalOrdered, gamma, terms, levels, sign)?;
    let mut worst: f64 = 0.0;
    for i in 0..levels {
        worst = worst.max((d[i] - a[i]).abs()).max((d[i] - n[i]).abs()).max((a[i] - n[i]).abs());
    }
    Ok(worst)
}

/// The negative-binomial partition is the binomial one with the double sum
/// reordered. At level `m`, `terms` negative-binomial terms collect exactly
/// the binomial terms `n < terms + m` at `σ = 1 − γ`. Returns the largest gap
/// between the two orders, including the rectangle/triangle totals of the
/// full truncated array.
pub fn rearrangement_residual(gamma: f64, terms: usize, levels: usize) -> Result<f64> {
    check_open_unit("gamma", gamma)?;
    check_counts(terms, levels)?;
    let sigma = 1.0 - gamma;
    let nbs = nbs_partial_sums(NbsRoute::Direct, gamma, terms, levels)?;
    let mut worst: f64 = 0.0;
    let mut rect_total = 0.0;
    for (m, v) in nbs.iter().enumerate() {
        let mut bs = 0.0;
        for n in m..terms + m {
            bs += bs_term(sigma, n, m)?;
        }
        worst = worst.max(scaled_residual(*v, bs));
        rect_total += v;
    }
    // Triangle order over the same array, walked by n = s + m through the
    // Cauchy product of the per-level rows with a unit sequence.
    let mut tri_total = 0.0;
    for m in 0..levels {
        let row: Vec<f64> = (0..terms).map(|s| nbs_direct_term(gamma, s, m)).collect::<Result<_>>()?;
        tri_total += cauchy_sums(&row, &[1.0]).0;
    }
    Ok(worst.max(scaled_residual(tri_total, rect_total)))
}

/// `|Σ_{m < levels} |m><m| − 1|` on the retained block, plus the largest
/// entry outside it.
pub fn number_completeness(levels: usize, cutoff: FockCutoff) -> Result<f64> {
    let d = cutoff.dim();
    if levels == 0 || levels > d {
        return domain(format!("levels must lie in 1..={d}, got {levels}"));
    }
    let mut sum = Operator::zeros(d, d);
    for m in 0..levels {
        let mut p = Operator::zeros(d, d);
        p[(m, m)] = 1.0.into();
        sum += p;
    }
    let mut worst: f64 = 0.0;
    for j in 0..d {
        for k in 0..d {
            let target = if j == k && j < levels { 1.0 } else { 0.0 };
            worst = worst.max((sum[(j, k)] - target).norm());
        }
    }
    Ok(worst)
}

/// One line of a convergence table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TableRow {
    pub terms_used: usize,
    pub level: usize,
    pub partial_sum: f64,
    pub residual: f64,
}

/// Partial sums and residuals after every truncation `1..=terms`.
pub fn partition_table(family: Family, terms: usize, levels: usize) -> Result<Vec<TableRow>> {
    check_counts(terms, levels)?;
    let term: Box<dyn Fn(usize, usize) -> Result<f64>> = match family {
        Family::Binomial { sigma } => {
            check_open_unit("sigma", sigma)?;
            if terms < levels {
                return domain(format!("binomial partition needs terms >= levels ({terms} < {levels})"));
            }
            Box::new(move |n, l| bs_term(sigma, n, l))
        }
        Family::Negbinomial { gamma } => {
            check_open_unit("gamma", gamma)?;
            Box::new(move |s, m| nbs_direct_term(gamma, s, m))
        }
        Family::Number => Box::new(|n, l| Ok(if n == l { 1.0 } else { 0.0 })),
    };
    let mut partial = vec![0.0; levels];
    let mut rows = Vec::with_capacity(terms * levels);
    for t in 0..terms {
        for (l, p) in partial.iter_mut().enumerate() {
            *p += term(t, l)?;
            rows.push(TableRow {
                terms_used: t + 1,
                level: l,
                partial_sum: *p,
                residual: (1.0 - *p).abs(),
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bs_geometric_tail_at_vacuum() {
        let r = bs_partition(0.5, 10, 1).unwrap();
        assert!((r.per_level_residuals[0] - 2f64.powi(-10)).abs() <= 1e-15);
        assert!((bs_tail(0.5, 10, 0).unwrap() - 2f64.powi(-10)).abs() < 1e-18);
        assert!(bs_partition(0.5, 5, 10).is_err());
        assert!(bs_partition(1.0, 5, 1).is_err());
    }

    #[test]
    fn bs_residual_matches_tail() {
        for &sigma in &[0.2, 0.5, 0.8] {
            let r = bs_partition(sigma, 60, 20).unwrap();
            for (l, res) in r.per_level_residuals.iter().enumerate() {
                let tail = bs_tail(sigma, 60, l).unwrap();
                assert!((res - tail).abs() < 1e-12, "sigma={sigma} l={l}");
            }
        }
        // 60 terms leave a tail of 3.1e-3 at level 19 for σ = 0.5.
        let r = bs_partition(0.5, 60, 20).unwrap();
        assert!((r.max_residual - bs_tail(0.5, 60, 19).unwrap()).abs() < 1e-12);
        assert!(r.max_residual > 3e-3 && !r.converged);
        assert!(bs_partition(0.5, 400, 20).unwrap().max_residual < 1e-10);
    }

    #[test]
    fn nbs_single_term() {
        let r = nbs_partition(0.5, 1, 1).unwrap();
        assert_eq!(r.partial_sums[0], 0.5);
        assert_eq!(r.per_level_residuals[0], 0.5);
    }

    #[test]
    fn nbs_residual_matches_tail() {
        for &gamma in &[0.2, 0.5, 0.8] {
            let r = nbs_partition(gamma, 60, 20).unwrap();
            for (m, res) in r.per_level_residuals.iter().enumerate() {
                assert!((res - nbs_tail(gamma, 60, m).unwrap()).abs() < 1e-12);
            }
        }
        assert!(nbs_partition(0.5, 120, 20).unwrap().max_residual < 1e-10);
    }

    #[test]
    fn antinormal_resummation_approaches_constant() {
        let r = nbs_antinormal_resummation(0.5, 200, 1).unwrap();
        assert!(r < 1e-12);
        let thermal = thermal_antinormal_diagonal(0.3, 10).unwrap();
        for (m, p) in thermal.iter().enumerate() {
            assert!((p - 0.3 * 0.7f64.powi(m as i32)).abs() < 1e-15);
        }
        let one = nbs_partial_sums(NbsRoute::Antinormal, 0.3, 1, 10).unwrap();
        for (m, p) in one.iter().enumerate() {
            assert!((p - 0.7 / 0.3 * thermal[m]).abs() < 1e-14);
        }
    }

    #[test]
    fn routes_agree() {
        assert!(nbs_route_agreement(0.5, 40, 10).unwrap() <= 1e-10);
        for &g in &[0.2, 0.8] {
            assert!(nbs_route_agreement(g, 60, 20).unwrap() <= 1e-10);
        }
        let direct = nbs_partition(0.5, 40, 10).unwrap().max_residual;
        let normal = nbs_partition_normal_route(0.5, 40, 10).unwrap();
        assert!((direct - normal).abs() < 1e-10);
        assert!(route_agreement_inner(0.5, 10, 5, 1.0).unwrap() > 1.0);
    }

    #[test]
    fn rearrangement() {
        assert!(rearrangement_residual(0.5, 50, 15).unwrap() < 1e-12);
        assert!(rearrangement_residual(0.8, 30, 10).unwrap() < 1e-12);
    }

    #[test]
    fn number_completeness_examples() {
        let c = FockCutoff::new(16).unwrap();
        assert_eq!(number_completeness(1, c).unwrap(), 0.0);
        assert_eq!(number_completeness(16, c).unwrap(), 0.0);
        assert!(number_completeness(17, c).is_err());
    }

    #[test]
    fn table_rows() {
        let rows = partition_table(Family::Binomial { sigma: 0.5 }, 10, 1).unwrap();
        assert_eq!(rows.len(), 10);
        let last = rows.last().unwrap();
        assert_eq!(last.terms_used, 10);
        assert!((last.residual - 9.765_625e-4).abs() < 1e-15);
        let rows = partition_table(Family::Negbinomial { gamma: 0.5 }, 3, 2).unwrap();
        assert_eq!(rows.len(), 6);
        assert_eq!((rows[5].terms_used, rows[5].level), (3, 1));
    }
}
