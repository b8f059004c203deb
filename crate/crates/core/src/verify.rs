//! Identity suites run over the parameter grids in `config/verify_grids.toml`.

use crate::channels::{
    channel_fixed_point_check, damp_diagonal, damp_matrix, random_test_states, ChannelSpec, GENERATOR_SEED,
};
use crate::error::{domain, Result};
use crate::fockcore::{
    antinormal_diag_eval, antinormal_diag_moment, antinormal_diag_termwise, block_frobenius,
    coherent_completeness_residual, creation_power_matrix, gaussian_integral_check, ladder_power_matrix,
    normal_diag_eval, operator_identity_matrix_residual, ordered_exp_conversion_residual,
    shifted_antinormal_matrix_residual, DensityMatrix, FockCutoff, Operator, OrderedSeries, Ordering,
};
use crate::partition::{
    bs_partition, bs_tail, nbs_partial_sums_inner, nbs_partition, nbs_tail, number_completeness,
    rearrangement_residual, route_agreement_inner, NbsRoute,
};
use crate::specfun::{
    binom_weight, cauchy_sums, gen_negbin_laguerre, gen_negbin_laguerre_residual, hermite2_real,
    hermite_laguerre_link_residual, laguerre_genfun_residual, negbin_tail, negbin_weight, scaled_residual,
    shifted_hermite_genfun_residual, PolyIndex,
};
use crate::states::{
    binomial_state, nbs_normal_ordered_diag_with_exponent, negbinomial_state, number_state, photon_subtract,
    thermal_state, NBS_NORMAL_EXPONENT_SIGN,
};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

/// Grid file shipped with the crate.
pub const DEFAULT_GRIDS: &str = include_str!("../config/verify_grids.toml");
/// Run tolerance when neither the command line nor the environment sets one.
pub const DEFAULT_RUN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Specfun,
    Ordering,
    Partition,
    Channel,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Specfun, Suite::Ordering, Suite::Partition, Suite::Channel];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Specfun => "specfun",
            Suite::Ordering => "ordering",
            Suite::Partition => "partition",
            Suite::Channel => "channel",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| crate::Error::Domain(format!("unknown suite '{s}'")))
    }
}

/// Deliberate corruption used to confirm that the suites can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Flip the exponent of the normally ordered negative binomial state to `+γ`.
    NbsNormalExponent,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub tol: f64,
    pub fault: Option<Fault>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            tol: DEFAULT_RUN_TOL,
            fault: None,
        }
    }
}

impl VerifyOptions {
    fn nbs_sign(&self) -> f64 {
        match self.fault {
            Some(Fault::NbsNormalExponent) => -NBS_NORMAL_EXPONENT_SIGN,
            None => NBS_NORMAL_EXPONENT_SIGN,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct CheckSpec {
    pub suite: Suite,
    pub identity: String,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(flatten)]
    pub params: BTreeMap<String, Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct GridFile {
    pub version: u32,
    #[serde(rename = "check")]
    pub checks: Vec<CheckSpec>,
}

impl GridFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| crate::Error::Domain(format!("invalid grid file: {e}")))
    }

    pub fn builtin() -> Self {
        GridFile::parse(DEFAULT_GRIDS).expect("shipped grid file parses")
    }
}

/// One evaluated grid point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRow {
    pub suite: Suite,
    pub identity: String,
    pub params: String,
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Cartesian product of the list-valued parameters, in key order.
fn expand(params: &BTreeMap<String, Vec<f64>>) -> Vec<BTreeMap<String, f64>> {
    let mut points = vec![BTreeMap::new()];
    for (k, values) in params {
        let mut next = Vec::with_capacity(points.len() * values.len());
        for p in &points {
            for v in values {
                let mut q = p.clone();
                q.insert(k.clone(), *v);
                next.push(q);
            }
        }
        points = next;
    }
    points
}

fn describe(point: &BTreeMap<String, f64>) -> String {
    point
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Runs every check of the given suites, in file order.
pub fn run(grids: &GridFile, suites: &[Suite], opts: &VerifyOptions) -> Vec<CheckRow> {
    let mut rows = Vec::new();
    for check in grids.checks.iter().filter(|c| suites.contains(&c.suite)) {
        let tol = check.tol.unwrap_or(opts.tol);
        for point in expand(&check.params) {
            let (residual, error) = match evaluate(&check.identity, &Params(&point), opts) {
                Ok(r) => (r, None),
                Err(e) => (f64::NAN, Some(e.to_string())),
            };
            rows.push(CheckRow {
                suite: check.suite,
                identity: check.identity.clone(),
                params: describe(&point),
                residual,
                tol,
                pass: residual.is_finite() && residual <= tol,
                error,
            });
        }
    }
    rows
}

struct Params<'a>(&'a BTreeMap<String, f64>);

impl Params<'_> {
    fn f(&self, k: &str) -> Result<f64> {
        self.0
            .get(k)
            .copied()
            .ok_or_else(|| crate::Error::Domain(format!("missing parameter '{k}'")))
    }

    fn u(&self, k: &str) -> Result<usize> {
        let v = self.f(k)?;
        if v < 0.0 || v.fract() != 0.0 || v > 1e9 {
            return domain(format!("parameter '{k}' must be a nonnegative integer, got {v}"));
        }
        Ok(v as usize)
    }

    fn cutoff(&self) -> Result<FockCutoff> {
        FockCutoff::new(self.u("cutoff")?)
    }

    fn idx(&self) -> Result<PolyIndex> {
        PolyIndex::new(self.u("m")?, self.u("n")?)
    }
}

fn max_of(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter().fold(0.0, f64::max)
}

fn coherent_amplitudes(alpha: Complex64, d: usize) -> Vec<Complex64> {
    let mut c = Complex64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    (0..d)
        .map(|j| {
            if j > 0 {
                c *= alpha / (j as f64).sqrt();
            }
            c
        })
        .collect()
}

fn evaluate(identity: &str, p: &Params, opts: &VerifyOptions) -> Result<f64> {
    match identity {
        // specfun
        "laguerre_genfun" => laguerre_genfun_residual(p.f("z")?, p.f("x")?, p.u("terms")?),
        "hermite_laguerre_link" => hermite_laguerre_link_residual(p.u("n")?, p.f("x")?, p.f("y")?),
        "hermite_symmetry" => {
            let idx = p.idx()?;
            let (x, y) = (p.f("x")?, p.f("y")?);
            Ok(scaled_residual(hermite2_real(idx, x, y)?, hermite2_real(idx.swapped(), y, x)?))
        }
        "shifted_hermite_genfun" => {
            shifted_hermite_genfun_residual(p.idx()?, p.f("lam")?, p.f("x")?, p.f("y")?, p.u("terms")?)
        }
        "gen_negbin_laguerre" => gen_negbin_laguerre_residual(p.u("n")?, p.f("lam")?, p.f("z")?, p.u("terms")?),
        "gen_negbin_degenerate" => {
            let (n, lam) = (p.u("n")?, p.f("lam")?);
            let c = gen_negbin_laguerre(n, lam, 0.0, p.u("terms")?)?;
            Ok((c.series - (1.0 + lam).powi(-(n as i32) - 1)).abs())
        }
        "cauchy_rearrange" => {
            let len = p.u("len")?;
            let (ra, rb) = (p.f("ratio_a")?, p.f("ratio_b")?);
            let a: Vec<f64> = (0..len).map(|k| ra.powi(k as i32)).collect();
            let b: Vec<f64> = (0..len).map(|k| rb.powi(k as i32)).collect();
            let (t, r) = cauchy_sums(&a, &b);
            Ok(scaled_residual(t, r))
        }
        "binomial_normalization" => {
            let (n, sigma) = (p.u("n")?, p.f("sigma")?);
            let total: f64 = (0..=n).map(|l| binom_weight(n, l, sigma).map(|w| w.value())).sum::<Result<f64>>()?;
            Ok((total - 1.0).abs())
        }
        "negbin_normalization" => {
            let (s, gamma, d) = (p.u("s")?, p.f("gamma")?, p.u("cutoff")?);
            let head: f64 = (0..d).map(|m| negbin_weight(s, m, gamma).map(|w| w.value())).sum::<Result<f64>>()?;
            Ok((head + negbin_tail(s, gamma, d)? - 1.0).abs())
        }

        // ordering
        "normal_exp" => {
            let lam = p.f("lam")?;
            let s = OrderedSeries::exp(Ordering::Normal, lam);
            let vals = (0..p.u("levels")?)
                .map(|m| normal_diag_eval(&s, m).map(|v| scaled_residual(v, (1.0 + lam).powi(m as i32))))
                .collect::<Result<Vec<_>>>()?;
            Ok(max_of(vals))
        }
        "antinormal_exp" => {
            let lam = p.f("lam")?;
            let s = OrderedSeries::exp(Ordering::Antinormal, lam);
            let vals = (0..p.u("levels")?)
                .map(|m| antinormal_diag_eval(&s, m).map(|v| scaled_residual(v, (1.0 - lam).powi(-(m as i32) - 1))))
                .collect::<Result<Vec<_>>>()?;
            Ok(max_of(vals))
        }
        "vacuum_projector" => {
            let s = OrderedSeries::exp(Ordering::Normal, -1.0);
            let vals = (0..p.u("levels")?)
                .map(|m| normal_diag_eval(&s, m).map(|v| (v - if m == 0 { 1.0 } else { 0.0 }).abs()))
                .collect::<Result<Vec<_>>>()?;
            Ok(max_of(vals))
        }
        "ordered_exp_conversion" => ordered_exp_conversion_residual(p.f("lam")?, p.u("levels")?),
        "termwise_moment_agreement" => {
            let s = OrderedSeries::exp(Ordering::Antinormal, p.f("lam")?);
            let vals = (0..p.u("levels")?)
                .map(|m| Ok(scaled_residual(antinormal_diag_termwise(&s, m)?, antinormal_diag_moment(&s, m)?)))
                .collect::<Result<Vec<_>>>()?;
            Ok(max_of(vals))
        }
        "ladder_commutator" => {
            let c = p.cutoff()?;
            let d = c.dim();
            let a = ladder_power_matrix(1, c)?;
            let ad = creation_power_matrix(1, c)?;
            let comm = &a * &ad - &ad * &a - Operator::identity(d, d);
            Ok(block_frobenius(&comm, d - 2))
        }
        "operator_identity" => operator_identity_matrix_residual(p.idx()?, p.cutoff()?),
        "shifted_antinormal" => shifted_antinormal_matrix_residual(p.idx()?, p.f("lam")?, p.cutoff()?).map(|r| r.residual),
        "gaussian_integral" => {
            gaussian_integral_check(p.idx()?, Complex64::new(p.f("alpha_re")?, p.f("alpha_im")?))
        }
        "coherent_completeness" => coherent_completeness_residual(p.u("levels")?),

        // partition
        "bs_partition" => bs_partition(p.f("sigma")?, p.u("terms")?, p.u("levels")?).map(|r| r.max_residual),
        "bs_geometric_tail" => {
            let (sigma, terms) = (p.f("sigma")?, p.u("terms")?);
            let r = bs_partition(sigma, terms, 1)?;
            Ok((r.per_level_residuals[0] - (1.0 - sigma).powi(terms as i32)).abs())
        }
        "bs_tail_agreement" => {
            let (sigma, terms) = (p.f("sigma")?, p.u("terms")?);
            let r = bs_partition(sigma, terms, p.u("levels")?)?;
            let vals = r
                .per_level_residuals
                .iter()
                .enumerate()
                .map(|(l, res)| bs_tail(sigma, terms, l).map(|t| (res - t).abs()))
                .collect::<Result<Vec<_>>>()?;
            Ok(max_of(vals))
        }
        "nbs_partition" => nbs_partition(p.f("gamma")?, p.u("terms")?, p.u("levels")?).map(|r| r.max_residual),
        "nbs_tail_agreement" => {
            let (gamma, terms) = (p.f("gamma")?, p.u("terms")?);
            let r = nbs_partition(gamma, terms, p.u("levels")?)?;
            let vals = r
                .per_level_residuals
                .iter()
                .enumerate()
                .map(|(m, res)| nbs_tail(gamma, terms, m).map(|t| (res - t).abs()))
                .collect::<Result<Vec<_>>>()?;
            Ok(max_of(vals))
        }
        "nbs_antinormal" => {
            let gamma = p.f("gamma")?;
            let sums = nbs_partial_sums_inner(NbsRoute::Antinormal, gamma, p.u("terms")?, p.u("levels")?, opts.nbs_sign())?;
            let inv_nc = gamma / (1.0 - gamma);
            Ok(max_of(sums.iter().map(|s| (s * inv_nc - inv_nc).abs())))
        }
        "nbs_normal_route" => {
            let sums = nbs_partial_sums_inner(
                NbsRoute::NormalOrdered,
                p.f("gamma")?,
                p.u("terms")?,
                p.u("levels")?,
                opts.nbs_sign(),
            )?;
            Ok(max_of(sums.iter().map(|s| (1.0 - s).abs())))
        }
        "nbs_route_agreement" => route_agreement_inner(p.f("gamma")?, p.u("terms")?, p.u("levels")?, opts.nbs_sign()),
        "rearrangement" => rearrangement_residual(p.f("gamma")?, p.u("terms")?, p.u("levels")?),
        "nbs_normal_ordered_diag" => {
            let (s, gamma) = (p.u("s")?, p.f("gamma")?);
            let vals = (0..p.u("levels")?)
                .map(|m| {
                    let v = nbs_normal_ordered_diag_with_exponent(s, gamma, m, opts.nbs_sign() * gamma)?;
                    Ok((v - negbin_weight(s, m, gamma)?.value()).abs())
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(max_of(vals))
        }
        "photon_subtraction_entries" | "photon_subtraction_norm" => {
            let (s, gamma) = (p.u("s")?, p.f("gamma")?);
            let nbs = negbinomial_state(s, gamma, FockCutoff::new(64)?)?;
            let thermal = thermal_state(gamma, FockCutoff::new(nbs.dim() + s)?)?;
            let sub = photon_subtract(&thermal, s)?;
            if identity == "photon_subtraction_entries" {
                Ok(sub.state.max_abs_diff(&nbs))
            } else {
                let nc = (1.0 - gamma) / gamma;
                let expect: f64 = (1..=s).map(|k| k as f64 * nc).product();
                Ok((sub.norm / expect - 1.0).abs())
            }
        }
        "number_completeness" => number_completeness(p.u("levels")?, p.cutoff()?),

        // channel
        "number_to_binomial" => {
            let (m, eta) = (p.u("m")?, p.f("survival")?);
            let c = FockCutoff::new((m + 1).max(2))?;
            let out = damp_diagonal(&number_state(m, c)?, &ChannelSpec::from_survival(eta)?);
            let trace_gap = (out.trace() - 1.0).abs();
            Ok(out.max_abs_diff(&binomial_state(m, eta, c)?).max(trace_gap))
        }
        "trace_preservation" => {
            let ch = ChannelSpec::new(p.f("kt")?)?;
            let c = p.cutoff()?;
            let t = thermal_state(0.3, c)?;
            let mut worst = (damp_diagonal(&t, &ch).trace() - t.trace()).abs();
            for rho in random_test_states(c.dim(), GENERATOR_SEED, 3) {
                worst = worst.max((damp_matrix(&rho, &ch).trace() - rho.trace()).abs());
            }
            Ok(worst)
        }
        "semigroup" => {
            let (a, b) = (ChannelSpec::new(p.f("kt1")?)?, ChannelSpec::new(p.f("kt2")?)?);
            let c = p.cutoff()?;
            let mut worst: f64 = 0.0;
            for rho in random_test_states(c.dim(), GENERATOR_SEED, 2) {
                let two = damp_matrix(&damp_matrix(&rho, &a), &b);
                worst = worst.max(two.max_abs_diff(&damp_matrix(&rho, &a.then(&b))));
            }
            let t = thermal_state(0.4, c)?;
            let two = damp_diagonal(&damp_diagonal(&t, &a), &b);
            Ok(worst.max(two.max_abs_diff(&damp_diagonal(&t, &a.then(&b)))))
        }
        "matrix_vs_diagonal" => {
            let ch = ChannelSpec::new(p.f("kt")?)?;
            let t = thermal_state(p.f("gamma")?, p.cutoff()?)?;
            Ok(damp_diagonal(&t, &ch).to_density_matrix().max_abs_diff(&damp_matrix(&t.to_density_matrix(), &ch)))
        }
        "coherent_mean_photon" => {
            let alpha = Complex64::new(p.f("alpha_re")?, p.f("alpha_im")?);
            let eta = p.f("survival")?;
            let rho = DensityMatrix::from_pure(&coherent_amplitudes(alpha, p.u("cutoff")?))?;
            let out = damp_matrix(&rho, &ChannelSpec::from_survival(eta)?);
            Ok((out.mean_photon() - eta * alpha.norm_sqr()).abs())
        }
        "vacuum_fixed_point" => channel_fixed_point_check(&ChannelSpec::new(p.f("kt")?)?, p.cutoff()?).map(|r| r.vacuum),
        "generator" => channel_fixed_point_check(&ChannelSpec::new(p.f("kt")?)?, p.cutoff()?).map(|r| r.generator),
        "asymptotic_vacuum" => {
            let ch = ChannelSpec::new(p.f("kt")?)?;
            let out = damp_diagonal(&thermal_state(p.f("gamma")?, p.cutoff()?)?, &ch);
            Ok((out.probs()[0] / out.trace() - 1.0).abs())
        }
        other => domain(format!("unknown identity '{other}'")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_grid_parses_and_covers_every_suite() {
        let g = GridFile::builtin();
        assert_eq!(g.version, 1);
        for s in Suite::ALL {
            assert!(g.checks.iter().any(|c| c.suite == s), "{s}");
        }
    }

    #[test]
    fn expansion_is_cartesian_in_key_order() {
        let mut params = BTreeMap::new();
        params.insert("b".to_string(), vec![1.0, 2.0]);
        params.insert("a".to_string(), vec![3.0]);
        let pts = expand(&params);
        assert_eq!(pts.len(), 2);
        assert_eq!(describe(&pts[1]), "a=3 b=2");
    }

    #[test]
    fn unknown_identity_fails_the_row() {
        let g = GridFile::parse("version = 1\n[[check]]\nsuite = \"specfun\"\nidentity = \"nope\"\nx = [1.0]\n").unwrap();
        let rows = run(&g, &[Suite::Specfun], &VerifyOptions::default());
        assert_eq!(rows.len(), 1);
        assert!(!rows[0].pass);
        assert!(rows[0].error.as_deref().unwrap().contains("unknown identity"));
    }

    #[test]
    fn fault_breaks_normal_route() {
        let g = GridFile::parse(
            "version = 1\n[[check]]\nsuite = \"partition\"\nidentity = \"nbs_normal_ordered_diag\"\ns = [1]\ngamma = [0.5]\nlevels = [5]\n",
        )
        .unwrap();
        let good = run(&g, &[Suite::Partition], &VerifyOptions::default());
        assert!(good[0].pass);
        let bad = run(
            &g,
            &[Suite::Partition],
            &VerifyOptions {
                fault: Some(Fault::NbsNormalExponent),
                ..Default::default()
            },
        );
        assert!(!bad[0].pass);
    }
}
