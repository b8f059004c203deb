//! Amplitude damping: the closed-form solution of the photon-loss master
//! equation applied to diagonal states and to full density matrices.

use crate::error::{domain, Result};
use crate::fockcore::{ladder_power_matrix, DensityMatrix, FockCutoff, Operator};
use crate::specfun::weights::binomial_pmf;
use crate::states::{DiagonalState, StateLabel};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Damping exposure `κt`; each photon survives with probability `e^{−2κt}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelSpec {
    kt: f64,
}

impl ChannelSpec {
    /// `kt` may be `+∞` (full loss).
    pub fn new(kt: f64) -> Result<Self> {
        if kt.is_nan() || kt < 0.0 {
            return domain(format!("kt must be nonnegative, got {kt}"));
        }
        Ok(ChannelSpec { kt })
    }

    /// Channel with the given survival probability in `[0, 1]`.
    pub fn from_survival(eta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return domain(format!("survival must lie in [0, 1], got {eta}"));
        }
        ChannelSpec::new(-0.5 * eta.ln())
    }

    pub fn kt(&self) -> f64 {
        self.kt
    }

    pub fn survival(&self) -> f64 {
        (-2.0 * self.kt).exp()
    }

    /// Loss probability `T = 1 − survival`.
    pub fn loss(&self) -> f64 {
        1.0 - self.survival()
    }

    /// `ch(kt₁) ∘ ch(kt₂) = ch(kt₁ + kt₂)`.
    pub fn then(&self, other: &ChannelSpec) -> ChannelSpec {
        ChannelSpec { kt: self.kt + other.kt }
    }
}

/// `p'_l = Σ_{m >= l} p_m C(m, l) η^l T^{m − l}`.
///
/// The binomial rows are generated by Pascal's rule, one loss step at a
/// time, so no binomial coefficient is ever formed. A number state comes out
/// labelled as the matching binomial state.
pub fn damp_diagonal(state: &DiagonalState, ch: &ChannelSpec) -> DiagonalState {
    if ch.kt == 0.0 {
        return state.clone();
    }
    let eta = ch.survival();
    let t = ch.loss();
    let d = state.dim();
    let p = state.probs();
    let mut out = vec![0.0; d];
    let mut row = vec![0.0; d];
    row[0] = 1.0;
    for m in 0..d {
        if m > 0 {
            for l in (1..=m).rev() {
                row[l] = eta * row[l - 1] + t * row[l];
            }
            row[0] *= t;
        }
        if p[m] != 0.0 {
            for l in 0..=m {
                out[l] += p[m] * row[l];
            }
        }
    }
    let label = match state.label() {
        StateLabel::Number { m } if eta > 0.0 && eta < 1.0 => StateLabel::Binomial { n: m, sigma: eta },
        StateLabel::Number { .. } if eta == 0.0 => StateLabel::Number { m: 0 },
        _ => StateLabel::Custom,
    };
    DiagonalState::new(out, state.tail_mass(), label).expect("damping keeps the weights normalized")
}

/// Operator-sum solution `Σ_n T^n/n! e^{−κt a†a} a^n ρ a†^n e^{−κt a†a}`.
///
/// Entry `(j, k)` of term `n` is `ρ_{j+n,k+n} T^n √(C(j+n,n) C(k+n,n)) η^{(j+k)/2}`.
pub fn damp_matrix(rho: &DensityMatrix, ch: &ChannelSpec) -> DensityMatrix {
    if ch.kt == 0.0 {
        return rho.clone();
    }
    let eta = ch.survival();
    let d = rho.dim();
    let src = rho.entries();
    // kernel[n][j] = sqrt(C(j+n, j) η^j T^n)
    let kernel: Vec<Vec<f64>> = (0..d)
        .map(|n| (0..d - n).map(|j| binomial_pmf(j + n, j, eta).sqrt()).collect())
        .collect();
    let mut out = Operator::zeros(d, d);
    for j in 0..d {
        for k in 0..d {
            let mut acc = Complex64::new(0.0, 0.0);
            for (n, kn) in kernel.iter().enumerate().take(d - j.max(k)) {
                acc += src[(j + n, k + n)] * (kn[j] * kn[k]);
            }
            out[(j, k)] = acc;
        }
    }
    DensityMatrix::from_raw(out)
}

/// Right side of the master equation with `κ = 1`: `2aρa† − a†aρ − ρa†a`.
pub fn damping_generator(rho: &DensityMatrix) -> Result<Operator> {
    let d = rho.dim();
    let a = ladder_power_matrix(1, FockCutoff::new(d)?)?;
    let ad = a.adjoint();
    let num = &ad * &a;
    let r = rho.entries();
    Ok((&a * r * &ad) * Complex64::new(2.0, 0.0) - &num * r - r * &num)
}

/// Residuals of the channel sanity harness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FixedPointCheck {
    /// Largest entry of `damp(|0><0|) − |0><0|`.
    pub vacuum: f64,
    /// Largest entry of `(damp(ρ, dt) − ρ)/dt − L(ρ)` over the test states, with `dt = kt`.
    pub generator: f64,
}

impl FixedPointCheck {
    pub fn max(&self) -> f64 {
        self.vacuum.max(self.generator)
    }
}

pub const GENERATOR_SEED: u64 = 0x5eed_da3b;
pub const GENERATOR_SAMPLES: usize = 3;

/// Random `ρ = A A† / Tr` with level amplitudes decaying as `e^{−j/4}`.
pub fn random_test_states(d: usize, seed: u64, count: usize) -> Vec<DensityMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let a = Operator::from_fn(d, d, |j, _| {
                let scale = (-(j as f64) / 4.0).exp();
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * scale
            });
            let mut rho = &a * a.adjoint();
            let tr = rho.trace();
            rho /= tr;
            // Remove rounding asymmetry so the result passes the Hermitian check.
            let herm = (&rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
            DensityMatrix::new(herm).expect("A A† is Hermitian")
        })
        .collect()
}

/// Vacuum invariance and a first-order finite-difference check of the
/// generator, using `kt` as the time step.
pub fn channel_fixed_point_check(ch: &ChannelSpec, cutoff: FockCutoff) -> Result<FixedPointCheck> {
    let dt = ch.kt();
    if !(dt > 0.0 && dt.is_finite()) {
        return domain(format!("fixed-point check needs a finite kt > 0, got {dt}"));
    }
    let vac = DensityMatrix::projector(0, cutoff)?;
    let vacuum = damp_matrix(&vac, ch).max_abs_diff(&vac);
    let mut generator: f64 = 0.0;
    for rho in random_test_states(cutoff.dim(), GENERATOR_SEED, GENERATOR_SAMPLES) {
        let step = damp_matrix(&rho, ch);
        let fd = (step.entries() - rho.entries()) / Complex64::new(dt, 0.0);
        let gap = fd - damping_generator(&rho)?;
        generator = generator.max(gap.iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    Ok(FixedPointCheck { vacuum, generator })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{binomial_state, number_state, thermal_state};

    fn cut(d: usize) -> FockCutoff {
        FockCutoff::new(d).unwrap()
    }

    #[test]
    fn spec_relations() {
        let ch = ChannelSpec::from_survival(0.7).unwrap();
        assert!((ch.kt() - 0.178_337_471_969_295).abs() < 1e-12);
        assert!((ch.survival() + ch.loss() - 1.0).abs() == 0.0);
        assert!(ChannelSpec::new(-0.1).is_err());
        assert!(ChannelSpec::new(f64::NAN).is_err());
        assert_eq!(ChannelSpec::new(f64::INFINITY).unwrap().survival(), 0.0);
    }

    #[test]
    fn number_state_becomes_binomial() {
        let ch = ChannelSpec::from_survival(0.7).unwrap();
        let out = damp_diagonal(&number_state(2, cut(3)).unwrap(), &ch);
        for (p, e) in out.probs().iter().zip([0.09, 0.42, 0.49]) {
            assert!((p - e).abs() < 1e-15, "{p} {e}");
        }
        assert_eq!(out.label(), StateLabel::Binomial { n: 2, sigma: ch.survival() });
        let half = damp_diagonal(&number_state(1, cut(2)).unwrap(), &ChannelSpec::from_survival(0.5).unwrap());
        assert!((half.probs()[0] - 0.5).abs() < 1e-15 && (half.probs()[1] - 0.5).abs() < 1e-15);
        let b = binomial_state(2, ch.survival(), cut(3)).unwrap();
        assert!(out.max_abs_diff(&b) < 1e-15);
    }

    #[test]
    fn zero_exposure_is_identity() {
        let t = thermal_state(0.3, cut(12)).unwrap();
        let ch = ChannelSpec::new(0.0).unwrap();
        assert_eq!(damp_diagonal(&t, &ch), t);
        let rho = t.to_density_matrix();
        assert_eq!(damp_matrix(&rho, &ch), rho);
    }

    #[test]
    fn matrix_and_diagonal_routes_agree() {
        let t = thermal_state(0.35, cut(24)).unwrap();
        for kt in [0.05, 0.35, 1.2] {
            let ch = ChannelSpec::new(kt).unwrap();
            let a = damp_diagonal(&t, &ch).to_density_matrix();
            let b = damp_matrix(&t.to_density_matrix(), &ch);
            assert!(a.max_abs_diff(&b) < 1e-12);
        }
    }

    #[test]
    fn coherent_mean_photon_scales_with_survival() {
        let d = 40;
        let alpha = Complex64::new(1.2, -0.5);
        let mut amp = Vec::with_capacity(d);
        let mut c = Complex64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
        for j in 0..d {
            if j > 0 {
                c *= alpha / (j as f64).sqrt();
            }
            amp.push(c);
        }
        let rho = DensityMatrix::from_pure(&amp).unwrap();
        let ch = ChannelSpec::from_survival(0.6).unwrap();
        let out = damp_matrix(&rho, &ch);
        assert!((out.mean_photon() - 0.6 * alpha.norm_sqr()).abs() < 1e-10);
        assert!(out.is_state());
        assert!(crate::fockcore::hermiticity_residual(out.entries()) < 1e-14);
    }

    #[test]
    fn fixed_point_examples() {
        let c = cut(16);
        let r = channel_fixed_point_check(&ChannelSpec::new(1e-4).unwrap(), c).unwrap();
        assert!(r.vacuum <= 1e-12);
        assert!(r.generator <= 1e-3, "{r:?}");
        let h = channel_fixed_point_check(&ChannelSpec::new(5e-5).unwrap(), c).unwrap();
        let ratio = r.generator / h.generator;
        assert!((1.8..2.2).contains(&ratio), "{ratio}");
        assert!(channel_fixed_point_check(&ChannelSpec::new(0.0).unwrap(), c).is_err());
    }

    #[test]
    fn heavy_loss_goes_to_vacuum() {
        let ch = ChannelSpec::new(10.0).unwrap();
        let out = damp_diagonal(&thermal_state(0.2, cut(60)).unwrap(), &ch);
        assert!((out.probs()[0] - out.trace()).abs() < 1e-7);
        let full = damp_diagonal(&number_state(5, cut(8)).unwrap(), &ChannelSpec::new(f64::INFINITY).unwrap());
        assert_eq!(full.probs()[0], 1.0);
    }
}
