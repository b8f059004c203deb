//! Fock-diagonal mixed states: number, binomial, negative binomial and
//! thermal, plus photon subtraction and the normally ordered form of the
//! negative binomial state.

use crate::error::{check_open_unit, domain, Error, Result};
use crate::fockcore::{normal_diag_eval, DensityMatrix, FockCutoff, OrderedSeries, Ordering, MAX_DIM};
use crate::specfun::{binom_weight, binomial, negbin_tail, negbin_weight};
use serde::Serialize;

/// Family and parameters a state was built from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "label", content = "params", rename_all = "lowercase")]
pub enum StateLabel {
    Number { m: usize },
    Binomial { n: usize, sigma: f64 },
    Negbinomial { s: usize, gamma: f64 },
    Thermal { gamma: f64 },
    Custom,
}

impl StateLabel {
    pub fn name(&self) -> &'static str {
        match self {
            StateLabel::Number { .. } => "number",
            StateLabel::Binomial { .. } => "binomial",
            StateLabel::Negbinomial { .. } => "negbinomial",
            StateLabel::Thermal { .. } => "thermal",
            StateLabel::Custom => "custom",
        }
    }
}

/// Tolerance on `Σ probs + tail_mass = 1`.
pub const NORMALIZATION_TOL: f64 = 1e-12;
/// Default bound on the mass left above the cutoff.
pub const DEFAULT_TAIL_EPS: f64 = 1e-12;

/// Photon-number distribution over levels `0..D`, with the mass at `m >= D`
/// kept in `tail_mass`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagonalState {
    #[serde(flatten)]
    label: StateLabel,
    cutoff: FockCutoff,
    probs: Vec<f64>,
    tail_mass: f64,
}

impl DiagonalState {
    /// Validated constructor for arbitrary weights.
    pub fn new(probs: Vec<f64>, tail_mass: f64, label: StateLabel) -> Result<Self> {
        let cutoff = FockCutoff::new(probs.len())?;
        if let Some((i, p)) = probs.iter().enumerate().find(|(_, p)| !(p.is_finite() && **p >= 0.0)) {
            return domain(format!("weight at level {i} is {p}, expected a finite nonnegative value"));
        }
        if !(tail_mass.is_finite() && tail_mass >= 0.0) {
            return domain(format!("tail mass must be nonnegative, got {tail_mass}"));
        }
        let total: f64 = probs.iter().sum::<f64>() + tail_mass;
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return domain(format!("weights plus tail sum to {total}, not 1"));
        }
        Ok(DiagonalState {
            label,
            cutoff,
            probs,
            tail_mass,
        })
    }

    /// Unlabelled state with no tail.
    pub fn custom(probs: Vec<f64>) -> Result<Self> {
        DiagonalState::new(probs, 0.0, StateLabel::Custom)
    }

    pub fn label(&self) -> StateLabel {
        self.label
    }

    pub fn cutoff(&self) -> FockCutoff {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn trace(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn to_density_matrix(&self) -> DensityMatrix {
        DensityMatrix::from_diagonal(&self.probs).expect("diagonal of a valid state is Hermitian")
    }

    /// Largest `|p_m − q_m|`, padding the shorter vector with zeros.
    pub fn max_abs_diff(&self, other: &DiagonalState) -> f64 {
        let n = self.dim().max(other.dim());
        (0..n)
            .map(|i| {
                let a = self.probs.get(i).copied().unwrap_or(0.0);
                let b = other.probs.get(i).copied().unwrap_or(0.0);
                (a - b).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// `|m><m|`.
pub fn number_state(m: usize, cutoff: FockCutoff) -> Result<DiagonalState> {
    let d = cutoff.dim();
    if m >= d {
        return domain(format!("level {m} outside cutoff {d}"));
    }
    let mut probs = vec![0.0; d];
    probs[m] = 1.0;
    Ok(DiagonalState {
        label: StateLabel::Number { m },
        cutoff,
        probs,
        tail_mass: 0.0,
    })
}

/// Binomial photon statistics `C(n, l) σ^l (1 − σ)^(n − l)`.
pub fn binomial_state(n: usize, sigma: f64, cutoff: FockCutoff) -> Result<DiagonalState> {
    check_open_unit("sigma", sigma)?;
    let d = cutoff.dim();
    if n >= d {
        return domain(format!("binomial order {n} needs a cutoff above {n}, got {d}"));
    }
    let mut probs = vec![0.0; d];
    for (l, p) in probs.iter_mut().enumerate().take(n + 1) {
        *p = binom_weight(n, l, sigma)?.value();
    }
    Ok(DiagonalState {
        label: StateLabel::Binomial { n, sigma },
        cutoff,
        probs,
        tail_mass: 0.0,
    })
}

/// Geometric weights `γ (1 − γ)^m` at a fixed cutoff; the tail is `(1 − γ)^D`.
pub fn thermal_state(gamma: f64, cutoff: FockCutoff) -> Result<DiagonalState> {
    check_open_unit("gamma", gamma)?;
    let d = cutoff.dim();
    let q = 1.0 - gamma;
    let mut probs = Vec::with_capacity(d);
    let mut w = gamma;
    for _ in 0..d {
        probs.push(w);
        w *= q;
    }
    Ok(DiagonalState {
        label: StateLabel::Thermal { gamma },
        cutoff,
        probs,
        tail_mass: q.powi(d as i32),
    })
}

/// How far a constructor may grow the cutoff to push the tail below `eps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailPolicy {
    pub eps: f64,
    pub max_dim: usize,
}

impl Default for TailPolicy {
    fn default() -> Self {
        TailPolicy {
            eps: DEFAULT_TAIL_EPS,
            max_dim: MAX_DIM,
        }
    }
}

/// Negative binomial state with the default [`TailPolicy`].
pub fn negbinomial_state(s: usize, gamma: f64, cutoff: FockCutoff) -> Result<DiagonalState> {
    negbinomial_state_with(s, gamma, cutoff, TailPolicy::default())
}

/// Weights `C(m + s, m) γ^(s + 1) (1 − γ)^m`. The cutoff doubles until the
/// analytic tail falls below `policy.eps`.
pub fn negbinomial_state_with(s: usize, gamma: f64, cutoff: FockCutoff, policy: TailPolicy) -> Result<DiagonalState> {
    check_open_unit("gamma", gamma)?;
    if !(policy.eps > 0.0) {
        return domain(format!("tail tolerance must be positive, got {}", policy.eps));
    }
    let max_dim = policy.max_dim.clamp(cutoff.dim(), MAX_DIM);
    let mut d = cutoff.dim();
    let mut tail = negbin_tail(s, gamma, d)?;
    while tail >= policy.eps && d < max_dim {
        d = (2 * d).min(max_dim);
        tail = negbin_tail(s, gamma, d)?;
    }
    if tail >= policy.eps {
        return Err(Error::Cutoff {
            dim: d,
            tail,
            eps: policy.eps,
            suggested: smallest_cutoff(s, gamma, d, policy.eps)?,
        });
    }
    let probs = (0..d)
        .map(|m| negbin_weight(s, m, gamma).map(|w| w.value()))
        .collect::<Result<Vec<_>>>()?;
    Ok(DiagonalState {
        label: StateLabel::Negbinomial { s, gamma },
        cutoff: FockCutoff::new(d)?,
        probs,
        tail_mass: tail,
    })
}

/// First `D >= from` whose negative-binomial tail is below `eps`.
fn smallest_cutoff(s: usize, gamma: f64, from: usize, eps: f64) -> Result<usize> {
    let mut hi = from.max(1);
    while negbin_tail(s, gamma, hi)? >= eps {
        if hi > usize::MAX / 4 {
            return Ok(hi);
        }
        hi *= 2;
    }
    let mut lo = from.max(1);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if negbin_tail(s, gamma, mid)? < eps {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(hi)
}

/// Mean photon number on the retained levels, with a bound on the part
/// carried by the tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanPhoton {
    pub value: f64,
    /// `Σ_{m >= D} m p_m`; infinite when the tail shape is unknown.
    pub tail_bound: f64,
}

pub fn mean_photon(state: &DiagonalState) -> MeanPhoton {
    let value = state.probs.iter().enumerate().map(|(m, p)| m as f64 * p).sum();
    let d = state.dim();
    let tail_bound = match state.label {
        _ if state.tail_mass == 0.0 => 0.0,
        StateLabel::Thermal { gamma } => state.tail_mass * (d as f64 + (1.0 - gamma) / gamma),
        // m C(m+s, m) γ^(s+1) (1−γ)^m = (s+1) n_c · [weight of order s+1 at m−1]
        StateLabel::Negbinomial { s, gamma } => {
            let nc = (1.0 - gamma) / gamma;
            (s as f64 + 1.0) * nc * negbin_tail(s + 1, gamma, d - 1).unwrap_or(f64::INFINITY)
        }
        _ => f64::INFINITY,
    };
    MeanPhoton { value, tail_bound }
}

/// Normalized result of photon subtraction and its normalization constant.
#[derive(Debug, Clone, PartialEq)]
pub struct Subtracted {
    pub state: DiagonalState,
    pub norm: f64,
}

/// `a^s ρ a†^s / norm` on a diagonal state: `q_m = p_{m+s} (m+s)!/m!`,
/// normalized over the retained levels.
pub fn photon_subtract(state: &DiagonalState, s: usize) -> Result<Subtracted> {
    let d = state.dim();
    if s >= d {
        return domain(format!("cannot subtract {s} photons within cutoff {d}"));
    }
    let mut q = vec![0.0; d];
    for m in 0..d - s {
        let p = state.probs[m + s];
        if p != 0.0 {
            let mut w = p;
            for k in 1..=s {
                w *= (m + k) as f64;
            }
            q[m] = w;
        }
    }
    let norm: f64 = q.iter().sum();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::Degenerate(format!(
            "subtracting {s} photons leaves no weight on levels below {d}"
        )));
    }
    for v in q.iter_mut() {
        *v /= norm;
    }
    Ok(Subtracted {
        state: DiagonalState {
            label: StateLabel::Custom,
            cutoff: state.cutoff,
            probs: q,
            tail_mass: 0.0,
        },
        norm,
    })
}

/// Exponent constant of the normally ordered negative binomial state.
pub const NBS_NORMAL_EXPONENT_SIGN: f64 = -1.0;

/// `<m| γ^(s+1) :e^{−γ a†a} L_s(−(1 − γ) a†a): |m>`.
pub fn nbs_normal_ordered_diag(s: usize, gamma: f64, m: usize) -> Result<f64> {
    nbs_normal_ordered_diag_with_exponent(s, gamma, m, NBS_NORMAL_EXPONENT_SIGN * gamma)
}

/// As [`nbs_normal_ordered_diag`] with an arbitrary exponent constant `c` in
/// `:e^{c a†a} L_s(−(1 − γ) a†a):`.
pub fn nbs_normal_ordered_diag_with_exponent(s: usize, gamma: f64, m: usize, c: f64) -> Result<f64> {
    check_open_unit("gamma", gamma)?;
    if !c.is_finite() {
        return domain("exponent constant must be finite");
    }
    let pre = gamma.powi(s as i32 + 1);
    let q = 1.0 - gamma;
    let mut coeffs = Vec::with_capacity(s + 1);
    let mut qk_over_kfact = 1.0;
    for k in 0..=s {
        if k > 0 {
            qk_over_kfact *= q / k as f64;
        }
        coeffs.push(pre * binomial(s, k) * qk_over_kfact);
    }
    normal_diag_eval(&OrderedSeries::new(Ordering::Normal, coeffs).with_rate(c), m)
}
