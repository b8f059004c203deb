//! Series summation with the shared truncation rule.

/// Relative size below which a term counts as negligible.
pub const TERM_REL_TOL: f64 = 1e-17;

/// Consecutive negligible terms required before stopping early.
pub const QUIET_RUN: usize = 3;

/// Outcome of a truncated summation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartialSum {
    pub value: f64,
    pub terms_used: usize,
    /// True when the quiet-run rule fired before the cap.
    pub settled: bool,
}

/// Sums at most `cap` terms, stopping once [`QUIET_RUN`] consecutive terms
/// are each below `TERM_REL_TOL * |partial sum|`.
pub fn sum_truncated<I: IntoIterator<Item = f64>>(terms: I, cap: usize) -> PartialSum {
    let mut value = 0.0;
    let mut quiet = 0;
    let mut used = 0;
    for t in terms.into_iter().take(cap) {
        value += t;
        used += 1;
        if t.abs() < TERM_REL_TOL * value.abs() {
            quiet += 1;
            if quiet >= QUIET_RUN {
                return PartialSum {
                    value,
                    terms_used: used,
                    settled: true,
                };
            }
        } else {
            quiet = 0;
        }
    }
    PartialSum {
        value,
        terms_used: used,
        settled: false,
    }
}

/// `|a − b| / max(1, |b|)`: absolute near zero, relative for large values.
pub fn scaled_residual(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}
