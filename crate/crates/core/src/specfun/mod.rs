//! Special functions and scalar series identities.
//!
//! Factorial ratios go through log-gamma and are exponentiated once, so
//! indices well past 170 stay finite. Identity checks report
//! `|lhs − rhs| / max(1, |rhs|)` unless stated otherwise.

pub mod combin;
mod dd;
pub mod identities;
pub mod poly;
pub mod series;
pub mod weights;

pub use combin::{binomial, falling_factorial, ln_binomial, ln_factorial, ln_falling_factorial};
pub use identities::{
    cauchy_rearrange_check, cauchy_sums, gen_negbin_laguerre, gen_negbin_laguerre_residual,
    hermite_laguerre_link_residual, laguerre_genfun_residual, shifted_hermite_genfun,
    shifted_hermite_genfun_residual, Comparison,
};
pub use poly::{hermite2, hermite2_real, laguerre, LaguerreSeq, PolyIndex, MAX_ORDER};
pub use series::{scaled_residual, sum_truncated, PartialSum};
pub use weights::{binom_weight, negbin_tail, negbin_weight, LogWeight};
