//! Truncated Fock-space operators, ordering conversions and phase-space checks.

pub mod identity;
pub mod matrix;
pub mod ordering;
pub mod quadrature;

pub use identity::{operator_identity_matrix_residual, shifted_antinormal_matrix_residual, BlockResidual};
pub use matrix::{
    block_frobenius, creation_power_matrix, hermiticity_residual, ladder_power_matrix, DensityMatrix, FockCutoff,
    Operator, MAX_DIM, MIN_DIM,
};
pub use ordering::*;
pub use quadrature::{coherent_completeness_residual, gaussian_integral_check, gaussian_integral_sides, GaussianSides};
