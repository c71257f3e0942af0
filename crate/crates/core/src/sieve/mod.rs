//! Large and Selberg sieves over ideal tables.

pub mod large;
pub mod mvt;
pub mod quad;
pub mod selberg;
pub mod smooth;

pub use large::{bound_table, sieve_constant, BoundRow, SieveConstant, SieveKind};
pub use mvt::{mvt_mu, MvtRange, MvtReport};
pub use selberg::{diagonal_lower_bound_check, g_factor, selberg_weights, sifted_sum_check, SieveWeights, WeightVector};
pub use smooth::{smooth_sum_residue, BumpFunction, SmoothSum};
