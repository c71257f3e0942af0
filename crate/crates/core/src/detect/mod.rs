//! Zero detection: constants, power sums, high derivatives of the logarithmic
//! derivative, zero sums and density scans at a prime.

pub mod config;
pub mod constants;
pub mod density;
pub mod derivative;
pub mod jk;
pub mod turan;
pub mod zeros;

pub use config::{DetectionConfig, DetectionInputs};
pub use constants::{solve_constants, Constants};
pub use density::{density_scan, family_count_bound, DensityQuery, DensityReport, FamilyCount};
pub use derivative::{detection_bounds, high_derivative, DetectionReport, HighDerivative, HighDerivativeQuery};
pub use jk::{jk, jk_tail_bounds_check};
pub use turan::{turan_existence, TuranOutcome};
pub use zeros::{hadamard_zero_sum, ZeroList, ZeroSum};
