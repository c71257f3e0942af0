#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arith;
pub mod cli;
pub mod coeffs;
pub mod covers;
pub mod detect;
pub mod error;
pub mod ideals;
pub mod localdata;
pub mod report;
pub mod sieve;
