//! Command-line front end and verification suites for the kernels of
//! `polykernel-core`.

// negated comparisons are how NaN inputs get rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod complex;
pub mod suites;
