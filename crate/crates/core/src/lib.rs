//! Condensate fluctuations of an ideal Bose gas in a trap, in the canonical
//! ensemble.
//!
//! * [`spectrum`] builds or loads single-particle spectra and fits Weyl constants.
//! * [`analytic`] gives the limit predictions and series for finite `n`.
//! * [`sampler`] draws exact canonical occupations and samples of `W`.
//! * [`stats`] has the goodness-of-fit helpers used to compare the two.
//! * [`verify`] runs the acceptance suites; [`cli`] is the command-line front end.

// `!(x > 0.0)` is used on purpose so that NaN arguments are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod cli;
pub mod sampler;
pub mod spectrum;
pub mod stats;
pub mod verify;
