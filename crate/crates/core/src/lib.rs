//! Confidence regions for the median of a continuous distribution.
//!
//! The crate is `no_std` (it needs `alloc`) and covers the numerical core:
//! binomial and Wilcoxon null distributions, the seven simulation families,
//! order-statistic regions, expected-spacing profiles, the optimal
//! randomized index-set selection, and the classical competitors
//! (t, Wilcoxon, sign, asymptotic median and five bootstrap intervals).
//!
//! IO, the command line and the Monte Carlo driver live in the `mediancr`
//! crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod binom;
pub mod classical;
pub mod dist;
mod error;
pub mod lk;
pub mod method;
pub mod optimal;
mod quadrature;
pub mod region;
pub mod rng;
pub mod signed_rank;
pub mod special;

pub use error::{Error, Result};
pub use method::{evaluate, Method, MethodInputs, MethodOutput};
pub use region::{Interval, RandomizerDraw, Region, SortedSample};
