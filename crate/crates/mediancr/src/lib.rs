//! File formats, the Monte Carlo coverage harness and the command-line front
//! end for the `mediancr-core` confidence regions.

pub mod cli;
pub mod data;
pub mod format;
pub mod sim;

pub use mediancr_core as core;
