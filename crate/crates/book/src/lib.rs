//! The guide's chapters, one module each, so `cargo test --doc` runs every
//! Rust listing in `book/src` against the current library.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/spectra.md")]
pub mod spectra {}
#[doc = include_str!("../../../book/src/chi-ratios.md")]
pub mod chi_ratios {}
#[doc = include_str!("../../../book/src/ladder.md")]
pub mod ladder {}
#[doc = include_str!("../../../book/src/coherent-states.md")]
pub mod coherent_states {}
#[doc = include_str!("../../../book/src/observables.md")]
pub mod observables {}
#[doc = include_str!("../../../book/src/occupancy.md")]
pub mod occupancy {}
#[doc = include_str!("../../../book/src/oracle.md")]
pub mod oracle {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
