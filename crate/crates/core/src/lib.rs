//! Composite bosons built from two distinguishable constituents.
//!
//! The crate walks the whole chain from a Schmidt spectrum `{λ_p}` to the
//! statistics of coherent states of the effective coboson annihilation
//! operator:
//!
//! * [`schmidt`]: construct and validate spectra, purity and power sums.
//! * [`symfunc`]: the normalization ratios `χ_{n+1}/χ_n`, evaluated in the
//!   log domain through elementary / complete homogeneous symmetric
//!   polynomials.
//! * [`ladder`]: ladder coefficients `f_n`, correction norms `⟨ε_n|ε_n⟩`
//!   and the diagonal of `[ĉ, ĉ†]`.
//! * [`coherent`]: eigenstates of the effective annihilation operator and
//!   the observables evaluated on them (commutator, quadrature variances,
//!   Mandel's Q, mean number, occupancy bound).
//! * [`oracle`]: brute-force second quantization over a handful of mode
//!   pairs, used to check everything above.
//! * [`verify`]: the oracle-versus-analytic comparison grid.
//! * [`report`]: JSON/CSV serialization and parameter sweeps.
//!
//! ```
//! use coboson::{coherent, ladder::LadderTable, schmidt::{ConstituentKind, SchmidtSpectrum}};
//! use num_complex::Complex64;
//!
//! let spectrum = SchmidtSpectrum::uniform(50, ConstituentKind::FermionPair)?;
//! let ladder = LadderTable::from_spectrum(&spectrum, 64)?;
//! let state = coherent::build(Complex64::new(0.5, 0.0), &ladder, 1e-12)?;
//! assert!(state.expect_commutator() < 1.0);
//! assert!(state.mandel_q_eff()? < 0.0);
//! # Ok::<(), coboson::Error>(())
//! ```

pub mod coherent;
pub mod error;
pub mod ladder;
pub mod oracle;
pub mod report;
pub mod schmidt;
pub mod symfunc;
pub mod verify;

pub use error::{Error, Result};
