//! Oracle-versus-analytic comparison on small spectra.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::ladder::LadderTable;
use crate::oracle::{FockState, PairOracle};
use crate::schmidt::{ConstituentKind, SchmidtSpectrum};
use crate::symfunc;

pub const CHI_REL_TOL: f64 = 1e-10;
pub const EPS_ABS_TOL: f64 = 1e-10;
pub const COMMUTATOR_TOL: f64 = 1e-10;
pub const RANDOM_PROBES: usize = 20;
pub const DEFAULT_SEED: u64 = 0x636f_626f;

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub check: &'static str,
    pub spectrum: String,
    pub kind: ConstituentKind,
    pub max_error: f64,
    pub tolerance: f64,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.max_error <= self.tolerance
    }
}

/// Uniform `d = 2..=5`, geometric `q ∈ {0.3, 0.6}` at rank 5 and one random
/// rank-4 spectrum, each as fermion and boson pairs.
pub fn default_grid(seed: u64) -> Vec<SchmidtSpectrum> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let random: Vec<f64> = (0..4).map(|_| rng.gen_range(0.05..1.0)).collect();
    let mut out = Vec::new();
    for kind in [ConstituentKind::FermionPair, ConstituentKind::BosonPair] {
        for d in 2..=5 {
            out.push(SchmidtSpectrum::uniform(d, kind).expect("d >= 1"));
        }
        for q in [0.3, 0.6] {
            out.push(SchmidtSpectrum::geometric_with_rank(q, 5, kind).expect("valid q"));
        }
        out.push(SchmidtSpectrum::from_values(&random, kind).expect("positive weights"));
    }
    out
}

fn relative_error(got: f64, expected: f64) -> f64 {
    if expected == 0.0 {
        got.abs()
    } else {
        (got - expected).abs() / expected.abs()
    }
}

/// Relative error of `χ_n` and `χ_{n+1}/χ_n`, `n <= max_n`.
pub fn check_chi(spectrum: &SchmidtSpectrum, oracle: &PairOracle, max_n: usize) -> Result<f64> {
    let table = symfunc::chi_ratio_table(spectrum, max_n + 1)?;
    let exact: Vec<f64> = (0..=max_n + 1).map(|n| oracle.chi_exact(n)).collect::<Result<_>>()?;
    let mut worst = 0.0_f64;
    for n in 0..=max_n {
        worst = worst.max(relative_error(table.log_chi(n).exp(), exact[n]));
        if exact[n] > 0.0 {
            worst = worst.max(relative_error(table.ratio(n), exact[n + 1] / exact[n]));
        }
    }
    Ok(worst)
}

/// `(max |Δ⟨ε_n|ε_n⟩|, max |Δf_n|, |ε_1|)` over existing `|n⟩`, `n <= max_n`.
pub fn check_eps(spectrum: &SchmidtSpectrum, oracle: &PairOracle, max_n: usize) -> Result<(f64, f64, f64)> {
    let ladder = LadderTable::from_spectrum(spectrum, max_n + 1)?;
    let (mut eps_err, mut f_err, mut eps1) = (0.0_f64, 0.0_f64, 0.0_f64);
    for n in 1..=max_n.min(spectrum.rank()) {
        let exact = oracle.lowering_decomposition(n)?;
        let analytic = ladder.eps_norm(n).expect("state exists");
        eps_err = eps_err.max((analytic - exact.eps_norm).abs());
        f_err = f_err.max((ladder.f(n) - exact.coefficient).abs());
        if n == 1 {
            eps1 = analytic.abs().max(exact.eps_norm.abs());
        }
    }
    Ok((eps_err, f_err, eps1))
}

/// Vacuum, `|1⟩`, `|2⟩` (when they exist) and random pair-sector states.
pub fn probes<R: Rng + ?Sized>(oracle: &PairOracle, rng: &mut R, random: usize) -> Result<Vec<FockState>> {
    let mut out = vec![oracle.vacuum()];
    for n in 1..=2 {
        if n <= oracle.pairs() {
            out.push(oracle.number_state(n)?);
        }
    }
    for _ in 0..random {
        out.push(oracle.random_pair_state(rng, 6, 2));
    }
    Ok(out)
}

/// All checks for one spectrum.
pub fn check_spectrum<R: Rng + ?Sized>(
    spectrum: &SchmidtSpectrum,
    max_n: usize,
    rng: &mut R,
) -> Result<Vec<CheckOutcome>> {
    let oracle = PairOracle::new(spectrum)?;
    let chi = check_chi(spectrum, &oracle, max_n)?;
    let (eps, f, eps1) = check_eps(spectrum, &oracle, max_n)?;
    let report = oracle.verify_commutator_identity(&probes(&oracle, rng, RANDOM_PROBES)?)?;
    let comm = report.commutator_residuals.iter().copied().fold(0.0, f64::max);
    let outcome = |check, max_error, tolerance| CheckOutcome {
        check,
        spectrum: spectrum.descriptor().to_string(),
        kind: spectrum.kind(),
        max_error,
        tolerance,
    };
    Ok(vec![
        outcome("chi", chi, CHI_REL_TOL),
        outcome("eps_norm", eps, EPS_ABS_TOL),
        outcome("f_n", f, EPS_ABS_TOL),
        outcome("eps_1", eps1, EPS_ABS_TOL),
        outcome("commutator", comm, COMMUTATOR_TOL),
    ])
}

pub fn run(spectra: &[SchmidtSpectrum], max_n: usize, seed: u64) -> Result<Vec<CheckOutcome>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for s in spectra {
        out.extend(check_spectrum(s, max_n, &mut rng)?);
    }
    Ok(out)
}

/// Fixed-width pass/fail table.
pub fn render_table(outcomes: &[CheckOutcome]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<11} {:<26} {:<9} {:>12} {:>9}  result", "check", "spectrum", "kind", "max_error", "tol");
    for o in outcomes {
        let _ = writeln!(
            out,
            "{:<11} {:<26} {:<9} {:>12.3e} {:>9.0e}  {}",
            o.check,
            o.spectrum,
            o.kind.label(),
            o.max_error,
            o.tolerance,
            if o.passed() { "PASS" } else { "FAIL" }
        );
    }
    out
}
