//! The effective coboson annihilation operator
//! `ĉ = Σ_n f_{n+1} |n⟩⟨n+1|`, with `f_{n+1} = √((n+1)·χ_{n+1}/χ_n)`.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::schmidt::{ConstituentKind, SchmidtSpectrum};
use crate::symfunc::{self, ChiRatioTable};

/// Slightly negative correction norms within `EPS_CLAMP · max(n, 10)` of
/// zero, relative to the largest term in the sum, are rounding and get
/// clamped. The ratio recurrences lose about this much per row.
pub const EPS_CLAMP: f64 = 1e-13;

/// Largest ladder the adaptive routines will grow to.
pub const MAX_LADDER_ROWS: usize = 100_000;

/// Where a ladder's coefficients come from; lets a table be regrown.
#[derive(Clone, Debug)]
pub enum LadderSource {
    Spectrum(Arc<SchmidtSpectrum>),
    /// `f_n = √n`.
    Ideal,
    /// `f_n = 1`.
    Classical,
}

#[derive(Clone, Debug, Serialize)]
pub struct LadderTable {
    kind: ConstituentKind,
    /// `f[n] = f_n`, with `f[0] = f_0 = 1` by convention.
    f: Vec<f64>,
    /// `eps_norm[n] = ⟨ε_n|ε_n⟩` for every number state `|n⟩` that exists
    /// and whose norm the table can resolve; `eps_norm[0] = 0`.
    eps_norm: Vec<f64>,
    #[serde(skip)]
    chi: Option<Arc<ChiRatioTable>>,
    #[serde(skip)]
    source: LadderSource,
}

impl LadderTable {
    /// Ratios and ladder for `n = 1..=max_n`.
    pub fn from_spectrum(s: &SchmidtSpectrum, max_n: usize) -> Result<Self> {
        let source = LadderSource::Spectrum(Arc::new(s.clone()));
        if s.kind() == ConstituentKind::Classical {
            return Ok(LadderTable { source, ..Self::classical(max_n) });
        }
        let chi = symfunc::chi_ratio_table(s, max_n)?;
        let mut table = ladder_table(&chi, s.kind(), max_n)?;
        table.source = source;
        Ok(table)
    }

    /// `f_n = 1` for all `n`: distinguishable constituents.
    pub fn classical(max_n: usize) -> Self {
        LadderTable {
            kind: ConstituentKind::Classical,
            f: vec![1.0; max_n + 1],
            eps_norm: vec![0.0; max_n],
            chi: None,
            source: LadderSource::Classical,
        }
    }

    /// `f_n = √n`: an elementary boson.
    pub fn ideal(max_n: usize) -> Self {
        let chi = ChiRatioTable::ideal(max_n);
        let mut table = ladder_table(&chi, ConstituentKind::BosonPair, max_n).expect("ideal ladder");
        table.source = LadderSource::Ideal;
        table
    }

    /// The same ladder recomputed with `max_n` rows.
    pub fn extended(&self, max_n: usize) -> Result<Self> {
        match &self.source {
            LadderSource::Spectrum(s) => Self::from_spectrum(s, max_n),
            LadderSource::Ideal => Ok(Self::ideal(max_n)),
            LadderSource::Classical => Ok(Self::classical(max_n)),
        }
    }

    pub fn kind(&self) -> ConstituentKind {
        self.kind
    }

    pub fn source(&self) -> &LadderSource {
        &self.source
    }

    pub fn chi(&self) -> Option<&ChiRatioTable> {
        self.chi.as_deref()
    }

    /// Largest `n` with a known `f_n`.
    pub fn max_n(&self) -> usize {
        self.f.len() - 1
    }

    /// `f_n`; `f(0) = 1`.
    pub fn f(&self, n: usize) -> f64 {
        self.f[n]
    }

    /// `f_0..=f_max_n`.
    pub fn coefficients(&self) -> &[f64] {
        &self.f
    }

    /// `⟨ε_n|ε_n⟩` where available.
    pub fn eps_norm(&self, n: usize) -> Option<f64> {
        self.eps_norm.get(n).copied()
    }

    pub fn eps_norms(&self) -> &[f64] {
        &self.eps_norm
    }

    /// First `n >= 1` with `f_n = 0`: `|n⟩` does not exist.
    pub fn exhausted_at(&self) -> Option<usize> {
        self.f.iter().skip(1).position(|v| *v == 0.0).map(|i| i + 1)
    }
}

/// Builds `f_n` and `⟨ε_n|ε_n⟩` for `n <= max_n` from a ratio table.
///
/// For the classical kind the table is ignored and `f ≡ 1`.
pub fn ladder_table(chi: &ChiRatioTable, kind: ConstituentKind, max_n: usize) -> Result<LadderTable> {
    if kind == ConstituentKind::Classical {
        return Ok(LadderTable::classical(max_n));
    }
    if chi.kind() != kind {
        return Err(Error::InvalidArgument(format!("chi table is {} but ladder requested {}", chi.kind(), kind)));
    }
    if chi.max_n() < max_n {
        return Err(Error::InvalidArgument(format!("chi table covers {} rows, ladder needs {max_n}", chi.max_n())));
    }
    let mut f = Vec::with_capacity(max_n + 1);
    f.push(1.0);
    for n in 0..max_n {
        f.push(((n + 1) as f64 * chi.ratio(n)).sqrt());
    }
    check_diagonal_sign(chi, kind, max_n)?;
    // ε_n needs χ_{n+1}/χ_n, and |n⟩ must exist
    let last = match chi.exhausted_at() {
        Some(at) => (at - 1).min(max_n.saturating_sub(1)),
        None => max_n.saturating_sub(1),
    };
    let mut eps_norm = Vec::with_capacity(last + 1);
    eps_norm.push(0.0);
    for n in 1..=last {
        eps_norm.push(epsilon_norm(chi, n)?);
    }
    Ok(LadderTable { kind, f, eps_norm, chi: Some(Arc::new(chi.clone())), source: LadderSource::Ideal })
}

/// `[ĉ,ĉ†]_nn − 1 = (n+1)·χ_{n+1}/χ_n − n·χ_n/χ_{n−1} − 1` must be `>= 0`
/// for boson pairs and `<= 0` for fermion pairs.
fn check_diagonal_sign(chi: &ChiRatioTable, kind: ConstituentKind, max_n: usize) -> Result<()> {
    for n in 1..max_n {
        let nf = n as f64;
        let (up, down) = ((nf + 1.0) * chi.ratio(n), nf * chi.ratio(n - 1));
        let dev = up - down - 1.0;
        let tol = EPS_CLAMP * nf.max(10.0) * up.max(down).max(1.0);
        let ok = match kind {
            ConstituentKind::BosonPair => dev >= -tol,
            ConstituentKind::FermionPair => dev <= tol,
            ConstituentKind::Classical => true,
        };
        if !ok {
            return Err(Error::SignLaw { n, deviation: dev });
        }
    }
    Ok(())
}

/// `⟨ε_n|ε_n⟩ = 1 − n·χ_n/χ_{n−1} + (n−1)·χ_{n+1}/χ_n`, the squared norm of
/// the part of `ĉ|n⟩` orthogonal to `|n−1⟩`.
pub fn epsilon_norm(chi: &ChiRatioTable, n: usize) -> Result<f64> {
    if n == 0 {
        return Ok(0.0);
    }
    if n >= chi.max_n() {
        return Err(Error::InvalidArgument(format!("epsilon_norm({n}) needs a chi table with more than {n} rows")));
    }
    if let Some(at) = chi.exhausted_at() {
        if n >= at {
            if chi.log_ratio(n).is_finite() {
                return Err(Error::InconsistentTable { n });
            }
            return Err(Error::EmptyNumberState { n });
        }
    }
    let nf = n as f64;
    let (down, up) = (nf * chi.ratio(n - 1), (nf - 1.0) * chi.ratio(n));
    let value = 1.0 - down + up;
    if value >= 0.0 {
        Ok(value)
    } else if value >= -EPS_CLAMP * nf.max(10.0) * down.max(up).max(1.0) {
        Ok(0.0)
    } else {
        Err(Error::NegativeNorm { n, value })
    }
}

/// Diagonal of `[ĉ, ĉ†]` in the number basis for `n = 0..=max_n`:
/// `f_1²` at `n = 0`, then `f_{n+1}² − f_n²`.
pub fn commutator_diagonal(ladder: &LadderTable, max_n: usize) -> Result<Vec<f64>> {
    if max_n + 1 > ladder.max_n() {
        return Err(Error::InvalidArgument(format!(
            "commutator diagonal up to {max_n} needs f_{}, ladder ends at {}",
            max_n + 1,
            ladder.max_n()
        )));
    }
    Ok(diagonal_from_coefficients(&ladder.f[..max_n + 2]))
}

/// The same diagonal for any `f_0..=f_{N+1}` slice.
pub(crate) fn diagonal_from_coefficients(f: &[f64]) -> Vec<f64> {
    (0..f.len() - 1).map(|n| if n == 0 { f[1] * f[1] } else { -(f[n] * f[n] - f[n + 1] * f[n + 1]) }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ConstituentKind::*;

    #[test]
    fn ideal_limit_is_sqrt_n() {
        let l = LadderTable::ideal(20);
        for n in 0..=20 {
            let expected = if n == 0 { 1.0 } else { (n as f64).sqrt() };
            assert_eq!(l.f(n), expected);
        }
        for (n, e) in l.eps_norms().iter().enumerate() {
            assert_eq!(*e, 0.0, "n = {n}");
        }
        assert!(commutator_diagonal(&l, 19).unwrap().iter().all(|d| (d - 1.0).abs() < 1e-13));
    }

    #[test]
    fn fermion_uniform_two() {
        let s = SchmidtSpectrum::uniform(2, FermionPair).unwrap();
        let l = LadderTable::from_spectrum(&s, 4).unwrap();
        assert!((l.f(1) - 1.0).abs() < 1e-15);
        assert!((l.f(2) - 1.0).abs() < 1e-15);
        assert_eq!(l.f(3), 0.0);
        assert_eq!(l.exhausted_at(), Some(3));
        assert!(l.eps_norm(2).unwrap().abs() < 1e-15);
        let d = commutator_diagonal(&l, 2).unwrap();
        assert!((d[0] - 1.0).abs() < 1e-15);
        assert!(d[1].abs() < 1e-15);
        assert!((d[2] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn classical_ladder() {
        let l = LadderTable::classical(10);
        assert!(l.coefficients().iter().all(|f| *f == 1.0));
        let d = commutator_diagonal(&l, 9).unwrap();
        assert_eq!(d[0], 1.0);
        assert!(d[1..].iter().all(|v| *v == 0.0));
        let s = SchmidtSpectrum::uniform(3, Classical).unwrap();
        assert!(LadderTable::from_spectrum(&s, 5).unwrap().coefficients().iter().all(|f| *f == 1.0));
    }

    #[test]
    fn epsilon_examples() {
        let chi = ChiRatioTable::ideal(10);
        for n in 1..9 {
            assert_eq!(epsilon_norm(&chi, n).unwrap(), 0.0);
        }
        let chi = symfunc::chi_ratio_table(&SchmidtSpectrum::uniform(2, FermionPair).unwrap(), 4).unwrap();
        assert!(epsilon_norm(&chi, 2).unwrap().abs() < 1e-15);
        assert!(matches!(epsilon_norm(&chi, 3), Err(Error::EmptyNumberState { n: 3 })));
        let chi = symfunc::chi_ratio_table(&SchmidtSpectrum::uniform(3, FermionPair).unwrap(), 4).unwrap();
        assert!(epsilon_norm(&chi, 2).unwrap().abs() < 1e-15);
        // ε_1 vanishes for every spectrum since χ_1 = χ_0 = 1
        let chi =
            symfunc::chi_ratio_table(&SchmidtSpectrum::from_values(&[0.6, 0.3, 0.1], BosonPair).unwrap(), 4).unwrap();
        assert!(epsilon_norm(&chi, 1).unwrap().abs() < 1e-15);
        assert!(epsilon_norm(&chi, 2).unwrap() > 0.0);
    }

    #[test]
    fn telescoping_partial_sums() {
        let s = SchmidtSpectrum::from_values(&[0.5, 0.2, 0.2, 0.1], BosonPair).unwrap();
        let l = LadderTable::from_spectrum(&s, 40).unwrap();
        let d = commutator_diagonal(&l, 39).unwrap();
        let mut partial = 0.0;
        for (n, v) in d.iter().enumerate() {
            partial += v;
            let expected = l.f(n + 1).powi(2);
            assert!((partial - expected).abs() <= 1e-12 * expected.max(1.0), "n = {n}");
        }
    }

    #[test]
    fn extension_regrows_the_same_ladder() {
        let s = SchmidtSpectrum::geometric(0.6, 1e-9, BosonPair).unwrap();
        let small = LadderTable::from_spectrum(&s, 16).unwrap();
        let big = small.extended(64).unwrap();
        assert_eq!(big.max_n(), 64);
        for n in 0..=16 {
            assert_eq!(small.f(n), big.f(n));
        }
    }

    #[test]
    fn short_ladders_reject_long_diagonals() {
        let l = LadderTable::ideal(4);
        assert!(commutator_diagonal(&l, 3).is_ok());
        assert!(commutator_diagonal(&l, 4).is_err());
    }

    #[test]
    fn deep_uniform_boson_norms_stay_clamped() {
        // ⟨ε_n|ε_n⟩ = 0 exactly here, as a difference of terms of size n²/d
        let s = SchmidtSpectrum::uniform(2, ConstituentKind::BosonPair).unwrap();
        let l = LadderTable::from_spectrum(&s, 8192).unwrap();
        for (n, e) in l.eps_norms().iter().enumerate() {
            let scale = (n * n) as f64 / 2.0;
            assert!(e.abs() <= 1e-9 * scale.max(1.0), "n = {n}: {e}");
        }
    }
}
