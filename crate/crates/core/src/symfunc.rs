//! Normalization ratios `χ_{n+1}/χ_n` of coboson number states.
//!
//! With `ĉ† = Σ_p √λ_p â†_p b̂†_p` the squared norm of `ĉ†ⁿ|0⟩` is
//! `(n!)²·g_n(λ)`, where `g = e` (elementary symmetric polynomial) for
//! fermionic constituents and `g = h` (complete homogeneous symmetric
//! polynomial) for bosonic ones. Hence `χ_n = n!·g_n(λ)` and
//!
//! ```text
//! ln(χ_{n+1}/χ_n) = ln(n+1) + ln g_{n+1} − ln g_n
//! ```
//!
//! Raw `g_n` underflow long before the ladders we need are exhausted
//! (uniform rank 4 at `n = 4096` is about `4^-4096`), so both recurrences
//! below carry `ln g_n` and never materialize `g_n` or `n!`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::schmidt::{ConstituentKind, SchmidtSpectrum};

/// Which recurrence evaluates `g_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RatioMethod {
    /// Newton's identities for bosonic spectra, mode summation for
    /// fermionic ones.
    Auto,
    /// Newton's identities, `n·g_n = Σ_k (±1)^{k-1} g_{n-k} p_k`, each step
    /// rescaled by its largest term.
    Newton,
    /// Adds one Schmidt mode at a time:
    /// `e_n ← e_n + λ e_{n-1}` and `h_n ← h_n + λ h_{n-1}`.
    ModeSummation,
}

/// Largest estimated relative error of `e_n` the signed Newton recurrence
/// may reach before it is refused.
pub const NEWTON_REL_TOL: f64 = 1e-11;

/// `ln(χ_{n+1}/χ_n)` for `n = 0..max_n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChiRatioTable {
    kind: ConstituentKind,
    log_ratio: Vec<f64>,
    exhausted_at: Option<usize>,
}

impl ChiRatioTable {
    /// All ratios equal to one: the ideal-boson limit of an infinitely
    /// entangled pair.
    pub fn ideal(max_n: usize) -> Self {
        ChiRatioTable { kind: ConstituentKind::BosonPair, log_ratio: vec![0.0; max_n], exhausted_at: None }
    }

    pub fn kind(&self) -> ConstituentKind {
        self.kind
    }

    /// Number of ratios held; covers `χ_0..=χ_{max_n}`.
    pub fn max_n(&self) -> usize {
        self.log_ratio.len()
    }

    /// `ln(χ_{n+1}/χ_n)`, `-∞` once the ladder is exhausted.
    pub fn log_ratio(&self, n: usize) -> f64 {
        self.log_ratio[n]
    }

    pub fn log_ratios(&self) -> &[f64] {
        &self.log_ratio
    }

    /// `χ_{n+1}/χ_n`, exactly zero past fermionic exhaustion.
    pub fn ratio(&self, n: usize) -> f64 {
        self.log_ratio[n].exp()
    }

    /// First `n` with `χ_n = 0`, when it falls inside the table.
    pub fn exhausted_at(&self) -> Option<usize> {
        self.exhausted_at
    }

    /// `ln χ_n` accumulated from the ratios, with `χ_0 = 1`.
    pub fn log_chi(&self, n: usize) -> f64 {
        self.log_ratio[..n].iter().sum()
    }
}

/// Ratio table with the default method.
pub fn chi_ratio_table(s: &SchmidtSpectrum, max_n: usize) -> Result<ChiRatioTable> {
    chi_ratio_table_with(s, max_n, RatioMethod::Auto)
}

/// Ratio table for `n = 0..max_n`.
///
/// For [`ConstituentKind::Classical`] spectra the ratios are not physical;
/// the returned table holds the ideal ratios and the ladder ignores it.
pub fn chi_ratio_table_with(s: &SchmidtSpectrum, max_n: usize, method: RatioMethod) -> Result<ChiRatioTable> {
    if max_n == 0 {
        return Err(Error::InvalidArgument("chi table needs max_n >= 1".into()));
    }
    let kind = s.kind();
    let fermionic = match kind {
        ConstituentKind::FermionPair => true,
        ConstituentKind::BosonPair => false,
        ConstituentKind::Classical => {
            return Ok(ChiRatioTable { kind, ..ChiRatioTable::ideal(max_n) });
        }
    };
    let method = match method {
        RatioMethod::Auto if fermionic => RatioMethod::ModeSummation,
        RatioMethod::Auto => RatioMethod::Newton,
        m => m,
    };
    let log_g = match method {
        RatioMethod::Newton => newton_log_g(s, max_n + 1, fermionic)?,
        _ => summation_log_g(s, max_n + 1, fermionic),
    };
    if let Some(n) = log_g.iter().position(|v| v.is_nan() || *v == f64::INFINITY) {
        return Err(Error::NumericInstability { n, detail: format!("ln g_{n} = {}", log_g[n]) });
    }

    let log_ratio: Vec<f64> = (0..max_n)
        .map(|n| {
            if log_g[n + 1] == f64::NEG_INFINITY {
                f64::NEG_INFINITY
            } else {
                ((n + 1) as f64).ln() + log_g[n + 1] - log_g[n]
            }
        })
        .collect();
    let exhausted_at = log_g.iter().position(|v| *v == f64::NEG_INFINITY);
    Ok(ChiRatioTable { kind, log_ratio, exhausted_at })
}

/// `ln(a + b)` from `ln a`, `ln b`.
fn log_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// `ln g_n` for `n = 0..=top`, one Schmidt mode at a time.
fn summation_log_g(s: &SchmidtSpectrum, top: usize, fermionic: bool) -> Vec<f64> {
    let mut log_g = vec![f64::NEG_INFINITY; top + 1];
    log_g[0] = 0.0;
    let mut reached = 0usize;
    for &lambda in s.lambdas() {
        let ll = lambda.ln();
        if fermionic {
            // e_n depends on the previous mode's e_{n-1}: sweep downwards
            reached = (reached + 1).min(top);
            for n in (1..=reached).rev() {
                log_g[n] = log_add(log_g[n], ll + log_g[n - 1]);
            }
        } else {
            for n in 1..=top {
                log_g[n] = log_add(log_g[n], ll + log_g[n - 1]);
            }
        }
    }
    log_g
}

/// `ln g_n` for `n = 0..=top` from Newton's identities.
fn newton_log_g(s: &SchmidtSpectrum, top: usize, fermionic: bool) -> Result<Vec<f64>> {
    let log_p = s.log_power_sums(top);
    let rank = s.rank();
    let mut log_g = vec![f64::NEG_INFINITY; top + 1];
    log_g[0] = 0.0;
    // running bound on the relative error of g_n
    let mut rel = vec![0.0; top + 1];
    let mut terms = Vec::with_capacity(top);
    for n in 1..=top {
        if fermionic && n > rank {
            // e_n of `rank` variables vanishes identically
            break;
        }
        terms.clear();
        terms.extend((1..=n).map(|k| log_g[n - k] + log_p[k - 1]));
        let scale = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !scale.is_finite() {
            return Err(Error::NumericInstability { n, detail: format!("largest Newton term has log {scale}") });
        }
        let mut sum = 0.0;
        let mut carried = 0.0;
        for (i, t) in terms.iter().enumerate() {
            let v = (t - scale).exp();
            carried += v * (rel[n - 1 - i] + (2.0 + (t - scale).abs()) * f64::EPSILON);
            if fermionic && i % 2 == 1 {
                sum -= v;
            } else {
                sum += v;
            }
        }
        if sum.is_nan() || sum <= 0.0 {
            return Err(Error::NumericInstability {
                n,
                detail: format!("signed Newton sum lost all digits (sum {sum:.1e} of unit leading term)"),
            });
        }
        rel[n] = carried / sum + f64::EPSILON;
        if fermionic && rel[n] > NEWTON_REL_TOL {
            return Err(Error::NumericInstability {
                n,
                detail: format!("estimated relative error {:.1e} of e_{n} exceeds {NEWTON_REL_TOL:.0e}", rel[n]),
            });
        }
        log_g[n] = scale + sum.ln() - (n as f64).ln();
    }
    Ok(log_g)
}

/// `χ_{n+1}/χ_n` for the uniform spectrum of rank `d`: `(d−n)/d` for
/// fermions, `(d+n)/d` for bosons.
pub fn chi_ratio_uniform_closed_form(d: usize, kind: ConstituentKind, n: usize) -> Result<f64> {
    if d == 0 || n == 0 {
        return Err(Error::InvalidArgument(format!("closed form needs d >= 1 and n >= 1 (d = {d}, n = {n})")));
    }
    let (d, nf) = (d as f64, n as f64);
    match kind {
        ConstituentKind::FermionPair if (n as f64) <= d => Ok((d - nf) / d),
        ConstituentKind::FermionPair => {
            Err(Error::InvalidArgument(format!("fermionic closed form needs n <= d (n = {n}, d = {d})")))
        }
        ConstituentKind::BosonPair => Ok((d + nf) / d),
        ConstituentKind::Classical => Err(Error::InvalidArgument("no chi ratios for the classical ladder".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ConstituentKind::*;

    fn uniform(d: usize, kind: ConstituentKind) -> SchmidtSpectrum {
        SchmidtSpectrum::uniform(d, kind).unwrap()
    }

    /// e_n and h_n of a small list by explicit enumeration of index sets.
    fn brute_g(lams: &[f64], n: usize, fermionic: bool) -> f64 {
        fn rec(lams: &[f64], start: usize, left: usize, repeat: bool) -> f64 {
            if left == 0 {
                return 1.0;
            }
            (start..lams.len()).map(|i| lams[i] * rec(lams, if repeat { i } else { i + 1 }, left - 1, repeat)).sum()
        }
        rec(lams, 0, n, !fermionic)
    }

    #[test]
    fn fermion_uniform_two() {
        let t = chi_ratio_table(&uniform(2, FermionPair), 4).unwrap();
        assert!((t.ratio(0) - 1.0).abs() < 1e-15);
        assert!((t.ratio(1) - 0.5).abs() < 1e-15);
        assert_eq!(t.ratio(2), 0.0);
        assert_eq!(t.log_ratio(2), f64::NEG_INFINITY);
        assert_eq!(t.ratio(3), 0.0);
        assert_eq!(t.exhausted_at(), Some(3));
    }

    #[test]
    fn boson_uniform_two() {
        let t = chi_ratio_table(&uniform(2, BosonPair), 4).unwrap();
        assert!((t.ratio(1) - 1.5).abs() < 1e-14);
        assert_eq!(t.exhausted_at(), None);
    }

    #[test]
    fn rank_one_spectrum() {
        let s = SchmidtSpectrum::from_values(&[1.0], FermionPair).unwrap();
        let t = chi_ratio_table(&s, 3).unwrap();
        assert_eq!(t.ratio(1), 0.0);
        assert_eq!(t.exhausted_at(), Some(2));

        let t = chi_ratio_table(&s.with_kind(BosonPair), 10).unwrap();
        for n in 0..10 {
            assert!((t.ratio(n) - (n + 1) as f64).abs() < 1e-12 * (n + 1) as f64);
        }
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(chi_ratio_uniform_closed_form(2, FermionPair, 1).unwrap(), 0.5);
        assert_eq!(chi_ratio_uniform_closed_form(2, BosonPair, 1).unwrap(), 1.5);
        assert_eq!(chi_ratio_uniform_closed_form(7, FermionPair, 7).unwrap(), 0.0);
        assert!(chi_ratio_uniform_closed_form(7, FermionPair, 8).is_err());
        assert!(chi_ratio_uniform_closed_form(7, BosonPair, 0).is_err());
    }

    #[test]
    fn both_methods_match_enumeration() {
        let lams = [0.4, 0.25, 0.2, 0.1, 0.05];
        for kind in [FermionPair, BosonPair] {
            let s = SchmidtSpectrum::from_values(&lams, kind).unwrap();
            for method in [RatioMethod::Newton, RatioMethod::ModeSummation] {
                let t = chi_ratio_table_with(&s, 5, method).unwrap();
                for n in 0..5 {
                    let fermionic = kind == FermionPair;
                    let g0 = brute_g(&lams, n, fermionic);
                    let g1 = brute_g(&lams, n + 1, fermionic);
                    let expected = (n + 1) as f64 * g1 / g0;
                    let got = t.ratio(n);
                    assert!((got - expected).abs() <= 1e-12 * expected.max(1e-300), "{kind:?} {method:?} n={n}");
                }
            }
        }
    }

    #[test]
    fn newton_flags_fermionic_cancellation() {
        // alternating Newton sums lose every digit near exhaustion of a
        // wide uniform spectrum
        let err = chi_ratio_table_with(&uniform(60, FermionPair), 60, RatioMethod::Newton).unwrap_err();
        assert!(matches!(err, Error::NumericInstability { .. }));
        assert!(chi_ratio_table_with(&uniform(60, FermionPair), 60, RatioMethod::ModeSummation).is_ok());
    }

    #[test]
    fn deep_tables_stay_finite() {
        let t = chi_ratio_table(&uniform(4, BosonPair), 4096).unwrap();
        let last = t.ratio(4095);
        assert!((last - (4.0 + 4095.0) / 4.0).abs() < 1e-9 * last);
        let g = SchmidtSpectrum::geometric(0.9, 1e-12, FermionPair).unwrap();
        let t = chi_ratio_table(&g, 300).unwrap();
        assert_eq!(t.exhausted_at(), Some(264));
        assert!(t.log_ratios()[..263].iter().all(|v| v.is_finite()));
    }

    #[test]
    fn newton_and_summation_agree_for_bosons() {
        let s = SchmidtSpectrum::geometric(0.7, 1e-10, BosonPair).unwrap();
        let a = chi_ratio_table_with(&s, 400, RatioMethod::Newton).unwrap();
        let b = chi_ratio_table_with(&s, 400, RatioMethod::ModeSummation).unwrap();
        for n in 0..400 {
            assert!((a.log_ratio(n) - b.log_ratio(n)).abs() < 1e-11, "n = {n}");
        }
    }
}
