//! Coherent states of cobosons: eigenstates of the effective annihilation
//! operator, and the observables evaluated on them.
//!
//! The eigenvalue equation `ĉ|ψ⟩ = γ|ψ⟩` fixes `γψ_{n−1} = f_n ψ_n`, so with
//! `ψ_0 = 1`
//!
//! ```text
//! ψ_n = γⁿ / (f_1 ⋯ f_n),        𝒩 = Σ_n |ψ_n|²
//! ```
//!
//! Coefficients are held as `ln|ψ_n|` with phase `n·arg γ`; `𝒩` is summed
//! smallest term first.
//!
//! Ladders that never vanish (bosonic and classical constituents) are cut at
//! the first index `N` where a geometric bound on the discarded tail and the
//! eigen-equation defect `|γ|·|ψ_N|/√𝒩` both fall below `tail_tol`.
//! Fermionic ladders terminate at the Schmidt rank, where `f_{rank+1} = 0`:
//! the number states stop there, and the state is the finite vector on
//! `0..=rank`. It is an eigenstate up to the same defect, which must again be
//! below `tail_tol`, and `|γ|` must stay below the smallest `f_n` of the
//! support so the coefficients decay.

use std::borrow::Cow;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ladder::{self, LadderSource, LadderTable, MAX_LADDER_ROWS};
use crate::schmidt::ConstituentKind;

/// The convergence radius is read off the trailing `1/WINDOW_FRACTION` of a
/// ladder.
pub const WINDOW_FRACTION: usize = 4;

/// Trailing windows flatter than this are treated as converged.
pub const FLAT_SPREAD: f64 = 1e-9;

/// A growing window counts as unbounded when its increase is at least this
/// fraction of the increase over the window of the half-length table.
const GROWTH_PERSISTENCE: f64 = 0.9;

/// Estimate of `lim_{n→∞} |f_n|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Radius {
    /// Bounded ladder; the value is the minimum over the trailing window.
    Finite(f64),
    /// `f_n` grows without bound (bosonic constituents, elementary bosons).
    Unbounded,
    /// `f_at = 0`: the number states stop at `at − 1`. `support` is the
    /// smallest `f_n` for `1 <= n < at`.
    Exhausted { at: usize, support: f64 },
}

impl Radius {
    /// The limit itself: `0` for an exhausted ladder.
    pub fn limit(&self) -> f64 {
        match *self {
            Radius::Finite(r) => r,
            Radius::Unbounded => f64::INFINITY,
            Radius::Exhausted { .. } => 0.0,
        }
    }

    /// Largest `|γ|` (exclusive) for which a state is built.
    pub fn admissible(&self) -> f64 {
        match *self {
            Radius::Finite(r) => r,
            Radius::Unbounded => f64::INFINITY,
            Radius::Exhausted { support, .. } => support,
        }
    }
}

/// Estimate of the maximum occupancy number from `lim |f_n|²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum MonBound {
    Finite(f64),
    Unbounded,
    /// Exhausted ladder; the bound is taken over the ladder's support.
    Exhausted {
        support: f64,
    },
}

impl MonBound {
    pub fn from_radius(radius: Radius) -> Self {
        match radius {
            Radius::Finite(r) => MonBound::Finite(r * r),
            Radius::Unbounded => MonBound::Unbounded,
            Radius::Exhausted { support, .. } => MonBound::Exhausted { support: support * support },
        }
    }

    /// Numeric value, `∞` when unbounded.
    pub fn value(&self) -> f64 {
        match *self {
            MonBound::Finite(v) | MonBound::Exhausted { support: v } => v,
            MonBound::Unbounded => f64::INFINITY,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            MonBound::Finite(_) => "FINITE",
            MonBound::Unbounded => "UNBOUNDED",
            MonBound::Exhausted { .. } => "EXHAUSTED",
        }
    }
}

/// Radius estimate from the table as given.
///
/// Returns [`Radius::Exhausted`] when some `f_n` vanishes, [`Radius::Unbounded`]
/// when the trailing window keeps growing at least as fast as it did at half
/// the table length, and otherwise the minimum over the trailing window.
pub fn convergence_radius(ladder: &LadderTable) -> Radius {
    window_estimate(ladder.coefficients()).0
}

/// `(estimate, settled)`; settled means the trailing window is monotone or
/// flat to within [`FLAT_SPREAD`].
fn window_estimate(f: &[f64]) -> (Radius, bool) {
    if let Some(i) = f.iter().skip(1).position(|v| *v == 0.0) {
        let at = i + 1;
        let support = f[1..at].iter().copied().fold(f64::INFINITY, f64::min);
        let support = if support.is_finite() { support } else { 0.0 };
        return (Radius::Exhausted { at, support }, true);
    }
    let m = f.len() - 1;
    if m < 2 {
        return (Radius::Finite(f[m]), false);
    }
    let start = m - (m / WINDOW_FRACTION).max(1);
    let window = &f[start..=m];
    let min = window.iter().copied().fold(f64::INFINITY, f64::min);
    let max = window.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let rising = window.windows(2).all(|w| w[1] >= w[0]);
    let falling = window.windows(2).all(|w| w[1] <= w[0]);
    let flat = max - min <= FLAT_SPREAD * max.max(1.0);
    if rising && !flat {
        let half = m / 2;
        let half_start = half - (half / WINDOW_FRACTION).max(1);
        let growth = f[m] - f[start];
        let half_growth = f[half] - f[half_start];
        if growth >= GROWTH_PERSISTENCE * half_growth {
            return (Radius::Unbounded, true);
        }
    }
    (Radius::Finite(min), rising || falling || flat)
}

/// Radius estimate after growing the table (doubling, up to
/// [`MAX_LADDER_ROWS`]) until the trailing window settles. Fermionic
/// ladders are always grown far enough to see their exhaustion.
pub fn settled_radius(ladder: &LadderTable) -> Result<(Radius, Cow<'_, LadderTable>)> {
    let mut table = Cow::Borrowed(ladder);
    if let LadderSource::Spectrum(s) = ladder.source() {
        if s.kind() == ConstituentKind::FermionPair && ladder.max_n() < s.rank() + 1 {
            table = Cow::Owned(ladder.extended(s.rank() + 1)?);
        }
    }
    loop {
        let (radius, settled) = window_estimate(table.coefficients());
        let m = table.max_n();
        if settled || m >= MAX_LADDER_ROWS {
            return Ok((radius, table));
        }
        table = Cow::Owned(table.extended((2 * m).clamp(8, MAX_LADDER_ROWS))?);
    }
}

/// `lim |f_n|²` as an estimate of the largest eigenvalue of `ĉ†ĉ`.
pub fn mon_lower_bound(ladder: &LadderTable) -> MonBound {
    MonBound::from_radius(convergence_radius(ladder))
}

/// Eigenstate of the effective annihilation operator, truncated at
/// `cutoff`.
#[derive(Clone, Debug)]
pub struct CobosonCoherentState {
    gamma: Complex64,
    kind: ConstituentKind,
    log_abs_psi: Vec<f64>,
    tail_mass_bound: f64,
    log_norm: f64,
    /// `f_0..=f_{cutoff+1}`.
    f: Vec<f64>,
    radius: Radius,
}

/// Builds the coherent state with eigenvalue `gamma` on `ladder`.
///
/// `tail_tol` bounds both the probability discarded beyond the cutoff and
/// the residual `‖(ĉ − γ)|ψ⟩‖` of the truncated state; the value reached is
/// reported as [`CobosonCoherentState::tail_mass_bound`].
pub fn build(gamma: Complex64, ladder: &LadderTable, tail_tol: f64) -> Result<CobosonCoherentState> {
    if !(gamma.re.is_finite() && gamma.im.is_finite()) {
        return Err(Error::InvalidArgument(format!("gamma must be finite, got {gamma}")));
    }
    if tail_tol.is_nan() || tail_tol <= 0.0 {
        return Err(Error::InvalidArgument(format!("tail_tol must be positive, got {tail_tol}")));
    }
    if ladder.max_n() < 1 {
        return Err(Error::InvalidArgument("ladder must contain f_1".into()));
    }
    let (radius, ladder) = settled_radius(ladder)?;
    let g = gamma.norm();
    let kind = ladder.kind();

    if g == 0.0 {
        return Ok(CobosonCoherentState {
            gamma,
            kind,
            log_abs_psi: vec![0.0],
            tail_mass_bound: 0.0,
            log_norm: 0.0,
            f: ladder.coefficients()[..2].to_vec(),
            radius,
        });
    }

    match radius {
        Radius::Exhausted { at, support } => {
            if g >= support {
                return Err(Error::ExhaustedLadder {
                    exhausted_at: at,
                    detail: format!("|gamma| = {g} must stay below min f_n = {support} over the ladder's support"),
                });
            }
            build_on_support(gamma, &ladder, at, tail_tol, radius)
        }
        Radius::Finite(r) if g >= r => Err(Error::DivergentEigenvalue { gamma_abs: g, radius: r }),
        _ => build_with_tail(gamma, ladder.into_owned(), tail_tol, radius),
    }
}

fn build_on_support(
    gamma: Complex64,
    ladder: &LadderTable,
    at: usize,
    tail_tol: f64,
    radius: Radius,
) -> Result<CobosonCoherentState> {
    let g = gamma.norm();
    let f = &ladder.coefficients()[..=at];
    let log_abs_psi = log_coefficients(g, &f[..at]);
    let log_norm = log_sum_sq(&log_abs_psi);
    let cutoff = at - 1;
    let defect = g * (log_abs_psi[cutoff] - 0.5 * log_norm).exp();
    if defect > tail_tol {
        return Err(Error::ExhaustedLadder {
            exhausted_at: at,
            detail: format!("truncation defect {defect:e} of the finite ladder exceeds tail_tol {tail_tol:e}"),
        });
    }
    Ok(CobosonCoherentState {
        gamma,
        kind: ladder.kind(),
        log_abs_psi,
        tail_mass_bound: defect,
        log_norm,
        f: f.to_vec(),
        radius,
    })
}

fn build_with_tail(
    gamma: Complex64,
    mut ladder: LadderTable,
    tail_tol: f64,
    radius: Radius,
) -> Result<CobosonCoherentState> {
    let g = gamma.norm();
    let ln_g = g.ln();
    let mut suffix_min = suffix_minima(ladder.coefficients());
    let mut log_abs_psi: Vec<f64> = vec![0.0];
    let mut log_partial = 0.0;
    let mut n = 0usize;
    loop {
        if n + 1 > ladder.max_n() {
            let m = ladder.max_n();
            if m >= MAX_LADDER_ROWS {
                return Err(Error::TailNotBounded { max_n: m });
            }
            ladder = ladder.extended((2 * m).min(MAX_LADDER_ROWS))?;
            suffix_min = suffix_minima(ladder.coefficients());
        }
        if n > 0 {
            let l = log_abs_psi[n - 1] + ln_g - ladder.f(n).ln();
            log_abs_psi.push(l);
            log_partial = log_add(log_partial, 2.0 * l);
        }
        let f_min = suffix_min[n + 1].min(floor_beyond(&ladder));
        let ratio = g / f_min;
        if ratio < 1.0 {
            let w = (2.0 * log_abs_psi[n] - log_partial).exp();
            let tail = w * ratio * ratio / (1.0 - ratio * ratio);
            let defect = g * w.sqrt();
            let bound = tail.max(defect);
            if bound <= tail_tol {
                let log_norm = log_sum_sq(&log_abs_psi);
                return Ok(CobosonCoherentState {
                    gamma,
                    kind: ladder.kind(),
                    log_abs_psi,
                    tail_mass_bound: bound,
                    log_norm,
                    f: ladder.coefficients()[..n + 2].to_vec(),
                    radius,
                });
            }
        }
        n += 1;
    }
}

/// Lower bound on `f_n` for every `n` past the end of the table.
fn floor_beyond(ladder: &LadderTable) -> f64 {
    match ladder.kind() {
        ConstituentKind::Classical => 1.0,
        // χ_{n+1}/χ_n >= 1 gives f_n >= √n
        ConstituentKind::BosonPair => ((ladder.max_n() + 1) as f64).sqrt(),
        ConstituentKind::FermionPair => 0.0,
    }
}

fn suffix_minima(f: &[f64]) -> Vec<f64> {
    let mut out = vec![f64::INFINITY; f.len() + 1];
    for i in (0..f.len()).rev() {
        out[i] = out[i + 1].min(f[i]);
    }
    out
}

/// `ln|ψ_n|` for `n = 0..f.len()`, using `f[1..]`.
fn log_coefficients(g: f64, f: &[f64]) -> Vec<f64> {
    let ln_g = g.ln();
    let mut out = Vec::with_capacity(f.len());
    out.push(0.0);
    for n in 1..f.len() {
        out.push(out[n - 1] + ln_g - f[n].ln());
    }
    out
}

fn log_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// `ln Σ exp(2·l_n)`, summed smallest term first.
fn log_sum_sq(log_abs: &[f64]) -> f64 {
    let mut doubled: Vec<f64> = log_abs.iter().map(|l| 2.0 * l).collect();
    doubled.sort_by(f64::total_cmp);
    let top = *doubled.last().expect("non-empty");
    let s: f64 = doubled.iter().map(|x| (x - top).exp()).sum();
    top + s.ln()
}

impl CobosonCoherentState {
    pub fn gamma(&self) -> Complex64 {
        self.gamma
    }

    pub fn kind(&self) -> ConstituentKind {
        self.kind
    }

    /// Largest retained `n`.
    pub fn cutoff(&self) -> usize {
        self.log_abs_psi.len() - 1
    }

    pub fn tail_mass_bound(&self) -> f64 {
        self.tail_mass_bound
    }

    pub fn radius(&self) -> Radius {
        self.radius
    }

    /// `ln|ψ_n|` with `ψ_0 = 1`.
    pub fn log_abs_psi(&self) -> &[f64] {
        &self.log_abs_psi
    }

    /// `ln 𝒩`.
    pub fn log_norm_constant(&self) -> f64 {
        self.log_norm
    }

    /// `𝒩 = Σ |ψ_n/ψ_0|²` over the retained coefficients.
    pub fn norm_constant(&self) -> f64 {
        self.log_norm.exp()
    }

    /// `f_0..=f_{cutoff+1}` as used by this state.
    pub fn coefficients(&self) -> &[f64] {
        &self.f
    }

    /// Unnormalized `ψ_n = γⁿ / Π f_i`.
    pub fn psi(&self, n: usize) -> Complex64 {
        Complex64::from_polar(self.log_abs_psi[n].exp(), n as f64 * self.gamma.arg())
    }

    /// Occupation probabilities `|ψ_n|²/𝒩`.
    pub fn weights(&self) -> Vec<f64> {
        self.log_abs_psi.iter().map(|l| (2.0 * l - self.log_norm).exp()).collect()
    }

    /// Normalized amplitudes `ψ_n/√𝒩`.
    pub fn amplitudes(&self) -> Vec<Complex64> {
        let phase = self.gamma.arg();
        self.log_abs_psi
            .iter()
            .enumerate()
            .map(|(n, l)| Complex64::from_polar((l - 0.5 * self.log_norm).exp(), n as f64 * phase))
            .collect()
    }

    /// Largest `| ln|γψ_{n−1}| − ln|f_n ψ_n| |` over the retained coefficients.
    pub fn recurrence_residual(&self) -> f64 {
        let ln_g = self.gamma.norm().ln();
        (1..self.log_abs_psi.len())
            .map(|n| ((ln_g + self.log_abs_psi[n - 1]) - (self.f[n].ln() + self.log_abs_psi[n])).abs())
            .fold(0.0, f64::max)
    }

    /// `‖(ĉ − γ)|ψ⟩‖` with `ĉ` applied as an explicit matrix.
    pub fn eigen_residual(&self) -> f64 {
        let a = self.amplitudes();
        let n_max = a.len() - 1;
        (0..=n_max)
            .map(|n| {
                let lowered = if n < n_max { self.f[n + 1] * a[n + 1] } else { Complex64::new(0.0, 0.0) };
                (lowered - self.gamma * a[n]).norm_sqr()
            })
            .sum::<f64>()
            .sqrt()
    }

    /// `⟨[ĉ, ĉ†]⟩ = (1/𝒩)[f_1² − Σ_{n≥1} |γ|^{2n}/Π_{i≤n} f_i² · (f_n² − f_{n+1}²)]`.
    pub fn expect_commutator(&self) -> f64 {
        let ln_g = self.gamma.norm().ln();
        let f = &self.f;
        let mut log_prod = 0.0;
        let mut terms = Vec::with_capacity(self.cutoff());
        for n in 1..=self.cutoff() {
            log_prod += f[n].ln();
            let weight = (2.0 * (n as f64 * ln_g - log_prod) - self.log_norm).exp();
            terms.push(weight * (f[n] * f[n] - f[n + 1] * f[n + 1]));
        }
        let head = f[1] * f[1] * (-self.log_norm).exp();
        head - terms.iter().rev().sum::<f64>()
    }

    /// `⟨[ĉ, ĉ†]⟩` as the commutator diagonal weighted by `|ψ_n|²/𝒩`.
    pub fn expect_commutator_diagonal(&self) -> f64 {
        let diag = ladder::diagonal_from_coefficients(&self.f);
        let w = self.weights();
        w.iter().zip(&diag).rev().map(|(w, d)| w * d).sum()
    }

    /// `(ΔX)² = (ΔP)² = ⟨[ĉ, ĉ†]⟩ / 4`.
    pub fn quadrature_variances(&self) -> (f64, f64) {
        let v = 0.25 * self.expect_commutator();
        (v, v)
    }

    /// Quadrature variances from the moments `⟨ĉ⟩`, `⟨ĉ²⟩`, `⟨ĉĉ†⟩`, `⟨ĉ†ĉ⟩`
    /// of the truncated state, with `X = (ĉ+ĉ†)/2` and `P = (ĉ−ĉ†)/2i`.
    pub fn quadrature_variances_direct(&self) -> (f64, f64) {
        let m = self.moments();
        let sym = m.c_cdag + m.cdag_c;
        let var_x = 0.25 * (2.0 * m.c2.re + sym) - m.c1.re * m.c1.re;
        let var_p = 0.25 * (-2.0 * m.c2.re + sym) - m.c1.im * m.c1.im;
        (var_x, var_p)
    }

    /// `Q_eff = ⟨[ĉ, ĉ†]⟩ − 1`; undefined at `γ = 0`.
    pub fn mandel_q_eff(&self) -> Result<f64> {
        if self.gamma.norm() == 0.0 {
            return Err(Error::UndefinedStatistic("Mandel's Q at gamma = 0"));
        }
        Ok(self.expect_commutator() - 1.0)
    }

    /// `(⟨n̂²⟩ − ⟨n̂⟩²)/⟨n̂⟩ − 1` with `n̂ = ĉ†ĉ` on the truncated state.
    pub fn mandel_q_direct(&self) -> Result<f64> {
        if self.gamma.norm() == 0.0 {
            return Err(Error::UndefinedStatistic("Mandel's Q at gamma = 0"));
        }
        let w = self.weights();
        let (mut n1, mut n2) = (0.0, 0.0);
        for k in (1..w.len()).rev() {
            let f2 = self.f[k] * self.f[k];
            n1 += f2 * w[k];
            n2 += f2 * f2 * w[k];
        }
        Ok((n2 - n1 * n1) / n1 - 1.0)
    }

    /// `⟨ĉ†ĉ⟩ = Σ f_n² |ψ_n|²/𝒩`.
    pub fn mean_number(&self) -> f64 {
        self.moments().cdag_c
    }

    /// Occupancy bound of the ladder this state was built on.
    pub fn mon_bound(&self) -> MonBound {
        MonBound::from_radius(self.radius)
    }

    fn moments(&self) -> Moments {
        let a = self.amplitudes();
        let f = &self.f;
        let n_max = a.len() - 1;
        let mut m = Moments::default();
        for n in (0..=n_max).rev() {
            let p = a[n].norm_sqr();
            m.c_cdag += f[n + 1] * f[n + 1] * p;
            if n > 0 {
                m.cdag_c += f[n] * f[n] * p;
            }
            if n < n_max {
                m.c1 += a[n].conj() * f[n + 1] * a[n + 1];
            }
            if n + 1 < n_max {
                m.c2 += a[n].conj() * f[n + 1] * f[n + 2] * a[n + 2];
            }
        }
        m
    }

    /// All observables in one record.
    pub fn report(&self, spectrum_descriptor: &str) -> ObservablesReport {
        let (var_x, var_p) = self.quadrature_variances();
        ObservablesReport {
            spectrum_descriptor: spectrum_descriptor.to_string(),
            kind: self.kind,
            gamma: self.gamma,
            commutator_expectation: self.expect_commutator(),
            var_x,
            var_p,
            mandel_q_eff: self.mandel_q_eff().ok(),
            mean_n: self.mean_number(),
            mon_lower_bound: self.mon_bound(),
            cutoff_n: self.cutoff(),
            tail_mass_bound: self.tail_mass_bound,
        }
    }
}

#[derive(Default)]
struct Moments {
    c1: Complex64,
    c2: Complex64,
    c_cdag: f64,
    cdag_c: f64,
}

/// Observables of one coherent state.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservablesReport {
    pub spectrum_descriptor: String,
    pub kind: ConstituentKind,
    pub gamma: Complex64,
    pub commutator_expectation: f64,
    pub var_x: f64,
    pub var_p: f64,
    /// `None` at `γ = 0`, where it is undefined.
    pub mandel_q_eff: Option<f64>,
    pub mean_n: f64,
    pub mon_lower_bound: MonBound,
    pub cutoff_n: usize,
    pub tail_mass_bound: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schmidt::SchmidtSpectrum;
    use ConstituentKind::*;

    fn real(g: f64) -> Complex64 {
        Complex64::new(g, 0.0)
    }

    fn spectrum_ladder(s: SchmidtSpectrum, max_n: usize) -> LadderTable {
        LadderTable::from_spectrum(&s, max_n).unwrap()
    }

    #[test]
    fn radius_examples() {
        assert_eq!(convergence_radius(&LadderTable::classical(64)), Radius::Finite(1.0));
        assert_eq!(convergence_radius(&LadderTable::ideal(64)), Radius::Unbounded);
        let l = spectrum_ladder(SchmidtSpectrum::uniform(2, FermionPair).unwrap(), 16);
        let r = convergence_radius(&l);
        assert_eq!(r.limit(), 0.0);
        assert!(matches!(r, Radius::Exhausted { at: 3, .. }));
        let l = spectrum_ladder(SchmidtSpectrum::uniform(2, BosonPair).unwrap(), 64);
        assert_eq!(convergence_radius(&l), Radius::Unbounded);
    }

    #[test]
    fn bounded_increasing_ladder_is_finite() {
        // f_n → 2 from below: window growth shrinks with table length
        let f: Vec<f64> = (0..=256).map(|n| if n == 0 { 1.0 } else { 2.0 - 1.0 / n as f64 }).collect();
        let (r, settled) = window_estimate(&f);
        assert!(settled);
        match r {
            Radius::Finite(v) => assert!(v > 1.99 && v < 2.0),
            other => panic!("{other:?}"),
        }
        let f: Vec<f64> = (0..=256).map(|n| (1.0 + n as f64).ln()).collect();
        assert_eq!(window_estimate(&f).0, Radius::Unbounded);
    }

    #[test]
    fn mon_examples() {
        assert_eq!(mon_lower_bound(&LadderTable::classical(64)), MonBound::Finite(1.0));
        assert_eq!(mon_lower_bound(&LadderTable::ideal(64)), MonBound::Unbounded);
        let l = spectrum_ladder(SchmidtSpectrum::uniform(2, BosonPair).unwrap(), 64);
        assert_eq!(mon_lower_bound(&l), MonBound::Unbounded);
    }

    #[test]
    fn vacuum() {
        for ladder in [LadderTable::classical(16), LadderTable::ideal(16)] {
            let s = build(real(0.0), &ladder, 1e-12).unwrap();
            assert_eq!(s.norm_constant(), 1.0);
            assert_eq!(s.cutoff(), 0);
            assert_eq!(s.mean_number(), 0.0);
            assert_eq!(s.expect_commutator(), 1.0);
            assert!(matches!(s.mandel_q_eff(), Err(Error::UndefinedStatistic(_))));
        }
    }

    #[test]
    fn classical_half() {
        let s = build(real(0.5), &LadderTable::classical(16), 1e-12).unwrap();
        for n in 0..=s.cutoff() {
            assert!((s.psi(n).re - 0.5_f64.powi(n as i32)).abs() < 1e-15);
        }
        assert!((s.norm_constant() - 4.0 / 3.0).abs() < 1e-12);
        assert!((s.expect_commutator() - 0.75).abs() < 1e-12);
        assert!((s.quadrature_variances().0 - 0.1875).abs() < 1e-12);
        assert!((s.mandel_q_eff().unwrap() + 0.25).abs() < 1e-12);
        assert!((s.mean_number() - 0.25).abs() < 1e-12);
        assert_eq!(s.mon_bound(), MonBound::Finite(1.0));
    }

    #[test]
    fn ideal_is_poissonian() {
        let s = build(real(1.0), &LadderTable::ideal(16), 1e-12).unwrap();
        assert!((s.norm_constant() - std::f64::consts::E).abs() < 1e-12);
        let w = s.weights();
        let mut factorial = 1.0;
        for (n, wn) in w.iter().enumerate() {
            if n > 0 {
                factorial *= n as f64;
            }
            assert!((wn - (-1.0_f64).exp() / factorial).abs() < 1e-13);
        }
        assert!((s.expect_commutator() - 1.0).abs() < 1e-12);
        assert!((s.mean_number() - 1.0).abs() < 1e-12);
        let s = build(real(0.7), &LadderTable::ideal(16), 1e-12).unwrap();
        assert!(s.mandel_q_eff().unwrap().abs() < 1e-12);
        let (vx, vp) = s.quadrature_variances_direct();
        assert!((vx - 0.25).abs() < 1e-12 && (vp - 0.25).abs() < 1e-12);
    }

    #[test]
    fn divergent_gamma_is_rejected() {
        let err = build(real(1.0), &LadderTable::classical(16), 1e-12).unwrap_err();
        assert!(matches!(err, Error::DivergentEigenvalue { .. }));
        let err = build(real(1.2), &LadderTable::classical(16), 1e-12).unwrap_err();
        assert!(matches!(err, Error::DivergentEigenvalue { .. }));
    }

    #[test]
    fn exhausted_ladders() {
        // f_1 = f_2 = 1, f_3 = 0: the only exact eigenstate is the vacuum
        let l = spectrum_ladder(SchmidtSpectrum::uniform(2, FermionPair).unwrap(), 8);
        assert!(matches!(build(real(0.3), &l, 1e-12), Err(Error::ExhaustedLadder { exhausted_at: 3, .. })));
        assert!(build(real(0.0), &l, 1e-12).is_ok());
        // |γ| above the smallest f on the support
        let l = spectrum_ladder(SchmidtSpectrum::uniform(50, FermionPair).unwrap(), 64);
        assert!(matches!(build(real(1.0), &l, 1e-12), Err(Error::ExhaustedLadder { .. })));
        let s = build(real(0.5), &l, 1e-12).unwrap();
        assert_eq!(s.cutoff(), 50);
        assert!(s.tail_mass_bound() <= 1e-12);
        assert!(s.expect_commutator() < 1.0);
    }

    #[test]
    fn fermionic_ladder_is_grown_to_its_rank() {
        let l = spectrum_ladder(SchmidtSpectrum::uniform(40, FermionPair).unwrap(), 8);
        let s = build(real(0.5), &l, 1e-12).unwrap();
        assert_eq!(s.cutoff(), 40);
    }

    #[test]
    fn short_bosonic_ladder_is_extended() {
        let l = spectrum_ladder(SchmidtSpectrum::uniform(3, BosonPair).unwrap(), 8);
        let s = build(real(2.0), &l, 1e-12).unwrap();
        assert!(s.cutoff() > 8);
        assert!(s.eigen_residual() <= s.tail_mass_bound() + 1e-10);
    }

    #[test]
    fn two_paths_agree() {
        let cases = [
            (LadderTable::from_spectrum(&SchmidtSpectrum::uniform(2, BosonPair).unwrap(), 64).unwrap(), 0.5),
            (LadderTable::from_spectrum(&SchmidtSpectrum::uniform(20, FermionPair).unwrap(), 64).unwrap(), 0.3),
            (LadderTable::from_spectrum(&SchmidtSpectrum::uniform(3, BosonPair).unwrap(), 64).unwrap(), 0.4),
        ];
        for (ladder, g) in cases {
            let s = build(real(g), &ladder, 1e-12).unwrap();
            let c = s.expect_commutator();
            assert!((c - s.expect_commutator_diagonal()).abs() < 1e-12);
            let (vx, vp) = s.quadrature_variances_direct();
            assert!((vx - c / 4.0).abs() < 1e-10 && (vp - c / 4.0).abs() < 1e-10);
            assert!((s.mandel_q_eff().unwrap() - s.mandel_q_direct().unwrap()).abs() < 1e-10);
            assert!((s.mean_number() - g * g).abs() < 1e-10);
            assert!(s.recurrence_residual() < 1e-12);
            match ladder.kind() {
                BosonPair => assert!(c > 1.0 && s.mandel_q_eff().unwrap() > 0.0),
                FermionPair => assert!(c < 1.0 && vx < 0.25),
                Classical => unreachable!(),
            }
        }
    }

    #[test]
    fn observables_depend_on_modulus_only() {
        let l = LadderTable::from_spectrum(&SchmidtSpectrum::uniform(4, BosonPair).unwrap(), 64).unwrap();
        let base = build(real(0.8), &l, 1e-12).unwrap();
        for theta in [0.3, 1.0, 2.5, -1.7] {
            let s = build(Complex64::from_polar(0.8, theta), &l, 1e-12).unwrap();
            assert!((s.expect_commutator() - base.expect_commutator()).abs() < 1e-13);
            let (vx, vp) = s.quadrature_variances_direct();
            assert!((vx - base.quadrature_variances().0).abs() < 1e-10);
            assert!((vp - base.quadrature_variances().1).abs() < 1e-10);
            assert!((s.mean_number() - base.mean_number()).abs() < 1e-13);
            assert!(s.eigen_residual() <= s.tail_mass_bound() + 1e-10);
        }
    }
}
