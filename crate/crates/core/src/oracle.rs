//! Exact second quantization over a few Schmidt mode pairs.
//!
//! States are sparse maps from occupation vectors to complex amplitudes.
//! Each of the `S` mode pairs contributes two single-particle modes, `a_p`
//! and `b_p`, and every operator is assembled from single-mode creation and
//! annihilation operators:
//!
//! ```text
//! ĉ† = Σ_p √λ_p a†_p b†_p        ĉ = Σ_p √λ_p b_p a_p
//! ```
//!
//! Fermionic signs follow a Jordan–Wigner string over a fixed global mode
//! order ([`ModeOrdering`]). Nothing here uses the symmetric-function closed
//! forms; the oracle exists to check them.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::schmidt::{ConstituentKind, SchmidtSpectrum};

pub const DEFAULT_BOSON_CAP: u8 = 8;

/// Upper limit on the number of basis states any intermediate may hold.
pub const MAX_BASIS_STATES: usize = 500_000;

/// Which constituent a single-particle mode belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Species {
    A,
    B,
}

/// Global order of the `2S` single-particle modes, used for fermionic signs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ModeOrdering {
    /// `a_0 … a_{S−1} b_0 … b_{S−1}`.
    #[default]
    SpeciesBlocks,
    /// `a_0 b_0 a_1 b_1 …`.
    Interleaved,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Statistics {
    Fermion,
    Boson,
}

/// Sparse state over occupation vectors of length `2S`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FockState {
    amplitudes: BTreeMap<Vec<u8>, Complex64>,
}

impl FockState {
    pub fn basis(occupations: Vec<u8>) -> Self {
        let mut amplitudes = BTreeMap::new();
        amplitudes.insert(occupations, Complex64::new(1.0, 0.0));
        FockState { amplitudes }
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<u8>, &Complex64)> {
        self.amplitudes.iter()
    }

    pub fn amplitude(&self, occupations: &[u8]) -> Complex64 {
        self.amplitudes.get(occupations).copied().unwrap_or_default()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &FockState) -> Complex64 {
        self.amplitudes.iter().filter_map(|(k, a)| other.amplitudes.get(k).map(|b| a.conj() * b)).sum()
    }

    pub fn scaled(&self, c: Complex64) -> FockState {
        FockState { amplitudes: self.amplitudes.iter().map(|(k, a)| (k.clone(), a * c)).collect() }
    }

    /// `self += c·other`.
    pub fn add_scaled(&mut self, other: &FockState, c: Complex64) {
        for (k, a) in &other.amplitudes {
            *self.amplitudes.entry(k.clone()).or_default() += a * c;
        }
    }

    pub fn normalized(&self) -> FockState {
        self.scaled(Complex64::new(1.0 / self.norm(), 0.0))
    }

    fn accumulate(&mut self, key: Vec<u8>, amp: Complex64) {
        *self.amplitudes.entry(key).or_default() += amp;
    }

    fn prune(mut self) -> Self {
        self.amplitudes.retain(|_, a| *a != Complex64::new(0.0, 0.0));
        self
    }
}

/// The coboson of a given spectrum, second-quantized over its mode pairs.
#[derive(Clone, Debug)]
pub struct PairOracle {
    lambdas: Vec<f64>,
    statistics: Statistics,
    ordering: ModeOrdering,
    boson_cap: u8,
}

/// `ĉ|n⟩ = coefficient·|n−1⟩ + |ε_n⟩`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Lowering {
    pub coefficient: f64,
    pub eps_norm: f64,
}

/// Oracle values for one spectrum.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleReport {
    /// `χ_n` for `n = 0..=max_n`.
    pub chi_exact: Vec<f64>,
    /// `⟨ε_n|ε_n⟩` for each existing `|n⟩`, `n = 1..`.
    pub eps_exact: Vec<f64>,
    /// `‖([ĉ,ĉ†] − 1 − sΔ)|probe⟩‖` per probe.
    pub commutator_residuals: Vec<f64>,
}

impl PairOracle {
    pub fn new(spectrum: &SchmidtSpectrum) -> Result<Self> {
        let statistics = match spectrum.kind() {
            ConstituentKind::FermionPair => Statistics::Fermion,
            ConstituentKind::BosonPair => Statistics::Boson,
            ConstituentKind::Classical => {
                return Err(Error::InvalidArgument("the classical ladder has no second-quantized model".into()))
            }
        };
        Ok(PairOracle {
            lambdas: spectrum.lambdas().to_vec(),
            statistics,
            ordering: ModeOrdering::default(),
            boson_cap: DEFAULT_BOSON_CAP,
        })
    }

    pub fn with_ordering(mut self, ordering: ModeOrdering) -> Self {
        self.ordering = ordering;
        self
    }

    pub fn with_boson_cap(mut self, cap: u8) -> Self {
        self.boson_cap = cap;
        self
    }

    /// Number of mode pairs `S`.
    pub fn pairs(&self) -> usize {
        self.lambdas.len()
    }

    /// `s` in `[ĉ,ĉ†] = 1 + sΔ`.
    pub fn exchange_sign(&self) -> f64 {
        match self.statistics {
            Statistics::Fermion => -1.0,
            Statistics::Boson => 1.0,
        }
    }

    fn position(&self, species: Species, p: usize) -> usize {
        let s = self.pairs();
        match (self.ordering, species) {
            (ModeOrdering::SpeciesBlocks, Species::A) => p,
            (ModeOrdering::SpeciesBlocks, Species::B) => s + p,
            (ModeOrdering::Interleaved, Species::A) => 2 * p,
            (ModeOrdering::Interleaved, Species::B) => 2 * p + 1,
        }
    }

    /// Occupation of `(species, p)` in an occupation vector.
    pub fn occupation(&self, occupations: &[u8], species: Species, p: usize) -> u8 {
        occupations[self.position(species, p)]
    }

    pub fn vacuum(&self) -> FockState {
        FockState::basis(vec![0; 2 * self.pairs()])
    }

    /// Basis state with `pairs[p]` quanta in both `a_p` and `b_p`.
    pub fn pair_basis(&self, pairs: &[u8]) -> FockState {
        let mut occ = vec![0; 2 * self.pairs()];
        for (p, &k) in pairs.iter().enumerate() {
            occ[self.position(Species::A, p)] = k;
            occ[self.position(Species::B, p)] = k;
        }
        FockState::basis(occ)
    }

    fn jordan_wigner_sign(&self, occ: &[u8], pos: usize) -> f64 {
        match self.statistics {
            Statistics::Boson => 1.0,
            Statistics::Fermion => {
                if occ[..pos].iter().map(|&k| k as usize).sum::<usize>() % 2 == 0 {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    }

    /// Single-particle creation operator.
    pub fn create(&self, species: Species, p: usize, state: &FockState) -> Result<FockState> {
        let pos = self.position(species, p);
        let mut out = FockState::default();
        for (occ, amp) in state.iter() {
            let k = occ[pos];
            let factor = match self.statistics {
                Statistics::Fermion if k >= 1 => continue,
                Statistics::Fermion => 1.0,
                Statistics::Boson if k >= self.boson_cap => {
                    return Err(Error::Truncation { mode: pos, cap: self.boson_cap })
                }
                Statistics::Boson => ((k + 1) as f64).sqrt(),
            };
            let sign = self.jordan_wigner_sign(occ, pos);
            let mut next = occ.clone();
            next[pos] = k + 1;
            out.accumulate(next, amp * (sign * factor));
        }
        self.check_size(out.prune())
    }

    /// Single-particle annihilation operator.
    pub fn annihilate(&self, species: Species, p: usize, state: &FockState) -> FockState {
        let pos = self.position(species, p);
        let mut out = FockState::default();
        for (occ, amp) in state.iter() {
            let k = occ[pos];
            if k == 0 {
                continue;
            }
            let factor = match self.statistics {
                Statistics::Fermion => 1.0,
                Statistics::Boson => (k as f64).sqrt(),
            };
            let sign = self.jordan_wigner_sign(occ, pos);
            let mut next = occ.clone();
            next[pos] = k - 1;
            out.accumulate(next, amp * (sign * factor));
        }
        out.prune()
    }

    /// `ĉ†|state⟩ = Σ_p √λ_p a†_p b†_p |state⟩`.
    pub fn apply_pair_creation(&self, state: &FockState) -> Result<FockState> {
        let mut out = FockState::default();
        for (p, lambda) in self.lambdas.iter().enumerate() {
            let b = self.create(Species::B, p, state)?;
            let ab = self.create(Species::A, p, &b)?;
            out.add_scaled(&ab, Complex64::new(lambda.sqrt(), 0.0));
        }
        self.check_size(out.prune())
    }

    /// `ĉ|state⟩ = Σ_p √λ_p b_p a_p |state⟩`, the adjoint of
    /// [`apply_pair_creation`](Self::apply_pair_creation).
    pub fn apply_pair_annihilation(&self, state: &FockState) -> FockState {
        let mut out = FockState::default();
        for (p, lambda) in self.lambdas.iter().enumerate() {
            let a = self.annihilate(Species::A, p, state);
            let ba = self.annihilate(Species::B, p, &a);
            out.add_scaled(&ba, Complex64::new(lambda.sqrt(), 0.0));
        }
        out.prune()
    }

    /// `Δ|state⟩ = Σ_p λ_p (n_{a,p} + n_{b,p}) |state⟩`.
    pub fn apply_delta(&self, state: &FockState) -> FockState {
        let mut out = FockState::default();
        for (occ, amp) in state.iter() {
            let d: f64 = self
                .lambdas
                .iter()
                .enumerate()
                .map(|(p, l)| {
                    l * (self.occupation(occ, Species::A, p) as f64 + self.occupation(occ, Species::B, p) as f64)
                })
                .sum();
            out.accumulate(occ.clone(), amp * d);
        }
        out.prune()
    }

    /// Whether every basis state has `n_{a,p} = n_{b,p}` for all `p`.
    pub fn is_pair_locked(&self, state: &FockState) -> bool {
        state.iter().all(|(occ, _)| {
            (0..self.pairs()).all(|p| self.occupation(occ, Species::A, p) == self.occupation(occ, Species::B, p))
        })
    }

    /// `ĉ†ⁿ|0⟩`.
    pub fn creation_power(&self, n: usize) -> Result<FockState> {
        let mut state = self.vacuum();
        for _ in 0..n {
            state = self.apply_pair_creation(&state)?;
        }
        Ok(state)
    }

    /// `χ_n = ⟨0|ĉⁿĉ†ⁿ|0⟩ / n!`.
    pub fn chi_exact(&self, n: usize) -> Result<f64> {
        let state = self.creation_power(n)?;
        debug_assert!(self.is_pair_locked(&state));
        let factorial: f64 = (1..=n).map(|k| k as f64).product();
        Ok(state.norm_sqr() / factorial)
    }

    /// Normalized `|n⟩ ∝ ĉ†ⁿ|0⟩`.
    pub fn number_state(&self, n: usize) -> Result<FockState> {
        let state = self.creation_power(n)?;
        if state.is_empty() {
            return Err(Error::EmptyNumberState { n });
        }
        Ok(state.normalized())
    }

    /// Splits `ĉ|n⟩` into its `|n−1⟩` component and the orthogonal rest.
    pub fn lowering_decomposition(&self, n: usize) -> Result<Lowering> {
        if n == 0 {
            return Err(Error::InvalidArgument("lowering decomposition needs n >= 1".into()));
        }
        let upper = self.number_state(n)?;
        let lower = self.number_state(n - 1)?;
        let lowered = self.apply_pair_annihilation(&upper);
        let coefficient = lower.inner(&lowered);
        let mut eps = lowered;
        eps.add_scaled(&lower, -coefficient);
        Ok(Lowering { coefficient: coefficient.re, eps_norm: eps.norm_sqr() })
    }

    /// `‖([ĉ,ĉ†] − 1 − sΔ)|probe⟩‖`.
    pub fn commutator_residual(&self, probe: &FockState) -> Result<f64> {
        let up = self.apply_pair_creation(probe)?;
        let mut r = self.apply_pair_annihilation(&up);
        let down = self.apply_pair_annihilation(probe);
        r.add_scaled(&self.apply_pair_creation(&down)?, Complex64::new(-1.0, 0.0));
        r.add_scaled(probe, Complex64::new(-1.0, 0.0));
        r.add_scaled(&self.apply_delta(probe), Complex64::new(-self.exchange_sign(), 0.0));
        Ok(r.norm())
    }

    pub fn verify_commutator_identity(&self, probes: &[FockState]) -> Result<OracleReport> {
        let commutator_residuals = probes.iter().map(|p| self.commutator_residual(p)).collect::<Result<_>>()?;
        Ok(OracleReport { chi_exact: Vec::new(), eps_exact: Vec::new(), commutator_residuals })
    }

    /// χ values, correction norms up to `max_n` and commutator residuals on
    /// `probes`.
    pub fn report(&self, max_n: usize, probes: &[FockState]) -> Result<OracleReport> {
        let mut report = self.verify_commutator_identity(probes)?;
        report.chi_exact = (0..=max_n).map(|n| self.chi_exact(n)).collect::<Result<_>>()?;
        for n in 1..=max_n {
            match self.lowering_decomposition(n) {
                Ok(l) => report.eps_exact.push(l.eps_norm),
                Err(Error::EmptyNumberState { .. }) => break,
                Err(e) => return Err(e),
            }
        }
        Ok(report)
    }

    /// Normalized random superposition of `terms` pair-locked basis states
    /// with up to `max_pairs` pairs per mode (one for fermions).
    pub fn random_pair_state<R: Rng + ?Sized>(&self, rng: &mut R, terms: usize, max_pairs: u8) -> FockState {
        let top = match self.statistics {
            Statistics::Fermion => 1,
            Statistics::Boson => max_pairs,
        };
        let mut out = FockState::default();
        for _ in 0..terms {
            let pairs: Vec<u8> = (0..self.pairs()).map(|_| rng.gen_range(0..=top)).collect();
            let amp = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            out.add_scaled(&self.pair_basis(&pairs), amp);
        }
        out.prune().normalized()
    }

    /// Random state with independent `a` and `b` occupations.
    pub fn random_state<R: Rng + ?Sized>(&self, rng: &mut R, terms: usize, max_occupation: u8) -> FockState {
        let top = match self.statistics {
            Statistics::Fermion => 1,
            Statistics::Boson => max_occupation,
        };
        let mut out = FockState::default();
        for _ in 0..terms {
            let occ: Vec<u8> = (0..2 * self.pairs()).map(|_| rng.gen_range(0..=top)).collect();
            let amp = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            out.add_scaled(&FockState::basis(occ), amp);
        }
        out.prune().normalized()
    }

    fn check_size(&self, state: FockState) -> Result<FockState> {
        if state.len() > MAX_BASIS_STATES {
            return Err(Error::InstanceTooLarge { states: state.len(), limit: MAX_BASIS_STATES });
        }
        Ok(state)
    }
}

/// `χ_n` by brute force.
pub fn chi_exact(spectrum: &SchmidtSpectrum, n: usize) -> Result<f64> {
    PairOracle::new(spectrum)?.chi_exact(n)
}

/// Commutator residuals of `probes` for the given spectrum.
pub fn verify_commutator_identity(spectrum: &SchmidtSpectrum, probes: &[FockState]) -> Result<OracleReport> {
    PairOracle::new(spectrum)?.verify_commutator_identity(probes)
}
