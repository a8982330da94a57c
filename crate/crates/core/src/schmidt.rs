//! Schmidt spectra `{λ_p}` of a two-constituent composite particle.
//!
//! A spectrum is stored in canonical form: strictly positive entries, sorted
//! non-increasing, summing to one. Everything downstream depends on the
//! spectrum only through this multiset, so two spectra that compare equal
//! produce identical ladders and observables.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Entries smaller than this fraction of the largest one are dropped.
pub const RELATIVE_ZERO: f64 = 1e-15;

/// Statistics of the two constituents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConstituentKind {
    /// Both constituents are fermions; `χ_n = n!·e_n(λ)`.
    FermionPair,
    /// Both constituents are bosons; `χ_n = n!·h_n(λ)`.
    BosonPair,
    /// Distinguishable constituents; the ladder is `f_n = 1` for every `n`.
    Classical,
}

impl ConstituentKind {
    /// The sign `s` in `[ĉ, ĉ†] = 1 + sΔ`. `None` for the classical ladder,
    /// which has no second-quantized constituent model.
    pub fn exchange_sign(self) -> Option<f64> {
        match self {
            ConstituentKind::FermionPair => Some(-1.0),
            ConstituentKind::BosonPair => Some(1.0),
            ConstituentKind::Classical => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ConstituentKind::FermionPair => "fermion",
            ConstituentKind::BosonPair => "boson",
            ConstituentKind::Classical => "classical",
        }
    }
}

impl fmt::Display for ConstituentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for ConstituentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "fermion" | "fermions" | "fermionpair" => Ok(ConstituentKind::FermionPair),
            "boson" | "bosons" | "bosonpair" => Ok(ConstituentKind::BosonPair),
            "classical" => Ok(ConstituentKind::Classical),
            other => Err(Error::InvalidArgument(format!("unknown constituent kind `{other}`"))),
        }
    }
}

/// Normalized, descending Schmidt coefficients together with the
/// constituent statistics.
#[derive(Clone, Debug, Serialize)]
pub struct SchmidtSpectrum {
    lambdas: Vec<f64>,
    kind: ConstituentKind,
    #[serde(skip)]
    descriptor: String,
}

impl SchmidtSpectrum {
    /// `d` equal coefficients, each exactly `1/d`.
    pub fn uniform(d: usize, kind: ConstituentKind) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidArgument("uniform spectrum needs d >= 1".into()));
        }
        Ok(SchmidtSpectrum { lambdas: vec![1.0 / d as f64; d], kind, descriptor: format!("uniform(d={d})") })
    }

    /// Geometric family `λ_p ∝ (1-q) q^p`, cut at the smallest `P` with
    /// `q^P < tail_tol` and renormalized.
    pub fn geometric(q: f64, tail_tol: f64, kind: ConstituentKind) -> Result<Self> {
        check_ratio(q)?;
        if !(tail_tol > 0.0 && tail_tol < 1.0) {
            return Err(Error::InvalidArgument(format!("tail_tol must lie in (0,1), got {tail_tol}")));
        }
        let rank = geometric_rank(q, tail_tol);
        let mut s = Self::geometric_with_rank(q, rank, kind)?;
        s.descriptor = format!("geometric(q={q};tol={tail_tol:e})");
        Ok(s)
    }

    /// The first `rank` terms of the geometric family, renormalized.
    pub fn geometric_with_rank(q: f64, rank: usize, kind: ConstituentKind) -> Result<Self> {
        check_ratio(q)?;
        if rank == 0 {
            return Err(Error::InvalidArgument("geometric spectrum needs rank >= 1".into()));
        }
        let values: Vec<f64> = (0..rank).map(|p| (1.0 - q) * q.powi(p as i32)).collect();
        let mut s = Self::from_values(&values, kind)?;
        s.descriptor = format!("geometric(q={q};rank={rank})");
        Ok(s)
    }

    /// Drops zeros, sorts descending and normalizes arbitrary non-negative
    /// weights.
    pub fn from_values(values: &[f64], kind: ConstituentKind) -> Result<Self> {
        if let Some(bad) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidArgument(format!("Schmidt weights must be finite and non-negative, got {bad}")));
        }
        let max = values.iter().copied().fold(0.0_f64, f64::max);
        if max <= 0.0 {
            return Err(Error::InvalidArgument("spectrum needs at least one positive weight".into()));
        }
        let cut = RELATIVE_ZERO * max;
        let mut kept: Vec<f64> = values.iter().copied().filter(|&v| v > 0.0 && v >= cut).collect();
        kept.sort_by(|a, b| b.total_cmp(a));
        // smallest first
        let total: f64 = kept.iter().rev().sum();
        for v in &mut kept {
            *v /= total;
        }
        let rank = kept.len();
        Ok(SchmidtSpectrum { lambdas: kept, kind, descriptor: format!("values(rank={rank})") })
    }

    /// Reads weights from a JSON array or from plain text / CSV with one
    /// value per line or cell. Lines starting with `#` are ignored.
    pub fn from_file(path: impl AsRef<Path>, kind: ConstituentKind) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let values = parse_values(&text)?;
        let mut s = Self::from_values(&values, kind)?;
        let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        s.descriptor = format!("file({name})");
        Ok(s)
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn kind(&self) -> ConstituentKind {
        self.kind
    }

    pub fn rank(&self) -> usize {
        self.lambdas.len()
    }

    /// Short human-readable description of how the spectrum was made.
    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }

    /// Same coefficients, different constituent statistics.
    pub fn with_kind(&self, kind: ConstituentKind) -> Self {
        SchmidtSpectrum { kind, ..self.clone() }
    }

    /// `P = Σ λ_p²`, the purity of either reduced single-constituent state.
    pub fn purity(&self) -> f64 {
        self.lambdas.iter().rev().map(|l| l * l).sum()
    }

    /// `p_k = Σ_p λ_p^k` for `k = 1..=max_k`.
    pub fn power_sums(&self, max_k: usize) -> Vec<f64> {
        let mut powers = self.lambdas.clone();
        let mut out = Vec::with_capacity(max_k);
        for k in 1..=max_k {
            if k > 1 {
                for (p, l) in powers.iter_mut().zip(&self.lambdas) {
                    *p *= l;
                }
            }
            out.push(powers.iter().rev().sum());
        }
        out
    }

    /// `ln p_k` for `k = 1..=max_k`, computed without forming `λ^k` so deep
    /// powers do not underflow.
    pub fn log_power_sums(&self, max_k: usize) -> Vec<f64> {
        let logs: Vec<f64> = self.lambdas.iter().map(|l| l.ln()).collect();
        let log_max = logs[0];
        (1..=max_k)
            .map(|k| {
                let k = k as f64;
                let s: f64 = logs.iter().rev().map(|&ll| (k * (ll - log_max)).exp()).sum();
                k * log_max + s.ln()
            })
            .collect()
    }
}

impl PartialEq for SchmidtSpectrum {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.lambdas == other.lambdas
    }
}

impl Eq for SchmidtSpectrum {}

impl Hash for SchmidtSpectrum {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.kind.hash(state);
        for l in &self.lambdas {
            l.to_bits().hash(state);
        }
    }
}

fn check_ratio(q: f64) -> Result<()> {
    if q > 0.0 && q < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("geometric ratio q must lie in (0,1), got {q}")))
    }
}

/// Smallest `P >= 1` with `q^P < tail_tol`.
fn geometric_rank(q: f64, tail_tol: f64) -> usize {
    let mut p = 1usize;
    let mut qp = q;
    while qp >= tail_tol {
        p += 1;
        qp *= q;
    }
    p
}

/// Parses the on-disk spectrum formats.
pub fn parse_values(text: &str) -> Result<Vec<f64>> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('[') {
        return serde_json::from_str::<Vec<f64>>(trimmed).map_err(|e| Error::Parse(e.to_string()));
    }
    let mut values = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        for cell in line.split([',', ';', '\t', ' ']).map(str::trim).filter(|c| !c.is_empty()) {
            let v: f64 =
                cell.parse().map_err(|_| Error::Parse(format!("line {}: `{cell}` is not a number", lineno + 1)))?;
            values.push(v);
        }
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ConstituentKind::*;

    #[test]
    fn uniform_examples() {
        assert_eq!(SchmidtSpectrum::uniform(1, FermionPair).unwrap().lambdas(), &[1.0]);
        assert_eq!(SchmidtSpectrum::uniform(2, FermionPair).unwrap().lambdas(), &[0.5, 0.5]);
        assert_eq!(SchmidtSpectrum::uniform(4, BosonPair).unwrap().lambdas(), &[0.25; 4]);
        assert!(matches!(SchmidtSpectrum::uniform(0, BosonPair), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn geometric_examples() {
        let s = SchmidtSpectrum::geometric(0.5, 0.26, BosonPair).unwrap();
        assert_eq!(s.rank(), 2);
        assert!((s.lambdas()[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((s.lambdas()[1] - 1.0 / 3.0).abs() < 1e-15);

        let tiny = SchmidtSpectrum::geometric(1e-20, 1e-3, BosonPair).unwrap();
        assert_eq!(tiny.lambdas(), &[1.0]);
        let tiny = SchmidtSpectrum::geometric(1e-20, 1e-30, BosonPair).unwrap();
        assert_eq!(tiny.lambdas(), &[1.0]);

        // count entries by evaluating q^P < tol directly
        let mut expected = 0;
        while 0.9_f64.powi(expected) >= 1e-12 {
            expected += 1;
        }
        assert_eq!(expected, 263);
        assert_eq!(SchmidtSpectrum::geometric(0.9, 1e-12, FermionPair).unwrap().rank(), 263);

        for q in [0.0, 1.0, -0.5, 1.5] {
            assert!(SchmidtSpectrum::geometric(q, 1e-6, BosonPair).is_err());
        }
    }

    #[test]
    fn from_values_examples() {
        let s = SchmidtSpectrum::from_values(&[0.2, 0.8], FermionPair).unwrap();
        assert_eq!(s.lambdas(), &[0.8, 0.2]);
        let s = SchmidtSpectrum::from_values(&[2.0, 2.0], FermionPair).unwrap();
        assert_eq!(s.lambdas(), &[0.5, 0.5]);
        let s = SchmidtSpectrum::from_values(&[1.0, 0.0, 0.0], FermionPair).unwrap();
        assert_eq!(s.lambdas(), &[1.0]);
        assert_eq!(s.rank(), 1);
        assert!(SchmidtSpectrum::from_values(&[], FermionPair).is_err());
        assert!(SchmidtSpectrum::from_values(&[0.0, 0.0], FermionPair).is_err());
        assert!(SchmidtSpectrum::from_values(&[0.5, -0.1], FermionPair).is_err());
    }

    #[test]
    fn negligible_entries_are_dropped() {
        let s = SchmidtSpectrum::from_values(&[1.0, 1e-16, 0.5], BosonPair).unwrap();
        assert_eq!(s.rank(), 2);
    }

    #[test]
    fn purity_examples() {
        assert_eq!(SchmidtSpectrum::uniform(4, BosonPair).unwrap().purity(), 0.25);
        assert_eq!(SchmidtSpectrum::from_values(&[1.0], BosonPair).unwrap().purity(), 1.0);
        // (1-q)/(1+q) for the untruncated family
        let s = SchmidtSpectrum::geometric(0.5, 1e-15, BosonPair).unwrap();
        assert!((s.purity() - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn power_sum_examples() {
        let s = SchmidtSpectrum::uniform(2, BosonPair).unwrap();
        assert_eq!(s.power_sums(3), vec![1.0, 0.5, 0.25]);
        let s = SchmidtSpectrum::from_values(&[1.0], BosonPair).unwrap();
        assert_eq!(s.power_sums(4), vec![1.0; 4]);
        let s = SchmidtSpectrum::uniform(4, BosonPair).unwrap();
        assert_eq!(s.power_sums(2), vec![1.0, 0.25]);
    }

    #[test]
    fn log_power_sums_match_direct() {
        let s = SchmidtSpectrum::from_values(&[0.5, 0.3, 0.2], BosonPair).unwrap();
        let direct = s.power_sums(12);
        let logs = s.log_power_sums(12);
        for (d, l) in direct.iter().zip(&logs) {
            assert!((d.ln() - l).abs() < 1e-13);
        }
        // deep powers stay finite in the log domain
        let deep = s.log_power_sums(5000);
        assert!(deep.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn parses_text_csv_and_json() {
        assert_eq!(parse_values("0.8\n0.2\n").unwrap(), vec![0.8, 0.2]);
        assert_eq!(parse_values("# header\n0.8, 0.2\n").unwrap(), vec![0.8, 0.2]);
        assert_eq!(parse_values("[3, 1]").unwrap(), vec![3.0, 1.0]);
        assert!(parse_values("0.8\nabc\n").is_err());
    }

    #[test]
    fn kind_parsing() {
        assert_eq!("fermion".parse::<ConstituentKind>().unwrap(), FermionPair);
        assert_eq!("Boson".parse::<ConstituentKind>().unwrap(), BosonPair);
        assert_eq!("classical".parse::<ConstituentKind>().unwrap(), Classical);
        assert!("anyon".parse::<ConstituentKind>().is_err());
    }
}
