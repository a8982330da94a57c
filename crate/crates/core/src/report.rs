//! Serialization of reports and ladders, and parameter sweeps.
//!
//! Every number is written with 12 significant digits so identical inputs
//! give byte-identical files.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use crate::coherent::{self, CobosonCoherentState, MonBound, ObservablesReport};
use crate::error::{Error, Result};
use crate::ladder::{self, LadderTable};
use crate::schmidt::SchmidtSpectrum;

/// Sweep CSV columns, in order.
pub const SWEEP_COLUMNS: [&str; 12] = [
    "spectrum",
    "kind",
    "gamma_abs",
    "commutator",
    "var_x",
    "q_eff",
    "mean_n",
    "mon_bound",
    "mon_kind",
    "cutoff_n",
    "tail_bound",
    "status",
];

/// Ladder CSV columns, in order.
pub const LADDER_COLUMNS: [&str; 4] = ["n", "f_n", "eps_norm", "commutator_diag"];

/// `x` rounded to 12 significant digits.
pub fn round_sig12(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

/// Fixed 12-significant-digit text form.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else if x == 0.0 {
        "0.00000000000e0".into()
    } else {
        format!("{x:.11e}")
    }
}

fn mon_cell(bound: MonBound) -> String {
    match bound {
        MonBound::Unbounded => "UNBOUNDED".into(),
        b => fmt_num(b.value()),
    }
}

impl Serialize for ObservablesReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("ObservablesReport", 14)?;
        st.serialize_field("spectrum", &self.spectrum_descriptor)?;
        st.serialize_field("kind", self.kind.label())?;
        st.serialize_field("gamma", &[round_sig12(self.gamma.re), round_sig12(self.gamma.im)])?;
        st.serialize_field("gamma_abs", &round_sig12(self.gamma.norm()))?;
        st.serialize_field("commutator", &round_sig12(self.commutator_expectation))?;
        st.serialize_field("var_x", &round_sig12(self.var_x))?;
        st.serialize_field("var_p", &round_sig12(self.var_p))?;
        match self.mandel_q_eff {
            Some(q) => st.serialize_field("q_eff", &round_sig12(q))?,
            None => st.serialize_field("q_eff", "UNDEFINED")?,
        }
        st.serialize_field("mean_n", &round_sig12(self.mean_n))?;
        match self.mon_lower_bound {
            MonBound::Unbounded => st.serialize_field("mon_bound", "UNBOUNDED")?,
            b => st.serialize_field("mon_bound", &round_sig12(b.value()))?,
        }
        st.serialize_field("mon_kind", self.mon_lower_bound.label())?;
        st.serialize_field("cutoff_n", &self.cutoff_n)?;
        st.serialize_field("tail_bound", &round_sig12(self.tail_mass_bound))?;
        st.end()
    }
}

/// Pretty-printed JSON for a single report.
pub fn report_json(report: &ObservablesReport) -> String {
    serde_json::to_string_pretty(report).expect("report serializes")
}

/// `n, f_n, ⟨ε_n|ε_n⟩, [ĉ,ĉ†]_nn` for `n = 0..rows`; `eps_norm` is left
/// empty where `|n⟩` does not exist.
pub fn write_ladder_csv<W: Write>(ladder: &LadderTable, rows: usize, out: W) -> Result<()> {
    let rows = rows.min(ladder.max_n());
    let diag = ladder::commutator_diagonal(ladder, rows.saturating_sub(1))?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(LADDER_COLUMNS).map_err(csv_err)?;
    for (n, d) in diag.iter().enumerate().take(rows) {
        let eps = ladder.eps_norm(n).map(fmt_num).unwrap_or_default();
        w.write_record([n.to_string(), fmt_num(ladder.f(n)), eps, fmt_num(*d)]).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Rank, purity and the first `power_sums` power sums as pretty JSON.
pub fn spectrum_json(s: &SchmidtSpectrum, power_sums: usize) -> String {
    let sums: Vec<f64> = s.power_sums(power_sums).into_iter().map(round_sig12).collect();
    let v = serde_json::json!({
        "spectrum": s.descriptor(),
        "kind": s.kind().label(),
        "rank": s.rank(),
        "purity": round_sig12(s.purity()),
        "power_sums": sums,
    });
    serde_json::to_string_pretty(&v).expect("spectrum serializes")
}

/// The rows of [`write_ladder_csv`] as a pretty-printed JSON array.
pub fn ladder_json(ladder: &LadderTable, rows: usize) -> Result<String> {
    let rows = rows.min(ladder.max_n());
    let diag = ladder::commutator_diagonal(ladder, rows.saturating_sub(1))?;
    let out: Vec<serde_json::Value> = diag
        .iter()
        .enumerate()
        .map(|(n, d)| {
            serde_json::json!({
                "n": n,
                "f_n": round_sig12(ladder.f(n)),
                "eps_norm": ladder.eps_norm(n).map(round_sig12),
                "commutator_diag": round_sig12(*d),
            })
        })
        .collect();
    Ok(serde_json::to_string_pretty(&out).expect("rows serialize"))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// `start, start+step, …` up to and including `stop` (within 1e-9 steps).
pub fn gamma_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if [start, stop, step].iter().any(|v| !v.is_finite()) || step <= 0.0 || stop < start || start < 0.0 {
        return Err(Error::InvalidArgument(format!("bad gamma grid {start}:{stop}:{step}")));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}

/// Spectra × `|γ|` grid for [`run_sweep`].
#[derive(Clone, Debug)]
pub struct SweepSpec {
    pub spectra: Vec<SchmidtSpectrum>,
    pub gammas: Vec<f64>,
    pub tail_tol: f64,
    pub max_n: usize,
    pub jobs: usize,
}

/// Why a sweep row has no observables.
#[derive(Clone, Debug, PartialEq)]
pub struct RowFailure {
    pub status: &'static str,
    pub message: String,
}

impl From<&Error> for RowFailure {
    fn from(e: &Error) -> Self {
        let status = match e {
            Error::DivergentEigenvalue { .. } => "DIVERGENT",
            Error::ExhaustedLadder { .. } => "EXHAUSTED",
            Error::TailNotBounded { .. } => "TAIL_UNBOUNDED",
            _ => "ERROR",
        };
        RowFailure { status, message: e.to_string() }
    }
}

#[derive(Clone, Debug)]
pub struct SweepRow {
    pub spectrum: String,
    pub kind: crate::schmidt::ConstituentKind,
    pub gamma_abs: f64,
    pub outcome: std::result::Result<CobosonCoherentState, RowFailure>,
}

/// Builds every `(spectrum, |γ|)` state on up to `jobs` threads. Rows come
/// back in grid order (spectrum-major) whatever the scheduling.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    if spec.spectra.is_empty() || spec.gammas.is_empty() {
        return Err(Error::InvalidArgument("sweep grids must be non-empty".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(pool.install(|| {
        let ladders: Vec<Result<LadderTable>> =
            spec.spectra.par_iter().map(|s| LadderTable::from_spectrum(s, spec.max_n)).collect();
        let points: Vec<(usize, f64)> =
            (0..spec.spectra.len()).flat_map(|i| spec.gammas.iter().map(move |&g| (i, g))).collect();
        points
            .par_iter()
            .map(|&(i, g)| {
                let s = &spec.spectra[i];
                let outcome = match &ladders[i] {
                    Ok(l) => {
                        coherent::build(Complex64::new(g, 0.0), l, spec.tail_tol).map_err(|e| RowFailure::from(&e))
                    }
                    Err(e) => Err(RowFailure::from(e)),
                };
                SweepRow { spectrum: s.descriptor().to_string(), kind: s.kind(), gamma_abs: g, outcome }
            })
            .collect()
    }))
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_COLUMNS).map_err(csv_err)?;
    for row in rows {
        let mut record = vec![row.spectrum.clone(), row.kind.label().to_string(), fmt_num(row.gamma_abs)];
        match &row.outcome {
            Ok(state) => {
                let r = state.report(&row.spectrum);
                record.extend([
                    fmt_num(r.commutator_expectation),
                    fmt_num(r.var_x),
                    r.mandel_q_eff.map(fmt_num).unwrap_or_else(|| "UNDEFINED".into()),
                    fmt_num(r.mean_n),
                    mon_cell(r.mon_lower_bound),
                    r.mon_lower_bound.label().to_string(),
                    r.cutoff_n.to_string(),
                    fmt_num(r.tail_mass_bound),
                    "OK".to_string(),
                ]);
            }
            Err(f) => {
                record.extend(std::iter::repeat_n(String::new(), 8));
                record.push(f.status.to_string());
            }
        }
        w.write_record(&record).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}
