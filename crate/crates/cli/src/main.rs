use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use coboson::coherent;
use coboson::ladder::LadderTable;
use coboson::report::{self, SweepSpec};
use coboson::schmidt::{ConstituentKind, SchmidtSpectrum};
use coboson::verify;

#[derive(Parser)]
#[command(name = "coboson", version, about = "Composite-boson ladder algebra and coherent states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rank, purity and power sums of a Schmidt spectrum.
    Spectrum(SpectrumCmd),
    /// Ladder coefficients, correction norms and commutator diagonal.
    Ladder(LadderCmd),
    /// Observables of a single coherent state.
    Coherent(CoherentCmd),
    /// Observables over spectra × |γ| grids.
    Sweep(SweepCmd),
    /// Compare the analytic tables against the Fock-space oracle.
    Verify(VerifyCmd),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct Source {
    /// Uniform spectrum of rank D (a comma list for `sweep`).
    #[arg(long, value_delimiter = ',', num_args = 1.., group = "source")]
    uniform: Vec<usize>,
    /// Geometric spectrum with ratio Q (a comma list for `sweep`).
    #[arg(long, value_delimiter = ',', num_args = 1.., group = "source")]
    geometric: Vec<f64>,
    /// Weights from a JSON array or a text/CSV file.
    #[arg(long, group = "source")]
    file: Option<PathBuf>,
    /// The ideal bosonic ladder f_n = √n instead of a spectrum.
    #[arg(long, group = "source")]
    ideal: bool,
    #[arg(long, default_value = "fermion", value_parser = parse_kind)]
    kind: ConstituentKind,
    /// Geometric truncation and coherent-state tail tolerance.
    #[arg(long, default_value_t = 1e-12)]
    tail_tol: f64,
}

#[derive(Args)]
struct Output {
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct SpectrumCmd {
    #[command(flatten)]
    source: Source,
    /// Number of power sums to print.
    #[arg(long, default_value_t = 4)]
    power_sums: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct LadderCmd {
    #[command(flatten)]
    source: Source,
    #[arg(long, default_value_t = 4096)]
    max_n: usize,
    /// Rows to print, starting at n = 0.
    #[arg(long, default_value_t = 16)]
    rows: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct CoherentCmd {
    #[command(flatten)]
    source: Source,
    /// Eigenvalue as RE or RE,IM.
    #[arg(long, allow_hyphen_values = true)]
    gamma: String,
    #[arg(long, default_value_t = 4096)]
    max_n: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct SweepCmd {
    #[command(flatten)]
    source: Source,
    /// |γ| grid as START:STOP:STEP, both ends included.
    #[arg(long)]
    gamma_grid: String,
    #[arg(long, default_value_t = 4096)]
    max_n: usize,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct VerifyCmd {
    /// Largest pair number checked.
    #[arg(long, default_value_t = 5)]
    max_n: usize,
    #[arg(long, default_value_t = verify::DEFAULT_SEED)]
    seed: u64,
}

fn parse_kind(s: &str) -> std::result::Result<ConstituentKind, String> {
    s.parse().map_err(|e: coboson::Error| e.to_string())
}

fn parse_gamma(s: &str) -> Result<Complex64> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| t.parse::<f64>().with_context(|| format!("bad gamma component `{t}`"));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => bail!("gamma must be RE or RE,IM, got `{s}`"),
    }
}

fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<f64> = s
        .split(':')
        .map(|t| t.trim().parse::<f64>().with_context(|| format!("bad grid value `{t}`")))
        .collect::<Result<_>>()?;
    let [start, stop, step] = parts[..] else {
        bail!("gamma grid must be START:STOP:STEP, got `{s}`");
    };
    Ok(report::gamma_grid(start, stop, step)?)
}

enum Built {
    Spectra(Vec<SchmidtSpectrum>),
    Ideal,
    /// `--kind classical` with no spectrum given.
    Classical,
}

impl Source {
    fn build(&self) -> Result<Built> {
        let kind = self.kind;
        let spectra: Vec<SchmidtSpectrum> = if !self.uniform.is_empty() {
            self.uniform.iter().map(|&d| SchmidtSpectrum::uniform(d, kind)).collect::<coboson::Result<_>>()?
        } else if !self.geometric.is_empty() {
            self.geometric
                .iter()
                .map(|&q| SchmidtSpectrum::geometric(q, self.tail_tol, kind))
                .collect::<coboson::Result<_>>()?
        } else if let Some(path) = &self.file {
            vec![SchmidtSpectrum::from_file(path, kind).with_context(|| format!("reading {}", path.display()))?]
        } else if self.ideal {
            return Ok(Built::Ideal);
        } else if kind == ConstituentKind::Classical {
            return Ok(Built::Classical);
        } else {
            bail!("give one of --uniform, --geometric, --file or --ideal");
        };
        Ok(Built::Spectra(spectra))
    }

    fn single(&self) -> Result<Built> {
        let built = self.build()?;
        if let Built::Spectra(s) = &built {
            if s.len() != 1 {
                bail!("this subcommand takes a single spectrum; use `sweep` for lists");
            }
        }
        Ok(built)
    }
}

/// Ladder table and descriptor for a single source.
fn single_ladder(source: &Source, max_n: usize) -> Result<(LadderTable, String)> {
    Ok(match source.single()? {
        Built::Spectra(mut s) => {
            let s = s.remove(0);
            (LadderTable::from_spectrum(&s, max_n)?, s.descriptor().to_string())
        }
        Built::Ideal => (LadderTable::ideal(max_n), "ideal".into()),
        Built::Classical => (LadderTable::classical(max_n), "classical".into()),
    })
}

fn open_output(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => {
            Box::new(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
        }
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn cmd_spectrum(cmd: &SpectrumCmd) -> Result<()> {
    let s = match cmd.source.single()? {
        Built::Spectra(mut s) => s.remove(0),
        _ => bail!("`spectrum` needs --uniform, --geometric or --file"),
    };
    let sums = s.power_sums(cmd.power_sums);
    let mut w = open_output(&cmd.output.out)?;
    match cmd.output.format {
        Some(Format::Json) => writeln!(w, "{}", report::spectrum_json(&s, cmd.power_sums))?,
        Some(Format::Csv) => {
            writeln!(w, "quantity,value")?;
            writeln!(w, "rank,{}", s.rank())?;
            writeln!(w, "purity,{}", report::fmt_num(s.purity()))?;
            for (k, p) in sums.iter().enumerate() {
                writeln!(w, "p_{},{}", k + 1, report::fmt_num(*p))?;
            }
        }
        None => {
            writeln!(w, "spectrum: {}", s.descriptor())?;
            writeln!(w, "kind: {}", s.kind().label())?;
            writeln!(w, "rank: {}", s.rank())?;
            writeln!(w, "purity: {}", report::fmt_num(s.purity()))?;
            for (k, p) in sums.iter().enumerate() {
                writeln!(w, "p_{}: {}", k + 1, report::fmt_num(*p))?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn cmd_ladder(cmd: &LadderCmd) -> Result<()> {
    let max_n = cmd.max_n.max(cmd.rows + 1);
    let (ladder, _) = single_ladder(&cmd.source, max_n)?;
    let mut w = open_output(&cmd.output.out)?;
    match cmd.output.format.unwrap_or(Format::Csv) {
        Format::Csv => report::write_ladder_csv(&ladder, cmd.rows, &mut w)?,
        Format::Json => writeln!(w, "{}", report::ladder_json(&ladder, cmd.rows)?)?,
    }
    w.flush()?;
    Ok(())
}

fn cmd_coherent(cmd: &CoherentCmd) -> Result<()> {
    let gamma = parse_gamma(&cmd.gamma)?;
    let (ladder, descriptor) = single_ladder(&cmd.source, cmd.max_n)?;
    let state = coherent::build(gamma, &ladder, cmd.source.tail_tol)?;
    let r = state.report(&descriptor);
    let mut w = open_output(&cmd.output.out)?;
    match cmd.output.format.unwrap_or(Format::Json) {
        Format::Json => writeln!(w, "{}", report::report_json(&r))?,
        Format::Csv => {
            let row = report::SweepRow {
                spectrum: descriptor,
                kind: ladder.kind(),
                gamma_abs: gamma.norm(),
                outcome: Ok(state),
            };
            report::write_sweep_csv(&[row], &mut w)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn cmd_sweep(cmd: &SweepCmd) -> Result<()> {
    if matches!(cmd.output.format, Some(Format::Json)) {
        bail!("`sweep` writes CSV only");
    }
    let spectra = match cmd.source.build()? {
        Built::Spectra(s) => s,
        _ => bail!("`sweep` needs --uniform, --geometric or --file"),
    };
    let spec = SweepSpec {
        spectra,
        gammas: parse_grid(&cmd.gamma_grid)?,
        tail_tol: cmd.source.tail_tol,
        max_n: cmd.max_n,
        jobs: cmd.jobs,
    };
    let rows = report::run_sweep(&spec)?;
    let mut w = open_output(&cmd.output.out)?;
    report::write_sweep_csv(&rows, &mut w)?;
    w.flush()?;
    Ok(())
}

fn cmd_verify(cmd: &VerifyCmd) -> Result<bool> {
    let outcomes = verify::run(&verify::default_grid(cmd.seed), cmd.max_n, cmd.seed)?;
    print!("{}", verify::render_table(&outcomes));
    let failed = outcomes.iter().filter(|o| !o.passed()).count();
    println!("{} checks, {} failed", outcomes.len(), failed);
    Ok(failed == 0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Spectrum(c) => cmd_spectrum(c).map(|_| true),
        Command::Ladder(c) => cmd_ladder(c).map(|_| true),
        Command::Coherent(c) => cmd_coherent(c).map(|_| true),
        Command::Sweep(c) => cmd_sweep(c).map(|_| true),
        Command::Verify(c) => cmd_verify(c),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
