//! `streamdfs`: run streaming DFS algorithms over generated or file-backed
//! graph streams and report passes, storage, and validity per run.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::Parser;
use streamdfs_bench::{
    improvement_summary, parse_algo_list, parse_gen_spec, run_experiment, write_csv,
    write_trace_csv, ExperimentSpec, InputSpec,
};

/// Benchmark driver for the streaming DFS algorithm families.
///
/// Each selected input is run under every selected algorithm, space
/// parameter, and seed. The per-run report goes to stdout as CSV, or to the
/// file named by --csv. The process exits 0 only if every run produced a
/// valid DFS tree.
#[derive(Parser, Debug)]
#[command(name = "streamdfs", version)]
struct Cli {
    /// Edge-list input file: one "u v" pair per line, 1-based vertex ids,
    /// lines starting with % or # ignored. May be given multiple times.
    #[arg(long = "input", value_name = "FILE")]
    input: Vec<PathBuf>,

    /// Generated input, er:n=N,m=M or plaw:n=N,m=M[,exp=3]. May be given
    /// multiple times.
    #[arg(long = "gen", value_name = "SPEC")]
    gen: Vec<String>,

    /// Comma-separated algorithms (simp, imprv, kpathO, kpath1, kpath2,
    /// kpathN, klevO, klev1, klev2, klevN), or "all".
    #[arg(long, value_name = "LIST", default_value = "all")]
    algo: String,

    /// Comma-separated space parameters k (each >= 1).
    #[arg(long, value_name = "LIST", default_value = "1", value_delimiter = ',')]
    k: Vec<u32>,

    /// Comma-separated seeds for generated inputs. File inputs are fixed
    /// data: they run once and report seed 0.
    #[arg(long, value_name = "LIST", default_value = "0", value_delimiter = ',')]
    seed: Vec<u64>,

    /// Write the per-run CSV report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    csv: Option<PathBuf>,

    /// Record every storage-ledger event and write them as CSV to this path.
    #[arg(long = "trace-budget", value_name = "PATH")]
    trace_budget: Option<PathBuf>,

    /// Worker threads; 0 means one per available core.
    #[arg(long, value_name = "INT", default_value_t = 0)]
    workers: usize,

    /// Write the O-versus-N pass-reduction summary to this path.
    #[arg(long, value_name = "PATH")]
    summary: Option<PathBuf>,
}

fn main() -> ExitCode {
    match real_main() {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn real_main() -> Result<()> {
    let cli = Cli::parse();
    if cli.input.is_empty() && cli.gen.is_empty() {
        bail!("no inputs: pass --input FILE and/or --gen SPEC");
    }

    let mut inputs: Vec<InputSpec> = Vec::new();
    for path in &cli.input {
        inputs.push(InputSpec::File(path.clone()));
    }
    for text in &cli.gen {
        inputs.push(InputSpec::Gen(parse_gen_spec(text)?));
    }

    let spec = ExperimentSpec {
        inputs,
        algorithms: parse_algo_list(&cli.algo)?,
        ks: cli.k.clone(),
        seeds: cli.seed.clone(),
        repetitions: 1,
        workers: cli.workers,
        record_traces: cli.trace_budget.is_some(),
    };
    let records = run_experiment(&spec)?;

    match &cli.csv {
        Some(path) => {
            let file = File::create(path)
                .with_context(|| format!("cannot create {}", path.display()))?;
            write_csv(&records, BufWriter::new(file))
                .with_context(|| format!("cannot write {}", path.display()))?;
        }
        None => write_csv(&records, io::stdout().lock()).context("cannot write to stdout")?,
    }

    if let Some(path) = &cli.trace_budget {
        let file =
            File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
        write_trace_csv(&records, BufWriter::new(file))
            .with_context(|| format!("cannot write {}", path.display()))?;
    }

    let summary = improvement_summary(&records);
    for warning in &summary.warnings {
        eprintln!("warning: {warning}");
    }
    if let Some(path) = &cli.summary {
        let file =
            File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
        let mut out = BufWriter::new(file);
        write!(out, "{summary}").with_context(|| format!("cannot write {}", path.display()))?;
    } else if cli.csv.is_some() && !summary.rows.is_empty() {
        // The CSV went to a file, so the summary can use stdout.
        print!("{summary}");
    }
    Ok(())
}
