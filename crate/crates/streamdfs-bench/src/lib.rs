//! Benchmark harness for the streaming DFS toolkit.
//!
//! An [`ExperimentSpec`] names a set of graph inputs (generated or read from
//! edge-list files), a set of algorithms, space parameters `k`, and seeds.
//! [`run_experiment`] enumerates the full cross product, runs every
//! configuration, validates every resulting tree, and returns one
//! [`RunRecord`] per run in a deterministic order. [`write_csv`] and
//! [`write_trace_csv`] render the records; [`improvement_summary`] compares
//! the pass counts of the no-heuristic tiers (`kpathO`, `klevO`) against the
//! fully adaptive tiers (`kpathN`, `klevN`).

use std::collections::BTreeMap;
use std::fmt;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use anyhow::{anyhow, bail, Context, Result};
use streamdfs_core::{
    check_dfs, generate, run, run_traced, AdjacencyGraph, AlgoConfig, Edge, EdgeStream, GenModel,
    GenSpec, TraceEvent, ALGO_NAMES,
};

/// One graph input of an experiment.
#[derive(Debug, Clone)]
pub enum InputSpec {
    /// A generator request; the experiment's seed list supplies the per-run
    /// seed, overriding whatever the spec carries.
    Gen(GenSpec),
    /// An edge-list file: one `u v` pair per line, 1-based vertex ids, `%` and
    /// `#` lines ignored. File inputs are fixed data, so the seed list does
    /// not apply to them (their rows carry seed 0).
    File(PathBuf),
}

impl InputSpec {
    /// Stable dataset label used in report rows: `er-n{N}-m{M}` and
    /// `plaw-n{N}-m{M}` for generated inputs, the sanitized file stem for
    /// files.
    #[must_use]
    pub fn dataset_id(&self) -> String {
        match self {
            InputSpec::Gen(g) => match g.model {
                GenModel::ErdosRenyiGnm => format!("er-n{}-m{}", g.n, g.m),
                GenModel::PowerLaw => format!("plaw-n{}-m{}", g.n, g.m),
            },
            InputSpec::File(path) => {
                let stem = path
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default();
                let cleaned: String = stem
                    .chars()
                    .map(|c| if c.is_ascii_alphanumeric() || "-_.".contains(c) { c } else { '-' })
                    .collect();
                if cleaned.is_empty() {
                    "file".to_string()
                } else {
                    cleaned
                }
            }
        }
    }
}

/// A fully enumerated benchmark: every input is run under every algorithm,
/// every `k`, and (for generated inputs) every seed.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    /// Graph inputs.
    pub inputs: Vec<InputSpec>,
    /// Algorithm names, each one of [`ALGO_NAMES`].
    pub algorithms: Vec<String>,
    /// Space parameters (`k >= 1`).
    pub ks: Vec<u32>,
    /// Seeds applied to generated inputs.
    pub seeds: Vec<u64>,
    /// Times each configuration is repeated (the runs are deterministic, so
    /// repetitions only duplicate rows; useful for timing studies).
    pub repetitions: u32,
    /// Worker threads; `0` means one per available core.
    pub workers: usize,
    /// Record every storage-ledger mutation in the records (needed for
    /// [`write_trace_csv`]).
    pub record_traces: bool,
}

impl ExperimentSpec {
    /// A single-threaded, single-repetition experiment without traces.
    #[must_use]
    pub fn new(
        inputs: Vec<InputSpec>,
        algorithms: Vec<String>,
        ks: Vec<u32>,
        seeds: Vec<u64>,
    ) -> Self {
        Self {
            inputs,
            algorithms,
            ks,
            seeds,
            repetitions: 1,
            workers: 0,
            record_traces: false,
        }
    }
}

/// Outcome of one run: the dataset, the configuration, and the metrics.
#[derive(Debug, Clone)]
pub struct RunRecord {
    /// Dataset label (see [`InputSpec::dataset_id`]).
    pub dataset: String,
    /// Number of vertices.
    pub n: usize,
    /// Number of streamed edges.
    pub m: usize,
    /// Algorithm name.
    pub algo: String,
    /// Space parameter.
    pub k: u32,
    /// Generator seed (0 for file inputs).
    pub seed: u64,
    /// Stream passes used.
    pub passes: u32,
    /// Maximum number of simultaneously stored graph edges.
    pub peak_stored_edges: usize,
    /// Height of the produced tree (artificial root at level 0).
    pub height: u32,
    /// Whether the produced tree passed the DFS-validity check.
    pub valid: bool,
    /// Ledger mutations, when traces were requested.
    pub trace: Option<Vec<TraceEvent>>,
}

/// Header of the per-run CSV report.
pub const CSV_HEADER: &str = "dataset,n,m,algo,k,seed,passes,peak_stored_edges,height,valid";

/// One fully materialized input stream: a dataset label plus shared edges.
struct Dataset {
    id: String,
    n: usize,
    seed: u64,
    edges: Arc<Vec<Edge>>,
}

/// Reads an edge-list file into memory, inferring the vertex count from the
/// largest id seen.
fn load_edge_file(path: &Path) -> Result<(usize, Vec<Edge>)> {
    let mut stream = EdgeStream::from_file(path, None)
        .with_context(|| format!("cannot open {}", path.display()))?;
    let mut edges = Vec::new();
    while let Some(e) = stream
        .next_edge()
        .with_context(|| format!("cannot read {}", path.display()))?
    {
        edges.push(e);
    }
    Ok((stream.n(), edges))
}

/// Runs the full cross product described by `spec` and returns one record per
/// run, ordered by input, algorithm, `k`, seed, repetition.
///
/// Every produced tree is checked for DFS validity against its input graph;
/// the first invalid result aborts the experiment with an error naming the
/// offending run.
///
/// # Errors
///
/// Fails on unknown algorithm names, `k = 0`, generator or file errors, any
/// run error, and any invalid result.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<RunRecord>> {
    for name in &spec.algorithms {
        if !ALGO_NAMES.contains(&name.as_str()) {
            bail!("unknown algorithm name {name:?} (expected one of {ALGO_NAMES:?})");
        }
    }
    if let Some(&k) = spec.ks.iter().find(|&&k| k == 0) {
        bail!("k must be at least 1 (got {k})");
    }

    // Materialize every distinct (input, seed) stream once; runs share them.
    let mut per_input: Vec<Vec<Dataset>> = Vec::with_capacity(spec.inputs.len());
    for input in &spec.inputs {
        let id = input.dataset_id();
        match input {
            InputSpec::Gen(g) => {
                let mut list = Vec::with_capacity(spec.seeds.len());
                for &seed in &spec.seeds {
                    let mut request = g.clone();
                    request.seed = seed;
                    let edges = generate(&request)
                        .with_context(|| format!("cannot generate {id} with seed {seed}"))?;
                    list.push(Dataset { id: id.clone(), n: g.n, seed, edges: Arc::new(edges) });
                }
                per_input.push(list);
            }
            InputSpec::File(path) => {
                let (n, edges) = load_edge_file(path)?;
                per_input.push(vec![Dataset { id, n, seed: 0, edges: Arc::new(edges) }]);
            }
        }
    }

    // Deterministic task order: input, algorithm, k, seed, repetition.
    struct Task<'a> {
        dataset: &'a Dataset,
        algo: &'a str,
        k: u32,
    }
    let mut tasks = Vec::new();
    for datasets in &per_input {
        for algo in &spec.algorithms {
            for &k in &spec.ks {
                for dataset in datasets {
                    for _ in 0..spec.repetitions.max(1) {
                        tasks.push(Task { dataset, algo, k });
                    }
                }
            }
        }
    }

    let execute = |task: &Task<'_>| -> Result<RunRecord> {
        let config = AlgoConfig::from_name(task.algo, task.k)?;
        let ds = task.dataset;
        let mut stream = EdgeStream::in_memory_shared(ds.n, Arc::clone(&ds.edges))?;
        let (tree, report) = if spec.record_traces {
            run_traced(&config, &mut stream)?
        } else {
            run(&config, &mut stream)?
        };
        let graph = AdjacencyGraph::from_edges(ds.n, &ds.edges);
        let verdict = check_dfs(&graph, &tree);
        Ok(RunRecord {
            dataset: ds.id.clone(),
            n: ds.n,
            m: ds.edges.len(),
            algo: task.algo.to_string(),
            k: task.k,
            seed: ds.seed,
            passes: report.passes_used,
            peak_stored_edges: report.peak_stored_edges,
            height: tree.height(),
            valid: verdict.is_valid(),
            trace: report.trace,
        })
    };

    let workers = if spec.workers == 0 {
        std::thread::available_parallelism().map_or(1, |p| p.get())
    } else {
        spec.workers
    };
    let workers = workers.min(tasks.len().max(1));

    let mut results: Vec<Option<Result<RunRecord, String>>> = Vec::new();
    results.resize_with(tasks.len(), || None);
    if workers <= 1 {
        for (slot, task) in results.iter_mut().zip(&tasks) {
            *slot = Some(execute(task).map_err(|e| format!("{e:#}")));
        }
    } else {
        let cursor = AtomicUsize::new(0);
        let shared = Mutex::new(&mut results);
        std::thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(|| loop {
                    let i = cursor.fetch_add(1, Ordering::Relaxed);
                    if i >= tasks.len() {
                        break;
                    }
                    let outcome = execute(&tasks[i]).map_err(|e| format!("{e:#}"));
                    shared.lock().expect("result lock")[i] = Some(outcome);
                });
            }
        });
    }

    let mut records = Vec::with_capacity(tasks.len());
    for slot in results {
        let record = slot
            .expect("every task executed")
            .map_err(|e| anyhow!(e))?;
        if !record.valid {
            bail!(
                "validity check failed for {},{},{},{},{},{},{},{},{},{}",
                record.dataset,
                record.n,
                record.m,
                record.algo,
                record.k,
                record.seed,
                record.passes,
                record.peak_stored_edges,
                record.height,
                record.valid,
            );
        }
        records.push(record);
    }
    Ok(records)
}

/// Writes the per-run CSV report (header [`CSV_HEADER`]).
///
/// # Errors
///
/// Propagates I/O failures of `out`.
pub fn write_csv<W: Write>(records: &[RunRecord], mut out: W) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.dataset, r.n, r.m, r.algo, r.k, r.seed, r.passes, r.peak_stored_edges, r.height,
            r.valid
        )?;
    }
    Ok(())
}

/// Writes every recorded storage-ledger event, one row per event.
///
/// # Errors
///
/// Propagates I/O failures of `out`.
pub fn write_trace_csv<W: Write>(records: &[RunRecord], mut out: W) -> io::Result<()> {
    writeln!(out, "dataset,algo,k,seed,event_index,current")?;
    for r in records {
        if let Some(trace) = &r.trace {
            for ev in trace {
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    r.dataset, r.algo, r.k, r.seed, ev.index, ev.current
                )?;
            }
        }
    }
    Ok(())
}

/// Pass reduction of one (family, dataset, k) cell: the `O` tier's average
/// passes against the `N` tier's, over whatever seeds both were run with.
#[derive(Debug, Clone)]
pub struct ImprovementRow {
    /// `"kpath"` or `"klev"`.
    pub family: &'static str,
    /// Dataset label.
    pub dataset: String,
    /// Space parameter.
    pub k: u32,
    /// Average passes of the `O` tier.
    pub baseline_avg: f64,
    /// Average passes of the `N` tier.
    pub adaptive_avg: f64,
    /// `floor(100 * (baseline - adaptive) / baseline)`.
    pub reduction_pct: i64,
}

/// Output of [`improvement_summary`].
#[derive(Debug, Clone, Default)]
pub struct ImprovementSummary {
    /// One row per (family, dataset, k) with both tiers present.
    pub rows: Vec<ImprovementRow>,
    /// Per (family, k) integer average of the row reductions.
    pub averages: Vec<(&'static str, u32, i64)>,
    /// Cells skipped because one tier was missing.
    pub warnings: Vec<String>,
}

/// Compares `kpathO` against `kpathN` and `klevO` against `klevN` per dataset
/// and `k`. Pass counts are averaged over seeds before the reduction
/// percentage is taken; the percentage is floored to an integer. Cells
/// missing either tier are skipped with a warning.
#[must_use]
pub fn improvement_summary(records: &[RunRecord]) -> ImprovementSummary {
    type Cell = (Vec<u32>, Vec<u32>);
    let mut cells: BTreeMap<(&'static str, String, u32), Cell> = BTreeMap::new();
    for r in records {
        let (family, adaptive) = match r.algo.as_str() {
            "kpathO" => ("kpath", false),
            "kpathN" => ("kpath", true),
            "klevO" => ("klev", false),
            "klevN" => ("klev", true),
            _ => continue,
        };
        let cell = cells.entry((family, r.dataset.clone(), r.k)).or_default();
        if adaptive {
            cell.1.push(r.passes);
        } else {
            cell.0.push(r.passes);
        }
    }

    fn avg(xs: &[u32]) -> f64 {
        xs.iter().map(|&x| f64::from(x)).sum::<f64>() / xs.len() as f64
    }

    let mut summary = ImprovementSummary::default();
    let mut per_family_k: BTreeMap<(&'static str, u32), Vec<i64>> = BTreeMap::new();
    for ((family, dataset, k), (baseline, adaptive)) in cells {
        if baseline.is_empty() || adaptive.is_empty() {
            let missing = if baseline.is_empty() { "O" } else { "N" };
            summary.warnings.push(format!(
                "{family} on {dataset} at k={k}: no {family}{missing} runs; cell skipped"
            ));
            continue;
        }
        let baseline_avg = avg(&baseline);
        let adaptive_avg = avg(&adaptive);
        let reduction_pct = if baseline_avg > 0.0 {
            (100.0 * (baseline_avg - adaptive_avg) / baseline_avg).floor() as i64
        } else {
            0
        };
        per_family_k.entry((family, k)).or_default().push(reduction_pct);
        summary.rows.push(ImprovementRow {
            family,
            dataset,
            k,
            baseline_avg,
            adaptive_avg,
            reduction_pct,
        });
    }
    summary.averages = per_family_k
        .into_iter()
        .map(|((family, k), reductions)| {
            let mean = reductions.iter().sum::<i64>() as f64 / reductions.len() as f64;
            (family, k, mean.floor() as i64)
        })
        .collect();
    summary
}

impl fmt::Display for ImprovementSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "family,dataset,k,baseline_avg_passes,adaptive_avg_passes,reduction_pct")?;
        for row in &self.rows {
            writeln!(
                f,
                "{},{},{},{:.2},{:.2},{}",
                row.family, row.dataset, row.k, row.baseline_avg, row.adaptive_avg,
                row.reduction_pct
            )?;
        }
        for (family, k, mean) in &self.averages {
            writeln!(f, "{family},(average),{k},,,{mean}")?;
        }
        Ok(())
    }
}

/// Parses a generator request of the form `er:n=N,m=M` or
/// `plaw:n=N,m=M[,exp=E]`. The seed is left at 0; experiments override it per
/// run.
///
/// # Errors
///
/// Fails on unknown models, unknown or repeated keys, missing `n`/`m`, and
/// unparsable numbers.
pub fn parse_gen_spec(text: &str) -> Result<GenSpec> {
    let (model, rest) = text
        .split_once(':')
        .ok_or_else(|| anyhow!("generator spec {text:?} must look like er:n=N,m=M"))?;
    let mut n: Option<usize> = None;
    let mut m: Option<usize> = None;
    let mut exp: Option<f64> = None;
    for part in rest.split(',') {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| anyhow!("generator spec part {part:?} must look like key=value"))?;
        match key {
            "n" if n.is_none() => n = Some(value.parse().context("n must be an integer")?),
            "m" if m.is_none() => m = Some(value.parse().context("m must be an integer")?),
            "exp" if model == "plaw" && exp.is_none() => {
                exp = Some(value.parse().context("exp must be a number")?);
            }
            _ => bail!("unknown or repeated key {key:?} in generator spec {text:?}"),
        }
    }
    let n = n.ok_or_else(|| anyhow!("generator spec {text:?} is missing n="))?;
    let m = m.ok_or_else(|| anyhow!("generator spec {text:?} is missing m="))?;
    match model {
        "er" => Ok(GenSpec::gnm(n, m, 0)),
        "plaw" => {
            let mut spec = GenSpec::powerlaw(n, m, 0);
            if let Some(e) = exp {
                spec.exponent = e;
            }
            Ok(spec)
        }
        _ => bail!("unknown generator model {model:?} (expected er or plaw)"),
    }
}

/// Parses a comma-separated algorithm list; `all` expands to every known
/// name. Duplicates are dropped, first occurrence wins.
///
/// # Errors
///
/// Fails on names outside [`ALGO_NAMES`].
pub fn parse_algo_list(text: &str) -> Result<Vec<String>> {
    let mut out: Vec<String> = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        if part == "all" {
            for name in ALGO_NAMES {
                if !out.iter().any(|x| x == name) {
                    out.push(name.to_string());
                }
            }
        } else if ALGO_NAMES.contains(&part) {
            if !out.iter().any(|x| x == part) {
                out.push(part.to_string());
            }
        } else {
            bail!("unknown algorithm {part:?} (expected one of {ALGO_NAMES:?} or all)");
        }
    }
    Ok(out)
}
