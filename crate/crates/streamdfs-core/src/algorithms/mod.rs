//! The streaming DFS algorithm families and their shared driver.
//!
//! Ten algorithms are exposed by name:
//!
//! * `simp` — one root-to-leaf extension per pass,
//! * `imprv` — one extension per unvisited component per pass,
//! * `kpathO/kpath1/kpath2/kpathN` — the path-appending family: buffer a
//!   component's edges up to `w * (k - 1)`; on overflow append a root-to-leaf
//!   path of a local DFS tree and split the remainder around it,
//! * `klevO/klev1/klev2/klevN` — the level-appending family: maintain a local
//!   DFS tree incrementally and append its top `k` levels (or everything whose
//!   arrangement provably cannot change) each pass.
//!
//! The letter suffix selects the heuristic tier (see [`Variant`]): `O` starts
//! from a spanning-forest pass, `1` adds the star initialization over the
//! artificial root, `2` adds edge deduplication against stored edges, and `N`
//! adds the adaptive space/structure heuristics of each family.
//!
//! Every run enforces the `n * k` storage cap through a [`BudgetLedger`] and
//! reports the number of stream passes, the only cost metric.

mod imprv;
mod klev;
mod kpath;
mod simp;

use std::fmt;

use thiserror::Error;

use crate::budget::{BudgetError, BudgetLedger, TraceEvent};
use crate::forest::{Component, ComponentId, ComponentRegistry, ForestError, UnionFind};
use crate::graph::{DfsTree, Edge, GraphError, VertexId};
use crate::incremental::IncrementalError;
use crate::stream::{EdgeStream, StreamError};

pub use klev::advance_broomstick;

/// Errors produced while configuring or running an algorithm.
#[derive(Debug, Error)]
pub enum AlgoError {
    /// The algorithm name is not one of the ten known names.
    #[error("unknown algorithm name `{0}`")]
    InvalidName(String),
    /// The space parameter must be at least 1.
    #[error("k must be at least 1 (got {0})")]
    InvalidK(u32),
    /// Failure reading the edge stream.
    #[error(transparent)]
    Stream(#[from] StreamError),
    /// Storage budget fault.
    #[error(transparent)]
    Budget(#[from] BudgetError),
    /// Structural tree fault (indicates a bug).
    #[error(transparent)]
    Graph(#[from] GraphError),
    /// Component bookkeeping fault (indicates a bug).
    #[error(transparent)]
    Forest(#[from] ForestError),
    /// Incremental maintenance fault (indicates a bug).
    #[error(transparent)]
    Incremental(#[from] IncrementalError),
    /// A safety net tripped; the run cannot be trusted.
    #[error("internal error: {0}")]
    Internal(String),
}

/// Algorithm family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// Baseline: one root-to-leaf path extension per pass.
    Simp,
    /// Baseline: one extension per unvisited component per pass.
    Imprv,
    /// Path-appending family (`kpath*`).
    KPath,
    /// Level-appending family (`klev*`).
    KLev,
}

/// Heuristic tier of the `kpath`/`klev` families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// No heuristics: spend the first pass building a spanning forest.
    O,
    /// Initialize with one whole-graph component under the artificial root.
    One,
    /// Additionally deduplicate stream edges against stored edges.
    Two,
    /// Additionally adapt space use: `kpathN` re-allocates freed budget into
    /// larger buffers; `klevN` discards provably redundant edges early.
    N,
}

impl Variant {
    /// Heuristics enabled at this tier.
    #[must_use]
    pub fn heuristics(self) -> HeuristicSet {
        match self {
            Variant::O => HeuristicSet {
                star_init: false,
                dedup: false,
                adaptive: false,
            },
            Variant::One => HeuristicSet {
                star_init: true,
                dedup: false,
                adaptive: false,
            },
            Variant::Two => HeuristicSet {
                star_init: true,
                dedup: true,
                adaptive: false,
            },
            Variant::N => HeuristicSet {
                star_init: true,
                dedup: true,
                adaptive: true,
            },
        }
    }

    fn suffix(self) -> &'static str {
        match self {
            Variant::O => "O",
            Variant::One => "1",
            Variant::Two => "2",
            Variant::N => "N",
        }
    }
}

/// Which of the three composable heuristics a [`Variant`] enables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HeuristicSet {
    /// Start from one whole-graph component hanging off the artificial root
    /// instead of spending a pass on a spanning forest.
    pub star_init: bool,
    /// Skip stream edges already stored (as tree or buffered/retained edges).
    pub dedup: bool,
    /// Family-specific space adaptivity (larger buffers / early discards).
    pub adaptive: bool,
}

/// A fully specified algorithm: family, tier, and space parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AlgoConfig {
    /// Algorithm family.
    pub family: Family,
    /// Heuristic tier; `None` for the baselines.
    pub variant: Option<Variant>,
    /// Space parameter `k >= 1`; storage cap is `n * k` edges.
    pub k: u32,
}

/// The ten recognized algorithm names.
pub const ALGO_NAMES: [&str; 10] = [
    "simp", "imprv", "kpathO", "kpath1", "kpath2", "kpathN", "klevO", "klev1", "klev2", "klevN",
];

impl AlgoConfig {
    /// Parses an algorithm name (one of [`ALGO_NAMES`]) with space parameter
    /// `k`.
    ///
    /// # Errors
    ///
    /// Returns [`AlgoError::InvalidName`] for unrecognized names and
    /// [`AlgoError::InvalidK`] when `k == 0`.
    pub fn from_name(name: &str, k: u32) -> Result<Self, AlgoError> {
        if k == 0 {
            return Err(AlgoError::InvalidK(k));
        }
        let (family, variant) = match name {
            "simp" => (Family::Simp, None),
            "imprv" => (Family::Imprv, None),
            _ => {
                let (fam, rest) = if let Some(rest) = name.strip_prefix("kpath") {
                    (Family::KPath, rest)
                } else if let Some(rest) = name.strip_prefix("klev") {
                    (Family::KLev, rest)
                } else {
                    return Err(AlgoError::InvalidName(name.to_string()));
                };
                let variant = match rest {
                    "O" => Variant::O,
                    "1" => Variant::One,
                    "2" => Variant::Two,
                    "N" => Variant::N,
                    _ => return Err(AlgoError::InvalidName(name.to_string())),
                };
                (fam, Some(variant))
            }
        };
        Ok(Self { family, variant, k })
    }

    /// Canonical name of the algorithm (`simp`, `kpath2`, ...).
    #[must_use]
    pub fn name(&self) -> String {
        match (self.family, self.variant) {
            (Family::Simp, _) => "simp".to_string(),
            (Family::Imprv, _) => "imprv".to_string(),
            (Family::KPath, v) => format!("kpath{}", v.unwrap_or(Variant::O).suffix()),
            (Family::KLev, v) => format!("klev{}", v.unwrap_or(Variant::O).suffix()),
        }
    }
}

impl fmt::Display for AlgoConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(k={})", self.name(), self.k)
    }
}

/// Cost and storage metrics of one run.
#[derive(Debug, Clone)]
pub struct RunReport {
    /// Number of stream passes started (a partially read pass counts as one).
    pub passes_used: u32,
    /// Maximum number of simultaneously stored graph edges.
    pub peak_stored_edges: usize,
    /// Ledger mutation trace; present only for [`run_traced`].
    pub trace: Option<Vec<TraceEvent>>,
}

/// Runs `config` over `stream`, returning the DFS tree (rooted at the
/// artificial vertex `n`) and the run metrics.
///
/// The stream is rewound before the run; passes are counted relative to its
/// state at entry. Validity of the result can be verified with
/// [`crate::validation::check_dfs`].
///
/// # Errors
///
/// Propagates stream, ledger, and structural faults; returns
/// [`AlgoError::InvalidK`] when `config.k == 0`.
pub fn run(config: &AlgoConfig, stream: &mut EdgeStream) -> Result<(DfsTree, RunReport), AlgoError> {
    run_impl(config, stream, false)
}

/// Like [`run`], but records every ledger mutation in
/// [`RunReport::trace`] for storage audits.
///
/// # Errors
///
/// Same as [`run`].
pub fn run_traced(
    config: &AlgoConfig,
    stream: &mut EdgeStream,
) -> Result<(DfsTree, RunReport), AlgoError> {
    run_impl(config, stream, true)
}

fn run_impl(
    config: &AlgoConfig,
    stream: &mut EdgeStream,
    trace: bool,
) -> Result<(DfsTree, RunReport), AlgoError> {
    if config.k == 0 {
        return Err(AlgoError::InvalidK(config.k));
    }
    let n = stream.n();
    let root = n as VertexId;
    if n == 0 {
        // Degenerate graph: the output tree is the artificial root alone and
        // no pass is needed.
        return Ok((
            DfsTree::new(root),
            RunReport {
                passes_used: 0,
                peak_stored_edges: 0,
                trace: trace.then(Vec::new),
            },
        ));
    }
    stream.rewind();
    let passes_before = stream.passes_used();
    let mut ledger = BudgetLedger::new(n, config.k);
    if trace {
        ledger.enable_trace();
    }
    let variant = config.variant.unwrap_or(Variant::O);
    let tree = match config.family {
        Family::Simp => simp::run(stream, &mut ledger)?,
        Family::Imprv => imprv::run(stream, &mut ledger)?,
        Family::KPath => kpath::run(stream, &mut ledger, config.k, variant)?,
        Family::KLev => klev::run(stream, &mut ledger, config.k, variant)?,
    };
    debug_assert_eq!(tree.len(), n + 1, "output tree must span all vertices");
    let report = RunReport {
        passes_used: stream.passes_used() - passes_before,
        peak_stored_edges: ledger.peak_usage(),
        trace: trace.then(|| ledger.trace_events().to_vec()),
    };
    Ok((tree, report))
}

// ---------------------------------------------------------------------------
// Shared driver pieces for the kpath/klev families
// ---------------------------------------------------------------------------

/// Safety net: no family legitimately needs more than `n + 3` passes (the
/// worst case is one pass per vertex plus setup). Exceeding it means a bug.
pub(crate) fn ensure_pass_cap(n: usize, passes_run: u32) -> Result<(), AlgoError> {
    let cap = n as u32 + 3;
    if passes_run >= cap {
        return Err(AlgoError::Internal(format!(
            "run exceeded the pass safety cap of {cap} passes"
        )));
    }
    Ok(())
}

/// Initialization for variants with the star heuristic: one component covering
/// every vertex, its local tree the star of (implicit) root edges. The star
/// edges are charged so that every component uniformly holds `weight` edges.
pub(crate) fn init_star_component(
    reg: &mut ComponentRegistry,
    ledger: &mut BudgetLedger,
    n: usize,
) -> Result<(), AlgoError> {
    let root = n as VertexId;
    let mut tree = DfsTree::new(root);
    for v in 0..n as VertexId {
        tree.add_child(root, v)?;
    }
    ledger.charge(n)?;
    reg.register(Component {
        id: ComponentId::MAX,
        vertices: (0..n as VertexId).collect(),
        tree,
        root,
        attach_parent: None,
        buffered: Vec::new(),
    });
    Ok(())
}

/// First pass of the `O` variants: build a spanning forest with a union-find
/// over the stream. Classes whose every edge joined the forest are complete
/// trees — they are appended outright; all others become components rooted at
/// their earliest-streamed vertex, hanging off the artificial root.
pub(crate) fn spanning_forest_pass(
    stream: &mut EdgeStream,
    ledger: &mut BudgetLedger,
    output: &mut DfsTree,
    reg: &mut ComponentRegistry,
) -> Result<(), AlgoError> {
    let n = reg.n();
    let root = output.root();
    let mut uf = UnionFind::new(n);
    // Per class-representative aggregates, moved to the union winner.
    let mut merges: Vec<Vec<Edge>> = vec![Vec::new(); n];
    let mut has_nontree = vec![false; n];
    // (first stream position, vertex) minimum per class: the class root.
    let mut first_seen: Vec<Option<(u64, VertexId)>> = vec![None; n];
    let mut seq = 0u64;

    while let Some(e) = stream.next_edge()? {
        for end in [e.u, e.v] {
            let slot = end as usize;
            let root_slot = uf.find(slot);
            if first_seen[root_slot].is_none() {
                first_seen[root_slot] = Some((seq, end));
            }
            seq += 1;
        }
        let (a, b) = (uf.find(e.u as usize), uf.find(e.v as usize));
        if a == b {
            has_nontree[a] = true;
            continue;
        }
        ledger.charge(1)?;
        uf.union(a, b);
        let winner = uf.find(a);
        let loser = if winner == a { b } else { a };
        let mut moved = std::mem::take(&mut merges[loser]);
        merges[winner].append(&mut moved);
        merges[winner].push(e);
        has_nontree[winner] = has_nontree[winner] || has_nontree[loser];
        first_seen[winner] = match (first_seen[winner], first_seen[loser]) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, y) => x.or(y),
        };
    }

    // Group vertices by class, order classes by first-seen stream position
    // (never-streamed vertices are singleton classes, appended last by id).
    let mut members: Vec<Vec<VertexId>> = vec![Vec::new(); n];
    for v in 0..n {
        members[uf.find(v)].push(v as VertexId);
    }
    let mut class_roots: Vec<usize> = (0..n).filter(|&s| !members[s].is_empty()).collect();
    class_roots.sort_by_key(|&s| {
        let (seq, _) = first_seen[s].unwrap_or((u64::MAX, members[s][0]));
        (seq, members[s][0])
    });

    for s in class_roots {
        let (_, class_root) = first_seen[s].unwrap_or((u64::MAX, members[s][0]));
        let tree = crate::forest::tree_from_forest_edges(&merges[s], class_root);
        debug_assert_eq!(tree.len(), members[s].len(), "forest tree must span class");
        if !has_nontree[s] {
            // The class is its own tree: its arrangement is final.
            let adds = append_whole_tree(output, reg, &tree, class_root, Some(root))?;
            debug_assert_eq!(adds, members[s].len());
            // Tree edges consumed; the root attach edge is implicit.
            ledger.release(members[s].len() - 1)?;
        } else {
            // Charge the implicit attach edge so the component uniformly holds
            // `weight` edges (tree + attach).
            ledger.charge(1)?;
            reg.register(Component {
                id: ComponentId::MAX,
                vertices: members[s].clone(),
                tree,
                root: class_root,
                attach_parent: Some(root),
                buffered: Vec::new(),
            });
        }
    }
    Ok(())
}

/// Appends `tree` (a component's local tree rooted at `local_root`) to
/// `output` in full, marking every real vertex visited. When `attach` is
/// `Some(p)`, `local_root` is first added under `p`; when `None`, `local_root`
/// must already be in `output` (the artificial root). Returns the number of
/// vertices added.
pub(crate) fn append_whole_tree(
    output: &mut DfsTree,
    reg: &mut ComponentRegistry,
    tree: &DfsTree,
    local_root: VertexId,
    attach: Option<VertexId>,
) -> Result<usize, AlgoError> {
    let mut adds = 0usize;
    if let Some(p) = attach {
        output.add_child(p, local_root)?;
        reg.mark_visited(local_root);
        adds += 1;
    }
    let mut stack = vec![local_root];
    while let Some(x) = stack.pop() {
        let kids = tree.children_of(x)?.to_vec();
        for &c in &kids {
            output.add_child(x, c)?;
            reg.mark_visited(c);
            adds += 1;
        }
        for &c in kids.iter().rev() {
            stack.push(c);
        }
    }
    Ok(adds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::AdjacencyGraph;
    use crate::validation::check_dfs;

    fn edge(u: VertexId, v: VertexId) -> Edge {
        Edge::new(u, v).expect("test edges are loop-free")
    }

    #[test]
    fn names_round_trip() {
        for name in ALGO_NAMES {
            let cfg = AlgoConfig::from_name(name, 2).unwrap();
            assert_eq!(cfg.name(), name);
            assert_eq!(cfg.k, 2);
        }
    }

    #[test]
    fn variant_heuristic_tiers_nest() {
        let o = Variant::O.heuristics();
        assert!(!o.star_init && !o.dedup && !o.adaptive);
        let one = Variant::One.heuristics();
        assert!(one.star_init && !one.dedup && !one.adaptive);
        let two = Variant::Two.heuristics();
        assert!(two.star_init && two.dedup && !two.adaptive);
        let nn = Variant::N.heuristics();
        assert!(nn.star_init && nn.dedup && nn.adaptive);
    }

    #[test]
    fn bad_names_and_k_are_rejected() {
        assert!(matches!(
            AlgoConfig::from_name("kpathX", 1),
            Err(AlgoError::InvalidName(_))
        ));
        assert!(matches!(
            AlgoConfig::from_name("dfs", 1),
            Err(AlgoError::InvalidName(_))
        ));
        assert!(matches!(
            AlgoConfig::from_name("simp", 0),
            Err(AlgoError::InvalidK(0))
        ));
    }

    #[test]
    fn zero_vertex_graph_needs_no_pass() {
        for name in ALGO_NAMES {
            let cfg = AlgoConfig::from_name(name, 1).unwrap();
            let mut s = EdgeStream::in_memory(0, vec![]).unwrap();
            let (tree, report) = run(&cfg, &mut s).unwrap();
            assert_eq!(report.passes_used, 0, "{name}");
            assert_eq!(tree.len(), 1, "{name}: only the artificial root");
        }
    }

    #[test]
    fn empty_stream_pass_counts_match_family_behaviour() {
        // The component families finish an empty stream in one pass; `imprv`
        // places every (singleton) component in its first pass too. `simp`
        // adds one vertex per pass by design, so it needs n passes.
        for name in ALGO_NAMES {
            for k in [1, 3] {
                let cfg = AlgoConfig::from_name(name, k).unwrap();
                let mut s = EdgeStream::in_memory(5, vec![]).unwrap();
                let (tree, report) = run(&cfg, &mut s).unwrap();
                let expected = if name == "simp" { 5 } else { 1 };
                assert_eq!(report.passes_used, expected, "{name} k={k}");
                let g = AdjacencyGraph::from_edges(5, &[]);
                let r = check_dfs(&g, &tree);
                assert!(r.is_valid(), "{name} k={k}: {r:?}");
                assert_eq!(tree.height(), 1, "{name} k={k}: all under the root");
            }
        }
    }

    #[test]
    fn every_algorithm_solves_a_small_cycle() {
        // 5-cycle: all ten algorithms, k in {1, 2}: spanning and DFS-valid.
        let edges = vec![edge(0, 1), edge(1, 2), edge(2, 3), edge(3, 4), edge(4, 0)];
        let g = AdjacencyGraph::from_edges(5, &edges);
        for name in ALGO_NAMES {
            for k in [1, 2] {
                let cfg = AlgoConfig::from_name(name, k).unwrap();
                let mut s = EdgeStream::in_memory(5, edges.clone()).unwrap();
                let (tree, report) = run(&cfg, &mut s).unwrap();
                let r = check_dfs(&g, &tree);
                assert!(r.is_valid(), "{name} k={k}: {r:?}");
                assert!(report.passes_used >= 1);
                assert!(
                    report.peak_stored_edges <= 5 * k as usize,
                    "{name} k={k}: peak {} over cap",
                    report.peak_stored_edges
                );
            }
        }
    }

    #[test]
    fn traced_run_records_ledger_events() {
        let edges = vec![edge(0, 1), edge(1, 2), edge(2, 0)];
        let cfg = AlgoConfig::from_name("kpath1", 2).unwrap();
        let mut s = EdgeStream::in_memory(3, edges).unwrap();
        let (_, report) = run_traced(&cfg, &mut s).unwrap();
        let trace = report.trace.expect("trace requested");
        assert!(!trace.is_empty(), "ledger activity must be recorded");
        let peak_from_trace = trace.iter().map(|t| t.current).max().unwrap();
        assert_eq!(peak_from_trace, report.peak_stored_edges);
    }

    #[test]
    fn spanning_forest_pass_appends_pure_trees_immediately() {
        // Two classes: a path 0-1-2 (pure tree) and a triangle 3-4-5; plus the
        // never-streamed vertex 6.
        let edges = vec![
            edge(3, 4),
            edge(0, 1),
            edge(4, 5),
            edge(1, 2),
            edge(3, 5),
        ];
        let mut s = EdgeStream::in_memory(7, edges).unwrap();
        let mut ledger = BudgetLedger::new(7, 1);
        let mut output = DfsTree::new(7);
        let mut reg = ComponentRegistry::new(7);
        spanning_forest_pass(&mut s, &mut ledger, &mut output, &mut reg).unwrap();
        // Path class finished: 0, 1, 2 visited; triangle registered; 6 done.
        for v in [0, 1, 2, 6] {
            assert!(reg.is_visited(v), "vertex {v} should be visited");
        }
        assert_eq!(reg.unvisited_count(), 3);
        let ids = reg.live_ids();
        assert_eq!(ids.len(), 1);
        let c = reg.get(ids[0]).unwrap();
        assert_eq!(c.root, 3, "earliest streamed vertex of the triangle");
        assert_eq!(c.attach_parent, Some(7));
        assert_eq!(c.vertices, vec![3, 4, 5]);
        // Held: triangle tree (2 merge edges) + its implicit attach = 3.
        assert_eq!(ledger.current(), 3);
        // Output so far: 0 under root (path root), 1, 2 below; 6 under root.
        assert_eq!(output.parent_of(0), Ok(Some(7)));
        assert_eq!(output.parent_of(6), Ok(Some(7)));
        assert_eq!(output.parent_of(2), Ok(Some(1)));
    }
}
