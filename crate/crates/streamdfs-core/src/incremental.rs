//! Incremental maintenance of a DFS tree under edge insertions.
//!
//! Inserting an edge into a DFS tree either leaves it valid (the edge is a
//! *back* edge between an ancestor-descendant pair) or violates it (a *cross*
//! edge). A cross edge `(x, y)` with `level(x) >= level(y)` and LCA `w` is
//! repaired by deleting the tree edge `(w, v)` — where `v` is `y`'s ancestor
//! whose parent is `w` — reversing the parent-child relation along the path
//! from `y` up to `v`, and adopting `(x, y)` as the new tree edge. Retained
//! back edges incident to moved vertices may become cross and are re-queued.
//! Vertices only ever move away from the root (monotonic fall), which bounds
//! the total work.
//!
//! A [`MaintainPolicy`] decides which back edges are worth keeping and may
//! drop or evict edges to respect a storage budget; [`RetainAll`] keeps
//! everything and yields the textbook operation [`insert_edge`].

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::budget::{BudgetError, BudgetLedger};
use crate::graph::{DfsTree, Edge, GraphError, VertexId};

/// Errors produced by incremental maintenance.
#[derive(Debug, Error)]
pub enum IncrementalError {
    /// An inserted edge has an endpoint outside the component's tree.
    #[error("vertex {0} outside component")]
    OutsideComponent(VertexId),
    /// Ledger fault while charging or releasing retained edges.
    #[error(transparent)]
    Budget(#[from] BudgetError),
    /// Structural fault (defensive; indicates a bug if ever seen).
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// The retained non-tree edges of a component (`H_C` minus the tree), with a
/// per-vertex incidence index.
#[derive(Debug, Default)]
pub struct RetainedEdgeSet {
    stored: HashSet<(VertexId, VertexId)>,
    by_vertex: HashMap<VertexId, Vec<Edge>>,
}

impl RetainedEdgeSet {
    /// Creates an empty set.
    #[must_use]
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of retained edges.
    #[must_use]
    pub fn len(&self) -> usize {
        self.stored.len()
    }

    /// `true` when nothing is retained.
    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.stored.is_empty()
    }

    /// `true` when `e` is retained (orientation-insensitive).
    #[must_use]
    pub fn contains(&self, e: Edge) -> bool {
        self.stored.contains(&e.normalized())
    }

    /// Inserts `e`; returns `false` when it was already present.
    pub fn insert(&mut self, e: Edge) -> bool {
        if !self.stored.insert(e.normalized()) {
            return false;
        }
        self.by_vertex.entry(e.u).or_default().push(e);
        self.by_vertex.entry(e.v).or_default().push(e);
        true
    }

    /// Removes `e`; returns `false` when it was not present.
    pub fn remove(&mut self, e: Edge) -> bool {
        if !self.stored.remove(&e.normalized()) {
            return false;
        }
        for end in [e.u, e.v] {
            if let Some(list) = self.by_vertex.get_mut(&end) {
                list.retain(|f| *f != e);
            }
        }
        true
    }

    /// Retained edges incident to `v`.
    #[must_use]
    pub fn incident(&self, v: VertexId) -> &[Edge] {
        self.by_vertex.get(&v).map(Vec::as_slice).unwrap_or(&[])
    }

    /// All retained edges in normalized ascending order (deterministic).
    #[must_use]
    pub fn iter_sorted(&self) -> Vec<Edge> {
        let mut out: Vec<(VertexId, VertexId)> = self.stored.iter().copied().collect();
        out.sort_unstable();
        out.into_iter().map(|(u, v)| Edge { u, v }).collect()
    }
}

/// A worklist entry: an edge awaiting processing, and whether it currently
/// holds a ledger charge (freshly streamed edges do not; re-queued previously
/// stored edges do).
#[derive(Debug, Clone, Copy)]
pub struct WorkItem {
    /// The pending edge.
    pub edge: Edge,
    /// `true` when the edge's storage is already charged to the ledger.
    pub charged: bool,
}

/// Mutable working state of one component's incremental maintenance: the
/// retained edge set plus the LIFO worklist of edges to (re)process.
#[derive(Debug, Default)]
pub struct MaintainState {
    /// Retained back edges.
    pub retained: RetainedEdgeSet,
    worklist: Vec<WorkItem>,
    queued: HashSet<(VertexId, VertexId)>,
}

impl MaintainState {
    /// Creates empty state.
    #[must_use]
    pub fn new() -> Self {
        Self::default()
    }

    fn push(&mut self, edge: Edge, charged: bool) -> bool {
        if !self.queued.insert(edge.normalized()) {
            return false; // duplicate already queued
        }
        self.worklist.push(WorkItem { edge, charged });
        true
    }

    fn pop(&mut self) -> Option<WorkItem> {
        let item = self.worklist.pop()?;
        self.queued.remove(&item.edge.normalized());
        Some(item)
    }
}

/// Disposition of a back edge decided by a policy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdmitDecision {
    /// Keep the edge in the retained set (charged).
    Store,
    /// Forget the edge (its charge, if any, is released).
    Drop,
}

/// Ledger and retained-set access handed to policy callbacks.
pub struct MaintainCtx<'a> {
    /// The component's retained edges.
    pub retained: &'a mut RetainedEdgeSet,
    /// Ledger, absent when maintenance runs un-audited (tests, oracles).
    pub ledger: Option<&'a mut BudgetLedger>,
}

impl MaintainCtx<'_> {
    /// Charges `count` edges if a ledger is attached.
    ///
    /// # Errors
    ///
    /// Propagates [`BudgetError::Exceeded`].
    pub fn charge(&mut self, count: usize) -> Result<(), BudgetError> {
        match &mut self.ledger {
            Some(l) => l.charge(count),
            None => Ok(()),
        }
    }

    /// Releases `count` edges if a ledger is attached.
    ///
    /// # Errors
    ///
    /// Propagates [`BudgetError::DoubleRelease`].
    pub fn release(&mut self, count: usize) -> Result<(), BudgetError> {
        match &mut self.ledger {
            Some(l) => l.release(count),
            None => Ok(()),
        }
    }
}

/// Strategy hooks deciding which edges to skip, keep, or evict during
/// maintenance.
pub trait MaintainPolicy {
    /// Early drop test when an edge is popped from the worklist; `w` is the
    /// current LCA of the endpoints. A skipped edge is forgotten (and its
    /// charge released).
    fn skip(&mut self, tree: &DfsTree, e: Edge, w: VertexId) -> bool {
        let _ = (tree, e, w);
        false
    }

    /// Disposition of a back edge whose ancestor-side endpoint is `upper`.
    /// May evict retained edges through `ctx` to make room (releasing their
    /// charges); must not insert — the caller stores the edge on
    /// [`AdmitDecision::Store`].
    ///
    /// # Errors
    ///
    /// Propagates ledger faults.
    fn admit(
        &mut self,
        tree: &DfsTree,
        e: Edge,
        upper: VertexId,
        ctx: &mut MaintainCtx<'_>,
    ) -> Result<AdmitDecision, BudgetError>;

    /// Called after each restructure. `path` holds the vertices whose parent
    /// changed (the reversed path, new-tree-edge endpoint first); `subtree`
    /// holds every moved vertex in preorder.
    ///
    /// # Errors
    ///
    /// Propagates ledger faults.
    fn moved(
        &mut self,
        tree: &DfsTree,
        path: &[VertexId],
        subtree: &[VertexId],
        ctx: &mut MaintainCtx<'_>,
    ) -> Result<(), BudgetError> {
        let _ = (tree, path, subtree, ctx);
        Ok(())
    }
}

/// The permissive policy: every back edge is retained.
#[derive(Debug, Default, Clone, Copy)]
pub struct RetainAll;

impl MaintainPolicy for RetainAll {
    fn admit(
        &mut self,
        _tree: &DfsTree,
        _e: Edge,
        _upper: VertexId,
        _ctx: &mut MaintainCtx<'_>,
    ) -> Result<AdmitDecision, BudgetError> {
        Ok(AdmitDecision::Store)
    }
}

/// Inserts `e` into the DFS tree maintained by `state`/`tree`, retaining every
/// back edge. Equivalent to [`insert_edge_with`] under [`RetainAll`] with no
/// ledger.
///
/// # Errors
///
/// Returns [`IncrementalError::OutsideComponent`] when an endpoint is not in
/// the tree.
pub fn insert_edge(
    state: &mut MaintainState,
    tree: &mut DfsTree,
    e: Edge,
) -> Result<(), IncrementalError> {
    insert_edge_with(state, tree, e, false, &mut RetainAll, None)
}

/// Inserts `e` under a custom retention policy, draining the worklist until
/// the tree is a valid DFS tree of all retained edges again.
///
/// `charged` states whether `e` already holds a ledger charge (normally
/// `false` for fresh stream edges). Ledger discipline: the replacement tree
/// edge of a restructure is charged only after the removed tree edge has been
/// dispositioned, so transient usage never exceeds steady-state usage.
///
/// # Errors
///
/// Returns [`IncrementalError::OutsideComponent`] for foreign endpoints and
/// propagates ledger faults.
///
/// # Panics
///
/// Panics when the worklist fails to drain within `|H_C|^2` iterations
/// (impossible unless the monotonic-fall argument is broken by a bug).
pub fn insert_edge_with<P: MaintainPolicy>(
    state: &mut MaintainState,
    tree: &mut DfsTree,
    e: Edge,
    charged: bool,
    policy: &mut P,
    mut ledger: Option<&mut BudgetLedger>,
) -> Result<(), IncrementalError> {
    for end in [e.u, e.v] {
        if !tree.contains(end) {
            return Err(IncrementalError::OutsideComponent(end));
        }
    }
    if tree.is_tree_edge(e.u, e.v) || state.retained.contains(e) {
        debug_assert!(!charged, "duplicate edges must arrive uncharged");
        return Ok(());
    }
    state.push(e, charged);

    let h = (tree.len() - 1) + state.retained.len() + 1;
    let iteration_cap = (h * h).max(16);
    let mut iterations = 0usize;

    while let Some(item) = state.pop() {
        iterations += 1;
        assert!(
            iterations <= iteration_cap,
            "maintenance worklist failed to drain within |H|^2 = {iteration_cap} iterations"
        );
        let (a, b) = (item.edge.u, item.edge.v);
        // A queued edge may have become a tree edge or re-stored duplicate in
        // the meantime; it then carries no information.
        if tree.is_tree_edge(a, b) || state.retained.contains(item.edge) {
            if item.charged {
                release(&mut ledger, 1)?;
            }
            continue;
        }
        // Orient deeper endpoint first.
        let (x, y) = if tree.level_of(a)? >= tree.level_of(b)? {
            (a, b)
        } else {
            (b, a)
        };
        let w = tree.lca(x, y)?;
        if policy.skip(tree, item.edge, w) {
            if item.charged {
                release(&mut ledger, 1)?;
            }
            continue;
        }
        if w == x || w == y {
            // Back edge: the LCA is an endpoint; `w` is the ancestor side.
            let decision = {
                let mut ctx = MaintainCtx {
                    retained: &mut state.retained,
                    ledger: ledger.as_deref_mut(),
                };
                policy.admit(tree, item.edge, w, &mut ctx)?
            };
            match decision {
                AdmitDecision::Store => {
                    if !item.charged {
                        charge(&mut ledger, 1)?;
                    }
                    state.retained.insert(item.edge);
                }
                AdmitDecision::Drop => {
                    if item.charged {
                        release(&mut ledger, 1)?;
                    }
                }
            }
            continue;
        }

        // Cross edge: restructure. Find v = ancestor of y whose parent is w,
        // collecting the reversal path [y, .., v].
        let mut chain = vec![y];
        let mut cur = tree
            .parent_of(y)?
            .expect("y is strictly below the LCA, so it has a parent");
        while cur != w {
            chain.push(cur);
            cur = tree
                .parent_of(cur)?
                .expect("walk towards the LCA stays below the root");
        }
        let v = *chain.last().expect("chain holds at least y");

        // Delete (w, v) and reverse parent/child along v..y by re-hanging:
        // y under x, then each former ancestor under its former child.
        tree.rehang(y, x)?;
        for i in 0..chain.len() - 1 {
            tree.rehang(chain[i + 1], chain[i])?;
        }
        let moved = tree.relabel_subtree(y)?;

        {
            let mut ctx = MaintainCtx {
                retained: &mut state.retained,
                ledger: ledger.as_deref_mut(),
            };
            policy.moved(tree, &chain, &moved, &mut ctx)?;
        }

        // Disposition of the removed tree edge (still charged) before the
        // replacement tree edge is charged: release-before-charge.
        let removed = Edge { u: w, v };
        let decision = {
            let mut ctx = MaintainCtx {
                retained: &mut state.retained,
                ledger: ledger.as_deref_mut(),
            };
            policy.admit(tree, removed, w, &mut ctx)?
        };
        match decision {
            AdmitDecision::Store => {
                state.retained.insert(removed);
            }
            AdmitDecision::Drop => {
                release(&mut ledger, 1)?;
            }
        }
        // The new tree edge (x, y) now holds one charge.
        if !item.charged {
            charge(&mut ledger, 1)?;
        }

        // E_R: retained edges incident to moved vertices that became cross
        // re-enter the worklist, keeping their charges. Duplicates are
        // filtered by the queued set.
        for &mv in &moved {
            let incident: Vec<Edge> = state.retained.incident(mv).to_vec();
            for f in incident {
                if !state.retained.contains(f) {
                    continue;
                }
                let fw = tree.lca(f.u, f.v)?;
                if fw != f.u && fw != f.v {
                    state.retained.remove(f);
                    state.push(f, true);
                }
            }
        }
    }
    Ok(())
}

fn charge(ledger: &mut Option<&mut BudgetLedger>, count: usize) -> Result<(), BudgetError> {
    match ledger {
        Some(l) => l.charge(count),
        None => Ok(()),
    }
}

fn release(ledger: &mut Option<&mut BudgetLedger>, count: usize) -> Result<(), BudgetError> {
    match ledger {
        Some(l) => l.release(count),
        None => Ok(()),
    }
}

/// Audit: returns the retained edges whose LCA lies strictly between their
/// endpoints (i.e. cross edges), in normalized ascending order. Empty after
/// any completed insertion — the worklist repairs such edges eagerly.
#[must_use]
pub fn collect_new_cross_edges(state: &MaintainState, tree: &DfsTree) -> Vec<Edge> {
    state
        .retained
        .iter_sorted()
        .into_iter()
        .filter(|e| {
            let w = tree.lca(e.u, e.v).expect("retained endpoints are in the tree");
            w != e.u && w != e.v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edge(u: VertexId, v: VertexId) -> Edge {
        Edge::new(u, v).expect("test edges are loop-free")
    }

    #[test]
    fn retained_set_tracks_incidence() {
        let mut set = RetainedEdgeSet::new();
        assert!(set.insert(edge(0, 1)));
        assert!(!set.insert(edge(1, 0)), "orientation-insensitive dedup");
        assert!(set.insert(edge(1, 2)));
        assert_eq!(set.len(), 2);
        assert_eq!(set.incident(1).len(), 2);
        assert!(set.remove(edge(0, 1)));
        assert!(!set.remove(edge(0, 1)));
        assert_eq!(set.incident(1).len(), 1);
        assert_eq!(set.iter_sorted(), vec![edge(1, 2)]);
    }

    #[test]
    fn inserting_back_edge_keeps_structure() {
        // r=3 -> 0 -> 1 -> 2; (0, 2) is a back edge.
        let mut tree = DfsTree::new(3);
        tree.add_child(3, 0).unwrap();
        tree.add_child(0, 1).unwrap();
        tree.add_child(1, 2).unwrap();
        let mut state = MaintainState::new();
        insert_edge(&mut state, &mut tree, edge(0, 2)).unwrap();
        assert_eq!(tree.parent_of(2), Ok(Some(1)), "structure unchanged");
        assert!(state.retained.contains(edge(0, 2)));
        assert!(collect_new_cross_edges(&state, &tree).is_empty());
        tree.assert_consistent();
    }

    #[test]
    fn sibling_edge_re_hangs_into_chain() {
        // r=2 with children x=0 and y=1; inserting (0, 1) must produce the
        // chain r -> 0 -> 1 and retain the removed edge (r, 1) as a back edge.
        let mut tree = DfsTree::new(2);
        tree.add_child(2, 0).unwrap();
        tree.add_child(2, 1).unwrap();
        let mut state = MaintainState::new();
        insert_edge(&mut state, &mut tree, edge(0, 1)).unwrap();
        assert_eq!(tree.parent_of(0), Ok(Some(2)));
        assert_eq!(tree.parent_of(1), Ok(Some(0)));
        assert_eq!(tree.level_of(1), Ok(2));
        assert!(state.retained.contains(edge(2, 1)), "removed edge retained");
        assert_eq!(state.retained.len(), 1);
        assert!(collect_new_cross_edges(&state, &tree).is_empty());
        tree.assert_consistent();
    }

    #[test]
    fn foreign_endpoint_is_rejected() {
        let mut tree = DfsTree::new(2);
        tree.add_child(2, 0).unwrap();
        let mut state = MaintainState::new();
        let err = insert_edge(&mut state, &mut tree, edge(0, 1)).unwrap_err();
        assert!(matches!(err, IncrementalError::OutsideComponent(1)));
        assert_eq!(err.to_string(), "vertex 1 outside component");
    }

    #[test]
    fn duplicate_and_tree_edges_are_no_ops() {
        let mut tree = DfsTree::new(2);
        tree.add_child(2, 0).unwrap();
        tree.add_child(0, 1).unwrap();
        let mut state = MaintainState::new();
        insert_edge(&mut state, &mut tree, edge(0, 1)).unwrap(); // tree edge
        assert!(state.retained.is_empty());
        insert_edge(&mut state, &mut tree, edge(2, 1)).unwrap(); // back
        insert_edge(&mut state, &mut tree, edge(1, 2)).unwrap(); // duplicate
        assert_eq!(state.retained.len(), 1);
    }

    /// A reversal that turns a retained back edge into a cross edge, forcing
    /// a second (cascaded) restructure through the worklist.
    #[test]
    fn cascaded_restructure_via_requeued_edge() {
        // Tree: 5 -> 0 -> 1 -> 3 (3 a leaf under 1)... built as:
        // 5 -> 0, 0 -> 1, 1 -> 3, 5 -> 2, 2 -> 4. Retained back: (0, 3).
        let mut tree = DfsTree::new(5);
        tree.add_child(5, 0).unwrap();
        tree.add_child(0, 1).unwrap();
        tree.add_child(1, 3).unwrap();
        tree.add_child(5, 2).unwrap();
        tree.add_child(2, 4).unwrap();
        let mut state = MaintainState::new();
        insert_edge(&mut state, &mut tree, edge(0, 3)).unwrap();
        assert!(state.retained.contains(edge(0, 3)));

        // Insert (4, 1): cross at the root; reversal path [1, 0] flips, and
        // the retained (0, 3) becomes cross (LCA 1), forcing a second
        // restructure that ends in one long chain.
        insert_edge(&mut state, &mut tree, edge(4, 1)).unwrap();
        // Final: 5 -> 2 -> 4 -> 1 -> 0 -> 3.
        for (p, c) in [(5, 2), (2, 4), (4, 1), (1, 0), (0, 3)] {
            assert_eq!(tree.parent_of(c), Ok(Some(p)), "expect {p} -> {c}");
        }
        // Removed tree edges (5,0) and (1,3) are retained as back edges.
        assert!(state.retained.contains(edge(5, 0)));
        assert!(state.retained.contains(edge(1, 3)));
        assert!(!state.retained.contains(edge(0, 3)), "now a tree edge");
        assert!(collect_new_cross_edges(&state, &tree).is_empty());
        tree.assert_consistent();
    }

    #[test]
    fn collect_new_cross_edges_flags_manufactured_cross() {
        // Frozen mid-restructure state: tree 5 -> 2 -> 4 -> 1 -> {3, 0} with
        // retained (0, 3): LCA(0, 3) = 1, strictly between — a cross edge.
        let mut tree = DfsTree::new(5);
        tree.add_child(5, 2).unwrap();
        tree.add_child(2, 4).unwrap();
        tree.add_child(4, 1).unwrap();
        tree.add_child(1, 3).unwrap();
        tree.add_child(1, 0).unwrap();
        let mut state = MaintainState::new();
        state.retained.insert(edge(0, 3));
        assert_eq!(collect_new_cross_edges(&state, &tree), vec![edge(0, 3)]);
    }

    #[test]
    fn ledger_balanced_through_restructures() {
        // Same cascade as above, audited: final holdings must equal
        // tree edges beyond the initial set plus retained backs.
        let mut tree = DfsTree::new(5);
        tree.add_child(5, 0).unwrap();
        tree.add_child(0, 1).unwrap();
        tree.add_child(1, 3).unwrap();
        tree.add_child(5, 2).unwrap();
        tree.add_child(2, 4).unwrap();
        let mut ledger = BudgetLedger::with_capacity(100);
        ledger.charge(5).unwrap(); // the five initial tree edges
        let mut state = MaintainState::new();
        let mut policy = RetainAll;
        insert_edge_with(&mut state, &mut tree, edge(0, 3), false, &mut policy, Some(&mut ledger))
            .unwrap();
        insert_edge_with(&mut state, &mut tree, edge(4, 1), false, &mut policy, Some(&mut ledger))
            .unwrap();
        // Holdings: 5 tree edges + 2 retained backs = 7.
        assert_eq!(ledger.current(), 5 + state.retained.len());
        assert_eq!(state.retained.len(), 2);
    }

    /// Randomized audit: maintain a DFS tree under 1000 seeded insertion
    /// sequences on graphs of up to 10 vertices, checking validity after
    /// every single insertion.
    #[test]
    fn randomized_insertions_keep_dfs_valid() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};

        use crate::graph::AdjacencyGraph;
        use crate::validation::check_dfs;

        let mut rng = StdRng::seed_from_u64(0x5eed_cafe);
        for round in 0..1000 {
            let n: usize = rng.gen_range(2..=10);
            let root = n as VertexId;
            let mut tree = DfsTree::new(root);
            for v in 0..n as VertexId {
                tree.add_child(root, v).unwrap();
            }
            let mut state = MaintainState::new();
            let mut inserted: Vec<Edge> = Vec::new();
            let tries = rng.gen_range(0..=2 * n * n);
            for _ in 0..tries {
                let u = rng.gen_range(0..n as VertexId);
                let v = rng.gen_range(0..n as VertexId);
                if u == v {
                    continue;
                }
                let e = edge(u, v);
                inserted.push(e);
                insert_edge(&mut state, &mut tree, e).unwrap();
                let g = AdjacencyGraph::from_edges(n, &inserted);
                let report = check_dfs(&g, &tree);
                assert!(
                    report.is_valid(),
                    "round {round}: tree invalid after inserting {e}: {report:?}"
                );
                assert!(
                    collect_new_cross_edges(&state, &tree).is_empty(),
                    "round {round}: lingering cross edges after {e}"
                );
                tree.assert_consistent();
            }
        }
    }
}
