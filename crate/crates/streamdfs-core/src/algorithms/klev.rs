//! `kLev` family: maintain local DFS trees incrementally, append the levels
//! that can no longer change.
//!
//! Each pass feeds every within-component edge into the component's local DFS
//! tree through [`insert_edge_with`], restructuring on cross edges. At pass
//! end the top of the tree is appended to the output and each subtree hanging
//! below the *prune frontier* becomes a child component (its pruned tree edge
//! turning into the child's attach edge):
//!
//! * `O`/`1` prune every subtree rooted at local level exactly `k` and retain
//!   only back edges whose upper endpoint is above level `k`
//!   ([`TopKPolicy`]): at most `k` levels settle per pass.
//! * `2`/`N` prune a subtree only when its root both *changed* during the
//!   pass and sits at level `>= k'`, where `k'` starts unbounded and shrinks
//!   only when the retained-edge quota `w * (k - 1)` forces a drop
//!   ([`AdaptivePolicy`]): quiet regions settle wholesale regardless of
//!   depth, and `k' >= k` always (a full quota needs uppers at level `>= k`).
//! * `N` additionally tracks the *broomstick handle* — the single-child chain
//!   from the local root — whose vertices provably never move again: edges
//!   touching the handle are discarded for free instead of consuming quota.

use std::collections::hash_map::Entry;
use std::collections::{BTreeMap, HashMap, HashSet};

use crate::budget::{BudgetError, BudgetLedger};
use crate::forest::{Component, ComponentId, ComponentRegistry, RoutedEdge};
use crate::graph::{DfsTree, Edge, VertexId};
use crate::incremental::{
    insert_edge_with, AdmitDecision, MaintainCtx, MaintainPolicy, MaintainState, RetainedEdgeSet,
};
use crate::stream::EdgeStream;

use super::{
    append_whole_tree, ensure_pass_cap, init_star_component, spanning_forest_pass, AlgoError,
    Variant,
};

/// Follows the single-child chain downward from `cur` and returns the first
/// vertex with zero or several children — the end of the *broomstick handle*.
///
/// A restructure pivots at the LCA of a cross edge, which needs two distinct
/// branches below it; every vertex on a single-child chain from the root
/// therefore keeps its position and its descendant set forever. Advancing
/// from the previous handle end is exact because the handle only extends.
///
/// # Panics
///
/// Panics when `cur` is not a vertex of `tree`.
#[must_use]
pub fn advance_broomstick(tree: &DfsTree, cur: VertexId) -> VertexId {
    let mut b = cur;
    loop {
        let kids = tree
            .children_of(b)
            .expect("broomstick walk stays inside the tree");
        if kids.len() == 1 {
            b = kids[0];
        } else {
            return b;
        }
    }
}

/// Shallower endpoint level of a stored back edge (its current *upper* side).
fn upper_level(tree: &DfsTree, e: Edge) -> u32 {
    let lu = tree
        .level_of(e.u)
        .expect("retained endpoint is in the component tree");
    let lv = tree
        .level_of(e.v)
        .expect("retained endpoint is in the component tree");
    lu.min(lv)
}

/// Policy for tiers `O`/`1`: keep a back edge only when its upper endpoint is
/// a real vertex strictly above level `k`; everything at or below level `k`
/// re-appears once its subtree becomes a component of its own. The same rule
/// is re-applied after every restructure — anchors only ever sink, and an
/// edge whose anchor reaches level `k` is confined to one pruned subtree, so
/// dropping it keeps retention within the per-vertex ancestor-slot bound of
/// `(w - 1)(k - 1)` edges.
struct TopKPolicy {
    k: u32,
    root: VertexId,
}

impl MaintainPolicy for TopKPolicy {
    fn skip(&mut self, tree: &DfsTree, _e: Edge, w: VertexId) -> bool {
        // Both endpoints sit under `w`; at level >= k that whole region is
        // pruned into one child component, which re-reads the edge later.
        tree.level_of(w)
            .expect("the LCA is in the component tree")
            >= self.k
    }

    fn admit(
        &mut self,
        tree: &DfsTree,
        _e: Edge,
        upper: VertexId,
        _ctx: &mut MaintainCtx<'_>,
    ) -> Result<AdmitDecision, BudgetError> {
        if upper == self.root {
            // The local root is an ancestor of the whole component forever.
            return Ok(AdmitDecision::Drop);
        }
        let lvl = tree
            .level_of(upper)
            .expect("upper endpoint is in the component tree");
        if lvl >= self.k {
            Ok(AdmitDecision::Drop)
        } else {
            Ok(AdmitDecision::Store)
        }
    }

    fn moved(
        &mut self,
        tree: &DfsTree,
        _path: &[VertexId],
        subtree: &[VertexId],
        ctx: &mut MaintainCtx<'_>,
    ) -> Result<(), BudgetError> {
        // Vertices only sink under restructuring, so a retained edge touching
        // the moved region may now anchor at level >= k; it is then confined
        // to one pruned subtree (the region test `skip` applies on arrival)
        // and that subtree's component re-reads it in a later pass. Drop it.
        // Edges that turned cross are left alone: the caller re-queues and
        // repairs them.
        for &v in subtree {
            for f in ctx.retained.incident(v).to_vec() {
                if !ctx.retained.contains(f) {
                    continue;
                }
                let w = tree
                    .lca(f.u, f.v)
                    .expect("retained endpoints are in the component tree");
                if w != f.u && w != f.v {
                    continue;
                }
                let lvl = tree.level_of(w).expect("the LCA is in the component tree");
                if lvl >= self.k {
                    ctx.retained.remove(f);
                    ctx.release(1)?;
                }
            }
        }
        Ok(())
    }
}

/// Policy for tiers `2`/`N`: retain up to `quota` back edges, evicting the
/// deepest-anchored one when full and recording the depth threshold `k'`
/// below which information may have been lost. Only subtrees that both
/// changed and sit at level `>= k'` need another pass.
struct AdaptivePolicy {
    quota: usize,
    root: VertexId,
    /// Prune threshold: `u32::MAX` until a drop loses information.
    k_prime: u32,
    /// Vertices whose ancestor relation to their old subtree may have
    /// flipped: exactly the reversed-chain vertices of each restructure.
    changed: HashSet<VertexId>,
    /// Retained edges bucketed by upper-endpoint level at filing time (levels
    /// only sink, so a bucket key is a lower bound; entries are re-filed
    /// lazily). Values are `(filing sequence, edge)`; within a bucket the
    /// most recently filed entry is considered first.
    buckets: BTreeMap<u32, Vec<(u64, Edge)>>,
    next_seq: u64,
    /// `N` only: current end of the frozen single-child handle.
    broomstick: Option<VertexId>,
}

impl AdaptivePolicy {
    fn new(k: u32, comp: &Component, broomstick: Option<VertexId>) -> Self {
        Self {
            quota: comp.weight() * ((k - 1) as usize),
            root: comp.root,
            k_prime: u32::MAX,
            changed: HashSet::new(),
            buckets: BTreeMap::new(),
            next_seq: 0,
            broomstick,
        }
    }

    fn file(&mut self, lvl: u32, e: Edge) {
        self.buckets.entry(lvl).or_default().push((self.next_seq, e));
        self.next_seq += 1;
    }

    /// Pops the deepest currently-retained entry, discarding stale entries
    /// and re-filing those whose upper endpoint has sunk since filing.
    fn pop_deepest(
        &mut self,
        tree: &DfsTree,
        retained: &RetainedEdgeSet,
    ) -> Option<(u32, u64, Edge)> {
        loop {
            let deepest = *self.buckets.keys().next_back()?;
            let bucket = self.buckets.get_mut(&deepest).expect("key just observed");
            let (seq, f) = bucket.pop().expect("buckets never hold empty lists");
            if bucket.is_empty() {
                self.buckets.remove(&deepest);
            }
            if !retained.contains(f) {
                continue; // evicted or re-queued since filing
            }
            let cur = upper_level(tree, f);
            if cur > deepest {
                self.file_at(cur, seq, f);
                continue;
            }
            return Some((deepest, seq, f));
        }
    }

    fn file_at(&mut self, lvl: u32, seq: u64, e: Edge) {
        self.buckets.entry(lvl).or_default().push((seq, e));
    }
}

impl MaintainPolicy for AdaptivePolicy {
    fn skip(&mut self, tree: &DfsTree, e: Edge, w: VertexId) -> bool {
        if let Some(b) = self.broomstick {
            let handle = tree
                .level_of(b)
                .expect("the broomstick end is in the component tree");
            // A vertex at level <= handle depth *is* the unique handle vertex
            // of that level, hence a frozen ancestor of the other endpoint.
            if upper_level(tree, e) <= handle {
                return true;
            }
        }
        if self.k_prime == u32::MAX {
            return false;
        }
        // Everything under a changed vertex at level >= k' lands in one
        // pruned child component and is re-read there.
        self.changed.contains(&w)
            && tree
                .level_of(w)
                .expect("the LCA is in the component tree")
                >= self.k_prime
    }

    fn admit(
        &mut self,
        tree: &DfsTree,
        e: Edge,
        upper: VertexId,
        ctx: &mut MaintainCtx<'_>,
    ) -> Result<AdmitDecision, BudgetError> {
        if upper == self.root {
            return Ok(AdmitDecision::Drop);
        }
        let up_lvl = tree
            .level_of(upper)
            .expect("upper endpoint is in the component tree");
        if let Some(b) = self.broomstick {
            let handle = tree
                .level_of(b)
                .expect("the broomstick end is in the component tree");
            if up_lvl <= handle {
                return Ok(AdmitDecision::Drop); // frozen ancestor: free drop
            }
        }
        if self.quota == 0 {
            self.k_prime = self.k_prime.min(up_lvl);
            return Ok(AdmitDecision::Drop);
        }
        if ctx.retained.len() >= self.quota {
            return match self.pop_deepest(tree, ctx.retained) {
                Some((deepest, _, f)) if up_lvl < deepest => {
                    ctx.retained.remove(f);
                    ctx.release(1)?;
                    self.k_prime = self.k_prime.min(deepest);
                    self.file(up_lvl, e);
                    Ok(AdmitDecision::Store)
                }
                Some((deepest, seq, f)) => {
                    // The incoming edge anchors at least as deep as anything
                    // kept: drop it instead.
                    self.file_at(deepest, seq, f);
                    self.k_prime = self.k_prime.min(up_lvl);
                    Ok(AdmitDecision::Drop)
                }
                None => {
                    // Defensive: every retained edge has a filed entry, so a
                    // non-empty retained set always yields one.
                    self.k_prime = self.k_prime.min(up_lvl);
                    Ok(AdmitDecision::Drop)
                }
            };
        }
        self.file(up_lvl, e);
        Ok(AdmitDecision::Store)
    }

    fn moved(
        &mut self,
        tree: &DfsTree,
        path: &[VertexId],
        _subtree: &[VertexId],
        ctx: &mut MaintainCtx<'_>,
    ) -> Result<(), BudgetError> {
        // Only the reversed chain can lose ancestry over its old subtree;
        // vertices moved as part of a block keep their internal arrangement.
        self.changed.extend(path.iter().copied());
        if let Some(b) = self.broomstick {
            let nb = advance_broomstick(tree, b);
            self.broomstick = Some(nb);
            let handle = tree
                .level_of(nb)
                .expect("the broomstick end is in the component tree");
            // Quota relief: retained edges anchored on the (longer) handle
            // are permanent back edges now.
            let shallow: Vec<u32> = self
                .buckets
                .range(..=handle)
                .map(|(&lvl, _)| lvl)
                .collect();
            for lvl in shallow {
                let entries = self.buckets.remove(&lvl).unwrap_or_default();
                for (seq, f) in entries {
                    if !ctx.retained.contains(f) {
                        continue;
                    }
                    let cur = upper_level(tree, f);
                    if cur <= handle {
                        ctx.retained.remove(f);
                        ctx.release(1)?;
                    } else {
                        self.file_at(cur, seq, f);
                    }
                }
            }
        }
        Ok(())
    }
}

/// Variant dispatch for the per-pass policy.
enum LevelPolicy {
    TopK(TopKPolicy),
    Adaptive(AdaptivePolicy),
}

impl LevelPolicy {
    /// Prune test for child `c` during the pass-end walk.
    fn should_prune(&self, tree: &DfsTree, c: VertexId) -> bool {
        let lvl = tree
            .level_of(c)
            .expect("the prune walk stays inside the tree");
        match self {
            LevelPolicy::TopK(p) => lvl == p.k,
            LevelPolicy::Adaptive(p) => p.changed.contains(&c) && lvl >= p.k_prime,
        }
    }
}

impl MaintainPolicy for LevelPolicy {
    fn skip(&mut self, tree: &DfsTree, e: Edge, w: VertexId) -> bool {
        match self {
            LevelPolicy::TopK(p) => p.skip(tree, e, w),
            LevelPolicy::Adaptive(p) => p.skip(tree, e, w),
        }
    }

    fn admit(
        &mut self,
        tree: &DfsTree,
        e: Edge,
        upper: VertexId,
        ctx: &mut MaintainCtx<'_>,
    ) -> Result<AdmitDecision, BudgetError> {
        match self {
            LevelPolicy::TopK(p) => p.admit(tree, e, upper, ctx),
            LevelPolicy::Adaptive(p) => p.admit(tree, e, upper, ctx),
        }
    }

    fn moved(
        &mut self,
        tree: &DfsTree,
        path: &[VertexId],
        subtree: &[VertexId],
        ctx: &mut MaintainCtx<'_>,
    ) -> Result<(), BudgetError> {
        match self {
            LevelPolicy::TopK(p) => p.moved(tree, path, subtree, ctx),
            LevelPolicy::Adaptive(p) => p.moved(tree, path, subtree, ctx),
        }
    }
}

/// One component's maintenance state for the current pass. Dropped at pass
/// end — retained edges are released, not carried over, since the stream
/// replays them anyway.
struct PassState {
    st: MaintainState,
    policy: LevelPolicy,
    /// Whether any non-tree within-edge arrived; if not, the local tree's
    /// arrangement is final and the whole component settles.
    saw_nontree: bool,
}

impl PassState {
    fn new(variant: Variant, k: u32, comp: &Component) -> Self {
        let policy = match variant {
            Variant::O | Variant::One => LevelPolicy::TopK(TopKPolicy { k, root: comp.root }),
            Variant::Two => LevelPolicy::Adaptive(AdaptivePolicy::new(k, comp, None)),
            Variant::N => {
                let b = advance_broomstick(&comp.tree, comp.root);
                LevelPolicy::Adaptive(AdaptivePolicy::new(k, comp, Some(b)))
            }
        };
        PassState {
            st: MaintainState::new(),
            policy,
            saw_nontree: false,
        }
    }
}

pub(super) fn run(
    stream: &mut EdgeStream,
    ledger: &mut BudgetLedger,
    k: u32,
    variant: Variant,
) -> Result<DfsTree, AlgoError> {
    let n = stream.n();
    let root = n as VertexId;
    let mut output = DfsTree::new(root);
    let mut reg = ComponentRegistry::new(n);
    let mut passes_run = 0u32;
    let heur = variant.heuristics();

    if heur.star_init {
        init_star_component(&mut reg, ledger, n)?;
    } else {
        ensure_pass_cap(n, passes_run)?;
        passes_run += 1;
        stream.rewind();
        spanning_forest_pass(stream, ledger, &mut output, &mut reg)?;
    }

    while !reg.all_visited() {
        ensure_pass_cap(n, passes_run)?;
        passes_run += 1;
        stream.rewind();

        let mut states: HashMap<ComponentId, PassState> = HashMap::new();

        while let Some(e) = stream.next_edge()? {
            match reg.route_edge(e) {
                // A visited endpoint is an ancestor of the component's attach
                // point, so mixed edges are permanent back edges; both-visited
                // edges were settled when their region was appended.
                RoutedEdge::BothVisited | RoutedEdge::Mixed { .. } => {}
                RoutedEdge::Within(id) => {
                    let comp = reg.get_mut(id).expect("routed to a live component");
                    if comp.tree.is_tree_edge(e.u, e.v) {
                        continue; // already stored structurally: no signal
                    }
                    let state = match states.entry(id) {
                        Entry::Occupied(o) => o.into_mut(),
                        Entry::Vacant(slot) => slot.insert(PassState::new(variant, k, comp)),
                    };
                    state.saw_nontree = true;
                    insert_edge_with(
                        &mut state.st,
                        &mut comp.tree,
                        e,
                        false,
                        &mut state.policy,
                        Some(ledger),
                    )?;
                }
            }
        }

        for id in reg.live_ids() {
            let comp = reg.take(id);
            let state = states.remove(&id);
            finish_component(&mut output, &mut reg, ledger, comp, state)?;
        }
    }
    Ok(output)
}

/// Pass-end settlement of one component: append the region above the prune
/// frontier, spin each pruned subtree off as a child component (its pruned
/// tree edge becomes the attach edge and keeps its charge), and release the
/// charges of appended edges and discarded retained edges.
fn finish_component(
    output: &mut DfsTree,
    reg: &mut ComponentRegistry,
    ledger: &mut BudgetLedger,
    comp: Component,
    state: Option<PassState>,
) -> Result<(), AlgoError> {
    let state = match state {
        Some(s) if s.saw_nontree => s,
        other => {
            debug_assert_eq!(
                other.as_ref().map_or(0, |s| s.st.retained.len()),
                0,
                "a pass without restructures retains nothing"
            );
            // No structural signal: the local arrangement is final.
            let adds = append_whole_tree(output, reg, &comp.tree, comp.root, comp.attach_parent)?;
            ledger.release(adds)?;
            return Ok(());
        }
    };

    let mut adds = 0usize;
    if comp.root != output.root() {
        let p = comp
            .attach_parent
            .expect("real-rooted components carry an attach parent");
        output.add_child(p, comp.root)?;
        reg.mark_visited(comp.root);
        adds += 1;
    }
    let mut children: Vec<Component> = Vec::new();
    let mut stack = vec![comp.root];
    while let Some(x) = stack.pop() {
        for c in comp.tree.children_of(x)?.to_vec() {
            if state.policy.should_prune(&comp.tree, c) {
                let vertices = comp.tree.subtree_vertices(c)?;
                let tree = comp.tree.extract_subtree(c)?;
                children.push(Component {
                    id: ComponentId::MAX, // placeholder; registry assigns
                    vertices,
                    tree,
                    root: c,
                    attach_parent: Some(x),
                    buffered: Vec::new(),
                });
            } else {
                output.add_child(x, c)?;
                reg.mark_visited(c);
                adds += 1;
                stack.push(c);
            }
        }
    }
    ledger.release(adds + state.st.retained.len())?;
    for child in children {
        reg.register(child);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::AdjacencyGraph;
    use crate::incremental::insert_edge;
    use crate::validation::check_dfs;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn edge(u: VertexId, v: VertexId) -> Edge {
        Edge::new(u, v).expect("test edges are loop-free")
    }

    fn run_klev(
        n: usize,
        edges: Vec<Edge>,
        k: u32,
        variant: Variant,
    ) -> (DfsTree, u32, BudgetLedger) {
        let mut s = EdgeStream::in_memory(n, edges).unwrap();
        let mut ledger = BudgetLedger::new(n, k);
        let before = s.passes_used();
        let tree = run(&mut s, &mut ledger, k, variant).unwrap();
        (tree, s.passes_used() - before, ledger)
    }

    #[test]
    fn complete_graph_oblivious_variant_frozen_trace() {
        // K4 with k = 1: the forest pass stars the graph at vertex 0; each
        // following pass settles exactly one more chain vertex because the
        // level-1 child is always pruned.
        let edges = vec![
            edge(0, 1),
            edge(0, 2),
            edge(0, 3),
            edge(1, 2),
            edge(1, 3),
            edge(2, 3),
        ];
        let g = AdjacencyGraph::from_edges(4, &edges);
        let (tree, passes, ledger) = run_klev(4, edges, 1, Variant::O);
        assert_eq!(passes, 4);
        assert_eq!(tree.height(), 4, "K4 forces a chain");
        assert_eq!(tree.parent_of(0), Ok(Some(4)));
        assert_eq!(tree.parent_of(1), Ok(Some(0)));
        assert_eq!(tree.parent_of(2), Ok(Some(1)));
        assert_eq!(tree.parent_of(3), Ok(Some(2)));
        assert!(check_dfs(&g, &tree).is_valid());
        assert_eq!(ledger.current(), 0);
        assert!(ledger.peak_usage() <= 4, "budget is n * k = 4");
    }

    #[test]
    fn triangle_adaptive_tier_settles_in_one_pass() {
        // Quota 6 is never hit, so k' stays unbounded and nothing is pruned:
        // the restructured star is appended wholesale after one pass.
        let edges = vec![edge(0, 1), edge(1, 2), edge(2, 0)];
        let g = AdjacencyGraph::from_edges(3, &edges);
        let (tree, passes, ledger) = run_klev(3, edges, 3, Variant::Two);
        assert_eq!(passes, 1);
        assert_eq!(tree.height(), 3);
        assert!(check_dfs(&g, &tree).is_valid());
        assert_eq!(ledger.current(), 0);
        assert!(ledger.peak_usage() <= 9);
    }

    #[test]
    fn zero_progress_star_pass_still_terminates() {
        // k = 1 with the star initialization: pass 1 prunes every level-1
        // child of the artificial root (zero vertices appended), then each
        // real-rooted child settles one vertex per pass.
        let edges = vec![edge(0, 1), edge(1, 2), edge(2, 0)];
        let g = AdjacencyGraph::from_edges(3, &edges);
        let (tree, passes, ledger) = run_klev(3, edges, 1, Variant::One);
        assert_eq!(passes, 3);
        assert_eq!(tree.parent_of(0), Ok(Some(3)));
        assert_eq!(tree.parent_of(1), Ok(Some(0)));
        assert_eq!(tree.parent_of(2), Ok(Some(1)));
        assert!(check_dfs(&g, &tree).is_valid());
        assert_eq!(ledger.current(), 0);
    }

    #[test]
    fn eviction_lowers_the_adaptive_threshold() {
        // Chain 0 -> 1 -> ... -> 6, quota 1. Filing (3, 5) then offering an
        // edge anchored at level 4 must refuse the newcomer and pin k' = 4;
        // offering one anchored at level 1 must evict and pin k' = 3.
        let mut tree = DfsTree::new(0);
        for v in 1..=6 {
            tree.add_child(v - 1, v).unwrap();
        }
        let mut policy = AdaptivePolicy {
            quota: 1,
            root: 0,
            k_prime: u32::MAX,
            changed: HashSet::new(),
            buckets: BTreeMap::new(),
            next_seq: 0,
            broomstick: None,
        };
        let mut retained = RetainedEdgeSet::new();
        let mut ledger = BudgetLedger::with_capacity(usize::MAX);

        let e1 = edge(3, 5);
        let d1 = {
            let mut ctx = MaintainCtx {
                retained: &mut retained,
                ledger: Some(&mut ledger),
            };
            policy.admit(&tree, e1, 3, &mut ctx).unwrap()
        };
        assert!(matches!(d1, AdmitDecision::Store));
        ledger.charge(1).unwrap();
        retained.insert(e1);

        let e2 = edge(4, 6);
        let d2 = {
            let mut ctx = MaintainCtx {
                retained: &mut retained,
                ledger: Some(&mut ledger),
            };
            policy.admit(&tree, e2, 4, &mut ctx).unwrap()
        };
        assert!(matches!(d2, AdmitDecision::Drop), "deeper anchor is refused");
        assert_eq!(policy.k_prime, 4, "threshold pinned at the refused level");
        assert!(retained.contains(e1), "the incumbent survives");

        let e3 = edge(1, 6);
        let d3 = {
            let mut ctx = MaintainCtx {
                retained: &mut retained,
                ledger: Some(&mut ledger),
            };
            policy.admit(&tree, e3, 1, &mut ctx).unwrap()
        };
        assert!(matches!(d3, AdmitDecision::Store), "shallower anchor evicts");
        ledger.charge(1).unwrap();
        retained.insert(e3);
        assert_eq!(policy.k_prime, 3, "threshold pinned at the evicted level");
        assert!(!retained.contains(e1));
        assert!(retained.contains(e3));
        assert_eq!(ledger.current(), 1, "eviction released the old charge");
    }

    #[test]
    fn handle_edges_are_skipped_for_free() {
        // 0 -> 1 -> 2 -> {3, 4}: the handle ends at 2 (level 2). Any edge
        // with an endpoint at level <= 2 touches the frozen handle.
        let mut tree = DfsTree::new(0);
        tree.add_child(0, 1).unwrap();
        tree.add_child(1, 2).unwrap();
        tree.add_child(2, 3).unwrap();
        tree.add_child(2, 4).unwrap();
        assert_eq!(advance_broomstick(&tree, 0), 2);

        let mut policy = AdaptivePolicy {
            quota: 10,
            root: 0,
            k_prime: u32::MAX,
            changed: HashSet::new(),
            buckets: BTreeMap::new(),
            next_seq: 0,
            broomstick: Some(2),
        };
        assert!(policy.skip(&tree, edge(1, 4), 1), "handle endpoint: free drop");
        assert!(!policy.skip(&tree, edge(3, 4), 2), "both ends below the handle");
    }

    #[test]
    fn broomstick_advances_and_never_retreats() {
        assert_eq!(
            advance_broomstick(&DfsTree::new(7), 7),
            7,
            "a lone root is its own handle end"
        );
        let mut chain = DfsTree::new(0);
        chain.add_child(0, 1).unwrap();
        chain.add_child(1, 2).unwrap();
        assert_eq!(advance_broomstick(&chain, 0), 2, "a bare chain ends at the leaf");

        // Random insertions: the handle end computed incrementally from the
        // previous end must match a from-scratch recomputation, and its level
        // never decreases.
        let n: u32 = 9;
        let root: VertexId = n;
        for seed in 0..5u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut tree = DfsTree::new(root);
            for v in 0..n {
                tree.add_child(root, v).unwrap();
            }
            let mut st = MaintainState::new();
            let mut cur = advance_broomstick(&tree, root);
            let mut cur_lvl = tree.level_of(cur).unwrap();
            for _ in 0..60 {
                let u = rng.gen_range(0..n);
                let v = rng.gen_range(0..n);
                if u == v {
                    continue;
                }
                insert_edge(&mut st, &mut tree, edge(u, v)).unwrap();
                let stepped = advance_broomstick(&tree, cur);
                let scratch = advance_broomstick(&tree, root);
                assert_eq!(stepped, scratch, "incremental advance must be exact");
                let lvl = tree.level_of(stepped).unwrap();
                assert!(lvl >= cur_lvl, "the handle end never moves up");
                cur = stepped;
                cur_lvl = lvl;
            }
        }
    }

    #[test]
    fn disconnected_graph_settles_in_one_pass_under_adaptive_tier() {
        // Triangle plus an isolated vertex, m <= n * (k - 1): no eviction
        // ever fires, so everything lands in a single pass.
        let edges = vec![edge(0, 1), edge(1, 2), edge(2, 0)];
        let g = AdjacencyGraph::from_edges(4, &edges);
        let (tree, passes, ledger) = run_klev(4, edges, 2, Variant::N);
        assert_eq!(passes, 1);
        assert_eq!(tree.len(), 5, "isolated vertex 3 is placed too");
        assert_eq!(tree.parent_of(3), Ok(Some(4)));
        assert!(check_dfs(&g, &tree).is_valid());
        assert_eq!(ledger.current(), 0);
    }

    #[test]
    fn pass_bound_tracks_height_on_complete_graph() {
        // K6 forces a chain of height 6; each pass settles at least k levels,
        // so ceil(6 / k) + 1 passes suffice for the oblivious tier.
        let mut edges = Vec::new();
        for u in 0..6 {
            for v in (u + 1)..6 {
                edges.push(edge(u, v));
            }
        }
        let g = AdjacencyGraph::from_edges(6, &edges);
        for (k, variant) in [(2, Variant::O), (2, Variant::One), (3, Variant::Two)] {
            let (tree, passes, ledger) = run_klev(6, edges.clone(), k, variant);
            assert!(check_dfs(&g, &tree).is_valid(), "{variant:?} must be valid");
            let h = tree.height();
            let bound = h.div_ceil(k) + 1;
            assert!(
                passes <= bound,
                "{variant:?} k={k}: {passes} passes exceed ceil({h}/{k}) + 1"
            );
            assert_eq!(ledger.current(), 0);
            assert!(ledger.peak_usage() <= 6 * k as usize);
        }
    }
}
