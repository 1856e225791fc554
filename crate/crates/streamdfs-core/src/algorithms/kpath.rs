//! `kPath` family: grow the output tree a deep path at a time.
//!
//! Each unvisited component buffers the edges between its own vertices, up to
//! `w * (k_eff - 1)` edges for a component of `w` vertices. A component whose
//! buffer suffices for the whole pass is *fit*: a fresh local DFS tree of its
//! stored subgraph (component tree plus buffer) is appended wholesale. A
//! component that overflows instead appends only the root-to-deepest path of
//! that local tree — at least `k_eff` vertices deep, by a counting argument —
//! and spends the rest of the pass partitioning its remaining vertices into
//! child components around that path (see [`PathSplit`]).
//!
//! Variant tiers:
//! * `O` spends the first pass building a spanning forest and works per
//!   natural component thereafter.
//! * `1` adds the star initialization: one virtual component containing every
//!   vertex hangs off the artificial root, so splitting starts immediately.
//! * `2` additionally skips repeats of already-stored edges for free instead
//!   of burning buffer slots on them.
//! * `N` additionally spreads the whole edge budget over the vertices still
//!   unvisited ([`k_opt`]), so late passes buffer far more per component.

use std::collections::{HashMap, HashSet};

use crate::budget::BudgetLedger;
use crate::forest::{
    tree_edges_preorder, ComponentId, ComponentRegistry, PathSplit, RoutedEdge,
};
use crate::graph::{DfsTree, Edge, VertexId};
use crate::stream::EdgeStream;

use super::{
    append_whole_tree, ensure_pass_cap, init_star_component, spanning_forest_pass, AlgoError,
    Variant,
};

/// Effective per-vertex buffer multiplier when `n_star` of `n` vertices are
/// still unvisited: the full budget of `n * k` stored edges is spread over the
/// remaining vertices, never below the configured `k`.
pub(crate) fn k_opt(n: usize, k: u32, n_star: usize) -> u32 {
    if n_star == 0 {
        return k;
    }
    let spread = (n as u64).saturating_mul(u64::from(k)) / n_star as u64;
    k.max(u32::try_from(spread).unwrap_or(u32::MAX))
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

        let k_eff = if heur.adaptive {
            k_opt(n, k, reg.unvisited_count())
        } else {
            k
        } as usize;

        // Components that overflowed this pass and now partition their
        // residual vertices around the appended path.
        let mut drains: HashMap<ComponentId, PathSplit> = HashMap::new();
        // Per-component stored-edge fingerprints (variants 2/N only), seeded
        // lazily with the component's own tree edges.
        let mut seen: HashMap<ComponentId, HashSet<(VertexId, VertexId)>> = HashMap::new();

        'pass: while let Some(e) = stream.next_edge()? {
            match reg.route_edge(e) {
                RoutedEdge::BothVisited => {}
                RoutedEdge::Mixed { comp, .. } => {
                    if let Some(split) = drains.get_mut(&comp) {
                        split.feed(e, ledger)?;
                    }
                    // Otherwise the visited endpoint is an ancestor of the
                    // component's attach point: a permanent back edge.
                }
                RoutedEdge::Within(id) => {
                    if let Some(split) = drains.get_mut(&id) {
                        split.feed(e, ledger)?;
                        continue;
                    }
                    if heur.dedup {
                        let comp = reg.get(id).expect("routed to a live component");
                        let set = seen.entry(id).or_insert_with(|| {
                            tree_edges_preorder(&comp.tree)
                                .into_iter()
                                .map(|(a, b)| norm(a, b))
                                .collect()
                        });
                        if !set.insert(norm(e.u, e.v)) {
                            continue; // repeat of a stored edge: free skip
                        }
                    }
                    let comp = reg.get_mut(id).expect("routed to a live component");
                    let cap = comp.weight() * (k_eff - 1);
                    if comp.buffered.len() < cap {
                        ledger.charge(1)?;
                        comp.buffered.push(e);
                    } else {
                        let split = overflow_split(&mut output, &mut reg, ledger, id, e)?;
                        drains.insert(id, split);
                        if reg.all_visited() {
                            break 'pass; // the path covered the last vertices
                        }
                    }
                }
            }
        }

        // Pass end: finish splits, append every still-buffering component.
        for id in reg.live_ids() {
            if let Some(split) = drains.remove(&id) {
                // The registry entry is stale: its path vertices are already
                // in the output and its residuals move to the children below.
                let _ = reg.take(id);
                for (child, _attach_edge) in split.finalize()? {
                    // Child tree and attach edges keep the charges the split
                    // placed on them.
                    reg.register(child);
                }
            } else {
                let comp = reg.take(id);
                let holdings = comp.structural_charge() + comp.buffered.len();
                let t = local_dfs(&comp.tree, &comp.buffered, None)?;
                append_whole_tree(&mut output, &mut reg, &t, comp.root, comp.attach_parent)?;
                ledger.release(holdings)?;
            }
        }
    }
    Ok(output)
}

/// Local DFS tree of a component's stored subgraph — its spanning tree plus
/// the buffered edges (plus the overflow trigger, which the cap check has
/// already admitted) — rooted where the stored tree is rooted. Neighbors are
/// visited in storage order: tree edges in preorder first, then buffered
/// arrivals, so the traversal is deterministic.
fn local_dfs(snap: &DfsTree, buffered: &[Edge], trigger: Option<Edge>) -> Result<DfsTree, AlgoError> {
    let root = snap.root();
    let mut adj: HashMap<VertexId, Vec<VertexId>> = HashMap::new();
    let add = |adj: &mut HashMap<VertexId, Vec<VertexId>>, a: VertexId, b: VertexId| {
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    };
    for (p, c) in tree_edges_preorder(snap) {
        add(&mut adj, p, c);
    }
    for &e in buffered.iter().chain(trigger.iter()) {
        add(&mut adj, e.u, e.v);
    }

    let mut out = DfsTree::new(root);
    // (vertex, parent) entries; neighbors are pushed in reverse so the
    // first-listed neighbor is explored first, matching recursive DFS.
    let mut stack: Vec<(VertexId, VertexId)> = Vec::new();
    if let Some(ns) = adj.get(&root) {
        for &nb in ns.iter().rev() {
            stack.push((nb, root));
        }
    }
    while let Some((v, parent)) = stack.pop() {
        if out.contains(v) {
            continue;
        }
        out.add_child(parent, v)?;
        if let Some(ns) = adj.get(&v) {
            for &nb in ns.iter().rev() {
                if !out.contains(nb) {
                    stack.push((nb, v));
                }
            }
        }
    }
    Ok(out)
}

/// Phase switch for an overflowing component: recompute the local DFS tree of
/// its stored subgraph, append the root-to-deepest path of the result to the
/// output immediately, release all holdings, and return the [`PathSplit`]
/// that re-derives the residual structure. The replayed tree edges, the
/// buffered edges, and the triggering edge are fed before returning; the
/// caller feeds the rest of the pass.
fn overflow_split(
    output: &mut DfsTree,
    reg: &mut ComponentRegistry,
    ledger: &mut BudgetLedger,
    id: ComponentId,
    trigger: Edge,
) -> Result<PathSplit, AlgoError> {
    // Snapshot: the registry entry must stay live so residual vertices keep
    // routing to `id` for the rest of the pass.
    let (snap_tree, snap_vertices, snap_attach, buffered) = {
        let comp = reg.get_mut(id).expect("overflowing component is live");
        (
            comp.tree.clone(),
            comp.vertices.clone(),
            comp.attach_parent,
            std::mem::take(&mut comp.buffered),
        )
    };
    let structural = (snap_tree.len() - 1) + usize::from(snap_attach.is_some());

    let t = local_dfs(&snap_tree, &buffered, Some(trigger))?;

    // Deepest vertex of the refined tree, first in preorder on ties.
    let mut deepest = t.root();
    let mut best = 0u32;
    for &v in &t.subtree_vertices(t.root())? {
        let lvl = t.level_of(v)?;
        if lvl > best {
            best = lvl;
            deepest = v;
        }
    }
    let mut path = vec![deepest];
    let mut cur = deepest;
    while let Some(p) = t.parent_of(cur)? {
        path.push(p);
        cur = p;
    }
    path.reverse();

    // Append the path. Its head is either the artificial root itself (the
    // star-initialized whole-graph component) or a real vertex that goes
    // under the component's attach parent.
    let mut prev = if path[0] == output.root() {
        output.root()
    } else {
        let p = snap_attach.expect("real-rooted components carry an attach parent");
        output.add_child(p, path[0])?;
        reg.mark_visited(path[0]);
        path[0]
    };
    for &v in path.iter().skip(1) {
        output.add_child(prev, v)?;
        reg.mark_visited(v);
        prev = v;
    }

    // Path edges became final output edges; everything else is re-derived by
    // the split, which charges what it keeps.
    ledger.release(structural + buffered.len())?;

    let on_path: HashSet<VertexId> = path.iter().copied().collect();
    let residual: Vec<VertexId> = snap_vertices
        .iter()
        .copied()
        .filter(|v| !on_path.contains(v))
        .collect();
    let mut split = PathSplit::new(&residual, &path);
    for (a, b) in tree_edges_preorder(&snap_tree) {
        split.feed(Edge { u: a, v: b }, ledger)?;
    }
    for &b in &buffered {
        split.feed(b, ledger)?;
    }
    split.feed(trigger, ledger)?;
    Ok(split)
}

fn norm(a: VertexId, b: VertexId) -> (VertexId, VertexId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}
