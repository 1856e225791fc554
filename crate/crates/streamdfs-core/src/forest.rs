//! Bookkeeping for the unvisited part of the graph: components, their local
//! spanning trees, edge routing, and splitting a component around an appended
//! path.
//!
//! While a DFS tree is grown pass by pass, the not-yet-visited vertices form
//! *components*, each carrying a local spanning tree `T_C` rooted at `r_C`, an
//! attach edge into the visited tree, and optionally buffered edges. Stream
//! edges are routed to the component owning their endpoints; an edge between
//! two different components would contradict component maintenance and is
//! treated as a hard programming error.

use std::collections::BTreeMap;
use std::collections::HashMap;

use thiserror::Error;

use crate::budget::{BudgetError, BudgetLedger};
use crate::graph::{DfsTree, Edge, VertexId};

/// Errors produced by component-forest operations.
#[derive(Debug, Error)]
pub enum ForestError {
    /// A residual class of a split has no edge to the appended path.
    #[error("component {comp} is disconnected from path")]
    DisconnectedFromPath {
        /// Placeholder id of the offending residual class (first-seen order).
        comp: u32,
    },
    /// Ledger fault while re-charging kept edges.
    #[error(transparent)]
    Budget(#[from] BudgetError),
}

/// Identifier of a component.
pub type ComponentId = u32;

// ---------------------------------------------------------------------------
// Union-find
// ---------------------------------------------------------------------------

/// Union-find over dense indices with union by size and path compression.
#[derive(Debug, Clone, Default)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    /// Creates `n` singleton classes.
    #[must_use]
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    /// Number of elements.
    #[must_use]
    pub fn len(&self) -> usize {
        self.parent.len()
    }

    /// `true` when the structure holds no elements.
    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    /// Representative of `x`'s class.
    pub fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    /// Merges the classes of `a` and `b`. Returns `true` when they were
    /// distinct (a real merge happened).
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (big, small) = if self.size[ra] >= self.size[rb] {
            (ra, rb)
        } else {
            (rb, ra)
        };
        self.parent[small] = big;
        self.size[big] += self.size[small];
        true
    }

    /// `true` when `a` and `b` share a class.
    pub fn same(&mut self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }

    /// Size of `x`'s class.
    pub fn class_size(&mut self, x: usize) -> usize {
        let r = self.find(x);
        self.size[r]
    }
}

/// Union-find keyed by vertex ids, registering vertices on first sight.
#[derive(Debug, Clone, Default)]
pub struct LabeledUnionFind {
    uf: UnionFind,
    slots: HashMap<VertexId, usize>,
    labels: Vec<VertexId>,
}

impl LabeledUnionFind {
    /// Creates an empty structure.
    #[must_use]
    pub fn new() -> Self {
        Self {
            uf: UnionFind::new(0),
            slots: HashMap::new(),
            labels: Vec::new(),
        }
    }

    fn slot(&mut self, v: VertexId) -> usize {
        if let Some(&s) = self.slots.get(&v) {
            return s;
        }
        let s = self.labels.len();
        self.labels.push(v);
        self.slots.insert(v, s);
        self.uf.parent.push(s);
        self.uf.size.push(1);
        s
    }

    /// Merges the classes of the edge's endpoints; `true` on a real merge.
    pub fn union(&mut self, e: Edge) -> bool {
        let (a, b) = (self.slot(e.u), self.slot(e.v));
        self.uf.union(a, b)
    }

    /// `true` when both endpoints have been seen and share a class.
    pub fn same(&mut self, u: VertexId, v: VertexId) -> bool {
        match (self.slots.get(&u).copied(), self.slots.get(&v).copied()) {
            (Some(a), Some(b)) => self.uf.same(a, b),
            _ => false,
        }
    }
}

/// Builds the spanning tree formed by the edges of `edges` that merge two
/// union-find classes, rooted at `root`, with children in merge order.
///
/// Edges are processed in order through `uf`; an edge whose endpoints are
/// already connected is skipped. The merge edges form a forest; the tree
/// returned is the component of `root`, oriented away from it.
///
pub fn spanning_tree_of_merges(
    uf: &mut LabeledUnionFind,
    edges: &[Edge],
    root: VertexId,
) -> DfsTree {
    let mut merges = Vec::new();
    for &e in edges {
        if uf.union(e) {
            merges.push(e);
        }
    }
    merges.retain(|e| uf.same(root, e.u));
    tree_from_forest_edges(&merges, root)
}

/// Orients an acyclic edge set into a tree rooted at `root` (children in the
/// order the edges connect to the grown tree, scanning the list repeatedly).
///
/// # Panics
///
/// Panics when the edges do not connect into a single tree containing `root`.
pub fn tree_from_forest_edges(edges: &[Edge], root: VertexId) -> DfsTree {
    let mut tree = DfsTree::new(root);
    let mut remaining: Vec<Edge> = edges.to_vec();
    while !remaining.is_empty() {
        let before = remaining.len();
        remaining.retain(|e| {
            let (iu, iv) = (tree.contains(e.u), tree.contains(e.v));
            match (iu, iv) {
                (true, true) => panic!("edge {e} closes a cycle in a merge forest"),
                (true, false) => {
                    tree.add_child(e.u, e.v).expect("endpoint checked");
                    false
                }
                (false, true) => {
                    tree.add_child(e.v, e.u).expect("endpoint checked");
                    false
                }
                (false, false) => true,
            }
        });
        assert!(
            remaining.len() < before,
            "merge edges must all connect to the root's tree"
        );
    }
    tree
}

// ---------------------------------------------------------------------------
// Components and the registry
// ---------------------------------------------------------------------------

/// One unvisited component: its vertices, local spanning tree, root, and
/// attach edge into the visited tree.
#[derive(Debug, Clone)]
pub struct Component {
    /// Registry-assigned identifier (placeholder until registered).
    pub id: ComponentId,
    /// Vertices of the component, in a deterministic order.
    pub vertices: Vec<VertexId>,
    /// Local spanning tree over exactly `vertices`, rooted at [`Component::root`].
    /// Exception: the initial whole-graph component under heuristic H1 is
    /// rooted at the artificial root, which is *visited*; its tree spans
    /// `vertices ∪ {r}`.
    pub tree: DfsTree,
    /// Root of the local tree.
    pub root: VertexId,
    /// Visited vertex under which the component's tree will be attached
    /// (`None` only for trees rooted at the global root).
    pub attach_parent: Option<VertexId>,
    /// Edges buffered for this component (kPath phase A).
    pub buffered: Vec<Edge>,
}

impl Component {
    /// Number of unvisited vertices covered by the component.
    #[must_use]
    pub fn weight(&self) -> usize {
        self.vertices.len()
    }

    /// Count of charged edges tied to the component's structure: local tree
    /// edges plus the attach edge. (Buffered edges are charged separately.)
    #[must_use]
    pub fn structural_charge(&self) -> usize {
        (self.tree.len() - 1) + usize::from(self.attach_parent.is_some())
    }
}

/// Where an edge landed when routed against the visited tree and the live
/// components.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoutedEdge {
    /// Both endpoints already visited.
    BothVisited,
    /// Both endpoints inside the same component.
    Within(ComponentId),
    /// One endpoint visited, the other inside a component. Whether this is a
    /// component-to-path edge being sought is for the caller to decide.
    Mixed {
        /// Component of the unvisited endpoint.
        comp: ComponentId,
        /// The visited endpoint.
        tree_end: VertexId,
        /// The unvisited endpoint.
        comp_end: VertexId,
    },
}

/// Tracks which component each unvisited vertex belongs to and which vertices
/// are already in the output tree.
#[derive(Debug, Clone)]
pub struct ComponentRegistry {
    comp_of: Vec<Option<ComponentId>>,
    visited: Vec<bool>,
    components: BTreeMap<ComponentId, Component>,
    next_id: ComponentId,
    unvisited: usize,
}

impl ComponentRegistry {
    /// Creates a registry over `n` real vertices, all unvisited and not yet
    /// assigned to a component.
    #[must_use]
    pub fn new(n: usize) -> Self {
        Self {
            comp_of: vec![None; n],
            visited: vec![false; n],
            components: BTreeMap::new(),
            next_id: 0,
            unvisited: n,
        }
    }

    /// Number of real vertices.
    #[must_use]
    pub fn n(&self) -> usize {
        self.comp_of.len()
    }

    /// Number of vertices not yet in the output tree.
    #[must_use]
    pub fn unvisited_count(&self) -> usize {
        self.unvisited
    }

    /// `true` once every real vertex is in the output tree.
    #[must_use]
    pub fn all_visited(&self) -> bool {
        self.unvisited == 0
    }

    /// Marks `v` visited and detaches it from any component assignment.
    ///
    /// # Panics
    ///
    /// Panics when `v` was already visited.
    pub fn mark_visited(&mut self, v: VertexId) {
        let slot = v as usize;
        assert!(!self.visited[slot], "vertex {v} visited twice");
        self.visited[slot] = true;
        self.comp_of[slot] = None;
        self.unvisited -= 1;
    }

    /// `true` when `v` is in the output tree. The artificial root (id `n`) is
    /// always visited.
    #[must_use]
    pub fn is_visited(&self, v: VertexId) -> bool {
        let slot = v as usize;
        slot >= self.visited.len() || self.visited[slot]
    }

    /// Registers a component, assigning its id and claiming its vertices.
    ///
    /// # Panics
    ///
    /// Panics when a claimed vertex is visited or already assigned.
    pub fn register(&mut self, mut comp: Component) -> ComponentId {
        let id = self.next_id;
        self.next_id += 1;
        comp.id = id;
        for &v in &comp.vertices {
            let slot = v as usize;
            assert!(!self.visited[slot], "vertex {v} of new component is visited");
            assert!(
                self.comp_of[slot].is_none(),
                "vertex {v} already assigned to a component"
            );
            self.comp_of[slot] = Some(id);
        }
        self.components.insert(id, comp);
        id
    }

    /// Removes and returns a component, unassigning its vertices.
    ///
    /// # Panics
    ///
    /// Panics when `id` is not live.
    pub fn take(&mut self, id: ComponentId) -> Component {
        let comp = self
            .components
            .remove(&id)
            .unwrap_or_else(|| panic!("component {id} is not live"));
        for &v in &comp.vertices {
            self.comp_of[v as usize] = None;
        }
        comp
    }

    /// Shared access to a live component.
    #[must_use]
    pub fn get(&self, id: ComponentId) -> Option<&Component> {
        self.components.get(&id)
    }

    /// Exclusive access to a live component.
    pub fn get_mut(&mut self, id: ComponentId) -> Option<&mut Component> {
        self.components.get_mut(&id)
    }

    /// Component currently owning `v`, if any.
    #[must_use]
    pub fn component_of(&self, v: VertexId) -> Option<ComponentId> {
        let slot = v as usize;
        if slot >= self.comp_of.len() {
            None
        } else {
            self.comp_of[slot]
        }
    }

    /// Ids of live components in ascending id order (deterministic).
    #[must_use]
    pub fn live_ids(&self) -> Vec<ComponentId> {
        self.components.keys().copied().collect()
    }

    /// Routes a stream edge against the current visited/component state.
    ///
    /// # Panics
    ///
    /// Panics when the endpoints lie in two *different* components — edges
    /// between components cannot exist if component maintenance is correct —
    /// or when an unvisited endpoint has no component assignment.
    #[must_use]
    pub fn route_edge(&self, e: Edge) -> RoutedEdge {
        let (vu, vv) = (self.is_visited(e.u), self.is_visited(e.v));
        match (vu, vv) {
            (true, true) => RoutedEdge::BothVisited,
            (true, false) => RoutedEdge::Mixed {
                comp: self.expect_comp(e.v),
                tree_end: e.u,
                comp_end: e.v,
            },
            (false, true) => RoutedEdge::Mixed {
                comp: self.expect_comp(e.u),
                tree_end: e.v,
                comp_end: e.u,
            },
            (false, false) => {
                let (cu, cv) = (self.expect_comp(e.u), self.expect_comp(e.v));
                assert_eq!(
                    cu, cv,
                    "edge {e} connects two different components {cu} and {cv}"
                );
                RoutedEdge::Within(cu)
            }
        }
    }

    fn expect_comp(&self, v: VertexId) -> ComponentId {
        self.component_of(v)
            .unwrap_or_else(|| panic!("unvisited vertex {v} has no component"))
    }
}

// ---------------------------------------------------------------------------
// Splitting a component around an appended path
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
struct Candidate {
    edge: Edge,
    path_end: VertexId,
    comp_end: VertexId,
    /// Position of `path_end` on the appended path (deeper = larger).
    path_pos: usize,
    seq: u64,
}

/// Streaming state for partitioning `C ∖ P` after path `P` of component `C`
/// was appended to the output tree.
///
/// Feed it every remaining edge relevant to `C` (tree-edge replay, buffered
/// edges, then the rest of the pass). Edges kept — merge edges of residual
/// classes and the current best path-candidate per class — are charged to the
/// ledger; dropped or superseded edges are released. Fed edges are expected to
/// be *uncharged* (the caller releases the component's holdings up front).
#[derive(Debug)]
pub struct PathSplit {
    /// Position on the path per path vertex.
    path_pos: HashMap<VertexId, usize>,
    /// Dense slot per residual vertex.
    slot_of: HashMap<VertexId, usize>,
    verts: Vec<VertexId>,
    uf: UnionFind,
    /// Merge edges per slot-root (moved to the winner on union).
    forest: Vec<Vec<Edge>>,
    cand: Vec<Option<Candidate>>,
    /// First time each slot's class was touched by a fed edge.
    first_touch: Vec<Option<u64>>,
    next_seq: u64,
}

impl PathSplit {
    /// Creates the split state for residual vertices `residual` (any
    /// deterministic order) around path `p` (root end first).
    #[must_use]
    pub fn new(residual: &[VertexId], p: &[VertexId]) -> Self {
        let path_pos = p
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, i))
            .collect::<HashMap<_, _>>();
        let slot_of = residual
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, i))
            .collect::<HashMap<_, _>>();
        let len = residual.len();
        Self {
            path_pos,
            slot_of,
            verts: residual.to_vec(),
            uf: UnionFind::new(len),
            forest: vec![Vec::new(); len],
            cand: vec![None; len],
            first_touch: vec![None; len],
            next_seq: 0,
        }
    }

    /// Number of residual vertices.
    #[must_use]
    pub fn residual_len(&self) -> usize {
        self.verts.len()
    }

    /// Feeds one edge. Irrelevant edges (both endpoints outside `C ∖ P` and
    /// `P`, path-to-path, or to already-visited vertices off the path) are
    /// dropped. Returns ledger faults only.
    ///
    /// # Errors
    ///
    /// Propagates [`BudgetError`] from charging kept edges.
    pub fn feed(&mut self, e: Edge, ledger: &mut BudgetLedger) -> Result<(), ForestError> {
        let seq = self.next_seq;
        self.next_seq += 1;
        let su = self.slot_of.get(&e.u).copied();
        let sv = self.slot_of.get(&e.v).copied();
        match (su, sv) {
            (Some(a), Some(b)) => {
                self.touch(a, seq);
                self.touch(b, seq);
                let (ra, rb) = (self.uf.find(a), self.uf.find(b));
                if ra == rb {
                    return Ok(()); // duplicate connectivity: dropped
                }
                ledger.charge(1)?;
                self.uf.union(ra, rb);
                let root = self.uf.find(ra);
                let loser = if root == ra { rb } else { ra };
                // Move the loser's bookkeeping to the winner.
                let mut moved = std::mem::take(&mut self.forest[loser]);
                self.forest[root].append(&mut moved);
                self.forest[root].push(e);
                self.first_touch[root] = match (self.first_touch[root], self.first_touch[loser]) {
                    (Some(x), Some(y)) => Some(x.min(y)),
                    (x, y) => x.or(y),
                };
                let challenger = self.cand[loser].take();
                self.consider(root, challenger, ledger)?;
                Ok(())
            }
            (Some(s), None) | (None, Some(s)) => {
                let (comp_end, other) = if su.is_some() { (e.u, e.v) } else { (e.v, e.u) };
                self.touch(s, seq);
                let Some(&pos) = self.path_pos.get(&other) else {
                    return Ok(()); // endpoint visited before this path: permanent back edge
                };
                let root = self.uf.find(s);
                let challenger = Some(Candidate {
                    edge: e,
                    path_end: other,
                    comp_end,
                    path_pos: pos,
                    seq,
                });
                // Candidate charge: charge the challenger, then let the
                // comparison release the loser.
                ledger.charge(1)?;
                self.consider_charged(root, challenger, ledger)?;
                Ok(())
            }
            (None, None) => Ok(()),
        }
    }

    fn touch(&mut self, slot: usize, seq: u64) {
        let root = self.uf.find(slot);
        if self.first_touch[root].is_none() {
            self.first_touch[root] = Some(seq);
        }
    }

    /// Merges an (already charged or absent) challenger candidate into `root`.
    fn consider(
        &mut self,
        root: usize,
        challenger: Option<Candidate>,
        ledger: &mut BudgetLedger,
    ) -> Result<(), ForestError> {
        if let Some(c) = challenger {
            self.consider_charged(root, Some(c), ledger)?;
        }
        Ok(())
    }

    /// `challenger` holds one ledger charge; keep the better of it and the
    /// incumbent, releasing the loser.
    fn consider_charged(
        &mut self,
        root: usize,
        challenger: Option<Candidate>,
        ledger: &mut BudgetLedger,
    ) -> Result<(), ForestError> {
        let Some(c) = challenger else { return Ok(()) };
        match &self.cand[root] {
            None => {
                self.cand[root] = Some(c);
            }
            Some(old) => {
                let better = c.path_pos > old.path_pos
                    || (c.path_pos == old.path_pos && c.seq < old.seq);
                if better {
                    ledger.release(1)?;
                    self.cand[root] = Some(c);
                } else {
                    ledger.release(1)?;
                }
            }
        }
        Ok(())
    }

    /// Finishes the split: residual classes in first-touched order, each with
    /// its spanning tree (merge edges, rooted at the candidate's component
    /// endpoint) and its lowest attach edge.
    ///
    /// Returned components carry placeholder ids; the registry assigns real
    /// ids at registration. The attach edge and tree edges stay charged.
    ///
    /// # Errors
    ///
    /// Returns [`ForestError::DisconnectedFromPath`] when a class has no
    /// candidate edge to the path.
    pub fn finalize(mut self) -> Result<Vec<(Component, Edge)>, ForestError> {
        // Group slots by class root, ordered by first touch then slot order.
        let mut roots: Vec<usize> = Vec::new();
        let mut members: HashMap<usize, Vec<usize>> = HashMap::new();
        for s in 0..self.verts.len() {
            let r = self.uf.find(s);
            members.entry(r).or_insert_with(|| {
                roots.push(r);
                Vec::new()
            });
            members.get_mut(&r).expect("just inserted").push(s);
        }
        roots.sort_by_key(|r| (self.first_touch[*r].unwrap_or(u64::MAX), *r));

        let mut out = Vec::with_capacity(roots.len());
        for (idx, root) in roots.iter().copied().enumerate() {
            let Some(cand) = self.cand[root].take() else {
                return Err(ForestError::DisconnectedFromPath { comp: idx as u32 });
            };
            let vertices: Vec<VertexId> = members[&root]
                .iter()
                .map(|&s| self.verts[s])
                .collect();
            let tree = tree_from_forest_edges(&self.forest[root], cand.comp_end);
            debug_assert_eq!(tree.len(), vertices.len(), "tree must span the class");
            let comp = Component {
                id: ComponentId::MAX, // placeholder; registry assigns
                vertices,
                tree,
                root: cand.comp_end,
                attach_parent: Some(cand.path_end),
                buffered: Vec::new(),
            };
            out.push((comp, cand.edge));
        }
        Ok(out)
    }
}

/// Convenience wrapper implementing the one-shot split: feed `edges` (already
/// restricted to the component, e.g. buffered edges then the pass remainder)
/// and finalize. Kept edges are charged to `ledger`; fed edges must be
/// uncharged.
///
/// # Errors
///
/// Returns [`ForestError::DisconnectedFromPath`] when a residual class has no
/// edge to the path, and propagates ledger faults.
pub fn split_after_path(
    c: &Component,
    p: &[VertexId],
    edges: &[Edge],
    ledger: &mut BudgetLedger,
) -> Result<Vec<(Component, Edge)>, ForestError> {
    let on_path: HashMap<VertexId, ()> = p.iter().map(|&v| (v, ())).collect();
    let residual: Vec<VertexId> = c
        .vertices
        .iter()
        .copied()
        .filter(|v| !on_path.contains_key(v))
        .collect();
    let mut split = PathSplit::new(&residual, p);
    // Replay the component's own tree edges first: with deduplicating edge
    // buffers the stream may never re-show them, yet residual connectivity
    // can depend on them.
    for (parent, child) in tree_edges_preorder(&c.tree) {
        split.feed(Edge { u: parent, v: child }, ledger)?;
    }
    for &e in edges {
        split.feed(e, ledger)?;
    }
    split.finalize()
}

/// Tree edges as `(parent, child)` pairs in preorder (children order).
#[must_use]
pub fn tree_edges_preorder(tree: &DfsTree) -> Vec<(VertexId, VertexId)> {
    let mut out = Vec::with_capacity(tree.len().saturating_sub(1));
    let mut stack = vec![tree.root()];
    while let Some(x) = stack.pop() {
        let kids = tree.children_of(x).expect("walk stays inside the tree");
        for &c in kids.iter().rev() {
            stack.push(c);
        }
        for &c in kids {
            out.push((x, c));
        }
    }
    out
}
