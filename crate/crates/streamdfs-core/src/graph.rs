//! Core graph types: vertices, undirected edges, rooted DFS trees, and an
//! adjacency-list graph used by checkers and oracles.

use std::collections::{HashMap, HashSet};
use std::fmt;

use thiserror::Error;

/// Identifier of a vertex. Real vertices are `0..n`; the artificial root is `n`.
pub type VertexId = u32;

/// Errors produced by graph and tree operations.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    /// An edge with identical endpoints was rejected.
    #[error("self-loop ({0}, {0}) is not a valid edge")]
    SelfLoop(VertexId),
    /// A tree operation referenced a vertex the tree does not contain.
    #[error("vertex {0} not in tree")]
    VertexNotInTree(VertexId),
    /// A vertex was inserted into a tree that already contains it.
    #[error("vertex {0} already in tree")]
    VertexAlreadyInTree(VertexId),
    /// The root of a tree cannot be re-hung below another vertex.
    #[error("cannot re-hang the root vertex {0}")]
    CannotMoveRoot(VertexId),
}

/// An undirected edge between two distinct vertices.
///
/// The endpoint order is preserved as constructed (stream order matters for
/// tie-breaking), but equality and hashing are orientation-insensitive.
#[derive(Debug, Clone, Copy)]
pub struct Edge {
    /// First endpoint, in as-streamed order.
    pub u: VertexId,
    /// Second endpoint, in as-streamed order.
    pub v: VertexId,
}

impl Edge {
    /// Creates an edge, rejecting self-loops.
    ///
    /// # Errors
    ///
    /// Returns [`GraphError::SelfLoop`] when `u == v`.
    pub fn new(u: VertexId, v: VertexId) -> Result<Self, GraphError> {
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        Ok(Self { u, v })
    }

    /// Returns the endpoints as `(min, max)`, the canonical undirected form.
    #[must_use]
    pub fn normalized(&self) -> (VertexId, VertexId) {
        if self.u <= self.v {
            (self.u, self.v)
        } else {
            (self.v, self.u)
        }
    }

    /// Returns `true` when `x` is one of the endpoints.
    #[must_use]
    pub fn touches(&self, x: VertexId) -> bool {
        self.u == x || self.v == x
    }

    /// Returns the endpoint opposite to `x`, if `x` is an endpoint.
    #[must_use]
    pub fn other(&self, x: VertexId) -> Option<VertexId> {
        if self.u == x {
            Some(self.v)
        } else if self.v == x {
            Some(self.u)
        } else {
            None
        }
    }
}

impl PartialEq for Edge {
    fn eq(&self, other: &Self) -> bool {
        self.normalized() == other.normalized()
    }
}

impl Eq for Edge {}

impl std::hash::Hash for Edge {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.normalized().hash(state);
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.u, self.v)
    }
}

/// A rooted tree with parent pointers, per-vertex depth levels, and ordered
/// child lists.
///
/// The root sits at level 0. Child lists preserve insertion order, which makes
/// every traversal of the tree deterministic. Structural edits used by the
/// incremental maintenance algorithms (`rehang`, `relabel_subtree`) are
/// low-level: `rehang` deliberately leaves levels stale so a restructuring step
/// can batch moves before one relabel sweep.
#[derive(Debug, Clone)]
pub struct DfsTree {
    root: VertexId,
    parent: HashMap<VertexId, Option<VertexId>>,
    level: HashMap<VertexId, u32>,
    children: HashMap<VertexId, Vec<VertexId>>,
}

impl DfsTree {
    /// Creates a tree holding only `root` at level 0.
    #[must_use]
    pub fn new(root: VertexId) -> Self {
        let mut parent = HashMap::new();
        let mut level = HashMap::new();
        let mut children = HashMap::new();
        parent.insert(root, None);
        level.insert(root, 0);
        children.insert(root, Vec::new());
        Self {
            root,
            parent,
            level,
            children,
        }
    }

    /// The root vertex.
    #[must_use]
    pub fn root(&self) -> VertexId {
        self.root
    }

    /// Number of vertices in the tree (including the root).
    #[must_use]
    pub fn len(&self) -> usize {
        self.parent.len()
    }

    /// A tree always contains at least its root.
    #[must_use]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Returns `true` when `v` is in the tree.
    #[must_use]
    pub fn contains(&self, v: VertexId) -> bool {
        self.parent.contains_key(&v)
    }

    /// Iterates over all vertices in unspecified order.
    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.parent.keys().copied()
    }

    /// Parent of `v`, or `None` when `v` is the root.
    ///
    /// # Errors
    ///
    /// Returns [`GraphError::VertexNotInTree`] when `v` is absent.
    pub fn parent_of(&self, v: VertexId) -> Result<Option<VertexId>, GraphError> {
        self.parent
            .get(&v)
            .copied()
            .ok_or(GraphError::VertexNotInTree(v))
    }

    /// Depth level of `v` (root = 0).
    ///
    /// # Errors
    ///
    /// Returns [`GraphError::VertexNotInTree`] when `v` is absent.
    pub fn level_of(&self, v: VertexId) -> Result<u32, GraphError> {
        self.level
            .get(&v)
            .copied()
            .ok_or(GraphError::VertexNotInTree(v))
    }

    /// Children of `v` in insertion order.
    ///
    /// # Errors
    ///
    /// Returns [`GraphError::VertexNotInTree`] when `v` is absent.
    pub fn children_of(&self, v: VertexId) -> Result<&[VertexId], GraphError> {
        self.children
            .get(&v)
            .map(Vec::as_slice)
            .ok_or(GraphError::VertexNotInTree(v))
    }

    /// Returns `true` when `(u, v)` is a tree edge (in either orientation).
    #[must_use]
    pub fn is_tree_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.parent.get(&u).copied().flatten() == Some(v)
            || self.parent.get(&v).copied().flatten() == Some(u)
    }

    /// Appends `child` under `parent` at level `level(parent) + 1`.
    ///
    /// # Errors
    ///
    /// Returns [`GraphError::VertexNotInTree`] when `parent` is absent and
    /// [`GraphError::VertexAlreadyInTree`] when `child` is present.
    pub fn add_child(&mut self, parent: VertexId, child: VertexId) -> Result<(), GraphError> {
        if self.contains(child) {
            return Err(GraphError::VertexAlreadyInTree(child));
        }
        let parent_level = self.level_of(parent)?;
        self.parent.insert(child, Some(parent));
        self.level.insert(child, parent_level + 1);
        self.children.insert(child, Vec::new());
        self.children
            .get_mut(&parent)
            .expect("parent presence checked above")
            .push(child);
        Ok(())
    }

    /// Moves `v` (and implicitly its subtree) under `new_parent`.
    ///
    /// Levels of the moved subtree are NOT updated; callers must follow up
    /// with [`DfsTree::relabel_subtree`] once all moves of a restructuring
    /// step are done.
    ///
    /// # Errors
    ///
    /// Returns [`GraphError::VertexNotInTree`] for absent vertices and
    /// [`GraphError::CannotMoveRoot`] when `v` is the root.
    pub fn rehang(&mut self, v: VertexId, new_parent: VertexId) -> Result<(), GraphError> {
        if !self.contains(new_parent) {
            return Err(GraphError::VertexNotInTree(new_parent));
        }
        let old_parent = self
            .parent_of(v)?
            .ok_or(GraphError::CannotMoveRoot(v))?;
        let siblings = self
            .children
            .get_mut(&old_parent)
            .expect("old parent must be in tree");
        let idx = siblings
            .iter()
            .position(|&c| c == v)
            .expect("child list must contain v");
        siblings.remove(idx);
        self.parent.insert(v, Some(new_parent));
        self.children
            .get_mut(&new_parent)
            .expect("new parent presence checked above")
            .push(v);
        Ok(())
    }

    /// Recomputes levels of the subtree rooted at `v` from `v`'s parent level.
    /// Returns the subtree vertices in preorder (children order), `v` first.
    ///
    /// # Errors
    ///
    /// Returns [`GraphError::VertexNotInTree`] when `v` is absent.
    pub fn relabel_subtree(&mut self, v: VertexId) -> Result<Vec<VertexId>, GraphError> {
        let base = match self.parent_of(v)? {
            Some(p) => self.level_of(p)? + 1,
            None => 0,
        };
        let mut order = Vec::new();
        let mut stack = vec![(v, base)];
        while let Some((x, lvl)) = stack.pop() {
            self.level.insert(x, lvl);
            order.push(x);
            let kids = self.children.get(&x).expect("subtree vertex in tree");
            for &c in kids.iter().rev() {
                stack.push((c, lvl + 1));
            }
        }
        Ok(order)
    }

    /// Vertices of the subtree rooted at `v`, in preorder (children order).
    ///
    /// # Errors
    ///
    /// Returns [`GraphError::VertexNotInTree`] when `v` is absent.
    pub fn subtree_vertices(&self, v: VertexId) -> Result<Vec<VertexId>, GraphError> {
        if !self.contains(v) {
            return Err(GraphError::VertexNotInTree(v));
        }
        let mut order = Vec::new();
        let mut stack = vec![v];
        while let Some(x) = stack.pop() {
            order.push(x);
            let kids = self.children.get(&x).expect("subtree vertex in tree");
            for &c in kids.iter().rev() {
                stack.push(c);
            }
        }
        Ok(order)
    }

    /// Extracts the subtree rooted at `v` as a fresh tree with `v` at level 0.
    ///
    /// # Errors
    ///
    /// Returns [`GraphError::VertexNotInTree`] when `v` is absent.
    pub fn extract_subtree(&self, v: VertexId) -> Result<DfsTree, GraphError> {
        let order = self.subtree_vertices(v)?;
        let mut out = DfsTree::new(v);
        for &x in &order {
            if x == v {
                continue;
            }
            let p = self
                .parent_of(x)
                .expect("subtree vertex in tree")
                .expect("non-root subtree vertex has a parent");
            out.add_child(p, x).expect("preorder insertion is consistent");
        }
        Ok(out)
    }

    /// Height of the tree: the maximum level over all vertices.
    #[must_use]
    pub fn height(&self) -> u32 {
        self.level.values().copied().max().unwrap_or(0)
    }

    /// Returns `true` when `a` is an ancestor of `d` (a vertex is its own
    /// ancestor).
    ///
    /// # Errors
    ///
    /// Returns [`GraphError::VertexNotInTree`] when either vertex is absent.
    pub fn is_ancestor(&self, a: VertexId, d: VertexId) -> Result<bool, GraphError> {
        let la = self.level_of(a)?;
        let mut cur = d;
        let mut lc = self.level_of(d)?;
        while lc > la {
            cur = self
                .parent_of(cur)?
                .expect("vertex above level 0 has a parent");
            lc = self.level_of(cur)?;
        }
        Ok(cur == a)
    }

    /// Lowest common ancestor of `x` and `y`.
    ///
    /// # Errors
    ///
    /// Returns [`GraphError::VertexNotInTree`] when either vertex is absent.
    pub fn lca(&self, x: VertexId, y: VertexId) -> Result<VertexId, GraphError> {
        let mut a = x;
        let mut b = y;
        let mut la = self.level_of(a)?;
        let mut lb = self.level_of(b)?;
        while la > lb {
            a = self.parent_of(a)?.expect("level > 0 has parent");
            la -= 1;
        }
        while lb > la {
            b = self.parent_of(b)?.expect("level > 0 has parent");
            lb -= 1;
        }
        while a != b {
            a = self.parent_of(a)?.expect("distinct vertices below root");
            b = self.parent_of(b)?.expect("distinct vertices below root");
        }
        Ok(a)
    }

    /// Verifies internal consistency: parent/child agreement, level arithmetic,
    /// and reachability of every vertex from the root.
    ///
    /// # Panics
    ///
    /// Panics with a diagnostic message when any invariant is violated. Meant
    /// for tests and debug assertions.
    pub fn assert_consistent(&self) {
        assert_eq!(
            self.parent.len(),
            self.level.len(),
            "parent and level maps must cover the same vertices"
        );
        assert_eq!(
            self.parent.len(),
            self.children.len(),
            "parent and children maps must cover the same vertices"
        );
        assert_eq!(self.level.get(&self.root), Some(&0), "root must sit at level 0");
        let mut seen = 0usize;
        let mut stack = vec![self.root];
        let mut visited: HashSet<VertexId> = HashSet::new();
        while let Some(x) = stack.pop() {
            assert!(visited.insert(x), "vertex {x} reached twice; cycle in tree");
            seen += 1;
            let lx = self.level[&x];
            for &c in &self.children[&x] {
                assert_eq!(
                    self.parent[&c],
                    Some(x),
                    "child {c} of {x} must point back to its parent"
                );
                assert_eq!(
                    self.level[&c],
                    lx + 1,
                    "child {c} must sit one level below {x}"
                );
                stack.push(c);
            }
        }
        assert_eq!(
            seen,
            self.parent.len(),
            "all vertices must be reachable from the root"
        );
    }
}

/// An immutable adjacency-list graph over vertices `0..n` plus the artificial
/// root `n`, used by the validity checker and the reference DFS oracle.
///
/// The root is implicitly adjacent to every real vertex; those edges are not
/// stored in the adjacency lists but both the checker and oracle account for
/// them.
#[derive(Debug, Clone)]
pub struct AdjacencyGraph {
    n: usize,
    m: usize,
    adj: Vec<Vec<VertexId>>,
    edge_set: HashSet<(VertexId, VertexId)>,
}

impl AdjacencyGraph {
    /// Builds the graph from an edge list over vertices `0..n`. Duplicate
    /// edges are stored once (first occurrence wins the adjacency position).
    ///
    /// # Panics
    ///
    /// Panics when an edge endpoint is out of range.
    #[must_use]
    pub fn from_edges(n: usize, edges: &[Edge]) -> Self {
        let mut adj = vec![Vec::new(); n];
        let mut edge_set = HashSet::new();
        for e in edges {
            let (a, b) = (e.u as usize, e.v as usize);
            assert!(a < n && b < n, "edge {e} out of range for n = {n}");
            if edge_set.insert(e.normalized()) {
                adj[a].push(e.v);
                adj[b].push(e.u);
            }
        }
        let m = edge_set.len();
        Self {
            n,
            m,
            adj,
            edge_set,
        }
    }

    /// Number of real vertices.
    #[must_use]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of distinct edges.
    #[must_use]
    pub fn m(&self) -> usize {
        self.m
    }

    /// Identifier of the artificial root (`n`).
    #[must_use]
    pub fn root(&self) -> VertexId {
        self.n as VertexId
    }

    /// Neighbors of real vertex `v` in first-seen order.
    #[must_use]
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.adj[v as usize]
    }

    /// Returns `true` when the graph stores edge `(u, v)` (either orientation).
    /// Root edges are implicit and not reported here.
    #[must_use]
    pub fn contains_edge(&self, u: VertexId, v: VertexId) -> bool {
        if u == v {
            return false;
        }
        let key = if u < v { (u, v) } else { (v, u) };
        self.edge_set.contains(&key)
    }

    /// Iterates over the distinct edges in normalized `(min, max)` form,
    /// ordered ascending. Root edges are not included.
    pub fn edges_sorted(&self) -> Vec<(VertexId, VertexId)> {
        let mut out: Vec<_> = self.edge_set.iter().copied().collect();
        out.sort_unstable();
        out
    }
}
