//! DFS-validity checking and a reference (offline) DFS oracle.
//!
//! A rooted spanning tree `T` of graph `G` is a *valid DFS tree* exactly when
//! every edge of `G` that is not a tree edge connects an ancestor-descendant
//! pair of `T` (a back edge). The checker tests that property directly; the
//! oracle produces the canonical recursive DFS tree for cross-checking.

use crate::graph::{AdjacencyGraph, DfsTree, Edge, VertexId};

/// Outcome of validating a tree against a graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidityReport {
    /// The tree contains the artificial root and every vertex `0..n`, and
    /// nothing else.
    pub is_spanning: bool,
    /// Every non-tree edge of the graph is a back edge. `false` whenever
    /// `offending_edge` is present.
    pub is_dfs: bool,
    /// The first edge found violating the back-edge property, in the scan
    /// order of [`AdjacencyGraph::edges_sorted`].
    pub offending_edge: Option<Edge>,
}

impl ValidityReport {
    /// `true` when the tree is a spanning valid DFS tree.
    #[must_use]
    pub fn is_valid(&self) -> bool {
        self.is_spanning && self.is_dfs
    }
}

/// Checks whether `tree` is a valid DFS tree of `graph` rooted at the
/// artificial root.
///
/// The artificial root's edges (root to every real vertex) are tree-eligible
/// and never offending: the root is an ancestor of every vertex. Missing
/// vertices make the report non-spanning; edges with a missing endpoint are
/// reported as offending.
#[must_use]
pub fn check_dfs(graph: &AdjacencyGraph, tree: &DfsTree) -> ValidityReport {
    let n = graph.n();
    let root = graph.root();
    let mut is_spanning = tree.root() == root && tree.len() == n + 1;
    if is_spanning {
        for v in 0..n as VertexId {
            if !tree.contains(v) {
                is_spanning = false;
                break;
            }
        }
    }

    let mut offending_edge = None;
    for (u, v) in graph.edges_sorted() {
        if !tree.contains(u) || !tree.contains(v) {
            offending_edge = Some(Edge { u, v });
            break;
        }
        if tree.is_tree_edge(u, v) {
            continue;
        }
        let back = tree.is_ancestor(u, v).unwrap_or(false)
            || tree.is_ancestor(v, u).unwrap_or(false);
        if !back {
            offending_edge = Some(Edge { u, v });
            break;
        }
    }

    ValidityReport {
        is_spanning,
        is_dfs: offending_edge.is_none(),
        offending_edge,
    }
}

/// Computes the canonical recursive DFS tree of `graph` from the artificial
/// root, visiting the root's neighbors `0..n` in ascending order and each real
/// vertex's neighbors in adjacency (first-seen) order.
#[must_use]
pub fn oracle_dfs(graph: &AdjacencyGraph) -> DfsTree {
    let n = graph.n();
    let root = graph.root();
    let mut tree = DfsTree::new(root);
    // Stack of (vertex, discoverer); duplicates are skipped at pop time, which
    // reproduces the recursive visit order exactly.
    let mut stack: Vec<(VertexId, VertexId)> = Vec::with_capacity(n + 1);
    for v in (0..n as VertexId).rev() {
        stack.push((v, root));
    }
    while let Some((v, parent)) = stack.pop() {
        if tree.contains(v) {
            continue;
        }
        tree.add_child(parent, v)
            .expect("oracle insertion follows discovery order");
        for &w in graph.neighbors(v).iter().rev() {
            if !tree.contains(w) {
                stack.push((w, v));
            }
        }
    }
    tree
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphError;

    fn edges(pairs: &[(VertexId, VertexId)]) -> Vec<Edge> {
        pairs
            .iter()
            .map(|&(u, v)| Edge::new(u, v).expect("test edges are loop-free"))
            .collect()
    }

    #[test]
    fn triangle_with_back_edge_is_valid() {
        // Tree r=3 -> 0 -> 1 -> 2; non-tree edge (0, 2) is a back edge.
        let g = AdjacencyGraph::from_edges(3, &edges(&[(0, 1), (1, 2), (0, 2)]));
        let mut t = DfsTree::new(3);
        t.add_child(3, 0).unwrap();
        t.add_child(0, 1).unwrap();
        t.add_child(1, 2).unwrap();
        let report = check_dfs(&g, &t);
        assert!(report.is_spanning, "tree covers r and all of 0..3");
        assert!(report.is_dfs, "the chord of a triangle path is a back edge");
        assert_eq!(report.offending_edge, None);
        assert!(report.is_valid());
    }

    #[test]
    fn four_cycle_star_tree_has_offending_chord() {
        // 4-cycle a-b-c-d-a with a=0, b=1, c=2, d=3 and tree edges
        // a->b, a->d, b->c: edge (c, d) connects two different branches.
        let g = AdjacencyGraph::from_edges(4, &edges(&[(0, 1), (1, 2), (2, 3), (3, 0)]));
        let mut t = DfsTree::new(4);
        t.add_child(4, 0).unwrap();
        t.add_child(0, 1).unwrap();
        t.add_child(0, 3).unwrap();
        t.add_child(1, 2).unwrap();
        let report = check_dfs(&g, &t);
        assert!(report.is_spanning);
        assert!(!report.is_dfs);
        assert_eq!(report.offending_edge, Some(Edge { u: 2, v: 3 }));
        assert!(!report.is_valid());
    }

    #[test]
    fn missing_vertex_fails_spanning() {
        let g = AdjacencyGraph::from_edges(3, &edges(&[(0, 1)]));
        let mut t = DfsTree::new(3);
        t.add_child(3, 0).unwrap();
        t.add_child(0, 1).unwrap();
        // vertex 2 missing
        let report = check_dfs(&g, &t);
        assert!(!report.is_spanning);
        assert!(report.is_dfs, "present edges are all fine");
        assert!(!report.is_valid());
    }

    #[test]
    fn tree_rooted_elsewhere_fails_spanning() {
        let g = AdjacencyGraph::from_edges(2, &edges(&[(0, 1)]));
        let mut t = DfsTree::new(0);
        t.add_child(0, 1).unwrap();
        let report = check_dfs(&g, &t);
        assert!(!report.is_spanning, "root must be the artificial vertex 2");
    }

    #[test]
    fn oracle_on_chain_returns_chain() {
        let g = AdjacencyGraph::from_edges(4, &edges(&[(0, 1), (1, 2), (2, 3)]));
        let t = oracle_dfs(&g);
        assert_eq!(t.root(), 4);
        assert_eq!(t.len(), 5);
        assert_eq!(t.parent_of(0), Ok(Some(4)));
        assert_eq!(t.parent_of(1), Ok(Some(0)));
        assert_eq!(t.parent_of(2), Ok(Some(1)));
        assert_eq!(t.parent_of(3), Ok(Some(2)));
        assert_eq!(t.height(), 4);
    }

    #[test]
    fn oracle_on_complete_graph_returns_deep_path() {
        // K4: recursive DFS from r dives 0 -> 1 -> 2 -> 3.
        let g = AdjacencyGraph::from_edges(
            4,
            &edges(&[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]),
        );
        let t = oracle_dfs(&g);
        assert_eq!(t.parent_of(1), Ok(Some(0)));
        assert_eq!(t.parent_of(2), Ok(Some(1)));
        assert_eq!(t.parent_of(3), Ok(Some(2)));
        assert_eq!(t.height(), 4, "path through all of K4 plus the root edge");
    }

    #[test]
    fn oracle_output_passes_checker() {
        // A few fixed small graphs; the oracle must be self-consistent.
        let cases: Vec<(usize, Vec<(VertexId, VertexId)>)> = vec![
            (1, vec![]),
            (4, vec![(0, 1), (1, 2), (2, 3), (3, 0)]),
            (5, vec![(0, 1), (0, 2), (0, 3), (0, 4), (1, 2)]),
            (6, vec![(0, 1), (2, 3), (4, 5)]),
        ];
        for (n, pairs) in cases {
            let g = AdjacencyGraph::from_edges(n, &edges(&pairs));
            let t = oracle_dfs(&g);
            let report = check_dfs(&g, &t);
            assert!(
                report.is_valid(),
                "oracle tree must validate for n={n}, edges={pairs:?}"
            );
        }
    }

    #[test]
    fn oracle_spans_isolated_vertices() {
        let g = AdjacencyGraph::from_edges(3, &[]);
        let t = oracle_dfs(&g);
        assert_eq!(t.len(), 4);
        for v in 0..3 {
            assert_eq!(t.parent_of(v), Ok(Some(3)), "isolated {v} hangs off r");
            assert_eq!(t.level_of(v), Ok(1));
        }
    }

    #[test]
    fn checker_error_type_for_foreign_vertex_lookup() {
        // Sanity: level_of on absent vertex keeps the documented error.
        let t = DfsTree::new(1);
        assert_eq!(t.level_of(0), Err(GraphError::VertexNotInTree(0)));
    }
}
