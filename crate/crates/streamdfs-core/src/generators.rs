//! Seeded graph generators: uniform `G(n, m)` and power-law graphs.
//!
//! Both generators are deterministic in their seed, emit simple graphs (no
//! self-loops, no duplicate edges), and emit exactly `m` edges in a seeded
//! random stream order.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{Edge, VertexId};

/// Errors produced by the generators.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenError {
    /// More edges requested than a simple graph on `n` vertices can hold.
    #[error("m = {m} exceeds the maximum {max} simple edges on n = {n} vertices")]
    TooManyEdges {
        /// Requested edge count.
        m: usize,
        /// Requested vertex count.
        n: usize,
        /// `n * (n - 1) / 2`.
        max: u64,
    },
    /// Too few edges for a connected power-law graph.
    #[error("power-law generation needs m >= n - 1 (got m = {m}, n = {n})")]
    TooFewEdges {
        /// Requested edge count.
        m: usize,
        /// Requested vertex count.
        n: usize,
    },
    /// Unsupported power-law exponent.
    #[error("unsupported power-law exponent {0}; only 3.0 is calibrated")]
    UnsupportedExponent(f64),
}

/// Which random graph model to draw from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenModel {
    /// Uniform simple graph with exactly `m` edges.
    ErdosRenyiGnm,
    /// Preferential-attachment graph with a degree-distribution tail
    /// exponent of about 3.
    PowerLaw,
}

/// A reproducible generation request.
#[derive(Debug, Clone)]
pub struct GenSpec {
    /// Model to sample from.
    pub model: GenModel,
    /// Number of vertices.
    pub n: usize,
    /// Number of edges.
    pub m: usize,
    /// Target degree-tail exponent (power-law only, default 3).
    pub exponent: f64,
    /// RNG seed.
    pub seed: u64,
}

impl GenSpec {
    /// A `G(n, m)` request.
    #[must_use]
    pub fn gnm(n: usize, m: usize, seed: u64) -> Self {
        Self {
            model: GenModel::ErdosRenyiGnm,
            n,
            m,
            exponent: 3.0,
            seed,
        }
    }

    /// A power-law request with the default exponent 3.
    #[must_use]
    pub fn powerlaw(n: usize, m: usize, seed: u64) -> Self {
        Self {
            model: GenModel::PowerLaw,
            n,
            m,
            exponent: 3.0,
            seed,
        }
    }
}

/// Draws the edge list described by `spec`.
///
/// # Errors
///
/// Propagates the model-specific errors of [`gen_gnm`] and [`gen_powerlaw`].
pub fn generate(spec: &GenSpec) -> Result<Vec<Edge>, GenError> {
    match spec.model {
        GenModel::ErdosRenyiGnm => gen_gnm(spec.n, spec.m, spec.seed),
        GenModel::PowerLaw => gen_powerlaw(spec.n, spec.m, spec.exponent, spec.seed),
    }
}

fn max_edges(n: usize) -> u64 {
    let n = n as u64;
    n * n.saturating_sub(1) / 2
}

/// Uniform random simple graph with exactly `m` distinct edges on `n`
/// vertices, in seeded random stream order.
///
/// Sampling uses Floyd's algorithm over the `n(n-1)/2` pair indices (exactly
/// `m` RNG draws, no rejection), followed by a Fisher-Yates shuffle of the
/// edge order.
///
/// # Errors
///
/// Returns [`GenError::TooManyEdges`] when `m > n(n-1)/2`.
pub fn gen_gnm(n: usize, m: usize, seed: u64) -> Result<Vec<Edge>, GenError> {
    let max = max_edges(n);
    if m as u64 > max {
        return Err(GenError::TooManyEdges { m, n, max });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen = std::collections::HashSet::with_capacity(m);
    let mut edges = Vec::with_capacity(m);
    // Floyd: for j in (max-m)..max, pick t in [0, j]; insert t, else j.
    for j in (max - m as u64)..max {
        let t = rng.gen_range(0..=j);
        let idx = if chosen.insert(t) { t } else { j };
        if idx != t {
            chosen.insert(idx);
        }
        edges.push(decode_pair(idx));
    }
    edges.shuffle(&mut rng);
    Ok(edges)
}

/// Decodes pair index `idx` in `[0, n(n-1)/2)` to the edge `(u, v)` with
/// `u < v`, where index = `v(v-1)/2 + u`.
fn decode_pair(idx: u64) -> Edge {
    // v = floor((1 + sqrt(1 + 8 idx)) / 2), adjusted for float error.
    let mut v = ((1.0 + ((1 + 8 * idx) as f64).sqrt()) / 2.0).floor() as u64;
    while v * (v - 1) / 2 > idx {
        v -= 1;
    }
    while (v + 1) * v / 2 <= idx {
        v += 1;
    }
    let u = idx - v * (v - 1) / 2;
    Edge {
        u: u as VertexId,
        v: v as VertexId,
    }
}

/// Power-law graph via linear preferential attachment; the edge list (and
/// hence the stream order) is the attachment order.
///
/// Construction: vertices `1..n` join one at a time, each attaching to an
/// existing vertex drawn proportionally to current degree (an endpoint-stub
/// list makes the draw O(1)); the remaining `m - (n - 1)` edges draw both
/// endpoints degree-proportionally, rejecting loops and duplicates with a
/// deterministic lexicographic fallback. Linear attachment yields a degree
/// tail exponent of about 3 — the only calibrated value of `exponent`.
///
/// # Errors
///
/// Returns [`GenError::TooFewEdges`] when `m < n - 1`,
/// [`GenError::TooManyEdges`] when `m > n(n-1)/2`, and
/// [`GenError::UnsupportedExponent`] for exponents other than 3.
pub fn gen_powerlaw(n: usize, m: usize, exponent: f64, seed: u64) -> Result<Vec<Edge>, GenError> {
    if (exponent - 3.0).abs() > 1e-9 {
        return Err(GenError::UnsupportedExponent(exponent));
    }
    let max = max_edges(n);
    if m as u64 > max {
        return Err(GenError::TooManyEdges { m, n, max });
    }
    if n > 0 && m + 1 < n {
        return Err(GenError::TooFewEdges { m, n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<Edge> = Vec::with_capacity(m);
    let mut present = std::collections::HashSet::with_capacity(m);
    // Every edge pushes both endpoints here; uniform draws from this list are
    // degree-proportional draws.
    let mut stubs: Vec<VertexId> = Vec::with_capacity(2 * m);
    let add_edge = |edges: &mut Vec<Edge>,
                    stubs: &mut Vec<VertexId>,
                    present: &mut std::collections::HashSet<(VertexId, VertexId)>,
                    e: Edge| {
        present.insert(e.normalized());
        stubs.push(e.u);
        stubs.push(e.v);
        edges.push(e);
    };

    // Spanning phase: vertex v attaches to a degree-proportional target among
    // 0..v (vertex 1 has only vertex 0 to pick).
    for v in 1..n as VertexId {
        let target = if stubs.is_empty() {
            0
        } else {
            // Draw until the stub is a vertex below v (all stubs are, since
            // only vertices 0..v have edges so far).
            stubs[rng.gen_range(0..stubs.len())]
        };
        add_edge(&mut edges, &mut stubs, &mut present, Edge { u: target, v });
    }

    // Densification phase: remaining edges, both endpoints preferential.
    let extra = m.saturating_sub(n.saturating_sub(1));
    for _ in 0..extra {
        let mut placed = false;
        for _ in 0..200 {
            let a = stubs[rng.gen_range(0..stubs.len())];
            let b = stubs[rng.gen_range(0..stubs.len())];
            if a == b {
                continue;
            }
            let e = Edge { u: a, v: b };
            if present.contains(&e.normalized()) {
                continue;
            }
            add_edge(&mut edges, &mut stubs, &mut present, e);
            placed = true;
            break;
        }
        if !placed {
            // Deterministic fallback: first missing pair in lexicographic
            // order. Guaranteed to exist because m <= n(n-1)/2.
            'outer: for u in 0..n as VertexId {
                for v in (u + 1)..n as VertexId {
                    if !present.contains(&(u, v)) {
                        add_edge(&mut edges, &mut stubs, &mut present, Edge { u, v });
                        break 'outer;
                    }
                }
            }
        }
    }

    Ok(edges)
}
