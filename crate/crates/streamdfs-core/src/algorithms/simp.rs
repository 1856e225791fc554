//! `Simp`: the one-extension-per-pass baseline.
//!
//! Each pass scans the stream once, remembering at most one candidate edge per
//! unvisited vertex: a *ready* placement under a visited vertex (preferring
//! the deepest such neighbour, ties by stream order) or, failing that, a
//! *speculative* placement under another unvisited vertex. At the end of the
//! pass the vertex with the deepest ready placement is appended — or, when no
//! vertex touches the visited tree, the smallest unvisited id starts a new
//! branch under the artificial root — and the new branch is then extended
//! downward along consistent speculative placements (the path heuristic).
//!
//! Correctness rests on the boundary-chain property: the visited neighbours
//! of an unvisited component always lie on one root-to-leaf path, so hanging
//! a vertex below the deepest of them keeps every decided edge a back edge.
//! Ready placements are therefore never overwritten by speculative ones.

use crate::budget::BudgetLedger;
use crate::graph::{DfsTree, VertexId};
use crate::stream::EdgeStream;

use super::{ensure_pass_cap, AlgoError};

/// Best placement recorded for an unvisited vertex during one pass. Each
/// holds exactly one stored edge (the recording edge).
#[derive(Debug, Clone, Copy)]
enum Slot {
    /// Hanging under a visited vertex: usable as this pass's anchor.
    Ready {
        /// The visited prospective parent.
        hint: VertexId,
        /// Level the vertex would get (`level(hint) + 1`).
        lvl: u32,
        /// Stream position of the recording edge; earlier wins ties.
        seq: u64,
    },
    /// Hanging under another unvisited vertex: usable only to extend the
    /// branch appended this pass.
    Spec {
        /// The unvisited prospective parent.
        hint: VertexId,
        /// Level the vertex would get if the hint lands at its own
        /// speculated level.
        lvl: u32,
        /// Stream position of the recording edge; earlier wins ties.
        seq: u64,
    },
}

impl Slot {
    fn lvl(&self) -> u32 {
        match self {
            Slot::Ready { lvl, .. } | Slot::Spec { lvl, .. } => *lvl,
        }
    }
}

/// Level the vertex is currently speculated to reach (1 = under the root).
fn potential(slots: &[Option<Slot>], v: VertexId) -> u32 {
    slots[v as usize].map_or(1, |s| s.lvl())
}

/// Records a ready placement: replaces an empty or shallower slot and always
/// supersedes a speculative one. Charges the ledger on `None -> Some`.
fn offer_ready(
    slots: &mut [Option<Slot>],
    ledger: &mut BudgetLedger,
    v: VertexId,
    hint: VertexId,
    lvl: u32,
    seq: u64,
) -> Result<(), AlgoError> {
    let slot = &mut slots[v as usize];
    match slot {
        None => {
            ledger.charge(1)?;
            *slot = Some(Slot::Ready { hint, lvl, seq });
        }
        Some(Slot::Ready { lvl: old, .. }) => {
            if lvl > *old {
                *slot = Some(Slot::Ready { hint, lvl, seq });
            }
        }
        Some(Slot::Spec { .. }) => {
            // Ready knowledge is never lost to speculation: swap in place.
            *slot = Some(Slot::Ready { hint, lvl, seq });
        }
    }
    Ok(())
}

/// Records a speculative placement if it strictly improves the vertex's
/// potential; never displaces a ready placement. Returns whether it applied.
fn offer_spec(
    slots: &mut [Option<Slot>],
    ledger: &mut BudgetLedger,
    v: VertexId,
    hint: VertexId,
    lvl: u32,
    seq: u64,
) -> Result<bool, AlgoError> {
    let slot = &mut slots[v as usize];
    match slot {
        None => {
            ledger.charge(1)?;
            *slot = Some(Slot::Spec { hint, lvl, seq });
            Ok(true)
        }
        Some(Slot::Ready { .. }) => Ok(false),
        Some(existing @ Slot::Spec { .. }) => {
            if lvl > existing.lvl() {
                *slot = Some(Slot::Spec { hint, lvl, seq });
                Ok(true)
            } else {
                Ok(false)
            }
        }
    }
}

pub(super) fn run(
    stream: &mut EdgeStream,
    ledger: &mut BudgetLedger,
) -> Result<DfsTree, AlgoError> {
    let n = stream.n();
    let root = n as VertexId;
    let mut output = DfsTree::new(root);
    let mut passes = 0u32;

    while output.len() < n + 1 {
        ensure_pass_cap(n, passes)?;
        passes += 1;
        stream.rewind();

        let mut slots: Vec<Option<Slot>> = vec![None; n];
        let mut seq = 0u64;
        while let Some(e) = stream.next_edge()? {
            let s = seq;
            seq += 1;
            match (output.contains(e.u), output.contains(e.v)) {
                (true, true) => {}
                (true, false) => {
                    let lvl = output.level_of(e.u)? + 1;
                    offer_ready(&mut slots, ledger, e.v, e.u, lvl, s)?;
                }
                (false, true) => {
                    let lvl = output.level_of(e.v)? + 1;
                    offer_ready(&mut slots, ledger, e.u, e.v, lvl, s)?;
                }
                (false, false) => {
                    let gain_v = potential(&slots, e.u) + 1;
                    let gain_u = potential(&slots, e.v) + 1;
                    // Prefer the deeper speculation; ties favour the second
                    // endpoint. When the preferred side does not improve,
                    // try the other.
                    if gain_v >= gain_u {
                        if gain_v > potential(&slots, e.v) {
                            if !offer_spec(&mut slots, ledger, e.v, e.u, gain_v, s)?
                                && gain_u > potential(&slots, e.u)
                            {
                                offer_spec(&mut slots, ledger, e.u, e.v, gain_u, s)?;
                            }
                        } else if gain_u > potential(&slots, e.u) {
                            offer_spec(&mut slots, ledger, e.u, e.v, gain_u, s)?;
                        }
                    } else if gain_u > potential(&slots, e.u) {
                        if !offer_spec(&mut slots, ledger, e.u, e.v, gain_u, s)?
                            && gain_v > potential(&slots, e.v)
                        {
                            offer_spec(&mut slots, ledger, e.v, e.u, gain_v, s)?;
                        }
                    } else if gain_v > potential(&slots, e.v) {
                        offer_spec(&mut slots, ledger, e.v, e.u, gain_v, s)?;
                    }
                }
            }
        }

        // Anchor selection: deepest ready placement; ties by earliest
        // recording edge, then smallest id (ascending scan keeps the first).
        let mut best: Option<(u32, u64, VertexId, VertexId)> = None;
        let mut fallback: Option<VertexId> = None;
        for v in 0..n as VertexId {
            if output.contains(v) {
                continue;
            }
            if fallback.is_none() {
                fallback = Some(v);
            }
            if let Some(Slot::Ready { hint, lvl, seq }) = slots[v as usize] {
                let better = match &best {
                    None => true,
                    Some((bl, bs, _, _)) => lvl > *bl || (lvl == *bl && seq < *bs),
                };
                if better {
                    best = Some((lvl, seq, v, hint));
                }
            }
        }
        let (v1, parent) = match best {
            Some((_, _, v, hint)) => (v, hint),
            // No unvisited vertex touches the tree: the visited set is a
            // union of whole components, so a fresh branch at the root is
            // safe. Smallest id keeps it deterministic.
            None => (
                fallback.expect("loop runs only while unvisited vertices remain"),
                root,
            ),
        };
        output.add_child(parent, v1)?;

        // Path heuristic: extend downward while some speculative placement
        // hangs off the current tail at the consistent level.
        let mut tail = v1;
        loop {
            let want = output.level_of(tail)? + 1;
            let mut next: Option<(u64, VertexId)> = None;
            for u in 0..n as VertexId {
                if output.contains(u) {
                    continue;
                }
                if let Some(Slot::Spec { hint, lvl, seq }) = slots[u as usize] {
                    if hint == tail && lvl == want && next.map_or(true, |(ns, _)| seq < ns) {
                        next = Some((seq, u));
                    }
                }
            }
            match next {
                Some((_, u)) => {
                    output.add_child(tail, u)?;
                    tail = u;
                }
                None => break,
            }
        }

        let held = slots.iter().filter(|s| s.is_some()).count();
        ledger.release(held)?;
    }
    Ok(output)
}
