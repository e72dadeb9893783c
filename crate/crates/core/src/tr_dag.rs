//! Combinatorial fully dynamic transitive reduction for DAGs.
//!
//! Every vertex `z` owns a [`DecReach`] over its snapshot `G^z`. An edge
//! `xy` is redundant iff
//!
//! 1. some `z ∉ {x, y}` has `xy ∈ G^z`, `x ∈ Anc(z)` and `y ∈ Desc(z)`, or
//! 2. `y` has an in-neighbor in `Desc(x) \ {x}` within `G^x`, or
//! 3. `x` has an out-neighbor in `Anc(y) \ {y}` within `G^y`.
//!
//! `count` tallies the roots of the first kind; the two touch units record
//! the other two witnesses.

use crate::decreach::DecReach;
use crate::engine::Engine;
use crate::error::{Error, Result};
use crate::graph::{Direction, Edge, EdgeId, Mode, Timestamp, TimestampedGraph, Vertex};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EdgeLedger {
    pub count: u32,
    /// `[x-side, y-side]` witnesses.
    pub touch: [bool; 2],
}

impl EdgeLedger {
    pub fn touch_value(&self) -> u32 {
        self.touch.iter().filter(|&&t| t).count() as u32
    }

    pub fn in_reduction(&self) -> bool {
        self.count == 0 && self.touch_value() == 0
    }
}

#[derive(Clone, Debug)]
pub struct DagEngine {
    g: TimestampedGraph,
    roots: Vec<Option<DecReach>>,
    ledger: Vec<EdgeLedger>,
    ops: u64,
}

impl DagEngine {
    pub fn new(n: usize) -> Self {
        DagEngine {
            g: TimestampedGraph::new(n, Mode::Dag),
            roots: vec![None; n + 1],
            ledger: Vec::new(),
            ops: 0,
        }
    }

    pub fn graph(&self) -> &TimestampedGraph {
        &self.g
    }

    pub fn root_state(&self, v: Vertex) -> Option<&DecReach> {
        self.roots.get(v as usize).and_then(Option::as_ref)
    }

    pub fn ledger(&self, e: Edge) -> Option<EdgeLedger> {
        self.g.edge_id(e).map(|id| self.ledger[id.index()])
    }

    fn ledger_mut(&mut self, id: EdgeId) -> &mut EdgeLedger {
        &mut self.ledger[id.index()]
    }

    fn in_query(&self, root: Vertex, y: Vertex) -> bool {
        self.root_state(root).is_some_and(|s| s.in_query(&self.g, y))
    }

    fn out_query(&self, root: Vertex, x: Vertex) -> bool {
        self.root_state(root).is_some_and(|s| s.out_query(&self.g, x))
    }

    pub fn insert_centered(&mut self, u: Vertex, edges: &[Edge]) -> Result<()> {
        let old_thr = self.g.center_ts(u);
        self.g.insert_centered(u, edges)?;
        self.ledger.resize(self.g.slot_capacity(), EdgeLedger::default());
        for &e in edges {
            let id = self.g.edge_id(e).expect("just inserted");
            *self.ledger_mut(id) = EdgeLedger::default();
        }
        let fresh = DecReach::new(&self.g, u)?;
        self.ops += fresh.ops();
        let old = self.roots[u as usize].replace(fresh);
        let state = self.roots[u as usize].as_ref().expect("just stored");

        // Contribution of `u` to the counters. Edges already in the old
        // snapshot may have been counted; new ones never were.
        let mut bumps = Vec::new();
        for id in self.g.live_ids() {
            self.ops += 1;
            let e = self.g.edge(id);
            if e.touches(u) || !(state.in_anc(e.tail) && state.in_desc(e.head)) {
                continue;
            }
            let before = self.g.ts(id) <= old_thr
                && old
                    .as_ref()
                    .is_some_and(|o| o.in_anc(e.tail) && o.in_desc(e.head));
            if !before {
                bumps.push(id);
            }
        }
        for id in bumps {
            self.ledger_mut(id).count += 1;
        }

        // Witness units whose root is `u`.
        let thr = Timestamp::MAX;
        let outs: Vec<EdgeId> = self.g.adjacency(u, Direction::Out, thr).collect();
        let ins: Vec<EdgeId> = self.g.adjacency(u, Direction::In, thr).collect();
        for id in outs {
            self.ops += 1;
            let y = self.g.edge(id).head;
            self.ledger[id.index()].touch[0] = self.in_query(u, y);
        }
        for id in ins {
            self.ops += 1;
            let x = self.g.edge(id).tail;
            self.ledger[id.index()].touch[1] = self.out_query(u, x);
        }
        // New edges also need the unit owned by their other endpoint.
        for &e in edges {
            let id = self.g.edge_id(e).expect("just inserted");
            if e.tail == u {
                self.ledger[id.index()].touch[1] = self.out_query(e.head, e.tail);
            } else {
                self.ledger[id.index()].touch[0] = self.in_query(e.tail, e.head);
            }
        }
        Ok(())
    }

    pub fn delete_edges(&mut self, edges: &[Edge]) -> Result<()> {
        let ids = self.g.begin_delete(edges)?;
        let Some(min_ts) = ids.iter().map(|&id| self.g.ts(id)).min() else {
            return Ok(());
        };
        let DagEngine { g, roots, ledger, ops } = self;
        for state in roots.iter_mut().flatten() {
            let z = state.root();
            let thr = state.threshold();
            if thr < min_ts {
                continue;
            }
            let before = state.ops();
            state.delete(g, &ids);
            *ops += state.ops() - before;

            // Cancel `z` for every pair that lost its x -> z -> y path. The
            // three cases (x ∈ A, y ∈ Desc), (x ∈ A, y ∈ D), (x ∈ Anc, y ∈ D)
            // are disjoint.
            for &x in state.a_delta() {
                for id in g.adjacency(x, Direction::Out, thr) {
                    *ops += 1;
                    let y = g.edge(id).head;
                    if y != z && (state.in_desc(y) || state.in_d_delta(y)) {
                        decrement(&mut ledger[id.index()]);
                    }
                }
            }
            for &y in state.d_delta() {
                for id in g.adjacency(y, Direction::In, thr) {
                    *ops += 1;
                    let x = g.edge(id).tail;
                    if x != z && state.in_anc(x) {
                        decrement(&mut ledger[id.index()]);
                    }
                }
            }

            for &y in state.in_changed() {
                *ops += 1;
                if let Some(id) = g.edge_id(Edge::new(z, y)) {
                    ledger[id.index()].touch[0] = state.in_query(g, y);
                }
            }
            for &x in state.out_changed() {
                *ops += 1;
                if let Some(id) = g.edge_id(Edge::new(x, z)) {
                    ledger[id.index()].touch[1] = state.out_query(g, x);
                }
            }
        }
        g.finish_delete(&ids);
        for id in ids {
            ledger[id.index()] = EdgeLedger::default();
        }
        Ok(())
    }

    pub fn is_redundant(&self, x: Vertex, y: Vertex) -> Result<bool> {
        let e = Edge::new(x, y);
        self.ledger(e)
            .map(|l| !l.in_reduction())
            .ok_or(Error::MissingEdge(e))
    }

    pub fn tr_edges(&self) -> Vec<Edge> {
        let mut out: Vec<Edge> = self
            .g
            .live_ids()
            .filter(|id| self.ledger[id.index()].in_reduction())
            .map(|id| self.g.edge(id))
            .collect();
        out.sort_unstable();
        out
    }

    /// Elementary steps spent so far, across all roots.
    pub fn elementary_ops(&self) -> u64 {
        self.ops
    }
}

fn decrement(l: &mut EdgeLedger) {
    debug_assert!(l.count > 0, "counter underflow");
    l.count = l.count.saturating_sub(1);
}

impl Engine for DagEngine {
    fn name(&self) -> &'static str {
        "comb"
    }

    fn graph(&self) -> &TimestampedGraph {
        &self.g
    }

    fn insert_centered(&mut self, center: Vertex, edges: &[Edge]) -> Result<()> {
        DagEngine::insert_centered(self, center, edges)
    }

    fn delete_edges(&mut self, edges: &[Edge]) -> Result<()> {
        DagEngine::delete_edges(self, edges)
    }

    fn tr_edges(&self) -> Vec<Edge> {
        DagEngine::tr_edges(self)
    }

    fn elementary_ops(&self) -> u64 {
        self.ops
    }
}
