//! Combinatorial fully dynamic transitive reduction for general digraphs.
//!
//! Inside each SCC of `G` the reduction is a minimal strongly connected
//! spanning subgraph. Between SCCs, edges are bucketed into parallel groups
//! and each edge carries a ledger summed over all snapshots `G^z`:
//!
//! * `count` gets one from `z` when `xy ∈ G^z`, `x ∈ Anc(z) \ Z` and
//!   `y ∈ Desc(z) \ Z`, where `Z` is the component of `z`;
//! * `touch` gets one from `z` when `x ∈ Z` and `In_z(y)`, and one more when
//!   `y ∈ Z` and `Out_z(x)`.
//!
//! A group has an indirect route (and contributes nothing) iff every member
//! has a nonzero ledger. Otherwise its oldest clean member is kept.

use crate::engine::Engine;
use crate::error::{Error, Result};
use crate::graph::{Direction, Edge, EdgeId, Mode, Timestamp, TimestampedGraph, Vertex};
use crate::scc::{ParallelGroup, RootView, SccSnapshots};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GeneralLedger {
    pub count: u32,
    pub touch: u32,
}

impl GeneralLedger {
    pub fn is_clean(&self) -> bool {
        self.count == 0 && self.touch == 0
    }
}

/// The ledger share of one snapshot for edge `id`.
pub fn contribution(g: &TimestampedGraph, view: &RootView, id: EdgeId) -> GeneralLedger {
    let Edge { tail: x, head: y } = g.edge(id);
    let count = g.ts(id) <= view.threshold()
        && view.in_anc(x)
        && !view.in_desc(x)
        && view.in_desc(y)
        && !view.in_anc(y);
    let touch = (view.in_root_scc(x) && view.in_query(y)) as u32
        + (view.in_root_scc(y) && view.out_query(x)) as u32;
    GeneralLedger { count: count as u32, touch }
}

/// Greedily drops edges (in the given order) while the subgraph on
/// `vertices` stays strongly connected. The result is inclusion-minimal.
pub fn minimal_scss(vertices: &[Vertex], edges: &[Edge]) -> Result<Vec<Edge>> {
    let mut keep = vec![true; edges.len()];
    if !strongly_connected(vertices, edges, &keep) {
        return Err(Error::NotStronglyConnected);
    }
    for i in 0..edges.len() {
        keep[i] = false;
        if !strongly_connected(vertices, edges, &keep) {
            keep[i] = true;
        }
    }
    Ok(edges
        .iter()
        .zip(keep)
        .filter(|&(_, k)| k)
        .map(|(&e, _)| e)
        .collect())
}

fn strongly_connected(vertices: &[Vertex], edges: &[Edge], keep: &[bool]) -> bool {
    let Some(&start) = vertices.first() else {
        return true;
    };
    let local = |v: Vertex| vertices.iter().position(|&u| u == v);
    let k = vertices.len();
    let mut fwd = vec![Vec::new(); k];
    let mut bwd = vec![Vec::new(); k];
    for (e, _) in edges.iter().zip(keep).filter(|&(_, &k)| k) {
        let (Some(a), Some(b)) = (local(e.tail), local(e.head)) else {
            continue;
        };
        fwd[a].push(b);
        bwd[b].push(a);
    }
    let s = local(start).expect("start is a vertex");
    [fwd, bwd].iter().all(|adj| {
        let mut seen = vec![false; k];
        seen[s] = true;
        let mut stack = vec![s];
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == k
    })
}

#[derive(Clone, Debug)]
pub struct GeneralEngine {
    g: TimestampedGraph,
    scc: SccSnapshots,
    ledger: Vec<GeneralLedger>,
    stamp: Vec<u64>,
    generation: u64,
    tr: Vec<Edge>,
    ops: u64,
}

impl GeneralEngine {
    pub fn new(n: usize) -> Self {
        GeneralEngine {
            g: TimestampedGraph::new(n, Mode::General),
            scc: SccSnapshots::new(n),
            ledger: Vec::new(),
            stamp: Vec::new(),
            generation: 0,
            tr: Vec::new(),
            ops: 0,
        }
    }

    pub fn graph(&self) -> &TimestampedGraph {
        &self.g
    }

    pub fn snapshots(&self) -> &SccSnapshots {
        &self.scc
    }

    pub fn ledger(&self, e: Edge) -> Option<GeneralLedger> {
        self.g.edge_id(e).map(|id| self.ledger[id.index()])
    }

    fn grow(&mut self) {
        let cap = self.g.slot_capacity();
        self.ledger.resize(cap, GeneralLedger::default());
        self.stamp.resize(cap, 0);
    }

    fn apply(&mut self, id: EdgeId, old: GeneralLedger, new: GeneralLedger) {
        let l = &mut self.ledger[id.index()];
        debug_assert!(l.count >= old.count && l.touch >= old.touch, "ledger underflow");
        l.count = l.count - old.count + new.count;
        l.touch = l.touch - old.touch + new.touch;
    }

    pub fn insert_centered(&mut self, u: Vertex, edges: &[Edge]) -> Result<()> {
        self.g.insert_centered(u, edges)?;
        self.grow();
        let fresh: Vec<EdgeId> = edges
            .iter()
            .map(|&e| self.g.edge_id(e).expect("just inserted"))
            .collect();
        self.generation += 1;
        for &id in &fresh {
            self.ledger[id.index()] = GeneralLedger::default();
            self.stamp[id.index()] = self.generation;
        }
        let old = self.scc.rebuild(&self.g, u);
        self.ops += (self.g.n() + self.g.m()) as u64;

        let new = self.scc.view(u).expect("just rebuilt").clone();
        let ids: Vec<EdgeId> = self.g.live_ids().collect();
        for id in ids {
            self.ops += 1;
            let is_new = self.stamp[id.index()] == self.generation;
            let before = match &old {
                Some(o) if !is_new => contribution(&self.g, o, id),
                _ => GeneralLedger::default(),
            };
            let after = contribution(&self.g, &new, id);
            self.apply(id, before, after);
        }
        // Older snapshots never hold the new edges, but their witness flags
        // can still touch them.
        for &id in &fresh {
            let mut add = GeneralLedger::default();
            for view in self.scc.views().filter(|v| v.root() != u) {
                self.ops += 1;
                let c = contribution(&self.g, view, id);
                add.count += c.count;
                add.touch += c.touch;
            }
            let l = &mut self.ledger[id.index()];
            l.count += add.count;
            l.touch += add.touch;
        }
        self.assemble();
        Ok(())
    }

    pub fn delete_edges(&mut self, edges: &[Edge]) -> Result<()> {
        let removed = self.g.begin_delete(edges)?;
        let changes = self.scc.delete(&self.g, &removed);
        for (old, _) in &changes {
            self.ops += (self.g.n() + self.g.m()) as u64;
            let new = self.scc.view(old.root()).expect("still present").clone();
            self.generation += 1;
            for v in new.changed_vertices(old) {
                for dir in [Direction::Out, Direction::In] {
                    let ids: Vec<EdgeId> = self.g.adjacency(v, dir, Timestamp::MAX).collect();
                    for id in ids {
                        self.ops += 1;
                        if self.stamp[id.index()] == self.generation {
                            continue;
                        }
                        self.stamp[id.index()] = self.generation;
                        let before = contribution(&self.g, old, id);
                        let after = contribution(&self.g, &new, id);
                        self.apply(id, before, after);
                    }
                }
            }
        }
        self.g.finish_delete(&removed);
        for id in removed {
            self.ledger[id.index()] = GeneralLedger::default();
        }
        self.assemble();
        Ok(())
    }

    /// `true` iff no member of the group survives into the reduction.
    pub fn group_redundant(&self, group: &ParallelGroup) -> bool {
        group
            .members
            .iter()
            .all(|&e| !self.ledger(e).expect("live member").is_clean())
    }

    /// Every parallel group (members in timestamp order) with its verdict.
    pub fn group_classification(&self) -> Vec<(Vec<Edge>, bool)> {
        self.scc
            .groups()
            .map(|grp| (grp.members.clone(), self.group_redundant(grp)))
            .collect()
    }

    fn assemble(&mut self) {
        let n = self.g.n();
        let mut members: Vec<Vec<Vertex>> = vec![Vec::new(); n + 1];
        for v in self.g.vertices() {
            members[self.scc.scc_of(v) as usize].push(v);
        }
        let mut intra: Vec<Vec<Edge>> = vec![Vec::new(); n + 1];
        for (e, _) in self.g.edges_with_ts() {
            let c = self.scc.scc_of(e.tail);
            if c == self.scc.scc_of(e.head) {
                intra[c as usize].push(e);
            }
        }
        let mut tr = Vec::new();
        for c in 1..=n {
            if members[c].len() > 1 {
                self.ops += (intra[c].len() * (members[c].len() + intra[c].len())) as u64;
                tr.extend(minimal_scss(&members[c], &intra[c]).expect("component is strongly connected"));
            }
        }
        for group in self.scc.groups() {
            self.ops += group.size() as u64;
            let clean = group
                .members
                .iter()
                .find(|&&e| self.ledger[self.g.edge_id(e).expect("live").index()].is_clean());
            if let Some(&e) = clean {
                tr.push(e);
            }
        }
        tr.sort_unstable();
        self.tr = tr;
    }

    pub fn tr_edges(&self) -> Vec<Edge> {
        self.tr.clone()
    }

    pub fn elementary_ops(&self) -> u64 {
        self.ops
    }
}

impl Engine for GeneralEngine {
    fn name(&self) -> &'static str {
        "comb"
    }

    fn graph(&self) -> &TimestampedGraph {
        &self.g
    }

    fn insert_centered(&mut self, center: Vertex, edges: &[Edge]) -> Result<()> {
        GeneralEngine::insert_centered(self, center, edges)
    }

    fn delete_edges(&mut self, edges: &[Edge]) -> Result<()> {
        GeneralEngine::delete_edges(self, edges)
    }

    fn tr_edges(&self) -> Vec<Edge> {
        self.tr.clone()
    }

    fn elementary_ops(&self) -> u64 {
        self.ops
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(t: Vertex, h: Vertex) -> Edge {
        Edge::new(t, h)
    }

    fn two_cycles() -> GeneralEngine {
        let mut eng = GeneralEngine::new(5);
        eng.insert_centered(1, &[e(1, 2), e(2, 1)]).unwrap();
        eng.insert_centered(3, &[e(3, 4), e(4, 3)]).unwrap();
        eng.insert_centered(1, &[e(1, 3)]).unwrap();
        eng.insert_centered(2, &[e(2, 4)]).unwrap();
        eng
    }

    #[test]
    fn minimal_scss_examples() {
        let tri = [e(1, 2), e(2, 3), e(3, 1)];
        assert_eq!(minimal_scss(&[1, 2, 3], &tri).unwrap(), tri.to_vec());
        let chord = [e(1, 3), e(1, 2), e(2, 3), e(3, 1)];
        assert_eq!(minimal_scss(&[1, 2, 3], &chord).unwrap(), tri.to_vec());
        assert_eq!(minimal_scss(&[4], &[]).unwrap(), vec![]);
        assert_eq!(minimal_scss(&[1, 2], &[e(1, 2)]), Err(Error::NotStronglyConnected));
    }

    #[test]
    fn group_keeps_one_member() {
        let eng = two_cycles();
        assert_eq!(eng.tr_edges(), vec![e(1, 2), e(1, 3), e(2, 1), e(3, 4), e(4, 3)]);
    }

    #[test]
    fn middle_route_drops_the_group() {
        let mut eng = two_cycles();
        eng.insert_centered(5, &[e(1, 5), e(5, 3)]).unwrap();
        let tr = eng.tr_edges();
        assert!(!tr.contains(&e(1, 3)) && !tr.contains(&e(2, 4)));
        assert!(tr.contains(&e(1, 5)) && tr.contains(&e(5, 3)));
    }

    #[test]
    fn deleting_the_kept_member_promotes_the_other() {
        let mut eng = two_cycles();
        eng.delete_edges(&[e(1, 3)]).unwrap();
        assert_eq!(eng.tr_edges(), vec![e(1, 2), e(2, 1), e(2, 4), e(3, 4), e(4, 3)]);
    }

    #[test]
    fn splitting_a_component() {
        let mut eng = two_cycles();
        eng.delete_edges(&[e(2, 1)]).unwrap();
        // A = {1,2} fell apart and 1 -> 2 -> 4 now shortcuts (1,3).
        assert_eq!(eng.tr_edges(), vec![e(1, 2), e(2, 4), e(3, 4), e(4, 3)]);
        let all = eng.graph().edges();
        eng.delete_edges(&all).unwrap();
        assert_eq!(eng.tr_edges(), vec![]);
    }

    #[test]
    fn triangle_with_chord() {
        let mut eng = GeneralEngine::new(3);
        eng.insert_centered(2, &[e(1, 2), e(2, 3)]).unwrap();
        eng.insert_centered(1, &[e(3, 1), e(1, 3)]).unwrap();
        assert_eq!(eng.tr_edges(), vec![e(1, 2), e(2, 3), e(3, 1)]);
    }

    #[test]
    fn acyclic_input_matches_dag_engine() {
        let mut eng = GeneralEngine::new(3);
        eng.insert_centered(1, &[e(1, 2), e(1, 3)]).unwrap();
        eng.insert_centered(3, &[e(3, 2)]).unwrap();
        assert_eq!(eng.tr_edges(), vec![e(1, 3), e(3, 2)]);
        assert!(GeneralEngine::new(4).tr_edges().is_empty());
    }
}
