//! The shared timestamped graph.
//!
//! Every edge carries the timestamp of its insertion, and every vertex the
//! timestamp of the last insertion centered at it. The snapshot `G^r` of a
//! root `r` is the set of live edges with `ts <= center_ts[r]`. Since
//! adjacency sequences are kept sorted by timestamp, a snapshot is a prefix
//! of each sequence and is never materialized.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// 1-based vertex identifier.
pub type Vertex = u32;
pub type Timestamp = u64;

pub(crate) const NIL: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub tail: Vertex,
    pub head: Vertex,
}

impl Edge {
    pub const fn new(tail: Vertex, head: Vertex) -> Self {
        Edge { tail, head }
    }

    pub fn touches(&self, v: Vertex) -> bool {
        self.tail == v || self.head == v
    }

    pub fn reversed(&self) -> Edge {
        Edge::new(self.head, self.tail)
    }
}

impl From<(Vertex, Vertex)> for Edge {
    fn from((tail, head): (Vertex, Vertex)) -> Self {
        Edge::new(tail, head)
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.tail, self.head)
    }
}

/// Handle to an edge slot. Slots are recycled after deletion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub(crate) u32);

impl EdgeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Out,
    In,
}

impl Direction {
    pub fn reverse(self) -> Direction {
        match self {
            Direction::Out => Direction::In,
            Direction::In => Direction::Out,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Mode {
    #[default]
    Dag,
    General,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Dag => "dag",
            Mode::General => "general",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "dag" => Ok(Mode::Dag),
            "general" => Ok(Mode::General),
            other => Err(format!("unknown mode `{other}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Update {
    InsertCentered { center: Vertex, edges: Vec<Edge> },
    DeleteSet { edges: Vec<Edge> },
}

#[derive(Clone, Debug)]
struct Slot {
    edge: Edge,
    ts: Timestamp,
    live: bool,
    out_prev: u32,
    out_next: u32,
    in_prev: u32,
    in_next: u32,
}

#[derive(Clone, Debug)]
pub struct TimestampedGraph {
    n: usize,
    mode: Mode,
    slots: Vec<Slot>,
    free: Vec<u32>,
    // Indexed by vertex id; entry 0 is unused.
    out_first: Vec<u32>,
    out_last: Vec<u32>,
    in_first: Vec<u32>,
    in_last: Vec<u32>,
    center_ts: Vec<Timestamp>,
    clock: Timestamp,
    index: HashMap<Edge, u32>,
    live: usize,
}

impl TimestampedGraph {
    pub fn new(n: usize, mode: Mode) -> Self {
        TimestampedGraph {
            n,
            mode,
            slots: Vec::new(),
            free: Vec::new(),
            out_first: vec![NIL; n + 1],
            out_last: vec![NIL; n + 1],
            in_first: vec![NIL; n + 1],
            in_last: vec![NIL; n + 1],
            center_ts: vec![0; n + 1],
            clock: 0,
            index: HashMap::new(),
            live: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.live
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn clock(&self) -> Timestamp {
        self.clock
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> {
        1..=self.n as Vertex
    }

    /// Timestamp of the last insertion centered at `v`, 0 if none.
    pub fn center_ts(&self, v: Vertex) -> Timestamp {
        self.center_ts[v as usize]
    }

    pub fn contains(&self, e: Edge) -> bool {
        self.index.contains_key(&e)
    }

    pub fn edge_id(&self, e: Edge) -> Option<EdgeId> {
        self.index.get(&e).map(|&i| EdgeId(i))
    }

    pub fn edge(&self, id: EdgeId) -> Edge {
        self.slots[id.index()].edge
    }

    pub fn ts(&self, id: EdgeId) -> Timestamp {
        self.slots[id.index()].ts
    }

    pub fn is_live(&self, id: EdgeId) -> bool {
        self.slots[id.index()].live
    }

    /// Upper bound (exclusive) on slot indices, for per-edge side tables.
    pub fn slot_capacity(&self) -> usize {
        self.slots.len()
    }

    pub fn check_vertex(&self, v: Vertex) -> Result<()> {
        if v == 0 || v as usize > self.n {
            return Err(Error::VertexOutOfRange { vertex: v, n: self.n });
        }
        Ok(())
    }

    pub fn check_edge(&self, e: Edge) -> Result<()> {
        self.check_vertex(e.tail)?;
        self.check_vertex(e.head)?;
        if e.tail == e.head {
            return Err(Error::SelfLoop(e));
        }
        Ok(())
    }

    /// Live edges in slot order.
    pub fn live_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.slots
            .iter()
            .enumerate()
            .filter(|(_, s)| s.live)
            .map(|(i, _)| EdgeId(i as u32))
    }

    /// Live edges sorted lexicographically.
    pub fn edges(&self) -> Vec<Edge> {
        let mut out: Vec<Edge> = self.index.keys().copied().collect();
        out.sort_unstable();
        out
    }

    /// Live edges with their timestamps, in timestamp order.
    pub fn edges_with_ts(&self) -> Vec<(Edge, Timestamp)> {
        let mut out: Vec<(Edge, Timestamp)> = self
            .live_ids()
            .map(|id| (self.edge(id), self.ts(id)))
            .collect();
        out.sort_unstable_by_key(|&(e, ts)| (ts, e));
        out
    }

    pub(crate) fn first(&self, v: Vertex, dir: Direction) -> u32 {
        match dir {
            Direction::Out => self.out_first[v as usize],
            Direction::In => self.in_first[v as usize],
        }
    }

    pub(crate) fn next(&self, id: u32, dir: Direction) -> u32 {
        let s = &self.slots[id as usize];
        match dir {
            Direction::Out => s.out_next,
            Direction::In => s.in_next,
        }
    }

    /// Edges in the `dir` adjacency of `v` with `ts <= threshold`, skipping
    /// edges that are pending deletion.
    pub fn adjacency(&self, v: Vertex, dir: Direction, threshold: Timestamp) -> SnapshotIter<'_> {
        SnapshotIter {
            g: self,
            cur: self.first(v, dir),
            dir,
            threshold,
        }
    }

    /// The adjacency of `v` as seen by the snapshot of `root`.
    pub fn snapshot_adjacency(
        &self,
        v: Vertex,
        root: Vertex,
        dir: Direction,
    ) -> impl Iterator<Item = Edge> + '_ {
        let threshold = self.center_ts[root as usize];
        self.adjacency(v, dir, threshold).map(move |id| self.edge(id))
    }

    /// Live edges of the snapshot with the given threshold.
    pub fn snapshot_edges(&self, threshold: Timestamp) -> Vec<Edge> {
        let mut out: Vec<Edge> = self
            .live_ids()
            .filter(|&id| self.ts(id) <= threshold)
            .map(|id| self.edge(id))
            .collect();
        out.sort_unstable();
        out
    }

    fn validate_insert(&self, center: Vertex, edges: &[Edge]) -> Result<()> {
        self.check_vertex(center)?;
        let mut seen = HashSet::with_capacity(edges.len());
        for &e in edges {
            self.check_edge(e)?;
            if !e.touches(center) {
                return Err(Error::NotIncident { center, edge: e });
            }
            if self.contains(e) || !seen.insert(e) {
                return Err(Error::DuplicateEdge(e));
            }
        }
        if self.mode == Mode::Dag && self.closes_cycle(center, edges) {
            return Err(Error::CycleCreated(center));
        }
        Ok(())
    }

    /// A new cycle must pass through `center`: search from every out-neighbor
    /// of `center` (old or new) without entering `center`, and look for any
    /// in-neighbor (old or new).
    fn closes_cycle(&self, center: Vertex, edges: &[Edge]) -> bool {
        let mut targets = vec![false; self.n + 1];
        for e in self.adjacency(center, Direction::In, Timestamp::MAX) {
            targets[self.edge(e).tail as usize] = true;
        }
        let mut seen = vec![false; self.n + 1];
        seen[center as usize] = true;
        let mut queue = VecDeque::new();
        for &e in edges {
            if e.head == center {
                targets[e.tail as usize] = true;
            } else if !seen[e.head as usize] {
                seen[e.head as usize] = true;
                queue.push_back(e.head);
            }
        }
        for e in self.adjacency(center, Direction::Out, Timestamp::MAX) {
            let h = self.edge(e).head;
            if !seen[h as usize] {
                seen[h as usize] = true;
                queue.push_back(h);
            }
        }
        while let Some(v) = queue.pop_front() {
            if targets[v as usize] {
                return true;
            }
            for e in self.adjacency(v, Direction::Out, Timestamp::MAX) {
                let h = self.edge(e).head;
                if !seen[h as usize] {
                    seen[h as usize] = true;
                    queue.push_back(h);
                }
            }
        }
        false
    }

    /// Inserts `edges`, all incident to `center`, with a fresh timestamp.
    pub fn insert_centered(&mut self, center: Vertex, edges: &[Edge]) -> Result<Timestamp> {
        self.validate_insert(center, edges)?;
        self.clock += 1;
        let ts = self.clock;
        for &e in edges {
            self.link(e, ts);
        }
        self.center_ts[center as usize] = ts;
        Ok(ts)
    }

    fn link(&mut self, edge: Edge, ts: Timestamp) -> u32 {
        let (t, h) = (edge.tail as usize, edge.head as usize);
        let slot = Slot {
            edge,
            ts,
            live: true,
            out_prev: self.out_last[t],
            out_next: NIL,
            in_prev: self.in_last[h],
            in_next: NIL,
        };
        let id = match self.free.pop() {
            Some(id) => {
                self.slots[id as usize] = slot;
                id
            }
            None => {
                self.slots.push(slot);
                (self.slots.len() - 1) as u32
            }
        };
        match self.out_last[t] {
            NIL => self.out_first[t] = id,
            prev => self.slots[prev as usize].out_next = id,
        }
        self.out_last[t] = id;
        match self.in_last[h] {
            NIL => self.in_first[h] = id,
            prev => self.slots[prev as usize].in_next = id,
        }
        self.in_last[h] = id;
        self.index.insert(edge, id);
        self.live += 1;
        id
    }

    /// Removes `edges` from the graph.
    pub fn apply_delete(&mut self, edges: &[Edge]) -> Result<()> {
        let ids = self.begin_delete(edges)?;
        self.finish_delete(&ids);
        Ok(())
    }

    /// First phase of a deletion: validates the batch and marks the edges
    /// dead. Dead edges stay linked (so cursors resting on them can still
    /// advance) but are skipped by every snapshot iterator.
    pub fn begin_delete(&mut self, edges: &[Edge]) -> Result<Vec<EdgeId>> {
        let mut ids = Vec::with_capacity(edges.len());
        let mut seen = HashSet::with_capacity(edges.len());
        for &e in edges {
            match self.index.get(&e) {
                Some(&id) if seen.insert(e) => ids.push(EdgeId(id)),
                _ => return Err(Error::MissingEdge(e)),
            }
        }
        for &id in &ids {
            let slot = &mut self.slots[id.index()];
            slot.live = false;
            self.index.remove(&slot.edge);
            self.live -= 1;
        }
        Ok(ids)
    }

    /// Second phase of a deletion: unlinks the dead edges and recycles slots.
    pub fn finish_delete(&mut self, ids: &[EdgeId]) {
        for &id in ids {
            debug_assert!(!self.slots[id.index()].live);
            let s = self.slots[id.index()].clone();
            let (t, h) = (s.edge.tail as usize, s.edge.head as usize);
            match s.out_prev {
                NIL => self.out_first[t] = s.out_next,
                p => self.slots[p as usize].out_next = s.out_next,
            }
            match s.out_next {
                NIL => self.out_last[t] = s.out_prev,
                q => self.slots[q as usize].out_prev = s.out_prev,
            }
            match s.in_prev {
                NIL => self.in_first[h] = s.in_next,
                p => self.slots[p as usize].in_next = s.in_next,
            }
            match s.in_next {
                NIL => self.in_last[h] = s.in_prev,
                q => self.slots[q as usize].in_prev = s.in_prev,
            }
            self.free.push(id.0);
        }
    }
}

pub struct SnapshotIter<'a> {
    g: &'a TimestampedGraph,
    cur: u32,
    dir: Direction,
    threshold: Timestamp,
}

impl Iterator for SnapshotIter<'_> {
    type Item = EdgeId;

    fn next(&mut self) -> Option<EdgeId> {
        while self.cur != NIL {
            let id = self.cur;
            let slot = &self.g.slots[id as usize];
            if slot.ts > self.threshold {
                self.cur = NIL;
                return None;
            }
            self.cur = self.g.next(id, self.dir);
            if slot.live {
                return Some(EdgeId(id));
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(t: Vertex, h: Vertex) -> Edge {
        Edge::new(t, h)
    }

    fn collect(g: &TimestampedGraph, v: Vertex, root: Vertex, dir: Direction) -> Vec<Edge> {
        g.snapshot_adjacency(v, root, dir).collect()
    }

    #[test]
    fn first_insertion_gets_timestamp_one() {
        let mut g = TimestampedGraph::new(3, Mode::Dag);
        assert_eq!(g.insert_centered(1, &[e(1, 2), e(1, 3)]).unwrap(), 1);
        assert_eq!(g.m(), 2);
    }

    #[test]
    fn nested_chain_follows_center_timestamps() {
        let mut g = TimestampedGraph::new(3, Mode::Dag);
        g.insert_centered(1, &[e(1, 2), e(1, 3)]).unwrap();
        assert_eq!(g.insert_centered(3, &[e(3, 2)]).unwrap(), 2);
        assert_eq!(
            [g.center_ts(2), g.center_ts(1), g.center_ts(3)],
            [0, 1, 2]
        );
        assert_eq!(collect(&g, 1, 1, Direction::Out), vec![e(1, 2), e(1, 3)]);
        assert_eq!(collect(&g, 3, 1, Direction::Out), vec![]);
        assert_eq!(collect(&g, 3, 3, Direction::Out), vec![e(3, 2)]);
        assert_eq!(collect(&g, 1, 2, Direction::Out), vec![]);
        assert_eq!(collect(&g, 2, 3, Direction::In), vec![e(1, 2), e(3, 2)]);
    }

    #[test]
    fn insertion_errors() {
        let mut g = TimestampedGraph::new(3, Mode::Dag);
        g.insert_centered(1, &[e(1, 2)]).unwrap();
        assert_eq!(
            g.insert_centered(1, &[e(2, 3)]),
            Err(Error::NotIncident { center: 1, edge: e(2, 3) })
        );
        assert_eq!(g.insert_centered(2, &[e(1, 2)]), Err(Error::DuplicateEdge(e(1, 2))));
        assert_eq!(
            g.insert_centered(3, &[e(3, 1), e(3, 1)]),
            Err(Error::DuplicateEdge(e(3, 1)))
        );
        assert_eq!(g.insert_centered(2, &[e(2, 1)]), Err(Error::CycleCreated(2)));
        assert!(matches!(
            g.insert_centered(4, &[]),
            Err(Error::VertexOutOfRange { vertex: 4, .. })
        ));
        assert_eq!(g.insert_centered(2, &[e(2, 2)]), Err(Error::SelfLoop(e(2, 2))));
        // Failed insertions leave no trace.
        assert_eq!(g.clock(), 1);
        assert_eq!(g.m(), 1);
    }

    #[test]
    fn cycle_through_new_edges_only() {
        let mut g = TimestampedGraph::new(3, Mode::Dag);
        g.insert_centered(2, &[e(2, 3)]).unwrap();
        assert_eq!(g.insert_centered(1, &[e(1, 2), e(3, 1)]), Err(Error::CycleCreated(1)));
        assert_eq!(g.insert_centered(1, &[e(1, 2), e(2, 1)]), Err(Error::CycleCreated(1)));
        let mut h = TimestampedGraph::new(3, Mode::General);
        h.insert_centered(2, &[e(2, 3)]).unwrap();
        h.insert_centered(1, &[e(1, 2), e(3, 1)]).unwrap();
    }

    #[test]
    fn deletion() {
        let mut g = TimestampedGraph::new(3, Mode::Dag);
        g.insert_centered(1, &[e(1, 2), e(1, 3)]).unwrap();
        g.insert_centered(3, &[e(3, 2)]).unwrap();
        g.apply_delete(&[e(1, 2)]).unwrap();
        assert_eq!(g.m(), 2);
        assert_eq!(g.apply_delete(&[e(9, 9)]), Err(Error::MissingEdge(e(9, 9))));
        assert_eq!(g.apply_delete(&[e(1, 3), e(1, 3)]), Err(Error::MissingEdge(e(1, 3))));
        g.apply_delete(&[e(1, 3), e(3, 2)]).unwrap();
        assert_eq!(g.m(), 0);
        assert_eq!(collect(&g, 2, 3, Direction::In), vec![]);
    }

    #[test]
    fn pending_deletions_are_invisible() {
        let mut g = TimestampedGraph::new(3, Mode::General);
        g.insert_centered(1, &[e(1, 2), e(1, 3)]).unwrap();
        let ids = g.begin_delete(&[e(1, 2)]).unwrap();
        assert_eq!(collect(&g, 1, 1, Direction::Out), vec![e(1, 3)]);
        assert!(!g.contains(e(1, 2)));
        g.finish_delete(&ids);
        g.insert_centered(2, &[e(1, 2)]).unwrap();
        assert_eq!(collect(&g, 1, 2, Direction::Out), vec![e(1, 3), e(1, 2)]);
    }
}
