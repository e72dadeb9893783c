//! Decremental single-source reachability on an acyclic snapshot.
//!
//! For a root `r` the structure keeps `Desc(r)` and, on the reversed
//! snapshot, `Anc(r)`. Each vertex `y != r` has two cursors into its
//! incoming adjacency: `P(y)` rests on the first edge whose tail is in
//! `Desc(r)` and `C(y)` on the second. Edges before `P(y)` or between the two
//! cursors have tails that left `Desc(r)` for good, so they are simply never
//! looked at again; the shared timestamp-ordered adjacency plays the role of
//! the per-vertex active list and nothing per-edge is stored here.
//!
//! Each cursor only moves forward, which bounds the total work over any
//! deletion sequence by the size of the snapshot.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::graph::{Direction, Edge, EdgeId, Mode, Timestamp, TimestampedGraph, Vertex, NIL};

#[derive(Clone, Debug)]
struct Side {
    /// `Out` grows `Desc`, `In` grows `Anc`.
    expand: Direction,
    member: Vec<bool>,
    p: Vec<u32>,
    c: Vec<u32>,
    delta: Vec<Vertex>,
    dirty: Vec<Vertex>,
    // Generation stamps backing O(1) membership tests for delta/dirty.
    delta_gen: Vec<u32>,
    dirty_gen: Vec<u32>,
    generation: u32,
}

impl Side {
    fn source(&self, g: &TimestampedGraph, id: EdgeId) -> Vertex {
        let e = g.edge(id);
        match self.expand {
            Direction::Out => e.tail,
            Direction::In => e.head,
        }
    }

    fn target(&self, g: &TimestampedGraph, id: EdgeId) -> Vertex {
        let e = g.edge(id);
        match self.expand {
            Direction::Out => e.head,
            Direction::In => e.tail,
        }
    }

    fn active(&self) -> Direction {
        self.expand.reverse()
    }

    /// First position at or after `cur` holding a live snapshot edge whose
    /// source is still reachable.
    fn seek(&self, g: &TimestampedGraph, mut cur: u32, root: Vertex, thr: Timestamp, ops: &mut u64) -> u32 {
        while cur != NIL {
            *ops += 1;
            let id = EdgeId(cur);
            if g.ts(id) > thr {
                return NIL;
            }
            if g.is_live(id) {
                let s = self.source(g, id);
                if s == root || self.member[s as usize] {
                    return cur;
                }
            }
            cur = g.next(cur, self.active());
        }
        NIL
    }

    fn init(g: &TimestampedGraph, root: Vertex, thr: Timestamp, expand: Direction, ops: &mut u64) -> Side {
        let n = g.n();
        let mut side = Side {
            expand,
            member: vec![false; n + 1],
            p: vec![NIL; n + 1],
            c: vec![NIL; n + 1],
            delta: Vec::new(),
            dirty: Vec::new(),
            delta_gen: vec![0; n + 1],
            dirty_gen: vec![0; n + 1],
            generation: 0,
        };
        side.member[root as usize] = true;
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            for id in g.adjacency(v, expand, thr) {
                *ops += 1;
                let w = side.target(g, id);
                if !side.member[w as usize] {
                    side.member[w as usize] = true;
                    stack.push(w);
                }
            }
        }
        for y in g.vertices() {
            *ops += 1;
            if y == root || !side.member[y as usize] {
                continue;
            }
            let p = side.seek(g, g.first(y, side.active()), root, thr, ops);
            debug_assert_ne!(p, NIL, "reachable vertex without a reachable in-neighbor");
            side.p[y as usize] = p;
            side.c[y as usize] = side.seek(g, g.next(p, side.active()), root, thr, ops);
        }
        side
    }

    fn touch(&mut self, y: Vertex) {
        if self.dirty_gen[y as usize] != self.generation {
            self.dirty_gen[y as usize] = self.generation;
            self.dirty.push(y);
        }
    }

    fn delete(&mut self, g: &TimestampedGraph, root: Vertex, thr: Timestamp, removed: &[EdgeId], ops: &mut u64) {
        self.generation += 1;
        self.delta.clear();
        self.dirty.clear();
        let mut queue: VecDeque<u32> = removed
            .iter()
            .filter(|&&id| g.ts(id) <= thr)
            .map(|id| id.0)
            .collect();
        while let Some(e) = queue.pop_front() {
            *ops += 1;
            let y = self.target(g, EdgeId(e));
            if y == root || !self.member[y as usize] {
                continue;
            }
            let yi = y as usize;
            if self.p[yi] == e {
                self.touch(y);
                if self.c[yi] == NIL {
                    self.p[yi] = NIL;
                    self.member[yi] = false;
                    self.delta_gen[yi] = self.generation;
                    self.delta.push(y);
                    for id in g.adjacency(y, self.expand, thr) {
                        *ops += 1;
                        queue.push_back(id.0);
                    }
                } else {
                    self.p[yi] = self.c[yi];
                    self.c[yi] = self.seek(g, g.next(self.p[yi], self.active()), root, thr, ops);
                }
            } else if self.c[yi] == e {
                self.touch(y);
                self.c[yi] = self.seek(g, g.next(e, self.active()), root, thr, ops);
            }
        }
    }

    /// Whether `y` has a reachable in-neighbor (w.r.t. the expansion
    /// direction) other than the root.
    fn witness(&self, g: &TimestampedGraph, root: Vertex, y: Vertex) -> bool {
        if y == root {
            return false;
        }
        let yi = y as usize;
        [self.p[yi], self.c[yi]]
            .into_iter()
            .any(|cur| cur != NIL && self.source(g, EdgeId(cur)) != root)
    }
}

/// Per-root decremental reachability state over the snapshot `G^root`.
#[derive(Clone, Debug)]
pub struct DecReach {
    root: Vertex,
    threshold: Timestamp,
    desc: Side,
    anc: Side,
    ops: u64,
}

impl DecReach {
    /// Builds the state for the current snapshot of `root`.
    pub fn new(g: &TimestampedGraph, root: Vertex) -> Result<DecReach> {
        g.check_vertex(root)?;
        let threshold = g.center_ts(root);
        if g.mode() != Mode::Dag && snapshot_has_cycle(g, threshold) {
            return Err(Error::CyclicInput);
        }
        let mut ops = 0;
        let desc = Side::init(g, root, threshold, Direction::Out, &mut ops);
        let anc = Side::init(g, root, threshold, Direction::In, &mut ops);
        Ok(DecReach { root, threshold, desc, anc, ops })
    }

    pub fn root(&self) -> Vertex {
        self.root
    }

    pub fn threshold(&self) -> Timestamp {
        self.threshold
    }

    /// Processes a batch of edges that were just marked dead in `g`. Edges
    /// newer than this snapshot are ignored.
    pub fn delete(&mut self, g: &TimestampedGraph, removed: &[EdgeId]) {
        let (root, thr) = (self.root, self.threshold);
        self.desc.delete(g, root, thr, removed, &mut self.ops);
        self.anc.delete(g, root, thr, removed, &mut self.ops);
    }

    pub fn in_desc(&self, v: Vertex) -> bool {
        self.desc.member[v as usize]
    }

    pub fn in_anc(&self, v: Vertex) -> bool {
        self.anc.member[v as usize]
    }

    pub fn desc(&self) -> Vec<Vertex> {
        members(&self.desc.member)
    }

    pub fn anc(&self) -> Vec<Vertex> {
        members(&self.anc.member)
    }

    /// Vertices removed from `Desc` by the last deletion.
    pub fn d_delta(&self) -> &[Vertex] {
        &self.desc.delta
    }

    /// Vertices removed from `Anc` by the last deletion.
    pub fn a_delta(&self) -> &[Vertex] {
        &self.anc.delta
    }

    pub fn in_d_delta(&self, v: Vertex) -> bool {
        self.desc.generation > 0 && self.desc.delta_gen[v as usize] == self.desc.generation
    }

    pub fn in_a_delta(&self, v: Vertex) -> bool {
        self.anc.generation > 0 && self.anc.delta_gen[v as usize] == self.anc.generation
    }

    /// Vertices whose `Desc`-side cursors moved during the last deletion; only
    /// these can change their `in_query` answer.
    pub fn in_changed(&self) -> &[Vertex] {
        &self.desc.dirty
    }

    /// Vertices whose `Anc`-side cursors moved during the last deletion.
    pub fn out_changed(&self) -> &[Vertex] {
        &self.anc.dirty
    }

    /// `y != root` and `y` has an in-neighbor in `Desc(root) \ {root}`.
    pub fn in_query(&self, g: &TimestampedGraph, y: Vertex) -> bool {
        self.desc.witness(g, self.root, y)
    }

    /// `x != root` and `x` has an out-neighbor in `Anc(root) \ {root}`.
    pub fn out_query(&self, g: &TimestampedGraph, x: Vertex) -> bool {
        self.anc.witness(g, self.root, x)
    }

    /// Edges under the `P` and `C` cursors of `y` on the `Desc` side.
    pub fn cursors(&self, g: &TimestampedGraph, y: Vertex) -> (Option<Edge>, Option<Edge>) {
        let get = |cur: u32| (cur != NIL).then(|| g.edge(EdgeId(cur)));
        (get(self.desc.p[y as usize]), get(self.desc.c[y as usize]))
    }

    /// Elementary steps performed so far (initialization included).
    pub fn ops(&self) -> u64 {
        self.ops
    }
}

fn members(flags: &[bool]) -> Vec<Vertex> {
    flags
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(v, _)| v as Vertex)
        .collect()
}

fn snapshot_has_cycle(g: &TimestampedGraph, thr: Timestamp) -> bool {
    // Kahn's algorithm on the snapshot.
    let n = g.n();
    let mut indeg = vec![0usize; n + 1];
    for v in g.vertices() {
        indeg[v as usize] = g.adjacency(v, Direction::In, thr).count();
    }
    let mut stack: Vec<Vertex> = g.vertices().filter(|&v| indeg[v as usize] == 0).collect();
    let mut seen = 0;
    while let Some(v) = stack.pop() {
        seen += 1;
        for id in g.adjacency(v, Direction::Out, thr) {
            let h = g.edge(id).head as usize;
            indeg[h] -= 1;
            if indeg[h] == 0 {
                stack.push(h as Vertex);
            }
        }
    }
    seen < n
}

#[cfg(test)]
mod tests {
    use super::*;

    fn build(n: usize, edges: &[(Vertex, Vertex)]) -> TimestampedGraph {
        let mut g = TimestampedGraph::new(n, Mode::Dag);
        for &(t, h) in edges {
            g.insert_centered(t, &[Edge::new(t, h)]).unwrap();
        }
        g
    }

    /// Graph whose snapshot for `root` contains every edge.
    fn full(n: usize, edges: &[(Vertex, Vertex)], root: Vertex) -> TimestampedGraph {
        let mut g = build(n, &[]);
        let mut rest = Vec::new();
        for &(t, h) in edges {
            if t == root || h == root {
                rest.push(Edge::new(t, h));
            } else {
                g.insert_centered(t, &[Edge::new(t, h)]).unwrap();
            }
        }
        g.insert_centered(root, &rest).unwrap();
        g
    }

    fn delete(g: &mut TimestampedGraph, s: &mut DecReach, edges: &[(Vertex, Vertex)]) {
        let batch: Vec<Edge> = edges.iter().map(|&e| e.into()).collect();
        let ids = g.begin_delete(&batch).unwrap();
        s.delete(g, &ids);
        g.finish_delete(&ids);
    }

    const D3: [(Vertex, Vertex); 3] = [(1, 2), (1, 3), (3, 2)];
    const P3: [(Vertex, Vertex); 2] = [(1, 2), (2, 3)];

    #[test]
    fn init_on_diamond() {
        let g = full(3, &D3, 1);
        let s = DecReach::new(&g, 1).unwrap();
        assert_eq!(s.desc(), vec![1, 2, 3]);
        let (p, c) = s.cursors(&g, 2);
        assert!(p.is_some() && c.is_some());
        assert!(s.in_query(&g, 2));
        assert!(!s.in_query(&g, 3));
        assert!(!s.in_query(&g, 1));
    }

    #[test]
    fn init_on_path() {
        let g = full(3, &P3, 1);
        let s = DecReach::new(&g, 1).unwrap();
        assert_eq!(s.desc(), vec![1, 2, 3]);
        assert_eq!(s.cursors(&g, 2).1, None);
        assert_eq!(s.cursors(&g, 3).1, None);
        assert!(!s.in_query(&g, 2));
        assert!(s.in_query(&g, 3));
    }

    #[test]
    fn isolated_root() {
        let g = full(3, &[], 2);
        let s = DecReach::new(&g, 2).unwrap();
        assert_eq!(s.desc(), vec![2]);
        assert_eq!(s.anc(), vec![2]);
        for v in 1..=3 {
            assert_eq!(s.cursors(&g, v), (None, None));
        }
    }

    #[test]
    fn never_centered_root_sees_nothing() {
        let g = build(3, &D3);
        let s = DecReach::new(&g, 2).unwrap();
        assert_eq!(s.anc(), vec![2]);
    }

    #[test]
    fn out_query_mirrors_in_query() {
        let g = full(3, &D3, 2);
        let s = DecReach::new(&g, 2).unwrap();
        assert!(s.out_query(&g, 1));
        assert!(!s.out_query(&g, 3));
        assert!(!s.out_query(&g, 2));
        let g = full(3, &P3, 3);
        let s = DecReach::new(&g, 3).unwrap();
        assert!(!s.out_query(&g, 2));
        assert!(s.out_query(&g, 1));
    }

    #[test]
    fn delete_redundant_edge_keeps_descendant() {
        let mut g = full(3, &D3, 1);
        let mut s = DecReach::new(&g, 1).unwrap();
        delete(&mut g, &mut s, &[(1, 2)]);
        assert!(s.d_delta().is_empty());
        assert_eq!(s.desc(), vec![1, 2, 3]);
        assert_eq!(s.cursors(&g, 2), (Some(Edge::new(3, 2)), None));
    }

    #[test]
    fn delete_middle_edge() {
        let mut g = full(3, &D3, 1);
        let mut s = DecReach::new(&g, 1).unwrap();
        delete(&mut g, &mut s, &[(1, 3)]);
        assert_eq!(s.d_delta(), &[3]);
        assert_eq!(s.desc(), vec![1, 2]);
        assert_eq!(s.cursors(&g, 2), (Some(Edge::new(1, 2)), None));
        assert!(!s.in_query(&g, 2));
    }

    #[test]
    fn delete_cascades_along_path() {
        let mut g = full(3, &P3, 1);
        let mut s = DecReach::new(&g, 1).unwrap();
        delete(&mut g, &mut s, &[(1, 2)]);
        assert_eq!(s.d_delta(), &[2, 3]);
        assert!(s.in_d_delta(3));
        assert_eq!(s.desc(), vec![1]);
        assert_eq!(s.anc(), vec![1]);
    }

    #[test]
    fn anc_side_delta() {
        let mut g = full(3, &P3, 3);
        let mut s = DecReach::new(&g, 3).unwrap();
        delete(&mut g, &mut s, &[(2, 3)]);
        assert_eq!(s.a_delta(), &[2, 1]);
        assert_eq!(s.anc(), vec![3]);
        assert!(s.d_delta().is_empty());
    }

    #[test]
    fn newer_edges_are_ignored() {
        let mut g = full(3, &P3, 1);
        let mut s = DecReach::new(&g, 1).unwrap();
        g.insert_centered(3, &[Edge::new(1, 3)]).unwrap();
        delete(&mut g, &mut s, &[(1, 3)]);
        assert_eq!(s.desc(), vec![1, 2, 3]);
        assert!(s.d_delta().is_empty());
    }

    #[test]
    fn cyclic_snapshot_rejected_in_general_mode() {
        let mut g = TimestampedGraph::new(2, Mode::General);
        g.insert_centered(1, &[Edge::new(1, 2), Edge::new(2, 1)]).unwrap();
        assert_eq!(DecReach::new(&g, 1).unwrap_err(), Error::CyclicInput);
    }
}
