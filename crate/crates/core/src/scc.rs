//! Strongly connected components of the snapshot family.
//!
//! This is the reference backend: every snapshot touched by an update is
//! recomputed from scratch and diffed against its previous state. Components
//! are named by their smallest vertex.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::{Direction, Edge, EdgeId, Timestamp, TimestampedGraph, Vertex};

/// SCC representatives (smallest member) of the graph formed by the edges of
/// `g` with `ts <= threshold`. Index 0 is unused.
pub fn components(g: &TimestampedGraph, threshold: Timestamp) -> Vec<Vertex> {
    let n = g.n();
    let succ: Vec<Vec<Vertex>> = (0..=n as Vertex)
        .map(|v| {
            if v == 0 {
                return Vec::new();
            }
            g.adjacency(v, Direction::Out, threshold)
                .map(|id| g.edge(id).head)
                .collect()
        })
        .collect();
    tarjan(n, &succ)
}

/// SCC representatives of an explicit edge list over vertices `1..=n`.
pub fn components_of(n: usize, edges: &[Edge]) -> Vec<Vertex> {
    let mut succ = vec![Vec::new(); n + 1];
    for e in edges {
        succ[e.tail as usize].push(e.head);
    }
    tarjan(n, &succ)
}

fn tarjan(n: usize, succ: &[Vec<Vertex>]) -> Vec<Vertex> {
    const UNSEEN: u32 = u32::MAX;
    let mut index = vec![UNSEEN; n + 1];
    let mut low = vec![0u32; n + 1];
    let mut on_stack = vec![false; n + 1];
    let mut stack: Vec<Vertex> = Vec::new();
    let mut comp: Vec<Vertex> = vec![0; n + 1];
    let mut counter = 0u32;
    // (vertex, next successor position)
    let mut call: Vec<(Vertex, usize)> = Vec::new();

    for s in 1..=n as Vertex {
        if index[s as usize] != UNSEEN {
            continue;
        }
        call.push((s, 0));
        index[s as usize] = counter;
        low[s as usize] = counter;
        counter += 1;
        stack.push(s);
        on_stack[s as usize] = true;
        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            let vi = v as usize;
            if let Some(&w) = succ[vi].get(*pos) {
                *pos += 1;
                let wi = w as usize;
                if index[wi] == UNSEEN {
                    index[wi] = counter;
                    low[wi] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[wi] = true;
                    call.push((w, 0));
                } else if on_stack[wi] {
                    low[vi] = low[vi].min(index[wi]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                let pi = parent as usize;
                low[pi] = low[pi].min(low[vi]);
            }
            if low[vi] == index[vi] {
                let start = stack.iter().rposition(|&u| u == v).expect("on stack");
                let members = stack.split_off(start);
                let rep = *members.iter().min().expect("nonempty");
                for u in members {
                    on_stack[u as usize] = false;
                    comp[u as usize] = rep;
                }
            }
        }
    }
    comp
}

/// Everything the general engine needs to know about one snapshot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootView {
    root: Vertex,
    threshold: Timestamp,
    desc: Vec<bool>,
    anc: Vec<bool>,
    comp: Vec<Vertex>,
    in_flag: Vec<bool>,
    out_flag: Vec<bool>,
}

impl RootView {
    pub fn compute(g: &TimestampedGraph, root: Vertex) -> RootView {
        let n = g.n();
        let threshold = g.center_ts(root);
        let comp = components(g, threshold);
        let desc = search(g, root, threshold, Direction::Out);
        let anc = search(g, root, threshold, Direction::In);
        let z = comp[root as usize];

        // Flags are per component first: an entering edge from a descendant
        // outside both the component and Z marks the whole component.
        let mut in_scc = vec![false; n + 1];
        let mut out_scc = vec![false; n + 1];
        for v in 1..=n as Vertex {
            for id in g.adjacency(v, Direction::Out, threshold) {
                let (w, h) = (v, g.edge(id).head);
                let (cw, ch) = (comp[w as usize], comp[h as usize]);
                if cw == ch {
                    continue;
                }
                if cw != z && desc[w as usize] {
                    in_scc[ch as usize] = true;
                }
                if ch != z && anc[h as usize] {
                    out_scc[cw as usize] = true;
                }
            }
        }
        let mut in_flag = vec![false; n + 1];
        let mut out_flag = vec![false; n + 1];
        for v in 1..=n {
            let c = comp[v] as usize;
            if comp[v] != z {
                in_flag[v] = in_scc[c];
                out_flag[v] = out_scc[c];
            }
        }
        RootView { root, threshold, desc, anc, comp, in_flag, out_flag }
    }

    pub fn root(&self) -> Vertex {
        self.root
    }

    pub fn threshold(&self) -> Timestamp {
        self.threshold
    }

    pub fn in_desc(&self, v: Vertex) -> bool {
        self.desc[v as usize]
    }

    pub fn in_anc(&self, v: Vertex) -> bool {
        self.anc[v as usize]
    }

    pub fn scc_of(&self, v: Vertex) -> Vertex {
        self.comp[v as usize]
    }

    /// `v` shares the root's component.
    pub fn in_root_scc(&self, v: Vertex) -> bool {
        self.comp[v as usize] == self.comp[self.root as usize]
    }

    /// Some edge enters the component of `y` from a descendant of the root
    /// lying outside the root's component.
    pub fn in_query(&self, y: Vertex) -> bool {
        self.in_flag[y as usize]
    }

    /// Some edge leaves the component of `x` towards an ancestor of the root
    /// lying outside the root's component.
    pub fn out_query(&self, x: Vertex) -> bool {
        self.out_flag[x as usize]
    }

    /// Vertices whose per-vertex data differs between `self` and `other`.
    pub fn changed_vertices(&self, other: &RootView) -> Vec<Vertex> {
        let zs = self.comp[self.root as usize];
        let zo = other.comp[other.root as usize];
        (1..self.desc.len())
            .filter(|&v| {
                self.desc[v] != other.desc[v]
                    || self.anc[v] != other.anc[v]
                    || (self.comp[v] == zs) != (other.comp[v] == zo)
                    || self.in_flag[v] != other.in_flag[v]
                    || self.out_flag[v] != other.out_flag[v]
            })
            .map(|v| v as Vertex)
            .collect()
    }

    fn members(&self, rep: Vertex) -> Vec<Vertex> {
        (1..self.comp.len() as Vertex)
            .filter(|&v| self.comp[v as usize] == rep)
            .collect()
    }
}

fn search(g: &TimestampedGraph, root: Vertex, threshold: Timestamp, dir: Direction) -> Vec<bool> {
    let mut seen = vec![false; g.n() + 1];
    seen[root as usize] = true;
    let mut stack = vec![root];
    while let Some(v) = stack.pop() {
        for id in g.adjacency(v, dir, threshold) {
            let e = g.edge(id);
            let w = if dir == Direction::Out { e.head } else { e.tail };
            if !seen[w as usize] {
                seen[w as usize] = true;
                stack.push(w);
            }
        }
    }
    seen
}

/// What a deletion did to one snapshot.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SccDelta {
    pub root: Vertex,
    /// Vertices that left `Desc(root)`.
    pub d: Vec<Vertex>,
    /// Vertices that left `Anc(root)`.
    pub a: Vec<Vertex>,
    /// Vertices whose `In` or `Out` answer went from true to false.
    pub s_set: Vec<Vertex>,
    /// Former components that fell apart, as sorted member lists.
    pub split: Vec<Vec<Vertex>>,
    /// Surviving snapshot edges that used to be inside a component.
    pub new_inter: Vec<Edge>,
}

/// Edges of `G` running between one ordered pair of components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParallelGroup {
    pub from_scc: Vertex,
    pub to_scc: Vertex,
    /// In timestamp order.
    pub members: Vec<Edge>,
}

impl ParallelGroup {
    pub fn marked(&self) -> Edge {
        self.members[0]
    }

    pub fn is_marked(&self, e: Edge) -> bool {
        self.marked() == e
    }

    pub fn size(&self) -> usize {
        self.members.len()
    }
}

#[derive(Clone, Debug)]
pub struct SccSnapshots {
    views: Vec<Option<RootView>>,
    comp: Vec<Vertex>,
    groups: BTreeMap<(Vertex, Vertex), ParallelGroup>,
}

impl SccSnapshots {
    pub fn new(n: usize) -> Self {
        SccSnapshots {
            views: vec![None; n + 1],
            comp: (0..=n as Vertex).collect(),
            groups: BTreeMap::new(),
        }
    }

    pub fn view(&self, r: Vertex) -> Option<&RootView> {
        self.views.get(r as usize).and_then(Option::as_ref)
    }

    pub fn views(&self) -> impl Iterator<Item = &RootView> {
        self.views.iter().flatten()
    }

    /// Recomputes the snapshot of `r` after an insertion centered there and
    /// refreshes the group table. Returns the previous view.
    pub fn rebuild(&mut self, g: &TimestampedGraph, r: Vertex) -> Option<RootView> {
        let old = self.views[r as usize].replace(RootView::compute(g, r));
        self.refresh_groups(g);
        old
    }

    /// Recomputes every snapshot holding one of `removed` (already marked
    /// dead in `g`). Returns the previous view of each such root together
    /// with the deltas.
    pub fn delete(&mut self, g: &TimestampedGraph, removed: &[EdgeId]) -> Vec<(RootView, SccDelta)> {
        let Some(min_ts) = removed.iter().map(|&id| g.ts(id)).min() else {
            return Vec::new();
        };
        let mut out = Vec::new();
        for slot in self.views.iter_mut() {
            let Some(view) = slot else { continue };
            if view.threshold < min_ts {
                continue;
            }
            let fresh = RootView::compute(g, view.root);
            let old = std::mem::replace(view, fresh);
            let delta = diff(g, &old, view);
            out.push((old, delta));
        }
        self.refresh_groups(g);
        out
    }

    /// Recomputes the components of `G` and the parallel groups.
    pub fn refresh_groups(&mut self, g: &TimestampedGraph) {
        self.comp = components(g, Timestamp::MAX);
        self.groups.clear();
        for (e, _) in g.edges_with_ts() {
            let (cx, cy) = (self.comp[e.tail as usize], self.comp[e.head as usize]);
            if cx != cy {
                self.groups
                    .entry((cx, cy))
                    .or_insert_with(|| ParallelGroup { from_scc: cx, to_scc: cy, members: Vec::new() })
                    .members
                    .push(e);
            }
        }
    }

    /// Component of `v` in the current graph.
    pub fn scc_of(&self, v: Vertex) -> Vertex {
        self.comp[v as usize]
    }

    pub fn in_query(&self, y: Vertex, r: Vertex) -> bool {
        self.view(r).is_some_and(|v| v.in_query(y))
    }

    pub fn out_query(&self, x: Vertex, r: Vertex) -> bool {
        self.view(r).is_some_and(|v| v.out_query(x))
    }

    pub fn groups(&self) -> impl Iterator<Item = &ParallelGroup> {
        self.groups.values()
    }

    pub fn parallel_group(&self, g: &TimestampedGraph, e: Edge) -> Result<&ParallelGroup> {
        if !g.contains(e) {
            return Err(Error::MissingEdge(e));
        }
        self.groups
            .get(&(self.scc_of(e.tail), self.scc_of(e.head)))
            .ok_or(Error::NotInterScc(e))
    }
}

fn diff(g: &TimestampedGraph, old: &RootView, new: &RootView) -> SccDelta {
    let n = old.desc.len() - 1;
    let lost = |a: &[bool], b: &[bool]| -> Vec<Vertex> {
        (1..=n).filter(|&v| a[v] && !b[v]).map(|v| v as Vertex).collect()
    };
    let s_set = (1..=n)
        .filter(|&v| (old.in_flag[v] && !new.in_flag[v]) || (old.out_flag[v] && !new.out_flag[v]))
        .map(|v| v as Vertex)
        .collect();
    let mut split = Vec::new();
    for v in 1..=n as Vertex {
        // Visit each old component once, through its representative.
        if old.scc_of(v) != v {
            continue;
        }
        let members = old.members(v);
        if members.iter().any(|&u| new.scc_of(u) != new.scc_of(v)) {
            split.push(members);
        }
    }
    let mut new_inter = Vec::new();
    for v in 1..=n as Vertex {
        for id in g.adjacency(v, Direction::Out, new.threshold) {
            let e = g.edge(id);
            if old.scc_of(e.tail) == old.scc_of(e.head) && new.scc_of(e.tail) != new.scc_of(e.head) {
                new_inter.push(e);
            }
        }
    }
    new_inter.sort_unstable();
    SccDelta {
        root: new.root,
        d: lost(&old.desc, &new.desc),
        a: lost(&old.anc, &new.anc),
        s_set,
        split,
        new_inter,
    }
}
