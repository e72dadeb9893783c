//! Brute-force ground truth and random workloads.
//!
//! Nothing here shares code with the engines except [`minimal_scss`], whose
//! output is checked independently by [`validity_violation`].

use std::collections::{HashMap, HashSet, VecDeque};

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Edge, Mode, TimestampedGraph, Update, Vertex};
use crate::tr_general::minimal_scss;

/// Reflexive reachability over vertices `1..=n`, one bitset row per vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureMatrix {
    n: usize,
    words: usize,
    rows: Vec<u64>,
}

impl ClosureMatrix {
    fn empty(n: usize) -> Self {
        let words = (n + 1).div_ceil(64);
        let mut c = ClosureMatrix { n, words, rows: vec![0; (n + 1) * words] };
        for v in 1..=n {
            c.set(v, v);
        }
        c
    }

    fn set(&mut self, u: usize, v: usize) {
        self.rows[u * self.words + v / 64] |= 1 << (v % 64);
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn reaches(&self, u: Vertex, v: Vertex) -> bool {
        let (u, v) = (u as usize, v as usize);
        self.rows[u * self.words + v / 64] >> (v % 64) & 1 == 1
    }
}

fn adjacency(n: usize, edges: &[Edge]) -> Vec<Vec<Vertex>> {
    let mut adj = vec![Vec::new(); n + 1];
    for e in edges {
        adj[e.tail as usize].push(e.head);
    }
    adj
}

fn bfs(adj: &[Vec<Vertex>], s: Vertex, skip: Option<Edge>) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    seen[s as usize] = true;
    let mut queue = VecDeque::from([s]);
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v as usize] {
            if skip == Some(Edge::new(v, w)) || seen[w as usize] {
                continue;
            }
            seen[w as usize] = true;
            queue.push_back(w);
        }
    }
    seen
}

/// Closure by one BFS per vertex.
pub fn transitive_closure(n: usize, edges: &[Edge]) -> ClosureMatrix {
    let adj = adjacency(n, edges);
    let mut c = ClosureMatrix::empty(n);
    for u in 1..=n {
        for (v, &r) in bfs(&adj, u as Vertex, None).iter().enumerate() {
            if r {
                c.set(u, v);
            }
        }
    }
    c
}

/// Closure by Floyd–Warshall on bitset rows.
pub fn floyd_warshall(n: usize, edges: &[Edge]) -> ClosureMatrix {
    let mut c = ClosureMatrix::empty(n);
    for e in edges {
        c.set(e.tail as usize, e.head as usize);
    }
    let w = c.words;
    for k in 1..=n {
        let row_k: Vec<u64> = c.rows[k * w..(k + 1) * w].to_vec();
        for i in 1..=n {
            if c.rows[i * w + k / 64] >> (k % 64) & 1 == 1 {
                for (dst, src) in c.rows[i * w..(i + 1) * w].iter_mut().zip(&row_k) {
                    *dst |= src;
                }
            }
        }
    }
    c
}

/// `xy` is redundant iff `y` stays reachable from `x` without it.
pub fn brute_redundant(g: &TimestampedGraph, e: Edge) -> Result<bool> {
    if !g.contains(e) {
        return Err(Error::MissingEdge(e));
    }
    let adj = adjacency(g.n(), &g.edges());
    Ok(bfs(&adj, e.tail, Some(e))[e.head as usize])
}

fn is_acyclic(n: usize, edges: &[Edge]) -> bool {
    let mut indeg = vec![0usize; n + 1];
    for e in edges {
        indeg[e.head as usize] += 1;
    }
    let adj = adjacency(n, edges);
    let mut stack: Vec<usize> = (1..=n).filter(|&v| indeg[v] == 0).collect();
    let mut done = 0;
    while let Some(v) = stack.pop() {
        done += 1;
        for &w in &adj[v] {
            indeg[w as usize] -= 1;
            if indeg[w as usize] == 0 {
                stack.push(w as usize);
            }
        }
    }
    done == n
}

/// The unique reduction of an acyclic graph, sorted.
pub fn brute_tr_dag(g: &TimestampedGraph) -> Result<Vec<Edge>> {
    brute_tr_dag_of(g.n(), &g.edges())
}

pub fn brute_tr_dag_of(n: usize, edges: &[Edge]) -> Result<Vec<Edge>> {
    if !is_acyclic(n, edges) {
        return Err(Error::CyclicInput);
    }
    let adj = adjacency(n, edges);
    let mut out: Vec<Edge> = edges
        .iter()
        .copied()
        .filter(|&e| !bfs(&adj, e.tail, Some(e))[e.head as usize])
        .collect();
    out.sort_unstable();
    Ok(out)
}

/// Components by mutual reachability; each vertex maps to its smallest
/// mutually reachable vertex.
pub fn closure_sccs(n: usize, edges: &[Edge]) -> Vec<Vertex> {
    let c = transitive_closure(n, edges);
    let mut comp = vec![0; n + 1];
    for v in 1..=n as Vertex {
        comp[v as usize] = (1..=v).find(|&u| c.reaches(u, v) && c.reaches(v, u)).expect("v itself");
    }
    comp
}

/// Inter-component edges grouped by component pair, members in `edges` order.
pub fn parallel_groups(comp: &[Vertex], edges: &[Edge]) -> Vec<Vec<Edge>> {
    let mut by_pair: HashMap<(Vertex, Vertex), Vec<Edge>> = HashMap::new();
    for &e in edges {
        let (a, b) = (comp[e.tail as usize], comp[e.head as usize]);
        if a != b {
            by_pair.entry((a, b)).or_default().push(e);
        }
    }
    let mut out: Vec<(_, _)> = by_pair.into_iter().collect();
    out.sort_unstable();
    out.into_iter().map(|(_, g)| g).collect()
}

/// Whether the group from `X` to `Y` has a route avoiding all its members.
pub fn brute_group_redundant(n: usize, edges: &[Edge], group: &[Edge]) -> bool {
    let kept: Vec<Edge> = edges.iter().copied().filter(|e| !group.contains(e)).collect();
    let adj = adjacency(n, &kept);
    bfs(&adj, group[0].tail, None)[group[0].head as usize]
}

/// A reduction of a general graph: minimal spanning subgraphs inside the
/// components and the oldest member of every group without an indirect
/// route.
pub fn brute_tr_general(g: &TimestampedGraph) -> Vec<Edge> {
    let by_ts: Vec<Edge> = g.edges_with_ts().into_iter().map(|(e, _)| e).collect();
    brute_tr_general_of(g.n(), &by_ts)
}

/// As [`brute_tr_general`], with `edges` in priority order.
pub fn brute_tr_general_of(n: usize, edges: &[Edge]) -> Vec<Edge> {
    let comp = closure_sccs(n, edges);
    let mut out = Vec::new();
    for rep in 1..=n as Vertex {
        let members: Vec<Vertex> = (1..=n as Vertex).filter(|&v| comp[v as usize] == rep).collect();
        if members.len() < 2 {
            continue;
        }
        let inside: Vec<Edge> = edges
            .iter()
            .copied()
            .filter(|e| comp[e.tail as usize] == rep && comp[e.head as usize] == rep)
            .collect();
        out.extend(minimal_scss(&members, &inside).expect("component"));
    }
    for group in parallel_groups(&comp, edges) {
        if !brute_group_redundant(n, edges, &group) {
            out.push(group[0]);
        }
    }
    out.sort_unstable();
    out
}

/// Describes the first way `tr` fails to be a reduction of `edges`, if any:
/// not a subgraph, different closure, or some edge can be dropped.
pub fn validity_violation(n: usize, edges: &[Edge], tr: &[Edge]) -> Option<String> {
    let all: HashSet<Edge> = edges.iter().copied().collect();
    if let Some(e) = tr.iter().find(|e| !all.contains(e)) {
        return Some(format!("{e} is not an edge of the graph"));
    }
    if floyd_warshall(n, edges) != floyd_warshall(n, tr) {
        return Some("closure differs".into());
    }
    // Dropping `e` changes the closure iff its head becomes unreachable.
    let adj = adjacency(n, tr);
    for &e in tr {
        if bfs(&adj, e.tail, Some(e))[e.head as usize] {
            return Some(format!("{e} can be removed"));
        }
    }
    None
}

/// Number of paths from `u` to `v` in an acyclic graph.
pub fn dag_path_count(n: usize, edges: &[Edge], u: Vertex, v: Vertex) -> Result<BigUint> {
    if !is_acyclic(n, edges) {
        return Err(Error::CyclicInput);
    }
    // Memoized count of paths from each vertex to `v`.
    let adj = adjacency(n, edges);
    let mut memo: Vec<Option<BigUint>> = vec![None; n + 1];
    let mut stack = vec![(u, false)];
    while let Some((x, expanded)) = stack.pop() {
        if memo[x as usize].is_some() {
            continue;
        }
        if expanded {
            let mut total = BigUint::from((x == v) as u32);
            for &w in &adj[x as usize] {
                total += memo[w as usize].as_ref().expect("child done");
            }
            memo[x as usize] = Some(total);
        } else {
            stack.push((x, true));
            for &w in &adj[x as usize] {
                if memo[w as usize].is_none() {
                    stack.push((w, false));
                }
            }
        }
    }
    Ok(memo[u as usize].take().expect("root done"))
}

/// The snapshot of `root` materialized as an edge list.
pub fn snapshot(g: &TimestampedGraph, root: Vertex) -> Vec<Edge> {
    g.snapshot_edges(g.center_ts(root))
}

/// DAG ledgers `(count, [x-side, y-side])` recomputed from the definitions.
pub fn dag_ledgers(g: &TimestampedGraph) -> HashMap<Edge, (u32, [bool; 2])> {
    let n = g.n();
    let mut out: HashMap<Edge, (u32, [bool; 2])> = g.edges().into_iter().map(|e| (e, (0, [false; 2]))).collect();
    let mut views = vec![None; n + 1];
    for z in g.vertices().filter(|&z| g.center_ts(z) > 0) {
        let es = snapshot(g, z);
        let c = transitive_closure(n, &es);
        for e in &es {
            if !e.touches(z) && c.reaches(e.tail, z) && c.reaches(z, e.head) {
                out.get_mut(e).expect("live").0 += 1;
            }
        }
        views[z as usize] = Some((es, c));
    }
    for (e, entry) in out.iter_mut() {
        let Edge { tail: x, head: y } = *e;
        if let Some((es, c)) = &views[x as usize] {
            entry.1[0] = es.iter().any(|f| f.head == y && f.tail != x && c.reaches(x, f.tail));
        }
        if let Some((es, c)) = &views[y as usize] {
            entry.1[1] = es.iter().any(|f| f.tail == x && f.head != y && c.reaches(f.head, y));
        }
    }
    out
}

/// What the general engine tracks about one snapshot, from the definitions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnapshotFacts {
    pub desc: Vec<bool>,
    pub anc: Vec<bool>,
    pub comp: Vec<Vertex>,
    pub in_flag: Vec<bool>,
    pub out_flag: Vec<bool>,
}

pub fn snapshot_facts(g: &TimestampedGraph, z: Vertex) -> SnapshotFacts {
    let n = g.n();
    let es = snapshot(g, z);
    let c = transitive_closure(n, &es);
    let comp = closure_sccs(n, &es);
    let zc = comp[z as usize];
    let desc: Vec<bool> = (0..=n as Vertex).map(|v| v > 0 && c.reaches(z, v)).collect();
    let anc: Vec<bool> = (0..=n as Vertex).map(|v| v > 0 && c.reaches(v, z)).collect();
    let mut in_flag = vec![false; n + 1];
    let mut out_flag = vec![false; n + 1];
    for v in 1..=n {
        let vc = comp[v];
        if vc == zc {
            continue;
        }
        in_flag[v] = es.iter().any(|f| {
            let (wc, hc) = (comp[f.tail as usize], comp[f.head as usize]);
            hc == vc && wc != vc && wc != zc && desc[f.tail as usize]
        });
        out_flag[v] = es.iter().any(|f| {
            let (tc, wc) = (comp[f.tail as usize], comp[f.head as usize]);
            tc == vc && wc != vc && wc != zc && anc[f.head as usize]
        });
    }
    SnapshotFacts { desc, anc, comp, in_flag, out_flag }
}

/// General ledgers `(count, touch)` recomputed from the definitions.
pub fn general_ledgers(g: &TimestampedGraph) -> HashMap<Edge, (u32, u32)> {
    let mut out: HashMap<Edge, (u32, u32)> = g.edges().into_iter().map(|e| (e, (0, 0))).collect();
    for z in g.vertices().filter(|&z| g.center_ts(z) > 0) {
        let f = snapshot_facts(g, z);
        let in_z = |v: Vertex| f.comp[v as usize] == f.comp[z as usize];
        let es: HashSet<Edge> = snapshot(g, z).into_iter().collect();
        for (e, entry) in out.iter_mut() {
            let (x, y) = (e.tail as usize, e.head as usize);
            if es.contains(e) && f.anc[x] && !f.desc[x] && f.desc[y] && !f.anc[y] {
                entry.0 += 1;
            }
            entry.1 += (in_z(e.tail) && f.in_flag[y]) as u32 + (in_z(e.head) && f.out_flag[x]) as u32;
        }
    }
    out
}

/// Knobs for [`random_update_stream`].
#[derive(Clone, Debug)]
pub struct StreamConfig {
    pub n: usize,
    pub steps: usize,
    pub mode: Mode,
    /// Probability that a step inserts rather than deletes.
    pub density: f64,
    /// Maximum edges per batch.
    pub batch: usize,
    /// Insert-only steps issued before the mixed phase.
    pub build: usize,
    /// Maximum edges per build-phase insertion.
    pub build_batch: usize,
    pub seed: u64,
}

impl StreamConfig {
    pub fn new(n: usize, steps: usize, mode: Mode, seed: u64) -> Self {
        StreamConfig { n, steps, mode, density: 0.6, batch: 3, build: 0, build_batch: 3, seed }
    }
}

/// A seeded stream of valid updates. In DAG mode every edge follows a random
/// topological order fixed up front, so no update closes a cycle.
pub fn random_update_stream(cfg: &StreamConfig) -> Vec<Update> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = cfg.n;
    let mut order: Vec<Vertex> = (1..=n as Vertex).collect();
    order.shuffle(&mut rng);
    let mut rank = vec![0usize; n + 1];
    for (i, &v) in order.iter().enumerate() {
        rank[v as usize] = i;
    }
    let mut live: Vec<Edge> = Vec::new();
    let mut present: HashSet<Edge> = HashSet::new();
    let mut out = Vec::with_capacity(cfg.build + cfg.steps);

    for step in 0..cfg.build + cfg.steps {
        let building = step < cfg.build;
        let insert = building || rng.gen_bool(cfg.density.clamp(0.0, 1.0));
        if !insert && live.is_empty() {
            continue;
        }
        let cap = if building { cfg.build_batch } else { cfg.batch }.max(1);
        if insert {
            if n < 2 {
                continue;
            }
            let c = rng.gen_range(1..=n as Vertex);
            let mut cand: Vec<Edge> = (1..=n as Vertex)
                .filter(|&w| w != c)
                .flat_map(|w| [Edge::new(c, w), Edge::new(w, c)])
                .filter(|e| !present.contains(e))
                .filter(|e| cfg.mode == Mode::General || rank[e.tail as usize] < rank[e.head as usize])
                .collect();
            if cand.is_empty() {
                continue;
            }
            let k = rng.gen_range(1..=cap.min(cand.len()));
            let (picked, _) = cand.partial_shuffle(&mut rng, k);
            let mut edges = picked.to_vec();
            edges.sort_unstable();
            for &e in &edges {
                present.insert(e);
                live.push(e);
            }
            out.push(Update::InsertCentered { center: c, edges });
        } else {
            let k = rng.gen_range(1..=cap.min(live.len()));
            let mut edges = Vec::with_capacity(k);
            for _ in 0..k {
                let i = rng.gen_range(0..live.len());
                let e = live.swap_remove(i);
                present.remove(&e);
                edges.push(e);
            }
            edges.sort_unstable();
            out.push(Update::DeleteSet { edges });
        }
    }
    out
}

/// Replays `updates` onto a fresh graph.
pub fn replay(n: usize, mode: Mode, updates: &[Update]) -> Result<TimestampedGraph> {
    let mut g = TimestampedGraph::new(n, mode);
    for u in updates {
        match u {
            Update::InsertCentered { center, edges } => {
                g.insert_centered(*center, edges)?;
            }
            Update::DeleteSet { edges } => g.apply_delete(edges)?,
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(t: Vertex, h: Vertex) -> Edge {
        Edge::new(t, h)
    }

    fn graph(n: usize, mode: Mode, batches: &[(Vertex, &[Edge])]) -> TimestampedGraph {
        let mut g = TimestampedGraph::new(n, mode);
        for (c, es) in batches {
            g.insert_centered(*c, es).unwrap();
        }
        g
    }

    fn d3() -> TimestampedGraph {
        graph(3, Mode::Dag, &[(1, &[e(1, 2), e(1, 3)]), (3, &[e(3, 2)])])
    }

    fn p3() -> TimestampedGraph {
        graph(3, Mode::Dag, &[(2, &[e(1, 2), e(2, 3)])])
    }

    fn c3() -> TimestampedGraph {
        graph(3, Mode::General, &[(2, &[e(1, 2), e(2, 3)]), (1, &[e(3, 1)])])
    }

    #[test]
    fn closures() {
        let c = transitive_closure(3, &p3().edges());
        assert!(c.reaches(1, 3) && !c.reaches(3, 1));
        let c = transitive_closure(3, &c3().edges());
        assert!((1..=3).all(|u| (1..=3).all(|v| c.reaches(u, v))));
        let c = transitive_closure(3, &d3().edges());
        assert!(c.reaches(2, 2) && !c.reaches(2, 1) && !c.reaches(2, 3));
        for g in [p3(), c3(), d3()] {
            assert_eq!(floyd_warshall(3, &g.edges()), transitive_closure(3, &g.edges()));
        }
    }

    #[test]
    fn redundancy() {
        assert!(brute_redundant(&d3(), e(1, 2)).unwrap());
        assert!(!brute_redundant(&p3(), e(1, 2)).unwrap());
        assert!(!brute_redundant(&c3(), e(1, 2)).unwrap());
        assert_eq!(brute_redundant(&p3(), e(2, 1)), Err(Error::MissingEdge(e(2, 1))));
    }

    #[test]
    fn dag_reductions() {
        assert_eq!(brute_tr_dag(&d3()).unwrap(), vec![e(1, 3), e(3, 2)]);
        assert_eq!(brute_tr_dag(&p3()).unwrap(), vec![e(1, 2), e(2, 3)]);
        assert_eq!(brute_tr_dag(&TimestampedGraph::new(3, Mode::Dag)).unwrap(), vec![]);
        assert_eq!(brute_tr_dag(&c3()), Err(Error::CyclicInput));
    }

    #[test]
    fn general_reductions() {
        let g = graph(
            4,
            Mode::General,
            &[(1, &[e(1, 2), e(2, 1)]), (3, &[e(3, 4), e(4, 3)]), (1, &[e(1, 3)]), (2, &[e(2, 4)])],
        );
        let tr = brute_tr_general(&g);
        assert_eq!(tr, vec![e(1, 2), e(1, 3), e(2, 1), e(3, 4), e(4, 3)]);
        assert_eq!(validity_violation(4, &g.edges(), &tr), None);

        let g = graph(3, Mode::General, &[(2, &[e(1, 2), e(2, 3)]), (1, &[e(3, 1), e(1, 3)])]);
        assert_eq!(brute_tr_general(&g), vec![e(1, 2), e(2, 3), e(3, 1)]);
        assert_eq!(brute_tr_general(&d3()), brute_tr_dag(&d3()).unwrap());
    }

    #[test]
    fn validity_checks() {
        let d = d3().edges();
        assert_eq!(validity_violation(3, &d, &[e(1, 3), e(3, 2)]), None);
        assert!(validity_violation(3, &d, &d).unwrap().contains("(1,2)"));
        assert_eq!(validity_violation(3, &d, &[e(1, 3)]).unwrap(), "closure differs");
        assert!(validity_violation(3, &d, &[e(2, 1)]).is_some());
    }

    #[test]
    fn path_counts() {
        let d = d3().edges();
        assert_eq!(dag_path_count(3, &d, 1, 2).unwrap(), BigUint::from(2u32));
        assert_eq!(dag_path_count(3, &p3().edges(), 1, 3).unwrap(), BigUint::from(1u32));
        assert_eq!(dag_path_count(3, &d, 2, 2).unwrap(), BigUint::from(1u32));
        assert_eq!(dag_path_count(3, &d, 2, 1).unwrap(), BigUint::from(0u32));
        assert_eq!(dag_path_count(3, &c3().edges(), 1, 2), Err(Error::CyclicInput));
    }

    #[test]
    fn path_counts_grow_exponentially() {
        // A ladder of diamonds: 2^k paths end to end.
        let k = 80u32;
        let mut edges = Vec::new();
        for i in 0..k {
            let (a, b, c, d) = (3 * i + 1, 3 * i + 2, 3 * i + 3, 3 * i + 4);
            edges.extend([e(a, b), e(a, c), e(b, d), e(c, d)]);
        }
        let n = (3 * k + 1) as usize;
        let count = dag_path_count(n, &edges, 1, 3 * k + 1).unwrap();
        assert_eq!(count, BigUint::from(1u32) << k as usize);
    }

    #[test]
    fn ledger_recomputation_on_d3() {
        let l = dag_ledgers(&d3());
        assert_eq!(l[&e(1, 2)], (1, [false, false]));
        assert_eq!(l[&e(1, 3)], (0, [false, false]));
        let g = graph(3, Mode::Dag, &[(3, &[e(3, 2)]), (1, &[e(1, 2), e(1, 3)])]);
        assert_eq!(dag_ledgers(&g)[&e(1, 2)], (0, [true, false]));
    }

    #[test]
    fn streams_are_seeded_and_valid() {
        for mode in [Mode::Dag, Mode::General] {
            let cfg = StreamConfig::new(8, 60, mode, 11);
            let a = random_update_stream(&cfg);
            assert_eq!(a, random_update_stream(&cfg));
            assert_ne!(a, random_update_stream(&StreamConfig { seed: 12, ..cfg.clone() }));
            replay(8, mode, &a).unwrap();
        }
        let cfg = StreamConfig { density: 0.0, build: 5, ..StreamConfig::new(6, 10, Mode::Dag, 3) };
        let s = random_update_stream(&cfg);
        assert!(s[..5].iter().all(|u| matches!(u, Update::InsertCentered { .. })));
        assert!(s[5..].iter().all(|u| matches!(u, Update::DeleteSet { .. })));
    }
}
