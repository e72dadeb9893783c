//! Randomized algebraic engine.
//!
//! The engine keeps the inverse of a matrix whose nonzeros are independent
//! random field elements, one per edge.
//!
//! * DAG mode works on the three-layer graph `G'` over `V ∪ V' ∪ V''` with
//!   edges `uv`, `uv'` and `u'v''` for every `uv ∈ E`. With `M = I - Ã(G')`,
//!   edge `xy` is redundant iff `Minv[x][y''] != 0`.
//! * General mode uses `M = Ã(G)` plus a random self-loop on every vertex.
//!   A parallel group `F` from component `R` to `T` (representatives `r`,
//!   `t`) is redundant iff `Minv[r][t] + Σ x̄(uv) Minv[r][u] Minv[v][t] != 0`.

pub mod field;
pub mod inverse;

use std::collections::{BTreeMap, HashMap};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use field::{Fp, P};
pub use inverse::InverseState;

use crate::engine::Engine;
use crate::error::{Error, Result};
use crate::graph::{Edge, Mode, Timestamp, TimestampedGraph, Update, Vertex};
use crate::scc;
use crate::tr_general::minimal_scss;

/// Copy `k ∈ {0,1,2}` of vertex `v` in the layered graph, 1-based.
pub fn layer(n: usize, v: Vertex, k: usize) -> Vertex {
    (k * n) as Vertex + v
}

/// The three edges of `G'` standing for `e`.
pub fn lift(n: usize, e: Edge) -> [Edge; 3] {
    [
        Edge::new(e.tail, e.head),
        Edge::new(e.tail, layer(n, e.head, 1)),
        Edge::new(layer(n, e.tail, 1), layer(n, e.head, 2)),
    ]
}

/// `G'` as an edge list over `1..=3n`. Requires an acyclic input.
pub fn build_reduction_graph(n: usize, edges: &[Edge]) -> Result<Vec<Edge>> {
    let comp = scc::components_of(n, edges);
    if (1..=n).any(|v| comp[v] != v as Vertex) {
        return Err(Error::CyclicInput);
    }
    Ok(edges.iter().flat_map(|&e| lift(n, e)).collect())
}

/// Edge changes to `G'` caused by `update`: `true` for insertions.
pub fn translate_update(n: usize, update: &Update) -> Vec<(bool, Edge)> {
    let (ins, edges) = match update {
        Update::InsertCentered { edges, .. } => (true, edges),
        Update::DeleteSet { edges } => (false, edges),
    };
    edges.iter().flat_map(|&e| lift(n, e)).map(|e| (ins, e)).collect()
}

#[derive(Clone, Debug)]
pub struct AlgebraicEngine {
    g: TimestampedGraph,
    rng: ChaCha8Rng,
    /// Variable of every nonzero off the identity, keyed by matrix cell.
    weights: HashMap<(usize, usize), Fp>,
    state: InverseState,
    tr: Vec<Edge>,
    groups: Vec<(Vec<Edge>, bool)>,
    ops: u64,
}

impl AlgebraicEngine {
    pub fn new(n: usize, mode: Mode, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut weights = HashMap::new();
        let state = match mode {
            Mode::Dag => InverseState::identity(3 * n),
            Mode::General => loop {
                let mut m = vec![Fp::ZERO; n * n];
                for i in 0..n {
                    let w = Fp::random_nonzero(&mut rng);
                    weights.insert((i, i), w);
                    m[i * n + i] = w;
                }
                if let Ok(s) = InverseState::from_matrix(n, m) {
                    break s;
                }
            },
        };
        AlgebraicEngine {
            g: TimestampedGraph::new(n, mode),
            rng,
            weights,
            state,
            tr: Vec::new(),
            groups: Vec::new(),
            ops: 0,
        }
    }

    pub fn graph(&self) -> &TimestampedGraph {
        &self.g
    }

    pub fn inverse_state(&self) -> &InverseState {
        &self.state
    }

    fn cells(&self, e: Edge) -> Vec<(usize, usize)> {
        let n = self.g.n();
        match self.g.mode() {
            Mode::Dag => lift(n, e)
                .iter()
                .map(|f| (f.tail as usize - 1, f.head as usize - 1))
                .collect(),
            Mode::General => vec![(e.tail as usize - 1, e.head as usize - 1)],
        }
    }

    /// Matrix entry carried by a cell holding variable `w`.
    fn entry(&self, w: Fp) -> Fp {
        match self.g.mode() {
            Mode::Dag => -w,
            Mode::General => w,
        }
    }

    pub fn insert_centered(&mut self, center: Vertex, edges: &[Edge]) -> Result<()> {
        self.g.insert_centered(center, edges)?;
        let n = self.g.n();
        let c = center as usize - 1;
        let center_rows = [c, n + c];
        let mut rows: BTreeMap<usize, Vec<(usize, Fp)>> = BTreeMap::new();
        let mut cols: BTreeMap<usize, Vec<(usize, Fp)>> = BTreeMap::new();
        for &e in edges {
            for cell in self.cells(e) {
                let w = Fp::random_nonzero(&mut self.rng);
                self.weights.insert(cell, w);
                let v = self.entry(w);
                if center_rows.contains(&cell.0) {
                    rows.entry(cell.0).or_default().push((cell.1, v));
                } else {
                    cols.entry(cell.1).or_default().push((cell.0, v));
                }
            }
        }
        // One row or column replacement per touched line of the matrix.
        let dim = self.state.dim();
        let mut result = Ok(());
        for (r, entries) in rows {
            let mut row: Vec<Fp> = (0..dim).map(|j| self.state.matrix(r, j)).collect();
            for (j, v) in entries {
                row[j] = v;
            }
            self.ops += (dim * dim) as u64;
            if result.is_ok() {
                result = self.state.row_update(r, &row);
            }
        }
        for (cc, entries) in cols {
            let mut col: Vec<Fp> = (0..dim).map(|i| self.state.matrix(i, cc)).collect();
            for (i, v) in entries {
                col[i] = v;
            }
            self.ops += (dim * dim) as u64;
            if result.is_ok() {
                result = self.state.column_update(cc, &col);
            }
        }
        if result.is_err() {
            self.reinit()?;
        }
        self.assemble();
        Ok(())
    }

    pub fn delete_edges(&mut self, edges: &[Edge]) -> Result<()> {
        self.g.apply_delete(edges)?;
        let dim = self.state.dim();
        let mut result = Ok(());
        for &e in edges {
            for cell in self.cells(e) {
                let w = self.weights.remove(&cell).expect("weighted cell");
                let v = self.entry(w);
                self.ops += (dim * dim) as u64;
                if result.is_ok() {
                    result = self.state.rank1_update(cell.0, cell.1, -v);
                }
            }
        }
        if result.is_err() {
            self.reinit()?;
        }
        self.assemble();
        Ok(())
    }

    /// Draws every variable afresh and inverts from scratch.
    fn reinit(&mut self) -> Result<()> {
        let dim = self.state.dim();
        for _ in 0..8 {
            self.ops += (dim * dim * dim) as u64;
            let mut cells: Vec<(usize, usize)> = self.weights.keys().copied().collect();
            cells.sort_unstable();
            let mut m = vec![Fp::ZERO; dim * dim];
            if self.g.mode() == Mode::Dag {
                for i in 0..dim {
                    m[i * dim + i] = Fp::ONE;
                }
            }
            for cell in cells {
                let w = Fp::random_nonzero(&mut self.rng);
                self.weights.insert(cell, w);
                m[cell.0 * dim + cell.1] += self.entry(w);
            }
            if let Ok(s) = InverseState::from_matrix(dim, m) {
                self.state = s;
                return Ok(());
            }
        }
        Err(Error::SingularMatrix)
    }

    fn assemble(&mut self) {
        match self.g.mode() {
            Mode::Dag => self.assemble_dag(),
            Mode::General => self.assemble_general(),
        }
    }

    fn assemble_dag(&mut self) {
        let n = self.g.n();
        let mut tr: Vec<Edge> = self
            .g
            .edges()
            .into_iter()
            .filter(|e| {
                let y2 = layer(n, e.head, 2) as usize - 1;
                self.state.inverse(e.tail as usize - 1, y2).is_zero()
            })
            .collect();
        self.ops += self.g.m() as u64;
        tr.sort_unstable();
        self.tr = tr;
    }

    /// The group identity for members `group` between representatives `r`
    /// and `t`; `true` means some route avoids the whole group.
    pub fn group_redundant(&self, group: &[Edge], r: Vertex, t: Vertex) -> bool {
        let inv = |a: Vertex, b: Vertex| self.state.inverse(a as usize - 1, b as usize - 1);
        let mut total = inv(r, t);
        for &e in group {
            let w = self.weights[&(e.tail as usize - 1, e.head as usize - 1)];
            total += w * inv(r, e.tail) * inv(e.head, t);
        }
        !total.is_zero()
    }

    fn assemble_general(&mut self) {
        let n = self.g.n();
        let comp = scc::components(&self.g, Timestamp::MAX);
        let by_ts: Vec<Edge> = self.g.edges_with_ts().into_iter().map(|(e, _)| e).collect();
        self.ops += (n + by_ts.len()) as u64;
        let mut members: Vec<Vec<Vertex>> = vec![Vec::new(); n + 1];
        for v in self.g.vertices() {
            members[comp[v as usize] as usize].push(v);
        }
        let mut intra: Vec<Vec<Edge>> = vec![Vec::new(); n + 1];
        let mut groups: BTreeMap<(Vertex, Vertex), Vec<Edge>> = BTreeMap::new();
        for &e in &by_ts {
            let (cx, cy) = (comp[e.tail as usize], comp[e.head as usize]);
            if cx == cy {
                intra[cx as usize].push(e);
            } else {
                groups.entry((cx, cy)).or_default().push(e);
            }
        }
        let mut tr = Vec::new();
        for c in 1..=n {
            if members[c].len() > 1 {
                tr.extend(minimal_scss(&members[c], &intra[c]).expect("component is strongly connected"));
            }
        }
        self.groups.clear();
        for ((r, t), group) in groups {
            self.ops += group.len() as u64;
            let redundant = self.group_redundant(&group, r, t);
            if !redundant {
                tr.push(group[0]);
            }
            self.groups.push((group, redundant));
        }
        tr.sort_unstable();
        self.tr = tr;
    }

    /// Every parallel group (members in timestamp order) with its verdict.
    /// Empty in DAG mode.
    pub fn group_classification(&self) -> &[(Vec<Edge>, bool)] {
        &self.groups
    }

    pub fn tr_edges(&self) -> Vec<Edge> {
        self.tr.clone()
    }
}

impl Engine for AlgebraicEngine {
    fn name(&self) -> &'static str {
        "alg"
    }

    fn graph(&self) -> &TimestampedGraph {
        &self.g
    }

    fn insert_centered(&mut self, center: Vertex, edges: &[Edge]) -> Result<()> {
        AlgebraicEngine::insert_centered(self, center, edges)
    }

    fn delete_edges(&mut self, edges: &[Edge]) -> Result<()> {
        AlgebraicEngine::delete_edges(self, edges)
    }

    fn tr_edges(&self) -> Vec<Edge> {
        self.tr.clone()
    }

    fn elementary_ops(&self) -> u64 {
        self.ops
    }
}
