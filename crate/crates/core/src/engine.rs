//! Common interface over the three engines.

use std::fmt;
use std::str::FromStr;

use crate::algebraic::AlgebraicEngine;
use crate::error::{Error, Result};
use crate::graph::{Edge, Mode, TimestampedGraph, Update, Vertex};
use crate::oracle;
use crate::tr_dag::DagEngine;
use crate::tr_general::GeneralEngine;

pub trait Engine {
    fn name(&self) -> &'static str;

    fn graph(&self) -> &TimestampedGraph;

    fn insert_centered(&mut self, center: Vertex, edges: &[Edge]) -> Result<()>;

    fn delete_edges(&mut self, edges: &[Edge]) -> Result<()>;

    /// Edges of the maintained reduction, sorted.
    fn tr_edges(&self) -> Vec<Edge>;

    fn elementary_ops(&self) -> u64;

    fn mode(&self) -> Mode {
        self.graph().mode()
    }

    /// `true` iff the live edge `e` is left out of the reduction.
    fn is_redundant(&self, e: Edge) -> Result<bool> {
        if !self.graph().contains(e) {
            return Err(Error::MissingEdge(e));
        }
        Ok(self.tr_edges().binary_search(&e).is_err())
    }

    fn apply(&mut self, update: &Update) -> Result<()> {
        match update {
            Update::InsertCentered { center, edges } => self.insert_centered(*center, edges),
            Update::DeleteSet { edges } => self.delete_edges(edges),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EngineKind {
    Comb,
    Alg,
    Oracle,
}

impl EngineKind {
    pub const ALL: [EngineKind; 3] = [EngineKind::Comb, EngineKind::Alg, EngineKind::Oracle];

    pub fn build(self, n: usize, mode: Mode, seed: u64) -> Box<dyn Engine + Send> {
        match (self, mode) {
            (EngineKind::Comb, Mode::Dag) => Box::new(DagEngine::new(n)),
            (EngineKind::Comb, Mode::General) => Box::new(GeneralEngine::new(n)),
            (EngineKind::Alg, _) => Box::new(AlgebraicEngine::new(n, mode, seed)),
            (EngineKind::Oracle, _) => Box::new(OracleEngine::new(n, mode)),
        }
    }
}

impl fmt::Display for EngineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EngineKind::Comb => "comb",
            EngineKind::Alg => "alg",
            EngineKind::Oracle => "oracle",
        })
    }
}

impl FromStr for EngineKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "comb" => Ok(EngineKind::Comb),
            "alg" => Ok(EngineKind::Alg),
            "oracle" => Ok(EngineKind::Oracle),
            other => Err(format!("unknown engine `{other}`")),
        }
    }
}

/// Recomputes the reduction from scratch after every update.
#[derive(Clone, Debug)]
pub struct OracleEngine {
    g: TimestampedGraph,
    tr: Vec<Edge>,
    ops: u64,
}

impl OracleEngine {
    pub fn new(n: usize, mode: Mode) -> Self {
        OracleEngine { g: TimestampedGraph::new(n, mode), tr: Vec::new(), ops: 0 }
    }

    fn refresh(&mut self) {
        self.tr = match self.g.mode() {
            Mode::Dag => oracle::brute_tr_dag(&self.g).expect("graph kept acyclic"),
            Mode::General => oracle::brute_tr_general(&self.g),
        };
        self.ops += (self.g.n() * (self.g.n() + self.g.m())) as u64;
    }
}

impl Engine for OracleEngine {
    fn name(&self) -> &'static str {
        "oracle"
    }

    fn graph(&self) -> &TimestampedGraph {
        &self.g
    }

    fn insert_centered(&mut self, center: Vertex, edges: &[Edge]) -> Result<()> {
        self.g.insert_centered(center, edges)?;
        self.refresh();
        Ok(())
    }

    fn delete_edges(&mut self, edges: &[Edge]) -> Result<()> {
        self.g.apply_delete(edges)?;
        self.refresh();
        Ok(())
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

    #[test]
    fn kinds_round_trip() {
        for k in EngineKind::ALL {
            assert_eq!(k.to_string().parse::<EngineKind>(), Ok(k));
        }
        assert!("fast".parse::<EngineKind>().is_err());
    }

    #[test]
    fn every_engine_reduces_d3() {
        for mode in [Mode::Dag, Mode::General] {
            for k in EngineKind::ALL {
                let mut eng = k.build(3, mode, 7);
                eng.insert_centered(1, &[Edge::new(1, 2), Edge::new(1, 3)]).unwrap();
                eng.insert_centered(3, &[Edge::new(3, 2)]).unwrap();
                assert_eq!(eng.tr_edges(), vec![Edge::new(1, 3), Edge::new(3, 2)], "{k} {mode}");
                assert!(eng.is_redundant(Edge::new(1, 2)).unwrap());
                assert_eq!(
                    eng.is_redundant(Edge::new(2, 1)),
                    Err(Error::MissingEdge(Edge::new(2, 1)))
                );
            }
        }
    }
}
