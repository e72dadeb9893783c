use thiserror::Error;

use crate::graph::{Edge, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("vertex {vertex} outside 1..={n}")]
    VertexOutOfRange { vertex: Vertex, n: usize },
    #[error("self-loop {0} is not allowed")]
    SelfLoop(Edge),
    #[error("edge {0} is already present")]
    DuplicateEdge(Edge),
    #[error("edge {edge} is not incident to center {center}")]
    NotIncident { center: Vertex, edge: Edge },
    #[error("insertion centered at {0} would create a cycle")]
    CycleCreated(Vertex),
    #[error("edge {0} is not present")]
    MissingEdge(Edge),
    #[error("input graph is not acyclic")]
    CyclicInput,
    #[error("edge {0} is not an inter-SCC edge")]
    NotInterScc(Edge),
    #[error("input is not strongly connected")]
    NotStronglyConnected,
    #[error("matrix is singular modulo p")]
    SingularMatrix,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
