//! Triangle-free regular base graphs.

use crate::error::{Error, Result};

use super::{cycle, Graph};

/// Names accepted by [`base_graph`].
pub const BASE_NAMES: [&str; 3] = ["c5", "petersen", "hoffman-singleton"];

/// A graph checked to be triangle-free and d-regular with d >= 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseGraph {
    graph: Graph,
    degree: usize,
}

impl BaseGraph {
    pub fn new(graph: Graph) -> Result<Self> {
        let degree = graph.regular_degree().ok_or_else(|| Error::invalid("base", "graph is not regular"))?;
        if degree == 0 {
            return Err(Error::invalid("base", "graph has no edges"));
        }
        if let Some([a, b, c]) = graph.find_triangle() {
            return Err(Error::invalid("base", format!("graph has a triangle {a}-{b}-{c}")));
        }
        Ok(BaseGraph { graph, degree })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn into_graph(self) -> Graph {
        self.graph
    }

    pub fn degree(&self) -> usize {
        self.degree
    }
}

pub fn base_graph(name: &str) -> Result<BaseGraph> {
    let graph = match name.to_ascii_lowercase().replace('_', "-").as_str() {
        "c5" => cycle(5)?,
        "petersen" => petersen(),
        "hoffman-singleton" => hoffman_singleton(),
        other => {
            return Err(Error::invalid(
                "base",
                format!("unknown base graph {other:?}; expected one of {}", BASE_NAMES.join(", ")),
            ))
        }
    };
    BaseGraph::new(graph)
}

/// Outer 5-cycle 0..5, inner pentagram 5..10, spokes i -- i+5.
pub fn petersen() -> Graph {
    let edges = (0..5).flat_map(|i| [(i, (i + 1) % 5), (5 + i, 5 + (i + 2) % 5), (i, i + 5)]);
    Graph::new(10, edges).expect("petersen is simple")
}

/// Robertson's construction: pentagons P_h on vertices 5h + j, pentagrams
/// Q_i on 25 + 5i + k, and P_h[j] joined to Q_i[(h i + j) mod 5].
pub fn hoffman_singleton() -> Graph {
    let p = |h: usize, j: usize| 5 * h + j % 5;
    let q = |i: usize, k: usize| 25 + 5 * i + k % 5;
    let mut edges = Vec::with_capacity(175);
    for h in 0..5 {
        for j in 0..5 {
            edges.push((p(h, j), p(h, j + 1)));
            edges.push((q(h, j), q(h, j + 2)));
            for i in 0..5 {
                edges.push((p(h, j), q(i, h * i + j)));
            }
        }
    }
    Graph::new(50, edges).expect("hoffman-singleton is simple")
}
