//! Exhaustive small-graph oracle: every vertex of `D(n, q)` with explicit
//! adjacency lists, plus girth, regularity, bipartiteness and components.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::field::PrimeModulus;
use crate::graph::{GraphParams, Vertex, VertexKind};

/// Largest graph `build_oracle` will enumerate.
pub const MAX_ORACLE_VERTICES: u64 = 2_000_000;

/// All `2 q^n` vertices of `D(n, q)`. Points come first, in base-`q` order
/// of their coordinates (first coordinate least significant), then lines.
#[derive(Clone, Debug)]
pub struct GraphOracle {
    params: GraphParams,
    vertices: Vec<Vertex>,
    adjacency: Vec<Vec<u32>>,
}

impl GraphOracle {
    pub fn params(&self) -> &GraphParams {
        &self.params
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn adjacency(&self) -> &[Vec<u32>] {
        &self.adjacency
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Position of `v` in [`Self::vertices`].
    pub fn index_of(&self, v: &Vertex) -> Option<usize> {
        self.params.check_vertex(v).ok()?;
        Some(vertex_index(v, self.params.modulus().value(), self.half()))
    }

    fn half(&self) -> usize {
        self.vertices.len() / 2
    }
}

fn vertex_index(v: &Vertex, q: u64, half: usize) -> usize {
    let base = v
        .coords()
        .iter()
        .rev()
        .fold(0usize, |acc, &c| acc * q as usize + c as usize);
    match v.kind() {
        VertexKind::Point => base,
        VertexKind::Line => half + base,
    }
}

/// Enumerates `D(n, q)` for a prime `q`, refusing graphs with more than
/// [`MAX_ORACLE_VERTICES`] vertices.
pub fn build_oracle(n: usize, q: u64) -> Result<GraphOracle> {
    let modulus = PrimeModulus::new(q)?;
    let params = GraphParams::new(n, modulus)?;
    let half = u32::try_from(n)
        .ok()
        .and_then(|e| q.checked_pow(e))
        .filter(|&h| h <= MAX_ORACLE_VERTICES / 2)
        .ok_or_else(|| {
            Error::parameter(format!(
                "D({n},{q}) has more than {MAX_ORACLE_VERTICES} vertices"
            ))
        })? as usize;

    let mut vertices = Vec::with_capacity(2 * half);
    for kind in [VertexKind::Point, VertexKind::Line] {
        for mut k in 0..half {
            let coords = (0..n)
                .map(|_| {
                    let c = (k % q as usize) as u64;
                    k /= q as usize;
                    c
                })
                .collect();
            vertices.push(Vertex::new(kind, coords));
        }
    }

    let adjacency = vertices
        .iter()
        .map(|v| {
            params.all_neighbors(v).map(|ns| {
                ns.iter()
                    .map(|u| vertex_index(u, q, half) as u32)
                    .collect::<Vec<_>>()
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(GraphOracle {
        params,
        vertices,
        adjacency,
    })
}

/// Exact girth by breadth-first search from every vertex; `None` for a forest.
pub fn measure_girth(oracle: &GraphOracle) -> Option<usize> {
    let adj = &oracle.adjacency;
    let count = adj.len();
    let mut dist = vec![u32::MAX; count];
    let mut parent = vec![u32::MAX; count];
    let mut touched = Vec::new();
    let mut queue = VecDeque::new();
    let mut best = usize::MAX;

    for root in 0..count {
        for &t in &touched {
            dist[t] = u32::MAX;
            parent[t] = u32::MAX;
        }
        touched.clear();
        queue.clear();
        dist[root] = 0;
        touched.push(root);
        queue.push_back(root);
        while let Some(u) = queue.pop_front() {
            // A cycle found from here is at least 2 d(u) + 1 long.
            if 2 * dist[u] as usize + 1 >= best {
                break;
            }
            for &v in &adj[u] {
                let v = v as usize;
                if dist[v] == u32::MAX {
                    dist[v] = dist[u] + 1;
                    parent[v] = u as u32;
                    touched.push(v);
                    queue.push_back(v);
                } else if parent[u] as usize != v {
                    best = best.min(dist[u] as usize + dist[v] as usize + 1);
                }
            }
        }
    }
    (best != usize::MAX).then_some(best)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureReport {
    pub vertices: usize,
    pub edges: usize,
    pub min_degree: usize,
    pub max_degree: usize,
    /// Every vertex has exactly `q` neighbors.
    pub regular: bool,
    /// Adjacency is symmetric (`u ~ v` iff `v ~ u`).
    pub symmetric: bool,
    /// Every edge joins a point to a line.
    pub bipartite: bool,
    pub components: usize,
}

pub fn structure_checks(oracle: &GraphOracle) -> StructureReport {
    let adj = &oracle.adjacency;
    let q = oracle.params.modulus().value() as usize;
    let degrees = adj.iter().map(Vec::len);
    let min_degree = degrees.clone().min().unwrap_or(0);
    let max_degree = degrees.max().unwrap_or(0);

    let symmetric = adj
        .iter()
        .enumerate()
        .all(|(u, ns)| ns.iter().all(|&v| adj[v as usize].contains(&(u as u32))));
    let bipartite = adj.iter().enumerate().all(|(u, ns)| {
        let kind = oracle.vertices[u].kind();
        ns.iter()
            .all(|&v| oracle.vertices[v as usize].kind() != kind)
    });

    StructureReport {
        vertices: adj.len(),
        edges: oracle.edge_count(),
        min_degree,
        max_degree,
        regular: min_degree == q && max_degree == q,
        symmetric,
        bipartite,
        components: component_labels(oracle).1,
    }
}

/// Connected component of every vertex, and the number of components.
pub fn component_labels(oracle: &GraphOracle) -> (Vec<usize>, usize) {
    let adj = &oracle.adjacency;
    let mut label = vec![usize::MAX; adj.len()];
    let mut count = 0;
    let mut stack = Vec::new();
    for root in 0..adj.len() {
        if label[root] != usize::MAX {
            continue;
        }
        label[root] = count;
        stack.push(root);
        while let Some(u) = stack.pop() {
            for &v in &adj[u] {
                if label[v as usize] == usize::MAX {
                    label[v as usize] = count;
                    stack.push(v as usize);
                }
            }
        }
        count += 1;
    }
    (label, count)
}
