//! Weighted undirected simple graphs, the named families used throughout the
//! toolkit, and the edge-list file format.

mod family;
mod io;
mod weight;

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use nalgebra::DMatrix;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

pub use family::{
    cartesian_product, compressed_q4, complete, cycle, hadamard, hadamard_matrix, hypercube,
    path, CompressedQ4, Family,
};
pub use io::{parse_edge_list, write_edge_list};
pub use weight::Weight;

/// Index of a vertex in its graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct VertexId(pub usize);

impl VertexId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl From<usize> for VertexId {
    fn from(i: usize) -> Self {
        VertexId(i)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A weighted undirected graph without loops or parallel edges.
///
/// Graphs are immutable once built; every constructor validates the
/// invariants (positive weights, no self-loops, no duplicate pairs).
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    edges: BTreeMap<(usize, usize), Weight>,
    adj: Vec<Vec<(usize, Weight)>>,
    labels: Option<Vec<String>>,
}

impl Graph {
    /// Builds a graph from `(u, v, w)` triples.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, Weight)>,
    {
        let mut map = BTreeMap::new();
        for (u, v, w) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({u}, {v}) references a vertex outside 0..{n}"
                )));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {u}")));
            }
            if !w.is_positive() {
                return Err(Error::InvalidGraph(format!(
                    "edge ({u}, {v}) has non-positive weight {w}"
                )));
            }
            let key = (u.min(v), u.max(v));
            if map.insert(key, w).is_some() {
                return Err(Error::InvalidGraph(format!(
                    "duplicate edge ({}, {})",
                    key.0, key.1
                )));
            }
        }
        let mut adj = vec![Vec::new(); n];
        for (&(u, v), &w) in &map {
            adj[u].push((v, w));
            adj[v].push((u, w));
        }
        for list in &mut adj {
            list.sort_by_key(|&(x, _)| x);
        }
        Ok(Graph {
            n,
            edges: map,
            adj,
            labels: None,
        })
    }

    /// Builds an unweighted graph from vertex pairs.
    pub fn unweighted<I>(n: usize, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Self::from_edges(n, pairs.into_iter().map(|(u, v)| (u, v, Weight::ONE)))
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(Error::InvalidGraph(format!(
                "{} labels for {} vertices",
                labels.len(),
                self.n
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Edges as `(u, v, w)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, Weight)> + '_ {
        self.edges.iter().map(|(&(u, v), &w)| (u, v, w))
    }

    pub fn neighbors(&self, u: usize) -> &[(usize, Weight)] {
        &self.adj[u]
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<Weight> {
        self.edges.get(&(u.min(v), u.max(v))).copied()
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adj[u].len()
    }

    pub fn weighted_degree(&self, u: usize) -> f64 {
        self.adj[u].iter().map(|(_, w)| w.value()).sum()
    }

    /// True when every edge has exact weight one.
    pub fn is_unweighted(&self) -> bool {
        self.edges.values().all(Weight::is_one)
    }

    pub fn vertex(&self, index: usize) -> Result<VertexId> {
        if index < self.n {
            Ok(VertexId(index))
        } else {
            Err(Error::InvalidVertex { index, n: self.n })
        }
    }

    pub fn adjacency_matrix(&self) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.n, self.n);
        for (&(u, v), w) in &self.edges {
            a[(u, v)] = w.value();
            a[(v, u)] = w.value();
        }
        a
    }

    /// Hop distances from `source`; `None` for unreachable vertices.
    pub fn distances_from(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        let mut queue = VecDeque::new();
        dist[source] = Some(0);
        queue.push_back(source);
        while let Some(x) = queue.pop_front() {
            let dx = dist[x].unwrap();
            for &(y, _) in &self.adj[x] {
                if dist[y].is_none() {
                    dist[y] = Some(dx + 1);
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    /// All-pairs hop distances, or `None` if the graph is disconnected.
    pub fn distance_matrix(&self) -> Option<Vec<Vec<usize>>> {
        (0..self.n)
            .map(|u| self.distances_from(u).into_iter().collect::<Option<Vec<_>>>())
            .collect()
    }

    pub fn is_connected(&self) -> bool {
        self.n == 0 || self.distances_from(0).iter().all(Option::is_some)
    }

    pub fn stats(&self) -> GraphStats {
        let diameter = match self.distance_matrix() {
            Some(d) => Diameter::Finite(d.iter().flatten().copied().max().unwrap_or(0)),
            None => Diameter::Infinite,
        };
        GraphStats {
            n: self.n,
            m: self.edge_count(),
            diameter,
            degrees: (0..self.n).map(|u| self.degree(u)).collect(),
        }
    }
}

/// Hop diameter; disconnected graphs have infinite diameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Diameter {
    Finite(usize),
    Infinite,
}

impl Diameter {
    pub fn finite(self) -> Option<usize> {
        match self {
            Diameter::Finite(d) => Some(d),
            Diameter::Infinite => None,
        }
    }
}

impl Serialize for Diameter {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Diameter::Finite(d) => s.serialize_u64(*d as u64),
            Diameter::Infinite => s.serialize_str("infinite"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphStats {
    pub n: usize,
    pub m: usize,
    pub diameter: Diameter,
    pub degrees: Vec<usize>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_invalid_edges() {
        assert!(Graph::unweighted(3, [(0, 0)]).is_err());
        assert!(Graph::unweighted(3, [(0, 1), (1, 0)]).is_err());
        assert!(Graph::unweighted(3, [(0, 3)]).is_err());
        assert!(Graph::from_edges(2, [(0, 1, Weight::integer(0))]).is_err());
        assert!(Graph::from_edges(2, [(0, 1, Weight::Real(-1.0))]).is_err());
    }

    #[test]
    fn adjacency_is_symmetric_with_zero_diagonal() {
        let g = Graph::from_edges(3, [(0, 1, Weight::integer(2)), (1, 2, Weight::ONE)]).unwrap();
        let a = g.adjacency_matrix();
        assert_eq!(a, a.transpose());
        assert!((0..3).all(|i| a[(i, i)] == 0.0));
        assert_eq!(a[(1, 0)], 2.0);
    }

    #[test]
    fn stats_of_small_graphs() {
        let p5 = path(5).unwrap();
        let s = p5.stats();
        assert_eq!((s.m, s.diameter), (4, Diameter::Finite(4)));
        let c9 = cycle(9).unwrap();
        assert_eq!(c9.stats().diameter, Diameter::Finite(4));
        assert_eq!(c9.stats().m, 9);
        let q4 = hypercube(4).unwrap();
        assert_eq!((q4.stats().m, q4.stats().diameter), (32, Diameter::Finite(4)));
    }

    #[test]
    fn disconnected_diameter_is_infinite() {
        let g = Graph::unweighted(4, [(0, 1), (2, 3)]).unwrap();
        assert_eq!(g.stats().diameter, Diameter::Infinite);
        assert_eq!(
            serde_json::to_string(&g.stats().diameter).unwrap(),
            "\"infinite\""
        );
    }
}
