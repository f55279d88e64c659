//! Undirected graphs with positive edge lengths.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::VertexId;

pub type EdgeId = usize;

/// An undirected edge stored with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
    pub length: f64,
}

impl Edge {
    pub fn other(&self, w: VertexId) -> VertexId {
        if w == self.u {
            self.v
        } else {
            self.u
        }
    }

    pub fn has_endpoint(&self, w: VertexId) -> bool {
        self.u == w || self.v == w
    }
}

#[derive(Debug, Clone, Default)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<Edge>,
    index: HashMap<(VertexId, VertexId), EdgeId>,
    adj: Vec<Vec<(VertexId, EdgeId)>>,
}

impl PartialEq for WeightedGraph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.edges == other.edges
    }
}

impl WeightedGraph {
    pub fn new(n: usize) -> Self {
        WeightedGraph {
            n,
            edges: Vec::new(),
            index: HashMap::new(),
            adj: vec![Vec::new(); n],
        }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (VertexId, VertexId, f64)>) -> Result<Self> {
        let mut g = Self::new(n);
        for (u, v, l) in edges {
            g.add_edge(u, v, l)?;
        }
        Ok(g)
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id]
    }

    /// Neighbors of `v` as `(neighbor, edge id)` in insertion order.
    pub fn neighbors(&self, v: VertexId) -> &[(VertexId, EdgeId)] {
        &self.adj[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn add_vertex(&mut self) -> VertexId {
        self.adj.push(Vec::new());
        self.n += 1;
        self.n - 1
    }

    pub fn find_edge(&self, a: VertexId, b: VertexId) -> Option<EdgeId> {
        self.index.get(&(a.min(b), a.max(b))).copied()
    }

    pub fn add_edge(&mut self, a: VertexId, b: VertexId, length: f64) -> Result<EdgeId> {
        if a >= self.n || b >= self.n {
            return Err(Error::InvalidGraph(format!(
                "edge {{{a},{b}}} references a vertex outside 0..{}",
                self.n
            )));
        }
        if a == b {
            return Err(Error::InvalidGraph(format!("self-loop at vertex {a}")));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGraph(format!(
                "edge {{{a},{b}}} has non-positive length {length}"
            )));
        }
        let (u, v) = (a.min(b), a.max(b));
        if self.index.contains_key(&(u, v)) {
            return Err(Error::InvalidGraph(format!("duplicate edge {{{u},{v}}}")));
        }
        let id = self.edges.len();
        self.edges.push(Edge { u, v, length });
        self.index.insert((u, v), id);
        self.adj[u].push((v, id));
        self.adj[v].push((u, id));
        Ok(id)
    }

    /// Adds the edge, or shortens an existing one on the same pair.
    pub fn add_or_shorten(&mut self, a: VertexId, b: VertexId, length: f64) -> Result<EdgeId> {
        match self.find_edge(a, b) {
            Some(id) => {
                if length < self.edges[id].length {
                    self.edges[id].length = length;
                }
                Ok(id)
            }
            None => self.add_edge(a, b, length),
        }
    }

    /// Removes edge `id`; the last edge takes its id.
    pub fn remove_edge(&mut self, id: EdgeId) -> Edge {
        let removed = self.edges.swap_remove(id);
        self.rebuild_index();
        removed
    }

    fn rebuild_index(&mut self) {
        self.index.clear();
        self.adj = vec![Vec::new(); self.n];
        for (id, e) in self.edges.iter().enumerate() {
            self.index.insert((e.u, e.v), id);
            self.adj[e.u].push((e.v, id));
            self.adj[e.v].push((e.u, id));
        }
    }

    /// Component label per vertex; labels are the smallest vertex id in
    /// each component.
    pub fn components(&self) -> Vec<VertexId> {
        let mut label = vec![usize::MAX; self.n];
        for s in 0..self.n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = s;
            let mut stack = vec![s];
            while let Some(x) = stack.pop() {
                for &(y, _) in &self.adj[x] {
                    if label[y] == usize::MAX {
                        label[y] = s;
                        stack.push(y);
                    }
                }
            }
        }
        label
    }

    pub fn check_connected(&self) -> Result<()> {
        let label = self.components();
        match label.iter().position(|&l| l != 0) {
            Some(b) => Err(Error::DisconnectedGraph { a: 0, b }),
            None => Ok(()),
        }
    }

    pub fn is_connected(&self) -> bool {
        self.check_connected().is_ok()
    }

    pub fn is_tree(&self) -> bool {
        self.n > 0 && self.edges.len() + 1 == self.n && self.is_connected()
    }

    /// Single-source shortest path lengths; unreachable vertices get
    /// `f64::INFINITY`.
    pub fn dijkstra(&self, source: VertexId) -> Vec<f64> {
        let mut dist = vec![f64::INFINITY; self.n];
        let mut heap = BinaryHeap::new();
        dist[source] = 0.0;
        heap.push(State { cost: 0.0, vertex: source });
        while let Some(State { cost, vertex }) = heap.pop() {
            if cost > dist[vertex] {
                continue;
            }
            for &(w, id) in &self.adj[vertex] {
                let next = cost + self.edges[id].length;
                if next < dist[w] {
                    dist[w] = next;
                    heap.push(State { cost: next, vertex: w });
                }
            }
        }
        dist
    }
}

#[derive(Copy, Clone, PartialEq)]
struct State {
    cost: f64,
    vertex: VertexId,
}

impl Eq for State {}

impl Ord for State {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for State {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_edges() {
        let mut g = WeightedGraph::new(3);
        assert!(g.add_edge(0, 0, 1.0).is_err());
        assert!(g.add_edge(0, 1, 0.0).is_err());
        assert!(g.add_edge(0, 3, 1.0).is_err());
        g.add_edge(1, 0, 2.0).unwrap();
        assert!(g.add_edge(0, 1, 3.0).is_err());
        assert_eq!(g.edge(0).u, 0);
        assert_eq!(g.edge(0).v, 1);
    }

    #[test]
    fn tree_detection() {
        let g = WeightedGraph::from_edges(3, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        assert!(g.is_tree());
        let g = WeightedGraph::from_edges(3, [(0, 1, 1.0)]).unwrap();
        assert_eq!(g.check_connected(), Err(Error::DisconnectedGraph { a: 0, b: 2 }));
        assert!(!g.is_tree());
    }

    #[test]
    fn remove_keeps_index_consistent() {
        let mut g = WeightedGraph::from_edges(3, [(0, 1, 1.0), (1, 2, 2.0), (0, 2, 5.0)]).unwrap();
        g.remove_edge(0);
        assert_eq!(g.find_edge(0, 1), None);
        assert_eq!(g.edge(g.find_edge(0, 2).unwrap()).length, 5.0);
        assert_eq!(g.dijkstra(0), vec![0.0, 7.0, 5.0]);
    }

    #[test]
    fn shorten() {
        let mut g = WeightedGraph::from_edges(2, [(0, 1, 3.0)]).unwrap();
        g.add_or_shorten(1, 0, 2.0).unwrap();
        g.add_or_shorten(1, 0, 4.0).unwrap();
        assert_eq!(g.n_edges(), 1);
        assert_eq!(g.edge(0).length, 2.0);
    }
}
