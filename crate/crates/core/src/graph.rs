//! Finite simple graphs over dense vertex ids `0..n`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::set::VertexSet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("endpoint {vertex} out of range for graph on {n} vertices")]
    OutOfRange { vertex: usize, n: usize },
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),
    #[error("maximum degree requested over an empty vertex set")]
    EmptySet,
    #[error("malformed graph file: {0}")]
    Parse(String),
}

/// A simple graph: symmetric, anti-reflexive adjacency stored as one bitset row per vertex.
///
/// Graphs are immutable after construction.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    adj: Vec<VertexSet>,
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Graph(n={}, edges={:?})", self.n, self.edges())
    }
}

impl Graph {
    /// Builds the graph on `0..n` with the given edges (symmetrized). Repeated pairs are harmless.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Graph, GraphError> {
        let mut g = Graph::empty(n);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn empty(n: usize) -> Graph {
        Graph {
            n,
            adj: vec![VertexSet::empty(n); n],
        }
    }

    pub fn complete(n: usize) -> Graph {
        Graph::empty(n).complement()
    }

    fn add_edge(&mut self, u: usize, v: usize) -> Result<(), GraphError> {
        for x in [u, v] {
            if x >= self.n {
                return Err(GraphError::OutOfRange {
                    vertex: x,
                    n: self.n,
                });
            }
        }
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        self.adj[u].insert(v);
        self.adj[v].insert(u);
        Ok(())
    }

    /// The same graph with the edge `uv` added. Panics on a loop or bad endpoint.
    pub fn with_edge(mut self, u: usize, v: usize) -> Graph {
        self.add_edge(u, v).expect("valid edge");
        self
    }

    /// Builds a graph from a symmetric predicate evaluated on every pair `u < v`.
    pub fn from_fn(n: usize, mut adjacent: impl FnMut(usize, usize) -> bool) -> Graph {
        let mut g = Graph::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                if adjacent(u, v) {
                    g.adj[u].insert(v);
                    g.adj[v].insert(u);
                }
            }
        }
        g
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> VertexSet {
        VertexSet::full(self.n)
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && self.adj[u].contains(v)
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &VertexSet {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(VertexSet::len).sum::<usize>() / 2
    }

    /// Edges as `(u, v)` with `u < v`, sorted lexicographically.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|u| {
                self.adj[u]
                    .iter()
                    .filter(move |&v| v > u)
                    .map(move |v| (u, v))
            })
            .collect()
    }

    pub fn complement(&self) -> Graph {
        let adj = (0..self.n)
            .map(|v| {
                let mut row = self.adj[v].complement();
                row.remove(v);
                row
            })
            .collect();
        Graph { n: self.n, adj }
    }

    /// `{y ∈ x : E(a, y)}`.
    pub fn neighborhood(&self, a: usize, x: &VertexSet) -> VertexSet {
        self.adj[a].intersection(x)
    }

    pub fn degree_in(&self, a: usize, x: &VertexSet) -> usize {
        self.adj[a].intersection_len(x)
    }

    /// A vertex of `x` with the most neighbours inside `x`, lowest index on ties.
    pub fn max_degree_in(&self, x: &VertexSet) -> Result<(usize, usize), GraphError> {
        let mut best: Option<(usize, usize)> = None;
        for a in x {
            let deg = self.degree_in(a, x);
            if best.is_none_or(|(_, d)| deg > d) {
                best = Some((a, deg));
            }
        }
        best.ok_or(GraphError::EmptySet)
    }

    /// Induced subgraph on `x`, relabelled to `0..|x|` in increasing vertex order.
    pub fn induced(&self, x: &VertexSet) -> Induced {
        let vertices = x.to_vec();
        let graph = Graph::from_fn(vertices.len(), |i, j| {
            self.has_edge(vertices[i], vertices[j])
        });
        Induced { graph, vertices }
    }

    /// True if `x` spans no edge.
    pub fn is_independent(&self, x: &VertexSet) -> bool {
        x.iter().all(|v| self.adj[v].is_disjoint(x))
    }

    /// True if every pair of distinct vertices in `x` is adjacent.
    pub fn is_clique(&self, x: &VertexSet) -> bool {
        let k = x.len();
        x.iter().all(|v| self.adj[v].intersection_len(x) + 1 == k)
    }

    /// Disjoint union with `other` placed at ids `n..n+other.n`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let n = self.n + other.n;
        Graph::from_fn(n, |u, v| {
            if v < self.n {
                self.has_edge(u, v)
            } else if u >= self.n {
                other.has_edge(u - self.n, v - self.n)
            } else {
                false
            }
        })
    }

    /// Disjoint union plus every cross edge.
    pub fn join(&self, other: &Graph) -> Graph {
        let n = self.n + other.n;
        Graph::from_fn(n, |u, v| {
            if v < self.n {
                self.has_edge(u, v)
            } else if u >= self.n {
                other.has_edge(u - self.n, v - self.n)
            } else {
                true
            }
        })
    }

    pub fn to_file(&self) -> GraphFile {
        GraphFile {
            n: self.n,
            edges: self.edges().into_iter().map(|(u, v)| [u, v]).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("graph serialization")
    }

    pub fn from_json(text: &str) -> Result<Graph, GraphError> {
        let file: GraphFile =
            serde_json::from_str(text).map_err(|e| GraphError::Parse(e.to_string()))?;
        file.into_graph()
    }
}

impl Serialize for Graph {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_file().serialize(serializer)
    }
}

/// An induced subgraph together with its local-to-host vertex mapping.
#[derive(Clone, Debug)]
pub struct Induced {
    pub graph: Graph,
    /// `vertices[i]` is the host id of local vertex `i`.
    pub vertices: Vec<usize>,
}

/// On-disk graph format: `{"n": 4, "edges": [[0,1],[1,2]]}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct GraphFile {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
}

impl GraphFile {
    /// Strict loader: rejects self-loops, out-of-range endpoints and duplicate edges
    /// (in either orientation).
    pub fn into_graph(self) -> Result<Graph, GraphError> {
        let mut seen = BTreeSet::new();
        let mut g = Graph::empty(self.n);
        for [u, v] in self.edges {
            let key = (u.min(v), u.max(v));
            if !seen.insert(key) {
                return Err(GraphError::DuplicateEdge(key.0, key.1));
            }
            g.add_edge(u, v)?;
        }
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p4() -> Graph {
        Graph::new(4, &[(0, 1), (1, 2), (2, 3)]).unwrap()
    }

    fn star3() -> Graph {
        Graph::new(4, &[(0, 1), (0, 2), (0, 3)]).unwrap()
    }

    #[test]
    fn construction_examples() {
        let e3 = Graph::new(3, &[]).unwrap();
        assert_eq!(e3.n(), 3);
        assert_eq!(e3.edge_count(), 0);
        let k2 = Graph::new(2, &[(0, 1)]).unwrap();
        assert!(k2.has_edge(1, 0));
        assert_eq!(p4().edges(), vec![(0, 1), (1, 2), (2, 3)]);
    }

    #[test]
    fn construction_errors() {
        assert_eq!(Graph::new(3, &[(1, 1)]), Err(GraphError::SelfLoop(1)));
        assert_eq!(
            Graph::new(3, &[(0, 3)]),
            Err(GraphError::OutOfRange { vertex: 3, n: 3 })
        );
    }

    #[test]
    fn complement_examples() {
        assert_eq!(Graph::empty(3).complement(), Graph::complete(3));
        assert_eq!(p4().complement().complement(), p4());
        // P4 complement: edges 02, 03, 13, i.e. the path 2-0-3-1.
        assert_eq!(p4().complement().edges(), vec![(0, 2), (0, 3), (1, 3)]);
    }

    #[test]
    fn induced_examples() {
        let k2 = p4().induced(&VertexSet::from_iter_in(4, [0, 1]));
        assert_eq!(k2.graph, Graph::complete(2));
        assert_eq!(k2.vertices, vec![0, 1]);
        assert_eq!(p4().induced(&VertexSet::empty(4)).graph.n(), 0);
        let k3 = Graph::complete(4).induced(&VertexSet::from_iter_in(4, [0, 1, 2]));
        assert_eq!(k3.graph, Graph::complete(3));
    }

    #[test]
    fn neighborhood_examples() {
        let s = star3();
        assert_eq!(s.neighborhood(0, &s.vertices()).to_vec(), vec![1, 2, 3]);
        let iso = Graph::empty(3);
        assert!(iso.neighborhood(1, &iso.vertices()).is_empty());
        let x = VertexSet::from_iter_in(4, [0, 2, 3]);
        assert_eq!(p4().neighborhood(1, &x).to_vec(), vec![0, 2]);
    }

    #[test]
    fn max_degree_examples() {
        let s = star3();
        assert_eq!(s.max_degree_in(&s.vertices()), Ok((0, 3)));
        let e = Graph::empty(4);
        assert_eq!(e.max_degree_in(&e.vertices()), Ok((0, 0)));
        assert_eq!(p4().max_degree_in(&p4().vertices()), Ok((1, 2)));
        assert_eq!(
            e.max_degree_in(&VertexSet::empty(4)),
            Err(GraphError::EmptySet)
        );
    }

    #[test]
    fn complement_involution_exhaustive_up_to_8() {
        for n in 0..=8usize {
            let pairs: Vec<(usize, usize)> = (0..n)
                .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
                .collect();
            // Every labelled graph for n ≤ 6; a fixed stride through the space for 7 and 8.
            let total = 1u64 << pairs.len();
            let step = if n <= 6 { 1 } else { total / 4096 + 1 };
            let mut mask = 0u64;
            while mask < total {
                let edges: Vec<_> = pairs
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &e)| e)
                    .collect();
                let g = Graph::new(n, &edges).unwrap();
                assert_eq!(g.complement().complement(), g);
                mask += step;
            }
        }
    }

    #[test]
    fn json_loader_is_strict() {
        let g = Graph::from_json(r#"{"n":3,"edges":[[0,1],[2,1]]}"#).unwrap();
        assert_eq!(g.edges(), vec![(0, 1), (1, 2)]);
        assert_eq!(g.to_json(), r#"{"n":3,"edges":[[0,1],[1,2]]}"#);
        assert_eq!(
            Graph::from_json(r#"{"n":3,"edges":[[0,1],[1,0]]}"#),
            Err(GraphError::DuplicateEdge(0, 1))
        );
        assert_eq!(
            Graph::from_json(r#"{"n":3,"edges":[[2,2]]}"#),
            Err(GraphError::SelfLoop(2))
        );
        assert!(matches!(Graph::from_json("{"), Err(GraphError::Parse(_))));
    }

    fn arb_graph() -> impl Strategy<Value = Graph> {
        (0usize..20).prop_flat_map(|n| {
            proptest::collection::vec(any::<bool>(), n * n.saturating_sub(1) / 2).prop_map(
                move |bits| {
                    let mut it = bits.into_iter();
                    Graph::from_fn(n, |_, _| it.next().unwrap())
                },
            )
        })
    }

    proptest! {
        #[test]
        fn neighborhood_stays_inside(g in arb_graph(), a_seed in any::<usize>(), x_bits in any::<u32>()) {
            prop_assume!(g.n() > 0);
            let a = a_seed % g.n();
            let x = VertexSet::from_iter_in(g.n(), (0..g.n()).filter(|v| x_bits >> (v % 32) & 1 == 1));
            let nb = g.neighborhood(a, &x);
            prop_assert!(nb.is_subset(&x));
            prop_assert!(!nb.contains(a));
        }

        #[test]
        fn induced_on_everything_is_identity(g in arb_graph()) {
            let ind = g.induced(&g.vertices());
            prop_assert_eq!(&ind.graph, &g);
            prop_assert_eq!(ind.vertices, (0..g.n()).collect::<Vec<_>>());
        }
    }
}
