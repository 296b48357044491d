//! Cograph recognition, largest induced cographs, homogeneous sets and τ-criticality.
//!
//! Recognition follows the recursive closure definition directly: a single
//! vertex is a leaf, a disconnected graph is the disjoint union of its
//! components, a graph with disconnected complement is the join of its
//! co-components, and anything else is not a cograph.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;
use crate::numeric::{self, Comparison};
use crate::set::VertexSet;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CographError {
    #[error("cograph recognition needs at least one vertex")]
    EmptyGraph,
    #[error("graph on {n} vertices exceeds the exhaustive search limit {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("tau must lie strictly between 0 and 1, got {0}")]
    InvalidTau(f64),
    #[error("cotree leaf {0} is out of range or repeated")]
    BadLeaf(usize),
}

/// Cotree of a cograph. Leaves carry host vertex ids.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Cotree {
    Leaf(usize),
    Union(Vec<Cotree>),
    Join(Vec<Cotree>),
}

impl Cotree {
    pub fn leaves(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<usize>) {
        match self {
            Cotree::Leaf(v) => out.push(*v),
            Cotree::Union(ch) | Cotree::Join(ch) => ch.iter().for_each(|c| c.collect_leaves(out)),
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            Cotree::Leaf(_) => 1,
            Cotree::Union(ch) | Cotree::Join(ch) => ch.iter().map(Cotree::leaf_count).sum(),
        }
    }

    /// Relabels every leaf through `f`.
    pub fn map_leaves(&self, f: &impl Fn(usize) -> usize) -> Cotree {
        match self {
            Cotree::Leaf(v) => Cotree::Leaf(f(*v)),
            Cotree::Union(ch) => Cotree::Union(ch.iter().map(|c| c.map_leaves(f)).collect()),
            Cotree::Join(ch) => Cotree::Join(ch.iter().map(|c| c.map_leaves(f)).collect()),
        }
    }

    /// The graph on `0..n` whose edges are exactly those the cotree prescribes
    /// between its leaves. Vertices that are not leaves stay isolated.
    pub fn evaluate(&self, n: usize) -> Result<Graph, CographError> {
        let mut seen = VertexSet::empty(n);
        for v in self.leaves() {
            if v >= n || !seen.insert(v) {
                return Err(CographError::BadLeaf(v));
            }
        }
        let mut edges = Vec::new();
        self.collect_edges(&mut edges);
        Ok(Graph::new(n, &edges).expect("leaves validated"))
    }

    fn collect_edges(&self, edges: &mut Vec<(usize, usize)>) {
        match self {
            Cotree::Leaf(_) => {}
            Cotree::Union(ch) => ch.iter().for_each(|c| c.collect_edges(edges)),
            Cotree::Join(ch) => {
                ch.iter().for_each(|c| c.collect_edges(edges));
                let parts: Vec<Vec<usize>> = ch.iter().map(Cotree::leaves).collect();
                for i in 0..parts.len() {
                    for j in i + 1..parts.len() {
                        for &u in &parts[i] {
                            for &v in &parts[j] {
                                edges.push((u, v));
                            }
                        }
                    }
                }
            }
        }
    }
}

impl fmt::Display for Cotree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (name, ch) = match self {
            Cotree::Leaf(v) => return write!(f, "{v}"),
            Cotree::Union(ch) => ("union", ch),
            Cotree::Join(ch) => ("join", ch),
        };
        write!(f, "{name}(")?;
        for (i, c) in ch.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Connected components of `g[x]`, or of the complement of `g[x]` when `complemented`.
/// Components are ordered by their smallest vertex.
fn components(g: &Graph, x: &VertexSet, complemented: bool) -> Vec<VertexSet> {
    let mut unseen = x.clone();
    let mut out = Vec::new();
    while let Some(start) = unseen.first() {
        let mut comp = VertexSet::singleton(x.capacity(), start);
        let mut frontier = comp.clone();
        unseen.remove(start);
        while !frontier.is_empty() {
            let mut next = VertexSet::empty(x.capacity());
            for v in &frontier {
                let mut reach = if complemented {
                    unseen.difference(g.neighbors(v))
                } else {
                    unseen.intersection(g.neighbors(v))
                };
                reach.remove(v);
                next.union_with(&reach);
                unseen.difference_with(&reach);
            }
            comp.union_with(&next);
            frontier = next;
        }
        out.push(comp);
    }
    out
}

/// Cotree of `g`, or `None` when `g` is not a cograph.
pub fn is_cograph(g: &Graph) -> Result<Option<Cotree>, CographError> {
    if g.n() == 0 {
        return Err(CographError::EmptyGraph);
    }
    Ok(is_cograph_on(g, &g.vertices()))
}

/// Cotree of the induced subgraph `g[x]` (leaves are host ids), or `None`.
/// `x` must be nonempty.
pub fn is_cograph_on(g: &Graph, x: &VertexSet) -> Option<Cotree> {
    debug_assert!(!x.is_empty());
    if x.len() == 1 {
        return Some(Cotree::Leaf(x.first().unwrap()));
    }
    let comps = components(g, x, false);
    if comps.len() > 1 {
        return comps
            .iter()
            .map(|c| is_cograph_on(g, c))
            .collect::<Option<Vec<_>>>()
            .map(Cotree::Union);
    }
    let co = components(g, x, true);
    if co.len() > 1 {
        return co
            .iter()
            .map(|c| is_cograph_on(g, c))
            .collect::<Option<Vec<_>>>()
            .map(Cotree::Join);
    }
    None
}

/// Caps for the exponential subset searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchLimits {
    pub largest_cograph: usize,
    pub tau_critical: usize,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            largest_cograph: 24,
            tau_critical: 14,
        }
    }
}

/// A maximum-cardinality vertex set inducing a cograph; ties go to the
/// lexicographically smallest sorted vertex list.
pub fn largest_cograph(g: &Graph, limit: usize) -> Result<VertexSet, CographError> {
    if g.n() == 0 {
        return Err(CographError::EmptyGraph);
    }
    largest_cograph_in(g, &g.vertices(), limit)
}

/// As [`largest_cograph`], restricted to the vertices of `x`. Returns the empty
/// set when `x` is empty.
pub fn largest_cograph_in(
    g: &Graph,
    x: &VertexSet,
    limit: usize,
) -> Result<VertexSet, CographError> {
    let order = x.to_vec();
    if order.len() > limit {
        return Err(CographError::TooLarge {
            n: order.len(),
            limit,
        });
    }
    let mut search = Search {
        g,
        order: &order,
        best: VertexSet::empty(g.n()),
        best_len: 0,
    };
    let mut cur = VertexSet::empty(g.n());
    search.dfs(0, &mut cur, 0);
    Ok(search.best)
}

struct Search<'a> {
    g: &'a Graph,
    order: &'a [usize],
    best: VertexSet,
    best_len: usize,
}

impl Search<'_> {
    // Include-first DFS in increasing vertex order visits candidate sets in
    // lexicographic order, so a strict improvement rule keeps the lex-smallest
    // maximum. Cographs are hereditary, which justifies pruning the include branch.
    fn dfs(&mut self, idx: usize, cur: &mut VertexSet, cur_len: usize) {
        if cur_len > self.best_len {
            self.best = cur.clone();
            self.best_len = cur_len;
        }
        if idx == self.order.len() || cur_len + (self.order.len() - idx) <= self.best_len {
            return;
        }
        let v = self.order[idx];
        cur.insert(v);
        if is_cograph_on(self.g, cur).is_some() {
            self.dfs(idx + 1, cur, cur_len + 1);
        }
        cur.remove(v);
        self.dfs(idx + 1, cur, cur_len);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Homogeneity {
    Clique,
    Anticlique,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomogeneousSet {
    pub kind: Homogeneity,
    pub vertices: Vec<usize>,
}

/// A maximum clique or maximum anticlique of the graph the cotree evaluates to,
/// whichever is larger (clique on ties). Because cographs are perfect, the
/// product of the two is at least the leaf count, so the result has at least
/// `⌈√m⌉` vertices.
pub fn homogeneous_in_cograph(c: &Cotree) -> HomogeneousSet {
    fn rec(c: &Cotree) -> (Vec<usize>, Vec<usize>) {
        match c {
            Cotree::Leaf(v) => (vec![*v], vec![*v]),
            Cotree::Union(ch) => {
                let parts: Vec<_> = ch.iter().map(rec).collect();
                let clique = parts
                    .iter()
                    .map(|p| p.0.clone())
                    .max_by_key(Vec::len)
                    .unwrap_or_default();
                let anti = parts.into_iter().flat_map(|p| p.1).collect();
                (clique, anti)
            }
            Cotree::Join(ch) => {
                let parts: Vec<_> = ch.iter().map(rec).collect();
                let anti = parts
                    .iter()
                    .map(|p| p.1.clone())
                    .max_by_key(Vec::len)
                    .unwrap_or_default();
                let clique = parts.into_iter().flat_map(|p| p.0).collect();
                (clique, anti)
            }
        }
    }
    let (mut clique, mut anti) = rec(c);
    clique.sort_unstable();
    anti.sort_unstable();
    if clique.len() >= anti.len() {
        HomogeneousSet {
            kind: Homogeneity::Clique,
            vertices: clique,
        }
    } else {
        HomogeneousSet {
            kind: Homogeneity::Anticlique,
            vertices: anti,
        }
    }
}

/// Exponent τ with `0 < τ < 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TauParams {
    tau: f64,
}

impl TauParams {
    pub fn new(tau: f64) -> Result<Self, CographError> {
        if tau > 0.0 && tau < 1.0 {
            Ok(TauParams { tau })
        } else {
            Err(CographError::InvalidTau(tau))
        }
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum TauVerdict {
    Critical,
    /// The whole graph already contains a cograph of size ≥ n^τ.
    TooBigCograph {
        set: Vec<usize>,
    },
    /// A proper induced subgraph whose largest cograph is below |G'|^τ.
    SubgraphViolates {
        set: Vec<usize>,
    },
}

/// A comparison `size ≥ m^τ` that landed within the numeric guard.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundaryCase {
    pub set: Vec<usize>,
    pub cograph_size: usize,
    pub threshold: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TauReport {
    pub verdict: TauVerdict,
    pub boundary: Vec<BoundaryCase>,
}

/// `size ≥ m^τ`, exact for the trivial cases `m ≤ 1` and `size = m`.
fn reaches_power(size: usize, m: usize, tau: f64) -> Comparison {
    if m <= 1 || size >= m {
        return Comparison::exact(size >= m.min(1));
    }
    numeric::ge(size as f64, (m as f64).powf(tau))
}

/// Exact τ-criticality test by exhaustive subset search.
pub fn is_tau_critical(
    g: &Graph,
    p: TauParams,
    limits: SearchLimits,
) -> Result<TauReport, CographError> {
    let n = g.n();
    if n > limits.tau_critical {
        return Err(CographError::TooLarge {
            n,
            limit: limits.tau_critical,
        });
    }
    let tau = p.tau();
    let mut boundary = Vec::new();
    let mut note = |set: &VertexSet, size: usize, m: usize, cmp: Comparison| {
        if cmp.boundary {
            boundary.push(BoundaryCase {
                set: set.to_vec(),
                cograph_size: size,
                threshold: (m as f64).powf(tau),
            });
        }
    };

    let whole = g.vertices();
    let best = largest_cograph_in(g, &whole, n)?;
    let cmp = reaches_power(best.len(), n, tau);
    note(&whole, best.len(), n, cmp);
    if cmp.holds {
        return Ok(TauReport {
            verdict: TauVerdict::TooBigCograph { set: best.to_vec() },
            boundary,
        });
    }
    // Larger proper subsets first: they are the likeliest to violate.
    let mut subsets: Vec<u32> = (1u32..(1u32 << n) - 1).collect();
    subsets.sort_by_key(|m| (std::cmp::Reverse(m.count_ones()), *m));
    for mask in subsets {
        let s = VertexSet::from_iter_in(n, (0..n).filter(|v| mask >> v & 1 == 1));
        let m = s.len();
        let inside = largest_cograph_in(g, &s, n)?;
        let cmp = reaches_power(inside.len(), m, tau);
        note(&s, inside.len(), m, cmp);
        if !cmp.holds {
            return Ok(TauReport {
                verdict: TauVerdict::SubgraphViolates { set: s.to_vec() },
                boundary,
            });
        }
    }
    Ok(TauReport {
        verdict: TauVerdict::Critical,
        boundary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;

    fn p4() -> Graph {
        Graph::new(4, &[(0, 1), (1, 2), (2, 3)]).unwrap()
    }

    fn c5() -> Graph {
        Graph::new(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap()
    }

    #[test]
    fn recognition_examples() {
        assert_eq!(is_cograph(&Graph::empty(1)).unwrap(), Some(Cotree::Leaf(0)));
        assert_eq!(is_cograph(&p4()).unwrap(), None);
        assert!(!oracle::cograph_closure(4).contains(&oracle::encode(&p4())));
        let two_k2 = Graph::new(4, &[(0, 1), (2, 3)]).unwrap();
        let tree = is_cograph(&two_k2).unwrap().unwrap();
        assert_eq!(
            tree,
            Cotree::Union(vec![
                Cotree::Join(vec![Cotree::Leaf(0), Cotree::Leaf(1)]),
                Cotree::Join(vec![Cotree::Leaf(2), Cotree::Leaf(3)]),
            ])
        );
        assert!(oracle::cograph_closure(4).contains(&oracle::encode(&two_k2)));
        assert_eq!(tree.evaluate(4).unwrap(), two_k2);
        assert_eq!(tree.to_string(), "union(join(0,1),join(2,3))");
        assert_eq!(is_cograph(&Graph::empty(0)), Err(CographError::EmptyGraph));
    }

    #[test]
    fn cotree_json_shape() {
        let t = Cotree::Join(vec![Cotree::Leaf(0), Cotree::Leaf(1)]);
        assert_eq!(
            serde_json::to_string(&t).unwrap(),
            r#"{"join":[{"leaf":0},{"leaf":1}]}"#
        );
    }

    #[test]
    fn evaluate_rejects_bad_leaves() {
        let t = Cotree::Union(vec![Cotree::Leaf(0), Cotree::Leaf(0)]);
        assert_eq!(t.evaluate(2), Err(CographError::BadLeaf(0)));
        assert_eq!(Cotree::Leaf(3).evaluate(2), Err(CographError::BadLeaf(3)));
    }

    #[test]
    fn largest_cograph_examples() {
        let two_k2 = Graph::new(4, &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(largest_cograph(&two_k2, 24).unwrap().len(), 4);
        // P4 and C5: every 3-set is a cograph, no 4-set is (oracle below).
        assert_eq!(largest_cograph(&p4(), 24).unwrap().to_vec(), vec![0, 1, 2]);
        assert_eq!(oracle::largest_cograph_size(&p4()), 3);
        assert_eq!(largest_cograph(&c5(), 24).unwrap().to_vec(), vec![0, 1, 2]);
        assert_eq!(oracle::largest_cograph_size(&c5()), 3);
        assert_eq!(
            largest_cograph(&c5(), 4),
            Err(CographError::TooLarge { n: 5, limit: 4 })
        );
    }

    #[test]
    fn homogeneous_examples() {
        let h = homogeneous_in_cograph(&Cotree::Leaf(7));
        assert_eq!(h.vertices, vec![7]);
        let two_k2 = Cotree::Union(vec![
            Cotree::Join(vec![Cotree::Leaf(0), Cotree::Leaf(1)]),
            Cotree::Join(vec![Cotree::Leaf(2), Cotree::Leaf(3)]),
        ]);
        let h = homogeneous_in_cograph(&two_k2);
        assert!(h.vertices.len() >= 2);
        let g = two_k2.evaluate(4).unwrap();
        let set = VertexSet::from_iter_in(4, h.vertices.iter().copied());
        assert!(g.is_clique(&set) || g.is_independent(&set));
    }

    #[test]
    fn tau_critical_examples() {
        let lim = SearchLimits::default();
        let k2 = Graph::complete(2);
        assert_eq!(
            is_tau_critical(&k2, TauParams::new(0.9).unwrap(), lim)
                .unwrap()
                .verdict,
            TauVerdict::TooBigCograph { set: vec![0, 1] }
        );
        let single = is_tau_critical(&Graph::empty(1), TauParams::new(0.5).unwrap(), lim).unwrap();
        assert_eq!(single.verdict, TauVerdict::TooBigCograph { set: vec![0] });

        // C5 has largest cograph 3; its P4 subgraphs have largest cograph 3.
        // Critical exactly when 5^τ > 3 and 4^τ ≤ 3, i.e. τ ∈ (0.6826, 0.7924].
        for (tau, expect_critical) in [(0.5, false), (0.7, true), (0.75, true), (0.9, false)] {
            let rep = is_tau_critical(&c5(), TauParams::new(tau).unwrap(), lim).unwrap();
            assert_eq!(
                rep.verdict == TauVerdict::Critical,
                expect_critical,
                "tau={tau}"
            );
            assert_eq!(
                oracle::is_tau_critical(&c5(), tau),
                expect_critical,
                "oracle tau={tau}"
            );
        }
        let rep = is_tau_critical(&c5(), TauParams::new(0.9).unwrap(), lim).unwrap();
        assert!(matches!(rep.verdict, TauVerdict::SubgraphViolates { ref set } if set.len() == 4));
        assert!(TauParams::new(1.0).is_err());
        assert!(is_tau_critical(&Graph::empty(15), TauParams::new(0.5).unwrap(), lim).is_err());
    }

    #[test]
    fn largest_cograph_matches_oracle_on_small_graphs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let n = rng.gen_range(1..=10);
            let p = rng.gen_range(0.1..0.9);
            let g = Graph::from_fn(n, |_, _| rng.gen_bool(p));
            let found = largest_cograph(&g, 24).unwrap();
            assert!(is_cograph_on(&g, &found).is_some());
            assert_eq!(found.len(), oracle::largest_cograph_size(&g));
        }
    }
}
