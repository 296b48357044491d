//! Combs, the layered greedy cover behind the comb-or-bound dichotomy, and `W_G`.

use serde::Serialize;
use thiserror::Error;

use crate::graph::Graph;
use crate::numeric::{self, Threshold};
use crate::set::VertexSet;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CombError {
    #[error("vertex {0} of the B side has no neighbour in the A side")]
    IsolatedVertex(usize),
    #[error("the two sides overlap")]
    SidesOverlap,
    #[error("parameter out of range: {0}")]
    BadParameter(String),
    #[error("neither branch certified: {0}")]
    DichotomyUnresolved(String),
    #[error("graph on {n} vertices exceeds the exhaustive limit {limit}")]
    TooLarge { n: usize, limit: usize },
}

/// A sequence of apex vertices with their teeth.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Comb {
    pub apexes: Vec<usize>,
    pub teeth: Vec<VertexSet>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "defect", rename_all = "kebab-case")]
pub enum CombDefect {
    ShapeMismatch,
    RepeatedApex {
        apex: usize,
    },
    TeethOverlap {
        first: usize,
        second: usize,
    },
    ToothContainsApex {
        tooth: usize,
        apex: usize,
    },
    MissingEdge {
        apex: usize,
        vertex: usize,
    },
    ForeignEdge {
        apex: usize,
        vertex: usize,
        tooth: usize,
    },
    NarrowTooth {
        tooth: usize,
        size: usize,
        required: usize,
    },
    ApexOutsideC {
        apex: usize,
    },
    ToothOutsideD {
        tooth: usize,
    },
    SidesOverlap,
}

impl Comb {
    pub fn len(&self) -> usize {
        self.apexes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.apexes.is_empty()
    }

    /// Smallest tooth size, 0 for the empty comb.
    pub fn width(&self) -> usize {
        self.teeth.iter().map(VertexSet::len).min().unwrap_or(0)
    }

    pub fn is_equicardinal(&self) -> bool {
        self.teeth.windows(2).all(|w| w[0].len() == w[1].len())
    }
}

/// First violated comb axiom for a `(t, k)`-comb, if any.
pub fn check_comb(g: &Graph, c: &Comb, k: usize) -> Result<(), CombDefect> {
    if c.apexes.len() != c.teeth.len() {
        return Err(CombDefect::ShapeMismatch);
    }
    let n = g.n();
    let mut apex_set = VertexSet::empty(n);
    for &a in &c.apexes {
        if a >= n || !apex_set.insert(a) {
            return Err(CombDefect::RepeatedApex { apex: a });
        }
    }
    for (i, tooth) in c.teeth.iter().enumerate() {
        if tooth.capacity() != n {
            return Err(CombDefect::ShapeMismatch);
        }
        if let Some(apex) = tooth.intersection(&apex_set).first() {
            return Err(CombDefect::ToothContainsApex { tooth: i, apex });
        }
        for (j, other) in c.teeth.iter().enumerate().skip(i + 1) {
            if !tooth.is_disjoint(other) {
                return Err(CombDefect::TeethOverlap {
                    first: i,
                    second: j,
                });
            }
        }
    }
    for (i, &a) in c.apexes.iter().enumerate() {
        if let Some(vertex) = c.teeth[i].difference(g.neighbors(a)).first() {
            return Err(CombDefect::MissingEdge { apex: a, vertex });
        }
        for (j, tooth) in c.teeth.iter().enumerate() {
            if i != j {
                if let Some(vertex) = tooth.intersection(g.neighbors(a)).first() {
                    return Err(CombDefect::ForeignEdge {
                        apex: a,
                        vertex,
                        tooth: j,
                    });
                }
            }
        }
    }
    for (i, tooth) in c.teeth.iter().enumerate() {
        if tooth.len() < k {
            return Err(CombDefect::NarrowTooth {
                tooth: i,
                size: tooth.len(),
                required: k,
            });
        }
    }
    Ok(())
}

pub fn validate_comb(g: &Graph, c: &Comb, k: usize) -> bool {
    check_comb(g, c, k).is_ok()
}

/// [`check_comb`] plus the requirement that the comb lives in `(cs, ds)`.
pub fn check_comb_in(
    g: &Graph,
    c: &Comb,
    k: usize,
    cs: &VertexSet,
    ds: &VertexSet,
) -> Result<(), CombDefect> {
    if !cs.is_disjoint(ds) {
        return Err(CombDefect::SidesOverlap);
    }
    check_comb(g, c, k)?;
    if let Some(&apex) = c.apexes.iter().find(|&&a| !cs.contains(a)) {
        return Err(CombDefect::ApexOutsideC { apex });
    }
    if let Some(tooth) = c.teeth.iter().position(|t| !t.is_subset(ds)) {
        return Err(CombDefect::ToothOutsideD { tooth });
    }
    Ok(())
}

/// One layer `s` of the greedy cover.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Layer {
    /// 1-based layer number.
    pub s: u32,
    pub apexes: Vec<usize>,
    pub teeth: Vec<VertexSet>,
    /// Union of the teeth.
    pub covered: VertexSet,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CombLayers {
    pub delta: usize,
    pub layers: Vec<Layer>,
    /// Vertices of the D side not covered by any layer.
    pub residual: VertexSet,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "observation", rename_all = "kebab-case")]
pub enum LayerViolation {
    /// A later apex of the same layer has a neighbour in an earlier tooth's successor.
    WithinLayer {
        s: u32,
        apex: usize,
        vertex: usize,
    },
    /// An apex of an earlier layer has a neighbour in a later layer's tooth.
    AcrossLayers {
        s: u32,
        apex: usize,
        vertex: usize,
    },
    ToothSize {
        s: u32,
        index: usize,
        size: usize,
    },
    CoverMismatch {
        s: u32,
    },
}

/// Greedy layered cover of `d_set` by neighbourhoods of vertices of `c`.
///
/// In layer `s` the vertices of `c` are scanned in increasing order and a
/// vertex becomes an apex when it has at least `(2/3)^s · delta` (and at least
/// one) neighbours in the residual part of `d_set` that no earlier apex of the
/// layer covers. Layers continue, possibly empty, until no vertex of `c` has a
/// neighbour in the residual.
pub fn build_layers(g: &Graph, c: &VertexSet, d_set: &VertexSet, delta: usize) -> CombLayers {
    let mut residual = d_set.clone();
    let mut layers = Vec::new();
    let mut s = 0u32;
    while c.iter().any(|a| !g.neighbors(a).is_disjoint(&residual)) {
        s += 1;
        let mut covered = VertexSet::empty(g.n());
        let mut apexes = Vec::new();
        let mut teeth = Vec::new();
        for a in c {
            let mut fresh = g.neighbors(a).intersection(&residual);
            fresh.difference_with(&covered);
            let size = fresh.len();
            if size >= 1 && numeric::two_thirds_pow_le(delta, s, size) {
                covered.union_with(&fresh);
                apexes.push(a);
                teeth.push(fresh);
            }
        }
        residual.difference_with(&covered);
        layers.push(Layer {
            s,
            apexes,
            teeth,
            covered,
        });
    }
    CombLayers {
        delta,
        layers,
        residual,
    }
}

impl CombLayers {
    pub fn apex_count(&self) -> usize {
        self.layers.iter().map(|l| l.apexes.len()).sum()
    }

    /// Checks the three structural observations and the cover identity.
    pub fn check_observations(&self, g: &Graph) -> Vec<LayerViolation> {
        let mut out = Vec::new();
        for (li, layer) in self.layers.iter().enumerate() {
            let s = layer.s;
            let mut union = VertexSet::empty(g.n());
            layer.teeth.iter().for_each(|t| union.union_with(t));
            if union != layer.covered {
                out.push(LayerViolation::CoverMismatch { s });
            }
            for (i, tooth) in layer.teeth.iter().enumerate() {
                let size = tooth.len();
                if !numeric::two_thirds_pow_le(self.delta, s, size)
                    || !numeric::le_two_thirds_pow(size, s - 1, self.delta)
                {
                    out.push(LayerViolation::ToothSize { s, index: i, size });
                }
                for &a in &layer.apexes[..i] {
                    if let Some(vertex) = tooth.intersection(g.neighbors(a)).first() {
                        out.push(LayerViolation::WithinLayer { s, apex: a, vertex });
                    }
                }
                for earlier in &self.layers[..li] {
                    for &a in &earlier.apexes {
                        if let Some(vertex) = tooth.intersection(g.neighbors(a)).first() {
                            out.push(LayerViolation::AcrossLayers { s, apex: a, vertex });
                        }
                    }
                }
            }
        }
        out
    }
}

/// Reverse admission over the layers: apexes are visited from the last layer
/// backwards and, within a layer, from the last apex backwards. An apex is
/// admitted when fewer than half of its tooth is adjacent to already admitted
/// apexes and at least `width` tooth vertices avoid them. Returns admitted
/// apexes with their reduced teeth, in visiting order.
fn reverse_admission(g: &Graph, layers: &CombLayers, width: usize) -> Vec<(usize, VertexSet)> {
    let mut admitted: Vec<(usize, VertexSet)> = Vec::new();
    let mut hit = VertexSet::empty(g.n());
    for layer in layers.layers.iter().rev() {
        for (a, tooth) in layer.apexes.iter().zip(&layer.teeth).rev() {
            let touched = tooth.intersection_len(&hit);
            let free = tooth.difference(&hit);
            if 2 * touched < tooth.len() && free.len() >= width {
                admitted.push((*a, free));
                hit.union_with(g.neighbors(*a));
            }
        }
    }
    admitted
}

/// `3^{d+1} / (3/2 − (3/2)^d) · Γ^d · Δ^{1−d}`.
pub fn dichotomy_bound(gamma: f64, d: f64, delta: usize) -> f64 {
    3f64.powf(d + 1.0) / (1.5 - 1.5f64.powf(d)) * gamma.powf(d) * (delta as f64).powf(1.0 - d)
}

/// `γ · t^{-1/d}`.
pub fn required_width(gamma: f64, d: f64, t: usize) -> f64 {
    gamma * (t as f64).powf(-1.0 / d)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "branch", rename_all = "kebab-case")]
pub enum CombOrBound {
    Comb {
        comb: Comb,
        t: usize,
        required_width: f64,
        delta: usize,
    },
    Bound {
        b_size: usize,
        delta: usize,
        bound: f64,
        boundary: bool,
    },
}

/// Either a `(t, γ t^{-1/d})`-comb in `(a_side, b_side)` for some `t ≥ 1`, or a
/// certificate that `|b_side|` is below the closed-form bound.
pub fn comb_or_bound(
    g: &Graph,
    a_side: &VertexSet,
    b_side: &VertexSet,
    gamma: f64,
    d: f64,
) -> Result<CombOrBound, CombError> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(CombError::BadParameter(format!("gamma = {gamma}")));
    }
    if !(d > 0.0 && d < 1.0) {
        return Err(CombError::BadParameter(format!("d = {d}")));
    }
    if !a_side.is_disjoint(b_side) {
        return Err(CombError::SidesOverlap);
    }
    if let Some(v) = b_side.iter().find(|&v| g.neighbors(v).is_disjoint(a_side)) {
        return Err(CombError::IsolatedVertex(v));
    }
    let delta = a_side
        .iter()
        .map(|a| g.degree_in(a, b_side))
        .max()
        .unwrap_or(0);
    let layers = build_layers(g, a_side, b_side, delta);
    let width_for = |t: usize| {
        Threshold::real(required_width(gamma, d, t))
            .ceil_count()
            .max(1)
    };
    for t in 1..=layers.apex_count() {
        let admitted = reverse_admission(g, &layers, width_for(t));
        if admitted.len() >= t {
            let w = width_for(admitted.len());
            let (apexes, teeth) = admitted
                .into_iter()
                .map(|(a, tooth)| (a, tooth.take_lowest(w)))
                .unzip();
            let comb = Comb { apexes, teeth };
            let need = required_width(gamma, d, comb.len());
            debug_assert!(check_comb_in(g, &comb, w, a_side, b_side).is_ok());
            return Ok(CombOrBound::Comb {
                t: comb.len(),
                comb,
                required_width: need,
                delta,
            });
        }
    }
    let bound = dichotomy_bound(gamma, d, delta);
    let cmp = numeric::le(b_side.len() as f64, bound);
    if cmp.holds {
        return Ok(CombOrBound::Bound {
            b_size: b_side.len(),
            delta,
            bound,
            boundary: cmp.boundary,
        });
    }
    Err(CombError::DichotomyUnresolved(format!(
        "|B| = {} exceeds {bound} and no comb was found",
        b_side.len()
    )))
}

/// Re-validates a branch returned by [`comb_or_bound`].
pub fn verify_comb_or_bound(
    g: &Graph,
    a_side: &VertexSet,
    b_side: &VertexSet,
    gamma: f64,
    d: f64,
    result: &CombOrBound,
) -> bool {
    match result {
        CombOrBound::Comb { comb, t, .. } => {
            let need = Threshold::real(required_width(gamma, d, *t)).ceil_count();
            *t == comb.len() && *t >= 1 && check_comb_in(g, comb, need, a_side, b_side).is_ok()
        }
        CombOrBound::Bound { b_size, delta, .. } => {
            let real_delta = a_side
                .iter()
                .map(|a| g.degree_in(a, b_side))
                .max()
                .unwrap_or(0);
            *b_size == b_side.len()
                && *delta == real_delta
                && numeric::le(*b_size as f64, dichotomy_bound(gamma, d, real_delta)).holds
        }
    }
}

/// Whether some `s`-subset of `apex_pool` has private neighbourhoods inside
/// `teeth_pool` of size at least `w` each.
fn has_private_family(
    g: &Graph,
    apex_pool: &[usize],
    teeth_pool: &VertexSet,
    s: usize,
    w: usize,
) -> bool {
    fn go(
        g: &Graph,
        pool: &[usize],
        teeth_pool: &VertexSet,
        start: usize,
        chosen: &mut Vec<usize>,
        s: usize,
        w: usize,
    ) -> bool {
        if chosen.len() == s {
            return chosen.iter().all(|&b| {
                let mut private = g.neighbors(b).intersection(teeth_pool);
                chosen
                    .iter()
                    .filter(|&&o| o != b)
                    .for_each(|&o| private.difference_with(g.neighbors(o)));
                private.len() >= w
            });
        }
        for i in start..pool.len() {
            if pool.len() - i < s - chosen.len() {
                break;
            }
            chosen.push(pool[i]);
            if go(g, pool, teeth_pool, i + 1, chosen, s, w) {
                return true;
            }
            chosen.pop();
        }
        false
    }
    go(
        g,
        apex_pool,
        teeth_pool,
        0,
        &mut Vec::with_capacity(s),
        s,
        w,
    )
}

/// `W_G`: the least width of an equicardinal teeth blockade of an
/// `(s, |G|/s²)`-comb in `(E_a, ¬E_a)` for some vertex `a`, in `g` or its
/// complement; `|G|` when there is none. Here `¬E_a` excludes `a` itself.
pub fn compute_w_g(g: &Graph, limit: usize) -> Result<usize, CombError> {
    let n = g.n();
    if n > limit {
        return Err(CombError::TooLarge { n, limit });
    }
    let mut best = n;
    for h in [g.clone(), g.complement()] {
        for a in 0..n {
            let apexes = h.neighbors(a).to_vec();
            let mut non = h.neighbors(a).complement();
            non.remove(a);
            for s in 1..=apexes.len() {
                // Teeth are pairwise disjoint, so s·w ≤ |¬E_a|.
                let w = n.div_ceil(s * s).max(1);
                if w >= best || s * w > non.len() {
                    continue;
                }
                if has_private_family(&h, &apexes, &non, s, w) {
                    best = w;
                }
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn set(n: usize, vs: &[usize]) -> VertexSet {
        VertexSet::from_iter_in(n, vs.iter().copied())
    }

    #[test]
    fn validate_examples() {
        let star = Graph::new(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let c = Comb {
            apexes: vec![0],
            teeth: vec![set(4, &[1, 2, 3])],
        };
        assert!(validate_comb(&star, &c, 3));
        assert!(!validate_comb(&star, &c, 4));

        let g = Graph::new(5, &[(0, 2), (0, 3), (1, 3), (1, 4)]).unwrap();
        let shared = Comb {
            apexes: vec![0, 1],
            teeth: vec![set(5, &[2, 3]), set(5, &[3, 4])],
        };
        assert_eq!(
            check_comb(&g, &shared, 1),
            Err(CombDefect::TeethOverlap {
                first: 0,
                second: 1
            })
        );
        let foreign = Comb {
            apexes: vec![0, 1],
            teeth: vec![set(5, &[2, 3]), set(5, &[4])],
        };
        assert_eq!(
            check_comb(&g, &foreign, 1),
            Err(CombDefect::ForeignEdge {
                apex: 1,
                vertex: 3,
                tooth: 0
            })
        );
        let good = Comb {
            apexes: vec![0, 1],
            teeth: vec![set(5, &[2]), set(5, &[4])],
        };
        assert!(validate_comb(&g, &good, 1));
        assert_eq!(
            check_comb_in(&g, &good, 1, &set(5, &[0]), &set(5, &[2, 3, 4])),
            Err(CombDefect::ApexOutsideC { apex: 1 })
        );
    }

    #[test]
    fn layers_complete_side() {
        // c = {0, 1} complete to d = {2, 3, 4}: the first apex takes everything.
        let g = Graph::from_fn(5, |u, v| (u < 2) != (v < 2));
        let l = build_layers(&g, &set(5, &[0, 1]), &set(5, &[2, 3, 4]), 3);
        assert_eq!(l.layers.len(), 1);
        assert_eq!(l.layers[0].apexes, vec![0]);
        assert_eq!(l.layers[0].teeth, vec![set(5, &[2, 3, 4])]);
        assert!(l.residual.is_empty());
        assert!(l.check_observations(&g).is_empty());
    }

    #[test]
    fn layers_anticomplete_side() {
        let g = Graph::empty(5);
        let l = build_layers(&g, &set(5, &[0, 1]), &set(5, &[2, 3, 4]), 0);
        assert!(l.layers.is_empty());
        assert_eq!(l.residual, set(5, &[2, 3, 4]));
    }

    #[test]
    fn layers_matching() {
        // Perfect matching 0-3, 1-4, 2-5 with delta = 1: every apex has one
        // fresh neighbour ≥ 2/3, so one layer with all three apexes.
        let g = Graph::new(6, &[(0, 3), (1, 4), (2, 5)]).unwrap();
        let l = build_layers(&g, &set(6, &[0, 1, 2]), &set(6, &[3, 4, 5]), 1);
        assert_eq!(l.layers.len(), 1);
        assert_eq!(l.layers[0].apexes, vec![0, 1, 2]);
        assert_eq!(
            oracle::greedy_layers(&g, &[0, 1, 2], &[3, 4, 5], 1),
            vec![vec![(0, vec![3]), (1, vec![4]), (2, vec![5])]]
        );
    }

    #[test]
    fn layers_may_be_empty_in_between() {
        // Apex 0 sees 9 vertices, apex 1 sees 3 others. Delta = 9:
        // layer 1 threshold 6 takes apex 0; layer 2 threshold 4 takes nothing;
        // layer 3 threshold 8/3 takes apex 1.
        let mut edges: Vec<(usize, usize)> = (2..11).map(|v| (0, v)).collect();
        edges.extend((11..14).map(|v| (1, v)));
        let g = Graph::new(14, &edges).unwrap();
        let d: Vec<usize> = (2..14).collect();
        let l = build_layers(&g, &set(14, &[0, 1]), &set(14, &d), 9);
        let shape: Vec<usize> = l.layers.iter().map(|x| x.apexes.len()).collect();
        assert_eq!(shape, vec![1, 0, 1]);
        assert!(l.residual.is_empty());
        assert!(l.check_observations(&g).is_empty());
    }

    #[test]
    fn comb_or_bound_examples() {
        // K_{1,5}: a single apex with 5 teeth, gamma 3.
        let g = Graph::from_fn(6, |u, v| u == 0 || v == 0);
        let a = set(6, &[0]);
        let b = set(6, &[1, 2, 3, 4, 5]);
        match comb_or_bound(&g, &a, &b, 3.0, 0.5).unwrap() {
            CombOrBound::Comb { comb, t, .. } => {
                assert_eq!(t, 1);
                assert_eq!(comb.width(), 3);
            }
            other => panic!("expected a comb, got {other:?}"),
        }
        let r = comb_or_bound(&g, &a, &VertexSet::empty(6), 3.0, 0.5).unwrap();
        assert!(matches!(r, CombOrBound::Bound { b_size: 0, .. }));
        assert!(verify_comb_or_bound(
            &g,
            &a,
            &VertexSet::empty(6),
            3.0,
            0.5,
            &r
        ));
        assert_eq!(
            comb_or_bound(&Graph::empty(3), &set(3, &[0]), &set(3, &[1]), 1.0, 0.5),
            Err(CombError::IsolatedVertex(1))
        );
        assert!(comb_or_bound(&g, &a, &b, 1.0, 1.0).is_err());
    }

    #[test]
    fn dichotomy_on_random_bipartite_graphs() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let na = rng.gen_range(1..=20);
            let nb = rng.gen_range(0..=20);
            let n = na + nb;
            let p = rng.gen_range(0.05..0.6);
            let mut g = Graph::from_fn(n, |u, v| (u < na) != (v < na) && rng.gen_bool(p));
            for v in na..n {
                if g.degree(v) == 0 {
                    let u = rng.gen_range(0..na);
                    g = g.with_edge(u, v);
                }
            }
            let a = VertexSet::from_iter_in(n, 0..na);
            let b = VertexSet::from_iter_in(n, na..n);
            let gamma = rng.gen_range(0.5..8.0);
            let d = rng.gen_range(0.2..0.9);
            let r = comb_or_bound(&g, &a, &b, gamma, d).unwrap();
            assert!(verify_comb_or_bound(&g, &a, &b, gamma, d, &r));
        }
    }

    #[test]
    fn w_g_examples() {
        assert_eq!(compute_w_g(&Graph::empty(1), 12), Ok(1));
        // Frozen from the literal teeth-assignment oracle.
        let k13 = Graph::new(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(oracle::w_g(&k13), 4);
        assert_eq!(compute_w_g(&k13, 12), Ok(4));
        for n in 1..=6 {
            assert_eq!(oracle::w_g(&Graph::empty(n)), n);
            assert_eq!(compute_w_g(&Graph::empty(n), 12), Ok(n));
        }
        assert!(compute_w_g(&Graph::empty(13), 12).is_err());
    }

    #[test]
    fn w_g_matches_literal_oracle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..150 {
            let n = rng.gen_range(1..=7);
            let g = Graph::from_fn(n, |_, _| rng.gen_bool(0.5));
            assert_eq!(
                compute_w_g(&g, 12).unwrap(),
                oracle::w_g(&g),
                "{:?}",
                g.edges()
            );
        }
    }

    proptest! {
        #[test]
        fn layer_observations_hold(seed in any::<u64>(), nc in 1usize..10, nd in 0usize..25, p in 0.05f64..0.9) {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let n = nc + nd;
            let g = Graph::from_fn(n, |u, v| (u < nc) != (v < nc) && rng.gen_bool(p));
            let c = VertexSet::from_iter_in(n, 0..nc);
            let d = VertexSet::from_iter_in(n, nc..n);
            let delta = c.iter().map(|a| g.degree_in(a, &d)).max().unwrap();
            let l = build_layers(&g, &c, &d, delta);
            prop_assert!(l.check_observations(&g).is_empty());
            for v in &l.residual {
                prop_assert!(g.neighbors(v).is_disjoint(&c));
            }
            let cv: Vec<usize> = c.to_vec();
            let dv: Vec<usize> = d.to_vec();
            let reference = oracle::greedy_layers(&g, &cv, &dv, delta);
            let ours: Vec<Vec<(usize, Vec<usize>)>> = l.layers.iter()
                .map(|x| x.apexes.iter().copied().zip(x.teeth.iter().map(VertexSet::to_vec)).collect())
                .collect();
            prop_assert_eq!(ours, reference);
        }

        #[test]
        fn w_g_is_complement_symmetric(seed in any::<u64>(), n in 1usize..9) {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let g = Graph::from_fn(n, |_, _| rng.gen_bool(0.5));
            prop_assert_eq!(compute_w_g(&g, 12).unwrap(), compute_w_g(&g.complement(), 12).unwrap());
        }
    }
}
