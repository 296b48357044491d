//! The (k choose 2)-property, rainbow tuples and the derived freeness notions.
//!
//! A k-tuple `(a_1, …, a_k)` has the property over a pool `X` when every pair
//! `i < j` has a witness `b_ij ∈ X` adjacent to `a_i` and `a_j` and to no other
//! tuple entry. Witnesses may coincide with each other or with tuple entries
//! unless [`WitnessOptions::distinct`] is set.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::blockade::Blockade;
use crate::graph::Graph;
use crate::set::VertexSet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum K2Error {
    #[error("k must be at least 2, got {0}")]
    SmallK(usize),
    #[error("tuple lists vertex {0} twice")]
    DuplicateEntry(usize),
    #[error("vertex {0} is outside the host graph")]
    OutOfRange(usize),
    #[error("search over {tuples} tuples exceeds the cap of {cap}")]
    CapExceeded { tuples: u128, cap: u128 },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessOptions {
    /// Require witnesses pairwise distinct and distinct from the tuple entries.
    pub distinct: bool,
}

/// How tuple entries must sit in the blocks of a blockade.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RainbowReading {
    /// Distinct entries lie in distinct blocks.
    #[default]
    DistinctBlocks,
    /// Every entry lies in some block; sharing a block is allowed.
    MembershipOnly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct K2Caps {
    /// Largest number of candidate k-sets an exhaustive search may visit.
    pub max_tuples: u128,
}

impl Default for K2Caps {
    fn default() -> Self {
        K2Caps {
            max_tuples: 5_000_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub i: usize,
    pub j: usize,
    pub vertex: usize,
}

/// Witnesses `b_ij` for a tuple, indexed by 0-based positions `i < j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessMap {
    pub k: usize,
    pub entries: Vec<Witness>,
}

impl WitnessMap {
    pub fn get(&self, i: usize, j: usize) -> Option<usize> {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        self.entries
            .iter()
            .find(|w| w.i == i && w.j == j)
            .map(|w| w.vertex)
    }

    /// Re-checks every witness constraint against `g`.
    pub fn verify(
        &self,
        g: &Graph,
        tuple: &[usize],
        pool: &VertexSet,
        opts: WitnessOptions,
    ) -> bool {
        if tuple.len() != self.k || self.entries.len() != self.k * (self.k - 1) / 2 {
            return false;
        }
        let ok = self.entries.iter().all(|w| {
            pool.contains(w.vertex)
                && (0..self.k).all(|m| g.has_edge(w.vertex, tuple[m]) == (m == w.i || m == w.j))
        });
        if !ok || !opts.distinct {
            return ok;
        }
        let mut used: Vec<usize> = self
            .entries
            .iter()
            .map(|w| w.vertex)
            .chain(tuple.iter().copied())
            .collect();
        used.sort_unstable();
        used.windows(2).all(|p| p[0] != p[1])
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub tuple: Vec<usize>,
    pub witnesses: WitnessMap,
}

fn check_tuple(g: &Graph, tuple: &[usize]) -> Result<(), K2Error> {
    if tuple.len() < 2 {
        return Err(K2Error::SmallK(tuple.len()));
    }
    let mut s = VertexSet::empty(g.n());
    for &v in tuple {
        if v >= g.n() {
            return Err(K2Error::OutOfRange(v));
        }
        if !s.insert(v) {
            return Err(K2Error::DuplicateEntry(v));
        }
    }
    Ok(())
}

/// Candidate witnesses for every pair, in pair order `(0,1), (0,2), …`.
fn candidates(
    g: &Graph,
    tuple: &[usize],
    pool: &VertexSet,
    opts: WitnessOptions,
) -> Vec<(usize, usize, VertexSet)> {
    let k = tuple.len();
    let mut base = pool.clone();
    if opts.distinct {
        tuple.iter().for_each(|&v| {
            base.remove(v);
        });
    }
    let mut out = Vec::with_capacity(k * (k - 1) / 2);
    for i in 0..k {
        for j in i + 1..k {
            let mut c = base.intersection(g.neighbors(tuple[i]));
            c.intersect_with(g.neighbors(tuple[j]));
            for (m, &am) in tuple.iter().enumerate() {
                if m != i && m != j {
                    c.difference_with(g.neighbors(am));
                }
            }
            out.push((i, j, c));
        }
    }
    out
}

fn distinct_assignment(cands: &[(usize, usize, VertexSet)]) -> Option<Vec<usize>> {
    // Most constrained pair first.
    let mut order: Vec<usize> = (0..cands.len()).collect();
    order.sort_by_key(|&p| (cands[p].2.len(), p));
    let mut chosen = vec![usize::MAX; cands.len()];
    let mut used = VertexSet::empty(cands.first().map_or(0, |c| c.2.capacity()));
    fn go(
        depth: usize,
        order: &[usize],
        cands: &[(usize, usize, VertexSet)],
        chosen: &mut [usize],
        used: &mut VertexSet,
    ) -> bool {
        let Some(&p) = order.get(depth) else {
            return true;
        };
        for v in cands[p].2.difference(used).iter() {
            chosen[p] = v;
            used.insert(v);
            if go(depth + 1, order, cands, chosen, used) {
                return true;
            }
            used.remove(v);
        }
        false
    }
    go(0, &order, cands, &mut chosen, &mut used).then_some(chosen)
}

/// Witnesses for `tuple` over `pool`, or `None` when some pair has none.
/// Picks the lowest admissible witness per pair.
pub fn find_k2_witnesses(
    g: &Graph,
    tuple: &[usize],
    pool: &VertexSet,
    opts: WitnessOptions,
) -> Result<Option<WitnessMap>, K2Error> {
    check_tuple(g, tuple)?;
    Ok(witnesses_unchecked(g, tuple, pool, opts))
}

fn witnesses_unchecked(
    g: &Graph,
    tuple: &[usize],
    pool: &VertexSet,
    opts: WitnessOptions,
) -> Option<WitnessMap> {
    let cands = candidates(g, tuple, pool, opts);
    let picks: Vec<usize> = if opts.distinct {
        distinct_assignment(&cands)?
    } else {
        cands.iter().map(|c| c.2.first()).collect::<Option<_>>()?
    };
    let entries = cands
        .iter()
        .zip(picks)
        .map(|(&(i, j, _), vertex)| Witness { i, j, vertex })
        .collect();
    Some(WitnessMap {
        k: tuple.len(),
        entries,
    })
}

pub fn is_rainbow_tuple(b: &Blockade, tuple: &[usize], reading: RainbowReading) -> bool {
    let mut seen = Vec::with_capacity(tuple.len());
    for &v in tuple {
        let Some(blk) = b.block_of(v) else {
            return false;
        };
        if reading == RainbowReading::DistinctBlocks && seen.contains(&blk) {
            return false;
        }
        seen.push(blk);
    }
    true
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| {
        acc.saturating_mul((n - i) as u128) / (i as u128 + 1)
    })
}

/// Depth-first search over sorted k-subsets of `cands` in lexicographic order.
/// `compatible(u, v)` prunes pairs that can never sit in a common tuple.
fn first_tuple(
    cands: &[usize],
    k: usize,
    compatible: &dyn Fn(&[usize], usize) -> bool,
    accept: &mut dyn FnMut(&[usize]) -> Option<WitnessMap>,
) -> Option<Violation> {
    fn go(
        start: usize,
        cur: &mut Vec<usize>,
        cands: &[usize],
        k: usize,
        compatible: &dyn Fn(&[usize], usize) -> bool,
        accept: &mut dyn FnMut(&[usize]) -> Option<WitnessMap>,
    ) -> Option<Violation> {
        if cur.len() == k {
            return accept(cur).map(|w| Violation {
                tuple: cur.clone(),
                witnesses: w,
            });
        }
        let need = k - cur.len();
        for idx in start..cands.len() + 1 - need {
            let v = cands[idx];
            if !compatible(cur, v) {
                continue;
            }
            cur.push(v);
            if let Some(found) = go(idx + 1, cur, cands, k, compatible, accept) {
                return Some(found);
            }
            cur.pop();
        }
        None
    }
    if cands.len() < k {
        return None;
    }
    go(0, &mut Vec::with_capacity(k), cands, k, compatible, accept)
}

/// The lexicographically least (as a sorted vertex list) rainbow k-tuple with
/// the property over the union of the blocks, or `None` when the blockade is
/// rainbow (k choose 2)-free.
pub fn is_rainbow_k2_free(
    g: &Graph,
    b: &Blockade,
    k: usize,
    opts: WitnessOptions,
    reading: RainbowReading,
    caps: K2Caps,
) -> Result<Option<Violation>, K2Error> {
    if k < 2 {
        return Err(K2Error::SmallK(k));
    }
    let pool = b.union();
    let cands = pool.to_vec();
    let tuples = binomial(cands.len(), k);
    if tuples > caps.max_tuples {
        return Err(K2Error::CapExceeded {
            tuples,
            cap: caps.max_tuples,
        });
    }
    let owner: Vec<usize> = {
        let mut o = vec![usize::MAX; g.n()];
        for (i, blk) in b.blocks().iter().enumerate() {
            blk.iter().for_each(|v| o[v] = i);
        }
        o
    };
    let compatible = |cur: &[usize], v: usize| {
        cur.iter().all(|&u| {
            (reading == RainbowReading::MembershipOnly || owner[u] != owner[v])
                && g.neighbors(u)
                    .intersection(g.neighbors(v))
                    .intersection_len(&pool)
                    > 0
        })
    };
    let mut accept = |t: &[usize]| witnesses_unchecked(g, t, &pool, opts);
    Ok(first_tuple(&cands, k, &compatible, &mut accept))
}

/// Lexicographically least k-set of distinct vertices with the property over
/// all of `V(g)`.
pub fn find_k2_tuple(
    g: &Graph,
    k: usize,
    opts: WitnessOptions,
    caps: K2Caps,
) -> Result<Option<Violation>, K2Error> {
    if k < 2 {
        return Err(K2Error::SmallK(k));
    }
    let tuples = binomial(g.n(), k);
    if tuples > caps.max_tuples {
        return Err(K2Error::CapExceeded {
            tuples,
            cap: caps.max_tuples,
        });
    }
    let pool = g.vertices();
    let cands = pool.to_vec();
    let compatible = |cur: &[usize], v: usize| {
        cur.iter()
            .all(|&u| !g.neighbors(u).is_disjoint(g.neighbors(v)))
    };
    let mut accept = |t: &[usize]| witnesses_unchecked(g, t, &pool, opts);
    Ok(first_tuple(&cands, k, &compatible, &mut accept))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum StrongVerdict {
    Free,
    ViolationInG { violation: Violation },
    ViolationInComplement { violation: Violation },
}

impl StrongVerdict {
    pub fn is_free(&self) -> bool {
        matches!(self, StrongVerdict::Free)
    }
}

/// Whether both `g` and its complement are (k choose 2)-free over all vertices.
pub fn is_strongly_k2_free(
    g: &Graph,
    k: usize,
    opts: WitnessOptions,
    caps: K2Caps,
) -> Result<StrongVerdict, K2Error> {
    if let Some(violation) = find_k2_tuple(g, k, opts, caps)? {
        return Ok(StrongVerdict::ViolationInG { violation });
    }
    if let Some(violation) = find_k2_tuple(&g.complement(), k, opts, caps)? {
        return Ok(StrongVerdict::ViolationInComplement { violation });
    }
    Ok(StrongVerdict::Free)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    const LOOSE: WitnessOptions = WitnessOptions { distinct: false };
    const STRICT: WitnessOptions = WitnessOptions { distinct: true };

    fn free(g: &Graph, b: &Blockade, k: usize) -> Option<Violation> {
        is_rainbow_k2_free(
            g,
            b,
            k,
            LOOSE,
            RainbowReading::DistinctBlocks,
            K2Caps::default(),
        )
        .unwrap()
    }

    #[test]
    fn witness_examples() {
        // Star with centre 2 over leaves 0 and 1.
        let star = Graph::new(3, &[(2, 0), (2, 1)]).unwrap();
        let pool = VertexSet::singleton(3, 2);
        let w = find_k2_witnesses(&star, &[0, 1], &pool, LOOSE)
            .unwrap()
            .unwrap();
        assert_eq!(w.get(0, 1), Some(2));

        // a1,a2,a3 = 0,1,2; b12,b13,b23 = 3,4,5.
        let g = Graph::new(6, &[(3, 0), (3, 1), (4, 0), (4, 2), (5, 1), (5, 2)]).unwrap();
        let pool = VertexSet::from_iter_in(6, [3, 4, 5]);
        let w = find_k2_witnesses(&g, &[0, 1, 2], &pool, STRICT)
            .unwrap()
            .unwrap();
        assert_eq!(
            (w.get(0, 1), w.get(0, 2), w.get(1, 2)),
            (Some(3), Some(4), Some(5))
        );
        assert!(oracle::k2_property(&g, &[0, 1, 2], &pool, true));

        assert_eq!(
            find_k2_witnesses(&Graph::empty(6), &[0, 1, 2], &g.vertices(), LOOSE).unwrap(),
            None
        );
        assert_eq!(
            find_k2_witnesses(&g, &[0, 0], &pool, LOOSE),
            Err(K2Error::DuplicateEntry(0))
        );
        assert_eq!(
            find_k2_witnesses(&g, &[0], &pool, LOOSE),
            Err(K2Error::SmallK(1))
        );
    }

    #[test]
    fn coinciding_witnesses_are_allowed_by_default() {
        // In a triangle each pair is witnessed by the third tuple entry.
        let k3 = Graph::complete(3);
        let all = k3.vertices();
        assert!(find_k2_witnesses(&k3, &[0, 1, 2], &all, LOOSE)
            .unwrap()
            .is_some());
        assert!(find_k2_witnesses(&k3, &[0, 1, 2], &all, STRICT)
            .unwrap()
            .is_none());
    }

    #[test]
    fn rainbow_tuple_examples() {
        let b = Blockade::new(6, vec![vec![0, 1], vec![2, 3], vec![4]]).unwrap();
        assert!(is_rainbow_tuple(
            &b,
            &[0, 2, 4],
            RainbowReading::DistinctBlocks
        ));
        assert!(!is_rainbow_tuple(
            &b,
            &[0, 1],
            RainbowReading::DistinctBlocks
        ));
        assert!(is_rainbow_tuple(
            &b,
            &[0, 1],
            RainbowReading::MembershipOnly
        ));
        assert!(!is_rainbow_tuple(
            &b,
            &[0, 5],
            RainbowReading::DistinctBlocks
        ));
        assert!(!is_rainbow_tuple(
            &b,
            &[0, 5],
            RainbowReading::MembershipOnly
        ));
    }

    #[test]
    fn rainbow_free_examples() {
        let b = Blockade::new(4, vec![vec![0], vec![1], vec![2, 3]]).unwrap();
        assert_eq!(free(&Graph::empty(4), &b, 2), None);
        let g = Graph::new(4, &[(0, 3), (1, 3)]).unwrap();
        let v = free(&g, &b, 2).unwrap();
        assert_eq!(v.tuple, vec![0, 1]);
        assert_eq!(v.witnesses.get(0, 1), Some(3));
        let short = Blockade::new(4, vec![vec![0, 1], vec![2, 3]]).unwrap();
        assert_eq!(free(&Graph::complete(4), &short, 3), None);
    }

    #[test]
    fn witness_pool_is_the_blockade() {
        // The only common neighbour of 0 and 1 lies outside every block.
        let g = Graph::new(3, &[(0, 2), (1, 2)]).unwrap();
        let b = Blockade::new(3, vec![vec![0], vec![1]]).unwrap();
        assert_eq!(free(&g, &b, 2), None);
    }

    #[test]
    fn strong_examples() {
        let caps = K2Caps::default();
        let k3 = is_strongly_k2_free(&Graph::complete(3), 2, LOOSE, caps).unwrap();
        assert!(matches!(k3, StrongVerdict::ViolationInG { .. }));
        assert_eq!(
            is_strongly_k2_free(&Graph::complete(2), 2, LOOSE, caps).unwrap(),
            StrongVerdict::Free
        );
        // Edgeless graphs on at least 3 vertices: the complement is complete,
        // which has the property for k = 2 and k = 3 (the third entry witnesses).
        for n in 3..=6 {
            for k in [2, 3] {
                let v = is_strongly_k2_free(&Graph::empty(n), k, LOOSE, caps).unwrap();
                assert!(
                    matches!(v, StrongVerdict::ViolationInComplement { .. }),
                    "n={n} k={k}"
                );
            }
            // k = 4 in a complete graph: a witness for (1,2) is adjacent to 3 and 4 too.
            let v = is_strongly_k2_free(&Graph::empty(n), 4, LOOSE, caps).unwrap();
            assert_eq!(v, StrongVerdict::Free, "n={n}");
        }
        assert!(matches!(
            is_strongly_k2_free(&Graph::empty(200), 4, LOOSE, caps),
            Err(K2Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn witness_search_matches_brute_force() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..400 {
            let n = rng.gen_range(3..=7);
            let g = Graph::from_fn(n, |_, _| rng.gen_bool(0.5));
            let k = rng.gen_range(2..=3.min(n));
            let mut verts: Vec<usize> = (0..n).collect();
            for i in 0..k {
                let j = rng.gen_range(i..n);
                verts.swap(i, j);
            }
            let tuple = &verts[..k];
            let pool = VertexSet::from_iter_in(n, (0..n).filter(|_| rng.gen_bool(0.7)));
            for distinct in [false, true] {
                let opts = WitnessOptions { distinct };
                let fast = find_k2_witnesses(&g, tuple, &pool, opts).unwrap();
                assert_eq!(
                    fast.is_some(),
                    oracle::k2_property(&g, tuple, &pool, distinct)
                );
                if let Some(w) = fast {
                    assert!(w.verify(&g, tuple, &pool, opts));
                }
            }
        }
    }

    fn instance() -> impl Strategy<Value = (Graph, Blockade, usize)> {
        (any::<u64>(), 2usize..=3).prop_map(|(seed, k)| {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let t = rng.gen_range(2..=5);
            let n = 2 * t + 2;
            let g = Graph::from_fn(n, |_, _| rng.gen_bool(0.25));
            let b = Blockade::new(n, (0..t).map(|i| vec![2 * i, 2 * i + 1]).collect()).unwrap();
            (g, b, k)
        })
    }

    proptest! {
        #[test]
        fn property_is_monotone_in_the_pool((g, b, k) in instance()) {
            let tuple: Vec<usize> = (0..k).map(|i| 2 * i).collect();
            if tuple.iter().all(|&v| v < g.n()) {
                let small = b.block(0).union(b.block(1));
                if find_k2_witnesses(&g, &tuple, &small, LOOSE).unwrap().is_some() {
                    prop_assert!(find_k2_witnesses(&g, &tuple, &g.vertices(), LOOSE).unwrap().is_some());
                }
            }
        }

        #[test]
        fn deleting_a_block_keeps_freeness((g, b, k) in instance(), drop in 0usize..5) {
            if free(&g, &b, k).is_none() && b.len() > 1 {
                let keep: Vec<usize> = (0..b.len()).filter(|&i| i != drop % b.len()).collect();
                let sub = b.sub_blockade(&keep).unwrap();
                prop_assert!(free(&g, &sub, k).is_none());
            }
        }

        #[test]
        fn violations_carry_valid_witnesses((g, b, k) in instance()) {
            if let Some(v) = free(&g, &b, k) {
                prop_assert!(is_rainbow_tuple(&b, &v.tuple, RainbowReading::DistinctBlocks));
                prop_assert!(v.witnesses.verify(&g, &v.tuple, &b.union(), LOOSE));
            }
        }
    }
}
