//! Brute-force reference implementations used to cross-check the fast routines.
//!
//! Everything here is exponential and meant for tiny inputs only.

use std::collections::HashSet;

use crate::graph::Graph;

/// Index of the unordered pair `{i, j}` in a labelling that does not depend on `n`.
fn pair_index(i: usize, j: usize) -> usize {
    let (lo, hi) = if i < j { (i, j) } else { (j, i) };
    hi * (hi - 1) / 2 + lo
}

/// Edge set of `g` as a bitmask over pair indices. Needs `n ≤ 11`.
pub fn encode(g: &Graph) -> u64 {
    assert!(g.n() <= 11, "encode supports at most 11 vertices");
    g.edges()
        .into_iter()
        .fold(0u64, |m, (u, v)| m | 1 << pair_index(u, v))
}

fn pairs_mask(subset: u32) -> u64 {
    let vs: Vec<usize> = (0..32).filter(|v| subset >> v & 1 == 1).collect();
    let mut m = 0u64;
    for (a, &i) in vs.iter().enumerate() {
        for &j in &vs[a + 1..] {
            m |= 1 << pair_index(i, j);
        }
    }
    m
}

/// For every vertex subset `S ⊆ 0..n` (indexed by bitmask), the set of all
/// graphs on exactly the vertex set `S` that the closure rules generate:
/// single vertices, disjoint unions, and complements.
pub fn cograph_closure_table(n: usize) -> Vec<HashSet<u64>> {
    assert!(n <= 8, "closure table supports at most 8 vertices");
    let size = 1usize << n;
    let mut table: Vec<HashSet<u64>> = vec![HashSet::new(); size];
    let mut masks: Vec<u32> = (1..size as u32).collect();
    masks.sort_by_key(|m| m.count_ones());
    for s in masks {
        let mut fam = HashSet::new();
        if s.count_ones() == 1 {
            fam.insert(0u64);
        } else {
            let low = s & s.wrapping_neg();
            let rest = s ^ low;
            // Enumerate splits S = S1 ⊔ S2 with the lowest vertex in S1.
            let mut sub = rest;
            loop {
                let s1 = low | sub;
                let s2 = s ^ s1;
                if s2 != 0 {
                    for &g1 in &table[s1 as usize] {
                        for &g2 in &table[s2 as usize] {
                            fam.insert(g1 | g2);
                        }
                    }
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & rest;
            }
            let all = pairs_mask(s);
            let complements: Vec<u64> = fam.iter().map(|g| all ^ g).collect();
            fam.extend(complements);
        }
        table[s as usize] = fam;
    }
    table
}

/// Edge masks of every labelled cograph on `0..n`.
pub fn cograph_closure(n: usize) -> HashSet<u64> {
    if n == 0 {
        return HashSet::new();
    }
    cograph_closure_table(n).swap_remove((1 << n) - 1)
}

/// Masks of all 4-vertex sets inducing a path on four vertices.
fn induced_p4_masks(g: &Graph) -> Vec<u32> {
    let n = g.n();
    let mut out = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for d in c + 1..n {
                    let q = [a, b, c, d];
                    let mut edges = 0;
                    let mut deg = [0; 4];
                    for i in 0..4 {
                        for j in i + 1..4 {
                            if g.has_edge(q[i], q[j]) {
                                edges += 1;
                                deg[i] += 1;
                                deg[j] += 1;
                            }
                        }
                    }
                    deg.sort_unstable();
                    if edges == 3 && deg == [1, 1, 2, 2] {
                        out.push(1 << a | 1 << b | 1 << c | 1 << d);
                    }
                }
            }
        }
    }
    out
}

/// Largest cograph size inside `subset`, via the induced-P4-free characterisation
/// and a scan over all subsets. Needs `n ≤ 20`.
pub fn largest_cograph_size_in(g: &Graph, subset: u32) -> usize {
    assert!(g.n() <= 20);
    let p4s = induced_p4_masks(g);
    let mut best = 0;
    let mut sub = subset;
    loop {
        let c = sub.count_ones() as usize;
        if c > best && p4s.iter().all(|&q| q & sub != q) {
            best = c;
        }
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & subset;
    }
    best
}

pub fn largest_cograph_size(g: &Graph) -> usize {
    largest_cograph_size_in(g, ((1u64 << g.n()) - 1) as u32)
}

/// τ-criticality straight from the definition, in plain floating point.
pub fn is_tau_critical(g: &Graph, tau: f64) -> bool {
    let n = g.n();
    let full = ((1u64 << n) - 1) as u32;
    if largest_cograph_size_in(g, full) as f64 >= (n as f64).powf(tau) {
        return false;
    }
    (1..full).all(|s| largest_cograph_size_in(g, s) as f64 >= (s.count_ones() as f64).powf(tau))
}

/// The (k choose 2)-property by trying every assignment of pool vertices to
/// pairs, `|pool|^(k choose 2)` in total.
pub fn k2_property(
    g: &Graph,
    tuple: &[usize],
    pool: &crate::set::VertexSet,
    distinct: bool,
) -> bool {
    let k = tuple.len();
    let pairs: Vec<(usize, usize)> = (0..k)
        .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
        .collect();
    let xs = pool.to_vec();
    if xs.is_empty() {
        return false;
    }
    let total = xs
        .len()
        .checked_pow(pairs.len() as u32)
        .expect("assignment space too large");
    (0..total).any(|code| {
        let mut c = code;
        let mut chosen = Vec::with_capacity(pairs.len());
        for _ in &pairs {
            chosen.push(xs[c % xs.len()]);
            c /= xs.len();
        }
        let fits = pairs
            .iter()
            .zip(&chosen)
            .all(|(&(i, j), &b)| (0..k).all(|m| g.has_edge(b, tuple[m]) == (m == i || m == j)));
        if !fits {
            return false;
        }
        if distinct {
            let mut all: Vec<usize> = chosen.iter().chain(tuple).copied().collect();
            all.sort_unstable();
            all.windows(2).all(|w| w[0] != w[1])
        } else {
            true
        }
    })
}

/// Plain-vector restatement of the greedy layered cover: per layer, the list of
/// `(apex, tooth)` pairs with teeth as sorted vectors.
pub fn greedy_layers(
    g: &Graph,
    c: &[usize],
    d: &[usize],
    delta: usize,
) -> Vec<Vec<(usize, Vec<usize>)>> {
    let mut residual: Vec<usize> = d.to_vec();
    let mut out = Vec::new();
    let mut s = 0u32;
    while c
        .iter()
        .any(|&a| residual.iter().any(|&y| g.has_edge(a, y)))
    {
        s += 1;
        let mut layer: Vec<(usize, Vec<usize>)> = Vec::new();
        for &a in c {
            let fresh: Vec<usize> = residual
                .iter()
                .copied()
                .filter(|&y| g.has_edge(a, y) && layer.iter().all(|(_, t)| !t.contains(&y)))
                .collect();
            // (2/3)^s · delta ≤ |fresh|  ⇔  2^s · delta ≤ 3^s · |fresh|
            let lhs = num_bigint::BigUint::from(2u32).pow(s) * delta;
            let rhs = num_bigint::BigUint::from(3u32).pow(s) * fresh.len();
            if !fresh.is_empty() && lhs <= rhs {
                layer.push((a, fresh));
            }
        }
        residual.retain(|y| layer.iter().all(|(_, t)| !t.contains(y)));
        out.push(layer);
    }
    out
}

/// All `size`-subsets of `items`.
fn subsets_of_size(items: &[usize], size: usize) -> Vec<Vec<usize>> {
    if size == 0 {
        return vec![vec![]];
    }
    if items.len() < size {
        return vec![];
    }
    let mut out = subsets_of_size(&items[1..], size - 1);
    out.iter_mut().for_each(|s| s.insert(0, items[0]));
    out.extend(subsets_of_size(&items[1..], size));
    out
}

/// `W_G` by enumerating every apex tuple and every assignment of equal-size
/// teeth drawn from the non-neighbourhood, then validating the comb axioms
/// directly.
pub fn w_g(g: &Graph) -> usize {
    let n = g.n();
    assert!(n <= 7, "literal W_G oracle supports at most 7 vertices");
    let mut best = n;
    for h in [g.clone(), g.complement()] {
        for a in 0..n {
            let e: Vec<usize> = (0..n).filter(|&v| h.has_edge(a, v)).collect();
            let non: Vec<usize> = (0..n).filter(|&v| v != a && !h.has_edge(a, v)).collect();
            for s in 1..=e.len() {
                for apexes in subsets_of_size(&e, s) {
                    for w in 1..=non.len() {
                        if (w * s * s) < n || w >= best {
                            continue;
                        }
                        if teeth_exist(&h, &apexes, &subsets_of_size(&non, w), &mut Vec::new()) {
                            best = w;
                        }
                    }
                }
            }
        }
    }
    best
}

fn teeth_exist(
    h: &Graph,
    apexes: &[usize],
    candidates: &[Vec<usize>],
    chosen: &mut Vec<Vec<usize>>,
) -> bool {
    if chosen.len() == apexes.len() {
        let disjoint = chosen.iter().enumerate().all(|(i, bi)| {
            chosen[i + 1..]
                .iter()
                .all(|bj| bi.iter().all(|v| !bj.contains(v)))
        });
        let complete = apexes
            .iter()
            .zip(chosen.iter())
            .all(|(&x, b)| b.iter().all(|&y| h.has_edge(x, y)));
        let private = apexes.iter().enumerate().all(|(i, &x)| {
            chosen
                .iter()
                .enumerate()
                .all(|(j, b)| i == j || b.iter().all(|&y| !h.has_edge(x, y)))
        });
        return disjoint && complete && private;
    }
    for cand in candidates {
        chosen.push(cand.clone());
        if teeth_exist(h, apexes, candidates, chosen) {
            return true;
        }
        chosen.pop();
    }
    false
}
