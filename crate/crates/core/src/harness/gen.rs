//! Seeded instance generators.

use rand::seq::{IteratorRandom, SliceRandom};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::rng_for;
use crate::blockade::Blockade;
use crate::cograph::Cotree;
use crate::comb::{self, Comb};
use crate::graph::Graph;
use crate::k2::{self, K2Caps, RainbowReading, WitnessOptions};
use crate::set::VertexSet;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenError {
    #[error("invalid generator parameter: {0}")]
    BadParameter(String),
    #[error("no acceptable instance after {0} attempts")]
    Exhausted(usize),
}

/// A count that is either fixed or drawn uniformly from an inclusive range.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Size {
    Fixed(usize),
    Range([usize; 2]),
}

impl Size {
    fn draw(self, rng: &mut ChaCha8Rng) -> Result<usize, GenError> {
        match self {
            Size::Fixed(v) => Ok(v),
            Size::Range([lo, hi]) if lo <= hi => Ok(rng.gen_range(lo..=hi)),
            Size::Range([lo, hi]) => {
                Err(GenError::BadParameter(format!("empty range [{lo}, {hi}]")))
            }
        }
    }
}

impl From<usize> for Size {
    fn from(v: usize) -> Self {
        Size::Fixed(v)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GeneratorSpec {
    /// `G(n, p)`.
    Gnp { n: Size, p: f64 },
    /// Random binary cotree; each internal node is a join with probability `join_bias`.
    CographRandom { leaves: Size, join_bias: f64 },
    /// Sides `0..a` and `a..a+b`; every B-vertex gets at least one A-neighbour.
    Bipartite { a: Size, b: Size, p: f64 },
    /// `t` blocks of `width`; a hub adjacent to `apexes` apexes in distinct blocks,
    /// each complete to a private tooth of `tooth_size` vertices in a further block,
    /// plus `G(·, noise)` among the remaining vertices.
    PlantedComb {
        t: usize,
        width: usize,
        apexes: usize,
        tooth_size: usize,
        noise: f64,
    },
    /// `t` blocks of `width` with random edges inside the union, each endpoint
    /// capped at `max_degree`.
    SparseBlockade {
        t: usize,
        width: usize,
        p: f64,
        max_degree: usize,
    },
    /// Blocks of random size `1..=block_size`, `extra` vertices outside the
    /// blockade, `G(n, p)` resampled until the blockade is rainbow
    /// (k choose 2)-free.
    RainbowFreeRejection {
        k: usize,
        blocks: usize,
        block_size: usize,
        extra: usize,
        p: f64,
        max_attempts: usize,
    },
    /// `blocks` blocks of `width` that are rainbow (2 choose 2)-free by
    /// construction: random edges inside blocks, and isolated cross edges
    /// between vertices with no other neighbours.
    StructuredRainbowFree {
        blocks: usize,
        width: usize,
        p_in: f64,
        p_cross: f64,
    },
    /// An anchor vertex with a comb beside it, for `k = 3`; resampled until the
    /// blockade is rainbow (3 choose 2)-free and the comb is valid.
    KeyobInstance {
        blocks: usize,
        block_size: usize,
        apexes: usize,
        noise: f64,
        max_attempts: usize,
    },
}

/// A generated graph with whatever structure the generator planted.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Instance {
    pub graph: Graph,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub blockade: Option<Blockade>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sides: Option<(VertexSet, VertexSet)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cotree: Option<Cotree>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub anchor: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub comb: Option<Comb>,
    pub attempts: usize,
}

impl Instance {
    fn graph(graph: Graph) -> Self {
        Instance {
            graph,
            blockade: None,
            sides: None,
            cotree: None,
            anchor: None,
            comb: None,
            attempts: 1,
        }
    }
}

fn check_p(p: f64) -> Result<(), GenError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(GenError::BadParameter(format!(
            "probability {p} outside [0, 1]"
        )))
    }
}

fn require(ok: bool, what: &str) -> Result<(), GenError> {
    if ok {
        Ok(())
    } else {
        Err(GenError::BadParameter(what.into()))
    }
}

fn consecutive_blocks(t: usize, width: usize) -> Blockade {
    Blockade::new(
        t * width,
        (0..t)
            .map(|i| (i * width..(i + 1) * width).collect())
            .collect(),
    )
    .expect("consecutive blocks are disjoint")
}

/// Deterministic output for a spec and a seed.
pub fn generate(spec: &GeneratorSpec, seed: u64) -> Result<Instance, GenError> {
    let mut rng = rng_for(seed);
    match *spec {
        GeneratorSpec::Gnp { n, p } => {
            check_p(p)?;
            let n = n.draw(&mut rng)?;
            Ok(Instance::graph(gnp(&mut rng, n, p)))
        }
        GeneratorSpec::CographRandom { leaves, join_bias } => {
            check_p(join_bias)?;
            let leaves = leaves.draw(&mut rng)?;
            require(leaves >= 1, "leaves must be at least 1")?;
            let tree = random_cotree(&mut rng, leaves, join_bias);
            let graph = tree.evaluate(leaves).expect("cotree over 0..leaves");
            Ok(Instance {
                cotree: Some(tree),
                ..Instance::graph(graph)
            })
        }
        GeneratorSpec::Bipartite { a, b, p } => {
            check_p(p)?;
            let (a, b) = (a.draw(&mut rng)?, b.draw(&mut rng)?);
            require(a >= 1 && b >= 1, "both sides must be nonempty")?;
            let mut edges = Vec::new();
            for y in a..a + b {
                let before = edges.len();
                for x in 0..a {
                    if rng.gen_bool(p) {
                        edges.push((x, y));
                    }
                }
                if edges.len() == before {
                    edges.push((rng.gen_range(0..a), y));
                }
            }
            let n = a + b;
            let sides = (
                VertexSet::from_iter_in(n, 0..a),
                VertexSet::from_iter_in(n, a..n),
            );
            Ok(Instance {
                sides: Some(sides),
                ..Instance::graph(Graph::new(n, &edges).expect("valid edges"))
            })
        }
        GeneratorSpec::PlantedComb {
            t,
            width,
            apexes,
            tooth_size,
            noise,
        } => {
            check_p(noise)?;
            require(apexes >= 1 && 2 * apexes < t, "need 2·apexes + 1 ≤ t")?;
            require(
                tooth_size >= 1 && tooth_size <= width,
                "need 1 ≤ tooth_size ≤ width",
            )?;
            planted_comb(&mut rng, t, width, apexes, tooth_size, noise)
        }
        GeneratorSpec::SparseBlockade {
            t,
            width,
            p,
            max_degree,
        } => {
            check_p(p)?;
            require(t >= 1 && width >= 1, "t and width must be positive")?;
            let n = t * width;
            let mut deg = vec![0usize; n];
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(p) && deg[u] < max_degree && deg[v] < max_degree {
                        deg[u] += 1;
                        deg[v] += 1;
                        edges.push((u, v));
                    }
                }
            }
            let graph = Graph::new(n, &edges).expect("valid edges");
            Ok(Instance {
                blockade: Some(consecutive_blocks(t, width)),
                ..Instance::graph(graph)
            })
        }
        GeneratorSpec::RainbowFreeRejection {
            k,
            blocks,
            block_size,
            extra,
            p,
            max_attempts,
        } => {
            check_p(p)?;
            require(
                k >= 2 && blocks >= 1 && block_size >= 1,
                "need k ≥ 2 and nonempty blocks",
            )?;
            for attempt in 1..=max_attempts {
                let sizes: Vec<usize> =
                    (0..blocks).map(|_| rng.gen_range(1..=block_size)).collect();
                let n = sizes.iter().sum::<usize>() + extra;
                let mut next = 0;
                let parts: Vec<Vec<usize>> = sizes
                    .iter()
                    .map(|&s| {
                        next += s;
                        (next - s..next).collect()
                    })
                    .collect();
                let b = Blockade::new(n, parts).expect("consecutive blocks");
                let g = gnp(&mut rng, n, p);
                let free = k2::is_rainbow_k2_free(
                    &g,
                    &b,
                    k,
                    WitnessOptions::default(),
                    RainbowReading::default(),
                    K2Caps::default(),
                )
                .map_err(|e| GenError::BadParameter(e.to_string()))?;
                if free.is_none() {
                    return Ok(Instance {
                        blockade: Some(b),
                        attempts: attempt,
                        ..Instance::graph(g)
                    });
                }
            }
            Err(GenError::Exhausted(max_attempts))
        }
        GeneratorSpec::StructuredRainbowFree {
            blocks,
            width,
            p_in,
            p_cross,
        } => {
            check_p(p_in)?;
            check_p(p_cross)?;
            require(
                blocks >= 2 && width >= 1,
                "need two blocks of positive width",
            )?;
            Ok(structured_rainbow_free(
                &mut rng, blocks, width, p_in, p_cross,
            ))
        }
        GeneratorSpec::KeyobInstance {
            blocks,
            block_size,
            apexes,
            noise,
            max_attempts,
        } => {
            check_p(noise)?;
            require(
                apexes >= 1 && blocks > apexes + 1 && block_size >= 1,
                "need blocks ≥ apexes + 2",
            )?;
            for attempt in 1..=max_attempts {
                if let Some(inst) = keyob_attempt(&mut rng, blocks, block_size, apexes, noise) {
                    return Ok(Instance {
                        attempts: attempt,
                        ..inst
                    });
                }
            }
            Err(GenError::Exhausted(max_attempts))
        }
    }
}

fn gnp(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, &edges).expect("valid edges")
}

fn random_cotree(rng: &mut ChaCha8Rng, leaves: usize, join_bias: f64) -> Cotree {
    let mut forest: Vec<Cotree> = (0..leaves).map(Cotree::Leaf).collect();
    while forest.len() > 1 {
        let i = rng.gen_range(0..forest.len());
        let a = forest.swap_remove(i);
        let j = rng.gen_range(0..forest.len());
        let b = forest.swap_remove(j);
        forest.push(if rng.gen_bool(join_bias) {
            Cotree::Join(vec![a, b])
        } else {
            Cotree::Union(vec![a, b])
        });
    }
    forest.pop().expect("at least one leaf")
}

fn planted_comb(
    rng: &mut ChaCha8Rng,
    t: usize,
    width: usize,
    apexes: usize,
    tooth_size: usize,
    noise: f64,
) -> Result<Instance, GenError> {
    let n = t * width;
    let b = consecutive_blocks(t, width);
    let mut order: Vec<usize> = (0..t).collect();
    order.shuffle(rng);
    let pick = |rng: &mut ChaCha8Rng, blk: usize, count: usize| -> Vec<usize> {
        (blk * width..(blk + 1) * width).choose_multiple(rng, count)
    };
    let hub = pick(rng, order[0], 1)[0];
    let mut edges = Vec::new();
    let mut structure = VertexSet::singleton(n, hub);
    let mut comb = Comb {
        apexes: Vec::new(),
        teeth: Vec::new(),
    };
    for j in 0..apexes {
        let apex = pick(rng, order[1 + j], 1)[0];
        let tooth = pick(rng, order[1 + apexes + j], tooth_size);
        edges.push((hub, apex));
        structure.insert(apex);
        for &v in &tooth {
            edges.push((apex, v));
            structure.insert(v);
        }
        comb.apexes.push(apex);
        comb.teeth.push(VertexSet::from_iter_in(n, tooth));
    }
    let rest = structure.complement().to_vec();
    for (i, &u) in rest.iter().enumerate() {
        for &v in &rest[i + 1..] {
            if rng.gen_bool(noise) {
                edges.push((u, v));
            }
        }
    }
    let graph = Graph::new(n, &edges).expect("valid edges");
    debug_assert!(comb::validate_comb(&graph, &comb, tooth_size));
    Ok(Instance {
        blockade: Some(b),
        anchor: Some(hub),
        comb: Some(comb),
        ..Instance::graph(graph)
    })
}

fn structured_rainbow_free(
    rng: &mut ChaCha8Rng,
    blocks: usize,
    width: usize,
    p_in: f64,
    p_cross: f64,
) -> Instance {
    let n = blocks * width;
    let mut edges = Vec::new();
    let mut loose: Vec<usize> = Vec::new();
    for blk in 0..blocks {
        let members: Vec<usize> = (blk * width..(blk + 1) * width).collect();
        let mut touched = vec![false; width];
        for i in 0..width {
            for j in i + 1..width {
                if rng.gen_bool(p_in) {
                    edges.push((members[i], members[j]));
                    touched[i] = true;
                    touched[j] = true;
                }
            }
        }
        loose.extend(
            members
                .iter()
                .zip(&touched)
                .filter(|(_, &t)| !t)
                .map(|(&v, _)| v),
        );
    }
    loose.shuffle(rng);
    let mut used = vec![false; n];
    for i in 0..loose.len() {
        if used[loose[i]] || !rng.gen_bool(p_cross) {
            continue;
        }
        if let Some(j) =
            (i + 1..loose.len()).find(|&j| !used[loose[j]] && loose[j] / width != loose[i] / width)
        {
            used[loose[i]] = true;
            used[loose[j]] = true;
            edges.push((loose[i], loose[j]));
        }
    }
    let graph = Graph::new(n, &edges).expect("valid edges");
    Instance {
        blockade: Some(consecutive_blocks(blocks, width)),
        ..Instance::graph(graph)
    }
}

fn keyob_attempt(
    rng: &mut ChaCha8Rng,
    blocks: usize,
    block_size: usize,
    apexes: usize,
    noise: f64,
) -> Option<Instance> {
    let n = blocks * block_size;
    let b = consecutive_blocks(blocks, block_size);
    let mut order: Vec<usize> = (0..blocks).collect();
    order.shuffle(rng);
    let home = order[0];
    let anchor = home * block_size + rng.gen_range(0..block_size);
    // Apexes anywhere outside the anchor; teeth in distinct blocks other than home.
    let mut tooth_blocks: Vec<usize> = order[1..=apexes].to_vec();
    tooth_blocks.sort_unstable();
    let mut taken = VertexSet::singleton(n, anchor);
    let mut teeth = Vec::new();
    for &blk in &tooth_blocks {
        let size = rng.gen_range(1..=block_size);
        let tooth = VertexSet::from_iter_in(
            n,
            (blk * block_size..(blk + 1) * block_size).choose_multiple(rng, size),
        );
        taken.union_with(&tooth);
        teeth.push(tooth);
    }
    let free: Vec<usize> = taken.complement().to_vec();
    if free.len() < apexes {
        return None;
    }
    let apex_list: Vec<usize> = free.choose_multiple(rng, apexes).copied().collect();
    let mut edges = Vec::new();
    for (&a, tooth) in apex_list.iter().zip(&teeth) {
        edges.push((anchor, a));
        tooth.iter().for_each(|v| edges.push((a, v)));
    }
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(noise) {
                edges.push((u, v));
            }
        }
    }
    let graph = Graph::new(n, &edges).ok()?;
    let comb = Comb {
        apexes: apex_list,
        teeth,
    };
    let all = b.union();
    let cs = graph.neighbors(anchor).intersection(&all);
    let mut ds = all.difference(graph.neighbors(anchor));
    ds.remove(anchor);
    comb::check_comb_in(&graph, &comb, 1, &cs, &ds).ok()?;
    let free = k2::is_rainbow_k2_free(
        &graph,
        &b,
        3,
        WitnessOptions::default(),
        RainbowReading::default(),
        K2Caps::default(),
    )
    .ok()?
    .is_none();
    free.then(|| Instance {
        blockade: Some(b),
        anchor: Some(anchor),
        comb: Some(comb),
        ..Instance::graph(graph)
    })
}
