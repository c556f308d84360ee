//! Seeded instance generators: planted YES graphs whose promise holds by
//! construction, and brute-force-certified NO graphs found by rejection
//! sampling.

use num::{BigInt, One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::Error;
use crate::graph::{
    max_cut_ratio, normalize_weights, Edge, GapSpec, Partition, WeightedGraph, BRUTE_CAP,
};
use crate::num_mode::{Num, Rat};

/// Attempt budget for rejection sampling of NO instances.
pub const NO_SAMPLE_BUDGET: usize = 5000;

/// Weight granularity: random weights are multiples of 1/8.
const WEIGHT_DENOM: i64 = 8;

/// Parameters for planted instance generation.
#[derive(Clone, Debug)]
pub struct PlantSpec {
    pub n: usize,
    pub m: usize,
    pub gap: GapSpec,
    pub seed: u64,
    /// Weights drawn uniformly from [1, w_max]; w_max = 1 means unit weights.
    pub w_max: Rat,
}

impl PlantSpec {
    pub fn validate(&self) -> Result<(), Error> {
        if self.n < 2 {
            return Err(Error::Validation(format!("need n >= 2, got {}", self.n)));
        }
        if self.m < self.n {
            return Err(Error::Validation(format!(
                "need m >= n for vertex coverage, got m = {}, n = {}",
                self.m, self.n
            )));
        }
        let pairs = self.n * (self.n - 1) / 2;
        if self.m > pairs {
            return Err(Error::Infeasible(format!(
                "m = {} exceeds the {} vertex pairs of a simple graph on n = {}",
                self.m, pairs, self.n
            )));
        }
        if self.w_max < Rat::one() {
            return Err(Error::Validation(format!(
                "need w_max >= 1, got {}",
                self.w_max
            )));
        }
        Ok(())
    }

    fn unit_weights(&self) -> bool {
        self.w_max.is_one()
    }
}

fn random_weight(rng: &mut ChaCha12Rng, w_max: &Rat) -> Rat {
    // multiples of 1/WEIGHT_DENOM in [1, w_max]
    let hi = (w_max * Rat::from_integer(BigInt::from(WEIGHT_DENOM)))
        .floor()
        .to_integer();
    let lo = BigInt::from(WEIGHT_DENOM);
    if hi <= lo {
        return Rat::one();
    }
    let span: i64 = i64::try_from(&hi - &lo).expect("weight span fits i64");
    let pick = lo + BigInt::from(rng.gen_range(0..=span));
    Rat::new(pick, BigInt::from(WEIGHT_DENOM))
}

/// Number of crossing edges required: ceil((1 - epsilon) m).
fn crossing_quota(m: usize, gap: &GapSpec) -> usize {
    let q = (Rat::one() - gap.epsilon.clone()) * Rat::from_integer(BigInt::from(m));
    let c = q.ceil().to_integer();
    usize::try_from(c.max(BigInt::zero())).unwrap_or(0).min(m)
}

/// Build a graph around a hidden bipartition so that the planted cut
/// carries at least a 1 - epsilon fraction of the total weight.
pub fn generate_planted_yes(spec: &PlantSpec) -> Result<WeightedGraph, Error> {
    spec.validate()?;
    let mut rng = ChaCha12Rng::seed_from_u64(spec.seed);
    let n = spec.n;
    let quota = crossing_quota(spec.m, &spec.gap);

    // side sizes: random but feasible — every vertex needs a crossing edge
    // (quota >= max side) and both edge pools must be large enough
    let mut split = None;
    for _ in 0..10_000 {
        let mut verts: Vec<usize> = (1..=n).collect();
        verts.shuffle(&mut rng);
        let cut_at = rng.gen_range(1..n);
        let (a, b) = verts.split_at(cut_at);
        let (a, b): (Vec<usize>, Vec<usize>) = (a.to_vec(), b.to_vec());
        let cross_pool = a.len() * b.len();
        let inside_pool = a.len() * (a.len() - 1) / 2 + b.len() * (b.len() - 1) / 2;
        if quota >= a.len().max(b.len()) && quota <= cross_pool && spec.m - quota <= inside_pool {
            split = Some((a, b));
            break;
        }
    }
    let (side_a, side_b) = split.ok_or_else(|| {
        Error::Infeasible(format!(
            "no bipartition supports {quota} crossing edges of {} on n = {n}",
            spec.m
        ))
    })?;

    // crossing edges: cover every vertex first, then fill the quota
    let mut chosen: Vec<(usize, usize)> = Vec::with_capacity(spec.m);
    let mut used = std::collections::HashSet::new();
    let longer = if side_a.len() >= side_b.len() { &side_a } else { &side_b };
    let shorter = if side_a.len() >= side_b.len() { &side_b } else { &side_a };
    for (i, &u) in longer.iter().enumerate() {
        let v = shorter[i % shorter.len()];
        chosen.push((u, v));
        used.insert((u.min(v), u.max(v)));
    }
    let mut cross_pool: Vec<(usize, usize)> = side_a
        .iter()
        .flat_map(|&u| side_b.iter().map(move |&v| (u, v)))
        .filter(|&(u, v)| !used.contains(&(u.min(v), u.max(v))))
        .collect();
    cross_pool.shuffle(&mut rng);
    while chosen.len() < quota {
        let (u, v) = cross_pool.pop().expect("pool sized by feasibility check");
        chosen.push((u, v));
        used.insert((u.min(v), u.max(v)));
    }
    let crossing = chosen.len();

    // remaining edges inside the sides
    let mut inside_pool: Vec<(usize, usize)> = Vec::new();
    for side in [&side_a, &side_b] {
        for i in 0..side.len() {
            for j in i + 1..side.len() {
                inside_pool.push((side[i], side[j]));
            }
        }
    }
    inside_pool.shuffle(&mut rng);
    while chosen.len() < spec.m {
        let (u, v) = inside_pool.pop().ok_or_else(|| {
            Error::Infeasible("inside-edge pool exhausted".into())
        })?;
        chosen.push((u, v));
    }

    let mut edges: Vec<Edge> = chosen
        .iter()
        .map(|&(u, v)| Edge {
            u,
            v,
            w: if spec.unit_weights() {
                Rat::one()
            } else {
                random_weight(&mut rng, &spec.w_max)
            },
        })
        .collect();

    // weighted mode: raise crossing weights until their fraction clears
    // the 1 - epsilon threshold
    if !spec.unit_weights() {
        let threshold = Rat::one() - spec.gap.epsilon.clone();
        loop {
            let w_tot: Rat = edges.iter().map(|e| e.w.clone()).sum();
            let w_cross: Rat = edges[..crossing].iter().map(|e| e.w.clone()).sum();
            if w_cross >= threshold.clone() * w_tot {
                break;
            }
            let bump = edges[..crossing]
                .iter_mut()
                .min_by(|a, b| a.w.cmp(&b.w))
                .expect("at least one crossing edge");
            bump.w += Rat::one();
        }
    }

    let part = Partition::from_members(n, &side_a)?;
    let g = WeightedGraph::new(n, edges)?;
    let g = normalize_weights(&g);
    // by construction: cut(part) / w_tot >= 1 - epsilon
    debug_assert!(
        crate::graph::cut_value(&g, &part) >= (Rat::one() - spec.gap.epsilon.clone()) * g.w_tot()
    );
    Ok(g)
}

/// Rejection-sample random graphs until one is brute-force certified to
/// have max-cut ratio below 1 - epsilon^c.
pub fn generate_certified_no(spec: &PlantSpec) -> Result<WeightedGraph, Error> {
    spec.validate()?;
    if spec.n > BRUTE_CAP {
        return Err(Error::ResourceCap(format!(
            "NO certification needs brute-force max-cut, capped at n = {BRUTE_CAP}"
        )));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(spec.seed);
    let threshold = spec.gap.no_threshold();
    for _ in 0..NO_SAMPLE_BUDGET {
        let g = random_covered_graph(spec, &mut rng)?;
        let ratio = Num::from_rat(max_cut_ratio(&g)?);
        if ratio.lt(&threshold) {
            return Ok(normalize_weights(&g));
        }
    }
    Err(Error::Infeasible(format!(
        "no graph with ratio below {} found in {NO_SAMPLE_BUDGET} samples; \
         NO instances are rare at these parameters",
        threshold.f64()
    )))
}

/// Random simple graph with m edges where every vertex is covered:
/// a random spanning structure plus uniform extra edges.
fn random_covered_graph(
    spec: &PlantSpec,
    rng: &mut ChaCha12Rng,
) -> Result<WeightedGraph, Error> {
    let n = spec.n;
    let mut verts: Vec<usize> = (1..=n).collect();
    verts.shuffle(rng);
    let mut used = std::collections::HashSet::new();
    let mut chosen = Vec::with_capacity(spec.m);
    // random path covers every vertex
    for w in verts.windows(2) {
        let (u, v) = (w[0], w[1]);
        chosen.push((u, v));
        used.insert((u.min(v), u.max(v)));
    }
    let mut pool: Vec<(usize, usize)> = (1..=n)
        .flat_map(|u| (u + 1..=n).map(move |v| (u, v)))
        .filter(|p| !used.contains(p))
        .collect();
    pool.shuffle(rng);
    while chosen.len() < spec.m {
        chosen.push(pool.pop().expect("m validated against the pair count"));
    }
    let edges = chosen
        .into_iter()
        .map(|(u, v)| Edge {
            u,
            v,
            w: if spec.unit_weights() {
                Rat::one()
            } else {
                random_weight(rng, &spec.w_max)
            },
        })
        .collect();
    WeightedGraph::new(n, edges)
}
