//! Near-neighbor index with the (r, gamma r) decision-query contract.
//!
//! Two backends: an exact linear scan (any p >= 1) and classical p-stable
//! locality-sensitive hashing (p in {1, 2}). Every YES answer is verified
//! against the true distance before being returned, so there are no false
//! positives under either backend; LSH can only err by missing a near point,
//! and amplification drives that below 2^-10 per query on promise queries.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Cauchy, Distribution, Normal};
use rayon::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal as NormalDist};

use crate::error::Error;

/// Which data structure answers queries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    Exact,
    Lsh,
}

/// Tuned hashing parameters, logged for reproducibility.
#[derive(Clone, Debug)]
pub struct LshParams {
    /// Independent hash tables.
    pub l: usize,
    /// Concatenated hash functions per table.
    pub k: usize,
    /// Bucket width of each projection.
    pub w: f64,
    pub seed: u64,
}

/// A point reported with a YES answer; the distance is re-verified, never
/// taken on faith from the hash structure.
#[derive(Clone, Copy, Debug)]
pub struct Witness {
    pub index: usize,
    pub dist: f64,
}

/// Result of a band-aware decision query.
#[derive(Clone, Copy, Debug)]
pub struct QueryOutcome {
    /// Verified point within r, if one was found.
    pub witness: Option<Witness>,
    /// Verified candidate in (r, gamma r], if no witness was found.
    pub band: Option<Witness>,
}

struct LshTables {
    params: LshParams,
    /// projections[t][k] is one random direction of dimension d.
    projections: Vec<Vec<Vec<f64>>>,
    offsets: Vec<Vec<f64>>,
    buckets: Vec<HashMap<Vec<i64>, Vec<usize>>>,
}

pub struct NnIndex {
    points: Vec<Vec<f64>>,
    dim: usize,
    r: f64,
    gamma: f64,
    p: f64,
    backend: Backend,
    lsh: Option<LshTables>,
}

/// Per-query failure target after amplification: 2^-10.
const QUERY_FAILURE: f64 = 1.0 / 1024.0;

/// Default bucket width as a multiple of r.
const WIDTH_FACTOR: f64 = 4.0;

const MAX_TABLES: usize = 8192;

/// Collision probability of one p-stable projection at distance s and
/// bucket width w (Datar-Immorlica-Indyk-Mirrokni closed forms).
fn collision_prob(p: u32, s: f64, w: f64) -> f64 {
    let t = w / s;
    match p {
        2 => {
            let std_normal = NormalDist::new(0.0, 1.0).expect("unit normal");
            1.0 - 2.0 * std_normal.cdf(-t)
                - (2.0 / ((2.0 * std::f64::consts::PI).sqrt() * t))
                    * (1.0 - (-t * t / 2.0).exp())
        }
        1 => {
            2.0 * t.atan() / std::f64::consts::PI
                - (1.0 / (std::f64::consts::PI * t)) * (1.0 + t * t).ln()
        }
        _ => unreachable!("lsh backend restricted to p in {{1, 2}}"),
    }
}

fn lp_dist(p: f64, a: &[f64], b: &[f64]) -> f64 {
    let sum: f64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs().powf(p))
        .sum();
    sum.powf(1.0 / p)
}

/// Build an index over dense points answering "is some point within r of
/// the query" under the (r, gamma r) promise.
pub fn build_index(
    points: Vec<Vec<f64>>,
    r: f64,
    gamma: f64,
    p: f64,
    backend: Backend,
    seed: u64,
) -> Result<NnIndex, Error> {
    if points.is_empty() {
        return Err(Error::Validation("cannot index an empty point set".into()));
    }
    let dim = points[0].len();
    if points.iter().any(|pt| pt.len() != dim) {
        return Err(Error::Dimension(format!(
            "all indexed points must have dimension {dim}"
        )));
    }
    if r.is_nan() || r <= 0.0 {
        return Err(Error::Validation(format!("need radius r > 0, got {r}")));
    }
    let lsh = match backend {
        Backend::Exact => None,
        Backend::Lsh => {
            if p != 1.0 && p != 2.0 {
                return Err(Error::Validation(format!(
                    "lsh backend supports p in {{1, 2}}, got {p}"
                )));
            }
            if gamma.is_nan() || gamma <= 1.0 {
                return Err(Error::Validation(format!(
                    "lsh backend needs gamma > 1, got {gamma}"
                )));
            }
            Some(build_tables(&points, dim, r, gamma, p as u32, seed))
        }
    };
    Ok(NnIndex {
        points,
        dim,
        r,
        gamma,
        p,
        backend,
        lsh,
    })
}

fn build_tables(
    points: &[Vec<f64>],
    dim: usize,
    r: f64,
    gamma: f64,
    p: u32,
    seed: u64,
) -> LshTables {
    let n = points.len();
    let w = WIDTH_FACTOR * r;
    let p1 = collision_prob(p, r, w);
    let p2 = collision_prob(p, gamma * r, w);
    // enough concatenated functions to thin out far points...
    let k = ((n as f64).ln() / (1.0 / p2).ln()).ceil().max(1.0) as usize;
    // ...then enough tables that a near point escapes all of them with
    // probability at most QUERY_FAILURE: (1 - p1^k)^l <= 2^-10
    let hit = p1.powi(k as i32);
    let l = ((QUERY_FAILURE.ln()) / (1.0 - hit).ln()).ceil().max(1.0) as usize;
    let l = l.min(MAX_TABLES);
    let params = LshParams { l, k, w, seed };

    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut projections = Vec::with_capacity(l);
    let mut offsets = Vec::with_capacity(l);
    for _ in 0..l {
        let mut dirs = Vec::with_capacity(k);
        let mut offs = Vec::with_capacity(k);
        for _ in 0..k {
            let dir: Vec<f64> = match p {
                2 => {
                    let g = Normal::new(0.0, 1.0).expect("unit normal");
                    (0..dim).map(|_| g.sample(&mut rng)).collect()
                }
                _ => {
                    let c = Cauchy::new(0.0, 1.0).expect("unit cauchy");
                    (0..dim).map(|_| c.sample(&mut rng)).collect()
                }
            };
            dirs.push(dir);
            offs.push(rng.gen_range(0.0..w));
        }
        projections.push(dirs);
        offsets.push(offs);
    }

    // keys computed in parallel, inserted sequentially for determinism
    let keys: Vec<Vec<Vec<i64>>> = points
        .par_iter()
        .map(|pt| {
            (0..l)
                .map(|t| hash_key(pt, &projections[t], &offsets[t], w))
                .collect()
        })
        .collect();
    let mut buckets: Vec<HashMap<Vec<i64>, Vec<usize>>> = vec![HashMap::new(); l];
    for (idx, point_keys) in keys.into_iter().enumerate() {
        for (t, key) in point_keys.into_iter().enumerate() {
            buckets[t].entry(key).or_default().push(idx);
        }
    }
    LshTables {
        params,
        projections,
        offsets,
        buckets,
    }
}

fn hash_key(pt: &[f64], dirs: &[Vec<f64>], offs: &[f64], w: f64) -> Vec<i64> {
    dirs.iter()
        .zip(offs)
        .map(|(dir, off)| {
            let dot: f64 = dir.iter().zip(pt).map(|(a, x)| a * x).sum();
            ((dot + off) / w).floor() as i64
        })
        .collect()
}

impl NnIndex {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn lsh_params(&self) -> Option<&LshParams> {
        self.lsh.as_ref().map(|t| &t.params)
    }

    /// Total buckets a single point occupies (= L for the lsh backend).
    pub fn buckets_per_point(&self, index: usize) -> usize {
        match &self.lsh {
            None => 0,
            Some(t) => t
                .buckets
                .iter()
                .filter(|b| b.values().any(|ids| ids.contains(&index)))
                .count(),
        }
    }

    /// Decision query: Some(witness) means a verified point within r of x.
    pub fn query(&self, x: &[f64]) -> Result<Option<Witness>, Error> {
        Ok(self.query_full(x)?.witness)
    }

    /// Decision query that also surfaces verified candidates landing in the
    /// excluded band (r, gamma r] — evidence of a promise violation.
    pub fn query_full(&self, x: &[f64]) -> Result<QueryOutcome, Error> {
        if x.len() != self.dim {
            return Err(Error::Dimension(format!(
                "query dimension {} does not match index dimension {}",
                x.len(),
                self.dim
            )));
        }
        match &self.lsh {
            None => Ok(self.scan(x)),
            Some(tables) => {
                let mut band: Option<Witness> = None;
                for t in 0..tables.params.l {
                    let key = hash_key(x, &tables.projections[t], &tables.offsets[t], tables.params.w);
                    if let Some(ids) = tables.buckets[t].get(&key) {
                        for &idx in ids {
                            let dist = lp_dist(self.p, &self.points[idx], x);
                            if dist <= self.r {
                                return Ok(QueryOutcome {
                                    witness: Some(Witness { index: idx, dist }),
                                    band: None,
                                });
                            }
                            if dist <= self.gamma * self.r
                                && band.is_none_or(|b| dist < b.dist)
                            {
                                band = Some(Witness { index: idx, dist });
                            }
                        }
                    }
                }
                Ok(QueryOutcome {
                    witness: None,
                    band,
                })
            }
        }
    }

    fn scan(&self, x: &[f64]) -> QueryOutcome {
        let mut best: Option<Witness> = None;
        for (idx, pt) in self.points.iter().enumerate() {
            let dist = lp_dist(self.p, pt, x);
            if best.is_none_or(|b| dist < b.dist) {
                best = Some(Witness { index: idx, dist });
            }
        }
        match best {
            Some(b) if b.dist <= self.r => QueryOutcome {
                witness: Some(b),
                band: None,
            },
            Some(b) if b.dist <= self.gamma * self.r => QueryOutcome {
                witness: None,
                band: Some(b),
            },
            _ => QueryOutcome {
                witness: None,
                band: None,
            },
        }
    }

    /// True nearest distance by linear scan, for audits regardless of backend.
    pub fn nearest_dist(&self, x: &[f64]) -> f64 {
        self.points
            .iter()
            .map(|pt| lp_dist(self.p, pt, x))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn point(&self, index: usize) -> &[f64] {
        &self.points[index]
    }
}
