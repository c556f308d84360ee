//! Weighted graphs, partitions, cut arithmetic, and the gap Max-Cut promise.
//!
//! All weights and ratios are exact rationals; no floating point enters the
//! cut arithmetic. Edges are ordered pairs and keep their input order: the
//! reduction distinguishes the first endpoint from the second.

use num::{BigInt, Integer, One, Signed, ToPrimitive, Zero};

use crate::error::Error;
use crate::num_mode::{format_rat, parse_rat, rat_pow_num, Num, PNorm, Rat};
use crate::Decision;

/// Brute-force enumeration refuses graphs above this vertex count.
pub const BRUTE_CAP: usize = 24;

/// Directed edge `(u, v)` with a positive rational weight. Vertices are
/// 1-indexed.
#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: Rat,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<Edge>,
}

impl WeightedGraph {
    pub fn new(n: usize, edges: Vec<Edge>) -> Result<Self, Error> {
        if n == 0 {
            return Err(Error::Validation("graph needs at least one vertex".into()));
        }
        let mut covered = vec![false; n + 1];
        for (k, e) in edges.iter().enumerate() {
            if e.u < 1 || e.u > n || e.v < 1 || e.v > n {
                return Err(Error::Validation(format!(
                    "edge {} endpoint out of range [1, {n}]",
                    k + 1
                )));
            }
            if e.u == e.v {
                return Err(Error::Validation(format!("edge {} is a self-loop", k + 1)));
            }
            if !e.w.is_positive() {
                return Err(Error::Validation(format!(
                    "edge {} has non-positive weight {}",
                    k + 1,
                    format_rat(&e.w)
                )));
            }
            covered[e.u] = true;
            covered[e.v] = true;
        }
        if let Some(v) = (1..=n).find(|&v| !covered[v]) {
            return Err(Error::Validation(format!("vertex {v} is isolated")));
        }
        Ok(WeightedGraph { n, edges })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn w_tot(&self) -> Rat {
        self.edges.iter().map(|e| e.w.clone()).sum()
    }

    pub fn w_min(&self) -> Rat {
        self.edges
            .iter()
            .map(|e| e.w.clone())
            .min()
            .expect("graph has at least one edge")
    }

    pub fn is_unit_weight(&self) -> bool {
        self.edges.iter().all(|e| e.w.is_one())
    }

    pub fn is_normalized(&self) -> bool {
        self.w_min().is_one()
    }

    /// Incidence lists: for each vertex, the indices of its edges.
    pub fn incidence(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.n + 1];
        for (k, e) in self.edges.iter().enumerate() {
            inc[e.u].push(k);
            inc[e.v].push(k);
        }
        inc
    }
}

/// The (1-eps, 1-eps^c) promise parameters plus the norm exponent.
#[derive(Clone, Debug)]
pub struct GapSpec {
    pub epsilon: Rat,
    pub c: Rat,
    pub p: PNorm,
}

impl GapSpec {
    pub fn new(epsilon: Rat, c: Rat, p: Rat) -> Result<Self, Error> {
        if !(epsilon.is_positive() && epsilon < Rat::one()) {
            return Err(Error::Validation(format!(
                "epsilon must lie in (0,1), got {}",
                format_rat(&epsilon)
            )));
        }
        if !(c.is_positive() && c <= Rat::one()) {
            return Err(Error::Validation(format!(
                "c must lie in (0,1], got {}",
                format_rat(&c)
            )));
        }
        Ok(GapSpec {
            epsilon,
            c,
            p: PNorm::new(p)?,
        })
    }

    /// eps^c — exact only when c = 1 (or eps a perfect power).
    pub fn eps_pow_c(&self) -> Num {
        rat_pow_num(&self.epsilon, &self.c)
    }

    /// YES threshold 1 - eps, exact.
    pub fn yes_threshold(&self) -> Rat {
        Rat::one() - self.epsilon.clone()
    }

    /// NO threshold 1 - eps^c.
    pub fn no_threshold(&self) -> Num {
        Num::one().sub(&self.eps_pow_c())
    }
}

/// A vertex partition P ⊆ [n], stored as a membership vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    members: Vec<bool>,
}

impl Partition {
    pub fn empty(n: usize) -> Self {
        Partition {
            members: vec![false; n],
        }
    }

    pub fn from_members(n: usize, members: &[usize]) -> Result<Self, Error> {
        let mut p = Partition::empty(n);
        for &v in members {
            if v < 1 || v > n {
                return Err(Error::Validation(format!("vertex {v} out of range [1, {n}]")));
            }
            p.members[v - 1] = true;
        }
        Ok(p)
    }

    pub fn from_mask(n: usize, mask: u64) -> Self {
        Partition {
            members: (0..n).map(|i| mask >> i & 1 == 1).collect(),
        }
    }

    /// Membership vector p with p_i = 1 iff vertex i+1 in P.
    pub fn membership(&self) -> &[bool] {
        &self.members
    }

    pub fn contains(&self, v: usize) -> bool {
        self.members[v - 1]
    }

    pub fn members(&self) -> Vec<usize> {
        (1..=self.members.len())
            .filter(|&v| self.contains(v))
            .collect()
    }

    pub fn complement(&self) -> Partition {
        Partition {
            members: self.members.iter().map(|&b| !b).collect(),
        }
    }
}

/// Scale every weight by 1/w_min so the minimum weight is exactly 1.
pub fn normalize_weights(g: &WeightedGraph) -> WeightedGraph {
    let w_min = g.w_min();
    let edges = g
        .edges
        .iter()
        .map(|e| Edge {
            u: e.u,
            v: e.v,
            w: &e.w / &w_min,
        })
        .collect();
    WeightedGraph { n: g.n, edges }
}

/// Total weight of edges with exactly one endpoint in P.
pub fn cut_value(g: &WeightedGraph, part: &Partition) -> Rat {
    assert_eq!(part.membership().len(), g.n, "partition size mismatch");
    g.edges
        .iter()
        .filter(|e| part.contains(e.u) != part.contains(e.v))
        .map(|e| e.w.clone())
        .sum()
}

/// Exact maximum cut value and a maximizing partition, by enumeration over
/// the 2^(n-1) bipartitions that keep vertex 1 out of P.
pub fn max_cut(g: &WeightedGraph) -> Result<(Rat, Partition), Error> {
    if g.n > BRUTE_CAP {
        return Err(Error::ResourceCap(format!(
            "brute-force Max-Cut limited to n <= {BRUTE_CAP}, got n = {}",
            g.n
        )));
    }
    // scale weights to integers; i128 fast path with a BigInt fallback
    let scale = g
        .edges
        .iter()
        .fold(BigInt::one(), |acc, e| acc.lcm(e.w.denom()));
    let int_weights: Vec<BigInt> = g
        .edges
        .iter()
        .map(|e| (&e.w * Rat::from_integer(scale.clone())).to_integer())
        .collect();
    let small: Option<Vec<i128>> = int_weights.iter().map(|w| w.to_i128()).collect();
    let (best_mask, best_scaled) = match small {
        Some(ws) if int_weights.iter().sum::<BigInt>().to_i128().is_some() => {
            let (mask, cut) = gray_max_cut(g, &ws);
            (mask, BigInt::from(cut))
        }
        _ => gray_max_cut(g, &int_weights),
    };
    let cut = Rat::new(best_scaled, scale);
    Ok((cut, Partition::from_mask(g.n, best_mask)))
}

fn gray_max_cut<W>(g: &WeightedGraph, weights: &[W]) -> (u64, W)
where
    W: Clone + Zero + Ord + std::ops::AddAssign + std::ops::SubAssign,
{
    let n = g.n;
    let mut adj: Vec<Vec<(usize, W)>> = vec![Vec::new(); n + 1];
    for (k, e) in g.edges.iter().enumerate() {
        adj[e.u].push((e.v, weights[k].clone()));
        adj[e.v].push((e.u, weights[k].clone()));
    }
    let mut side = vec![false; n + 1];
    let mut cut = W::zero();
    let mut best = cut.clone();
    let mut best_mask = 0u64;
    let mut mask = 0u64;
    // vertex 1 stays fixed; gray-code sweep over vertices 2..=n
    let steps = 1u64 << (n - 1);
    for counter in 1..steps {
        let bit = counter.trailing_zeros() as usize;
        let v = bit + 2;
        for (u, w) in &adj[v] {
            if side[*u] == side[v] {
                cut += w.clone();
            } else {
                cut -= w.clone();
            }
        }
        side[v] = !side[v];
        mask ^= 1 << (v - 1);
        if cut > best {
            best = cut.clone();
            best_mask = mask;
        }
    }
    (best_mask, best)
}

/// Exact maximum of cut_value / w_tot over all bipartitions.
pub fn max_cut_ratio(g: &WeightedGraph) -> Result<Rat, Error> {
    let (cut, _) = max_cut(g)?;
    Ok(cut / g.w_tot())
}

/// Decide the gap Max-Cut promise problem by brute force. Returns
/// `PromiseViolation` when the exact ratio lands in the excluded band
/// [1 - eps^c, 1 - eps) — diagnostic, not an oracle failure.
pub fn decide_gap_maxcut(g: &WeightedGraph, spec: &GapSpec) -> Result<Decision, Error> {
    let ratio = max_cut_ratio(g)?;
    if ratio >= spec.yes_threshold() {
        return Ok(Decision::Yes);
    }
    let ratio_num = Num::from_rat(ratio);
    if ratio_num.lt(&spec.no_threshold()) {
        Ok(Decision::No)
    } else {
        Ok(Decision::PromiseViolation)
    }
}

// ---------------------------------------------------------------------------
// graph text format
//
//   maxcut <n> <m> <p> <epsilon> <c>
//   e <u> <v> <w>
// ---------------------------------------------------------------------------

pub fn parse_graph(text: &str) -> Result<(WeightedGraph, GapSpec), Error> {
    let mut header: Option<(usize, usize, GapSpec)> = None;
    let mut edges = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split_whitespace();
        let tag = fields.next().unwrap();
        let rest: Vec<&str> = fields.collect();
        match tag {
            "maxcut" => {
                if header.is_some() {
                    return Err(Error::Parse(format!("line {}: duplicate header", lineno + 1)));
                }
                if rest.len() != 5 {
                    return Err(Error::Parse(format!(
                        "line {}: header wants `maxcut n m p epsilon c`",
                        lineno + 1
                    )));
                }
                let n: usize = rest[0]
                    .parse()
                    .map_err(|_| Error::Parse(format!("line {}: bad n", lineno + 1)))?;
                let m: usize = rest[1]
                    .parse()
                    .map_err(|_| Error::Parse(format!("line {}: bad m", lineno + 1)))?;
                let spec = GapSpec::new(parse_rat(rest[3])?, parse_rat(rest[4])?, parse_rat(rest[2])?)?;
                header = Some((n, m, spec));
            }
            "e" => {
                if header.is_none() {
                    return Err(Error::Parse(format!(
                        "line {}: edge before header",
                        lineno + 1
                    )));
                }
                if rest.len() != 3 {
                    return Err(Error::Parse(format!("line {}: edge wants `e u v w`", lineno + 1)));
                }
                let u: usize = rest[0]
                    .parse()
                    .map_err(|_| Error::Parse(format!("line {}: bad u", lineno + 1)))?;
                let v: usize = rest[1]
                    .parse()
                    .map_err(|_| Error::Parse(format!("line {}: bad v", lineno + 1)))?;
                edges.push(Edge {
                    u,
                    v,
                    w: parse_rat(rest[2])?,
                });
            }
            other => {
                return Err(Error::Parse(format!(
                    "line {}: unknown record {other:?}",
                    lineno + 1
                )));
            }
        }
    }
    let (n, m, spec) = header.ok_or_else(|| Error::Parse("missing `maxcut` header".into()))?;
    if edges.len() != m {
        return Err(Error::Parse(format!(
            "header declares m = {m} but found {} edges",
            edges.len()
        )));
    }
    let g = WeightedGraph::new(n, edges)?;
    Ok((g, spec))
}

pub fn write_graph(g: &WeightedGraph, spec: &GapSpec) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "maxcut {} {} {} {} {}\n",
        g.n(),
        g.m(),
        format_rat(spec.p.rat()),
        format_rat(&spec.epsilon),
        format_rat(&spec.c)
    ));
    for e in g.edges() {
        out.push_str(&format!("e {} {} {}\n", e.u, e.v, format_rat(&e.w)));
    }
    out
}
