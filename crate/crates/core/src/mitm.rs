//! Meet-in-the-middle binary-CVP solver: index one side's binary column
//! sums, query the other side's residuals against it.
//!
//! Splitting the n basis columns into `left` and `right`, every binary
//! coefficient vector decomposes uniquely as y_left + y_right, so querying
//! t - B y_right against the indexed points B y_left enumerates every binary
//! lattice vector. Exact backend gives the brute-force decision; the lsh
//! backend trades a bounded false-negative rate for sub-linear queries.

use std::sync::atomic::{AtomicBool, Ordering};

use crate::ann::{build_index, Backend, LshParams, NnIndex};
use crate::error::Error;
use crate::lattice::{Coordinates, CvpInstance};
use crate::Decision;

/// Memory cap for the materialized left-side points: 4 GiB.
pub const INDEX_BYTE_CAP: u64 = 4 << 30;

/// How the basis columns divide between the indexed side and the query side.
#[derive(Clone, Debug)]
pub struct SplitConfig {
    n: usize,
    left: Vec<usize>,
    right: Vec<usize>,
}

impl SplitConfig {
    /// Explicit column split; indices are 0-based and must partition 0..n.
    pub fn new(n: usize, left: Vec<usize>) -> Result<Self, Error> {
        let mut seen = vec![false; n];
        for &i in &left {
            if i >= n || seen[i] {
                return Err(Error::Validation(format!(
                    "split column {i} out of range or repeated (n = {n})"
                )));
            }
            seen[i] = true;
        }
        let right = (0..n).filter(|i| !seen[*i]).collect();
        Ok(SplitConfig { n, left, right })
    }

    /// First floor(a n) columns go left.
    pub fn fraction(n: usize, a: f64) -> Result<Self, Error> {
        if n < 2 {
            return Err(Error::Validation(format!("split needs n >= 2, got {n}")));
        }
        if !(a > 0.0 && a < 1.0) {
            return Err(Error::Validation(format!("need 0 < a < 1, got {a}")));
        }
        let k = ((a * n as f64).floor() as usize).clamp(1, n - 1);
        SplitConfig::new(n, (0..k).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn left(&self) -> &[usize] {
        &self.left
    }

    pub fn right(&self) -> &[usize] {
        &self.right
    }
}

/// Default split a = 1/2; with measured exponents (C, rho) supplied, balance
/// the two cost terms by solving C a = (1 + rho)(1 - a).
pub fn choose_split(n: usize, exponents: Option<(f64, f64)>) -> Result<SplitConfig, Error> {
    let a = match exponents {
        None => 0.5,
        Some((c, rho)) => {
            if c.is_nan() || c <= 0.0 || rho < 0.0 {
                return Err(Error::Validation(format!(
                    "need C > 0 and rho >= 0, got C = {c}, rho = {rho}"
                )));
            }
            (1.0 + rho) / (c + 1.0 + rho)
        }
    };
    SplitConfig::fraction(n, a)
}

/// Solver knobs; `audit` disables early exit so query counts are exact.
#[derive(Clone, Copy, Debug)]
pub struct MitmOptions {
    pub backend: Backend,
    pub audit: bool,
    pub seed: u64,
}

impl Default for MitmOptions {
    fn default() -> Self {
        MitmOptions {
            backend: Backend::Exact,
            audit: false,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct MitmStats {
    pub index_size: u64,
    pub queries: u64,
    pub witness: Option<Coordinates>,
    pub lsh: Option<LshParams>,
}

/// Decide the promised binary CVP instance by meet-in-the-middle.
pub fn solve_binary_cvp_mitm(
    inst: &CvpInstance,
    split: &SplitConfig,
    opts: &MitmOptions,
) -> Result<(Decision, MitmStats), Error> {
    let n = inst.rank();
    if split.n != n {
        return Err(Error::Dimension(format!(
            "split built for n = {}, instance has rank {n}",
            split.n
        )));
    }
    let d = inst.dim();
    let l = split.left.len();
    let bytes = (1u64 << l) * d as u64 * 8;
    if bytes > INDEX_BYTE_CAP {
        return Err(Error::ResourceCap(format!(
            "left side would occupy {bytes} bytes of dense points (cap {INDEX_BYTE_CAP})"
        )));
    }

    let dense_cols: Vec<Vec<f64>> = inst
        .basis
        .columns()
        .iter()
        .map(|c| c.to_dense_f64())
        .collect();
    let p = inst.p.f64();
    let r = inst.r_pow().f64().powf(1.0 / p);
    let gamma = inst.gamma_pow().f64().powf(1.0 / p);

    // left sums in Gray order, stored so that point index = left mask
    let mut points = vec![vec![0.0f64; d]; 1 << l];
    let mut current = vec![0.0f64; d];
    let mut mask = 0u64;
    for counter in 1..(1u64 << l) {
        let i = counter.trailing_zeros() as usize;
        let sign = if mask >> i & 1 == 0 { 1.0 } else { -1.0 };
        for (row, v) in dense_cols[split.left[i]].iter().enumerate() {
            if *v != 0.0 {
                current[row] += sign * v;
            }
        }
        mask ^= 1 << i;
        points[mask as usize].copy_from_slice(&current);
    }
    let index = build_index(points, r, gamma, p, opts.backend, opts.seed)?;

    let stats = sweep_queries(inst, split, opts, &index, &dense_cols)?;
    let decision = match (&stats.0, &stats.1.witness) {
        (Some(Decision::Yes), _) => Decision::Yes,
        (Some(Decision::PromiseViolation), _) => Decision::PromiseViolation,
        _ => Decision::No,
    };
    let mut out = stats.1;
    out.index_size = index.len() as u64;
    out.lsh = index.lsh_params().cloned();
    Ok((decision, out))
}

/// Walk all 2^|right| residual queries t - B y_right in Gray order.
fn sweep_queries(
    inst: &CvpInstance,
    split: &SplitConfig,
    opts: &MitmOptions,
    index: &NnIndex,
    dense_cols: &[Vec<f64>],
) -> Result<(Option<Decision>, MitmStats), Error> {
    let rl = split.right.len();
    let mut query = inst.target.to_dense_f64();
    let mut mask = 0u64;
    let mut stats = MitmStats::default();
    let mut band_seen = false;
    let stop = AtomicBool::new(false); // mirrors the parallel-sweep contract

    let mut handle = |q: &[f64], right_mask: u64, stats: &mut MitmStats| -> Result<bool, Error> {
        stats.queries += 1;
        let outcome = index.query_full(q)?;
        if let Some(w) = outcome.witness {
            stats.witness = Some(assemble_witness(split, w.index as u64, right_mask));
            if !opts.audit {
                stop.store(true, Ordering::Relaxed);
            }
            return Ok(true);
        }
        if outcome.band.is_some() {
            band_seen = true;
        }
        Ok(false)
    };

    let mut found = handle(&query, 0, &mut stats)?;
    for counter in 1..(1u64 << rl) {
        if stop.load(Ordering::Relaxed) {
            break;
        }
        let i = counter.trailing_zeros() as usize;
        let sign = if mask >> i & 1 == 0 { -1.0 } else { 1.0 };
        for (row, v) in dense_cols[split.right[i]].iter().enumerate() {
            if *v != 0.0 {
                query[row] += sign * v;
            }
        }
        mask ^= 1 << i;
        found |= handle(&query, mask, &mut stats)?;
    }
    let decision = if found {
        Some(Decision::Yes)
    } else if band_seen {
        Some(Decision::PromiseViolation)
    } else {
        None
    };
    Ok((decision, stats))
}

/// Recombine a left-point index and right-sweep mask into coordinates over
/// the original column order.
fn assemble_witness(split: &SplitConfig, left_mask: u64, right_mask: u64) -> Coordinates {
    let mut y = vec![0i64; split.n];
    for (bit, &col) in split.left.iter().enumerate() {
        y[col] = (left_mask >> bit & 1) as i64;
    }
    for (bit, &col) in split.right.iter().enumerate() {
        y[col] = (right_mask >> bit & 1) as i64;
    }
    Coordinates(y)
}
