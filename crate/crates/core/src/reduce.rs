//! The graph-to-CVP rhombus reduction, in unweighted and weighted form.
//!
//! Each edge `E_k = (i, j)` owns the plane spanned by rows `2k-1` and `2k`.
//! Column i carries `(-1, iota*w')` there, column j carries `(+1, iota*w')`,
//! and the target carries `(0, iota*w')`, where `w' = w^(1/p)`. A partition's
//! lattice point then sits at distance 1 from the target in every cut plane
//! and at distance `iota*w'` in every uncut plane, which gives the exact
//! identity dist^p = (#cut) + iota^p * (uncut weight).

use num::{One, Zero};

use crate::error::Error;
use crate::graph::{GapSpec, Partition, WeightedGraph};
use crate::lattice::{CvpInstance, SparseBasis, SparseVector};
use crate::num_mode::{format_rat, rat_pow_num, Num, Rat};

/// Narrowest relative decision band tolerated when the instance cannot be
/// carried exactly.
const MIN_FLOAT_BAND: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReductionMode {
    Unweighted,
    Weighted,
}

#[derive(Clone, Debug)]
pub struct ReductionParams {
    pub iota: Rat,
    pub mode: ReductionMode,
}

impl ReductionParams {
    pub fn new(iota: Rat, mode: ReductionMode) -> Result<Self, Error> {
        if iota <= Rat::one() {
            return Err(Error::Validation(format!(
                "gadget parameter iota must exceed 1, got {}",
                format_rat(&iota)
            )));
        }
        Ok(ReductionParams { iota, mode })
    }
}

/// Unweighted variant: requires every weight to be exactly 1.
pub fn reduce_unweighted(
    g: &WeightedGraph,
    spec: &GapSpec,
    params: &ReductionParams,
) -> Result<CvpInstance, Error> {
    if !g.is_unit_weight() {
        return Err(Error::Validation(
            "unweighted reduction requires unit weights".into(),
        ));
    }
    build_instance(g, spec, &params.iota)
}

/// Weighted variant: requires a normalized weight function (w_min = 1).
pub fn reduce_weighted(
    g: &WeightedGraph,
    spec: &GapSpec,
    params: &ReductionParams,
) -> Result<CvpInstance, Error> {
    if !g.is_normalized() {
        return Err(Error::Validation(
            "weighted reduction requires normalized weights (w_min = 1)".into(),
        ));
    }
    build_instance(g, spec, &params.iota)
}

/// Dispatch on the weight function; unit-weight graphs take the unweighted
/// path (the two r formulas coincide when w_tot = m).
pub fn reduce_auto(
    g: &WeightedGraph,
    spec: &GapSpec,
    params: &ReductionParams,
) -> Result<CvpInstance, Error> {
    if g.is_unit_weight() {
        reduce_unweighted(g, spec, params)
    } else {
        reduce_weighted(g, spec, params)
    }
}

fn build_instance(g: &WeightedGraph, spec: &GapSpec, iota: &Rat) -> Result<CvpInstance, Error> {
    if *iota <= Rat::one() {
        return Err(Error::Validation(format!(
            "gadget parameter iota must exceed 1, got {}",
            format_rat(iota)
        )));
    }
    let n = g.n();
    let m = g.m();
    let d = 2 * m;
    let iota_num = Num::from_rat(iota.clone());

    let mut cols: Vec<Vec<(usize, Num)>> = vec![Vec::new(); n];
    let mut target: Vec<(usize, Num)> = Vec::with_capacity(m);
    for (idx, e) in g.edges().iter().enumerate() {
        let k = idx + 1;
        // w' = w^(1/p); exact whenever w is a perfect p-th power
        let w_adj = Num::from_rat(e.w.clone()).root(&spec.p);
        let even = iota_num.mul(&w_adj);
        cols[e.u - 1].push((2 * k - 1, Num::from_int(-1)));
        cols[e.u - 1].push((2 * k, even.clone()));
        cols[e.v - 1].push((2 * k - 1, Num::from_int(1)));
        cols[e.v - 1].push((2 * k, even.clone()));
        target.push((2 * k, even));
    }
    let columns: Result<Vec<SparseVector>, Error> = cols
        .into_iter()
        .map(|entries| SparseVector::new(d, entries))
        .collect();
    let basis = SparseBasis::new(d, columns?)?;
    let target = SparseVector::new(d, target)?;

    let r_pow = radius_pow(g, spec, iota);
    // c = 1 collapses the band to nothing: gamma is exactly 1 and the
    // problem degenerates to exact CVP, which is fine in either mode
    let band_empty = spec.c.is_one();
    let gamma_pow = if band_empty {
        Num::one()
    } else {
        gamma_pow(g, spec, iota)
    };
    let exact_capable = spec.p.as_int().is_some() && basis.is_exact();
    if !exact_capable && !band_empty && gamma_pow.f64() - 1.0 < MIN_FLOAT_BAND {
        return Err(Error::Validation(format!(
            "float-mode decision band too narrow: gamma^p = {} is within {MIN_FLOAT_BAND} of 1",
            gamma_pow.f64()
        )));
    }
    CvpInstance::new(basis, target, spec.p.clone(), r_pow, gamma_pow, Some(iota.clone()))
}

/// r^p = m(1 - eps) + iota^p * eps * w_tot. For unit weights this collapses
/// to m(1 + eps(iota^p - 1)).
pub fn radius_pow(g: &WeightedGraph, spec: &GapSpec, iota: &Rat) -> Num {
    let m = Num::from_int(g.m() as i64);
    let w_tot = Num::from_rat(g.w_tot());
    let eps = Num::from_rat(spec.epsilon.clone());
    let iota_pow = Num::from_rat(iota.clone()).abs_pow(&spec.p);
    m.mul(&Num::one().sub(&eps)).add(&iota_pow.mul(&eps).mul(&w_tot))
}

/// gamma^p = (m(1 - eps^c) + iota^p * eps^c * w_tot) / r^p.
pub fn gamma_pow(g: &WeightedGraph, spec: &GapSpec, iota: &Rat) -> Num {
    let m = Num::from_int(g.m() as i64);
    let w_tot = Num::from_rat(g.w_tot());
    let eps_c = spec.eps_pow_c();
    let iota_pow = Num::from_rat(iota.clone()).abs_pow(&spec.p);
    let numer = m
        .mul(&Num::one().sub(&eps_c))
        .add(&iota_pow.mul(&eps_c).mul(&w_tot));
    numer.div(&radius_pow(g, spec, iota))
}

/// The instance's approximation factor gamma(iota).
pub fn gamma_of(g: &WeightedGraph, spec: &GapSpec, iota: &Rat) -> Num {
    gamma_pow(g, spec, iota).root(&spec.p)
}

/// The supremum eps^((c-1)/p) that gamma(iota) approaches from below.
pub fn limit_gamma(spec: &GapSpec) -> Num {
    let exponent = (spec.c.clone() - Rat::one()) / spec.p.rat().clone();
    rat_pow_num(&spec.epsilon, &exponent)
}

/// Smallest power-of-two iota whose gamma reaches (1 - target_slack) of the
/// limit. Monotone convergence of gamma(iota) guarantees termination.
pub fn choose_iota(g: &WeightedGraph, spec: &GapSpec, target_slack: f64) -> Result<Rat, Error> {
    if !(0.0..1.0).contains(&target_slack) && target_slack != 1.0 {
        return Err(Error::Validation(format!(
            "target_slack must lie in (0, 1], got {target_slack}"
        )));
    }
    let target = (1.0 - target_slack) * limit_gamma(spec).f64();
    let mut iota = Rat::from_integer(2.into());
    for _ in 0..1024 {
        if gamma_of(g, spec, &iota).f64() >= target {
            return Ok(iota);
        }
        iota *= Rat::from_integer(2.into());
    }
    // unreachable for valid specs; surfaced instead of looping forever
    Err(Error::Infeasible(
        "iota grid search failed to approach the gamma limit".into(),
    ))
}

/// Exact per-partition distance identity:
/// dist^p = (#cut edges) + iota^p * (total weight of uncut edges).
/// Always rational for integer p, regardless of whether the lattice entries
/// are; this is the authoritative value for binary coordinates.
pub fn binary_distance_pow(
    g: &WeightedGraph,
    spec: &GapSpec,
    iota: &Rat,
    part: &Partition,
) -> Num {
    let iota_pow = Num::from_rat(iota.clone()).abs_pow(&spec.p);
    let mut cut_count = 0i64;
    let mut uncut_weight = Rat::zero();
    for e in g.edges() {
        if part.contains(e.u) != part.contains(e.v) {
            cut_count += 1;
        } else {
            uncut_weight += e.w.clone();
        }
    }
    Num::from_int(cut_count).add(&iota_pow.mul(&Num::from_rat(uncut_weight)))
}

/// Structural copy of the output basis with every even row rescaled to 1.
/// Row scaling preserves rank, so this gives an exact rational rank check
/// even when iota * w^(1/p) is irrational.
pub fn incidence_basis(g: &WeightedGraph) -> SparseBasis {
    let n = g.n();
    let m = g.m();
    let d = 2 * m;
    let mut cols: Vec<Vec<(usize, Num)>> = vec![Vec::new(); n];
    for (idx, e) in g.edges().iter().enumerate() {
        let k = idx + 1;
        cols[e.u - 1].push((2 * k - 1, Num::from_int(-1)));
        cols[e.u - 1].push((2 * k, Num::from_int(1)));
        cols[e.v - 1].push((2 * k - 1, Num::from_int(1)));
        cols[e.v - 1].push((2 * k, Num::from_int(1)));
    }
    let columns: Vec<SparseVector> = cols
        .into_iter()
        .map(|entries| SparseVector::new(d, entries).expect("valid incidence column"))
        .collect();
    SparseBasis::new(d, columns).expect("valid incidence basis")
}
