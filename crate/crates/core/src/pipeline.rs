//! End-to-end driver: reduce a gap Max-Cut instance to binary CVP, solve it
//! with the requested solver, and map the decision straight back. The
//! reduction is decision-preserving, so no translation layer sits between
//! the two sides; on YES the witness coordinates decode to a partition
//! (vertex i joins the cut side iff y_i = 1) which is re-verified against
//! the graph in exact arithmetic, never trusted from the solver.

use crate::ann::Backend;
use crate::error::Error;
use crate::graph::{cut_value, normalize_weights, GapSpec, Partition, WeightedGraph};
use crate::lattice::{decide_cvp, Coordinates};
use crate::mitm::{choose_split, solve_binary_cvp_mitm, MitmOptions, SplitConfig};
use crate::num_mode::{rat_to_f64, Num, Rat};
use crate::oracle::brute_binary_cvp;
use crate::reduce::{choose_iota, limit_gamma, reduce_auto, ReductionMode, ReductionParams};
use crate::Decision;

/// Which engine decides the reduced instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverKind {
    /// Exhaustive binary sweep (ground truth, rank-capped).
    Oracle,
    /// Meet-in-the-middle over a near-neighbor index.
    Mitm,
}

#[derive(Clone, Debug)]
pub struct PipelineOptions {
    pub solver: SolverKind,
    pub backend: Backend,
    /// Split fraction for mitm; None picks the default a = 1/2.
    pub a: Option<f64>,
    pub audit: bool,
    pub seed: u64,
    /// Gadget parameter; None auto-tunes to bring gamma within 1% of its limit.
    pub iota: Option<Rat>,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            solver: SolverKind::Oracle,
            backend: Backend::Exact,
            a: None,
            audit: false,
            seed: 0,
            iota: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PipelineReport {
    pub decision: Decision,
    /// Line-oriented key/value pairs, in emission order.
    pub entries: Vec<(String, String)>,
    pub witness: Option<Partition>,
}

impl PipelineReport {
    fn put(&mut self, key: &str, value: impl ToString) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}

/// Reduce, solve, verify, report.
pub fn run_pipeline(
    g: &WeightedGraph,
    spec: &GapSpec,
    opts: &PipelineOptions,
) -> Result<PipelineReport, Error> {
    let g = normalize_weights(g);
    let iota = match &opts.iota {
        Some(i) => i.clone(),
        None => choose_iota(&g, spec, 0.01)?,
    };
    let mode = if g.is_unit_weight() {
        ReductionMode::Unweighted
    } else {
        ReductionMode::Weighted
    };
    let params = ReductionParams::new(iota.clone(), mode)?;
    let inst = reduce_auto(&g, spec, &params)?;

    let mut report = PipelineReport {
        decision: Decision::No,
        entries: Vec::new(),
        witness: None,
    };
    report.put("n", g.n());
    report.put("m", g.m());
    report.put("d", inst.dim());
    report.put("rank", inst.rank());
    report.put("iota", rat_to_f64(&iota));
    report.put("r", inst.r().f64());
    report.put("gamma", inst.gamma().f64());
    report.put("limit_gamma", limit_gamma(spec).f64());

    let (decision, witness_coords) = match opts.solver {
        SolverKind::Oracle => {
            let (min_pow, argmin) = brute_binary_cvp(&inst)?;
            report.put("dist_pow", min_pow.f64());
            report.put("queries", 1u64 << inst.rank());
            (decide_cvp(&inst, &min_pow), Some(argmin))
        }
        SolverKind::Mitm => {
            let split = match opts.a {
                Some(a) => SplitConfig::fraction(inst.rank(), a)?,
                None => choose_split(inst.rank(), None)?,
            };
            let m_opts = MitmOptions {
                backend: opts.backend,
                audit: opts.audit,
                seed: opts.seed,
            };
            let (dec, stats) = solve_binary_cvp_mitm(&inst, &split, &m_opts)?;
            report.put("index_size", stats.index_size);
            report.put("queries", stats.queries);
            if let Some(lsh) = &stats.lsh {
                report.put("lsh_tables", lsh.l);
                report.put("lsh_functions", lsh.k);
            }
            (dec, stats.witness)
        }
    };

    report.decision = decision;
    report.put("decision", decision);

    if decision == Decision::Yes {
        let coords = witness_coords.ok_or_else(|| {
            Error::Validation("solver answered YES without a witness".into())
        })?;
        let part = decode_partition(&coords)?;
        let cut = cut_value(&g, &part);
        let fraction = cut / g.w_tot();
        let ok = fraction >= spec.yes_threshold();
        report.put("witness_cut_fraction", rat_to_f64(&fraction));
        report.put("witness_verified", ok);
        if !ok {
            return Err(Error::Validation(format!(
                "witness partition cuts only {} of the weight, below 1 - epsilon",
                rat_to_f64(&fraction)
            )));
        }
        report.put(
            "witness_partition",
            part.membership()
                .iter()
                .map(|&b| if b { '1' } else { '0' })
                .collect::<String>(),
        );
        report.witness = Some(part);
    }
    Ok(report)
}

/// Vertex i joins the partition iff the witness coefficient y_i is 1.
fn decode_partition(coords: &Coordinates) -> Result<Partition, Error> {
    if !coords.is_binary() {
        return Err(Error::Validation(format!(
            "witness coordinates are not binary: {:?}",
            coords.0
        )));
    }
    let members: Vec<usize> = coords
        .0
        .iter()
        .enumerate()
        .filter(|(_, &y)| y == 1)
        .map(|(i, _)| i + 1)
        .collect();
    Partition::from_members(coords.len(), &members)
}

/// Sanity lower bound used by verification elsewhere; exported for reports.
pub fn cut_fraction(g: &WeightedGraph, part: &Partition) -> Num {
    Num::from_rat(cut_value(g, part) / g.w_tot())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{generate_certified_no, generate_planted_yes, PlantSpec};
    use crate::graph::decide_gap_maxcut;
    use crate::num_mode::rat;
    use num::One;

    fn gap(eps_n: i64, eps_d: i64, c_n: i64, c_d: i64, p: i64) -> GapSpec {
        GapSpec::new(rat(eps_n, eps_d), rat(c_n, c_d), rat(p, 1)).unwrap()
    }

    #[test]
    fn planted_yes_oracle() {
        let spec = gap(1, 3, 1, 2, 2);
        let plant = PlantSpec {
            n: 6,
            m: 9,
            gap: spec.clone(),
            seed: 5,
            w_max: Rat::one(),
        };
        let g = generate_planted_yes(&plant).unwrap();
        let report = run_pipeline(&g, &spec, &PipelineOptions::default()).unwrap();
        assert_eq!(report.decision, Decision::Yes);
        let part = report.witness.as_ref().unwrap();
        let frac = cut_fraction(&g, part);
        assert!(frac.f64() >= 2.0 / 3.0 - 1e-12);
    }

    #[test]
    fn certified_no_oracle() {
        let spec = gap(3, 10, 1, 1, 2);
        let plant = PlantSpec {
            n: 6,
            m: 15,
            gap: spec.clone(),
            seed: 3,
            w_max: Rat::one(),
        };
        let g = generate_certified_no(&plant).unwrap();
        let report = run_pipeline(&g, &spec, &PipelineOptions::default()).unwrap();
        assert_eq!(report.decision, Decision::No);
        assert!(report.witness.is_none());
    }

    #[test]
    fn mitm_exact_matches_graph_decision() {
        let spec = gap(1, 4, 1, 2, 1);
        for seed in 0..10 {
            let plant = PlantSpec {
                n: 8,
                m: 14,
                gap: spec.clone(),
                seed,
                w_max: Rat::one(),
            };
            let g = generate_planted_yes(&plant).unwrap();
            let expected = decide_gap_maxcut(&g, &spec).unwrap();
            let opts = PipelineOptions {
                solver: SolverKind::Mitm,
                ..PipelineOptions::default()
            };
            let report = run_pipeline(&g, &spec, &opts).unwrap();
            assert_eq!(report.decision, expected, "seed {seed}");
        }
    }

    #[test]
    fn mitm_lsh_mostly_yes() {
        // p = 1, small epsilon, c = 1/2 puts gamma well above 1.5
        let spec = gap(1, 16, 1, 2, 1);
        let mut yes = 0;
        for seed in 0..20 {
            let plant = PlantSpec {
                n: 8,
                m: 12,
                gap: spec.clone(),
                seed,
                w_max: Rat::one(),
            };
            let g = generate_planted_yes(&plant).unwrap();
            let opts = PipelineOptions {
                solver: SolverKind::Mitm,
                backend: Backend::Lsh,
                seed,
                iota: Some(rat(16, 1)),
                ..PipelineOptions::default()
            };
            let report = run_pipeline(&g, &spec, &opts).unwrap();
            if report.decision == Decision::Yes {
                yes += 1;
            }
        }
        assert!(yes >= 18, "only {yes}/20 LSH runs answered YES");
    }

    #[test]
    fn report_contains_parameters() {
        let spec = gap(1, 4, 1, 2, 2);
        let plant = PlantSpec {
            n: 5,
            m: 6,
            gap: spec.clone(),
            seed: 9,
            w_max: Rat::one(),
        };
        let g = generate_planted_yes(&plant).unwrap();
        let report = run_pipeline(&g, &spec, &PipelineOptions::default()).unwrap();
        for key in ["n", "m", "d", "rank", "iota", "r", "gamma", "limit_gamma", "decision"] {
            assert!(report.get(key).is_some(), "missing {key}");
        }
        assert_eq!(report.get("d").unwrap(), "12");
        assert_eq!(report.get("rank").unwrap(), "5");
    }

    #[test]
    fn weighted_pipeline_roundtrip() {
        let spec = gap(1, 4, 1, 2, 2);
        for seed in [2, 4, 8] {
            let plant = PlantSpec {
                n: 6,
                m: 10,
                gap: spec.clone(),
                seed,
                w_max: rat(4, 1),
            };
            let g = generate_planted_yes(&plant).unwrap();
            let expected = decide_gap_maxcut(&g, &spec).unwrap();
            let report = run_pipeline(&g, &spec, &PipelineOptions::default()).unwrap();
            assert_eq!(report.decision, expected, "seed {seed}");
        }
    }
}
