//! End-to-end analysis driver: solve, compare against the exact optimum,
//! filter, sample partitions, and assemble one JSON-serializable report.

use crate::analysis::verify::{
    check_filter, check_sample, classify_and_account, estimate_cut_probability,
    local_opt_witness, AccountingReport, CheckOutcome, CutEstimate, LemmaReport,
};
use crate::analysis::{compute_d_and_filter, sample_partition, Centre, PairedSolutions};
use crate::error::Result;
use crate::instance::Instance;
use crate::objective::ObjectiveSpec;
use crate::oracle;
use crate::rng;
use crate::search::{local_search_lq, SearchConfig};
use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Debug, Clone)]
pub struct AnalyzeOptions {
    /// Swap size for the local search producing the solution under scrutiny.
    pub rho: usize,
    pub epsilon: f64,
    /// Number of partition draws.
    pub trials: u64,
    pub seed: u64,
    pub oracle_limit: u128,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            rho: 2,
            epsilon: 0.1,
            trials: 1000,
            seed: 0,
            oracle_limit: oracle::DEFAULT_SUBSET_LIMIT,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FilterSection {
    pub epsilon: f64,
    pub local_optimum: Vec<usize>,
    pub local_cost: f64,
    pub global_optimum: Vec<usize>,
    pub global_cost: f64,
    pub d_values: BTreeMap<Centre, f64>,
    pub opt_bar: Vec<Centre>,
    pub loc_bar: Vec<Centre>,
    pub eta: BTreeMap<Centre, Centre>,
    pub phi_bar: BTreeMap<Centre, Centre>,
    pub cent: BTreeMap<Centre, Centre>,
    pub tether_pairs: Vec<(Centre, Centre)>,
    pub net_pairs: Vec<(Centre, Centre)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PartitionStats {
    pub trials: u64,
    pub min_parts: usize,
    pub max_parts: usize,
    pub max_part_size: usize,
    pub balanced: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CutSection {
    pub trials: u64,
    pub threshold: f64,
    pub max_frequency: f64,
    pub frequencies: Vec<((Centre, Centre), f64)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalyzeReport {
    pub filter: FilterSection,
    pub partition_stats: PartitionStats,
    /// Filter checks once, sample checks aggregated over every trial, and
    /// the local-optimality witness alongside them.
    pub lemma_checks: LemmaChecksSection,
    pub cut_frequencies: CutSection,
    /// Per-point accounting for the first draw (squared objective only).
    pub accounting: Option<AccountingReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaChecksSection {
    pub lemmas: LemmaReport,
    pub local_opt_witness: CheckOutcome,
    pub all_ok: bool,
}

/// Run the full pipeline on a cardinality-constrained instance: local search
/// at `rho`, exact optimum, filtering, `trials` partition draws with every
/// checker, cut-frequency estimation, and first-draw accounting for `q = 2`.
pub fn analyze(instance: &Instance, options: &AnalyzeOptions) -> Result<AnalyzeReport> {
    let ObjectiveSpec::Lq { q, .. } = instance.objective else {
        return Err(crate::error::Error::unsupported(
            "analyze requires the lq objective (the compared solutions share a cardinality)",
        ));
    };
    let config = SearchConfig {
        rho: options.rho,
        ..SearchConfig::default()
    };
    let trace = local_search_lq(instance, &config, None)?;
    let opt = oracle::exact_lq(instance, options.oracle_limit)?;
    let paired = PairedSolutions::new(
        instance,
        &trace.final_solution.open,
        &opt.best_sets[0],
    )?;
    let filter = compute_d_and_filter(instance, &paired, options.epsilon)?;

    let mut lemmas = check_filter(instance, &paired, &filter);
    let mut witness = CheckOutcome::default();
    let mut min_parts = usize::MAX;
    let mut max_parts = 0;
    let mut max_part_size = 0;
    let mut balanced = true;
    let mut accounting = None;
    for t in 0..options.trials {
        let mut rng = rng::derived(options.seed, t);
        let sample = sample_partition(instance, &paired, &filter, &mut rng)?;
        lemmas.merge(&check_sample(instance, &paired, &filter, &sample));
        witness.merge(&local_opt_witness(instance, &paired, &sample, options.rho));
        min_parts = min_parts.min(sample.parts.len());
        max_parts = max_parts.max(sample.parts.len());
        max_part_size = max_part_size.max(sample.parts.iter().map(|p| p.len()).max().unwrap_or(0));
        balanced &= sample.balanced;
        if t == 0 && q == 2.0 {
            accounting = Some(classify_and_account(instance, &paired, &filter, &sample)?);
        }
    }

    let cuts: CutEstimate =
        estimate_cut_probability(instance, &paired, &filter, options.trials, options.seed)?;
    let threshold = options.epsilon
        + 3.0 * (options.epsilon * (1.0 - options.epsilon) / options.trials as f64).sqrt();

    let all_ok = lemmas.all_ok() && witness.ok();
    Ok(AnalyzeReport {
        filter: FilterSection {
            epsilon: options.epsilon,
            local_optimum: trace.final_solution.open.clone(),
            local_cost: trace.final_solution.total_cost,
            global_optimum: opt.best_sets[0].clone(),
            global_cost: opt.best_cost,
            d_values: filter.d_value.clone(),
            opt_bar: filter.opt_bar.clone(),
            loc_bar: filter.loc_bar.clone(),
            eta: filter.eta.clone(),
            phi_bar: filter.phi_bar.clone(),
            cent: filter.cent.clone(),
            tether_pairs: filter.tether_pairs.clone(),
            net_pairs: filter.net_pairs.clone(),
        },
        partition_stats: PartitionStats {
            trials: options.trials,
            min_parts,
            max_parts,
            max_part_size,
            balanced,
        },
        lemma_checks: LemmaChecksSection {
            lemmas,
            local_opt_witness: witness,
            all_ok,
        },
        cut_frequencies: CutSection {
            trials: cuts.trials,
            threshold,
            max_frequency: cuts.max_frequency,
            frequencies: cuts.frequencies,
        },
        accounting,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{generate, GeneratorKind, GeneratorSpec};

    #[test]
    fn analyze_runs_clean_on_a_small_instance() {
        let inst = generate(
            &GeneratorSpec {
                kind: GeneratorKind::UniformCube { d: 2, n: 8 },
                seed: 42,
            },
            ObjectiveSpec::Lq { q: 2.0, k: 2 },
        )
        .unwrap();
        let report = analyze(
            &inst,
            &AnalyzeOptions {
                trials: 50,
                epsilon: 0.3,
                ..AnalyzeOptions::default()
            },
        )
        .unwrap();
        assert!(report.lemma_checks.all_ok, "{:?}", report.lemma_checks);
        assert!(report.cut_frequencies.max_frequency <= report.cut_frequencies.threshold);
        assert!(report.accounting.is_some());
        // the report serializes
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.contains("\"filter\""));
        assert!(json.contains("\"partition_stats\""));
        assert!(json.contains("\"lemma_checks\""));
        assert!(json.contains("\"cut_frequencies\""));
        assert!(json.contains("\"accounting\""));
    }
}
