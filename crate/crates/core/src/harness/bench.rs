//! Benchmark runner: an algorithm matrix over instances and seeds, emitting
//! CSV and JSON reports.
//!
//! Rows are reproducible bit-for-bit from (config, seeds) in every column
//! except `wall_ms`, which is measurement.

use crate::error::{Error, Result};
use crate::format::load_instance;
use crate::harness::{dsampling_seed, generate, lloyd_baseline, GeneratorKind, GeneratorSpec};
use crate::instance::Instance;
use crate::objective::{assign_all, ObjectiveSpec};
use crate::oracle::{self, OracleResult};
use crate::search::{local_search_gkm, local_search_lq, local_search_ufl, Acceptance, SearchConfig};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;
use std::time::Instant;

/// Fixed CSV column set; bump [`BENCH_FORMAT_VERSION`] if it ever changes.
pub const BENCH_CSV_HEADER: &str =
    "instance,algorithm,seed,cost,cost_secondary,oracle_cost,ratio,iterations,wall_ms,status";
pub const BENCH_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SeedSpec {
    List(Vec<u64>),
    Range { start: u64, count: u64 },
}

impl SeedSpec {
    pub fn seeds(&self) -> Vec<u64> {
        match self {
            SeedSpec::List(v) => v.clone(),
            SeedSpec::Range { start, count } => (*start..start + count).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InstanceSource {
    Generated {
        generator: GeneratorKind,
        objective: ObjectiveSpec,
    },
    File {
        file: PathBuf,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub id: String,
    #[serde(flatten)]
    pub source: InstanceSource,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum AlgorithmSpec {
    /// Swap search with the instance's objective family.
    LocalSearch {
        rho: usize,
        #[serde(default)]
        epsilon: Option<f64>,
    },
    Lloyd {
        #[serde(default = "default_lloyd_iters")]
        max_iters: usize,
    },
    /// Seeding quality only: evaluate the d-sampled start without searching.
    Dsampling,
    Oracle,
}

fn default_lloyd_iters() -> usize {
    100
}

impl AlgorithmSpec {
    fn label(&self) -> String {
        match self {
            AlgorithmSpec::LocalSearch { rho, epsilon: None } => format!("local-search-rho{rho}"),
            AlgorithmSpec::LocalSearch {
                rho,
                epsilon: Some(e),
            } => format!("local-search-rho{rho}-eps{e}"),
            AlgorithmSpec::Lloyd { .. } => "lloyd".to_string(),
            AlgorithmSpec::Dsampling => "dsampling".to_string(),
            AlgorithmSpec::Oracle => "oracle".to_string(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchConfig {
    pub seeds: SeedSpec,
    pub instances: Vec<InstanceSpec>,
    pub algorithms: Vec<AlgorithmSpec>,
    #[serde(default = "default_oracle_limit")]
    pub oracle_limit: u128,
}

fn default_oracle_limit() -> u128 {
    oracle::DEFAULT_SUBSET_LIMIT
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchRow {
    pub instance: String,
    pub algorithm: String,
    pub seed: u64,
    pub cost: Option<f64>,
    /// Second cost when an algorithm reports two (Lloyd: unsnapped
    /// continuous cost).
    pub cost_secondary: Option<f64>,
    pub oracle_cost: Option<f64>,
    pub ratio: Option<f64>,
    pub iterations: Option<u64>,
    pub wall_ms: f64,
    pub status: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub version: u32,
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(BENCH_CSV_HEADER);
        out.push('\n');
        let opt = |v: &Option<f64>| v.map(|x| format!("{x:?}")).unwrap_or_default();
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{:.3},{}\n",
                r.instance,
                r.algorithm,
                r.seed,
                opt(&r.cost),
                opt(&r.cost_secondary),
                opt(&r.oracle_cost),
                opt(&r.ratio),
                r.iterations.map(|i| i.to_string()).unwrap_or_default(),
                r.wall_ms,
                r.status,
            ));
        }
        out
    }
}

fn build_instance(spec: &InstanceSpec, seed: u64) -> Result<Instance> {
    match &spec.source {
        InstanceSource::Generated {
            generator,
            objective,
        } => generate(
            &GeneratorSpec {
                kind: generator.clone(),
                seed,
            },
            *objective,
        ),
        InstanceSource::File { file } => {
            let mut inst = load_instance(file)?;
            inst.rng_seed = seed;
            Ok(inst)
        }
    }
}

fn run_oracle(instance: &Instance, limit: u128) -> Result<OracleResult> {
    match instance.objective {
        ObjectiveSpec::Lq { .. } => oracle::exact_lq(instance, limit),
        ObjectiveSpec::Ufl => oracle::exact_ufl(instance, limit),
        ObjectiveSpec::Gkm { .. } => oracle::exact_gkm(instance, limit),
    }
}

fn run_search(instance: &Instance, rho: usize, epsilon: Option<f64>) -> Result<(f64, u64)> {
    let config = SearchConfig {
        rho,
        acceptance: match epsilon {
            Some(e) => Acceptance::Scaled { epsilon: e },
            None => Acceptance::Strict,
        },
        ..SearchConfig::default()
    };
    let trace = match instance.objective {
        ObjectiveSpec::Lq { .. } => local_search_lq(instance, &config, None)?,
        ObjectiveSpec::Ufl => local_search_ufl(instance, &config, None)?,
        ObjectiveSpec::Gkm { .. } => local_search_gkm(instance, &config, None)?,
    };
    Ok((
        trace.final_solution.total_cost,
        trace.iterations.len() as u64,
    ))
}

fn ratio_of(cost: f64, oracle_cost: Option<f64>) -> Option<f64> {
    let opt = oracle_cost?;
    if opt > 0.0 {
        Some(cost / opt)
    } else if cost == 0.0 {
        Some(1.0)
    } else {
        None
    }
}

/// Execute the full matrix. Sub-run failures are recorded in their row's
/// `status`; the run continues.
pub fn run_bench(config: &BenchConfig) -> Result<BenchReport> {
    if config.instances.is_empty() || config.algorithms.is_empty() {
        return Err(Error::invariant(
            "bench config needs at least one instance and one algorithm",
        ));
    }
    let seeds = config.seeds.seeds();
    if seeds.is_empty() {
        return Err(Error::invariant("bench config has no seeds"));
    }
    let wants_oracle = config
        .algorithms
        .iter()
        .any(|a| matches!(a, AlgorithmSpec::Oracle));
    let mut rows = Vec::new();
    for spec in &config.instances {
        for &seed in &seeds {
            let instance = match build_instance(spec, seed) {
                Ok(i) => i,
                Err(e) => {
                    for algo in &config.algorithms {
                        rows.push(BenchRow {
                            instance: spec.id.clone(),
                            algorithm: algo.label(),
                            seed,
                            cost: None,
                            cost_secondary: None,
                            oracle_cost: None,
                            ratio: None,
                            iterations: None,
                            wall_ms: 0.0,
                            status: format!("error: {e}"),
                        });
                    }
                    continue;
                }
            };
            let oracle_cost = if wants_oracle {
                run_oracle(&instance, config.oracle_limit).ok().map(|r| r.best_cost)
            } else {
                None
            };
            for algo in &config.algorithms {
                let started = Instant::now();
                let outcome: Result<(Option<f64>, Option<f64>, Option<u64>)> = match algo {
                    AlgorithmSpec::LocalSearch { rho, epsilon } => {
                        run_search(&instance, *rho, *epsilon)
                            .map(|(c, it)| (Some(c), None, Some(it)))
                    }
                    AlgorithmSpec::Lloyd { max_iters } => lloyd_baseline(&instance, *max_iters)
                        .map(|o| {
                            (
                                Some(o.snapped_cost),
                                Some(o.continuous_cost),
                                Some(o.iterations as u64),
                            )
                        }),
                    AlgorithmSpec::Dsampling => dsampling_seed(&instance)
                        .and_then(|ids| assign_all(&instance, &ids))
                        .map(|s| (Some(s.total_cost), None, None)),
                    AlgorithmSpec::Oracle => run_oracle(&instance, config.oracle_limit)
                        .map(|r| (Some(r.best_cost), None, Some(r.enumerated))),
                };
                let wall_ms = started.elapsed().as_secs_f64() * 1e3;
                let row = match outcome {
                    Ok((cost, cost_secondary, iterations)) => BenchRow {
                        instance: spec.id.clone(),
                        algorithm: algo.label(),
                        seed,
                        ratio: cost.and_then(|c| ratio_of(c, oracle_cost)),
                        cost,
                        cost_secondary,
                        oracle_cost,
                        iterations,
                        wall_ms,
                        status: "ok".to_string(),
                    },
                    Err(e) => BenchRow {
                        instance: spec.id.clone(),
                        algorithm: algo.label(),
                        seed,
                        cost: None,
                        cost_secondary: None,
                        oracle_cost,
                        ratio: None,
                        iterations: None,
                        wall_ms,
                        status: format!("error: {e}"),
                    },
                };
                rows.push(row);
            }
        }
    }
    rows.sort_by(|a, b| {
        (&a.instance, &a.algorithm, a.seed).cmp(&(&b.instance, &b.algorithm, b.seed))
    });
    Ok(BenchReport {
        version: BENCH_FORMAT_VERSION,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> BenchConfig {
        BenchConfig {
            seeds: SeedSpec::Range { start: 0, count: 5 },
            instances: vec![InstanceSpec {
                id: "cube8".to_string(),
                source: InstanceSource::Generated {
                    generator: GeneratorKind::UniformCube { d: 2, n: 8 },
                    objective: ObjectiveSpec::Lq { q: 2.0, k: 2 },
                },
            }],
            algorithms: vec![
                AlgorithmSpec::LocalSearch {
                    rho: 1,
                    epsilon: None,
                },
                AlgorithmSpec::LocalSearch {
                    rho: 2,
                    epsilon: None,
                },
                AlgorithmSpec::Oracle,
            ],
            oracle_limit: oracle::DEFAULT_SUBSET_LIMIT,
        }
    }

    #[test]
    fn matrix_produces_one_row_per_cell_with_sane_ratios() {
        let report = run_bench(&small_config()).unwrap();
        assert_eq!(report.rows.len(), 15);
        for row in &report.rows {
            assert_eq!(row.status, "ok");
            if let Some(r) = row.ratio {
                assert!(r >= 1.0 - 1e-9, "ratio {r} below 1");
            }
            // rho = k rows are exact
            if row.algorithm == "local-search-rho2" {
                assert!(row.ratio.unwrap() <= 1.0 + 1e-9);
            }
        }
    }

    #[test]
    fn rows_reproduce_except_wall_time() {
        let a = run_bench(&small_config()).unwrap();
        let b = run_bench(&small_config()).unwrap();
        assert_eq!(a.rows.len(), b.rows.len());
        for (x, y) in a.rows.iter().zip(&b.rows) {
            assert_eq!(
                (&x.instance, &x.algorithm, x.seed, x.cost, x.oracle_cost, x.ratio, x.iterations),
                (&y.instance, &y.algorithm, y.seed, y.cost, y.oracle_cost, y.ratio, y.iterations)
            );
        }
    }

    #[test]
    fn csv_has_the_fixed_header() {
        let report = run_bench(&small_config()).unwrap();
        let csv = report.to_csv();
        assert!(csv.starts_with(BENCH_CSV_HEADER));
        assert_eq!(csv.lines().count(), 16);
    }

    #[test]
    fn missing_instance_file_is_reported_per_row() {
        let config = BenchConfig {
            seeds: SeedSpec::List(vec![1]),
            instances: vec![InstanceSpec {
                id: "ghost".to_string(),
                source: InstanceSource::File {
                    file: PathBuf::from("/nonexistent/instance.cspec"),
                },
            }],
            algorithms: vec![AlgorithmSpec::Dsampling],
            oracle_limit: 1000,
        };
        let report = run_bench(&config).unwrap();
        assert_eq!(report.rows.len(), 1);
        assert!(report.rows[0].status.starts_with("error"));
    }
}
