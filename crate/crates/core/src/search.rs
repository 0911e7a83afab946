//! Multi-swap local search over open centre sets.
//!
//! One engine per objective family, sharing a driver: enumerate candidate
//! moves in a canonical order, evaluate their deltas incrementally (a worker
//! pool may fan out over a prefix window), confirm the chosen move against a
//! from-scratch recomputation, apply, repeat. The canonical order makes runs
//! deterministic whether or not moves are evaluated in parallel.

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::objective::{assign_all, cost_delta_swap, ObjectiveSpec, Solution, COST_REL_TOL};
use crate::{harness, rng};
use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;

/// Rule deciding whether a candidate solution replaces the current one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Acceptance {
    /// Any strict improvement (beyond the float-noise tolerance).
    Strict,
    /// Only moves improving by a factor `1 - epsilon/k` (or
    /// `1 - epsilon/(2|C|)` for the opening-cost families), which bounds the
    /// number of iterations polynomially.
    Scaled { epsilon: f64 },
}

/// First improving move in canonical order, or the best over the whole
/// neighborhood.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Improvement {
    #[default]
    First,
    Best,
}

/// How to pick the initial centre set when the caller supplies none.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitPolicy {
    /// Seeded uniformly random k-subset of candidates.
    Arbitrary,
    /// Candidates `0..k`.
    FirstK,
    /// Distance-to-the-q sampling, the k-means++ style seeding.
    #[default]
    DSampling,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    /// Maximum number of centres swapped per move.
    pub rho: usize,
    pub acceptance: Acceptance,
    /// Safety valve; `None` runs to a certified local optimum.
    pub max_iterations: Option<usize>,
    pub improvement: Improvement,
    /// Evaluate move windows on a worker pool. Never changes the result.
    pub parallel_moves: bool,
    pub init: InitPolicy,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            rho: 1,
            acceptance: Acceptance::Strict,
            max_iterations: None,
            improvement: Improvement::First,
            parallel_moves: false,
            init: InitPolicy::DSampling,
        }
    }
}

/// A candidate move: close `drop`, open `add`. Field order gives the
/// canonical (drop ids, add ids) lexicographic comparison via derive.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct SwapMove {
    pub drop: Vec<usize>,
    pub add: Vec<usize>,
}

/// Neighborhood shape per objective family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MoveShape {
    /// `|drop| = |add| <= rho`: preserves the open-set size.
    EqualSwap,
    /// `|drop| <= rho` and `|add| <= rho` independently; the resulting open
    /// set must stay within `[min_open, max_open]`.
    AddDrop {
        min_open: usize,
        max_open: Option<usize>,
    },
}

/// Streams every admissible move exactly once, ordered by
/// `(|drop| + |add|, drop ids, add ids)`.
pub struct MoveEnumerator {
    open: Vec<usize>,
    closed: Vec<usize>,
    rho: usize,
    shape: MoveShape,
    next_total: usize,
    max_total: usize,
    bucket: std::vec::IntoIter<SwapMove>,
}

/// Enumerate the neighborhood of an open set. `open` and `closed` must be
/// disjoint and sorted ascending.
pub fn enumerate_moves(
    open: &[usize],
    closed: &[usize],
    rho: usize,
    shape: MoveShape,
) -> MoveEnumerator {
    let max_total = match shape {
        MoveShape::EqualSwap => 2 * rho.min(open.len()).min(closed.len()),
        MoveShape::AddDrop { .. } => rho.min(open.len()) + rho.min(closed.len()),
    };
    MoveEnumerator {
        open: open.to_vec(),
        closed: closed.to_vec(),
        rho,
        shape,
        next_total: 1,
        max_total,
        bucket: Vec::new().into_iter(),
    }
}

impl MoveEnumerator {
    fn fill(&self, total: usize) -> Vec<SwapMove> {
        let mut out = Vec::new();
        match self.shape {
            MoveShape::EqualSwap => {
                if !total.is_multiple_of(2) {
                    return out;
                }
                let s = total / 2;
                if s == 0 || s > self.rho || s > self.open.len() || s > self.closed.len() {
                    return out;
                }
                for drop in self.open.iter().copied().combinations(s) {
                    for add in self.closed.iter().copied().combinations(s) {
                        out.push(SwapMove {
                            drop: drop.clone(),
                            add,
                        });
                    }
                }
            }
            MoveShape::AddDrop { min_open, max_open } => {
                let ds_max = total.min(self.rho).min(self.open.len());
                for ds in 0..=ds_max {
                    let add_size = total - ds;
                    if add_size > self.rho || add_size > self.closed.len() {
                        continue;
                    }
                    let new_size = self.open.len() - ds + add_size;
                    if new_size < min_open {
                        continue;
                    }
                    if max_open.is_some_and(|mx| new_size > mx) {
                        continue;
                    }
                    for drop in self.open.iter().copied().combinations(ds) {
                        for add in self.closed.iter().copied().combinations(add_size) {
                            out.push(SwapMove {
                                drop: drop.clone(),
                                add,
                            });
                        }
                    }
                }
                // different drop sizes share a bucket, so restore the
                // canonical (drop, add) order
                out.sort_unstable();
            }
        }
        out
    }
}

impl Iterator for MoveEnumerator {
    type Item = SwapMove;

    fn next(&mut self) -> Option<SwapMove> {
        loop {
            if let Some(mv) = self.bucket.next() {
                return Some(mv);
            }
            if self.next_total > self.max_total {
                return None;
            }
            let t = self.next_total;
            self.next_total += 1;
            self.bucket = self.fill(t).into_iter();
        }
    }
}

/// One accepted move.
#[derive(Debug, Clone, Serialize)]
pub struct IterationRecord {
    pub drop: Vec<usize>,
    pub add: Vec<usize>,
    pub cost_before: f64,
    pub cost_after: f64,
}

/// Full history of a search run.
#[derive(Debug, Clone, Serialize)]
pub struct SearchTrace {
    pub iterations: Vec<IterationRecord>,
    pub final_solution: Solution,
    /// True only if a full neighborhood sweep found no acceptable move.
    pub certified_local_opt: bool,
}

#[derive(Debug, Clone, Copy)]
enum AcceptRule {
    Strict,
    ScaledTheta(f64),
}

impl AcceptRule {
    /// Cheap pre-filter on the incremental delta; deliberately a hair looser
    /// than `accept` so float noise cannot hide a genuine improvement.
    fn screen(&self, delta: f64, old: f64) -> bool {
        match self {
            AcceptRule::Strict => delta < 0.0,
            AcceptRule::ScaledTheta(theta) => delta <= -theta * old * (1.0 - 1e-9),
        }
    }

    /// Final decision on exact from-scratch totals.
    fn accept(&self, new: f64, old: f64) -> bool {
        match self {
            AcceptRule::Strict => new < old * (1.0 - COST_REL_TOL),
            AcceptRule::ScaledTheta(theta) => new <= (1.0 - theta) * old && new < old,
        }
    }
}

fn accept_rule(instance: &Instance, config: &SearchConfig) -> Result<AcceptRule> {
    match config.acceptance {
        Acceptance::Strict => Ok(AcceptRule::Strict),
        Acceptance::Scaled { epsilon } => {
            if !(epsilon > 0.0 && epsilon < 1.0) {
                return Err(Error::invariant(format!(
                    "scaled acceptance requires epsilon in (0,1), got {epsilon}"
                )));
            }
            let theta = match instance.objective {
                ObjectiveSpec::Lq { k, .. } => epsilon / k as f64,
                ObjectiveSpec::Ufl | ObjectiveSpec::Gkm { .. } => {
                    epsilon / (2.0 * instance.num_candidates() as f64)
                }
            };
            Ok(AcceptRule::ScaledTheta(theta))
        }
    }
}

fn validate_config(instance: &Instance, config: &SearchConfig) -> Result<()> {
    if config.rho > instance.num_candidates() {
        return Err(Error::invariant(format!(
            "rho = {} exceeds the number of candidates ({})",
            config.rho,
            instance.num_candidates()
        )));
    }
    Ok(())
}

/// Centres used when the caller does not supply an initial set.
fn initial_centres(instance: &Instance, k: usize, policy: InitPolicy) -> Result<Vec<usize>> {
    match policy {
        InitPolicy::FirstK => Ok((0..k).collect()),
        InitPolicy::Arbitrary => {
            let mut rng = rng::derived(instance.rng_seed, salts::ARBITRARY_INIT);
            let mut ids =
                rand::seq::index::sample(&mut rng, instance.num_candidates(), k).into_vec();
            ids.sort_unstable();
            Ok(ids)
        }
        InitPolicy::DSampling => {
            let mut rng = rng::derived(instance.rng_seed, salts::DSAMPLING_INIT);
            harness::dsampling(instance, k, &mut rng)
        }
    }
}

pub(crate) mod salts {
    pub const ARBITRARY_INIT: u64 = 0x494e4954;
    pub const DSAMPLING_INIT: u64 = 0x44534d50;
}

const EVAL_WINDOW: usize = 256;

fn eval_window(
    instance: &Instance,
    current: &Solution,
    window: &[SwapMove],
    parallel: bool,
) -> Vec<f64> {
    let eval = |m: &SwapMove| {
        cost_delta_swap(instance, current, &m.drop, &m.add).unwrap_or(f64::INFINITY)
    };
    if parallel {
        window.par_iter().map(eval).collect()
    } else {
        window.iter().map(eval).collect()
    }
}

/// Exact candidate solution for a move; `None` if the rule rejects it on the
/// recomputed totals.
fn confirm(
    instance: &Instance,
    current: &Solution,
    mv: &SwapMove,
    rule: AcceptRule,
) -> Option<Solution> {
    let open: Vec<usize> = current
        .open
        .iter()
        .copied()
        .filter(|i| !mv.drop.contains(i))
        .chain(mv.add.iter().copied())
        .collect();
    let candidate = assign_all(instance, &open).ok()?;
    rule.accept(candidate.total_cost, current.total_cost).then_some(candidate)
}

fn find_first_improving(
    instance: &Instance,
    current: &Solution,
    mut moves: MoveEnumerator,
    rule: AcceptRule,
    parallel: bool,
) -> Option<(SwapMove, Solution)> {
    loop {
        let window: Vec<SwapMove> = moves.by_ref().take(EVAL_WINDOW).collect();
        if window.is_empty() {
            return None;
        }
        let deltas = eval_window(instance, current, &window, parallel);
        for (mv, &delta) in window.iter().zip(&deltas) {
            if rule.screen(delta, current.total_cost) {
                if let Some(next) = confirm(instance, current, mv, rule) {
                    return Some((mv.clone(), next));
                }
            }
        }
    }
}

fn find_best_improving(
    instance: &Instance,
    current: &Solution,
    moves: MoveEnumerator,
    rule: AcceptRule,
    parallel: bool,
) -> Option<(SwapMove, Solution)> {
    let all: Vec<SwapMove> = moves.collect();
    let deltas = eval_window(instance, current, &all, parallel);
    let mut order: Vec<usize> = (0..all.len())
        .filter(|&i| rule.screen(deltas[i], current.total_cost))
        .collect();
    // best delta first; canonical position breaks ties
    order.sort_by(|&a, &b| deltas[a].total_cmp(&deltas[b]).then(a.cmp(&b)));
    for i in order {
        if let Some(next) = confirm(instance, current, &all[i], rule) {
            return Some((all[i].clone(), next));
        }
    }
    None
}

fn drive(
    instance: &Instance,
    config: &SearchConfig,
    start: &[usize],
    shape: MoveShape,
) -> Result<SearchTrace> {
    let rule = accept_rule(instance, config)?;
    let mut current = assign_all(instance, start)?;
    let mut iterations = Vec::new();
    let certified;
    loop {
        if config
            .max_iterations
            .is_some_and(|max| iterations.len() >= max)
        {
            certified = false;
            break;
        }
        let closed: Vec<usize> = (0..instance.num_candidates())
            .filter(|&i| !current.is_open(i))
            .collect();
        let moves = enumerate_moves(&current.open, &closed, config.rho, shape);
        let found = match config.improvement {
            Improvement::First => {
                find_first_improving(instance, &current, moves, rule, config.parallel_moves)
            }
            Improvement::Best => {
                find_best_improving(instance, &current, moves, rule, config.parallel_moves)
            }
        };
        match found {
            Some((mv, next)) => {
                iterations.push(IterationRecord {
                    drop: mv.drop,
                    add: mv.add,
                    cost_before: current.total_cost,
                    cost_after: next.total_cost,
                });
                current = next;
            }
            None => {
                certified = true;
                break;
            }
        }
    }
    Ok(SearchTrace {
        iterations,
        final_solution: current,
        certified_local_opt: certified,
    })
}

/// Local search for the cardinality-constrained family: swaps of up to `rho`
/// centres, always exactly `k` open.
pub fn local_search_lq(
    instance: &Instance,
    config: &SearchConfig,
    initial: Option<&[usize]>,
) -> Result<SearchTrace> {
    let ObjectiveSpec::Lq { k, .. } = instance.objective else {
        return Err(Error::unsupported("local_search_lq requires the lq objective"));
    };
    validate_config(instance, config)?;
    let start = match initial {
        Some(ids) => ids.to_vec(),
        None => initial_centres(instance, k, config.init)?,
    };
    drive(instance, config, &start, MoveShape::EqualSwap)
}

/// Local search for uncapacitated facility location: add and/or drop up to
/// `rho` centres. Starts from every candidate open unless told otherwise.
pub fn local_search_ufl(
    instance: &Instance,
    config: &SearchConfig,
    initial: Option<&[usize]>,
) -> Result<SearchTrace> {
    if instance.objective != ObjectiveSpec::Ufl {
        return Err(Error::unsupported("local_search_ufl requires the ufl objective"));
    }
    validate_config(instance, config)?;
    let start = match initial {
        Some(ids) => ids.to_vec(),
        None => (0..instance.num_candidates()).collect(),
    };
    drive(
        instance,
        config,
        &start,
        MoveShape::AddDrop {
            min_open: 1,
            max_open: None,
        },
    )
}

/// Local search for generalized k-median: add/drop moves of size up to
/// `rho`, keeping between 1 and `k` centres open.
pub fn local_search_gkm(
    instance: &Instance,
    config: &SearchConfig,
    initial: Option<&[usize]>,
) -> Result<SearchTrace> {
    let ObjectiveSpec::Gkm { k } = instance.objective else {
        return Err(Error::unsupported("local_search_gkm requires the gkm objective"));
    };
    validate_config(instance, config)?;
    let start = match initial {
        Some(ids) => ids.to_vec(),
        None => initial_centres(instance, k, config.init)?,
    };
    drive(
        instance,
        config,
        &start,
        MoveShape::AddDrop {
            min_open: 1,
            max_open: Some(k),
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{Candidate, CandidatePolicy, Metric, Point, Site, make_candidates};
    use crate::oracle;

    fn line_instance(xs: &[f64], objective: ObjectiveSpec) -> Instance {
        let points: Vec<Point> = xs
            .iter()
            .map(|&x| Point {
                site: Site::Coords(vec![x]),
                weight: 1.0,
            })
            .collect();
        let candidates = make_candidates(
            &points,
            &Metric::Euclidean { dim: 1 },
            &CandidatePolicy::PointsAsCandidates,
        )
        .unwrap();
        Instance::new(points, candidates, Metric::Euclidean { dim: 1 }, objective, 0).unwrap()
    }

    fn ufl_instance(xs: &[f64], cands: &[(f64, f64)], objective: ObjectiveSpec) -> Instance {
        let points: Vec<Point> = xs
            .iter()
            .map(|&x| Point {
                site: Site::Coords(vec![x]),
                weight: 1.0,
            })
            .collect();
        let candidates: Vec<Candidate> = cands
            .iter()
            .map(|&(x, f)| Candidate {
                site: Site::Coords(vec![x]),
                opening_cost: f,
            })
            .collect();
        Instance::new(points, candidates, Metric::Euclidean { dim: 1 }, objective, 0).unwrap()
    }

    #[test]
    fn singleton_swap_walks_to_the_middle_candidate() {
        // points {0,0,2}, candidates {0,1,2}: singleton costs are 4, 3, 8
        let points: Vec<Point> = [0.0, 0.0, 2.0]
            .iter()
            .map(|&x| Point {
                site: Site::Coords(vec![x]),
                weight: 1.0,
            })
            .collect();
        let candidates: Vec<Candidate> = [0.0, 1.0, 2.0]
            .iter()
            .map(|&x| Candidate {
                site: Site::Coords(vec![x]),
                opening_cost: 0.0,
            })
            .collect();
        let inst = Instance::new(
            points,
            candidates,
            Metric::Euclidean { dim: 1 },
            ObjectiveSpec::Lq { q: 2.0, k: 1 },
            0,
        )
        .unwrap();
        let trace = local_search_lq(&inst, &SearchConfig::default(), Some(&[0])).unwrap();
        assert_eq!(trace.final_solution.open, vec![1]);
        assert_eq!(trace.final_solution.total_cost, 3.0);
        assert!(trace.certified_local_opt);
    }

    #[test]
    fn optimal_start_certifies_without_moves() {
        let inst = line_instance(&[0.0, 1.0, 5.0], ObjectiveSpec::Lq { q: 2.0, k: 2 });
        let trace = local_search_lq(&inst, &SearchConfig::default(), Some(&[0, 2])).unwrap();
        assert!(trace.iterations.is_empty());
        assert!(trace.certified_local_opt);
        assert_eq!(trace.final_solution.total_cost, 1.0);
    }

    #[test]
    fn rho_equals_k_reaches_the_oracle_optimum() {
        let inst = line_instance(&[0.0, 1.0, 3.0, 7.0, 8.0], ObjectiveSpec::Lq { q: 2.0, k: 2 });
        let config = SearchConfig {
            rho: 2,
            init: InitPolicy::FirstK,
            ..SearchConfig::default()
        };
        let trace = local_search_lq(&inst, &config, None).unwrap();
        let opt = oracle::exact_lq(&inst, oracle::DEFAULT_SUBSET_LIMIT).unwrap();
        assert!((trace.final_solution.total_cost - opt.best_cost).abs() <= 1e-9 * opt.best_cost.max(1.0));
    }

    #[test]
    fn ufl_drops_the_expensive_centre() {
        // starting from everything open (cost 11), dropping centre 1 saves 8
        let inst = ufl_instance(&[0.0, 2.0], &[(0.0, 1.0), (2.0, 10.0)], ObjectiveSpec::Ufl);
        let trace = local_search_ufl(&inst, &SearchConfig::default(), None).unwrap();
        assert_eq!(trace.final_solution.open, vec![0]);
        assert_eq!(trace.final_solution.total_cost, 3.0);
        assert_eq!(trace.iterations.len(), 1);
        assert_eq!(trace.iterations[0].cost_before, 11.0);
    }

    #[test]
    fn ufl_with_free_openings_keeps_cost_zero() {
        let inst = ufl_instance(
            &[0.0, 2.0, 7.0],
            &[(0.0, 0.0), (2.0, 0.0), (7.0, 0.0)],
            ObjectiveSpec::Ufl,
        );
        let trace = local_search_ufl(&inst, &SearchConfig::default(), None).unwrap();
        assert_eq!(trace.final_solution.total_cost, 0.0);
        assert!(trace.certified_local_opt);
    }

    #[test]
    fn ufl_single_candidate_returns_immediately() {
        let inst = ufl_instance(&[0.0, 2.0], &[(1.0, 4.0)], ObjectiveSpec::Ufl);
        let trace = local_search_ufl(&inst, &SearchConfig::default(), None).unwrap();
        assert_eq!(trace.final_solution.open, vec![0]);
        assert!(trace.iterations.is_empty());
    }

    #[test]
    fn gkm_with_free_centres_matches_lq_q1_cost() {
        let gkm = line_instance(&[0.0, 1.0, 5.0], ObjectiveSpec::Gkm { k: 2 });
        let lq = line_instance(&[0.0, 1.0, 5.0], ObjectiveSpec::Lq { q: 1.0, k: 2 });
        let config = SearchConfig {
            rho: 2,
            init: InitPolicy::FirstK,
            ..SearchConfig::default()
        };
        let g = local_search_gkm(&gkm, &config, Some(&[0, 1])).unwrap();
        let l = local_search_lq(&lq, &config, Some(&[0, 1])).unwrap();
        assert_eq!(g.final_solution.total_cost, l.final_solution.total_cost);
    }

    #[test]
    fn gkm_with_huge_openings_collapses_to_the_one_median() {
        let inst = ufl_instance(
            &[0.0, 1.0, 5.0],
            &[(0.0, 1000.0), (1.0, 1000.0), (5.0, 1000.0)],
            ObjectiveSpec::Gkm { k: 3 },
        );
        let config = SearchConfig {
            rho: 2,
            init: InitPolicy::FirstK,
            ..SearchConfig::default()
        };
        let trace = local_search_gkm(&inst, &config, Some(&[0, 1, 2])).unwrap();
        assert_eq!(trace.final_solution.open, vec![1]);
        assert_eq!(trace.final_solution.total_cost, 1005.0);
    }

    #[test]
    fn gkm_two_point_example_keeps_the_cheap_centre() {
        let inst = ufl_instance(&[0.0, 2.0], &[(0.0, 1.0), (2.0, 10.0)], ObjectiveSpec::Gkm { k: 2 });
        let config = SearchConfig {
            rho: 2,
            ..SearchConfig::default()
        };
        let trace = local_search_gkm(&inst, &config, Some(&[0, 1])).unwrap();
        assert_eq!(trace.final_solution.open, vec![0]);
        assert_eq!(trace.final_solution.total_cost, 3.0);
    }

    #[test]
    fn move_counts_match_hand_enumeration() {
        // open {a,b}, spare {c}, rho=1: two singleton swaps
        let moves: Vec<SwapMove> =
            enumerate_moves(&[0, 1], &[2], 1, MoveShape::EqualSwap).collect();
        assert_eq!(moves.len(), 2);
        assert_eq!(moves[0].drop, vec![0]);
        assert_eq!(moves[1].drop, vec![1]);

        let empty: Vec<SwapMove> = enumerate_moves(&[0, 1], &[2], 0, MoveShape::EqualSwap).collect();
        assert!(empty.is_empty());

        // C(2,1)C(2,1) + C(2,2)C(2,2) = 5
        let five: Vec<SwapMove> =
            enumerate_moves(&[0, 1], &[2, 3], 2, MoveShape::EqualSwap).collect();
        assert_eq!(five.len(), 5);
    }

    #[test]
    fn moves_stream_in_canonical_order_without_repeats() {
        let moves: Vec<SwapMove> = enumerate_moves(
            &[0, 1, 2],
            &[3, 4],
            2,
            MoveShape::AddDrop {
                min_open: 1,
                max_open: None,
            },
        )
        .collect();
        for w in moves.windows(2) {
            let ka = (w[0].drop.len() + w[0].add.len(), &w[0]);
            let kb = (w[1].drop.len() + w[1].add.len(), &w[1]);
            assert!(ka < kb, "order violated: {:?} then {:?}", w[0], w[1]);
        }
    }

    #[test]
    fn scaled_acceptance_bounds_iterations_by_the_log_ratio() {
        let inst = line_instance(
            &[0.0, 1.0, 3.0, 7.0, 8.0, 20.0],
            ObjectiveSpec::Lq { q: 2.0, k: 2 },
        );
        let config = SearchConfig {
            rho: 1,
            acceptance: Acceptance::Scaled { epsilon: 0.3 },
            init: InitPolicy::FirstK,
            ..SearchConfig::default()
        };
        let trace = local_search_lq(&inst, &config, None).unwrap();
        let s0 = assign_all(&inst, &[0, 1]).unwrap().total_cost;
        let opt = oracle::exact_lq(&inst, oracle::DEFAULT_SUBSET_LIMIT)
            .unwrap()
            .best_cost;
        let bound = ((s0 / opt).ln() / (1.0f64 / (1.0 - 0.3 / 2.0)).ln()).ceil();
        assert!(trace.iterations.len() as f64 <= bound);
        for it in &trace.iterations {
            assert!(it.cost_after <= (1.0 - 0.3 / 2.0) * it.cost_before);
        }
    }

    #[test]
    fn parallel_and_serial_runs_are_identical() {
        let inst = line_instance(
            &[0.0, 0.5, 1.0, 3.0, 7.0, 8.0, 8.5],
            ObjectiveSpec::Lq { q: 2.0, k: 3 },
        );
        let base = SearchConfig {
            rho: 2,
            init: InitPolicy::FirstK,
            ..SearchConfig::default()
        };
        let par = SearchConfig {
            parallel_moves: true,
            ..base.clone()
        };
        let a = local_search_lq(&inst, &base, None).unwrap();
        let b = local_search_lq(&inst, &par, None).unwrap();
        assert_eq!(a.final_solution.open, b.final_solution.open);
        assert_eq!(a.iterations.len(), b.iterations.len());
        for (x, y) in a.iterations.iter().zip(&b.iterations) {
            assert_eq!(x.drop, y.drop);
            assert_eq!(x.add, y.add);
        }
    }

    #[test]
    fn costs_strictly_decrease_along_the_trace() {
        let inst = line_instance(
            &[0.0, 1.0, 2.0, 6.0, 9.0, 14.0],
            ObjectiveSpec::Lq { q: 2.0, k: 2 },
        );
        let config = SearchConfig {
            init: InitPolicy::FirstK,
            ..SearchConfig::default()
        };
        let trace = local_search_lq(&inst, &config, None).unwrap();
        for it in &trace.iterations {
            assert!(it.cost_after < it.cost_before);
        }
    }

    #[test]
    fn infeasible_initial_set_is_rejected() {
        let inst = line_instance(&[0.0, 1.0, 5.0], ObjectiveSpec::Lq { q: 2.0, k: 2 });
        assert!(local_search_lq(&inst, &SearchConfig::default(), Some(&[0])).is_err());
        assert!(local_search_lq(&inst, &SearchConfig::default(), Some(&[0, 1, 2])).is_err());
    }

    #[test]
    fn best_improvement_reaches_a_local_optimum_too() {
        let inst = line_instance(
            &[0.0, 1.0, 3.0, 7.0, 8.0],
            ObjectiveSpec::Lq { q: 2.0, k: 2 },
        );
        let config = SearchConfig {
            rho: 2,
            improvement: Improvement::Best,
            init: InitPolicy::FirstK,
            ..SearchConfig::default()
        };
        let trace = local_search_lq(&inst, &config, None).unwrap();
        let opt = oracle::exact_lq(&inst, oracle::DEFAULT_SUBSET_LIMIT).unwrap();
        assert!((trace.final_solution.total_cost - opt.best_cost).abs() <= 1e-9);
    }
}
