//! Exact brute-force solvers for tiny instances.
//!
//! These enumerate candidate subsets exhaustively and serve as ground truth
//! for approximation ratios and for test expectations. Enumeration order is
//! fixed (sizes ascending, lexicographic within a size) so results are
//! deterministic.

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::objective::{pow_q, ObjectiveSpec};
use itertools::Itertools;
use serde::Serialize;

/// Keep at most this many optimal sets to bound memory on tie-heavy inputs.
pub const BEST_SETS_CAP: usize = 64;

/// Default enumeration budget: desk-scale runs finish in seconds.
pub const DEFAULT_SUBSET_LIMIT: u128 = 10_000_000;

#[derive(Debug, Clone, Serialize)]
pub struct OracleResult {
    pub best_cost: f64,
    /// All optimal open sets found, capped at [`BEST_SETS_CAP`], in
    /// enumeration order.
    pub best_sets: Vec<Vec<usize>>,
    /// Number of subsets examined.
    pub enumerated: u64,
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// Connection-plus-opening cost of an open set, without building a full
/// assignment.
fn subset_cost(instance: &Instance, open: &[usize]) -> f64 {
    let q = instance.objective.exponent();
    let mut cost = 0.0;
    for j in 0..instance.num_points() {
        let mut best = f64::INFINITY;
        for &i in open {
            let d = instance.point_candidate_distance(j, i);
            if d < best {
                best = d;
            }
        }
        cost += instance.points[j].weight * pow_q(best, q);
    }
    if instance.objective.has_opening_costs() {
        cost += open
            .iter()
            .map(|&i| instance.candidates[i].opening_cost)
            .sum::<f64>();
    }
    cost
}

fn enumerate_sizes(
    instance: &Instance,
    sizes: std::ops::RangeInclusive<usize>,
    required: u128,
    limit: u128,
) -> Result<OracleResult> {
    if required > limit {
        return Err(Error::LimitExceeded { required, limit });
    }
    let m = instance.num_candidates();
    let mut best_cost = f64::INFINITY;
    let mut best_sets: Vec<Vec<usize>> = Vec::new();
    let mut enumerated: u64 = 0;
    for size in sizes {
        for subset in (0..m).combinations(size) {
            enumerated += 1;
            let cost = subset_cost(instance, &subset);
            if cost < best_cost {
                best_cost = cost;
                best_sets.clear();
                best_sets.push(subset);
            } else if cost == best_cost && best_sets.len() < BEST_SETS_CAP {
                best_sets.push(subset);
            }
        }
    }
    Ok(OracleResult {
        best_cost,
        best_sets,
        enumerated,
    })
}

/// Exact optimum over all k-subsets of candidates.
pub fn exact_lq(instance: &Instance, limit: u128) -> Result<OracleResult> {
    let ObjectiveSpec::Lq { k, .. } = instance.objective else {
        return Err(Error::unsupported("exact_lq requires the lq objective"));
    };
    let required = binomial(instance.num_candidates(), k);
    enumerate_sizes(instance, k..=k, required, limit)
}

/// Exact optimum over all nonempty candidate subsets.
pub fn exact_ufl(instance: &Instance, limit: u128) -> Result<OracleResult> {
    if instance.objective != ObjectiveSpec::Ufl {
        return Err(Error::unsupported("exact_ufl requires the ufl objective"));
    }
    let m = instance.num_candidates();
    let required = 1u128
        .checked_shl(m as u32)
        .ok_or(Error::LimitExceeded {
            required: u128::MAX,
            limit,
        })?;
    enumerate_sizes(instance, 1..=m, required, limit)
}

/// Exact optimum over all candidate subsets of size 1..=k.
pub fn exact_gkm(instance: &Instance, limit: u128) -> Result<OracleResult> {
    let ObjectiveSpec::Gkm { k } = instance.objective else {
        return Err(Error::unsupported("exact_gkm requires the gkm objective"));
    };
    let m = instance.num_candidates();
    let required: u128 = (1..=k).map(|s| binomial(m, s)).sum();
    enumerate_sizes(instance, 1..=k, required, limit)
}
