//! Objective families, point assignment, and incremental move evaluation.
//!
//! Three families share one cost shape: a connection term (weighted q-th
//! powers of point-to-centre distances) plus, for the facility-location
//! families, the opening costs of the open centres.
//!
//! Ties in nearest-centre assignment are broken towards the lowest candidate
//! id so that every run is reproducible and parallel evaluation cannot
//! reorder results.

use crate::error::{Error, Result};
use crate::instance::Instance;
use serde::{Deserialize, Serialize};

/// Relative tolerance used when comparing costs; absorbs float summation
/// noise so reassociation cannot register as an "improvement".
pub const COST_REL_TOL: f64 = 1e-12;

/// Which objective an instance optimizes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum ObjectiveSpec {
    /// Sum of `weight * distance^q` over points, exactly `k` open centres.
    /// `q = 2` is k-means, `q = 1` is k-median. Opening costs are ignored.
    Lq { q: f64, k: usize },
    /// Sum of distances plus opening costs; any nonempty centre set.
    Ufl,
    /// Sum of distances plus opening costs; between 1 and `k` open centres.
    Gkm { k: usize },
}

impl ObjectiveSpec {
    /// Exponent applied to distances in the connection term.
    pub fn exponent(&self) -> f64 {
        match self {
            ObjectiveSpec::Lq { q, .. } => *q,
            ObjectiveSpec::Ufl | ObjectiveSpec::Gkm { .. } => 1.0,
        }
    }

    /// Whether candidate opening costs enter the total.
    pub fn has_opening_costs(&self) -> bool {
        !matches!(self, ObjectiveSpec::Lq { .. })
    }

    /// Cardinality bound `k`, if the family has one.
    pub fn k(&self) -> Option<usize> {
        match self {
            ObjectiveSpec::Lq { k, .. } | ObjectiveSpec::Gkm { k } => Some(*k),
            ObjectiveSpec::Ufl => None,
        }
    }

    pub fn validate(&self, num_candidates: usize) -> Result<()> {
        match self {
            ObjectiveSpec::Lq { q, k } => {
                if *q < 1.0 || !q.is_finite() {
                    return Err(Error::invariant(format!("q must be >= 1, got {q}")));
                }
                check_k(*k, num_candidates)
            }
            ObjectiveSpec::Gkm { k } => check_k(*k, num_candidates),
            ObjectiveSpec::Ufl => Ok(()),
        }
    }

    /// Is `size` a legal number of open centres for this family?
    pub fn feasible_open_size(&self, size: usize) -> bool {
        match self {
            ObjectiveSpec::Lq { k, .. } => size == *k,
            ObjectiveSpec::Ufl => size >= 1,
            ObjectiveSpec::Gkm { k } => size >= 1 && size <= *k,
        }
    }
}

fn check_k(k: usize, num_candidates: usize) -> Result<()> {
    if k < 1 {
        return Err(Error::invariant("k must be at least 1"));
    }
    if k > num_candidates {
        return Err(Error::invariant(format!(
            "k = {k} exceeds the number of candidates ({num_candidates})"
        )));
    }
    Ok(())
}

/// `d^q` with exact fast paths for the common exponents.
pub fn pow_q(d: f64, q: f64) -> f64 {
    if q == 2.0 {
        d * d
    } else if q == 1.0 {
        d
    } else {
        d.powf(q)
    }
}

/// An assignment of every point to its nearest open centre, with cached
/// per-point costs and the family total.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Solution {
    /// Open candidate ids, sorted ascending.
    pub open: Vec<usize>,
    /// Per point: the open candidate it is assigned to (nearest, ties to the
    /// lowest candidate id).
    pub assign: Vec<usize>,
    /// Per point: `weight * distance^q`.
    pub per_point_cost: Vec<f64>,
    /// Sum of the per-point costs.
    pub connection_cost: f64,
    /// Sum of opening costs of the open centres (zero when the family
    /// ignores them).
    pub opening_cost: f64,
    /// `connection_cost + opening_cost`.
    pub total_cost: f64,
}

impl Solution {
    pub fn is_open(&self, candidate: usize) -> bool {
        self.open.binary_search(&candidate).is_ok()
    }
}

fn checked_open_set(instance: &Instance, open: &[usize]) -> Result<Vec<usize>> {
    if open.is_empty() {
        return Err(Error::invariant("open centre set is empty"));
    }
    let mut sorted = open.to_vec();
    sorted.sort_unstable();
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            return Err(Error::InvalidId(format!(
                "candidate {} appears twice in open set",
                w[0]
            )));
        }
    }
    if let Some(&max) = sorted.last() {
        if max >= instance.num_candidates() {
            return Err(Error::InvalidId(format!(
                "candidate id {max} out of range"
            )));
        }
    }
    if !instance.objective.feasible_open_size(sorted.len()) {
        return Err(Error::invariant(format!(
            "open set of size {} violates the objective's cardinality constraint",
            sorted.len()
        )));
    }
    Ok(sorted)
}

/// Nearest centre among `open` (sorted ascending) for point `j`; ties go to
/// the lowest id because the scan keeps the first strict minimum.
fn nearest_open(instance: &Instance, j: usize, open: &[usize]) -> (usize, f64) {
    let mut best_id = open[0];
    let mut best_d = instance.point_candidate_distance(j, open[0]);
    for &i in &open[1..] {
        let d = instance.point_candidate_distance(j, i);
        if d < best_d {
            best_d = d;
            best_id = i;
        }
    }
    (best_id, best_d)
}

/// Assign every point to its nearest open centre and evaluate the total cost.
pub fn assign_all(instance: &Instance, open: &[usize]) -> Result<Solution> {
    let open = checked_open_set(instance, open)?;
    let q = instance.objective.exponent();
    let n = instance.num_points();
    let mut assign = Vec::with_capacity(n);
    let mut per_point_cost = Vec::with_capacity(n);
    let mut connection_cost = 0.0;
    for j in 0..n {
        let (i, d) = nearest_open(instance, j, &open);
        let c = instance.points[j].weight * pow_q(d, q);
        assign.push(i);
        per_point_cost.push(c);
        connection_cost += c;
    }
    let opening_cost = if instance.objective.has_opening_costs() {
        open.iter().map(|&i| instance.candidates[i].opening_cost).sum()
    } else {
        0.0
    };
    Ok(Solution {
        total_cost: connection_cost + opening_cost,
        open,
        assign,
        per_point_cost,
        connection_cost,
        opening_cost,
    })
}

/// Cost change of swapping out `drop` and in `add`, evaluated incrementally:
/// only points assigned to a dropped centre, or strictly closer to an added
/// one, are re-evaluated. Equals the from-scratch recomputation up to
/// summation noise.
pub fn cost_delta_swap(
    instance: &Instance,
    solution: &Solution,
    drop: &[usize],
    add: &[usize],
) -> Result<f64> {
    for &i in drop {
        if !solution.is_open(i) {
            return Err(Error::InvalidId(format!(
                "cannot drop candidate {i}: not open"
            )));
        }
    }
    for &i in add {
        if i >= instance.num_candidates() {
            return Err(Error::InvalidId(format!("candidate id {i} out of range")));
        }
        if solution.is_open(i) {
            return Err(Error::InvalidId(format!(
                "cannot add candidate {i}: already open"
            )));
        }
    }
    let mut new_open: Vec<usize> = solution
        .open
        .iter()
        .copied()
        .filter(|i| !drop.contains(i))
        .chain(add.iter().copied())
        .collect();
    new_open.sort_unstable();
    new_open.dedup();
    if new_open.is_empty() || !instance.objective.feasible_open_size(new_open.len()) {
        return Err(Error::invariant(format!(
            "swap result of size {} violates the objective's cardinality constraint",
            new_open.len()
        )));
    }

    let q = instance.objective.exponent();
    let mut delta = 0.0;
    for j in 0..instance.num_points() {
        let cur = solution.assign[j];
        let w = instance.points[j].weight;
        if drop.contains(&cur) {
            let (_, d) = nearest_open(instance, j, &new_open);
            delta += w * pow_q(d, q) - solution.per_point_cost[j];
        } else {
            let cur_d = instance.point_candidate_distance(j, cur);
            let mut best = cur_d;
            for &a in add {
                let d = instance.point_candidate_distance(j, a);
                if d < best {
                    best = d;
                }
            }
            if best < cur_d {
                delta += w * pow_q(best, q) - solution.per_point_cost[j];
            }
        }
    }
    if instance.objective.has_opening_costs() {
        delta += add
            .iter()
            .map(|&i| instance.candidates[i].opening_cost)
            .sum::<f64>();
        delta -= drop
            .iter()
            .map(|&i| instance.candidates[i].opening_cost)
            .sum::<f64>();
    }
    Ok(delta)
}
