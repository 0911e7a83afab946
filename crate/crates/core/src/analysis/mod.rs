//! Executable counterparts of the machinery used to reason about swap-search
//! quality: centre filtering with proxies, tether/net pair construction, a
//! randomized geometric partition of the two solutions, and checkers that
//! test the resulting guarantees on concrete instances.

pub mod partition;
pub mod report;
pub mod theory;
pub mod verify;

use crate::error::{Error, Result};
use crate::instance::Instance;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;

pub use partition::{balance_parts, sample_partition, PartitionSample, PrePart, PrePartKind};
pub use report::{analyze, AnalyzeOptions, AnalyzeReport};
pub use theory::{theory_rho, RhoVariant, TheoryRho};
pub use verify::{
    classify_and_account, estimate_cut_probability, local_opt_witness, verify_lemmas,
    AccountingReport, CheckOutcome, CutEstimate, LemmaReport, PointCategory,
};

/// Which of the two compared solutions a centre belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    /// The reference (globally optimal) solution.
    Opt,
    /// The locally optimal solution under scrutiny.
    Loc,
}

/// A centre in the disjoint union of the two solutions. The two sides use
/// separate copies of the candidate set, so a shared candidate appears twice
/// at distance zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Centre {
    pub side: Side,
    pub cand: usize,
}

impl Centre {
    pub fn opt(cand: usize) -> Self {
        Centre {
            side: Side::Opt,
            cand,
        }
    }

    pub fn loc(cand: usize) -> Self {
        Centre {
            side: Side::Loc,
            cand,
        }
    }
}

impl fmt::Display for Centre {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.side {
            Side::Opt => write!(f, "O{}", self.cand),
            Side::Loc => write!(f, "S{}", self.cand),
        }
    }
}

impl Serialize for Centre {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// A (local optimum, global optimum) pair of centre sets made disjoint by
/// cloning: the optimal side keeps the original candidate ids and the local
/// side uses zero-distance duplicates, so set operations never conflate the
/// two solutions even where they share candidates.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedSolutions {
    /// Global-optimum candidate ids, sorted.
    pub opt: Vec<usize>,
    /// Local-optimum candidate ids, sorted.
    pub loc: Vec<usize>,
    /// Always true for pairs built through [`PairedSolutions::new`]; the
    /// side tag on [`Centre`] is the disjointification.
    pub disjointified: bool,
}

impl PairedSolutions {
    pub fn new(instance: &Instance, loc: &[usize], opt: &[usize]) -> Result<Self> {
        let mut loc = loc.to_vec();
        let mut opt = opt.to_vec();
        loc.sort_unstable();
        opt.sort_unstable();
        for set in [&loc, &opt] {
            if set.is_empty() {
                return Err(Error::invariant("paired solutions must be nonempty"));
            }
            if set.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidId("duplicate candidate id in solution".into()));
            }
            if *set.last().unwrap() >= instance.num_candidates() {
                return Err(Error::InvalidId("candidate id out of range".into()));
            }
        }
        Ok(PairedSolutions {
            opt,
            loc,
            disjointified: true,
        })
    }

    /// All centres, optimal side first, each side sorted by candidate id.
    pub fn centres(&self) -> Vec<Centre> {
        self.opt
            .iter()
            .map(|&c| Centre::opt(c))
            .chain(self.loc.iter().map(|&c| Centre::loc(c)))
            .collect()
    }

    /// Distance between two centres. Duplicates of one candidate are
    /// colocated, so the side tag never enters the distance.
    pub fn distance(&self, instance: &Instance, a: Centre, b: Centre) -> f64 {
        instance.candidate_distance(a.cand, b.cand)
    }

    /// Distance from a point to a centre.
    pub fn point_distance(&self, instance: &Instance, j: usize, c: Centre) -> f64 {
        instance.point_candidate_distance(j, c.cand)
    }

    pub fn balanced(&self) -> bool {
        self.opt.len() == self.loc.len()
    }
}

/// Everything the filtering pass derives from a solution pair.
#[derive(Debug, Clone)]
pub struct FilterResult {
    pub epsilon: f64,
    /// Distance from each centre to the nearest centre of the other side.
    pub d_value: BTreeMap<Centre, f64>,
    /// Survivors of the optimal-side filter, sorted.
    pub opt_bar: Vec<Centre>,
    /// Survivors of the local-side filter, sorted.
    pub loc_bar: Vec<Centre>,
    /// Proxy map: every centre to a nearby survivor on its own side
    /// (survivors map to themselves).
    pub eta: BTreeMap<Centre, Centre>,
    /// Nearest surviving centre of the opposite side, for survivors only.
    pub phi_bar: BTreeMap<Centre, Centre>,
    /// Per point: nearest local-side centre.
    pub sigma: Vec<Centre>,
    /// Per point: nearest optimal-side centre.
    pub sigma_star: Vec<Centre>,
    /// Per point: proxy of `sigma`.
    pub sigma_bar: Vec<Centre>,
    /// Per point: proxy of `sigma_star`.
    pub sigma_bar_star: Vec<Centre>,
    /// For each local survivor that receives an arrow under `phi_bar`, the
    /// closest optimal survivor pointing at it.
    pub cent: BTreeMap<Centre, Centre>,
    /// Tether pairs `(cent(i), i)`: never separated by a partition.
    pub tether_pairs: Vec<(Centre, Centre)>,
    /// Net pairs `(i*, i)`: separated with probability at most epsilon.
    pub net_pairs: Vec<(Centre, Centre)>,
}

impl FilterResult {
    pub fn d(&self, c: Centre) -> f64 {
        self.d_value[&c]
    }

    pub fn survivors(&self) -> impl Iterator<Item = Centre> + '_ {
        self.opt_bar.iter().chain(self.loc_bar.iter()).copied()
    }

    pub fn is_survivor(&self, c: Centre) -> bool {
        match c.side {
            Side::Opt => self.opt_bar.binary_search(&c).is_ok(),
            Side::Loc => self.loc_bar.binary_search(&c).is_ok(),
        }
    }
}

/// Greedy sparsification of one side: process centres in nondecreasing order
/// of their D-value (ties by id) and keep only those farther than
/// `epsilon * D` from every earlier survivor; filtered centres get the
/// lowest-id qualifying survivor as proxy.
fn filter_side(
    instance: &Instance,
    paired: &PairedSolutions,
    members: &[Centre],
    d_value: &BTreeMap<Centre, f64>,
    epsilon: f64,
    eta: &mut BTreeMap<Centre, Centre>,
) -> Vec<Centre> {
    let mut order: Vec<Centre> = members.to_vec();
    order.sort_by(|a, b| {
        d_value[a]
            .total_cmp(&d_value[b])
            .then_with(|| a.cand.cmp(&b.cand))
    });
    let mut kept: Vec<Centre> = Vec::new();
    for &c in &order {
        let proxy = kept
            .iter()
            .copied()
            .filter(|&s| paired.distance(instance, c, s) <= epsilon * d_value[&c])
            .min_by_key(|s| s.cand);
        match proxy {
            Some(p) => {
                eta.insert(c, p);
            }
            None => {
                eta.insert(c, c);
                kept.push(c);
            }
        }
    }
    kept.sort();
    kept
}

/// Compute D-values, filter both sides, and derive the proxy maps, tether
/// pairs, and net pairs.
pub fn compute_d_and_filter(
    instance: &Instance,
    paired: &PairedSolutions,
    epsilon: f64,
) -> Result<FilterResult> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::invariant(format!(
            "epsilon must lie in (0,1), got {epsilon}"
        )));
    }
    if !paired.disjointified {
        return Err(Error::invariant("solutions must be disjointified"));
    }
    let opt: Vec<Centre> = paired.opt.iter().map(|&c| Centre::opt(c)).collect();
    let loc: Vec<Centre> = paired.loc.iter().map(|&c| Centre::loc(c)).collect();

    let mut d_value = BTreeMap::new();
    for &c in &opt {
        let d = loc
            .iter()
            .map(|&s| paired.distance(instance, c, s))
            .fold(f64::INFINITY, f64::min);
        d_value.insert(c, d);
    }
    for &c in &loc {
        let d = opt
            .iter()
            .map(|&s| paired.distance(instance, c, s))
            .fold(f64::INFINITY, f64::min);
        d_value.insert(c, d);
    }

    let mut eta = BTreeMap::new();
    let opt_bar = filter_side(instance, paired, &opt, &d_value, epsilon, &mut eta);
    let loc_bar = filter_side(instance, paired, &loc, &d_value, epsilon, &mut eta);

    let nearest_in = |c: Centre, pool: &[Centre]| -> Centre {
        pool.iter()
            .copied()
            .min_by(|a, b| {
                paired
                    .distance(instance, c, *a)
                    .total_cmp(&paired.distance(instance, c, *b))
                    .then_with(|| a.cand.cmp(&b.cand))
            })
            .expect("pool is nonempty")
    };

    let mut phi_bar = BTreeMap::new();
    for &c in &opt_bar {
        phi_bar.insert(c, nearest_in(c, &loc_bar));
    }
    for &c in &loc_bar {
        phi_bar.insert(c, nearest_in(c, &opt_bar));
    }

    let n = instance.num_points();
    let nearest_centre = |j: usize, pool: &[Centre]| -> Centre {
        pool.iter()
            .copied()
            .min_by(|a, b| {
                paired
                    .point_distance(instance, j, *a)
                    .total_cmp(&paired.point_distance(instance, j, *b))
                    .then_with(|| a.cand.cmp(&b.cand))
            })
            .expect("solutions are nonempty")
    };
    let sigma: Vec<Centre> = (0..n).map(|j| nearest_centre(j, &loc)).collect();
    let sigma_star: Vec<Centre> = (0..n).map(|j| nearest_centre(j, &opt)).collect();
    let sigma_bar: Vec<Centre> = sigma.iter().map(|c| eta[c]).collect();
    let sigma_bar_star: Vec<Centre> = sigma_star.iter().map(|c| eta[c]).collect();

    // cent: for each target of an optimal-survivor arrow, the closest source
    let mut cent: BTreeMap<Centre, Centre> = BTreeMap::new();
    for &o in &opt_bar {
        let target = phi_bar[&o];
        let better = match cent.get(&target) {
            None => true,
            Some(&cur) => {
                let dn = paired.distance(instance, target, o);
                let dc = paired.distance(instance, target, cur);
                dn < dc || (dn == dc && o.cand < cur.cand)
            }
        };
        if better {
            cent.insert(target, o);
        }
    }

    let mut tether_pairs = Vec::new();
    for (&i, &c) in &cent {
        if epsilon * paired.distance(instance, c, i) <= d_value[&i] {
            tether_pairs.push((c, i));
        }
    }

    let mut net_pairs = Vec::new();
    for &i_star in &opt_bar {
        for &i in &loc_bar {
            let d = paired.distance(instance, i_star, i);
            if d <= d_value[&i] / epsilon && d_value[&i_star] >= epsilon * d_value[&i] {
                net_pairs.push((i_star, i));
            }
        }
    }

    Ok(FilterResult {
        epsilon,
        d_value,
        opt_bar,
        loc_bar,
        eta,
        phi_bar,
        sigma,
        sigma_star,
        sigma_bar,
        sigma_bar_star,
        cent,
        tether_pairs,
        net_pairs,
    })
}

#[cfg(test)]
pub(crate) mod test_fixtures {
    use crate::instance::{Candidate, Instance, Metric, Point, Site};
    use crate::objective::ObjectiveSpec;

    /// Euclidean 1-d instance whose candidate list is given explicitly; the
    /// single point is irrelevant for centre-only tests.
    pub fn centres_on_a_line(cands: &[f64]) -> Instance {
        let points = vec![Point {
            site: Site::Coords(vec![0.0]),
            weight: 1.0,
        }];
        let candidates: Vec<Candidate> = cands
            .iter()
            .map(|&x| Candidate {
                site: Site::Coords(vec![x]),
                opening_cost: 0.0,
            })
            .collect();
        Instance::new(
            points,
            candidates,
            Metric::Euclidean { dim: 1 },
            ObjectiveSpec::Lq { q: 2.0, k: 1 },
            0,
        )
        .unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use test_fixtures::centres_on_a_line;

    #[test]
    fn close_optimal_centres_collapse_onto_one_survivor() {
        // candidates: o1 at 0, o2 at 0.05, s1 at 1, s2 at 5
        let inst = centres_on_a_line(&[0.0, 0.05, 1.0, 5.0]);
        let paired = PairedSolutions::new(&inst, &[2, 3], &[0, 1]).unwrap();
        let f = compute_d_and_filter(&inst, &paired, 0.1).unwrap();
        assert_eq!(f.d(Centre::opt(0)), 1.0);
        assert_eq!(f.d(Centre::opt(1)), 0.95);
        // o2 (smaller D) is processed first and kept; o1 is within
        // 0.1 * D of it and filtered out
        assert_eq!(f.opt_bar, vec![Centre::opt(1)]);
        assert_eq!(f.eta[&Centre::opt(0)], Centre::opt(1));
        assert_eq!(f.eta[&Centre::opt(1)], Centre::opt(1));
    }

    #[test]
    fn well_separated_centres_all_survive() {
        // O = {0, 100}, S = {1, 100.5}
        let inst = centres_on_a_line(&[0.0, 100.0, 1.0, 100.5]);
        let paired = PairedSolutions::new(&inst, &[2, 3], &[0, 1]).unwrap();
        let f = compute_d_and_filter(&inst, &paired, 0.1).unwrap();
        assert_eq!(f.opt_bar, vec![Centre::opt(0), Centre::opt(1)]);
        assert_eq!(f.loc_bar, vec![Centre::loc(2), Centre::loc(3)]);
        for c in f.survivors() {
            assert_eq!(f.eta[&c], c);
        }
        // nearest opposite survivor of o at 0 is s at 1, at exactly D
        assert_eq!(f.phi_bar[&Centre::opt(0)], Centre::loc(2));
        assert_eq!(
            paired.distance(&inst, Centre::opt(0), f.phi_bar[&Centre::opt(0)]),
            f.d(Centre::opt(0))
        );
    }

    #[test]
    fn colocated_duplicates_survive_and_form_a_tether_pair() {
        // shared candidate 0: O uses the original, S the duplicate
        let inst = centres_on_a_line(&[0.0, 3.0, 7.0]);
        let paired = PairedSolutions::new(&inst, &[0, 1], &[0, 2]).unwrap();
        let f = compute_d_and_filter(&inst, &paired, 0.3).unwrap();
        let o = Centre::opt(0);
        let s = Centre::loc(0);
        assert_eq!(f.d(o), 0.0);
        assert_eq!(f.d(s), 0.0);
        assert!(f.is_survivor(o) && f.is_survivor(s));
        assert_eq!(f.cent[&s], o);
        assert!(f.tether_pairs.contains(&(o, s)));
        // the colocated pair is also a net pair with both D-values zero
        assert!(f.net_pairs.contains(&(o, s)));
    }

    #[test]
    fn rejects_bad_epsilon() {
        let inst = centres_on_a_line(&[0.0, 1.0]);
        let paired = PairedSolutions::new(&inst, &[0], &[1]).unwrap();
        assert!(compute_d_and_filter(&inst, &paired, 0.0).is_err());
        assert!(compute_d_and_filter(&inst, &paired, 1.0).is_err());
    }

    #[test]
    fn net_pairs_respect_both_defining_inequalities() {
        let inst = centres_on_a_line(&[0.0, 0.4, 1.0, 5.0, 30.0]);
        let paired = PairedSolutions::new(&inst, &[2, 3], &[0, 4]).unwrap();
        let f = compute_d_and_filter(&inst, &paired, 0.3).unwrap();
        for &(i_star, i) in &f.net_pairs {
            let d = paired.distance(&inst, i_star, i);
            assert!(d <= f.d(i) / 0.3);
            assert!(f.d(i_star) >= 0.3 * f.d(i));
        }
    }
}
