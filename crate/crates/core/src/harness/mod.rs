//! Instance generators, seeding, and the Lloyd baseline.

pub mod bench;

use crate::error::{Error, Result};
use crate::instance::{make_candidates, CandidatePolicy, Instance, Metric, Point, Site};
use crate::objective::{assign_all, pow_q, ObjectiveSpec, Solution};
use crate::rng;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

pub use bench::{
    run_bench, AlgorithmSpec, BenchConfig, BenchReport, BenchRow, InstanceSource, InstanceSpec,
    SeedSpec,
};

/// Synthetic instance families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GeneratorKind {
    /// `n` points uniform in the unit cube of dimension `d`.
    UniformCube { d: usize, n: usize },
    /// `n` points from `centers` Gaussian blobs with deviation `sigma`;
    /// blob means are uniform in `[0,10]^d`.
    GaussianMixture {
        d: usize,
        n: usize,
        centers: usize,
        sigma: f64,
    },
    /// Fixed 1-d fixture: 0, 1, then quintupling (n=3 gives {0,1,5}).
    Line { n: usize },
    /// Three tight 1-d clusters far apart; centroid descent from a random
    /// start frequently strands two centres in one cluster here, which is
    /// what the swap search is measured against.
    LloydAdversarial { n: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    #[serde(flatten)]
    pub kind: GeneratorKind,
    pub seed: u64,
}

/// Build a deterministic instance from a generator spec. Candidates default
/// to one per distinct point location.
pub fn generate(spec: &GeneratorSpec, objective: ObjectiveSpec) -> Result<Instance> {
    let (points, dim): (Vec<Point>, usize) = match &spec.kind {
        GeneratorKind::UniformCube { d, n } => {
            check_positive(*n, "n")?;
            check_positive(*d, "d")?;
            let mut rng = rng::derived(spec.seed, salts::GENERATE);
            let points = (0..*n)
                .map(|_| Point {
                    site: Site::Coords((0..*d).map(|_| rng.gen_range(0.0..1.0)).collect()),
                    weight: 1.0,
                })
                .collect();
            (points, *d)
        }
        GeneratorKind::GaussianMixture {
            d,
            n,
            centers,
            sigma,
        } => {
            check_positive(*n, "n")?;
            check_positive(*d, "d")?;
            check_positive(*centers, "centers")?;
            if *sigma <= 0.0 || !sigma.is_finite() {
                return Err(Error::invariant(format!(
                    "sigma must be positive, got {sigma}"
                )));
            }
            let mut rng = rng::derived(spec.seed, salts::GENERATE);
            let means: Vec<Vec<f64>> = (0..*centers)
                .map(|_| (0..*d).map(|_| rng.gen_range(0.0..10.0)).collect())
                .collect();
            let normal = Normal::new(0.0, *sigma).expect("sigma validated above");
            let points = (0..*n)
                .map(|_| {
                    let mean = &means[rng.gen_range(0..*centers)];
                    Point {
                        site: Site::Coords(
                            mean.iter().map(|m| m + normal.sample(&mut rng)).collect(),
                        ),
                        weight: 1.0,
                    }
                })
                .collect();
            (points, *d)
        }
        GeneratorKind::Line { n } => {
            check_positive(*n, "n")?;
            let mut xs = Vec::with_capacity(*n);
            for i in 0..*n {
                let x = match i {
                    0 => 0.0,
                    1 => 1.0,
                    _ => xs[i - 1] * 5.0,
                };
                xs.push(x);
            }
            let points = xs
                .into_iter()
                .map(|x| Point {
                    site: Site::Coords(vec![x]),
                    weight: 1.0,
                })
                .collect();
            (points, 1)
        }
        GeneratorKind::LloydAdversarial { n } => {
            if *n < 3 {
                return Err(Error::invariant(
                    "lloyd-adversarial needs at least 3 points",
                ));
            }
            let mut rng = rng::derived(spec.seed, salts::GENERATE);
            let groups = [0.0, 4.0, 40.0];
            let points = (0..*n)
                .map(|i| Point {
                    site: Site::Coords(vec![groups[i % 3] + rng.gen_range(-0.05..0.05)]),
                    weight: 1.0,
                })
                .collect();
            (points, 1)
        }
    };
    let metric = Metric::Euclidean { dim };
    let candidates = make_candidates(&points, &metric, &CandidatePolicy::PointsAsCandidates)?;
    Instance::new(points, candidates, metric, objective, spec.seed)
}

fn check_positive(v: usize, name: &str) -> Result<()> {
    if v == 0 {
        Err(Error::invariant(format!("{name} must be at least 1")))
    } else {
        Ok(())
    }
}

mod salts {
    pub const GENERATE: u64 = 0x47454e;
    pub const LLOYD: u64 = 0x4c4f5944;
    pub const DSAMPLE: u64 = 0x44535350;
}

/// Weighted draw proportional to `weights`; assumes a positive total.
fn weighted_index(rng: &mut impl Rng, weights: &[f64], total: f64) -> usize {
    let mut target = rng.gen_range(0.0..total);
    for (i, w) in weights.iter().enumerate() {
        target -= w;
        if target < 0.0 {
            return i;
        }
    }
    weights.len() - 1
}

/// Nearest candidate to point `j` not already chosen; ties to the lowest id.
fn nearest_unchosen(instance: &Instance, j: usize, chosen: &[usize]) -> usize {
    let mut best = usize::MAX;
    let mut best_d = f64::INFINITY;
    for i in 0..instance.num_candidates() {
        if chosen.contains(&i) {
            continue;
        }
        let d = instance.point_candidate_distance(j, i);
        if d < best_d || best == usize::MAX {
            best = i;
            best_d = d;
        }
    }
    best
}

/// Distance-to-the-q seeding: repeatedly sample a point with probability
/// proportional to its current assignment cost and open the nearest unopened
/// candidate to it.
pub fn dsampling(instance: &Instance, k: usize, rng: &mut impl Rng) -> Result<Vec<usize>> {
    if k < 1 || k > instance.num_candidates() {
        return Err(Error::invariant(format!(
            "dsampling requires 1 <= k <= {}, got {k}",
            instance.num_candidates()
        )));
    }
    let q = instance.objective.exponent();
    let n = instance.num_points();
    let mut chosen: Vec<usize> = Vec::with_capacity(k);

    // first draw: by weight alone
    let weights: Vec<f64> = instance.points.iter().map(|p| p.weight).collect();
    let total: f64 = weights.iter().sum();
    let j0 = if total > 0.0 {
        weighted_index(rng, &weights, total)
    } else {
        rng.gen_range(0..n)
    };
    chosen.push(nearest_unchosen(instance, j0, &chosen));

    while chosen.len() < k {
        let scores: Vec<f64> = (0..n)
            .map(|j| {
                let d = chosen
                    .iter()
                    .map(|&i| instance.point_candidate_distance(j, i))
                    .fold(f64::INFINITY, f64::min);
                instance.points[j].weight * pow_q(d, q)
            })
            .collect();
        let total: f64 = scores.iter().sum();
        let j = if total > 0.0 {
            weighted_index(rng, &scores, total)
        } else {
            // every point already costs zero; any unopened candidate will do
            let next = (0..instance.num_candidates())
                .find(|i| !chosen.contains(i))
                .expect("k <= number of candidates");
            chosen.push(next);
            chosen.sort_unstable();
            continue;
        };
        chosen.push(nearest_unchosen(instance, j, &chosen));
    }
    chosen.sort_unstable();
    Ok(chosen)
}

/// Seeding entry point used by the CLI and bench harness: k from the
/// objective, randomness from the instance seed.
pub fn dsampling_seed(instance: &Instance) -> Result<Vec<usize>> {
    let Some(k) = instance.objective.k() else {
        return Err(Error::unsupported(
            "dsampling seeding needs a cardinality bound k",
        ));
    };
    let mut rng = rng::derived(instance.rng_seed, salts::DSAMPLE);
    dsampling(instance, k, &mut rng)
}

/// Result of the centroid-descent baseline.
#[derive(Debug, Clone, Serialize)]
pub struct LloydOutcome {
    /// Discrete solution after snapping centroids to their nearest
    /// candidates.
    pub solution: Solution,
    /// Cost of the unsnapped (continuous-centroid) clustering.
    pub continuous_cost: f64,
    /// Equal to `solution.total_cost`; reported next to the continuous cost
    /// because the snap can change the comparison.
    pub snapped_cost: f64,
    /// Rounds that changed the assignment.
    pub iterations: usize,
    pub centroids: Vec<Vec<f64>>,
}

/// Alternate centroid recomputation and reassignment from a seeded random
/// start until the assignment stops changing, then snap each centroid to its
/// nearest candidate.
pub fn lloyd_baseline(instance: &Instance, max_iters: usize) -> Result<LloydOutcome> {
    let ObjectiveSpec::Lq { q, k } = instance.objective else {
        return Err(Error::unsupported("lloyd baseline requires the lq objective"));
    };
    let Metric::Euclidean { dim } = instance.metric else {
        return Err(Error::unsupported("lloyd baseline requires a euclidean metric"));
    };
    let n = instance.num_points();
    let coords = |j: usize| -> &[f64] {
        match &instance.points[j].site {
            Site::Coords(c) => c,
            Site::Index(_) => unreachable!("euclidean instances carry coordinates"),
        }
    };

    let mut rng = rng::derived(instance.rng_seed, salts::LLOYD);
    let picks = rand::seq::index::sample(&mut rng, n, k.min(n)).into_vec();
    let mut centroids: Vec<Vec<f64>> = picks.iter().map(|&j| coords(j).to_vec()).collect();
    while centroids.len() < k {
        // more centres than points: repeat the first pick; the extras serve
        // nobody and cost nothing
        centroids.push(centroids[0].clone());
    }

    let assignment = |centroids: &[Vec<f64>]| -> Vec<usize> {
        (0..n)
            .map(|j| {
                let x = coords(j);
                let mut best = 0;
                let mut best_d = f64::INFINITY;
                for (c, centre) in centroids.iter().enumerate() {
                    let d: f64 = x
                        .iter()
                        .zip(centre)
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                        .sqrt();
                    if d < best_d {
                        best_d = d;
                        best = c;
                    }
                }
                best
            })
            .collect()
    };

    let mut assign = assignment(&centroids);
    let mut iterations = 0;
    for _ in 0..max_iters {
        // weighted means of the current clusters
        let mut sums = vec![vec![0.0; dim]; centroids.len()];
        let mut mass = vec![0.0; centroids.len()];
        for j in 0..n {
            let w = instance.points[j].weight;
            mass[assign[j]] += w;
            for (s, x) in sums[assign[j]].iter_mut().zip(coords(j)) {
                *s += w * x;
            }
        }
        for (c, sum) in sums.into_iter().enumerate() {
            if mass[c] > 0.0 {
                centroids[c] = sum.into_iter().map(|s| s / mass[c]).collect();
            }
        }
        let next = assignment(&centroids);
        if next == assign {
            break;
        }
        assign = next;
        iterations += 1;
    }

    let continuous_cost: f64 = (0..n)
        .map(|j| {
            let x = coords(j);
            let d: f64 = x
                .iter()
                .zip(&centroids[assign[j]])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            instance.points[j].weight * pow_q(d, q)
        })
        .sum();

    // snap to nearest candidates; collisions are padded with the lowest
    // unused ids so the discrete solution stays feasible
    let mut snapped: Vec<usize> = Vec::new();
    for centre in &centroids {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for i in 0..instance.num_candidates() {
            let site = match &instance.candidates[i].site {
                Site::Coords(c) => c,
                Site::Index(_) => unreachable!("euclidean instances carry coordinates"),
            };
            let d: f64 = centre
                .iter()
                .zip(site)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        if !snapped.contains(&best) {
            snapped.push(best);
        }
    }
    let mut fill = 0;
    while snapped.len() < k {
        if !snapped.contains(&fill) {
            snapped.push(fill);
        }
        fill += 1;
    }
    snapped.sort_unstable();
    let solution = assign_all(instance, &snapped)?;
    Ok(LloydOutcome {
        continuous_cost,
        snapped_cost: solution.total_cost,
        iterations,
        centroids,
        solution,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Candidate;

    fn lq(k: usize) -> ObjectiveSpec {
        ObjectiveSpec::Lq { q: 2.0, k }
    }

    #[test]
    fn line_generator_produces_the_fixture() {
        let spec = GeneratorSpec {
            kind: GeneratorKind::Line { n: 3 },
            seed: 0,
        };
        let inst = generate(&spec, lq(2)).unwrap();
        let xs: Vec<f64> = inst
            .points
            .iter()
            .map(|p| match &p.site {
                Site::Coords(v) => v[0],
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(xs, vec![0.0, 1.0, 5.0]);
    }

    #[test]
    fn uniform_cube_is_deterministic_per_seed() {
        let spec = GeneratorSpec {
            kind: GeneratorKind::UniformCube { d: 2, n: 10 },
            seed: 7,
        };
        let a = generate(&spec, lq(2)).unwrap();
        let b = generate(&spec, lq(2)).unwrap();
        assert_eq!(a, b);
        let c = generate(
            &GeneratorSpec {
                kind: GeneratorKind::UniformCube { d: 2, n: 10 },
                seed: 8,
            },
            lq(2),
        )
        .unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn zero_sigma_is_rejected() {
        let spec = GeneratorSpec {
            kind: GeneratorKind::GaussianMixture {
                d: 2,
                n: 5,
                centers: 2,
                sigma: 0.0,
            },
            seed: 1,
        };
        assert!(generate(&spec, lq(2)).is_err());
    }

    #[test]
    fn lloyd_snaps_the_centroid_to_a_candidate() {
        // points {0,0,2}, k=1: centroid 2/3, nearest candidate is 0
        let points: Vec<Point> = [0.0, 0.0, 2.0]
            .iter()
            .map(|&x| Point {
                site: Site::Coords(vec![x]),
                weight: 1.0,
            })
            .collect();
        let metric = Metric::Euclidean { dim: 1 };
        let candidates = make_candidates(&points, &metric, &CandidatePolicy::PointsAsCandidates).unwrap();
        let inst = Instance::new(points, candidates, metric, lq(1), 0).unwrap();
        let out = lloyd_baseline(&inst, 100).unwrap();
        assert!((out.centroids[0][0] - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(out.solution.open, vec![0]);
        assert_eq!(out.snapped_cost, 4.0);
    }

    #[test]
    fn converged_start_takes_zero_iterations() {
        // a single point: any start is a fixed point
        let points = vec![Point {
            site: Site::Coords(vec![3.0]),
            weight: 1.0,
        }];
        let metric = Metric::Euclidean { dim: 1 };
        let candidates = make_candidates(&points, &metric, &CandidatePolicy::PointsAsCandidates).unwrap();
        let inst = Instance::new(points, candidates, metric, lq(1), 5).unwrap();
        let out = lloyd_baseline(&inst, 100).unwrap();
        assert_eq!(out.iterations, 0);
        assert_eq!(out.snapped_cost, 0.0);
    }

    #[test]
    fn k_equal_n_on_distinct_points_costs_nothing() {
        let spec = GeneratorSpec {
            kind: GeneratorKind::UniformCube { d: 2, n: 5 },
            seed: 3,
        };
        let inst = generate(&spec, lq(5)).unwrap();
        let out = lloyd_baseline(&inst, 100).unwrap();
        assert_eq!(out.snapped_cost, 0.0);
    }

    #[test]
    fn dsampling_is_deterministic_and_feasible() {
        let spec = GeneratorSpec {
            kind: GeneratorKind::UniformCube { d: 2, n: 12 },
            seed: 11,
        };
        let inst = generate(&spec, lq(3)).unwrap();
        let a = dsampling_seed(&inst).unwrap();
        let b = dsampling_seed(&inst).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 3);
        assert!(a.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn dsampling_handles_more_centres_than_distinct_scores() {
        // all points identical: scores collapse to zero after one pick
        let points: Vec<Point> = (0..3)
            .map(|_| Point {
                site: Site::Coords(vec![1.0]),
                weight: 1.0,
            })
            .collect();
        let metric = Metric::Euclidean { dim: 1 };
        let candidates = vec![
            Candidate {
                site: Site::Coords(vec![1.0]),
                opening_cost: 0.0,
            },
            Candidate {
                site: Site::Coords(vec![2.0]),
                opening_cost: 0.0,
            },
        ];
        let inst = Instance::new(points, candidates, metric, lq(2), 0).unwrap();
        let ids = dsampling_seed(&inst).unwrap();
        assert_eq!(ids, vec![0, 1]);
    }
}
