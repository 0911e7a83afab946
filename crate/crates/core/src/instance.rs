//! Problem instances: data points, candidate centres, and the metric they
//! share.
//!
//! Locations are either explicit Euclidean coordinates or indices into one
//! symmetric distance matrix covering points and candidates alike. Identity
//! is always the id (position in the point or candidate list), never the
//! coordinates, so colocated points and candidates are permitted.

use crate::error::{Error, Result};
use crate::objective::ObjectiveSpec;

/// Where a point or candidate lives.
#[derive(Debug, Clone, PartialEq)]
pub enum Site {
    /// Explicit coordinates in `R^d`.
    Coords(Vec<f64>),
    /// Row/column index into the instance's distance matrix.
    Index(usize),
}

/// One data point, optionally weighted. Weight defaults to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub site: Site,
    pub weight: f64,
}

/// One candidate centre with an opening cost (used by the facility-location
/// objectives; ignored by the cardinality-constrained one).
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub site: Site,
    pub opening_cost: f64,
}

/// Distance structure shared by points and candidates.
#[derive(Debug, Clone, PartialEq)]
pub enum Metric {
    Euclidean { dim: usize },
    /// Symmetric nonnegative matrix over all `size` locations, row-major.
    Matrix { size: usize, entries: Vec<f64> },
}

impl Metric {
    pub fn is_euclidean(&self) -> bool {
        matches!(self, Metric::Euclidean { .. })
    }

    /// Euclidean dimension, if applicable.
    pub fn dim(&self) -> Option<usize> {
        match self {
            Metric::Euclidean { dim } => Some(*dim),
            Metric::Matrix { .. } => None,
        }
    }
}

/// Reference to a location by id: either a point or a candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SiteRef {
    Point(usize),
    Candidate(usize),
}

/// A complete, validated problem instance. Immutable after construction and
/// safe to share across worker threads; all mutable state lives in solutions.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub points: Vec<Point>,
    pub candidates: Vec<Candidate>,
    pub metric: Metric,
    pub objective: ObjectiveSpec,
    pub rng_seed: u64,
}

impl Instance {
    pub fn new(
        points: Vec<Point>,
        candidates: Vec<Candidate>,
        metric: Metric,
        objective: ObjectiveSpec,
        rng_seed: u64,
    ) -> Result<Self> {
        let instance = Instance {
            points,
            candidates,
            metric,
            objective,
            rng_seed,
        };
        instance.validate()?;
        Ok(instance)
    }

    /// Check every structural invariant. `new` and the file loader both call
    /// this; generators rely on it as a final gate.
    pub fn validate(&self) -> Result<()> {
        if self.points.is_empty() {
            return Err(Error::invariant("instance has no points"));
        }
        if self.candidates.is_empty() {
            return Err(Error::invariant("instance has no candidates"));
        }
        match &self.metric {
            Metric::Euclidean { dim } => {
                if *dim == 0 {
                    return Err(Error::invariant("euclidean dimension must be at least 1"));
                }
                for (j, p) in self.points.iter().enumerate() {
                    check_coords(&p.site, *dim, || format!("point {j}"))?;
                }
                for (i, c) in self.candidates.iter().enumerate() {
                    check_coords(&c.site, *dim, || format!("candidate {i}"))?;
                }
            }
            Metric::Matrix { size, entries } => {
                validate_matrix(*size, entries)?;
                for (j, p) in self.points.iter().enumerate() {
                    check_index(&p.site, *size, || format!("point {j}"))?;
                }
                for (i, c) in self.candidates.iter().enumerate() {
                    check_index(&c.site, *size, || format!("candidate {i}"))?;
                }
            }
        }
        for (j, p) in self.points.iter().enumerate() {
            if p.weight < 0.0 || !p.weight.is_finite() {
                return Err(Error::invariant(format!(
                    "point {j} has invalid weight {}",
                    p.weight
                )));
            }
        }
        for (i, c) in self.candidates.iter().enumerate() {
            if c.opening_cost < 0.0 || !c.opening_cost.is_finite() {
                return Err(Error::invariant(format!(
                    "candidate {i} has invalid opening cost {}",
                    c.opening_cost
                )));
            }
        }
        self.objective.validate(self.candidates.len())?;
        Ok(())
    }

    pub fn num_points(&self) -> usize {
        self.points.len()
    }

    pub fn num_candidates(&self) -> usize {
        self.candidates.len()
    }

    fn site(&self, r: SiteRef) -> Result<&Site> {
        match r {
            SiteRef::Point(j) => self
                .points
                .get(j)
                .map(|p| &p.site)
                .ok_or_else(|| Error::InvalidId(format!("point id {j} out of range"))),
            SiteRef::Candidate(i) => self
                .candidates
                .get(i)
                .map(|c| &c.site)
                .ok_or_else(|| Error::InvalidId(format!("candidate id {i} out of range"))),
        }
    }

    /// Distance between any two locations, validating both ids.
    pub fn distance(&self, a: SiteRef, b: SiteRef) -> Result<f64> {
        let sa = self.site(a)?;
        let sb = self.site(b)?;
        Ok(self.site_distance(sa, sb))
    }

    fn site_distance(&self, a: &Site, b: &Site) -> f64 {
        match (&self.metric, a, b) {
            (Metric::Euclidean { .. }, Site::Coords(x), Site::Coords(y)) => euclidean(x, y),
            (Metric::Matrix { size, entries }, Site::Index(u), Site::Index(v)) => {
                entries[u * size + v]
            }
            // validate() guarantees sites match the metric mode
            _ => unreachable!("site kind does not match metric mode"),
        }
    }

    /// Distance from point `j` to candidate `i`; ids must be valid.
    pub fn point_candidate_distance(&self, j: usize, i: usize) -> f64 {
        self.site_distance(&self.points[j].site, &self.candidates[i].site)
    }

    /// Distance between two candidates; ids must be valid.
    pub fn candidate_distance(&self, a: usize, b: usize) -> f64 {
        self.site_distance(&self.candidates[a].site, &self.candidates[b].site)
    }
}

fn euclidean(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

fn check_coords(site: &Site, dim: usize, what: impl Fn() -> String) -> Result<()> {
    match site {
        Site::Coords(v) if v.len() == dim => {
            if v.iter().any(|x| !x.is_finite()) {
                Err(Error::invariant(format!(
                    "{} has non-finite coordinates",
                    what()
                )))
            } else {
                Ok(())
            }
        }
        Site::Coords(v) => Err(Error::invariant(format!(
            "{} has {} coordinates, metric dimension is {dim}",
            what(),
            v.len()
        ))),
        Site::Index(_) => Err(Error::invariant(format!(
            "{} uses a matrix index under a euclidean metric",
            what()
        ))),
    }
}

fn check_index(site: &Site, size: usize, what: impl Fn() -> String) -> Result<()> {
    match site {
        Site::Index(i) if *i < size => Ok(()),
        Site::Index(i) => Err(Error::InvalidId(format!(
            "{} matrix index {i} out of range (size {size})",
            what()
        ))),
        Site::Coords(_) => Err(Error::invariant(format!(
            "{} uses coordinates under a matrix metric",
            what()
        ))),
    }
}

fn validate_matrix(size: usize, entries: &[f64]) -> Result<()> {
    if size == 0 {
        return Err(Error::invariant("distance matrix is empty"));
    }
    if entries.len() != size * size {
        return Err(Error::invariant(format!(
            "distance matrix has {} entries, expected {}",
            entries.len(),
            size * size
        )));
    }
    for u in 0..size {
        if entries[u * size + u] != 0.0 {
            return Err(Error::invariant(format!(
                "metric has nonzero diagonal at {u}"
            )));
        }
        for v in 0..size {
            let e = entries[u * size + v];
            if e < 0.0 || !e.is_finite() {
                return Err(Error::invariant(format!(
                    "metric entry ({u},{v}) = {e} is not a nonnegative real"
                )));
            }
            if e != entries[v * size + u] {
                return Err(Error::invariant("metric not symmetric".to_string()));
            }
        }
    }
    Ok(())
}

/// How to build a candidate set from a point set.
#[derive(Debug, Clone, PartialEq)]
pub enum CandidatePolicy {
    /// One candidate per distinct point location, in order of first
    /// occurrence; this is the default used by generators and the CLI.
    PointsAsCandidates,
    /// Corner points of every occupied cell of an axis-aligned grid with the
    /// given cell width. Euclidean metric only.
    Grid { resolution: f64 },
    /// Use the given candidates verbatim.
    UserSupplied(Vec<Candidate>),
}

/// Build a candidate set from `points` under `metric` per `policy`.
pub fn make_candidates(
    points: &[Point],
    metric: &Metric,
    policy: &CandidatePolicy,
) -> Result<Vec<Candidate>> {
    if points.is_empty() {
        return Err(Error::invariant("cannot derive candidates from no points"));
    }
    match policy {
        CandidatePolicy::PointsAsCandidates => {
            let mut seen: Vec<&Site> = Vec::new();
            let mut out = Vec::new();
            for p in points {
                if !seen.iter().any(|s| **s == p.site) {
                    seen.push(&p.site);
                    out.push(Candidate {
                        site: p.site.clone(),
                        opening_cost: 0.0,
                    });
                }
            }
            Ok(out)
        }
        CandidatePolicy::Grid { resolution } => {
            let dim = match metric {
                Metric::Euclidean { dim } => *dim,
                Metric::Matrix { .. } => {
                    return Err(Error::unsupported(
                        "grid candidate policy requires a euclidean metric",
                    ))
                }
            };
            if *resolution <= 0.0 || !resolution.is_finite() {
                return Err(Error::invariant(format!(
                    "grid resolution must be positive, got {resolution}"
                )));
            }
            let mut corners: Vec<Vec<i64>> = Vec::new();
            for p in points {
                let coords = match &p.site {
                    Site::Coords(c) => c,
                    Site::Index(_) => unreachable!("euclidean metric checked above"),
                };
                if coords.len() != dim {
                    return Err(Error::invariant("point dimension mismatch".to_string()));
                }
                let cell: Vec<i64> = coords.iter().map(|x| (x / resolution).floor() as i64).collect();
                // all 2^d corners of the occupied cell
                for mask in 0..(1u64 << dim) {
                    let corner: Vec<i64> = cell
                        .iter()
                        .enumerate()
                        .map(|(axis, base)| base + ((mask >> axis) & 1) as i64)
                        .collect();
                    if !corners.contains(&corner) {
                        corners.push(corner);
                    }
                }
            }
            corners.sort();
            Ok(corners
                .into_iter()
                .map(|c| Candidate {
                    site: Site::Coords(c.into_iter().map(|v| v as f64 * resolution).collect()),
                    opening_cost: 0.0,
                })
                .collect())
        }
        CandidatePolicy::UserSupplied(cands) => {
            if cands.is_empty() {
                return Err(Error::invariant("user-supplied candidate set is empty"));
            }
            Ok(cands.clone())
        }
    }
}
