//! Randomized geometric partition of the two solutions.
//!
//! Surviving centres are bucketed by the magnitude of their D-value, the
//! buckets are grouped into bands by a random shift, each band is cut by a
//! randomly offset axis-aligned grid whose cell width dwarfs the D-values in
//! the band, tether pairs split by the grid are reunited, colocated
//! duplicates and filtered-out centres are appended as their own parts, and
//! finally parts are merged into groups with equally many centres from each
//! side.

use crate::analysis::{Centre, FilterResult, PairedSolutions, Side};
use crate::error::{Error, Result};
use crate::instance::{Instance, Metric, Site};
use rand::Rng;
use serde::Serialize;
use std::collections::BTreeMap;

/// Bucket index for a positive D-value: the integer `a` with
/// `eps^-a <= D < eps^-(a+1)`. A small guard keeps values that sit exactly
/// on a bucket boundary (up to float noise) in the lower bucket.
pub fn bucket_index(d: f64, epsilon: f64) -> i64 {
    debug_assert!(d > 0.0);
    let t = d.ln() / (1.0 / epsilon).ln();
    (t + 1e-9).floor() as i64
}

/// Smallest integer at least `4 / epsilon`.
pub fn band_width(epsilon: f64) -> u32 {
    (4.0 / epsilon).ceil() as u32
}

/// Pre-merge part provenance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum PrePartKind {
    /// One grid cell of one band (after tether fixing).
    Cell { band: i64, index: Vec<i64> },
    /// A colocated duplicate pair, both D-values zero.
    ColocatedPair,
    /// A centre removed by the filtering, on its own.
    Singleton,
}

#[derive(Debug, Clone, Serialize)]
pub struct PrePart {
    pub kind: PrePartKind,
    pub members: Vec<Centre>,
}

/// One draw of the randomized partition.
#[derive(Debug, Clone, Serialize)]
pub struct PartitionSample {
    pub epsilon: f64,
    /// Buckets per band: `b`.
    pub band_width: u32,
    /// Random shift in `[0, band_width)`.
    pub shift: u32,
    /// Band index of every surviving centre with positive D-value.
    pub band_of: BTreeMap<Centre, i64>,
    /// Random grid offset per band.
    pub grid_offsets: BTreeMap<i64, Vec<f64>>,
    /// Parts before balancing, with provenance.
    pub pre_parts: Vec<PrePart>,
    /// Final parts. In balanced mode each part has equally many centres
    /// from both sides.
    pub parts: Vec<Vec<Centre>>,
    /// Per final part: the indices of the pre-parts merged into it.
    pub provenance: Vec<Vec<usize>>,
    pub balanced: bool,
}

impl PartitionSample {
    /// Final part index of every centre.
    pub fn part_of(&self) -> BTreeMap<Centre, usize> {
        let mut map = BTreeMap::new();
        for (idx, part) in self.parts.iter().enumerate() {
            for &c in part {
                map.insert(c, idx);
            }
        }
        map
    }
}

fn centre_coords(instance: &Instance, c: Centre) -> &[f64] {
    match &instance.candidates[c.cand].site {
        Site::Coords(v) => v,
        Site::Index(_) => unreachable!("partitioning is euclidean-only"),
    }
}

/// Imbalance of a part: optimal-side members minus local-side members.
fn imbalance(part: &[Centre]) -> i64 {
    part.iter()
        .map(|c| match c.side {
            Side::Opt => 1,
            Side::Loc => -1,
        })
        .sum()
}

/// Draw one partition of the paired solutions. Balancing runs whenever the
/// two sides have equal cardinality (the cardinality-constrained analyses);
/// otherwise the unbalanced parts are returned as-is.
pub fn sample_partition(
    instance: &Instance,
    paired: &PairedSolutions,
    filter: &FilterResult,
    rng: &mut impl Rng,
) -> Result<PartitionSample> {
    let Metric::Euclidean { dim } = instance.metric else {
        return Err(Error::unsupported(
            "the partition verifier requires a euclidean metric",
        ));
    };
    let epsilon = filter.epsilon;
    let b = band_width(epsilon);
    let shift = rng.gen_range(0..b);

    // bucket the survivors; zero D-values go to the colocated pool
    let mut zero_pool: Vec<Centre> = Vec::new();
    let mut band_of: BTreeMap<Centre, i64> = BTreeMap::new();
    for c in filter.survivors() {
        let d = filter.d(c);
        if d == 0.0 {
            zero_pool.push(c);
        } else {
            let a = bucket_index(d, epsilon);
            band_of.insert(c, (a - shift as i64).div_euclid(b as i64));
        }
    }

    // one random grid per nonempty band, drawn in band order
    let bands: Vec<i64> = {
        let mut v: Vec<i64> = band_of.values().copied().collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let mut grid_offsets: BTreeMap<i64, Vec<f64>> = BTreeMap::new();
    let mut widths: BTreeMap<i64, f64> = BTreeMap::new();
    for &band in &bands {
        // W = 4d * eps^(-(band+2)*b - 1), computed in logs to spot overflow
        let log_w = (4.0 * dim as f64).ln()
            + (((band + 2) * b as i64) as f64 + 1.0) * (1.0 / epsilon).ln();
        let w = if log_w > 700.0 {
            f64::INFINITY
        } else {
            log_w.exp()
        };
        widths.insert(band, w);
        let beta = if w.is_finite() && w > 0.0 {
            (0..dim).map(|_| rng.gen_range(0.0..1.0) * w).collect()
        } else {
            vec![0.0; dim]
        };
        grid_offsets.insert(band, beta);
    }

    // cells per band; keys are (band, per-axis integer index)
    let mut cells: BTreeMap<(i64, Vec<i64>), Vec<Centre>> = BTreeMap::new();
    for (&c, &band) in &band_of {
        let w = widths[&band];
        let beta = &grid_offsets[&band];
        let coords = centre_coords(instance, c);
        let index: Vec<i64> = if w == 0.0 {
            // width underflowed: every distinct location is its own cell
            coords.iter().map(|x| x.to_bits() as i64).collect()
        } else {
            coords
                .iter()
                .zip(beta)
                .map(|(x, o)| ((x - o) / w).floor() as i64)
                .collect()
        };
        cells.entry((band, index)).or_default().push(c);
    }

    // reunite tether pairs the grid separated: the optimal endpoint moves to
    // its partner's cell
    let key_of = |c: Centre, cells: &BTreeMap<(i64, Vec<i64>), Vec<Centre>>| {
        cells
            .iter()
            .find(|(_, members)| members.contains(&c))
            .map(|(k, _)| k.clone())
    };
    for &(cent_c, partner) in &filter.tether_pairs {
        if filter.d(cent_c) == 0.0 || filter.d(partner) == 0.0 {
            continue;
        }
        let from = key_of(cent_c, &cells);
        let to = key_of(partner, &cells);
        if let (Some(from), Some(to)) = (from, to) {
            if from != to {
                let members = cells.get_mut(&from).expect("key exists");
                members.retain(|&m| m != cent_c);
                if members.is_empty() {
                    cells.remove(&from);
                }
                cells.get_mut(&to).expect("key exists").push(cent_c);
            }
        }
    }

    let mut pre_parts: Vec<PrePart> = Vec::new();
    for ((band, index), mut members) in cells {
        members.sort();
        pre_parts.push(PrePart {
            kind: PrePartKind::Cell { band, index },
            members,
        });
    }

    // colocated duplicates pair up by exact location; the filtering keeps at
    // most one survivor per side at a shared location
    let mut by_location: BTreeMap<Vec<u64>, (Vec<Centre>, Vec<Centre>)> = BTreeMap::new();
    for c in zero_pool {
        let key: Vec<u64> = centre_coords(instance, c).iter().map(|x| x.to_bits()).collect();
        let slot = by_location.entry(key).or_default();
        match c.side {
            Side::Opt => slot.0.push(c),
            Side::Loc => slot.1.push(c),
        }
    }
    let mut stragglers: Vec<Centre> = Vec::new();
    for (_, (mut opts, mut locs)) in by_location {
        opts.sort();
        locs.sort();
        while let (Some(o), Some(s)) = (opts.pop(), locs.pop()) {
            pre_parts.push(PrePart {
                kind: PrePartKind::ColocatedPair,
                members: vec![o, s],
            });
        }
        stragglers.extend(opts);
        stragglers.extend(locs);
    }

    // filtered-out centres (and any unpaired zero-D survivor) stand alone
    let mut singles: Vec<Centre> = paired
        .centres()
        .into_iter()
        .filter(|&c| !filter.is_survivor(c))
        .collect();
    singles.extend(stragglers);
    singles.sort();
    for c in singles {
        pre_parts.push(PrePart {
            kind: PrePartKind::Singleton,
            members: vec![c],
        });
    }

    let balanced = paired.balanced();
    let (parts, provenance) = if balanced {
        let sets: Vec<Vec<Centre>> = pre_parts.iter().map(|p| p.members.clone()).collect();
        let cap = sets.iter().map(|s| s.len()).max().unwrap_or(1).max(1);
        let groups = balance_parts(&sets, cap)?;
        let parts: Vec<Vec<Centre>> = groups
            .iter()
            .map(|g| {
                let mut merged: Vec<Centre> =
                    g.iter().flat_map(|&i| sets[i].iter().copied()).collect();
                merged.sort();
                merged
            })
            .collect();
        (parts, groups)
    } else {
        let provenance = (0..pre_parts.len()).map(|i| vec![i]).collect();
        (
            pre_parts.iter().map(|p| p.members.clone()).collect(),
            provenance,
        )
    };

    Ok(PartitionSample {
        epsilon,
        band_width: b,
        shift,
        band_of,
        grid_offsets,
        pre_parts,
        parts,
        provenance,
        balanced,
    })
}

/// Merge parts into groups of zero imbalance, each a union of at most
/// `2 * cap^3` parts. Mirrors the constructive argument: zero-imbalance
/// parts stand alone; if either sign has at most `cap^2` parts the whole
/// remainder is one group; otherwise some positive value x and negative
/// value y both have at least `cap` parts, and y parts of the former cancel
/// x parts of the latter.
///
/// `cap` must bound every part's size. Returns groups as index lists into
/// `parts`.
pub fn balance_parts(parts: &[Vec<Centre>], cap: usize) -> Result<Vec<Vec<usize>>> {
    let mu: Vec<i64> = parts.iter().map(|p| imbalance(p)).collect();
    for (i, p) in parts.iter().enumerate() {
        if p.len() > cap {
            return Err(Error::invariant(format!(
                "part {i} has {} members, exceeding the cap {cap}",
                p.len()
            )));
        }
    }
    if mu.iter().sum::<i64>() != 0 {
        return Err(Error::invariant(
            "total imbalance is nonzero; the sides cannot be balanced",
        ));
    }

    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut remaining: Vec<usize> = Vec::new();
    for (i, &m) in mu.iter().enumerate() {
        if m == 0 {
            groups.push(vec![i]);
        } else {
            remaining.push(i);
        }
    }

    let cap_sq = cap.saturating_mul(cap);
    while !remaining.is_empty() {
        let pos: usize = remaining.iter().filter(|&&i| mu[i] > 0).count();
        let neg = remaining.len() - pos;
        if pos <= cap_sq || neg <= cap_sq {
            groups.push(std::mem::take(&mut remaining));
            break;
        }
        // bucket by imbalance value and find saturated values on both sides
        let mut buckets: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        for &i in &remaining {
            buckets.entry(mu[i]).or_default().push(i);
        }
        let x = buckets
            .iter()
            .find(|(v, idxs)| **v > 0 && idxs.len() >= cap)
            .map(|(v, _)| *v)
            .expect("a positive value has at least cap parts by pigeonhole");
        let y = buckets
            .iter()
            .find(|(v, idxs)| **v < 0 && idxs.len() >= cap)
            .map(|(v, _)| -*v)
            .expect("a negative value has at least cap parts by pigeonhole");
        let mut group: Vec<usize> = Vec::with_capacity((x + y) as usize);
        group.extend(buckets[&x].iter().take(y as usize));
        group.extend(buckets[&-y].iter().take(x as usize));
        remaining.retain(|i| !group.contains(i));
        groups.push(group);
    }
    Ok(groups)
}
