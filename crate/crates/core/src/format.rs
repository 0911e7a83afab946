//! The `clusterspec v1` instance file format.
//!
//! Line-oriented UTF-8 text. `#` starts a comment line; blank lines are
//! ignored. Layout:
//!
//! ```text
//! clusterspec v1
//! metric euclidean <d>          | metric matrix <m>
//! objective lq q=<real> k=<int> | objective ufl | objective gkm k=<int>
//! seed <u64>                    # optional, defaults to 0
//! point <x1> ... <xd> [w=<weight>]      # or: point idx=<i>      (matrix)
//! candidate <x1> ... <xd> [f=<cost>]    # or: candidate idx=<i> [f=<cost>]
//! matrixrow <m reals>                   # matrix mode: m rows
//! ```
//!
//! Floats are written with Rust's shortest round-trip formatting, so
//! `load(save(instance))` reproduces the instance bit-exactly.

use crate::error::{Error, Result};
use crate::instance::{Candidate, Instance, Metric, Point, Site};
use crate::objective::ObjectiveSpec;
use std::path::Path;

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Parse an instance from text. Line numbers in errors are 1-based.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut metric: Option<Metric> = None;
    let mut objective: Option<ObjectiveSpec> = None;
    let mut seed: u64 = 0;
    let mut points: Vec<Point> = Vec::new();
    let mut candidates: Vec<Candidate> = Vec::new();
    let mut matrix_rows: Vec<Vec<f64>> = Vec::new();
    let mut saw_header = false;

    for (idx, raw) in text.lines().enumerate() {
        let ln = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !saw_header {
            if line != "clusterspec v1" {
                return Err(parse_err(ln, "expected header `clusterspec v1`"));
            }
            saw_header = true;
            continue;
        }
        let mut tokens = line.split_whitespace();
        let keyword = tokens.next().unwrap();
        let rest: Vec<&str> = tokens.collect();
        match keyword {
            "metric" => {
                if metric.is_some() {
                    return Err(parse_err(ln, "duplicate metric line"));
                }
                metric = Some(parse_metric(ln, &rest)?);
            }
            "objective" => {
                if objective.is_some() {
                    return Err(parse_err(ln, "duplicate objective line"));
                }
                objective = Some(parse_objective(ln, &rest)?);
            }
            "seed" => {
                let [value] = rest.as_slice() else {
                    return Err(parse_err(ln, "expected `seed <u64>`"));
                };
                seed = value
                    .parse()
                    .map_err(|_| parse_err(ln, format!("invalid seed `{value}`")))?;
            }
            "point" => {
                let metric = metric
                    .as_ref()
                    .ok_or_else(|| parse_err(ln, "point before metric line"))?;
                let (site, weight, extra) = parse_site_line(ln, &rest, metric, "w")?;
                if extra.is_some() {
                    return Err(parse_err(ln, "unexpected `f=` on a point line"));
                }
                points.push(Point {
                    site,
                    weight: weight.unwrap_or(1.0),
                });
            }
            "candidate" => {
                let metric = metric
                    .as_ref()
                    .ok_or_else(|| parse_err(ln, "candidate before metric line"))?;
                let (site, weight, opening) = parse_site_line(ln, &rest, metric, "f")?;
                if weight.is_some() {
                    return Err(parse_err(ln, "unexpected `w=` on a candidate line"));
                }
                candidates.push(Candidate {
                    site,
                    opening_cost: opening.unwrap_or(0.0),
                });
            }
            "matrixrow" => {
                let size = match &metric {
                    Some(Metric::Matrix { size, .. }) => *size,
                    _ => return Err(parse_err(ln, "matrixrow requires `metric matrix`")),
                };
                let row: Vec<f64> = rest
                    .iter()
                    .map(|t| {
                        t.parse::<f64>()
                            .map_err(|_| parse_err(ln, format!("invalid real `{t}`")))
                    })
                    .collect::<Result<_>>()?;
                if row.len() != size {
                    return Err(parse_err(
                        ln,
                        format!("matrixrow has {} entries, expected {size}", row.len()),
                    ));
                }
                matrix_rows.push(row);
            }
            other => return Err(parse_err(ln, format!("unknown keyword `{other}`"))),
        }
    }

    if !saw_header {
        return Err(parse_err(1, "missing header `clusterspec v1`"));
    }
    let mut metric = metric.ok_or_else(|| parse_err(1, "missing metric line"))?;
    let objective = objective.ok_or_else(|| parse_err(1, "missing objective line"))?;
    if let Metric::Matrix { size, entries } = &mut metric {
        if matrix_rows.len() != *size {
            return Err(parse_err(
                1,
                format!("expected {size} matrixrow lines, found {}", matrix_rows.len()),
            ));
        }
        *entries = matrix_rows.into_iter().flatten().collect();
    }
    Instance::new(points, candidates, metric, objective, seed)
}

fn parse_metric(ln: usize, rest: &[&str]) -> Result<Metric> {
    match rest {
        ["euclidean", d] => {
            let dim: usize = d
                .parse()
                .map_err(|_| parse_err(ln, format!("invalid dimension `{d}`")))?;
            Ok(Metric::Euclidean { dim })
        }
        ["matrix", m] => {
            let size: usize = m
                .parse()
                .map_err(|_| parse_err(ln, format!("invalid matrix size `{m}`")))?;
            Ok(Metric::Matrix {
                size,
                entries: Vec::new(),
            })
        }
        _ => Err(parse_err(
            ln,
            "expected `metric euclidean <d>` or `metric matrix <m>`",
        )),
    }
}

fn parse_objective(ln: usize, rest: &[&str]) -> Result<ObjectiveSpec> {
    let mut q: Option<f64> = None;
    let mut k: Option<usize> = None;
    let family = *rest
        .first()
        .ok_or_else(|| parse_err(ln, "missing objective family"))?;
    for tok in &rest[1..] {
        if let Some(v) = tok.strip_prefix("q=") {
            q = Some(
                v.parse()
                    .map_err(|_| parse_err(ln, format!("invalid q `{v}`")))?,
            );
        } else if let Some(v) = tok.strip_prefix("k=") {
            k = Some(
                v.parse()
                    .map_err(|_| parse_err(ln, format!("invalid k `{v}`")))?,
            );
        } else {
            return Err(parse_err(ln, format!("unexpected token `{tok}`")));
        }
    }
    match family {
        "lq" => Ok(ObjectiveSpec::Lq {
            q: q.ok_or_else(|| parse_err(ln, "objective lq requires q=<real>"))?,
            k: k.ok_or_else(|| parse_err(ln, "objective lq requires k=<int>"))?,
        }),
        "ufl" => Ok(ObjectiveSpec::Ufl),
        "gkm" => Ok(ObjectiveSpec::Gkm {
            k: k.ok_or_else(|| parse_err(ln, "objective gkm requires k=<int>"))?,
        }),
        other => Err(parse_err(ln, format!("unknown objective family `{other}`"))),
    }
}

/// Shared parser for `point` and `candidate` lines. Returns the site, the
/// `w=` value, and the `f=`/`idx`-mode extra value as applicable.
fn parse_site_line(
    ln: usize,
    rest: &[&str],
    metric: &Metric,
    extra_key: &str,
) -> Result<(Site, Option<f64>, Option<f64>)> {
    let mut weight = None;
    let mut extra = None;
    let mut coords = Vec::new();
    let mut index = None;
    for tok in rest {
        if let Some(v) = tok.strip_prefix("w=") {
            weight = Some(
                v.parse()
                    .map_err(|_| parse_err(ln, format!("invalid weight `{v}`")))?,
            );
        } else if let Some(v) = tok.strip_prefix("f=") {
            extra = Some(
                v.parse()
                    .map_err(|_| parse_err(ln, format!("invalid opening cost `{v}`")))?,
            );
        } else if let Some(v) = tok.strip_prefix("idx=") {
            index = Some(
                v.parse::<usize>()
                    .map_err(|_| parse_err(ln, format!("invalid index `{v}`")))?,
            );
        } else {
            coords.push(
                tok.parse::<f64>()
                    .map_err(|_| parse_err(ln, format!("invalid real `{tok}`")))?,
            );
        }
    }
    if extra.is_some() && extra_key != "f" {
        return Err(parse_err(ln, "unexpected `f=`"));
    }
    if weight.is_some() && extra_key != "w" {
        return Err(parse_err(ln, "unexpected `w=`"));
    }
    let site = match metric {
        Metric::Euclidean { dim } => {
            if index.is_some() {
                return Err(parse_err(ln, "idx= is only valid in matrix mode"));
            }
            if coords.len() != *dim {
                return Err(parse_err(
                    ln,
                    format!("expected {dim} coordinates, found {}", coords.len()),
                ));
            }
            Site::Coords(coords)
        }
        Metric::Matrix { .. } => {
            if !coords.is_empty() {
                return Err(parse_err(ln, "coordinates are not valid in matrix mode"));
            }
            Site::Index(index.ok_or_else(|| parse_err(ln, "expected idx=<i> in matrix mode"))?)
        }
    };
    Ok((site, weight, extra))
}

/// Render an instance back to `clusterspec v1` text.
pub fn format_instance(instance: &Instance) -> String {
    let mut out = String::from("clusterspec v1\n");
    match &instance.metric {
        Metric::Euclidean { dim } => out.push_str(&format!("metric euclidean {dim}\n")),
        Metric::Matrix { size, .. } => out.push_str(&format!("metric matrix {size}\n")),
    }
    match instance.objective {
        ObjectiveSpec::Lq { q, k } => out.push_str(&format!("objective lq q={q:?} k={k}\n")),
        ObjectiveSpec::Ufl => out.push_str("objective ufl\n"),
        ObjectiveSpec::Gkm { k } => out.push_str(&format!("objective gkm k={k}\n")),
    }
    out.push_str(&format!("seed {}\n", instance.rng_seed));
    for p in &instance.points {
        out.push_str("point");
        push_site(&mut out, &p.site);
        if p.weight != 1.0 {
            out.push_str(&format!(" w={:?}", p.weight));
        }
        out.push('\n');
    }
    for c in &instance.candidates {
        out.push_str("candidate");
        push_site(&mut out, &c.site);
        if c.opening_cost != 0.0 {
            out.push_str(&format!(" f={:?}", c.opening_cost));
        }
        out.push('\n');
    }
    if let Metric::Matrix { size, entries } = &instance.metric {
        for row in entries.chunks(*size) {
            out.push_str("matrixrow");
            for e in row {
                out.push_str(&format!(" {e:?}"));
            }
            out.push('\n');
        }
    }
    out
}

fn push_site(out: &mut String, site: &Site) {
    match site {
        Site::Coords(v) => {
            for x in v {
                out.push_str(&format!(" {x:?}"));
            }
        }
        Site::Index(i) => out.push_str(&format!(" idx={i}")),
    }
}

/// Load and validate an instance from a file.
pub fn load_instance(path: impl AsRef<Path>) -> Result<Instance> {
    let text = std::fs::read_to_string(path)?;
    parse_instance(&text)
}

/// Write an instance to a file in `clusterspec v1` format.
pub fn save_instance(instance: &Instance, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, format_instance(instance))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const LINE_FIXTURE: &str = "\
clusterspec v1
# three points on a line, candidates at the points
metric euclidean 1
objective lq q=2 k=2
point 0
point 1
point 5
candidate 0
candidate 1
candidate 5
";

    #[test]
    fn parses_the_line_fixture() {
        let inst = parse_instance(LINE_FIXTURE).unwrap();
        assert_eq!(inst.num_points(), 3);
        assert_eq!(inst.num_candidates(), 3);
        assert_eq!(inst.objective, ObjectiveSpec::Lq { q: 2.0, k: 2 });
        assert_eq!(inst.rng_seed, 0);
        // omitted weights default to 1
        assert!(inst.points.iter().all(|p| p.weight == 1.0));
    }

    #[test]
    fn asymmetric_matrix_is_rejected_by_name() {
        let text = "\
clusterspec v1
metric matrix 2
objective ufl
point idx=0
candidate idx=1 f=2
matrixrow 0 3
matrixrow 4 0
";
        let err = parse_instance(text).unwrap_err();
        assert!(err.to_string().contains("metric not symmetric"), "{err}");
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let text = "clusterspec v1\nmetric euclidean 1\nobjective lq q=2 k=1\npoint zero\ncandidate 0\n";
        match parse_instance(text).unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 4),
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let text = "\
clusterspec v1
metric euclidean 2
objective gkm k=2
seed 99
point 0.1 -3.25 w=2.5
point 1e-3 7
candidate 0.1 -3.25 f=0.125
candidate 4 4
";
        let inst = parse_instance(text).unwrap();
        let rendered = format_instance(&inst);
        let again = parse_instance(&rendered).unwrap();
        assert_eq!(inst, again);
        // and fixed point after one render
        assert_eq!(rendered, format_instance(&again));
    }

    #[test]
    fn matrix_round_trip() {
        let text = "\
clusterspec v1
metric matrix 3
objective lq q=1 k=1
point idx=0 w=2
point idx=1
candidate idx=2
matrixrow 0 1 2.5
matrixrow 1 0 1.25
matrixrow 2.5 1.25 0
";
        let inst = parse_instance(text).unwrap();
        let again = parse_instance(&format_instance(&inst)).unwrap();
        assert_eq!(inst, again);
    }
}
