//! Rate tuples, Pareto frontiers and 2-D time-sharing hulls.
//!
//! A [`Region`] stands for the downward closure of its frontier: a tuple is
//! achievable iff some frontier point dominates it on the active
//! coordinates. Regions produced by [`convexify_2d`] instead stand for the
//! convex hull of that closure.

use std::cmp::Ordering;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coordinates closer than this are treated as equal when deduplicating.
pub const DEDUP_TOL: f64 = 1e-12;

const COLUMN_NAMES: [&str; 4] = ["R1", "R2", "Re1", "Re2"];

/// Where a point came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointMeta {
    /// Power-split parameter of a Gaussian sweep.
    Alpha(f64),
    /// Index of the evaluated candidate in a distribution search.
    Candidate(u64),
}

/// `(R1, R2, Re1, Re2)` in bits per channel use.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    pub r1: f64,
    pub r2: f64,
    pub re1: f64,
    pub re2: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<PointMeta>,
}

impl RatePoint {
    pub fn new(r1: f64, r2: f64, re1: f64, re2: f64) -> Self {
        RatePoint {
            r1,
            r2,
            re1,
            re2,
            meta: None,
        }
    }

    pub fn with_meta(mut self, meta: PointMeta) -> Self {
        self.meta = Some(meta);
        self
    }

    pub fn coords(&self) -> [f64; 4] {
        [self.r1, self.r2, self.re1, self.re2]
    }

    fn from_coords(c: [f64; 4], meta: Option<PointMeta>) -> Self {
        RatePoint {
            r1: c[0],
            r2: c[1],
            re1: c[2],
            re2: c[3],
            meta,
        }
    }

    /// Checks nonnegativity, finiteness and `Re <= R`.
    pub fn is_valid(&self) -> bool {
        self.coords().iter().all(|c| c.is_finite() && *c >= 0.0)
            && self.re1 <= self.r1 + 1e-9
            && self.re2 <= self.r2 + 1e-9
    }
}

/// Active coordinates of a region, in `(R1, R2, Re1, Re2)` order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dims(pub [bool; 4]);

impl Dims {
    pub const ALL: Dims = Dims([true; 4]);
    /// `(R1, R2, Re1)`: no secrecy requirement on the primary message.
    pub const NO_RE2: Dims = Dims([true, true, true, false]);
    /// `(R1, R2)` only.
    pub const RATES: Dims = Dims([true, true, false, false]);

    pub fn count(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn active(&self) -> impl Iterator<Item = usize> + '_ {
        (0..4).filter(move |&i| self.0[i])
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.active().map(|i| COLUMN_NAMES[i]).collect()
    }
}

/// A finite antichain of rate points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub frontier: Vec<RatePoint>,
    pub dims: Dims,
    /// Frontier lists the vertices of a 2-D time-sharing hull.
    #[serde(default)]
    pub hull: bool,
}

impl Region {
    pub fn empty(dims: Dims) -> Self {
        Region {
            frontier: Vec::new(),
            dims,
            hull: false,
        }
    }

    pub fn len(&self) -> usize {
        self.frontier.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frontier.is_empty()
    }

    /// Largest value of coordinate `i` over the frontier (0 when empty).
    pub fn max_coord(&self, i: usize) -> f64 {
        self.frontier
            .iter()
            .map(|p| p.coords()[i])
            .fold(0.0, f64::max)
    }
}

/// `p >= q` componentwise on the active coordinates.
pub fn dominates(p: &RatePoint, q: &RatePoint, dims: Dims) -> bool {
    let (a, b) = (p.coords(), q.coords());
    dims.active().all(|i| a[i] >= b[i])
}

fn lex_desc(a: &[f64; 4], b: &[f64; 4]) -> Ordering {
    for i in 0..4 {
        match b[i].total_cmp(&a[i]) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

fn project(p: &RatePoint, dims: Dims) -> RatePoint {
    let mut c = p.coords();
    for (i, x) in c.iter_mut().enumerate() {
        if !dims.0[i] {
            *x = 0.0;
        }
    }
    RatePoint::from_coords(c, p.meta.clone())
}

/// Maximal antichain of `points` on `dims`; inactive coordinates are zeroed.
///
/// The output is sorted lexicographically descending. Among points equal
/// within [`DEDUP_TOL`] the earliest in that order is kept.
pub fn pareto_filter(points: impl IntoIterator<Item = RatePoint>, dims: Dims) -> Region {
    let mut pts: Vec<RatePoint> = points.into_iter().map(|p| project(&p, dims)).collect();
    pts.sort_by(|a, b| lex_desc(&a.coords(), &b.coords()));
    let mut kept: Vec<RatePoint> = Vec::new();
    for p in pts {
        let c = p.coords();
        let covered = kept.iter().any(|q| {
            let d = q.coords();
            dims.active().all(|i| d[i] >= c[i] - DEDUP_TOL)
        });
        if !covered {
            kept.push(p);
        }
    }
    Region {
        frontier: kept,
        dims,
        hull: false,
    }
}

/// Frontier of the union of two regions.
pub fn merge(a: &Region, b: &Region) -> Region {
    pareto_filter(a.frontier.iter().chain(&b.frontier).cloned(), a.dims)
}

/// Restricts a region to fewer active coordinates.
pub fn project_region(region: &Region, dims: Dims) -> Region {
    pareto_filter(region.frontier.iter().cloned(), dims)
}

/// True iff `p` lies in the region after relaxing every coordinate by `tol`.
pub fn contains_point(region: &Region, p: &RatePoint, tol: f64) -> bool {
    if region.hull {
        return hull_contains(region, p, tol);
    }
    let c = p.coords();
    region.frontier.iter().any(|q| {
        let d = q.coords();
        region.dims.active().all(|i| d[i] + tol >= c[i])
    })
}

/// Fraction of `a`'s frontier points contained in `b` (1 for empty `a`).
pub fn inclusion_fraction(a: &Region, b: &Region, tol: f64) -> f64 {
    if a.frontier.is_empty() {
        return 1.0;
    }
    let hits = a
        .frontier
        .iter()
        .filter(|p| contains_point(b, p, tol))
        .count();
    hits as f64 / a.frontier.len() as f64
}

fn active_pair(dims: Dims) -> Result<(usize, usize)> {
    let active: Vec<usize> = dims.active().collect();
    match active.as_slice() {
        &[x, y] => Ok((x, y)),
        _ => Err(Error::WrongDimensionality {
            expected: 2,
            found: active.len(),
        }),
    }
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Upper boundary of the hull, anchored on both axes, left to right.
fn hull_boundary(region: &Region, x: usize, y: usize) -> Vec<((f64, f64), Option<usize>)> {
    let mut pts: Vec<((f64, f64), Option<usize>)> = region
        .frontier
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let c = p.coords();
            ((c[x], c[y]), Some(k))
        })
        .collect();
    let xmax = pts.iter().map(|(p, _)| p.0).fold(0.0, f64::max);
    let ymax = pts.iter().map(|(p, _)| p.1).fold(0.0, f64::max);
    pts.push(((0.0, ymax), None));
    pts.push(((xmax, 0.0), None));
    pts.sort_by(|a, b| {
        a.0 .0
            .total_cmp(&b.0 .0)
            .then(b.0 .1.total_cmp(&a.0 .1))
            // real points win ties against anchors
            .then(b.1.is_some().cmp(&a.1.is_some()))
    });
    pts.dedup_by(|b, a| (a.0 .0 - b.0 .0).abs() <= DEDUP_TOL && (a.0 .1 - b.0 .1).abs() <= DEDUP_TOL);
    let mut chain: Vec<((f64, f64), Option<usize>)> = Vec::new();
    for p in pts {
        while chain.len() >= 2 {
            let o = chain[chain.len() - 2].0;
            let a = chain[chain.len() - 1].0;
            if cross(o, a, p.0) >= -DEDUP_TOL * DEDUP_TOL {
                chain.pop();
            } else {
                break;
            }
        }
        chain.push(p);
    }
    chain
}

/// Concave majorant of a 2-D region's downward closure, i.e. the region
/// reachable by time sharing between frontier points.
pub fn convexify_2d(region: &Region) -> Result<Region> {
    let (x, y) = active_pair(region.dims)?;
    let filtered = pareto_filter(region.frontier.iter().cloned(), region.dims);
    let chain = hull_boundary(&filtered, x, y);
    let frontier: Vec<RatePoint> = chain
        .iter()
        .filter_map(|(_, k)| k.map(|k| filtered.frontier[k].clone()))
        .collect();
    let mut out = pareto_filter(frontier, region.dims);
    out.hull = true;
    Ok(out)
}

fn hull_contains(region: &Region, p: &RatePoint, tol: f64) -> bool {
    let Ok((x, y)) = active_pair(region.dims) else {
        return false;
    };
    let c = p.coords();
    let (px, py) = (c[x] - tol, c[y] - tol);
    let chain = hull_boundary(region, x, y);
    let xmax = chain.last().map(|(q, _)| q.0).unwrap_or(0.0);
    if px > xmax {
        return false;
    }
    if px <= 0.0 {
        return py <= chain.first().map(|(q, _)| q.1).unwrap_or(0.0);
    }
    for w in chain.windows(2) {
        let (a, b) = (w[0].0, w[1].0);
        if px >= a.0 && px <= b.0 {
            let t = if b.0 > a.0 { (px - a.0) / (b.0 - a.0) } else { 0.0 };
            let yb = a.1 + t * (b.1 - a.1);
            return py <= yb.max(if b.0 > a.0 { f64::NEG_INFINITY } else { a.1.max(b.1) });
        }
    }
    false
}

/// CSV text: header of active column names, 9 decimals, rows sorted
/// lexicographically descending.
pub fn to_csv(region: &Region) -> String {
    let active: Vec<usize> = region.dims.active().collect();
    let mut rows: Vec<[f64; 4]> = region.frontier.iter().map(|p| p.coords()).collect();
    rows.sort_by(lex_desc);
    let mut out = region.dims.names().join(",");
    out.push('\n');
    for r in rows {
        let cells: Vec<String> = active.iter().map(|&i| format!("{:.9}", r[i])).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

pub fn export_csv(region: &Region, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, to_csv(region))?;
    Ok(())
}

/// Parses [`to_csv`] output back into a region (metadata is not stored in CSV).
pub fn from_csv(text: &str) -> Result<Region> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::Csv("missing header".into()))?;
    let mut cols = Vec::new();
    for name in header.split(',') {
        let i = COLUMN_NAMES
            .iter()
            .position(|c| *c == name.trim())
            .ok_or_else(|| Error::Csv(format!("unknown column `{name}`")))?;
        cols.push(i);
    }
    let mut dims = [false; 4];
    for &i in &cols {
        dims[i] = true;
    }
    let mut frontier = Vec::new();
    for (ln, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let mut c = [0.0; 4];
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != cols.len() {
            return Err(Error::Csv(format!("row {} has {} cells", ln + 2, cells.len())));
        }
        for (&i, cell) in cols.iter().zip(cells) {
            c[i] = cell
                .trim()
                .parse()
                .map_err(|e| Error::Csv(format!("row {}: {e}", ln + 2)))?;
        }
        frontier.push(RatePoint::from_coords(c, None));
    }
    Ok(Region {
        frontier,
        dims: Dims(dims),
        hull: false,
    })
}

pub fn import_csv(path: impl AsRef<Path>) -> Result<Region> {
    from_csv(&std::fs::read_to_string(path)?)
}

/// Frontier metadata keyed by CSV row index.
pub fn metadata_json(region: &Region) -> serde_json::Value {
    let mut sorted: Vec<&RatePoint> = region.frontier.iter().collect();
    sorted.sort_by(|a, b| lex_desc(&a.coords(), &b.coords()));
    let map: serde_json::Map<String, serde_json::Value> = sorted
        .iter()
        .enumerate()
        .map(|(i, p)| {
            (
                i.to_string(),
                serde_json::to_value(&p.meta).unwrap_or(serde_json::Value::Null),
            )
        })
        .collect();
    serde_json::Value::Object(map)
}
