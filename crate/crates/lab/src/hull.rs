//! Exact convex-hull classification of exponent pairs.

use conelab_core::ExponentPair;
use num_rational::Ratio;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

type Q = Ratio<i64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HullCase {
    /// No subspace of size above `q^{(d-1)/2}` lies in the cone.
    NoLargeSubspace,
    /// The cone contains a `d/2`-dimensional subspace.
    HalfDimSubspace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Location {
    Inside,
    Boundary,
    Outside,
}

impl Location {
    pub fn tag(self) -> &'static str {
        match self {
            Location::Inside => "inside",
            Location::Boundary => "boundary",
            Location::Outside => "outside",
        }
    }
}

fn pair(a: Q, b: Q) -> ExponentPair {
    ExponentPair { inv_p: a, inv_r: b }
}

pub fn p0(d: i64) -> ExponentPair {
    pair(Q::new(d - 1, d), Q::new(1, d))
}

pub fn p1(d: i64) -> ExponentPair {
    pair(Q::new(d - 1, d), Q::new(1, d - 2))
}

pub fn p2(d: i64) -> ExponentPair {
    let den = d * d - 2 * d + 2;
    pair(Q::new(d * d - 3 * d + 2, den), Q::new(d - 2, den))
}

/// Vertices in counter-clockwise order starting at the origin.
pub fn vertices(case: HullCase, d: i64) -> Vec<ExponentPair> {
    let origin = pair(Q::zero(), Q::zero());
    let top_left = pair(Q::zero(), Q::from_integer(1));
    let top_right = pair(Q::new(d - 1, d), Q::from_integer(1));
    let raw = match case {
        HullCase::NoLargeSubspace => vec![origin, top_left, top_right, p0(d)],
        HullCase::HalfDimSubspace => vec![origin, top_left, top_right, p1(d), p2(d)],
    };
    convex_hull(&raw)
}

fn cross(o: &ExponentPair, a: &ExponentPair, b: &ExponentPair) -> Q {
    (a.inv_p - o.inv_p) * (b.inv_r - o.inv_r) - (a.inv_r - o.inv_r) * (b.inv_p - o.inv_p)
}

/// Monotone-chain hull, counter-clockwise, collinear points dropped.
pub fn convex_hull(points: &[ExponentPair]) -> Vec<ExponentPair> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| (a.inv_p, a.inv_r).cmp(&(b.inv_p, b.inv_r)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<ExponentPair> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= Q::zero() {
            lower.pop();
        }
        lower.push(*p);
    }
    let mut upper: Vec<ExponentPair> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= Q::zero() {
            upper.pop();
        }
        upper.push(*p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Point-in-convex-polygon test against the counter-clockwise hull.
pub fn classify(p: &ExponentPair, hull: &[ExponentPair]) -> Location {
    let mut on_edge = false;
    for i in 0..hull.len() {
        let (a, b) = (&hull[i], &hull[(i + 1) % hull.len()]);
        let c = cross(a, b, p);
        if c < Q::zero() {
            return Location::Outside;
        }
        if c.is_zero() {
            on_edge = true;
        }
    }
    if on_edge {
        Location::Boundary
    } else {
        Location::Inside
    }
}

pub fn hull_classify(p: &ExponentPair, d: i64, case: HullCase) -> Location {
    classify(p, &vertices(case, d))
}

/// Average of the hull vertices.
pub fn centroid(case: HullCase, d: i64) -> ExponentPair {
    let v = vertices(case, d);
    let n = Q::from_integer(v.len() as i64);
    let (sp, sr) = v
        .iter()
        .fold((Q::zero(), Q::zero()), |(a, b), x| (a + x.inv_p, b + x.inv_r));
    pair(sp / n, sr / n)
}

/// Family whose ratio is expected to grow at a pair outside the hull.
pub fn witness_family(p: &ExponentPair, d: i64, case: HullCase) -> &'static str {
    let hull = vertices(case, d);
    if p.inv_p > Q::new(d - 1, d) {
        return "delta";
    }
    for i in 0..hull.len() {
        let (a, b) = (&hull[i], &hull[(i + 1) % hull.len()]);
        if cross(a, b, p) < Q::zero() {
            let is_critical_edge = case == HullCase::HalfDimSubspace
                && ((*a == p1(d) && *b == p2(d)) || (*a == p2(d) && *b == p1(d)));
            if is_critical_edge {
                return "subspace-indicator";
            }
        }
    }
    "cone-indicator"
}

/// The nine-pair grid used by default scans.
pub fn default_grid(case: HullCase, d: i64) -> Vec<ExponentPair> {
    let h = |a, b| Q::new(a, b);
    let mut grid = match case {
        HullCase::HalfDimSubspace => vec![p1(d), p2(d)],
        HullCase::NoLargeSubspace => vec![p0(d)],
    };
    grid.extend([
        pair(Q::zero(), Q::zero()),
        pair(Q::new(d - 1, d), Q::from_integer(1)),
        centroid(case, d),
        pair(h(1, 2), h(1, 2)),
        pair(Q::from_integer(1), h(1, 2)),
        pair(h(1, 2), Q::zero()),
        pair(Q::from_integer(1), Q::zero()),
    ]);
    grid
}
