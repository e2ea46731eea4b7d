//! Free space of one edge pair and the generator representation of the
//! reachable part of a cell.
//!
//! A cell is parameterized by `x` along the target edge and `y` along the
//! base edge. Its free region `F` (points at distance at most the radius) is
//! convex. A generator describes the seed `F ∩ {y_lo ≤ y ≤ y_hi, x ≥ x_cap}`
//! and stands for everything in `F` above and to the right of its seed.

use serde::{Deserialize, Serialize};

use crate::geometry::{
    param_error, seg_disk_interval, GeometryError, Point2, PolygonalCurve, Segment,
};
use crate::scalar::{clamp, Scalar};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeCell<S> {
    pub i: usize,
    pub j: usize,
    pub delta: S,
    target: Segment<S>,
    base: Segment<S>,
    /// y-extent of F, if non-empty.
    y_extent: Option<(S, S)>,
    tol: S,
}

fn hull<S: Scalar>(a: Option<(S, S)>, b: Option<(S, S)>) -> Option<(S, S)> {
    match (a, b) {
        (Some((a0, a1)), Some((b0, b1))) => Some((a0.min(b0), a1.max(b1))),
        (x, None) | (None, x) => x,
    }
}

/// `{y ∈ [lo, hi] : c_lo ≤ k0 + k1·y ≤ c_hi}`.
fn linear_interval<S: Scalar>(k0: S, k1: S, c_lo: S, c_hi: S, lo: S, hi: S) -> Option<(S, S)> {
    if k1 == S::zero() {
        return (k0 >= c_lo && k0 <= c_hi).then_some((lo, hi));
    }
    let y0 = (c_lo - k0) / k1;
    let y1 = (c_hi - k0) / k1;
    let (a, b) = (y0.min(y1).max(lo), y0.max(y1).min(hi));
    (a <= b).then_some((a, b))
}

/// Parameters of `line` within distance `r` of the segment `core`
/// (line ∩ capsule), clipped to `[0, 1]`.
fn capsule_interval<S: Scalar>(line: &Segment<S>, core: &Segment<S>, r: S) -> Option<(S, S)> {
    let (z, o) = (S::zero(), S::one());
    let d = line.dir();
    let mut out = hull(
        seg_disk_interval(line.a, d, core.a, r, z, o),
        seg_disk_interval(line.a, d, core.b, r, z, o),
    );
    let cd = core.dir();
    let len2 = cd.norm2();
    if len2 > z {
        let len = len2.sqrt();
        let w = line.a - core.a;
        // Projection parameter along the core and signed offset from its line.
        let (t0, t1) = (w.dot(cd) / len2, d.dot(cd) / len2);
        let (p0, p1) = (cd.cross(w) / len, cd.cross(d) / len);
        if let Some((a, b)) = linear_interval(t0, t1, z, o, z, o) {
            out = hull(out, linear_interval(p0, p1, -r, r, a, b));
        }
    }
    out
}

impl<S: Scalar> FreeCell<S> {
    pub fn new(target: Segment<S>, base: Segment<S>, i: usize, j: usize, delta: S) -> Self {
        let scale = target
            .a
            .max_abs()
            .max(target.b.max_abs())
            .max(base.a.max_abs())
            .max(base.b.max_abs());
        let tol = S::lit(64.0) * S::epsilon() * (scale + delta + S::one());
        let y_extent = capsule_interval(&base, &target, delta + tol);
        Self {
            i,
            j,
            delta,
            target,
            base,
            y_extent,
            tol,
        }
    }

    pub fn target_edge(&self) -> &Segment<S> {
        &self.target
    }

    pub fn base_edge(&self) -> &Segment<S> {
        &self.base
    }

    pub fn is_empty(&self) -> bool {
        self.y_extent.is_none()
    }

    pub fn y_extent(&self) -> Option<(S, S)> {
        self.y_extent
    }

    pub fn distance(&self, x: S, y: S) -> S {
        self.target.at(x).dist(self.base.at(y))
    }

    /// Membership in F with the floating tolerance of the cell.
    pub fn contains(&self, x: S, y: S) -> bool {
        self.distance(x, y) <= self.delta + self.tol
    }

    // Range queries use the same tolerance as `contains`, so tangent
    // points found by one query are visible to the others.

    /// `{x : (x, y) ∈ F}`.
    pub fn x_range_at(&self, y: S) -> Option<(S, S)> {
        let t = &self.target;
        seg_disk_interval(
            t.a,
            t.dir(),
            self.base.at(y),
            self.delta + self.tol,
            S::zero(),
            S::one(),
        )
    }

    /// `{y : (x, y) ∈ F}`.
    pub fn y_range_at(&self, x: S) -> Option<(S, S)> {
        let b = &self.base;
        seg_disk_interval(
            b.a,
            b.dir(),
            self.target.at(x),
            self.delta + self.tol,
            S::zero(),
            S::one(),
        )
    }

    /// y-projection of `F ∩ {x0 ≤ x ≤ x1}`.
    pub fn y_range_in_strip(&self, x0: S, x1: S) -> Option<(S, S)> {
        let (x0, x1) = (
            clamp(x0, S::zero(), S::one()),
            clamp(x1, S::zero(), S::one()),
        );
        if x0 > x1 || self.is_empty() {
            return None;
        }
        capsule_interval(&self.base, &self.target.sub(x0, x1), self.delta + self.tol)
    }

    /// x-projection of `F ∩ {y0 ≤ y ≤ y1}`.
    pub fn x_range_in_strip(&self, y0: S, y1: S) -> Option<(S, S)> {
        let (y0, y1) = (
            clamp(y0, S::zero(), S::one()),
            clamp(y1, S::zero(), S::one()),
        );
        if y0 > y1 || self.is_empty() {
            return None;
        }
        capsule_interval(&self.target, &self.base.sub(y0, y1), self.delta + self.tol)
    }

    /// Whether F meets the box, via the distance between the two
    /// sub-segments the box selects.
    pub fn box_hits_free(&self, x_min: S, x_max: S, y_min: S, y_max: S) -> bool {
        if x_min > x_max || y_min > y_max || self.is_empty() {
            return false;
        }
        let (z, o) = (S::zero(), S::one());
        let (x0, x1) = (clamp(x_min, z, o), clamp(x_max, z, o));
        let (y0, y1) = (clamp(y_min, z, o), clamp(y_max, z, o));
        if x_min > o || x_max < z || y_min > o || y_max < z {
            return false;
        }
        self.target
            .sub(x0, x1)
            .dist_to_segment(&self.base.sub(y0, y1))
            <= self.delta + self.tol
    }

    // Per-generator queries. Every region below is Q(seed) ∩ F.

    fn cap(g: &ReachGenerator<S>) -> S {
        g.x_cap.max(S::zero())
    }

    /// The seed's y-range restricted to F, if the seed is non-empty.
    fn seed_rows(&self, g: &ReachGenerator<S>) -> Option<(S, S)> {
        let (ys0, ys1) = self.y_range_in_strip(Self::cap(g), S::one())?;
        let (a, b) = (g.y_lo.max(ys0), g.y_hi.min(ys1));
        (a <= b).then_some((a, b))
    }

    pub fn seed_nonempty(&self, g: &ReachGenerator<S>) -> bool {
        g.y_lo <= g.y_hi && Self::cap(g) <= S::one() && self.seed_rows(g).is_some()
    }

    pub fn member(&self, g: &ReachGenerator<S>, x: S, y: S) -> bool {
        self.contains(x, y) && self.box_hits_free(Self::cap(g), x, g.y_lo, g.y_hi.min(y))
    }

    /// Reachable part of the right side (x = 1).
    pub fn right_interval(&self, g: &ReachGenerator<S>) -> Option<(S, S)> {
        let (ys0, ys1) = self.y_range_in_strip(Self::cap(g), S::one())?;
        if g.y_lo.max(ys0) > g.y_hi.min(ys1) {
            return None;
        }
        let (r0, r1) = self.y_range_at(S::one())?;
        let lo = r0.max(ys0).max(g.y_lo);
        (lo <= r1).then_some((lo, r1))
    }

    /// Reachable part of the top side (y = 1).
    pub fn top_interval(&self, g: &ReachGenerator<S>) -> Option<(S, S)> {
        let cap = Self::cap(g);
        let (xs0, xs1) = self.x_range_in_strip(g.y_lo, g.y_hi)?;
        if xs0.max(cap) > xs1 {
            return None;
        }
        let (t0, t1) = self.x_range_at(S::one())?;
        let lo = t0.max(xs0).max(cap);
        (lo <= t1).then_some((lo, t1))
    }

    /// Leftmost point of the region; ties resolve to the smaller y.
    pub fn leftmost(&self, g: &ReachGenerator<S>) -> Option<(S, S)> {
        let cap = Self::cap(g);
        let (xs0, xs1) = self.x_range_in_strip(g.y_lo, g.y_hi)?;
        let x = xs0.max(cap);
        if x > xs1 {
            return None;
        }
        let y0 = self
            .y_range_at(x)
            .map_or_else(|| self.base.closest_param(self.target.at(x)), |r| r.0);
        Some((x, y0.max(g.y_lo).min(S::one())))
    }

    /// Rightmost x of the region together with a height attaining it.
    pub fn rightmost(&self, g: &ReachGenerator<S>) -> Option<(S, S)> {
        let (y_bot, y_top) = self.projection(g)?;
        let (_, x) = self.x_range_in_strip(y_bot, y_top)?;
        // At a tangency the row query can miss by rounding.
        let y0 = self
            .y_range_at(x)
            .map_or_else(|| self.base.closest_param(self.target.at(x)), |r| r.0);
        Some((x, clamp(y0, y_bot, y_top)))
    }

    /// y-projection of the region: one interval.
    pub fn projection(&self, g: &ReachGenerator<S>) -> Option<(S, S)> {
        let cap = Self::cap(g);
        let (ys0, ys1) = self.y_range_in_strip(cap, S::one())?;
        let y_bot = g.y_lo.max(ys0);
        if y_bot > g.y_hi.min(ys1) {
            return None;
        }
        let (_, fy1) = self.y_extent?;
        let reach = |y: S| match self.x_range_at(y) {
            Some((_, xr)) => xr >= cap && self.box_hits_free(cap, xr, g.y_lo, g.y_hi.min(y)),
            None => false,
        };
        if reach(fy1) {
            return Some((y_bot, fy1));
        }
        let (mut good, mut bad) = (y_bot, fy1);
        for _ in 0..64 {
            let mid = (good + bad) * S::lit(0.5);
            if reach(mid) {
                good = mid;
            } else {
                bad = mid;
            }
            if bad - good <= S::epsilon() {
                break;
            }
        }
        Some((y_bot, good))
    }

    /// A seed point at or below-left of `q` (which must be a member),
    /// chosen away from the seed's boundary where possible.
    pub fn seed_point_below(&self, g: &ReachGenerator<S>, q: (S, S)) -> Option<(S, S)> {
        let cap = Self::cap(g);
        let (qx, qy) = q;
        let y_top = g.y_hi.min(qy);
        let tangent = || {
            let y = clamp(qy, g.y_lo, g.y_hi);
            let x = self.target.closest_param(self.base.at(y)).max(cap).min(qx);
            Some((x, y))
        };
        let Some((ylo, yhi)) = self.y_range_in_strip(cap, qx) else {
            return tangent();
        };
        let (a, b) = (g.y_lo.max(ylo), y_top.min(yhi));
        if a > b {
            return tangent();
        }
        for y in [(a + b) * S::lit(0.5), a, b] {
            if let Some((x0, x1)) = self.x_range_at(y) {
                let (l, r) = (x0.max(cap), x1.min(qx));
                if l <= r {
                    return Some(((l + r) * S::lit(0.5), y));
                }
            }
        }
        tangent()
    }
}

/// Free space of target edge `i` against base edge `j`.
pub fn cell_free_space<S: Scalar>(
    t: &PolygonalCurve<S>,
    b: &PolygonalCurve<S>,
    i: usize,
    j: usize,
    delta: S,
) -> Result<FreeCell<S>, GeometryError> {
    if i >= t.num_edges() {
        return Err(GeometryError::InvalidLocation {
            edge: i,
            edges: t.num_edges(),
        });
    }
    if j >= b.num_edges() {
        return Err(GeometryError::InvalidLocation {
            edge: j,
            edges: b.num_edges(),
        });
    }
    if !(delta >= S::zero()) {
        return Err(param_error("delta", "non-negative", delta.as_f64()));
    }
    Ok(FreeCell::new(t.edge(i), b.edge(j), i, j, delta))
}

/// Seed `F ∩ {y_lo ≤ y ≤ y_hi, x ≥ x_cap}` of a reachable fragment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReachGenerator<S> {
    pub y_lo: S,
    pub y_hi: S,
    pub x_cap: S,
}

impl<S: Scalar> ReachGenerator<S> {
    pub fn new(y_lo: S, y_hi: S, x_cap: S) -> Self {
        Self { y_lo, y_hi, x_cap }
    }

    pub fn point(x: S, y: S) -> Self {
        Self::new(y, y, x)
    }

    /// Horizontal band with no x restriction.
    pub fn slab(y_lo: S, y_hi: S) -> Self {
        Self::new(y_lo, y_hi, S::neg_infinity())
    }

    /// Everything right of `x`.
    pub fn halfplane(x: S) -> Self {
        Self::new(S::zero(), S::one(), x)
    }

    pub fn full() -> Self {
        Self::new(S::zero(), S::one(), S::neg_infinity())
    }

    /// Whether this generator's region contains `other`'s.
    pub fn dominates(&self, other: &Self) -> bool {
        self.y_lo <= other.y_lo
            && self.y_hi >= other.y_hi
            && self.x_cap.max(S::zero()) <= other.x_cap.max(S::zero())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Left,
    Bottom,
    Right,
    Top,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryInterval<S> {
    pub side: Side,
    pub range: Option<(S, S)>,
}

impl<S: Scalar> BoundaryInterval<S> {
    pub fn empty(side: Side) -> Self {
        Self { side, range: None }
    }

    pub fn is_empty(&self) -> bool {
        self.range.is_none()
    }

    pub fn lo(&self) -> Option<S> {
        self.range.map(|r| r.0)
    }

    pub fn hi(&self) -> Option<S> {
        self.range.map(|r| r.1)
    }
}

#[derive(Debug, Clone)]
pub struct ReachableSet<'a, S> {
    pub cell: &'a FreeCell<S>,
    pub generators: Vec<ReachGenerator<S>>,
}

impl<'a, S: Scalar> ReachableSet<'a, S> {
    pub fn new(cell: &'a FreeCell<S>) -> Self {
        Self {
            cell,
            generators: Vec::new(),
        }
    }

    pub fn with(cell: &'a FreeCell<S>, generators: Vec<ReachGenerator<S>>) -> Self {
        Self { cell, generators }
    }

    /// Adds `g` unless it is empty or dominated; returns whether it was kept.
    pub fn push(&mut self, g: ReachGenerator<S>) -> bool {
        if !self.cell.seed_nonempty(&g) || self.generators.iter().any(|h| h.dominates(&g)) {
            return false;
        }
        self.generators.push(g);
        true
    }

    pub fn is_empty(&self) -> bool {
        self.generators.iter().all(|g| !self.cell.seed_nonempty(g))
    }
}

pub fn reach_membership<S: Scalar>(set: &ReachableSet<'_, S>, q: (S, S)) -> bool {
    set.generators.iter().any(|g| set.cell.member(g, q.0, q.1))
}

fn union_lo<S: Scalar>(parts: impl Iterator<Item = Option<(S, S)>>) -> Option<(S, S)> {
    parts
        .flatten()
        .fold(None, |acc, (a, b)| hull(acc, Some((a, b))))
}

/// Reachable parts of the right and top sides. Each is one interval since
/// the region is convex-closed upward and rightward inside a convex F.
pub fn outgoing_intervals<S: Scalar>(
    set: &ReachableSet<'_, S>,
) -> (BoundaryInterval<S>, BoundaryInterval<S>) {
    let right = union_lo(set.generators.iter().map(|g| set.cell.right_interval(g)));
    let top = union_lo(set.generators.iter().map(|g| set.cell.top_interval(g)));
    (
        BoundaryInterval {
            side: Side::Right,
            range: right,
        },
        BoundaryInterval {
            side: Side::Top,
            range: top,
        },
    )
}

/// Merges overlapping intervals and drops the ones shorter than `min_len`.
pub fn merge_intervals<S: Scalar>(mut v: Vec<(S, S)>, min_len: S) -> Vec<(S, S)> {
    v.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut out: Vec<(S, S)> = Vec::new();
    for (a, b) in v {
        match out.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out.retain(|(a, b)| *b - *a >= min_len);
    out
}

/// y-projection of the reachable region onto the base edge.
pub fn project_to_base_edge<S: Scalar>(set: &ReachableSet<'_, S>) -> Vec<(S, S)> {
    let parts: Vec<(S, S)> = set
        .generators
        .iter()
        .filter_map(|g| set.cell.projection(g))
        .collect();
    merge_intervals(parts, S::zero())
}

/// Point of segment `e` for a cell-local parameter; convenience for callers
/// mapping y back to the plane.
pub fn base_point<S: Scalar>(cell: &FreeCell<S>, y: S) -> Point2<S> {
    cell.base_edge().at(y)
}
