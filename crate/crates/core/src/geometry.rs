//! Planar primitives, polygonal curves and the Fréchet kernels shared by the
//! deciders.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{clamp, Scalar};
use crate::stabbing::{stabs_ordered_disks, Disk};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("a curve needs at least 2 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("vertex {0} has a non-finite coordinate")]
    NonFinite(usize),
    #[error("edge index {edge} out of range for a curve with {edges} edges")]
    InvalidLocation { edge: usize, edges: usize },
    #[error("local parameter {0} outside [0, 1]")]
    InvalidParameter(f64),
    #[error("subcurve endpoints out of order")]
    Order,
    #[error("{name} must be {requirement}, got {value}")]
    Parameter {
        name: &'static str,
        requirement: &'static str,
        value: f64,
    },
}

pub(crate) fn param_error(
    name: &'static str,
    requirement: &'static str,
    value: f64,
) -> GeometryError {
    GeometryError::Parameter {
        name,
        requirement,
        value,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2<S> {
    pub x: S,
    pub y: S,
}

impl<S: Scalar> Point2<S> {
    #[inline]
    pub fn new(x: S, y: S) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn dot(self, o: Self) -> S {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product.
    #[inline]
    pub fn cross(self, o: Self) -> S {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm2(self) -> S {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> S {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn dist(self, o: Self) -> S {
        (self - o).norm()
    }

    #[inline]
    pub fn lerp(self, o: Self, u: S) -> Self {
        Self::new(self.x + (o.x - self.x) * u, self.y + (o.y - self.y) * u)
    }

    /// Unit vector in the same direction; the zero vector maps to itself.
    pub fn unit(self) -> Self {
        let n = self.norm();
        if n > S::zero() {
            self * (S::one() / n)
        } else {
            self
        }
    }

    /// Counter-clockwise rotation by 90 degrees.
    #[inline]
    pub fn perp(self) -> Self {
        Self::new(-self.y, self.x)
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn max_abs(self) -> S {
        self.x.abs().max(self.y.abs())
    }

    pub fn cast<T: Scalar>(self) -> Point2<T> {
        Point2::new(T::lit(self.x.as_f64()), T::lit(self.y.as_f64()))
    }
}

impl<S: Scalar> Add for Point2<S> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y)
    }
}

impl<S: Scalar> Sub for Point2<S> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y)
    }
}

impl<S: Scalar> Mul<S> for Point2<S> {
    type Output = Self;
    #[inline]
    fn mul(self, k: S) -> Self {
        Self::new(self.x * k, self.y * k)
    }
}

impl<S: Scalar> Neg for Point2<S> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment<S> {
    pub a: Point2<S>,
    pub b: Point2<S>,
}

impl<S: Scalar> Segment<S> {
    #[inline]
    pub fn new(a: Point2<S>, b: Point2<S>) -> Self {
        Self { a, b }
    }

    #[inline]
    pub fn at(&self, u: S) -> Point2<S> {
        self.a.lerp(self.b, u)
    }

    #[inline]
    pub fn dir(&self) -> Point2<S> {
        self.b - self.a
    }

    #[inline]
    pub fn length(&self) -> S {
        self.dir().norm()
    }

    pub fn is_degenerate(&self) -> bool {
        self.a == self.b
    }

    /// The sub-segment between local parameters `u0` and `u1`.
    pub fn sub(&self, u0: S, u1: S) -> Self {
        Self::new(self.at(u0), self.at(u1))
    }

    pub fn reversed(&self) -> Self {
        Self::new(self.b, self.a)
    }

    /// Parameter of the point of the segment closest to `p`.
    pub fn closest_param(&self, p: Point2<S>) -> S {
        let d = self.dir();
        let dd = d.norm2();
        if dd == S::zero() {
            return S::zero();
        }
        clamp((p - self.a).dot(d) / dd, S::zero(), S::one())
    }

    pub fn dist_to_point(&self, p: Point2<S>) -> S {
        self.at(self.closest_param(p)).dist(p)
    }

    /// Euclidean distance between the two point sets.
    pub fn dist_to_segment(&self, o: &Segment<S>) -> S {
        if segments_intersect(self, o) {
            return S::zero();
        }
        self.dist_to_point(o.a)
            .min(self.dist_to_point(o.b))
            .min(o.dist_to_point(self.a))
            .min(o.dist_to_point(self.b))
    }
}

fn orient<S: Scalar>(a: Point2<S>, b: Point2<S>, c: Point2<S>) -> S {
    (b - a).cross(c - a)
}

fn on_segment<S: Scalar>(s: &Segment<S>, p: Point2<S>) -> bool {
    p.x >= s.a.x.min(s.b.x)
        && p.x <= s.a.x.max(s.b.x)
        && p.y >= s.a.y.min(s.b.y)
        && p.y <= s.a.y.max(s.b.y)
}

/// Closed segment intersection test with floating orientation signs.
pub fn segments_intersect<S: Scalar>(s: &Segment<S>, t: &Segment<S>) -> bool {
    let d1 = orient(t.a, t.b, s.a);
    let d2 = orient(t.a, t.b, s.b);
    let d3 = orient(s.a, s.b, t.a);
    let d4 = orient(s.a, s.b, t.b);
    let z = S::zero();
    if ((d1 > z && d2 < z) || (d1 < z && d2 > z)) && ((d3 > z && d4 < z) || (d3 < z && d4 > z)) {
        return true;
    }
    (d1 == z && on_segment(t, s.a))
        || (d2 == z && on_segment(t, s.b))
        || (d3 == z && on_segment(s, t.a))
        || (d4 == z && on_segment(s, t.b))
}

/// Parameters `u ∈ [lo, hi]` with `‖o + u·d − c‖ ≤ r`, or `None`.
///
/// The discriminant is formed from the cross product so that nearly
/// tangent lines keep their precision.
pub fn seg_disk_interval<S: Scalar>(
    o: Point2<S>,
    d: Point2<S>,
    c: Point2<S>,
    r: S,
    lo: S,
    hi: S,
) -> Option<(S, S)> {
    let w = o - c;
    let dd = d.norm2();
    if dd == S::zero() {
        return (w.norm() <= r).then_some((lo, hi));
    }
    let cr = d.cross(w);
    let disc = r * r * dd - cr * cr;
    if disc < S::zero() {
        return None;
    }
    let sq = disc.sqrt();
    let b = w.dot(d);
    let t0 = (-b - sq) / dd;
    let t1 = (-b + sq) / dd;
    if t0 > hi || t1 < lo {
        return None;
    }
    Some((t0.max(lo), t1.min(hi)))
}

/// Edge-local address of a point on a curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveLocation<S> {
    pub edge: usize,
    pub u: S,
}

impl<S: Scalar> CurveLocation<S> {
    pub fn new(edge: usize, u: S) -> Self {
        Self { edge, u }
    }

    pub fn start() -> Self {
        Self::new(0, S::zero())
    }

    /// Position along the edge sequence as `edge + u`; comparable across
    /// edges.
    pub fn ordinal(&self) -> S {
        S::lit(self.edge as f64) + self.u
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolygonalCurve<S> {
    vertices: Vec<Point2<S>>,
}

impl<S: Scalar> PolygonalCurve<S> {
    /// Builds a curve, merging consecutive duplicate vertices. A curve whose
    /// vertices all coincide becomes the two-vertex degenerate curve.
    pub fn new(vertices: Vec<Point2<S>>) -> Result<Self, GeometryError> {
        if vertices.len() < 2 {
            return Err(GeometryError::TooFewVertices(vertices.len()));
        }
        if let Some(i) = vertices.iter().position(|p| !p.is_finite()) {
            return Err(GeometryError::NonFinite(i));
        }
        let mut out: Vec<Point2<S>> = Vec::with_capacity(vertices.len());
        for p in vertices {
            if out.last() != Some(&p) {
                out.push(p);
            }
        }
        if out.len() == 1 {
            out.push(out[0]);
        }
        Ok(Self { vertices: out })
    }

    pub fn from_xy(coords: &[(f64, f64)]) -> Result<Self, GeometryError> {
        Self::new(
            coords
                .iter()
                .map(|&(x, y)| Point2::new(S::lit(x), S::lit(y)))
                .collect(),
        )
    }

    pub fn vertices(&self) -> &[Point2<S>] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> Point2<S> {
        self.vertices[i]
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn first(&self) -> Point2<S> {
        self.vertices[0]
    }

    pub fn last(&self) -> Point2<S> {
        self.vertices[self.vertices.len() - 1]
    }

    pub fn edge(&self, i: usize) -> Segment<S> {
        Segment::new(self.vertices[i], self.vertices[i + 1])
    }

    pub fn edges(&self) -> impl Iterator<Item = Segment<S>> + '_ {
        self.vertices.windows(2).map(|w| Segment::new(w[0], w[1]))
    }

    pub fn end_location(&self) -> CurveLocation<S> {
        CurveLocation::new(self.num_edges() - 1, S::one())
    }

    fn check(&self, loc: &CurveLocation<S>) -> Result<(), GeometryError> {
        if loc.edge >= self.num_edges() {
            return Err(GeometryError::InvalidLocation {
                edge: loc.edge,
                edges: self.num_edges(),
            });
        }
        if !(loc.u >= S::zero() && loc.u <= S::one()) {
            return Err(GeometryError::InvalidParameter(loc.u.as_f64()));
        }
        Ok(())
    }

    pub fn point_at(&self, loc: CurveLocation<S>) -> Result<Point2<S>, GeometryError> {
        self.check(&loc)?;
        Ok(self.edge(loc.edge).at(loc.u))
    }

    /// Global parameter in `[0,1]`, each edge taking an equal share.
    pub fn to_global(&self, loc: CurveLocation<S>) -> S {
        loc.ordinal() / S::lit(self.num_edges() as f64)
    }

    /// Inverse of [`to_global`](Self::to_global); shared vertices resolve to
    /// the earlier edge.
    pub fn location_at(&self, t: S) -> Result<CurveLocation<S>, GeometryError> {
        if !(t >= S::zero() && t <= S::one()) {
            return Err(GeometryError::InvalidParameter(t.as_f64()));
        }
        let m = S::lit(self.num_edges() as f64);
        let x = t * m;
        let f = x.ceil();
        let edge = if f <= S::one() {
            0
        } else {
            f.to_usize().unwrap_or(1) - 1
        };
        let edge = edge.min(self.num_edges() - 1);
        let u = clamp(x - S::lit(edge as f64), S::zero(), S::one());
        Ok(CurveLocation::new(edge, u))
    }

    pub fn point_at_global(&self, t: S) -> Result<Point2<S>, GeometryError> {
        self.point_at(self.location_at(t)?)
    }

    pub fn subcurve(
        &self,
        from: CurveLocation<S>,
        to: CurveLocation<S>,
    ) -> Result<Self, GeometryError> {
        self.check(&from)?;
        self.check(&to)?;
        if from.ordinal() > to.ordinal() {
            return Err(GeometryError::Order);
        }
        let mut pts = vec![self.edge(from.edge).at(from.u)];
        for m in (from.edge + 1)..=to.edge {
            pts.push(self.vertices[m]);
        }
        pts.push(self.edge(to.edge).at(to.u));
        Self::new(pts)
    }

    pub fn length(&self) -> S {
        self.edges().fold(S::zero(), |acc, e| acc + e.length())
    }

    /// Axis-aligned bounding box as (min corner, max corner).
    pub fn bbox(&self) -> (Point2<S>, Point2<S>) {
        bbox_of(self.vertices.iter().copied())
    }

    pub fn reversed(&self) -> Self {
        let mut v = self.vertices.clone();
        v.reverse();
        Self { vertices: v }
    }

    pub fn cast<T: Scalar>(&self) -> PolygonalCurve<T> {
        PolygonalCurve {
            vertices: self.vertices.iter().map(|p| p.cast()).collect(),
        }
    }
}

pub(crate) fn bbox_of<S: Scalar>(pts: impl Iterator<Item = Point2<S>>) -> (Point2<S>, Point2<S>) {
    let mut lo = Point2::new(S::infinity(), S::infinity());
    let mut hi = Point2::new(S::neg_infinity(), S::neg_infinity());
    for p in pts {
        lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    (lo, hi)
}

/// Diameter of the joint bounding box of two curves; the length unit that
/// scales the predicate tolerance.
pub fn joint_scale<S: Scalar>(a: &PolygonalCurve<S>, b: &PolygonalCurve<S>) -> S {
    let (lo, hi) = bbox_of(a.vertices().iter().chain(b.vertices()).copied());
    (hi - lo).norm().max(S::one())
}

/// Fréchet distance of two segments: the larger endpoint distance.
pub fn segment_frechet<S: Scalar>(s1: &Segment<S>, s2: &Segment<S>) -> S {
    s1.a.dist(s2.a).max(s1.b.dist(s2.b))
}

fn check_delta<S: Scalar>(delta: S) -> Result<(), GeometryError> {
    if !(delta >= S::zero()) {
        return Err(param_error("delta", "non-negative", delta.as_f64()));
    }
    Ok(())
}

/// Whether `d_F(seg, curve) ≤ delta`: both endpoint pairs within `delta` and
/// the segment stabs the `delta`-disks of the interior vertices in order.
pub fn segment_to_curve_frechet_decide<S: Scalar>(
    seg: &Segment<S>,
    curve: &PolygonalCurve<S>,
    delta: S,
) -> Result<bool, GeometryError> {
    check_delta(delta)?;
    Ok(segment_to_curve_within(seg, curve.vertices(), delta))
}

/// Same predicate over a raw vertex chain (at least one vertex).
pub(crate) fn segment_to_curve_within<S: Scalar>(
    seg: &Segment<S>,
    chain: &[Point2<S>],
    delta: S,
) -> bool {
    let n = chain.len();
    if seg.a.dist(chain[0]) > delta || seg.b.dist(chain[n - 1]) > delta {
        return false;
    }
    if n <= 2 {
        return true;
    }
    let disks: Vec<Disk<S>> = chain[1..n - 1]
        .iter()
        .map(|&c| Disk::new(c, delta))
        .collect();
    stabs_ordered_disks(seg, &disks)
}

/// Fréchet distance between a segment and a curve to within `tol`, by
/// bisection over the decision predicate.
pub fn segment_to_curve_frechet_value<S: Scalar>(
    seg: &Segment<S>,
    curve: &PolygonalCurve<S>,
    tol: S,
) -> Result<S, GeometryError> {
    if !(tol > S::zero()) {
        return Err(param_error("tol", "positive", tol.as_f64()));
    }
    let verts = curve.vertices();
    let lower = seg.a.dist(curve.first()).max(seg.b.dist(curve.last()));
    let spread = verts
        .iter()
        .fold(S::zero(), |m, &v| m.max(seg.dist_to_point(v)));
    let mut lo = lower;
    let mut hi = lower + spread;
    let two = S::lit(2.0);
    while !segment_to_curve_within(seg, verts, hi) {
        lo = hi;
        hi = hi * two + tol;
    }
    if segment_to_curve_within(seg, verts, lo) {
        return Ok(lo);
    }
    while hi - lo > tol {
        let mid = (lo + hi) / two;
        if segment_to_curve_within(seg, verts, mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((lo + hi) / two)
}

/// Alt–Godau decision: whether `d_F(c1, c2) ≤ delta`.
pub fn curve_frechet_decide<S: Scalar>(
    c1: &PolygonalCurve<S>,
    c2: &PolygonalCurve<S>,
    delta: S,
) -> Result<bool, GeometryError> {
    check_delta(delta)?;
    if c1.first().dist(c2.first()) > delta || c1.last().dist(c2.last()) > delta {
        return Ok(false);
    }
    let (n1, n2) = (c1.num_edges(), c2.num_edges());
    let (zero, one) = (S::zero(), S::one());
    // Free interval on the side of cell (i, j) at P vertex i, parameter on Q edge j.
    let side_p = |i: usize, j: usize| {
        let e = c2.edge(j);
        seg_disk_interval(e.a, e.dir(), c1.vertex(i), delta, zero, one)
    };
    // Free interval on the side at Q vertex j, parameter on P edge i.
    let side_q = |i: usize, j: usize| {
        let e = c1.edge(i);
        seg_disk_interval(e.a, e.dir(), c2.vertex(j), delta, zero, one)
    };
    let start = Some((zero, zero));
    // Reachable part of the top side of each cell in the previous row.
    let mut below: Vec<Option<(S, S)>> = vec![None; n1];
    let mut corner = false;
    for j in 0..n2 {
        let mut left = if j == 0 { start } else { None };
        for i in 0..n1 {
            let bottom = if i == 0 && j == 0 { start } else { below[i] };
            let right = side_p(i + 1, j).and_then(|(a, b)| match (bottom, left) {
                (Some(_), _) => Some((a, b)),
                (None, Some((l0, _))) => (a.max(l0) <= b).then_some((a.max(l0), b)),
                _ => None,
            });
            let top = side_q(i, j + 1).and_then(|(a, b)| match (left, bottom) {
                (Some(_), _) => Some((a, b)),
                (None, Some((b0, _))) => (a.max(b0) <= b).then_some((a.max(b0), b)),
                _ => None,
            });
            if i == n1 - 1 && j == n2 - 1 {
                corner = right.is_some() || top.is_some();
            }
            below[i] = top;
            left = right;
        }
    }
    Ok(corner)
}
