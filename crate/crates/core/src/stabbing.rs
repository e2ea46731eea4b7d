//! Ordered-disk stabbing and line-stabbing wedges.
//!
//! A segment stabs an ordered disk sequence when points `x_1 ≤ … ≤ x_m` on it
//! exist with the `k`-th point inside the `k`-th disk. The wedge of a start
//! segment and a disk sequence is the set of points `t` such that some
//! segment from the start segment to `t` stabs the disks.

use serde::{Deserialize, Serialize};

use crate::geometry::{seg_disk_interval, Point2, Segment};
use crate::scalar::{clamp, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disk<S> {
    pub center: Point2<S>,
    pub radius: S,
}

impl<S: Scalar> Disk<S> {
    pub fn new(center: Point2<S>, radius: S) -> Self {
        Self { center, radius }
    }

    pub fn contains(&self, p: Point2<S>) -> bool {
        p.dist(self.center) <= self.radius
    }

    pub fn inflated(&self, by: S) -> Self {
        Self::new(self.center, self.radius + by)
    }
}

/// Greedy interval sweep: each disk clips the segment's parameter line and
/// the realizing cursor only moves forward.
pub fn stabs_ordered_disks<S: Scalar>(seg: &Segment<S>, disks: &[Disk<S>]) -> bool {
    let d = seg.dir();
    let mut cursor = S::zero();
    for disk in disks {
        match seg_disk_interval(seg.a, d, disk.center, disk.radius, S::zero(), S::one()) {
            Some((lo, hi)) => {
                cursor = cursor.max(lo);
                if cursor > hi {
                    return false;
                }
            }
            None => return false,
        }
    }
    true
}

/// Smallest amount by which every radius must grow for `seg` to stab the
/// disks; non-positive when it already does.
///
/// Computed from single-disk and pairwise terms only, which suffices
/// because the greedy sweep fails exactly when some disk is missed or some
/// later disk ends before an earlier one begins.
pub fn required_inflation<S: Scalar>(seg: &Segment<S>, disks: &[Disk<S>]) -> S {
    let d = seg.dir();
    let dd = d.norm2();
    let proj: Vec<S> = disks
        .iter()
        .map(|k| {
            if dd == S::zero() {
                S::zero()
            } else {
                clamp((k.center - seg.a).dot(d) / dd, S::zero(), S::one())
            }
        })
        .collect();
    let f = |k: usize, x: S| seg.at(x).dist(disks[k].center) - disks[k].radius;
    let mut worst = S::neg_infinity();
    for (k, &x) in proj.iter().enumerate() {
        worst = worst.max(f(k, x));
    }
    for p in 0..disks.len() {
        for q in (p + 1)..disks.len() {
            if proj[p] <= proj[q] {
                continue;
            }
            // f_p decreases and f_q increases on [proj_q, proj_p]; their
            // crossing minimizes max(f_p(x), f_q(x')) under x ≤ x'.
            let (mut lo, mut hi) = (proj[q], proj[p]);
            for _ in 0..100 {
                let mid = (lo + hi) * S::lit(0.5);
                if f(p, mid) > f(q, mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo <= S::epsilon() {
                    break;
                }
            }
            let z = (lo + hi) * S::lit(0.5);
            worst = worst.max(f(p, z).max(f(q, z)));
        }
    }
    worst
}

/// Start parameter minimising the inflation needed for `s → t` to stab
/// the disks, by a coarse scan and golden-section refinement.
pub fn least_inflation_start<S: Scalar>(
    start: &Segment<S>,
    disks: &[Disk<S>],
    t: Point2<S>,
) -> (S, S) {
    let v = |s: S| required_inflation(&Segment::new(start.at(s), t), disks);
    let m = 64usize;
    let step = S::one() / S::lit(m as f64);
    let mut best = (S::zero(), S::infinity());
    for k in 0..=m {
        let s = S::lit(k as f64) * step;
        let val = v(s);
        if val < best.1 {
            best = (s, val);
        }
    }
    let (mut a, mut b) = (
        (best.0 - step).max(S::zero()),
        (best.0 + step).min(S::one()),
    );
    let g = S::lit(0.618_033_988_749_894_8);
    for _ in 0..80 {
        let (c, d) = (b - (b - a) * g, a + (b - a) * g);
        if v(c) < v(d) {
            b = d;
        } else {
            a = c;
        }
        if b - a <= S::epsilon() {
            break;
        }
    }
    let mid = (a + b) * S::lit(0.5);
    let vm = v(mid);
    if vm < best.1 {
        (mid, vm)
    } else {
        best
    }
}

/// Numeric oracle: whether some `s` on `start` gives a segment `s → t`
/// stabbing the disks.
///
/// Golden-section search on the required inflation, a coarse scan with local
/// refinement, then a dense sweep of the greedy predicate. Not exact: a
/// feasible set thinner than the dense spacing can be missed.
pub fn stab_from_start<S: Scalar>(start: &Segment<S>, disks: &[Disk<S>], t: Point2<S>) -> bool {
    if disks.is_empty() {
        return true;
    }
    let seg_at = |s: S| Segment::new(start.at(s), t);
    if start.is_degenerate() {
        return stabs_ordered_disks(&seg_at(S::zero()), disks);
    }
    let v = |s: S| required_inflation(&seg_at(s), disks);
    let ok = |s: S| v(s) <= S::zero() || stabs_ordered_disks(&seg_at(s), disks);
    if ok(S::zero()) || ok(S::one()) {
        return true;
    }
    let golden = |mut a: S, mut b: S| -> S {
        let g = S::lit(0.618_033_988_749_894_8);
        let mut c = b - (b - a) * g;
        let mut d = a + (b - a) * g;
        let (mut fc, mut fd) = (v(c), v(d));
        for _ in 0..80 {
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - (b - a) * g;
                fc = v(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + (b - a) * g;
                fd = v(d);
            }
            if b - a <= S::epsilon() {
                break;
            }
        }
        (a + b) * S::lit(0.5)
    };
    if ok(golden(S::zero(), S::one())) {
        return true;
    }
    let m = 64usize;
    let step = S::one() / S::lit(m as f64);
    let mut best = (S::infinity(), 0usize);
    for k in 0..=m {
        let val = v(S::lit(k as f64) * step);
        if val <= S::zero() {
            return true;
        }
        if val < best.0 {
            best = (val, k);
        }
    }
    let centre = S::lit(best.1 as f64) * step;
    if ok(golden(
        (centre - step).max(S::zero()),
        (centre + step).min(S::one()),
    )) {
        return true;
    }
    let dense = 1000usize;
    (0..=dense)
        .any(|k| stabs_ordered_disks(&seg_at(S::lit(k as f64) / S::lit(dense as f64)), disks))
}

/// Which constraint bounds one side of a direction arc.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Binding {
    Frame,
    Disk(usize),
    Target(usize),
    Pair(usize, usize),
    Collinear,
}

/// Directions `reference` rotated by angles in `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionArc<S> {
    pub reference: Point2<S>,
    pub lo: S,
    pub hi: S,
    pub lo_binding: Binding,
    pub hi_binding: Binding,
}

impl<S: Scalar> DirectionArc<S> {
    pub fn direction(&self, theta: S) -> Point2<S> {
        self.reference * theta.cos() + self.reference.perp() * theta.sin()
    }

    pub fn mid(&self) -> S {
        (self.lo + self.hi) * S::lit(0.5)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DirectionSet<S> {
    Empty,
    /// Every direction works (the apex lies in every disk).
    Any,
    Arc(DirectionArc<S>),
}

impl<S: Scalar> DirectionSet<S> {
    pub fn is_empty(&self) -> bool {
        matches!(self, DirectionSet::Empty)
    }
}

pub(crate) fn rel_angle<S: Scalar>(reference: Point2<S>, v: Point2<S>) -> S {
    reference.cross(v).atan2(reference.dot(v))
}

/// Entry/exit distances of the ray `apex + r·u` (unit `u`) through a disk.
fn chord<S: Scalar>(apex: Point2<S>, u: Point2<S>, disk: &Disk<S>) -> Option<(S, S)> {
    let w = disk.center - apex;
    let proj = u.dot(w);
    let perp = u.cross(w);
    let h2 = disk.radius * disk.radius - perp * perp;
    let slack = S::lit(16.0) * S::epsilon() * w.norm() * (disk.radius + w.norm() * S::epsilon());
    if h2 < -slack {
        return None;
    }
    let h = h2.max(S::zero()).sqrt();
    Some((proj - h, proj + h))
}

/// Ray parameter at which `apex + r·u` meets the line of `e`, with the
/// parameter along `e`.
fn ray_hit<S: Scalar>(apex: Point2<S>, u: Point2<S>, e: &Segment<S>) -> Option<(S, S)> {
    let el = e.dir();
    let den = u.cross(el);
    if den == S::zero() {
        return None;
    }
    let w = e.a - apex;
    Some((w.cross(el) / den, w.cross(u) / den))
}

fn circle_circle<S: Scalar>(p: &Disk<S>, q: &Disk<S>) -> Vec<Point2<S>> {
    let d = q.center - p.center;
    let dist = d.norm();
    if dist == S::zero() || dist > p.radius + q.radius || dist < (p.radius - q.radius).abs() {
        return Vec::new();
    }
    let a = (p.radius * p.radius - q.radius * q.radius + dist * dist) / (S::lit(2.0) * dist);
    let h = (p.radius * p.radius - a * a).max(S::zero()).sqrt();
    let u = d * (S::one() / dist);
    let base = p.center + u * a;
    vec![base + u.perp() * h, base - u.perp() * h]
}

/// Roots of `‖e(u) − c‖ = r` with `u ∈ [0,1]`.
fn segment_circle_params<S: Scalar>(e: &Segment<S>, disk: &Disk<S>) -> Vec<S> {
    let d = e.dir();
    let dd = d.norm2();
    if dd == S::zero() {
        return Vec::new();
    }
    let w = e.a - disk.center;
    let cr = d.cross(w);
    let disc = disk.radius * disk.radius * dd - cr * cr;
    if disc < S::zero() {
        return Vec::new();
    }
    let sq = disc.sqrt();
    let b = w.dot(d);
    [(-b - sq) / dd, (-b + sq) / dd]
        .into_iter()
        .filter(|u| *u >= S::zero() && *u <= S::one())
        .collect()
}

/// Hull of the feasible part of `[lo, hi]` for a predicate whose feasibility
/// can only change at the candidate angles.
fn refine<S: Scalar>(lo: S, hi: S, cands: &mut Vec<S>, pred: impl Fn(S) -> bool) -> Option<(S, S)> {
    cands.retain(|c| *c > lo && *c < hi);
    cands.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cands.dedup();
    let mut pts = Vec::with_capacity(cands.len() + 2);
    pts.push(lo);
    pts.extend(cands.iter().copied());
    pts.push(hi);
    let mut out: Option<(S, S)> = None;
    let mut take = |a: S, b: S| {
        out = Some(match out {
            None => (a, b),
            Some((x, y)) => (x.min(a), y.max(b)),
        });
    };
    for (k, &p) in pts.iter().enumerate() {
        if pred(p) {
            take(p, p);
        }
        if k + 1 < pts.len() {
            let q = pts[k + 1];
            if pred((p + q) * S::lit(0.5)) {
                take(p, q);
            }
        }
    }
    out
}

struct Frame<S> {
    reference: Point2<S>,
    lo: S,
    hi: S,
    lo_b: Binding,
    hi_b: Binding,
}

impl<S: Scalar> Frame<S> {
    fn apply(&mut self, lo: S, hi: S, b: Binding) -> bool {
        if lo > self.lo {
            self.lo = lo;
            self.lo_b = b;
        }
        if hi < self.hi {
            self.hi = hi;
            self.hi_b = b;
        }
        self.lo <= self.hi
    }

    fn dir(&self, theta: S) -> Point2<S> {
        self.reference * theta.cos() + self.reference.perp() * theta.sin()
    }
}

/// Directions `u` from `apex` such that the ray stabs the disks in order and
/// (when given) then meets `target` no earlier than the last realizer.
pub fn apex_directions<S: Scalar>(
    apex: Point2<S>,
    disks: &[Disk<S>],
    target: Option<&Segment<S>>,
) -> DirectionSet<S> {
    let two = S::lit(2.0);
    let outside: Vec<bool> = disks.iter().map(|d| !d.contains(apex)).collect();
    let mut frame = match target {
        Some(e) => {
            let el = e.dir();
            let rel = apex - e.a;
            let len = el.norm();
            let tiny = S::lit(64.0) * S::epsilon() * len * (rel.norm() + len);
            if len == S::zero() || el.cross(rel).abs() <= tiny {
                return collinear_directions(apex, disks, e);
            }
            let reference = (e.at(S::lit(0.5)) - apex).unit();
            let a0 = rel_angle(reference, e.a - apex);
            let a1 = rel_angle(reference, e.b - apex);
            Frame {
                reference,
                lo: a0.min(a1),
                hi: a0.max(a1),
                lo_b: Binding::Frame,
                hi_b: Binding::Frame,
            }
        }
        None => match outside.iter().position(|&o| o) {
            None => return DirectionSet::Any,
            Some(k) => {
                let reference = (disks[k].center - apex).unit();
                Frame {
                    reference,
                    lo: -S::FRAC_PI_2(),
                    hi: S::FRAC_PI_2(),
                    lo_b: Binding::Frame,
                    hi_b: Binding::Frame,
                }
            }
        },
    };
    for (k, disk) in disks.iter().enumerate() {
        if !outside[k] {
            continue;
        }
        let w = disk.center - apex;
        let half = (disk.radius / w.norm()).min(S::one()).asin();
        let centre = rel_angle(frame.reference, w);
        let tau = two * S::PI();
        let mut placed = false;
        for shift in [S::zero(), tau, -tau] {
            let (a, b) = (centre - half + shift, centre + half + shift);
            if b >= frame.lo && a <= frame.hi {
                if !frame.apply(a, b, Binding::Disk(k)) {
                    return DirectionSet::Empty;
                }
                placed = true;
                break;
            }
        }
        if !placed {
            return DirectionSet::Empty;
        }
    }
    let r_tol = |p: &Disk<S>, q: &Disk<S>| {
        S::lit(64.0)
            * S::epsilon()
            * ((p.center - apex).norm() + (q.center - apex).norm() + p.radius + q.radius)
    };
    if let Some(e) = target {
        for (p, disk) in disks.iter().enumerate() {
            if !outside[p] {
                continue;
            }
            let mut cands: Vec<S> = segment_circle_params(e, disk)
                .into_iter()
                .map(|u| rel_angle(frame.reference, e.at(u) - apex))
                .collect();
            let tol = r_tol(disk, disk)
                + S::lit(64.0) * S::epsilon() * (e.a - apex).norm().max((e.b - apex).norm());
            let pred = |theta: S| {
                let u = frame.dir(theta);
                match (chord(apex, u, disk), ray_hit(apex, u, e)) {
                    (Some((inp, _)), Some((r, _))) => inp.max(S::zero()) <= r + tol,
                    _ => false,
                }
            };
            match refine(frame.lo, frame.hi, &mut cands, pred) {
                Some((a, b)) => {
                    if !frame.apply(a, b, Binding::Target(p)) {
                        return DirectionSet::Empty;
                    }
                }
                None => return DirectionSet::Empty,
            }
        }
    }
    for p in 0..disks.len() {
        if !outside[p] {
            continue;
        }
        for q in (p + 1)..disks.len() {
            let (dp, dq) = (&disks[p], &disks[q]);
            let cd = dp.center.dist(dq.center);
            if cd + dp.radius <= dq.radius || cd + dq.radius <= dp.radius {
                continue;
            }
            let tol = r_tol(dp, dq);
            let pred = |theta: S| {
                let u = frame.dir(theta);
                match (chord(apex, u, dp), chord(apex, u, dq)) {
                    (Some((inp, _)), Some((_, outq))) => inp.max(S::zero()) <= outq + tol,
                    _ => false,
                }
            };
            if cd > dp.radius + dq.radius {
                if !pred((frame.lo + frame.hi) * S::lit(0.5)) {
                    return DirectionSet::Empty;
                }
                continue;
            }
            let mut cands: Vec<S> = circle_circle(dp, dq)
                .into_iter()
                .map(|x| rel_angle(frame.reference, x - apex))
                .collect();
            match refine(frame.lo, frame.hi, &mut cands, pred) {
                Some((a, b)) => {
                    if !frame.apply(a, b, Binding::Pair(p, q)) {
                        return DirectionSet::Empty;
                    }
                }
                None => return DirectionSet::Empty,
            }
        }
    }
    let arc = DirectionArc {
        reference: frame.reference,
        lo: frame.lo,
        hi: frame.hi,
        lo_binding: frame.lo_b,
        hi_binding: frame.hi_b,
    };
    if verify_arc(apex, disks, target, &arc) {
        DirectionSet::Arc(arc)
    } else {
        DirectionSet::Empty
    }
}

/// Direct check of one direction.
pub fn direction_works<S: Scalar>(
    apex: Point2<S>,
    u: Point2<S>,
    disks: &[Disk<S>],
    target: Option<&Segment<S>>,
) -> bool {
    let reach = match target {
        Some(e) => match ray_hit(apex, u, e) {
            Some((r, v))
                if r >= S::zero() && v >= -S::epsilon() && v <= S::one() + S::epsilon() =>
            {
                r
            }
            _ => return false,
        },
        None => {
            disks
                .iter()
                .fold(S::zero(), |m, d| m.max((d.center - apex).norm() + d.radius))
                * S::lit(2.0)
        }
    };
    let seg = Segment::new(apex, apex + u * reach);
    if stabs_ordered_disks(&seg, disks) {
        return true;
    }
    // Tolerate rounding at tangencies.
    let grow = S::lit(1e-12) * (reach + S::one());
    let bigger: Vec<Disk<S>> = disks.iter().map(|d| d.inflated(grow)).collect();
    stabs_ordered_disks(&seg, &bigger)
}

fn verify_arc<S: Scalar>(
    apex: Point2<S>,
    disks: &[Disk<S>],
    target: Option<&Segment<S>>,
    arc: &DirectionArc<S>,
) -> bool {
    if direction_works(apex, arc.direction(arc.mid()), disks, target) {
        return true;
    }
    let n = 32;
    (0..=n).any(|k| {
        let th = arc.lo + (arc.hi - arc.lo) * S::lit(k as f64) / S::lit(n as f64);
        direction_works(apex, arc.direction(th), disks, target)
    })
}

fn collinear_directions<S: Scalar>(
    apex: Point2<S>,
    disks: &[Disk<S>],
    e: &Segment<S>,
) -> DirectionSet<S> {
    let el = e.dir();
    let cands = if el.norm2() == S::zero() {
        let to = e.a - apex;
        if to.norm2() == S::zero() {
            return if disks.iter().all(|d| d.contains(apex)) {
                DirectionSet::Arc(DirectionArc {
                    reference: Point2::new(S::one(), S::zero()),
                    lo: S::zero(),
                    hi: S::zero(),
                    lo_binding: Binding::Collinear,
                    hi_binding: Binding::Collinear,
                })
            } else {
                DirectionSet::Empty
            };
        }
        vec![to.unit()]
    } else {
        vec![el.unit(), -el.unit()]
    };
    for d in cands {
        let ra = (e.a - apex).dot(d);
        let rb = (e.b - apex).dot(d);
        let far = ra.max(rb);
        if far < S::zero() {
            continue;
        }
        if stabs_ordered_disks(&Segment::new(apex, apex + d * far), disks) {
            return DirectionSet::Arc(DirectionArc {
                reference: d,
                lo: S::zero(),
                hi: S::zero(),
                lo_binding: Binding::Collinear,
                hi_binding: Binding::Collinear,
            });
        }
    }
    DirectionSet::Empty
}

/// Parameter on `e` hit by the ray `apex + r·u`, if any.
pub fn landing_param<S: Scalar>(apex: Point2<S>, u: Point2<S>, e: &Segment<S>) -> Option<S> {
    if e.is_degenerate() {
        return Some(S::zero());
    }
    match ray_hit(apex, u, e) {
        Some((r, v)) if r >= -S::epsilon() => Some(clamp(v, S::zero(), S::one())),
        Some(_) => None,
        None => {
            // Parallel: the ray runs along e.
            let el = e.dir();
            let v = (apex - e.a).dot(el) / el.norm2();
            Some(clamp(v, S::zero(), S::one()))
        }
    }
}

/// Boundary of a wedge at one start parameter: the apex and the two extreme
/// stabbing directions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryRay<S> {
    pub s: S,
    pub origin: Point2<S>,
    pub directions: DirectionSet<S>,
}

/// Line-stabbing wedge of a start segment followed by ordered disks.
#[derive(Debug, Clone)]
pub struct Wedge<S> {
    start: Segment<S>,
    disks: Vec<Disk<S>>,
    reversed: Vec<Disk<S>>,
    s_range: Option<(S, S)>,
    rays: Vec<BoundaryRay<S>>,
}

/// Cap on branch-and-bound nodes when searching for a feasible start point.
const SEARCH_NODES: usize = 4000;

impl<S: Scalar> Wedge<S> {
    pub fn build(start: Segment<S>, disks: Vec<Disk<S>>) -> Self {
        let reversed: Vec<Disk<S>> = disks.iter().rev().copied().collect();
        let mut w = Self {
            start,
            disks,
            reversed,
            s_range: None,
            rays: Vec::new(),
        };
        if w.disks.is_empty() {
            w.s_range = Some((S::zero(), S::one()));
            return w;
        }
        let Some(seed) = w.find_feasible_start() else {
            return w;
        };
        let feasible = |s: S| !apex_directions(w.start.at(s), &w.disks, None).is_empty();
        let bisect = |mut good: S, mut bad: S| {
            for _ in 0..48 {
                let mid = (good + bad) * S::lit(0.5);
                if feasible(mid) {
                    good = mid;
                } else {
                    bad = mid;
                }
                if (good - bad).abs() <= S::lit(1e-13) {
                    break;
                }
            }
            good
        };
        let s_lo = if feasible(S::zero()) {
            S::zero()
        } else {
            bisect(seed, S::zero())
        };
        let s_hi = if feasible(S::one()) {
            S::one()
        } else {
            bisect(seed, S::one())
        };
        w.s_range = Some((s_lo, s_hi));
        let mut samples: Vec<S> = (0..9)
            .map(|k| s_lo + (s_hi - s_lo) * S::lit(k as f64 / 8.0))
            .collect();
        samples.push(seed);
        samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
        samples.dedup();
        let mut rays: Vec<BoundaryRay<S>> = samples.iter().map(|&s| w.ray_at(s)).collect();
        // Add the start parameters where a binding constraint switches.
        let mut extra = Vec::new();
        for pair in rays.windows(2) {
            let (b0, b1) = (bindings(&pair[0].directions), bindings(&pair[1].directions));
            if b0 != b1 {
                let (mut a, mut b) = (pair[0].s, pair[1].s);
                for _ in 0..30 {
                    let mid = (a + b) * S::lit(0.5);
                    if bindings(&w.ray_at(mid).directions) == b0 {
                        a = mid;
                    } else {
                        b = mid;
                    }
                }
                extra.push(w.ray_at(a));
                extra.push(w.ray_at(b));
            }
        }
        rays.extend(extra);
        rays.sort_by(|a, b| a.s.partial_cmp(&b.s).unwrap());
        w.rays = rays;
        w
    }

    fn ray_at(&self, s: S) -> BoundaryRay<S> {
        let origin = self.start.at(s);
        BoundaryRay {
            s,
            origin,
            directions: apex_directions(origin, &self.disks, None),
        }
    }

    /// Branch and bound over the start segment: a start parameter is
    /// feasible if its apex admits a stabbing direction; an interval is
    /// discarded when even disks inflated by the apex's possible travel
    /// admit none from its midpoint.
    fn find_feasible_start(&self) -> Option<S> {
        let len = self.start.length();
        let feasible = |s: S| !apex_directions(self.start.at(s), &self.disks, None).is_empty();
        if feasible(S::zero()) {
            return Some(S::zero());
        }
        if feasible(S::one()) {
            return Some(S::one());
        }
        let scale = self
            .disks
            .iter()
            .fold(len, |m, d| m.max(d.center.max_abs() + d.radius));
        let floor = S::lit(1e-12) * (scale + S::one());
        let mut stack = vec![(S::zero(), S::one())];
        let mut nodes = 0;
        while let Some((a, b)) = stack.pop() {
            nodes += 1;
            if nodes > SEARCH_NODES {
                return None;
            }
            let mid = (a + b) * S::lit(0.5);
            if feasible(mid) {
                return Some(mid);
            }
            let reach = len * (b - a) * S::lit(0.5);
            if reach <= floor {
                continue;
            }
            let grown: Vec<Disk<S>> = self.disks.iter().map(|d| d.inflated(reach)).collect();
            if apex_directions(self.start.at(mid), &grown, None).is_empty() {
                continue;
            }
            stack.push((mid, b));
            stack.push((a, mid));
        }
        None
    }

    pub fn start(&self) -> &Segment<S> {
        &self.start
    }

    pub fn disks(&self) -> &[Disk<S>] {
        &self.disks
    }

    pub fn is_empty(&self) -> bool {
        self.s_range.is_none()
    }

    /// Start parameters that begin at least one stabber.
    pub fn start_range(&self) -> Option<(S, S)> {
        self.s_range
    }

    pub fn boundary_rays(&self) -> &[BoundaryRay<S>] {
        &self.rays
    }

    /// Exact membership: stab the disks backwards from `t` and land on the
    /// start segment.
    pub fn contains(&self, t: Point2<S>) -> bool {
        if self.s_range.is_none() {
            return false;
        }
        if self.disks.is_empty() {
            return true;
        }
        !apex_directions(t, &self.reversed, Some(&self.start)).is_empty()
    }

    /// A start parameter whose segment to `t` stabs the disks.
    pub fn start_for(&self, t: Point2<S>) -> Option<S> {
        if self.disks.is_empty() {
            return Some(S::lit(0.5));
        }
        match apex_directions(t, &self.reversed, Some(&self.start)) {
            DirectionSet::Arc(arc) => landing_param(t, arc.direction(arc.mid()), &self.start),
            DirectionSet::Any => Some(S::lit(0.5)),
            DirectionSet::Empty => {
                // `t` on the boundary up to rounding: take the start point
                // needing the least inflation if that is negligible.
                let (s, need) = least_inflation_start(&self.start, &self.disks, t);
                let r = self.disks.iter().map(|d| d.radius).fold(S::zero(), S::max);
                (need <= S::lit(1e-7) * (S::one() + r)).then_some(s)
            }
        }
    }

    /// Parameter intervals of `e` inside the wedge.
    pub fn intersect_segment(&self, e: &Segment<S>) -> Vec<(S, S)> {
        if self.is_empty() {
            return Vec::new();
        }
        if self.disks.is_empty() {
            return vec![(S::zero(), S::one())];
        }
        let mut cands = vec![S::zero(), S::one()];
        for d in &self.disks {
            cands.extend(segment_circle_params(e, d));
        }
        let mut known: Vec<(S, S)> = Vec::new();
        for ray in &self.rays {
            if let DirectionSet::Arc(arc) = ray.directions {
                for th in [arc.lo, arc.hi] {
                    if let Some((r, v)) = ray_hit(ray.origin, arc.direction(th), e) {
                        if r >= S::zero() && v >= S::zero() && v <= S::one() {
                            cands.push(v);
                        }
                    }
                }
            }
            if let DirectionSet::Arc(arc) = apex_directions(ray.origin, &self.disks, Some(e)) {
                let (d0, d1) = (arc.direction(arc.lo), arc.direction(arc.hi));
                let u0 = landing_param(ray.origin, d0, e);
                let u1 = landing_param(ray.origin, d1, e);
                // Arc ends are hulls of samples; trust them only if both verify.
                let sound = direction_works(ray.origin, d0, &self.disks, Some(e))
                    && direction_works(ray.origin, d1, &self.disks, Some(e));
                if let (Some(u0), Some(u1), true) = (u0, u1, sound) {
                    let (a, b) = (u0.min(u1), u0.max(u1));
                    known.push((a, b));
                    cands.push(a);
                    cands.push(b);
                }
            }
        }
        cands.retain(|c| c.is_finite());
        cands.sort_by(|a, b| a.partial_cmp(b).unwrap());
        cands.dedup();
        let member = |u: S| known.iter().any(|&(a, b)| u >= a && u <= b) || self.contains(e.at(u));
        let mut pts: Vec<(S, bool)> = Vec::with_capacity(2 * cands.len());
        for (k, &c) in cands.iter().enumerate() {
            pts.push((c, member(c)));
            if k + 1 < cands.len() {
                let m = (c + cands[k + 1]) * S::lit(0.5);
                pts.push((m, member(m)));
            }
        }
        let boundary = |inside: S, outside: S| {
            let (mut a, mut b) = (inside, outside);
            for _ in 0..60 {
                let mid = (a + b) * S::lit(0.5);
                if member(mid) {
                    a = mid;
                } else {
                    b = mid;
                }
                if (a - b).abs() <= S::epsilon() {
                    break;
                }
            }
            a
        };
        let mut out: Vec<(S, S)> = Vec::new();
        let mut k = 0;
        while k < pts.len() {
            if !pts[k].1 {
                k += 1;
                continue;
            }
            let mut end = k;
            while end + 1 < pts.len() && pts[end + 1].1 {
                end += 1;
            }
            let lo = if k == 0 {
                pts[0].0
            } else {
                boundary(pts[k].0, pts[k - 1].0)
            };
            let hi = if end + 1 == pts.len() {
                pts[end].0
            } else {
                boundary(pts[end].0, pts[end + 1].0)
            };
            out.push((lo, hi));
            k = end + 1;
        }
        out
    }
}

fn bindings<S: Scalar>(d: &DirectionSet<S>) -> Option<(Binding, Binding)> {
    match d {
        DirectionSet::Arc(a) => Some((a.lo_binding, a.hi_binding)),
        _ => None,
    }
}

/// Builds the wedge of `start_set` and `disks`.
pub fn wedge_build<S: Scalar>(start_set: Segment<S>, disks: Vec<Disk<S>>) -> Wedge<S> {
    Wedge::build(start_set, disks)
}

/// Parameter intervals of `e` interior to `w`.
pub fn wedge_intersect_segment<S: Scalar>(w: &Wedge<S>, e: &Segment<S>) -> Vec<(S, S)> {
    w.intersect_segment(e)
}
