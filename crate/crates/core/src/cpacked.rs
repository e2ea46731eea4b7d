//! Inputs with bounded packedness: μ-simplification, a packedness
//! estimate, the sweep that lists nonempty free-space cells, and the
//! approximate decider restricted to those cells.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::decider_apx::{decide_apx_inner, ApxOptions, ApxOutcome, ApxVerdict};
use crate::decider_exact::DecideError;
use crate::freespace::FreeCell;
use crate::geometry::{
    joint_scale, param_error, seg_disk_interval, segments_intersect, Point2, PolygonalCurve,
    Segment,
};
use crate::scalar::{default_eta, Scalar};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The closed `radius`-neighbourhood of a segment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Capsule<S> {
    pub segment: Segment<S>,
    pub radius: S,
}

impl<S: Scalar> Capsule<S> {
    pub fn new(segment: Segment<S>, radius: S) -> Self {
        Self {
            segment,
            radius: radius.max(S::zero()),
        }
    }

    pub fn contains(&self, p: Point2<S>) -> bool {
        self.segment.dist_to_point(p) <= self.radius
    }

    /// `(min, max)` corners of the bounding box.
    pub fn bbox(&self) -> (Point2<S>, Point2<S>) {
        let (a, b, r) = (self.segment.a, self.segment.b, self.radius);
        (
            Point2::new(a.x.min(b.x) - r, a.y.min(b.y) - r),
            Point2::new(a.x.max(b.x) + r, a.y.max(b.y) + r),
        )
    }

    /// The two straight sides, or none for a point segment.
    pub fn sides(&self) -> Option<[Segment<S>; 2]> {
        if self.segment.is_degenerate() {
            return None;
        }
        let n = self.segment.dir().unit().perp() * self.radius;
        let (a, b) = (self.segment.a, self.segment.b);
        Some([Segment::new(a + n, b + n), Segment::new(a - n, b - n)])
    }

    /// Whether `e` meets the boundary: a side, or the outer half of the
    /// circle around either endpoint.
    pub fn boundary_hits(&self, e: &Segment<S>) -> bool {
        let Some(sides) = self.sides() else {
            return circle_hits(e, self.segment.a, self.radius, None);
        };
        let (a, b) = (self.segment.a, self.segment.b);
        sides.iter().any(|s| segments_intersect(s, e))
            || circle_hits(e, a, self.radius, Some(a - b))
            || circle_hits(e, b, self.radius, Some(b - a))
    }

    /// Whether the closed capsule meets `e`: it crosses the boundary or
    /// lies inside, in which case its start vertex does.
    pub fn meets(&self, e: &Segment<S>) -> bool {
        self.boundary_hits(e) || self.contains(e.a)
    }
}

/// Points of `e` on the circle `|p − c| = r`, restricted to the half with
/// `(p − c)·outward ≥ 0` when given. The half is taken slightly wide so
/// the joints with the sides are covered despite rounding.
fn circle_hits<S: Scalar>(e: &Segment<S>, c: Point2<S>, r: S, outward: Option<Point2<S>>) -> bool {
    let on_arc =
        |p: Point2<S>| outward.is_none_or(|o| (p - c).dot(o) >= -S::lit(1e-6) * r * o.norm());
    let d = e.dir();
    let w = e.a - c;
    let dd = d.norm2();
    if dd == S::zero() {
        return (w.norm() - r).abs() <= S::epsilon() * (r + S::one()) && on_arc(e.a);
    }
    let cr = d.cross(w);
    let disc = r * r * dd - cr * cr;
    if disc < S::zero() {
        return false;
    }
    let sq = disc.sqrt();
    let b = w.dot(d);
    [(-b - sq) / dd, (-b + sq) / dd]
        .into_iter()
        .any(|u| (S::zero()..=S::one()).contains(&u) && on_arc(e.at(u)))
}

/// Sorted, duplicate-free `(i, j)` cell indices: `i` on the target, `j`
/// on the base.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellSet {
    cells: Vec<(usize, usize)>,
}

impl CellSet {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut cells: Vec<_> = pairs.into_iter().collect();
        cells.sort_unstable();
        cells.dedup();
        Self { cells }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.cells.binary_search(&(i, j)).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.cells.iter().copied()
    }

    pub fn as_slice(&self) -> &[(usize, usize)] {
        &self.cells
    }
}

impl FromIterator<(usize, usize)> for CellSet {
    fn from_iter<I: IntoIterator<Item = (usize, usize)>>(iter: I) -> Self {
        Self::from_pairs(iter)
    }
}

/// μ-simplification: from the current vertex, skip to the first vertex at
/// distance at least `mu`; the last vertex is always kept.
pub fn simplify<S: Scalar>(x: &PolygonalCurve<S>, mu: S) -> PolygonalCurve<S> {
    let v = x.vertices();
    let mut out = vec![v[0]];
    let mut cur = v[0];
    for &p in &v[1..v.len() - 1] {
        if p.dist(cur) >= mu {
            out.push(p);
            cur = p;
        }
    }
    out.push(v[v.len() - 1]);
    PolygonalCurve::new(out).expect("vertices of a valid curve")
}

/// Length of the curve inside the closed ball.
pub fn length_in_ball<S: Scalar>(x: &PolygonalCurve<S>, center: Point2<S>, radius: S) -> S {
    x.edges()
        .filter_map(|e| {
            seg_disk_interval(e.a, e.dir(), center, radius, S::zero(), S::one())
                .map(|(u0, u1)| e.length() * (u1 - u0))
        })
        .fold(S::zero(), |a, b| a + b)
}

const PACKEDNESS_SEED: u64 = 0x9ac4ed;

/// Lower bound on the packedness constant `c`: the largest ratio of
/// length inside a ball to its radius over a candidate family of balls.
///
/// Candidates are centered at vertices and edge midpoints with radii equal
/// to the distances to every vertex, plus `samples` seeded random balls.
/// The random candidates for `m` samples are a prefix of those for `m+1`,
/// so the estimate never decreases with `samples`.
pub fn packedness_estimate<S: Scalar>(x: &PolygonalCurve<S>, samples: usize) -> S {
    let v = x.vertices();
    let centers = v
        .iter()
        .copied()
        .chain(x.edges().map(|e| e.at(S::lit(0.5))));
    let mut best = S::zero();
    let mut consider = |c: Point2<S>, r: S| {
        if r > S::zero() {
            best = best.max(length_in_ball(x, c, r) / r);
        }
    };
    for c in centers {
        for p in v {
            consider(c, c.dist(*p));
        }
    }
    let (lo, hi) = x.bbox();
    let diam = lo.dist(hi);
    let mut rng = ChaCha8Rng::seed_from_u64(PACKEDNESS_SEED);
    for _ in 0..samples {
        let e = x.edge(rng.gen_range(0..x.num_edges()));
        let c = e.at(S::lit(rng.gen_range(0.0..=1.0)));
        let r = S::lit(rng.gen_range(0.0..=1.0)) * diam;
        consider(c, r);
    }
    best
}

/// Offset in `[-1, 1]` derived from the bits of a point.
fn jitter<S: Scalar>(p: Point2<S>, salt: u64) -> f64 {
    let mut h = DefaultHasher::new();
    (p.x.as_f64().to_bits(), p.y.as_f64().to_bits(), salt).hash(&mut h);
    (h.finish() >> 11) as f64 / (1u64 << 52) as f64 * 2.0 - 1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Kind {
    Enter,
    Leave,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Item {
    Edge(usize),
    Capsule(usize),
}

/// Cells `(i, j)` whose δ-free space is nonempty, i.e. base edge `j` meets
/// the δ-capsule of target edge `i`.
///
/// An x-sweep keeps the base edges and capsules whose x-extent contains
/// the sweep line; each newly entering object is paired with the active
/// objects of the other kind that overlap it in y. A pair is a cell when
/// the edge crosses the capsule boundary or its start vertex lies inside.
/// Event keys are perturbed by at most η/100 (relative to the input scale)
/// and every extent is widened by twice that, so no touching pair is lost.
/// Reported cells are re-validated with the exact cell predicate.
pub fn nonempty_cells_sweep<S: Scalar>(
    t: &PolygonalCurve<S>,
    b: &PolygonalCurve<S>,
    delta: S,
) -> CellSet {
    let delta = delta.max(S::zero());
    let scale = joint_scale(t, b).as_f64().max(1.0);
    let shift = default_eta::<f64>() * scale / 100.0;
    // Slightly larger than the cell tolerance so tangencies are kept.
    let slack = S::lit(256.0) * S::epsilon() * (S::lit(scale) + delta + S::one());
    let capsules: Vec<Capsule<S>> = t.edges().map(|e| Capsule::new(e, delta + slack)).collect();
    let edges: Vec<Segment<S>> = b.edges().collect();

    let y_ext = |item: Item| -> (f64, f64) {
        match item {
            Item::Edge(j) => {
                let e = edges[j];
                (e.a.y.min(e.b.y).as_f64(), e.a.y.max(e.b.y).as_f64())
            }
            Item::Capsule(i) => {
                let (lo, hi) = capsules[i].bbox();
                (lo.y.as_f64(), hi.y.as_f64())
            }
        }
    };

    let mut events: Vec<(f64, Kind, Item)> = Vec::with_capacity(2 * (edges.len() + capsules.len()));
    let mut push = |lo: Point2<S>, hi: Point2<S>, item: Item, salt: u64| {
        let w = 2.0 * shift;
        events.push((
            lo.x.as_f64() - w + shift * jitter(lo, salt),
            Kind::Enter,
            item,
        ));
        events.push((
            hi.x.as_f64() + w + shift * jitter(hi, salt + 1),
            Kind::Leave,
            item,
        ));
    };
    for (j, e) in edges.iter().enumerate() {
        let lo = Point2::new(e.a.x.min(e.b.x), e.a.y.min(e.b.y));
        let hi = Point2::new(e.a.x.max(e.b.x), e.a.y.max(e.b.y));
        push(lo, hi, Item::Edge(j), 2 * j as u64);
    }
    for (i, c) in capsules.iter().enumerate() {
        let (lo, hi) = c.bbox();
        push(lo, hi, Item::Capsule(i), (1 << 32) + 2 * i as u64);
    }
    events.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let w = 2.0 * shift;
    let overlaps = |p: (f64, f64), q: (f64, f64)| p.0 - w <= q.1 + w && q.0 - w <= p.1 + w;
    let mut active_edges: Vec<usize> = Vec::new();
    let mut active_caps: Vec<usize> = Vec::new();
    let mut found = Vec::new();
    for (_, kind, item) in events {
        match (kind, item) {
            (Kind::Enter, Item::Edge(j)) => {
                let ye = y_ext(item);
                for &i in &active_caps {
                    if overlaps(ye, y_ext(Item::Capsule(i))) && capsules[i].meets(&edges[j]) {
                        found.push((i, j));
                    }
                }
                active_edges.push(j);
            }
            (Kind::Enter, Item::Capsule(i)) => {
                let yc = y_ext(item);
                for &j in &active_edges {
                    if overlaps(yc, y_ext(Item::Edge(j))) && capsules[i].meets(&edges[j]) {
                        found.push((i, j));
                    }
                }
                active_caps.push(i);
            }
            (Kind::Leave, Item::Edge(j)) => active_edges.retain(|&x| x != j),
            (Kind::Leave, Item::Capsule(i)) => active_caps.retain(|&x| x != i),
        }
    }
    found
        .into_iter()
        .filter(|&(i, j)| !FreeCell::new(t.edge(i), b.edge(j), i, j, delta).is_empty())
        .collect()
}

/// Brute-force reference: every cell tested with the cell predicate.
pub fn nonempty_cells_brute<S: Scalar>(
    t: &PolygonalCurve<S>,
    b: &PolygonalCurve<S>,
    delta: S,
) -> CellSet {
    (0..t.num_edges())
        .flat_map(|i| (0..b.num_edges()).map(move |j| (i, j)))
        .filter(|&(i, j)| !FreeCell::new(t.edge(i), b.edge(j), i, j, delta).is_empty())
        .collect()
}

/// Result of the packed-input decider with its simplification data.
#[derive(Debug, Clone, PartialEq)]
pub struct CpackedOutcome<S> {
    pub inner: ApxOutcome<S>,
    /// `δ' = δ/(1 − 2ε')`.
    pub delta_inner: S,
    pub mu: S,
    pub target_vertices: usize,
    pub base_vertices: usize,
    /// Nonempty cells of the simplified pair at `δ'`.
    pub cells: usize,
}

/// Decides between `d_S^k(T, B) ≤ (3+ε)δ` and `d_S^k(T, B) > δ` on
/// simplified curves, visiting only the nonempty cells.
pub fn decide_apx_cpacked<S: Scalar>(
    t: &PolygonalCurve<S>,
    b: &PolygonalCurve<S>,
    k: usize,
    delta: S,
    eps: S,
) -> Result<ApxVerdict, DecideError> {
    Ok(
        decide_apx_cpacked_with(t, b, k, delta, eps, &ApxOptions::default())?
            .inner
            .verdict,
    )
}

pub fn decide_apx_cpacked_with<S: Scalar>(
    t: &PolygonalCurve<S>,
    b: &PolygonalCurve<S>,
    k: usize,
    delta: S,
    eps: S,
    opts: &ApxOptions<S>,
) -> Result<CpackedOutcome<S>, DecideError> {
    if !(eps > S::zero() && eps <= S::one()) {
        return Err(param_error("eps", "in (0, 1]", eps.as_f64()).into());
    }
    if !(delta > S::zero()) || !delta.is_finite() {
        return Err(param_error("delta", "positive and finite", delta.as_f64()).into());
    }
    let eps_inner = eps / S::lit(20.0);
    let delta_inner = delta / (S::one() - S::lit(2.0) * eps_inner);
    let mu = eps_inner * delta_inner;
    let ts = simplify(t, mu);
    let bs = simplify(b, mu);
    let radius = delta_inner + opts.eta * joint_scale(&ts, &bs);
    let cells = nonempty_cells_sweep(&ts, &bs, radius);
    let inner = decide_apx_inner(&ts, &bs, k, delta_inner, eps_inner, Some(&cells), opts)?;
    Ok(CpackedOutcome {
        inner,
        delta_inner,
        mu,
        target_vertices: ts.num_vertices(),
        base_vertices: bs.num_vertices(),
        cells: cells.len(),
    })
}
