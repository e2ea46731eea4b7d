//! The (3+ε)-approximate decider.
//!
//! Same row sweep as the exact decider, but a diagonal tunnel only starts
//! at the rightmost point reached in the lower-left quadrant of a cell, and
//! its landing set is approximated from the convex hull of eligible grid
//! points near the last target vertex.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::cpacked::CellSet;
pub use crate::decider_exact::vertical_tunnel;
use crate::decider_exact::DecideError;
use crate::freespace::{FreeCell, ReachGenerator};
use crate::geometry::{
    joint_scale, param_error, segment_to_curve_within, CurveLocation, Point2, PolygonalCurve,
    Segment,
};
use crate::scalar::{default_eta, Scalar};
use crate::stabbing::{apex_directions, rel_angle, DirectionSet, Disk};

/// The scaled integer grid `{(h·x, h·y) : x, y ∈ ℤ}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec<S> {
    pub spacing: S,
}

impl<S: Scalar> GridSpec<S> {
    /// Grid of spacing `δ·ε/√2`.
    pub fn new(delta: S, eps: S) -> Result<Self, DecideError> {
        let spacing = delta * eps / S::SQRT_2();
        if !(spacing > S::zero()) || !spacing.is_finite() {
            return Err(
                param_error("grid spacing", "positive and finite", spacing.as_f64()).into(),
            );
        }
        Ok(Self { spacing })
    }

    /// Grid points in the closed disk, grouped by column, each column
    /// ascending in y.
    pub fn columns_in_disk(&self, center: Point2<S>, radius: S) -> Vec<Vec<Point2<S>>> {
        let h = self.spacing;
        let c0 = ((center.x - radius) / h).ceil().to_i64().unwrap_or(0);
        let c1 = ((center.x + radius) / h).floor().to_i64().unwrap_or(-1);
        let mut out = Vec::new();
        for cx in c0..=c1 {
            let x = S::lit(cx as f64) * h;
            let dx = x - center.x;
            let rest = radius * radius - dx * dx;
            if rest < S::zero() {
                continue;
            }
            let w = rest.sqrt();
            let r0 = ((center.y - w) / h).ceil().to_i64().unwrap_or(0);
            let r1 = ((center.y + w) / h).floor().to_i64().unwrap_or(-1);
            let col: Vec<Point2<S>> = (r0..=r1)
                .map(|ry| Point2::new(x, S::lit(ry as f64) * h))
                .collect();
            if !col.is_empty() {
                out.push(col);
            }
        }
        out
    }
}

/// Convex hull by monotone chain, counter-clockwise, without collinear
/// points. Degenerate inputs give one or two vertices.
pub fn convex_hull<S: Scalar>(points: &[Point2<S>]) -> Vec<Point2<S>> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| (a.x, a.y).partial_cmp(&(b.x, b.y)).unwrap());
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let turn = |o: Point2<S>, a: Point2<S>, b: Point2<S>| (a - o).cross(b - o);
    let mut hull: Vec<Point2<S>> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Point2<S>>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2
                && turn(hull[hull.len() - 2], hull[hull.len() - 1], p) <= S::zero()
            {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    if hull.len() < 2 {
        // All points coincide after all; keep the extremes.
        return vec![pts[0], pts[pts.len() - 1]];
    }
    hull
}

/// Where diagonal tunnels from one apex towards one target vertex may land.
#[derive(Debug, Clone, PartialEq)]
pub enum TunnelRegion<S> {
    /// No grid point is eligible.
    Empty,
    /// The apex lies in the hull of eligible points: the whole cell.
    Everywhere,
    /// Points behind the hull as seen from the apex.
    Shadow {
        apex: Point2<S>,
        hull: Vec<Point2<S>>,
    },
}

/// `n·q ≥ c`.
#[derive(Debug, Clone, Copy)]
struct HalfPlane<S> {
    n: Point2<S>,
    c: S,
}

impl<S: Scalar> TunnelRegion<S> {
    /// Builds the region from eligible points: the hull `H`, then either
    /// the apex is inside or the region behind `H` inside the tangent cone.
    pub fn from_eligible(apex: Point2<S>, eligible: &[Point2<S>]) -> Self {
        if eligible.is_empty() {
            return TunnelRegion::Empty;
        }
        let hull = convex_hull(eligible);
        let scale = hull.iter().fold(apex.max_abs(), |m, p| m.max(p.max_abs())) + S::one();
        let tol = S::lit(1e-12) * scale;
        if hull_contains(&hull, apex, tol) {
            return TunnelRegion::Everywhere;
        }
        TunnelRegion::Shadow { apex, hull }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, TunnelRegion::Empty)
    }

    /// Whether the segment from the apex to `q` meets the hull.
    pub fn contains(&self, q: Point2<S>) -> bool {
        match self {
            TunnelRegion::Empty => false,
            TunnelRegion::Everywhere => true,
            TunnelRegion::Shadow { apex, hull } => {
                let e = Segment::new(q, q);
                clip_shadow(*apex, hull, &e).is_some()
            }
        }
    }

    /// Parameter interval of `e` inside the region. `Everywhere` gives the
    /// whole edge.
    pub fn landing(&self, e: &Segment<S>) -> Option<(S, S)> {
        match self {
            TunnelRegion::Empty => None,
            TunnelRegion::Everywhere => Some((S::zero(), S::one())),
            TunnelRegion::Shadow { apex, hull } => clip_shadow(*apex, hull, e),
        }
    }
}

fn on_segment<S: Scalar>(a: Point2<S>, b: Point2<S>, p: Point2<S>, tol: S) -> bool {
    Segment::new(a, b).dist_to_point(p) <= tol
}

fn hull_contains<S: Scalar>(hull: &[Point2<S>], p: Point2<S>, tol: S) -> bool {
    match hull.len() {
        0 => false,
        1 => hull[0].dist(p) <= tol,
        2 => on_segment(hull[0], hull[1], p, tol),
        n => (0..n).all(|k| {
            let (a, b) = (hull[k], hull[(k + 1) % n]);
            (b - a).cross(p - a) >= -tol * (b - a).norm()
        }),
    }
}

/// Clips `e` to the shadow of `hull` from `apex`.
fn clip_shadow<S: Scalar>(apex: Point2<S>, hull: &[Point2<S>], e: &Segment<S>) -> Option<(S, S)> {
    let scale = hull.iter().fold(
        apex.max_abs().max(e.a.max_abs()).max(e.b.max_abs()),
        |m, p| m.max(p.max_abs()),
    );
    let tol = S::lit(1e-12) * (scale + S::one());
    // Collinear with the apex: the shadow is a ray from the nearer end.
    let collinear = match hull.len() {
        1 => true,
        _ => hull
            .iter()
            .all(|&p| (hull[0] - apex).cross(p - apex).abs() <= tol * (hull[0] - apex).norm()),
    };
    if collinear {
        let near = hull
            .iter()
            .copied()
            .min_by(|a, b| a.dist(apex).partial_cmp(&b.dist(apex)).unwrap())?;
        return clip_ray(apex, near, e, tol);
    }
    // Tangent vertices: the extreme angles seen from the apex.
    let reference = (hull[0] - apex).unit();
    let angle = |p: Point2<S>| rel_angle(reference, p - apex);
    let lo = hull
        .iter()
        .copied()
        .min_by(|a, b| angle(*a).partial_cmp(&angle(*b)).unwrap())?;
    let hi = hull
        .iter()
        .copied()
        .max_by(|a, b| angle(*a).partial_cmp(&angle(*b)).unwrap())?;
    let mut planes = vec![
        // Counter-clockwise of `lo`, clockwise of `hi`.
        HalfPlane {
            n: (lo - apex).perp(),
            c: (lo - apex).perp().dot(apex),
        },
        HalfPlane {
            n: -(hi - apex).perp(),
            c: -(hi - apex).perp().dot(apex),
        },
    ];
    let n = hull.len();
    for k in 0..n {
        let (a, b) = (hull[k], hull[(k + 1) % n]);
        if n == 2 && k == 1 {
            break;
        }
        let side = (b - a).cross(apex - a);
        if side == S::zero() {
            continue;
        }
        // Keep the side of the edge line away from the apex.
        let nrm = (b - a).perp();
        let nrm = if nrm.dot(apex - a) > S::zero() {
            -nrm
        } else {
            nrm
        };
        if n > 2 && side > S::zero() {
            continue;
        }
        planes.push(HalfPlane {
            n: nrm,
            c: nrm.dot(a),
        });
    }
    clip(e, &planes, tol)
}

/// Cyrus–Beck clip of `e` against half-planes, with an absolute slack.
fn clip<S: Scalar>(e: &Segment<S>, planes: &[HalfPlane<S>], tol: S) -> Option<(S, S)> {
    let d = e.dir();
    let (mut u0, mut u1) = (S::zero(), S::one());
    for h in planes {
        let len = h.n.norm();
        if len == S::zero() {
            continue;
        }
        let k0 = h.n.dot(e.a) - h.c + tol * len;
        let k1 = h.n.dot(d);
        if k1 == S::zero() {
            if k0 < S::zero() {
                return None;
            }
        } else if k1 > S::zero() {
            u0 = u0.max(-k0 / k1);
        } else {
            u1 = u1.min(-k0 / k1);
        }
        if u0 > u1 {
            return None;
        }
    }
    Some((u0, u1))
}

fn clip_ray<S: Scalar>(apex: Point2<S>, from: Point2<S>, e: &Segment<S>, tol: S) -> Option<(S, S)> {
    let dir = from - apex;
    let planes = [
        // Beyond `from` along the ray.
        HalfPlane {
            n: dir,
            c: dir.dot(from),
        },
        // On the ray's line, both sides.
        HalfPlane {
            n: dir.perp(),
            c: dir.perp().dot(apex),
        },
        HalfPlane {
            n: -dir.perp(),
            c: -dir.perp().dot(apex),
        },
    ];
    clip(e, &planes, tol)
}

/// Eligible grid points for tunnels from `apex` along the target chain
/// `chain` (starting at the apex's target point, ending at `v_i`): grid
/// points `t` near `v_i` with `d_F(apex→t, chain) ≤ (1+ε)²·delta`.
/// Eligible points form a convex set, so only the lowest and highest
/// eligible point of every grid column is returned.
pub fn eligible_points<S: Scalar>(
    apex: Point2<S>,
    chain: &[Point2<S>],
    eps: S,
    delta: S,
    calls: &mut usize,
) -> Result<Vec<Point2<S>>, DecideError> {
    let grid = GridSpec::new(delta, eps)?;
    let one = S::one();
    let rho = (one + eps) * (one + eps) * delta;
    let v = *chain.last().expect("non-empty chain");
    if apex.dist(chain[0]) > rho {
        return Ok(Vec::new());
    }
    // Directions that stab the interior disks prune most grid points.
    let inner: Vec<Disk<S>> = chain[1..chain.len() - 1]
        .iter()
        .map(|&c| Disk::new(c, rho))
        .collect();
    let dirs = apex_directions(apex, &inner, None);
    let slack = S::lit(1e-6);
    let in_cone = |t: Point2<S>| match &dirs {
        DirectionSet::Empty => false,
        DirectionSet::Any => true,
        DirectionSet::Arc(arc) => {
            let w = t - apex;
            if w.norm2() == S::zero() {
                return true;
            }
            let th = rel_angle(arc.reference, w);
            th >= arc.lo - slack && th <= arc.hi + slack
        }
    };
    if dirs.is_empty() {
        return Ok(Vec::new());
    }
    let mut eligible = |t: Point2<S>| {
        if !in_cone(t) {
            return false;
        }
        *calls += 1;
        segment_to_curve_within(&Segment::new(apex, t), chain, rho)
    };
    // Beyond ρ from v no point is eligible, so the enumeration disk of
    // radius 3(1+ε)·delta can be cut down to ρ.
    let radius = rho.min(S::lit(3.0) * (one + eps) * delta);
    let mut out = Vec::new();
    for col in grid.columns_in_disk(v, radius) {
        let Some(lo) = col.iter().position(|&t| eligible(t)) else {
            continue;
        };
        out.push(col[lo]);
        if let Some(hi) = col[lo + 1..].iter().rposition(|&t| eligible(t)) {
            out.push(col[lo + 1 + hi]);
        }
    }
    Ok(out)
}

/// The approximate diagonal tunnel from the free-space point
/// `(r_t, r_b)` into cell `(i, j)` with distance parameter `delta`
/// (the decider passes 3δ). Returns the seed of the landing fragment.
#[allow(clippy::too_many_arguments)]
pub fn apx_diagonal_tunnel<S: Scalar>(
    t: &PolygonalCurve<S>,
    b: &PolygonalCurve<S>,
    r_t: CurveLocation<S>,
    r_b: CurveLocation<S>,
    cell: (usize, usize),
    eps: S,
    delta: S,
) -> Result<Option<ReachGenerator<S>>, DecideError> {
    check_eps_delta(eps, delta)?;
    let (i, j) = cell;
    if i <= r_t.edge || j <= r_b.edge || i >= t.num_edges() || j >= b.num_edges() {
        return Ok(None);
    }
    let chain = tunnel_chain(t, r_t, i)?;
    let apex = b.point_at(r_b)?;
    let mut calls = 0;
    let region = TunnelRegion::from_eligible(
        apex,
        &eligible_points(apex, &chain, eps, delta, &mut calls)?,
    );
    Ok(region_seed(&region, &b.edge(j)))
}

/// `T(r_t)` followed by the target vertices up to the start of edge `i`.
fn tunnel_chain<S: Scalar>(
    t: &PolygonalCurve<S>,
    r_t: CurveLocation<S>,
    i: usize,
) -> Result<Vec<Point2<S>>, DecideError> {
    let mut chain = vec![t.point_at(r_t)?];
    chain.extend((r_t.edge + 1..=i).map(|v| t.vertex(v)));
    Ok(chain)
}

fn region_seed<S: Scalar>(region: &TunnelRegion<S>, e: &Segment<S>) -> Option<ReachGenerator<S>> {
    match region {
        TunnelRegion::Everywhere => Some(ReachGenerator::full()),
        _ => region
            .landing(e)
            .map(|(u0, u1)| ReachGenerator::slab(u0, u1)),
    }
}

fn check_eps_delta<S: Scalar>(eps: S, delta: S) -> Result<(), DecideError> {
    if !(eps > S::zero() && eps <= S::one()) {
        return Err(param_error("eps", "in (0, 1]", eps.as_f64()).into());
    }
    if !(delta > S::zero()) || !delta.is_finite() {
        return Err(param_error("delta", "positive and finite", delta.as_f64()).into());
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ApxVerdict {
    /// `d_S^k(T, B) ≤ (3+ε)δ`.
    AtMost3PlusEpsDelta,
    /// `d_S^k(T, B) > δ`.
    GreaterThanDelta,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApxOptions<S> {
    /// Predicate tolerance η; the free-space radius is `δ + η·scale`.
    pub eta: S,
}

impl<S: Scalar> Default for ApxOptions<S> {
    fn default() -> Self {
        Self { eta: default_eta() }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApxStats {
    pub rounds: usize,
    pub generators: usize,
    /// Tunnel regions built (one per apex and target vertex).
    pub regions: usize,
    pub oracle_calls: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApxOutcome<S> {
    pub verdict: ApxVerdict,
    /// Round at which the far corner became reachable.
    pub shortcuts: Option<usize>,
    pub radius: S,
    /// The ε actually used inside the sweep, `ε/9`.
    pub eps_inner: S,
    pub stats: ApxStats,
}

/// A free-space point with its cell.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Pt<S> {
    i: usize,
    j: usize,
    x: S,
    y: S,
}

impl<S: Scalar> Pt<S> {
    fn gx(&self) -> S {
        S::lit(self.i as f64) + self.x
    }

    fn gy(&self) -> S {
        S::lit(self.j as f64) + self.y
    }
}

fn pick<S: Scalar>(a: Option<Pt<S>>, b: Option<Pt<S>>, rightmost: bool) -> Option<Pt<S>> {
    match (a, b) {
        (Some(p), Some(q)) => {
            let q_wins = if rightmost {
                q.gx() > p.gx() || (q.gx() == p.gx() && q.gy() < p.gy())
            } else {
                (q.gx(), q.gy()) < (p.gx(), p.gy())
            };
            Some(if q_wins { q } else { p })
        }
        (x, None) | (None, x) => x,
    }
}

/// Prefix maxima over columns, for the lower-left quadrant query.
struct QuadrantMax<S> {
    tree: Vec<Option<Pt<S>>>,
}

impl<S: Scalar> QuadrantMax<S> {
    fn new(n: usize) -> Self {
        Self {
            tree: vec![None; n],
        }
    }

    fn insert(&mut self, mut i: usize, p: Pt<S>) {
        while i < self.tree.len() {
            self.tree[i] = pick(self.tree[i], Some(p), true);
            i |= i + 1;
        }
    }

    /// Rightmost point over columns `0..=i`.
    fn query(&self, i: usize) -> Option<Pt<S>> {
        let mut out = None;
        let mut i = i as isize;
        while i >= 0 {
            out = pick(out, self.tree[i as usize], true);
            i = (i & (i + 1)) - 1;
        }
        out
    }
}

/// Leftmost and rightmost reachable point of a cell.
type Extremes<S> = (Option<Pt<S>>, Option<Pt<S>>);

/// Reachability state of the approximate sweep over all rounds.
///
/// Only the listed cells are visited; every other cell is treated as
/// having empty free space. Trackers are fed from visited cells alone.
pub struct ApxState<'a, S: Scalar> {
    t: &'a PolygonalCurve<S>,
    b: &'a PolygonalCurve<S>,
    eps: S,
    radius: S,
    /// Visited cells in row-major order.
    keys: Vec<(usize, usize)>,
    index: HashMap<(usize, usize), usize>,
    cells: Vec<FreeCell<S>>,
    /// `rounds[s][c]`: cumulative generators of round `s` at visited cell `c`.
    rounds: Vec<Vec<Vec<ReachGenerator<S>>>>,
    /// `own[s][c]`: leftmost and rightmost reachable point of visited cell `c`.
    own: Vec<Vec<Extremes<S>>>,
    regions: HashMap<(u64, u64, usize), TunnelRegion<S>>,
    pub stats: ApxStats,
}

impl<'a, S: Scalar> ApxState<'a, S> {
    /// State over every cell. `eps` is the inner ε (already divided by 9).
    pub fn new(t: &'a PolygonalCurve<S>, b: &'a PolygonalCurve<S>, radius: S, eps: S) -> Self {
        let (nt, nb) = (t.num_edges(), b.num_edges());
        Self::with_cells(
            t,
            b,
            radius,
            eps,
            (0..nb).flat_map(|j| (0..nt).map(move |i| (i, j))),
        )
    }

    /// State restricted to the given `(i, j)` cells.
    pub fn with_cells(
        t: &'a PolygonalCurve<S>,
        b: &'a PolygonalCurve<S>,
        radius: S,
        eps: S,
        cells: impl IntoIterator<Item = (usize, usize)>,
    ) -> Self {
        let (nt, nb) = (t.num_edges(), b.num_edges());
        let mut keys: Vec<(usize, usize)> = cells
            .into_iter()
            .filter(|&(i, j)| i < nt && j < nb)
            .collect();
        keys.sort_unstable_by_key(|&(i, j)| (j, i));
        keys.dedup();
        let index = keys.iter().enumerate().map(|(c, &k)| (k, c)).collect();
        let cells = keys
            .iter()
            .map(|&(i, j)| FreeCell::new(t.edge(i), b.edge(j), i, j, radius))
            .collect();
        Self {
            t,
            b,
            eps,
            radius,
            keys,
            index,
            cells,
            rounds: Vec::new(),
            own: Vec::new(),
            regions: HashMap::new(),
            stats: ApxStats::default(),
        }
    }

    /// Number of visited cells.
    pub fn visited(&self) -> usize {
        self.keys.len()
    }

    pub fn generators(&self, s: usize, i: usize, j: usize) -> &[ReachGenerator<S>] {
        match self.index.get(&(i, j)) {
            Some(&c) => &self.rounds[s][c],
            None => &[],
        }
    }

    fn neighbors(&self, s: usize, c: usize) -> Vec<ReachGenerator<S>> {
        let (i, j) = self.keys[c];
        let mut out = Vec::new();
        let cell = &self.cells[c];
        if s == 0 && i == 0 && j == 0 && cell.contains(S::zero(), S::zero()) {
            out.push(ReachGenerator::full());
        }
        let cur = &self.rounds[s];
        if let Some(&l) = i.checked_sub(1).and_then(|a| self.index.get(&(a, j))) {
            let left = &self.cells[l];
            let lo = cur[l]
                .iter()
                .filter_map(|g| left.right_interval(g))
                .map(|r| r.0)
                .reduce(S::min);
            out.extend(lo.map(|lo| ReachGenerator::new(lo, S::one(), S::zero())));
        }
        if let Some(&d) = j.checked_sub(1).and_then(|b| self.index.get(&(i, b))) {
            let below = &self.cells[d];
            let lo = cur[d]
                .iter()
                .filter_map(|g| below.top_interval(g))
                .map(|r| r.0)
                .reduce(S::min);
            out.extend(lo.map(ReachGenerator::halfplane));
        }
        out
    }

    fn diagonal(
        &mut self,
        r: Pt<S>,
        i: usize,
        j: usize,
    ) -> Result<Option<ReachGenerator<S>>, DecideError> {
        let key = (r.gx().as_f64().to_bits(), r.gy().as_f64().to_bits(), i);
        if !self.regions.contains_key(&key) {
            // An empty region at an earlier vertex stays empty further on.
            let dead = (r.i + 1..i).any(|m| {
                self.regions
                    .get(&(key.0, key.1, m))
                    .is_some_and(TunnelRegion::is_empty)
            });
            let region = if dead {
                TunnelRegion::Empty
            } else {
                let chain = tunnel_chain(self.t, CurveLocation::new(r.i, r.x), i)?;
                let apex = self.b.edge(r.j).at(r.y);
                let delta = S::lit(3.0) * self.radius;
                let pts =
                    eligible_points(apex, &chain, self.eps, delta, &mut self.stats.oracle_calls)?;
                self.stats.regions += 1;
                TunnelRegion::from_eligible(apex, &pts)
            };
            self.regions.insert(key, region);
        }
        Ok(region_seed(&self.regions[&key], &self.b.edge(j)))
    }

    /// Runs round `s`; returns whether any new generator appeared.
    pub fn run_round(&mut self, s: usize) -> Result<bool, DecideError> {
        let n = self.keys.len();
        let carried = if s == 0 {
            vec![Vec::new(); n]
        } else {
            self.rounds[s - 1].clone()
        };
        self.rounds.push(carried);
        self.own.push(vec![(None, None); n]);
        // Round s-1 extremes of rows below the current one.
        let nt = self.t.num_edges();
        let mut column = vec![None; nt];
        let mut quadrant = QuadrantMax::new(nt);
        let mut fed = 0;
        let mut fresh = false;
        for c in 0..n {
            let (i, j) = self.keys[c];
            if s > 0 {
                while fed < n && self.keys[fed].1 < j {
                    let (l, r) = self.own[s - 1][fed];
                    let col = self.keys[fed].0;
                    column[col] = pick(column[col], l, false);
                    if let Some(r) = r {
                        quadrant.insert(col, r);
                    }
                    fed += 1;
                }
            }
            let cell = self.cells[c];
            if cell.is_empty() {
                continue;
            }
            let mut cands = self.neighbors(s, c);
            if s > 0 && j > 0 {
                cands.extend(vertical_tunnel(column[i].map(|p: Pt<S>| (p.x, p.y))));
                if i > 0 {
                    if let Some(r) = quadrant.query(i - 1) {
                        cands.extend(self.diagonal(r, i, j)?);
                    }
                }
            }
            for g in cands {
                if !cell.seed_nonempty(&g) {
                    continue;
                }
                let list = &mut self.rounds[s][c];
                if list.iter().any(|h| h.dominates(&g)) {
                    continue;
                }
                list.push(g);
                self.stats.generators += 1;
                fresh = true;
            }
            let (mut left, mut right) = (None, None);
            for g in &self.rounds[s][c] {
                if let Some((x, y)) = cell.leftmost(g) {
                    left = pick(left, Some(Pt { i, j, x, y }), false);
                }
                if let Some((x, y)) = cell.rightmost(g) {
                    right = pick(right, Some(Pt { i, j, x, y }), true);
                }
            }
            self.own[s][c] = (left, right);
        }
        self.stats.rounds = s + 1;
        Ok(fresh)
    }

    pub fn corner_reached(&self, s: usize) -> bool {
        let corner = (self.t.num_edges() - 1, self.b.num_edges() - 1);
        let Some(&c) = self.index.get(&corner) else {
            return false;
        };
        let cell = &self.cells[c];
        self.rounds[s][c]
            .iter()
            .any(|g| cell.member(g, S::one(), S::one()))
    }
}

/// Decides between `d_S^k(T, B) ≤ (3+ε)δ` and `d_S^k(T, B) > δ`.
pub fn decide_apx<S: Scalar>(
    t: &PolygonalCurve<S>,
    b: &PolygonalCurve<S>,
    k: usize,
    delta: S,
    eps: S,
) -> Result<ApxVerdict, DecideError> {
    Ok(decide_apx_with(t, b, k, delta, eps, &ApxOptions::default())?.verdict)
}

pub fn decide_apx_with<S: Scalar>(
    t: &PolygonalCurve<S>,
    b: &PolygonalCurve<S>,
    k: usize,
    delta: S,
    eps: S,
    opts: &ApxOptions<S>,
) -> Result<ApxOutcome<S>, DecideError> {
    check_eps_delta(eps, delta)?;
    decide_apx_inner(t, b, k, delta, eps / S::lit(9.0), None, opts)
}

/// The sweep with the inner ε given directly, optionally restricted to a
/// set of cells known to contain all nonempty free space.
pub fn decide_apx_inner<S: Scalar>(
    t: &PolygonalCurve<S>,
    b: &PolygonalCurve<S>,
    k: usize,
    delta: S,
    eps_inner: S,
    cells: Option<&CellSet>,
    opts: &ApxOptions<S>,
) -> Result<ApxOutcome<S>, DecideError> {
    check_eps_delta(eps_inner, delta)?;
    let radius = delta + opts.eta * joint_scale(t, b);
    let mut out = ApxOutcome {
        verdict: ApxVerdict::GreaterThanDelta,
        shortcuts: None,
        radius,
        eps_inner,
        stats: ApxStats::default(),
    };
    if t.first().dist(b.first()) > radius || t.last().dist(b.last()) > radius {
        return Ok(out);
    }
    let mut state = match cells {
        Some(set) => ApxState::with_cells(t, b, radius, eps_inner, set.iter()),
        None => ApxState::new(t, b, radius, eps_inner),
    };
    for s in 0..=k {
        let fresh = state.run_round(s)?;
        if state.corner_reached(s) {
            out.verdict = ApxVerdict::AtMost3PlusEpsDelta;
            out.shortcuts = Some(s);
            break;
        }
        if !fresh {
            break;
        }
    }
    out.stats = state.stats;
    Ok(out)
}
