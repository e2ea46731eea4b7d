//! Exact decision of the k-shortcut Fréchet distance.
//!
//! Rounds `s = 0..=k` sweep the free-space diagram row by row. Round `s`
//! holds every point reachable with at most `s` proper tunnels; new points
//! come from neighbouring cells, from vertical tunnels inside one target
//! edge, and from diagonal tunnels whose targets are found with
//! line-stabbing wedges.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::freespace::{merge_intervals, FreeCell, ReachGenerator};
use crate::geometry::{
    curve_frechet_decide, joint_scale, param_error, segment_to_curve_frechet_decide, CurveLocation,
    GeometryError, PolygonalCurve, Segment,
};
use crate::scalar::{default_eta, Scalar};
use crate::stabbing::{Disk, Wedge};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecideError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// How a generator came to exist; enough to walk a witness path backwards.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Source<S> {
    Init,
    /// From the right side of cell `(i-1, j)`; index into that cell's list.
    Left {
        gen: usize,
    },
    /// From the top side of cell `(i, j-1)`.
    Bottom {
        gen: usize,
    },
    /// Vertical tunnel from the leftmost point `(x, y)` of cell `(i, b)`.
    Vertical {
        b: usize,
        gen: usize,
        x: S,
        y: S,
    },
    /// Diagonal tunnel from the base interval `[lo, hi]` of cell `(a, b)`.
    Diagonal {
        a: usize,
        b: usize,
        lo: S,
        hi: S,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tagged<S> {
    pub gen: ReachGenerator<S>,
    pub round: usize,
    pub source: Source<S>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Tracker<S> {
    x: S,
    y: S,
    b: usize,
    gen: usize,
}

fn better<S: Scalar>(a: Option<Tracker<S>>, b: Option<Tracker<S>>) -> Option<Tracker<S>> {
    match (a, b) {
        (Some(p), Some(q)) => {
            if (q.x, q.y) < (p.x, p.y) {
                Some(q)
            } else {
                Some(p)
            }
        }
        (x, None) | (None, x) => x,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactOptions<S> {
    /// Predicate tolerance η; the radius used is `δ + η·scale`.
    pub eta: S,
    /// Recover a witness on a positive answer.
    pub witness: bool,
}

impl<S: Scalar> Default for ExactOptions<S> {
    fn default() -> Self {
        Self {
            eta: default_eta(),
            witness: true,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactStats {
    pub rounds: usize,
    pub generators: usize,
    pub wedges: usize,
}

/// A shortcut: the base jumps from `base_from` to `base_to` while the target
/// moves from `target_from` to `target_to`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tunnel<S> {
    pub target_from: CurveLocation<S>,
    pub target_to: CurveLocation<S>,
    pub base_from: CurveLocation<S>,
    pub base_to: CurveLocation<S>,
}

impl<S: Scalar> Tunnel<S> {
    pub fn is_proper(&self) -> bool {
        self.base_from.edge != self.base_to.edge
    }

    pub fn segment(&self, b: &PolygonalCurve<S>) -> Result<Segment<S>, GeometryError> {
        Ok(Segment::new(
            b.point_at(self.base_from)?,
            b.point_at(self.base_to)?,
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness<S> {
    pub tunnels: Vec<Tunnel<S>>,
    /// Base curve with each tunnel replaced by its segment.
    pub shortcut_curve: PolygonalCurve<S>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certification {
    pub tunnels_ok: Vec<bool>,
    pub proper: bool,
    pub replay_ok: bool,
}

impl Certification {
    pub fn passed(&self) -> bool {
        self.proper && self.replay_ok && self.tunnels_ok.iter().all(|&b| b)
    }
}

impl<S: Scalar> Witness<S> {
    pub fn from_tunnels(
        b: &PolygonalCurve<S>,
        tunnels: Vec<Tunnel<S>>,
    ) -> Result<Self, GeometryError> {
        let mut pts = Vec::new();
        let mut cursor = CurveLocation::start();
        for t in &tunnels {
            let piece = b.subcurve(cursor, t.base_from)?;
            pts.extend_from_slice(piece.vertices());
            pts.push(b.point_at(t.base_to)?);
            cursor = t.base_to;
        }
        pts.extend_from_slice(b.subcurve(cursor, b.end_location())?.vertices());
        Ok(Self {
            shortcut_curve: PolygonalCurve::new(pts)?,
            tunnels,
        })
    }

    /// Checks each tunnel's price and the whole shortcut curve at `radius`.
    pub fn certify(
        &self,
        t: &PolygonalCurve<S>,
        b: &PolygonalCurve<S>,
        radius: S,
    ) -> Result<Certification, GeometryError> {
        let mut tunnels_ok = Vec::with_capacity(self.tunnels.len());
        for tn in &self.tunnels {
            let ok = tn.target_from.ordinal() <= tn.target_to.ordinal()
                && segment_to_curve_frechet_decide(
                    &tn.segment(b)?,
                    &t.subcurve(tn.target_from, tn.target_to)?,
                    radius,
                )?;
            tunnels_ok.push(ok);
        }
        Ok(Certification {
            proper: self.tunnels.iter().all(Tunnel::is_proper),
            replay_ok: curve_frechet_decide(t, &self.shortcut_curve, radius)?,
            tunnels_ok,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactOutcome<S> {
    pub reachable: bool,
    /// Smallest round at which the far corner became reachable.
    pub shortcuts: Option<usize>,
    pub witness: Option<Witness<S>>,
    /// Radius actually used, `δ + η·scale`.
    pub radius: S,
    pub stats: ExactStats,
}

/// Reachability state over all rounds.
pub struct ExactState<'a, S: Scalar> {
    t: &'a PolygonalCurve<S>,
    b: &'a PolygonalCurve<S>,
    radius: S,
    min_interval: S,
    nt: usize,
    nb: usize,
    cells: Vec<FreeCell<S>>,
    /// `rounds[s][cell]`: cumulative generators of round `s`.
    rounds: Vec<Vec<Vec<Tagged<S>>>>,
    /// `leftmost[s][cell(i, j)]`: leftmost point over cells `(i, 0..=j)`.
    leftmost: Vec<Vec<Option<Tracker<S>>>>,
    pub stats: ExactStats,
}

impl<'a, S: Scalar> ExactState<'a, S> {
    pub fn new(t: &'a PolygonalCurve<S>, b: &'a PolygonalCurve<S>, radius: S, eta: S) -> Self {
        let (nt, nb) = (t.num_edges(), b.num_edges());
        let mut cells = Vec::with_capacity(nt * nb);
        for j in 0..nb {
            for i in 0..nt {
                cells.push(FreeCell::new(t.edge(i), b.edge(j), i, j, radius));
            }
        }
        Self {
            t,
            b,
            radius,
            min_interval: eta,
            nt,
            nb,
            cells,
            rounds: Vec::new(),
            leftmost: Vec::new(),
            stats: ExactStats::default(),
        }
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nt + i
    }

    pub fn cell(&self, i: usize, j: usize) -> &FreeCell<S> {
        &self.cells[self.idx(i, j)]
    }

    /// Generators of cell `(i, j)` after round `s`.
    pub fn generators(&self, s: usize, i: usize, j: usize) -> &[Tagged<S>] {
        &self.rounds[s][self.idx(i, j)]
    }

    pub fn rounds_done(&self) -> usize {
        self.rounds.len()
    }

    /// Seeds entering `(i, j)` from its left and bottom neighbours in round
    /// `s`, plus the initial seed of the first cell.
    pub fn step_neighbors(
        &self,
        s: usize,
        i: usize,
        j: usize,
    ) -> Vec<(ReachGenerator<S>, Source<S>)> {
        let mut out = Vec::new();
        let cell = self.cell(i, j);
        if s == 0 && i == 0 && j == 0 && cell.contains(S::zero(), S::zero()) {
            out.push((ReachGenerator::full(), Source::Init));
        }
        let cur = &self.rounds[s];
        if i > 0 {
            let left = self.cell(i - 1, j);
            let best = cur[self.idx(i - 1, j)]
                .iter()
                .enumerate()
                .filter_map(|(k, g)| left.right_interval(&g.gen).map(|r| (r.0, k)))
                .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            if let Some((lo, gen)) = best {
                out.push((
                    ReachGenerator::new(lo, S::one(), S::zero()),
                    Source::Left { gen },
                ));
            }
        }
        if j > 0 {
            let below = self.cell(i, j - 1);
            let best = cur[self.idx(i, j - 1)]
                .iter()
                .enumerate()
                .filter_map(|(k, g)| below.top_interval(&g.gen).map(|r| (r.0, k)))
                .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            if let Some((lo, gen)) = best {
                out.push((ReachGenerator::halfplane(lo), Source::Bottom { gen }));
            }
        }
        out
    }

    /// Vertical tunnel seed: everything right of the leftmost point reached
    /// in round `s-1` below row `j` of column `i`.
    pub fn step_vertical(
        &self,
        s: usize,
        i: usize,
        j: usize,
    ) -> Option<(ReachGenerator<S>, Source<S>)> {
        if s == 0 || j == 0 {
            return None;
        }
        let tr = self.leftmost[s - 1][self.idx(i, j - 1)]?;
        let g = vertical_tunnel(Some((tr.x, tr.y)))?;
        Some((
            g,
            Source::Vertical {
                b: tr.b,
                gen: tr.gen,
                x: tr.x,
                y: tr.y,
            },
        ))
    }

    fn disks(&self, a: usize, i: usize) -> Vec<Disk<S>> {
        ((a + 1)..=i)
            .map(|v| Disk::new(self.t.vertex(v), self.radius))
            .collect()
    }

    /// Diagonal tunnel seeds for round `s`, for every cell, from the
    /// generators created in round `s-1`.
    pub fn step_diagonal(&mut self, s: usize) -> Vec<Vec<(ReachGenerator<S>, Source<S>)>> {
        let mut pending = vec![Vec::new(); self.cells.len()];
        if s == 0 {
            return pending;
        }
        for b in 0..self.nb {
            for a in 0..self.nt {
                let c = self.idx(a, b);
                let cell = &self.cells[c];
                let parts: Vec<(S, S)> = self.rounds[s - 1][c]
                    .iter()
                    .filter(|g| g.round == s - 1)
                    .filter_map(|g| cell.projection(&g.gen))
                    .collect();
                if parts.is_empty() {
                    continue;
                }
                for (lo, hi) in merge_intervals(parts, self.min_interval) {
                    let start = self.b.edge(b).sub(lo, hi);
                    for i in (a + 1)..self.nt {
                        let wedge = Wedge::build(start, self.disks(a, i));
                        self.stats.wedges += 1;
                        if wedge.is_empty() {
                            break;
                        }
                        for j in (b + 1)..self.nb {
                            let target = &self.cells[self.idx(i, j)];
                            let Some((f0, f1)) = target.y_extent() else {
                                continue;
                            };
                            let e = self.b.edge(j).sub(f0, f1);
                            for (u0, u1) in wedge.intersect_segment(&e) {
                                let (y0, y1) = (f0 + (f1 - f0) * u0, f0 + (f1 - f0) * u1);
                                pending[self.idx(i, j)].push((
                                    ReachGenerator::slab(y0, y1),
                                    Source::Diagonal { a, b, lo, hi },
                                ));
                            }
                        }
                    }
                }
            }
        }
        pending
    }

    /// Runs round `s`; returns whether any new generator appeared.
    pub fn run_round(&mut self, s: usize) -> bool {
        let pending = self.step_diagonal(s);
        let carried = if s == 0 {
            vec![Vec::new(); self.cells.len()]
        } else {
            self.rounds[s - 1].clone()
        };
        self.rounds.push(carried);
        self.leftmost.push(vec![None; self.cells.len()]);
        let mut fresh = false;
        for j in 0..self.nb {
            for i in 0..self.nt {
                let c = self.idx(i, j);
                let below = if j > 0 {
                    self.leftmost[s][self.idx(i, j - 1)]
                } else {
                    None
                };
                if self.cells[c].is_empty() {
                    self.leftmost[s][c] = below;
                    continue;
                }
                let mut cands = self.step_neighbors(s, i, j);
                cands.extend(self.step_vertical(s, i, j));
                cands.extend(pending[c].iter().copied());
                let cell = self.cells[c];
                for (g, source) in cands {
                    if !cell.seed_nonempty(&g) {
                        continue;
                    }
                    let list = &mut self.rounds[s][c];
                    if list.iter().any(|h| h.gen.dominates(&g)) {
                        continue;
                    }
                    list.push(Tagged {
                        gen: g,
                        round: s,
                        source,
                    });
                    self.stats.generators += 1;
                    fresh = true;
                }
                let mut best = below;
                for (k, g) in self.rounds[s][c].iter().enumerate() {
                    if let Some((x, y)) = cell.leftmost(&g.gen) {
                        best = better(best, Some(Tracker { x, y, b: j, gen: k }));
                    }
                }
                self.leftmost[s][c] = best;
            }
        }
        self.stats.rounds = s + 1;
        fresh
    }

    /// Whether the far corner is reachable after round `s`.
    pub fn corner_reached(&self, s: usize) -> Option<usize> {
        let c = self.idx(self.nt - 1, self.nb - 1);
        let cell = &self.cells[c];
        self.rounds[s][c]
            .iter()
            .position(|g| cell.member(&g.gen, S::one(), S::one()))
    }

    /// Walks back from the far corner through the generator sources.
    pub fn recover_witness(&self, s: usize) -> Option<Witness<S>> {
        let mut gi = self.corner_reached(s)?;
        let (mut i, mut j, mut list) = (self.nt - 1, self.nb - 1, s);
        let mut q = (S::one(), S::one());
        let mut tunnels = Vec::new();
        // Each step strictly moves to an earlier cell or round.
        for _ in 0..(self.cells.len() * (s + 2) + 4) {
            let c = self.idx(i, j);
            let cell = &self.cells[c];
            let g = self.rounds[list][c][gi];
            let r = g.round;
            match g.source {
                Source::Init => {
                    tunnels.reverse();
                    return Witness::from_tunnels(self.b, tunnels).ok();
                }
                Source::Left { gen } => {
                    q = (S::one(), g.gen.y_lo);
                    i -= 1;
                    list = r;
                    gi = gen;
                }
                Source::Bottom { gen } => {
                    q = (g.gen.x_cap.max(S::zero()), S::one());
                    j -= 1;
                    list = r;
                    gi = gen;
                }
                Source::Vertical { b, gen, x, y } => {
                    let q0 = cell.seed_point_below(&g.gen, q)?;
                    tunnels.push(Tunnel {
                        target_from: CurveLocation::new(i, x),
                        target_to: CurveLocation::new(i, q0.0.max(x)),
                        base_from: CurveLocation::new(b, y),
                        base_to: CurveLocation::new(j, q0.1),
                    });
                    q = (x, y);
                    j = b;
                    list = r - 1;
                    gi = gen;
                }
                Source::Diagonal { a, b, lo, hi } => {
                    let q0 = cell.seed_point_below(&g.gen, q)?;
                    let wedge = Wedge::build(self.b.edge(b).sub(lo, hi), self.disks(a, i));
                    let sl = wedge.start_for(self.b.edge(j).at(q0.1))?;
                    let ys = lo + (hi - lo) * sl;
                    let src = &self.cells[self.idx(a, b)];
                    // Generator of round r-1 whose projection is closest to ys.
                    let (k, ys) = self.rounds[r - 1][self.idx(a, b)]
                        .iter()
                        .enumerate()
                        .filter_map(|(k, h)| {
                            src.projection(&h.gen).map(|(p0, p1)| {
                                let y = ys.max(p0).min(p1);
                                (k, y, (y - ys).abs())
                            })
                        })
                        .min_by(|x, y| x.2.partial_cmp(&y.2).unwrap())
                        .map(|(k, y, _)| (k, y))?;
                    let (_, xr) = src.x_range_at(ys)?;
                    tunnels.push(Tunnel {
                        target_from: CurveLocation::new(a, xr),
                        target_to: CurveLocation::new(i, q0.0),
                        base_from: CurveLocation::new(b, ys),
                        base_to: CurveLocation::new(j, q0.1),
                    });
                    q = (xr, ys);
                    i = a;
                    j = b;
                    list = r - 1;
                    gi = k;
                }
            }
        }
        None
    }
}

/// Seed of a vertical tunnel inside one target edge: everything right of the
/// leftmost point `l` reached lower in the same column.
pub fn vertical_tunnel<S: Scalar>(l: Option<(S, S)>) -> Option<ReachGenerator<S>> {
    l.map(|(x, _)| ReachGenerator::halfplane(x))
}

fn check_delta<S: Scalar>(delta: S) -> Result<(), DecideError> {
    if !(delta >= S::zero()) || !delta.is_finite() {
        return Err(param_error("delta", "non-negative and finite", delta.as_f64()).into());
    }
    Ok(())
}

/// Decides whether `d_S^k(T, B) ≤ δ` with default options.
pub fn decide_exact<S: Scalar>(
    t: &PolygonalCurve<S>,
    b: &PolygonalCurve<S>,
    k: usize,
    delta: S,
) -> Result<ExactOutcome<S>, DecideError> {
    decide_exact_with(t, b, k, delta, &ExactOptions::default())
}

pub fn decide_exact_with<S: Scalar>(
    t: &PolygonalCurve<S>,
    b: &PolygonalCurve<S>,
    k: usize,
    delta: S,
    opts: &ExactOptions<S>,
) -> Result<ExactOutcome<S>, DecideError> {
    check_delta(delta)?;
    let radius = delta + opts.eta * joint_scale(t, b);
    let mut out = ExactOutcome {
        reachable: false,
        shortcuts: None,
        witness: None,
        radius,
        stats: ExactStats::default(),
    };
    if t.first().dist(b.first()) > radius || t.last().dist(b.last()) > radius {
        return Ok(out);
    }
    let mut state = ExactState::new(t, b, radius, opts.eta);
    for s in 0..=k {
        let fresh = state.run_round(s);
        if state.corner_reached(s).is_some() {
            out.reachable = true;
            out.shortcuts = Some(s);
            if opts.witness {
                out.witness = state.recover_witness(s);
            }
            break;
        }
        if !fresh {
            break;
        }
    }
    out.stats = state.stats;
    Ok(out)
}

/// Decision with as many shortcuts as the base curve has edges.
pub fn decide_shortcut_unbounded<S: Scalar>(
    t: &PolygonalCurve<S>,
    b: &PolygonalCurve<S>,
    delta: S,
) -> Result<ExactOutcome<S>, DecideError> {
    decide_exact(t, b, b.num_edges(), delta)
}

/// The k-shortcut distance to within `tol`, by bisection on the decider.
/// The returned value is always one the decider accepts.
pub fn shortcut_distance<S: Scalar>(
    t: &PolygonalCurve<S>,
    b: &PolygonalCurve<S>,
    k: usize,
    tol: S,
    eta: S,
) -> Result<S, DecideError> {
    if !(tol > S::zero()) {
        return Err(param_error("tol", "positive", tol.as_f64()).into());
    }
    let opts = ExactOptions {
        eta,
        witness: false,
    };
    let ends = t.first().dist(b.first()).max(t.last().dist(b.last()));
    let mut lo = ends;
    if decide_exact_with(t, b, k, lo, &opts)?.reachable {
        return Ok(lo);
    }
    let mut hi = t
        .vertices()
        .iter()
        .flat_map(|p| b.vertices().iter().map(move |q| p.dist(*q)))
        .fold(ends, S::max);
    while !decide_exact_with(t, b, k, hi, &opts)?.reachable {
        hi = hi * S::lit(2.0) + tol;
    }
    while hi - lo > tol {
        let mid = (lo + hi) * S::lit(0.5);
        if decide_exact_with(t, b, k, mid, &opts)?.reachable {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}
