//! Reference oracles and generators for tests: discrete Fréchet on dense
//! samplings, brute-force shortcut search, random curves.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::geometry::{param_error, CurveLocation, GeometryError, Point2, PolygonalCurve};
use crate::scalar::Scalar;

/// Points of a curve sampled `per_edge` times along every edge. Vertices
/// are always included, so the polyline through the samples is the curve.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSampling<S> {
    pub points: Vec<Point2<S>>,
    /// Location of each sample on the curve.
    pub locations: Vec<CurveLocation<S>>,
}

impl<S: Scalar> DenseSampling<S> {
    pub fn new(curve: &PolygonalCurve<S>, per_edge: usize) -> Self {
        let per_edge = per_edge.max(1);
        let mut points = Vec::with_capacity(curve.num_edges() * per_edge + 1);
        let mut locations = Vec::with_capacity(points.capacity());
        for (e, seg) in curve.edges().enumerate() {
            for k in 0..per_edge {
                let u = S::lit(k as f64 / per_edge as f64);
                points.push(seg.at(u));
                locations.push(CurveLocation::new(e, u));
            }
        }
        points.push(curve.last());
        locations.push(curve.end_location());
        Self { points, locations }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Discrete Fréchet distance of two point sequences.
pub fn discrete_frechet<S: Scalar>(p: &[Point2<S>], q: &[Point2<S>]) -> S {
    if p.is_empty() || q.is_empty() {
        return S::infinity();
    }
    let m = q.len();
    let mut prev = vec![S::infinity(); m];
    let mut cur = vec![S::infinity(); m];
    for (i, a) in p.iter().enumerate() {
        for (j, b) in q.iter().enumerate() {
            let d = a.dist(*b);
            let best = match (i, j) {
                (0, 0) => d,
                (0, _) => cur[j - 1],
                (_, 0) => prev[0],
                _ => prev[j].min(prev[j - 1]).min(cur[j - 1]),
            };
            cur[j] = best.max(d);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[m - 1]
}

/// Shortcut search over endpoint candidates on a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BruteOptions {
    /// Candidate shortcut endpoints per base edge.
    pub grid: usize,
    /// Samples per edge for the discrete comparison.
    pub per_edge: usize,
    /// Refuse to run above this many candidate shortcut curves.
    pub budget: u64,
}

impl Default for BruteOptions {
    fn default() -> Self {
        Self {
            grid: 4,
            per_edge: 6,
            budget: 10_000_000,
        }
    }
}

/// A shortcut curve found by the brute-force search.
#[derive(Debug, Clone, PartialEq)]
pub struct BruteHit<S> {
    /// `(from, to)` base locations of each shortcut.
    pub shortcuts: Vec<(CurveLocation<S>, CurveLocation<S>)>,
    pub curve: PolygonalCurve<S>,
    pub discrete: S,
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Searches shortcut curves of `b` with at most `k` proper shortcuts whose
/// endpoints lie on a grid, comparing each with `t` by discrete Fréchet on
/// vertex-inclusive samplings. Discrete Fréchet on such samplings bounds
/// the continuous distance from above, so a hit is a sound certificate.
pub fn brute_shortcut_decide<S: Scalar>(
    t: &PolygonalCurve<S>,
    b: &PolygonalCurve<S>,
    k: usize,
    delta: S,
    opts: &BruteOptions,
) -> Result<Option<BruteHit<S>>, GeometryError> {
    let grid = opts.grid.max(1);
    let mut cands = Vec::new();
    for e in 0..b.num_edges() {
        for g in 0..=grid {
            if g == grid && e + 1 < b.num_edges() {
                continue;
            }
            cands.push(CurveLocation::new(e, S::lit(g as f64 / grid as f64)));
        }
    }
    let n = cands.len() as u64;
    let work: u64 = (0..=k as u64)
        .map(|r| binomial(n, 2 * r))
        .fold(0u64, u64::saturating_add);
    if work > opts.budget {
        return Err(param_error(
            "brute budget",
            "within the configured budget",
            work as f64,
        ));
    }
    let ts = DenseSampling::new(t, opts.per_edge);
    let mut chosen = Vec::new();
    search(b, k, delta, opts, &cands, 0, &ts.points, &mut chosen)
}

#[allow(clippy::too_many_arguments)]
fn search<S: Scalar>(
    b: &PolygonalCurve<S>,
    k: usize,
    delta: S,
    opts: &BruteOptions,
    cands: &[CurveLocation<S>],
    from: usize,
    ts: &[Point2<S>],
    chosen: &mut Vec<(usize, usize)>,
) -> Result<Option<BruteHit<S>>, GeometryError> {
    if let Some(hit) = evaluate(b, delta, opts, cands, ts, chosen)? {
        return Ok(Some(hit));
    }
    if chosen.len() == k {
        return Ok(None);
    }
    for s in from..cands.len() {
        for e in (s + 1)..cands.len() {
            if cands[s].edge == cands[e].edge {
                continue;
            }
            chosen.push((s, e));
            let hit = search(b, k, delta, opts, cands, e, ts, chosen)?;
            chosen.pop();
            if hit.is_some() {
                return Ok(hit);
            }
        }
    }
    Ok(None)
}

fn evaluate<S: Scalar>(
    b: &PolygonalCurve<S>,
    delta: S,
    opts: &BruteOptions,
    cands: &[CurveLocation<S>],
    ts: &[Point2<S>],
    chosen: &[(usize, usize)],
) -> Result<Option<BruteHit<S>>, GeometryError> {
    let mut pts = Vec::new();
    let mut cursor = CurveLocation::start();
    for &(s, e) in chosen {
        pts.extend_from_slice(b.subcurve(cursor, cands[s])?.vertices());
        pts.push(b.point_at(cands[e])?);
        cursor = cands[e];
    }
    pts.extend_from_slice(b.subcurve(cursor, b.end_location())?.vertices());
    let curve = PolygonalCurve::new(pts)?;
    let bs = DenseSampling::new(&curve, opts.per_edge);
    let d = discrete_frechet(ts, &bs.points);
    Ok((d <= delta).then(|| BruteHit {
        shortcuts: chosen.iter().map(|&(s, e)| (cands[s], cands[e])).collect(),
        curve,
        discrete: d,
    }))
}

/// Deterministic RNG for tests and experiments.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random walk with `n` vertices and steps of length at most `step`.
pub fn random_walk<S: Scalar, R: Rng>(rng: &mut R, n: usize, step: f64) -> PolygonalCurve<S> {
    let mut p = (0.0f64, 0.0f64);
    let mut pts = Vec::with_capacity(n);
    for _ in 0..n.max(2) {
        pts.push(Point2::new(S::lit(p.0), S::lit(p.1)));
        p.0 += rng.gen_range(-step..=step);
        p.1 += rng.gen_range(-step..=step);
    }
    PolygonalCurve::new(pts).expect("finite random walk")
}

/// `base` perturbed by uniform noise of amplitude `noise` per coordinate.
pub fn perturbed<S: Scalar, R: Rng>(
    rng: &mut R,
    base: &PolygonalCurve<S>,
    noise: f64,
) -> PolygonalCurve<S> {
    let pts = base
        .vertices()
        .iter()
        .map(|p| {
            Point2::new(
                p.x + S::lit(rng.gen_range(-noise..=noise)),
                p.y + S::lit(rng.gen_range(-noise..=noise)),
            )
        })
        .collect();
    PolygonalCurve::new(pts).expect("finite perturbation")
}

/// A noisy copy of `base` with `outliers` vertices pushed `spike` away, the
/// typical input where shortcuts help.
pub fn with_outliers<S: Scalar, R: Rng>(
    rng: &mut R,
    base: &PolygonalCurve<S>,
    noise: f64,
    outliers: usize,
    spike: f64,
) -> PolygonalCurve<S> {
    let mut pts: Vec<Point2<S>> = perturbed(rng, base, noise).vertices().to_vec();
    let n = pts.len();
    if n > 2 {
        for _ in 0..outliers {
            let at = rng.gen_range(1..n - 1);
            let ang = rng.gen_range(0.0..std::f64::consts::TAU);
            pts[at] = pts[at] + Point2::new(S::lit(spike * ang.cos()), S::lit(spike * ang.sin()));
        }
    }
    PolygonalCurve::new(pts).expect("finite outliers")
}

/// A curve of `legs` straight legs in random directions, each split into
/// `per_leg` pieces at random collinear points. A ball meets each leg in a
/// single segment no longer than its diameter, so the curve is
/// `2·legs`-packed.
pub fn packed_legs<S: Scalar, R: Rng>(
    rng: &mut R,
    legs: usize,
    per_leg: usize,
    leg_length: f64,
) -> PolygonalCurve<S> {
    let mut p = (0.0f64, 0.0f64);
    let mut pts = vec![Point2::new(S::lit(p.0), S::lit(p.1))];
    for _ in 0..legs.max(1) {
        let ang = rng.gen_range(0.0..std::f64::consts::TAU);
        let (dx, dy) = (leg_length * ang.cos(), leg_length * ang.sin());
        let mut cuts: Vec<f64> = (1..per_leg.max(1))
            .map(|_| rng.gen_range(0.0..1.0))
            .collect();
        cuts.sort_by(f64::total_cmp);
        cuts.push(1.0);
        for u in cuts {
            pts.push(Point2::new(S::lit(p.0 + u * dx), S::lit(p.1 + u * dy)));
        }
        p = (p.0 + dx, p.1 + dy);
    }
    PolygonalCurve::new(pts).expect("finite legs")
}
