//! Reduction from k-Table-SUM to the k-shortcut Fréchet decision.
//!
//! The target curve runs along the x-axis with a twist at every focal
//! point; the base curve consists of leftward mirror edges near `y = ±1`
//! joined by connector edges that stay outside the hippodrome (the
//! 1-neighbourhood of the target) except for short vertical crossings.
//! An instance is solvable iff `d_S^{4k+2}(T, B) ≤ 1`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{
    curve_frechet_decide, joint_scale, GeometryError, Point2, PolygonalCurve, Segment,
};
use crate::scalar::default_eta;

type P = Point2<f64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HardnessError {
    #[error("instance is malformed: {0}")]
    Instance(String),
    #[error("brute force needs {work} combinations, above the limit of {limit}")]
    Budget { work: f64, limit: f64 },
    #[error("construction parameter violates {0}")]
    Parameter(String),
    #[error("coordinates reach {0:e}, beyond the supported magnitude")]
    Magnitude(f64),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// `k` tables of `n` non-negative integers and a target sum.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KTableSumInstance {
    pub tables: Vec<Vec<u64>>,
    pub sigma: u64,
}

pub const BRUTE_FORCE_LIMIT: f64 = 1e7;

impl KTableSumInstance {
    pub fn new(tables: Vec<Vec<u64>>, sigma: u64) -> Result<Self, HardnessError> {
        let inst = Self { tables, sigma };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<(), HardnessError> {
        if let Some(first) = self.tables.first() {
            if first.is_empty() {
                return Err(HardnessError::Instance("tables must be non-empty".into()));
            }
            if self.tables.iter().any(|t| t.len() != first.len()) {
                return Err(HardnessError::Instance(
                    "all tables must have the same length".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.tables.len()
    }

    pub fn n(&self) -> usize {
        self.tables.first().map_or(0, Vec::len)
    }

    /// Largest achievable sum.
    pub fn max_sum(&self) -> u64 {
        self.tables
            .iter()
            .map(|t| t.iter().copied().max().unwrap_or(0))
            .sum()
    }

    /// Sorted tables with minimum 0. A target below the sum of minima is
    /// replaced by `max_sum + 1`, which is just as unreachable.
    pub fn normalized(&self) -> Self {
        let mut tables = self.tables.clone();
        let mut offset = 0u64;
        for t in &mut tables {
            t.sort_unstable();
            let m = t.first().copied().unwrap_or(0);
            offset += m;
            t.iter_mut().for_each(|v| *v -= m);
        }
        let mut out = Self { tables, sigma: 0 };
        out.sigma = self.sigma.checked_sub(offset).unwrap_or(out.max_sum() + 1);
        out
    }

    pub fn is_normalized(&self) -> bool {
        self.tables
            .iter()
            .all(|t| t.windows(2).all(|w| w[0] <= w[1]) && t.first() == Some(&0))
    }
}

/// Finds indices (one per table) whose values sum to `sigma`.
pub fn solve_ktablesum_bruteforce(
    inst: &KTableSumInstance,
) -> Result<Option<Vec<usize>>, HardnessError> {
    inst.validate()?;
    let (k, n) = (inst.k(), inst.n());
    let work = (n as f64).powi(k as i32);
    if work > BRUTE_FORCE_LIMIT {
        return Err(HardnessError::Budget {
            work,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let mut idx = vec![0usize; k];
    loop {
        let sum: u64 = idx.iter().zip(&inst.tables).map(|(&i, t)| t[i]).sum();
        if sum == inst.sigma {
            return Ok(Some(idx));
        }
        // Odometer increment.
        let mut pos = 0;
        loop {
            if pos == k {
                return Ok(None);
            }
            idx[pos] += 1;
            if idx[pos] < n {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// Optional replacements for the default construction parameters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct HardnessOverrides {
    pub eps_gadget: Option<f64>,
    pub gamma: Option<f64>,
    pub beta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GadgetParams {
    pub delta: f64,
    pub delta_prime: f64,
    /// Focal points `p1..p4` (x-coordinates on the axis).
    pub focal: [f64; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardnessParams {
    /// Buffer half-width of the construction, not the approximation ε.
    pub eps_gadget: f64,
    pub gamma: f64,
    pub beta: f64,
    /// `λ⁰..λ^{k+1}`; `λ^i` is the entry-edge length of gadget `i`.
    pub lambda: Vec<f64>,
    pub gadgets: Vec<GadgetParams>,
    pub init_focal: f64,
    pub terminal_focal: f64,
    /// Target actually encoded (see [`KTableSumInstance::normalized`]),
    /// clamped to `max_sum + 1`.
    pub sigma: u64,
}

impl HardnessParams {
    /// Focal points of the whole instance, left to right.
    pub fn focal_points(&self) -> Vec<f64> {
        let mut v = vec![self.init_focal];
        v.extend(self.gadgets.iter().flat_map(|g| g.focal));
        v.push(self.terminal_focal);
        v
    }
}

/// A leftward horizontal base edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MirrorEdge {
    /// Right end, traversed first.
    pub start: P,
    pub end: P,
}

impl MirrorEdge {
    fn new(start: P, end: P) -> Self {
        Self { start, end }
    }

    pub fn y(&self) -> f64 {
        self.start.y
    }

    pub fn x_range(&self) -> (f64, f64) {
        (self.start.x.min(self.end.x), self.start.x.max(self.end.x))
    }

    pub fn segment(&self) -> Segment<f64> {
        Segment::new(self.start, self.end)
    }
}

/// Mirror edges of encoding gadget `i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodingGadget {
    /// `e_j` from `c_j` to `d_j`.
    pub choice: Vec<MirrorEdge>,
    /// `e'_j` from `c'_j` to `d'_j`.
    pub recombine: Vec<MirrorEdge>,
    /// `ē` from `ā` to `b̄`.
    pub meet: MirrorEdge,
    /// `e^i_*` from `a^i_*` to `b^i_*`.
    pub exit: MirrorEdge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GadgetId {
    Initialization,
    Encoding(usize),
    Terminal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MirrorRole {
    /// `e^0_*`, the entry edge of the first encoding gadget.
    Entry,
    Choice(usize),
    Recombine(usize),
    Meet,
    Exit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EdgeKind {
    Mirror(MirrorRole),
    /// Joins the mirror edge `from` to `to` (either may be a curve end).
    Connector {
        from: Option<MirrorRole>,
        to: Option<MirrorRole>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeRole {
    pub gadget: GadgetId,
    pub kind: EdgeKind,
}

impl EdgeRole {
    fn touches(&self, g: GadgetId, pred: impl Fn(MirrorRole) -> bool) -> bool {
        self.gadget == g
            && matches!(self.kind, EdgeKind::Connector { from, to }
                if from.is_some_and(&pred) || to.is_some_and(&pred))
    }
}

/// Open rectangle around a focal point the base curve must avoid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BufferRect {
    pub center: f64,
    pub half_width: f64,
    pub half_height: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardnessInstance {
    pub target: PolygonalCurve<f64>,
    pub base: PolygonalCurve<f64>,
    pub shortcut_budget: usize,
    pub threshold: f64,
    pub params: HardnessParams,
    /// Role of every base edge.
    pub edge_roles: Vec<EdgeRole>,
    pub entry: MirrorEdge,
    pub gadgets: Vec<EncodingGadget>,
    pub buffers: Vec<BufferRect>,
    pub tables: KTableSumInstance,
}

/// Coordinates beyond this make the δ = 1 predicates meaningless in f64.
pub const MAX_COORDINATE: f64 = (1u64 << 40) as f64;

/// Absolute slack `η·scale` that [`HardnessInstance::decision_eta`] aims for.
pub const DECISION_SLACK: f64 = 1e-9;

impl HardnessInstance {
    /// Tolerance to decide this instance with. The twists at the focal
    /// points admit a lens of height about `sqrt(2·η·scale)`, and the nearly
    /// flat shortcuts between gadgets magnify it by roughly `δ`, so the
    /// scale-relative default is too loose here. This caps the absolute
    /// slack at [`DECISION_SLACK`].
    pub fn decision_eta(&self) -> f64 {
        let scale = joint_scale(&self.target, &self.base);
        default_eta::<f64>().min(DECISION_SLACK / scale.max(1.0))
    }
}

fn line_x_at(a: P, b: P, y: f64) -> f64 {
    a.x + (b.x - a.x) * (y - a.y) / (b.y - a.y)
}

/// Intersection of the line through `a, b` with `H_y`.
fn meet_h(a: P, b: P, y: f64) -> P {
    P::new(line_x_at(a, b, y), y)
}

/// Intersection of the lines `a b` and `c d`.
fn meet(a: P, b: P, c: P, d: P) -> P {
    let (r, s) = (b - a, d - c);
    let t = (c - a).cross(s) / r.cross(s);
    a + r * t
}

fn derive_params(inst: &KTableSumInstance, ov: &HardnessOverrides) -> HardnessParams {
    let k = inst.k();
    let n = inst.n().max(1) as f64;
    let eps = ov.eps_gadget.unwrap_or(2.5);
    let gamma = ov.gamma.unwrap_or(16.0 * (k as f64 + 1.0) + 5.0);
    let mut lambda = vec![2.0 * gamma, 2.0 * gamma];
    for t in &inst.tables {
        let m = t.iter().copied().max().unwrap_or(0) as f64;
        lambda.push(lambda.last().unwrap() + gamma * m);
    }
    let beta = ov
        .beta
        .unwrap_or_else(|| (32.0 + 4.0 * lambda[k]).max(lambda[k + 1]) + 1.0);
    let mut gadgets = Vec::with_capacity(k);
    // a^0_* = (3γ + 2ε, -1); each gadget starts δ to its right.
    let mut a_x = 3.0 * gamma + 2.0 * eps;
    for (i, t) in inst.tables.iter().enumerate() {
        let lam = lambda[i + 1];
        let m = gamma * t.iter().copied().max().unwrap_or(0) as f64;
        let dp = lam + eps;
        let d = (2.0 * eps + 1.0).max((n - 1.0) * (lam + beta) - dp);
        let p1 = a_x + d;
        let p2 = p1 + d + dp;
        let p3 = p2 + d + dp + m;
        let p4 = p3 + d + m + dp;
        gadgets.push(GadgetParams {
            delta: d,
            delta_prime: dp,
            focal: [p1, p2, p3, p4],
        });
        a_x = p4 + m + dp;
    }
    let lam = lambda[k + 1];
    let b_x = a_x - lam;
    HardnessParams {
        eps_gadget: eps,
        gamma,
        beta,
        init_focal: eps + gamma,
        terminal_focal: b_x + lam + eps,
        lambda,
        gadgets,
        sigma: inst.sigma.min(inst.max_sum() + 1),
    }
}

/// Which parameter invariants fail.
pub fn parameter_violations(inst: &KTableSumInstance, p: &HardnessParams) -> Vec<String> {
    let k = inst.k();
    let mut out = Vec::new();
    if !(p.eps_gadget > 2.0 && p.eps_gadget < 16.0) {
        out.push(format!("2 < eps_gadget < 16 (got {})", p.eps_gadget));
    }
    let g_min = 16.0 * (k as f64 + 1.0) + 5.0;
    if p.gamma < g_min {
        out.push(format!("gamma >= {g_min} (got {})", p.gamma));
    }
    if k > 0 {
        let b_min = (32.0 + 4.0 * p.lambda[k]).max(p.lambda[k + 1]);
        if p.beta <= b_min {
            out.push(format!("beta > {b_min} (got {})", p.beta));
        }
    }
    out
}

struct Builder {
    pts: Vec<P>,
    roles: Vec<EdgeRole>,
    lane: usize,
}

#[derive(Clone, Copy)]
enum Side {
    Above,
    Below,
}

impl Side {
    fn sign(self) -> f64 {
        match self {
            Side::Above => 1.0,
            Side::Below => -1.0,
        }
    }
}

impl Builder {
    fn last(&self) -> P {
        *self.pts.last().expect("started")
    }

    fn push(&mut self, p: P, role: EdgeRole) {
        self.pts.push(p);
        self.roles.push(role);
    }

    fn mirror(&mut self, gadget: GadgetId, role: MirrorRole, e: &MirrorEdge) {
        debug_assert!(self.last().dist(e.start) < 1e-9 * (1.0 + e.start.max_abs()));
        self.push(
            e.end,
            EdgeRole {
                gadget,
                kind: EdgeKind::Mirror(role),
            },
        );
    }

    fn straight(
        &mut self,
        gadget: GadgetId,
        from: Option<MirrorRole>,
        to_role: Option<MirrorRole>,
        to: P,
    ) {
        self.push(
            to,
            EdgeRole {
                gadget,
                kind: EdgeKind::Connector { from, to: to_role },
            },
        );
    }

    /// Leaves vertically on side `exit`, runs along a private lane outside
    /// the hippodrome (around the far left end if the sides differ) and
    /// arrives vertically at `to` from side `approach`.
    #[allow(clippy::too_many_arguments)]
    fn around(
        &mut self,
        gadget: GadgetId,
        from: Option<MirrorRole>,
        to_role: Option<MirrorRole>,
        to: P,
        exit: Side,
        approach: Side,
    ) {
        let q = self.lane as f64;
        self.lane += 1;
        let lane = 2.0 + 0.25 * q;
        let left = -3.0 - 0.25 * q;
        let start = self.last();
        let mut way = vec![P::new(start.x, exit.sign() * lane)];
        if exit.sign() != approach.sign() {
            way.push(P::new(left, exit.sign() * lane));
            way.push(P::new(left, approach.sign() * lane));
        }
        way.push(P::new(to.x, approach.sign() * lane));
        way.push(to);
        let role = EdgeRole {
            gadget,
            kind: EdgeKind::Connector { from, to: to_role },
        };
        for w in way {
            self.push(w, role);
        }
    }
}

/// Builds the curves for a k-Table-SUM instance with default parameters
/// unless overridden. Parameter invariants are validated.
pub fn build_instance(
    inst: &KTableSumInstance,
    overrides: &HardnessOverrides,
) -> Result<HardnessInstance, HardnessError> {
    inst.validate()?;
    let norm = inst.normalized();
    let params = derive_params(&norm, overrides);
    let bad = parameter_violations(&norm, &params);
    if !bad.is_empty() {
        return Err(HardnessError::Parameter(bad.join("; ")));
    }
    assemble(norm, params)
}

/// Like [`build_instance`] but skips parameter validation, for probing the
/// invariant checker with broken parameters.
pub fn build_instance_unchecked(
    inst: &KTableSumInstance,
    overrides: &HardnessOverrides,
) -> Result<HardnessInstance, HardnessError> {
    inst.validate()?;
    let norm = inst.normalized();
    let params = derive_params(&norm, overrides);
    assemble(norm, params)
}

fn assemble(
    inst: KTableSumInstance,
    params: HardnessParams,
) -> Result<HardnessInstance, HardnessError> {
    let (eps, gamma) = (params.eps_gadget, params.gamma);
    let k = inst.k();
    let n = inst.n();
    let mut b = Builder {
        pts: vec![P::new(0.0, 1.0)],
        roles: Vec::new(),
        lane: 0,
    };
    use GadgetId::*;
    use MirrorRole::*;

    let entry = MirrorEdge::new(
        P::new(3.0 * gamma + 2.0 * eps, -1.0),
        P::new(gamma + 2.0 * eps, -1.0),
    );
    b.around(
        Initialization,
        None,
        Some(Entry),
        entry.start,
        Side::Above,
        Side::Below,
    );
    b.mirror(Initialization, Entry, &entry);

    let mut prev = entry;
    let mut prev_role = Entry;
    let mut gadgets = Vec::with_capacity(k);
    for (gi, table) in inst.tables.iter().enumerate() {
        let g = Encoding(gi + 1);
        let gp = &params.gadgets[gi];
        let m = gamma * table.iter().copied().max().unwrap_or(0) as f64;
        let lam = params.lambda[gi + 1];
        let (a, bb) = (prev.start, prev.end);
        let [p1, p2, p3, p4] = gp.focal.map(|x| P::new(x, 0.0));
        // Step 1.
        let d1 = meet_h(a, p1, 1.0);
        let c1 = meet_h(bb, p1, 1.0);
        // Step 2: copies shifted by s_j, pulled back onto the p1-cone.
        let mut c = Vec::with_capacity(n);
        let mut d = Vec::with_capacity(n);
        for j in 0..n {
            let s = P::new(j as f64 * (params.beta + lam), 0.0);
            if j == 0 {
                c.push(c1);
                d.push(d1);
            } else {
                d.push(meet(a, p1, d1 - s, p2));
                c.push(meet(bb, p1, c1 - s, p2));
            }
        }
        // Step 3.
        let c1p = meet_h(d1, p2, -1.0);
        let d1p = meet_h(c1, p2, -1.0);
        let bbar = meet_h(c1p, p3, 1.0) - P::new(m, 0.0);
        let abar = meet_h(d1p, p3, 1.0);
        let mut cp = Vec::with_capacity(n);
        let mut dp = Vec::with_capacity(n);
        for (j, &v) in table.iter().enumerate() {
            let sv = gamma * v as f64;
            let bj = bbar + P::new(m - sv, 0.0);
            let aj = abar - P::new(sv, 0.0);
            cp.push(meet(d[j], p2, bj, p3));
            dp.push(meet(c[j], p2, aj, p3));
        }
        // Step 4.
        let b_star = meet_h(abar, p4, -1.0);
        let a_star = meet_h(bbar, p4, -1.0);

        let gad = EncodingGadget {
            choice: (0..n).map(|j| MirrorEdge::new(c[j], d[j])).collect(),
            recombine: (0..n).map(|j| MirrorEdge::new(cp[j], dp[j])).collect(),
            meet: MirrorEdge::new(abar, bbar),
            exit: MirrorEdge::new(a_star, b_star),
        };

        // Routing, in base-curve order.
        b.around(
            g,
            Some(prev_role),
            Some(Choice(0)),
            c[0],
            Side::Below,
            Side::Above,
        );
        b.mirror(g, Choice(0), &gad.choice[0]);
        for j in 1..n {
            b.around(
                g,
                Some(Choice(j - 1)),
                Some(Choice(j)),
                c[j],
                Side::Above,
                Side::Below,
            );
            b.mirror(g, Choice(j), &gad.choice[j]);
        }
        // e'_n first: later items must sit to the left of earlier ones.
        b.around(
            g,
            Some(Choice(n - 1)),
            Some(Recombine(n - 1)),
            cp[n - 1],
            Side::Above,
            Side::Above,
        );
        b.mirror(g, Recombine(n - 1), &gad.recombine[n - 1]);
        for j in (0..n - 1).rev() {
            b.straight(g, Some(Recombine(j + 1)), Some(Recombine(j)), cp[j]);
            b.mirror(g, Recombine(j), &gad.recombine[j]);
        }
        b.around(
            g,
            Some(Recombine(0)),
            Some(Meet),
            abar,
            Side::Below,
            Side::Above,
        );
        b.mirror(g, Meet, &gad.meet);
        b.around(g, Some(Meet), Some(Exit), a_star, Side::Above, Side::Below);
        b.mirror(g, Exit, &gad.exit);

        prev = gad.exit;
        prev_role = Exit;
        gadgets.push(gad);
    }

    // Terminal gadget.
    let lam = params.lambda[k + 1];
    let x_end = prev.end.x + 2.0 * lam + 2.0 * eps - gamma * (params.sigma as f64 + 1.0);
    b.around(
        Terminal,
        Some(prev_role),
        None,
        P::new(x_end, 1.0),
        Side::Below,
        Side::Above,
    );

    let mut t = vec![P::new(0.0, 0.0)];
    for f in params.focal_points() {
        t.extend([
            P::new(f - 1.0, 0.0),
            P::new(f + 1.0, 0.0),
            P::new(f - 1.0, 0.0),
        ]);
    }
    t.push(P::new(x_end, 0.0));

    let mag = b
        .pts
        .iter()
        .chain(&t)
        .map(|p| p.max_abs())
        .fold(0.0, f64::max);
    if mag > MAX_COORDINATE {
        return Err(HardnessError::Magnitude(mag));
    }
    let buffers = params
        .focal_points()
        .into_iter()
        .map(|c| BufferRect {
            center: c,
            half_width: eps,
            half_height: 1.5,
        })
        .collect();
    let base = PolygonalCurve::new(b.pts)?;
    // Construction never repeats a point, so edges and roles line up.
    debug_assert_eq!(base.num_edges(), b.roles.len());
    Ok(HardnessInstance {
        target: PolygonalCurve::new(t)?,
        base,
        shortcut_budget: 4 * k + 2,
        threshold: 1.0,
        params,
        edge_roles: b.roles,
        entry,
        gadgets,
        buffers,
        tables: inst,
    })
}

/// One-touch shortcut curve obtained by projecting through the focal
/// points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    /// `B(0)`, the projected vertices, then `B(1)`.
    pub curve: PolygonalCurve<f64>,
    /// Vertex on each exit edge `e^i_*` (index 0 is `e^0_*`).
    pub exit_points: Vec<P>,
    /// `‖v^i_* − b^i_*‖` for each exit edge.
    pub offsets: Vec<f64>,
    /// Whether every projected vertex lands on its mirror edge.
    pub on_edges: bool,
    /// Distance between the last projection and `B(1)`.
    pub terminal_miss: f64,
}

fn project(v: P, focal: f64, y: f64) -> P {
    let r = -y / v.y;
    P::new(focal + r * (focal - v.x), y)
}

fn on_edge(v: P, e: &MirrorEdge, tol: f64) -> bool {
    let (lo, hi) = e.x_range();
    v.x >= lo - tol && v.x <= hi + tol && (v.y - e.y()).abs() <= tol
}

/// Projects `B(0)` through every focal point, choosing edge `indices[i]`
/// in gadget `i`. An index out of range is clamped.
pub fn one_touch_certificate(
    hi: &HardnessInstance,
    indices: &[usize],
) -> Result<Certificate, HardnessError> {
    let tol = 1e-9 * joint_scale(&hi.target, &hi.base);
    let p = &hi.params;
    let mut pts = vec![hi.base.first()];
    let mut v = project(hi.base.first(), p.init_focal, -1.0);
    let mut on_edges = on_edge(v, &hi.entry, tol);
    pts.push(v);
    let mut exits = vec![v];
    let mut offsets = vec![v.dist(hi.entry.end)];
    for (gi, g) in hi.gadgets.iter().enumerate() {
        let j = indices
            .get(gi)
            .copied()
            .unwrap_or(0)
            .min(g.choice.len() - 1);
        let f = p.gadgets[gi].focal;
        let steps = [
            (f[0], &g.choice[j]),
            (f[1], &g.recombine[j]),
            (f[2], &g.meet),
            (f[3], &g.exit),
        ];
        for (focal, e) in steps {
            v = project(v, focal, e.y());
            on_edges &= on_edge(v, e, tol);
            pts.push(v);
        }
        exits.push(v);
        offsets.push(v.dist(g.exit.end));
    }
    let last = project(v, p.terminal_focal, 1.0);
    pts.push(hi.base.last());
    Ok(Certificate {
        curve: PolygonalCurve::new(pts)?,
        exit_points: exits,
        offsets,
        on_edges,
        terminal_miss: last.dist(hi.base.last()),
    })
}

impl Certificate {
    /// Fréchet check against the target at `1 + slack·η·scale`.
    pub fn passes(&self, hi: &HardnessInstance, slack: f64) -> Result<bool, HardnessError> {
        let r = hi.threshold + slack * hi.decision_eta() * joint_scale(&hi.target, &hi.base);
        Ok(curve_frechet_decide(&hi.target, &self.curve, r)?)
    }

    /// Whether the vertex chain is rightwards 4-monotone: no vertex lies
    /// more than 4 left of an earlier one.
    pub fn is_rightwards_monotone(&self) -> bool {
        let mut best = f64::NEG_INFINITY;
        self.curve.vertices().iter().all(|q| {
            best = best.max(q.x);
            q.x + 4.0 >= best - 1e-9
        })
    }
}

/// Result of [`check_instance_invariants`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub band_membership: bool,
    pub separation: bool,
    pub buffer_avoidance: bool,
    pub hippodrome_containment: bool,
    pub forbidden_lines: bool,
    /// 4-monotonicity of the certificate of a solution, if one exists.
    pub certificate_monotone: Option<bool>,
    pub violations: Vec<String>,
}

impl InvariantReport {
    pub fn all_ok(&self) -> bool {
        self.band_membership
            && self.separation
            && self.buffer_avoidance
            && self.hippodrome_containment
            && self.forbidden_lines
            && self.certificate_monotone != Some(false)
    }
}

/// Whether the segment meets the open rectangle `(x0, x1) × (y0, y1)`.
fn meets_open_rect(s: &Segment<f64>, x0: f64, x1: f64, y0: f64, y1: f64) -> bool {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let d = s.dir();
    for (p, q) in [
        (-d.x, s.a.x - x0),
        (d.x, x1 - s.a.x),
        (-d.y, s.a.y - y0),
        (d.y, y1 - s.a.y),
    ] {
        if p == 0.0 {
            if q <= 0.0 {
                return false;
            }
            continue;
        }
        let r = q / p;
        if p < 0.0 {
            lo = lo.max(r);
        } else {
            hi = hi.min(r);
        }
    }
    // Strictly inside needs a parameter range of positive length, or an
    // interior point for degenerate segments.
    lo < hi
}

/// Parameter range of `s` (clipped to the band `|y| ≤ 1`) on lines through
/// `(f, 0)` that meet the mirror edge `e`. Only the far side of `H_0` counts:
/// a shortcut through the focal point has its ends on opposite sides.
fn cone_hits(s: &Segment<f64>, f: f64, e: &MirrorEdge) -> Option<(f64, f64)> {
    let (xlo, xhi) = e.x_range();
    let ye = e.y();
    let d = s.dir();
    let mut best: Option<(f64, f64)> = None;
    // With the sign of y fixed the condition is linear in u.
    {
        let sign = -ye.signum();
        let mut lo = 0.0f64;
        let mut hi = 1.0f64;
        let mut cons = |k0: f64, k1: f64| {
            // k0 + k1·u ≥ 0
            if k1 == 0.0 {
                if k0 < 0.0 {
                    hi = -1.0;
                }
            } else if k1 > 0.0 {
                lo = lo.max(-k0 / k1);
            } else {
                hi = hi.min(-k0 / k1);
            }
        };
        // sign·y > 0 and |y| ≤ 1.
        cons(sign * s.a.y, sign * d.y);
        cons(1.0 - sign * s.a.y, -sign * d.y);
        // x' = f + (x − f)·ye / y ∈ [xlo, xhi]  ⇔  multiply by y·sign > 0.
        let (w0, w1) = ((s.a.x - f) * ye, d.x * ye);
        cons(
            sign * (w0 - (xlo - f) * s.a.y),
            sign * (w1 - (xlo - f) * d.y),
        );
        cons(
            sign * ((xhi - f) * s.a.y - w0),
            sign * ((xhi - f) * d.y - w1),
        );
        if lo <= hi {
            best = Some(match best {
                Some((a, b)) => (a.min(lo), b.max(hi)),
                None => (lo, hi),
            });
        }
    }
    best
}

/// Checks the structural invariants the reduction relies on.
pub fn check_instance_invariants(hi: &HardnessInstance) -> InvariantReport {
    let mut v = Vec::new();
    let tol = 1e-9 * joint_scale(&hi.target, &hi.base);
    let mut mirrors: Vec<(GadgetId, MirrorRole, MirrorEdge)> =
        vec![(GadgetId::Initialization, MirrorRole::Entry, hi.entry)];
    for (gi, g) in hi.gadgets.iter().enumerate() {
        let id = GadgetId::Encoding(gi + 1);
        mirrors.extend(
            g.choice
                .iter()
                .enumerate()
                .map(|(j, e)| (id, MirrorRole::Choice(j), *e)),
        );
        mirrors.extend(
            g.recombine
                .iter()
                .enumerate()
                .map(|(j, e)| (id, MirrorRole::Recombine(j), *e)),
        );
        mirrors.push((id, MirrorRole::Meet, g.meet));
        mirrors.push((id, MirrorRole::Exit, g.exit));
    }

    let mut band = true;
    for (g, r, e) in &mirrors {
        let y = e.y();
        let level = (e.end.y - y).abs() <= tol;
        let in_band = (0.5 - tol..=1.0 + tol).contains(&y.abs());
        if !(level && in_band && e.start.x > e.end.x) {
            band = false;
            v.push(format!(
                "{g:?} {r:?}: not a leftward edge in the mirror band (y = {y})"
            ));
        }
    }

    let mut separation = true;
    for (gi, _) in hi.gadgets.iter().enumerate() {
        let id = GadgetId::Encoding(gi + 1);
        let own: Vec<_> = mirrors.iter().filter(|m| m.0 == id).collect();
        for (a, m1) in own.iter().enumerate() {
            for m2 in &own[a + 1..] {
                let (l1, h1) = m1.2.x_range();
                let (l2, h2) = m2.2.x_range();
                let gap = (l2 - h1).max(l1 - h2);
                if gap < 4.0 - tol {
                    separation = false;
                    v.push(format!(
                        "{id:?}: {:?} and {:?} only {gap:.3} apart",
                        m1.1, m2.1
                    ));
                }
            }
        }
    }

    let mut buffers = true;
    for (e, s) in hi.base.edges().enumerate() {
        for r in &hi.buffers {
            let (x0, x1) = (r.center - r.half_width + tol, r.center + r.half_width - tol);
            if meets_open_rect(&s, x0, x1, -r.half_height + tol, r.half_height - tol) {
                buffers = false;
                v.push(format!(
                    "base edge {e} enters the buffer zone at {}",
                    r.center
                ));
            }
        }
    }

    let t_end = hi.target.last().x;
    let hippo = |p: P| {
        let dx = if p.x < 0.0 {
            -p.x
        } else {
            (p.x - t_end).max(0.0)
        };
        (dx * dx + p.y * p.y).sqrt() <= 1.0 + tol
    };
    let mut contained = true;
    for (g, r, e) in &mirrors {
        if !(hippo(e.start) && hippo(e.end)) {
            contained = false;
            v.push(format!("{g:?} {r:?} leaves the hippodrome"));
        }
    }

    // Forbidden lines: a connector met (inside the band, away from its
    // attachment points) by a line through a focal point and a mirror edge.
    let mut lines_ok = true;
    let edges: Vec<Segment<f64>> = hi.base.edges().collect();
    let mut forbid = |what: String, f: f64, e: &MirrorEdge, conn: &dyn Fn(&EdgeRole) -> bool| {
        for (idx, role) in hi.edge_roles.iter().enumerate() {
            if !conn(role) {
                continue;
            }
            let s = &edges[idx];
            if let Some((u0, u1)) = cone_hits(s, f, e) {
                let len = s.length();
                let attach = |u: f64| {
                    let p = s.at(u);
                    mirrors.iter().any(|m| {
                        m.2.start.dist(p) <= 1e-7 * (1.0 + len)
                            || m.2.end.dist(p) <= 1e-7 * (1.0 + len)
                    })
                };
                if (u1 - u0) * len > 1e-7 * (1.0 + len) || !(attach(u0) && attach(u1)) {
                    lines_ok = false;
                    v.push(format!("{what}: base edge {idx} on a line through {f}"));
                }
            }
        }
    };
    for (gi, g) in hi.gadgets.iter().enumerate() {
        let id = GadgetId::Encoding(gi + 1);
        let f = hi.params.gadgets[gi].focal;
        let entry = if gi == 0 {
            hi.entry
        } else {
            hi.gadgets[gi - 1].exit
        };
        forbid(format!("{id:?} p1"), f[0], &entry, &|r| {
            r.touches(id, |m| matches!(m, MirrorRole::Choice(_)))
        });
        for e in &g.choice {
            forbid(format!("{id:?} p2"), f[1], e, &|r| {
                r.touches(id, |m| matches!(m, MirrorRole::Recombine(_)))
            });
        }
        for (j, e) in g.recombine.iter().enumerate() {
            forbid(format!("{id:?} p3"), f[2], e, &|r| {
                r.touches(id, |m| matches!(m, MirrorRole::Recombine(l) if l > j))
            });
        }
    }

    let certificate_monotone = match solve_ktablesum_bruteforce(&hi.tables) {
        Ok(Some(idx)) => one_touch_certificate(hi, &idx)
            .ok()
            .map(|c| c.is_rightwards_monotone()),
        _ => None,
    };
    if certificate_monotone == Some(false) {
        v.push("certificate of a solution is not rightwards 4-monotone".into());
    }

    InvariantReport {
        band_membership: band,
        separation,
        buffer_avoidance: buffers,
        hippodrome_containment: contained,
        forbidden_lines: lines_ok,
        certificate_monotone,
        violations: v,
    }
}
