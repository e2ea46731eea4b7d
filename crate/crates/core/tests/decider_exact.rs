use proptest::prelude::*;
use rand::Rng;
use sfd_core::decider_exact::*;
use sfd_core::freespace::{reach_membership, FreeCell, ReachableSet};
use sfd_core::geometry::{curve_frechet_decide, joint_scale};
use sfd_core::scalar::default_eta;
use sfd_core::testkit::{brute_shortcut_decide, random_walk, rng, with_outliers, BruteOptions};
use sfd_core::{Curve2d, Point2d, Segment2d};

fn curve(xy: &[(f64, f64)]) -> Curve2d {
    Curve2d::from_xy(xy).unwrap()
}

fn zigzag() -> (Curve2d, Curve2d) {
    (
        curve(&[(0.0, 0.0), (2.0, 0.0)]),
        curve(&[(0.0, 0.0), (1.0, 1.0), (2.0, 0.0)]),
    )
}

fn yes(t: &Curve2d, b: &Curve2d, k: usize, delta: f64) -> bool {
    decide_exact(t, b, k, delta).unwrap().reachable
}

#[test]
fn identical_curves_need_no_shortcut() {
    let (_, b) = zigzag();
    let o = decide_exact(&b, &b, 0, 0.0).unwrap();
    assert!(o.reachable);
    assert_eq!(o.shortcuts, Some(0));
    assert!(decide_shortcut_unbounded(&b, &b, 0.0).unwrap().reachable);
}

#[test]
fn zigzag_examples() {
    let (t, b) = zigzag();
    assert!(!yes(&t, &b, 0, 0.9));
    assert_eq!(
        yes(&t, &b, 0, 0.9),
        curve_frechet_decide(&t, &b, 0.9).unwrap()
    );
    let o = decide_exact(&t, &b, 1, 0.1).unwrap();
    assert!(o.reachable);
    assert_eq!(o.shortcuts, Some(1));
    let w = o.witness.unwrap();
    assert_eq!(w.tunnels.len(), 1);
    assert!(w.tunnels[0].is_proper());
    assert_eq!(
        (w.tunnels[0].base_from.edge, w.tunnels[0].base_to.edge),
        (0, 1)
    );
    assert!(w.certify(&t, &b, o.radius).unwrap().passed());
    assert!(decide_shortcut_unbounded(&t, &b, 0.1).unwrap().reachable);
}

#[test]
fn far_endpoints_are_rejected() {
    let (t, b) = zigzag();
    let up = curve(&[(0.0, 2.0), (2.0, 2.0)]);
    assert!(!yes(&up, &b, 1, 0.9));
    let far = curve(&[(50.0, 50.0), (60.0, 50.0)]);
    assert!(!decide_shortcut_unbounded(&far, &t, 0.5).unwrap().reachable);
}

#[test]
fn negative_delta_is_an_error() {
    let (t, b) = zigzag();
    assert!(decide_exact(&t, &b, 1, -0.5).is_err());
    assert!(decide_exact(&t, &b, 1, f64::NAN).is_err());
}

#[test]
fn first_cell_starts_full_or_empty() {
    let t = curve(&[(0.0, 0.0), (1.0, 0.0)]);
    let near = curve(&[(0.0, 0.1), (1.0, 0.1)]);
    let mut st = ExactState::new(&t, &near, 0.2, default_eta());
    st.run_round(0);
    let g = st.generators(0, 0, 0);
    assert_eq!(g.len(), 1);
    assert!(matches!(g[0].source, Source::Init));
    let set = ReachableSet::with(st.cell(0, 0), vec![g[0].gen]);
    assert!(reach_membership(&set, (0.7, 0.75)));
    assert!(!reach_membership(&set, (0.7, 0.2)));

    // (0,0) outside F: nothing starts even though F is non-empty.
    let off = curve(&[(0.0, 0.5), (1.0, 0.0)]);
    let mut st = ExactState::new(&t, &off, 0.2, default_eta());
    st.run_round(0);
    assert!(!st.cell(0, 0).is_empty());
    assert!(st.generators(0, 0, 0).is_empty());
}

#[test]
fn vertical_tunnel_examples() {
    assert!(vertical_tunnel::<f64>(None).is_none());
    let e = Segment2d::new(Point2d::new(0.0, 0.0), Point2d::new(1.0, 0.0));
    let diag = FreeCell::new(e, e, 0, 0, 0.0);
    let full = ReachableSet::with(&diag, vec![vertical_tunnel(Some((0.0, 0.3))).unwrap()]);
    assert!(reach_membership(&full, (0.1, 0.1)));
    let half = ReachableSet::with(&diag, vec![vertical_tunnel(Some((0.5, 0.2))).unwrap()]);
    assert!(reach_membership(&half, (0.5, 0.5)));
    assert!(reach_membership(&half, (0.9, 0.9)));
    assert!(!reach_membership(&half, (0.4, 0.4)));
}

#[test]
fn zigzag_tunnel_is_vertical() {
    // One target edge: the jump between base edges stays in column 0.
    let (t, b) = zigzag();
    let radius = 0.1 + default_eta::<f64>() * joint_scale(&t, &b);
    let mut st = ExactState::new(&t, &b, radius, default_eta());
    st.run_round(0);
    assert!(st.corner_reached(0).is_none());
    st.run_round(1);
    let vert: Vec<_> = st
        .generators(1, 0, 1)
        .iter()
        .filter(|g| matches!(g.source, Source::Vertical { .. }))
        .collect();
    assert!(!vert.is_empty());
    let set = ReachableSet::with(st.cell(0, 1), vert.iter().map(|g| g.gen).collect());
    assert!(reach_membership(&set, (1.0, 1.0)));
    assert!(st.corner_reached(1).is_some());
}

#[test]
fn diagonal_tunnel_crosses_columns_and_rows() {
    // The base detours upward over two edges while the target runs straight
    // through (1,0); only a tunnel from base edge 0 to base edge 2 that
    // passes the disk at (1,0) works.
    let t = curve(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)]);
    let b = curve(&[(0.0, 0.0), (0.5, 0.0), (1.0, 3.0), (1.5, 0.0), (2.0, 0.0)]);
    let radius = 0.1 + default_eta::<f64>() * joint_scale(&t, &b);
    let mut st = ExactState::new(&t, &b, radius, default_eta());
    assert!(st.step_diagonal(0).iter().all(|c| c.is_empty()));
    st.run_round(0);
    assert!(st.corner_reached(0).is_none());
    st.run_round(1);
    let diag = st
        .generators(1, 1, 3)
        .iter()
        .filter(|g| matches!(g.source, Source::Diagonal { a: 0, b: 0, .. }))
        .count();
    assert!(diag > 0);
    assert!(st.corner_reached(1).is_some());
    let o = decide_exact(&t, &b, 1, 0.1).unwrap();
    let w = o.witness.unwrap();
    assert_eq!(
        (w.tunnels[0].base_from.edge, w.tunnels[0].base_to.edge),
        (0, 2)
    );
    // The tunnel starts on the free-space boundary; allow rounding.
    assert!(w.certify(&t, &b, o.radius + 1e-9).unwrap().passed());
    assert!(!yes(&t, &b, 0, 0.1));
}

#[test]
fn shortcut_distance_brackets_the_answer() {
    let (t, b) = zigzag();
    let tol = 1e-6;
    let v0 = shortcut_distance(&t, &b, 0, tol, default_eta()).unwrap();
    assert!((v0 - 1.0).abs() <= 2.0 * tol);
    assert!(yes(&t, &b, 0, v0));
    assert!(!yes(&t, &b, 0, v0 - 2.0 * tol));
    assert_eq!(
        shortcut_distance(&t, &b, 1, tol, default_eta()).unwrap(),
        0.0
    );
    assert!(shortcut_distance(&t, &b, 1, 0.0, default_eta()).is_err());
}

fn pair(seed: u64, n: usize) -> (Curve2d, Curve2d) {
    let mut r = rng(seed);
    let b: Curve2d = random_walk(&mut r, n, 1.0);
    let t = if r.gen_bool(0.5) {
        with_outliers(&mut r, &b, 0.2, 1, 2.0)
    } else {
        random_walk(&mut r, n, 1.0)
    };
    (t, b)
}

#[test]
fn zero_shortcuts_is_the_frechet_decision() {
    let mut checked = 0;
    for seed in 0..200u64 {
        let mut r = rng(1000 + seed);
        let n = r.gen_range(2..=10);
        let (t, b) = pair(seed, n);
        let delta = r.gen_range(0.2..3.0);
        let eta = default_eta::<f64>() * joint_scale(&t, &b);
        // Skip pairs whose distance sits inside the tolerance band.
        let inner = curve_frechet_decide(&t, &b, delta - 4.0 * eta).unwrap();
        let outer = curve_frechet_decide(&t, &b, delta + 4.0 * eta).unwrap();
        if inner != outer {
            continue;
        }
        assert_eq!(yes(&t, &b, 0, delta), inner, "seed {seed}");
        checked += 1;
    }
    assert!(checked >= 190);
}

#[test]
fn positive_answers_certify() {
    let mut positives = 0;
    for seed in 0..120u64 {
        let (t, b) = pair(seed, 5);
        for k in 1..=2 {
            let o = decide_exact(&t, &b, k, 1.2).unwrap();
            if let Some(w) = &o.witness {
                positives += 1;
                assert!(w.tunnels.len() <= k);
                assert_eq!(Some(w.tunnels.len()), o.shortcuts);
                let cert = w.certify(&t, &b, o.radius + 1e-9).unwrap();
                assert!(cert.passed(), "seed {seed} k {k}: {cert:?}");
                assert!(w.tunnels.iter().all(Tunnel::is_proper));
            } else {
                assert!(!o.reachable);
            }
        }
    }
    assert!(positives > 40, "only {positives} positive answers");
}

#[test]
fn brute_force_hits_are_accepted() {
    let opts = BruteOptions {
        grid: 3,
        per_edge: 6,
        budget: 2_000_000,
    };
    let mut hits = 0;
    for seed in 0..60u64 {
        let (t, b) = pair(500 + seed, 4);
        for k in 0..=1 {
            let delta = 1.0;
            if brute_shortcut_decide(&t, &b, k, delta, &opts)
                .unwrap()
                .is_some()
            {
                hits += 1;
                assert!(yes(&t, &b, k, delta), "seed {seed} k {k}");
            }
        }
    }
    assert!(hits > 5, "only {hits} brute-force hits");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn more_shortcuts_never_hurt(seed in any::<u64>(), k in 0..2usize, delta in 0.2..2.5f64) {
        let (t, b) = pair(seed, 5);
        if yes(&t, &b, k, delta) {
            prop_assert!(yes(&t, &b, k + 1, delta));
        }
    }

    #[test]
    fn larger_delta_never_hurts(seed in any::<u64>(), k in 0..3usize, delta in 0.2..2.5f64, extra in 1e-6..1.0f64) {
        let (t, b) = pair(seed, 5);
        if yes(&t, &b, k, delta) {
            prop_assert!(yes(&t, &b, k, delta + extra));
        }
    }

    #[test]
    fn witnesses_use_only_proper_tunnels(seed in any::<u64>(), k in 1..3usize) {
        let (t, b) = pair(seed, 6);
        let o = decide_exact(&t, &b, k, 1.5).unwrap();
        if let Some(w) = o.witness {
            prop_assert!(w.tunnels.iter().all(|tn| tn.base_from.edge != tn.base_to.edge));
        }
    }
}
