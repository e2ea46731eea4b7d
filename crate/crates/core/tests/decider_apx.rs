use proptest::prelude::*;
use rand::Rng;
use sfd_core::decider_apx::*;
use sfd_core::decider_exact::decide_exact;
use sfd_core::freespace::FreeCell;
use sfd_core::geometry::{
    segment_to_curve_frechet_decide, segment_to_curve_frechet_value, CurveLocation,
};
use sfd_core::testkit::{perturbed, random_walk, rng, with_outliers};
use sfd_core::{Curve2d, Point2d, Segment2d};

fn p(x: f64, y: f64) -> Point2d {
    Point2d::new(x, y)
}

fn curve(xy: &[(f64, f64)]) -> Curve2d {
    Curve2d::from_xy(xy).unwrap()
}

#[test]
fn identical_curves_are_at_most() {
    let b = curve(&[(0.0, 0.0), (1.0, 2.0), (3.0, 1.0), (4.0, 4.0)]);
    for k in 0..3 {
        assert_eq!(
            decide_apx(&b, &b, k, 0.5, 1.0).unwrap(),
            ApxVerdict::AtMost3PlusEpsDelta
        );
    }
}

#[test]
fn distant_parallel_curves_are_greater() {
    let t = curve(&[(0.0, 0.0), (5.0, 0.0)]);
    let b = curve(&[(0.0, 10.0), (5.0, 10.0)]);
    assert_eq!(
        decide_apx(&t, &b, 2, 1.0, 1.0).unwrap(),
        ApxVerdict::GreaterThanDelta
    );
}

#[test]
fn zigzag_with_one_shortcut() {
    let t = curve(&[(0.0, 0.0), (2.0, 0.0)]);
    let b = curve(&[(0.0, 0.0), (1.0, 1.0), (2.0, 0.0)]);
    let o = decide_apx_with(&t, &b, 1, 0.1, 0.5, &ApxOptions::default()).unwrap();
    assert_eq!(o.verdict, ApxVerdict::AtMost3PlusEpsDelta);
    assert_eq!(o.shortcuts, Some(1));
    assert!((o.eps_inner - 0.5 / 9.0).abs() < 1e-15);
    assert_eq!(
        decide_apx(&t, &b, 0, 0.1, 0.5).unwrap(),
        ApxVerdict::GreaterThanDelta
    );
}

#[test]
fn parameter_errors() {
    let t = curve(&[(0.0, 0.0), (2.0, 0.0)]);
    assert!(decide_apx(&t, &t, 1, 1.0, 0.0).is_err());
    assert!(decide_apx(&t, &t, 1, 1.0, 1.5).is_err());
    assert!(decide_apx(&t, &t, 1, 0.0, 0.5).is_err());
    assert!(decide_apx(&t, &t, 1, f64::INFINITY, 0.5).is_err());
    assert!(GridSpec::new(1.0, 0.0).is_err());
}

#[test]
fn grid_spacing_and_disk_enumeration() {
    let g = GridSpec::new(2.0, 0.5).unwrap();
    assert!((g.spacing - 1.0 / 2f64.sqrt()).abs() < 1e-15);

    // Unit grid, radius 1 at the origin: the origin and its 4 neighbours.
    let unit = GridSpec { spacing: 1.0 };
    let cols = unit.columns_in_disk(p(0.0, 0.0), 1.0);
    let pts: Vec<_> = cols.iter().flatten().collect();
    assert_eq!(pts.len(), 5);
    assert_eq!(cols.len(), 3);
    for col in &cols {
        assert!(col.windows(2).all(|w| w[0].y < w[1].y && w[0].x == w[1].x));
    }
    // Gauss circle count for radius 5.
    assert_eq!(
        unit.columns_in_disk(p(0.0, 0.0), 5.0)
            .iter()
            .flatten()
            .count(),
        81
    );
}

#[test]
fn hull_examples() {
    let sq = [
        p(0.0, 0.0),
        p(1.0, 0.0),
        p(1.0, 1.0),
        p(0.0, 1.0),
        p(0.5, 0.5),
        p(0.5, 0.0),
    ];
    let h = convex_hull(&sq);
    assert_eq!(h.len(), 4);
    assert!(!h.contains(&p(0.5, 0.5)));
    let line = convex_hull(&[p(0.0, 0.0), p(1.0, 1.0), p(2.0, 2.0)]);
    assert_eq!(line, vec![p(0.0, 0.0), p(2.0, 2.0)]);
    assert_eq!(convex_hull(&[p(3.0, 1.0)]), vec![p(3.0, 1.0)]);
}

#[test]
fn region_from_eligible_points() {
    assert!(TunnelRegion::from_eligible(p(0.0, 0.0), &[]).is_empty());
    let sq = [p(1.0, -1.0), p(3.0, -1.0), p(3.0, 1.0), p(1.0, 1.0)];
    assert_eq!(
        TunnelRegion::from_eligible(p(2.0, 0.0), &sq),
        TunnelRegion::Everywhere
    );
    let shadow = TunnelRegion::from_eligible(p(0.0, 0.0), &sq);
    assert!(shadow.contains(p(5.0, 0.0)));
    assert!(shadow.contains(p(2.0, 0.5)));
    assert!(!shadow.contains(p(-1.0, 0.0)));
    assert!(!shadow.contains(p(0.5, 0.0)));
    assert!(!shadow.contains(p(5.0, 6.0)));
    // The cone through the square meets x = 6 for |y| ≤ 6.
    let (u0, u1) = shadow
        .landing(&Segment2d::new(p(6.0, -10.0), p(6.0, 10.0)))
        .unwrap();
    assert!((u0 - 0.2).abs() < 1e-9 && (u1 - 0.8).abs() < 1e-9);
}

#[test]
fn straight_target_makes_every_landing_reachable() {
    let t = curve(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (3.0, 0.0)]);
    let r = CurveLocation::new(0, 0.5);
    let g = apx_diagonal_tunnel(&t, &t, r, r, (2, 2), 0.5, 1.0)
        .unwrap()
        .unwrap();
    assert_eq!((g.y_lo, g.y_hi), (0.0, 1.0));
    assert!(g.x_cap <= 0.0);
}

#[test]
fn far_apex_has_no_eligible_points() {
    let chain = [p(0.0, 0.0), p(1.0, 0.0), p(2.0, 0.0)];
    let mut calls = 0;
    assert!(eligible_points(p(0.0, 50.0), &chain, 0.5, 1.0, &mut calls)
        .unwrap()
        .is_empty());
    assert_eq!(calls, 0);
    let pts = eligible_points(p(0.0, 0.5), &chain, 0.5, 1.0, &mut calls).unwrap();
    assert!(!pts.is_empty() && calls > 0);
    for q in pts {
        assert!(segment_to_curve_frechet_decide(
            &Segment2d::new(p(0.0, 0.5), q),
            &curve(&[(0.0, 0.0), (2.0, 0.0)]),
            2.25 + 1e-12
        )
        .unwrap());
    }
}

#[test]
fn diagonal_tunnel_sandwich() {
    let mut r = rng(21);
    let (mut lower_checks, mut upper_checks) = (0, 0);
    for _ in 0..150 {
        let t: Curve2d = random_walk(&mut r, 5, 1.0);
        let b = perturbed(&mut r, &t, 0.3);
        let d = r.gen_range(0.4..1.5);
        let eps = [0.25, 0.5, 1.0][r.gen_range(0..3)];
        let (i, j) = (r.gen_range(1..4), r.gen_range(1..4));
        let rt = CurveLocation::new(r.gen_range(0..i), r.gen_range(0.0..1.0));
        let rb = CurveLocation::new(r.gen_range(0..j), r.gen_range(0.0..1.0));
        let apex = b.point_at(rb).unwrap();
        if apex.dist(t.point_at(rt).unwrap()) > d {
            continue;
        }
        let seed = apx_diagonal_tunnel(&t, &b, rt, rb, (i, j), eps, d).unwrap();
        let landed = |y: f64| seed.is_some_and(|g| y >= g.y_lo - 1e-9 && y <= g.y_hi + 1e-9);
        let cell = FreeCell::new(t.edge(i), b.edge(j), i, j, d);
        let rho = (1.0 + eps) * (1.0 + eps) * d;
        for k in 0..=20 {
            let y = k as f64 / 20.0;
            let Some((x0, x1)) = cell.x_range_at(y) else {
                continue;
            };
            let q = b.edge(j).at(y);
            let price = |x: f64| {
                let sub = t.subcurve(rt, CurveLocation::new(i, x)).unwrap();
                segment_to_curve_frechet_value(&Segment2d::new(apex, q), &sub, 1e-9).unwrap()
            };
            if landed(y) {
                // Every landing is paid for within the relaxed threshold.
                assert!(price((x0 + x1) / 2.0) <= rho + 1e-6, "price above {rho}");
                upper_checks += 1;
            }
            for x in [x0, (x0 + x1) / 2.0, x1] {
                if price(x) <= d - 1e-6 {
                    assert!(landed(y), "cheap tunnel to y={y} missed");
                    lower_checks += 1;
                }
            }
        }
    }
    assert!(
        lower_checks > 50 && upper_checks > 50,
        "{lower_checks} {upper_checks}"
    );
}

#[test]
fn verdicts_agree_with_the_exact_decider() {
    let mut r = rng(11);
    let (mut at, mut gt) = (0, 0);
    for _ in 0..200 {
        let n = r.gen_range(3..=7);
        let b: Curve2d = random_walk(&mut r, n, 3.0);
        let t = with_outliers(&mut r, &b, 0.5, 1, 3.0);
        let k = r.gen_range(0..=2);
        let delta = r.gen_range(0.3..2.5);
        let eps = [0.25, 0.5, 1.0][r.gen_range(0..3)];
        match decide_apx(&t, &b, k, delta, eps).unwrap() {
            ApxVerdict::GreaterThanDelta => {
                gt += 1;
                assert!(!decide_exact(&t, &b, k, delta).unwrap().reachable);
            }
            ApxVerdict::AtMost3PlusEpsDelta => {
                at += 1;
                assert!(
                    decide_exact(&t, &b, k, (3.0 + eps) * delta)
                        .unwrap()
                        .reachable
                );
            }
        }
    }
    assert!(at > 20 && gt > 20, "at={at} gt={gt}");
}

#[test]
fn exact_yes_is_never_greater() {
    let mut r = rng(12);
    let mut yes = 0;
    for _ in 0..150 {
        let b: Curve2d = random_walk(&mut r, 6, 2.0);
        let t = with_outliers(&mut r, &b, 0.3, 1, 2.5);
        let k = r.gen_range(0..=2);
        let delta = r.gen_range(0.5..2.0);
        if decide_exact(&t, &b, k, delta).unwrap().reachable {
            yes += 1;
            assert_ne!(
                decide_apx(&t, &b, k, delta, 0.5).unwrap(),
                ApxVerdict::GreaterThanDelta
            );
        }
    }
    assert!(yes > 20);
}

fn pt() -> impl Strategy<Value = (f64, f64)> {
    (-3.0..3.0f64, -3.0..3.0f64)
}

proptest! {
    #[test]
    fn nested_tunnels_cost_at_most_three_delta(
        verts in prop::collection::vec(pt(), 2..6),
        n0 in pt(), n1 in pt(),
        cut in (0.0..1.0f64, 0.0..1.0f64),
        m0 in (0.0..1.0f64, 0.0..std::f64::consts::TAU),
        m1 in (0.0..1.0f64, 0.0..std::f64::consts::TAU),
    ) {
        let Ok(t1) = Curve2d::from_xy(&verts) else { return Ok(()) };
        let b1 = Segment2d::new(t1.first() + p(n0.0, n0.1) * 0.3, t1.last() + p(n1.0, n1.1) * 0.3);
        let delta = segment_to_curve_frechet_value(&b1, &t1, 1e-10).unwrap();
        prop_assume!(delta > 1e-6);
        let (a, z) = (cut.0.min(cut.1), cut.0.max(cut.1));
        let t2 = t1.subcurve(t1.location_at(a).unwrap(), t1.location_at(z).unwrap()).unwrap();
        let shift = |(len, ang): (f64, f64)| p(ang.cos(), ang.sin()) * (len * delta);
        let b2 = Segment2d::new(t2.first() + shift(m0), t2.last() + shift(m1));
        let price = segment_to_curve_frechet_value(&b2, &t2, 1e-10).unwrap();
        prop_assert!(price <= 3.0 * delta + 1e-8, "price {price} > 3·{delta}");
    }
}
