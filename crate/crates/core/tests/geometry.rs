use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use sfd_core::geometry::*;
use sfd_core::testkit::{discrete_frechet, DenseSampling};
use sfd_core::{Curve2d, Point2d, Segment2d};

fn p(x: f64, y: f64) -> Point2d {
    Point2d::new(x, y)
}

fn curve(xy: &[(f64, f64)]) -> Curve2d {
    Curve2d::from_xy(xy).unwrap()
}

fn tent() -> Curve2d {
    curve(&[(0.0, 0.0), (1.0, 1.0), (2.0, 0.0)])
}

#[test]
fn point_at_interpolates() {
    let line = curve(&[(0.0, 0.0), (2.0, 0.0)]);
    assert_eq!(
        line.point_at(CurveLocation::new(0, 0.5)).unwrap(),
        p(1.0, 0.0)
    );
    assert_eq!(
        tent().point_at(CurveLocation::new(1, 0.0)).unwrap(),
        p(1.0, 1.0)
    );
    assert_eq!(
        tent().point_at(CurveLocation::new(1, 1.0)).unwrap(),
        p(2.0, 0.0)
    );
}

#[test]
fn point_at_rejects_bad_edge() {
    let err = tent().point_at(CurveLocation::new(2, 0.0)).unwrap_err();
    assert!(matches!(
        err,
        GeometryError::InvalidLocation { edge: 2, edges: 2 }
    ));
}

#[test]
fn global_parameter_hits_endpoints() {
    let c = tent();
    assert_eq!(c.point_at_global(0.0).unwrap(), c.first());
    assert_eq!(c.point_at_global(1.0).unwrap(), c.last());
    assert_eq!(c.point_at_global(0.5).unwrap(), p(1.0, 1.0));
}

#[test]
fn subcurve_cases() {
    let c = tent();
    let s = c
        .subcurve(CurveLocation::new(0, 0.5), CurveLocation::new(1, 0.5))
        .unwrap();
    assert_eq!(s.vertices(), &[p(0.5, 0.5), p(1.0, 1.0), p(1.5, 0.5)]);

    let line = curve(&[(0.0, 0.0), (4.0, 0.0)]);
    let at = CurveLocation::new(0, 0.25);
    let d = line.subcurve(at, at).unwrap();
    assert!(d.vertices().iter().all(|&q| q == p(1.0, 0.0)));

    let whole = c
        .subcurve(CurveLocation::new(0, 0.0), CurveLocation::new(1, 1.0))
        .unwrap();
    assert_eq!(whole, c);
}

#[test]
fn subcurve_rejects_reversed_range() {
    let c = tent();
    assert!(c
        .subcurve(CurveLocation::new(1, 0.5), CurveLocation::new(0, 0.5))
        .is_err());
}

#[test]
fn curve_rejects_bad_input() {
    assert!(matches!(
        Curve2d::new(vec![p(0.0, 0.0)]),
        Err(GeometryError::TooFewVertices(1))
    ));
    assert!(matches!(
        Curve2d::new(vec![p(0.0, 0.0), p(f64::NAN, 0.0)]),
        Err(GeometryError::NonFinite(1))
    ));
}

#[test]
fn duplicate_vertices_are_merged() {
    let c = curve(&[(0.0, 0.0), (0.0, 0.0), (1.0, 0.0), (1.0, 0.0), (2.0, 0.0)]);
    assert_eq!(c.num_vertices(), 3);
}

#[test]
fn segment_frechet_examples() {
    let s = |a: (f64, f64), b: (f64, f64)| Segment2d::new(p(a.0, a.1), p(b.0, b.1));
    assert_eq!(
        segment_frechet(&s((0.0, 0.0), (2.0, 0.0)), &s((0.0, 1.0), (2.0, 1.0))),
        1.0
    );
    assert_eq!(
        segment_frechet(&s((0.0, 0.0), (2.0, 0.0)), &s((0.0, 0.0), (2.0, 0.0))),
        0.0
    );
    assert_eq!(
        segment_frechet(&s((0.0, 0.0), (1.0, 0.0)), &s((0.0, 3.0), (1.0, 4.0))),
        4.0
    );
}

#[test]
fn segment_to_curve_decide_examples() {
    let seg = Segment2d::new(p(0.0, 0.0), p(2.0, 0.0));
    assert!(segment_to_curve_frechet_decide(&seg, &tent(), 1.0).unwrap());
    assert!(!segment_to_curve_frechet_decide(&seg, &tent(), 0.5).unwrap());
    let dot = Segment2d::new(p(1.0, 1.0), p(1.0, 1.0));
    assert!(segment_to_curve_frechet_decide(&dot, &curve(&[(1.0, 1.0), (1.0, 1.0)]), 0.0).unwrap());
    assert!(segment_to_curve_frechet_decide(&seg, &tent(), -1.0).is_err());
}

#[test]
fn segment_to_curve_decide_matches_dense_oracle() {
    // Discrete Fréchet of fine samplings is within the sampling step of
    // the continuous value, so both sides of 1 are resolved.
    let seg = curve(&[(0.0, 0.0), (2.0, 0.0)]);
    let a = DenseSampling::new(&seg, 2000);
    let b = DenseSampling::new(&tent(), 1000);
    let d = discrete_frechet(&a.points, &b.points);
    assert_abs_diff_eq!(d, 1.0, epsilon = 2e-3);
}

#[test]
fn segment_to_curve_value_examples() {
    let seg = Segment2d::new(p(0.0, 0.0), p(2.0, 0.0));
    let v = segment_to_curve_frechet_value(&seg, &tent(), 1e-9).unwrap();
    assert_abs_diff_eq!(v, 1.0, epsilon = 1e-9);
    assert!(segment_to_curve_frechet_decide(&seg, &tent(), 1.0 + 2e-9).unwrap());
    assert!(!segment_to_curve_frechet_decide(&seg, &tent(), 1.0 - 2e-9).unwrap());

    let two = curve(&[(0.0, 0.0), (2.0, 0.0)]);
    assert_eq!(
        segment_to_curve_frechet_value(&seg, &two, 1e-9).unwrap(),
        0.0
    );

    let dot = Segment2d::new(p(0.0, 0.0), p(0.0, 0.0));
    let spike = curve(&[(0.0, 0.0), (3.0, 4.0), (0.0, 0.0)]);
    assert_abs_diff_eq!(
        segment_to_curve_frechet_value(&dot, &spike, 1e-9).unwrap(),
        5.0,
        epsilon = 1e-9
    );
    assert!(segment_to_curve_frechet_value(&seg, &tent(), 0.0).is_err());
}

#[test]
fn curve_frechet_examples() {
    assert!(curve_frechet_decide(&tent(), &tent(), 0.0).unwrap());
    let lo = curve(&[(0.0, 0.0), (2.0, 0.0)]);
    let hi = curve(&[(0.0, 1.0), (2.0, 1.0)]);
    assert!(!curve_frechet_decide(&lo, &hi, 0.999).unwrap());
    assert!(curve_frechet_decide(&lo, &hi, 1.0).unwrap());
    assert!(curve_frechet_decide(&tent(), &lo, 1.0).unwrap());
    assert!(!curve_frechet_decide(&tent(), &lo, 0.9).unwrap());
}

fn coord() -> impl Strategy<Value = f64> {
    -10.0..10.0f64
}

fn point() -> impl Strategy<Value = Point2d> {
    (coord(), coord()).prop_map(|(x, y)| p(x, y))
}

fn segment() -> impl Strategy<Value = Segment2d> {
    (point(), point()).prop_map(|(a, b)| Segment2d::new(a, b))
}

fn polyline(max: usize) -> impl Strategy<Value = Curve2d> {
    prop::collection::vec(point(), 2..=max).prop_map(|v| Curve2d::new(v).unwrap())
}

proptest! {
    #[test]
    fn segment_frechet_is_a_metric(a in segment(), b in segment(), c in segment()) {
        prop_assert_eq!(segment_frechet(&a, &b), segment_frechet(&b, &a));
        prop_assert_eq!(segment_frechet(&a, &a), 0.0);
        prop_assert!(segment_frechet(&a, &c) <= segment_frechet(&a, &b) + segment_frechet(&b, &c) + 1e-12);
    }

    #[test]
    fn segment_decide_is_monotone(seg in segment(), c in polyline(6), d in 0.0..20.0f64, extra in 0.0..5.0f64) {
        if segment_to_curve_frechet_decide(&seg, &c, d).unwrap() {
            prop_assert!(segment_to_curve_frechet_decide(&seg, &c, d + extra).unwrap());
        }
    }

    #[test]
    fn two_vertex_value_is_segment_frechet(seg in segment(), other in segment()) {
        let c = Curve2d::new(vec![other.a, other.b]).unwrap();
        let v = segment_to_curve_frechet_value(&seg, &c, 1e-9).unwrap();
        prop_assert!((v - segment_frechet(&seg, &other)).abs() <= 1e-9);
    }

    #[test]
    fn value_and_decide_agree(seg in segment(), c in polyline(6)) {
        let tol = 1e-7;
        let v = segment_to_curve_frechet_value(&seg, &c, tol).unwrap();
        prop_assert!(segment_to_curve_frechet_decide(&seg, &c, v + 2.0 * tol).unwrap());
        let lower = seg.a.dist(c.first()).max(seg.b.dist(c.last()));
        if v - 2.0 * tol > lower {
            prop_assert!(!segment_to_curve_frechet_decide(&seg, &c, v - 2.0 * tol).unwrap());
        }
    }

    #[test]
    fn curve_is_within_zero_of_itself(c in polyline(8)) {
        prop_assert!(curve_frechet_decide(&c, &c, 0.0).unwrap());
    }

    #[test]
    fn point_at_global_is_continuous(c in polyline(6), t in 0.0..1.0f64) {
        let h = 1e-9;
        let a = c.point_at_global(t).unwrap();
        let b = c.point_at_global((t + h).min(1.0)).unwrap();
        let step = c.edges().map(|e| e.length()).fold(0.0, f64::max) * c.num_edges() as f64;
        prop_assert!(a.dist(b) <= step * h * 2.0 + 1e-12);
    }
}
