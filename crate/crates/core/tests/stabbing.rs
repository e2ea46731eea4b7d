use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use rand::Rng;
use sfd_core::stabbing::*;
use sfd_core::testkit::rng;
use sfd_core::{Point2d, Segment2d};

fn p(x: f64, y: f64) -> Point2d {
    Point2d::new(x, y)
}

fn seg(a: (f64, f64), b: (f64, f64)) -> Segment2d {
    Segment2d::new(p(a.0, a.1), p(b.0, b.1))
}

fn disk(x: f64, y: f64, r: f64) -> Disk<f64> {
    Disk::new(p(x, y), r)
}

#[test]
fn ordered_stabbing_examples() {
    let s = seg((0.0, 0.0), (4.0, 0.0));
    let disks = [disk(1.0, 1.0, 1.0), disk(3.0, -1.0, 1.0)];
    assert!(stabs_ordered_disks(&s, &disks));
    let rev = [disks[1], disks[0]];
    assert!(!stabs_ordered_disks(&s, &rev));
    assert!(stabs_ordered_disks(&s, &[]));
    assert!(required_inflation(&s, &disks) <= 0.0);
    assert!(required_inflation(&s, &rev) > 0.0);
}

#[test]
fn reversed_pair_needs_the_overlap_inflation() {
    // Projections 3 then 1: the intervals must grow until they meet at x=2,
    // where both disks are sqrt(2) away.
    let s = seg((0.0, 0.0), (4.0, 0.0));
    let rev = [disk(3.0, -1.0, 1.0), disk(1.0, 1.0, 1.0)];
    assert_abs_diff_eq!(
        required_inflation(&s, &rev),
        2f64.sqrt() - 1.0,
        epsilon = 1e-9
    );
}

#[test]
fn stab_from_start_examples() {
    let start = seg((0.0, 0.0), (0.0, 1.0));
    assert!(stab_from_start(&start, &[disk(2.0, 0.0, 0.5)], p(4.0, 0.0)));
    assert!(stab_from_start(&start, &[], p(-7.0, 3.0)));
    assert!(!stab_from_start(
        &start,
        &[disk(2.0, 5.0, 0.5)],
        p(4.0, 0.0)
    ));

    let dot = seg((1.0, 1.0), (1.0, 1.0));
    let disks = [disk(2.0, 1.2, 0.3), disk(3.0, 0.9, 0.3)];
    for t in [p(4.0, 1.0), p(4.0, 3.0), p(0.0, 0.0)] {
        assert_eq!(
            stab_from_start(&dot, &disks, t),
            stabs_ordered_disks(&seg((1.0, 1.0), (t.x, t.y)), &disks)
        );
    }
}

#[test]
fn wedge_without_disks_is_everything() {
    let w = wedge_build(seg((0.0, 0.0), (0.0, 1.0)), Vec::new());
    assert!(!w.is_empty());
    assert!(w.contains(p(-5.0, 9.0)));
    assert_eq!(
        wedge_intersect_segment(&w, &seg((3.0, 0.0), (3.0, 1.0))),
        vec![(0.0, 1.0)]
    );
}

#[test]
fn single_disk_cone() {
    let w = wedge_build(seg((0.0, 0.0), (0.0, 0.0)), vec![disk(2.0, 0.0, 0.5)]);
    assert!(w.contains(p(3.0, 0.0)));
    assert!(w.contains(p(2.0, 0.0)));
    assert!(!w.contains(p(4.0, 2.0)));
    assert!(!w.contains(p(-1.0, 0.0)));

    // Half-width of the cone at x=4 is 4·tan(asin(1/4)) = 1/sqrt(15/16).
    let half = 1.0 / 0.9375f64.sqrt();
    let iv = wedge_intersect_segment(&w, &seg((4.0, -3.0), (4.0, 3.0)));
    assert_eq!(iv.len(), 1);
    assert_abs_diff_eq!(iv[0].0, 0.5 - half / 6.0, epsilon = 1e-6);
    assert_abs_diff_eq!(iv[0].1, 0.5 + half / 6.0, epsilon = 1e-6);
    assert_abs_diff_eq!(half, 1.0327955589886444, epsilon = 1e-15);
}

#[test]
fn wedge_intersection_trivial_cases() {
    let w = wedge_build(seg((0.0, 0.0), (0.0, 0.0)), vec![disk(2.0, 0.0, 0.5)]);
    assert!(wedge_intersect_segment(&w, &seg((-3.0, 5.0), (-1.0, 5.0))).is_empty());
    let iv = wedge_intersect_segment(&w, &seg((3.0, -0.05), (3.0, 0.05)));
    assert_eq!(iv.len(), 1);
    assert_abs_diff_eq!(iv[0].0, 0.0);
    assert_abs_diff_eq!(iv[0].1, 1.0);
}

#[test]
fn unreachable_disks_give_an_empty_wedge() {
    // The second disk lies behind the first as seen from the start segment.
    let w = wedge_build(
        seg((0.0, 0.0), (0.0, 1.0)),
        vec![disk(5.0, 0.5, 0.2), disk(2.0, 0.5, 0.2)],
    );
    assert!(w.is_empty());
    assert!(!w.contains(p(1.0, 0.5)));
    assert!(w.start_range().is_none());
}

fn random_instance<R: Rng>(r: &mut R) -> (Segment2d, Vec<Disk<f64>>) {
    let a = p(r.gen_range(-1.0..0.0), r.gen_range(-1.0..1.0));
    let b = p(r.gen_range(-1.0..0.0), r.gen_range(-1.0..1.0));
    let n = r.gen_range(1..=4);
    let disks = (0..n)
        .map(|k| {
            disk(
                1.0 + k as f64 + r.gen_range(-0.3..0.3),
                r.gen_range(-0.8..0.8),
                r.gen_range(0.2..0.9),
            )
        })
        .collect();
    (Segment2d::new(a, b), disks)
}

#[test]
fn wedge_membership_agrees_with_the_predicate() {
    let mut r = rng(3);
    let (mut total, mut near) = (0, 0);
    for _ in 0..40 {
        let (start, disks) = random_instance(&mut r);
        let w = wedge_build(start, disks.clone());
        for _ in 0..250 {
            let t = p(r.gen_range(-1.0..7.0), r.gen_range(-4.0..4.0));
            total += 1;
            let (w_in, oracle) = (w.contains(t), stab_from_start(&start, &disks, t));
            if w_in != oracle {
                // Only allowed right at the wedge boundary.
                let (_, need) = least_inflation_start(&start, &disks, t);
                assert!(
                    need.abs() <= 1e-6,
                    "t={t:?} wedge={w_in} oracle={oracle} need={need}"
                );
                near += 1;
            }
        }
    }
    assert_eq!(total, 10_000);
    assert!(near <= 10, "{near} boundary disagreements");
}

#[test]
fn wedge_intervals_are_members() {
    let mut r = rng(4);
    for _ in 0..60 {
        let (start, disks) = random_instance(&mut r);
        let w = wedge_build(start, disks.clone());
        let x = r.gen_range(3.0..7.0);
        let e = seg((x, -4.0), (x + r.gen_range(-1.0..1.0), 4.0));
        for (lo, hi) in wedge_intersect_segment(&w, &e) {
            assert!(lo <= hi);
            for u in [
                lo + (hi - lo) * 0.25,
                (lo + hi) / 2.0,
                lo + (hi - lo) * 0.75,
            ] {
                assert!(stab_from_start(&start, &disks, e.at(u)));
            }
            if let Some(s) = w.start_for(e.at((lo + hi) / 2.0)) {
                assert!(
                    required_inflation(&Segment2d::new(start.at(s), e.at((lo + hi) / 2.0)), &disks)
                        <= 1e-7
                );
            }
        }
    }
}

fn pt() -> impl Strategy<Value = Point2d> {
    (-5.0..5.0f64, -5.0..5.0f64).prop_map(|(x, y)| p(x, y))
}

fn disks(max: usize) -> impl Strategy<Value = Vec<Disk<f64>>> {
    prop::collection::vec(
        (pt(), 0.1..2.0f64).prop_map(|(c, r)| Disk::new(c, r)),
        0..=max,
    )
}

proptest! {
    #[test]
    fn stabbers_from_one_apex_interpolate(a in pt(), b1 in pt(), b2 in pt(), ds in disks(4), t in 0.0..1.0f64) {
        let s1 = Segment2d::new(a, b1);
        let s2 = Segment2d::new(a, b2);
        if stabs_ordered_disks(&s1, &ds) && stabs_ordered_disks(&s2, &ds) {
            let b = b1 + (b2 - b1) * t;
            // Rounding only: allow the disks a hair of slack.
            let grown: Vec<_> = ds.iter().map(|d| d.inflated(1e-9)).collect();
            prop_assert!(stabs_ordered_disks(&Segment2d::new(a, b), &grown));
        }
    }

    #[test]
    fn moving_endpoints_needs_that_much_more_radius(
        a in pt(), b in pt(), da in pt(), db in pt(), ds in disks(4), scale in 0.0..0.3f64,
    ) {
        let s1 = Segment2d::new(a, b);
        if stabs_ordered_disks(&s1, &ds) {
            let (ma, mb) = (da * scale, db * scale);
            let s2 = Segment2d::new(a + ma, b + mb);
            let shift = ma.norm().max(mb.norm());
            let grown: Vec<_> = ds.iter().map(|d| d.inflated(shift + 1e-9)).collect();
            prop_assert!(stabs_ordered_disks(&s2, &grown));
        }
    }

    #[test]
    fn stabbing_is_monotone_in_radius(a in pt(), b in pt(), ds in disks(5), extra in 0.0..2.0f64) {
        let s = Segment2d::new(a, b);
        if stabs_ordered_disks(&s, &ds) {
            let grown: Vec<_> = ds.iter().map(|d| d.inflated(extra)).collect();
            prop_assert!(stabs_ordered_disks(&s, &grown));
        }
    }

    #[test]
    fn inflation_sign_matches_the_predicate(a in pt(), b in pt(), ds in disks(5)) {
        let s = Segment2d::new(a, b);
        let need = required_inflation(&s, &ds);
        if need.abs() > 1e-9 {
            prop_assert_eq!(stabs_ordered_disks(&s, &ds), need < 0.0 || ds.is_empty());
        }
    }
}
