use conelab::hull::{
    centroid, classify, default_grid, hull_classify, p0, p1, p2, vertices, witness_family,
    HullCase, Location,
};
use conelab_core::ExponentPair;
use num_rational::Ratio;
use proptest::prelude::*;

fn pair(a: i64, b: i64, c: i64, d: i64) -> ExponentPair {
    ExponentPair::from_fractions(a, b, c, d).unwrap()
}

const CASES: [HullCase; 2] = [HullCase::NoLargeSubspace, HullCase::HalfDimSubspace];

#[test]
fn critical_points() {
    assert_eq!(p0(4), pair(3, 4, 1, 4));
    assert_eq!(p1(6), pair(5, 6, 1, 4));
    assert_eq!(p2(6), pair(20, 26, 4, 26));
    assert_eq!(p2(4), pair(3, 5, 1, 5));
}

#[test]
fn origin_is_a_vertex() {
    for case in CASES {
        for d in 3..=8 {
            assert_eq!(hull_classify(&pair(0, 1, 0, 1), d, case), Location::Boundary);
        }
    }
}

#[test]
fn p1_on_boundary_d6() {
    assert_eq!(hull_classify(&p1(6), 6, HullCase::HalfDimSubspace), Location::Boundary);
    // without the half-dimensional subspace P1 and P2 sit on the P0 edges
    let small = HullCase::NoLargeSubspace;
    assert_eq!(hull_classify(&p1(6), 6, small), Location::Boundary);
    assert_eq!(hull_classify(&p2(6), 6, small), Location::Boundary);
    let mid = ExponentPair {
        inv_p: (p1(6).inv_p + p2(6).inv_p) / 2,
        inv_r: (p1(6).inv_r + p2(6).inv_r) / 2,
    };
    assert_eq!(hull_classify(&mid, 6, small), Location::Inside);
    assert_eq!(hull_classify(&mid, 6, HullCase::HalfDimSubspace), Location::Boundary);
}

#[test]
fn one_zero_is_outside() {
    for case in CASES {
        assert_eq!(hull_classify(&pair(1, 1, 0, 1), 4, case), Location::Outside);
    }
}

#[test]
fn vertices_and_midpoints_are_boundary() {
    for d in 3..=10 {
        for case in CASES {
            if case == HullCase::HalfDimSubspace && d < 4 {
                continue;
            }
            let v = vertices(case, d);
            let expected = match case {
                HullCase::NoLargeSubspace => 4,
                HullCase::HalfDimSubspace => 5,
            };
            assert_eq!(v.len(), expected);
            for (i, a) in v.iter().enumerate() {
                assert_eq!(classify(a, &v), Location::Boundary);
                let b = &v[(i + 1) % v.len()];
                let half = Ratio::new(1, 2);
                let mid = ExponentPair {
                    inv_p: (a.inv_p + b.inv_p) * half,
                    inv_r: (a.inv_r + b.inv_r) * half,
                };
                assert_eq!(classify(&mid, &v), Location::Boundary);
            }
            assert_eq!(classify(&centroid(case, d), &v), Location::Inside);
        }
    }
}

#[test]
fn witnesses() {
    let case = HullCase::HalfDimSubspace;
    assert_eq!(witness_family(&pair(1, 1, 1, 2), 6, case), "delta");
    assert_eq!(witness_family(&pair(5, 6, 1, 5), 6, case), "subspace-indicator");
    assert_eq!(witness_family(&pair(1, 2, 0, 1), 6, case), "cone-indicator");
}

#[test]
fn default_grid_spans_all_locations() {
    for case in CASES {
        let grid = default_grid(case, 6);
        assert_eq!(grid.len(), if case == HullCase::HalfDimSubspace { 9 } else { 8 });
        for loc in [Location::Inside, Location::Boundary, Location::Outside] {
            assert!(grid.iter().any(|p| hull_classify(p, 6, case) == loc));
        }
    }
}

proptest! {
    #[test]
    fn hull_is_convex_under_midpoints(
        a in 0i64..=24, b in 0i64..=24, c in 0i64..=24, e in 0i64..=24, d in 4i64..=9,
    ) {
        let case = HullCase::HalfDimSubspace;
        let x = pair(a, 24, b, 24);
        let y = pair(c, 24, e, 24);
        let mid = ExponentPair {
            inv_p: (x.inv_p + y.inv_p) / 2,
            inv_r: (x.inv_r + y.inv_r) / 2,
        };
        let inside = |p: &ExponentPair| hull_classify(p, d, case) != Location::Outside;
        if inside(&x) && inside(&y) {
            prop_assert!(inside(&mid));
        }
    }

    #[test]
    fn half_dim_hull_is_smaller(a in 0i64..=30, b in 0i64..=30, d in 4i64..=9) {
        let x = pair(a, 30, b, 30);
        if hull_classify(&x, d, HullCase::HalfDimSubspace) != Location::Outside {
            prop_assert_ne!(hull_classify(&x, d, HullCase::NoLargeSubspace), Location::Outside);
        }
    }
}
