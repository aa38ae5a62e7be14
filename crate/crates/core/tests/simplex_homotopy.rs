use nestrix::geometry::Point;
use nestrix::homotopy::{
    boundary_filler, cylinder_covering, find_subdivision_covering, simplex_homotopy,
    validate_covering, Caps, FillerOracle, Strategy,
};
use nestrix::nesting::{chain_in_c_eta, PlNesting};
use nestrix::simplicial::{Chain, OrderedComplex, Simplex};
use nestrix::{q, QPoint};

fn pt(x: (i64, i64), y: (i64, i64)) -> QPoint {
    Point(vec![q(x.0, x.1), q(y.0, y.1)])
}

#[test]
fn triangle_with_rejected_top_face() {
    let eta = PlNesting::balls(q(3, 5)).unwrap();
    let oracle = FillerOracle::new(Caps::default());
    let s = simplex_homotopy(2, &eta, &Caps::default(), &oracle).unwrap();
    assert!(!s.accepted.contains(&vec![0, 1, 2]));
    assert_eq!(s.accepted.len(), 6);
    assert_eq!(s.fillers.get(&vec![0, 1, 2]), Some(&Strategy::Cone));
    let checks = s.check(10, 5).unwrap();
    assert!(checks.passed(), "{checks:?}");
}

#[test]
fn triangle_fully_accepted() {
    let eta = PlNesting::balls(q(1, 1)).unwrap();
    let oracle = FillerOracle::new(Caps::default());
    let s = simplex_homotopy(2, &eta, &Caps::default(), &oracle).unwrap();
    assert_eq!(s.accepted.len(), 7);
    assert!(s.fillers.is_empty());
    let checks = s.check(5, 6).unwrap();
    assert!(checks.passed(), "{checks:?}");
}

#[test]
fn subdivision_covering_triangle_net() {
    let tri = [pt((0, 1), (0, 1)), pt((1, 2), (0, 1)), pt((0, 1), (1, 2))];
    let k = OrderedComplex::from_simplices([&tri[..]]).unwrap();
    let r2 = q(1, 16);
    let net = vec![
        (tri[0].clone(), r2.clone()),
        (tri[1].clone(), r2.clone()),
        (tri[2].clone(), r2.clone()),
        (pt((1, 4), (1, 4)), r2.clone()),
        (pt((1, 8), (1, 8)), r2.clone()),
    ];
    let eta = PlNesting::ball_cover(net).unwrap();
    let found = find_subdivision_covering(&k, &eta, None, 5).unwrap();
    assert!(validate_covering(&found.complex, &eta, &found.covering)
        .unwrap()
        .passed());
    if found.n > 0 {
        let coarser = find_subdivision_covering(&k, &eta, None, found.n - 1);
        assert!(coarser.is_err());
    }
}

#[test]
fn cylinder_covering_round_trip() {
    let eta = PlNesting::balls(q(1, 2)).unwrap();
    let found = cylinder_covering(1, &eta, &Caps::default()).unwrap();
    let again = validate_covering(
        &found.cylinder.complex,
        &found.cylinder.eta,
        &found.covering,
    )
    .unwrap();
    assert!(again.passed());
}

#[test]
fn boundary_filler_on_planar_triangle() {
    let sigma = Simplex::Affine(vec![
        pt((0, 1), (0, 1)),
        pt((1, 1), (0, 1)),
        pt((0, 1), (1, 1)),
    ]);
    let eta = PlNesting::balls(q(11, 20)).unwrap();
    let oracle = FillerOracle::new(Caps::default());
    let x = boundary_filler(&sigma, &eta, &Caps::default(), &oracle).unwrap();
    assert_eq!(x.boundary().unwrap(), sigma.boundary().unwrap());
    assert!(chain_in_c_eta(&x, &eta).unwrap());
    assert!(!nestrix::nesting::in_c_eta(&sigma, &eta).unwrap());
}

#[test]
fn boundary_filler_rejects_bad_boundary() {
    let sigma = Simplex::Affine(vec![
        pt((0, 1), (0, 1)),
        pt((4, 1), (0, 1)),
        pt((0, 1), (4, 1)),
    ]);
    let eta = PlNesting::balls(q(1, 4)).unwrap();
    let oracle = FillerOracle::new(Caps::default());
    assert!(boundary_filler(&sigma, &eta, &Caps::default(), &oracle).is_err());
    let point = Simplex::Affine(vec![pt((1, 1), (1, 1))]);
    let x = boundary_filler(&point, &eta, &Caps::default(), &oracle).unwrap();
    assert_eq!(x, Chain::simplex(point));
}
