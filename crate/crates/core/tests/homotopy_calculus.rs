use nestrix::geometry::Point;
use nestrix::homotopy::{chain_homotopy_equiv_report, Calculus, Caps, FillerOracle, World};
use nestrix::nesting::PlNesting;
use nestrix::simplicial::{Chain, Simplex};
use nestrix::{q, QPoint};

fn world_passes(k: usize, eta: PlNesting) -> World {
    let caps = Caps::default();
    let oracle = FillerOracle::new(caps);
    let mut w = World::new(k, eta);
    let checks = w.check(&caps, &oracle).unwrap();
    assert!(checks.passed(), "{checks:?} fills {:?}", w.fills);
    assert_eq!(oracle.audit().verified, oracle.audit().requests);
    w
}

#[test]
fn triangle_world_with_ball_nesting() {
    world_passes(2, PlNesting::balls(q(3, 5)).unwrap());
}

#[test]
fn triangle_world_all_accepting() {
    world_passes(2, PlNesting::Ambient);
}

#[test]
fn triangle_world_small_balls() {
    let mut w = world_passes(2, PlNesting::balls(q(1, 16)).unwrap());
    let caps = Caps::default();
    assert_eq!(w.depth(&[0, 1, 2], &caps).unwrap(), 3);
    assert_eq!(w.depth(&[0, 1], &caps).unwrap(), 2);
    assert_eq!(w.depth(&[2], &caps).unwrap(), 0);
}

#[test]
fn naturality_under_face_maps() {
    let caps = Caps::default();
    let oracle = FillerOracle::new(caps);
    let eta = PlNesting::balls(q(1, 16)).unwrap();
    let mut calc = Calculus::new(eta.clone(), caps, &oracle);
    assert_eq!(calc.naturality(2, &eta).unwrap(), None);
}

fn pt(x: i64, y: i64) -> QPoint {
    Point(vec![q(x, 2), q(y, 2)])
}

#[test]
fn equivalence_on_triangle_boundary() {
    let caps = Caps::default();
    let oracle = FillerOracle::new(caps);
    let tri = Chain::affine(vec![pt(0, 0), pt(1, 0), pt(0, 1)]);
    let tests = vec![
        ("vertex".to_string(), Chain::affine(vec![pt(0, 0)])),
        ("boundary".to_string(), tri.boundary().unwrap()),
        ("triangle".to_string(), tri),
    ];
    for eta in [PlNesting::Ambient, PlNesting::balls(q(1, 16)).unwrap()] {
        let report = chain_homotopy_equiv_report(&eta, &tests, &caps, &oracle).unwrap();
        assert!(report.passed(), "{report:?}");
    }
    // hypotenuse half-length² 1/8 < 2/15 < 5/36 = centroid-to-vertex²
    let eta = PlNesting::balls(q(2, 15)).unwrap();
    let report = chain_homotopy_equiv_report(&eta, &tests, &caps, &oracle).unwrap();
    assert!(report.passed(), "{report:?}");
    let members: Vec<bool> = report.checks.iter().map(|c| c.in_c_eta).collect();
    assert_eq!(members, vec![true, true, false]);
    assert_eq!(report.checks[1].restricted_homotopy, Some(true));
    let vertex = Simplex::Affine(vec![pt(0, 0)]);
    let mut calc = Calculus::new(PlNesting::Ambient, caps, &oracle);
    assert_eq!(calc.rho(&vertex).unwrap(), Chain::simplex(vertex));
}

#[test]
fn tetrahedron_smoke() {
    let w = world_passes(3, PlNesting::balls(q(1, 1)).unwrap());
    assert_eq!(w.k, 3);
}

#[test]
fn naturality_on_tetrahedron() {
    let caps = Caps::default();
    let oracle = FillerOracle::new(caps);
    let eta = PlNesting::balls(q(1, 2)).unwrap();
    let mut calc = Calculus::new(eta.clone(), caps, &oracle);
    assert_eq!(calc.naturality(3, &eta).unwrap(), None);
}
