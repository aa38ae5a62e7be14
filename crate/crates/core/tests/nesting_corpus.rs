use nestrix::geometry::Point;
use nestrix::nesting::{in_c_eta, in_c_eta_all_chains, PlNesting, Region, Tri};
use nestrix::simplicial::Simplex;
use nestrix::{q, QPoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CORPUS: usize = 300;

fn pt(x: i64, y: i64, d: i64) -> QPoint {
    Point(vec![q(x, d), q(y, d)])
}

/// Small planar simplices of degree 0 to 2 with dyadic coordinates; the
/// spread is tuned so that a fair share is accepted by each nesting below.
fn corpus(seed: u64) -> Vec<Simplex> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..CORPUS)
        .map(|_| {
            let degree = rng.gen_range(0..=2);
            let (bx, by) = (rng.gen_range(0..=32), rng.gen_range(0..=32));
            let spread = rng.gen_range(1..=6);
            let vertices = (0..=degree)
                .map(|_| {
                    pt(
                        bx + rng.gen_range(-spread..=spread),
                        by + rng.gen_range(-spread..=spread),
                        32,
                    )
                })
                .collect();
            Simplex::Affine(vertices)
        })
        .collect()
}

fn vertices(s: &Simplex) -> Vec<QPoint> {
    match s {
        Simplex::Affine(v) => v.clone(),
        _ => unreachable!("corpus is affine"),
    }
}

fn faces(s: &Simplex) -> Vec<Simplex> {
    let v = vertices(s);
    (0..v.len())
        .map(|skip| {
            Simplex::Affine(
                v.iter()
                    .enumerate()
                    .filter(|(i, _)| *i != skip)
                    .map(|(_, p)| p.clone())
                    .collect(),
            )
        })
        .collect()
}

fn inner_nesting() -> PlNesting {
    PlNesting::balls(q(1, 16)).unwrap()
}

fn domain() -> Region {
    Region::ball(pt(1, 1, 2), q(1, 8))
}

fn family() -> (Vec<(Region, PlNesting)>, PlNesting) {
    let pieces = vec![
        (
            Region::ball(pt(1, 1, 4), q(1, 16)),
            PlNesting::balls(q(1, 32)).unwrap(),
        ),
        (
            Region::ball(pt(3, 3, 4), q(1, 8)),
            PlNesting::ball_cover(vec![(pt(3, 3, 4), q(1, 8)), (pt(1, 1, 2), q(1, 16))]).unwrap(),
        ),
    ];
    (pieces, PlNesting::balls(q(1, 20)).unwrap())
}

fn piece_for<'a>(
    pieces: &'a [(Region, PlNesting)],
    default: &'a PlNesting,
    x: &QPoint,
) -> &'a PlNesting {
    pieces
        .iter()
        .find(|(r, _)| r.contains(x))
        .map_or(default, |(_, n)| n)
}

#[test]
fn extension_acceptance_implies_inner_acceptance_inside_the_domain() {
    let w = domain();
    let eta = inner_nesting();
    let extended = PlNesting::extend(w.clone(), eta.clone()).unwrap();
    let (mut relevant, mut accepted) = (0, 0);
    for s in corpus(11) {
        if !w.contains(&s.barycenter().unwrap()) {
            continue;
        }
        relevant += 1;
        if in_c_eta(&s, &extended).unwrap() {
            accepted += 1;
            assert_eq!(
                w.contains_hull(&vertices(&s)),
                Tri::Yes,
                "{s:?} leaves the domain"
            );
            assert!(in_c_eta(&s, &eta).unwrap(), "{s:?}");
        }
    }
    assert!(
        relevant >= 30 && accepted >= 10,
        "degenerate corpus: {relevant} relevant, {accepted} accepted"
    );
}

#[test]
fn extension_rejects_simplices_leaving_the_domain() {
    let w = domain();
    let extended = PlNesting::extend(w.clone(), PlNesting::Ambient).unwrap();
    for s in corpus(12) {
        let inside = w.contains(&s.barycenter().unwrap());
        if inside && in_c_eta(&s, &extended).unwrap() {
            assert_eq!(w.contains_hull(&vertices(&s)), Tri::Yes);
        }
    }
}

#[test]
fn intersection_acceptance_implies_acceptance_by_the_barycenter_piece() {
    let (pieces, default) = family();
    let eta = PlNesting::intersect_family(pieces.clone(), default.clone());
    let mut accepted = 0;
    let mut pieces_used = std::collections::BTreeSet::new();
    for s in corpus(13) {
        if !in_c_eta(&s, &eta).unwrap() {
            continue;
        }
        accepted += 1;
        let b = s.barycenter().unwrap();
        let piece = piece_for(&pieces, &default, &b);
        pieces_used.insert(format!("{piece:?}"));
        assert!(
            in_c_eta(&s, piece).unwrap(),
            "{s:?} accepted by the family but not by its piece"
        );
    }
    assert!(accepted >= 40, "only {accepted} accepted");
    assert_eq!(pieces_used.len(), 3, "{pieces_used:?}");
}

#[test]
fn proper_chains_agree_with_all_chains() {
    let (pieces, default) = family();
    let nestings = [
        PlNesting::balls(q(1, 64)).unwrap(),
        PlNesting::ball_cover(vec![(pt(1, 1, 4), q(1, 8)), (pt(3, 3, 4), q(1, 8))]).unwrap(),
        PlNesting::extend(domain(), inner_nesting()).unwrap(),
        PlNesting::intersect_family(pieces, default),
    ];
    for eta in &nestings {
        let mut verdicts = [0usize; 2];
        for s in corpus(14) {
            let proper = in_c_eta(&s, eta).unwrap();
            let all = in_c_eta_all_chains(&s, eta, s.degree() + 2).unwrap();
            assert_eq!(proper, all, "{eta:?} on {s:?}");
            verdicts[proper as usize] += 1;
        }
        assert!(verdicts[0] > 0 && verdicts[1] > 0, "{eta:?}: {verdicts:?}");
    }
}

#[test]
fn acceptance_is_closed_under_faces() {
    let eta = inner_nesting();
    for s in corpus(15) {
        if s.degree() > 0 && in_c_eta(&s, &eta).unwrap() {
            for f in faces(&s) {
                assert!(in_c_eta(&f, &eta).unwrap(), "{f:?} face of {s:?}");
            }
        }
    }
}

#[test]
fn vertices_with_their_own_generator_are_accepted() {
    let eta = PlNesting::ball_cover(vec![(pt(1, 1, 4), q(1, 8)), (pt(3, 3, 4), q(1, 8))]).unwrap();
    for x in [pt(1, 1, 4), pt(0, 0, 1), pt(7, 7, 8)] {
        assert!(in_c_eta(&Simplex::Affine(vec![x]), &eta).unwrap());
    }
}

#[test]
fn long_segment_fails_against_small_balls() {
    let eta = PlNesting::balls(q(1, 64)).unwrap();
    let s = Simplex::Affine(vec![pt(0, 0, 1), pt(1, 0, 1)]);
    assert!(!in_c_eta(&s, &eta).unwrap());
}
