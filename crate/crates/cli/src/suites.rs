//! Property suites behind `nestrix props`.

use nestrix::finite::{FiniteSpace, Mask};
use nestrix::geometry::{AffineMap, Point};
use nestrix::homotopy::{
    cylinder_covering, find_subdivision_covering, validate_covering, Calculus, Caps,
    DeformationMap, FillerOracle, World,
};
use nestrix::nesting::{
    check_finite, check_pl, check_sequences, in_c_eta, in_c_eta_all_chains, AxiomReport, CoverSpec,
    FiniteNesting, PlNesting, PlSampler, Region, Tri,
};
use nestrix::simplicial::{
    level_map, prism_p, prism_t, subdivide, subdivision_facets, Chain, Operators, OrderedComplex,
    Simplex,
};
use nestrix::{q, QPoint, Q};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::error::{CliError, CliResult};
use crate::report::Report;
use crate::scenario::{point, Replay};

pub const SUITES: [&str; 5] = [
    "nesting",
    "subdivision",
    "covering",
    "calculus",
    "retraction",
];

const AXIOMS: &str = "nesting axioms";
const OPERATORS: &str = "subdivision and prism operators";
const COVERINGS: &str = "compatible coverings";
const CALCULUS: &str = "homotopy calculus";
const SMALL_CHAINS: &str = "small chains retraction";

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub budget: usize,
    pub caps: Caps,
}

pub fn run_suite(name: &str, cfg: &SuiteConfig, report: &mut Report) -> CliResult<()> {
    if cfg.budget == 0 {
        return Err(CliError::Usage("the budget must be positive".into()));
    }
    match name {
        "nesting" => nesting(cfg, report),
        "subdivision" => subdivision(cfg, report),
        "covering" => covering(cfg, report),
        "calculus" => calculus(cfg, report),
        "retraction" => retraction(report),
        other => Err(CliError::Usage(format!(
            "unknown suite {other:?}; known: {}",
            SUITES.join(", ")
        ))),
    }
}

fn axiom_record(report: &mut Report, name: String, r: &AxiomReport, expect_pass: bool) {
    report.push(
        name,
        AXIOMS,
        r.passed() == expect_pass,
        json!({"sequences": r.sequences, "containments": r.containments, "sampled": r.sampled, "witness": r.witness}),
    );
}

/// Finite spaces of at most six points for exhaustive axiom checks.
pub fn finite_corpus(seed: u64) -> CliResult<Vec<(String, FiniteSpace)>> {
    let mut out = vec![
        ("five-point".to_string(), FiniteSpace::five_point()),
        ("sierpinski".to_string(), FiniteSpace::sierpinski()),
        ("pseudocircle".to_string(), FiniteSpace::pseudocircle()),
    ];
    for (i, n) in [4usize, 5, 6].into_iter().enumerate() {
        let s = seed.wrapping_add(i as u64);
        out.push((
            format!("random-{n}-seed{s}"),
            FiniteSpace::random(n, 0.4, s, 6)?,
        ));
    }
    Ok(out)
}

/// The finite constructions on one space: minimal opens, a cover table,
/// a pullback along a constant map, a prefix extension and a pointwise
/// intersection.
pub fn finite_constructions(x: &FiniteSpace) -> CliResult<Vec<(&'static str, FiniteNesting)>> {
    let n = x.len();
    let minimal = FiniteNesting::minimal_open(x);
    let table: Vec<Mask> = (0..n)
        .map(|i| x.minimal_open(i) | x.minimal_open((i + 1) % n))
        .collect();
    let table: Vec<Mask> = table
        .into_iter()
        .enumerate()
        .map(|(i, m)| if x.is_open(m) { m } else { x.minimal_open(i) })
        .collect();
    let cover = FiniteNesting::cover_generated(x, table)?;
    let pullback = FiniteNesting::pullback(x, vec![0; n], FiniteNesting::minimal_open(x))?;
    let extension = FiniteNesting::extend(x.minimal_open(0), minimal.clone())?;
    let family = (0..n)
        .map(|i| {
            if i % 2 == 0 {
                minimal.clone()
            } else {
                cover.clone()
            }
        })
        .collect();
    let intersection = FiniteNesting::intersect_family(x, family)?;
    Ok(vec![
        ("minimal-open", minimal),
        ("cover-generated", cover),
        ("pullback", pullback),
        ("extension", extension),
        ("intersection", intersection),
    ])
}

/// PL nestings on the plane built by every constructor.
pub fn pl_constructions() -> CliResult<Vec<(&'static str, PlNesting)>> {
    let balls = PlNesting::balls(q(1, 4))?;
    let cover = PlNesting::ball_cover(vec![
        (Point(vec![q(0, 1), q(0, 1)]), q(1, 1)),
        (Point(vec![q(1, 1), q(1, 2)]), q(1, 2)),
    ])?;
    let rotation = AffineMap::from_basis_images(
        2,
        &[
            Point(vec![q(0, 1), q(1, 1)]),
            Point(vec![q(-1, 1), q(0, 1)]),
        ],
    );
    let w = Region::ball(Point(vec![q(1, 2), q(1, 2)]), q(1, 1));
    Ok(vec![
        ("balls", balls.clone()),
        ("ball-cover", cover.clone()),
        ("pullback", PlNesting::pullback(rotation, balls.clone())),
        ("extension", PlNesting::extend(w.clone(), cover.clone())?),
        (
            "intersection",
            PlNesting::intersect_family(vec![(w, PlNesting::balls(q(1, 8))?)], balls),
        ),
    ])
}

fn nesting(cfg: &SuiteConfig, report: &mut Report) -> CliResult<()> {
    for (label, x) in finite_corpus(cfg.seed)? {
        for (kind, eta) in finite_constructions(&x)? {
            axiom_record(
                report,
                format!("finite {label} {kind}"),
                &check_finite(&eta, 3)?,
                true,
            );
        }
        if x.opens().len() > 2 {
            let broken = FiniteNesting::broken(FiniteNesting::minimal_open(&x));
            axiom_record(
                report,
                format!("finite {label} planted defect"),
                &check_finite(&broken, 3)?,
                false,
            );
        }
    }
    let sampler = PlSampler::unit(2);
    for (i, (kind, eta)) in pl_constructions()?.into_iter().enumerate() {
        let r = check_pl(&eta, &sampler, cfg.seed.wrapping_add(i as u64), cfg.budget)?;
        axiom_record(report, format!("pl {kind}"), &r, true);
    }
    membership(cfg.seed, MEMBERSHIP_CORPUS, report)?;
    Ok(())
}

const MEMBERSHIP: &str = "small chains membership";
pub const MEMBERSHIP_CORPUS: usize = 240;

/// Planar simplices of degree 0 to 2 with coordinates in `(1/32)ℤ`.
pub fn simplex_corpus(seed: u64, size: usize) -> Vec<Vec<QPoint>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..size)
        .map(|_| {
            let degree = rng.gen_range(0..=2);
            let (bx, by) = (rng.gen_range(0..=32i64), rng.gen_range(0..=32i64));
            let spread = rng.gen_range(1..=6i64);
            (0..=degree)
                .map(|_| {
                    let (dx, dy) = (
                        rng.gen_range(-spread..=spread),
                        rng.gen_range(-spread..=spread),
                    );
                    Point(vec![q(bx + dx, 32), q(by + dy, 32)])
                })
                .collect()
        })
        .collect()
}

/// Membership implications of the extension and intersection
/// constructions, the proper-chain shortcut and closure under faces.
fn membership(seed: u64, size: usize, report: &mut Report) -> CliResult<()> {
    let corpus: Vec<Simplex> = simplex_corpus(seed, size)
        .into_iter()
        .map(Simplex::Affine)
        .collect();
    let half = Point(vec![q(1, 2), q(1, 2)]);
    let w = Region::ball(half.clone(), q(1, 8));
    let inner = PlNesting::balls(q(1, 16))?;
    let extended = PlNesting::extend(w.clone(), inner.clone())?;
    let (mut relevant, mut accepted, mut violations) = (0, 0, Vec::new());
    for s in &corpus {
        if !w.contains(&s.barycenter()?) {
            continue;
        }
        relevant += 1;
        if in_c_eta(s, &extended)? {
            accepted += 1;
            let Simplex::Affine(v) = s else {
                unreachable!()
            };
            if w.contains_hull(v) != Tri::Yes || !in_c_eta(s, &inner)? {
                violations.push(format!("{s:?}"));
            }
        }
    }
    report.push(
        "extension membership",
        MEMBERSHIP,
        violations.is_empty() && accepted > 0,
        json!({"simplices": corpus.len(), "relevant": relevant, "accepted": accepted, "violations": violations}),
    );

    let quarter = Point(vec![q(1, 4), q(1, 4)]);
    let three_quarters = Point(vec![q(3, 4), q(3, 4)]);
    let pieces = vec![
        (Region::ball(quarter, q(1, 16)), PlNesting::balls(q(1, 32))?),
        (
            Region::ball(three_quarters.clone(), q(1, 8)),
            PlNesting::ball_cover(vec![(three_quarters, q(1, 8)), (half, q(1, 16))])?,
        ),
    ];
    let default = PlNesting::balls(q(1, 20))?;
    let family = PlNesting::intersect_family(pieces.clone(), default.clone());
    let (mut accepted, mut violations) = (0, Vec::new());
    for s in &corpus {
        if in_c_eta(s, &family)? {
            accepted += 1;
            let b = s.barycenter()?;
            let piece = pieces
                .iter()
                .find(|(r, _)| r.contains(&b))
                .map_or(&default, |(_, n)| n);
            if !in_c_eta(s, piece)? {
                violations.push(format!("{s:?}"));
            }
        }
    }
    report.push(
        "intersection membership",
        MEMBERSHIP,
        violations.is_empty() && accepted > 0,
        json!({"simplices": corpus.len(), "accepted": accepted, "violations": violations}),
    );

    let (mut agree, mut closed, mut checked) = (true, true, 0);
    for eta in [PlNesting::balls(q(1, 64))?, extended, family] {
        for s in &corpus {
            let proper = in_c_eta(s, &eta)?;
            agree &= proper == in_c_eta_all_chains(s, &eta, s.degree() + 2)?;
            if proper && s.degree() > 0 {
                for i in 0..=s.degree() {
                    closed &= in_c_eta(&s.face(i)?, &eta)?;
                }
            }
            checked += 1;
        }
    }
    report.push(
        "proper versus all chains",
        MEMBERSHIP,
        agree,
        json!({"checked": checked}),
    );
    report.push(
        "closure under faces",
        MEMBERSHIP,
        closed,
        json!({"checked": checked}),
    );
    Ok(())
}

/// Re-checks one recorded sequence.
pub fn replay(r: &Replay, seed: u64, report: &mut Report) -> CliResult<()> {
    let eta = r.nesting.build()?;
    let seq: Vec<QPoint> = r
        .sequence
        .iter()
        .map(|p| point(p))
        .collect::<CliResult<_>>()?;
    let dim = seq.first().map_or(1, |p| p.dim());
    let sampler = PlSampler::unit(dim);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let result = check_sequences(&eta, vec![seq], 3, |s| sampler.probes(s, &mut rng))?;
    axiom_record(report, "replay".into(), &result, true);
    Ok(())
}

/// A random subcomplex of `Δ^3` with at most `max_faces` faces.
pub fn random_complex(rng: &mut ChaCha8Rng, max_faces: usize) -> CliResult<OrderedComplex> {
    let full = OrderedComplex::standard_simplex(3);
    loop {
        let mut c = OrderedComplex::new();
        for _ in 0..rng.gen_range(1..=3) {
            let size = rng.gen_range(1..=3);
            let mut idx: Vec<usize> = (0..4).collect();
            for i in (1..4).rev() {
                idx.swap(i, rng.gen_range(0..=i));
            }
            let mut face: Vec<usize> = idx[..size].to_vec();
            face.sort_unstable();
            c.add_simplex(&full.simplex(&face))?;
        }
        if c.face_count() <= max_faces {
            return Ok(c);
        }
    }
}

/// `∂S = S∂`, `∂T_n + T_n∂ = S^n × lo − × hi`, `∂P + P∂ = × hi − × lo`.
pub fn operator_identities(k: &OrderedComplex, n: usize) -> CliResult<[bool; 3]> {
    let dim = k.points().first().map_or(0, |p| p.dim());
    let (lo, hi) = (q(0, 1), q(1, 1));
    let (at_lo, at_hi) = (level_map(dim, &lo), level_map(dim, &hi));
    let s_ok = subdivide(k)?.map.is_chain_map()?;
    let mut ops = Operators::new();
    let t_ok = prism_t(k, n, &lo, &hi)?.map.is_homotopy(
        |pts| {
            Ok(ops
                .subdivide_n(&Chain::affine(pts.to_vec()), n)?
                .apply_affine(&at_lo))
        },
        |pts| Ok(Chain::affine(pts.to_vec()).apply_affine(&at_hi)),
    )?;
    let p_ok = prism_p(k, &lo, &hi)?.map.is_homotopy(
        |pts| Ok(Chain::affine(pts.to_vec()).apply_affine(&at_hi)),
        |pts| Ok(Chain::affine(pts.to_vec()).apply_affine(&at_lo)),
    )?;
    Ok([s_ok, t_ok, p_ok])
}

fn subdivision(cfg: &SuiteConfig, report: &mut Report) -> CliResult<()> {
    for k in 0..=3usize {
        let simplex = OrderedComplex::standard_simplex(k);
        let n = if k <= 2 { 2 } else { 1 };
        let [s, t, p] = operator_identities(&simplex, n)?;
        report.push(
            format!("delta{k} identities"),
            OPERATORS,
            s && t && p,
            json!({"S": s, "T_n": t, "P": p, "n": n}),
        );
        let pts = simplex.simplex(&(0..=k).collect::<Vec<_>>());
        let fine = subdivide(&simplex)?.complex;
        let (before, after) = (simplex.mesh2(), fine.mesh2());
        let ratio = Q::from_integer(k.into()) / Q::from_integer((k + 1).into());
        let bound = ratio.clone() * ratio * before.clone();
        report.push(
            format!("delta{k} mesh bound"),
            OPERATORS,
            after <= bound,
            json!({"mesh2": before.to_string(), "subdivided": after.to_string(), "bound": bound.to_string()}),
        );
        if k == 2 {
            let facets = subdivision_facets(&pts).len();
            report.push(
                "delta2 facet count",
                OPERATORS,
                facets == 6 && fine.facets().len() == 6,
                facets,
            );
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut failures = Vec::new();
    for i in 0..cfg.budget {
        let c = random_complex(&mut rng, 12)?;
        if operator_identities(&c, 1)? != [true; 3] {
            failures.push(i);
        }
    }
    report.push(
        "random complexes",
        OPERATORS,
        failures.is_empty(),
        json!({"count": cfg.budget, "failures": failures}),
    );
    Ok(())
}

fn p1(x: i64, d: i64) -> QPoint {
    Point(vec![q(x, d)])
}

fn p2(x: i64, y: i64, d: i64) -> QPoint {
    Point(vec![q(x, d), q(y, d)])
}

fn covering_record(
    report: &mut Report,
    name: &str,
    complex: &OrderedComplex,
    eta: &PlNesting,
    cfg: &SuiteConfig,
) -> CliResult<()> {
    let found = find_subdivision_covering(complex, eta, None, cfg.caps.n)?;
    let again = validate_covering(&found.complex, eta, &found.covering)?.passed();
    let minimal =
        found.n == 0 || find_subdivision_covering(complex, eta, None, found.n - 1).is_err();
    let f = DeformationMap::new(&found.complex, &found.covering)?;
    let audit = f.audit(&mut ChaCha8Rng::seed_from_u64(cfg.seed), 20);
    report.push(
        name,
        COVERINGS,
        again && minimal && audit.is_none(),
        json!({"n": found.n, "mesh2": found.mesh2.to_string(), "minimal": minimal, "audit": audit}),
    );
    Ok(())
}

fn covering(cfg: &SuiteConfig, report: &mut Report) -> CliResult<()> {
    let segment = OrderedComplex::from_simplices([&[p1(0, 1), p1(1, 1)][..]])?;
    let cover = PlNesting::ball_cover(vec![
        (p1(0, 1), q(9, 64)),
        (p1(1, 2), q(9, 64)),
        (p1(1, 1), q(9, 64)),
    ])?;
    covering_record(report, "segment ball cover", &segment, &cover, cfg)?;
    let tri = [p2(0, 0, 1), p2(1, 0, 2), p2(0, 1, 2)];
    let triangle = OrderedComplex::from_simplices([&tri[..]])?;
    let r2 = q(1, 16);
    let mut net: Vec<(QPoint, Q)> = tri.iter().map(|p| (p.clone(), r2.clone())).collect();
    net.push((p2(1, 1, 4), r2.clone()));
    net.push((p2(1, 1, 8), r2));
    covering_record(
        report,
        "triangle five-point net",
        &triangle,
        &PlNesting::ball_cover(net)?,
        cfg,
    )?;
    for (k, r2) in [(1, q(1, 2)), (2, q(3, 5))] {
        let eta = PlNesting::balls(r2.clone())?;
        let found = cylinder_covering(k, &eta, &cfg.caps)?;
        let again = validate_covering(
            &found.cylinder.complex,
            &found.cylinder.eta,
            &found.covering,
        )?
        .passed();
        report.push(
            format!("cylinder k={k} balls r2={r2}"),
            COVERINGS,
            again,
            json!({"n": found.cylinder.n, "faces": found.cylinder.complex.face_count()}),
        );
    }
    Ok(())
}

fn calculus(cfg: &SuiteConfig, report: &mut Report) -> CliResult<()> {
    let oracle = FillerOracle::new(cfg.caps);
    for (k, r2) in [(1usize, q(1, 4)), (2, q(1, 16)), (2, q(3, 5))] {
        let mut w = World::new(k, PlNesting::balls(r2.clone())?);
        let checks = w.check(&cfg.caps, &oracle)?;
        report.push(
            format!("world k={k} balls r2={r2}"),
            CALCULUS,
            checks.passed(),
            json!({"checks": checks, "fills": w.fills}),
        );
    }
    for (k, r2) in [(2usize, q(1, 16)), (3, q(1, 2))] {
        if k > cfg.caps.k {
            continue;
        }
        let eta = PlNesting::balls(r2.clone())?;
        let mismatch = Calculus::new(eta.clone(), cfg.caps, &oracle).naturality(k, &eta)?;
        report.push(
            format!("naturality k={k} balls r2={r2}"),
            CALCULUS,
            mismatch.is_none(),
            mismatch,
        );
    }
    let audit = oracle.audit();
    report.push(
        "filler audit",
        CALCULUS,
        audit.verified == audit.requests,
        audit,
    );
    Ok(())
}

/// The three pinned cover scenarios.
fn retraction(report: &mut Report) -> CliResult<()> {
    let seg = Chain::affine(vec![p1(0, 1), p1(1, 1)]);
    let inside = CoverSpec::new(vec![Region::ball(p1(1, 2), q(1, 1))])?;
    let r = inside.subdivision_retraction(&seg, 6)?;
    report.push("segment inside one member", SMALL_CHAINS, r.n == 0, &r);
    let halves = CoverSpec::new(vec![
        Region::ball(p1(0, 1), q(49, 64)),
        Region::ball(p1(1, 1), q(9, 64)),
    ])?;
    let r = halves.subdivision_retraction(&seg, 6)?;
    report.push(
        "segment two balls overlapping by 1/4",
        SMALL_CHAINS,
        r.n == 2 && r.mesh2 == "1/16",
        &r,
    );
    let gap = CoverSpec::new(vec![
        Region::ball(p1(0, 1), q(1, 4)),
        Region::ball(p1(1, 1), q(1, 4)),
    ])?;
    let complex = OrderedComplex::from_simplices([&[p1(0, 1), p1(1, 1)][..]])?;
    let rejected = gap.validate(&complex, 2);
    report.push(
        "cover with a gap",
        SMALL_CHAINS,
        rejected.is_err(),
        rejected.err().map(|e| e.to_string()),
    );
    Ok(())
}
