use std::path::PathBuf;

use nestrix::algebra::Coefficients;
use nestrix::finite::io::parse_space_with_cap;
use nestrix::finite::FiniteSpace;
use nestrix::homotopy::{
    chain_homotopy_equiv_report, corner, simplex_homotopy, Calculus, Caps, FillerOracle, World,
};
use nestrix::sheaf::{
    cech_cohomology, compare_cohomology, five_point_reproduce, godement_cohomology,
    minimal_open_cover, nerve_cohomology, order_complex_cohomology, Group, Presheaf,
};
use nestrix::simplicial::Chain;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};
use crate::report::{Report, PLUMBING};
use crate::scenario::{load_json, Scenario};

const SURJECTIVITY: &str = "five-point surjectivity failure";
const COMPARISON: &str = "sheaf versus order complex cohomology";
const COMPONENTS: &str = "degree zero counts components";
const CROSS_CHECK: &str = "Godement and Cech agreement";
const RETRACTION: &str = "retraction onto small chains of a simplex";
const CALCULUS: &str = "homotopy calculus";
const EQUIVALENCE: &str = "small chains inclusion is an equivalence";

/// Pushes one record per boolean field of a serialized check struct; an
/// optional string field passes when absent.
fn push_flags(report: &mut Report, prefix: &str, anchor: &str, checks: &impl Serialize) {
    let Value::Object(fields) = serde_json::to_value(checks).unwrap_or(Value::Null) else {
        return;
    };
    for (name, value) in fields {
        match value {
            Value::Bool(ok) => report.push(format!("{prefix}{name}"), anchor, ok, Value::Null),
            Value::Null => report.push(format!("{prefix}{name}"), anchor, true, Value::Null),
            Value::String(s) => report.push(format!("{prefix}{name}"), anchor, false, s),
            _ => {}
        }
    }
}

pub fn five_point() -> CliResult<Report> {
    let mut report = Report::new("five-point", &json!({}));
    let r = five_point_reproduce()?;
    for line in &r.lines {
        report.push(line.check.clone(), &line.anchor, line.ok, &line.detail);
    }
    report.push("all sub-checks", SURJECTIVITY, r.passed, r.lines.len());
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct CompareConfig {
    pub space: Option<PathBuf>,
    pub random: Option<usize>,
    pub seed: Option<u64>,
    pub density: f64,
    pub coefficients: String,
    pub max_degree: usize,
}

pub fn parse_coefficients(s: &str) -> CliResult<Coefficients> {
    match s.to_ascii_lowercase().as_str() {
        "z" => Ok(Coefficients::Integers),
        "q" => Ok(Coefficients::Rationals),
        other => other
            .strip_prefix("z/")
            .and_then(|m| m.parse::<u64>().ok())
            .filter(|m| *m > 0)
            .map(Coefficients::Mod)
            .ok_or_else(|| CliError::Usage(format!("coefficients must be z, q or z/m, got {s:?}"))),
    }
}

fn load_space(cfg: &CompareConfig) -> CliResult<FiniteSpace> {
    match (&cfg.space, cfg.random) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            Ok(parse_space_with_cap(
                &text,
                nestrix::finite::DEFAULT_POINT_CAP,
            )?)
        }
        (None, Some(n)) => {
            let seed = cfg
                .seed
                .ok_or_else(|| CliError::Usage("--random needs --seed".into()))?;
            Ok(FiniteSpace::random(
                n,
                cfg.density,
                seed,
                nestrix::finite::DEFAULT_POINT_CAP,
            )?)
        }
        _ => Err(CliError::Usage(
            "give exactly one of --space and --random".into(),
        )),
    }
}

pub fn compare(cfg: &CompareConfig) -> CliResult<Report> {
    let coefficients = parse_coefficients(&cfg.coefficients)?;
    let x = load_space(cfg)?;
    let mut report = Report::new("compare", cfg);
    for row in compare_cohomology(&x, &coefficients, cfg.max_degree)? {
        report.push(
            format!("H^{}", row.degree),
            COMPARISON,
            row.equal,
            json!({"sheaf": row.sheaf, "simplicial": row.simplicial}),
        );
    }
    let h0 = order_complex_cohomology(&x, &Coefficients::Integers, 0)?;
    let components = x.component_count();
    report.push(
        "rank H^0",
        COMPONENTS,
        h0[0].free_rank == components,
        json!({"rank": h0[0].free_rank, "components": components}),
    );
    if x.len() <= 5 {
        let sheaf = Presheaf::constant_sheaf(&x, &Group::free(1));
        let top = cfg.max_degree.min(2);
        let nerve = nerve_cohomology(&sheaf, top)?;
        let godement = godement_cohomology(&sheaf, top)?;
        let cech = cech_cohomology(&sheaf, &minimal_open_cover(&x), top)?;
        for d in 0..=top {
            let ok = nerve[d] == godement[d] && nerve[d] == cech[d];
            report.push(
                format!("H^{d} three methods"),
                CROSS_CHECK,
                ok,
                json!({"nerve": nerve[d].to_string(), "godement": godement[d].to_string(), "cech": cech[d].to_string()}),
            );
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
struct ScenarioEcho<'a> {
    scenario: &'a Scenario,
    caps: Caps,
}

pub fn load_scenario(path: &std::path::Path) -> CliResult<Scenario> {
    load_json(path)
}

pub fn homotopy(sc: &Scenario, caps: &Caps) -> CliResult<Report> {
    let mut report = Report::new(
        "homotopy",
        &ScenarioEcho {
            scenario: sc,
            caps: *caps,
        },
    );
    let eta = sc.nesting.build()?;
    let oracle = FillerOracle::new(*caps);
    let s = simplex_homotopy(sc.k, &eta, caps, &oracle)?;
    let accepted: Vec<&Vec<usize>> = s.accepted.iter().collect();
    let fillers: Vec<(String, String)> = s
        .fillers
        .iter()
        .map(|(f, st)| (format!("{f:?}"), format!("{st:?}")))
        .collect();
    report.push(
        "instance",
        RETRACTION,
        true,
        json!({"n": s.n(), "cylinder_n": s.cylinder_cover.cylinder.n, "accepted": accepted, "fillers": fillers}),
    );
    push_flags(&mut report, "", RETRACTION, &s.check(sc.samples, sc.seed)?);
    let audit = oracle.audit();
    report.push(
        "filler audit",
        PLUMBING,
        audit.verified == audit.requests,
        audit,
    );
    Ok(report)
}

/// Vertex, boundary and full simplex of the standard `Δ^k`.
fn default_tests(k: usize) -> CliResult<Vec<(String, Chain)>> {
    let top = Chain::affine((0..=k).map(|i| corner(k, i)).collect());
    let mut tests = vec![("vertex".to_string(), Chain::affine(vec![corner(k, 0)]))];
    if k > 0 {
        tests.push(("boundary".to_string(), top.boundary()?));
    }
    tests.push(("simplex".to_string(), top));
    Ok(tests)
}

pub fn calculus(sc: &Scenario, caps: &Caps) -> CliResult<Report> {
    let mut report = Report::new(
        "calculus",
        &ScenarioEcho {
            scenario: sc,
            caps: *caps,
        },
    );
    let eta = sc.nesting.build()?;
    let oracle = FillerOracle::new(*caps);
    caps.check_k(sc.k)?;
    let mut world = World::new(sc.k, eta.clone());
    let checks = world.check(caps, &oracle)?;
    push_flags(&mut report, "world ", CALCULUS, &checks);
    let fills: Vec<(String, String)> = world
        .fills
        .iter()
        .map(|(l, s)| (l.clone(), format!("{s:?}")))
        .collect();
    report.push("fillers", PLUMBING, true, fills);
    if sc.k > 0 {
        let mismatch = Calculus::new(eta.clone(), *caps, &oracle).naturality(sc.k, &eta)?;
        report.push("naturality", CALCULUS, mismatch.is_none(), mismatch);
    }
    let tests = if sc.tests.is_empty() {
        default_tests(sc.k)?
    } else {
        sc.tests
            .iter()
            .map(|t| Ok((t.label.clone(), t.build()?)))
            .collect::<CliResult<_>>()?
    };
    let equiv = chain_homotopy_equiv_report(&eta, &tests, caps, &oracle)?;
    for c in &equiv.checks {
        report.push(format!("chain {}", c.label), EQUIVALENCE, c.passed(), c);
    }
    let audit = oracle.audit();
    report.push(
        "filler audit",
        PLUMBING,
        audit.verified == audit.requests,
        audit,
    );
    Ok(report)
}
