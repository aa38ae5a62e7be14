//! One pass/fail line per acceptance criterion. Run with `--nocapture` to
//! see the lines; the test fails if any criterion fails.

use std::process::Command;
use std::time::{Duration, Instant};

use nestrix::algebra::Coefficients;
use nestrix::finite::{FiniteSpace, DEFAULT_POINT_CAP};
use nestrix::homotopy::Caps;
use nestrix::sheaf::{
    cech_cohomology, compare_cohomology, godement_cohomology, minimal_open_cover, nerve_cohomology,
    order_complex_cohomology, Group, Presheaf,
};
use nestrix_cli::commands;
use nestrix_cli::report::Report;
use nestrix_cli::scenario::Scenario;
use nestrix_cli::suites::{run_suite, SuiteConfig};

type Outcome = Result<String, String>;

const SEED: u64 = 20240611;

fn caps() -> Caps {
    Caps::default()
}

fn scenario(name: &str) -> Scenario {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("scenarios")
        .join(format!("{name}.json"));
    commands::load_scenario(&path).expect("scenario loads")
}

fn summarize(report: &Report) -> Outcome {
    let failed: Vec<&str> = report
        .records
        .iter()
        .filter(|r| r.status == nestrix_cli::report::Status::Fail)
        .map(|r| r.name.as_str())
        .collect();
    if failed.is_empty() {
        Ok(format!("{} checks", report.records.len()))
    } else {
        Err(format!("failed: {}", failed.join(", ")))
    }
}

fn suite(name: &str, budget: usize) -> Outcome {
    let cfg = SuiteConfig {
        seed: SEED,
        budget,
        caps: caps(),
    };
    let mut report = Report::new("props", &cfg);
    run_suite(name, &cfg, &mut report).map_err(|e| e.to_string())?;
    summarize(&report)
}

fn corpus() -> Vec<(String, FiniteSpace)> {
    let mut spaces = vec![
        ("five-point".to_string(), FiniteSpace::five_point()),
        ("sierpinski".to_string(), FiniteSpace::sierpinski()),
        ("pseudocircle".to_string(), FiniteSpace::pseudocircle()),
    ];
    for i in 0..20u64 {
        let n = 3 + (i as usize % 5);
        let x = FiniteSpace::random(n, 0.35, SEED + i, DEFAULT_POINT_CAP).expect("random space");
        spaces.push((format!("random-{n}-{i}"), x));
    }
    spaces
}

fn five_point_reproduction() -> Outcome {
    let report = commands::five_point().map_err(|e| e.to_string())?;
    summarize(&report)
}

fn comparison() -> Outcome {
    let (mut degrees, mut cross) = (0, 0);
    for (name, x) in corpus() {
        for row in compare_cohomology(&x, &Coefficients::Integers, 3).map_err(|e| e.to_string())? {
            if !row.equal {
                return Err(format!(
                    "{name} H^{}: {} vs {}",
                    row.degree, row.sheaf, row.simplicial
                ));
            }
            degrees += 1;
        }
        if x.len() <= 5 {
            let f = Presheaf::constant_sheaf(&x, &Group::free(1));
            let nerve = nerve_cohomology(&f, 2).map_err(|e| e.to_string())?;
            let godement = godement_cohomology(&f, 2).map_err(|e| e.to_string())?;
            let cech =
                cech_cohomology(&f, &minimal_open_cover(&x), 2).map_err(|e| e.to_string())?;
            if nerve != godement || nerve != cech {
                return Err(format!("{name}: methods disagree"));
            }
            cross += 1;
        }
    }
    Ok(format!(
        "{degrees} degrees equal, {cross} spaces cross-checked"
    ))
}

fn components() -> Outcome {
    let spaces = corpus();
    for (name, x) in &spaces {
        let h0 =
            order_complex_cohomology(x, &Coefficients::Integers, 0).map_err(|e| e.to_string())?;
        if h0[0].free_rank != x.component_count() {
            return Err(format!(
                "{name}: rank {} vs {} components",
                h0[0].free_rank,
                x.component_count()
            ));
        }
    }
    Ok(format!("{} spaces", spaces.len()))
}

fn pipelines(
    command: fn(&Scenario, &Caps) -> nestrix_cli::error::CliResult<Report>,
    names: &[&str],
) -> Outcome {
    let mut total = 0;
    for name in names {
        let report = command(&scenario(name), &caps()).map_err(|e| format!("{name}: {e}"))?;
        total += report.records.len();
        summarize(&report).map_err(|e| format!("{name}: {e}"))?;
    }
    Ok(format!("{total} checks over {} scenarios", names.len()))
}

fn simplex_homotopy() -> Outcome {
    let covering = suite("covering", 1)?;
    let runs = pipelines(
        commands::homotopy,
        &["segment_small_balls", "triangle_balls", "triangle_ambient"],
    )?;
    Ok(format!("coverings {covering}; {runs}"))
}

fn calculus() -> Outcome {
    let props = suite("calculus", 1)?;
    let runs = pipelines(
        commands::calculus,
        &[
            "segment_small_balls",
            "triangle_fine_balls",
            "triangle_ambient",
        ],
    )?;
    Ok(format!("worlds and naturality {props}; {runs}"))
}

fn determinism() -> Outcome {
    let dir = env!("CARGO_MANIFEST_DIR");
    let commands: &[&[&str]] = &[
        &["five-point", "--format", "json"],
        &[
            "compare", "--random", "7", "--seed", "11", "--format", "json",
        ],
        &[
            "compare",
            "--space",
            "fixtures/pseudocircle.space",
            "--format",
            "csv",
        ],
        &[
            "props", "nesting", "--seed", "5", "--budget", "25", "--format", "json",
        ],
        &[
            "props",
            "subdivision",
            "--seed",
            "5",
            "--budget",
            "10",
            "--format",
            "json",
        ],
        &["props", "covering", "--seed", "5", "--format", "json"],
        &["props", "calculus", "--seed", "5", "--format", "json"],
        &["props", "retraction", "--seed", "5", "--format", "json"],
        &[
            "homotopy",
            "--scenario",
            "scenarios/triangle_balls.json",
            "--format",
            "json",
        ],
        &[
            "calculus",
            "--scenario",
            "scenarios/triangle_fine_balls.json",
            "--format",
            "json",
        ],
    ];
    for args in commands {
        let run = || {
            Command::new(env!("CARGO_BIN_EXE_nestrix"))
                .args(*args)
                .current_dir(dir)
                .env_remove("NESTRIX_CAP_OVERRIDE")
                .output()
                .map_err(|e| e.to_string())
        };
        let (a, b) = (run()?, run()?);
        if a.stdout.is_empty() || a.stdout != b.stdout || a.status.code() != b.status.code() {
            return Err(format!("{} differs between runs", args.join(" ")));
        }
    }
    Ok(format!("{} commands", commands.len()))
}

struct Criterion {
    id: usize,
    title: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

#[test]
fn acceptance() {
    let criteria = [
        Criterion {
            id: 1,
            title: "five-point surjectivity failure",
            limit: Duration::from_secs(1),
            run: five_point_reproduction,
        },
        Criterion {
            id: 2,
            title: "sheaf and order complex cohomology agree",
            limit: Duration::from_secs(60),
            run: comparison,
        },
        Criterion {
            id: 3,
            title: "degree zero rank counts components",
            limit: Duration::from_secs(60),
            run: components,
        },
        Criterion {
            id: 4,
            title: "subdivision and prism operator identities",
            limit: Duration::from_secs(30),
            run: || suite("subdivision", 50),
        },
        Criterion {
            id: 5,
            title: "nesting axioms and membership implications",
            limit: Duration::from_secs(60),
            run: || suite("nesting", 1000),
        },
        Criterion {
            id: 6,
            title: "retraction of a simplex onto small chains",
            limit: Duration::from_secs(120),
            run: simplex_homotopy,
        },
        Criterion {
            id: 7,
            title: "homotopy calculus and equivalence",
            limit: Duration::from_secs(300),
            run: calculus,
        },
        Criterion {
            id: 8,
            title: "subdivision retraction into a cover",
            limit: Duration::from_secs(10),
            run: || suite("retraction", 1),
        },
        Criterion {
            id: 9,
            title: "byte-identical reports",
            limit: Duration::from_secs(120),
            run: determinism,
        },
    ];
    let mut failed = Vec::new();
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) if elapsed <= c.limit => (true, d),
            Ok(d) => (false, format!("{d}; over the {:?} limit", c.limit)),
            Err(e) => (false, e),
        };
        println!(
            "criterion {} {} {} ({:.2}s) {}",
            c.id,
            if ok { "PASS" } else { "FAIL" },
            c.title,
            elapsed.as_secs_f64(),
            detail
        );
        if !ok {
            failed.push(c.id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
