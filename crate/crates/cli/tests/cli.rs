use std::process::{Command, Output};

fn nestrix(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nestrix"))
        .args(args)
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .env_remove("NESTRIX_CAP_OVERRIDE")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("valid json report")
}

#[test]
fn goldens_match() {
    let cases: &[&[&str]] = &[
        &["five-point", "--check", "tests/golden/five_point.json"],
        &[
            "compare",
            "--random",
            "7",
            "--seed",
            "2024",
            "--check",
            "tests/golden/compare_random7.json",
        ],
        &[
            "compare",
            "--space",
            "fixtures/pseudocircle.space",
            "--check",
            "tests/golden/compare_pseudocircle.json",
        ],
        &[
            "homotopy",
            "--scenario",
            "scenarios/segment_small_balls.json",
            "--check",
            "tests/golden/homotopy_segment.json",
        ],
        &[
            "calculus",
            "--scenario",
            "scenarios/triangle_fine_balls.json",
            "--check",
            "tests/golden/calculus_triangle.json",
        ],
        &[
            "props",
            "subdivision",
            "--seed",
            "42",
            "--budget",
            "20",
            "--check",
            "tests/golden/props_subdivision.json",
        ],
    ];
    for args in cases {
        let mut full = args.to_vec();
        full.extend(["--format", "json"]);
        let out = nestrix(&full);
        assert_eq!(code(&out), 0, "{args:?}: {}", stderr(&out));
    }
}

#[test]
fn golden_mismatch_fails_without_bless() {
    let dir = std::env::temp_dir().join(format!("nestrix-golden-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let golden = dir.join("g.json");
    std::fs::write(&golden, "{}\n").unwrap();
    let g = golden.to_str().unwrap();
    let out = nestrix(&["five-point", "--format", "json", "--check", g]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("differs"));
    assert_eq!(
        code(&nestrix(&[
            "five-point",
            "--format",
            "json",
            "--check",
            g,
            "--bless"
        ])),
        0
    );
    assert_eq!(
        code(&nestrix(&["five-point", "--format", "json", "--check", g])),
        0
    );
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let cases: &[&[&str]] = &[
        &[
            "props", "nesting", "--seed", "9", "--budget", "10", "--format", "json",
        ],
        &[
            "props",
            "subdivision",
            "--seed",
            "9",
            "--budget",
            "10",
            "--format",
            "csv",
        ],
        &["compare", "--random", "6", "--seed", "5"],
        &[
            "calculus",
            "--scenario",
            "scenarios/segment_small_balls.json",
            "--format",
            "json",
        ],
    ];
    for args in cases {
        let (a, b) = (nestrix(args), nestrix(args));
        assert_eq!(code(&a), 0, "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn seeds_are_echoed_and_change_random_output() {
    let a = json(&nestrix(&[
        "compare", "--random", "6", "--seed", "5", "--format", "json",
    ]));
    assert_eq!(a["config"]["seed"], 5);
    let names = |seed: &str| {
        let r = json(&nestrix(&[
            "props", "nesting", "--seed", seed, "--budget", "5", "--format", "json",
        ]));
        assert_eq!(r["config"]["config"]["seed"].to_string(), seed);
        r["records"]
            .as_array()
            .unwrap()
            .iter()
            .map(|r| r["name"].to_string())
            .collect::<Vec<_>>()
    };
    assert_ne!(names("1"), names("2"));
}

#[test]
fn every_record_carries_an_anchor() {
    for args in [
        vec!["five-point", "--format", "json"],
        vec!["props", "covering", "--seed", "1", "--format", "json"],
        vec![
            "homotopy",
            "--scenario",
            "scenarios/triangle_balls.json",
            "--format",
            "json",
        ],
    ] {
        let r = json(&nestrix(&args));
        assert_eq!(r["schema"], 1);
        for rec in r["records"].as_array().unwrap() {
            assert!(!rec["anchor"].as_str().unwrap().is_empty(), "{rec}");
        }
    }
}

#[test]
fn projections_report_the_same_counts() {
    let j = json(&nestrix(&[
        "props", "calculus", "--seed", "3", "--format", "json",
    ]));
    let total = j["summary"]["total"].as_u64().unwrap() as usize;
    let csv = stdout(&nestrix(&[
        "props", "calculus", "--seed", "3", "--format", "csv",
    ]));
    assert_eq!(csv.lines().count(), total + 1);
    let text = stdout(&nestrix(&["props", "calculus", "--seed", "3"]));
    assert!(text.contains(&format!("{total} checks, {total} passed, 0 failed")));
}

#[test]
fn out_flag_writes_the_report() {
    let path = std::env::temp_dir().join(format!("nestrix-out-{}.json", std::process::id()));
    let out = nestrix(&[
        "five-point",
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    assert_eq!(
        written,
        stdout(&nestrix(&["five-point", "--format", "json"]))
    );
    std::fs::remove_file(path).unwrap();
}

#[test]
fn five_point_passes_and_names_the_failure() {
    let out = nestrix(&["five-point"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("unit at X is not surjective"));
}

#[test]
fn compare_on_the_five_point_space() {
    let r = json(&nestrix(&[
        "compare",
        "--space",
        "../core/data/five_point.space",
        "--format",
        "json",
    ]));
    assert_eq!(r["summary"]["failed"], 0);
    assert_eq!(r["records"][0]["witness"]["sheaf"], "Z");
    let p = json(&nestrix(&[
        "compare",
        "--space",
        "fixtures/pseudocircle.space",
        "--format",
        "json",
    ]));
    assert_eq!(p["records"][1]["witness"]["simplicial"], "Z");
}

#[test]
fn usage_and_parse_errors_exit_two() {
    let cases: &[&[&str]] = &[
        &["compare", "--space", "fixtures/empty.space"],
        &["compare", "--space", "fixtures/missing.space"],
        &["compare", "--random", "5"],
        &[
            "compare",
            "--random",
            "5",
            "--seed",
            "1",
            "--coefficients",
            "z/0",
        ],
        &["props", "nesting"],
        &["props", "nesting", "--seed", "1", "--budget", "0"],
        &["props", "widgets", "--seed", "1"],
        &["homotopy", "--scenario", "fixtures/malformed_nesting.json"],
        &["calculus", "--scenario", "fixtures/malformed_nesting.json"],
        &[
            "homotopy",
            "--scenario",
            "scenarios/triangle_balls.json",
            "--cap-n",
            "99",
        ],
        &["frobnicate"],
    ];
    for args in cases {
        let out = nestrix(args);
        assert_eq!(code(&out), 2, "{args:?}: {}", stderr(&out));
        assert!(!stderr(&out).contains("panicked"), "{args:?}");
    }
}

#[test]
fn parse_errors_carry_line_numbers() {
    let out = nestrix(&["compare", "--space", "fixtures/bad_line.space"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("line 3"), "{}", stderr(&out));
}

#[test]
fn planted_defect_replay_fails_with_its_witness() {
    let out = nestrix(&[
        "props",
        "nesting",
        "--seed",
        "1",
        "--replay",
        "fixtures/planted_defect.json",
        "--format",
        "json",
    ]);
    assert_eq!(code(&out), 1);
    let r = json(&out);
    let witness = &r["records"][0]["witness"]["witness"];
    assert_eq!(witness["sequence"][0], "(1/5, 1/5)");
    let ok = nestrix(&[
        "props",
        "nesting",
        "--seed",
        "1",
        "--replay",
        "fixtures/healthy_replay.json",
    ]);
    assert_eq!(code(&ok), 0);
}

#[test]
fn every_suite_passes() {
    for suite in [
        "nesting",
        "subdivision",
        "covering",
        "calculus",
        "retraction",
    ] {
        let out = nestrix(&["props", suite, "--seed", "17", "--budget", "10"]);
        assert_eq!(code(&out), 0, "{suite}: {}", stdout(&out));
    }
}

#[test]
fn pipeline_scenarios_pass() {
    for s in [
        "segment_small_balls",
        "triangle_balls",
        "triangle_fine_balls",
        "triangle_ambient",
    ] {
        let path = format!("scenarios/{s}.json");
        assert_eq!(code(&nestrix(&["homotopy", "--scenario", &path])), 0, "{s}");
        assert_eq!(code(&nestrix(&["calculus", "--scenario", &path])), 0, "{s}");
    }
}

#[test]
fn cap_override_is_layered_under_flags() {
    let run = |env: Option<&str>, flag: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_nestrix"));
        cmd.current_dir(env!("CARGO_MANIFEST_DIR")).args([
            "homotopy",
            "--scenario",
            "scenarios/triangle_balls.json",
        ]);
        match env {
            Some(v) => cmd.env("NESTRIX_CAP_OVERRIDE", v),
            None => cmd.env_remove("NESTRIX_CAP_OVERRIDE"),
        };
        if let Some(k) = flag {
            cmd.args(["--cap-k", k]);
        }
        code(&cmd.output().unwrap())
    };
    assert_eq!(run(Some("k=1"), None), 1);
    assert_eq!(run(Some("k=1"), Some("2")), 0);
    assert_eq!(run(Some("k=9"), None), 2);
    assert_eq!(run(Some("bogus"), None), 2);
}
