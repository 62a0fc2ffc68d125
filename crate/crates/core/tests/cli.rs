use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use conic_cond::instance::InstanceFile;
use conic_cond::report::Report;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_conic-cond"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_then_measure_writes_ordered_rows() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("soc.json");
    let csv = dir.path().join("soc.csv");
    let out = run(&[
        "gen",
        "--seed",
        "4",
        "--cone",
        "soc",
        "--dim",
        "3",
        "--subspace-dim",
        "2",
        "--require",
        "feasible",
        "--out",
        path(&inst),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let out = run(&["measure", "--instance", path(&inst), "--out", path(&csv)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    let report = Report::parse(&fs::read_to_string(&csv).unwrap()).unwrap();
    let names: Vec<&str> = report.measures.iter().map(|m| m.name.as_str()).collect();
    for want in ["nu", "sigma", "sym", "theta"] {
        assert!(names.contains(&want), "{names:?}");
    }
    assert!(report.measures.iter().all(|m| m.is_ordered()));
    assert!(
        report
            .measures
            .iter()
            .find(|m| m.name == "nu")
            .unwrap()
            .lower
            > 0.0
    );
}

#[test]
fn gen_is_deterministic() {
    let args = [
        "gen",
        "--seed",
        "9",
        "--cone",
        "orthant",
        "--dim",
        "4",
        "--subspace-dim",
        "2",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert_eq!(InstanceFile::parse(&text).unwrap().emit(), text);
}

#[test]
fn bad_inputs_exit_with_usage_code() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, text: &str| {
        let p = dir.path().join(name);
        fs::write(&p, text).unwrap();
        p
    };
    let truncated = write("truncated.json", "{\"version\": \"1\",\n");
    let v2 = write(
        "v2.json",
        r#"{"version":"2","cone":{"type":"orthant","dim":2},"norm":{"type":"l2"},"subspace":{"form":"span","matrix":[[1],[1]]}}"#,
    );
    let cube = write(
        "cube.json",
        r#"{"version":"1","cone":{"type":"cube","dim":2},"norm":{"type":"l2"},"subspace":{"form":"span","matrix":[[1],[1]]}}"#,
    );
    let mismatch = write(
        "mismatch.json",
        r#"{"version":"1","cone":{"type":"orthant","dim":3},"norm":{"type":"l2"},"subspace":{"form":"span","matrix":[[1,0,0,0],[0,1,0,0]]}}"#,
    );
    for (p, needle) in [
        (&truncated, "parse error at line 2"),
        (&v2, "version"),
        (&cube, "unknown cone type"),
        (&mismatch, "dimension mismatch"),
    ] {
        let out = run(&["measure", "--instance", path(p)]);
        assert_eq!(code(&out), 2, "{p:?}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains(needle), "{err}");
    }
    assert_eq!(
        code(&run(&[
            "measure",
            "--instance",
            path(&dir.path().join("missing.json"))
        ])),
        2
    );
    assert_eq!(code(&run(&["measure"])), 2);
    assert_eq!(code(&run(&["verify", "--suite", "nope"])), 2);
    assert_eq!(code(&run(&["verify", "--tol", "-1"])), 2);
    assert_eq!(
        code(&run(&[
            "gen",
            "--cone",
            "orthant",
            "--dim",
            "2",
            "--subspace-dim",
            "2",
            "--require",
            "infeasible"
        ])),
        2
    );
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn verify_exit_codes() {
    let ok = run(&[
        "verify", "--suite", "symmetry", "--trials", "6", "--seed", "3",
    ]);
    assert_eq!(code(&ok), 0, "{}", String::from_utf8_lossy(&ok.stdout));
    let bad = run(&[
        "verify",
        "--suite",
        "symmetry",
        "--trials",
        "6",
        "--debug-corrupt-bounds",
    ]);
    assert_eq!(code(&bad), 1);
    assert!(String::from_utf8_lossy(&bad.stdout).contains("VIOLATED"));
}

#[test]
fn thread_count_comes_from_the_environment() {
    let out = bin()
        .args(["verify", "--suite", "nu-sigma", "--trials", "4"])
        .env("CONIC_COND_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let out = bin()
        .args(["verify", "--suite", "holder"])
        .env("CONIC_COND_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn sequential_and_parallel_reports_match() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let args = [
        "verify", "--suite", "nu-sigma", "--trials", "5", "--seed", "11", "--out",
    ];
    assert_eq!(code(&bin().args(args).arg(&a).output().unwrap()), 0);
    assert_eq!(
        code(
            &bin()
                .arg("--sequential")
                .args(args)
                .arg(&b)
                .output()
                .unwrap()
        ),
        0
    );
    let strip = |p: &Path| {
        let mut r = Report::parse(&fs::read_to_string(p).unwrap()).unwrap();
        r.measures.iter_mut().for_each(|m| m.wall_ms = 0.0);
        r
    };
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn renegar_on_generated_data() {
    let dir = tempfile::tempdir().unwrap();
    for (form, args) in [
        (
            "image",
            ["--dim", "3", "--subspace-dim", "2", "--form", "image"],
        ),
        (
            "kernel",
            ["--dim", "3", "--subspace-dim", "1", "--form", "kernel"],
        ),
    ] {
        let inst = dir.path().join(format!("{form}.json"));
        let csv = dir.path().join(format!("{form}.csv"));
        let out = bin()
            .args([
                "gen",
                "--seed",
                "2",
                "--cone",
                "orthant",
                "--require",
                "feasible",
                "--out",
            ])
            .arg(&inst)
            .args(args)
            .output()
            .unwrap();
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        let out = run(&[
            "renegar",
            "--instance",
            path(&inst),
            "--form",
            form,
            "--tighten",
            "200",
            "--seed",
            "5",
            "--out",
            path(&csv),
        ]);
        assert_eq!(
            code(&out),
            0,
            "{form}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let report = Report::parse(&fs::read_to_string(&csv).unwrap()).unwrap();
        let dist = report.measures.iter().find(|m| m.name == "dist").unwrap();
        assert!(0.0 < dist.lower && dist.lower <= dist.upper);
        assert!(
            report.checks.iter().all(|c| c.status == "HOLDS"),
            "{}",
            report.summary()
        );
    }
    // a span instance has no kernel-form data map
    let inst = dir.path().join("image.json");
    assert_eq!(
        code(&run(&[
            "renegar",
            "--instance",
            path(&inst),
            "--form",
            "kernel"
        ])),
        2
    );
}
