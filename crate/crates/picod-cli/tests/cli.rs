use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../picod/fixtures")
        .join(name)
}

fn picod(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_picod"))
        .args(args)
        .env_remove("PICOD_BUDGET")
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn path_str(path: &Path) -> String {
    path.to_str().expect("utf-8 path").to_owned()
}

#[test]
fn solve_prints_length_two_on_the_nine_message_example() {
    let out = picod(&["solve", "--algo", "alg1", &path_str(&fixture("example2.instance"))]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.starts_with("length 2\n"), "got: {text}");
    assert!(text.contains("row sparse 1 3 5"));
    assert!(text.contains("row sparse 2 4 6"));
}

#[test]
fn solve_accepts_the_degree_alias_and_other_algorithms() {
    let inst = path_str(&fixture("example1.instance"));
    let out = picod(&["solve", "--algo", "degree", &inst]);
    assert!(out.status.success());
    assert!(stdout_of(&out).starts_with("length 4\n"));

    let out = picod(&["solve", "--algo", "grcov", &inst]);
    assert!(out.status.success());
    assert!(stdout_of(&out).starts_with("length 3\n"));

    let out = picod(&["solve", "--algo", "cover", &inst]);
    assert!(out.status.success());
    assert!(stdout_of(&out).starts_with("length 3\n"));
}

#[test]
fn verify_accepts_the_bundled_schemes() {
    for name in ["example1", "example2"] {
        let out = picod(&[
            "verify",
            &path_str(&fixture(&format!("{name}.instance"))),
            &path_str(&fixture(&format!("{name}.scheme"))),
        ]);
        assert!(out.status.success(), "{name} should verify");
        assert!(stdout_of(&out).contains("all satisfied"));
    }
}

#[test]
fn verify_rejects_an_insufficient_scheme_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let scheme = dir.path().join("short.scheme");
    std::fs::write(
        &scheme,
        "picod scheme v1\nfield 2\nmessages 9\nrows 1\nrow sparse 9\n",
    )
    .unwrap();
    let out = picod(&[
        "verify",
        &path_str(&fixture("example2.instance")),
        &path_str(&scheme),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout_of(&out).contains("UNSATISFIED"));
}

#[test]
fn certify_then_check_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("e1.cert");
    let inst = path_str(&fixture("example1.instance"));

    let out = picod(&["certify", &inst, "-o", &path_str(&cert)]);
    assert!(out.status.success());
    assert!(stdout_of(&out).contains("lower=3 (nesting), upper=3, TIGHT"));

    let out = picod(&["check", &inst, &path_str(&cert)]);
    assert!(out.status.success());
    assert!(stdout_of(&out).contains("certificate OK"));

    // The same certificate must not validate against a different instance.
    let out = picod(&[
        "check",
        &path_str(&fixture("example2.instance")),
        &path_str(&cert),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bound_reports_all_three_routes() {
    let out = picod(&["bound", &path_str(&fixture("example2.instance"))]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.contains("nesting strict = 2 (exact)"));
    assert!(text.contains("chain-min = 2"));
    assert!(text.contains("one-transmission = infeasible"));
}

#[test]
fn oracle_confirms_the_nine_message_optimum() {
    let out = picod(&[
        "oracle",
        "--field",
        "2",
        "--max-len",
        "3",
        &path_str(&fixture("example2.instance")),
    ]);
    assert!(out.status.success());
    assert!(stdout_of(&out).contains("optimum 2 (exact)"));
}

#[test]
fn components_solves_and_recombines() {
    let out = picod(&[
        "components",
        &path_str(&fixture("example2.instance")),
        "--solve-combined",
    ]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(text.contains("1 component(s)"));
    assert!(text.contains("combined length 2"));
}

#[test]
fn gen_is_deterministic_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.instance");
    let b = dir.path().join("b.instance");
    for out in [&a, &b] {
        let run = picod(&[
            "gen",
            "--model",
            "uniform-k",
            "--messages",
            "8",
            "--clients",
            "8",
            "--set-size",
            "3",
            "--seed",
            "42",
            "-o",
            &path_str(out),
        ]);
        assert!(run.status.success());
    }
    assert_eq!(
        std::fs::read_to_string(&a).unwrap(),
        std::fs::read_to_string(&b).unwrap()
    );
}

#[test]
fn bench_writes_a_deterministic_length_report() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["example1.instance", "example2.instance"] {
        std::fs::copy(fixture(name), dir.path().join(name)).unwrap();
    }
    let report1 = dir.path().join("r1.txt");
    let report2 = dir.path().join("r2.txt");
    for report in [&report1, &report2] {
        let out = picod(&[
            "bench",
            "--corpus",
            &path_str(dir.path()),
            "--out",
            &path_str(report),
        ]);
        assert!(out.status.success());
    }
    let text = std::fs::read_to_string(&report1).unwrap();
    assert_eq!(text, std::fs::read_to_string(&report2).unwrap());
    assert!(text.contains("example1.instance 12 12 5 4 3"));
    assert!(text.contains("example2.instance 9 9 2 2 2"));
}

#[test]
fn exit_codes_distinguish_failure_classes() {
    // Usage error: unknown subcommand (clap's conventional exit 2).
    let out = picod(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));

    // Parse error.
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.instance");
    std::fs::write(&bad, "not a picod file\n").unwrap();
    let out = picod(&["solve", &path_str(&bad)]);
    assert_eq!(out.status.code(), Some(3));

    // Infeasible generator parameters.
    let out = picod(&[
        "gen", "--model", "matching", "--messages", "4", "--clients", "5", "--set-size",
        "2", "--seed", "0",
    ]);
    assert_eq!(out.status.code(), Some(4));

    // Budget exhaustion.
    let out = picod(&[
        "solve",
        "--algo",
        "cover",
        "--budget",
        "3",
        &path_str(&fixture("example1.instance")),
    ]);
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn environment_variable_sets_the_default_budget() {
    let out = Command::new(env!("CARGO_BIN_EXE_picod"))
        .args([
            "solve",
            "--algo",
            "cover",
            &path_str(&fixture("example1.instance")),
        ])
        .env("PICOD_BUDGET", "3")
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(5));

    // An explicit flag still wins over the environment.
    let out = Command::new(env!("CARGO_BIN_EXE_picod"))
        .args([
            "solve",
            "--algo",
            "cover",
            "--budget",
            "1000000",
            &path_str(&fixture("example1.instance")),
        ])
        .env("PICOD_BUDGET", "3")
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(0));
}
