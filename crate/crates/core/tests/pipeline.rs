mod common;

use std::fs;
use std::process::Command as Process;

use common::{load_spec, spec_path};
use mumford_lambda::cli::{run, Command, CurveSpec, PeriodCache};
use mumford_lambda::Error;

fn mumford(args: &[&str]) -> std::process::Output {
    Process::new(env!("CARGO_BIN_EXE_mumford"))
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn cached_periods_reproduce_the_cold_run() {
    let dir = tempfile::tempdir().unwrap();
    let spec = load_spec("genus2");
    let cold = run(Command::Lambdas, &spec, Some(dir.path())).unwrap();
    let cache = PeriodCache::new(dir.path());
    let key = spec.group_hash().unwrap();
    assert!(cache.path(&key, spec.trunc).exists());
    let warm = run(Command::Lambdas, &spec, Some(dir.path())).unwrap();
    assert_eq!(cold.notes, vec!["period cache miss".to_string()]);
    assert_eq!(warm.notes, vec!["period cache hit".to_string()]);
    assert_eq!(cold.body(), warm.body());
    assert!(cold.passed());
    let stored = cache
        .load(&key, spec.trunc, spec.work_context().unwrap())
        .unwrap()
        .unwrap();
    assert_eq!(stored.q.entries.len(), 2);
}

#[test]
fn cache_is_keyed_by_truncation() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = load_spec("tate");
    run(Command::Periods, &spec, Some(dir.path())).unwrap();
    spec.trunc = 16;
    let other = run(Command::Periods, &spec, Some(dir.path())).unwrap();
    assert_eq!(other.notes, vec!["period cache miss".to_string()]);
    spec.radius = 6;
    let same_group = run(Command::Periods, &spec, Some(dir.path())).unwrap();
    assert_eq!(same_group.notes, vec!["period cache hit".to_string()]);
}

#[test]
fn reports_are_deterministic_and_written_by_hash() {
    let spec = load_spec("tate");
    let a = run(Command::Verify, &spec, None).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let b = run(Command::Verify, &spec, Some(dir.path())).unwrap();
    assert_eq!(a.body(), b.body());
    assert!(a.passed(), "{}", a.body());
    let path = dir
        .path()
        .join(format!("{}-verify.txt", &spec.config_hash()[..16]));
    assert_eq!(fs::read_to_string(path).unwrap(), b.body());
    assert_eq!(a.get("genus"), Some("1"));
    assert!(a.body().ends_with("status = PASS\n"));
}

#[test]
fn short_truncation_suggests_a_longer_one() {
    let mut spec = load_spec("genus2");
    spec.trunc = 4;
    match run(Command::Periods, &spec, None) {
        Err(Error::Stage {
            stage: "periods",
            source,
        }) => match *source {
            Error::TailBoundNotMet {
                achieved,
                requested,
                suggested_len,
            } => {
                assert!(achieved < requested);
                assert_eq!(requested, 10);
                assert!(
                    suggested_len > 4 && suggested_len % 2 == 0,
                    "{suggested_len}"
                );
                spec.trunc = suggested_len;
                assert!(run(Command::Periods, &spec, None).unwrap().passed());
            }
            other => panic!("unexpected {other}"),
        },
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn invalid_specs_are_rejected() {
    let base = fs::read_to_string(spec_path("tate")).unwrap();
    let odd = base.replace("trunc = 14", "trunc = 13");
    assert!(matches!(CurveSpec::from_toml(&odd), Err(Error::Spec(_))));
    let mut spec = load_spec("tate");
    spec.trunc = 13;
    assert!(matches!(
        run(Command::Certify, &spec, None),
        Err(Error::Spec(_))
    ));
    assert!(CurveSpec::from_toml(&format!("{base}\nunknown = 1\n")).is_err());
    let even_prime = base.replace("prime = 5", "prime = 2");
    assert!(matches!(
        CurveSpec::from_toml(&even_prime),
        Err(Error::Spec(_))
    ));
    let one_ball = CurveSpec {
        balls: load_spec("tate").balls.map(|b| b[..1].to_vec()),
        ..load_spec("tate")
    };
    assert_eq!(
        one_ball.validate(),
        Err(Error::BallCountMismatch {
            expected: 2,
            got: 1
        })
    );
}

#[test]
fn overlapping_balls_fail_the_certificate() {
    let text = fs::read_to_string(spec_path("tate"))
        .unwrap()
        .replace("complement = true", "complement = false");
    let rep = run(Command::Verify, &CurveSpec::from_toml(&text).unwrap(), None).unwrap();
    assert!(!rep.passed());
    assert_eq!(rep.checks.len(), 1);
    assert_eq!(rep.checks[0].name, "certificate");
}

#[test]
fn binary_exit_codes() {
    let tate = spec_path("tate");
    let tate = tate.to_str().unwrap();
    let ok = mumford(&["certify", "--spec", tate]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("check certificate = PASS"));

    let short = mumford(&["periods", "--spec", tate, "--trunc", "2"]);
    assert_eq!(short.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&short.stderr).contains("try word length"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    let text = fs::read_to_string(spec_path("tate"))
        .unwrap()
        .replace("complement = true", "complement = false");
    fs::write(&bad, text).unwrap();
    let failed = mumford(&["certify", "--spec", bad.to_str().unwrap()]);
    assert_eq!(failed.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&failed.stdout).contains("status = FAIL"));

    let missing = mumford(&["verify", "--spec", "/nonexistent/spec.toml"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn binary_verify_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let tate = spec_path("tate");
    let run = mumford(&[
        "verify",
        "--spec",
        tate.to_str().unwrap(),
        "--radius",
        "8",
        "--tolerance",
        "10",
        "--out",
        out,
    ]);
    assert_eq!(
        run.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    let stdout = String::from_utf8_lossy(&run.stdout).into_owned();
    let hash = load_spec("tate").config_hash();
    assert_eq!(
        fs::read_to_string(dir.path().join(format!("{}-verify.txt", &hash[..16]))).unwrap(),
        stdout
    );
    assert!(String::from_utf8_lossy(&run.stderr).contains("note period cache miss"));
}
