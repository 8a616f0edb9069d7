use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use locc_cli::format::{
    matrix_from_json, read_json, LoPopescuFile, MatrixJson, ProtocolFile, StateFile,
};
use locc_core::linalg::{is_contraction, is_unitary, Matrix};
use locc_core::protocol::full_pipeline;
use locc_core::random;
use locc_core::states::BipartiteState;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

fn locc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_locc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

/// Writes a diagonal state with the given squared Schmidt coefficients.
fn diag_file(dir: &Path, name: &str, spec: &[f64]) -> PathBuf {
    let n = spec.len();
    let mut amplitudes = vec![[0.0, 0.0]; n * n];
    for (i, s) in spec.iter().enumerate() {
        amplitudes[i * n + i] = [s.sqrt(), 0.0];
    }
    let path = dir.join(name);
    fs::write(
        &path,
        serde_json::to_string(&StateFile {
            dims: [n, n],
            amplitudes,
        })
        .unwrap(),
    )
    .unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

struct Fixture {
    dir: TempDir,
    bell: PathBuf,
    eighty: PathBuf,
    product: PathBuf,
}

fn fixture() -> Fixture {
    let dir = TempDir::new().unwrap();
    let bell = diag_file(dir.path(), "bell.json", &[0.5, 0.5]);
    let eighty = diag_file(dir.path(), "eighty.json", &[0.8, 0.2]);
    let product = diag_file(dir.path(), "product.json", &[1.0, 0.0]);
    Fixture {
        dir,
        bell,
        eighty,
        product,
    }
}

#[test]
fn check_reports() {
    let f = fixture();
    let o = locc(&["check", s(&f.bell), s(&f.eighty)]);
    assert_eq!(code(&o), 0);
    assert!(
        stdout(&o).contains("deterministic: yes, pMax = 1"),
        "{}",
        stdout(&o)
    );

    let o = locc(&["check", s(&f.eighty), s(&f.bell)]);
    assert_eq!(code(&o), 0);
    assert!(
        stdout(&o).contains("deterministic: no, pMax = 0.4"),
        "{}",
        stdout(&o)
    );

    let o = locc(&["check", s(&f.product), s(&f.bell)]);
    assert_eq!(code(&o), 2);
    assert!(stdout(&o).contains("rank(A) < rank(B)"));
}

#[test]
fn check_structured_output() {
    let f = fixture();
    let o = locc(&["--format", "structured", "check", s(&f.eighty), s(&f.bell)]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["p_max"].as_f64().unwrap() - 0.4).abs() < 1e-12);
    assert_eq!(v["deterministic"], false);
}

#[test]
fn io_and_usage_errors() {
    let f = fixture();
    let missing = f.dir.path().join("missing.json");
    assert_eq!(code(&locc(&["check", s(&missing), s(&f.bell)])), 1);
    let garbage = f.dir.path().join("garbage.json");
    fs::write(&garbage, "{\"dims\": [2, 2]}").unwrap();
    assert_eq!(code(&locc(&["check", s(&garbage), s(&f.bell)])), 1);
    let short = f.dir.path().join("short.json");
    fs::write(&short, r#"{"dims":[2,2],"amplitudes":[[1,0]]}"#).unwrap();
    assert_eq!(code(&locc(&["check", s(&short), s(&f.bell)])), 1);
    assert_eq!(code(&locc(&["frobnicate"])), 1);
    assert_eq!(code(&locc(&["--help"])), 0);
    let out = f.dir.path().join("p.json");
    assert_eq!(
        code(&locc(&[
            "synth",
            s(&f.eighty),
            s(&f.bell),
            "--prob",
            "0.3",
            "--max",
            "--out",
            s(&out)
        ])),
        1
    );
    assert_eq!(
        code(&locc(&["--tol", "-1", "check", s(&f.bell), s(&f.bell)])),
        1
    );
}

#[test]
fn unnormalized_state_is_warned_about() {
    let f = fixture();
    let path = f.dir.path().join("loose.json");
    fs::write(
        &path,
        r#"{"dims":[2,2],"amplitudes":[[2,0],[0,0],[0,0],[1,0]]}"#,
    )
    .unwrap();
    let o = locc(&["check", s(&path), s(&f.bell)]);
    assert_eq!(code(&o), 0);
    assert!(stderr(&o).contains("normalized on load"));
    assert!(stdout(&o).contains("pMax = 0.4"), "{}", stdout(&o));
}

#[test]
fn synth_deterministic_instance() {
    let f = fixture();
    let out = f.dir.path().join("p.json");
    let o = locc(&["synth", s(&f.bell), s(&f.eighty), "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("branches: 2 (Caratheodory bound (n-1)^2+1 = 2"));
    let p: ProtocolFile = read_json(&out).unwrap();
    assert_eq!(p.stage1.len(), 2);
    assert!(p.stage2.is_none());
    assert_eq!(p.declared_probability, 1.0);
    assert_eq!(
        code(&locc(&["verify", s(&out), s(&f.bell), s(&f.eighty)])),
        0
    );
}

#[test]
fn synth_probabilistic_instance() {
    let f = fixture();
    let out = f.dir.path().join("p.json");
    let o = locc(&[
        "synth",
        s(&f.eighty),
        s(&f.bell),
        "--prob",
        "0.4",
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let p: ProtocolFile = read_json(&out).unwrap();
    assert!(p.stage2.is_some());
    assert!((p.declared_probability - 0.4).abs() < 1e-12);

    let o = locc(&["verify", s(&out), s(&f.eighty), s(&f.bell)]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("result: PASS"));
    assert!(stdout(&o).contains("measured 0.4"));
}

#[test]
fn synth_three_level_instance() {
    let f = fixture();
    let a = diag_file(f.dir.path(), "a3.json", &[0.5, 0.3, 0.2]);
    let third = 1.0 / 3.0;
    let b = diag_file(f.dir.path(), "b3.json", &[third, third, third]);
    let out = f.dir.path().join("p.json");
    let o = locc(&["synth", s(&a), s(&b), "--max", "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(
        stdout(&o).contains("success probability: 0.6"),
        "{}",
        stdout(&o)
    );
    assert!(stdout(&o).contains("bound (n-1)^2+1 = 5"));
    let p: ProtocolFile = read_json(&out).unwrap();
    assert!(p.stage1.len() <= 5);
    assert_eq!(code(&locc(&["verify", s(&out), s(&a), s(&b)])), 0);
}

#[test]
fn synth_refuses_infeasible_targets() {
    let f = fixture();
    let out = f.dir.path().join("p.json");
    let o = locc(&[
        "synth",
        s(&f.eighty),
        s(&f.bell),
        "--prob",
        "0.5",
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&o), 2);
    assert!(!out.exists());
    assert_eq!(
        code(&locc(&[
            "synth",
            s(&f.product),
            s(&f.bell),
            "--out",
            s(&out)
        ])),
        2
    );
    assert!(!out.exists());
}

#[test]
fn tampered_protocol_fails_verification() {
    let f = fixture();
    let out = f.dir.path().join("p.json");
    assert_eq!(
        code(&locc(&[
            "synth",
            s(&f.bell),
            s(&f.eighty),
            "--out",
            s(&out)
        ])),
        0
    );
    let mut p: ProtocolFile = read_json(&out).unwrap();
    p.stage1[0].m[0][0][0] *= 1.01;
    let bad = f.dir.path().join("bad.json");
    fs::write(&bad, serde_json::to_string(&p).unwrap()).unwrap();
    let o = locc(&["verify", s(&bad), s(&f.bell), s(&f.eighty)]);
    assert_eq!(code(&o), 3);
    assert!(stdout(&o).contains("result: FAIL"));

    // right protocol, wrong states
    let o = locc(&["verify", s(&out), s(&f.bell), s(&f.bell)]);
    assert_eq!(code(&o), 3);
}

#[test]
fn simulate_is_reproducible() {
    let f = fixture();
    let out = f.dir.path().join("p.json");
    assert_eq!(
        code(&locc(&[
            "synth",
            s(&f.eighty),
            s(&f.bell),
            "--out",
            s(&out)
        ])),
        0
    );
    let args = [
        "simulate",
        s(&out),
        s(&f.eighty),
        "--trials",
        "20000",
        "--seed",
        "42",
    ];
    let first = locc(&args);
    assert_eq!(code(&first), 0);
    let second = locc(&args);
    assert_eq!(first.stdout, second.stdout);
    let mut parallel = args.to_vec();
    parallel.extend(["--workers", "5"]);
    assert_eq!(first.stdout, locc(&parallel).stdout);
    assert!(stdout(&first).contains("trials: 20000, seed: 42"));

    let o = locc(&[
        "--format",
        "structured",
        "simulate",
        s(&out),
        s(&f.eighty),
        "--trials",
        "1000",
        "--seed",
        "1",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let total: u64 = v["outcome_counts"]
        .as_object()
        .unwrap()
        .values()
        .map(|c| c.as_u64().unwrap())
        .sum();
    assert_eq!(total, 1000);
}

#[test]
fn lopopescu_command() {
    let f = fixture();
    let m = f.dir.path().join("m.json");
    fs::write(&m, "[[[1,0],[0,0]],[[0,0],[0,0]]]").unwrap();
    let out = f.dir.path().join("nu.json");
    let o = locc(&["lopopescu", s(&m), s(&f.eighty), "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let nu: LoPopescuFile = read_json(&out).unwrap();
    let n = matrix_from_json(&nu.n).unwrap();
    let u = matrix_from_json(&nu.u).unwrap();
    assert!(is_contraction(&n, 1e-9) && is_unitary(&u, 1e-9));
    let psi = Matrix::<f64>::diag(&[0.8f64.sqrt(), 0.2f64.sqrt()]);
    let mb = Matrix::<f64>::diag(&[1.0, 0.0]);
    assert!((&psi * &mb.transpose()).max_abs_diff(&(&(&n * &psi) * &u.transpose())) < 1e-9);

    fs::write(&m, "[[[2,0],[0,0]],[[0,0],[0,0]]]").unwrap();
    assert_eq!(
        code(&locc(&["lopopescu", s(&m), s(&f.eighty), "--out", s(&out)])),
        1
    );
}

#[test]
fn state_and_protocol_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let a: BipartiteState<f64> = random::random_state(&mut rng, 3, 4, 3);
        let b: BipartiteState<f64> = random::random_state(&mut rng, 3, 4, 2);
        let text = serde_json::to_string(&StateFile::from_state(&a)).unwrap();
        let back: StateFile = serde_json::from_str(&text).unwrap();
        let (a2, _) = back.to_state().unwrap();
        assert!(a2.matrix().max_abs_diff(a.matrix()) <= 1e-15);

        let p = full_pipeline(&a, &b, None, 1e-9).unwrap();
        let file = ProtocolFile::from_protocol(&p, &a, &b);
        let text = serde_json::to_string(&file).unwrap();
        let parsed: ProtocolFile = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed, file);
        let p2 = parsed.to_protocol().unwrap();
        assert_eq!(p2.stage1.len(), p.stage1.len());
        for (x, y) in p.stage1.iter().zip(&p2.stage1) {
            assert!(x.m.max_abs_diff(&y.m) <= 1e-15 && x.u.max_abs_diff(&y.u) <= 1e-15);
            assert_eq!(x.q, y.q);
        }
        assert!(p.m0.max_abs_diff(&p2.m0) <= 1e-15);
        assert_eq!(p.stage2.is_some(), p2.stage2.is_some());
        if let (Some(t), Some(t2)) = (&p.stage2, &p2.stage2) {
            assert!(t.n.max_abs_diff(&t2.n) <= 1e-15 && t.n_fail.max_abs_diff(&t2.n_fail) <= 1e-15);
            assert!(t.v.max_abs_diff(&t2.v) <= 1e-15);
            assert_eq!(t.p, t2.p);
        }
        assert!(
            p.intermediate
                .matrix()
                .max_abs_diff(p2.intermediate.matrix())
                <= 1e-15
        );
    }
    let rows: MatrixJson = vec![vec![[0.1, 0.2]]];
    assert_eq!(matrix_from_json(&rows).unwrap()[(0, 0)].im, 0.2);
}
