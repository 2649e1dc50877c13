use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Arc;

use lpgpd::convolution::{i_norm, AlgebraElement};
use lpgpd::cuntz::{truncated_ind, Basepoint, CuntzWord, LeavittPolynomial};
use lpgpd::groupoid::io::to_value;
use lpgpd::linalg::NormConfig;
use lpgpd::measure::MeasureFile;
use lpgpd::representation::{integrate, reduced_norm, BundleFile};
use lpgpd::{sample, FiniteGroupoid, Slice, C};
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use tempfile::TempDir;

const T2: &str = r#"{"kind": "transitive", "n": 2, "slices": {"A": ["(0,1)", "(1,0)"], "U": ["(0,0)"]}}"#;

fn lpgpd(args: &[&str], cwd: &Path) -> (Value, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_lpgpd"))
        .args(args)
        .current_dir(cwd)
        .env_remove("LPGPD_CACHE")
        .env("HOME", cwd)
        .env_remove("XDG_CACHE_HOME")
        .output()
        .expect("binary runs");
    let stdout = String::from_utf8(out.stdout).unwrap();
    let report: Value = serde_json::from_str(&stdout).unwrap_or_else(|e| panic!("not JSON ({e}): {stdout}"));
    check_schema(&report);
    (report, out.status.code().expect("exited"))
}

fn check_schema(r: &Value) {
    let obj = r.as_object().expect("report is an object");
    for key in ["command", "inputs", "p", "result", "timing"] {
        assert!(obj.contains_key(key), "missing `{key}` in {r}");
    }
    assert!(r["command"].is_string());
    assert!(r["inputs"].is_object());
    assert!(r["p"].is_null() || r["p"].is_f64());
    assert!(r["timing"]["seconds"].as_f64().unwrap() >= 0.0);
    assert!(r["timing"]["cached"].is_boolean());
    if let Some(w) = obj.get("witness") {
        assert!(w.as_array().unwrap().iter().all(|z| z.as_array().map_or(false, |z| z.len() == 2)));
    }
    if let Some(res) = obj.get("residual") {
        assert!(res.is_f64());
    }
    if let Some(e) = obj.get("error") {
        assert!(matches!(e["kind"].as_str(), Some("parse" | "domain")));
        assert!(e["message"].is_string());
        assert!(r["result"].is_null());
    }
    let known = ["command", "inputs", "p", "result", "witness", "residual", "timing", "error"];
    assert!(obj.keys().all(|k| known.contains(&k.as_str())), "unexpected key in {r}");
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn setup() -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "t2.json", T2);
    dir
}

fn complex_vec(v: &Value) -> Vec<C<f64>> {
    v.as_array().unwrap().iter().map(|z| C::new(z[0].as_f64().unwrap(), z[1].as_f64().unwrap())).collect()
}

#[test]
fn rednorm_matches_the_library() {
    let dir = setup();
    let (r, code) = lpgpd(
        &["rednorm", "-g", "t2.json", "-e", "chi[A]", "--p", "2.5", "--restarts", "32", "--seed", "7", "--no-cache"],
        dir.path(),
    );
    assert_eq!(code, 0, "{r}");
    assert_eq!(r["p"], json!(2.5));

    let g = Arc::new(FiniteGroupoid::transitive(2));
    let a = Slice::from_labels(&g, &["(0,1)", "(1,0)"]).unwrap();
    let f = AlgebraElement::<f64>::chi(&g, &a);
    let cfg = NormConfig { restarts: 32, seed: 7, ..NormConfig::default() };
    let lib = reduced_norm(&f, 2.5, &cfg).unwrap();
    assert_eq!(r["result"]["value"].as_f64().unwrap(), lib.estimate.value);
    assert_eq!(r["result"]["basepoint"], json!(g.object_label(lib.basepoint)));
    assert_eq!(complex_vec(&r["witness"]), lib.estimate.witness);
    assert!((lib.estimate.value - 1.0).abs() < 1e-9);
}

#[test]
fn broken_groupoid_fails_validation() {
    let dir = setup();
    let g = FiniteGroupoid::transitive(2);
    let mut v = to_value(&g);
    let comp = v["comp"].as_array_mut().unwrap();
    let k = comp.iter().position(|t| t[0] == "(0,1)" && t[1] == "(1,0)").unwrap();
    comp[k] = json!(["(0,1)", "(1,0)", "(1,1)"]);
    write(dir.path(), "broken.json", &v.to_string());

    let (r, code) = lpgpd(&["validate", "-g", "broken.json"], dir.path());
    assert_eq!(code, 2, "{r}");
    assert_eq!(r["result"]["valid"], json!(false));
    let violations = r["result"]["violations"].as_array().unwrap();
    assert!(!violations.is_empty());
    assert!(violations.iter().all(|v| v["axiom"].is_string() && v["message"].is_string()));

    let (r, code) = lpgpd(&["validate", "-g", "t2.json"], dir.path());
    assert_eq!(code, 0, "{r}");
    assert_eq!(r["result"]["violations"], json!([]));
}

fn svd_norm(m: &lpgpd::Mat) -> f64 {
    let dm = DMatrix::from_fn(m.rows(), m.cols(), |i, j| {
        let z = m[(i, j)];
        nalgebra::Complex::new(z.re, z.im)
    });
    dm.singular_values().max()
}

#[test]
fn cuntz_bound_sequence() {
    let dir = setup();
    let (r, code) = lpgpd(&["cuntz-bound", "--d", "2", "-e", "s0+s1", "--p", "2", "--maxN", "8", "--no-cache"], dir.path());
    assert_eq!(code, 0, "{r}");
    let lower: Vec<(usize, f64)> = serde_json::from_value(r["result"]["lower"].clone()).unwrap();
    assert_eq!(lower.first().unwrap().0, 1);
    assert_eq!(lower.last().unwrap().0, 8);
    assert!(lower.windows(2).all(|w| w[0].1 <= w[1].1), "{lower:?}");
    assert!(lower.last().unwrap().1 >= 1.40);
    assert_eq!(r["result"]["upper"].as_f64().unwrap(), 2.0);

    let f = LeavittPolynomial::from_terms(2, [(CuntzWord::s(0), C::new(1.0, 0.0)), (CuntzWord::s(1), C::new(1.0, 0.0))])
        .unwrap();
    for &(n, bound) in &lower {
        let oracle = svd_norm(truncated_ind(&f, &Basepoint::constant(0), n, 2.0).unwrap().matrix());
        assert!(bound >= oracle - 1e-9, "N = {n}: {bound} < {oracle}");
    }
    let last = svd_norm(truncated_ind(&f, &Basepoint::constant(0), 8, 2.0).unwrap().matrix());
    assert!((lower.last().unwrap().1 - last).abs() < 1e-9);
}

#[test]
fn cached_results_are_bit_exact() {
    let dir = setup();
    let cache = dir.path().join("cache");
    let cache = cache.to_str().unwrap();
    let runs: [&[&str]; 3] = [
        &["rednorm", "-g", "t2.json", "-e", "chi[A] + (0.5-1i) delta[(0,0)]", "--p", "3.3", "--seed", "3"],
        &["ind", "-g", "t2.json", "-e", "2 chi[A] - chi[U]", "--at", "1", "--p", "1.7"],
        &["cuntz-bound", "--d", "2", "-e", "s0 s1' + 2 s1", "--p", "3", "--maxN", "4"],
    ];
    for args in runs {
        let fresh = lpgpd(&[args, &["--no-cache"]].concat(), dir.path());
        let first = lpgpd(&[args, &["--cache", cache]].concat(), dir.path());
        let second = lpgpd(&[args, &["--cache", cache]].concat(), dir.path());
        assert_eq!((fresh.1, first.1, second.1), (0, 0, 0));
        assert_eq!(first.0["timing"]["cached"], json!(false));
        assert_eq!(second.0["timing"]["cached"], json!(true), "{}", second.0);
        for r in [&first.0, &second.0] {
            assert_eq!(r["result"], fresh.0["result"]);
            assert_eq!(r.get("witness"), fresh.0.get("witness"));
        }
    }

    // The environment variable selects the cache when no flag is given.
    let env_dir = dir.path().join("env-cache");
    let args = ["rednorm", "-g", "t2.json", "-e", "chi[A]"];
    for expected in [false, true] {
        let out = Command::new(env!("CARGO_BIN_EXE_lpgpd"))
            .args(args)
            .current_dir(dir.path())
            .env("LPGPD_CACHE", &env_dir)
            .output()
            .unwrap();
        let r: Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(r["timing"]["cached"], json!(expected));
    }
    assert_eq!(fs::read_dir(&env_dir).unwrap().count(), 1);

    // Different exponents or seeds do not share entries.
    let (r, _) = lpgpd(&["rednorm", "-g", "t2.json", "-e", "chi[A]", "--p", "2.5", "--cache", env_dir.to_str().unwrap()], dir.path());
    assert_eq!(r["timing"]["cached"], json!(false));
}

#[test]
fn exit_codes() {
    let dir = setup();
    let path = dir.path();
    write(path, "bad.json", "{not json");
    write(path, "mu.json", r#"{"mu": {"0": 1.0, "1": 0.0}}"#);
    write(path, "mu_ok.json", r#"{"mu": {"0": 0.25, "1": 0.75}}"#);
    let cases: &[(&[&str], i32)] = &[
        (&["inorm", "-g", "t2.json", "-e", "chi[A] *"], 3),
        (&["inorm", "-g", "t2.json", "-e", "chi[Z]"], 3),
        (&["inorm", "-g", "t2.json", "-e", "delta[(2,2)]"], 3),
        (&["inorm", "-g", "t2.json", "-e", "s0"], 3),
        (&["inorm", "-g", "bad.json", "-e", "1"], 3),
        (&["inorm", "-g", "missing.json", "-e", "1"], 3),
        (&["rednorm", "-g", "t2.json", "-e", "chi[A]", "--p", "1"], 3),
        (&["rednorm", "-g", "t2.json", "-e", "chi[A]", "--restarts", "0"], 3),
        (&["cocycle", "-g", "t2.json", "-m", "mu.json"], 2),
        (&["validate", "-g", "t2.json", "-m", "mu.json"], 2),
        (&["cocycle", "-g", "t2.json", "-m", "mu_ok.json"], 0),
        (&["cuntz-bound", "--d", "2", "-e", "s0 s0 s0", "--maxN", "2"], 2),
        (&["cuntz-bound", "--d", "2", "-e", "s5", "--maxN", "2"], 3),
        (&["tight", "--d", "2", "--maxN", "3"], 0),
        (&["tight", "--d", "2", "--maxN", "5"], 2),
        (&["bratteli", "--kind", "fibonacci", "--levels", "5"], 0),
        (&["bratteli", "--kind", "pentagon"], 3),
    ];
    for (args, expected) in cases {
        let (r, code) = lpgpd(&[*args, &["--no-cache"]].concat(), path);
        assert_eq!(code, *expected, "{args:?}: {r}");
        assert_eq!(r.get("error").is_some(), code != 0 && !matches!(args[0], "validate"), "{args:?}: {r}");
    }
}

#[test]
fn element_commands() {
    let dir = setup();
    let path = dir.path();
    write(path, "mu.json", r#"{"mu": {"0": 0.25, "1": 0.75}}"#);

    let (r, code) = lpgpd(&["inorm", "-g", "t2.json", "-e", "chi[U] + 2*delta[(0,1)]"], path);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["i_norm"].as_f64().unwrap(), 3.0);

    let (r, code) = lpgpd(&["convolve", "-g", "t2.json", "-e", "chi[U] + 2*delta[(0,1)]", "--with", "chi[A]"], path);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["coeffs"], json!({"(0,0)": [2.0, 0.0], "(0,1)": [1.0, 0.0]}));

    let (r, code) = lpgpd(&["cocycle", "-g", "t2.json", "-m", "mu.json"], path);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["D"]["(1,0)"].as_f64().unwrap(), 3.0);
    assert_eq!(r["result"]["D"]["(0,1)"].as_f64().unwrap(), 1.0 / 3.0);

    let (r, code) = lpgpd(&["ind", "-g", "t2.json", "-e", "chi[A]", "-m", "mu.json", "--p", "3", "--no-cache"], path);
    assert_eq!(code, 0, "{r}");
    assert!((r["result"]["norm"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert_eq!(r["result"]["matrix"].as_array().unwrap().len(), 4);
}

#[test]
fn representation_commands() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let dir = setup();
    let path = dir.path();
    for case in 0..4 {
        let sg = sample::groupoid(&mut rng, 10, 6);
        let g = &sg.groupoid;
        let mu = sample::measure::<f64, _>(&mut rng, &sg, case % 2 == 1);
        let p = [1.5, 2.0, 3.0, 2.5][case];
        let rep = sample::representation(&mut rng, &sg, &mu, p).unwrap();
        write(path, "g.json", &to_value(g).to_string());
        write(path, "rep.json", &serde_json::to_string(&BundleFile::from_rep(&rep)).unwrap());
        write(path, "mu.json", &serde_json::to_string(&MeasureFile::from_measure(g, &mu)).unwrap());

        let (r, code) = lpgpd(&["validate", "-g", "g.json", "-m", "mu.json"], path);
        assert_eq!(code, 0, "{r}");
        assert_eq!(r["result"]["quasi_invariant"], json!(true));

        let label = g.arrow_label(g.arrows().last().unwrap()).to_string();
        let src = format!("1 + (0.5+0.5i) delta[{label}]");
        let (r, code) = lpgpd(&["integrate", "-g", "g.json", "-r", "rep.json", "-e", &src, "--no-cache"], path);
        assert_eq!(code, 0, "{r}");
        assert_eq!(r["p"].as_f64().unwrap(), p);
        assert_eq!(r["result"]["contractive"], json!(true));
        let f = AlgebraElement::<f64>::unit(g)
            .try_add(&AlgebraElement::delta(g, g.find_arrow(&label).unwrap()).scale(C::new(0.5, 0.5)))
            .unwrap();
        assert_eq!(r["result"]["i_norm"].as_f64().unwrap(), i_norm(&f));
        let pi = integrate(&rep, &f).unwrap().operator;
        let matrix: Vec<Vec<[f64; 2]>> = serde_json::from_value(r["result"]["matrix"].clone()).unwrap();
        assert_eq!(matrix, lpgpd::linalg::matrix_to_json(pi.matrix()));

        let (r, code) = lpgpd(&["tight", "-g", "g.json", "-r", "rep.json"], path);
        assert_eq!(code, 0, "{r}");
        assert_eq!(r["result"]["report"]["tight"], json!(true));

        let (r, code) = lpgpd(&["disintegrate", "-g", "g.json", "-r", "rep.json"], path);
        assert_eq!(code, 0, "{r}");
        assert!(r["residual"].as_f64().unwrap() < 1e-8);
        let q = r["result"]["q"].as_array().unwrap();
        assert_eq!(q.len(), pi.dom().dim());
    }
}

#[test]
fn bratteli_tower_norms() {
    let dir = setup();
    let path = dir.path();
    // Level 1 of the Fibonacci diagram has blocks of size 1 and 1.
    write(path, "a.json", r#"{"level": 1, "blocks": [[[[2.0, 0.0]]], [[[0.0, -1.0]]]]}"#);
    let (r, code) = lpgpd(&["bratteli", "--kind", "fibonacci", "--levels", "4", "--element", "a.json", "--p", "3"], path);
    assert_eq!(code, 0, "{r}");
    let norms: Vec<(usize, f64)> = serde_json::from_value(r["result"]["norms"].clone()).unwrap();
    assert_eq!(norms.iter().map(|n| n.0).collect::<Vec<_>>(), [1, 2, 3]);
    assert!(norms.iter().all(|n| (n.1 - 2.0).abs() < 1e-9), "{norms:?}");
    let mults: Vec<Vec<usize>> = serde_json::from_value(r["result"]["multiplicities"].clone()).unwrap();
    assert_eq!(mults.iter().map(|m| m.iter().sum::<usize>()).collect::<Vec<_>>(), [1, 2, 3, 5]);
}
