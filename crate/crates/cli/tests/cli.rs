use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "data", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dasein"))
        .args(args)
        .env_remove("DASEIN_TOL")
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

/// Structural equality with numbers compared to within `tol`.
fn assert_close(got: &Value, want: &Value, tol: f64, path: &str) {
    match (got, want) {
        (Value::Number(a), Value::Number(b)) => {
            let (a, b) = (a.as_f64().unwrap(), b.as_f64().unwrap());
            assert!((a - b).abs() <= tol, "{path}: {a} vs {b}");
        }
        (Value::Array(a), Value::Array(b)) => {
            assert_eq!(a.len(), b.len(), "{path}: length");
            for (i, (x, y)) in a.iter().zip(b).enumerate() {
                assert_close(x, y, tol, &format!("{path}[{i}]"));
            }
        }
        (Value::Object(a), Value::Object(b)) => {
            let ka: Vec<_> = a.keys().collect();
            let kb: Vec<_> = b.keys().collect();
            assert_eq!(ka, kb, "{path}: keys");
            for (k, x) in a {
                assert_close(x, &b[k], tol, &format!("{path}.{k}"));
            }
        }
        _ => assert_eq!(got, want, "{path}"),
    }
}

fn spin_poset_args(cmd: &str, first: &[&str]) -> Vec<String> {
    let mut v = vec![cmd.to_owned()];
    v.extend(first.iter().map(|s| data(s)));
    v.extend(["-c".to_owned(), data("sz.json"), "--close-coarsening".to_owned()]);
    v.extend(["--format".to_owned(), "json".to_owned()]);
    v
}

fn run_owned(args: &[String]) -> Output {
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    run(&refs)
}

#[test]
fn spin1_demo_matches_golden() {
    let got = json_of(&run(&["spin1-demo", "--format", "json"]));
    let want: Value =
        serde_json::from_str(include_str!("golden/spin1_demo.json")).expect("golden parses");
    assert_close(&got, &want, 1e-9, "$");
    assert_eq!(got["violations"], 0);
    for row in got["outer_approximations"].as_array().unwrap() {
        assert_eq!(row["matches"], true, "{row}");
    }
}

#[test]
fn spin1_demo_table_runs() {
    let out = run(&["spin1-demo"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("expectation 0"));
    assert!(!text.contains("MISMATCH"));
}

#[test]
fn contexts_of_spin_seed() {
    let out = json_of(&run(&[
        "contexts",
        &data("sz.json"),
        "--close-coarsening",
        "--format",
        "json",
    ]));
    assert_eq!(out["contexts"].as_array().unwrap().len(), 4);
    assert_eq!(out["arrows"].as_array().unwrap().len(), 3);

    let single = json_of(&run(&["contexts", &data("v_p1.json"), "--format", "json"]));
    assert_eq!(single["contexts"].as_array().unwrap().len(), 1);
    assert!(single["arrows"].as_array().unwrap().is_empty());
}

#[test]
fn das_proj_of_p2() {
    let out = json_of(&run_owned(&spin_poset_args("das-proj", &["p2.json"])));
    let rows = out["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    // rank 1 where P2 is a member, rank 2 at the two coarsenings that lump
    // it together with another ray
    let mut ranks: Vec<u64> = rows.iter().map(|r| r["rank"].as_u64().unwrap()).collect();
    ranks.sort();
    assert_eq!(ranks, vec![1, 1, 2, 2]);
    for r in rows {
        assert_eq!(r["points"].as_array().unwrap().len(), 1);
    }
}

#[test]
fn das_proj_of_zero_and_identity() {
    let out = json_of(&run_owned(&spin_poset_args("das-proj", &["zero.json"])));
    for r in out["rows"].as_array().unwrap() {
        assert!(r["points"].as_array().unwrap().is_empty());
        assert_eq!(r["rank"], 0);
    }
    let out = json_of(&run_owned(&spin_poset_args("das-proj", &["identity.json"])));
    for r in out["rows"].as_array().unwrap() {
        assert_eq!(r["points"].as_array().unwrap().len() as u64, r["atoms"].as_u64().unwrap());
        assert_eq!(r["rank"], 3);
    }
}

#[test]
fn das_op_defaults_to_own_context() {
    let out = json_of(&run(&["das-op", &data("sz.json"), "--format", "json"]));
    let obj = out.as_object().unwrap();
    assert_eq!(obj.len(), 1);
    let comp = obj.values().next().unwrap().as_object().unwrap();
    let mut pts: Vec<f64> = comp
        .values()
        .map(|pair| {
            let mu = pair["mu"].as_object().unwrap().values().next().unwrap().as_f64().unwrap();
            let nu = pair["nu"].as_object().unwrap().values().next().unwrap().as_f64().unwrap();
            assert!((mu - nu).abs() < 1e-12);
            mu
        })
        .collect();
    pts.sort_by(f64::total_cmp);
    assert_eq!(pts, vec![-1.0, 0.0, 1.0]);
}

#[test]
fn value_reports_containment() {
    let out = json_of(&run_owned(&spin_poset_args("value", &["sz.json", "e2.json"])));
    assert_eq!(out["containment"]["expectation"], 0.0);
    assert_eq!(out["containment"]["rows"].as_array().unwrap().len(), 4);
    for row in out["containment"]["rows"].as_array().unwrap() {
        assert_eq!(row["pass"], true);
    }

    // the superposition of the extreme eigenvectors sits strictly inside the
    // spectrum, so the degenerate intervals at the maximal context miss it
    let out = json_of(&run(&[
        "value",
        &data("sz.json"),
        &data("e1_plus_e3.json"),
        "--format",
        "json",
    ]));
    let rows = out["containment"]["rows"].as_array().unwrap();
    assert!(rows.iter().any(|r| r["pass"] == false));
    for h in out["containment"]["hull"].as_array().unwrap() {
        assert_eq!(h["pass"], true);
    }
}

#[test]
fn props_with_zero_trials_is_empty() {
    let out = json_of(&run(&["props", "--trials", "0", "--format", "json"]));
    assert_eq!(out["trials"], 0);
    assert!(out["results"].as_array().unwrap().is_empty());
}

#[test]
fn props_is_deterministic_and_green() {
    let args = ["props", "--dims", "2,3", "--trials", "5", "--seed", "7", "--format", "json"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stdout));
    assert_eq!(a.stdout, b.stdout);
    let summary: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(summary["seed"], 7);
    for r in summary["results"].as_array().unwrap() {
        assert_eq!(r["failed"], 0, "{r}");
    }
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| run(args).status.code();
    assert_eq!(code(&["spin1-demo"]), Some(0));
    assert_eq!(code(&["bogus"]), Some(1));
    assert_eq!(code(&["das-op", &data("broken.json")]), Some(1));
    assert_eq!(code(&["das-op", &data("non_hermitian.json")]), Some(1));
    assert_eq!(code(&["das-op", &data("missing.json")]), Some(1));
    assert_eq!(code(&["value", &data("sz.json"), &data("density.json")]), Some(1));
    assert_eq!(code(&["das-proj", &data("qubit_z.json"), "-c", &data("sz.json")]), Some(1));
    assert_eq!(code(&["das-proj", &data("p2.json")]), Some(1));
    assert_eq!(code(&["props", "--dims", "1"]), Some(1));
    assert_eq!(code(&["--tol", "-1", "spin1-demo"]), Some(1));
}

#[test]
fn errors_name_the_file_and_position() {
    let out = run(&["das-op", &data("broken.json")]);
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("broken.json"), "{err}");
    assert!(err.contains("line 3"), "{err}");
    let out = run(&["value", &data("sz.json"), &data("density.json")]);
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("rho"), "{err}");
}

#[test]
fn tolerance_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_dasein"))
        .args(["spin1-demo"])
        .env("DASEIN_TOL", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = Command::new(env!("CARGO_BIN_EXE_dasein"))
        .args(["spin1-demo"])
        .env("DASEIN_TOL", "1e-8")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}
