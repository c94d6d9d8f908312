use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use semistab_core::blockdecomp::WitnessedMatrix;
use semistab_core::radon::RadonProblem;
use semistab_core::tileplan::PlanJson;
use semistab_core::{PolyMatrix, Rat};
use serde_json::Value;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_semistab")).args(args).current_dir(root()).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("cli");
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn gitnorm_of_t2_is_two() {
    let o = run(&["gitnorm", "--input", "fixtures/t2.json", "--sigma", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("2.000000"), "{}", stdout(&o));
}

#[test]
fn blockdecomp_verifies_intro() {
    let o = run(&["blockdecomp", "--verify", "fixtures/intro.json"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("PASS"), "{text}");
    let rows: Vec<Vec<&str>> = text.lines().filter(|l| l.starts_with("p")).map(|l| l.split_whitespace().skip(1).collect()).collect();
    assert_eq!(rows, vec![vec!["0", "1", "1"], vec!["0", "2", "3"]]);
}

#[test]
fn radon_model_exponents() {
    let o = run(&["radon", "--exponents", "--n", "3", "--n1", "3", "--k", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().last(), Some("5/3 5/3"));
}

#[test]
fn plan_on_concrete_matrix() {
    let o = run(&["plan", "fixtures/concrete.json"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("tau = 9/13"), "{}", stdout(&o));
}

#[test]
fn malformed_input_is_an_input_error() {
    let bad = scratch("bad.json");
    fs::write(&bad, "{\"p\": 2,\n \"q\": ").unwrap();
    let o = run(&["hsnorm", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 2"), "{err}");
    let o = run(&["hsnorm", "fixtures/does_not_exist.json"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn unknown_verbs_and_options_are_rejected() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["gitnorm", "--bogus", "fixtures/t2.json"]).status.code(), Some(1));
    assert_eq!(run(&["gitnorm", "fixtures/t2.json", "--sigma", "one"]).status.code(), Some(1));
}

#[test]
fn reports_are_byte_identical() {
    let cases: [&[&str]; 3] = [
        &["gitnorm", "fixtures/t2.json", "--sigma", "1", "--restarts", "6", "--seed", "3"],
        &["sublevel", "fixtures/concrete.json", "--omegas", "4", "--samples", "2000", "--seed", "5"],
        &["semistable", "fixtures/degenerate.json", "--sigma", "1/3", "--seed", "1"],
    ];
    for (k, args) in cases.iter().enumerate() {
        let reports: Vec<Vec<u8>> = (0..2)
            .map(|r| {
                let out = scratch(&format!("report_{k}_{r}.json"));
                let mut full = args.to_vec();
                full.extend(["--out", out.to_str().unwrap()]);
                let o = run(&full);
                assert!(matches!(o.status.code(), Some(0 | 2)), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
                fs::read(&out).unwrap()
            })
            .collect();
        assert!(!reports[0].is_empty());
        assert_eq!(reports[0], reports[1], "{args:?}");
    }
}

#[test]
fn fixtures_round_trip() {
    let mut seen = 0;
    for entry in fs::read_dir(root().join("fixtures")).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        let text = fs::read_to_string(&path).unwrap();
        let value: Value = serde_json::from_str(&text).unwrap();
        if name == "intro.json" {
            let a = WitnessedMatrix::from_json(&text).unwrap();
            assert_eq!(WitnessedMatrix::from_json(&a.to_json().unwrap()).unwrap(), a, "{name}");
        } else if value.get("phi").is_some() {
            let a = RadonProblem::from_json(&text).unwrap();
            assert_eq!(RadonProblem::from_json(&a.to_json().unwrap()).unwrap(), a, "{name}");
        } else if value.get("theta").is_some() {
            let a: PlanJson = serde_json::from_value(value.clone()).unwrap();
            let back: Value = serde_json::to_value(&a).unwrap();
            assert_eq!(back, value, "{name}");
        } else if value.get("entries").is_some() {
            let a = PolyMatrix::<Rat>::from_json(&text).unwrap();
            assert_eq!(PolyMatrix::<Rat>::from_json(&a.to_json().unwrap()).unwrap(), a, "{name}");
        } else {
            let back: Value = serde_json::from_str(&serde_json::to_string(&value).unwrap()).unwrap();
            assert_eq!(back, value, "{name}");
        }
        seen += 1;
    }
    assert_eq!(seen, fs::read_dir(root().join("fixtures")).unwrap().count());
    assert!(seen >= 8);
}
