use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use rees_core::cli::MatrixFile;
use rees_core::{Ideal, PolyRing, Polynomial, PrimeField};

const EXAMPLE: &str = "ring d=3 T=4 field=32003\nmatrix 4 3\nx1 0  0\nx2 x1 0\nx3 x2 x1^2\n0  x3 x3^2\n";
const NEGATIVE: &str = "ring d=2 T=4\nmatrix 4 3\nx1 0  x1^2\nx2 x1 x2^2\n0  x2 x1^2+x2^2\n0  0  x1^2+x2^2+x1*x2\n";

fn rees(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_rees"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    if let Some(text) = stdin {
        child.stdin.take().unwrap().write_all(text.as_bytes()).unwrap();
    }
    drop(child.stdin.take());
    child.wait_with_output().unwrap()
}

fn temp_file(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("rees-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn report_json_for_the_example() {
    let out = rees(&["report", "-", "--json"], Some(EXAMPLE));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["n"], 2);
    assert_eq!(v["gd"], true);
    assert_eq!(v["sat_index"], 2);
    assert_eq!(v["stabilization_level"], 2);
    assert_eq!(v["forms_equal"], true);
    assert_eq!(v["fiber_degree"], 5);
    assert_eq!(v["relation_type"], 5);
    assert_eq!(v["heights"]["L"], 3);
    assert_eq!(v["heights"]["A"], 3);
    assert_eq!(v["generators"].as_array().unwrap().len(), 5);
}

#[test]
fn report_generators_parse_back_to_the_same_ideal() {
    let out = rees(&["report", "-", "--json"], Some(EXAMPLE));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let r = PolyRing::new(3, 4, PrimeField::new(32003).unwrap()).unwrap();
    let gens: Vec<_> = v["generators"]
        .as_array()
        .unwrap()
        .iter()
        .map(|g| Polynomial::parse(g.as_str().unwrap(), &r).unwrap())
        .collect();
    let printed = Ideal::new(&r, gens).unwrap();
    let pure = Polynomial::parse("T3^5+T2^4*T4-2*T1*T2^2*T3*T4+T1^2*T3^2*T4-2*T2*T3^3*T4+T2^2*T3*T4^2", &r).unwrap();
    assert!(printed.contains(&pure).unwrap());
}

#[test]
fn negative_example_reports_unequal_forms() {
    let path = temp_file("negative.mat", NEGATIVE);
    let out = rees(&["report", path.to_str().unwrap(), "--json"], None);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["forms_equal"], false);
    assert_eq!(v["sat_index"], 2);
}

#[test]
fn power_zero_echoes_the_symmetric_ideal() {
    let sat = rees(&["saturate", "-", "--power", "0"], Some(EXAMPLE));
    let sym = rees(&["sym", "-"], Some(EXAMPLE));
    assert_eq!(sat.status.code(), Some(0));
    let sat_text = stdout(&sat);
    for line in stdout(&sym).lines() {
        let poly = line.split_once(' ').unwrap().1;
        assert!(sat_text.contains(poly), "{poly} missing from\n{sat_text}");
    }
}

#[test]
fn text_commands_succeed() {
    for args in [
        vec!["gens", "-"],
        vec!["dual", "-", "--level", "2"],
        vec!["dual", "-", "--level", "2", "--method", "restricted", "--pivot", "largest"],
        vec!["saturate", "-", "--infinity"],
        vec!["fiber", "-"],
        vec!["report", "-", "--second-form"],
    ] {
        let out = rees(&args, Some(EXAMPLE));
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stdout.is_empty());
    }
    let fiber = stdout(&rees(&["fiber", "-"], Some(EXAMPLE)));
    assert!(fiber.contains("degree: 5"));
}

#[test]
fn exit_codes() {
    let bad_entry = "ring d=2 T=3\nmatrix 3 2\nx1 0\nx2 x1\n0 T1\n";
    let out = rees(&["report", "-"], Some(bad_entry));
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr).to_string();
    assert!(err.starts_with("error:"), "{err}");

    let out = rees(&["report", "/nonexistent/file.mat"], None);
    assert_eq!(out.status.code(), Some(2));

    let out = rees(&["report", "-", "--max-pairs", "1"], Some(EXAMPLE));
    assert_eq!(out.status.code(), Some(3));

    let out = rees(&["random", "--d", "2", "--m", "3", "--n", "1", "--trials", "3"], None);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("trials_run: 3"));

    let out = rees(&["random", "--d", "5", "--m", "6", "--n", "1"], None);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn random_json_summary() {
    let out = rees(
        &["random", "--d", "2", "--m", "3", "--n", "2", "--seed", "5", "--trials", "4", "--json"],
        None,
    );
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["trials_run"], 4);
    assert_eq!(v["forms_equal_count"], 4);
    assert_eq!(v["sat_index_histogram"]["2"], 4);
}

#[test]
fn matrix_file_errors_name_the_line() {
    let err = MatrixFile::parse("ring d=2 T=3\nmatrix 3 2\nx1 0\nx2 x1 x2\n0 x2\n").unwrap_err();
    assert!(err.to_string().contains("line 4"), "{err}");
    let err = MatrixFile::parse("ring d=2 T=3 field=12\nmatrix 3 2\n").unwrap_err();
    assert!(err.to_string().contains("line 1"), "{err}");
}
