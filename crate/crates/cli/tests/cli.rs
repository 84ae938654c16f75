use std::fs;
use std::io::Write;
use std::process::{Command, Output, Stdio};

fn morita(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_morita"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn morita");
    if let Some(text) = stdin {
        child.stdin.take().unwrap().write_all(text.as_bytes()).unwrap();
    } else {
        drop(child.stdin.take());
    }
    child.wait_with_output().expect("wait for morita")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn example_expansion_pipes_into_verify() {
    let doc = morita(&["expand", "paper-example", "--genus", "1"], None);
    assert_eq!(doc.status.code(), Some(0));
    let v = morita(&["expand", "verify", "--degree", "4"], Some(&stdout(&doc)));
    assert_eq!(v.status.code(), Some(0), "{}", stderr(&v));
    assert!(stdout(&v).contains("symplectic mod degree 5"));
}

#[test]
fn magnus_is_not_group_like() {
    let doc = morita(&["expand", "magnus", "--genus", "1", "--degree", "3"], None);
    let v = morita(&["expand", "verify", "--degree", "3"], Some(&stdout(&doc)));
    assert_eq!(v.status.code(), Some(1));
    assert!(stdout(&v).contains("not group-like"));
}

#[test]
fn basis_expansion_fails_zeta_in_degree_three() {
    let doc = morita(&["expand", "basis", "--genus", "2", "--degree", "4"], None);
    let v = morita(&["expand", "verify", "--degree", "4"], Some(&stdout(&doc)));
    assert_eq!(v.status.code(), Some(1));
    assert!(stdout(&v).contains("zeta condition fails in degree 3"));
}

#[test]
fn construct_writes_a_verifiable_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("theta.json");
    let p = path.to_str().unwrap();
    let c = morita(&["expand", "construct", "--genus", "2", "--degree", "5", "--out", p], None);
    assert_eq!(c.status.code(), Some(0), "{}", stderr(&c));
    let v = morita(&["expand", "verify", "--in", p, "--degree", "5"], None);
    assert_eq!(v.status.code(), Some(0));
    assert!(stdout(&v).contains("symplectic mod degree 6"));
}

#[test]
fn homology_table() {
    let o = morita(&["homology", "dims", "--genus", "1", "--class", "2", "--n", "3"], None);
    assert_eq!(o.status.code(), Some(0));
    let rows: Vec<String> = stdout(&o)
        .lines()
        .filter(|l| l.chars().next().is_some_and(|c| c.is_ascii_digit()))
        .map(str::to_string)
        .collect();
    assert_eq!(rows, vec!["4\t1".to_string()]);
}

#[test]
fn phi_rank_is_full() {
    let o = morita(&["phi", "rank", "--genus", "2", "--class", "1"], None);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("rank of Phi = 4, dim H_3 = 4"));
}

#[test]
fn johnson_and_morita_on_random_element() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("aut.json");
    let p = path.to_str().unwrap();
    let r = morita(&["johnson", "random", "--genus", "2", "--k", "1", "--degree", "3", "--seed", "9", "--out", p], None);
    assert_eq!(r.status.code(), Some(0), "{}", stderr(&r));
    let again = morita(&["johnson", "random", "--genus", "2", "--k", "1", "--degree", "3", "--seed", "9"], None);
    assert_eq!(fs::read_to_string(&path).unwrap(), stdout(&again));
    let t = morita(&["johnson", "tau", "--aut", p, "--k", "1"], None);
    assert_eq!(t.status.code(), Some(0), "{}", stderr(&t));
    assert!(stdout(&t).contains("bracket check: passed"));
    let m = morita(&["morita", "mk", "--aut", p, "--k", "1"], None);
    assert_eq!(m.status.code(), Some(0), "{}", stderr(&m));
    assert!(stdout(&m).contains("holds"));
}

#[test]
fn malformed_documents_exit_two_naming_the_field() {
    let bad = r#"{"genus":1,"max_degree":2,"images":{"a1":[{"coeff":"1/0","word":["a1"]}],"b1":[]}}"#;
    let v = morita(&["expand", "verify", "--degree", "2"], Some(bad));
    assert_eq!(v.status.code(), Some(2));
    assert!(stderr(&v).contains("images.a1[0].coeff"), "{}", stderr(&v));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("aut.json");
    fs::write(&path, r#"{"genus":1,"max_degree":2,"images":{"a1":[],"b1":[],"c1":[]}}"#).unwrap();
    let t = morita(&["johnson", "tau", "--aut", path.to_str().unwrap(), "--k", "1"], None);
    assert_eq!(t.status.code(), Some(2));
    assert!(stderr(&t).contains("images.c1"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(morita(&["homology", "dims", "--genus", "1", "--class", "2", "--n", "4"], None).status.code(), Some(2));
    assert_eq!(morita(&["expand", "construct", "--genus", "0", "--degree", "3"], None).status.code(), Some(2));
    assert_eq!(morita(&["frobnicate"], None).status.code(), Some(2));
    assert_eq!(morita(&["johnson", "random", "--genus", "1", "--k", "2", "--degree", "3"], None).status.code(), Some(2));
}

#[test]
fn non_ic_automorphism_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("aut.json");
    let p = path.to_str().unwrap();
    morita(&["johnson", "random", "--genus", "2", "--k", "1", "--degree", "4", "--out", p], None);
    let t = morita(&["johnson", "tau", "--aut", p, "--k", "2"], None);
    assert_eq!(t.status.code(), Some(1));
    assert!(stderr(&t).contains("IC[2]"));
}

#[test]
fn suite_is_reproducible() {
    let a = morita(&["suite", "run", "--seed", "7", "--only", "3"], None);
    let b = morita(&["suite", "run", "--seed", "7", "--only", "3"], None);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
    assert!(stdout(&a).contains("[PASS]  3."));
}
