use std::io::Write;
use std::process::{Command, Output, Stdio};

use dewkit::document::{DocumentKind, MatrixDocument};
use dewkit::fixtures::{ladder_ces, pyramid_q, v1_subspace, v2_subspace, V1Params};
use dewkit::subspace::orthonormalize;
use dewkit::tensor::{basis_ket, BipartiteDims, CMat};
use serde_json::Value;

fn run(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_dewkit"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    if let Some(text) = stdin {
        child.stdin.take().unwrap().write_all(text.as_bytes()).unwrap();
    }
    drop(child.stdin.take());
    child.wait_with_output().unwrap()
}

fn write_doc(dir: &tempfile::TempDir, name: &str, doc: &MatrixDocument) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, doc.to_json()).unwrap();
    path.to_str().unwrap().to_string()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn check_ces_on_ladder_passes() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_doc(&dir, "ladder.json", &MatrixDocument::from_subspace(&ladder_ces(3).unwrap()));
    let out = run(&["check-ces", &path], None);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["certificate"]["is_ces"], true);
}

#[test]
fn check_ces_reports_product_vector() {
    let d = BipartiteDims::new(2, 2).unwrap();
    let v = orthonormalize(&[basis_ket(&d, 0, 0)], d).unwrap();
    let out = run(&["check-ces"], Some(&MatrixDocument::from_subspace(&v).to_json()));
    assert_eq!(out.status.code(), Some(1));
    let body = json(&out);
    assert_eq!(body["certificate"]["is_ces"], false);
    assert!(body["certificate"]["witness_vector"].is_object());
}

#[test]
fn truncated_input_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    let text = MatrixDocument::from_subspace(&ladder_ces(3).unwrap()).to_json();
    std::fs::write(&path, &text[..text.len() / 2]).unwrap();
    let out = run(&["check-ces", path.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(run(&["check-ces", "/nonexistent/file.json"], None).status.code(), Some(2));
}

#[test]
fn pyramid_q_gives_a_witness() {
    let d = BipartiteDims::new(3, 3).unwrap();
    let doc = MatrixDocument::from_matrix(DocumentKind::Matrix, &pyramid_q(0.5).unwrap(), &d);
    let out = run(&["analyze-witness", "--seed", "3"], Some(&doc.to_json()));
    assert_eq!(out.status.code(), Some(0));
    let body = json(&out);
    assert_eq!(body["verdict"]["is_ew"], true);
    assert!(body["optimality"]["status"].is_string());
    assert_eq!(body["tolerances"]["ew_tol"], 1e-8);
}

#[test]
fn identity_is_not_a_witness() {
    let d = BipartiteDims::new(2, 2).unwrap();
    let doc = MatrixDocument::from_matrix(DocumentKind::Witness, &CMat::identity(4, 4), &d);
    let out = run(&["analyze-witness"], Some(&doc.to_json()));
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["verdict"]["is_ew"], false);
}

#[test]
fn ladder_q_is_optimal() {
    let v = ladder_ces(3).unwrap();
    let doc = MatrixDocument::from_matrix(DocumentKind::Matrix, &v.projector(), &v.dims());
    let out = run(&["analyze-witness"], Some(&doc.to_json()));
    assert_eq!(out.status.code(), Some(0));
    let body = json(&out);
    assert_eq!(body["optimality"]["status"], "optimal-certified");
    assert_eq!(body["optimality"]["pw_span_dim"], 6);
}

#[test]
fn non_hermitian_input_rejected() {
    let d = BipartiteDims::new(2, 2).unwrap();
    let mut x = CMat::identity(4, 4);
    x[(0, 3)] = dewkit::tensor::c(1.0, 0.0);
    let doc = MatrixDocument::from_matrix(DocumentKind::Witness, &x, &d);
    assert_eq!(run(&["analyze-witness"], Some(&doc.to_json())).status.code(), Some(2));
    let doc = MatrixDocument::from_matrix(DocumentKind::Matrix, &x, &d);
    assert_eq!(run(&["analyze-witness"], Some(&doc.to_json())).status.code(), Some(2));
}

fn pc_span(doc: &MatrixDocument) -> Value {
    let out = run(&["find-product-vectors"], Some(&doc.to_json()));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    json(&out)["span"]["pc_span_dim"].clone()
}

#[test]
fn find_product_vectors_spans() {
    assert_eq!(pc_span(&MatrixDocument::from_subspace(&v2_subspace())), 9);
    let (v1, _) = v1_subspace(&V1Params::real(1.0, 2.0, 0.0, 1.0)).unwrap();
    assert_eq!(pc_span(&MatrixDocument::from_subspace(&v1)), 7);
    assert_eq!(pc_span(&MatrixDocument::from_subspace(&ladder_ces(4).unwrap())), 8);
}

#[test]
fn family_output_is_a_document() {
    let out = run(&["find-product-vectors"], Some(&MatrixDocument::from_subspace(&ladder_ces(3).unwrap()).to_json()));
    let family = json(&out)["family"].to_string();
    let doc = MatrixDocument::parse(&family).unwrap();
    assert_eq!(doc.kind, DocumentKind::ProductFamily);
    let fam = doc.to_family().unwrap();
    let v = ladder_ces(3).unwrap();
    assert!(fam.max_overlap_with(&v) < 1e-9);
}

#[test]
fn reproduce_exit_codes() {
    let out = run(&["reproduce", "pyramid"], None);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(run(&["reproduce", "nosuch"], None).status.code(), Some(2));
}

#[test]
fn reproduce_all_passes_with_default_seed() {
    let out = run(&["reproduce", "all", "--format", "text"], None);
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert_eq!(text.lines().filter(|l| l.contains("[PASS]")).count(), 10);
}

#[test]
fn seeded_output_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let out = run(&["reproduce", "lemma2", "--trials", "5", "--seed", "11", "--output", path.to_str().unwrap()], None);
        assert_eq!(out.status.code(), Some(0));
        assert!(out.stdout.is_empty());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let d = BipartiteDims::new(3, 3).unwrap();
    let doc = MatrixDocument::from_matrix(DocumentKind::Matrix, &pyramid_q(0.1).unwrap(), &d).to_json();
    let first = run(&["analyze-witness", "--seed", "5", "--multistarts", "16"], Some(&doc));
    let second = run(&["analyze-witness", "--seed", "5", "--multistarts", "16"], Some(&doc));
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn unknown_flag_is_usage_error() {
    assert_eq!(run(&["check-ces", "--bogus"], None).status.code(), Some(2));
}
