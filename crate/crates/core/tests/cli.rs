//! End-to-end tests of the command-line interface.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_trimph"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}, stderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn ph_square_has_exact_h1_row() {
    let square = fixture("square.csv");
    let out = run(&[
        "ph",
        "--input",
        square.to_str().unwrap(),
        "--max-dim",
        "2",
        "--hom-dim",
        "1",
    ]);
    let text = stdout(&out);
    assert!(text.starts_with("dim,birth,death\n"));
    let h1: Vec<&str> = text.lines().filter(|l| l.starts_with("1,")).collect();
    assert_eq!(h1.len(), 1);
    assert!(
        h1[0].starts_with("1,1,1.41421356"),
        "unexpected H1 row {:?}",
        h1[0]
    );
}

#[test]
fn ph_engines_agree_on_bytes() {
    let square = fixture("square.csv");
    let implicit = stdout(&run(&[
        "ph",
        "--input",
        square.to_str().unwrap(),
        "--max-dim",
        "2",
        "--hom-dim",
        "1",
        "--engine",
        "implicit",
    ]));
    let explicit = stdout(&run(&[
        "ph",
        "--input",
        square.to_str().unwrap(),
        "--max-dim",
        "2",
        "--hom-dim",
        "1",
        "--engine",
        "explicit",
    ]));
    assert_eq!(implicit, explicit);
}

#[test]
fn trim_line5_keeps_first_four() {
    let line5 = fixture("line5.csv");
    let out = run(&[
        "trim",
        "--input",
        line5.to_str().unwrap(),
        "--alpha1",
        "0.2",
        "--alpha2",
        "0",
    ]);
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["kept"], serde_json::json!([0, 1, 2, 3]));
    assert_eq!(json["avg_dists"][4], serde_json::json!(98.5));
}

#[test]
fn bottleneck_identical_diagrams_prints_zero() {
    let dir = tempfile::tempdir().unwrap();
    let square = fixture("square.csv");
    let a = dir.path().join("a.csv");
    run(&[
        "ph",
        "--input",
        square.to_str().unwrap(),
        "--max-dim",
        "2",
        "--hom-dim",
        "1",
        "--output",
        a.to_str().unwrap(),
    ]);
    let out = run(&[
        "bottleneck",
        a.to_str().unwrap(),
        a.to_str().unwrap(),
        "--dim",
        "1",
    ]);
    assert_eq!(stdout(&out), "0\n");
}

#[test]
fn diagram_csv_round_trips_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let square = fixture("square.csv");
    let a = dir.path().join("a.csv");
    let text = stdout(&run(&[
        "ph",
        "--input",
        square.to_str().unwrap(),
        "--max-dim",
        "2",
        "--hom-dim",
        "1",
        "--output",
        a.to_str().unwrap(),
    ]));
    assert!(text.is_empty());
    let on_disk = std::fs::read_to_string(&a).unwrap();
    assert!(on_disk.contains("0,0,inf\n"));
    let parsed = trimph::io::parse_diagram_csv(&on_disk).unwrap();
    assert_eq!(trimph::io::write_diagram_csv(&parsed), on_disk);
}

#[test]
fn hausdorff_between_files() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    std::fs::write(&a, "0\n2\n").unwrap();
    std::fs::write(&b, "0\n1\n2\n").unwrap();
    let out = run(&["hausdorff", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert_eq!(stdout(&out), "1\n");
}

#[test]
fn gen_is_deterministic_and_labeled() {
    let dir = tempfile::tempdir().unwrap();
    let labels = dir.path().join("labels.csv");
    let a = stdout(&run(&["gen", "case1", "--seed", "5"]));
    let b = stdout(&run(&[
        "gen",
        "case1",
        "--seed",
        "5",
        "--labels",
        labels.to_str().unwrap(),
    ]));
    assert_eq!(a, b);
    assert_eq!(a.lines().count(), 200);
    let label_text = std::fs::read_to_string(&labels).unwrap();
    assert_eq!(label_text.lines().count(), 201);
    assert_eq!(
        label_text.lines().filter(|l| l.ends_with(",signal")).count(),
        120
    );
}

#[test]
fn rips_dump_square() {
    let square = fixture("square.csv");
    let out = run(&[
        "rips",
        "--input",
        square.to_str().unwrap(),
        "--max-dim",
        "2",
        "--threshold",
        "2",
    ]);
    let text = stdout(&out);
    // 4 vertices + 6 edges + 4 triangles
    assert_eq!(text.lines().count(), 14);
    assert!(text.starts_with("0 0 0\n"));
}

#[test]
fn exit_codes_follow_error_classes() {
    // unknown file -> input error -> 1
    let out = run(&["ph", "--input", "/nonexistent.csv", "--max-dim", "2", "--hom-dim", "1"]);
    assert_eq!(out.status.code(), Some(1));

    // budget too small -> resource error -> 2
    let square = fixture("square.csv");
    let out = bin()
        .args([
            "rips",
            "--input",
            square.to_str().unwrap(),
            "--max-dim",
            "2",
            "--budget",
            "3",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    // malformed pdb id -> input error -> 1, before any network access
    let out = bin()
        .args(["pdb", "fetch", "--id", "XY", "--output", "/tmp/x.pdb"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));

    // unreachable host -> network error -> 3
    let out = bin()
        .args(["pdb", "fetch", "--id", "1ABC", "--output", "/tmp/x.pdb"])
        .env("TRIMPH_PDB_BASE_URL", "https://nonexistent.invalid")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn select_reports_outcome_json() {
    let dir = tempfile::tempdir().unwrap();
    let circle = dir.path().join("circle.csv");
    run(&[
        "gen",
        "circle",
        "--n",
        "60",
        "--seed",
        "4",
        "--output",
        circle.to_str().unwrap(),
    ]);
    let out = run(&[
        "select",
        "--input",
        circle.to_str().unwrap(),
        "--mode",
        "asym",
        "--tau-min",
        "0.5",
        "--dim",
        "1",
        "--max-iter",
        "5",
    ]);
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["threshold_met"], serde_json::json!(true));
    assert_eq!(json["iterations_used"], serde_json::json!(0));
}

#[test]
fn exp_stability_small_run() {
    let out = run(&["exp", "stability", "--trials", "3", "--seed", "1"]);
    assert!(stdout(&out).contains("6 / 6 trials"));
}

#[test]
fn cli_output_is_byte_deterministic() {
    let square = fixture("square.csv");
    let args = [
        "ph",
        "--input",
        square.to_str().unwrap(),
        "--max-dim",
        "2",
        "--hom-dim",
        "1",
    ];
    assert_eq!(stdout(&run(&args)), stdout(&run(&args)));
}
