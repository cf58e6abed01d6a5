use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_stabbing"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).trim().to_string()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn path(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write(p: &Path, v: &Value) {
    std::fs::write(p, serde_json::to_string_pretty(v).unwrap()).unwrap();
}

fn read(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

/// Unit-square cross-section around `(x, y)` along the z axis.
fn column(x: f64, y: f64, h: f64) -> Value {
    json!({
        "direction": [0.0, 0.0, 1.0],
        "generators": [[x - h, y - h, 0.0], [x + h, y - h, 0.0], [x + h, y + h, 0.0], [x - h, y + h, 0.0]],
    })
}

#[test]
fn gen_summaries() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "cp.json");
    let o = run(&[
        "gen",
        "--kind",
        "common-point",
        "--n",
        "56",
        "--seed",
        "1",
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "kind=family n=56");
    assert_eq!(read(&out)["cylinders"].as_array().unwrap().len(), 56);

    let out = path(dir.path(), "hyp.json");
    let o = run(&[
        "gen",
        "--kind",
        "hyperboloid",
        "--n",
        "56",
        "--seed",
        "5",
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "kind=bipartite n=56+56");

    let out = path(dir.path(), "balls.json");
    let o = run(&[
        "gen",
        "--kind",
        "rounded",
        "--n",
        "500",
        "--d",
        "1",
        "--seed",
        "9",
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "kind=rounded n=500 D=1");
    assert_eq!(read(&out)["D"], json!(1.0));
}

#[test]
fn gen_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = path(dir.path(), "a.json");
    let b = path(dir.path(), "b.json");
    for p in [&a, &b] {
        let o = run(&[
            "gen",
            "--kind",
            "coplanar-lines",
            "--n",
            "28",
            "--seed",
            "3",
            "--out",
            s(p),
        ]);
        assert_eq!(code(&o), 0);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn gen_rejects_bad_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "x.json");
    let o = run(&["gen", "--kind", "stack", "--n", "0", "--out", s(&out)]);
    assert_eq!(code(&o), 2);
    assert!(!out.exists());
    let o = run(&["gen", "--kind", "rounded", "--n", "10", "--d", "0.5", "--out", s(&out)]);
    assert_eq!(code(&o), 2);
    let o = run(&["gen", "--kind", "nonsense", "--n", "10", "--out", s(&out)]);
    assert_eq!(code(&o), 2);
}

#[test]
fn solve_stack_exits_early() {
    let dir = tempfile::tempdir().unwrap();
    let fam = path(dir.path(), "stack.json");
    let rep = path(dir.path(), "report.json");
    assert_eq!(
        code(&run(&[
            "gen",
            "--kind",
            "stack",
            "--n",
            "28",
            "--seed",
            "2",
            "--out",
            s(&fam)
        ])),
        0
    );
    let o = run(&["solve", s(&fam), "--out", s(&rep)]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "n=28 branch=EarlyExit hits=28 bound=1");
    let r = read(&rep);
    assert_eq!(r["kind"], "transversal");
    assert_eq!(r["verified"], true);
    assert!(r.get("timing_ms").is_none());
    assert_eq!(r["report"]["hits"].as_array().unwrap().len(), 28);
}

#[test]
fn solve_bipartite_reports_side() {
    let dir = tempfile::tempdir().unwrap();
    let fam = path(dir.path(), "hyp.json");
    let rep = path(dir.path(), "report.json");
    assert_eq!(
        code(&run(&[
            "gen",
            "--kind",
            "hyperboloid",
            "--n",
            "56",
            "--seed",
            "5",
            "--out",
            s(&fam)
        ])),
        0
    );
    let o = run(&["solve", s(&fam), "--out", s(&rep), "--timing"]);
    assert_eq!(code(&o), 0);
    let line = stdout(&o);
    assert!(line.starts_with("n=56 branch="), "{line}");
    assert!(line.ends_with("side=f") || line.ends_with("side=g"), "{line}");
    assert!(read(&rep)["timing_ms"].is_number());
    let o = run(&["verify", s(&fam), s(&rep)]);
    assert_eq!(code(&o), 0);
}

#[test]
fn solve_reports_disjoint_witness() {
    let dir = tempfile::tempdir().unwrap();
    let fam = path(dir.path(), "apart.json");
    let rep = path(dir.path(), "report.json");
    write(
        &fam,
        &json!({"kind": "family", "cylinders": [column(0.0, 0.0, 0.5), column(5.0, 0.0, 0.5)]}),
    );
    let o = run(&["solve", s(&fam), "--out", s(&rep)]);
    assert_eq!(code(&o), 4);
    assert_eq!(stdout(&o), "witness=(0,1)");
    assert!(!rep.exists());
}

#[test]
fn solve_rejects_malformed_input() {
    let dir = tempfile::tempdir().unwrap();
    let fam = path(dir.path(), "bad.json");
    let rep = path(dir.path(), "report.json");
    for bad in [
        json!({"kind": "family", "cylinders": []}),
        json!({"kind": "family", "cylinders": [{"direction": [0.0, 0.0, 0.0], "generators": [[0.0, 0.0, 0.0]]}]}),
        json!({"kind": "family", "cylinders": [column(0.0, 0.0, 0.5)], "extra": 1}),
        json!({"kind": "polygon"}),
    ] {
        write(&fam, &bad);
        assert_eq!(code(&run(&["solve", s(&fam), "--out", s(&rep)])), 2, "{bad}");
        assert!(!rep.exists());
    }
    assert_eq!(
        code(&run(&["solve", s(&path(dir.path(), "missing.json")), "--out", s(&rep)])),
        2
    );
}

#[test]
fn verify_detects_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let fam = path(dir.path(), "cp.json");
    let rep = path(dir.path(), "report.json");
    assert_eq!(
        code(&run(&[
            "gen",
            "--kind",
            "common-point",
            "--n",
            "56",
            "--seed",
            "1",
            "--out",
            s(&fam)
        ])),
        0
    );
    assert_eq!(code(&run(&["solve", s(&fam), "--out", s(&rep)])), 0);
    let o = run(&["verify", s(&fam), s(&rep)]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).ends_with("verified=true"));

    let mut r = read(&rep);
    let hits = r["report"]["hits"].as_array().unwrap().clone();
    let missed = (0..56).find(|i| !hits.contains(&json!(i))).unwrap();
    let mut padded: Vec<u64> = hits.iter().map(|h| h.as_u64().unwrap()).collect();
    padded.push(missed);
    padded.sort_unstable();
    r["report"]["hits"] = json!(padded);
    let forged = path(dir.path(), "forged.json");
    write(&forged, &r);
    let o = run(&["verify", s(&fam), s(&forged)]);
    assert_eq!(code(&o), 6);
    assert!(stdout(&o).ends_with("verified=false"));
}

#[test]
fn verify_rejects_a_nudged_line() {
    let dir = tempfile::tempdir().unwrap();
    let fam = path(dir.path(), "thin.json");
    let rep = path(dir.path(), "report.json");
    write(&fam, &json!({"kind": "family", "cylinders": [column(0.0, 0.0, 0.005)]}));
    assert_eq!(code(&run(&["solve", s(&fam), "--out", s(&rep)])), 0);
    assert_eq!(code(&run(&["verify", s(&fam), s(&rep)])), 0);
    let mut r = read(&rep);
    let x = r["report"]["line"]["point"][0].as_f64().unwrap();
    r["report"]["line"]["point"][0] = json!(x + 1e-2);
    write(&rep, &r);
    assert_eq!(code(&run(&["verify", s(&fam), s(&rep)])), 6);
}

#[test]
fn verify_rejects_mismatched_kinds() {
    let dir = tempfile::tempdir().unwrap();
    let fam = path(dir.path(), "balls.json");
    let rep = path(dir.path(), "report.json");
    let stack = path(dir.path(), "stack.json");
    assert_eq!(
        code(&run(&[
            "gen",
            "--kind",
            "rounded",
            "--n",
            "20",
            "--d",
            "1",
            "--out",
            s(&fam)
        ])),
        0
    );
    assert_eq!(
        code(&run(&["gen", "--kind", "stack", "--n", "28", "--out", s(&stack)])),
        0
    );
    assert_eq!(code(&run(&["solve", s(&stack), "--out", s(&rep)])), 0);
    assert_eq!(code(&run(&["verify", s(&fam), s(&rep)])), 6);
}

#[test]
fn pierce_square_and_segment() {
    let dir = tempfile::tempdir().unwrap();
    let poly = path(dir.path(), "square.json");
    let svg = path(dir.path(), "square.svg");
    write(&poly, &json!([[0, 0], [1, 0], [1, 1], [0, 1]]));
    let o = run(&["pierce", s(&poly), "--out", s(&svg)]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "|T|=6 failures=0");
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<svg"));
    assert_eq!(text.matches(r#"class="point""#).count(), 6);

    write(&poly, &json!({"vertices": [[0, 0], [3, 1]]}));
    let o = run(&["pierce", s(&poly), "--out", s(&svg)]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "|T|=2 failures=0");
}

#[test]
fn pierce_random_polygon() {
    let dir = tempfile::tempdir().unwrap();
    let poly = path(dir.path(), "poly.json");
    let svg = path(dir.path(), "poly.svg");
    let pts: Vec<[f64; 2]> = (0..64)
        .map(|i| {
            let t = std::f64::consts::TAU * (i as f64 + 0.3 * ((i * 7 % 5) as f64)) / 64.0;
            [4.0 * t.cos() + 0.5 * t.sin(), 1.5 * t.sin()]
        })
        .collect();
    write(&poly, &json!(pts));
    let o = run(&["pierce", s(&poly), "--out", s(&svg), "--seed", "3"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).ends_with("failures=0"), "{}", stdout(&o));
}

#[test]
fn pierce_svg_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let poly = path(dir.path(), "tri.json");
    write(&poly, &json!([[0, 0], [5, 1], [2, 4]]));
    let a = path(dir.path(), "a.svg");
    let b = path(dir.path(), "b.svg");
    assert_eq!(code(&run(&["pierce", s(&poly), "--out", s(&a)])), 0);
    assert_eq!(code(&run(&["--jobs", "3", "pierce", s(&poly), "--out", s(&b)])), 0);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn pierce_rejects_bad_polygons() {
    let dir = tempfile::tempdir().unwrap();
    let poly = path(dir.path(), "bad.json");
    let svg = path(dir.path(), "bad.svg");
    write(&poly, &json!([]));
    assert_eq!(code(&run(&["pierce", s(&poly), "--out", s(&svg)])), 2);
    write(&poly, &json!({"points": [[0, 0]]}));
    assert_eq!(code(&run(&["pierce", s(&poly), "--out", s(&svg)])), 2);
    assert!(!svg.exists());
}

#[test]
fn cover_identical_balls() {
    let dir = tempfile::tempdir().unwrap();
    let fam = path(dir.path(), "same.json");
    let rep = path(dir.path(), "cover.json");
    let ball = json!({"center": [1.0, 2.0, 3.0], "r": 1.0, "R": 1.0});
    write(
        &fam,
        &json!({"kind": "rounded", "D": 1.0, "bodies": [ball.clone(), ball.clone(), ball]}),
    );
    let o = run(&["cover-rounded", s(&fam), "--out", s(&rep)]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "lines=1 bound=32");
    assert_eq!(code(&run(&["verify", s(&fam), s(&rep)])), 0);
}

#[test]
fn cover_generated_bodies() {
    let dir = tempfile::tempdir().unwrap();
    let fam = path(dir.path(), "bodies.json");
    let rep = path(dir.path(), "cover.json");
    assert_eq!(
        code(&run(&[
            "gen",
            "--kind",
            "rounded",
            "--n",
            "500",
            "--d",
            "2",
            "--seed",
            "4",
            "--out",
            s(&fam)
        ])),
        0
    );
    let o = run(&["cover-rounded", s(&fam), "--out", s(&rep)]);
    assert_eq!(code(&o), 0);
    let line = stdout(&o);
    let lines: usize = line
        .strip_prefix("lines=")
        .unwrap()
        .split(' ')
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert!(lines <= 128, "{line}");
    assert!(line.ends_with("bound=128"));
    assert_eq!(code(&run(&["verify", s(&fam), s(&rep)])), 0);
}

#[test]
fn cover_rejects_bodies_that_are_not_well_rounded() {
    let dir = tempfile::tempdir().unwrap();
    let fam = path(dir.path(), "bodies.json");
    let rep = path(dir.path(), "cover.json");
    write(
        &fam,
        &json!({"kind": "rounded", "D": 1.0, "bodies": [
            {"center": [0.0, 0.0, 0.0], "r": 1.0, "R": 1.0},
            {"center": [0.5, 0.0, 0.0], "r": 1.0, "R": 3.0},
        ]}),
    );
    assert_eq!(code(&run(&["cover-rounded", s(&fam), "--out", s(&rep)])), 8);
    assert!(!rep.exists());
}

#[test]
fn cover_rejects_far_apart_bodies() {
    let dir = tempfile::tempdir().unwrap();
    let fam = path(dir.path(), "bodies.json");
    let rep = path(dir.path(), "cover.json");
    write(
        &fam,
        &json!({"kind": "rounded", "D": 1.0, "bodies": [
            {"center": [0.0, 0.0, 0.0], "r": 1.0, "R": 1.0},
            {"center": [50.0, 0.0, 0.0], "r": 1.0, "R": 1.0},
        ]}),
    );
    assert_eq!(code(&run(&["cover-rounded", s(&fam), "--out", s(&rep)])), 4);
    assert!(!rep.exists());
}
