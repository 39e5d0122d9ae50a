use fenchel::pants_surface::PantsSurface;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};
use tempfile::TempDir;

fn fenchel(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fenchel"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn manifest(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn generate_chain_has_nine_cuffs() {
    let t = TempDir::new().unwrap();
    let o = fenchel(t.path(), &["--out", "g", "generate", "chain", "--n", "4", "--cuff", "1.0"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let s = PantsSurface::load(t.path().join("g/chain.json")).unwrap();
    assert_eq!(s.graph().num_pants(), 4);
    assert_eq!(s.graph().num_cuffs(), 9);
    assert!(s.lengths().iter().all(|&l| l == 1.0));
}

#[test]
fn smallest_chain() {
    let t = TempDir::new().unwrap();
    let o = fenchel(t.path(), &["--out", "g", "generate", "chain", "--n", "1"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let s = PantsSurface::load(t.path().join("g/chain.json")).unwrap();
    assert_eq!((s.graph().num_pants(), s.graph().num_cuffs()), (1, 3));
    assert_eq!(s.graph().interior_cuffs().count(), 0);
}

#[test]
fn generation_is_deterministic() {
    let t = TempDir::new().unwrap();
    let args = |out: &'static str, seed: &'static str| {
        vec![
            "--out", out, "--seed", seed, "generate", "tree", "--n", "2", "--min-length", "1e-5",
            "--max-length", "1", "--random-twists",
        ]
    };
    for (out, seed) in [("a", "9"), ("b", "9"), ("c", "10")] {
        assert_eq!(code(&fenchel(t.path(), &args(out, seed))), 0);
    }
    let read = |d: &str| fs::read(t.path().join(d).join("tree.json")).unwrap();
    assert_eq!(read("a"), read("b"));
    assert_ne!(read("a"), read("c"));
    let (ma, mb) = (manifest(&t.path().join("a")), manifest(&t.path().join("b")));
    assert_eq!(ma["outputs"], mb["outputs"]);
    assert_eq!(ma["seed"], 9);
    assert_eq!(ma["args"][1], "a");
}

#[test]
fn closure_generator_writes_a_pair() {
    let t = TempDir::new().unwrap();
    let o = fenchel(t.path(), &["--out", "g", "generate", "sqrt", "--n", "8"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let x0 = PantsSurface::load(t.path().join("g/base.json")).unwrap();
    let x = PantsSurface::load(t.path().join("g/surface.json")).unwrap();
    assert_eq!(x0.lengths(), x.lengths());
    assert_ne!(x0.twists(), x.twists());
}

#[test]
fn spectrum_of_a_surface_with_itself_is_zero() {
    let t = TempDir::new().unwrap();
    fenchel(t.path(), &["--out", "g", "generate", "genus2", "--cuff", "0.7", "--twist", "0.2"]);
    let o = fenchel(
        t.path(),
        &["--out", "s", "spectrum", "--x", "g/genus2.json", "--y", "g/genus2.json", "--family", "default"],
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).starts_with("dls 0 "), "{}", stdout(&o));
    let m = manifest(&t.path().join("s"));
    assert_eq!(m["inputs"].as_array().unwrap().len(), 2);
    assert!(m["family"].as_str().unwrap().contains("cuffs"));
    let csv = fs::read_to_string(t.path().join("s/spectrum.csv")).unwrap();
    assert!(csv.starts_with("label,lX,lY,abslogratio"));
}

#[test]
fn missing_cuff_length_is_a_validation_error() {
    let t = TempDir::new().unwrap();
    fenchel(t.path(), &["--out", "g", "generate", "chain", "--n", "2"]);
    let mut spec: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(t.path().join("g/chain.json")).unwrap()).unwrap();
    let cuff = &mut spec["cuffs"][2];
    let id = cuff["id"].as_i64().unwrap();
    cuff.as_object_mut().unwrap().remove("length");
    fs::write(t.path().join("bad.json"), spec.to_string()).unwrap();
    let o = fenchel(t.path(), &["--out", "s", "spectrum", "--x", "bad.json", "--y", "g/chain.json"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains(&format!("cuff {id}")), "{}", stderr(&o));
}

#[test]
fn probe_radius_is_capped() {
    let t = TempDir::new().unwrap();
    let o = fenchel(t.path(), &["--out", "p", "probe", "--radius", "0.6"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("0.5"));
    assert!(!t.path().join("p/manifest.json").exists());
}

#[test]
fn probe_reports_and_reproduces() {
    let t = TempDir::new().unwrap();
    let args = |out: &'static str| {
        vec!["--out", out, "--seed", "4", "probe", "--n", "6", "--samples", "20", "--radius", "0.3", "--family", "1"]
    };
    for out in ["p", "q"] {
        let o = fenchel(t.path(), &args(out));
        assert_eq!(code(&o), 0, "{}", stderr(&o));
    }
    let read = |p: &str| fs::read(t.path().join(p)).unwrap();
    assert_eq!(read("p/probe.csv"), read("q/probe.csv"));
    assert_eq!(read("p/probe.json"), read("q/probe.json"));
    let report: serde_json::Value = serde_json::from_slice(&read("p/probe.json")).unwrap();
    let (lo, hi) = (report["min_ratio"].as_f64().unwrap(), report["max_ratio"].as_f64().unwrap());
    assert!(0.0 < lo && lo <= hi && hi <= 0.5 + 1e-12, "{lo} {hi}");
    let csv = String::from_utf8(read("p/probe.csv")).unwrap();
    assert_eq!(csv.lines().count(), 21);
}

#[test]
fn fnmap_round_trip() {
    let t = TempDir::new().unwrap();
    let gen = |out: &'static str, seed: &'static str| {
        fenchel(
            t.path(),
            &["--out", out, "--seed", seed, "generate", "chain", "--n", "3", "--min-length", "1e-3", "--max-length", "1", "--random-twists"],
        )
    };
    gen("a", "1");
    gen("b", "2");
    let o = fenchel(t.path(), &["--out", "f", "fnmap", "forward", "--base", "a/chain.json", "--x", "b/chain.json"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = fenchel(t.path(), &["--out", "i", "fnmap", "inverse", "--base", "a/chain.json", "--vector", "f/vector.json"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let b = PantsSurface::load(t.path().join("b/chain.json")).unwrap();
    let back = PantsSurface::load(t.path().join("i/surface.json")).unwrap();
    for (p, q) in b.lengths().iter().zip(back.lengths()) {
        assert!((p - q).abs() <= 1e-12 * p);
    }
    for (p, q) in b.twists().iter().zip(back.twists()) {
        assert!((p - q).abs() <= 1e-12);
    }
}

#[test]
fn twistflow_checks() {
    let t = TempDir::new().unwrap();
    let o = fenchel(t.path(), &["--out", "d", "twistflow", "derivcheck", "--trials", "20"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = fs::read_to_string(t.path().join("d/derivcheck.csv")).unwrap();
    assert!(csv.starts_with("trial,exact,fd,error\n"));
    assert_eq!(csv.lines().count(), 21);
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(t.path().join("d/derivcheck.json")).unwrap()).unwrap();
    assert_eq!(summary["pass"], true);

    let o = fenchel(t.path(), &["--out", "c", "twistflow", "convexity", "--grid", "-1:1:9"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("convex"));
    let o = fenchel(t.path(), &["--out", "e", "twistflow", "convexity", "--grid", "1:1:9"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn closure_verdict_and_study() {
    let t = TempDir::new().unwrap();
    fenchel(t.path(), &["--out", "g", "generate", "sqrt", "--n", "30"]);
    let o = fenchel(t.path(), &["--out", "v", "closure", "verdict", "--spec", "g/surface.json", "--base", "g/base.json"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("consistent"), "{}", stdout(&o));

    let o = fenchel(t.path(), &["--out", "s", "closure", "study", "--gen", "half", "--depth", "20", "--igrid", "0:10:3"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = fs::read_to_string(t.path().join("s/study.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("i,dls,argmax_curve"));
    let last: Vec<&str> = lines.last().unwrap().split(',').collect();
    assert_eq!((last[0], last[1], last[2]), ("10.0", "0.0", ""));

    let o = fenchel(t.path(), &["--out", "u", "closure", "study", "--gen", "cubic", "--depth", "3", "--igrid", "0:1:2"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("cubic"));
}

#[test]
fn numerical_failures_exit_with_two() {
    // a twist of thousands of cuff lengths overflows the holonomy
    let t = TempDir::new().unwrap();
    fenchel(t.path(), &["--out", "g", "generate", "torus", "--cuff", "1"]);
    fs::write(
        t.path().join("curve.json"),
        r#"{"steps": [{"traverse": [0, 0, 1]}, {"cross": 0, "winding": 5000}]}"#,
    )
    .unwrap();
    let args = |curve: &'static str| {
        vec![
            "--out", "c", "twistflow", "convexity", "--grid", "0:1:3", "--spec", "g/torus.json", "--cuff", "0",
            "--curve", curve,
        ]
    };
    let o = fenchel(t.path(), &args("curve.json"));
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    assert!(stderr(&o).contains("curve curve.json"), "{}", stderr(&o));

    // a curve that never crosses the twisted cuff is bad input
    fs::write(t.path().join("peri.json"), r#"{"peripheral": 1}"#).unwrap();
    let o = fenchel(t.path(), &args("peri.json"));
    assert_eq!(code(&o), 1, "{}", stderr(&o));
}

#[test]
fn help_and_bad_usage() {
    let t = TempDir::new().unwrap();
    assert_eq!(code(&fenchel(t.path(), &["--help"])), 0);
    assert_eq!(code(&fenchel(t.path(), &["--version"])), 0);
    assert_eq!(code(&fenchel(t.path(), &["frobnicate"])), 1);
    assert_eq!(code(&fenchel(t.path(), &["generate"])), 1);
}
