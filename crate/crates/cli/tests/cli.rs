use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_dilatree"));
    c.env_remove("DILATREE_MAX_BITS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn p(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Instance for (1, 1) plus the standard tree for A = {1}.
fn gen_pair(dir: &TempDir) -> (PathBuf, PathBuf) {
    let (inst, tree) = (p(dir, "i11.json"), p(dir, "t11.json"));
    let o = run(&["gen", "--alphas", "1,1", "-o", s(&inst), "--standard", "1", "--tree-out", s(&tree)]);
    assert_eq!(code(&o), 0, "{o:?}");
    (inst, tree)
}

fn write_points(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let f = p(dir, name);
    std::fs::write(&f, body).unwrap();
    f
}

#[test]
fn exit_code_matrix() {
    let dir = TempDir::new().unwrap();
    let (inst, tree) = gen_pair(&dir);
    let threshold = {
        let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&inst).unwrap()).unwrap();
        format!("{}/{}", v["P"].as_str().unwrap(), v["Q"].as_str().unwrap())
    };
    let odd = p(&dir, "i111.json");
    assert_eq!(code(&run(&["gen", "--alphas", "1,1,1", "-o", s(&odd)])), 0);
    let sol = p(&dir, "sol.json");
    let square = write_points(&dir, "sq.json", r#"{"points":[{"x":"0","y":"0"},{"x":"1","y":"0"},{"x":"1","y":"1"},{"x":"0","y":"1"}]}"#);
    let corner = write_points(&dir, "corner.json", r#"{"points":[{"x":"0","y":"0"},{"x":"1","y":"0"},{"x":"1","y":"1"}]}"#);
    let bent = write_points(&dir, "bent.json", r#"{"edges":[[0,1],[1,2]]}"#);
    // 886731088897/627013566048 is within 2^-80 of sqrt 2
    let near_sqrt2 = "886731088897/627013566048";
    let dil = |pts: &Path, t: &Path, thr: &str, extra: &[&str]| {
        let mut a = vec!["dilation", "--points", s(pts), "--tree", s(t), "--threshold", thr];
        a.extend_from_slice(extra);
        run(&a)
    };

    let cases: Vec<(&str, Output, i32)> = vec![
        ("decide yes", run(&["decide", s(&inst), "--solution-out", s(&sol)]), 0),
        ("decide no", run(&["decide", s(&odd)]), 1),
        ("verify", run(&["verify", s(&inst)]), 0),
        ("oracle yes", run(&["oracle", "--alphas", "3,1,1,2,2,1"]), 0),
        ("oracle no", run(&["oracle", "--alphas", "1,2,4"]), 1),
        ("dilation at most P/Q", dil(&inst, &tree, &threshold, &[]), 0),
        ("dilation above 1", dil(&inst, &tree, "1/1", &[]), 1),
        ("decimal threshold", dil(&inst, &tree, "1.5", &[]), 2),
        ("missing file", run(&["verify", s(&p(&dir, "nope.json"))]), 2),
        ("unknown subcommand", run(&["frobnicate"]), 2),
        ("precision cap", dil(&corner, &bent, near_sqrt2, &["--max-bits", "64"]), 3),
        ("crossing-free infeasible", run(&["mdst", "--points", s(&square), "--crossing-free", "--require", "0-2,1-3"]), 1),
    ];
    assert_eq!(cases.len(), 12);
    for (name, out, want) in &cases {
        assert_eq!(code(out), *want, "{name}: {}", String::from_utf8_lossy(&out.stderr));
    }

    let sol: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&sol).unwrap()).unwrap();
    let mut all: Vec<u64> = sol["a"].as_array().unwrap().iter().chain(sol["a_prime"].as_array().unwrap()).map(|v| v.as_u64().unwrap()).collect();
    all.sort();
    assert_eq!(all, vec![1, 2]);
    let d = stdout(&cases[5].1);
    assert!(d.contains("witness pair (q2, p2)") || d.contains("witness pair (q2, p'2)"), "{d}");
    // with enough precision the near-sqrt-2 threshold is separated
    assert_eq!(code(&dil(&corner, &bent, near_sqrt2, &["--max-bits", "256"])), 0);
}

#[test]
fn gen_round_trip_and_decide_stability() {
    let dir = TempDir::new().unwrap();
    let (inst, _) = gen_pair(&dir);
    let text = std::fs::read_to_string(&inst).unwrap();
    let ii = dilatree::formats::instance_from_json(&text).unwrap();
    assert_eq!(dilatree::formats::instance_to_json(&ii), text);

    let copy = p(&dir, "copy.json");
    std::fs::write(&copy, dilatree::formats::instance_to_json(&ii)).unwrap();
    let (t1, t2) = (p(&dir, "t1.json"), p(&dir, "t2.json"));
    let a = run(&["decide", s(&inst), "--tree-out", s(&t1)]);
    let b = run(&["decide", s(&copy), "--tree-out", s(&t2)]);
    assert_eq!(code(&a), 0);
    assert_eq!(stdout(&a), stdout(&b));
    assert_eq!(std::fs::read(&t1).unwrap(), std::fs::read(&t2).unwrap());

    let g = p(&dir, "g.json");
    assert_eq!(code(&run(&["gen", "--alphas", "2,3,5", "-o", s(&p(&dir, "i.json")), "--gadget-out", s(&g)])), 0);
    let gt = std::fs::read_to_string(&g).unwrap();
    assert_eq!(dilatree::formats::gadget_to_json(&dilatree::formats::gadget_from_json(&gt).unwrap()).unwrap(), gt);
    assert_eq!(code(&run(&["verify", s(&g)])), 0);
}

#[test]
fn outputs_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (p(&dir, "a.json"), p(&dir, "b.json"));
    run(&["gen", "--alphas", "1,2,3", "-o", s(&a)]);
    run(&["gen", "--alphas", "1,2,3", "-o", s(&b)]);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let (t, s1, s2) = (p(&dir, "t.json"), p(&dir, "1.svg"), p(&dir, "2.svg"));
    run(&["gen", "--alphas", "1,1", "-o", s(&a), "--standard", "2", "--tree-out", s(&t)]);
    assert_eq!(code(&run(&["svg", "--points", s(&a), "--tree", s(&t), "-o", s(&s1)])), 0);
    run(&["svg", "--points", s(&a), "--tree", s(&t), "-o", s(&s2)]);
    let svg = std::fs::read_to_string(&s1).unwrap();
    assert_eq!(svg, std::fs::read_to_string(&s2).unwrap());
    assert_eq!(svg.matches("<circle").count(), 24);
    assert_eq!(svg.matches("<line").count(), 23);

    let w = |seed: &str| run(&["witness5", "--seed", seed, "--budget", "1"]);
    assert_eq!(code(&w("7")), 1);
    assert_eq!(stdout(&w("7")), "none\n");
}

#[test]
fn mdst_writes_files() {
    let dir = TempDir::new().unwrap();
    let pts = write_points(&dir, "sq.json", r#"{"points":[{"x":"0","y":"0"},{"x":"1","y":"0"},{"x":"1","y":"1"},{"x":"0","y":"1"}]}"#);
    let (t, j) = (p(&dir, "t.json"), p(&dir, "r.json"));
    let o = run(&["mdst", "--points", s(&pts), "-o", s(&t), "--json", s(&j)]);
    assert_eq!(code(&o), 0);
    let tree = dilatree::formats::tree_from_json(&std::fs::read_to_string(&t).unwrap()).unwrap();
    assert_eq!(tree.edges().len(), 3);
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&j).unwrap()).unwrap();
    assert_eq!(r["mode"], "Tree");
    let o = run(&["mdst", "--points", s(&pts), "--mode", "tour"]);
    assert!(stdout(&o).contains("order"));
}
