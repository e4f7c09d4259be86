use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_refdecomp"));
    c.env_remove("REFDECOMP_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn seeds() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus/seeds")
}

fn write(dir: &Path, name: &str, src: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, src).unwrap();
    p.to_string_lossy().into_owned()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn catalog_list_has_four_columns() {
    let out = run(&["catalog", "list"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 56);
    for l in &lines {
        let cols: Vec<&str> = l.split('\t').collect();
        assert_eq!(cols.len(), 4, "{l}");
        assert!(["detector", "extended"].contains(&cols[1]), "{l}");
        assert!(["true", "false"].contains(&cols[3]), "{l}");
    }
    assert!(lines.iter().any(|l| l.starts_with("rename-method\tdetector\t")));
}

#[test]
fn identical_files_decompose_trivially() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.mj", "int f(int x) { return x * 2; }");
    let out = run(&["decompose", &a, &a]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["sim_final"], 1.0);
    assert_eq!(v["steps"], serde_json::json!([]));
    assert_eq!(v["fully_decomposed"], true);
    for key in ["pair_id", "sim_after_stage_a", "residual_delta_tokens"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn decompose_reports_steps_and_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let l = write(dir.path(), "l.mj", "boolean f(boolean a, boolean b) { return !a || !b; }");
    let r = write(dir.path(), "r.mj", "boolean g(boolean a, boolean b) { return !(a && b); }");
    let out = run(&["decompose", &l, &r, "--emit-snapshots", "--seed", "4"]);
    assert!(out.status.success());
    let v = json(&out);
    let rules: Vec<&str> = v["steps"].as_array().unwrap().iter().map(|s| s["rule_id"].as_str().unwrap()).collect();
    assert_eq!(rules, ["rename-method", "apply-de-morgans-law"]);
    assert_eq!(v["snapshots"].as_array().unwrap().len(), 3);
    for s in v["steps"].as_array().unwrap() {
        assert!(s["delta_after"].as_u64() < s["delta_before"].as_u64());
        assert!(s["path"].is_array());
    }

    let det = json(&run(&["decompose", &l, &r, "--tiers", "detector", "--no-verify"]));
    assert!(det["sim_final"].as_f64().unwrap() < 1.0);
    assert!(det.get("snapshots").is_none());
}

#[test]
fn decompose_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let l = write(dir.path(), "l.mj", "int f(int a) { int t = a + 1; if (!(t == 3)) { t += 2; } return t; }");
    let r = write(dir.path(), "r.mj", "int f(int a) { int t = 1 + a; if (t != 3) { t = t + 2; } return t; }");
    let a = run(&["decompose", &l, &r, "--beam", "2"]);
    let b = bin().args(["decompose", &l, &r, "--beam", "2"]).env("REFDECOMP_SEED", "0").output().unwrap();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn malformed_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "good.mj", "int f(int x) { return x; }");
    let bad = write(dir.path(), "bad.mj", "int f(int x) { return x + ; }");
    assert_eq!(run(&["decompose", &bad, &good]).status.code(), Some(2));
    assert_eq!(run(&["decompose", &good, "/nonexistent/file.mj"]).status.code(), Some(2));
    assert_eq!(run(&["check-equivalence", &good, &bad]).status.code(), Some(2));
    assert_eq!(run(&["decompose", &good]).status.code(), Some(2));
    assert_eq!(run(&["decompose", &good, &good, "--tiers", "some"]).status.code(), Some(2));
    assert_eq!(run(&["decompose", &good, &good, "--beam", "0"]).status.code(), Some(2));
}

#[test]
fn check_equivalence_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.mj", "int f(int x) { return x + 1; }");
    let b = write(dir.path(), "b.mj", "int f(int x) { return 1 + x; }");
    let c = write(dir.path(), "c.mj", "int f(int x) { return x + 2; }");
    let d = write(dir.path(), "d.mj", "int f(long x) { return 1; }");
    assert_eq!(run(&["check-equivalence", &a, &b]).status.code(), Some(0));
    let out = run(&["check-equivalence", &a, &c, "--samples", "10"]);
    assert_eq!(out.status.code(), Some(3));
    let v = json(&out);
    assert_eq!(v["verdict"], "counterexample");
    assert!(v["input"].is_array());
    assert_eq!(run(&["check-equivalence", &a, &d]).status.code(), Some(2));
}

#[test]
fn generate_then_eval() {
    let work = tempfile::tempdir().unwrap();
    let corpus = work.path().join("corpus");
    let out = work.path().join("out");
    let gen = run(&[
        "generate",
        "--seeds",
        seeds().to_str().unwrap(),
        "-o",
        corpus.to_str().unwrap(),
        "--pairs",
        "12",
        "--k-max",
        "1",
        "--seed",
        "9",
    ]);
    assert!(gen.status.success(), "{}", String::from_utf8_lossy(&gen.stderr));
    let pairs: Vec<_> = fs::read_dir(&corpus).unwrap().collect();
    assert_eq!(pairs.len(), 12);

    let ev = run(&["eval", corpus.to_str().unwrap(), "-o", out.to_str().unwrap(), "--seed", "9"]);
    assert!(ev.status.success(), "{}", String::from_utf8_lossy(&ev.stderr));
    let summary: serde_json::Value = serde_json::from_slice(&fs::read(out.join("summary.json")).unwrap()).unwrap();
    let configs: Vec<&str> = summary
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["tier_config"].as_str().unwrap())
        .collect();
    assert_eq!(configs, ["detector", "all"]);

    // with one scramble step, the full catalog recovers exactly its inverse
    for id in 0..12 {
        let id = format!("p{id:04}");
        let meta: serde_json::Value =
            serde_json::from_slice(&fs::read(corpus.join(&id).join("meta.json")).unwrap()).unwrap();
        let trace: serde_json::Value =
            serde_json::from_slice(&fs::read(out.join("traces/all").join(format!("{id}.json"))).unwrap()).unwrap();
        let want: Vec<&str> = meta["ops"].as_array().unwrap().iter().map(|o| o["inverse_id"].as_str().unwrap()).collect();
        let got: Vec<&str> = trace["steps"].as_array().unwrap().iter().map(|s| s["rule_id"].as_str().unwrap()).collect();
        assert_eq!(got, want, "{id}");
    }

    let csv = fs::read_to_string(out.join("sims.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("pair_id,tier_config,sim_final"));
    let rows: Vec<(String, f64)> = lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[1].to_string(), f[2].parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 24);
    for w in rows.windows(2) {
        if w[0].0 == w[1].0 {
            assert!(w[0].1 <= w[1].1);
        }
    }
    assert!(!csv.contains('\r'));
}

#[test]
fn generation_honours_the_seed_variable() {
    let work = tempfile::tempdir().unwrap();
    let (a, b) = (work.path().join("a"), work.path().join("b"));
    let s = seeds();
    let flag = run(&["generate", "--seeds", s.to_str().unwrap(), "-o", a.to_str().unwrap(), "--pairs", "5", "--seed", "21"]);
    assert!(flag.status.success());
    let env = bin()
        .args(["generate", "--seeds", s.to_str().unwrap(), "-o", b.to_str().unwrap(), "--pairs", "5"])
        .env("REFDECOMP_SEED", "21")
        .output()
        .unwrap();
    assert!(env.status.success());
    for id in ["p0000", "p0004"] {
        for f in ["left.mj", "right.mj", "meta.json"] {
            assert_eq!(fs::read(a.join(id).join(f)).unwrap(), fs::read(b.join(id).join(f)).unwrap());
        }
    }
}

#[test]
fn k_max_zero_gives_identical_pairs() {
    let work = tempfile::tempdir().unwrap();
    let c = work.path().join("c");
    let s = seeds();
    let out = run(&["generate", "--seeds", s.to_str().unwrap(), "-o", c.to_str().unwrap(), "--pairs", "3", "--k-max", "0"]);
    assert!(out.status.success());
    for id in ["p0000", "p0001", "p0002"] {
        assert_eq!(fs::read(c.join(id).join("left.mj")).unwrap(), fs::read(c.join(id).join("right.mj")).unwrap());
    }
}

#[test]
fn empty_corpus_exits_2() {
    let empty = tempfile::tempdir().unwrap();
    let out_dir = tempfile::tempdir().unwrap();
    let out = run(&["eval", empty.path().to_str().unwrap(), "-o", out_dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no pairs"));
}

#[test]
fn unparsable_pair_is_recorded_and_run_continues() {
    let work = tempfile::tempdir().unwrap();
    let corpus = work.path().join("c");
    for (id, left) in [("a", "int f(int x) { return x + 0; }"), ("b", "int f(int x) { return ; }")] {
        fs::create_dir_all(corpus.join(id)).unwrap();
        fs::write(corpus.join(id).join("left.mj"), left).unwrap();
        fs::write(corpus.join(id).join("right.mj"), "int f(int x) { return 0 + x; }").unwrap();
    }
    let out = work.path().join("o");
    let ev = run(&["eval", corpus.to_str().unwrap(), "-o", out.to_str().unwrap(), "--tiers", "all"]);
    assert!(ev.status.success());
    let summary: serde_json::Value = serde_json::from_slice(&fs::read(out.join("summary.json")).unwrap()).unwrap();
    let s = &summary[0];
    assert_eq!(s["pairs"], 1);
    assert_eq!(s["rows"][0]["pair_id"], "a");
    assert_eq!(s["failures"][0]["pair_id"], "b");
    assert!(out.join("traces/all/a.json").is_file());
}
