use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

fn pwpath(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pwpath")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn ex1() -> String {
    fixture("ex1.json").to_str().unwrap().to_string()
}

#[test]
fn solve_min_adaptations() {
    let o = pwpath(&["solve", &ex1(), "--objective", "adaptations"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["trace"], "a b b\u{0304} a");
    assert_eq!(doc["word"], "a b\u{0304}\u{2082} a");
    assert_eq!(doc["adaptations"], 2);
    let text = stdout(&o);
    let positions: Vec<usize> = ["objective", "word", "trace", "path", "hops", "adaptations"]
        .iter()
        .map(|k| text.find(&format!("\"{k}\":")).unwrap())
        .collect();
    assert!(positions.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn solve_min_hops_and_emit_modes() {
    let o = pwpath(&["solve", &ex1(), "--objective", "hops"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["hops"], 4);
    let o = pwpath(&["solve", &ex1(), "--objective", "adaptations", "--emit", "word"]);
    assert_eq!(stdout(&o), "a b\u{0304}\u{2082} a\n");
    let o = pwpath(&["solve", &ex1(), "--emit", "trace"]);
    assert_eq!(stdout(&o), "a b b\u{0304} a\n");
}

#[test]
fn solve_without_functions_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.json");
    std::fs::write(
        &path,
        r#"{"protocols":["a"],"nodes":[{"id":"S"},{"id":"D"}],"links":[["S","D"]],"source":"S","destination":"D"}"#,
    )
    .unwrap();
    let o = pwpath(&["solve", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "no feasible path\n");
}

#[test]
fn invalid_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"protocols":["a"],"nodes":[],"links":[],"source":"S","destination":"S"}"#).unwrap();
    assert_eq!(pwpath(&["solve", path.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(pwpath(&["solve", "/nonexistent/topology.json"]).status.code(), Some(2));
    assert_eq!(pwpath(&["solve", &ex1(), "--objective", "speed"]).status.code(), Some(2));
    assert_eq!(pwpath(&["export", &ex1(), "--what", "cfg", "--format", "dot"]).status.code(), Some(2));
    assert_eq!(pwpath(&["gen", "--nodes", "1", "--protocols", "2"]).status.code(), Some(2));
}

#[test]
fn verify_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.json");
    std::fs::write(&good, r#"{"path":["S","a","U","b","V","~b","W","a","D"]}"#).unwrap();
    let o = pwpath(&["verify", &ex1(), good.to_str().unwrap()]);
    assert_eq!((o.status.code(), stdout(&o)), (Some(0), "feasible\n".to_string()));

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"path":["S","a","U","b","V","b","W","a","D"]}"#).unwrap();
    let o = pwpath(&["verify", &ex1(), bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("infeasible: "));

    let unknown = dir.path().join("unknown.json");
    std::fs::write(&unknown, r#"{"path":["S","a","U","b","X"]}"#).unwrap();
    assert_eq!(pwpath(&["verify", &ex1(), unknown.to_str().unwrap()]).status.code(), Some(2));

    let garbage = dir.path().join("garbage.json");
    std::fs::write(&garbage, "[1, 2").unwrap();
    assert_eq!(pwpath(&["verify", &ex1(), garbage.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn verify_reports_invalid_parenthesization() {
    let dir = tempfile::tempdir().unwrap();
    let topo = dir.path().join("topo.json");
    std::fs::write(
        &topo,
        r#"{
            "protocols": ["a", "b", "c"],
            "nodes": [
                {"id": "S", "functions": [{"kind": "passive", "a": "a"}]},
                {"id": "U", "functions": [{"kind": "encap", "a": "a", "b": "b"}]},
                {"id": "W", "functions": [{"kind": "decap", "a": "c", "b": "b"}]},
                {"id": "D", "functions": [{"kind": "passive", "a": "c"}]}
            ],
            "links": [["S", "U"], ["U", "W"], ["W", "D"]],
            "source": "S",
            "destination": "D"
        }"#,
    )
    .unwrap();
    let path = dir.path().join("path.json");
    std::fs::write(&path, r#"{"path":["S","a","U","~b","W","c","D"]}"#).unwrap();
    let o = pwpath(&["verify", topo.to_str().unwrap(), path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "infeasible: invalid parenthesization\n");
    let o = pwpath(&["solve", topo.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn solve_then_verify_is_optimal() {
    let dir = tempfile::tempdir().unwrap();
    for seed in 0..12u64 {
        let o = pwpath(&["gen", "--nodes", "6", "--protocols", "2", "--edge-prob", "0.5", "--function-density", "0.4", "--seed", &seed.to_string()]);
        let topo = dir.path().join(format!("t{seed}.json"));
        std::fs::write(&topo, &o.stdout).unwrap();
        for objective in ["hops", "adaptations"] {
            let o = pwpath(&["solve", topo.to_str().unwrap(), "--objective", objective]);
            if o.status.code() == Some(1) {
                continue;
            }
            assert_eq!(o.status.code(), Some(0));
            let result = dir.path().join(format!("r{seed}{objective}.json"));
            std::fs::write(&result, &o.stdout).unwrap();
            let v = pwpath(&["verify", topo.to_str().unwrap(), result.to_str().unwrap(), "--oracle", "--objective", objective]);
            assert_eq!(stdout(&v), "feasible; optimal\n", "seed {seed} {objective}");
        }
    }
}

#[test]
fn exports() {
    let o = pwpath(&["export", &ex1(), "--what", "tpda", "--format", "text"]);
    assert!(stdout(&o).contains("(V_b, b\u{0304}\u{2082}, a, \u{2205}, D_a)"));
    let o = pwpath(&["export", &ex1(), "--what", "cfg"]);
    assert!(stdout(&o).contains("[V_b a D_a] -> b\u{0304}\u{2082}\n"));
    let ex0 = fixture("ex0.json");
    let o = pwpath(&["export", ex0.to_str().unwrap(), "--what", "pda"]);
    assert!(stdout(&o).starts_with("states: S_A D_a D_A\n"));
    for what in ["network", "pda", "tpda"] {
        let a = pwpath(&["export", &ex1(), "--what", what, "--format", "dot"]);
        let b = pwpath(&["export", &ex1(), "--what", what, "--format", "dot"]);
        assert_eq!(a.status.code(), Some(0));
        assert!(stdout(&a).starts_with("digraph"));
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn gen_is_deterministic() {
    let args = ["gen", "--nodes", "6", "--protocols", "2", "--seed", "7"];
    let a = pwpath(&args);
    let b = pwpath(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, pwpath(&["gen", "--nodes", "6", "--protocols", "2", "--seed", "8"]).stdout);
}

#[test]
fn bench_sweep_respects_bounds() {
    let o = pwpath(&["bench", "--min-nodes", "4", "--max-nodes", "10", "--protocols", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows: Vec<Vec<&str>> = text
        .lines()
        .skip(1)
        .filter(|l| !l.starts_with("bounds"))
        .map(|l| l.split_whitespace().collect())
        .collect();
    assert_eq!(rows.len(), 7);
    let mut last = 0;
    for r in &rows {
        let (v, a, q, n, sweeps): (usize, usize, usize, usize, usize) =
            (r[0].parse().unwrap(), r[1].parse().unwrap(), r[2].parse().unwrap(), r[5].parse().unwrap(), r[7].parse().unwrap());
        assert!(q >= last);
        assert!(q <= 2 + (v - 1) * a);
        assert!(sweeps <= n);
        last = q;
    }
    assert!(text.ends_with("bounds: ok\n"));
}
