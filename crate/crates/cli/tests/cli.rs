use std::fs;
use std::process::{Command, Output};

use muca_core::fixtures::E1_TEXT;
use muca_core::parse_instance;
use tempfile::TempDir;

fn muca(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_muca"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn field<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix(' ')))
        .unwrap_or_else(|| panic!("no {key} line in:\n{text}"))
}

fn e1_file(dir: &TempDir) -> String {
    let p = dir.path().join("e1.txt");
    fs::write(&p, E1_TEXT).unwrap();
    p.to_str().unwrap().to_string()
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_string()
}

#[test]
fn solve_reports_every_field() {
    let dir = TempDir::new().unwrap();
    let o = muca(&["solve", &e1_file(&dir)]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert_eq!(field(&s, "VALUE"), "9");
    assert_eq!(field(&s, "WINNERS"), "1 3");
    assert_eq!(field(&s, "OPTIMAL"), "true");
    for key in ["NODES", "NODE_FRACTION", "TIME_MS", "TIME_TO_BEST_MS", "NODES_TO_BEST"] {
        field(&s, key).parse::<f64>().unwrap();
    }
}

#[test]
fn solve_with_every_bound_set_and_criterion() {
    let dir = TempDir::new().unwrap();
    let file = e1_file(&dir);
    for bounds in ["none", "avg", "proj", "lp", "avg,proj,lp"] {
        for criterion in ["price", "avg-norm", "sqrt", "family:l=2,m=1/2,norm"] {
            let o = muca(&["solve", "--bounds", bounds, "--criterion", criterion, "--no-seed", &file]);
            assert_eq!(o.status.code(), Some(0), "{bounds} {criterion}");
            assert_eq!(field(&stdout(&o), "VALUE"), "9");
        }
    }
}

#[test]
fn node_limit_exits_two() {
    let dir = TempDir::new().unwrap();
    let o = muca(&["solve", "--bounds", "none", "--no-seed", "--node-limit", "1", &e1_file(&dir)]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(field(&stdout(&o), "OPTIMAL"), "false");
}

#[test]
fn greedy_explain_lists_scores_in_rank_order() {
    let dir = TempDir::new().unwrap();
    let o = muca(&["greedy", "--explain", &e1_file(&dir)]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert_eq!(field(&s, "VALUE"), "9");
    let ranked: Vec<&str> = s
        .lines()
        .filter_map(|l| l.strip_prefix("SCORE "))
        .map(|l| l.split(' ').next().unwrap())
        .collect();
    assert_eq!(ranked, ["1", "0", "3", "2"]);
}

#[test]
fn bound_prints_each_method_and_minimum() {
    let dir = TempDir::new().unwrap();
    let o = muca(&["bound", "--explain", &e1_file(&dir)]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert_eq!(field(&s, "AVG"), "9");
    assert_eq!(field(&s, "PROJ"), "10");
    assert_eq!(field(&s, "LP"), "9");
    assert_eq!(field(&s, "MIN"), "9");
    assert_eq!(field(&s, "LP_X"), "0 1 0 1");
    assert_eq!(field(&s, "LP_INTEGRAL"), "true");
}

#[test]
fn oracle_agrees() {
    let dir = TempDir::new().unwrap();
    let s = stdout(&muca(&["oracle", &e1_file(&dir)]));
    assert_eq!(field(&s, "VALUE"), "9");
    assert_eq!(field(&s, "WINNERS"), "1 3");
}

#[test]
fn gen_is_deterministic_and_parses() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (path(&dir, "a.txt"), path(&dir, "b.txt"));
    for out in [&a, &b] {
        let o = muca(&["gen", "--goods", "4", "--bids", "12", "--seed", "7", "--cap", "2:4", "-o", out]);
        assert!(o.status.success());
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    let inst = parse_instance(&text).unwrap();
    assert_eq!((inst.goods(), inst.len()), (4, 12));
    assert!(inst.caps.iter().all(|&k| (2..=4).contains(&k)));
}

#[test]
fn gen_graph_and_solve() {
    let dir = TempDir::new().unwrap();
    let edges = path(&dir, "edges.txt");
    fs::write(&edges, "0 1\n1 2\n2 3\n").unwrap();
    let out = path(&dir, "path.txt");
    assert!(muca(&["gen", "graph", "--edges", &edges, "-o", &out]).status.success());
    assert_eq!(field(&stdout(&muca(&["solve", &out])), "VALUE"), "2");
}

#[test]
fn gen_adversarial_writes_two_files() {
    let dir = TempDir::new().unwrap();
    let base = path(&dir, "adv");
    assert!(muca(&["gen", "adversarial", "--caps", "2,2", "-o", &base]).status.success());
    for suffix in ["1", "2"] {
        let text = fs::read_to_string(format!("{base}.{suffix}")).unwrap();
        assert_eq!(parse_instance(&text).unwrap().caps, vec![2, 2]);
    }
}

#[test]
fn gen_adversarial_follows_criterion() {
    let s = stdout(&muca(&["gen", "adversarial", "--caps", "1,3", "--criterion", "euclid-norm"]));
    let first = s.split("# problem II").next().unwrap();
    assert!(first.lines().any(|l| l == "BID 0 1 1.000001"), "{first}");
}

#[test]
fn gen_counterexample() {
    let s = stdout(&muca(&["gen", "counterexample", "--k", "4"]));
    let inst = parse_instance(&s).unwrap();
    assert_eq!(inst.caps, vec![4, 1]);
    assert_eq!(inst.len(), 2);
}

#[test]
fn bench_writes_csv() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "out.csv");
    let o = muca(&[
        "bench", "--goods", "3", "--bids", "5,6", "--trials", "2", "--seed", "1", "-o", &out,
    ]);
    assert!(o.status.success());
    let csv = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert!(lines[0].starts_with("goods,bids,trial,seed,"));
    assert_eq!(lines.len(), 1 + 4 + 2);
}

#[test]
fn errors_exit_one() {
    let dir = TempDir::new().unwrap();
    let bad = path(&dir, "bad.txt");
    fs::write(&bad, "MUCA 1\nGOODS 1\nCAPS 0\n").unwrap();
    let o = muca(&["solve", &bad]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line"));

    assert_eq!(muca(&["solve", "missing-file"]).status.code(), Some(1));
    assert_eq!(muca(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(muca(&["solve", "--criterion", "nope", "x"]).status.code(), Some(1));
    assert_eq!(muca(&["gen", "--goods", "3"]).status.code(), Some(1));
    assert_eq!(muca(&["--help"]).status.code(), Some(0));
}
