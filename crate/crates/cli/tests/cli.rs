use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn dualtree(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dualtree"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, body: &[u8]) -> String {
    let p = dir.path().join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

fn build(dir: &TempDir, input: &str, extra: &[&str]) -> (Output, String) {
    let out = dir.path().join("index.dtr").to_str().unwrap().to_string();
    let mut args = vec!["build", input, "-o", &out];
    args.extend_from_slice(extra);
    (dualtree(&args), out)
}

fn array_index(dir: &TempDir) -> String {
    let input = write(dir, "a.txt", b"2 7 8 1 6 4 3 5\n");
    let (o, idx) = build(dir, &input, &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    idx
}

fn interval_index(dir: &TempDir) -> String {
    let input = write(dir, "iv.txt", b"1 4\n3 6\n5 9\n8 10\n");
    let (o, idx) = build(dir, &input, &["--kind", "intervals"]);
    assert!(o.status.success(), "{}", stderr(&o));
    idx
}

#[test]
fn build_reports_fixture_dfuds_size() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "a.txt", b"2 7 8 1 6 4 3 5\n");
    let (o, idx) = build(&dir, &input, &[]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("dfuds_bits: 18"), "{}", stdout(&o));
    assert!(Path::new(&idx).exists());
}

#[test]
fn binary_array_matches_text_array() {
    let dir = TempDir::new().unwrap();
    let text_idx = array_index(&dir);
    let text_blob = fs::read(text_idx).unwrap();
    let mut bin = 8u64.to_le_bytes().to_vec();
    for v in [2i64, 7, 8, 1, 6, 4, 3, 5] {
        bin.extend_from_slice(&v.to_le_bytes());
    }
    let input = write(&dir, "a.bin", &bin);
    let (o, idx) = build(&dir, &input, &["--format", "binary"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(fs::read(idx).unwrap(), text_blob);
}

#[test]
fn empty_array_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "empty.txt", b"\n");
    let (o, _) = build(&dir, &input, &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("no values"));
}

#[test]
fn bad_interval_names_its_line() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "iv.txt", b"1 4\n\n3 6\n2 9\n");
    let (o, _) = build(&dir, &input, &["--kind", "intervals"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 4"), "{}", stderr(&o));
}

#[test]
fn rmq_engines_answer_fixture_query() {
    let dir = TempDir::new().unwrap();
    let idx = array_index(&dir);
    for engine in ["fh", "fn", "pda", "naive"] {
        let o = dualtree(&["query", &idx, "rmq", engine, "2", "7"]);
        assert!(o.status.success(), "{}", stderr(&o));
        assert_eq!(stdout(&o), "4\n", "{engine}");
    }
}

#[test]
fn rmq_stats_show_budget() {
    let dir = TempDir::new().unwrap();
    let idx = array_index(&dir);
    let o = dualtree(&["query", &idx, "--stats", "rmq", "fn", "2", "7"]);
    let text = stdout(&o);
    for line in ["rank 1", "select 2", "rmq 1"] {
        assert!(text.lines().any(|l| l == line), "{text}");
    }
}

#[test]
fn reversed_range_is_a_query_error() {
    let dir = TempDir::new().unwrap();
    let idx = array_index(&dir);
    let o = dualtree(&["query", &idx, "rmq", "fh", "7", "2"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("usage:"));
    let o = dualtree(&["query", &idx, "rmq", "fh", "0", "2"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn mliq_solvers_agree_on_fixture() {
    let dir = TempDir::new().unwrap();
    let idx = interval_index(&dir);
    for (a, b, want) in [
        ("4", "5", "2"),
        ("9", "10", "4"),
        ("1", "10", "None"),
        ("6", "10", "None"),
    ] {
        for solver in ["naive", "weighted", "brute"] {
            let o = dualtree(&["query", &idx, "mliq", solver, a, b]);
            assert!(o.status.success(), "{}", stderr(&o));
            assert_eq!(stdout(&o).trim(), want, "{solver} {a} {b}");
        }
    }
    let strict = |a: &str, b: &str| {
        stdout(&dualtree(&[
            "query", &idx, "mliq", "weighted", a, b, "--strict",
        ]))
    };
    assert_eq!(strict("4", "5").trim(), "2");
    assert_eq!(strict("4", "6").trim(), "None");
}

#[test]
fn wrong_index_kind_is_a_query_error() {
    let dir = TempDir::new().unwrap();
    let idx = interval_index(&dir);
    let o = dualtree(&["query", &idx, "rmq", "fh", "1", "2"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn corrupt_index_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let idx = array_index(&dir);
    let mut bytes = fs::read(&idx).unwrap();
    bytes.truncate(bytes.len() - 3);
    fs::write(&idx, bytes).unwrap();
    let o = dualtree(&["query", &idx, "rmq", "fh", "1", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("invalid index file"));
}

#[test]
fn json_lines_query() {
    let dir = TempDir::new().unwrap();
    let idx = array_index(&dir);
    let o = dualtree(&[
        "--output",
        "json-lines",
        "query",
        &idx,
        "rmq",
        "pda",
        "5",
        "8",
    ]);
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["answer"], 7);
}

#[test]
fn claims_print_counterexamples() {
    for claim in ["prop1h", "dfuds-mirror"] {
        let o = dualtree(&["verify", "--claim", claim]);
        assert!(o.status.success(), "{}", stderr(&o));
        assert!(stdout(&o).contains("counterexample 1:"), "{}", stdout(&o));
    }
    let o = dualtree(&["verify", "--claim", "nonsense"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn small_verify_is_deterministic_across_threads() {
    let args = [
        "verify",
        "all",
        "--seed",
        "7",
        "--trees",
        "20",
        "--queries",
        "50",
        "--max-size",
        "60",
    ];
    let one = dualtree(&[&args[..], &["--threads", "1"]].concat());
    let four = dualtree(&[&args[..], &["--threads", "4"]].concat());
    assert!(one.status.success(), "{}", stdout(&one));
    assert_eq!(one.stdout, four.stdout);
    assert!(stdout(&one).lines().last().unwrap().starts_with("PASS"));
}

#[test]
fn verify_seed_from_environment() {
    let args = ["verify", "pda", "--trees", "5", "--queries", "5"];
    let env = Command::new(env!("CARGO_BIN_EXE_dualtree"))
        .args(args)
        .env("DUALTREE_SEED", "11")
        .output()
        .unwrap();
    let flag = dualtree(&[&args[..], &["--seed", "11"]].concat());
    assert_eq!(env.stdout, flag.stdout);
    assert!(stdout(&env).starts_with("seed 11"));
}

#[test]
fn bench_is_reproducible_without_timing() {
    let args = [
        "bench",
        "rmq",
        "--size",
        "500",
        "--queries",
        "300",
        "--seed",
        "3",
        "--no-timing",
    ];
    let a = dualtree(&args);
    let b = dualtree(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 5);
    let checksums: Vec<&str> = rows[1..]
        .iter()
        .map(|r| r.split('\t').nth(2).unwrap())
        .collect();
    assert!(checksums.windows(2).all(|w| w[0] == w[1]), "{text}");
}

#[test]
fn bench_mliq_solvers_agree() {
    let o = dualtree(&[
        "bench",
        "mliq",
        "--size",
        "300",
        "--queries",
        "500",
        "--no-timing",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let checksums: Vec<&str> = text
        .lines()
        .skip(1)
        .map(|r| r.split('\t').nth(2).unwrap())
        .collect();
    assert_eq!(checksums.len(), 3);
    assert!(checksums.windows(2).all(|w| w[0] == w[1]), "{text}");
}

#[test]
fn bench_with_no_queries_prints_header_only() {
    let o = dualtree(&[
        "bench",
        "rmq",
        "--size",
        "10",
        "--queries",
        "0",
        "--engine",
        "fn",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 2);
    assert!(text.starts_with("engine\tqueries"));
}

#[test]
fn transform_dual_of_fixture() {
    let dir = TempDir::new().unwrap();
    let tree = write(&dir, "t.txt", b"(((()))(()()(())))\n0 1 2 3 4 5 6 7 8\n");
    let o = dualtree(&["transform", &tree, "dual"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o), "(()((()))(()()()))\n0 8 7 6 5 4 3 2 1\n");
    let o = dualtree(&["transform", &tree, "dfuds"]);
    assert_eq!(stdout(&o), "((()()())((()))())\n");
    let bad = write(&dir, "bad.txt", b"(()\n");
    assert_eq!(dualtree(&["transform", &bad, "bp"]).status.code(), Some(2));
}
