use std::collections::HashMap;
use std::path::PathBuf;
use std::process::{Command, Output};

use tempfile::TempDir;

const GOLDEN: &str = "K 2 depth 0\n- 1 1\n- 2 2\n";
const UNIT: &str = "K 2 depth 0\n- 1 1\n- 2 1\n";
const U4: &str = "K 2\na 0.25\nb 0.25\nc 0.25\nd 0.25\n";
const BERN: &str = "K 2\n0 0.7\n1 0.3\n";

struct Fixture {
    dir: TempDir,
}

impl Fixture {
    fn new() -> Self {
        let f = Self {
            dir: tempfile::tempdir().unwrap(),
        };
        f.write("golden.cost", GOLDEN);
        f.write("unit.cost", UNIT);
        f.write("u4.dist", U4);
        f.write("bern.dist", BERN);
        f
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn write(&self, name: &str, text: &str) -> PathBuf {
        let p = self.path(name);
        std::fs::write(&p, text).unwrap();
        p
    }

    fn run(&self, args: &[&str]) -> Output {
        Command::new(env!("CARGO_BIN_EXE_vlcost"))
            .current_dir(self.dir.path())
            .args(args)
            .output()
            .unwrap()
    }
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn kv(o: &Output) -> HashMap<String, String> {
    stdout(o)
        .lines()
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

fn num(map: &HashMap<String, String>, key: &str) -> f64 {
    map.get(key)
        .unwrap_or_else(|| panic!("missing key {key}"))
        .parse()
        .unwrap()
}

fn ok(o: &Output) {
    assert_eq!(o.status.code(), Some(0), "stderr: {}", stderr(o));
}

#[test]
fn alpha_of_golden_cost() {
    let f = Fixture::new();
    let o = f.run(&["alpha", "--cost", "golden.cost"]);
    ok(&o);
    let a = num(&kv(&o), "alpha_c");
    // 2^-a + 2^-2a = 1 at a = log2 of the golden ratio
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    assert!((a - phi.log2()).abs() < 1e-9);
    assert_eq!(format!("{a:.6}"), "0.694242");
}

#[test]
fn smooth_h_on_uniform_four() {
    let f = Fixture::new();
    let o = f.run(&[
        "smooth",
        "--dist",
        "u4.dist",
        "--delta",
        "0.25",
        "--quantity",
        "H",
    ]);
    ok(&o);
    let m = kv(&o);
    assert_eq!(m["value"], "1.5");
    assert_eq!(m["set_size"], "3");
    assert_eq!(num(&m, "set_mass"), 0.75);
    assert!(m.contains_key("method"));
}

#[test]
fn smooth_methods_agree_on_exact_values() {
    let f = Fixture::new();
    let base = [
        "smooth",
        "--dist",
        "bern.dist",
        "--n",
        "4",
        "--delta",
        "0.1",
        "--quantity",
        "G",
    ];
    let values: Vec<f64> = ["brute", "bnb", "auto"]
        .iter()
        .map(|m| {
            let mut args = base.to_vec();
            args.extend(["--method", m]);
            let o = f.run(&args);
            ok(&o);
            num(&kv(&o), "value")
        })
        .collect();
    assert!((values[0] - values[1]).abs() < 1e-12);
    assert!((values[0] - values[2]).abs() < 1e-12);
}

#[test]
fn bounds_on_uniform_four_with_unit_cost() {
    let f = Fixture::new();
    let o = f.run(&[
        "bounds",
        "--dist",
        "u4.dist",
        "--cost",
        "unit.cost",
        "--epsilon",
        "0",
        "--n",
        "1",
        "--gamma",
        "0.01",
    ]);
    ok(&o);
    let m = kv(&o);
    assert_eq!(m["converse"], "2.0");
    assert!((num(&m, "achievability") - 5.01).abs() < 1e-12);
}

#[test]
fn bits_flag_scales_by_log2_k() {
    let f = Fixture::new();
    f.write("u3.dist", "K 3\na 0.5\nb 0.25\nc 0.25\n");
    let plain = kv(&f.run(&["entropy", "--dist", "u3.dist"]));
    let bits = kv(&f.run(&["entropy", "--dist", "u3.dist", "--bits"]));
    assert!((num(&bits, "entropy") - 1.5).abs() < 1e-12);
    assert!((num(&bits, "entropy") - num(&plain, "entropy") * 3f64.log2()).abs() < 1e-12);
    assert_eq!(bits["units"], "bits");
}

#[test]
fn build_encode_decode_round_trip() {
    let f = Fixture::new();
    let code = [
        "--dist",
        "bern.dist",
        "--cost",
        "golden.cost",
        "--epsilon",
        "0.1",
        "--n",
        "3",
    ];
    let mut args = vec!["build-code"];
    args.extend(code);
    args.extend(["--out", "code.txt"]);
    let o = f.run(&args);
    ok(&o);
    let dump = std::fs::read_to_string(f.path("code.txt")).unwrap();
    let mut lines = dump.lines();
    let header: Vec<&str> = lines.next().unwrap().split_whitespace().collect();
    assert_eq!(header[0], "escape");
    assert_eq!(header[1], "2");
    let mut members = 0;
    for line in lines {
        let parts: Vec<&str> = line.split_whitespace().collect();
        let (sym, word) = (parts[0], parts[1]);
        let mut enc = vec!["encode"];
        enc.extend(code);
        enc.extend(["--symbol", sym]);
        let e = kv(&f.run(&enc));
        assert_eq!(e["word"], word);
        assert_eq!(e["member"], "true");
        let mut dec = vec!["decode"];
        dec.extend(code);
        dec.extend(["--word", word]);
        let d = kv(&f.run(&dec));
        assert_eq!(d["symbol"], sym);
        assert_eq!(d["escape"], "false");
        members += 1;
    }
    assert_eq!(kv(&o)["members"], members.to_string());
    // an excluded block gets the escape word
    let mut enc = vec!["encode"];
    enc.extend(code);
    enc.extend(["--symbol", "111"]);
    let e = kv(&f.run(&enc));
    assert_eq!(e["word"], "2");
    assert_eq!(e["member"], "false");
}

#[test]
fn decode_rejects_non_codeword() {
    let f = Fixture::new();
    let o = f.run(&[
        "decode",
        "--dist",
        "u4.dist",
        "--cost",
        "unit.cost",
        "--epsilon",
        "0",
        "--word",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn transcode_keeps_dominant_set() {
    let f = Fixture::new();
    let o = f.run(&[
        "transcode",
        "--dist",
        "bern.dist",
        "--cost",
        "golden.cost",
        "--to-cost",
        "unit.cost",
        "--epsilon",
        "0.1",
        "--n",
        "2",
    ]);
    ok(&o);
    let m = kv(&o);
    assert_eq!(m["dominant_preserved"], "true");
    assert_eq!(m["guarantee"], "true");
    assert_eq!(num(&m, "alpha_c_to"), 1.0);
}

#[test]
fn relation_check_holds_across_costs() {
    let f = Fixture::new();
    let o = f.run(&[
        "relation-check",
        "--dist",
        "bern.dist",
        "--cost",
        "golden.cost",
        "--cost2",
        "unit.cost",
        "--epsilon",
        "0.1",
    ]);
    ok(&o);
    let m = kv(&o);
    assert_eq!(m["holds"], "true");
    assert!(num(&m, "first_order_diff").abs() < 1e-9);
}

#[test]
fn second_order_is_negative_with_sequence() {
    let f = Fixture::new();
    let o = f.run(&[
        "second-order",
        "--dist",
        "bern.dist",
        "--cost",
        "unit.cost",
        "--epsilon",
        "0.1",
        "--n-max",
        "4",
    ]);
    ok(&o);
    let m = kv(&o);
    assert!(num(&m, "second_order") < 0.0);
    for n in 1..=4 {
        assert!(m.contains_key(&format!("second_order[{n}]")));
    }
}

#[test]
fn rate_seq_and_appendix_report_emit_indexed_keys() {
    let f = Fixture::new();
    let o = f.run(&[
        "rate-seq",
        "--dist",
        "bern.dist",
        "--cost",
        "golden.cost",
        "--delta",
        "0.1",
        "--n-max",
        "3",
    ]);
    ok(&o);
    let m = kv(&o);
    for key in ["h_rate[3]", "g_rate[3]", "h_cost_rate[1]", "g_cost_rate[2]"] {
        assert!(m.contains_key(key), "{key}");
    }
    let o = f.run(&[
        "appendix-report",
        "--dist",
        "bern.dist",
        "--delta",
        "0.1",
        "--n-max",
        "3",
    ]);
    ok(&o);
    let m = kv(&o);
    // target is (1 - delta) H
    assert!((num(&m, "target") - 0.9 * num(&m, "entropy")).abs() < 1e-12);
    assert!(m.contains_key("rate[3]"));
}

#[test]
fn sandwich_test_is_deterministic() {
    let f = Fixture::new();
    let a = f.run(&["sandwich-test", "--seed", "7", "--trials", "20"]);
    let b = f.run(&["sandwich-test", "--seed", "7", "--trials", "20"]);
    ok(&a);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(kv(&a)["violations"], "0");
    let c = f.run(&["sandwich-test", "--seed", "8", "--trials", "20"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn sandwich_test_requires_seed() {
    let f = Fixture::new();
    let o = f.run(&["sandwich-test", "--trials", "3"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let f = Fixture::new();
    let args = [
        "bounds",
        "--dist",
        "bern.dist",
        "--cost",
        "golden.cost",
        "--epsilon",
        "0.2",
        "--n",
        "8",
    ];
    assert_eq!(f.run(&args).stdout, f.run(&args).stdout);
}

#[test]
fn table_mode_is_opt_in() {
    let f = Fixture::new();
    let args = [
        "appendix-report",
        "--dist",
        "bern.dist",
        "--delta",
        "0.1",
        "--n-max",
        "2",
    ];
    let plain = stdout(&f.run(&args));
    assert!(plain.lines().all(|l| l.contains('=')));
    let mut t = args.to_vec();
    t.push("--table");
    let table = stdout(&f.run(&t));
    assert!(!table.contains('='));
    assert!(table
        .lines()
        .any(|l| l.split_whitespace().eq(["n", "rate"])));
}

#[test]
fn parse_errors_name_the_line() {
    let f = Fixture::new();
    f.write("bad.dist", "K 2\na 0.5\nb half\n");
    let o = f.run(&["entropy", "--dist", "bad.dist"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));

    f.write("bad.cost", "K 2 depth 0\n- 1 1\n- 3 1\n");
    let o = f.run(&["alpha", "--cost", "bad.cost"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn invalid_flags_exit_one() {
    let f = Fixture::new();
    let o = f.run(&[
        "smooth",
        "--dist",
        "u4.dist",
        "--delta",
        "1.5",
        "--quantity",
        "G",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let o = f.run(&["entropy", "--dist", "u4.dist", "--n", "0"]);
    assert_eq!(o.status.code(), Some(1));
    let o = f.run(&["no-such-command"]);
    assert_eq!(o.status.code(), Some(1));
    let o = f.run(&["entropy", "--dist", "missing.dist"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn non_regular_cost_fails_validation() {
    let f = Fixture::new();
    // context 1 has root 1 (unit costs), context 2 has a smaller root
    f.write(
        "mixed.cost",
        "K 2 depth 1\n- 1 1\n- 2 1\n1 1 1\n1 2 1\n2 1 1\n2 2 2\n",
    );
    let o = f.run(&["validate-cost", "--cost", "mixed.cost"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(kv(&o)["regular"], "false");
    assert!(kv(&o).contains_key("root[1]"));
    let o = f.run(&["validate-cost", "--cost", "golden.cost"]);
    ok(&o);
    assert_eq!(kv(&o)["regular"], "true");
}

#[test]
fn oversized_instances_exit_two() {
    let f = Fixture::new();
    let o = f.run(&[
        "bounds",
        "--dist",
        "bern.dist",
        "--cost",
        "unit.cost",
        "--epsilon",
        "0.1",
        "--n",
        "40",
    ]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    // brute force refuses 64 blocks
    let o = f.run(&[
        "smooth",
        "--dist",
        "bern.dist",
        "--n",
        "6",
        "--delta",
        "0.1",
        "--quantity",
        "G",
        "--method",
        "brute",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn mismatched_alphabet_is_rejected() {
    let f = Fixture::new();
    f.write("t.cost", "K 3 depth 0\n- 1 1\n- 2 1\n- 3 1\n");
    let o = f.run(&[
        "bounds",
        "--dist",
        "u4.dist",
        "--cost",
        "t.cost",
        "--epsilon",
        "0.1",
    ]);
    assert_eq!(o.status.code(), Some(1));
}
