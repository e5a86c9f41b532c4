use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use strictmod::{machine_block, run, Outcome};

fn strictmod(args: &[&str]) -> Outcome {
    let mut v = vec!["strictmod"];
    v.extend_from_slice(args);
    run(v)
}

fn fixture(name: &str) -> String {
    format!("tests/fixtures/{name}.json")
}

fn machine(o: &Outcome) -> Value {
    machine_block(&o.stdout).unwrap_or_else(|| panic!("no machine block in:\n{}{}", o.stdout, o.stderr))
}

#[test]
fn validate_mu_pi_gives_minus_one() {
    let o = strictmod(&["validate", &fixture("mu_pi1_q3_e1")]);
    assert_eq!(o.code, 0, "{}", o.stdout);
    let m = machine(&o);
    assert_eq!(m["result"]["valid"], json!(true));
    // -1 in F_3 is 2.
    assert_eq!(m["result"]["B"][0][0]["terms"], json!([[0, [2]]]));
    let o = strictmod(&["validate", &fixture("mu_pi1_q2_e1")]);
    assert_eq!(machine(&o)["result"]["B"][0][0]["terms"], json!([[0, [1]]]));
}

#[test]
fn roundtrip_rank_two_over_f2() {
    let o = strictmod(&["roundtrip", &fixture("jordan_q2_e1")]);
    assert_eq!(o.code, 0, "{}", o.stdout);
    let m = machine(&o);
    assert_eq!(m["result"]["kernel_dim"], json!(2));
    assert_eq!(m["result"]["W"].as_array().map(Vec::len), Some(2));
    assert!(m["result"]["C_rec"].is_array());
}

#[test]
fn bound_example() {
    let o = strictmod(&["bound", "e=1", "N=1", "q=3", "--break", "0"]);
    assert_eq!(o.code, 0, "{}", o.stdout);
    assert_eq!(machine(&o)["result"]["bound"], json!("1/2"));
    let o = strictmod(&["bound", "e=2", "N=3", "q=2", "--break", "9"]);
    assert_eq!(machine(&o)["result"]["bound"], json!("7"));
    assert_eq!(o.code, 1);
}

#[test]
fn exit_codes() {
    assert_eq!(strictmod(&["validate", &fixture("mu_pi1_q2_e1")]).code, 0);
    assert_eq!(strictmod(&["validate", &fixture("mu_pi2_q2_e1")]).code, 1);
    assert_eq!(strictmod(&["points", &fixture("semilinear_q2_e1")]).code, 1);
    assert_eq!(strictmod(&["validate", "tests/fixtures/missing.json"]).code, 2);
    assert_eq!(strictmod(&["frobnicate"]).code, 2);
    assert_eq!(strictmod(&["validate", &fixture("mu_pi1_q2_e1"), "--prec", "1"]).code, 2);
    assert_eq!(strictmod(&["bound", "e=1", "q=3"]).code, 2);
    assert_eq!(strictmod(&["--help"]).code, 0);
}

#[test]
fn parse_errors_carry_line_and_column() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\n  \"p\": 2,\n  \"C\": [[\"pi\"]\n}\n").unwrap();
    let o = strictmod(&["validate", bad.to_str().unwrap()]);
    assert_eq!(o.code, 2);
    assert!(o.stderr.contains("line 4"), "{}", o.stderr);

    let bad = dir.path().join("entry.json");
    fs::write(&bad, r#"{"p": 2, "N0": 1, "e": 1, "C": [["pi", "pi^"]], "D": [["0", "0"]]}"#).unwrap();
    let o = strictmod(&["validate", bad.to_str().unwrap()]);
    assert_eq!(o.code, 2);
    assert!(o.stderr.contains("C[0]"), "{}", o.stderr);
}

#[test]
fn out_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.txt");
    let o = strictmod(&["validate", &fixture("diag_11_q3_e1"), "--out", out.to_str().unwrap()]);
    assert_eq!(o.code, 0);
    assert!(o.stdout.is_empty());
    let written = fs::read_to_string(&out).unwrap();
    let direct = strictmod(&["validate", &fixture("diag_11_q3_e1")]);
    assert_eq!(written, direct.stdout);
}

#[test]
fn precision_flag_wins_over_file() {
    let o = strictmod(&["validate", &fixture("mu_pi1_q2_e1"), "--prec", "7"]);
    assert_eq!(machine(&o)["prec"], json!(7));
}

#[test]
fn sh_reports_why_no_flavor_applies() {
    let o = strictmod(&["sh", &fixture("jordan_q2_e1")]);
    assert_eq!(o.code, 1);
    assert!(o.stdout.contains("D = 0"), "{}", o.stdout);
    let o = strictmod(&["sh", &fixture("mu_pi1_q3_e2")]);
    assert_eq!(o.code, 0, "{}", o.stdout);
    let m = machine(&o);
    assert!(m["result"]["objects"]["sh_general"].is_object(), "{m}");
}

#[test]
fn wild_fixtures_need_a_bigger_tower() {
    for name in ["ext_pi1_q3_e2", "ext_pi2_q3_e2"] {
        let o = strictmod(&["points", &fixture(name)]);
        assert_eq!(o.code, 1);
        let err = machine(&o)["error"].as_str().unwrap_or_default().to_string();
        assert!(err.contains("tower insufficient"), "{err}");
    }
}

#[test]
fn character_reports_realized_exponents() {
    let o = strictmod(&["character", &fixture("cycle_012_q3_e2")]);
    assert_eq!(o.code, 0, "{}", o.stdout);
    let r = &machine(&o)["result"];
    assert_eq!(r["exponent"], json!(21));
    assert_eq!(r["realized"], json!([5, 15, 19]));
    assert_eq!(r["exponent_realized"], json!(false));
}

// Golden machine blocks. Set STRICTMOD_BLESS=1 to rewrite them.

const GOLDEN: &[(&str, &str)] = &[
    ("validate", "mu_pi1_q3_e1"),
    ("validate", "mu_pi3_q2_e2"),
    ("validate", "unipotent3_q2_e1"),
    ("validate", "pi0_twisted_q3_e1"),
    ("validate", "jordan_q4_e1"),
    ("roundtrip", "jordan_q2_e1"),
    ("roundtrip", "diag_10_q4_e1"),
    ("points", "mu_pi1_q3_e1"),
    ("points", "diag_11_q3_e1"),
    ("character", "cycle_10_q2_e1"),
    ("character", "cycle_100_q2_e1"),
    ("gap", "mu_pi2_q3_e2"),
    ("divisible", "mu_pi1_q2_e1"),
    ("embed", "jordan_q2_e1"),
    ("sh", "mu_pi1_q2_e1"),
    ("sh", "diag3_q3_e2"),
];

fn golden_path(cmd: &str, name: &str) -> PathBuf {
    Path::new("tests/golden").join(format!("{cmd}_{name}.json"))
}

#[test]
fn golden_machine_blocks() {
    let bless = std::env::var_os("STRICTMOD_BLESS").is_some();
    let mut mismatches = Vec::new();
    for &(cmd, name) in GOLDEN {
        let o = strictmod(&[cmd, &fixture(name)]);
        let got = machine(&o);
        let path = golden_path(cmd, name);
        if bless {
            fs::create_dir_all(path.parent().unwrap()).unwrap();
            fs::write(&path, serde_json::to_string_pretty(&got).unwrap() + "\n").unwrap();
            continue;
        }
        let want: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing {}", path.display())))
            .unwrap();
        if got != want {
            mismatches.push(path.display().to_string());
        }
    }
    assert!(mismatches.is_empty(), "machine blocks differ: {mismatches:?}");
}
