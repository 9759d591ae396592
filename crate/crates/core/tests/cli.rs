use std::io::Write;
use std::process::Command;

use serde_json::Value;

fn qfib(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_qfib")).args(args).output().expect("run qfib");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn json(args: &[&str]) -> Value {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let (code, out, err) = qfib(&full);
    assert_eq!(code, 0, "{err}");
    serde_json::from_str(&out).unwrap_or_else(|e| panic!("{e}: {out}"))
}

fn config(body: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(body.as_bytes()).unwrap();
    f
}

#[test]
fn list_families() {
    let (code, out, _) = qfib(&["list"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 16, "header plus 15 rows");
    let v = json(&["list"]);
    assert_eq!(v.as_array().unwrap().len(), 15);
    assert_eq!(v[1]["name"], "pell");
    assert_eq!(v[1]["c"], serde_json::json!(["0", "2"]));
    assert!(v[0]["b"].is_null());
    assert_eq!(json(&["list", "--kind", "lucas"]).as_array().unwrap().len(), 8);
    let (_, text, _) = qfib(&["list", "--kind", "fibonacci"]);
    assert_eq!(text.lines().count(), 8);
}

#[test]
fn generate_terms() {
    let (code, out, _) = qfib(&["gen", "--family", "fibonacci", "--from", "1", "--to", "5"]);
    assert_eq!(code, 0);
    assert_eq!(out, "1: 1\n2: x\n3: x^2 + 1\n4: x^3 + 2*x\n5: x^4 + 3*x^2 + 1\n");
    assert_eq!(qfib(&["gen", "--family", "fibonacci", "--from", "0", "--to", "0"]).1, "0: 0\n");
    assert_eq!(qfib(&["gen", "--family", "pell", "--from", "4", "--to", "4"]).1, "4: 8*x^3 + 4*x\n");
    let iter = qfib(&["gen", "--family", "vieta-lucas", "--from", "0", "--to", "12", "--method", "iter"]);
    let mat = qfib(&["gen", "--family", "vieta-lucas", "--from", "0", "--to", "12", "--method", "matpow"]);
    assert_eq!(iter, mat);
    let v = json(&["gen", "--family", "pell", "--from", "4", "--to", "4"]);
    assert_eq!(v["terms"][0]["term"], serde_json::json!(["0", "4", "0", "8"]));
    assert_eq!(v["method"], "iter");
    assert_eq!(json(&["gen", "--family", "pell", "--from", "70", "--to", "70"])["method"], "matpow");
}

#[test]
fn evaluate() {
    assert_eq!(qfib(&["eval", "--family", "fibonacci", "--n", "5", "--at", "1"]).1, "5\n");
    assert_eq!(qfib(&["eval", "--family", "pell", "--n", "0", "--at", "7/3"]).1, "0\n");
    assert_eq!(qfib(&["eval", "--family", "jacobsthal-lucas", "--n", "2", "--at", "1/2"]).1, "2\n");
    for method in ["symbolic", "matpow", "both"] {
        let (code, out, _) = qfib(&["eval", "--family", "fermat", "--n", "9", "--at", "-2/3", "--method", method]);
        assert_eq!(code, 0);
        // by hand at -2/3 (c = -2, d = -2): 0, 1, -2, 2, 0, -4, 8, -8, 0, 16
        assert_eq!(out, "16\n");
    }
    let v = json(&["eval", "--family", "lucas", "--n", "10", "--at", "1"]);
    assert_eq!(v["value"], "123");
    let (code, _, err) = qfib(&["eval", "--family", "lucas", "--n", "3", "--at", "1/0"]);
    assert_eq!(code, 2);
    assert!(err.contains("--at"), "{err}");
}

#[test]
fn q_powers() {
    assert_eq!(qfib(&["qpow", "--family", "pell", "--n", "1"]).1, "[[2*x, 1], [1, 0]]\n");
    assert_eq!(qfib(&["qpow", "--family", "fibonacci", "--n", "0"]).1, "[[1, 0], [0, 1]]\n");
    assert_eq!(qfib(&["qpow", "--family", "fibonacci", "--n", "2"]).1, "[[x^2 + 1, x], [x, 1]]\n");
    let v = json(&["qpow", "--family", "fibonacci", "--n", "2"]);
    assert_eq!(v["matrix"][0][0], serde_json::json!(["1", "0", "1"]));
    assert_eq!(v["matrix"][1][1], serde_json::json!(["1"]));
}

#[test]
fn check_selected_identity() {
    let (code, out, _) = qfib(&["check", "--identity", "fib_cassini", "--family", "jacobsthal", "--max-n", "10"]);
    assert_eq!(code, 0);
    assert!(out.contains("PASS"));
    assert!(out.contains("(-2*x)^(n-1)"));
    let v = json(&["check", "--identity", "LUCAS_CASSINI", "--family", "pell-lucas", "--max-n", "20"]);
    let r = &v["reports"][0];
    assert_eq!(r["identity"], "LUCAS_CASSINI");
    assert_eq!(r["status"], "PASS");
    assert_eq!(r["range"]["n"], serde_json::json!([0, 20]));
    assert!(r["counterexample"].is_null());
    let skipped = json(&["check", "--identity", "fib_docagne", "--family", "lucas", "--max-n", "3"]);
    assert_eq!(skipped["reports"][0]["status"], "SKIPPED");
    assert!(skipped["reports"][0]["reason"].is_string());
}

#[test]
fn check_rejects_unknown_identity() {
    let (code, out, err) = qfib(&["check", "--identity", "catalan"]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    for id in ["fib_matrix", "q_square", "mixed_docagne"] {
        assert!(err.contains(id), "{err}");
    }
}

#[test]
fn check_all_is_deterministic() {
    let args = ["--format", "json", "check", "--all", "--max-n", "8", "--max-m", "8", "--max-p", "3"];
    let (code, a, _) = qfib(&args);
    let (_, b, _) = qfib(&args);
    assert_eq!(code, 0);
    assert_eq!(a, b);
    let v: Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["reports"].as_array().unwrap().len(), 240);
    assert_eq!(v["summary"]["fail"], 0);
    assert_eq!(v["bounds"]["max_n"], 8);
}

#[test]
fn text_and_json_agree() {
    let base = ["check", "--family", "jacobsthal-lucas", "--max-n", "6", "--max-m", "6", "--max-p", "2"];
    let (_, text, _) = qfib(&base);
    let v = json(&base);
    let reports = v["reports"].as_array().unwrap();
    let rows: Vec<&str> = text.lines().skip(1).take(reports.len()).collect();
    for (row, r) in rows.iter().zip(reports) {
        let cells: Vec<&str> = row.split_whitespace().collect();
        assert_eq!(cells[0], r["family"]);
        assert_eq!(cells[1], r["identity"]);
        assert_eq!(cells[2], r["status"]);
    }
    let s = &v["summary"];
    assert!(text.ends_with(&format!("{} PASS, {} FAIL, {} SKIPPED\n", s["pass"], s["fail"], s["skipped"])));
}

#[test]
fn experimental_p_zero() {
    let v = json(&["check", "--identity", "fib_binomial", "--family", "pell", "--max-n", "6", "--max-p", "2", "--experimental-p-zero"]);
    assert_eq!(v["reports"][0]["range"]["p"], serde_json::json!([0, 2]));
    assert_eq!(v["reports"][0]["status"], "PASS");
    let v = json(&["check", "--identity", "fib_binomial", "--family", "pell", "--max-n", "6", "--max-p", "2"]);
    assert_eq!(v["reports"][0]["range"]["p"], serde_json::json!([1, 2]));
}

#[test]
fn custom_families_from_config() {
    let f = config(
        r#"[{"name": "mine", "kind": "lucas", "a": "1/2", "b": "x - 3", "c": "2*x + 1", "d": "-x^2"}]"#,
    );
    let path = f.path().to_str().unwrap();
    let (code, out, err) = qfib(&["--config", path, "gen", "--family", "mine", "--from", "0", "--to", "2"]);
    assert_eq!(code, 0, "{err}");
    // L_2 = (2x + 1)(x - 3) - x^2/2
    assert_eq!(out, "0: 1/2\n1: x - 3\n2: 3/2*x^2 - 5*x - 3\n");
    assert_eq!(json(&["--config", path, "list"]).as_array().unwrap().len(), 16);
    let (code, out, _) = qfib(&["--config", path, "check", "--family", "mine", "--max-n", "8", "--max-m", "8", "--max-p", "2"]);
    assert_eq!(code, 0, "{out}");
}

#[test]
fn config_errors_exit_two() {
    let zero_d = config(r#"[{"name": "bad-family", "kind": "fibonacci", "a": "1", "c": "x", "d": "0"}]"#);
    let (code, out, err) = qfib(&["--config", zero_d.path().to_str().unwrap(), "check", "--all"]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert!(err.contains("bad-family") && err.contains("config error"), "{err}");

    let clash = config(r#"[{"name": "pell", "kind": "fibonacci", "a": "1", "c": "x", "d": "1"}]"#);
    assert_eq!(qfib(&["--config", clash.path().to_str().unwrap(), "list"]).0, 2);

    let syntax = config("[{");
    let (code, _, err) = qfib(&["--config", syntax.path().to_str().unwrap(), "list"]);
    assert_eq!(code, 2);
    assert!(err.contains("line 1"), "{err}");

    assert_eq!(qfib(&["--config", "/nonexistent/families.json", "list"]).0, 2);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(qfib(&["gen", "--family", "nope", "--from", "0", "--to", "1"]).0, 2);
    let (code, _, err) = qfib(&["gen", "--family", "pell", "--from", "5", "--to", "4"]);
    assert_eq!(code, 2);
    assert!(err.contains("bad range"), "{err}");
    assert_eq!(qfib(&["bench", "--family", "pell", "--n", "0", "--at", "1"]).0, 2);
    assert_eq!(qfib(&["frobnicate"]).0, 2);
    assert_eq!(qfib(&["--format", "yaml", "list"]).0, 2);
    let (code, out, _) = qfib(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("check"));
}

#[test]
fn bench_reports_counts() {
    let (code, out, _) = qfib(&["bench", "--family", "pell", "--n", "1", "--at", "0"]);
    assert_eq!(code, 0);
    assert!(out.contains("agree=true"));
    let v = json(&["bench", "--family", "fermat", "--n", "50000", "--at", "2"]);
    assert_eq!(v["agree"], true);
    let iter = v["iter"]["bigint_muls"].as_u64().unwrap();
    let mat = v["matpow"]["bigint_muls"].as_u64().unwrap();
    assert!(mat < iter, "{mat} vs {iter}");
    assert!(v["matpow"]["matrix_products"].as_u64() <= v["matpow"]["matrix_product_bound"].as_u64());
}
