use std::process::{Command, Output};

use serde_json::Value;

fn taubound(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_taubound"))
        .args(args)
        .env_remove("TAUBOUND_DIGITS")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(out)))
}

fn golden(id: u8) -> String {
    format!("{}/../../goldens/table{id}.csv", env!("CARGO_MANIFEST_DIR"))
}

/// Leading numeric part of a truncated value.
fn value_f64(s: &str) -> f64 {
    s.trim().trim_end_matches('…').parse().unwrap()
}

#[test]
fn compute_lambda_matches_f64_formula() {
    let out = taubound(&["compute", "lambda", "720*n7"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.trim_end().ends_with('…'), "{text}");
    // 720·n_7 = 2^5·3^3·5^2·7·11·13·17: τ = 6·4·3·2^4 = 1152, k = 7.
    let log_n = 5.0 * 2f64.ln() + 3.0 * 3f64.ln() + 2.0 * 5f64.ln() + [7f64, 11.0, 13.0, 17.0].iter().map(|p| p.ln()).sum::<f64>();
    let oracle = (1152f64.powf(1.0 / 7.0) - 1.0) * 7.0 * 7f64.ln() / log_n;
    assert!((value_f64(&text) - oracle).abs() < 1e-12, "{text} vs {oracle}");
    assert!(text.starts_with("1.1999953"));
}

#[test]
fn compute_eta2_and_tau() {
    let out = taubound(&["compute", "eta2"]);
    assert!(stdout(&out).starts_with("2.0907132"));
    let out = taubound(&["compute", "tau", "2^5*3^3*5^2*7*11*13*17*19"]);
    assert_eq!(code(&out), 0);
    let oracle: u32 = [5, 3, 2, 1, 1, 1, 1, 1].iter().map(|a| a + 1).product();
    assert_eq!(stdout(&out).trim(), oracle.to_string());
}

#[test]
fn compute_json_carries_digits() {
    let out = taubound(&["--json", "--digits", "50", "compute", "r", "60060"]);
    let v = json(&out);
    assert_eq!(v["function"], "r");
    assert_eq!(v["digits"], 50);
    assert_eq!(v["exact"], false);
    assert!(v["value"].as_str().unwrap().starts_with("0.737505"));
}

#[test]
fn compute_usage_errors() {
    assert_eq!(code(&taubound(&["compute", "sigma", "6"])), 4);
    assert_eq!(code(&taubound(&["compute", "tau", "2^x"])), 4);
    assert_eq!(code(&taubound(&["compute", "tau"])), 4);
    assert_eq!(code(&taubound(&["compute", "lambda", "8"])), 4);
    assert_eq!(code(&taubound(&["verify", "6"])), 4);
    assert_eq!(code(&taubound(&["verify", "1", "--j", "2"])), 4);
    assert_eq!(code(&taubound(&["verify", "5", "--stage", "nope"])), 4);
    assert_eq!(code(&taubound(&["table", "11"])), 4);
}

#[test]
fn verify_1_names_60060() {
    let out = taubound(&["--json", "verify", "1"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["status"], "confirmed");
    let w = &v["witnesses"][0]["factorization"];
    let primes = [2u64, 3, 5, 7, 11, 13];
    let n: u64 = w["idx"]
        .as_array()
        .unwrap()
        .iter()
        .zip(w["exp"].as_array().unwrap())
        .map(|(i, e)| primes[i.as_u64().unwrap() as usize - 1].pow(e.as_u64().unwrap() as u32))
        .product();
    assert_eq!(n, 60060);
}

#[test]
fn report_json_round_trips() {
    let out = taubound(&["--json", "verify", "2"]);
    assert_eq!(code(&out), 0);
    let first = json(&out);
    let rep: taubound::search::VerificationReport = serde_json::from_value(first.clone()).unwrap();
    let second = serde_json::to_value(&rep).unwrap();
    assert_eq!(first, second);
}

#[test]
fn digits_do_not_change_decisions() {
    let decisions = |d: &str| {
        let v = json(&taubound(&["--json", "--digits", d, "verify", "3"]));
        let checks: Vec<(String, bool)> = v["checks"]
            .as_array()
            .unwrap()
            .iter()
            .map(|c| (c["name"].as_str().unwrap().to_string(), c["passed"].as_bool().unwrap()))
            .collect();
        (v["status"].clone(), checks)
    };
    assert_eq!(decisions("50"), decisions("60"));
    assert_eq!(decisions("60"), decisions("90"));
    let a = stdout(&taubound(&["--digits", "50", "compute", "eta3"]));
    let b = stdout(&taubound(&["--digits", "90", "compute", "eta3"]));
    assert_eq!(a[..30], b[..30]);
}

#[test]
fn verify_4_stage_1_reproduces_table_3() {
    let out = taubound(&["--json", "verify", "4", "--stage", "1"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["status"], "confirmed");
}

#[test]
fn verify_5_tables_first_interval() {
    let out = taubound(&["verify", "5", "--stage", "tables", "--j", "1"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).contains("table 6"));
}

#[test]
fn verify_5_full_scan_is_partial_without_flag() {
    let out = taubound(&["--json", "verify", "5", "--stage", "type1"]);
    assert_eq!(code(&out), 3);
    assert_eq!(json(&out)["status"], "partial");
}

#[test]
fn checkpoint_resume_skips_finished_boxes() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("final.ndjson");
    let log_s = log.to_str().unwrap();
    let args = ["--json", "verify", "5", "--stage", "final", "--j", "1", "--bucket", "1", "--checkpoint", log_s];
    let first = taubound(&args);
    assert_eq!(code(&first), 0);
    let lines = std::fs::read_to_string(&log).unwrap().lines().count();
    assert!(lines > 0);
    let second = taubound(&args);
    assert_eq!(code(&second), 0);
    assert_eq!(std::fs::read_to_string(&log).unwrap().lines().count(), lines);
    assert_eq!(json(&first)["exhaustion"], json(&second)["exhaustion"]);
}

#[test]
fn table_1_layout() {
    let out = taubound(&["table", "1", "--csv"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "k,4,5,6,7,8,9,10,11,12,13,14,15,16");
    assert_eq!(lines[1], "u_k,1,2,3,3,3,4,4,4,4,4,5,5,5");
}

#[test]
fn table_5_matrix() {
    let text = stdout(&taubound(&["table", "5"]));
    assert_eq!(text, "alpha,74,75,76\n4,11,11,10\n5,7,6,6\n6,4,4,4\n");
}

#[test]
fn tables_1_to_5_match_goldens() {
    for id in 1..=5u8 {
        let out = taubound(&["table", &id.to_string(), "--check", &golden(id)]);
        assert_eq!(code(&out), 0, "table {id}: {}", stdout(&out));
    }
}

#[test]
fn interval_tables_need_flag() {
    for id in 6..=10 {
        assert_eq!(code(&taubound(&["table", &id.to_string()])), 3);
    }
}

#[test]
fn table_10_first_row() {
    let out = taubound(&["table", "10", "--long-running", "--check", &golden(10)]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let text = stdout(&taubound(&["table", "10", "--long-running"]));
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[0], "1");
    assert!((row[1].parse::<f64>().unwrap() - 0.02422).abs() < 5e-4);
}

#[test]
fn golden_mismatch_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t1.csv");
    std::fs::write(&path, "k,4,5,6,7,8,9,10,11,12,13,14,15,16\nu_k,1,2,3,3,3,4,4,4,4,4,5,5,6\n").unwrap();
    let out = taubound(&["--json", "table", "1", "--check", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    let v = json(&out);
    assert_eq!(v["matches"], false);
    assert_eq!(v["differences"].as_array().unwrap().len(), 1);
}

#[test]
fn brute_suites() {
    for ineq in ["ramanujan", "jensen1", "inequality2"] {
        let out = taubound(&["--json", "brute", ineq, "--nmax", "1000000"]);
        assert_eq!(code(&out), 0, "{ineq}: {}", stdout(&out));
    }
    assert_eq!(code(&taubound(&["brute", "fond1", "--nmax", "20000000"])), 3);
    assert_eq!(code(&taubound(&["brute", "nope"])), 4);
}

#[test]
fn workers_flag() {
    assert_eq!(code(&taubound(&["--workers", "2", "verify", "1"])), 0);
    assert_eq!(code(&taubound(&["--workers", "0", "verify", "1"])), 4);
}

#[test]
fn digits_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_taubound"))
        .args(["--json", "compute", "eta2"])
        .env("TAUBOUND_DIGITS", "70")
        .output()
        .unwrap();
    assert_eq!(json(&out)["digits"], 70);
    assert_eq!(code(&taubound(&["--digits", "10", "compute", "eta2"])), 4);
}
