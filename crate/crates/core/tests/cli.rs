use std::process::Command;

use serde_json::Value;

fn bin(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_coherent-amp"))
        .args(args)
        .env_remove("COHERENT_AMP_SEED")
        .env_remove("COHERENT_AMP_PRECISION")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = bin(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn optimize_golden_values() {
    let doc = json(&["optimize", "--n", "4", "--alpha", "2", "--beta", "2.3", "--mode", "both", "--precision", "6"]);
    assert_eq!(doc["p_up"].as_f64(), Some(0.980248));
    assert_eq!(doc["p_leakless"].as_f64(), Some(0.977298));
    assert_eq!(doc["p_leaky"].as_f64(), Some(0.978604));
    assert_eq!(doc["leaky_plan"]["mode"], "leaky");
}

#[test]
fn spectrum_golden_values() {
    let doc = json(&["spectrum", "--n", "4", "--alpha", "2", "--precision", "6"]);
    let got: Vec<f64> = doc["spectrum"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert_eq!(got, vec![0.976392, 0.971942, 1.02428, 1.02739]);
}

#[test]
fn reproduce_passes() {
    let doc = json(&["reproduce", "--samples", "200"]);
    assert_eq!(doc["all_pass"], Value::Bool(true));
    assert_eq!(doc["lemma1"]["saturates"], Value::Bool(false));
    assert_eq!(doc["checks"].as_array().unwrap().len(), 5);
}

#[test]
fn leakless_mode_omits_leaky_fields() {
    let doc = json(&["optimize", "--n", "3", "--alpha", "0.4", "--beta", "0.7", "--mode", "leakless"]);
    assert!(doc.get("p_leakless").is_some());
    assert!(doc.get("p_leaky").is_none());
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["optimize", "--n", "4", "--alpha", "2"][..],
        &["bound", "--n", "4", "--alpha", "2", "--beta", "1"],
        &["verify", "--n", "4"],
        &["spectrum", "--n", "4", "--alpha", "2", "--format", "xml"],
        &["launch"],
    ] {
        let out = bin(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty());
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn simulate_is_deterministic() {
    let args = ["simulate", "--n", "4", "--alpha", "1", "--trials", "20000", "--seed", "3", "--shards", "4"];
    let a = bin(&args);
    let b = bin(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let doc: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(doc["scenario"]["kind"], "usd-multiport");
    assert_eq!(doc["wrong_count"], 0);
    assert_eq!(doc["rng"], "ChaCha8Rng");
}

#[test]
fn seed_from_environment() {
    let args = ["simulate", "--n", "2", "--alpha", "0.6", "--trials", "5000"];
    let with_env = Command::new(env!("CARGO_BIN_EXE_coherent-amp"))
        .args(args)
        .env("COHERENT_AMP_SEED", "17")
        .output()
        .unwrap();
    let with_flag = bin(&[&args[..], &["--seed", "17"]].concat());
    assert_eq!(with_env.stdout, with_flag.stdout);
    let doc: Value = serde_json::from_slice(&with_env.stdout).unwrap();
    assert_eq!(doc["seed"], 17);
}

#[test]
fn precision_round_trips() {
    for precision in [3usize, 8, 15] {
        let p = precision.to_string();
        let doc = json(&["bound", "--n", "5", "--alpha", "0.9", "--beta", "1.3", "--precision", &p]);
        let text = doc["p_up"].to_string();
        let digits = text.trim_start_matches("0.").trim_start_matches('0').len();
        assert!(digits <= precision, "{text} has more than {precision} digits");
    }
}

#[test]
fn csv_has_header_and_quoting() {
    let out = bin(&["verify", "--n", "3", "--property", "2", "--alpha", "0.3", "--beta", "0.6", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(reader.headers().unwrap(), vec!["field", "value"]);
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert!(rows.iter().any(|r| &r[0] == "holds" && &r[1] == "true"));
}
