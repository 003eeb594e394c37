use std::io::Write as _;
use std::process::Command;

use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut argv = vec!["diamond-forests"];
    argv.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = diamond_forests_cli::run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn run_json(args: &[&str]) -> Value {
    let (code, out, err) = run(args);
    assert_eq!(code, 0, "stderr: {err}");
    serde_json::from_str(&out).unwrap()
}

fn schema() -> jsonschema::Validator {
    let text = include_str!("../schema/diamond-forests-1.schema.json");
    jsonschema::validator_for(&serde_json::from_str(text).unwrap()).unwrap()
}

fn assert_valid(doc: &Value) {
    let v = schema();
    let errors: Vec<String> = v.iter_errors(doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "schema errors: {errors:?}");
}

fn kernel_file(cells: usize, f: impl Fn(f64, f64) -> f64) -> tempfile::NamedTempFile {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "w,v,f").unwrap();
    let h = 1.0 / cells as f64;
    for j in 1..cells {
        for i in 0..j {
            let (w, v) = (i as f64 * h, j as f64 * h);
            writeln!(file, "{w},{v},{}", f(w, v)).unwrap();
        }
    }
    file
}

#[test]
fn expand_k5_coefficients() {
    let doc = run_json(&["expand", "--kind", "K", "--order", "5"]);
    assert_valid(&doc);
    let orders = doc["result"]["orders"].as_array().unwrap();
    assert_eq!(orders.len(), 5);
    let mut coeffs: Vec<&str> = orders[4]["forest"]["trees"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| t["coeff"].as_str().unwrap())
        .collect();
    coeffs.sort();
    assert_eq!(coeffs, vec!["1/2", "1/4", "1/8"]);
}

#[test]
fn expand_g_exponential_martingale_kill() {
    let doc = run_json(&["expand", "--kind", "G", "--order", "4", "--bind", "b=-a^2/2"]);
    assert_valid(&doc);
    assert_eq!(doc["result"]["all_zero"], Value::Bool(true));
    for o in doc["result"]["orders"].as_array().unwrap() {
        assert!(o["forest"]["trees"].as_array().unwrap().is_empty());
    }
}

#[test]
fn expand_spxg_martingality_kill() {
    let doc = run_json(&["expand", "--kind", "SPXG", "--order", "5", "--bind", "a=1,b=0,c=0"]);
    assert_eq!(doc["result"]["all_zero"], Value::Bool(true));
}

#[test]
fn levy_matches_closed_form() {
    let doc = run_json(&["levy", "--order", "20", "--T", "0.5"]);
    assert_valid(&doc);
    let r = &doc["result"];
    let closed = -(0.5f64).cos().ln();
    assert!((r["closed_form"].as_f64().unwrap() - closed).abs() < 1e-15);
    assert!((r["cgf_partial"].as_f64().unwrap() - closed).abs() < 1e-8);
    // −log cos 0.5 = 0.130584…
    assert!((r["cgf_partial"].as_f64().unwrap() - 0.130584).abs() < 1e-6);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["frobnicate"]).0, 2);
    assert_eq!(run(&["expand", "--kind", "K"]).0, 2);
    assert_eq!(run(&["expand", "--kind", "G", "--order", "3", "--bind", "z=1"]).0, 2);
    assert_eq!(run(&["levy", "--order", "20", "--T", "1.6"]).0, 3);
    assert_eq!(run(&["cameron-martin", "--lambda", "-1.5"]).0, 3);
    assert_eq!(run(&["verify", "nonsense"]).0, 2);
    let blow_up = run(&[
        "riccati", "--kernel", "exp", "--nu", "0.3", "--lambda", "1", "--rho", "-0.7", "--a", "0",
        "--b", "50", "--delta", "0.1", "--T", "50", "--steps", "512",
    ]);
    assert_eq!(blow_up.0, 3, "{}", blow_up.2);
    assert_eq!(run(&["--help"]).0, 0);
}

#[test]
fn malformed_csv_is_a_usage_error() {
    let mut bad = tempfile::NamedTempFile::new().unwrap();
    writeln!(bad, "w,v,f\n0,0.5,1\n0,0.5").unwrap();
    let path = bad.path().to_str().unwrap();
    let (code, _, err) = run(&["chaos2", "--kernel", path]);
    assert_eq!(code, 2, "{err}");
    assert_eq!(run(&["chaos2", "--kernel", "/nonexistent/kernel.csv"]).0, 2);
}

#[test]
fn chaos2_constant_kernel() {
    let file = kernel_file(200, |_, _| 1.0);
    let doc = run_json(&["chaos2", "--kernel", file.path().to_str().unwrap(), "--order", "3"]);
    assert_valid(&doc);
    assert_eq!(doc["result"]["cells"], 200);
    let c = doc["result"]["cumulants"].as_array().unwrap();
    // Left-point grid sum of ½: ½(1 − h).
    assert!((c[1]["value"].as_f64().unwrap() - 0.5 * (1.0 - 1.0 / 200.0)).abs() < 1e-12);
    assert!((c[2]["value"].as_f64().unwrap() - 1.0).abs() < 0.03);
}

#[test]
fn riccati_and_mgf() {
    let doc = run_json(&[
        "riccati", "--kernel", "exp", "--nu", "0.3", "--lambda", "1", "--rho", "-0.7", "--a",
        "0.25", "--b", "0.1", "--c", "0", "--delta", "0.1", "--T", "1", "--steps", "256",
    ]);
    assert_valid(&doc);
    let r = &doc["result"];
    assert_eq!(r["grid"].as_array().unwrap().len(), 257);
    assert_eq!(r["g"].as_array().unwrap().len(), 257);
    assert!(r["residual"].as_f64().unwrap() < 1e-10);
    let (m, lm) = (r["mgf"].as_f64().unwrap(), r["log_mgf"].as_f64().unwrap());
    assert!((m.ln() - lm).abs() < 1e-15);
    assert!(run(&["riccati", "--kernel", "power", "--nu", "0.3", "--rho", "0", "--a", "0", "--b", "0", "--delta", "0.1", "--T", "1"]).0 == 2);
}

#[test]
fn riccati_with_curve_file() {
    let mut curve = tempfile::NamedTempFile::new().unwrap();
    writeln!(curve, "u,xi\n0,0.04\n2,0.04").unwrap();
    let args = |extra: &[&str]| {
        let mut v = vec![
            "riccati", "--kernel", "power", "--nu", "0.3", "--alpha", "0.6", "--rho", "-0.7",
            "--a", "0.1", "--b", "0.05", "--c", "0.2", "--delta", "0.1", "--T", "1", "--steps",
            "128",
        ];
        v.extend_from_slice(extra);
        run_json(&v)["result"]["log_mgf"].as_f64().unwrap()
    };
    let from_file = args(&["--curve", curve.path().to_str().unwrap()]);
    let flat = args(&["--xi0", "0.04"]);
    assert!((from_file - flat).abs() < 1e-14);
}

#[test]
fn signature_ito_diamond() {
    let doc = run_json(&["signature", "--left", "∅", "--i", "1", "--right", "∅", "--j", "1"]);
    assert_valid(&doc);
    // (B¹ ⋄ B¹)_t(T) = T − t
    assert_eq!(doc["result"]["expression"], "1*(T-t)^1");
    let zero = run_json(&["signature", "--left", "1", "--i", "1", "--right", "1", "--j", "2"]);
    assert_eq!(zero["result"]["expression"], "0");
    assert_eq!(run(&["signature", "--left", "1", "--i", "0", "--right", "1", "--j", "1"]).0, 2);
}

#[test]
fn bessel_weights() {
    for w in ["terminal", "constant"] {
        let doc = run_json(&["bessel", "--delta", "1", "--lambda", "0.2", "--T", "1", "--weight", w]);
        assert_valid(&doc);
        assert!(doc["result"]["abs_diff"].as_f64().unwrap() < 1e-8, "{w}");
    }
}

#[test]
fn cameron_martin_report() {
    let doc = run_json(&["cameron-martin", "--order", "30", "--lambda", "0.5"]);
    assert_valid(&doc);
    let r = &doc["result"];
    assert_eq!(r["cgf_coefficients"][0]["coeff"], "-1/2");
    assert_eq!(r["cgf_coefficients"][1]["coeff"], "1/6");
    assert_eq!(r["cgf_coefficients"][2]["coeff"], "-4/45");
    assert!(r["abs_diff"].as_f64().unwrap() < 1e-9);
}

#[test]
fn mc_output_is_deterministic() {
    let args = [
        "mc", "--model", "heston", "--paths", "2000", "--steps", "20", "--seed", "11", "--mgf-a",
        "0.25", "--mgf-b", "0.1",
    ];
    let (c1, o1, _) = run(&args);
    let (c2, o2, _) = run(&args);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(o1, o2);
    let doc: Value = serde_json::from_str(&o1).unwrap();
    assert_valid(&doc);
    assert_eq!(doc["result"]["columns"], serde_json::json!(["X", "QV", "ZETA"]));
    assert!(doc["result"]["mgf"]["value"].as_f64().unwrap() > 0.0);
    let other = run(&[
        "mc", "--model", "heston", "--paths", "2000", "--steps", "20", "--seed", "12",
    ]);
    assert_ne!(o1, other.1);
}

#[test]
fn mc_models_run() {
    let file = kernel_file(16, |w, v| 1.0 + w * v);
    let kernel = file.path().to_str().unwrap().to_string();
    for extra in [
        vec!["--model", "bm-drift", "--sigma", "0.5"],
        vec!["--model", "levy-area"],
        vec!["--model", "besq", "--x0", "1", "--delta", "2"],
        vec!["--model", "stopped-bm", "--b0", "0.3"],
        vec!["--model", "chaos2", "--kernel", kernel.as_str(), "--steps", "16"],
    ] {
        let mut args = vec!["mc", "--paths", "500", "--steps", "10", "--orders", "6"];
        args.extend(extra);
        let doc = run_json(&args);
        assert_valid(&doc);
        assert_eq!(doc["result"]["methods"]["k6"], "bootstrap");
    }
    assert_eq!(run(&["mc", "--model", "levy-area", "--paths", "10"]).0, 2);
    assert_eq!(
        run(&["mc", "--model", "chaos2", "--kernel", &kernel, "--steps", "8", "--paths", "500"]).0,
        2
    );
}

#[test]
fn keys_sorted_and_config_echoed() {
    let (_, out, _) = run(&["levy", "--T", "0.3"]);
    let pos = |k: &str| out.find(&format!("\"{k}\"")).unwrap();
    assert!(pos("command") < pos("config") && pos("config") < pos("result") && pos("result") < pos("schema"));
    let doc: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["schema"], "diamond-forests/1");
    assert_eq!(doc["config"]["args"]["order"], 20);
    assert_eq!(doc["config"]["args"]["T"], 0.3);
}

#[test]
fn config_file_with_flag_override() {
    let mut cfg = tempfile::NamedTempFile::new().unwrap();
    writeln!(cfg, "# levy defaults\norder = 6\nT = 0.4\n").unwrap();
    let path = cfg.path().to_str().unwrap();
    let doc = run_json(&["--config", path, "levy", "--T", "0.2"]);
    assert_eq!(doc["config"]["args"]["order"], 6);
    assert_eq!(doc["config"]["args"]["T"], 0.2);
    assert_eq!(doc["config"]["config_file"], path);
    assert_eq!(doc["result"]["alpha"].as_array().unwrap().len(), 5);

    let mut bad = tempfile::NamedTempFile::new().unwrap();
    writeln!(bad, "bogus = 1").unwrap();
    assert_eq!(run(&["levy", "--config", bad.path().to_str().unwrap(), "--T", "0.2"]).0, 2);
}

#[test]
fn csv_and_text_outputs() {
    let (code, out, _) = run(&["expand", "--kind", "K", "--order", "3", "--output", "csv"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "order,shape,leaves,coeff");
    assert!(lines.contains(&"3,\"((Y,Y),Y)\",3,1/2"));
    let (code, out, _) = run(&["levy", "--T", "0.5", "--output", "text"]);
    assert_eq!(code, 0);
    assert!(out.contains("schema = diamond-forests/1"));
}

#[test]
fn verify_suites_pass() {
    for suite in ["reorder", "levy", "cameron-martin", "bessel", "chaos2", "heston-riccati"] {
        let doc = run_json(&["verify", suite]);
        assert_valid(&doc);
        assert_eq!(doc["result"]["pass"], Value::Bool(true), "{suite}: {doc}");
    }
    let doc = run_json(&["verify", "reorder", "--order", "6"]);
    for c in doc["result"]["checks"].as_array().unwrap() {
        assert_eq!(c["measured"], 0.0);
    }
}

#[test]
fn binary_exit_status() {
    let bin = env!("CARGO_BIN_EXE_diamond-forests");
    let ok = Command::new(bin).args(["levy", "--T", "0.5"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("diamond-forests/1"));
    let dom = Command::new(bin).args(["levy", "--T", "2"]).output().unwrap();
    assert_eq!(dom.status.code(), Some(3));
    let usage = Command::new(bin).arg("nope").output().unwrap();
    assert_eq!(usage.status.code(), Some(2));
}

#[test]
fn thread_count_does_not_change_results() {
    let bin = env!("CARGO_BIN_EXE_diamond-forests");
    let args = ["mc", "--model", "levy-area", "--paths", "3000", "--steps", "16", "--seed", "5"];
    let outs: Vec<Vec<u8>> = ["1", "3"]
        .iter()
        .map(|n| {
            let o = Command::new(bin)
                .env("DIAMOND_FORESTS_THREADS", n)
                .args(args)
                .output()
                .unwrap();
            assert_eq!(o.status.code(), Some(0));
            o.stdout
        })
        .collect();
    assert_eq!(outs[0], outs[1]);
}
