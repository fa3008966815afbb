use std::path::Path;
use std::process::{Command, Output};

use clap::Parser;
use renyicap_cli::{Cli, Command as Verb, Format, Kind, Quantity, Variant};
use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_renyicap"));
    c.env_remove("RENYICAP_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

const KET0: &str = r#"{"rows":2,"cols":2,"data":[[1,0],[0,0],[0,0],[0,0]]}"#;
const KET1: &str = r#"{"rows":2,"cols":2,"data":[[0,0],[0,0],[0,0],[1,0]]}"#;
const MIXED: &str = r#"{"rows":2,"cols":2,"data":[[0.5,0],[0,0],[0,0],[0.5,0]]}"#;
const NOT_HERMITIAN: &str = r#"{"rows":2,"cols":2,"data":[[0.5,0],[0.3,0],[0,0],[0.5,0]]}"#;
const AMPLIFIER: &str = r#"{"dim_in":2,"dim_out":2,"trace_preserving":true,
  "kraus":[{"rows":2,"cols":2,"data":[[1.2,0],[0,0],[0,0],[1,0]]}]}"#;

#[test]
fn defaults_are_frozen() {
    let cli = Cli::parse_from(["renyicap", "bound", "ch.json"]);
    assert_eq!(cli.common.seed, 0);
    assert_eq!(cli.common.restarts, 8);
    assert_eq!(cli.common.p, 0.5);
    assert_eq!(cli.common.format, None);
    assert!(cli.common.out.is_none());
    match cli.command {
        Verb::Bound {
            variant,
            n,
            rate,
            alpha,
            eps,
            ..
        } => {
            assert_eq!(variant, Variant::Generic);
            assert_eq!((n, rate, alpha, eps), (10, 1.0, 1.5, 0.0));
        }
        other => panic!("{other:?}"),
    }
    match Cli::parse_from(["renyicap", "divergence", "a", "b"]).command {
        Verb::Divergence { alpha, kind, .. } => assert_eq!((alpha, kind), (1.5, Kind::Sandwiched)),
        other => panic!("{other:?}"),
    }
    match Cli::parse_from(["renyicap", "sweep", "c"]).command {
        Verb::Sweep { alphas, quantity, .. } => {
            assert_eq!(alphas, vec![1.1, 1.25, 1.5, 1.75, 2.0]);
            assert_eq!(quantity, Quantity::Radius);
        }
        other => panic!("{other:?}"),
    }
    match Cli::parse_from(["renyicap", "simulate", "c", "code"]).command {
        Verb::Simulate { trials, .. } => assert_eq!(trials, 20),
        other => panic!("{other:?}"),
    }
    match Cli::parse_from(["renyicap", "verify"]).command {
        Verb::Verify { suite, channels } => assert!(suite == "all" && channels.is_empty()),
        other => panic!("{other:?}"),
    }
    let cli = Cli::parse_from(["renyicap", "radius", "c", "--format", "csv", "--seed", "9"]);
    assert_eq!((cli.common.format, cli.common.seed), (Some(Format::Csv), 9));
}

#[test]
fn seed_falls_back_to_environment() {
    let dir = tempfile::tempdir().unwrap();
    let code = write(
        dir.path(),
        "code.json",
        r#"{"n":2,"R":1.0,"seed":1,"ensemble":{"probs":[0.5,0.5],"states":[
            {"rows":2,"cols":2,"data":[[1,0],[0,0],[0,0],[0,0]]},
            {"rows":2,"cols":2,"data":[[0,0],[0,0],[0,0],[1,0]]}]}}"#,
    );
    let a = bin()
        .args(["radius", "builtin:depolarizing", "--p", "0.3"])
        .env("RENYICAP_SEED", "5")
        .output()
        .unwrap();
    let b = run(&["radius", "builtin:depolarizing", "--p", "0.3", "--seed", "5"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let s = run(&["simulate", "builtin:pinching", &code, "--trials", "3"]);
    assert!(s.status.success(), "{}", String::from_utf8_lossy(&s.stderr));
}

#[test]
fn divergence_examples() {
    let dir = tempfile::tempdir().unwrap();
    let (k0, k1, mm) = (
        write(dir.path(), "k0.json", KET0),
        write(dir.path(), "k1.json", KET1),
        write(dir.path(), "mm.json", MIXED),
    );
    let v: Value = serde_json::from_str(&stdout(&run(&["divergence", &mm, &mm]))).unwrap();
    assert_eq!(v["value_bits"].as_f64().unwrap().abs(), 0.0);
    let v: Value = serde_json::from_str(&stdout(&run(&["divergence", &k0, &mm]))).unwrap();
    assert!((v["value_bits"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(v["kind"], "sandwiched");
    let v: Value = serde_json::from_str(&stdout(&run(&["divergence", &k0, &k1]))).unwrap();
    assert_eq!(v["value_bits"], "inf");
    assert_eq!(v["support_ok"], false);
    let v: Value = serde_json::from_str(&stdout(&run(&["divergence", &k0, &mm, "--kind", "vn"]))).unwrap();
    assert!((v["value_bits"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let mm = write(dir.path(), "mm.json", MIXED);
    let garbled = write(dir.path(), "bad.json", "{\"rows\": 2,");
    let nh = write(dir.path(), "nh.json", NOT_HERMITIAN);
    let amp = write(dir.path(), "amp.json", AMPLIFIER);

    assert_eq!(run(&["divergence", &garbled, &mm]).status.code(), Some(2));
    assert_eq!(run(&["divergence", &mm]).status.code(), Some(2));
    assert_eq!(run(&["divergence", &mm, &mm, "--alpha", "nope"]).status.code(), Some(2));
    let o = run(&["divergence", &nh, &mm]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Hermitian"));
    let o = run(&["radius", &amp]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("trace preserving"));
    let o = run(&["bound", "builtin:pinching", "--variant", "eb", "--rate", "0.5", "--n", "4"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("does not exceed chi"));
    assert_eq!(run(&["verify", "--suite", "nonsense"]).status.code(), Some(2));
}

#[test]
fn corrupted_channel_stops_verify_before_any_property() {
    let dir = tempfile::tempdir().unwrap();
    let amp = write(dir.path(), "amp.json", AMPLIFIER);
    let o = run(&["verify", "--suite", "converse-chain", "--channel", &amp]);
    assert_eq!(o.status.code(), Some(3));
    assert!(o.stdout.is_empty());
}

#[test]
fn sweep_examples() {
    let o = run(&["sweep", "builtin:completely-depolarizing", "--alphas", "1.2,2,1.5"]);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("alpha,value_bits,converged,restarts_used"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.iter().map(|r| r[0]).collect::<Vec<_>>(), ["1.2", "2", "1.5"]);
    for r in &rows {
        assert!(r[1].parse::<f64>().unwrap().abs() < 1e-9);
    }
    let text = stdout(&run(&["sweep", "builtin:identity", "--alphas", "1.3,2"]));
    for l in text.lines().skip(1) {
        let v: f64 = l.split(',').nth(1).unwrap().parse().unwrap();
        assert!((v - 1.0).abs() < 1e-6, "{l}");
    }
    let text = stdout(&run(&["sweep", "builtin:depolarizing", "--quantity", "holevo", "--alphas", "1.1,1.5,2"]));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn bound_examples() {
    let o = run(&["bound", "builtin:pinching", "--variant", "eb", "--n", "50", "--rate", "1.2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["exponent"].as_f64().unwrap() > 0.0);
    let b = v["p_succ_bound"].as_f64().unwrap();
    assert!(b > 0.0 && b < 1.0);
    assert!((b - (-50.0 * v["exponent"].as_f64().unwrap()).exp2()).abs() < 1e-12);
    assert!(v["components"]["c"].as_f64().unwrap() >= 3.0);

    // Pinching has χ̃_α = 1, so any rate below 1 is vacuous.
    let o = run(&["bound", "builtin:pinching", "--n", "4", "--rate", "0.25"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["p_succ_bound"].as_f64(), Some(1.0));
    assert!(v["flags"].as_array().unwrap().contains(&Value::from("vacuous")));

    let o = run(&["bound", "builtin:pinching", "--variant", "weak", "--n", "3"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["rate_max"].as_f64().unwrap() - v["chi_total"].as_f64().unwrap() / 3.0).abs() < 1e-12);
}

#[test]
fn json_outputs_round_trip_bit_exactly() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["bound", "builtin:depolarizing", "--p", "0.75", "--variant", "eb", "--rate", "0.6"],
        vec!["capacity", "builtin:depolarizing", "--p", "0.4"],
        vec!["radius", "builtin:pinching", "--alpha", "1.3"],
    ] {
        let o = run(&args);
        assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        let text = stdout(&o);
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(serde_json::to_string_pretty(&v).unwrap(), text);
    }
    // Emitted matrices parse back as states.
    let o = run(&["radius", "builtin:depolarizing", "--p", "0.2"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let sigma = write(dir.path(), "sigma.json", &v["sigma_star"].to_string());
    let again = run(&["radius", "builtin:depolarizing", "--p", "0.2", "--sigma", &sigma]);
    assert!(again.status.success());
    let w: Value = serde_json::from_str(&stdout(&again)).unwrap();
    assert!((w["value_bits"].as_f64().unwrap() - v["value_bits"].as_f64().unwrap()).abs() < 1e-7);
}

#[test]
fn identical_invocations_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let out1 = dir.path().join("a.json");
    let out2 = dir.path().join("b.json");
    for out in [&out1, &out2] {
        let o = run(&[
            "verify",
            "--suite",
            "channel-props",
            "--seed",
            "3",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        assert!(o.stdout.is_empty());
    }
    assert_eq!(std::fs::read(&out1).unwrap(), std::fs::read(&out2).unwrap());
    let v: Value = serde_json::from_slice(&std::fs::read(&out1).unwrap()).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["suite"], "channel-props");
    for p in v["properties"].as_array().unwrap() {
        assert!(p["samples"].as_u64().unwrap() > 0);
        assert!(p.get("worst_slack").is_some());
    }
    let a = run(&["sweep", "builtin:depolarizing", "--alphas", "1.5,2", "--seed", "4"]);
    let b = run(&["sweep", "builtin:depolarizing", "--alphas", "1.5,2", "--seed", "4"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn csv_format_for_single_results() {
    let dir = tempfile::tempdir().unwrap();
    let mm = write(dir.path(), "mm.json", MIXED);
    let text = stdout(&run(&["divergence", &mm, &mm, "--format", "csv"]));
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], "alpha,kind,support_ok,value_bits");
    assert!(lines[1].starts_with("1.5,sandwiched,true,"));
}
