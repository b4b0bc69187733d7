use std::process::{Command, Output};

fn burgers(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_burgers")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "failed: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn caustic_rows() {
    let dir = std::env::temp_dir().join(format!("burgers-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("c.csv");
    let o = burgers(&["caustic", "--scenario", "generic_cusp", "--t", "1", "--lambda", "-2:2:401", "--out", out.to_str().unwrap()]);
    stdout(&o);
    let text = std::fs::read_to_string(&out).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 401);
    let row: Vec<f64> = rows[300].split(',').take(3).map(|v| v.parse().unwrap()).collect();
    assert_eq!(row, vec![1.0, 1.0, 0.5]);
}

#[test]
fn perestroika_time() {
    let o = burgers(&["perestroika", "--scenario", "perestroika_x5x6", "--t", "2:3:101"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let hits = v["perestroika"].as_array().unwrap();
    assert_eq!(hits.len(), 1);
    let t = hits[0]["t"].as_f64().unwrap();
    let expected = 4.0 / 7.0 * 2f64.sqrt() * (33.0f64 / 7.0).powf(0.75);
    assert!((t - expected).abs() < 1e-9, "{t}");
}

#[test]
fn zeta_is_reproducible() {
    let args = ["zeta", "--eps", "0.1", "--seed", "7", "--t", "1:10:500", "--c", "0"];
    let a = stdout(&burgers(&args));
    let b = stdout(&burgers(&args));
    assert_eq!(a, b);
    assert_eq!(a.lines().next().unwrap(), "t,value,direct,branch,lambda,cool,zero");
    assert_eq!(a.lines().count(), 501);
    let other = stdout(&burgers(&["zeta", "--eps", "0.1", "--seed", "8", "--t", "1:10:500"]));
    assert_ne!(a, other);
}

#[test]
fn classify_json() {
    let o = burgers(&["classify", "--t", "1", "--x", "0,1"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let c = &v["classification"];
    assert_eq!(c["on_maxwell"], true);
    assert_eq!(c["is_cool"], false);
    assert_eq!(c["minimiser"].as_f64().unwrap(), 0.0);
}

#[test]
fn config_file_overrides_flags() {
    let dir = std::env::temp_dir().join(format!("burgers-cfg-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.toml");
    std::fs::write(&cfg, "name = \"cusp\"\ndimension = 2\ns0 = \"x0^2*y0/2\"\nepsilon = 0.0\n\n[run]\nt = 2.0\n").unwrap();
    let o = burgers(&["caustic", "--t", "1", "--lambda", "1", "--config", cfg.to_str().unwrap()]);
    let text = stdout(&o);
    // λ = 1 at t = 2: (t², 3t/2 − 1/t)
    let row: Vec<f64> = text.lines().nth(1).unwrap().split(',').take(3).map(|v| v.parse().unwrap()).collect();
    assert_eq!(row, vec![1.0, 4.0, 2.5]);
}

#[test]
fn svg_plot() {
    let s = stdout(&burgers(&["plot", "--t", "1"]));
    assert!(s.starts_with("<svg") || s.starts_with("<?xml"));
    assert!(s.contains("stroke-dasharray=\"8,4\"") && s.contains("stroke-dasharray=\"3,3\""));
}

#[test]
fn error_exit_codes() {
    let o = burgers(&["caustic", "--scenario", "nope", "--t", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let e: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(e["context"]["subcommand"], "caustic");
    assert!(e["code"].is_string() && e["message"].is_string());

    let o = burgers(&["caustic", "--t", "1", "--lambda", "2:1:5"]);
    assert_eq!(o.status.code(), Some(2));

    let o = burgers(&["caustic", "--t", "1", "--out", "/nonexistent-dir/x.csv"]);
    assert_eq!(o.status.code(), Some(2));

    let o = burgers(&["spitzer", "--trials", "3", "--t", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
}
