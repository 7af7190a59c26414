use std::path::PathBuf;
use std::process::Command;

fn hcran() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hcran"))
}

fn scratch() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hcran-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

const TINY: &str = r#"{
  "preset": {"custom": {"kind": "custom",
    "rrhs": [{"x": 0, "y": 0}, {"x": -187.5, "y": -187.5}, {"x": 187.5, "y": 187.5}],
    "user_region": {"center": {"x": 0, "y": 0}, "side": 750},
    "users": 2}},
  "channel": {"bandwidth": 1.25e6, "num_subchannels": 4, "taps": 4},
  "rbar_mbps": 15.625,
  "pbar_dbm": 11,
  "seed": 5
}"#;

#[test]
fn channel_solve_oracle_simulate() {
    let dir = scratch();
    let cfg = dir.join("tiny.json");
    std::fs::write(&cfg, TINY).unwrap();
    let ch = dir.join("ch.json");

    let st = hcran()
        .args(["channel", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&ch)
        .status()
        .unwrap();
    assert!(st.success());

    let out = hcran()
        .arg("solve")
        .arg(&ch)
        .arg("--config")
        .arg(&cfg)
        .args(["--scheme", "all_daf"])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let run: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(run["scheme"], "all_daf");
    assert!(run["rate"].as_f64().unwrap() > 0.0);

    let out = hcran()
        .arg("oracle")
        .arg(&ch)
        .arg("--config")
        .arg(&cfg)
        .args(["--grid", "8"])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let rep: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rep["consistent"], true);

    let prefix = dir.join("sim");
    let st = hcran()
        .arg("simulate")
        .arg("--config")
        .arg(&cfg)
        .args([
            "--schemes",
            "all_daf,all_fad",
            "--draws",
            "1",
            "--sweep-var",
            "rbar-mbps",
            "--values",
            "5,50",
        ])
        .arg("--out")
        .arg(&prefix)
        .status()
        .unwrap();
    assert!(st.success());
    for suffix in ["sim.csv", "sim_plot.csv", "sim.json"] {
        assert!(dir.join(suffix).exists(), "{suffix}");
    }
}

#[test]
fn rejected_config_exits_nonzero() {
    let dir = scratch();
    let cfg = dir.join("bad.json");
    std::fs::write(&cfg, r#"{"draws": 0}"#).unwrap();
    let out = hcran()
        .args(["simulate", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("draws"));

    let out = hcran()
        .args(["simulate", "--schemes", "fad"])
        .output()
        .unwrap();
    assert!(!out.status.success());
}
