//! End-to-end checks of the binary: artifact shape, determinism across
//! worker counts, and exit codes.

use std::process::Command;

fn famlab() -> Command {
    Command::new(env!("CARGO_BIN_EXE_famlab"))
}

fn tmp(name: &str) -> String {
    std::env::temp_dir().join(name).to_string_lossy().into_owned()
}

/// JSON summary with the timestamp field blanked.
fn stable_json(path: &str) -> String {
    let text = std::fs::read_to_string(format!("{path}.json")).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v.as_object_mut().unwrap().insert("generated_unix".into(), serde_json::json!(0));
    serde_json::to_string(&v).unwrap()
}

#[test]
fn indicators_json_identical_across_worker_counts() {
    let out1 = tmp("famlab_cli_w1");
    let out4 = tmp("famlab_cli_w4");
    for (out, workers) in [(&out1, "1"), (&out4, "4")] {
        let status = famlab()
            .args([
                "--workers", workers, "--out", out, "indicators", "--group", "su2sym2",
                "--samples", "20000", "--seed", "42",
            ])
            .status()
            .unwrap();
        assert!(status.success());
    }
    assert_eq!(stable_json(&out1), stable_json(&out4));
    let csv1 = std::fs::read_to_string(format!("{out1}.csv")).unwrap();
    let csv4 = std::fs::read_to_string(format!("{out4}.csv")).unwrap();
    assert_eq!(csv1, csv4);
    assert!(csv1.starts_with("# command=indicators"));
}

#[test]
fn unknown_preset_exits_2() {
    let status = famlab()
        .args(["--out", &tmp("famlab_cli_bad"), "vertical", "--preset", "nope", "--p", "13"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn unknown_flag_exits_2() {
    let status = famlab().args(["indicators", "--frobnicate"]).status().unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn zeros_writes_cache_format() {
    let out = tmp("famlab_cli_zeros");
    let cache = std::env::temp_dir().join("famlab_cli_zcache");
    let _ = std::fs::remove_dir_all(&cache);
    let status = famlab()
        .args([
            "--out", &out, "--cache-dir", cache.to_str().unwrap(),
            "zeros", "--d=-4", "-T", "12",
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let cached = std::fs::read_to_string(cache.join("zeros_d-4.csv")).unwrap();
    assert!(cached.starts_with("format=zeros,v1,d=-4,T=12"), "{cached}");
    let _ = std::fs::remove_dir_all(&cache);
}

#[test]
fn config_file_feeds_defaults_and_flags_win() {
    let cfg_path = std::env::temp_dir().join("famlab_cli_cfg.conf");
    std::fs::write(&cfg_path, "samples=5000\nseed=9\n").unwrap();
    let out_cfg = tmp("famlab_cli_cfg_run");
    let status = famlab()
        .args([
            "--config", cfg_path.to_str().unwrap(), "--out", &out_cfg,
            "indicators", "--group", "roots-of-unity-2",
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let j: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(format!("{out_cfg}.json")).unwrap()).unwrap();
    assert_eq!(j["params"]["samples"], "5000");
    // explicit flag overrides the config value
    let out_flag = tmp("famlab_cli_cfg_run2");
    let status = famlab()
        .args([
            "--config", cfg_path.to_str().unwrap(), "--out", &out_flag,
            "indicators", "--group", "roots-of-unity-2", "--samples", "6000",
        ])
        .status()
        .unwrap();
    assert!(status.success());
    let j: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(format!("{out_flag}.json")).unwrap()).unwrap();
    assert_eq!(j["params"]["samples"], "6000");
}

#[test]
fn density_guard_requires_heavy() {
    let status = famlab()
        .args(["--out", &tmp("famlab_cli_guard"), "density", "--x", "20000"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn wd_roundtrip_through_file() {
    let out = tmp("famlab_cli_wd");
    let status = famlab()
        .args(["--out", &out, "wd", "--curve=-7,6", "--p", "5"])
        .status()
        .unwrap();
    assert!(status.success());
    let j: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(format!("{out}.json")).unwrap()).unwrap();
    assert_eq!(j["payload"]["conductor"], 1.0);
    // feed the embedded rep back through --input
    let rep_path = std::env::temp_dir().join("famlab_cli_rep.json");
    std::fs::write(&rep_path, serde_json::to_string(&j["payload"]["rep"]).unwrap()).unwrap();
    let out2 = tmp("famlab_cli_wd2");
    let status = famlab()
        .args(["--out", &out2, "wd", "--input", rep_path.to_str().unwrap()])
        .status()
        .unwrap();
    assert!(status.success());
    let j2: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(format!("{out2}.json")).unwrap()).unwrap();
    assert_eq!(j2["payload"]["conductor"], 1.0);
}
