//! End-to-end runs of the `nanoqnd` binary.

use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn nanoqnd(args: &[&str], cache: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nanoqnd"))
        .args(args)
        .env("NANOQND_CACHE_DIR", cache)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str], cache: &Path) {
    let out = nanoqnd(args, cache);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
}

fn json(path: PathBuf) -> Value {
    serde_json::from_slice(&std::fs::read(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))).unwrap()
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_file())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    v.sort();
    v
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("run.conf");
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn default_squeeze_reproduces_the_fiber_design_point() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    ok(&["squeeze", "--out", out.to_str().unwrap()], &tmp.path().join("cache"));
    let s = json(out.join("squeeze_summary.json"));
    let c1 = s["C1"].as_f64().unwrap();
    assert!((c1 / 0.00728 - 1.0).abs() < 0.05, "{c1}");
    assert!((s["peak_dB"].as_f64().unwrap() - 6.3).abs() < 0.5);
    let trace = std::fs::read_to_string(out.join("squeeze_trace.csv")).unwrap();
    assert!(trace.starts_with("gamma_op_t,xi2,xi_inv2_dB,Fx_per_NAf,varFz_per_NAf_half,two_body_cov\n"));
    let m = json(out.join("manifest.json"));
    assert_eq!(m["command"], "squeeze");
    assert_eq!(m["seed"], 0);
    assert_eq!(m["config"]["atoms"]["number"], 2500);
    let outputs: Vec<&str> = m["outputs"].as_array().unwrap().iter().map(|o| o["file"].as_str().unwrap()).collect();
    assert_eq!(outputs, ["squeeze_trace.csv", "squeeze_trace.json", "squeeze_summary.json"]);
    assert_eq!(m["cache"]["files"].as_array().unwrap().len(), 2);
}

#[test]
fn manifest_config_text_reproduces_the_run() {
    let tmp = tempfile::tempdir().unwrap();
    let cache = tmp.path().join("cache");
    let a = tmp.path().join("a");
    let cfg = write_config(tmp.path(), "[atoms]\nnumber = 800\n[sim]\nt_max = 0.5\n");
    ok(&["squeeze", "--config", cfg.to_str().unwrap(), "--out", a.to_str().unwrap()], &cache);
    let text = json(a.join("manifest.json"))["config_text"].as_str().unwrap().to_string();
    let echo = write_config(tmp.path(), &text);
    ok(&["squeeze", "--config", echo.to_str().unwrap()], &cache);
    // the echoed config names the same output directory
    assert_eq!(files(&a).len(), 4);
    let s = json(a.join("squeeze_summary.json"));
    assert_eq!(s["N_A"], 800);
}

#[test]
fn stochastic_runs_repeat_per_seed() {
    let tmp = tempfile::tempdir().unwrap();
    let cache = tmp.path().join("cache");
    let cfg = write_config(tmp.path(), "[sim]\nmode = stochastic\ntrajectories = 3\nt_max = 0.3\n");
    let run = |seed: &str, name: &str| {
        let out = tmp.path().join(name);
        ok(&["squeeze", "--config", cfg.to_str().unwrap(), "--seed", seed, "--out", out.to_str().unwrap()], &cache);
        std::fs::read(out.join("squeeze_trace.csv")).unwrap()
    };
    let a = run("7", "a");
    let b = run("7", "b");
    let c = run("8", "c");
    assert_eq!(a, b);
    assert_ne!(a, c);
    let s = json(tmp.path().join("a/squeeze_summary.json"));
    assert!(s["trajectory_spread_at_peak_dB"].as_f64().unwrap() > 0.0);
}

#[test]
fn modes_second_run_hits_the_cache() {
    let tmp = tempfile::tempdir().unwrap();
    let cache = tmp.path().join("cache");
    let out = tmp.path().join("out");
    ok(&["modes", "--out", out.to_str().unwrap(), "--format", "csv"], &cache);
    assert_eq!(json(out.join("manifest.json"))["cache"]["hit"], false);
    ok(&["modes", "--out", out.to_str().unwrap(), "--format", "csv"], &cache);
    let m = json(out.join("manifest.json"));
    assert_eq!(m["cache"]["hit"], true);
    let names: Vec<String> = files(&out).into_iter().map(|f| f.0).collect();
    assert_eq!(names, ["manifest.json", "mode_H.csv", "mode_V.csv", "modes_summary.json"]);
    let s = json(out.join("modes_summary.json"));
    let n_eff = s["modes"][0]["n_eff"].as_f64().unwrap();
    assert!(n_eff > 1.0 && n_eff < 1.4469);
    assert!((s["modes"][1]["norm"].as_f64().unwrap() - 1.0).abs() < 1e-6);

    // a corrupted cache is replaced
    for f in std::fs::read_dir(&cache).unwrap() {
        let p = f.unwrap().path();
        let mut bytes = std::fs::read(&p).unwrap();
        bytes[20] ^= 0xff;
        std::fs::write(&p, bytes).unwrap();
    }
    ok(&["modes", "--out", out.to_str().unwrap(), "--format", "csv"], &cache);
    assert_eq!(json(out.join("manifest.json"))["cache"]["hit"], false);
}

#[test]
fn cache_dir_flag_beats_the_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let flag = tmp.path().join("flag");
    let out = tmp.path().join("out");
    ok(&["modes", "--out", out.to_str().unwrap(), "--cache-dir", flag.to_str().unwrap()], &tmp.path().join("env"));
    assert_eq!(std::fs::read_dir(&flag).unwrap().count(), 2);
    assert!(!tmp.path().join("env").exists());
}

#[test]
fn coopmap_peaks_on_the_y_axis() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let cfg = write_config(tmp.path(), "[map]\nstep_nm = 50\ncircle_points = 72\n");
    ok(&["coopmap", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--format", "json"], &tmp.path().join("c"));
    let s = json(out.join("coopmap_summary.json"));
    let az = s["circle"]["C1_argmax_azimuth_deg"].as_f64().unwrap();
    assert!(az == 90.0 || az == 270.0, "{az}");
    assert!(s["circle"]["A_Far_relative_variation"].as_f64().unwrap() < 0.1);
    let map = json(out.join("coopmap.json"));
    assert_eq!(map["columns"][4], "C1");
    // 2·675/50 rounds down to 13 steps each way, 27² points
    assert_eq!(map["rows"].as_array().unwrap().len(), 27 * 27);
    assert!(!out.join("coopmap.csv").exists());
}

#[test]
fn atom_number_scan_rises() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let cfg = write_config(tmp.path(), "[scan]\naxis = atom_number\nvalues = 200, 800, 2500\n[sim]\nt_max = 0.6\n");
    ok(&["scan", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()], &tmp.path().join("c"));
    let csv = std::fs::read_to_string(out.join("scan.csv")).unwrap();
    let peaks: Vec<f64> = csv.lines().skip(1).map(|l| l.split(',').nth(2).unwrap().parse().unwrap()).collect();
    assert_eq!(peaks.len(), 3);
    assert!(peaks[0] < peaks[1] && peaks[1] < peaks[2]);
}

#[test]
fn exit_codes_and_error_reports() {
    let tmp = tempfile::tempdir().unwrap();
    let cache = tmp.path().join("c");
    let out = tmp.path().join("out");
    let run = |text: &str, extra: &[&str]| {
        let cfg = write_config(tmp.path(), text);
        let mut args = vec!["squeeze", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
        args.extend_from_slice(extra);
        let o = nanoqnd(&args, &cache);
        let err: Value = if o.stderr.is_empty() {
            Value::Null
        } else {
            serde_json::from_slice(o.stderr.trim_ascii().rsplit(|&b| b == b'\n').next().unwrap()).unwrap_or_else(|_| panic!("{}", String::from_utf8_lossy(&o.stderr)))
        };
        (o.status.code().unwrap(), err)
    };

    let (code, err) = run("[probe]\npowr_nW = 2\n", &[]);
    assert_eq!(code, 2);
    assert_eq!(err["error"]["suggestion"], "power_nW");
    assert_eq!(err["error"]["line"], 2);

    let (code, err) = run("[sim]\ndt = -1e-4\n", &[]);
    assert_eq!(code, 2);
    assert!(err["error"]["message"].as_str().unwrap().contains("out of range"));

    // so far from the fiber that the guided field underflows
    let (code, err) = run("[atoms]\nradial_distance_nm = 200000\n", &[]);
    assert_eq!(code, 3);
    assert_eq!(err["error"]["kind"], "solver");

    let (code, _) = run("[atoms]\nnumber = 900\n", &["--check"]);
    assert_eq!(code, 2);

    let (code, err) = run("", &["--check"]);
    assert_eq!(code, 0, "{err}");

    let o = nanoqnd(&["squeeze", "--config", "/nonexistent.conf"], &cache);
    assert_eq!(o.status.code(), Some(2));
}
