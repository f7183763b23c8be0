use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qibound(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qibound"))
        .current_dir(dir)
        .env("QIBOUND_CACHE_DIR", dir.join("cache"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn result(dir: &Path, out: &str) -> Value {
    serde_json::from_slice(&fs::read(dir.join(out).join("result.json")).unwrap()).unwrap()
}

fn num(v: &Value, key: &str) -> f64 {
    v[key].as_f64().unwrap_or_else(|| panic!("{key} missing in {v}"))
}

fn cache_entries(dir: &Path) -> usize {
    fs::read_dir(dir.join("cache")).map(|d| d.count()).unwrap_or(0)
}

#[test]
fn gaussian_flux_bounds() {
    let tmp = tempfile::tempdir().unwrap();
    let o = qibound(tmp.path(), &["flux-bound", "--family", "gaussian", "--out", "o"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = result(tmp.path(), "o");
    assert!((num(&r, "analytic_bound") + 0.01989436788).abs() < 1e-10);
    assert!((num(&r, "opnorm_bound") + 0.01958128485).abs() < 1e-10);
    assert!((num(&r, "sharp_infimum") + 0.0048295668517).abs() < 1e-11);
    assert_eq!(r["ordering_holds"], Value::Bool(true));
}

#[test]
fn physical_units_scale_with_width() {
    let tmp = tempfile::tempdir().unwrap();
    let o = qibound(tmp.path(), &["flux-bound", "--lambda", "2", "--hbar", "3", "--out", "o"]);
    assert!(o.status.success());
    let r = result(tmp.path(), "o");
    let scale = 3.0 / 4.0;
    assert!((num(&r, "opnorm_bound") - scale * num(&r, "opnorm_bound_dimensionless")).abs() < 1e-15);
    assert!((num(&r, "opnorm_bound_dimensionless") + 0.01958128485).abs() < 1e-10);
}

#[test]
fn cached_rerun_is_byte_identical_and_keys_track_parameters() {
    let tmp = tempfile::tempdir().unwrap();
    let args = ["evolve", "--points", "41", "--out", "a"];
    assert!(qibound(tmp.path(), &args).status.success());
    assert_eq!(cache_entries(tmp.path()), 1);
    let first = fs::read(tmp.path().join("a/result.json")).unwrap();
    let first_plot = fs::read(tmp.path().join("a/density_2.dat")).unwrap();

    let again = qibound(tmp.path(), &["evolve", "--points", "41", "--out", "b"]);
    assert!(String::from_utf8_lossy(&again.stderr).contains("cached result"));
    assert_eq!(fs::read(tmp.path().join("b/result.json")).unwrap(), first);
    assert_eq!(fs::read(tmp.path().join("b/density_2.dat")).unwrap(), first_plot);
    assert_eq!(cache_entries(tmp.path()), 1);

    // a fresh computation must agree byte for byte with the cached copy
    assert!(qibound(tmp.path(), &["evolve", "--points", "41", "--no-cache", "--out", "c"]).status.success());
    assert_eq!(fs::read(tmp.path().join("c/result.json")).unwrap(), first);

    assert!(qibound(tmp.path(), &["evolve", "--points", "43", "--out", "d"]).status.success());
    assert_eq!(cache_entries(tmp.path()), 2);
}

#[test]
fn config_file_matches_flags() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("run.json"), r#"{"command": "sweep", "ks": [10, 20], "density": 4}"#).unwrap();
    assert!(qibound(tmp.path(), &["--config", "run.json", "--out", "f"]).status.success());
    let hit = qibound(tmp.path(), &["sweep", "--ks", "10,20", "--density", "4", "--out", "g"]);
    assert!(String::from_utf8_lossy(&hit.stderr).contains("cached result"));
    assert_eq!(
        fs::read(tmp.path().join("f/result.json")).unwrap(),
        fs::read(tmp.path().join("g/result.json")).unwrap()
    );
    assert!(tmp.path().join("g/sweep.dat").exists());

    fs::write(tmp.path().join("bad.json"), r#"{"command": "sweep", "kz": [10]}"#).unwrap();
    let bad = qibound(tmp.path(), &["--config", "bad.json"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn errors_are_json_with_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let o = qibound(tmp.path(), &["flux-bound", "--family", "boxcar", "--out", "o"]);
    assert_eq!(o.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "invalid_argument");
    assert!(err["error"]["message"].as_str().unwrap().contains("boxcar"));

    let o = qibound(tmp.path(), &["flux-bound", "--lambda", "not-a-number"]);
    assert_eq!(o.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "usage");

    // compact families have algebraic tails the oscillator series cannot sum
    let o = qibound(tmp.path(), &["osc-bound", "--family", "truncated_cosine", "--out", "o"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(!tmp.path().join("o/result.json").exists());
}

#[test]
fn verify_analytic_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let o = qibound(tmp.path(), &["verify", "--only", "analytic", "--out", "v"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = result(tmp.path(), "v");
    assert_eq!(r["entries"].as_array().unwrap().len(), 4);
    assert_eq!(r["all_pass"], Value::Bool(true));
    assert_eq!(cache_entries(tmp.path()), 0);
}

#[test]
fn corrupted_manifest_fails_verify() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = r#"{"entries": [
        {"id": "analytic.gaussian", "value": -0.01989436788, "tolerance": 1e-10, "citation": "sampling-function table"},
        {"id": "analytic.truncated_cosine", "value": -0.0981748, "tolerance": 1e-10, "citation": "sampling-function table"}
    ]}"#;
    fs::write(tmp.path().join("m.json"), manifest).unwrap();
    let o = qibound(tmp.path(), &["verify", "--manifest", "m.json", "--out", "v"]);
    assert_eq!(o.status.code(), Some(1));
    let r = result(tmp.path(), "v");
    let entries = r["entries"].as_array().unwrap();
    assert_eq!(entries[0]["pass"], Value::Bool(true));
    assert_eq!(entries[1]["pass"], Value::Bool(false));

    fs::write(tmp.path().join("z.json"), manifest.replace("1e-10", "0")).unwrap();
    assert_eq!(qibound(tmp.path(), &["verify", "--manifest", "z.json"]).status.code(), Some(2));
}

#[test]
fn evolve_writes_one_density_per_time() {
    let tmp = tempfile::tempdir().unwrap();
    let o = qibound(tmp.path(), &["evolve", "--times", "-0.1,0,0.1", "--points", "61", "--out", "e"]);
    assert!(o.status.success());
    let r = result(tmp.path(), "e");
    let frames = r["frames"].as_array().unwrap();
    assert_eq!(frames.len(), 3);
    for f in frames {
        let text = fs::read_to_string(tmp.path().join("e").join(f["file"].as_str().unwrap())).unwrap();
        let rows: Vec<Vec<f64>> =
            text.lines().map(|l| l.split_whitespace().map(|c| c.parse().unwrap()).collect()).collect();
        assert_eq!(rows.len(), 61);
        assert!(rows.iter().all(|r| r.len() == 2 && r[1] >= 0.0));
    }
    let p = |i: usize| frames[i]["left_probability"].as_f64().unwrap();
    assert!(((p(0) - 0.5) + (p(2) - 0.5)).abs() < 1e-9);
    assert!((num(&r, "flux_at_origin_t0") - num(&r, "flux_at_origin_t0_closed_form")).abs() < 1e-10);
}

#[test]
fn small_backflow_sweep_writes_points_and_fit() {
    let tmp = tempfile::tempdir().unwrap();
    let o = qibound(tmp.path(), &["backflow-constant", "--Xs", "100,200,400", "--out", "b"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = result(tmp.path(), "b");
    let pts = r["points"].as_array().unwrap();
    assert_eq!(pts.len(), 3);
    for p in pts {
        let l = p["lambda"].as_f64().unwrap();
        assert!(l > 0.03 && l < 0.0385, "{l}");
    }
    let a = r["fit"]["a"].as_f64().unwrap();
    assert!((a - 0.038452).abs() < 5e-3, "{a}");
    let points = fs::read_to_string(tmp.path().join("b/lambda_points.dat")).unwrap();
    assert_eq!(points.lines().count(), 3);
    let fit = fs::read_to_string(tmp.path().join("b/lambda_fit.dat")).unwrap();
    assert_eq!(fit.lines().count(), 200);
}

#[test]
fn wigner_and_oscillator_smoke() {
    let tmp = tempfile::tempdir().unwrap();
    let o = qibound(tmp.path(), &["wigner", "--state", "excited", "--points", "101", "--out", "w"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = result(tmp.path(), "w");
    assert!((num(&r, "total") - 1.0).abs() < 1e-8);
    assert!(num(&r, "min") < -0.1);
    assert_eq!(r["aliasing_suspected"], Value::Bool(false));
    let kb = &r["kinematical_bound"];
    assert!(num(&r, "smeared_energy") >= kb["sharp"].as_f64().unwrap());
    let dump = fs::read_to_string(tmp.path().join("w/wigner.dat")).unwrap();
    assert_eq!(dump.lines().count(), 102);

    let o = qibound(tmp.path(), &["osc-bound", "--points", "11", "--out", "q"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = result(tmp.path(), "q");
    assert!(num(&r, "bound_at_origin") < 0.0);
    assert_eq!(r["alphas"].as_array().unwrap().len(), 31);
    assert_eq!(fs::read_to_string(tmp.path().join("q/osc_bound.dat")).unwrap().lines().count(), 11);

    let o = qibound(tmp.path(), &["flux-spectrum", "--kernel", "j", "--k", "20", "--out", "s"]);
    assert!(o.status.success());
    let r = result(tmp.path(), "s");
    assert!((num(&r, "min_eigenvalue") + 0.0048295668517).abs() < 1e-8);
}
