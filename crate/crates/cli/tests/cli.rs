mod common;

use std::fs;
use std::path::Path;

use common::{data_dir, json, manifest, okun, stderr, stdout};

fn write_manifest(dir: &Path, unemployment_file: &Path) -> std::path::PathBuf {
    let gdppc = data_dir().join("us/gdppc_mw.csv");
    let text = serde_json::json!({
        "country": "T",
        "series": [
            {"id": "u", "file": unemployment_file, "variable": "unemployment_rate", "unit": "percent_points", "source": "test"},
            {"id": "g", "file": gdppc, "variable": "real_gdp_pc", "unit": "currency_per_capita", "source": "test"}
        ],
        "roles": {"unemployment": "u", "gdppc": "g"}
    });
    let path = dir.join("manifest.json");
    fs::write(&path, text.to_string()).unwrap();
    path
}

#[test]
fn validate_accepts_bundled_us_data() {
    let o = okun(["validate", "--manifest", manifest("us").to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("unemployment") && out.contains("1948-2020"), "{out}");
    assert!(out.contains("all series valid"));
}

#[test]
fn validate_reports_duplicate_year_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("u.csv");
    fs::write(&csv, "year,value\n2000,5.0\n2001,5.5\n2001,6.0\n").unwrap();
    let m = write_manifest(dir.path(), &csv);
    let o = okun(["validate", "--manifest", m.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("duplicate year 2001"), "{err}");
    assert!(err.contains("u.csv:4"), "{err}");
}

#[test]
fn validate_names_the_unemployment_invariant() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("u.csv");
    fs::write(&csv, "year,value\n2000,5.0\n2001,105\n").unwrap();
    let m = write_manifest(dir.path(), &csv);
    let o = okun(["validate", "--manifest", m.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("unemployment_rate in [0, 100)"), "{err}");
    assert!(err.contains("u.csv:3"), "{err}");
}

#[test]
fn exit_codes_follow_error_families() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let missing = okun(["fit", "--manifest", "/nonexistent/manifest.json", "--out", out]);
    assert_eq!(missing.status.code(), Some(4));

    let us = manifest("us");
    let infeasible = okun(["fit", "--manifest", us.to_str().unwrap(), "--out", out, "--n-breaks", "20"]);
    assert_eq!(infeasible.status.code(), Some(3), "{}", stderr(&infeasible));

    let no_manifest = okun(["fit", "--out", out]);
    assert_eq!(no_manifest.status.code(), Some(2));

    let bad_flag = okun(["fit", "--anchor-mode", "sideways"]);
    assert_eq!(bad_flag.status.code(), Some(2));

    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "brakes = [1979]\n").unwrap();
    let bad_cfg = okun(["fit", "--config", cfg.to_str().unwrap()]);
    assert_eq!(bad_cfg.status.code(), Some(2));
    assert!(stderr(&bad_cfg).contains("bad.toml:1"), "{}", stderr(&bad_cfg));
}

#[test]
fn help_documents_defaults() {
    let o = okun(["fit", "--help"]);
    let text = stdout(&o);
    for needle in ["[default: 5]", "[default: 3]", "[default: measured]", "[default: full grid]"] {
        assert!(text.contains(needle), "missing {needle} in\n{text}");
    }
    let text = stdout(&okun(["detect", "--help"]));
    for needle in ["[default: hinged]", "[default: 0.02]", "[default: arithmetic]"] {
        assert!(text.contains(needle), "missing {needle} in\n{text}");
    }
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let us = manifest("us");
    let cfg = dir.path().join("run.toml");
    fs::write(
        &cfg,
        format!(
            "manifest = {:?}\nfrom = 1951\nto = 2019\nbreaks = [1979, 2010]\noutput_dir = {:?}\n",
            us.to_str().unwrap(),
            dir.path().join("a").to_str().unwrap()
        ),
    )
    .unwrap();
    let o = okun(["fit", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let a = json(&dir.path().join("a/us_model.json"));
    assert_eq!(a["segments"].as_array().unwrap().len(), 3);
    assert_eq!(a["segments"][1]["start"], 1979);

    let b_dir = dir.path().join("b");
    let o = okun(["fit", "--config", cfg.to_str().unwrap(), "--breaks", "1980", "--out", b_dir.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let b = json(&b_dir.join("us_fit.json"));
    assert_eq!(b["breaks"], serde_json::json!([1980]));
    assert_eq!(b["config"]["from"], 1951);
    assert_ne!(
        b["provenance"]["config_sha256"],
        json(&dir.path().join("a/us_fit.json"))["provenance"]["config_sha256"]
    );
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let us = manifest("us");
    let us = us.to_str().unwrap();
    let runs: [&[&str]; 4] = [
        &["fit", "--manifest", us, "--out", out, "--from", "1951", "--to", "2019", "--candidates", "1979,2010"],
        &["detect", "--manifest", us, "--out", out],
        &["audit", "--manifest", us, "--out", out, "--trend-from", "1979"],
        &["synth", "--manifest", us, "--out", out, "--model", &format!("{out}/us_model.json"), "--noise", "0.3", "--seed", "7"],
    ];
    let files = ["us_fit.json", "us_model.json", "us_fit.csv", "us_breaks.json", "us_breaks.csv", "us_audit.json", "us_audit.csv", "us_synth.csv"];
    let snapshot = || -> Vec<Vec<u8>> {
        for args in runs {
            let o = okun(args);
            assert!(o.status.success(), "{args:?}: {}", stderr(&o));
        }
        files.iter().map(|f| fs::read(dir.path().join(f)).unwrap()).collect()
    };
    let first = snapshot();
    let second = snapshot();
    for (f, (a, b)) in files.iter().zip(first.iter().zip(&second)) {
        assert!(a == b, "{f} differs between runs");
    }
    let report = json(&dir.path().join("us_fit.json"));
    let inputs = report["provenance"]["inputs"].as_object().unwrap();
    assert_eq!(inputs.len(), 3);
    assert!(inputs.values().all(|h| h.as_str().unwrap().len() == 64));
}

#[test]
fn synth_then_fit_recovers_the_model() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let us = manifest("us");
    let o = okun(["fit", "--manifest", us.to_str().unwrap(), "--out", out, "--from", "1951", "--to", "2019", "--breaks", "1979,2010"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let model = dir.path().join("us_model.json");
    let o = okun(["synth", "--manifest", us.to_str().unwrap(), "--out", out, "--model", model.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));

    let m = write_manifest(dir.path(), &dir.path().join("us_synth.csv"));
    let back = dir.path().join("back");
    let o = okun(["fit", "--manifest", m.to_str().unwrap(), "--out", back.to_str().unwrap(), "--breaks", "1979,2010"]);
    assert!(o.status.success(), "{}", stderr(&o));

    let (a, b) = (json(&model), json(&back.join("t_model.json")));
    for key in ["segments", "anchors"] {
        let (xs, ys) = (a[key].as_array().unwrap(), b[key].as_array().unwrap());
        assert_eq!(xs.len(), ys.len());
        for (x, y) in xs.iter().zip(ys) {
            for (k, v) in x.as_object().unwrap() {
                let (p, q) = (v.as_f64().unwrap(), y[k].as_f64().unwrap());
                assert!((p - q).abs() <= 1e-8 * (1.0 + p.abs()), "{key}.{k}: {p} vs {q}");
            }
        }
    }
    let report = json(&back.join("t_fit.json"));
    assert!(report["statistics"]["residual_rms"].as_f64().unwrap() < 1e-8);
}

#[test]
fn predict_writes_annual_and_quarterly_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let us = manifest("us");
    let us = us.to_str().unwrap();
    assert!(okun(["fit", "--manifest", us, "--out", out, "--from", "1951", "--to", "2019", "--breaks", "1979,2010"]).status.success());
    let model = format!("{out}/us_model.json");

    let o = okun(["predict", "--manifest", us, "--out", out, "--model", &model, "--horizon", "1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("us_predict.csv")).unwrap();
    assert!(csv.starts_with("year,predicted,measured,residual\n1951,"));
    assert!(csv.lines().last().unwrap().starts_with("2020,"));
    assert_eq!(csv.lines().count(), 1 + 70);

    let o = okun(["predict", "--manifest", us, "--out", out, "--model", &model, "--horizon", "5"]);
    assert_eq!(o.status.code(), Some(2), "growth past 2020 is not bundled");

    let o = okun(["predict", "--manifest", us, "--out", out, "--model", &model, "--quarterly"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("us_predict_quarterly.csv")).unwrap();
    assert!(csv.starts_with("quarter,growth,predicted,measured,implied_growth\n2020Q1,-5.4,"), "{csv}");
    assert_eq!(csv.lines().count(), 4);
}
