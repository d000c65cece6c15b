use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/data")
        .join(name)
}

fn pas(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pas"))
        .current_dir(dir)
        .env_remove("PAS_WORKERS")
        .args(args)
        .output()
        .unwrap()
}

fn ok(out: Output) -> String {
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(
        out.status.success(),
        "{stdout}\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    stdout
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn column(doc: &Value, name: &str) -> Vec<Value> {
    let idx = doc["columns"]
        .as_array()
        .unwrap()
        .iter()
        .position(|c| c == name)
        .unwrap();
    doc["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r[idx].clone())
        .collect()
}

const SIM: &str = r#"
schema_version = 1
seed = 11

[simulate]
dm = { kind = "ccdm" }
snr_db = [19.6, 25.0]
max_codewords = 32
batch_groups = 1
"#;

#[test]
fn simulate_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("exp.toml"), SIM).unwrap();
    ok(pas(
        dir.path(),
        &["--config", "exp.toml", "--out-dir", "a", "simulate"],
    ));
    ok(pas(
        dir.path(),
        &[
            "--config",
            "exp.toml",
            "--out-dir",
            "b",
            "--workers",
            "1",
            "simulate",
        ],
    ));
    let a = fs::read(dir.path().join("a/simulate.csv")).unwrap();
    assert_eq!(a, fs::read(dir.path().join("b/simulate.csv")).unwrap());
    assert_eq!(
        fs::read(dir.path().join("a/simulate.json")).unwrap(),
        fs::read(dir.path().join("b/simulate.json")).unwrap()
    );

    let text = String::from_utf8(a).unwrap();
    let mut lines = text.lines();
    let head = lines.next().unwrap();
    assert!(head.starts_with("# pas schema_version=1 command=simulate seed=11 config_sha256="));
    assert!(lines
        .next()
        .unwrap()
        .starts_with("snr_db,codewords,coded_bits,pre_fec_bit_errors,"));
    assert_eq!(lines.count(), 2);

    let doc = json(&dir.path().join("a/simulate.json"));
    assert_eq!(doc["header"]["schema_version"], 1);
    assert_eq!(doc["columns"].as_array().unwrap().len(), 23);
    assert_eq!(
        column(&doc, "codewords"),
        [Value::from(32.0), Value::from(32.0)]
    );
    let pre = column(&doc, "pre_fec_ber");
    assert!(pre[0].as_f64().unwrap() > pre[1].as_f64().unwrap());
    assert_eq!(column(&doc, "client_bit_errors")[1], Value::from(0.0));

    ok(pas(
        dir.path(),
        &[
            "--config",
            "exp.toml",
            "--out-dir",
            "c",
            "--seed",
            "12",
            "simulate",
        ],
    ));
    let c = fs::read_to_string(dir.path().join("c/simulate.csv")).unwrap();
    assert_ne!(c.lines().next().unwrap(), head);
}

#[test]
fn build_tree_reports_storage_and_gain() {
    let dir = tempfile::tempdir().unwrap();
    let spec: String = fs::read_to_string(data("pam32_example.tree"))
        .unwrap()
        .split("\ntable ")
        .next()
        .unwrap()
        .to_string();
    fs::write(dir.path().join("spec.tree"), spec).unwrap();
    let stdout = ok(pas(dir.path(), &["build-tree", "spec.tree", "built.tree"]));
    assert!(stdout.contains("480 (DM) / 816 (invDM)"), "{stdout}");
    let doc = json(&dir.path().join("build_tree.json"));
    assert_eq!(doc["input_bits"], 11);
    assert!((doc["gain_db"].as_f64().unwrap() - 0.22).abs() < 0.01);
    let stdout = ok(pas(dir.path(), &["inspect-tree", "built.tree"]));
    assert!(stdout.contains("stored, validated"));
}

#[test]
fn invalid_tree_names_the_layer() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(data("pam32_example.tree")).unwrap();
    fs::write(
        dir.path().join("bad.tree"),
        text.replace("u=6 r=2 s=2", "u=6 r=5 s=2"),
    )
    .unwrap();
    let out = pas(dir.path(), &["inspect-tree", "bad.tree"]);
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("layer 2"), "{err}");
}

#[test]
fn bounds_for_each_matcher() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = |dm: &str, alpha: &str| {
        format!("schema_version = 1\n[bounds]\ndm = {{ kind = \"{dm}\" }}\n{alpha}ber_min = 1e-6\nber_max = 1e-2\n")
    };
    let cases = [
        ("ccdm", "alpha = 507.0\n", 348.0),
        ("hidm", "alpha = 13.4\n", 9.7),
        ("none", "", 1.0),
    ];
    for (dm, alpha, r) in cases {
        fs::write(dir.path().join("b.toml"), cfg(dm, alpha)).unwrap();
        ok(pas(
            dir.path(),
            &["--config", "b.toml", "--out-dir", dm, "bounds"],
        ));
        let doc = json(&dir.path().join(dm).join("bounds.json"));
        let bound = doc["r_e1_bound"].as_f64().unwrap();
        assert!((bound - r).abs() < 0.05 * r, "{dm}: {bound}");
        assert_eq!(doc["rows"].as_array().unwrap().len(), 41);
        let post = column(&doc, "post_invdm_ber");
        let pre = column(&doc, "post_fec_ber");
        // r_E1 is the small-BER slope of the bound
        let ratio = post[0].as_f64().unwrap() / pre[0].as_f64().unwrap();
        assert!((ratio - bound).abs() < 1e-3 * bound, "{dm}: {ratio}");
    }
}

#[test]
fn insert_errors_and_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!(
        r#"schema_version = 1
seed = 3
[insert_errors]
dm = {{ kind = "hidm", tree = "{}" }}
exhaustive = true
[metrics]
shape = {{ kind = "uniform" }}
snr_db = [30.0]
samples = 4000
"#,
        data("pam32_example.tree").display()
    );
    fs::write(dir.path().join("e.toml"), text).unwrap();
    ok(pas(dir.path(), &["--config", "e.toml", "insert-errors"]));
    let doc = json(&dir.path().join("insert_errors.json"));
    let alpha = column(&doc, "alpha")[0].as_f64().unwrap();
    assert!((alpha - 78656.0 / 32768.0).abs() < 1e-12);

    ok(pas(dir.path(), &["--config", "e.toml", "metrics"]));
    let doc = json(&dir.path().join("metrics.json"));
    assert!((doc["entropy_2d"].as_f64().unwrap() - 8.0).abs() < 1e-12);
    assert!((doc["gain_db"].as_f64().unwrap()).abs() < 1e-9);
    // uniform 256-QAM at 30 dB carries almost all 8 bits
    assert!(column(&doc, "air_bmd")[0].as_f64().unwrap() > 7.9);
}

#[test]
fn config_errors_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("x.toml"),
        "schema_version = 1\n[simulate]\nsnr = [1.0]\n",
    )
    .unwrap();
    let out = pas(dir.path(), &["--config", "x.toml", "simulate"]);
    assert!(!out.status.success());
    let out = pas(dir.path(), &["bounds"]);
    assert!(String::from_utf8(out.stderr).unwrap().contains("--config"));
    fs::write(dir.path().join("y.toml"), "schema_version = 1\n").unwrap();
    let out = pas(dir.path(), &["--config", "y.toml", "metrics"]);
    assert!(String::from_utf8(out.stderr).unwrap().contains("[metrics]"));
}
