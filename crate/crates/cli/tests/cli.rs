use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use hfun_core::hfun::{ginv, HFunction};
use serde_json::Value;

fn hfun(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hfun"))
        .args(args)
        .arg("--out-dir")
        .arg(out)
        .output()
        .unwrap()
}

fn ok(args: &[&str], out: &Path) {
    let o = hfun(args, out);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

/// Data rows of a numeric CSV.
fn csv_rows(path: &Path) -> Vec<Vec<f64>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect()
}

#[test]
fn catalog_list_names_every_entry() {
    let o = Command::new(env!("CARGO_BIN_EXE_hfun"))
        .arg("catalog-list")
        .output()
        .unwrap();
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    for id in hfun_core::catalog::IDS {
        assert!(text.lines().any(|l| l.starts_with(id)), "{id}");
    }
    let again = Command::new(env!("CARGO_BIN_EXE_hfun"))
        .arg("catalog-list")
        .output()
        .unwrap();
    assert_eq!(again.stdout, text.as_bytes());
}

#[test]
fn invert_examples() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["invert", "--catalog", "half-plane", "--grid", "1001"], dir.path());
    let rows = csv_rows(&dir.path().join("g.csv"));
    assert_eq!(rows.len(), 1001);
    let mid = rows.iter().find(|r| r[0] == 0.5).unwrap();
    assert!((mid[1] - 2f64.sqrt()).abs() < 1e-15);
    let report = json(&dir.path().join("invert.json"));
    assert_eq!(report["schema"], 1);
    assert_eq!(report["log_integrable"], true);

    ok(&["invert", "--catalog", "disk", "--grid", "11"], dir.path());
    assert!(csv_rows(&dir.path().join("g.csv")).iter().all(|r| r[1] == 1.0));
}

#[test]
fn invert_from_table_matches_ginv() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("custom.csv");
    fs::write(&table, "r,h\n1,0\n1.5,0.2\n2,0.6\n4,1\n").unwrap();
    ok(
        &["invert", "--h-table", table.to_str().unwrap(), "--grid", "101"],
        dir.path(),
    );
    let h = HFunction::tabulated(vec![1.0, 1.5, 2.0, 4.0], vec![0.0, 0.2, 0.6, 1.0]).unwrap();
    let rows = csv_rows(&dir.path().join("g.csv"));
    for w in rows.windows(2) {
        assert!(w[1][1] >= w[0][1]);
    }
    for r in &rows {
        assert_eq!(r[1], ginv(&h, r[0]).unwrap());
    }
}

#[test]
fn invalid_inputs_fail_with_message() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("bad.csv");
    fs::write(&table, "r,h\n1,0.5\n2,0.4\n").unwrap();
    for args in [
        vec!["invert", "--h-table", table.to_str().unwrap()],
        vec!["invert", "--catalog", "nope"],
        vec!["invert", "--catalog", "disk", "--M", "10"],
        vec!["map", "--catalog", "disk", "--alpha", "-1"],
        vec!["verify", "--catalog", "disk", "--n", "0"],
    ] {
        let o = hfun(&args, dir.path());
        assert!(!o.status.success(), "{args:?}");
        assert!(String::from_utf8_lossy(&o.stderr).contains("error"), "{args:?}");
    }
}

#[test]
fn map_examples() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        &["map", "--catalog", "disk", "--alpha", "1", "--points", "128", "--svg"],
        dir.path(),
    );
    let report = json(&dir.path().join("map.json"));
    assert_eq!(report["covering"]["is_candidate_cover"], true);
    for r in csv_rows(&dir.path().join("trace.csv")) {
        assert!((r[1].hypot(r[2]) - 1.0).abs() < 1e-12);
    }
    assert!(fs::read_to_string(dir.path().join("trace.svg"))
        .unwrap()
        .starts_with("<svg"));

    ok(
        &["map", "--catalog", "half-plane", "--alpha", "1/2", "--points", "128"],
        dir.path(),
    );
    assert_eq!(json(&dir.path().join("map.json"))["components"]["empirical"], 2);

    ok(
        &[
            "map",
            "--catalog",
            "half-plane",
            "--alpha",
            "1/4",
            "--points",
            "128",
            "--lines",
            "-0.5,0.5",
        ],
        dir.path(),
    );
    let report = json(&dir.path().join("map.json"));
    assert!(report["covering"]["n_crossings"].as_u64().unwrap() > 0);
    assert!(dir.path().join("line_0.csv").exists() && dir.path().join("line_1.csv").exists());
}

#[test]
fn decimal_alpha_is_snapped_with_warning() {
    let dir = tempfile::tempdir().unwrap();
    let o = hfun(
        &["map", "--catalog", "disk", "--alpha", "0.3333", "--points", "64"],
        dir.path(),
    );
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("1/3"));
    assert_eq!(json(&dir.path().join("map.json"))["alpha"], "1/3");
}

#[test]
fn verify_examples() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        &["verify", "--catalog", "disk", "--n", "100000", "--seed", "7"],
        dir.path(),
    );
    let r = json(&dir.path().join("verify.json"));
    assert!(r["ks_domain"].as_f64().unwrap() <= 1e-3);
    assert_eq!(r["n"], 100000);
    assert_eq!(r["seed"], 7);

    ok(
        &["verify", "--catalog", "two-step", "--n", "100000", "--seed", "7"],
        dir.path(),
    );
    let r = json(&dir.path().join("verify.json"));
    let inner = &r["atoms"][0];
    assert_eq!(inner["radius"], 1.0);
    assert!((inner["domain"].as_f64().unwrap() - 0.5).abs() <= 0.02);

    ok(
        &[
            "verify",
            "--catalog",
            "half-plane",
            "--alpha",
            "1",
            "--y0",
            "20",
            "--n",
            "100000",
            "--no-domain",
        ],
        dir.path(),
    );
    let r = json(&dir.path().join("verify.json"));
    assert!(r["ks_projected"].as_f64().unwrap() <= 0.02);
    assert!(r["ks_domain"].is_null());
    assert_eq!(r["reports"][0]["method"], "projected");
}

#[test]
fn moments_examples() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["moments", "--catalog", "disk", "--p", "1,2,3"], dir.path());
    let m = json(&dir.path().join("moments.json"));
    for e in m["moments"].as_array().unwrap() {
        assert!((e["value"].as_f64().unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(e["divergent"], false);
    }
    ok(&["moments", "--catalog", "half-plane", "--p", "1,0.5"], dir.path());
    let m = json(&dir.path().join("moments.json"));
    assert_eq!(m["moments"][0]["divergent"], true);
    assert_eq!(m["moments"][1]["divergent"], false);
    let csv = fs::read_to_string(dir.path().join("moments.csv")).unwrap();
    assert!(csv.starts_with("p,value,divergent\n"));
}

/// Every output file except SVG, as (name, bytes).
fn outputs(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e != "svg"))
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect();
    v.sort();
    v
}

#[test]
fn reruns_are_byte_identical() {
    let runs: [&[&str]; 5] = [
        &["invert", "--catalog", "omega-n", "--params", "n=3", "--grid", "201"],
        &["map", "--catalog", "two-step", "--points", "128", "--lines", "0.25"],
        &[
            "verify",
            "--catalog",
            "two-step",
            "--n",
            "5000",
            "--seed",
            "3",
            "--points",
            "512",
        ],
        &["moments", "--catalog", "half-plane", "--p", "0.5,1"],
        &[
            "map",
            "--catalog",
            "custom",
            "--params",
            "a=100,n=4",
            "--points",
            "32",
            "--M",
            "128",
        ],
    ];
    for args in runs {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        ok(args, a.path());
        ok(args, b.path());
        let (oa, ob) = (outputs(a.path()), outputs(b.path()));
        assert!(!oa.is_empty());
        assert_eq!(oa, ob, "{args:?}");
    }
}
