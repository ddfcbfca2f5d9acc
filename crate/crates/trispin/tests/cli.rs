use std::fs;
use std::path::Path;

use trispin::cli::{run, EXIT_ERROR, EXIT_OK, EXIT_USAGE, EXIT_VALIDATION};

fn trispin(args: &[&str]) -> i32 {
    run(std::iter::once("trispin").chain(args.iter().copied()))
}

fn read(p: &Path) -> String {
    fs::read_to_string(p).unwrap()
}

#[test]
fn usage_errors() {
    assert_eq!(trispin(&["frobnicate"]), EXIT_USAGE);
    assert_eq!(trispin(&[]), EXIT_USAGE);
    assert_eq!(trispin(&["spectrum", "--n", "six"]), EXIT_USAGE);
    assert_eq!(trispin(&["--help"]), EXIT_OK);
    assert_eq!(trispin(&["--version"]), EXIT_OK);
}

#[test]
fn spectrum_reports_gap_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s");
    let code = trispin(&[
        "spectrum",
        "--model",
        "cluster",
        "--n",
        "6",
        "--b",
        "0",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK);
    let summary: serde_json::Value = serde_json::from_str(&read(&out.join("summary.json"))).unwrap();
    assert!((summary["gap"].as_f64().unwrap() - 2.0).abs() < 1e-9);
    let csv = read(&out.join("spectrum.csv"));
    assert_eq!(csv.lines().next(), Some("index,energy"));
    assert_eq!(csv.lines().count(), 65);
    for f in ["config.json", "manifest.json", "timings.json", "model.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
}

#[test]
fn spectrum_from_spec_file() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("m.json");
    fs::write(
        &spec,
        r#"{"n": 2, "boundary": "open", "terms": [{"coeff": 1.0, "factors": [[0, "Z"], [1, "Z"]]}]}"#,
    )
    .unwrap();
    let out = dir.path().join("o");
    let code = trispin(&[
        "spectrum",
        "--model",
        "spec",
        "--spec",
        spec.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(read(&out.join("spectrum.csv")), "index,energy\n0,-1\n1,-1\n2,1\n3,1\n");
}

#[test]
fn validate_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("v");
    let o = out.to_str().unwrap();
    assert_eq!(trispin(&["validate", "--j", "0.1", "--u", "1.0", "--out", o]), EXIT_OK);
    let r: serde_json::Value = serde_json::from_str(&read(&out.join("truncation.json"))).unwrap();
    assert!(r["max_rel_dev"].as_f64().unwrap() <= 0.08);
    assert_eq!(r["levels"].as_array().unwrap().len(), 8);
    assert_eq!(
        trispin(&[
            "validate",
            "--j",
            "0.1",
            "--u",
            "1.0",
            "--max-rel-dev",
            "0.001",
            "--out",
            o
        ]),
        EXIT_VALIDATION
    );
    assert_eq!(trispin(&["validate", "--j", "0.1", "--out", o]), EXIT_ERROR);
    assert_eq!(
        trispin(&["validate", "--j", "-0.1", "--u", "1.0", "--out", o]),
        EXIT_ERROR
    );
}

#[test]
fn couplings_from_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("p.json");
    fs::write(&cfg, r#"{"j_a": 10, "j_b": 10, "u_aa": 100, "u_bb": 100, "u_ab": 100}"#).unwrap();
    let out = dir.path().join("c");
    assert_eq!(
        trispin(&[
            "couplings",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap()
        ]),
        EXIT_OK
    );
    let c: serde_json::Value = serde_json::from_str(&read(&out.join("couplings.json"))).unwrap();
    assert_eq!(c["lambda3"], 0.0);
    assert_eq!(c["lambda4"], 0.0);
    assert_eq!(c["perturbative"], true);
    assert!((c["lambda1"].as_f64().unwrap() - -1.6).abs() < 1e-12);

    let zero = dir.path().join("z.json");
    fs::write(&zero, r#"{"j_a": 0, "j_b": 0, "u_aa": 1, "u_bb": 1, "u_ab": 1}"#).unwrap();
    assert_eq!(
        trispin(&[
            "couplings",
            "--config",
            zero.to_str().unwrap(),
            "--out",
            out.to_str().unwrap()
        ]),
        EXIT_OK
    );
    let c: serde_json::Value = serde_json::from_str(&read(&out.join("couplings.json"))).unwrap();
    for k in ["lambda1", "lambda2", "lambda3", "lambda4", "b_z_comp"] {
        assert_eq!(c[k], 0.0, "{k}");
    }
}

#[test]
fn runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r");
    let o = out.to_str().unwrap();
    let args = [
        "locent",
        "--b-grid",
        "0.4",
        "--n",
        "8",
        "--pair",
        "0,3",
        "--scheme",
        "optimize",
        "--anneal-steps",
        "5",
        "--seed",
        "3",
        "--out",
        o,
    ];
    assert_eq!(trispin(&args), EXIT_OK);
    let first = (read(&out.join("locent.json")), read(&out.join("manifest.json")));
    assert_eq!(trispin(&args), EXIT_OK);
    assert_eq!(read(&out.join("locent.json")), first.0);
    assert_eq!(read(&out.join("manifest.json")), first.1);
    assert_eq!(trispin(&[&args[..], &["--threads", "2"]].concat()), EXIT_OK);
    assert_eq!(read(&out.join("locent.json")), first.0);
}

#[test]
fn corr_and_survey_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c");
    let o = out.to_str().unwrap();
    let code = trispin(&[
        "corr",
        "--b-grid",
        "0:0.5:0.5",
        "--n",
        "8",
        "--axes",
        "zz,xx",
        "--analytic-l-max",
        "12",
        "--out",
        o,
    ]);
    assert_eq!(code, EXIT_OK);
    let csv = read(&out.join("corr.csv"));
    assert_eq!(csv.lines().next(), Some("B,L,alpha,beta,value"));
    assert_eq!(csv.lines().count(), 1 + 2 * 4 * 2);
    assert!(read(&out.join("czz_B0.5.csv")).starts_with("L,value\n"));
    let lengths: serde_json::Value = serde_json::from_str(&read(&out.join("lengths.json"))).unwrap();
    assert!(lengths[0]["estimate"].is_null());
    assert!(lengths[1]["estimate"]["xi"].as_f64().unwrap() > 0.0);

    let out = dir.path().join("s");
    let o = out.to_str().unwrap();
    assert_eq!(
        trispin(&["survey", "--b-grid", "0", "--windows", "5:6:1", "--out", o]),
        EXIT_OK
    );
    let s: serde_json::Value = serde_json::from_str(&read(&out.join("survey.json"))).unwrap();
    assert_eq!(s[0]["reports"][0]["fraction"], 2f64.powi(-7));
    assert_eq!(s[0]["reports"][1]["fraction"], 2f64.powi(-8));
}

#[test]
fn bad_grid_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = dir.path().join("g");
    assert_eq!(
        trispin(&["figure2", "--b-grid", "2:0:0.1", "--out", o.to_str().unwrap()]),
        EXIT_ERROR
    );
    assert_eq!(
        trispin(&["figure2", "--n", "8", "--out", o.to_str().unwrap()]),
        EXIT_ERROR
    );
}

#[test]
fn figure2_small_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f");
    let code = trispin(&[
        "figure2",
        "--b-grid",
        "0.5,1.5",
        "--anneal-steps",
        "10",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK);
    let corr = read(&out.join("correlation_length.csv"));
    let ent = read(&out.join("entanglement_length.csv"));
    let rows = |s: &str| {
        s.lines()
            .skip(1)
            .map(|l| l.split(',').map(String::from).collect::<Vec<_>>())
            .collect::<Vec<_>>()
    };
    let (corr, ent) = (rows(&corr), rows(&ent));
    assert_eq!(corr[0][3], "0");
    assert_eq!(corr[1][3], "0");
    assert_eq!(ent[0][3], "1");
    assert_eq!(ent[1][3], "0");
    assert_eq!(ent[1][7], "optimized");
    let series = read(&out.join("entanglement_series.csv"));
    assert!(series.starts_with("B,L,E_loc,xi_flag\n0.5,3,"));
}
