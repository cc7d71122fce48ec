use std::path::{Path, PathBuf};
use std::process::Command;

use clap::Parser;
use serde_json::Value;
use twophase_cli::{load_params_json, load_population_csv, run, CliError, RunConfig};
use twophase_core::published::murthy_1967_document;
use twophase_core::{moments_from_params, Error};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(
        Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("tests/golden")
            .join(name),
    )
    .unwrap()
}

fn run_args(args: &[&str]) -> Result<String, CliError> {
    let argv = std::iter::once("twophase").chain(args.iter().copied());
    run(&RunConfig::try_parse_from(argv).expect("arguments parse"))
}

fn pop() -> String {
    fixture("pop.csv").display().to_string()
}

fn murthy() -> String {
    fixture("murthy67.json").display().to_string()
}

fn write_temp(contents: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    std::io::Write::write_all(&mut f, contents.as_bytes()).unwrap();
    f
}

#[test]
fn golden_moments() {
    assert_eq!(
        run_args(&["moments", &pop()]).unwrap(),
        golden("moments_pop.json")
    );
}

#[test]
fn golden_efficiency() {
    let out = run_args(&[
        "efficiency",
        "--params",
        &murthy(),
        "--n",
        "10",
        "--n1",
        "25",
        "--delta310-from-delta300",
    ])
    .unwrap();
    assert_eq!(out, golden("efficiency_murthy67.json"));
}

#[test]
fn golden_simulate_and_enumerate() {
    let sim = [
        "simulate",
        "--pop",
        &pop(),
        "--n",
        "3",
        "--n1",
        "4",
        "--estimator",
        "sample-r",
        "--reps",
        "1000",
        "--seed",
        "7",
    ];
    assert_eq!(run_args(&sim).unwrap(), golden("simulate_pop.json"));
    let en = [
        "enumerate",
        "--pop",
        &pop(),
        "--n",
        "3",
        "--n1",
        "4",
        "--estimator",
        "sample-r",
        "--estimator",
        "chain-ratio",
    ];
    assert_eq!(run_args(&en).unwrap(), golden("enumerate_pop.json"));
}

#[test]
fn moments_match_the_rational_oracle() {
    let doc: Value = serde_json::from_str(&run_args(&["moments", &pop()]).unwrap()).unwrap();
    let m = &doc["moments"];
    // exact rational sums, one square root at 40 digits, rounded to f64
    for (key, want) in [
        ("d_030", 0.44479485022066195),
        ("d_040", 1.9204152249134947),
        ("rho_yx", 0.7050239879106326),
        ("d_310", 1.3503920999211347),
        ("d_112", 1.1928243687352864),
    ] {
        let got = m[key].as_f64().unwrap();
        assert!(
            (got - want).abs() <= 1e-11 * want.abs(),
            "{key}: {got} vs {want}"
        );
    }
    assert_eq!(doc["schema"], 1);
}

#[test]
fn efficiency_report_shows_published_and_computed_values() {
    let out = run_args(&[
        "efficiency",
        "--params",
        &murthy(),
        "--n",
        "10",
        "--n1",
        "25",
        "--delta310-from-delta300",
    ])
    .unwrap();
    let doc: Value = serde_json::from_str(&out).unwrap();
    let r = &doc["report"];
    assert_eq!(r["published"]["pre_r"], 100.0);
    assert_eq!(r["published"]["pre_hd"], 129.147);
    assert_eq!(r["published"]["pre_td"], 305.441);
    let (hd, td) = (r["pre_hd"].as_f64().unwrap(), r["pre_td"].as_f64().unwrap());
    assert!(td >= hd && hd >= 100.0);
    let notes: Vec<&str> = r["notes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|n| n.as_str().unwrap())
        .collect();
    assert!(notes
        .iter()
        .any(|n| n.starts_with("interpretation") && n.contains("d_310")));
    assert!(notes.iter().any(|n| n.starts_with("discrepancy")));
}

#[test]
fn missing_delta_key_is_named() {
    let err = run_args(&[
        "efficiency",
        "--params",
        &murthy(),
        "--n",
        "10",
        "--n1",
        "25",
    ])
    .unwrap_err();
    assert!(matches!(&err, CliError::Core(Error::MissingParameter(k)) if k == "d_310"));
    assert!(err.to_string().contains("d_310"));
    assert_eq!(err.exit_code(), 1);
}

#[test]
fn simulate_is_byte_identical_across_runs_and_workers() {
    let base = [
        "simulate",
        "--pop",
        &pop(),
        "--n",
        "3",
        "--n1",
        "4",
        "--estimator",
        "sample-r",
        "--reps",
        "1000",
        "--seed",
        "7",
    ];
    let a = run_args(&base).unwrap();
    assert_eq!(a, run_args(&base).unwrap());
    for w in ["1", "8"] {
        let mut args = base.to_vec();
        args.extend(["--workers", w]);
        assert_eq!(a, run_args(&args).unwrap());
    }
}

#[test]
fn estimate_reports_every_estimator() {
    let out = run_args(&[
        "estimate",
        "--pop",
        &pop(),
        "--n",
        "3",
        "--n1",
        "4",
        "--seed",
        "3",
        "--estimator",
        "t-power:0.5,0.2,-0.1,0.3",
    ])
    .unwrap();
    let doc: Value = serde_json::from_str(&out).unwrap();
    let est = doc["estimates"].as_object().unwrap();
    for key in [
        "sample-r",
        "chain-ratio",
        "t-linear:optimal",
        "h-linear:optimal",
        "difference:optimal",
        "td-star:product",
        "td-star:ratio",
        "td-star:linear",
        "td-star:inverse",
        "t-power:0.5,0.2,-0.1,0.3",
    ] {
        let e = &est[key];
        assert!(
            e.get("value").is_some() || e.get("error").is_some(),
            "{key}"
        );
    }
    assert_eq!(est["sample-r"]["value"], doc["statistics"]["r"]);
}

#[test]
fn clamp_is_opt_in() {
    let args = [
        "estimate",
        "--pop",
        &pop(),
        "--n",
        "3",
        "--n1",
        "4",
        "--seed",
        "7",
    ];
    let plain: Value = serde_json::from_str(&run_args(&args).unwrap()).unwrap();
    let chain = plain["estimates"]["chain-ratio"]["value"].as_f64().unwrap();
    assert!(chain > 1.0);
    let mut clamped_args = args.to_vec();
    clamped_args.push("--clamp");
    let clamped: Value = serde_json::from_str(&run_args(&clamped_args).unwrap()).unwrap();
    assert_eq!(clamped["estimates"]["chain-ratio"]["value"], 1.0);
    assert_eq!(
        clamped["estimates"]["chain-ratio"]["unclamped"]
            .as_f64()
            .unwrap(),
        chain
    );
}

#[test]
fn csv_with_four_rows() {
    let f = write_temp("y,x,z\n1,2,3\n2,1,5\n4,4,4\n3,7,1\n");
    assert_eq!(load_population_csv(f.path()).unwrap().len(), 4);
}

#[test]
fn csv_header_mismatch() {
    let f = write_temp("a,b,c\n1,2,3\n2,1,5\n4,4,4\n3,7,1\n");
    let err = load_population_csv(f.path()).unwrap_err();
    assert!(matches!(err, CliError::HeaderMismatch { ref found, .. } if found == "a,b,c"));
    assert_eq!(err.exit_code(), 1);
}

#[test]
fn csv_errors_carry_line_numbers() {
    let f = write_temp("y,x,z\n1,2,3\n2,oops,5\n4,4,4\n3,7,1\n");
    match load_population_csv(f.path()).unwrap_err() {
        CliError::Csv { line, message, .. } => {
            assert_eq!(line, 3);
            assert!(message.contains("oops"));
        }
        other => panic!("unexpected {other}"),
    }
    let f = write_temp("y,x,z\n1,2,3\n2,5\n4,4,4\n3,7,1\n");
    assert!(matches!(
        load_population_csv(f.path()).unwrap_err(),
        CliError::Csv { line: 3, .. }
    ));
    let f = write_temp("y,x,z\n1,2,3\n2,1,5\n4,4,4\n");
    assert!(matches!(
        load_population_csv(f.path()).unwrap_err(),
        CliError::Core(Error::InvalidFrame(_))
    ));
}

#[test]
fn params_file_round_trips() {
    let doc = load_params_json(&fixture("murthy67.json")).unwrap();
    assert_eq!(doc, murthy_1967_document());
    assert_eq!(doc.get("d_030"), Some(1.295));
    let m = moments_from_params(&doc).unwrap();
    assert_eq!(m.d(0, 3, 0), Ok(1.295));

    // moments output is itself a parameter document
    let out: Value =
        serde_json::from_str(&run_args(&["moments", "--params", &murthy()]).unwrap()).unwrap();
    let f = write_temp(&out["moments"].to_string());
    let again = moments_from_params(&load_params_json(f.path()).unwrap()).unwrap();
    assert_eq!(again.d(0, 4, 0), Ok(3.65));
    assert_eq!(again.rho_yx, Some(0.9136));
}

#[test]
fn bad_params_document() {
    let f = write_temp("{\"d_040\": 1.5, \"d_030\": 1.295}");
    let err = run_args(&["moments", "--params", &f.path().display().to_string()]).unwrap_err();
    assert!(matches!(err, CliError::Core(Error::InvalidParameter(_))));
    let f = write_temp("{\"d_040\": ");
    assert!(matches!(
        run_args(&["moments", "--params", &f.path().display().to_string()]).unwrap_err(),
        CliError::Json { .. }
    ));
}

fn binary(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_twophase"))
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn exit_codes() {
    let ok = binary(&["moments", &pop()]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(
        String::from_utf8(ok.stdout).unwrap(),
        golden("moments_pop.json")
    );

    let missing = binary(&[
        "efficiency",
        "--params",
        &murthy(),
        "--n",
        "10",
        "--n1",
        "25",
    ]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("d_310"));

    let too_many = binary(&[
        "enumerate",
        "--pop",
        &pop(),
        "--n",
        "3",
        "--n1",
        "4",
        "--estimator",
        "sample-r",
        "--cap",
        "10",
    ]);
    assert_eq!(too_many.status.code(), Some(2));

    assert_eq!(
        binary(&["simulate", "--pop", &pop()]).status.code(),
        Some(1)
    );
    assert_eq!(binary(&["--help"]).status.code(), Some(0));
}

#[test]
fn output_flag_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let status = binary(&["moments", &pop(), "--output", &path.display().to_string()]);
    assert_eq!(status.status.code(), Some(0));
    assert!(status.stdout.is_empty());
    assert_eq!(
        std::fs::read_to_string(path).unwrap(),
        golden("moments_pop.json")
    );
}
