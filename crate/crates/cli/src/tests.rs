//! End-to-end runs of the command surface, in process.

use std::path::Path;

use clap::Parser;

use crate::args::Cli;
use crate::error::CliError;

fn parse(argv: &[&str]) -> Result<Cli, clap::Error> {
    Cli::try_parse_from(std::iter::once("dirac-shell").chain(argv.iter().copied()))
}

/// Runs a command writing to `out`, returning the exit code the binary would use.
fn exit_code(argv: &[&str], out: &Path) -> i32 {
    let mut full: Vec<&str> = argv.to_vec();
    let out = out.to_str().unwrap();
    full.extend(["--out", out]);
    match parse(&full) {
        Err(e) => e.exit_code(),
        Ok(cli) => match crate::run(&cli) {
            Ok(()) => 0,
            Err(e) => i32::from(e.exit_code()),
        },
    }
}

fn body_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn spectrum_example_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    assert_eq!(
        exit_code(
            &["spectrum", "--tau", "0", "--m", "1", "--R", "1", "--k-min", "-30", "--k-max", "30"],
            &out
        ),
        0
    );
    let text = std::fs::read_to_string(&out).unwrap();
    let rows = body_rows(&text);
    assert_eq!(rows.len(), 61);
    let row10 = rows.iter().find(|r| r[2] == "10").unwrap();
    let z: f64 = row10[3].parse().unwrap();
    assert!((z - -0.047_183_365_466).abs() < 1e-10);
    assert!(rows.iter().all(|r| r[9] == "ok"));
    // 17 significant digits round-trip exactly
    assert_eq!(crate::output::format_f64(z).parse::<f64>().unwrap(), z);
    // checksum covers the body after the header lines
    let body_start = text.find("tau,eta,k").unwrap();
    let sum = text
        .lines()
        .find_map(|l| l.strip_prefix("# sha256 "))
        .unwrap();
    assert_eq!(
        sum,
        crate::output::sha256_hex(&text.as_bytes()[body_start..])
    );
}

#[test]
fn invalid_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    assert_eq!(
        exit_code(
            &["spectrum", "--tau", "0", "--k-min", "5", "--k-max", "4"],
            &out
        ),
        2
    );
    assert_eq!(
        exit_code(
            &["spectrum", "--eta", "3", "--tau", "0", "--k-min", "0", "--k-max", "1"],
            &out
        ),
        2
    );
    assert_eq!(
        exit_code(
            &["spectrum", "--tau", "0", "--k-min", "0", "--k-max", "1", "--tol", "1e-16"],
            &out
        ),
        2
    );
    assert_eq!(
        exit_code(&["spectrum", "--tau", "0", "--k-min", "0"], &out),
        2
    );
    assert_eq!(
        exit_code(&["spectrum", "--figure", "ev", "--tau", "1"], &out),
        2
    );
    assert_eq!(
        exit_code(
            &["spectrum", "--R", "-1", "--tau", "0", "--k-min", "0", "--k-max", "0"],
            &out
        ),
        2
    );
    assert_eq!(exit_code(&["spectrum", "--bogus"], &out), 2);
    assert_eq!(exit_code(&["line", "--eta", "3", "--tau", "0"], &out), 2);
    assert_eq!(exit_code(&["line", "--tau", "0", "--xi", "b999"], &out), 2);
    assert_eq!(
        exit_code(&["line", "--tau", "0", "--xi", "laguerre:1"], &out),
        2
    );
    assert_eq!(exit_code(&["eigenfunction", "--tau", "0"], &out), 2);
    assert_eq!(
        exit_code(
            &[
                "eigenfunction",
                "--tau",
                "0",
                "--k",
                "1",
                "--r-min",
                "0",
                "--r-max",
                "2",
                "--nr",
                "1"
            ],
            &out
        ),
        2
    );
}

#[test]
fn noncritical_spectrum_is_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("n.csv");
    let code = exit_code(
        &[
            "spectrum",
            "--eta",
            "3",
            "--tau",
            "0",
            "--allow-noncritical",
            "--k-min",
            "0",
            "--k-max",
            "2",
        ],
        &out,
    );
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("# warning non-critical"));
    assert!(code == 0 || code == 3, "{code}");
    // no large-order column for a non-critical pair
    assert!(body_rows(&text).iter().all(|r| r[6].is_empty()));
}

#[test]
fn noncritical_line_reports_the_transfer_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.csv");
    assert_eq!(
        exit_code(
            &["line", "--eta", "3", "--tau", "1", "--allow-noncritical"],
            &out
        ),
        0
    );
    let rows = body_rows(&std::fs::read_to_string(&out).unwrap());
    assert_eq!(rows.len(), 8);
    assert_eq!(rows[0][0], "lambda");
}

#[test]
fn runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    let argv = [
        "spectrum",
        "--tau",
        "5",
        "--eta-sign",
        "-",
        "--k-min",
        "-3",
        "--k-max",
        "3",
        "--format",
        "json",
    ];
    assert_eq!(exit_code(&argv, &a), 0);
    assert_eq!(exit_code(&argv, &b), 0);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let doc: serde_json::Value = serde_json::from_slice(&std::fs::read(&a).unwrap()).unwrap();
    assert_eq!(doc["rows"].as_array().unwrap().len(), 7);
    assert!(
        doc["manifest"]["parameters"]["couplings"][0]["eta"]
            .as_f64()
            .unwrap()
            < 0.0
    );
}

#[test]
fn eigenfunction_header_and_presets() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("e.csv");
    assert_eq!(
        exit_code(
            &["eigenfunction", "--figure", "l2t", "--k", "0", "--nr", "50"],
            &out
        ),
        0
    );
    let text = std::fs::read_to_string(&out).unwrap();
    let state = text.lines().find(|l| l.starts_with("# state k=0")).unwrap();
    assert!(state.contains("norm_check=pass"));
    let rows = body_rows(&text);
    assert_eq!(rows.len(), 50);
    // u real, v imaginary, density = (|u|² + |v|²)/2π
    for r in &rows {
        let f = |j: usize| r[j].parse::<f64>().unwrap();
        assert_eq!((f(3), f(4)), (0.0, 0.0));
        assert!(
            (f(6) - (f(2).powi(2) + f(5).powi(2)) / (2.0 * std::f64::consts::PI)).abs()
                <= 1e-15 * f(6)
        );
    }
    assert_eq!(
        exit_code(&["eigenfunction", "--figure", "modu", "--nr", "30"], &out),
        0
    );
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(
        text.lines().filter(|l| l.starts_with("# state k=")).count(),
        3
    );
}

#[test]
fn line_grid_and_observables() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("l.csv");
    let grid = ["--nx", "5", "--ny", "3"];
    let mut argv = vec!["line", "--eta", "2", "--tau", "0", "--xi", "b0"];
    argv.extend(grid);
    assert_eq!(exit_code(&argv, &out), 0);
    let rows = body_rows(&std::fs::read_to_string(&out).unwrap());
    assert_eq!(rows.len(), 15);
    // the b₀ state at τ = 0 is symmetric under x → −x
    let d = |x: &str, y: &str| {
        rows.iter().find(|r| r[0] == x && r[1] == y).unwrap()[2]
            .parse::<f64>()
            .unwrap()
    };
    let (x, y) = (
        crate::output::format_f64(2.0),
        crate::output::format_f64(0.0),
    );
    let mx = crate::output::format_f64(-2.0);
    assert!((d(&x, &y) - d(&mx, &y)).abs() < 1e-14);

    // the sampled file form of (2b₀ + b₁)/√5 reproduces the coefficient form
    let xi = dir.path().join("xi.csv");
    let mut text = String::from("k,re,im\n# sampled tilted profile\n");
    for j in 0..=1200 {
        let k = -12.0 + 0.02 * j as f64;
        let v = 2.0 / 5f64.sqrt()
            * (2.0 / std::f64::consts::PI).powf(0.25)
            * (k + 1.0)
            * (-k * k).exp();
        text.push_str(&format!("{k},{v},0\n"));
    }
    std::fs::write(&xi, text).unwrap();
    let spec = format!("file:{}", xi.display());
    let coef = format!("hermite:{},{}", 2.0 / 5f64.sqrt(), 1.0 / 5f64.sqrt());
    let (from_file, from_coef) = (dir.path().join("f.csv"), dir.path().join("c.csv"));
    assert_eq!(
        exit_code(
            &[
                "line",
                "--eta",
                "sqrt13",
                "--tau",
                "-3",
                "--xi",
                &spec,
                "--observables"
            ],
            &from_file
        ),
        0
    );
    assert_eq!(
        exit_code(
            &[
                "line",
                "--eta",
                "sqrt13",
                "--tau",
                "-3",
                "--xi",
                &coef,
                "--observables"
            ],
            &from_coef
        ),
        0
    );
    let a = body_rows(&std::fs::read_to_string(&from_file).unwrap());
    let b = body_rows(&std::fs::read_to_string(&from_coef).unwrap());
    assert_eq!(a.len(), b.len());
    for (ra, rb) in a.iter().zip(&b) {
        assert_eq!(ra[..2], rb[..2]);
        let (x, y) = (ra[2].parse::<f64>().unwrap(), rb[2].parse::<f64>().unwrap());
        assert!((x - y).abs() < 1e-6, "{ra:?} {rb:?}");
        assert!(ra[4].parse::<f64>().unwrap().abs() < 1e-5, "{ra:?}");
    }
    let x_mean = b.iter().find(|r| r[0] == "x" && r[1] == "mean").unwrap()[2]
        .parse::<f64>()
        .unwrap();
    assert!(x_mean.abs() > 1e-3);
}

#[test]
fn verify_reports_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("v.json");
    assert_eq!(exit_code(&["verify", "--suite", "symmetry"], &out), 0);
    let doc: serde_json::Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(doc["suite"], "symmetry");
    let checks = doc["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 2);
    assert!(checks
        .iter()
        .all(|c| c["pass"] == true && c["value"].as_f64().unwrap() <= 1e-10));
}

#[test]
fn error_codes() {
    assert_eq!(
        CliError::Verify {
            failed: 1,
            total: 2
        }
        .exit_code(),
        1
    );
    assert_eq!(
        CliError::Solver {
            failed: 1,
            total: 2
        }
        .exit_code(),
        3
    );
    assert_eq!(
        CliError::Core(dirac_shell::Error::NoRoot { k: 1 }).exit_code(),
        3
    );
    assert_eq!(
        CliError::Core(dirac_shell::Error::Domain("x".into())).exit_code(),
        2
    );
}
