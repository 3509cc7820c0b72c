use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hpqfim::hybrid::hpqfim;
use hpqfim::matlib::schur_complement;
use hpqfim::{BlockSym, SymMat};
use hpqfim_cli::config::SweepConfig;
use hpqfim_cli::sweep::{compute_rows, parse_csv, to_csv, SweepRow};
use hpqfim_cli::verify::{run_verify, Hooks, Suite};
use hpqfim_cli::CliError;
use serde_json::Value;

fn hpqfim_bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hpqfim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn show(text: &str, extra: &[&str]) -> Output {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "show.cfg", text);
    let mut args = vec!["show", cfg.to_str().unwrap()];
    args.extend_from_slice(extra);
    hpqfim_bin(&args)
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn matrix(v: &Value) -> Vec<Vec<f64>> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|row| row.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect())
        .collect()
}

#[test]
fn config_errors_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("unknown key", "model.name = direction\nprior.kind = uniform\nmodel.colour = red\n"),
        ("missing model", "prior.kind = uniform\n"),
        ("bad number", "model.name = extra_rotation\nmodel.r = half\nmodel.phi = pi/2\nprior.kind = uniform\n"),
        ("radius out of range", "model.name = extra_rotation\nmodel.r = 1.5\nmodel.phi = pi/2\nprior.kind = uniform\n"),
        ("duplicate key", "model.name = direction\nmodel.name = direction\nprior.kind = uniform\n"),
        ("stray prior parameter", "model.name = direction\nprior.kind = uniform\nprior.kappa = 2\n"),
        ("direction radius", "model.name = direction\nmodel.r = 0.5\nprior.kind = uniform\n"),
        ("no prior", "model.name = direction\n"),
        ("one grid point", "model.name = direction\nprior.kind = uniform\nsweep.grid_points = 1\n"),
    ];
    for (label, text) in cases {
        let cfg = write_config(dir.path(), "bad.cfg", text);
        let out = hpqfim_bin(&["sweep", cfg.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2), "{label}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stderr.is_empty(), "{label}");
    }
    let missing = hpqfim_bin(&["sweep", dir.path().join("absent.cfg").to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn config_error_names_the_line() {
    let err = SweepConfig::from_text("model.name = direction\n\nbogus = 1\n", Path::new(".")).unwrap_err();
    match err {
        CliError::ConfigLine { line, .. } => assert_eq!(line, 3),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn sweep_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "run.cfg",
        "model.name = additional_sine\nmodel.r = 0.5\nmodel.phi = pi/3\nprior.kind = von_mises\nprior.kappa = 2\nsweep.grid_points = 64\noutput.path = out.csv\n",
    );
    let run = || {
        let out = hpqfim_bin(&["sweep", cfg.to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        std::fs::read(dir.path().join("out.csv")).unwrap()
    };
    let first = run();
    let second = run();
    assert_eq!(first, second);
    assert!(first.starts_with(b"theta_I,inv_L,inv_M,inv_U,flags\n"));
}

#[test]
fn csv_round_trip_preserves_values() {
    let rows = vec![
        SweepRow {
            theta_i: 0.1,
            inv_l: 4.0,
            inv_m: 1.0 / 3.0,
            inv_u: f64::INFINITY,
            flags: vec!["low_singular".into(), "pinv_nodes=2".into()],
        },
        SweepRow {
            theta_i: PI,
            inv_l: 1e-300,
            inv_m: 123456.789,
            inv_u: 5e300,
            flags: vec![],
        },
    ];
    assert_eq!(parse_csv(&to_csv(&rows).unwrap()).unwrap(), rows);

    let cfg = SweepConfig::from_text(
        "model.name = extra_rotation\nmodel.r = 0.5\nmodel.phi = pi/2\nprior.kind = uniform\nsweep.grid_points = 8\n",
        Path::new("."),
    )
    .unwrap();
    let computed = compute_rows(&cfg).unwrap();
    let text = to_csv(&computed).unwrap();
    assert_eq!(parse_csv(&text).unwrap(), computed);
    assert!(text.contains("inf"));
    assert!(computed.iter().all(|r| r.flags.contains(&"hpqfim_singular".to_string())));
}

#[test]
fn direction_sweep_matches_closed_form() {
    let cfg = SweepConfig::from_text(
        "model.name = direction\nmodel.nuisance.lo = 0.01\nmodel.nuisance.hi = 0.99\nprior.kind = uniform\nsweep.grid_points = 30\n",
        Path::new("."),
    )
    .unwrap();
    let e_r2 = (0.99f64.powi(3) - 0.01f64.powi(3)) / (3.0 * 0.98);
    for row in compute_rows(&cfg).unwrap() {
        let expected = (1.0 + row.theta_i.sin().powi(-2)) / e_r2;
        for v in [row.inv_l, row.inv_m, row.inv_u] {
            assert!((v - expected).abs() <= 1e-10 * expected, "{row:?}");
        }
        assert!(row.flags.is_empty());
    }
}

#[test]
fn anisotropic_sweep_is_symmetric() {
    let cfg = SweepConfig::from_text(
        "model.name = anisotropic_shrink\nmodel.r = 0.6\nmodel.phi = pi/2\nprior.kind = uniform\nsweep.grid_points = 20\nsweep.theta_min = 0\nsweep.theta_max = pi\n",
        Path::new("."),
    )
    .unwrap();
    let rows = compute_rows(&cfg).unwrap();
    for (a, b) in rows.iter().zip(rows.iter().rev()) {
        assert!((a.theta_i + b.theta_i - PI).abs() < 1e-12);
        for (x, y) in [(a.inv_l, b.inv_l), (a.inv_m, b.inv_m), (a.inv_u, b.inv_u)] {
            assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0), "{a:?} {b:?}");
        }
    }
}

#[test]
fn show_direction_pointwise_blocks() {
    let out = show(
        "model.name = direction\nprior.kind = uniform\n",
        &["--theta-i", "pi/2,0", "--theta-n", "0.6"],
    );
    let doc = json(&out);
    let j = matrix(&doc["pointwise"]["J"]);
    let expected = [[0.36, 0.0, 0.0], [0.0, 0.36, 0.0], [0.0, 0.0, 1.5625]];
    for i in 0..3 {
        for k in 0..3 {
            assert!((j[i][k] - expected[i][k]).abs() < 1e-12, "{j:?}");
        }
    }
    assert_eq!(doc["model"], "direction");
    assert!(doc["r"].is_null());
    assert!(doc["hybrid"].is_object());
}

#[test]
fn show_extra_rotation_conditional_is_zero() {
    let out = show(
        "model.name = extra_rotation\nmodel.r = 0.5\nmodel.phi = pi/2\nprior.kind = uniform\n",
        &["--theta-i", "1.0", "--theta-n", "2.0"],
    );
    let doc = json(&out);
    assert_eq!(matrix(&doc["pointwise"]["J_I_given_N"]), vec![vec![0.0]]);
    assert_eq!(doc["hybrid"]["inv_M"], "inf");
    assert_eq!(doc["hybrid"]["inv_U"], "inf");
    assert_eq!(doc["hybrid"]["risk_bound"], "inf");
    assert!((matrix(&doc["hybrid"]["inv_L"])[0][0] - 4.0).abs() < 1e-12);
}

#[test]
fn show_prints_full_precision() {
    let out = show(
        "model.name = direction\nprior.kind = uniform\n",
        &["--theta-i", "1,0", "--theta-n", "0.3"],
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("9.0000000000000002e-2") || text.contains("8.9999999999999997e-2"), "{text}");
}

#[test]
fn show_rejects_points_outside_the_domain() {
    for args in [
        ["--theta-i", "pi/2,0", "--theta-n", "1.2"],
        ["--theta-i", "4,0", "--theta-n", "0.5"],
        ["--theta-i", "pi/2,0", "--theta-n", "0"],
    ] {
        let out = show("model.name = direction\nprior.kind = uniform\n", &args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
    let out = show("model.name = direction\nprior.kind = uniform\n", &["--theta-i", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn show_reports_measurement_section() {
    let cfg = "model.name = direction\nprior.kind = uniform\nseed = 3\npovm.elements = 0.5,0,0,0.5; 0.5,0,0,-0.5\n";
    let doc = json(&show(cfg, &["--theta-i", "pi/3,0", "--theta-n", "0.5"]));
    let m = &doc["measurement"];
    assert_eq!(m["outcomes"], 2);
    let p: Vec<f64> = m["probabilities"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    let z = 0.5 * (PI / 3.0).cos();
    assert!((p[0] - 0.5 * (1.0 + z)).abs() < 1e-15 && (p[1] - 0.5 * (1.0 - z)).abs() < 1e-15);
    assert_eq!(m["data_processing"]["holds"], true);
    // A z measurement carries no information about φ.
    assert_eq!(m["chain"]["classical"], "inf");
    assert_eq!(m["chain"]["verdict"], "holds");
    assert!(m["empirical_risk"]["error"].is_string());
    assert!(doc["pointwise"]["entropy_nats"].as_f64().unwrap() > 0.0);

    let zx = "model.name = direction\nprior.kind = uniform\nseed = 3\nmeasure.samples = 20000\npovm.elements = 0.25,0,0,0.25; 0.25,0,0,-0.25; 0.25,0.25,0,0; 0.25,-0.25,0,0\n";
    let first = json(&show(zx, &["--theta-i", "pi/2,pi/4"]));
    assert_eq!(first["measurement"]["empirical_risk"]["seed"], 3);
    assert_eq!(first["measurement"]["empirical_risk"]["n_samples"], 20000);
    assert_eq!(first, json(&show(zx, &["--theta-i", "pi/2,pi/4"])));

    for bad in [
        "povm.elements = 0.5,0,0,0.6; 0.5,0,0,-0.6",
        "povm.elements = 0.5,0,0; 0.5,0,0,0",
        "povm.elements = 0.4,0,0,0.1; 0.4,0,0,-0.1",
        "measure.samples = 10",
    ] {
        let out = show(&format!("model.name = direction\nprior.kind = uniform\n{bad}\n"), &["--theta-i", "1,1"]);
        assert_eq!(out.status.code(), Some(2), "{bad}");
    }
}

#[test]
fn verify_matrix_suite_passes() {
    let out = hpqfim_bin(&["verify", "matrix"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().filter(|l| l.starts_with("PASS")).count() >= 4);
    assert!(!text.contains("FAIL"));
    assert_eq!(hpqfim_bin(&["verify", "everything"]).status.code(), Some(2));
}

fn flipped_sign(avg: &BlockSym, j_pi: &SymMat) -> hpqfim::Result<SymMat> {
    let h = hpqfim(avg, j_pi)?;
    // ii + correction instead of ii − correction.
    avg.ii.add(&avg.ii.sub(&h)?)
}

#[test]
fn verify_catches_flipped_schur_sign() {
    let hooks = Hooks { hpqfim: flipped_sign };
    let mut buf = Vec::new();
    let report = run_verify(Suite::Bounds, &hooks, &mut buf).unwrap();
    assert!(!report.passed());
    let text = String::from_utf8(buf).unwrap();
    let line = text
        .lines()
        .find(|l| l.starts_with("FAIL bounds/bracketing"))
        .expect("bracketing fails");
    let witness: f64 = line
        .split("min eigenvalue ")
        .nth(1)
        .unwrap()
        .split(';')
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert!(witness < -1e-3, "{line}");

    let mut clean = Vec::new();
    assert!(run_verify(Suite::Bounds, &Hooks::default(), &mut clean).unwrap().passed());
}

#[test]
fn schur_hook_default_is_library_routine() {
    let avg = BlockSym::scalars(2.0, 1.0, 1.0);
    let j = SymMat::scalar(1.0);
    let h = (Hooks::default().hpqfim)(&avg, &j).unwrap();
    assert!((h.get(0, 0) - 1.5).abs() < 1e-15);
    assert_eq!(schur_complement(&avg).unwrap().get(0, 0), 1.0);
}
