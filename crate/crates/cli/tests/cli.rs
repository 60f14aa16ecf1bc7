use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kg-galerkin"))
        .args(args)
        .arg("--out-dir")
        .arg(dir)
        .env_remove("KG_GALERKIN_OUT")
        .output()
        .expect("spawn kg-galerkin")
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

/// Data rows of a CLI CSV, header included, comments dropped.
fn csv_lines(path: &Path) -> Vec<String> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(str::to_owned)
        .collect()
}

#[test]
fn stationary_without_solutions_warns_and_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["stationary", "--lambda", "-0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("no nontrivial stationary solutions"), "{err}");
    let rows = csv_lines(&dir.path().join("stationary_branches.csv"));
    assert_eq!(rows.len(), 1);
}

#[test]
fn physical_parameters_resolve_lambda() {
    let dir = tempfile::tempdir().unwrap();
    let beta = format!("{:e}", -std::f64::consts::PI.powi(2) / 100.0);
    let out = run(
        dir.path(),
        &[
            "stationary",
            "--beta",
            &beta,
            "--phi0",
            "10",
            "--ell",
            "1",
            "--branches",
            "1",
        ],
    );
    assert!(out.status.success());
    let text = fs::read_to_string(dir.path().join("stationary_branches.csv")).unwrap();
    assert!(text.contains("# lambda = 1.0000000000000000e0"), "{text}");
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cases: &[&[&str]] = &[
        &["stationary"],
        &[
            "stationary",
            "--lambda",
            "1",
            "--beta",
            "1",
            "--phi0",
            "1",
            "--ell",
            "1",
        ],
        &["evolve", "--lambda", "-10", "--init", "A=1,x"],
        &["evolve", "--lambda", "-10", "--n", "2", "--init", "A=1,2,3"],
        &["evolve", "--lambda", "-10"],
        &["evolve", "--lambda", "-10", "--init", "A=1", "--dt", "0"],
        &["residual", "--state", "A=1,0", "--grid", "4"],
        &["residual"],
        &["critical", "--lambda", "nan"],
        &["stationary", "--beta", "1", "--phi0", "1", "--ell", "-1"],
    ];
    for args in cases {
        let out = run(dir.path(), args);
        assert_eq!(
            out.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn divergence_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        &[
            "evolve", "--lambda", "5", "--n", "3", "--init", "A=20", "--tmax", "5",
        ],
    );
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn linear_oscillator_half_period() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        &[
            "evolve", "--lambda", "0", "--n", "1", "--init", "A=1", "--tmax", "3.14159",
        ],
    );
    assert!(out.status.success());
    let s = json(&dir.path().join("evolve_summary.json"));
    let a1 = s["final_positions"][0].as_f64().unwrap();
    assert!((a1 + 1.0).abs() < 1e-5, "{a1}");
}

#[test]
fn evolve_is_byte_identical_across_runs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = [
        "evolve",
        "--lambda",
        "-10",
        "--n",
        "10",
        "--init",
        "A=1,1,-1,1",
        "--tmax",
        "2",
    ];
    assert!(run(a.path(), &args).status.success());
    assert!(run(b.path(), &args).status.success());
    for f in ["trajectory.csv", "final_state.csv", "evolve_summary.json"] {
        assert_eq!(
            fs::read(a.path().join(f)).unwrap(),
            fs::read(b.path().join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn trajectory_layout() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        &[
            "evolve",
            "--lambda",
            "-10",
            "--n",
            "3",
            "--init",
            "A=1;V=0,0.5",
            "--tmax",
            "0.1",
            "--sample-every",
            "25",
        ],
    );
    assert!(out.status.success());
    let rows = csv_lines(&dir.path().join("trajectory.csv"));
    assert_eq!(rows[0], "tau,A_1,A_2,A_3,V_1,V_2,V_3,H");
    // 100 steps sampled every 25, plus the initial state
    assert_eq!(rows.len(), 1 + 5);
    assert!(rows[1].starts_with("0.0000000000000000e0,1.0000000000000000e0,"));
    assert!(rows[1].contains(",5.0000000000000000e-1,"));
}

#[test]
fn evolve_from_field_file_matches_coefficients() {
    let dir = tempfile::tempdir().unwrap();
    let field = dir.path().join("u0.csv");
    let g = 256;
    let mut text = String::from("xi,u\n");
    for j in 0..=g {
        let xi = std::f64::consts::PI * j as f64 / g as f64;
        let u = 2f64.sqrt() * (xi.sin() - 0.5 * (3.0 * xi).sin());
        text.push_str(&format!("{xi:.17e},{u:.17e}\n"));
    }
    fs::write(&field, text).unwrap();
    let f = dir.path().join("f");
    let c = dir.path().join("c");
    let fs_path = field.to_str().unwrap();
    let common = ["evolve", "--lambda", "-10", "--n", "4", "--tmax", "0.5"];
    let mut by_field = common.to_vec();
    by_field.extend(["--field", fs_path]);
    let mut by_coeff = common.to_vec();
    by_coeff.extend(["--init", "A=1,0,-0.5"]);
    assert!(run(&f, &by_field).status.success());
    assert!(run(&c, &by_coeff).status.success());
    let pf = json(&f.join("evolve_summary.json"))["final_positions"].clone();
    let pc = json(&c.join("evolve_summary.json"))["final_positions"].clone();
    for i in 0..4 {
        let (x, y) = (pf[i].as_f64().unwrap(), pc[i].as_f64().unwrap());
        assert!((x - y).abs() < 1e-10, "mode {}: {x} vs {y}", i + 1);
    }
}

#[test]
fn residual_of_single_exact_mode_vanishes() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run(dir.path(), &["residual", "--state", "A=1", "--n", "3"])
        .status
        .success());
    let total = json(&dir.path().join("residual_summary.json"))["total"]
        .as_f64()
        .unwrap();
    assert!(total.abs() < 1e-10, "{total}");
}

#[test]
fn evolve_then_residual_decreases_with_n() {
    let dir = tempfile::tempdir().unwrap();
    let mut totals = Vec::new();
    for n in ["10", "20", "40"] {
        let run_dir = dir.path().join(n);
        let out = run(
            &run_dir,
            &[
                "evolve",
                "--lambda",
                "-10",
                "--n",
                n,
                "--init",
                "A=1,1,-1,1",
                "--tmax",
                "1",
            ],
        );
        assert!(out.status.success());
        let state = run_dir.join("final_state.csv");
        let out = run(
            &run_dir,
            &["residual", "--state-file", state.to_str().unwrap()],
        );
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        let s = json(&run_dir.join("residual_summary.json"));
        assert_eq!(s["tau"].as_f64(), Some(1.0));
        totals.push(s["total"].as_f64().unwrap());
    }
    assert!(totals[0] > totals[1] && totals[1] > totals[2], "{totals:?}");
}

#[test]
fn critical_points_csv_and_trivial_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        &["critical", "--lambda", "5", "--n", "5", "--points", "3"],
    );
    assert!(out.status.success());
    let rows = csv_lines(&dir.path().join("critical_points.csv"));
    assert_eq!(rows.len(), 4);
    assert!(rows[0].starts_with("label,U,classification,A_1,"));
    assert!(rows[2].starts_with("2,7.2500000000000"), "{}", rows[2]);
    let s = json(&dir.path().join("critical_summary.json"));
    assert_eq!(s["trivial_U"].as_f64(), Some(-6.25));
    assert_eq!(s["trivial_classification"], "MIN");
    assert_eq!(s["meta"]["seed"], "20240607");
}

#[test]
fn critical_with_landscape_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        &[
            "critical",
            "--lambda",
            "-10",
            "--n",
            "3",
            "--landscape",
            "--range",
            "4",
            "--resolution",
            "41",
        ],
    );
    assert!(out.status.success());
    let rows = csv_lines(&dir.path().join("landscape.csv"));
    assert_eq!(rows[0], "A_1,A_3,U");
    assert_eq!(rows.len(), 1 + 41 * 41);
    // centre of the grid is the origin, U = lambda^2 / 4
    assert_eq!(
        rows[1 + 20 * 41 + 20],
        "0.0000000000000000e0,0.0000000000000000e0,2.5000000000000000e1"
    );
}

#[test]
fn json_format_is_column_oriented() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        &["tensor", "--max-index", "2", "--format", "json"],
    );
    assert!(out.status.success());
    let t = json(&dir.path().join("tensor.json"));
    let n = t["n"].as_array().unwrap().len();
    assert_eq!(t["D"].as_array().unwrap().len(), n);
    assert_eq!(t["meta"]["max_index"], "2");
    // D_1111 = 3/2 is the first entry
    assert_eq!(t["D"][0].as_f64(), Some(1.5));
}

#[test]
fn landscape_command() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        &[
            "landscape",
            "--lambda",
            "5",
            "--range",
            "2",
            "--resolution",
            "3",
        ],
    );
    assert!(out.status.success());
    let rows = csv_lines(&dir.path().join("landscape.csv"));
    assert_eq!(rows.len(), 10);
    assert_eq!(
        rows[5],
        "0.0000000000000000e0,0.0000000000000000e0,-6.2500000000000000e0"
    );
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("from-env");
    let out = Command::new(env!("CARGO_BIN_EXE_kg-galerkin"))
        .args(["tensor", "--max-index", "1"])
        .env("KG_GALERKIN_OUT", &target)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(target.join("tensor.csv").exists());
}
