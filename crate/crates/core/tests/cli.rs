use std::path::Path;
use std::process::{Command, Output};

fn sglab(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sglab"))
        .args(args)
        .current_dir(cwd)
        .env_remove("SGLAB_OUT")
        .output()
        .expect("binary runs")
}

fn text(o: &Output) -> String {
    format!(
        "{}{}",
        String::from_utf8_lossy(&o.stdout),
        String::from_utf8_lossy(&o.stderr)
    )
}

#[test]
fn kernel_writes_mode_table_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let o = sglab(
        &[
            "kernel", "--ell", "3.14159", "--alpha", "0.5", "--eps", "0.1", "--tmax", "20",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    for f in ["modes.csv", "kernel.csv", "regime.json"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let modes = std::fs::read_to_string(dir.path().join("modes.csv")).unwrap();
    let row: Vec<&str> = modes.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[0], "1");
    let num = |i: usize| row[i].parse::<f64>().unwrap();
    assert!((num(1) - 1.0).abs() < 1e-5);
    assert!((num(2) - 0.3).abs() < 1e-5);
    assert!((num(3) + 0.91).abs() < 1e-4);
    assert_eq!(row[4], "trigonometric");
    let kernel = std::fs::read_to_string(dir.path().join("kernel.csv")).unwrap();
    assert_eq!(kernel.lines().count(), 41);
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("regime.json")).unwrap())
            .unwrap();
    assert_eq!(summary["split"]["n2"], 19);
}

#[test]
fn probes_are_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &'static str, seed: &'static str| {
        vec![
            "kernel", "--ell", "3", "--alpha", "0.5", "--eps", "0.2", "--probes", "5", "--seed",
            seed, "--out", out,
        ]
    };
    for (out, seed) in [("a", "1"), ("b", "1"), ("c", "2")] {
        assert_eq!(sglab(&args(out, seed), dir.path()).status.code(), Some(0));
    }
    let read = |d: &str| std::fs::read(dir.path().join(d).join("probes.csv")).unwrap();
    assert_eq!(read("a"), read("b"));
    assert_ne!(read("a"), read("c"));
}

#[test]
fn usage_and_validation_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let o = sglab(&["kernel", "--alpha", "0.5", "--eps", "0.1"], dir.path());
    assert_eq!(o.status.code(), Some(2), "{}", text(&o));
    assert!(text(&o).contains("--ell"));

    let o = sglab(
        &[
            "kernel", "--ell", "3.14159", "--alpha", "0.5", "--eps", "1.5",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(3));
    assert!(text(&o).contains("0 < eps < 1"), "{}", text(&o));

    assert_eq!(sglab(&["frobnicate"], dir.path()).status.code(), Some(2));
    assert_eq!(
        sglab(&["solve", "--solver", "spectral"], dir.path())
            .status
            .code(),
        Some(2)
    );

    let o = sglab(&["solve", "--nx", "129", "--nt", "50"], dir.path());
    assert_eq!(o.status.code(), Some(3));
    assert!(text(&o).contains("CFL"));
}

#[test]
fn config_file_supplies_and_rejects_keys() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.toml");
    std::fs::write(&good, "seed = 3\noutput_dir = \"from_config\"\n[model]\nell = 3.0\nalpha = 0.5\neps = 0.2\n[kernel]\ntmax = 5.0\nt_points = 4\n").unwrap();
    let o = sglab(&["--config", good.to_str().unwrap(), "kernel"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    let k = std::fs::read_to_string(dir.path().join("from_config/kernel.csv")).unwrap();
    assert_eq!(k.lines().count(), 5);

    // flags override the file
    let o = sglab(
        &["--config", good.to_str().unwrap(), "kernel", "--eps", "1.5"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(3));

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[model]\nell = 3.0\nbogus = 1\n").unwrap();
    let o = sglab(&["--config", bad.to_str().unwrap(), "kernel"], dir.path());
    assert_eq!(o.status.code(), Some(3));
    assert!(text(&o).contains("bogus"));
}

#[test]
fn output_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_sglab"))
        .args([
            "kernel", "--ell", "3", "--alpha", "0.5", "--eps", "0.2", "--tmax", "2",
        ])
        .current_dir(dir.path())
        .env("SGLAB_OUT", dir.path().join("env_out"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(dir.path().join("env_out/modes.csv").exists());
}

#[test]
fn solve_equilibrium_gives_constant_field() {
    let dir = tempfile::tempdir().unwrap();
    let o = sglab(
        &[
            "solve",
            "--solver",
            "parabolic",
            "--family",
            "equilibrium",
            "--nx",
            "33",
            "--nt",
            "64",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    let snap = sglab::pde::read_field_csv(
        std::fs::File::open(dir.path().join("field_parabolic.csv")).unwrap(),
    )
    .unwrap();
    assert!(snap
        .values
        .iter()
        .flatten()
        .all(|v| (v - std::f64::consts::PI).abs() < 1e-12));
    let run: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("run.json")).unwrap())
            .unwrap();
    assert_eq!(run["grid"]["nx"], 33);
}

#[test]
fn solve_hyperbolic_kink_matches_exact() {
    let dir = tempfile::tempdir().unwrap();
    let o = sglab(
        &[
            "solve",
            "--solver",
            "hyperbolic",
            "--family",
            "basic",
            "--stride",
            "8",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    let run: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("run.json")).unwrap())
            .unwrap();
    let err = run["max_diff_from_exact"].as_f64().unwrap();
    assert!(err < 1e-3, "{err}");
    assert!(run["neumann_flux_error"].as_f64().unwrap() < 1e-2);
    assert!(dir.path().join("field_exact.csv").exists());
}

#[test]
fn solve_memory_reports_comparison() {
    let dir = tempfile::tempdir().unwrap();
    let o = sglab(
        &[
            "solve",
            "--solver",
            "memory",
            "--family",
            "equilibrium",
            "--level",
            "0",
            "--nx",
            "33",
            "--nt",
            "64",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    let run: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("run.json")).unwrap())
            .unwrap();
    assert!(run["memory_comparison"]["note"]
        .as_str()
        .unwrap()
        .contains("gamma -> -gamma"));
}

#[test]
fn single_eps_sweep_reports_degenerate_fit() {
    let dir = tempfile::tempdir().unwrap();
    let o = sglab(&["sweep", "--eps", "0.05"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    let out = text(&o);
    assert!(out.contains("degenerate fit"), "{out}");
    assert!(out.contains("sup_S / bound ratio spread"));
    let report: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("sweep_report.json")).unwrap(),
    )
    .unwrap();
    assert!(report["boundary_layer"]["fitted_exponent"].is_null());
    assert!(dir.path().join("lemma_report.json").exists());
    assert!(dir.path().join("sweep_profiles.csv").exists());
}

#[test]
fn sweep_grid_guard_surfaces_as_numerical_failure() {
    let dir = tempfile::tempdir().unwrap();
    // no room to refine: the 5% guard cannot be checked
    let o = sglab(
        &["sweep", "--eps", "0.1", "--nx-start", "9", "--nx-max", "9"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(4), "{}", text(&o));
    assert!(text(&o).contains("eps = 0.1"));
}
