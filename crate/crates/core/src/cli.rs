//! The `sglab` command line: `kernel`, `solve` and `sweep`, each writing
//! CSV/JSON artifacts into an output directory.
//!
//! Parameters come from flags, then from an optional TOML file
//! (`--config`), then from built-in defaults. The output directory falls
//! back to `$SGLAB_OUT` and then to the working directory.
//!
//! Exit codes: 0 success, 2 usage, 3 invalid input, 4 numerical or I/O failure.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimates::{
    boundary_layer_sweep, lemma_checks, linspace, theorem3_check, Gate, GridPolicy, LemmaConstants,
    ScalingParams,
};
use crate::exact::{kink_value, neumann_data_from, Family, KinkFamily, NeumannData};
use crate::params::ModelParams;
use crate::pde::io::fmt_f64;
use crate::pde::{
    boundary_flux, compare_memory_parabolic, save_field_csv, solve_hyperbolic, solve_memory,
    solve_parabolic, Field, Grid,
};
use crate::spectral_kernel::{
    decay_profile, envelope_rates, hyperbolic_start, mode_data, regime_split, theta_sum,
    TruncationPolicy,
};

pub const EXIT_VALIDATION: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "sglab",
    version,
    about = "Perturbed sine-Gordon Neumann problem: kernel, solvers, estimates"
)]
pub struct Cli {
    /// TOML file with [model], [kernel], [solve], [sweep] and [lemma] sections.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (default: $SGLAB_OUT, then ".").
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for randomized probe points.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mode table, kernel decay profile and regime summary.
    Kernel(KernelArgs),
    /// Run one solver on exact-solution or equilibrium data.
    Solve(SolveArgs),
    /// Boundary-layer scaling sweep plus kernel-envelope and band-lemma gates.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct KernelArgs {
    #[arg(long)]
    pub ell: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Last time of the decay profile (first is `--tmin`, at least 1).
    #[arg(long)]
    pub tmax: Option<f64>,
    #[arg(long)]
    pub tmin: Option<f64>,
    #[arg(long)]
    pub t_points: Option<usize>,
    /// Rows of modes.csv (default: max(2 N2, 32)).
    #[arg(long)]
    pub modes: Option<u64>,
    #[arg(long)]
    pub max_modes: Option<u64>,
    #[arg(long)]
    pub tail_tol: Option<f64>,
    /// Random (x, xi, t) kernel evaluations written to probes.csv.
    #[arg(long)]
    pub probes: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Parabolic,
    Hyperbolic,
    Memory,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataKind {
    Basic,
    Gamma0,
    Gamma1,
    /// Constant state `--level` at rest with zero flux.
    Equilibrium,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long, value_enum)]
    pub solver: Option<SolverKind>,
    #[arg(long, value_enum)]
    pub family: Option<DataKind>,
    #[arg(long)]
    pub ell: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub horizon: Option<f64>,
    #[arg(long)]
    pub nx: Option<usize>,
    #[arg(long)]
    pub nt: Option<usize>,
    #[arg(long)]
    pub r0: Option<f64>,
    #[arg(long)]
    pub level: Option<f64>,
    /// Save every `stride`-th time level.
    #[arg(long)]
    pub stride: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub ell: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub k: Option<f64>,
    /// Comma-separated eps values of the boundary-layer sweep.
    #[arg(long, value_delimiter = ',')]
    pub eps: Option<Vec<f64>>,
    /// Comma-separated eps values of the kernel-envelope and lemma checks.
    #[arg(long, value_delimiter = ',')]
    pub kernel_eps: Option<Vec<f64>>,
    #[arg(long)]
    pub tmax: Option<f64>,
    #[arg(long)]
    pub t_points: Option<usize>,
    #[arg(long)]
    pub nx_start: Option<usize>,
    #[arg(long)]
    pub nx_max: Option<usize>,
    #[arg(long)]
    pub courant: Option<f64>,
    #[arg(long)]
    pub stabilization: Option<f64>,
    #[arg(long)]
    pub tail_modes: Option<u64>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long = "lemma-h")]
    pub lemma_h: Option<f64>,
    #[arg(long = "lemma-k")]
    pub lemma_k: Option<f64>,
}

// ---------------------------------------------------------------------------
// config file

#[derive(Debug, Default, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    pub ell: Option<f64>,
    pub alpha: Option<f64>,
    pub eps: Option<f64>,
    pub gamma: Option<f64>,
    pub horizon: Option<f64>,
}

#[derive(Debug, Default, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KernelSection {
    pub tmin: Option<f64>,
    pub tmax: Option<f64>,
    pub t_points: Option<usize>,
    pub modes: Option<u64>,
    pub max_modes: Option<u64>,
    pub tail_tol: Option<f64>,
    pub probes: Option<usize>,
}

#[derive(Debug, Default, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveSection {
    pub solver: Option<SolverKind>,
    pub family: Option<DataKind>,
    pub nx: Option<usize>,
    pub nt: Option<usize>,
    pub r0: Option<f64>,
    pub level: Option<f64>,
    pub stride: Option<usize>,
}

#[derive(Debug, Default, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub k: Option<f64>,
    pub eps_list: Option<Vec<f64>>,
    pub kernel_eps: Option<Vec<f64>>,
    pub tmax: Option<f64>,
    pub t_points: Option<usize>,
    pub nx_start: Option<usize>,
    pub nx_max: Option<usize>,
    pub courant: Option<f64>,
    pub stabilization: Option<f64>,
    pub tail_modes: Option<u64>,
}

#[derive(Debug, Default, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LemmaSection {
    pub eta: Option<f64>,
    pub h: Option<f64>,
    pub k: Option<f64>,
}

/// Contents of a `--config` file; unknown keys are rejected.
#[derive(Debug, Default, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    pub model: ModelSection,
    pub kernel: KernelSection,
    pub solve: SolveSection,
    pub sweep: SweepSection,
    pub lemma: LemmaSection,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| {
            Error::InvalidParams(format!("config {}: {}", path.display(), e.message()))
        })
    }
}

fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

fn require<T>(flag: Option<T>, file: Option<T>, name: &str) -> Result<T> {
    flag.or(file)
        .ok_or_else(|| Error::InvalidParams(format!("missing --{name} (flag or config)")))
}

// ---------------------------------------------------------------------------
// entry points

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    if let Err(code) = check_required(&cli) {
        return code;
    }
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// `kernel` needs `ell`, `alpha` and `eps` from flags or the config file;
/// a missing one is a usage error.
fn check_required(cli: &Cli) -> std::result::Result<(), i32> {
    let Command::Kernel(a) = &cli.command else {
        return Ok(());
    };
    let model = match &cli.config {
        Some(p) => match RunConfig::load(p) {
            Ok(c) => c.model,
            Err(e) => {
                eprintln!("error: {e}");
                return Err(exit_code(&e));
            }
        },
        None => ModelSection::default(),
    };
    let missing: Vec<&str> = [
        ("--ell <ELL>", a.ell.or(model.ell)),
        ("--alpha <ALPHA>", a.alpha.or(model.alpha)),
        ("--eps <EPS>", a.eps.or(model.eps)),
    ]
    .into_iter()
    .filter(|(_, v)| v.is_none())
    .map(|(n, _)| n)
    .collect();
    if missing.is_empty() {
        return Ok(());
    }
    let mut cmd = <Cli as clap::CommandFactory>::command();
    let err = cmd.error(
        clap::error::ErrorKind::MissingRequiredArgument,
        format!(
            "the following required arguments were not provided (flag or [model] key): {}",
            missing.join(", ")
        ),
    );
    let _ = err.print();
    Err(err.exit_code())
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_validation() {
        EXIT_VALIDATION
    } else {
        EXIT_NUMERICAL
    }
}

pub fn run(cli: &Cli) -> Result<()> {
    let cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let out = cli
        .out
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .or_else(|| std::env::var_os("SGLAB_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    let seed = pick(cli.seed, cfg.seed, 0);
    fs::create_dir_all(&out)?;
    match &cli.command {
        Command::Kernel(a) => cmd_kernel(a, &cfg, &out, seed),
        Command::Solve(a) => cmd_solve(a, &cfg, &out),
        Command::Sweep(a) => cmd_sweep(a, &cfg, &out, seed),
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    Ok(csv::Writer::from_path(path)?)
}

// ---------------------------------------------------------------------------
// kernel

#[derive(Debug, Serialize)]
struct KernelSummary {
    params: ModelParams,
    policy: TruncationPolicy,
    split: crate::spectral_kernel::RegimeSplit,
    hyperbolic_start: u64,
    m_max: f64,
    m_min: f64,
    seed: u64,
    files: Vec<String>,
}

pub fn cmd_kernel(a: &KernelArgs, cfg: &RunConfig, out: &Path, seed: u64) -> Result<()> {
    let m = &cfg.model;
    let k = &cfg.kernel;
    let tmax = pick(a.tmax, k.tmax, 20.0);
    let params = ModelParams {
        ell: require(a.ell, m.ell, "ell")?,
        alpha: require(a.alpha, m.alpha, "alpha")?,
        eps: require(a.eps, m.eps, "eps")?,
        gamma_bias: pick(a.gamma, m.gamma, 0.0),
        horizon: tmax,
    };
    params.require_estimate_regime()?;
    let policy = TruncationPolicy::new(
        pick(
            a.max_modes,
            k.max_modes,
            TruncationPolicy::default().max_modes,
        ),
        pick(a.tail_tol, k.tail_tol, TruncationPolicy::default().tail_tol),
    )?;
    let tmin = pick(a.tmin, k.tmin, 1.0);
    let t_points = pick(a.t_points, k.t_points, 40);
    if !(tmin >= 1.0 && tmax >= tmin && t_points >= 1) {
        return Err(Error::InvalidParams(format!(
            "kernel profile needs 1 <= tmin <= tmax and t_points >= 1, got tmin={tmin}, tmax={tmax}, t_points={t_points}"
        )));
    }
    let split = regime_split(&params);
    let rows = pick(a.modes, k.modes, (2 * split.n2).max(32));

    let mut w = csv_writer(&out.join("modes.csv"))?;
    w.write_record(["n", "gamma_n", "h_n", "disc", "regime", "freq"])?;
    for n in 1..=rows {
        let d = mode_data(&params, n);
        w.write_record([
            n.to_string(),
            fmt_f64(d.gamma_n),
            fmt_f64(d.h_n),
            fmt_f64(d.disc),
            format!("{:?}", d.regime).to_lowercase(),
            fmt_f64(d.freq),
        ])?;
    }
    w.flush()?;

    let profile = decay_profile(&params, &linspace(tmin, tmax, t_points), &policy)?;
    let mut w = csv_writer(&out.join("kernel.csv"))?;
    w.write_record([
        "t",
        "sum_h",
        "tail_bound",
        "modes",
        "envelope",
        "ratio",
        "envelope_min",
        "ratio_min",
    ])?;
    for p in &profile {
        w.write_record([
            fmt_f64(p.t),
            fmt_f64(p.sum_h),
            fmt_f64(p.tail_bound),
            p.modes.to_string(),
            fmt_f64(p.envelope),
            fmt_f64(p.ratio),
            fmt_f64(p.envelope_min),
            fmt_f64(p.ratio_min),
        ])?;
    }
    w.flush()?;

    let mut files = vec!["modes.csv".to_string(), "kernel.csv".to_string()];
    let probes = pick(a.probes, k.probes, 0);
    if probes > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut w = csv_writer(&out.join("probes.csv"))?;
        w.write_record(["x", "xi", "t", "theta", "modes", "tail_bound"])?;
        for _ in 0..probes {
            let x = rng.gen_range(0.0..=params.ell);
            let xi = rng.gen_range(0.0..=params.ell);
            let t = rng.gen_range(tmin..=tmax);
            let s = theta_sum(&params, x, xi, t, &policy)?;
            w.write_record([
                fmt_f64(x),
                fmt_f64(xi),
                fmt_f64(t),
                fmt_f64(s.value),
                s.modes.to_string(),
                fmt_f64(s.tail_bound),
            ])?;
        }
        w.flush()?;
        files.push("probes.csv".into());
    }
    files.push("regime.json".into());
    let (m_max, m_min) = envelope_rates(&params);
    write_json(
        &out.join("regime.json"),
        &KernelSummary {
            params,
            policy,
            split,
            hyperbolic_start: hyperbolic_start(&params)?,
            m_max,
            m_min,
            seed,
            files,
        },
    )?;
    println!(
        "N1 = {}, N2 = {}, m = {m_max} (min variant {m_min}); wrote {}",
        split.n1,
        split.n2,
        out.display()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// solve

#[derive(Debug, Serialize)]
struct SolveRun {
    solver: SolverKind,
    family: DataKind,
    params: ModelParams,
    grid: Grid,
    r0: Option<f64>,
    level: Option<f64>,
    stride: usize,
    max_abs: f64,
    /// `max |u - U|` against the closed-form kink (hyperbolic runs: solver error).
    max_diff_from_exact: Option<f64>,
    /// `max_n |reconstructed u_x - phi|` over both ends.
    neumann_flux_error: f64,
    memory_comparison: Option<crate::pde::MemoryComparison>,
    files: Vec<String>,
}

pub fn cmd_solve(a: &SolveArgs, cfg: &RunConfig, out: &Path) -> Result<()> {
    let m = &cfg.model;
    let s = &cfg.solve;
    let solver = pick(a.solver, s.solver, SolverKind::Hyperbolic);
    let kind = pick(a.family, s.family, DataKind::Basic);
    let family = match kind {
        DataKind::Basic => Some(Family::Basic),
        DataKind::Gamma0 => Some(Family::Gamma0),
        DataKind::Gamma1 => Some(Family::Gamma1),
        DataKind::Equilibrium => None,
    };
    let ell = pick(a.ell, m.ell, std::f64::consts::PI);
    let alpha = pick(a.alpha, m.alpha, 0.5);
    let params = ModelParams::new(
        ell,
        alpha,
        pick(
            a.eps,
            m.eps,
            if solver == SolverKind::Hyperbolic {
                0.0
            } else {
                0.1
            },
        ),
        pick(a.gamma, m.gamma, family.map_or(0.0, |f| f.required_gamma())),
        pick(a.horizon, m.horizon, 2.0),
    )?;
    let nx = pick(a.nx, s.nx, 129);
    let grid = Grid::new(
        params.ell,
        params.horizon,
        nx,
        pick(a.nt, s.nt, 2 * (nx - 1)),
    )?;
    let stride = pick(a.stride, s.stride, 1);

    let (data, kink, r0, level): (NeumannData, Option<KinkFamily>, Option<f64>, Option<f64>) =
        match family {
            Some(f) => {
                let default_r0 = match f {
                    Family::Gamma1 => ell / alpha + 1.0,
                    _ => 1.0,
                };
                let r0 = pick(a.r0, s.r0, default_r0);
                let k = KinkFamily::new(f, alpha, r0)?;
                (
                    neumann_data_from(&k, &params)?,
                    Some(k),
                    (f != Family::Basic).then_some(r0),
                    None,
                )
            }
            None => {
                let level = pick(a.level, s.level, std::f64::consts::PI);
                (NeumannData::equilibrium(level), None, None, Some(level))
            }
        };

    let field = match solver {
        SolverKind::Hyperbolic => solve_hyperbolic(&params, &data, &grid)?,
        SolverKind::Parabolic => solve_parabolic(&params, &data, &grid)?,
        SolverKind::Memory => solve_memory(&params, &data, &grid)?,
    };
    let memory_comparison = match solver {
        SolverKind::Memory => Some(compare_memory_parabolic(&params, &data, &grid)?),
        _ => None,
    };

    let name = format!("{solver:?}").to_lowercase();
    let mut files = vec![format!("field_{name}.csv")];
    save_field_csv(&field, &name, stride, &out.join(&files[0]))?;
    let max_diff_from_exact = match &kink {
        Some(k) => {
            let exact = Field::try_from_fn(grid, |x, t| kink_value(k, x, t))?;
            files.push("field_exact.csv".into());
            save_field_csv(&exact, "exact", stride, &out.join("field_exact.csv"))?;
            Some(
                (&field.values - &exact.values)
                    .iter()
                    .fold(0.0f64, |m, v| m.max(v.abs())),
            )
        }
        None => None,
    };
    let neumann_flux_error = (0..=grid.nt)
        .map(|n| {
            let (l, r) = boundary_flux(&field, n);
            let t = grid.t(n);
            (l - (data.phi0)(t)).abs().max((r - (data.phi1)(t)).abs())
        })
        .fold(0.0f64, f64::max);
    files.push("run.json".into());
    let run = SolveRun {
        solver,
        family: kind,
        params,
        grid,
        r0,
        level,
        stride,
        max_abs: field.max_abs(),
        max_diff_from_exact,
        neumann_flux_error,
        memory_comparison,
        files,
    };
    write_json(&out.join("run.json"), &run)?;
    let mut stdout = std::io::stdout().lock();
    writeln!(
        stdout,
        "{name} solve on {}x{} grid: max |u| = {:.6}",
        grid.nx, grid.nt, run.max_abs
    )?;
    if let Some(e) = run.max_diff_from_exact {
        writeln!(stdout, "max |u - U_exact| = {e:.3e}")?;
    }
    if let Some(c) = &run.memory_comparison {
        writeln!(stdout, "{}", c.note)?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// sweep

#[derive(Debug, Serialize)]
struct SweepOutput {
    seed: u64,
    kernel_eps: Vec<f64>,
    t_grid: Vec<f64>,
    boundary_layer: crate::estimates::SweepReport,
    theorem3: crate::estimates::Theorem3Report,
    gates: Vec<Gate>,
}

pub fn cmd_sweep(a: &SweepArgs, cfg: &RunConfig, out: &Path, seed: u64) -> Result<()> {
    let m = &cfg.model;
    let s = &cfg.sweep;
    let l = &cfg.lemma;
    let ell = pick(a.ell, m.ell, std::f64::consts::PI);
    let alpha = pick(a.alpha, m.alpha, 0.5);
    let scaling = ScalingParams::new(
        pick(a.k, s.k, 0.25),
        alpha,
        pick(
            a.eps.clone(),
            s.eps_list.clone(),
            vec![0.1, 0.05, 0.02, 0.01],
        ),
    )?;
    let mut kernel_eps = pick(
        a.kernel_eps.clone(),
        s.kernel_eps.clone(),
        vec![0.2, 0.1, 0.05, 0.02, 0.01],
    );
    kernel_eps.sort_by(|x, y| y.total_cmp(x));
    let defaults = GridPolicy::default();
    let policy = GridPolicy {
        ell,
        nx_start: pick(a.nx_start, s.nx_start, defaults.nx_start),
        nx_max: pick(a.nx_max, s.nx_max, defaults.nx_max),
        courant: pick(a.courant, s.courant, defaults.courant),
        stabilization: pick(a.stabilization, s.stabilization, defaults.stabilization),
    };
    let lemma = LemmaConstants {
        eta: pick(a.eta, l.eta, LemmaConstants::default().eta),
        h: pick(a.lemma_h, l.h, LemmaConstants::default().h),
        k: pick(a.lemma_k, l.k, LemmaConstants::default().k),
    };
    lemma.validate()?;
    let t_grid = linspace(
        1.0,
        pick(a.tmax, s.tmax, 20.0),
        pick(a.t_points, s.t_points, 40),
    );
    let base = ModelParams::new(
        ell,
        alpha,
        kernel_eps.first().copied().unwrap_or(0.1),
        0.0,
        1.0,
    )?;

    let family = KinkFamily::basic(alpha)?;
    let boundary = boundary_layer_sweep(&scaling, &family, &policy)?;
    let theorem3 = theorem3_check(&base, &kernel_eps, &t_grid, &TruncationPolicy::default())?;
    let lemmas = lemma_checks(
        &base,
        &kernel_eps,
        lemma,
        &t_grid,
        pick(a.tail_modes, s.tail_modes, 10_000),
    )?;

    let mut w = csv_writer(&out.join("sweep_profiles.csv"))?;
    w.write_record(["eps", "t", "S", "in_window"])?;
    for p in &boundary.per_eps {
        for &(t, sv) in &p.profile {
            let inside = if p.window_clipped {
                t > 0.0 && t <= p.window.1
            } else {
                t >= p.window.0 && t < p.window.1
            };
            w.write_record([
                fmt_f64(p.eps),
                fmt_f64(t),
                fmt_f64(sv),
                (inside as u8).to_string(),
            ])?;
        }
    }
    w.flush()?;

    let mut w = csv_writer(&out.join("theorem3.csv"))?;
    w.write_record([
        "eps",
        "t",
        "sum_h",
        "tail_bound",
        "modes",
        "ratio",
        "ratio_min",
    ])?;
    for r in &theorem3.rows {
        for p in &r.points {
            w.write_record([
                fmt_f64(r.eps),
                fmt_f64(p.t),
                fmt_f64(p.sum_h),
                fmt_f64(p.tail_bound),
                p.modes.to_string(),
                fmt_f64(p.ratio),
                fmt_f64(p.ratio_min),
            ])?;
        }
    }
    w.flush()?;

    let decreasing = Gate {
        name: "sup_S strictly decreasing in eps".into(),
        value: boundary.sup_s_strictly_decreasing as u8 as f64,
        threshold: 1.0,
        pass: boundary.sup_s_strictly_decreasing,
    };
    let gates = vec![
        theorem3.gate.clone(),
        theorem3.gate_min.clone(),
        boundary.ratio_spread.clone(),
        decreasing,
    ];
    write_json(&out.join("lemma_report.json"), &lemmas)?;
    let output = SweepOutput {
        seed,
        kernel_eps,
        t_grid,
        boundary_layer: boundary,
        theorem3,
        gates,
    };
    write_json(&out.join("sweep_report.json"), &output)?;

    let mut stdout = std::io::stdout().lock();
    for g in &output.gates {
        writeln!(
            stdout,
            "{} {:<40} {:>12.5} (threshold {})",
            g.verdict(),
            g.name,
            g.value,
            g.threshold
        )?;
    }
    for g in &lemmas.gates {
        match &g.gate {
            Some(gate) => writeln!(
                stdout,
                "{} {:<40} {:>12.5e} (threshold {}, informational)",
                gate.verdict(),
                gate.name,
                gate.value,
                gate.threshold
            )?,
            None => writeln!(stdout, "SKIP {:<40} (band empty at every eps)", g.band)?,
        }
    }
    match (
        output.boundary_layer.fitted_exponent,
        &output.boundary_layer.fit_error,
    ) {
        (Some(p), _) => writeln!(
            stdout,
            "fitted exponent {p:.4} (bound exponent {:.4})",
            output.boundary_layer.bound_exponent
        )?,
        (None, Some(e)) => writeln!(stdout, "fitted exponent: {e}")?,
        _ => {}
    }
    writeln!(
        stdout,
        "fitted Gamma {:.6}",
        output.boundary_layer.fitted_gamma
    )?;
    Ok(())
}
