//! Command-line experiment runner.
//!
//! Every subcommand writes one or more CSV files and a `manifest.json` into
//! the output directory, and prints a short summary to stdout.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chebyshev::QuadratureRule;
use crate::error::{Error, Result};
use crate::model::{db_to_linear, linear_to_db, Network, NetworkConfig, Terminal};
use crate::oracle::{self, mc_estimate, McEvent, REFERENCE_TOL};
use crate::search::{self, PsMode, SweepResult, DEFAULT_RESOLUTION};
use crate::sysout::{self, log_log_slope};
use crate::t2t;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_TOLERANCE: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "twr-outage",
    version,
    about = "Outage analysis of a SWIPT two-way decode-and-forward relay"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Flat JSON file of configuration values; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Chebyshev quadrature order.
    #[arg(long, global = true, default_value_t = crate::chebyshev::DEFAULT_ORDER)]
    pub order: usize,
    /// Monte Carlo sample count.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    pub samples: u64,
    /// Output directory.
    #[arg(long, global = true, default_value = "results")]
    pub out: PathBuf,
    #[command(flatten)]
    pub params: Overrides,
}

/// Parameter values from a config file or from flags. Unset fields keep the
/// value from the layer below.
#[derive(Debug, Clone, Copy, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    /// Transmit SNR, linear.
    #[arg(long, global = true)]
    pub rho0: Option<f64>,
    /// Transmit SNR in dB.
    #[arg(long, global = true)]
    pub rho0_db: Option<f64>,
    #[arg(long, global = true)]
    pub eta: Option<f64>,
    #[arg(long, global = true)]
    pub beta: Option<f64>,
    #[arg(long, global = true)]
    pub block_time: Option<f64>,
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    #[arg(long, global = true)]
    pub d_a: Option<f64>,
    #[arg(long, global = true)]
    pub d_b: Option<f64>,
    #[arg(long, global = true)]
    pub mu_a: Option<f64>,
    #[arg(long, global = true)]
    pub mu_b: Option<f64>,
    #[arg(long, global = true)]
    pub lambda_a: Option<f64>,
    #[arg(long, global = true)]
    pub lambda_b: Option<f64>,
    #[arg(long, global = true)]
    pub theta_a_sq: Option<f64>,
    #[arg(long, global = true)]
    pub rate_u: Option<f64>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut NetworkConfig) -> Result<()> {
        if self.rho0.is_some() && self.rho0_db.is_some() {
            return Err(Error::InvalidArgument(
                "rho0 and rho0_db are mutually exclusive".into(),
            ));
        }
        if let Some(v) = self.rho0 {
            cfg.rho0 = v;
        }
        if let Some(v) = self.rho0_db {
            cfg.rho0 = db_to_linear(v);
        }
        let fields = [
            (self.eta, &mut cfg.eta),
            (self.beta, &mut cfg.beta),
            (self.block_time, &mut cfg.block_time),
            (self.alpha, &mut cfg.alpha),
            (self.d_a, &mut cfg.d_a),
            (self.d_b, &mut cfg.d_b),
            (self.mu_a, &mut cfg.mu_a),
            (self.mu_b, &mut cfg.mu_b),
            (self.lambda_a, &mut cfg.lambda_a),
            (self.lambda_b, &mut cfg.lambda_b),
            (self.theta_a_sq, &mut cfg.theta_a_sq),
            (self.rate_u, &mut cfg.rate_u),
        ];
        for (value, slot) in fields {
            if let Some(v) = value {
                *slot = v;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Analytic terminal-to-terminal outage for both directions.
    T2t,
    /// Analytic system outage and its four region pieces.
    System,
    /// Monte Carlo outage estimates.
    Mc,
    /// Compare analytic, reference-integration and Monte Carlo values.
    Validate {
        /// Relative tolerance for analytic against reference.
        #[arg(long, default_value_t = 1e-2)]
        tol: f64,
        /// Absolute tolerance for each region piece.
        #[arg(long, default_value_t = 1e-3)]
        piece_tol: f64,
    },
    /// Run one of the figure sweeps.
    Sweep {
        #[arg(long, value_enum)]
        experiment: Experiment,
        /// Comma-separated grid replacing the experiment default.
        #[arg(long, value_delimiter = ',')]
        grid: Option<Vec<f64>>,
        /// Points per axis in PS searches.
        #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
        resolution: usize,
    },
    /// Optimize the power-splitting ratios.
    Optimize {
        #[arg(long, value_enum, default_value_t = ModeArg::Both)]
        mode: ModeArg,
        #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
        resolution: usize,
        /// Also write every evaluated grid point.
        #[arg(long)]
        surface: bool,
    },
    /// High-SNR outage curve and fitted log-log slope.
    Diversity {
        /// SNR grid in dB.
        #[arg(long, value_delimiter = ',')]
        grid: Option<Vec<f64>>,
        /// SNR points in dB used for the slope fit.
        #[arg(long, value_delimiter = ',', default_values_t = [40.0, 45.0, 50.0, 55.0])]
        fit_db: Vec<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Fig4Error,
    Fig4Capacity,
    Fig5Location,
    Fig6Eta,
    Fig7Theta,
    Fig8Diversity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Symmetric,
    Asymmetric,
    Both,
}

impl ModeArg {
    fn modes(self) -> Vec<PsMode> {
        match self {
            ModeArg::Symmetric => vec![PsMode::Symmetric],
            ModeArg::Asymmetric => vec![PsMode::Asymmetric],
            ModeArg::Both => vec![PsMode::Symmetric, PsMode::Asymmetric],
        }
    }
}

/// Parse `args` (including the program name), run, and return the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::InvalidArgument(_) | Error::Json(_) | Error::ZeroOrder => {
            EXIT_CONFIG
        }
        Error::Io(_) | Error::Csv(_) => EXIT_IO,
        _ => EXIT_FAILURE,
    }
}

/// Defaults, then the config file, then flags.
pub fn resolve_config(common: &Common) -> Result<NetworkConfig> {
    let mut cfg = NetworkConfig::default();
    if let Some(path) = &common.config {
        let text = fs::read_to_string(path)?;
        let file: Overrides = serde_json::from_str(&text)?;
        file.apply(&mut cfg)?;
    }
    common.params.apply(&mut cfg)?;
    cfg.validate()?;
    Ok(cfg)
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    experiment: Option<Experiment>,
    config: &'a NetworkConfig,
    rho0_db: f64,
    seed: u64,
    quadrature_order: usize,
    mc_samples: u64,
    mc_generator: &'static str,
    reference_tol: f64,
    grid: Option<Vec<f64>>,
    files: Vec<String>,
    passed: Option<bool>,
    wall_time_s: f64,
    timestamp_unix_s: u64,
}

/// Collects output files for one run.
struct Output {
    dir: PathBuf,
    files: Vec<String>,
}

impl Output {
    fn new(dir: &Path) -> Result<Output> {
        fs::create_dir_all(dir)?;
        Ok(Output {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    fn csv<R: Serialize>(&mut self, name: &str, rows: &[R]) -> Result<()> {
        let file = format!("{name}.csv");
        let mut w = csv::Writer::from_path(self.dir.join(&file))?;
        for r in rows {
            w.serialize(r)?;
        }
        w.flush()?;
        self.files.push(file);
        Ok(())
    }
}

struct Run<'a> {
    common: &'a Common,
    cfg: NetworkConfig,
    rule: QuadratureRule,
    out: Output,
    experiment: Option<Experiment>,
    grid: Option<Vec<f64>>,
    passed: Option<bool>,
}

impl Run<'_> {
    fn mc(&self, cfg: &NetworkConfig, event: McEvent) -> Result<oracle::McEstimate> {
        mc_estimate(cfg, event, self.common.samples, self.common.seed, None)
    }

    /// Capacity estimate and its standard error from Monte Carlo.
    fn mc_capacity(&self, cfg: &NetworkConfig, event: McEvent) -> Result<(f64, f64)> {
        let m = self.mc(cfg, event)?;
        let scale = cfg.rate_u * cfg.beta * cfg.block_time;
        Ok((t2t::capacity_from_outage(cfg, m.p_hat), m.stderr * scale))
    }
}

pub fn run(cli: &Cli) -> Result<i32> {
    let started = Instant::now();
    let cfg = resolve_config(&cli.common)?;
    let rule = QuadratureRule::new(cli.common.order)?;
    let mut run = Run {
        common: &cli.common,
        cfg,
        rule,
        out: Output::new(&cli.common.out)?,
        experiment: None,
        grid: None,
        passed: None,
    };
    let (name, code) = match &cli.command {
        Command::T2t => ("t2t", cmd_t2t(&mut run)?),
        Command::System => ("system", cmd_system(&mut run)?),
        Command::Mc => ("mc", cmd_mc(&mut run)?),
        Command::Validate { tol, piece_tol } => {
            ("validate", cmd_validate(&mut run, *tol, *piece_tol)?)
        }
        Command::Sweep {
            experiment,
            grid,
            resolution,
        } => {
            run.experiment = Some(*experiment);
            (
                "sweep",
                cmd_sweep(&mut run, *experiment, grid.clone(), *resolution)?,
            )
        }
        Command::Optimize {
            mode,
            resolution,
            surface,
        } => (
            "optimize",
            cmd_optimize(&mut run, *mode, *resolution, *surface)?,
        ),
        Command::Diversity { grid, fit_db } => {
            run.experiment = Some(Experiment::Fig8Diversity);
            ("diversity", cmd_diversity(&mut run, grid.clone(), fit_db)?)
        }
    };
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command: name,
        experiment: run.experiment,
        config: &run.cfg,
        rho0_db: linear_to_db(run.cfg.rho0),
        seed: cli.common.seed,
        quadrature_order: run.rule.order(),
        mc_samples: cli.common.samples,
        mc_generator: oracle::mc::GENERATOR,
        reference_tol: REFERENCE_TOL,
        grid: run.grid.clone(),
        files: run.out.files.clone(),
        passed: run.passed,
        wall_time_s: started.elapsed().as_secs_f64(),
        timestamp_unix_s: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
    };
    let text = serde_json::to_string_pretty(&manifest)?;
    fs::write(run.out.dir.join("manifest.json"), text + "\n")?;
    Ok(code)
}

#[derive(Serialize)]
struct T2tRow {
    terminal: &'static str,
    p_success: f64,
    p_outage: f64,
    capacity: f64,
    order: usize,
}

fn cmd_t2t(run: &mut Run) -> Result<i32> {
    let net = Network::new(run.cfg)?;
    let mut rows = Vec::new();
    for t in [Terminal::A, Terminal::B] {
        let r = t2t::t2t_report(&net, t, &run.rule)?;
        println!(
            "to {}: P_out = {:.6e}, capacity = {:.6}",
            t.label(),
            r.p_outage,
            r.capacity
        );
        rows.push(T2tRow {
            terminal: t.label(),
            p_success: r.p_success,
            p_outage: r.p_outage,
            capacity: r.capacity,
            order: r.quadrature_order,
        });
    }
    run.out.csv("t2t", &rows)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct SystemRow {
    p11: f64,
    p12: f64,
    p13: f64,
    p14: f64,
    p_success: f64,
    p_outage: f64,
    capacity: f64,
    case: &'static str,
    x1: f64,
    y1: f64,
    x_delta: f64,
    y_delta: f64,
    q1: f64,
    q2: f64,
    xo: f64,
    yo: f64,
    order: usize,
}

fn cmd_system(run: &mut Run) -> Result<i32> {
    let net = Network::new(run.cfg)?;
    let s = sysout::system_success(&net, &run.rule)?;
    let g = s.geometry;
    println!(
        "system: P_out = {:.6e}, capacity = {:.6}, case {}",
        s.p_outage,
        s.capacity,
        g.case_label()
    );
    run.out.csv(
        "system",
        &[SystemRow {
            p11: s.p11,
            p12: s.p12,
            p13: s.p13,
            p14: s.p14,
            p_success: s.p_success,
            p_outage: s.p_outage,
            capacity: s.capacity,
            case: g.case_label(),
            x1: g.x1,
            y1: g.y1,
            x_delta: g.x_delta,
            y_delta: g.y_delta,
            q1: g.q1,
            q2: g.q2,
            xo: g.xo,
            yo: g.yo,
            order: s.quadrature_order,
        }],
    )?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct McRow {
    event: &'static str,
    p_outage: f64,
    p_success: f64,
    stderr: f64,
    samples: u64,
    seed: u64,
}

const EVENTS: [(&str, McEvent); 3] = [
    ("t2t_a", McEvent::T2T(Terminal::A)),
    ("t2t_b", McEvent::T2T(Terminal::B)),
    ("system", McEvent::System),
];

fn cmd_mc(run: &mut Run) -> Result<i32> {
    let mut rows = Vec::new();
    for (event, e) in EVENTS {
        let m = run.mc(&run.cfg, e)?;
        println!("{event}: P_out = {:.6e} +/- {:.1e}", m.p_hat, m.stderr);
        rows.push(McRow {
            event,
            p_outage: m.p_hat,
            p_success: m.p_success(),
            stderr: m.stderr,
            samples: m.samples,
            seed: m.seed,
        });
    }
    run.out.csv("mc", &rows)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct ValidateRow {
    quantity: &'static str,
    analytic: f64,
    reference: f64,
    error: f64,
    tolerance: f64,
    mc: Option<f64>,
    mc_stderr: Option<f64>,
    mc_z: Option<f64>,
    pass: bool,
}

/// Success probabilities from all three engines; pieces have no Monte Carlo
/// column.
fn cmd_validate(run: &mut Run, tol: f64, piece_tol: f64) -> Result<i32> {
    let cfg = run.cfg;
    let net = Network::new(cfg)?;
    let sys = sysout::system_success(&net, &run.rule)?;
    let mut rows = Vec::new();
    let mut push_full = |quantity, analytic: f64, reference: f64, m: oracle::McEstimate| {
        let error = oracle::relative_error(analytic, reference)?;
        let z = (m.p_success() - reference).abs() / m.stderr.max(f64::MIN_POSITIVE);
        rows.push(ValidateRow {
            quantity,
            analytic,
            reference,
            error,
            tolerance: tol,
            mc: Some(m.p_success()),
            mc_stderr: Some(m.stderr),
            mc_z: Some(z),
            pass: error <= tol && z <= 3.0,
        });
        Ok::<(), Error>(())
    };
    for (quantity, e) in &EVENTS[..2] {
        let McEvent::T2T(t) = *e else { unreachable!() };
        let analytic = t2t::t2t_success(&net, t, &run.rule)?;
        let reference = oracle::quad_reference_t2t(&cfg, t, REFERENCE_TOL)?;
        push_full(quantity, analytic, reference, run.mc(&cfg, *e)?)?;
    }
    let reference = oracle::quad_reference_system(&cfg, REFERENCE_TOL, oracle::Event::Full)?;
    push_full(
        "system",
        sys.p_success,
        reference,
        run.mc(&cfg, McEvent::System)?,
    )?;
    let pieces = [
        ("p11", sys.p11),
        ("p12", sys.p12),
        ("p13", sys.p13),
        ("p14", sys.p14),
    ];
    for ((quantity, analytic), event) in pieces.into_iter().zip(oracle::Event::PIECES) {
        let reference = oracle::quad_reference_system(&cfg, REFERENCE_TOL, event)?;
        let error = (analytic - reference).abs();
        rows.push(ValidateRow {
            quantity,
            analytic,
            reference,
            error,
            tolerance: piece_tol,
            mc: None,
            mc_stderr: None,
            mc_z: None,
            pass: error <= piece_tol,
        });
    }
    for r in &rows {
        println!(
            "{:<7} analytic {:.8} reference {:.8} error {:.2e} {}",
            r.quantity,
            r.analytic,
            r.reference,
            r.error,
            if r.pass { "ok" } else { "FAIL" }
        );
    }
    let passed = rows.iter().all(|r| r.pass);
    run.out.csv("validate", &rows)?;
    run.passed = Some(passed);
    Ok(if passed { EXIT_OK } else { EXIT_TOLERANCE })
}

/// `start, start + step, ...` up to `stop` inclusive, rounded to kill drift.
fn steps(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let n = ((stop - start) / step).round() as usize;
    (0..=n)
        .map(|k| ((start + k as f64 * step) * 1e9).round() / 1e9)
        .collect()
}

fn cmd_sweep(
    run: &mut Run,
    experiment: Experiment,
    grid: Option<Vec<f64>>,
    resolution: usize,
) -> Result<i32> {
    match experiment {
        Experiment::Fig4Error => fig4_error(
            run,
            grid.unwrap_or_else(|| vec![1.0, 2.0, 3.0, 5.0, 10.0, 20.0, 50.0]),
        ),
        Experiment::Fig4Capacity => {
            fig4_capacity(run, grid.unwrap_or_else(|| steps(0.05, 0.95, 0.05)))
        }
        Experiment::Fig5Location => {
            let grid = grid.unwrap_or_else(|| steps(0.4, 1.6, 0.1));
            fig_ps_sweep(
                run,
                "fig5-location",
                grid,
                resolution,
                |cfg, grid, mode, res, rule| {
                    search::sweep_relay_location(cfg, cfg.d_a + cfg.d_b, grid, mode, res, rule)
                },
            )
        }
        Experiment::Fig6Eta => {
            let grid = grid.unwrap_or_else(|| steps(0.1, 1.0, 0.1));
            fig_ps_sweep(run, "fig6-eta", grid, resolution, search::sweep_eta)
        }
        Experiment::Fig7Theta => fig7_theta(run, grid.unwrap_or_else(|| steps(0.05, 0.95, 0.05))),
        Experiment::Fig8Diversity => cmd_diversity(run, grid, &[40.0, 45.0, 50.0, 55.0]),
    }
}

#[derive(Serialize)]
struct ErrorRow {
    order: usize,
    t2t_a: f64,
    t2t_b: f64,
    system: f64,
    t2t_a_reference: f64,
    t2t_b_reference: f64,
    system_reference: f64,
    t2t_a_rel_error: f64,
    t2t_b_rel_error: f64,
    system_rel_error: f64,
}

fn fig4_error(run: &mut Run, grid: Vec<f64>) -> Result<i32> {
    let orders = grid
        .iter()
        .map(|&v| {
            if v >= 1.0 && v.fract() == 0.0 {
                Ok(v as usize)
            } else {
                Err(Error::InvalidArgument(format!(
                    "quadrature order {v} must be a positive integer"
                )))
            }
        })
        .collect::<Result<Vec<usize>>>()?;
    run.grid = Some(grid);
    let cfg = run.cfg;
    let net = Network::new(cfg)?;
    let ref_a = oracle::quad_reference_t2t(&cfg, Terminal::A, REFERENCE_TOL)?;
    let ref_b = oracle::quad_reference_t2t(&cfg, Terminal::B, REFERENCE_TOL)?;
    let ref_s = oracle::quad_reference_system(&cfg, REFERENCE_TOL, oracle::Event::Full)?;
    let mut rows = Vec::new();
    for n in orders {
        let rule = QuadratureRule::new(n)?;
        let a = t2t::t2t_success(&net, Terminal::A, &rule)?;
        let b = t2t::t2t_success(&net, Terminal::B, &rule)?;
        let s = sysout::system_success(&net, &rule)?.p_success;
        let row = ErrorRow {
            order: n,
            t2t_a: a,
            t2t_b: b,
            system: s,
            t2t_a_reference: ref_a,
            t2t_b_reference: ref_b,
            system_reference: ref_s,
            t2t_a_rel_error: oracle::relative_error(a, ref_a)?,
            t2t_b_rel_error: oracle::relative_error(b, ref_b)?,
            system_rel_error: oracle::relative_error(s, ref_s)?,
        };
        println!(
            "N = {n:>3}: relative error t2t_a {:.2e} t2t_b {:.2e} system {:.2e}",
            row.t2t_a_rel_error, row.t2t_b_rel_error, row.system_rel_error
        );
        rows.push(row);
    }
    run.out.csv("fig4-error", &rows)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct CapacityRow {
    lambda: f64,
    capacity_t2t_a: f64,
    mc_capacity_t2t_a: f64,
    mc_stderr_t2t_a: f64,
    capacity_t2t_b: f64,
    mc_capacity_t2t_b: f64,
    mc_stderr_t2t_b: f64,
    capacity_system: f64,
    mc_capacity_system: f64,
    mc_stderr_system: f64,
}

fn check_open_unit(name: &str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument(format!("{name} grid is empty")));
    }
    match grid.iter().find(|v| !(**v > 0.0 && **v < 1.0)) {
        Some(v) => Err(Error::InvalidArgument(format!(
            "{name} grid value {v} must lie in (0, 1)"
        ))),
        None => Ok(()),
    }
}

fn fig4_capacity(run: &mut Run, grid: Vec<f64>) -> Result<i32> {
    check_open_unit("lambda", &grid)?;
    let rows = grid
        .par_iter()
        .map(|&lambda| {
            let cfg = run.cfg.with_lambdas(lambda, lambda);
            let a = t2t::t2t_report_with_limits(&cfg, Terminal::A, &run.rule)?;
            let b = t2t::t2t_report_with_limits(&cfg, Terminal::B, &run.rule)?;
            let s = search::system_capacity(&cfg, &run.rule)?;
            let (ma, sa) = run.mc_capacity(&cfg, McEvent::T2T(Terminal::A))?;
            let (mb, sb) = run.mc_capacity(&cfg, McEvent::T2T(Terminal::B))?;
            let (ms, ss) = run.mc_capacity(&cfg, McEvent::System)?;
            Ok(CapacityRow {
                lambda,
                capacity_t2t_a: a.capacity,
                mc_capacity_t2t_a: ma,
                mc_stderr_t2t_a: sa,
                capacity_t2t_b: b.capacity,
                mc_capacity_t2t_b: mb,
                mc_stderr_t2t_b: sb,
                capacity_system: s,
                mc_capacity_system: ms,
                mc_stderr_system: ss,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let best = rows.iter().fold(&rows[0], |b, r| {
        if r.capacity_system > b.capacity_system {
            r
        } else {
            b
        }
    });
    println!(
        "system capacity peaks at lambda = {} ({:.6})",
        best.lambda, best.capacity_system
    );
    run.grid = Some(grid);
    run.out.csv("fig4-capacity", &rows)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct PsSweepRow {
    value: f64,
    lambda_a: f64,
    lambda_b: f64,
    theta_a_sq: f64,
    capacity: f64,
    mc_capacity: f64,
    mc_stderr: f64,
}

fn ps_rows(
    run: &Run,
    result: &SweepResult,
    configure: impl Fn(f64) -> NetworkConfig + Sync,
) -> Result<Vec<PsSweepRow>> {
    result
        .points
        .par_iter()
        .map(|p| {
            let cfg = NetworkConfig {
                lambda_a: p.lambda_a,
                lambda_b: p.lambda_b,
                theta_a_sq: p.theta_a_sq,
                ..configure(p.value)
            };
            let (mc_capacity, mc_stderr) = run.mc_capacity(&cfg, McEvent::System)?;
            Ok(PsSweepRow {
                value: p.value,
                lambda_a: p.lambda_a,
                lambda_b: p.lambda_b,
                theta_a_sq: p.theta_a_sq,
                capacity: p.capacity,
                mc_capacity,
                mc_stderr,
            })
        })
        .collect()
}

fn fig_ps_sweep<F>(
    run: &mut Run,
    name: &str,
    grid: Vec<f64>,
    resolution: usize,
    sweep: F,
) -> Result<i32>
where
    F: Fn(&NetworkConfig, &[f64], PsMode, usize, &QuadratureRule) -> Result<SweepResult>,
{
    let base = run.cfg;
    for mode in [PsMode::Symmetric, PsMode::Asymmetric] {
        let result = sweep(&base, &grid, mode, resolution, &run.rule)?;
        let axis = result.axis;
        let d_total = base.d_a + base.d_b;
        let rows = ps_rows(run, &result, |v| match axis {
            "d_a" => NetworkConfig {
                d_a: v,
                d_b: d_total - v,
                ..base
            },
            "eta" => NetworkConfig { eta: v, ..base },
            _ => base,
        })?;
        println!(
            "{name} {}: best capacity {:.6} at {axis} = {}",
            mode.label(),
            result.optimum.capacity,
            result.optimum.value
        );
        run.out.csv(&format!("{name}-{}", mode.label()), &rows)?;
    }
    run.grid = Some(grid);
    Ok(EXIT_OK)
}

fn fig7_theta(run: &mut Run, grid: Vec<f64>) -> Result<i32> {
    let base = run.cfg;
    let result = search::sweep_theta(&base, &grid, &run.rule)?;
    let rows = ps_rows(run, &result, |_| base)?;
    println!(
        "fig7-theta: best capacity {:.6} at theta_a_sq = {}",
        result.optimum.capacity, result.optimum.value
    );
    run.grid = Some(grid);
    run.out.csv("fig7-theta", &rows)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct OptimumRow {
    mode: &'static str,
    lambda_a: f64,
    lambda_b: f64,
    capacity: f64,
    mc_capacity: f64,
    mc_stderr: f64,
    resolution: usize,
}

#[derive(Serialize)]
struct SurfaceRow {
    lambda_a: f64,
    lambda_b: f64,
    capacity: f64,
}

fn cmd_optimize(run: &mut Run, mode: ModeArg, resolution: usize, surface: bool) -> Result<i32> {
    let mut rows = Vec::new();
    for mode in mode.modes() {
        let result = search::optimize_ps(&run.cfg, mode, resolution, &run.rule)?;
        let best = result.optimum;
        let cfg = run.cfg.with_lambdas(best.lambda_a, best.lambda_b);
        let (mc_capacity, mc_stderr) = run.mc_capacity(&cfg, McEvent::System)?;
        println!(
            "{}: lambda_a = {}, lambda_b = {}, capacity = {:.6}",
            mode.label(),
            best.lambda_a,
            best.lambda_b,
            best.capacity
        );
        rows.push(OptimumRow {
            mode: mode.label(),
            lambda_a: best.lambda_a,
            lambda_b: best.lambda_b,
            capacity: best.capacity,
            mc_capacity,
            mc_stderr,
            resolution,
        });
        if surface {
            let grid: Vec<SurfaceRow> = result
                .points
                .iter()
                .map(|p| SurfaceRow {
                    lambda_a: p.lambda_a,
                    lambda_b: p.lambda_b,
                    capacity: p.capacity,
                })
                .collect();
            run.out
                .csv(&format!("optimize-{}-surface", mode.label()), &grid)?;
        }
    }
    run.out.csv("optimize", &rows)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct DiversityRow {
    rho0_db: f64,
    p_outage: f64,
    mc_p_outage: f64,
    mc_stderr: f64,
    local_slope: Option<f64>,
}

#[derive(Serialize)]
struct SlopeRow {
    fit_db_min: f64,
    fit_db_max: f64,
    points: usize,
    slope: f64,
}

fn cmd_diversity(run: &mut Run, grid: Option<Vec<f64>>, fit_db: &[f64]) -> Result<i32> {
    let grid = grid.unwrap_or_else(|| steps(0.0, 55.0, 5.0));
    let outage = |db: f64| -> Result<f64> {
        let cfg = NetworkConfig {
            rho0: db_to_linear(db),
            ..run.cfg
        };
        sysout::system_outage_with_limits(&cfg, &run.rule)
    };
    let rows = grid
        .par_iter()
        .map(|&db| {
            let cfg = NetworkConfig {
                rho0: db_to_linear(db),
                ..run.cfg
            };
            let m = run.mc(&cfg, McEvent::System)?;
            Ok((db, outage(db)?, m.p_hat, m.stderr))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    for (i, &(db, p, mc, se)) in rows.iter().enumerate() {
        let local_slope = match i.checked_sub(1).map(|j| rows[j]) {
            Some((db0, p0, _, _)) if p0 > 0.0 && p > 0.0 => {
                Some((p0.ln() - p.ln()) / ((db - db0) / 10.0 * 10f64.ln()))
            }
            _ => None,
        };
        out.push(DiversityRow {
            rho0_db: db,
            p_outage: p,
            mc_p_outage: mc,
            mc_stderr: se,
            local_slope,
        });
    }
    let xs: Vec<f64> = fit_db.iter().map(|&db| db_to_linear(db)).collect();
    let ps = fit_db
        .iter()
        .map(|&db| outage(db))
        .collect::<Result<Vec<_>>>()?;
    let slope = log_log_slope(&xs, &ps)?;
    let (lo, hi) = fit_db
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
    println!("fitted log-log slope over {lo}..{hi} dB: {slope:.4}");
    run.grid = Some(grid);
    run.out.csv("fig8-diversity", &out)?;
    run.out.csv(
        "fig8-diversity-fit",
        &[SlopeRow {
            fit_db_min: lo,
            fit_db_max: hi,
            points: fit_db.len(),
            slope,
        }],
    )?;
    Ok(EXIT_OK)
}
