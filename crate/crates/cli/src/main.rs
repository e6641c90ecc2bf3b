//! `jiggle-rr`: memory kernel, spectral distribution, FLO scans and trajectories.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use jiggle_core::dynamics::{al_char_roots, al_trajectory, amended_trajectory, volterra_evolve};
use jiggle_core::flo::{self, Rectangle, ScanOptions, UhpGrid};
use jiggle_core::kernel::{kernel_rows, markov_limit_probe, MemoryKernel};
use jiggle_core::model::{Beta, FieldStatistics};
use jiggle_core::spectrum::{samples_to_csv, Spectrum, SpectrumSample};
use jiggle_core::Error;
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use config::{ConfigError, Physics, Settings};

#[derive(Debug, Parser)]
#[command(name = "jiggle-rr", version)]
#[command(about = "Amended radiation reaction of a jiggling dipole")]
struct Cli {
    /// Flat `key = value` config file; flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output file (stdout if omitted).
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,

    /// Worker threads; affects wall time only.
    #[arg(long, global = true, env = "JIGGLE_RR_THREADS")]
    threads: Option<usize>,

    /// Override a config key, e.g. `--set chi_grid=0.1,1`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    sets: Vec<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Stats {
    Quantum,
    Classical,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Model {
    ClassicalAl,
    Amended,
    Volterra,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tabulate the memory kernel D(tau).
    Kernel {
        #[arg(long, value_enum)]
        stats: Option<Stats>,
    },
    /// Spectral distribution on the real axis or at one complex point.
    Spectrum {
        #[arg(long, value_enum)]
        stats: Option<Stats>,
        /// Boundary values mu(omega + i0) on `omega_grid` (default).
        #[arg(long, conflicts_with = "complex")]
        boundary: bool,
        /// Single point `x,y` with y > 0.
        #[arg(long, value_name = "X,Y", allow_hyphen_values = true)]
        complex: Option<String>,
    },
    /// FLO criteria over a (chi, beta) grid.
    FloScan {
        #[arg(long, value_enum)]
        stats: Option<Stats>,
        /// Also check Cauchy-Riemann convergence in every cell.
        #[arg(long)]
        cr: bool,
        /// Also count characteristic zeros in the upper half plane.
        #[arg(long)]
        zeros: bool,
    },
    /// Characteristic roots of the Abraham-Lorentz equation.
    Roots,
    /// Trajectory r(t).
    Evolve {
        #[arg(long, value_enum)]
        model: Option<Model>,
        /// Keep the runaway mode of the Abraham-Lorentz solution.
        #[arg(long)]
        no_suppress_runaway: bool,
    },
    /// |D(tau)| along a decreasing chi sequence.
    MarkovProbe {
        #[arg(long, value_enum)]
        stats: Option<Stats>,
    },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("config: {0}")]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Failed(String),
    #[error("writing {path}: {source}")]
    Write {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(e) => core_code(e),
            CliError::Failed(_) => 1,
            CliError::Write { .. } => 1,
        }
    }
}

fn core_code(e: &Error) -> u8 {
    match e {
        Error::Domain { .. } | Error::InvalidCombination(_) | Error::ShortTimeSingularity { .. } | Error::Grid(_) => 2,
        Error::Overflow { .. } => 4,
        Error::KernelPoint { source, .. } => core_code(source),
        _ => 3,
    }
}

/// Output text plus the exit code to report after writing it.
struct Output {
    text: String,
    code: u8,
    note: Option<String>,
}

impl Output {
    fn ok(text: String) -> Self {
        Output {
            text,
            code: 0,
            note: None,
        }
    }
}

fn stats_override(s: &mut Settings, stats: Option<Stats>) -> Result<(), ConfigError> {
    if let Some(st) = stats {
        let v = match st {
            Stats::Quantum => "quantum",
            Stats::Classical => "classical",
        };
        s.set("stats", v)?;
    }
    Ok(())
}

fn settings(cli: &Cli) -> Result<Settings, ConfigError> {
    let mut s = match &cli.config {
        Some(p) => Settings::load(p)?,
        None => Settings::default(),
    };
    for kv in &cli.sets {
        let (k, v) = kv.split_once('=').ok_or_else(|| ConfigError::Value {
            key: kv.clone(),
            msg: "expected KEY=VALUE".into(),
        })?;
        s.set(k.trim(), v.trim())?;
    }
    match &cli.command {
        Command::Kernel { stats } | Command::FloScan { stats, .. } | Command::MarkovProbe { stats } => {
            stats_override(&mut s, *stats)?
        }
        Command::Spectrum { stats, complex, .. } => {
            stats_override(&mut s, *stats)?;
            if let Some(c) = complex {
                s.set("complex", c)?;
            }
        }
        Command::Roots => {}
        Command::Evolve {
            model,
            no_suppress_runaway,
        } => {
            if let Some(m) = model {
                let v = match m {
                    Model::ClassicalAl => "classical-al",
                    Model::Amended => "amended",
                    Model::Volterra => "volterra",
                };
                s.set("model", v)?;
            }
            if *no_suppress_runaway {
                s.set("suppress_runaway", "false")?;
            }
        }
    }
    if let Command::FloScan { cr, zeros, .. } = &cli.command {
        if *cr {
            s.set("cr", "true")?;
        }
        if *zeros {
            s.set("zeros", "true")?;
        }
    }
    Ok(s)
}

type Job = Box<dyn FnOnce() -> Result<Output, CliError>>;

/// Validate everything up front and return the computation to run.
fn plan(cli: &Cli) -> Result<Job, CliError> {
    let s = settings(cli)?;
    let phys = Physics::from_settings(&s)?;
    let job: Job = match &cli.command {
        Command::Kernel { .. } => {
            phys.check_stats()?;
            let taus = s.grid("tau_grid", "logspace:0.01:10:8")?;
            let tau_min: f64 = s.get("tau_min", jiggle_core::kernel::DEFAULT_TAU_MIN)?;
            let kernel = MemoryKernel::new(phys.reduced, phys.stats, phys.tol)?.with_tau_min(tau_min)?;
            if taus.windows(2).any(|w| !(w[1] > w[0])) || !(taus[0] > tau_min) {
                return Err(ConfigError::Value {
                    key: "tau_grid".into(),
                    msg: format!("must be strictly increasing and above tau_min = {tau_min}"),
                }
                .into());
            }
            Box::new(move || Ok(cmd_kernel(&taus, &kernel)))
        }
        Command::Spectrum { .. } => {
            phys.check_stats()?;
            let spectrum = Spectrum::new(phys.reduced, phys.stats, phys.tol)?;
            match s.raw("complex") {
                Some(c) => {
                    let z = parse_point(c)?;
                    Box::new(move || cmd_spectrum_complex(&spectrum, z))
                }
                None => {
                    let omegas = s.grid("omega_grid", "symlog:0.01:10:21")?;
                    if omegas.contains(&0.0) {
                        return Err(ConfigError::Value {
                            key: "omega_grid".into(),
                            msg: "must exclude 0".into(),
                        }
                        .into());
                    }
                    Box::new(move || Ok(cmd_spectrum_boundary(&spectrum, &omegas)))
                }
            }
        }
        Command::FloScan { .. } => {
            let classical = phys.stats == FieldStatistics::Classical;
            let chis = s.grid("chi_grid", "0.1,1,10")?;
            let betas = s.betas("beta_grid", if classical { "0.1,1,10" } else { "0.1,1,10,inf" })?;
            let omegas = s.grid("omega_grid", "symlog:0.01:10:81")?;
            if classical && betas.iter().any(|b| b.is_infinite()) {
                return Err(ConfigError::Value {
                    key: "beta_grid".into(),
                    msg: "classical statistics need a finite temperature".into(),
                }
                .into());
            }
            if chis.iter().any(|c| !(*c > 0.0)) || omegas.contains(&0.0) {
                return Err(ConfigError::Value {
                    key: "chi_grid/omega_grid".into(),
                    msg: "chi must be > 0 and omega != 0".into(),
                }
                .into());
            }
            let opts = ScanOptions {
                quad_tol: phys.tol,
                tol_rel: s.get("flo_tol_rel", flo::DEFAULT_TOL_REL)?,
                refine: s.get("refine", true)?,
            };
            let extras = Extras {
                cr: s.get("cr", false)?,
                zeros: s.get("zeros", false)?,
                rect: Rectangle {
                    x: s.get("contour_x", 20.0)?,
                    y0: s.get("contour_y0", 1e-2)?,
                    y: s.get("contour_y", 20.0)?,
                },
                points: s.get("contour_points", 400)?,
            };
            Box::new(move || cmd_flo_scan(&phys, &chis, &betas, &omegas, &opts, &extras))
        }
        Command::Roots => {
            let (g, w0) = (phys.physical.gamma, phys.physical.omega0);
            Box::new(move || cmd_roots(g, w0))
        }
        Command::Evolve { .. } => {
            let model: String = s.get("model", "amended".to_string())?;
            let r0: f64 = s.get("r0", 1.0)?;
            let v0: f64 = s.get("v0", 0.0)?;
            let t_end: f64 = s.get("t_end", 50.0)?;
            match model.as_str() {
                "classical-al" => {
                    let dt: f64 = s.get("dt", 1e-2)?;
                    let suppress: bool = s.get("suppress_runaway", true)?;
                    let (g, w0) = (phys.physical.gamma, phys.physical.omega0);
                    Box::new(move || {
                        let t = al_trajectory(g, w0, r0, v0, t_end, dt, suppress)?;
                        Ok(Output::ok(t.to_csv()))
                    })
                }
                "amended" => {
                    phys.check_stats()?;
                    let n: usize = s.get("n_samples", 2048)?;
                    let spectrum = Spectrum::new(phys.reduced, phys.stats, phys.tol)?;
                    Box::new(move || {
                        let t = amended_trajectory(r0, v0, t_end, n, &phys.reduced, &spectrum)?;
                        Ok(Output::ok(t.to_csv()))
                    })
                }
                "volterra" => {
                    phys.check_stats()?;
                    let dt: f64 = s.get("dt", 1e-2)?;
                    let tau_min: f64 = s.get("tau_min", 1e-4)?;
                    let kernel = MemoryKernel::new(phys.reduced, phys.stats, phys.tol)?.with_tau_min(tau_min)?;
                    Box::new(move || {
                        let t = volterra_evolve(r0, v0, t_end, dt, tau_min, &phys.reduced, &kernel)?;
                        Ok(Output::ok(t.to_csv()))
                    })
                }
                other => {
                    return Err(ConfigError::Value {
                        key: "model".into(),
                        msg: format!("unknown model '{other}'"),
                    }
                    .into())
                }
            }
        }
        Command::MarkovProbe { .. } => {
            phys.check_stats()?;
            let tau: f64 = s.get("tau", 2.0)?;
            let chis = s.grid("chi_grid", "1,1e-2,1e-3,1e-4")?;
            Box::new(move || {
                let rows = markov_limit_probe(tau, &chis, &phys.reduced, phys.stats, phys.tol)?;
                let mut out = String::from("chi,tau,D,err\n");
                for (chi, (d, e)) in chis.iter().zip(rows) {
                    let _ = writeln!(out, "{chi:.16e},{tau:.16e},{d:.16e},{e:.16e}");
                }
                Ok(Output::ok(out))
            })
        }
    };
    Ok(job)
}

fn parse_point(c: &str) -> Result<Complex64, ConfigError> {
    let bad = |msg: &str| ConfigError::Value {
        key: "complex".into(),
        msg: msg.into(),
    };
    let (x, y) = c.split_once(',').ok_or_else(|| bad("expected X,Y"))?;
    let x: f64 = x.trim().parse().map_err(|_| bad("X is not a number"))?;
    let y: f64 = y.trim().parse().map_err(|_| bad("Y is not a number"))?;
    if !(y > 0.0) || !x.is_finite() || !y.is_finite() {
        return Err(bad("need finite X and Y > 0"));
    }
    Ok(Complex64::new(x, y))
}

fn cmd_kernel(taus: &[f64], kernel: &MemoryKernel) -> Output {
    let mut out = String::from("tau,D,err,status\n");
    let mut failed = None;
    for (t, r) in taus.iter().zip(kernel_rows(taus, kernel)) {
        match r {
            Ok((d, e)) => {
                let _ = writeln!(out, "{t:.16e},{d:.16e},{e:.16e},ok");
            }
            Err(e) => {
                let d = e.partial_value().unwrap_or(f64::NAN);
                let _ = writeln!(out, "{t:.16e},{d:.16e},inf,unconverged");
                failed.get_or_insert(e);
            }
        }
    }
    match failed {
        None => Output::ok(out),
        Some(e) => Output {
            text: out,
            code: core_code(&e),
            note: Some(e.to_string()),
        },
    }
}

fn cmd_spectrum_boundary(spectrum: &Spectrum, omegas: &[f64]) -> Output {
    use rayon::prelude::*;
    let rows: Vec<_> = omegas.par_iter().map(|&w| spectrum.mu_boundary(w)).collect();
    let mut failed = None;
    let samples: Vec<SpectrumSample> = omegas
        .iter()
        .zip(rows)
        .map(|(&w, r)| {
            r.unwrap_or_else(|e| {
                failed.get_or_insert(e);
                SpectrumSample {
                    omega: Some(w),
                    z: None,
                    re_mu: f64::NAN,
                    im_mu: f64::NAN,
                    re_err: f64::INFINITY,
                    im_err: f64::INFINITY,
                    stats: spectrum.stats,
                }
            })
        })
        .collect();
    let text = samples_to_csv(&samples);
    match failed {
        None => Output::ok(text),
        Some(e) => Output {
            text,
            code: core_code(&e),
            note: Some(e.to_string()),
        },
    }
}

fn cmd_spectrum_complex(spectrum: &Spectrum, z: Complex64) -> Result<Output, CliError> {
    Ok(Output::ok(samples_to_csv(&[spectrum.mu_complex(z)?])))
}

struct Extras {
    cr: bool,
    zeros: bool,
    rect: Rectangle,
    points: usize,
}

fn cmd_flo_scan(
    phys: &Physics,
    chis: &[f64],
    betas: &[Beta],
    omegas: &[f64],
    opts: &ScanOptions,
    extras: &Extras,
) -> Result<Output, CliError> {
    let mut reports = flo::scan(&phys.reduced, chis, betas, omegas, phys.stats, opts)?;
    for r in reports.iter_mut().filter(|r| r.error.is_none()) {
        let spectrum = Spectrum::new(r.params, r.stats, opts.quad_tol)?;
        if extras.cr {
            r.criterion_i = Some(flo::check_analyticity(&spectrum, &UhpGrid::default(), &flo::DEFAULT_H)?);
        }
        if extras.zeros {
            match flo::count_uhp_zeros(&spectrum, &extras.rect, extras.points) {
                Ok(n) => r.uhp_zero_count = Some(n),
                Err(e) => r.error = Some(e.to_string()),
            }
        }
    }
    let text = flo::reports_to_json(&reports);
    let unconverged = reports.iter().any(|r| r.unconverged());
    let code = if unconverged {
        3
    } else if phys.stats == FieldStatistics::Quantum && !reports.iter().all(|r| r.pass()) {
        1
    } else {
        0
    };
    let note = match code {
        3 => Some("unconverged cells in scan".to_string()),
        1 => Some("FLO criteria failed for quantum statistics".to_string()),
        _ => None,
    };
    Ok(Output { text, code, note })
}

#[derive(Serialize)]
struct RootRow {
    re: f64,
    im: f64,
    residual: f64,
}

#[derive(Serialize)]
struct RootsReport {
    gamma: f64,
    omega0: f64,
    roots: Vec<RootRow>,
    runaway: RootRow,
    runaway_timescale: f64,
}

fn cmd_roots(gamma: f64, omega0: f64) -> Result<Output, CliError> {
    let r = al_char_roots(gamma, omega0)?;
    let res = r.residuals();
    let rows: Vec<RootRow> = r
        .roots
        .iter()
        .zip(res)
        .map(|(z, e)| RootRow {
            re: z.re,
            im: z.im,
            residual: e,
        })
        .collect();
    let run = r.runaway();
    let report = RootsReport {
        gamma,
        omega0,
        runaway: RootRow {
            re: run.re,
            im: run.im,
            residual: r.polynomial(run).norm(),
        },
        runaway_timescale: 1.0 / run.im,
        roots: rows,
    };
    let mut text = serde_json::to_string_pretty(&report).map_err(|e| CliError::Failed(e.to_string()))?;
    text.push('\n');
    Ok(Output::ok(text))
}

fn write_output(path: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Write {
            path: p.display().to_string(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    let job = plan(cli)?;
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| CliError::Failed(e.to_string()))?;
    }
    let out = job()?;
    write_output(cli.out.as_ref(), &out.text)?;
    if let Some(n) = out.note {
        eprintln!("jiggle-rr: {n}");
    }
    Ok(out.code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("jiggle-rr: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
