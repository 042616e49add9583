//! `gatesim`: single-gate trials and sweeps, potential-energy landscapes,
//! obstacle-field runs, transition-matrix estimation, and Markov-chain
//! prediction, all emitting plot-ready text files.

use clap::{Parser, Subcommand, ValueEnum};
use gatesim_cli::CliError;
use gatesim_cli::config::{fingerprint_hex, load_config};
use gatesim_cli::output::{
    CompareReport, RunManifest, read_histogram_csv, read_matrix, read_trajectory,
    write_histogram_csv, write_landscape_csv, write_lattice_trajectory, write_manifest,
    write_matrix, write_overlay_csv, write_report, write_sweep_csv, write_trajectory,
};
use gatesim_cli::parallel::{par_estimate, par_lattice_batch, par_sweep};
use gatesim_core::dynamics::{Outcome, TrialOptions, run_trial};
use gatesim_core::experiments::SweepAxes;
use gatesim_core::landscape::{compute_grid, trajectory_overlay};
use gatesim_core::lattice::{EntryState, LatticeOptions, run_lattice_trial};
use gatesim_core::markov::{
    BinInit, Boundary, BoundaryState, McmcOptions, compare, discretize_input, mcmc_run,
};
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Environment variable prefixing relative output paths.
const OUT_DIR_ENV: &str = "GATESIM_OUT_DIR";

#[derive(Parser)]
#[command(name = "gatesim", version, about)]
struct Cli {
    /// Worker threads for batch subcommands (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Manifest path (default: `<first output>.manifest.json`).
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one single-gate trial and write its trajectory.
    GateRun {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: u64,
        /// Trajectory output (one JSON record per sampled step).
        #[arg(long)]
        out: PathBuf,
        /// Record every n-th step.
        #[arg(long, default_value_t = 1)]
        decimate: u32,
    },
    /// Monte Carlo sweep over propulsion, noise, and stiffness axes.
    GateSweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: u32,
        /// Propulsive force axis, comma separated.
        #[arg(long, value_delimiter = ',')]
        f_prop: Vec<f64>,
        /// Random force magnitude axis.
        #[arg(long, value_delimiter = ',')]
        rm: Vec<f64>,
        /// Left beam stiffness axis.
        #[arg(long, value_delimiter = ',')]
        k_l: Vec<f64>,
        /// Cell table output (CSV).
        #[arg(long)]
        out: PathBuf,
    },
    /// Sample the potential energy landscape; optionally overlay a
    /// trajectory's energy series.
    Landscape {
        #[arg(long)]
        config: PathBuf,
        /// Grid output (CSV).
        #[arg(long)]
        out: PathBuf,
        /// Mesh spacing `[m]`.
        #[arg(long, default_value_t = 0.5)]
        step: f64,
        /// Trajectory to overlay (from gate-run).
        #[arg(long)]
        overlay: Option<PathBuf>,
        /// Overlay series output (CSV).
        #[arg(long)]
        overlay_out: Option<PathBuf>,
    },
    /// Run trials across the 9x9 obstacle field and histogram the final
    /// gates.
    LatticeRun {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: u32,
        /// Entry position on the bottom boundary of gate (0,0) `[m]`.
        #[arg(long, default_value_t = 0.0)]
        init_d: f64,
        #[arg(long, default_value_t = 0.0)]
        init_vx: f64,
        #[arg(long, default_value_t = 15.0)]
        init_vy: f64,
        /// Histogram output (CSV).
        #[arg(long)]
        out: PathBuf,
        /// Record the first trial's trajectory with gate indices.
        #[arg(long)]
        traj_out: Option<PathBuf>,
    },
    /// Estimate the 87x88 gate transition matrix from single-gate trials.
    MarkovEstimate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials_per_state: u32,
        /// How trials are placed within each input-state box.
        #[arg(long, value_enum, default_value_t = InitMode::Center)]
        init: InitMode,
        /// Matrix output (JSON).
        #[arg(long)]
        out: PathBuf,
    },
    /// Predict the final-location histogram by sampling the transition
    /// matrix instead of integrating dynamics.
    MarkovPredict {
        /// Matrix file from markov-estimate.
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: u32,
        #[arg(long, default_value_t = 0.0)]
        init_d: f64,
        #[arg(long, default_value_t = 0.0)]
        init_vx: f64,
        #[arg(long, default_value_t = 15.0)]
        init_vy: f64,
        /// Gate-transition budget per trial.
        #[arg(long, default_value_t = 13)]
        max_transitions: u32,
        /// Histogram output (CSV).
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare two final-location histograms (correlation and RMSE).
    Compare {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        /// Report output (JSON); metrics also print to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Wall-clock of the method behind `a`, for the report `[ms]`.
        #[arg(long)]
        a_ms: Option<f64>,
        /// Wall-clock of the method behind `b` `[ms]`.
        #[arg(long)]
        b_ms: Option<f64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum InitMode {
    Center,
    Uniform,
}

impl InitMode {
    fn to_bin_init(self) -> BinInit {
        match self {
            InitMode::Center => BinInit::Center,
            InitMode::Uniform => BinInit::Uniform,
        }
    }

    fn name(self) -> &'static str {
        match self {
            InitMode::Center => "center",
            InitMode::Uniform => "uniform",
        }
    }
}

/// Prefix relative paths with the output-directory override, when set.
fn resolve_out(path: &Path) -> PathBuf {
    if path.is_relative()
        && let Ok(dir) = std::env::var(OUT_DIR_ENV)
        && !dir.is_empty()
    {
        return PathBuf::from(dir).join(path);
    }
    path.to_path_buf()
}

fn main() {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    match run(cli) {
        Ok(()) => {}
        Err(err) => {
            eprintln!("gatesim: {err}");
            std::process::exit(err.exit_code());
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let started = Instant::now();
    let mut manifest = RunManifest {
        subcommand: String::new(),
        config_fingerprint: None,
        master_seed: None,
        outputs: Vec::new(),
        timings_ms: Vec::new(),
    };

    match cli.command {
        Command::GateRun {
            config,
            seed,
            out,
            decimate,
        } => {
            manifest.subcommand = "gate-run".into();
            let cfg = load_config(&config)?;
            manifest.config_fingerprint = Some(fingerprint_hex(&cfg));
            manifest.master_seed = Some(seed);
            let result = run_trial(
                &cfg,
                seed,
                TrialOptions {
                    record_every: Some(decimate.max(1)),
                },
            )?;
            let out = resolve_out(&out);
            write_trajectory(&out, &result.trajectory)?;
            manifest.outputs.push(out.display().to_string());
            println!(
                "outcome: {:?} after {} steps (t = {:.3} s), {} records",
                result.outcome,
                result.steps,
                result.final_state.t,
                result.trajectory.len()
            );
            if result.outcome == Outcome::Aborted {
                finish(&cli.manifest, manifest, started)?;
                return Err(CliError::Numerical(format!(
                    "trial aborted at step {}",
                    result.steps
                )));
            }
        }
        Command::GateSweep {
            config,
            seed,
            trials,
            f_prop,
            rm,
            k_l,
            out,
        } => {
            manifest.subcommand = "gate-sweep".into();
            let cfg = load_config(&config)?;
            manifest.config_fingerprint = Some(fingerprint_hex(&cfg));
            manifest.master_seed = Some(seed);
            let axes = SweepAxes { f_prop, rm, k_l };
            let cells = par_sweep(&cfg, &axes, trials, seed)?;
            let out = resolve_out(&out);
            write_sweep_csv(&out, &cells)?;
            manifest.outputs.push(out.display().to_string());
            let aborted: u32 = cells.iter().map(|c| c.counts.aborted).sum();
            println!(
                "{} cells x {} trials written to {}{}",
                cells.len(),
                trials,
                out.display(),
                if aborted > 0 {
                    format!(" ({aborted} aborted trials)")
                } else {
                    String::new()
                }
            );
        }
        Command::Landscape {
            config,
            out,
            step,
            overlay,
            overlay_out,
        } => {
            manifest.subcommand = "landscape".into();
            let cfg = load_config(&config)?;
            manifest.config_fingerprint = Some(fingerprint_hex(&cfg));
            let grid = compute_grid(&cfg, step)?;
            let out = resolve_out(&out);
            write_landscape_csv(&out, &grid)?;
            manifest.outputs.push(out.display().to_string());
            println!(
                "{} x {} nodes written to {} ({} capped)",
                grid.xs.len(),
                grid.ys.len(),
                out.display(),
                grid.capped_nodes
            );
            match (overlay, overlay_out) {
                (Some(traj_path), Some(series_path)) => {
                    let records = read_trajectory(&traj_path)?;
                    let points = trajectory_overlay(&records, &cfg, false)?;
                    let series_path = resolve_out(&series_path);
                    write_overlay_csv(&series_path, &points)?;
                    manifest.outputs.push(series_path.display().to_string());
                    println!(
                        "overlay of {} records written to {}",
                        points.len(),
                        series_path.display()
                    );
                }
                (None, None) => {}
                _ => {
                    return Err(CliError::Config(
                        "--overlay and --overlay-out must be given together".into(),
                    ));
                }
            }
        }
        Command::LatticeRun {
            config,
            seed,
            trials,
            init_d,
            init_vx,
            init_vy,
            out,
            traj_out,
        } => {
            manifest.subcommand = "lattice-run".into();
            let cfg = load_config(&config)?;
            manifest.config_fingerprint = Some(fingerprint_hex(&cfg));
            manifest.master_seed = Some(seed);
            let entry = EntryState {
                d: init_d,
                vx: init_vx,
                vy: init_vy,
            };
            let hist = par_lattice_batch(&cfg, trials, seed, entry)?;
            let out = resolve_out(&out);
            write_histogram_csv(&out, &hist)?;
            manifest.outputs.push(out.display().to_string());
            println!("{} trials histogrammed to {}", hist.total(), out.display());
            if let Some(traj_out) = traj_out {
                let result = run_lattice_trial(
                    &cfg,
                    gatesim_core::rng::derive_seed(seed, 0),
                    entry,
                    LatticeOptions {
                        record_every: Some(1),
                        global_budget: None,
                    },
                )?;
                let traj_out = resolve_out(&traj_out);
                write_lattice_trajectory(&traj_out, &result.trajectory)?;
                manifest.outputs.push(traj_out.display().to_string());
                println!(
                    "first trial ({:?} at gate ({}, {})) recorded to {}",
                    result.end,
                    result.final_gate.ix,
                    result.final_gate.iy,
                    traj_out.display()
                );
            }
        }
        Command::MarkovEstimate {
            config,
            seed,
            trials_per_state,
            init,
            out,
        } => {
            manifest.subcommand = "markov-estimate".into();
            let cfg = load_config(&config)?;
            manifest.config_fingerprint = Some(fingerprint_hex(&cfg));
            manifest.master_seed = Some(seed);
            let matrix = par_estimate(&cfg, trials_per_state, seed, init.to_bin_init())?;
            let out = resolve_out(&out);
            write_matrix(&out, &matrix, init.name())?;
            manifest.outputs.push(out.display().to_string());
            println!(
                "87 x 88 matrix ({} trials/state) written to {}; diagnostics: {:?}",
                trials_per_state,
                out.display(),
                matrix.diag
            );
        }
        Command::MarkovPredict {
            matrix,
            seed,
            trials,
            init_d,
            init_vx,
            init_vy,
            max_transitions,
            out,
        } => {
            manifest.subcommand = "markov-predict".into();
            manifest.master_seed = Some(seed);
            let matrix = read_matrix(&matrix)?;
            manifest.config_fingerprint = Some(format!("{:016x}", matrix.config_fingerprint));
            let q = BoundaryState {
                boundary: Boundary::En,
                d: init_d,
                vx: init_vx,
                vy: init_vy,
            };
            let (input, clamped) =
                discretize_input(&q).map_err(|e| CliError::Config(e.to_string()))?;
            if clamped {
                eprintln!("gatesim: initial state clamped into input state {input}");
            }
            let (hist, diag) = mcmc_run(
                &matrix,
                input,
                trials,
                seed,
                McmcOptions { max_transitions },
            );
            let out = resolve_out(&out);
            write_histogram_csv(&out, &hist)?;
            manifest.outputs.push(out.display().to_string());
            println!(
                "{} chain trials from input {} histogrammed to {}; {:?}",
                trials,
                input,
                out.display(),
                diag
            );
        }
        Command::Compare {
            a,
            b,
            out,
            a_ms,
            b_ms,
        } => {
            manifest.subcommand = "compare".into();
            let hist_a = read_histogram_csv(&a)?;
            let hist_b = read_histogram_csv(&b)?;
            let result = compare(&hist_a, &hist_b).map_err(|e| CliError::Config(e.to_string()))?;
            match result.corrcoef {
                Some(r) => println!("corrcoef: {r}"),
                None => println!("corrcoef: undefined (zero variance)"),
            }
            println!("rmse: {}", result.rmse);
            if let Some(out) = out {
                let report = CompareReport {
                    corrcoef: result.corrcoef,
                    rmse: result.rmse,
                    total_a: hist_a.total(),
                    total_b: hist_b.total(),
                    hist_a,
                    hist_b,
                    wall_clock_a_ms: a_ms,
                    wall_clock_b_ms: b_ms,
                };
                let out = resolve_out(&out);
                write_report(&out, &report)?;
                manifest.outputs.push(out.display().to_string());
            }
        }
    }

    finish(&cli.manifest, manifest, started)
}

/// Write the manifest next to the first output (or to the explicit path).
fn finish(
    manifest_path: &Option<PathBuf>,
    mut manifest: RunManifest,
    started: Instant,
) -> Result<(), CliError> {
    manifest
        .timings_ms
        .push(("total".into(), started.elapsed().as_secs_f64() * 1e3));
    let path = match manifest_path {
        Some(path) => resolve_out(path),
        None => match manifest.outputs.first() {
            Some(first) => PathBuf::from(format!("{first}.manifest.json")),
            None => return Ok(()),
        },
    };
    write_manifest(&path, &manifest)
}
