//! Command-line front end for phonon-blockade sweeps.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use pbsim::config::{load_config, preset, preset_names, NamedSweep};
use pbsim::models::{one_cavity_rwa_warnings, two_cavity_rwa_warnings};
use pbsim::sweep::{
    emit_csv, find_optimum, locate_region_boundaries, run_sweep, ModelParams, ResultRow,
};
use pbsim::{Error, Result};

#[derive(Parser)]
#[command(
    name = "pbsim",
    version,
    about = "Steady-state and time-domain phonon-blockade sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the sweeps described by a config file and write CSV output.
    Simulate {
        /// JSON configuration file.
        #[arg(long)]
        config: PathBuf,
        /// Output CSV path; variant labels are appended to the file stem.
        #[arg(long)]
        out: PathBuf,
    },
    /// Report the axis value that minimises the second-order correlation.
    Optimum {
        /// JSON configuration file.
        #[arg(long)]
        config: PathBuf,
        /// Report the best grid point without golden-section refinement.
        #[arg(long)]
        no_refine: bool,
    },
    /// Bisect the correlation-ordering boundaries of a detuning sweep.
    Boundaries {
        /// JSON configuration file.
        #[arg(long)]
        config: PathBuf,
    },
    /// List or run the shipped figure presets.
    Presets {
        #[command(subcommand)]
        action: PresetAction,
    },
}

#[derive(Subcommand)]
enum PresetAction {
    /// Print the available preset names.
    List,
    /// Run one preset and write its CSV files.
    Run {
        /// Preset name, as printed by `presets list`.
        name: String,
        /// Directory that receives the CSV files.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
}

fn main() -> ExitCode {
    std::env::set_var("OPENBLAS_NUM_THREADS", "1");
    if let Err(err) = configure_threads() {
        eprintln!("error: {err}");
        return ExitCode::from(2);
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(if err.is_config() { 2 } else { 3 })
        }
    }
}

fn configure_threads() -> Result<()> {
    let value = match std::env::var("PB_SIM_THREADS") {
        Ok(v) => v,
        Err(_) => return Ok(()),
    };
    let threads: usize = value.parse().map_err(|_| {
        Error::Config(format!("PB_SIM_THREADS must be a positive integer, got {value:?}"))
    })?;
    if threads == 0 {
        return Err(Error::Config("PB_SIM_THREADS must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::Config(format!("thread pool setup failed: {e}")))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate { config, out } => {
            let sweeps = load_config(&config)?;
            simulate_all(&sweeps, &out)
        }
        Command::Optimum { config, no_refine } => {
            let sweeps = load_config(&config)?;
            for sweep in &sweeps {
                report_warnings(sweep);
                let (axis_value, g2) = find_optimum(&sweep.spec, !no_refine)?;
                println!("{}optimum axis={axis_value:.10e} g2={g2:.10e}", prefix(sweep));
            }
            Ok(())
        }
        Command::Boundaries { config } => {
            let sweeps = load_config(&config)?;
            for sweep in &sweeps {
                report_warnings(sweep);
                let rows = run_sweep(&sweep.spec)?;
                report_failed_rows(sweep, &rows);
                let scan = locate_region_boundaries(&sweep.spec, &rows)?;
                for warning in &scan.warnings {
                    eprintln!("{}warning: {warning}", prefix(sweep));
                }
                for b in &scan.boundaries {
                    println!(
                        "{}boundary axis={:.6} below={} [{}] above={} [{}]",
                        prefix(sweep),
                        b.axis_value,
                        b.below.label,
                        b.below.ordering,
                        b.above.label,
                        b.above.ordering
                    );
                }
            }
            Ok(())
        }
        Command::Presets { action } => match action {
            PresetAction::List => {
                for name in preset_names() {
                    println!("{name}");
                }
                Ok(())
            }
            PresetAction::Run { name, out_dir } => {
                let sweeps = preset(&name)?;
                let out = out_dir.join(format!("{name}.csv"));
                simulate_all(&sweeps, &out)
            }
        },
    }
}

fn simulate_all(sweeps: &[NamedSweep], out: &Path) -> Result<()> {
    for sweep in sweeps {
        report_warnings(sweep);
        let rows = run_sweep(&sweep.spec)?;
        report_failed_rows(sweep, &rows);
        let path = labelled_path(out, &sweep.label);
        emit_csv(&rows, &path)?;
        println!("{}wrote {} ({} rows)", prefix(sweep), path.display(), rows.len());
    }
    Ok(())
}

fn prefix(sweep: &NamedSweep) -> String {
    if sweep.label.is_empty() {
        String::new()
    } else {
        format!("[{}] ", sweep.label)
    }
}

fn report_warnings(sweep: &NamedSweep) {
    let warnings = match &sweep.spec.fixed {
        ModelParams::OneCavity(p) => one_cavity_rwa_warnings(p),
        ModelParams::TwoCavity(p) => two_cavity_rwa_warnings(p),
    };
    if let Ok(warnings) = warnings {
        for w in warnings {
            eprintln!("{}warning: {w}", prefix(sweep));
        }
    }
}

fn report_failed_rows(sweep: &NamedSweep, rows: &[ResultRow]) {
    let failed = rows.iter().filter(|r| r.is_error()).count();
    if failed > 0 {
        eprintln!("{}warning: {failed} of {} points failed", prefix(sweep), rows.len());
    }
}

fn labelled_path(out: &Path, label: &str) -> PathBuf {
    if label.is_empty() {
        return out.to_path_buf();
    }
    let stem = out
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("sweep");
    let name = match out.extension().and_then(|s| s.to_str()) {
        Some(ext) => format!("{stem}_{label}.{ext}"),
        None => format!("{stem}_{label}"),
    };
    out.with_file_name(name)
}
