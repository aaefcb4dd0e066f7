//! Command-line entry point.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use tsforge_core::sim::dry_run;

use crate::config::{load_config, Config};
use crate::{generate, inspect, plot, read_manifest, write_dataset};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_IO: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "tsforge", version, about = "Synthetic multivariate time series with labeled anomalies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a dataset from a config file.
    Generate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the seed in the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Also write plot.svg.
        #[arg(long)]
        plot: bool,
    },
    /// Check a config without simulating it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print the graph, equations and anomalies of a written dataset.
    Inspect {
        #[arg(long)]
        manifest: PathBuf,
    },
}

enum Failure {
    Invalid(String),
    Io(String),
}

fn load(path: &std::path::Path) -> Result<Config, Failure> {
    load_config(path).map_err(|e| {
        let msg = format!("{}: {e}", path.display());
        if e.is_io() {
            Failure::Io(msg)
        } else {
            Failure::Invalid(msg)
        }
    })
}

fn execute(command: Command, out: &mut dyn Write) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure::Io(e.to_string());
    match command {
        Command::Generate {
            config,
            out: dir,
            seed,
            plot: with_plot,
        } => {
            let mut cfg = load(&config)?;
            if let Some(seed) = seed {
                cfg.set_seed(seed);
            }
            let result = generate(&cfg).map_err(|e| Failure::Invalid(e.to_string()))?;
            let manifest = write_dataset(&result, &dir).map_err(io)?;
            if with_plot {
                plot::emit_plot(&result, &[], &dir.join("plot.svg")).map_err(|e| match e {
                    plot::PlotError::Io(e) => Failure::Io(e.to_string()),
                    other => Failure::Invalid(other.to_string()),
                })?;
            }
            writeln!(out, "wrote {}", manifest.display()).map_err(io)?;
        }
        Command::Validate { config } => {
            match load(&config)? {
                Config::Automatic(p) => {
                    let (graph, windows) = dry_run(&p).map_err(|e| Failure::Invalid(e.to_string()))?;
                    writeln!(
                        out,
                        "ok: automatic, d = {}, {} edges, {} anomaly windows, {} anomalous points",
                        p.d,
                        graph.edges().len(),
                        windows.len(),
                        windows.iter().map(|w| w.len()).sum::<usize>()
                    )
                    .map_err(io)?;
                }
                Config::Manual(m) => {
                    let graph = m
                        .resolve_graph()
                        .map_err(|e| Failure::Invalid(e.to_string()))?;
                    writeln!(
                        out,
                        "ok: manual, d = {}, {} edges, {} anomaly windows",
                        m.d(),
                        graph.edges().len(),
                        m.anomalies.len()
                    )
                    .map_err(io)?;
                }
            }
        }
        Command::Inspect { manifest } => {
            let m = read_manifest(&manifest).map_err(|e| match e {
                crate::writer::ManifestError::Io { .. } => Failure::Io(e.to_string()),
                other => Failure::Invalid(other.to_string()),
            })?;
            out.write_all(inspect::summary(&m).as_bytes()).map_err(io)?;
        }
    }
    Ok(())
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Diagnostics go to standard error.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            EXIT_INVALID
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            EXIT_IO
        }
    }
}
