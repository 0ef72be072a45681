use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qsl_lab::presets::{find, PRESETS};
use qsl_lab::{parse_layered, run_scenario, sweep_parallel, write_artifact, LabError};

#[derive(Parser)]
#[command(
    name = "qsl-lab",
    version,
    about = "Quantum speed limit scenario runner"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a configuration file or a named preset and write CSV plus metadata.
    Run {
        /// INI configuration; applied on top of --preset when both are given.
        config: Option<PathBuf>,
        #[arg(long)]
        preset: Option<String>,
        /// Output CSV path; defaults to the configured path or `<preset>.csv`.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, env = "QSL_LAB_WORKERS")]
        workers: Option<usize>,
        /// `key=value` or `section.key=value`, repeatable.
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// List the shipped figure presets.
    Presets,
}

fn run(
    config: Option<PathBuf>,
    preset: Option<String>,
    out: Option<PathBuf>,
    workers: Option<usize>,
    overrides: Vec<String>,
) -> Result<(), LabError> {
    let base = match &preset {
        Some(name) => {
            find(name)
                .ok_or_else(|| LabError::Argument {
                    name: "preset",
                    message: format!("unknown preset `{name}` (see `qsl-lab presets`)"),
                })?
                .text
        }
        None => "",
    };
    let file_text = match &config {
        Some(path) => std::fs::read_to_string(path).map_err(|source| LabError::Io {
            path: path.clone(),
            source,
        })?,
        None if preset.is_none() => {
            return Err(LabError::Argument {
                name: "config",
                message: "give a configuration file or --preset".into(),
            })
        }
        None => String::new(),
    };
    let cfg = parse_layered(base, &file_text, &overrides)?;
    let artifact = match workers {
        Some(w) => sweep_parallel(&cfg, w)?,
        None => run_scenario(&cfg)?,
    };
    let path = out
        .or_else(|| cfg.output.clone().map(PathBuf::from))
        .or_else(|| preset.map(|p| PathBuf::from(format!("{p}.csv"))))
        .unwrap_or_else(|| PathBuf::from(format!("{}.csv", cfg.kind.name())));
    let meta = write_artifact(&artifact, &path)?;
    eprintln!("wrote {} and {}", path.display(), meta.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Presets => {
            for p in PRESETS {
                println!("{:<18} {}", p.name, p.description);
            }
            Ok(())
        }
        Command::Run {
            config,
            preset,
            out,
            workers,
            overrides,
        } => run(config, preset, out, workers, overrides),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
