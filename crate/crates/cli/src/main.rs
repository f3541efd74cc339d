//! Command-line driver: run configurations or presets, validate configs,
//! and dispatch parameter sweeps. Output goes under the directory named by
//! `HYTRANS_OUT` (default `./out`), one subdirectory per run.
//!
//! Exit codes: 0 success, 2 configuration error, 3 solver failure, 4 I/O
//! error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hytrans_core::config::{parse_config, presets, RunConfig};
use hytrans_core::runner::{execute, RunArtifacts};
use hytrans_core::Error;

#[derive(Parser)]
#[command(name = "hytrans", about = "Coupled elastoplastic hydrogen-transport simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a configuration file.
    Run {
        config: PathBuf,
        /// Validate and print the resolved plan without solving.
        #[arg(long)]
        dry_run: bool,
        /// Override configuration entries, e.g. `material.softening_xi=-5000`.
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Run a named benchmark preset.
    Preset {
        name: String,
        #[arg(long)]
        dry_run: bool,
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        /// List available presets and exit.
        #[arg(long)]
        list: bool,
    },
    /// Validate a configuration file and report all errors.
    Validate { config: PathBuf },
    /// Run every entry of a sweep manifest.
    Sweep { manifest: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Config(_) => 2,
                Error::Io(_) => 4,
                _ => 3,
            })
        }
    }
}

fn out_root() -> PathBuf {
    std::env::var_os("HYTRANS_OUT")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn dispatch(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Run { config, dry_run, overrides } => {
            let text = std::fs::read_to_string(&config)?;
            let resolved = with_overrides(&text, &overrides)?;
            run_one(&resolved, dry_run)
        }
        Command::Preset { name, dry_run, overrides, list } => {
            if list {
                for p in presets::PRESET_NAMES {
                    println!("{p}");
                }
                return Ok(());
            }
            let text = presets::preset(&name)?;
            let resolved = with_overrides(text, &overrides)?;
            run_one(&resolved, dry_run)
        }
        Command::Validate { config } => {
            let text = std::fs::read_to_string(&config)?;
            let parsed = parse_config(&text)?;
            for w in &parsed.warnings {
                println!("warning: {w}");
            }
            println!("ok: `{}` is valid", parsed.name);
            Ok(())
        }
        Command::Sweep { manifest } => {
            let text = std::fs::read_to_string(&manifest)?;
            run_sweep(&text)
        }
    }
}

fn run_one(config: &RunConfig, dry_run: bool) -> Result<(), Error> {
    for w in &config.warnings {
        eprintln!("warning: {w}");
    }
    if dry_run {
        println!("dry run: configuration `{}` resolves to:", config.name);
        print!("{}", config.to_toml_string());
        return Ok(());
    }
    let artifacts = execute(config)?;
    write_artifacts(&config.name, &artifacts)?;
    println!("{}", artifacts.summary);
    Ok(())
}

fn write_artifacts(name: &str, artifacts: &RunArtifacts) -> Result<(), Error> {
    let dir = out_root().join(name);
    std::fs::create_dir_all(&dir)?;
    for (file, content) in &artifacts.files {
        std::fs::write(dir.join(file), content)?;
        println!("wrote {}", dir.join(file).display());
    }
    Ok(())
}

/// Applies `key.path=value` overrides onto the TOML document, then parses.
fn with_overrides(text: &str, overrides: &[String]) -> Result<RunConfig, Error> {
    if overrides.is_empty() {
        return parse_config(text);
    }
    let mut table: toml::Table = text
        .parse()
        .map_err(|e| Error::Config(vec![format!("TOML syntax: {e}")]))?;
    for item in overrides {
        let Some((path, value)) = item.split_once('=') else {
            return Err(Error::Config(vec![format!(
                "override `{item}` is not of the form key=value"
            )]));
        };
        apply_override(&mut table, path.trim(), value.trim())
            .map_err(|e| Error::Config(vec![format!("override `{item}`: {e}")]))?;
    }
    parse_config(&toml::to_string(&table).map_err(|e| Error::Config(vec![e.to_string()]))?)
}

fn apply_override(table: &mut toml::Table, path: &str, value: &str) -> Result<(), String> {
    let parts: Vec<&str> = path.split('.').collect();
    let parsed: toml::Value = if let Ok(b) = value.parse::<bool>() {
        toml::Value::Boolean(b)
    } else if let Ok(i) = value.parse::<i64>() {
        toml::Value::Integer(i)
    } else if let Ok(f) = value.parse::<f64>() {
        toml::Value::Float(f)
    } else {
        toml::Value::String(value.to_string())
    };
    let mut current: &mut toml::Value = table
        .entry(parts[0].to_string())
        .or_insert_with(|| toml::Value::Table(Default::default()));
    for part in &parts[1..] {
        if let Ok(idx) = part.parse::<usize>() {
            let arr = current
                .as_array_mut()
                .ok_or_else(|| format!("`{part}` indexes a non-array"))?;
            current = arr
                .get_mut(idx)
                .ok_or_else(|| format!("index {idx} out of range"))?;
        } else {
            let t = current
                .as_table_mut()
                .ok_or_else(|| format!("`{part}` indexes a non-table"))?;
            current = t
                .entry(part.to_string())
                .or_insert_with(|| toml::Value::Table(Default::default()));
        }
    }
    *current = parsed;
    Ok(())
}

/// Sweep manifest: an array of `[[run]]` tables with `preset` or `config`,
/// an output `name` and an optional `overrides` list.
fn run_sweep(text: &str) -> Result<(), Error> {
    let table: toml::Table = text
        .parse()
        .map_err(|e| Error::Config(vec![format!("manifest syntax: {e}")]))?;
    let Some(toml::Value::Array(runs)) = table.get("run") else {
        return Err(Error::Config(vec!["manifest needs [[run]] entries".to_string()]));
    };
    for (i, entry) in runs.iter().enumerate() {
        let Some(t) = entry.as_table() else {
            return Err(Error::Config(vec![format!("[[run]][{i}] must be a table")]));
        };
        let text = if let Some(p) = t.get("preset").and_then(|v| v.as_str()) {
            presets::preset(p)?.to_string()
        } else if let Some(path) = t.get("config").and_then(|v| v.as_str()) {
            std::fs::read_to_string(Path::new(path))?
        } else {
            return Err(Error::Config(vec![format!(
                "[[run]][{i}] needs `preset` or `config`"
            )]));
        };
        let overrides: Vec<String> = t
            .get("overrides")
            .and_then(|v| v.as_array())
            .map(|a| a.iter().filter_map(|v| v.as_str().map(String::from)).collect())
            .unwrap_or_default();
        let mut config = with_overrides(&text, &overrides)?;
        if let Some(name) = t.get("name").and_then(|v| v.as_str()) {
            config.name = name.to_string();
        }
        println!("sweep [{i}]: running `{}`", config.name);
        let artifacts = execute(&config)?;
        write_artifacts(&config.name, &artifacts)?;
        println!("{}", artifacts.summary);
    }
    Ok(())
}
