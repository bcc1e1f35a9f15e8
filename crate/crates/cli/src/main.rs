use std::path::PathBuf;
use std::process::ExitCode;

use ptsim_cli::config::parse_config;
use ptsim_cli::run::{execute, Command};

const USAGE: &str =
    "usage: ptsim <verify|evolve|tomo|sweep|table1> --config <path> [--out <dir>] [--seed <int>]";

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, message)) => {
            eprintln!("ptsim: {message}");
            ExitCode::from(code)
        }
    }
}

fn run(args: &[String]) -> Result<(), (u8, String)> {
    if args.is_empty() {
        return Err((2, USAGE.to_string()));
    }
    let command = Command::from_name(&args[0])
        .ok_or_else(|| (2, format!("unknown command `{}`\n{USAGE}", args[0])))?;

    let mut config_path: Option<PathBuf> = None;
    let mut out_dir: Option<PathBuf> = None;
    let mut seed: Option<u64> = None;

    let mut iter = args[1..].iter();
    while let Some(flag) = iter.next() {
        let mut value = |name: &str| {
            iter.next()
                .cloned()
                .ok_or_else(|| (2u8, format!("{name} requires a value\n{USAGE}")))
        };
        match flag.as_str() {
            "--config" => config_path = Some(PathBuf::from(value("--config")?)),
            "--out" => out_dir = Some(PathBuf::from(value("--out")?)),
            "--seed" => {
                let raw = value("--seed")?;
                seed = Some(raw.parse().map_err(|_| {
                    (
                        2,
                        format!("--seed expects an unsigned integer, got `{raw}`"),
                    )
                })?);
            }
            other => return Err((2, format!("unknown flag `{other}`\n{USAGE}"))),
        }
    }

    let config_path = config_path.ok_or_else(|| (2, format!("--config is required\n{USAGE}")))?;
    let text = std::fs::read_to_string(&config_path)
        .map_err(|e| (2, format!("cannot read {}: {e}", config_path.display())))?;
    let mut cfg = parse_config(&text).map_err(|e| (2, e.to_string()))?;
    if let Some(dir) = out_dir {
        cfg.output_dir = dir;
    }
    if let Some(seed) = seed {
        cfg.seed = seed;
    }

    let report = execute(command, &cfg).map_err(|e| (e.exit_code() as u8, e.to_string()))?;
    for line in &report.lines {
        println!("{line}");
    }
    for file in &report.files {
        println!("wrote {}", file.display());
    }
    Ok(())
}
