use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use radperc::runner::{run, ConfigError, ExperimentConfig, RunError};

/// Simulate operator spreading with qubit swap-out and analyse the
/// resulting directed-percolation curves.
#[derive(Parser, Debug)]
#[command(name = "radperc", version)]
struct Cli {
    /// otoc, dp, decode, info, meanfield, fit or collapse
    mode: String,
    /// key = value configuration file; flags override its entries
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "N")]
    n: Option<String>,
    /// swap rate, list `a,b,c` or range `start:stop:step`
    #[arg(long)]
    p: Option<String>,
    /// local dimension, or `inf`
    #[arg(long)]
    q: Option<String>,
    #[arg(long)]
    k: Option<String>,
    #[arg(long)]
    depth: Option<String>,
    /// number of trajectories
    #[arg(long)]
    traj: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// worker threads (default: $RADPERC_WORKERS, then all cores)
    #[arg(long)]
    workers: Option<String>,
    /// output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// input directory for fit and collapse
    #[arg(long)]
    input: Option<PathBuf>,
    /// any other configuration entry
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

fn load(cli: &Cli) -> Result<ExperimentConfig, RunError> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| RunError::Io {
                path: path.clone(),
                source,
            })?;
            ExperimentConfig::parse(&text).map_err(|e| {
                let at = e.line.map(|l| format!(":{l}")).unwrap_or_default();
                RunError::Config(ConfigError::new(format!(
                    "{}{at}: {}",
                    path.display(),
                    e.message
                )))
            })?
        }
        None => ExperimentConfig::default(),
    };
    cfg.set_override("mode", &cli.mode)?;
    for pair in &cli.set {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| ConfigError::new(format!("--set expects KEY=VALUE, got {pair:?}")))?;
        cfg.set_override(k.trim(), v.trim())?;
    }
    let flags = [
        ("N", cli.n.clone()),
        ("p", cli.p.clone()),
        ("q", cli.q.clone()),
        ("k", cli.k.clone()),
        ("depth", cli.depth.clone()),
        ("n_traj", cli.traj.clone()),
        ("seed", cli.seed.clone()),
        ("workers", cli.workers.clone()),
        (
            "output_dir",
            cli.out.as_ref().map(|p| p.display().to_string()),
        ),
        ("input", cli.input.as_ref().map(|p| p.display().to_string())),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            cfg.set_override(key, &v)?;
        }
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = load(&cli).and_then(|cfg| run(&cfg));
    match result {
        Ok(summary) => {
            for note in &summary.notes {
                eprintln!("note: {note}");
            }
            eprintln!(
                "wrote {} files to {} in {:.2?}",
                summary.files.len(),
                summary.output_dir.display(),
                summary.wall_time
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("radperc: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
