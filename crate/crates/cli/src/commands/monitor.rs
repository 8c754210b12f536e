use std::path::PathBuf;
use std::time::Duration;

use clap::Parser;
use gtforge_core::bench::{monitor_process, summarize};
use gtforge_core::error::Result;
use gtforge_core::io::read_tum;

#[derive(Parser)]
pub struct Args {
    /// Sampling period in seconds.
    #[arg(long, default_value_t = 0.5)]
    period: f64,
    /// Trace CSV output (t,cpu_percent,rss_mb).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Summary JSON output.
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Trajectory the child produced; enables pose rate and replay factor.
    #[arg(long)]
    traj: Option<PathBuf>,
    /// Command to run and monitor.
    #[arg(trailing_var_arg = true, allow_hyphen_values = true, required = true)]
    command: Vec<String>,
}

pub fn run(args: Args) -> Result<()> {
    if args.period <= 0.0 {
        return Err(gtforge_core::Error::InvalidArgument(
            "--period must be positive".into(),
        ));
    }
    let trace = monitor_process(&args.command, Duration::from_secs_f64(args.period))?;
    if let Some(path) = &args.out {
        trace.write_csv(path)?;
    }
    let trajectory = match &args.traj {
        Some(path) => Some(read_tum(path)?),
        None => None,
    };
    let summary = summarize(&trace, trajectory.as_ref());
    if let Some(path) = &args.summary {
        std::fs::write(
            path,
            serde_json::to_string_pretty(&summary).expect("summary serializes") + "\n",
        )?;
    }
    println!(
        "cpu {:.1}% (of one core), ram mean {:.1} MB max {:.1} MB, wall {:.2}s, child exit {:?}{}",
        summary.cpu_mean_percent,
        summary.ram_mean_mb,
        summary.ram_max_mb,
        summary.wall_seconds,
        summary.exit_code,
        match (summary.pose_rate_hz, summary.replay_factor) {
            (Some(rate), Some(replay)) =>
                format!(", poses {rate:.1} Hz, replay x{replay:.1}"),
            (Some(rate), None) => format!(", poses {rate:.1} Hz"),
            _ => String::new(),
        }
    );
    Ok(())
}
