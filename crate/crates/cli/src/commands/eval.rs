use std::io::Write as _;
use std::path::PathBuf;

use clap::Parser;
use gtforge_core::error::Result;
use gtforge_core::io::read_tum;
use gtforge_core::traj::{compute_ape, stationary_deviation, AlignMode, ApeOptions};

use crate::config::{merge_into_report, to_json_value, RunConfig};

#[derive(Parser)]
pub struct Args {
    /// Estimated trajectory (TUM).
    #[arg(long)]
    est: PathBuf,
    /// Reference trajectory (TUM).
    #[arg(long = "ref")]
    reference: PathBuf,
    /// Rigid alignment before the error: none or umeyama.
    #[arg(long, value_enum)]
    align: Option<AlignArg>,
    /// Association tolerance in seconds.
    #[arg(long)]
    max_dt: Option<f64>,
    /// Also report per-axis deviation of the estimate over [start, end].
    #[arg(long)]
    window_start: Option<f64>,
    #[arg(long)]
    window_end: Option<f64>,
    /// Statistics JSON output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-pose error CSV output (t,error_m).
    #[arg(long)]
    csv: Option<PathBuf>,
    /// report.json to extend with the "ape" section.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum AlignArg {
    None,
    Umeyama,
}

pub fn run(args: Args) -> Result<()> {
    let config = RunConfig::load(args.config.as_deref())?;
    let mut opts: ApeOptions = config.eval;
    if let Some(align) = args.align {
        opts.align = match align {
            AlignArg::None => AlignMode::None,
            AlignArg::Umeyama => AlignMode::Umeyama,
        };
    }
    if let Some(max_dt) = args.max_dt {
        opts.max_dt = max_dt;
    }

    let est = read_tum(&args.est)?;
    let reference = read_tum(&args.reference)?;
    let stats = compute_ape(&est, &reference, &opts)?;

    let deviation = match (args.window_start, args.window_end) {
        (Some(t0), Some(t1)) => Some(stationary_deviation(&est, (t0, t1))?),
        (None, None) => None,
        _ => {
            return Err(gtforge_core::Error::InvalidArgument(
                "--window-start and --window-end go together".into(),
            ))
        }
    };

    // All lengths in meters.
    println!(
        "APE over {} pairs: mean {:.6} std {:.6} rmse {:.6} median {:.6} max {:.6} [m]",
        stats.pair_count, stats.mean, stats.std, stats.rmse, stats.median, stats.max
    );
    if let Some(dev) = &deviation {
        println!(
            "deviation [{:.3}, {:.3}]s: x {:.6} y {:.6} z {:.6} overall {:.6} [m]",
            args.window_start.unwrap(),
            args.window_end.unwrap(),
            dev.per_axis[0],
            dev.per_axis[1],
            dev.per_axis[2],
            dev.overall
        );
    }

    let stats_json = serde_json::json!({
        "units": "meters",
        "pair_count": stats.pair_count,
        "mean": stats.mean,
        "std": stats.std,
        "rmse": stats.rmse,
        "median": stats.median,
        "max": stats.max,
        "align": to_json_value(&opts.align),
        "max_dt": opts.max_dt,
        "stationary_deviation": deviation.as_ref().map(to_json_value),
    });
    if let Some(path) = &args.out {
        std::fs::write(
            path,
            serde_json::to_string_pretty(&stats_json).expect("stats serialize") + "\n",
        )?;
    }
    if let Some(path) = &args.csv {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(out, "t,error_m")?;
        for (t, e) in &stats.per_pose_errors {
            writeln!(out, "{t:.6},{e:.9}")?;
        }
        out.flush()?;
    }
    if let Some(path) = &args.report {
        merge_into_report(path, |map| {
            map.insert("ape".into(), stats_json);
        })?;
    }
    Ok(())
}
