//! Child-process resource sampling and pose-rate measurement.
//!
//! CPU is reported as percent of one core (two saturated cores read
//! 200%); memory is the resident set in MB. Linux only: accounting comes
//! from `/proc/<pid>/stat` and `statm`.

use std::io::Write as _;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::traj::Trajectory;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ResourceSample {
    /// Seconds since spawn.
    pub t: f64,
    /// Percent of one core over the previous sampling interval.
    pub cpu_percent: f64,
    /// Resident set size, MB.
    pub rss_mb: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResourceTrace {
    pub samples: Vec<ResourceSample>,
    pub exit_code: Option<i32>,
    pub wall_seconds: f64,
}

impl ResourceTrace {
    pub fn cpu_mean(&self) -> f64 {
        mean(self.samples.iter().map(|s| s.cpu_percent))
    }

    pub fn rss_mean_mb(&self) -> f64 {
        mean(self.samples.iter().map(|s| s.rss_mb))
    }

    pub fn rss_max_mb(&self) -> f64 {
        self.samples.iter().map(|s| s.rss_mb).fold(0.0, f64::max)
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path.as_ref())?);
        writeln!(out, "t,cpu_percent,rss_mb")?;
        for s in &self.samples {
            writeln!(out, "{:.3},{:.2},{:.3}", s.t, s.cpu_percent, s.rss_mb)?;
        }
        out.flush()?;
        Ok(())
    }
}

fn mean(iter: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut n) = (0.0, 0usize);
    for v in iter {
        sum += v;
        n += 1;
    }
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// Aggregate of a monitored run, in the shape resource tables report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResourceSummary {
    pub cpu_mean_percent: f64,
    pub ram_mean_mb: f64,
    pub ram_max_mb: f64,
    /// Poses emitted per wall-clock second, when a trajectory was given.
    pub pose_rate_hz: Option<f64>,
    /// Data seconds replayed per wall second, when a trajectory was given.
    pub replay_factor: Option<f64>,
    pub wall_seconds: f64,
    pub exit_code: Option<i32>,
    pub sample_count: usize,
}

pub fn summarize(trace: &ResourceTrace, trajectory: Option<&Trajectory>) -> ResourceSummary {
    let (pose_rate_hz, replay_factor) = match trajectory {
        Some(traj) if trace.wall_seconds > 0.0 => {
            let rate = traj.len() as f64 / trace.wall_seconds;
            let replay = traj
                .time_span()
                .map(|(a, b)| (b - a) / trace.wall_seconds);
            (Some(rate), replay)
        }
        _ => (None, None),
    };
    ResourceSummary {
        cpu_mean_percent: trace.cpu_mean(),
        ram_mean_mb: trace.rss_mean_mb(),
        ram_max_mb: trace.rss_max_mb(),
        pose_rate_hz,
        replay_factor,
        wall_seconds: trace.wall_seconds,
        exit_code: trace.exit_code,
        sample_count: trace.samples.len(),
    }
}

/// Spawns `command` (argv form) and samples its CPU time and resident
/// memory every `sample_period` until it exits. A crashing child still
/// yields the partial trace with its exit code.
pub fn monitor_process(command: &[String], sample_period: Duration) -> Result<ResourceTrace> {
    if command.is_empty() {
        return Err(Error::InvalidArgument("monitor needs a command".into()));
    }
    if sample_period.is_zero() {
        return Err(Error::InvalidArgument(
            "sample period must be positive".into(),
        ));
    }
    if !cfg!(target_os = "linux") {
        return Err(Error::Unsupported(
            "process monitoring reads /proc and needs Linux".into(),
        ));
    }

    let mut child = Command::new(&command[0])
        .args(&command[1..])
        .spawn()
        .map_err(|source| Error::Spawn {
            command: command.join(" "),
            source,
        })?;
    let pid = child.id();
    let ticks_per_sec = unsafe { libc::sysconf(libc::_SC_CLK_TCK) } as f64;
    let page_bytes = unsafe { libc::sysconf(libc::_SC_PAGESIZE) } as f64;

    let start = Instant::now();
    let mut samples = Vec::new();
    let mut last_ticks = 0.0f64;
    let mut last_t = 0.0f64;
    let exit_code = loop {
        if let Some(status) = child.try_wait()? {
            break status.code();
        }
        std::thread::sleep(sample_period);
        let t = start.elapsed().as_secs_f64();
        if let Some((ticks, rss_pages)) = read_proc(pid) {
            let dt = t - last_t;
            let cpu_percent = if dt > 0.0 {
                100.0 * (ticks - last_ticks) / ticks_per_sec / dt
            } else {
                0.0
            };
            samples.push(ResourceSample {
                t,
                cpu_percent: cpu_percent.max(0.0),
                rss_mb: rss_pages * page_bytes / (1024.0 * 1024.0),
            });
            last_ticks = ticks;
            last_t = t;
        }
        // A failed /proc read means the child exited between the wait
        // poll and the read; the next try_wait picks that up.
    };
    Ok(ResourceTrace {
        samples,
        exit_code,
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}

/// `(utime + stime in ticks, resident pages)` for a live process.
fn read_proc(pid: u32) -> Option<(f64, f64)> {
    let stat = std::fs::read_to_string(format!("/proc/{pid}/stat")).ok()?;
    // utime and stime are fields 14 and 15 (1-based) of the stat line;
    // indexing starts after the parenthesized command name, which may
    // itself contain spaces.
    let after = &stat[stat.rfind(')')? + 2..];
    let fields: Vec<&str> = after.split_whitespace().collect();
    let utime: f64 = fields.get(11)?.parse().ok()?;
    let stime: f64 = fields.get(12)?.parse().ok()?;

    let statm = std::fs::read_to_string(format!("/proc/{pid}/statm")).ok()?;
    let rss_pages: f64 = statm.split_whitespace().nth(1)?.parse().ok()?;
    Some((utime + stime, rss_pages))
}

/// Poses per wall-clock second.
pub fn measure_pose_rate(trajectory: &Trajectory, wall_duration: Duration) -> Result<f64> {
    if trajectory.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "pose rate needs >= 2 poses, got {}",
            trajectory.len()
        )));
    }
    let secs = wall_duration.as_secs_f64();
    if secs <= 0.0 {
        return Err(Error::InvalidArgument(
            "wall duration must be positive".into(),
        ));
    }
    Ok(trajectory.len() as f64 / secs)
}
