//! TUM trajectory format: one `t tx ty tz qx qy qz qw` line per pose,
//! space-separated, `#` starts a comment.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::geom::Pose;
use crate::traj::Trajectory;

pub fn read_tum(path: impl AsRef<Path>) -> Result<Trajectory> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|_| Error::MissingInput(path.to_path_buf()))?;
    let mut poses = Vec::new();
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let vals: Vec<f64> = line
            .split_whitespace()
            .map(|tok| tok.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse {
                path: path.display().to_string(),
                msg: format!("line {}: {e}", lineno + 1),
            })?;
        if vals.len() != 8 {
            return Err(Error::Parse {
                path: path.display().to_string(),
                msg: format!("line {}: expected 8 values, got {}", lineno + 1, vals.len()),
            });
        }
        let (t, tx, ty, tz, qx, qy, qz, qw) = (
            vals[0], vals[1], vals[2], vals[3], vals[4], vals[5], vals[6], vals[7],
        );
        poses.push(Pose::from_wxyz(t, qw, qx, qy, qz, Vector3::new(tx, ty, tz)));
    }
    Trajectory::from_poses(poses)
}

pub fn write_tum(traj: &Trajectory, path: impl AsRef<Path>) -> Result<()> {
    let mut out = BufWriter::new(File::create(path.as_ref())?);
    writeln!(out, "# t tx ty tz qx qy qz qw")?;
    for pose in traj.poses() {
        let t = pose.translation;
        let q = pose.rotation.into_inner();
        writeln!(
            out,
            "{:.6} {:.9} {:.9} {:.9} {:.9} {:.9} {:.9} {:.9}",
            pose.stamp, t.x, t.y, t.z, q.i, q.j, q.k, q.w
        )?;
    }
    out.flush()?;
    Ok(())
}
