//! IMU stream CSV: header line, then `t,ax,ay,az,gx,gy,gz` rows.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pipeline::ImuSample;

#[derive(Debug, Serialize, Deserialize)]
struct ImuRow {
    t: f64,
    ax: f64,
    ay: f64,
    az: f64,
    gx: f64,
    gy: f64,
    gz: f64,
}

pub fn read_imu_csv(path: impl AsRef<Path>) -> Result<Vec<ImuSample>> {
    let path = path.as_ref();
    let mut reader = csv::Reader::from_path(path).map_err(|e| match e.kind() {
        csv::ErrorKind::Io(_) => Error::MissingInput(path.to_path_buf()),
        _ => Error::Parse {
            path: path.display().to_string(),
            msg: e.to_string(),
        },
    })?;
    let mut samples = Vec::new();
    for row in reader.deserialize::<ImuRow>() {
        let row = row.map_err(|e| Error::Parse {
            path: path.display().to_string(),
            msg: e.to_string(),
        })?;
        samples.push(ImuSample {
            stamp: row.t,
            accel: nalgebra::Vector3::new(row.ax, row.ay, row.az),
            gyro: nalgebra::Vector3::new(row.gx, row.gy, row.gz),
        });
    }
    ImuSample::validate_stream(&samples)?;
    Ok(samples)
}

pub fn write_imu_csv(samples: &[ImuSample], path: impl AsRef<Path>) -> Result<()> {
    let mut writer = csv::Writer::from_path(path.as_ref()).map_err(|e| Error::Parse {
        path: path.as_ref().display().to_string(),
        msg: e.to_string(),
    })?;
    for s in samples {
        writer
            .serialize(ImuRow {
                t: s.stamp,
                ax: s.accel.x,
                ay: s.accel.y,
                az: s.accel.z,
                gx: s.gyro.x,
                gy: s.gyro.y,
                gz: s.gyro.z,
            })
            .map_err(|e| Error::Parse {
                path: path.as_ref().display().to_string(),
                msg: e.to_string(),
            })?;
    }
    writer.flush()?;
    Ok(())
}
