//! Normal-distributions map representation: per-voxel Gaussians.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::PointCloud;
use crate::scalar::Real;

/// Smallest eigenvalue kept, as a fraction of the largest one.
const EIGEN_FLOOR_RATIO: f64 = 1e-3;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NdtParams {
    /// Voxel edge length, meters.
    pub cell_size: f64,
    /// Cells with fewer member points are discarded.
    pub min_points_per_cell: usize,
    /// Weight of the uniform outlier component in the mixture, `[0, 1)`.
    pub outlier_ratio: f64,
    pub max_iterations: usize,
    pub translation_eps: f64,
    pub rotation_eps: f64,
}

impl Default for NdtParams {
    fn default() -> Self {
        NdtParams {
            cell_size: 1.0,
            min_points_per_cell: 6,
            outlier_ratio: 0.55,
            max_iterations: 50,
            translation_eps: 1e-4,
            rotation_eps: 1e-4,
        }
    }
}

impl NdtParams {
    pub fn validate(&self) -> Result<()> {
        if self.cell_size > 0.0
            && self.min_points_per_cell >= 1
            && (0.0..1.0).contains(&self.outlier_ratio)
            && self.max_iterations >= 1
            && self.translation_eps > 0.0
            && self.rotation_eps > 0.0
        {
            Ok(())
        } else {
            Err(Error::InvalidArgument(
                "ndt parameters out of range (cell_size > 0, 0 <= outlier_ratio < 1, ...)".into(),
            ))
        }
    }
}

/// Gaussian statistics of one occupied voxel.
#[derive(Debug, Clone)]
pub struct NdtCell<T: Real> {
    pub mean: Vector3<T>,
    pub covariance: Matrix3<T>,
    pub inv_covariance: Matrix3<T>,
    pub count: usize,
}

/// Score-function constants derived from the outlier mixture, in the
/// positive form `score(e) = amplitude * exp(-shape/2 * e)` with `e` the
/// Mahalanobis-squared residual. `amplitude` is the per-point maximum.
#[derive(Debug, Clone, Copy)]
pub struct MixtureConstants<T> {
    pub amplitude: T,
    pub shape: T,
}

fn mixture_constants(outlier_ratio: f64, cell_size: f64) -> (f64, f64) {
    let c1 = 10.0 * (1.0 - outlier_ratio);
    let c2 = outlier_ratio / cell_size.powi(3);
    let d3 = -(c2.ln());
    let d1 = -((c1 + c2).ln()) - d3;
    let d2 = -2.0 * (((-((c1 * (-0.5f64).exp() + c2).ln()) - d3) / d1).ln());
    (-d1, d2)
}

/// Sparse grid of per-voxel Gaussians plus the mixture constants used to
/// score scans against it. Immutable after construction.
#[derive(Debug, Clone)]
pub struct NdtGrid<T: Real> {
    cell_size: T,
    origin: Vector3<T>,
    outlier_ratio: f64,
    constants: MixtureConstants<T>,
    cells: HashMap<(i32, i32, i32), NdtCell<T>>,
}

impl<T: Real> NdtGrid<T> {
    pub fn cell_size(&self) -> T {
        self.cell_size
    }

    pub fn origin(&self) -> Vector3<T> {
        self.origin
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn constants(&self) -> MixtureConstants<T> {
        self.constants
    }

    pub fn key_of(&self, p: &Vector3<T>) -> (i32, i32, i32) {
        let rel = (p - self.origin) / self.cell_size;
        (
            rel.x.floor().to_f64_c() as i32,
            rel.y.floor().to_f64_c() as i32,
            rel.z.floor().to_f64_c() as i32,
        )
    }

    pub fn cell(&self, key: (i32, i32, i32)) -> Option<&NdtCell<T>> {
        self.cells.get(&key)
    }

    /// Cell containing the point, if occupied.
    pub fn cell_at(&self, p: &Vector3<T>) -> Option<&NdtCell<T>> {
        self.cells.get(&self.key_of(p))
    }

    pub fn iter_cells(&self) -> impl Iterator<Item = (&(i32, i32, i32), &NdtCell<T>)> {
        self.cells.iter()
    }
}

/// Builds the grid: per-cell mean and population covariance (accumulated
/// in point index order), cells below `min_points_per_cell` dropped,
/// covariance eigenvalues floored at `1e-3` of the cell's largest.
/// All-coincident cells (zero largest eigenvalue) are dropped as well.
pub fn build_grid<T: Real>(map: &PointCloud<T>, params: &NdtParams) -> Result<NdtGrid<T>> {
    params.validate()?;
    if map.is_empty() {
        return Err(Error::EmptyInput("ndt grid needs a non-empty map".into()));
    }
    let cell_size = T::from_f64_c(params.cell_size);
    let origin = Vector3::zeros();

    let mut members: HashMap<(i32, i32, i32), Vec<usize>> = HashMap::new();
    for (i, p) in map.positions.iter().enumerate() {
        let rel = (p - origin) / cell_size;
        let key = (
            rel.x.floor().to_f64_c() as i32,
            rel.y.floor().to_f64_c() as i32,
            rel.z.floor().to_f64_c() as i32,
        );
        members.entry(key).or_default().push(i);
    }

    let mut cells = HashMap::with_capacity(members.len());
    for (key, idxs) in members {
        if idxs.len() < params.min_points_per_cell {
            continue;
        }
        let n = T::from_f64_c(idxs.len() as f64);
        let mut mean = Vector3::zeros();
        for &i in &idxs {
            mean += map.positions[i];
        }
        mean /= n;
        let mut cov = Matrix3::zeros();
        for &i in &idxs {
            let d = map.positions[i] - mean;
            cov += d * d.transpose();
        }
        cov /= n;

        let Some((covariance, inv_covariance)) = floor_and_invert(&cov) else {
            continue;
        };
        cells.insert(
            key,
            NdtCell {
                mean,
                covariance,
                inv_covariance,
                count: idxs.len(),
            },
        );
    }

    let (amplitude, shape) = mixture_constants(params.outlier_ratio, params.cell_size);
    Ok(NdtGrid {
        cell_size,
        origin,
        outlier_ratio: params.outlier_ratio,
        constants: MixtureConstants {
            amplitude: T::from_f64_c(amplitude),
            shape: T::from_f64_c(shape),
        },
        cells,
    })
}

/// Floors eigenvalues and returns `(covariance, inverse)`; `None` when the
/// cell is fully degenerate.
fn floor_and_invert<T: Real>(cov: &Matrix3<T>) -> Option<(Matrix3<T>, Matrix3<T>)> {
    let eig = cov.symmetric_eigen();
    let max = eig.eigenvalues.max();
    if max <= T::from_f64_c(1e-12) {
        return None;
    }
    let floor = max * T::from_f64_c(EIGEN_FLOOR_RATIO);
    let mut fixed = Matrix3::zeros();
    let mut inverse = Matrix3::zeros();
    for i in 0..3 {
        let v = eig.eigenvectors.column(i);
        let lambda = if eig.eigenvalues[i] < floor {
            floor
        } else {
            eig.eigenvalues[i]
        };
        fixed += v * v.transpose() * lambda;
        inverse += v * v.transpose() / lambda;
    }
    Some((fixed, inverse))
}

// --- binary cache -----------------------------------------------------

const CACHE_MAGIC: &[u8; 4] = b"NDTG";
const CACHE_VERSION: u32 = 1;

impl NdtGrid<f64> {
    /// Writes the grid to a little-endian binary cache. Cells are sorted
    /// by key, so the bytes are a pure function of the grid contents.
    pub fn save_cache(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut out = BufWriter::new(File::create(path.as_ref())?);
        out.write_all(CACHE_MAGIC)?;
        out.write_all(&CACHE_VERSION.to_le_bytes())?;
        out.write_all(&self.cell_size.to_le_bytes())?;
        for v in self.origin.iter() {
            out.write_all(&v.to_le_bytes())?;
        }
        out.write_all(&self.outlier_ratio.to_le_bytes())?;
        out.write_all(&(self.cells.len() as u64).to_le_bytes())?;

        let mut keys: Vec<_> = self.cells.keys().cloned().collect();
        keys.sort_unstable();
        for key in keys {
            let cell = &self.cells[&key];
            out.write_all(&key.0.to_le_bytes())?;
            out.write_all(&key.1.to_le_bytes())?;
            out.write_all(&key.2.to_le_bytes())?;
            out.write_all(&(cell.count as u64).to_le_bytes())?;
            for v in cell.mean.iter() {
                out.write_all(&v.to_le_bytes())?;
            }
            for v in cell.covariance.iter() {
                out.write_all(&v.to_le_bytes())?;
            }
            for v in cell.inv_covariance.iter() {
                out.write_all(&v.to_le_bytes())?;
            }
        }
        out.flush()?;
        Ok(())
    }

    pub fn load_cache(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut raw = Vec::new();
        File::open(path)
            .map_err(|_| Error::MissingInput(path.to_path_buf()))?
            .read_to_end(&mut raw)?;
        let mut at = 0usize;
        let take = |at: &mut usize, n: usize| -> Result<&[u8]> {
            if *at + n > raw.len() {
                return Err(Error::Parse {
                    path: path.display().to_string(),
                    msg: "truncated grid cache".into(),
                });
            }
            let s = &raw[*at..*at + n];
            *at += n;
            Ok(s)
        };
        let f64_at = |at: &mut usize| -> Result<f64> {
            Ok(f64::from_le_bytes(take(at, 8)?.try_into().unwrap()))
        };
        let i32_at =
            |at: &mut usize| -> Result<i32> { Ok(i32::from_le_bytes(take(at, 4)?.try_into().unwrap())) };
        let u64_at =
            |at: &mut usize| -> Result<u64> { Ok(u64::from_le_bytes(take(at, 8)?.try_into().unwrap())) };

        if take(&mut at, 4)? != CACHE_MAGIC {
            return Err(Error::Parse {
                path: path.display().to_string(),
                msg: "not an NDT grid cache (bad magic)".into(),
            });
        }
        let version = u32::from_le_bytes(take(&mut at, 4)?.try_into().unwrap());
        if version != CACHE_VERSION {
            return Err(Error::Parse {
                path: path.display().to_string(),
                msg: format!("unsupported grid cache version {version}"),
            });
        }
        let cell_size = f64_at(&mut at)?;
        let origin = Vector3::new(f64_at(&mut at)?, f64_at(&mut at)?, f64_at(&mut at)?);
        let outlier_ratio = f64_at(&mut at)?;
        let count = u64_at(&mut at)? as usize;

        let mut cells = HashMap::with_capacity(count);
        for _ in 0..count {
            let key = (i32_at(&mut at)?, i32_at(&mut at)?, i32_at(&mut at)?);
            let n = u64_at(&mut at)? as usize;
            let mean = Vector3::new(f64_at(&mut at)?, f64_at(&mut at)?, f64_at(&mut at)?);
            let mut covariance = Matrix3::zeros();
            for i in 0..9 {
                covariance[i] = f64_at(&mut at)?;
            }
            let mut inv_covariance = Matrix3::zeros();
            for i in 0..9 {
                inv_covariance[i] = f64_at(&mut at)?;
            }
            cells.insert(
                key,
                NdtCell {
                    mean,
                    covariance,
                    inv_covariance,
                    count: n,
                },
            );
        }

        let (amplitude, shape) = mixture_constants(outlier_ratio, cell_size);
        Ok(NdtGrid {
            cell_size,
            origin,
            outlier_ratio,
            constants: MixtureConstants { amplitude, shape },
            cells,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn random_cloud(n: usize, seed: u64) -> PointCloud<f64> {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        PointCloud::from_positions(
            (0..n)
                .map(|_| {
                    Vector3::new(
                        rng.random_range(-4.0..4.0),
                        rng.random_range(-4.0..4.0),
                        rng.random_range(-4.0..4.0),
                    )
                })
                .collect(),
        )
    }

    #[test]
    fn cell_statistics_match_brute_force_voxel_statistics() {
        let cloud = random_cloud(5000, 11);
        let params = NdtParams::default();
        let grid = build_grid(&cloud, &params).unwrap();

        // Independent two-pass statistics per voxel, index order.
        let mut buckets: HashMap<(i32, i32, i32), Vec<Vector3<f64>>> = HashMap::new();
        for p in &cloud.positions {
            let key = (
                (p.x / params.cell_size).floor() as i32,
                (p.y / params.cell_size).floor() as i32,
                (p.z / params.cell_size).floor() as i32,
            );
            buckets.entry(key).or_default().push(*p);
        }
        let mut checked = 0;
        for (key, pts) in buckets {
            if pts.len() < params.min_points_per_cell {
                assert!(grid.cell(key).is_none());
                continue;
            }
            let cell = grid.cell(key).expect("cell must exist");
            assert_eq!(cell.count, pts.len());
            let mean: Vector3<f64> = pts.iter().sum::<Vector3<f64>>() / pts.len() as f64;
            assert!((cell.mean - mean).norm() < 1e-12);
            let mut cov = Matrix3::zeros();
            for p in &pts {
                let d = p - mean;
                cov += d * d.transpose();
            }
            cov /= pts.len() as f64;
            // Covariance may be floored; verify it only differs in
            // eigenvalues below the floor.
            let eig = cov.symmetric_eigen();
            let floor = eig.eigenvalues.max() * 1e-3;
            if eig.eigenvalues.min() >= floor {
                assert!((cell.covariance - cov).norm() < 1e-12);
            }
            let id = cell.inv_covariance * cell.covariance;
            assert!((id - Matrix3::identity()).norm() < 1e-6);
            checked += 1;
        }
        assert!(checked > 20);
    }

    #[test]
    fn coincident_points_drop_the_cell() {
        let cloud = PointCloud::from_positions(vec![Vector3::new(0.4, 0.4, 0.4); 10]);
        let grid = build_grid(&cloud, &NdtParams::default()).unwrap();
        assert!(grid.is_empty());
    }

    #[test]
    fn planar_cell_normal_is_smallest_eigenvector() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
        // A patch of z = 0.2 inside the cell at the origin.
        let cloud = PointCloud::from_positions(
            (0..200)
                .map(|_| {
                    Vector3::new(
                        rng.random_range(0.05..0.95),
                        rng.random_range(0.05..0.95),
                        0.2,
                    )
                })
                .collect(),
        );
        let grid = build_grid(&cloud, &NdtParams::default()).unwrap();
        let cell = grid.cell((0, 0, 0)).unwrap();
        let eig = cell.covariance.symmetric_eigen();
        let mut idx = 0;
        for i in 1..3 {
            if eig.eigenvalues[i] < eig.eigenvalues[idx] {
                idx = i;
            }
        }
        let normal = eig.eigenvectors.column(idx);
        assert!(f64::abs(normal.dot(&Vector3::z())) > 0.999);
    }

    #[test]
    fn empty_map_is_rejected() {
        assert!(matches!(
            build_grid(&PointCloud::<f64>::new(), &NdtParams::default()),
            Err(Error::EmptyInput(_))
        ));
    }

    #[test]
    fn cache_round_trip_is_bit_exact() {
        let cloud = random_cloud(3000, 13);
        let grid = build_grid(&cloud, &NdtParams::default()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p1 = dir.path().join("grid.ndt");
        let p2 = dir.path().join("grid2.ndt");
        grid.save_cache(&p1).unwrap();
        let loaded = NdtGrid::<f64>::load_cache(&p1).unwrap();
        loaded.save_cache(&p2).unwrap();
        assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
        assert_eq!(grid.len(), loaded.len());
        for (key, cell) in grid.iter_cells() {
            let other = loaded.cell(*key).unwrap();
            assert_eq!(cell.mean, other.mean);
            assert_eq!(cell.covariance, other.covariance);
            assert_eq!(cell.inv_covariance, other.inv_covariance);
            assert_eq!(cell.count, other.count);
        }
    }

    #[test]
    fn bad_magic_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("junk.ndt");
        std::fs::write(&path, b"JUNKJUNKJUNK").unwrap();
        assert!(NdtGrid::<f64>::load_cache(&path).is_err());
    }
}
