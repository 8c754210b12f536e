//! Scene geometry for the synthetic lidar: finite planar rectangles.

use nalgebra::Vector3;

use crate::error::{Error, Result};

/// A finite planar rectangle: `corner + a*edge_u + b*edge_v`, `a,b ∈ [0,1]`.
#[derive(Debug, Clone, Copy)]
pub struct Rect {
    pub corner: Vector3<f64>,
    pub edge_u: Vector3<f64>,
    pub edge_v: Vector3<f64>,
}

impl Rect {
    pub fn new(corner: Vector3<f64>, edge_u: Vector3<f64>, edge_v: Vector3<f64>) -> Result<Self> {
        let ok = corner.iter().chain(edge_u.iter()).chain(edge_v.iter()).all(|v| v.is_finite());
        if !ok {
            return Err(Error::InvalidArgument("rectangle has non-finite data".into()));
        }
        if edge_u.cross(&edge_v).norm() < 1e-9 {
            return Err(Error::InvalidArgument(
                "rectangle edges are parallel or zero".into(),
            ));
        }
        Ok(Rect {
            corner,
            edge_u,
            edge_v,
        })
    }

    /// Axis-aligned helper: rectangle spanning `u` and `v` from `corner`.
    fn aa(corner: (f64, f64, f64), edge_u: (f64, f64, f64), edge_v: (f64, f64, f64)) -> Rect {
        Rect::new(
            Vector3::new(corner.0, corner.1, corner.2),
            Vector3::new(edge_u.0, edge_u.1, edge_u.2),
            Vector3::new(edge_v.0, edge_v.1, edge_v.2),
        )
        .expect("preset rectangles are valid")
    }

    /// Ray parameter of the intersection with this rectangle, if any.
    /// Both faces intersect; grazing rays (parallel to the plane) miss.
    pub fn ray_intersect(&self, origin: &Vector3<f64>, dir: &Vector3<f64>) -> Option<f64> {
        let normal = self.edge_u.cross(&self.edge_v);
        let denom = normal.dot(dir);
        if denom.abs() < 1e-12 {
            return None;
        }
        let t = normal.dot(&(self.corner - origin)) / denom;
        if t <= 1e-9 {
            return None;
        }
        let local = origin + dir * t - self.corner;
        let (a, b) = self.plane_coordinates(&local)?;
        if (0.0..=1.0).contains(&a) && (0.0..=1.0).contains(&b) {
            Some(t)
        } else {
            None
        }
    }

    /// Euclidean distance from a point to the rectangle.
    pub fn distance_to(&self, p: &Vector3<f64>) -> f64 {
        let local = p - self.corner;
        let Some((a, b)) = self.plane_coordinates(&local) else {
            return f64::INFINITY;
        };
        let a = a.clamp(0.0, 1.0);
        let b = b.clamp(0.0, 1.0);
        (local - self.edge_u * a - self.edge_v * b).norm()
    }

    /// Coefficients of the in-plane projection of `local` on the edges.
    fn plane_coordinates(&self, local: &Vector3<f64>) -> Option<(f64, f64)> {
        let uu = self.edge_u.norm_squared();
        let vv = self.edge_v.norm_squared();
        let uv = self.edge_u.dot(&self.edge_v);
        let det = uu * vv - uv * uv;
        if det.abs() < 1e-18 {
            return None;
        }
        let pu = local.dot(&self.edge_u);
        let pv = local.dot(&self.edge_v);
        Some(((pu * vv - pv * uv) / det, (pv * uu - pu * uv) / det))
    }
}

/// A set of rectangles with a preset name for bookkeeping.
#[derive(Debug, Clone)]
pub struct Scene {
    name: String,
    rects: Vec<Rect>,
}

impl Scene {
    pub fn from_rects(name: impl Into<String>, rects: Vec<Rect>) -> Result<Self> {
        if rects.is_empty() {
            return Err(Error::EmptyInput("scene needs at least one rectangle".into()));
        }
        Ok(Scene {
            name: name.into(),
            rects,
        })
    }

    /// Builds one of the named presets; see [`Scene::preset_names`].
    pub fn preset(name: &str) -> Result<Self> {
        let rects = match name {
            "room_10x8x3" => room(10.0, 8.0, 3.0),
            "corridor_40m" => corridor_40m(),
            "open_road" => open_road(),
            "forest" => forest(),
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown scene preset {other:?}; available: {}",
                    Self::preset_names().join(", ")
                )))
            }
        };
        Scene::from_rects(name, rects)
    }

    pub fn preset_names() -> &'static [&'static str] {
        &["room_10x8x3", "corridor_40m", "open_road", "forest"]
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rects(&self) -> &[Rect] {
        &self.rects
    }

    /// Closest hit along a ray within `max_range`.
    pub fn raycast(&self, origin: &Vector3<f64>, dir: &Vector3<f64>, max_range: f64) -> Option<f64> {
        let mut best: Option<f64> = None;
        for rect in &self.rects {
            if let Some(t) = rect.ray_intersect(origin, dir) {
                if t <= max_range && best.map_or(true, |b| t < b) {
                    best = Some(t);
                }
            }
        }
        best
    }

    /// Distance from a point to the nearest surface.
    pub fn distance_to(&self, p: &Vector3<f64>) -> f64 {
        self.rects
            .iter()
            .map(|r| r.distance_to(p))
            .fold(f64::INFINITY, f64::min)
    }

    /// Axis-aligned bounding box over all rectangle corners.
    pub fn bounding_box(&self) -> (Vector3<f64>, Vector3<f64>) {
        let mut lo = Vector3::repeat(f64::INFINITY);
        let mut hi = Vector3::repeat(f64::NEG_INFINITY);
        for rect in &self.rects {
            for corner in [
                rect.corner,
                rect.corner + rect.edge_u,
                rect.corner + rect.edge_v,
                rect.corner + rect.edge_u + rect.edge_v,
            ] {
                for i in 0..3 {
                    lo[i] = lo[i].min(corner[i]);
                    hi[i] = hi[i].max(corner[i]);
                }
            }
        }
        (lo, hi)
    }
}

/// Closed box interior: four walls, floor, ceiling.
fn room(lx: f64, ly: f64, lz: f64) -> Vec<Rect> {
    vec![
        Rect::aa((0.0, 0.0, 0.0), (lx, 0.0, 0.0), (0.0, ly, 0.0)), // floor
        Rect::aa((0.0, 0.0, lz), (lx, 0.0, 0.0), (0.0, ly, 0.0)),  // ceiling
        Rect::aa((0.0, 0.0, 0.0), (0.0, ly, 0.0), (0.0, 0.0, lz)), // x = 0
        Rect::aa((lx, 0.0, 0.0), (0.0, ly, 0.0), (0.0, 0.0, lz)),  // x = lx
        Rect::aa((0.0, 0.0, 0.0), (lx, 0.0, 0.0), (0.0, 0.0, lz)), // y = 0
        Rect::aa((0.0, ly, 0.0), (lx, 0.0, 0.0), (0.0, 0.0, lz)),  // y = ly
    ]
}

/// A 40 m x 3 m x 2.5 m corridor with doorway frames every 5 m: jambs on
/// both walls plus a lintel under the ceiling. The frame faces look along
/// the corridor axis, which keeps that direction observable for scan
/// matching the way real door openings do.
fn corridor_40m() -> Vec<Rect> {
    let (lx, ly, lz) = (40.0, 3.0, 2.5);
    let mut rects = room(lx, ly, lz);
    let jamb_width = 0.45;
    let lintel_drop = 0.5;
    let mut x = 2.5;
    while x < lx {
        rects.push(Rect::aa((x, 0.0, 0.0), (0.0, jamb_width, 0.0), (0.0, 0.0, lz)));
        rects.push(Rect::aa(
            (x, ly - jamb_width, 0.0),
            (0.0, jamb_width, 0.0),
            (0.0, 0.0, lz),
        ));
        rects.push(Rect::aa(
            (x, 0.0, lz - lintel_drop),
            (0.0, ly, 0.0),
            (0.0, 0.0, lintel_drop),
        ));
        x += 5.0;
    }
    rects
}

/// Flat ground with staggered building facades along both sides and a
/// few thin poles.
fn open_road() -> Vec<Rect> {
    let mut rects = vec![Rect::aa((-10.0, -10.0, 0.0), (80.0, 0.0, 0.0), (0.0, 20.0, 0.0))];
    let mut x = -5.0;
    let mut side = 0;
    while x < 65.0 {
        let y = if side % 2 == 0 { 8.0 } else { -8.0 };
        rects.push(Rect::aa((x, y, 0.0), (6.0, 0.0, 0.0), (0.0, 0.0, 4.0)));
        // Short return wall so facades have depth cues.
        rects.push(Rect::aa(
            (x, y, 0.0),
            (0.0, if side % 2 == 0 { 1.5 } else { -1.5 }, 0.0),
            (0.0, 0.0, 4.0),
        ));
        x += 10.0;
        side += 1;
    }
    // Poles (lamp posts) as crossed thin panels.
    let mut x = 0.0;
    while x < 60.0 {
        for rect in trunk(x, 5.0, 0.12, 5.0) {
            rects.push(rect);
        }
        x += 15.0;
    }
    rects
}

/// Ground plane plus scattered trunks on a jittered grid.
fn forest() -> Vec<Rect> {
    let mut rects = vec![Rect::aa((-10.0, -10.0, 0.0), (20.0, 0.0, 0.0), (0.0, 20.0, 0.0))];
    let mut i = 0u64;
    for gx in -3i32..=3 {
        for gy in -3i32..=3 {
            if gx.abs() <= 1 && gy.abs() <= 1 {
                continue; // keep a clearing around the start pose
            }
            let jx = (hash_unit(i) - 0.5) * 1.6;
            let jy = (hash_unit(i.wrapping_add(77)) - 0.5) * 1.6;
            i += 1;
            for rect in trunk(gx as f64 * 2.8 + jx, gy as f64 * 2.8 + jy, 0.3, 3.0) {
                rects.push(rect);
            }
        }
    }
    rects
}

/// Two crossed vertical panels standing in for a cylindrical trunk.
fn trunk(x: f64, y: f64, width: f64, height: f64) -> [Rect; 2] {
    let half = width / 2.0;
    [
        Rect::aa((x - half, y, 0.0), (width, 0.0, 0.0), (0.0, 0.0, height)),
        Rect::aa((x, y - half, 0.0), (0.0, width, 0.0), (0.0, 0.0, height)),
    ]
}

/// Deterministic unit-interval hash (splitmix64 finalizer).
fn hash_unit(mut v: u64) -> f64 {
    v = v.wrapping_add(0x9E3779B97F4A7C15);
    v = (v ^ (v >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    v = (v ^ (v >> 27)).wrapping_mul(0x94D049BB133111EB);
    v ^= v >> 31;
    (v >> 11) as f64 / (1u64 << 53) as f64
}
