//! 3D lane-plane fitting from three detected marker points.
//!
//! The lane plane is spanned by the two respond-map peaks and the furthest
//! traced centroid of the right marker: `n = (v_b - v_a1) x (v_a2 - v_a1)`.
//! No robust estimator is involved anywhere here; upstream fusion is
//! responsible for having removed the outliers.

use nalgebra::Vector3;

use crate::enhance::MarkerChain;
use crate::error::{Error, Result};
use crate::preprocess::PointGrid;

/// An infinite plane as unit normal + point, the serializable core shared
/// by detections and ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct Plane3 {
    pub normal: Vector3<f64>,
    pub point: Vector3<f64>,
}

impl Plane3 {
    /// Oriented angle between this plane's normal and another's, degrees.
    pub fn normal_angle_deg(&self, other: &Plane3) -> f64 {
        self.normal
            .dot(&other.normal)
            .clamp(-1.0, 1.0)
            .acos()
            .to_degrees()
    }

    /// One-line text form: `nx ny nz px py pz`.
    pub fn to_line(&self) -> String {
        format!(
            "{:?} {:?} {:?} {:?} {:?} {:?}",
            self.normal.x, self.normal.y, self.normal.z, self.point.x, self.point.y, self.point.z
        )
    }

    pub fn from_line(line: &str) -> Result<Plane3> {
        let vals: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Format(format!("bad plane line `{line}`")))?;
        if vals.len() != 6 {
            return Err(Error::Format(format!(
                "plane line needs 6 numbers, got {}",
                vals.len()
            )));
        }
        Ok(Plane3 {
            normal: Vector3::new(vals[0], vals[1], vals[2]),
            point: Vector3::new(vals[3], vals[4], vals[5]),
        })
    }

    pub fn save(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        std::fs::write(path, self.to_line() + "\n")?;
        Ok(())
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Plane3> {
        let text = std::fs::read_to_string(path)?;
        Self::from_line(text.trim())
    }
}

/// A fitted lane plane plus the three pixels that defined it
/// (v_a1 = left peak, v_b = right peak, v_a2 = furthest right centroid).
#[derive(Debug, Clone)]
pub struct LanePlane {
    pub plane: Plane3,
    pub source_pixels: [(f64, f64); 3],
}

const LOOKUP_RADIUS: i64 = 3; // 7x7 neighborhood

/// 3D point for a (subpixel) detection: the grid point of the nearest valid
/// pixel within a 7x7 neighborhood of the rounded coordinate. Ties break
/// toward the smaller row, then column.
pub fn lookup_3d(grid: &PointGrid, px: f64, py: f64) -> Result<Vector3<f64>> {
    let (w, h) = (grid.width as i64, grid.height as i64);
    let cx = px.round() as i64;
    let cy = py.round() as i64;
    if px < 0.0 || py < 0.0 || cx >= w || cy >= h {
        return Err(Error::Input(format!("pixel ({px}, {py}) outside image")));
    }
    let mut best: Option<(f64, Vector3<f64>)> = None;
    for y in (cy - LOOKUP_RADIUS).max(0)..=(cy + LOOKUP_RADIUS).min(h - 1) {
        for x in (cx - LOOKUP_RADIUS).max(0)..=(cx + LOOKUP_RADIUS).min(w - 1) {
            if !grid.is_valid(x as usize, y as usize) {
                continue;
            }
            let d = (x as f64 - px).hypot(y as f64 - py);
            if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
                best = Some((d, grid.at(x as usize, y as usize)));
            }
        }
    }
    best.map(|(_, p)| p).ok_or_else(|| {
        Error::DepthGap(format!(
            "no valid depth within 7x7 of ({px:.1}, {py:.1})"
        ))
    })
}

/// Plane through three 3D points with the lane orientation convention:
/// `n = normalize((v_b - v_a1) x (v_a2 - v_a1))`, flipped so n_y > 0
/// (camera-down positive), anchored at `v_a1`.
pub fn plane_from_points(
    v_a1: Vector3<f64>,
    v_b: Vector3<f64>,
    v_a2: Vector3<f64>,
) -> Result<Plane3> {
    let cross = (v_b - v_a1).cross(&(v_a2 - v_a1));
    let norm = cross.norm();
    if norm <= 1e-9 {
        return Err(Error::DegeneratePlane(format!(
            "points are collinear (|cross| = {norm:.3e})"
        )));
    }
    let mut normal = cross / norm;
    if normal.y < 0.0 {
        normal = -normal;
    }
    Ok(Plane3 {
        normal,
        point: v_a1,
    })
}

/// Fit the lane plane from the two peak pixels and the furthest right-chain
/// centroid pixel, lifting each through [`lookup_3d`].
pub fn fit_plane(
    grid: &PointGrid,
    left_peak: (f64, f64),
    right_peak: (f64, f64),
    right_far: (f64, f64),
) -> Result<LanePlane> {
    if left_peak == right_peak || left_peak == right_far || right_peak == right_far {
        return Err(Error::Parameter("plane pixels must be distinct".into()));
    }
    let v_a1 = lookup_3d(grid, left_peak.0, left_peak.1)?;
    let v_b = lookup_3d(grid, right_peak.0, right_peak.1)?;
    let v_a2 = lookup_3d(grid, right_far.0, right_far.1)?;
    let plane = plane_from_points(v_a1, v_b, v_a2)?;
    Ok(LanePlane {
        plane,
        source_pixels: [left_peak, right_peak, right_far],
    })
}

/// The chain center whose 3D point lies deepest along the optical axis.
/// Centers without valid depth nearby are skipped.
pub fn furthest_center(grid: &PointGrid, chain: &MarkerChain) -> Option<(f64, f64)> {
    let mut best: Option<(f64, (f64, f64))> = None;
    for &(x, y) in &chain.centers {
        if let Ok(p) = lookup_3d(grid, x, y) {
            if best.as_ref().is_none_or(|(bz, _)| p.z > *bz) {
                best = Some((p.z, (x, y)));
            }
        }
    }
    best.map(|(_, c)| c)
}
