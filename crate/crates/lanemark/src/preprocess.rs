//! Frame pre-processing: half-binary thresholding, backprojection of the
//! depth raster into an organized 3D point grid, and fast least-squares
//! surface-normal estimation.
//!
//! The normal estimator fits, per pixel, the plane that minimizes
//! `sum_i (v_i . n - 1/r_i)^2` over a small window, where `v_i` is the unit
//! view ray of window pixel `i` and `r_i` its range. The normal solves
//! `M n = b` with `M = sum v_i v_i^T` and `b = sum v_i / r_i`; `M` depends
//! only on the camera, so its inverse is precomputed once per intrinsics
//! and reused across frames.

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::imgcore::{CameraIntrinsics, DepthImage, GrayImage};

/// Organized grid of 3D points in camera coordinates (x right, y down,
/// z forward). For every valid pixel, `z` equals the source depth exactly.
#[derive(Debug, Clone)]
pub struct PointGrid {
    pub width: usize,
    pub height: usize,
    pub points: Vec<Vector3<f64>>,
    pub valid: Vec<bool>,
}

impl PointGrid {
    #[inline]
    pub fn at(&self, x: usize, y: usize) -> Vector3<f64> {
        self.points[y * self.width + x]
    }

    #[inline]
    pub fn is_valid(&self, x: usize, y: usize) -> bool {
        self.valid[y * self.width + x]
    }
}

/// Per-pixel unit surface normals, oriented toward the camera
/// (`normal . ray <= 0` for every valid pixel).
#[derive(Debug, Clone)]
pub struct NormalMap {
    pub width: usize,
    pub height: usize,
    pub normals: Vec<Vector3<f64>>,
    pub valid: Vec<bool>,
}

impl NormalMap {
    #[inline]
    pub fn at(&self, x: usize, y: usize) -> Vector3<f64> {
        self.normals[y * self.width + x]
    }

    #[inline]
    pub fn is_valid(&self, x: usize, y: usize) -> bool {
        self.valid[y * self.width + x]
    }
}

/// Camera-only precomputation for the normal estimator: per-pixel unit
/// rays and the inverted window scatter matrices.
#[derive(Debug, Clone)]
pub struct FalsPrecomp {
    pub width: usize,
    pub height: usize,
    pub window: usize,
    rays: Vec<Vector3<f64>>,
    inv: Vec<Matrix3<f64>>,
    usable: Vec<bool>,
}

impl FalsPrecomp {
    #[inline]
    pub fn ray(&self, x: usize, y: usize) -> Vector3<f64> {
        self.rays[y * self.width + x]
    }

    #[inline]
    pub fn inverse(&self, x: usize, y: usize) -> &Matrix3<f64> {
        &self.inv[y * self.width + x]
    }

    #[inline]
    pub fn is_usable(&self, x: usize, y: usize) -> bool {
        self.usable[y * self.width + x]
    }

    /// Window scatter matrix `M = sum v_i v_i^T` over the clipped window
    /// centered at `(x, y)`, accumulated in row-major window order.
    pub fn scatter(&self, x: usize, y: usize) -> Matrix3<f64> {
        let half = self.window / 2;
        let x0 = x.saturating_sub(half);
        let x1 = (x + half).min(self.width - 1);
        let y0 = y.saturating_sub(half);
        let y1 = (y + half).min(self.height - 1);
        let mut m = Matrix3::zeros();
        for wy in y0..=y1 {
            for wx in x0..=x1 {
                let v = self.rays[wy * self.width + wx];
                m += v * v.transpose();
            }
        }
        m
    }
}

/// Zero every pixel below `tau_c`, keep the rest unchanged.
pub fn to_half_binary(gray: &GrayImage, tau_c: u16) -> GrayImage {
    let data = gray
        .data
        .iter()
        .map(|&p| if u16::from(p) < tau_c { 0 } else { p })
        .collect();
    GrayImage {
        width: gray.width,
        height: gray.height,
        data,
    }
}

/// Backproject a depth raster through the pinhole model:
/// `x = (i-cx)/fx * D`, `y = (j-cy)/fy * D`, `z = D`.
pub fn backproject(depth: &DepthImage, cam: &CameraIntrinsics) -> Result<PointGrid> {
    if depth.width != cam.width || depth.height != cam.height {
        return Err(Error::Input(format!(
            "depth {}x{} does not match intrinsics {}x{}",
            depth.width, depth.height, cam.width, cam.height
        )));
    }
    let mut points = vec![Vector3::zeros(); depth.data.len()];
    let mut valid = vec![false; depth.data.len()];
    for j in 0..depth.height {
        for i in 0..depth.width {
            let idx = j * depth.width + i;
            if !depth.valid[idx] {
                continue;
            }
            let d = depth.data[idx];
            points[idx] = Vector3::new(
                (i as f64 - cam.cx) / cam.fx * d,
                (j as f64 - cam.cy) / cam.fy * d,
                d,
            );
            valid[idx] = true;
        }
    }
    Ok(PointGrid {
        width: depth.width,
        height: depth.height,
        points,
        valid,
    })
}

const COND_LIMIT: f64 = 1e12;

/// Precompute per-pixel rays and inverted scatter matrices for `cam`.
/// Windows are clipped at the image border; pixels whose clipped scatter
/// matrix is near-singular are flagged unusable instead of failing.
pub fn fals_precompute(cam: &CameraIntrinsics, window: usize) -> Result<FalsPrecomp> {
    if window < 3 || window.is_multiple_of(2) {
        return Err(Error::Parameter(format!(
            "normal-estimation window must be odd and >= 3, got {window}"
        )));
    }
    let (w, h) = (cam.width, cam.height);
    let mut rays = Vec::with_capacity(w * h);
    for j in 0..h {
        for i in 0..w {
            rays.push(cam.ray(i as f64, j as f64));
        }
    }

    let half = window / 2;
    let mut inv = vec![Matrix3::zeros(); w * h];
    let mut usable = vec![false; w * h];
    for y in 0..h {
        let y0 = y.saturating_sub(half);
        let y1 = (y + half).min(h - 1);
        for x in 0..w {
            let x0 = x.saturating_sub(half);
            let x1 = (x + half).min(w - 1);
            let mut m = Matrix3::zeros();
            for wy in y0..=y1 {
                for wx in x0..=x1 {
                    let v = rays[wy * w + wx];
                    m += v * v.transpose();
                }
            }
            let idx = y * w + x;
            if let Some(mi) = m.try_inverse() {
                let cond_estimate = m.norm() * mi.norm();
                if cond_estimate.is_finite() && cond_estimate < COND_LIMIT {
                    inv[idx] = mi;
                    usable[idx] = true;
                }
            }
        }
    }
    Ok(FalsPrecomp {
        width: w,
        height: h,
        window,
        rays,
        inv,
        usable,
    })
}

/// Estimate per-pixel surface normals from an organized point grid.
///
/// A pixel gets a normal when its window holds at least 3 valid samples and
/// its precomputed matrix is usable; the raw solution `M^-1 b` is normalized
/// and flipped so it faces the camera. `use_z_depth` switches the loss
/// residual from Euclidean range to plain z-depth.
pub fn fals_normals(grid: &PointGrid, pre: &FalsPrecomp, use_z_depth: bool) -> Result<NormalMap> {
    if grid.width != pre.width || grid.height != pre.height {
        return Err(Error::Input(format!(
            "grid {}x{} does not match precomputation {}x{}",
            grid.width, grid.height, pre.width, pre.height
        )));
    }
    let (w, h) = (grid.width, grid.height);
    // Reciprocal range per pixel; zero stands for "invalid, contributes nothing".
    let mut inv_range = vec![0.0f64; w * h];
    for ((ir, point), &ok) in inv_range.iter_mut().zip(&grid.points).zip(&grid.valid) {
        if ok {
            let r = if use_z_depth { point.z } else { point.norm() };
            if r > 0.0 {
                *ir = 1.0 / r;
            }
        }
    }

    let half = pre.window / 2;
    let mut normals = vec![Vector3::zeros(); w * h];
    let mut valid = vec![false; w * h];
    for y in 0..h {
        let y0 = y.saturating_sub(half);
        let y1 = (y + half).min(h - 1);
        for x in 0..w {
            let idx = y * w + x;
            if !pre.usable[idx] {
                continue;
            }
            let x0 = x.saturating_sub(half);
            let x1 = (x + half).min(w - 1);
            let mut b = Vector3::zeros();
            let mut samples = 0usize;
            for wy in y0..=y1 {
                let row = wy * w;
                for wx in x0..=x1 {
                    let ir = inv_range[row + wx];
                    if ir != 0.0 {
                        b += pre.rays[row + wx] * ir;
                        samples += 1;
                    }
                }
            }
            if samples < 3 {
                continue;
            }
            let raw = pre.inv[idx] * b;
            let norm = raw.norm();
            if !norm.is_finite() || norm <= 0.0 {
                continue;
            }
            let mut n = raw / norm;
            if n.dot(&pre.rays[idx]) > 0.0 {
                n = -n;
            }
            normals[idx] = n;
            valid[idx] = true;
        }
    }
    Ok(NormalMap {
        width: w,
        height: h,
        normals,
        valid,
    })
}
