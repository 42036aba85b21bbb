//! Respond-map enhancement: peak-region extraction, principal-axis angle
//! estimation, and sliding-box tracing of marker centroid chains.
//!
//! The peak region seeds two things: the PCA angle that re-orients the
//! templates for the following frames, and the box trace that walks the
//! respond ridge in both directions collecting marker centroids.

use crate::error::{Error, Result};
use crate::imgcore::{Config, FloatMap};
use crate::matching::Side;

/// Connected set of respond pixels around the global peak.
#[derive(Debug, Clone)]
pub struct PeakRegion {
    /// Peak pixel (x, y) and its respond value.
    pub peak: (usize, usize, f64),
    /// 8-connected member pixels, every one at or above the threshold.
    pub points: Vec<(usize, usize)>,
    /// Value-weighted centroid (x, y).
    pub centroid: (f64, f64),
}

/// Ordered sliding-box centers along one marker, with the angle they were
/// traced at.
#[derive(Debug, Clone)]
pub struct MarkerChain {
    pub side: Side,
    pub centers: Vec<(f64, f64)>,
    pub theta: f64,
}

/// Find the global peak and flood-fill its 8-connected region of pixels
/// valued at or above `threshold`. Returns `None` when the peak itself
/// falls short. Argmax ties break toward the smallest row, then column.
pub fn select_peak_region(map: &FloatMap, threshold: f64) -> Option<PeakRegion> {
    let (px, py, pv) = map.argmax()?;
    if pv < threshold {
        return None;
    }
    let (w, h) = (map.width, map.height);
    let mut visited = vec![false; w * h];
    let mut stack = vec![(px, py)];
    visited[py * w + px] = true;
    let mut points = Vec::new();
    let (mut wx, mut wy, mut weight) = (0.0f64, 0.0f64, 0.0f64);
    while let Some((x, y)) = stack.pop() {
        points.push((x, y));
        let v = map.at(x, y);
        wx += v * x as f64;
        wy += v * y as f64;
        weight += v;
        let x0 = x.saturating_sub(1);
        let y0 = y.saturating_sub(1);
        for ny in y0..=(y + 1).min(h - 1) {
            for nx in x0..=(x + 1).min(w - 1) {
                let idx = ny * w + nx;
                if !visited[idx] && map.data[idx] >= threshold {
                    visited[idx] = true;
                    stack.push((nx, ny));
                }
            }
        }
    }
    let centroid = if weight > 0.0 {
        (wx / weight, wy / weight)
    } else {
        (px as f64, py as f64)
    };
    Some(PeakRegion {
        peak: (px, py, pv),
        points,
        centroid,
    })
}

/// Principal-axis orientation of a 2D point set, folded into [0, pi).
/// Near-isotropic sets (eigenvalue ratio below 1.05) keep `fallback`.
pub fn pca_angle_of_points(points: &[(f64, f64)], fallback: f64) -> Result<f64> {
    let n = points.len();
    if n < 2 {
        return Err(Error::DegenerateRegion(format!(
            "{n} point(s) cannot define an orientation"
        )));
    }
    let inv = 1.0 / n as f64;
    let (mut mx, mut my) = (0.0, 0.0);
    for &(x, y) in points {
        mx += x;
        my += y;
    }
    mx *= inv;
    my *= inv;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for &(x, y) in points {
        let (dx, dy) = (x - mx, y - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    sxx *= inv;
    sxy *= inv;
    syy *= inv;

    let trace_half = 0.5 * (sxx + syy);
    let det_part = (0.5 * (sxx - syy)).hypot(sxy);
    let lambda1 = trace_half + det_part;
    let lambda2 = (trace_half - det_part).max(0.0);
    if lambda2 > 0.0 && lambda1 < 1.05 * lambda2 {
        return Ok(fallback);
    }
    let mut theta = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    if theta < 0.0 {
        theta += std::f64::consts::PI;
    }
    Ok(theta % std::f64::consts::PI)
}

/// [`pca_angle_of_points`] over a peak region's (unweighted) pixel set.
pub fn pca_angle(region: &PeakRegion, fallback: f64) -> Result<f64> {
    let pts: Vec<(f64, f64)> = region
        .points
        .iter()
        .map(|&(x, y)| (x as f64, y as f64))
        .collect();
    pca_angle_of_points(&pts, fallback)
}

/// Trace a marker chain by sliding a template-sized box along `theta` from
/// the start region's centroid, in both directions.
///
/// Each step predicts the next origin one jump ahead, keeps it when the
/// measured in-box centroid agrees within the jump radius, and snaps to the
/// centroid otherwise. A direction stops when the predicted origin leaves
/// the image or its box holds no pixel at or above `p_pca`; a hard cap of
/// ceil(imageDiagonal / r) steps per direction guarantees termination.
pub fn trace_marker(
    map: &FloatMap,
    start: &PeakRegion,
    theta: f64,
    side: Side,
    cfg: &Config,
) -> MarkerChain {
    let (w, h) = (map.width as f64, map.height as f64);
    let r = f64::from(cfg.jump_step);
    let cap = (w.hypot(h) / r).ceil() as usize;
    let half = cfg.template_size as f64 / 2.0;
    let (sin, cos) = theta.sin_cos();

    let box_subset_centroid = |ox: f64, oy: f64| -> Option<(f64, f64)> {
        let x_lo = (ox - half).ceil().max(0.0) as usize;
        let x_hi = (ox + half).floor().min(w - 1.0) as usize;
        let y_lo = (oy - half).ceil().max(0.0) as usize;
        let y_hi = (oy + half).floor().min(h - 1.0) as usize;
        let (mut wx, mut wy, mut weight) = (0.0, 0.0, 0.0);
        for y in y_lo..=y_hi {
            for x in x_lo..=x_hi {
                let v = map.at(x, y);
                if v >= cfg.p_pca {
                    wx += v * x as f64;
                    wy += v * y as f64;
                    weight += v;
                }
            }
        }
        (weight > 0.0).then(|| (wx / weight, wy / weight))
    };

    let walk = |sign: f64| -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        let (mut cx, mut cy) = start.centroid;
        for _ in 0..cap {
            let px = cx + sign * r * cos;
            let py = cy + sign * r * sin;
            if px < 0.0 || px >= w || py < 0.0 || py >= h {
                break; // origin left the image
            }
            let Some((gx, gy)) = box_subset_centroid(px, py) else {
                break; // empty subset
            };
            let d2 = (px - gx) * (px - gx) + (py - gy) * (py - gy);
            let next = if d2 <= r * r { (px, py) } else { (gx, gy) };
            out.push(next);
            (cx, cy) = next;
        }
        out
    };

    let mut centers: Vec<(f64, f64)> = walk(-1.0);
    centers.reverse();
    centers.push(start.centroid);
    centers.extend(walk(1.0));
    MarkerChain {
        side,
        centers,
        theta,
    }
}
