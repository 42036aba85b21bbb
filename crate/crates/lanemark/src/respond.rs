//! Geometric feature map and respond-map fusion.
//!
//! The geometric map G scores each pixel from depth alone: alignment of its
//! surface normal with the camera's down axis, plus a bounded depth (or,
//! past the depth threshold, image-row) term. Fusion adds G only where the
//! matching score already clears `tau_g`, so geometry supports reliable
//! color evidence instead of inventing its own.

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::imgcore::{Config, DepthImage, FloatMap};
use crate::preprocess::NormalMap;

/// The per-frame respond maps: fused left/right maps plus the shared
/// geometric map they were built from.
#[derive(Debug, Clone)]
pub struct RespondMaps {
    pub left: FloatMap,
    pub right: FloatMap,
    pub g: FloatMap,
}

/// Build the geometric feature map.
///
/// For a valid depth within `t_d`: `G = alpha * |n . O_y| + beta * D / t_d`.
/// Otherwise (deep or invalid): `G = alpha * |n . O_y| + beta * j / height`.
/// An invalid normal contributes 0 to the first term.
pub fn geom_map(normals: &NormalMap, depth: &DepthImage, cfg: &Config) -> Result<FloatMap> {
    if normals.width != depth.width || normals.height != depth.height {
        return Err(Error::Input(format!(
            "normal map {}x{} does not match depth {}x{}",
            normals.width, normals.height, depth.width, depth.height
        )));
    }
    let down = Vector3::new(0.0, 1.0, 0.0);
    let (w, h) = (depth.width, depth.height);
    let mut g = FloatMap::zeros(w, h);
    for j in 0..h {
        let row_term = cfg.beta * j as f64 / h as f64;
        for i in 0..w {
            let idx = j * w + i;
            let align = if normals.valid[idx] {
                normals.normals[idx].dot(&down).abs()
            } else {
                0.0
            };
            let d = depth.data[idx];
            let v = if depth.valid[idx] && d <= cfg.t_d {
                cfg.alpha * align + cfg.beta * d / cfg.t_d
            } else {
                cfg.alpha * align + row_term
            };
            g.data[idx] = v;
        }
    }
    Ok(g)
}

/// Fuse a matching map with the geometric map: `R = M` where `M < tau_g`,
/// `R = M + G` elsewhere. No renormalization.
pub fn fuse(m: &FloatMap, g: &FloatMap, tau_g: f64) -> Result<FloatMap> {
    if m.width != g.width || m.height != g.height {
        return Err(Error::Input(format!(
            "matching map {}x{} does not match geometric map {}x{}",
            m.width, m.height, g.width, g.height
        )));
    }
    let data = m
        .data
        .iter()
        .zip(g.data.iter())
        .map(|(&mv, &gv)| if mv < tau_g { mv } else { mv + gv })
        .collect();
    FloatMap::new(m.width, m.height, data)
}

/// Convenience: build G once and fuse both matching maps with it.
pub fn respond_maps(
    m_left: &FloatMap,
    m_right: &FloatMap,
    normals: &NormalMap,
    depth: &DepthImage,
    cfg: &Config,
) -> Result<RespondMaps> {
    let g = geom_map(normals, depth, cfg)?;
    Ok(RespondMaps {
        left: fuse(m_left, &g, cfg.tau_g)?,
        right: fuse(m_right, &g, cfg.tau_g)?,
        g,
    })
}
