use crate::error::{Error, Result};

/// Pinhole camera intrinsics for a registered RGB-D pair.
///
/// One intrinsics object describes both the gray and the depth raster;
/// the pipeline assumes pre-registered streams.
#[derive(Debug, Clone, PartialEq)]
pub struct CameraIntrinsics {
    /// Focal lengths in pixels.
    pub fx: f64,
    pub fy: f64,
    /// Principal point in pixels.
    pub cx: f64,
    pub cy: f64,
    /// Raster size in pixels.
    pub width: usize,
    pub height: usize,
}

impl CameraIntrinsics {
    pub fn new(fx: f64, fy: f64, cx: f64, cy: f64, width: usize, height: usize) -> Result<Self> {
        if !fx.is_finite() || fx <= 0.0 || !fy.is_finite() || fy <= 0.0 {
            return Err(Error::Parameter(format!(
                "focal lengths must be positive, got fx={fx} fy={fy}"
            )));
        }
        if !(0.0 <= cx && cx < width as f64) || !(0.0 <= cy && cy < height as f64) {
            return Err(Error::Parameter(format!(
                "principal point ({cx}, {cy}) outside {width}x{height} raster"
            )));
        }
        Ok(Self {
            fx,
            fy,
            cx,
            cy,
            width,
            height,
        })
    }

    /// Unit view-ray direction through pixel `(x, y)` in camera coordinates
    /// (x right, y down, z forward).
    pub fn ray(&self, x: f64, y: f64) -> nalgebra::Vector3<f64> {
        nalgebra::Vector3::new((x - self.cx) / self.fx, (y - self.cy) / self.fy, 1.0).normalize()
    }
}
