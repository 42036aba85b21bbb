//! Core rasters, camera model, file formats and configuration.
//!
//! Everything downstream operates on the types defined here: 8-bit
//! grayscale images, metric depth images with a per-pixel validity flag,
//! and unitless float maps shared by the matching / geometric / respond
//! stages. Pixel coordinates are `(x, y)` = (column, row) with the origin
//! at the top-left corner; buffers are row-major.

mod camera;
mod config;
mod dataset;
mod pgm;
mod raster;

pub use camera::CameraIntrinsics;
pub use config::Config;
pub use dataset::{frame_stem, load_frame_pair, Frame, FramePaths, Manifest};
pub use pgm::{
    load_depth_mm, load_float_map, load_gray, load_mask, save_depth_mm, save_float_map, save_gray,
    save_mask, FLOAT_MAP_SCALE_KEY,
};
pub use raster::{DepthImage, FloatMap, GrayImage};
