//! Dataset directory layout.
//!
//! A dataset directory holds one frame per index:
//! `NNNNNN.gray.pgm`, `NNNNNN.depth.pgm`, and optionally `NNNNNN.mask.pgm`
//! (lane-marker ground truth), `NNNNNN.obstacle.pgm` and `NNNNNN.plane.txt`,
//! with a zero-padded 6-digit index. A `manifest.txt` records the frame
//! count, the shared camera intrinsics and the generator settings.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::imgcore::camera::CameraIntrinsics;
use crate::imgcore::pgm;
use crate::imgcore::raster::{DepthImage, GrayImage};

/// A registered gray + depth pair, the pipeline's input unit.
#[derive(Debug, Clone)]
pub struct Frame {
    pub gray: GrayImage,
    pub depth: DepthImage,
}

/// Zero-padded 6-digit frame stem, e.g. `000042`.
pub fn frame_stem(index: usize) -> String {
    format!("{index:06}")
}

/// Load a gray/depth PGM pair into a [`Frame`], converting depth to meters
/// and marking zero samples invalid.
pub fn load_frame_pair(gray_path: impl AsRef<Path>, depth_path: impl AsRef<Path>) -> Result<Frame> {
    let gray = pgm::load_gray(gray_path)?;
    let depth = pgm::load_depth_mm(depth_path)?;
    if gray.width != depth.width || gray.height != depth.height {
        return Err(Error::Input(format!(
            "gray {}x{} and depth {}x{} dimensions differ",
            gray.width, gray.height, depth.width, depth.height
        )));
    }
    Ok(Frame { gray, depth })
}

/// Dataset manifest: frame count, camera intrinsics and generator echo lines.
#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub frames: usize,
    pub intrinsics: CameraIntrinsics,
    /// Generator settings echoed as `key = value` pairs, kept in order.
    pub echo: Vec<(String, String)>,
}

impl Manifest {
    pub fn path_in(dir: impl AsRef<Path>) -> PathBuf {
        dir.as_ref().join("manifest.txt")
    }

    pub fn save(&self, dir: impl AsRef<Path>) -> Result<()> {
        let mut text = String::from("# lanemark dataset manifest\n");
        text.push_str(&format!("frames = {}\n", self.frames));
        text.push_str(&format!("width = {}\n", self.intrinsics.width));
        text.push_str(&format!("height = {}\n", self.intrinsics.height));
        text.push_str(&format!("fx = {:?}\n", self.intrinsics.fx));
        text.push_str(&format!("fy = {:?}\n", self.intrinsics.fy));
        text.push_str(&format!("cx = {:?}\n", self.intrinsics.cx));
        text.push_str(&format!("cy = {:?}\n", self.intrinsics.cy));
        for (k, v) in &self.echo {
            text.push_str(&format!("{k} = {v}\n"));
        }
        for i in 0..self.frames {
            text.push_str(&format!("frame {}\n", frame_stem(i)));
        }
        std::fs::write(Self::path_in(dir), text)?;
        Ok(())
    }

    pub fn load(dir: impl AsRef<Path>) -> Result<Self> {
        let path = Self::path_in(&dir);
        let text = std::fs::read_to_string(&path)
            .map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
        let mut frames = None;
        let mut fx = None;
        let mut fy = None;
        let mut cx = None;
        let mut cy = None;
        let mut width = None;
        let mut height = None;
        let mut echo = Vec::new();
        let mut listed = 0usize;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(stem) = line.strip_prefix("frame ") {
                if stem.trim() != frame_stem(listed) {
                    return Err(Error::Input(format!(
                        "manifest line {}: expected frame {}, got `{line}`",
                        idx + 1,
                        frame_stem(listed)
                    )));
                }
                listed += 1;
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Input(format!("manifest line {}: `{line}`", idx + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            let parse = |v: &str| -> Result<f64> {
                v.parse()
                    .map_err(|_| Error::Input(format!("manifest line {}: bad number `{v}`", idx + 1)))
            };
            match key {
                "frames" => frames = Some(parse(value)? as usize),
                "width" => width = Some(parse(value)? as usize),
                "height" => height = Some(parse(value)? as usize),
                "fx" => fx = Some(parse(value)?),
                "fy" => fy = Some(parse(value)?),
                "cx" => cx = Some(parse(value)?),
                "cy" => cy = Some(parse(value)?),
                _ => echo.push((key.to_string(), value.to_string())),
            }
        }
        let missing = |what: &str| Error::Input(format!("manifest missing `{what}`"));
        let frames = frames.ok_or_else(|| missing("frames"))?;
        let intrinsics = CameraIntrinsics::new(
            fx.ok_or_else(|| missing("fx"))?,
            fy.ok_or_else(|| missing("fy"))?,
            cx.ok_or_else(|| missing("cx"))?,
            cy.ok_or_else(|| missing("cy"))?,
            width.ok_or_else(|| missing("width"))?,
            height.ok_or_else(|| missing("height"))?,
        )?;
        if listed != frames {
            return Err(Error::Input(format!(
                "manifest lists {listed} frames but declares {frames}"
            )));
        }
        Ok(Self {
            frames,
            intrinsics,
            echo,
        })
    }
}

/// Paths of one frame's files inside a dataset directory.
#[derive(Debug, Clone)]
pub struct FramePaths {
    pub gray: PathBuf,
    pub depth: PathBuf,
    pub mask: PathBuf,
    pub obstacle: PathBuf,
    pub plane: PathBuf,
}

impl FramePaths {
    pub fn new(dir: impl AsRef<Path>, index: usize) -> Self {
        let dir = dir.as_ref();
        let stem = frame_stem(index);
        Self {
            gray: dir.join(format!("{stem}.gray.pgm")),
            depth: dir.join(format!("{stem}.depth.pgm")),
            mask: dir.join(format!("{stem}.mask.pgm")),
            obstacle: dir.join(format!("{stem}.obstacle.pgm")),
            plane: dir.join(format!("{stem}.plane.txt")),
        }
    }

    pub fn load_frame(&self) -> Result<Frame> {
        load_frame_pair(&self.gray, &self.depth)
    }
}
