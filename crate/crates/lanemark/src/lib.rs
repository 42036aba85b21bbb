//! RGB-D lane marker detection.
//!
//! An end-to-end pipeline that finds lane markers in registered gray+depth
//! frames by fusing color template matching with depth-derived geometry:
//!
//! 1. **preprocess** – half-binary thresholding, pinhole backprojection,
//!    fast least-squares surface normals with a camera-only precompute.
//! 2. **matching** – slanted-stripe templates scored by zero-mean NCC.
//! 3. **respond** – geometric feature map and gated fusion into the
//!    respond map.
//! 4. **enhance** – peak-region extraction, PCA template-angle feedback and
//!    sliding-box marker tracing.
//! 5. **lanefit** – 3D lane-plane fit from three detected points.
//!
//! [`synthgen`] renders seeded synthetic road scenes with pixel-exact
//! ground truth, and [`harness`] orchestrates the pipeline over datasets,
//! evaluates detections and reports per-stage timings. File formats and
//! configuration live in [`imgcore`].

pub mod enhance;
mod error;
pub mod harness;
pub mod imgcore;
pub mod lanefit;
pub mod matching;
pub mod preprocess;
pub mod respond;
pub mod synthgen;

pub use error::{Error, Result};
