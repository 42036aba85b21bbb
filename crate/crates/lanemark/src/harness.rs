//! Pipeline orchestration, evaluation against ground truth, and per-stage
//! timing reports.
//!
//! [`Detector`] owns the cross-frame state (the camera precomputation and
//! the angle-adapted templates); [`run_pipeline`] drives it over a dataset
//! directory in index order. Frames that fail activation or plane fitting
//! are emitted as skipped with a reason rather than dropped, so evaluation
//! denominators stay honest.

use std::path::Path;
use std::time::Instant;

use crate::enhance::{pca_angle, select_peak_region, trace_marker, MarkerChain};
use crate::error::{Error, Result};
use crate::imgcore::{
    load_mask, CameraIntrinsics, Config, Frame, FramePaths, GrayImage, Manifest,
};
use crate::lanefit::{fit_plane, furthest_center, LanePlane, Plane3};
use crate::matching::{make_template, ncc_match, rotate_template, Side, Template};
use crate::preprocess::{backproject, fals_normals, fals_precompute, to_half_binary, FalsPrecomp};
use crate::respond::respond_maps;

/// Wall-clock milliseconds per pipeline stage.
#[derive(Debug, Clone, Copy, Default)]
pub struct StageTimings {
    pub preprocess: f64,
    pub matching: f64,
    pub respond: f64,
    pub enhance: f64,
    pub lanefit: f64,
}

pub const STAGE_NAMES: [&str; 5] = ["preprocess", "matching", "respond", "enhance", "lanefit"];

impl StageTimings {
    pub fn as_array(&self) -> [f64; 5] {
        [
            self.preprocess,
            self.matching,
            self.respond,
            self.enhance,
            self.lanefit,
        ]
    }

    pub fn total(&self) -> f64 {
        self.as_array().iter().sum()
    }
}

/// Why a frame produced no detection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SkipReason {
    /// Neither respond map's peak cleared the activation threshold.
    NoPeak,
    /// A detected pixel had no valid depth in its neighborhood.
    DepthGap,
    /// The three lane points were collinear (or not distinct).
    DegeneratePlane,
}

impl SkipReason {
    pub fn name(self) -> &'static str {
        match self {
            SkipReason::NoPeak => "no-peak",
            SkipReason::DepthGap => "depth-gap",
            SkipReason::DegeneratePlane => "degenerate-plane",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Detected,
    Skipped(SkipReason),
}

/// Everything the pipeline produced for one frame.
#[derive(Debug, Clone)]
pub struct DetectionResult {
    pub frame_index: usize,
    pub status: Status,
    pub left_chain: Option<MarkerChain>,
    pub right_chain: Option<MarkerChain>,
    pub plane: Option<LanePlane>,
    pub timings: StageTimings,
    /// Left-marker angle after this frame's refinement, radians.
    pub refined_theta: f64,
}

/// Stateful per-stream detector carrying the template-angle feedback.
pub struct Detector {
    cfg: Config,
    cam: CameraIntrinsics,
    precomp: FalsPrecomp,
    left: Template,
    right: Template,
    /// When false, templates stay at their configured angles.
    pub feedback: bool,
}

// Angles closer than this to 0 or pi describe a near-horizontal stripe the
// tracer cannot follow anyway; the feedback keeps the previous angle.
const MIN_ANGLE_MARGIN: f64 = 0.015;

impl Detector {
    pub fn new(cfg: Config, cam: CameraIntrinsics) -> Result<Self> {
        cfg.validate()?;
        let precomp = fals_precompute(&cam, cfg.fals_window)?;
        let left = make_template(cfg.template_size, cfg.theta_left(), cfg.stripe_width, Side::Left)?;
        let right =
            make_template(cfg.template_size, cfg.theta_left(), cfg.stripe_width, Side::Right)?;
        Ok(Self {
            cfg,
            cam,
            precomp,
            left,
            right,
            feedback: true,
        })
    }

    pub fn config(&self) -> &Config {
        &self.cfg
    }

    /// Current drawn template angles (left, right), radians.
    pub fn template_angles(&self) -> (f64, f64) {
        (self.left.theta, self.right.theta)
    }

    /// Respond maps for a frame under the current templates, without
    /// advancing the cross-frame feedback.
    pub fn respond_maps_for(&self, frame: &Frame) -> Result<crate::respond::RespondMaps> {
        let half_binary = to_half_binary(&frame.gray, self.cfg.tau_c);
        let grid = backproject(&frame.depth, &self.cam)?;
        let normals = fals_normals(&grid, &self.precomp, self.cfg.fals_z_depth)?;
        let m_left = ncc_match(&half_binary, &self.left, self.cfg.ncc_floor)?;
        let m_right = ncc_match(&half_binary, &self.right, self.cfg.ncc_floor)?;
        respond_maps(&m_left, &m_right, &normals, &frame.depth, &self.cfg)
    }

    fn accept_angle(candidate: f64, current: f64) -> f64 {
        let margin = candidate.min(std::f64::consts::PI - candidate);
        if margin > MIN_ANGLE_MARGIN {
            candidate
        } else {
            current
        }
    }

    /// Run the full pipeline on one frame.
    pub fn process(&mut self, frame_index: usize, frame: &Frame) -> Result<DetectionResult> {
        if frame.gray.width != self.cam.width || frame.gray.height != self.cam.height {
            return Err(Error::Input(format!(
                "frame {frame_index}: raster {}x{} does not match intrinsics {}x{}",
                frame.gray.width, frame.gray.height, self.cam.width, self.cam.height
            )));
        }
        let mut timings = StageTimings::default();
        let skip = |reason, timings, theta| DetectionResult {
            frame_index,
            status: Status::Skipped(reason),
            left_chain: None,
            right_chain: None,
            plane: None,
            timings,
            refined_theta: theta,
        };

        let t0 = Instant::now();
        let half_binary = to_half_binary(&frame.gray, self.cfg.tau_c);
        let grid = backproject(&frame.depth, &self.cam)?;
        let normals = fals_normals(&grid, &self.precomp, self.cfg.fals_z_depth)?;
        timings.preprocess = ms_since(t0);

        let t0 = Instant::now();
        let m_left = ncc_match(&half_binary, &self.left, self.cfg.ncc_floor)?;
        let m_right = ncc_match(&half_binary, &self.right, self.cfg.ncc_floor)?;
        timings.matching = ms_since(t0);

        let t0 = Instant::now();
        let maps = respond_maps(&m_left, &m_right, &normals, &frame.depth, &self.cfg)?;
        timings.respond = ms_since(t0);

        let t0 = Instant::now();
        let left_region = select_peak_region(&maps.left, self.cfg.p_pca);
        let right_region = select_peak_region(&maps.right, self.cfg.p_pca);
        let (Some(left_region), Some(right_region)) = (left_region, right_region) else {
            timings.enhance = ms_since(t0);
            return Ok(skip(SkipReason::NoPeak, timings, self.left.theta));
        };
        let left_theta = pca_angle(&left_region, self.left.theta).unwrap_or(self.left.theta);
        let right_theta = pca_angle(&right_region, self.right.theta).unwrap_or(self.right.theta);
        let left_theta = Self::accept_angle(left_theta, self.left.theta);
        let right_theta = Self::accept_angle(right_theta, self.right.theta);
        let left_chain = trace_marker(&maps.left, &left_region, left_theta, Side::Left, &self.cfg);
        let right_chain =
            trace_marker(&maps.right, &right_region, right_theta, Side::Right, &self.cfg);
        if self.feedback {
            self.left = rotate_template(&self.left, left_theta);
            self.right = rotate_template(&self.right, right_theta);
        }
        timings.enhance = ms_since(t0);

        let t0 = Instant::now();
        let left_peak = (left_region.peak.0 as f64, left_region.peak.1 as f64);
        let right_peak = (right_region.peak.0 as f64, right_region.peak.1 as f64);
        let Some(right_far) = furthest_center(&grid, &right_chain) else {
            timings.lanefit = ms_since(t0);
            let mut r = skip(SkipReason::DepthGap, timings, left_theta);
            r.left_chain = Some(left_chain);
            r.right_chain = Some(right_chain);
            return Ok(r);
        };
        let fitted = fit_plane(&grid, left_peak, right_peak, right_far);
        timings.lanefit = ms_since(t0);

        match fitted {
            Ok(plane) => Ok(DetectionResult {
                frame_index,
                status: Status::Detected,
                left_chain: Some(left_chain),
                right_chain: Some(right_chain),
                plane: Some(plane),
                timings,
                refined_theta: left_theta,
            }),
            Err(e) => {
                let reason = match e {
                    Error::DepthGap(_) => SkipReason::DepthGap,
                    _ => SkipReason::DegeneratePlane,
                };
                let mut r = skip(reason, timings, left_theta);
                r.left_chain = Some(left_chain);
                r.right_chain = Some(right_chain);
                Ok(r)
            }
        }
    }
}

fn ms_since(t0: Instant) -> f64 {
    t0.elapsed().as_secs_f64() * 1e3
}

/// Process every frame of a dataset in index order with feedback enabled.
pub fn run_pipeline(dataset: impl AsRef<Path>, cfg: &Config) -> Result<Vec<DetectionResult>> {
    run_pipeline_with(dataset, cfg, true)
}

/// [`run_pipeline`] with the template-angle feedback toggleable.
pub fn run_pipeline_with(
    dataset: impl AsRef<Path>,
    cfg: &Config,
    feedback: bool,
) -> Result<Vec<DetectionResult>> {
    let dataset = dataset.as_ref();
    let manifest = Manifest::load(dataset)?;
    let mut detector = Detector::new(cfg.clone(), manifest.intrinsics.clone())?;
    detector.feedback = feedback;
    let mut results = Vec::with_capacity(manifest.frames);
    for index in 0..manifest.frames {
        let frame = FramePaths::new(dataset, index).load_frame()?;
        results.push(detector.process(index, &frame)?);
    }
    Ok(results)
}

/// Per-frame evaluation outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// Plane within tolerance and at least 80% of chain centers on marker.
    TruePositive,
    /// More than 20% of chain centers far from any marker pixel.
    FalsePositive,
    /// Chains on the marker but the plane normal out of tolerance.
    PlaneOff,
    Skipped(SkipReason),
}

#[derive(Debug, Clone)]
pub struct FrameVerdict {
    pub index: usize,
    pub verdict: Verdict,
}

/// Mean/median/p95 milliseconds for one stage plus its share of the total.
#[derive(Debug, Clone)]
pub struct StageStat {
    pub name: &'static str,
    pub mean_ms: f64,
    pub median_ms: f64,
    pub p95_ms: f64,
    pub share: f64,
}

#[derive(Debug, Clone)]
pub struct EvalReport {
    pub frames: usize,
    pub true_positive_rate: f64,
    pub false_positive_rate: f64,
    pub per_frame: Vec<FrameVerdict>,
    pub timing: Vec<StageStat>,
}

/// Fraction of pooled chain centers lying within `tol_px` of a mask pixel.
fn fraction_near_mask(
    chains: &[&MarkerChain],
    mask: &[bool],
    width: usize,
    height: usize,
    tol_px: f64,
) -> f64 {
    let mut total = 0usize;
    let mut near = 0usize;
    let r = tol_px.ceil() as i64;
    for chain in chains {
        for &(cx, cy) in &chain.centers {
            total += 1;
            let (ix, iy) = (cx.round() as i64, cy.round() as i64);
            'search: for y in (iy - r).max(0)..=(iy + r).min(height as i64 - 1) {
                for x in (ix - r).max(0)..=(ix + r).min(width as i64 - 1) {
                    if mask[y as usize * width + x as usize]
                        && (x as f64 - cx).hypot(y as f64 - cy) <= tol_px
                    {
                        near += 1;
                        break 'search;
                    }
                }
            }
        }
    }
    if total == 0 {
        0.0
    } else {
        near as f64 / total as f64
    }
}

/// Score detection results against a dataset's ground truth.
///
/// A detected frame is a true positive when the fitted normal is within
/// `tol_deg` of the ground-truth plane normal and at least 80% of its chain
/// centers lie within `tol_px` of a marker pixel; it is a false positive
/// when more than 20% of centers are far from every marker pixel. Skipped
/// frames count toward neither numerator; both rates divide by the total
/// frame count.
pub fn evaluate(
    results: &[DetectionResult],
    dataset: impl AsRef<Path>,
    tol_px: f64,
    tol_deg: f64,
) -> Result<EvalReport> {
    let dataset = dataset.as_ref();
    let manifest = Manifest::load(dataset)?;
    let total = results.len();
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut per_frame = Vec::with_capacity(total);
    for result in results {
        let verdict = match result.status {
            Status::Skipped(reason) => Verdict::Skipped(reason),
            Status::Detected => {
                let paths = FramePaths::new(dataset, result.frame_index);
                if !paths.mask.exists() || !paths.plane.exists() {
                    return Err(Error::Input(format!(
                        "frame {} lacks ground truth",
                        result.frame_index
                    )));
                }
                let (mw, mh, mask) = load_mask(&paths.mask)?;
                let truth = Plane3::load(&paths.plane)?;
                let chains: Vec<&MarkerChain> = [&result.left_chain, &result.right_chain]
                    .into_iter()
                    .flatten()
                    .collect();
                let frac = fraction_near_mask(&chains, &mask, mw, mh, tol_px);
                if frac < 0.8 {
                    Verdict::FalsePositive
                } else {
                    let plane = result.plane.as_ref().expect("detected implies plane");
                    if plane.plane.normal_angle_deg(&truth) <= tol_deg {
                        Verdict::TruePositive
                    } else {
                        Verdict::PlaneOff
                    }
                }
            }
        };
        match verdict {
            Verdict::TruePositive => tp += 1,
            Verdict::FalsePositive => fp += 1,
            _ => {}
        }
        per_frame.push(FrameVerdict {
            index: result.frame_index,
            verdict,
        });
    }
    let _ = manifest; // validated the dataset exists and is consistent
    let denom = total.max(1) as f64;
    Ok(EvalReport {
        frames: total,
        true_positive_rate: tp as f64 / denom,
        false_positive_rate: fp as f64 / denom,
        per_frame,
        timing: stage_stats(results),
    })
}

/// Per-stage timing statistics over a result set.
pub fn stage_stats(results: &[DetectionResult]) -> Vec<StageStat> {
    let mut columns: [Vec<f64>; 5] = Default::default();
    for r in results {
        for (col, v) in columns.iter_mut().zip(r.timings.as_array()) {
            col.push(v);
        }
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len().max(1) as f64;
    let total_mean: f64 = columns.iter().map(|c| mean(c)).sum();
    STAGE_NAMES
        .iter()
        .zip(columns.iter_mut())
        .map(|(&name, col)| {
            col.sort_by(|a, b| a.total_cmp(b));
            let n = col.len();
            let (median_ms, p95_ms) = if n == 0 {
                (0.0, 0.0)
            } else {
                let median = if n % 2 == 1 {
                    col[n / 2]
                } else {
                    0.5 * (col[n / 2 - 1] + col[n / 2])
                };
                let rank = ((0.95 * n as f64).ceil() as usize).clamp(1, n);
                (median, col[rank - 1])
            };
            let mean_ms = mean(col);
            StageStat {
                name,
                mean_ms,
                median_ms,
                p95_ms,
                share: if total_mean > 0.0 {
                    mean_ms / total_mean
                } else {
                    0.0
                },
            }
        })
        .collect()
}

/// Human-readable timing summary plus machine-readable
/// `stage,mean_ms,median_ms,p95_ms,share` lines.
pub fn bench_report(results: &[DetectionResult]) -> String {
    let stats = stage_stats(results);
    let total_mean: f64 = stats.iter().map(|s| s.mean_ms).sum();
    let mut out = String::new();
    out.push_str(&format!("frames: {}\n", results.len()));
    out.push_str(&format!(
        "{:<12} {:>10} {:>10} {:>10} {:>8}\n",
        "stage", "mean ms", "median ms", "p95 ms", "share"
    ));
    for s in &stats {
        out.push_str(&format!(
            "{:<12} {:>10.3} {:>10.3} {:>10.3} {:>7.1}%\n",
            s.name,
            s.mean_ms,
            s.median_ms,
            s.p95_ms,
            s.share * 100.0
        ));
    }
    out.push_str(&format!("{:<12} {:>10.3} ms per frame\n", "total", total_mean));
    out.push_str("stage,mean_ms,median_ms,p95_ms,share\n");
    for s in &stats {
        out.push_str(&format!(
            "{},{:.4},{:.4},{:.4},{:.4}\n",
            s.name, s.mean_ms, s.median_ms, s.p95_ms, s.share
        ));
    }
    out
}

/// One line per frame:
/// `index,status,nx,ny,nz,px,py,pz,theta_deg,chain_len_left,chain_len_right`.
pub fn results_to_text(results: &[DetectionResult]) -> String {
    let mut out = String::new();
    for r in results {
        let status = match r.status {
            Status::Detected => "detected".to_string(),
            Status::Skipped(reason) => format!("skipped({})", reason.name()),
        };
        let (n, p) = match &r.plane {
            Some(lp) => (lp.plane.normal, lp.plane.point),
            None => (nalgebra::Vector3::zeros(), nalgebra::Vector3::zeros()),
        };
        let len = |c: &Option<MarkerChain>| c.as_ref().map_or(0, |c| c.centers.len());
        out.push_str(&format!(
            "{},{},{:.9},{:.9},{:.9},{:.9},{:.9},{:.9},{:.6},{},{}\n",
            r.frame_index,
            status,
            n.x,
            n.y,
            n.z,
            p.x,
            p.y,
            p.z,
            r.refined_theta.to_degrees(),
            len(&r.left_chain),
            len(&r.right_chain),
        ));
    }
    out
}

pub fn write_results(results: &[DetectionResult], path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, results_to_text(results))?;
    Ok(())
}

/// Copy of the gray frame with chain centers marked as small crosses and
/// the plane's source pixels as larger ones.
pub fn render_overlay(gray: &GrayImage, result: &DetectionResult) -> GrayImage {
    let mut img = gray.clone();
    let mut cross = |cx: f64, cy: f64, radius: i64| {
        let (x, y) = (cx.round() as i64, cy.round() as i64);
        for d in -radius..=radius {
            for (px, py) in [(x + d, y), (x, y + d)] {
                if px >= 0 && py >= 0 && (px as usize) < img.width && (py as usize) < img.height {
                    img.set(px as usize, py as usize, 255);
                }
            }
        }
    };
    for chain in [&result.left_chain, &result.right_chain].into_iter().flatten() {
        for &(cx, cy) in &chain.centers {
            cross(cx, cy, 2);
        }
    }
    if let Some(plane) = &result.plane {
        for &(sx, sy) in &plane.source_pixels {
            cross(sx, sy, 5);
        }
    }
    img
}
