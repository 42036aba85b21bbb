//! Procedural RGB-D road scenes with pixel-exact ground truth.
//!
//! Frames are ray-cast against an analytic world: a ground plane carrying
//! two lane markers (solid or dashed), optional box obstacles, a far
//! depth clip modeling sensor range, plus fog and additive Gaussian noise.
//! Everything is seeded, so (spec, seed, frame index) fully determine the
//! output bytes. The ground-truth masks and plane come from the same
//! intersection tests before noise is applied.

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::imgcore::{
    save_depth_mm, save_gray, save_mask, CameraIntrinsics, DepthImage, Frame, FramePaths,
    GrayImage, Manifest,
};
use crate::lanefit::Plane3;

/// Sensor range: depths beyond this render as invalid.
pub const MAX_DEPTH_M: f64 = 60.0;

pub const ROAD_TONE: u8 = 90;
pub const MARKER_TONE: u8 = 250;
pub const OBSTACLE_TONE: u8 = 140;
pub const SKY_TONE: u8 = 30;
const FOG_TONE: f64 = 128.0;

/// Lane marker paint pattern.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MarkerStyle {
    Solid,
    /// Alternating painted/unpainted stretches, lengths in meters.
    Dashed { dash_m: f64, gap_m: f64 },
}

impl MarkerStyle {
    fn painted_at(&self, along_m: f64) -> bool {
        match *self {
            MarkerStyle::Solid => true,
            MarkerStyle::Dashed { dash_m, gap_m } => along_m.rem_euclid(dash_m + gap_m) < dash_m,
        }
    }

    fn echo(&self) -> String {
        match *self {
            MarkerStyle::Solid => "solid".into(),
            MarkerStyle::Dashed { dash_m, gap_m } => format!("dashed:{dash_m}:{gap_m}"),
        }
    }
}

/// Axis-aligned box sitting on the road, in lane coordinates: `lateral`
/// is the center offset from the lane center, `distance` meters ahead of
/// the camera.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObstacleBox {
    pub lateral: f64,
    pub distance: f64,
    /// (width, height, depth) in meters.
    pub size: (f64, f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    /// Additive Gaussian sigma on gray levels.
    pub gray_sigma: f64,
    /// Additive Gaussian sigma on depth, meters.
    pub depth_sigma: f64,
    /// Exponential fog density; 0 disables fog.
    pub fog_density: f64,
}

/// Full description of a synthetic scene.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneSpec {
    pub camera_height: f64,
    /// Down-positive pitch, radians.
    pub camera_pitch: f64,
    pub lane_width: f64,
    pub marker_width: f64,
    pub marker_style: MarkerStyle,
    pub obstacles: Vec<ObstacleBox>,
    pub noise: NoiseSpec,
    pub seed: u64,
    pub intrinsics: CameraIntrinsics,
}

impl SceneSpec {
    /// Baseline desk-scale scene. The geometry is chosen so the markers'
    /// image slant sits at the default template angles (110/70 degrees):
    /// the image slope of a ground line at lateral offset `a` is
    /// `(height / cos(pitch)) / a`.
    pub fn desk_default(seed: u64) -> Self {
        let height = 1.5;
        let pitch = 10f64.to_radians();
        let slope = 70f64.to_radians().tan();
        let half_lane = height / pitch.cos() / slope;
        Self {
            camera_height: height,
            camera_pitch: pitch,
            lane_width: 2.0 * half_lane,
            marker_width: 0.15,
            marker_style: MarkerStyle::Solid,
            obstacles: Vec::new(),
            noise: NoiseSpec {
                gray_sigma: 2.0,
                depth_sigma: 0.005,
                fog_density: 0.0,
            },
            seed,
            intrinsics: CameraIntrinsics::new(525.0, 525.0, 319.5, 239.5, 640, 480).unwrap(),
        }
    }

    /// Fog + heavier sensor noise variant of the baseline.
    pub fn fog_variant(seed: u64) -> Self {
        let mut spec = Self::desk_default(seed);
        spec.noise.fog_density = 0.08;
        spec.noise.gray_sigma = 8.0;
        spec
    }

    /// Baseline plus one 1.5 m cube in the lane ahead.
    pub fn obstacle_variant(seed: u64) -> Self {
        let mut spec = Self::desk_default(seed);
        spec.obstacles.push(ObstacleBox {
            lateral: 0.0,
            distance: 14.0,
            size: (1.5, 1.5, 1.5),
        });
        spec
    }

    pub fn validate(&self) -> Result<()> {
        if !self.camera_height.is_finite() || self.camera_height <= 0.0 {
            return Err(Error::Parameter("camera height must be positive".into()));
        }
        if !(self.lane_width > self.marker_width && self.marker_width > 0.0) {
            return Err(Error::Parameter(
                "lane width must exceed marker width, both positive".into(),
            ));
        }
        Ok(())
    }

    /// Analytic road plane in camera coordinates (independent of yaw).
    pub fn ground_plane(&self) -> Plane3 {
        let (sin, cos) = self.camera_pitch.sin_cos();
        Plane3 {
            normal: Vector3::new(0.0, cos, sin),
            point: Vector3::new(0.0, self.camera_height * cos, self.camera_height * sin),
        }
    }
}

/// Camera placement for one frame of a sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VehiclePose {
    /// Frame index; also salts the per-frame noise stream.
    pub frame_index: usize,
    /// Meters traveled along the lane (scrolls dashed markers).
    pub advance: f64,
    /// Camera offset from the lane center, meters, right-positive.
    pub lateral_offset: f64,
    /// Yaw jitter, radians.
    pub heading_jitter: f64,
}

impl VehiclePose {
    pub fn at_rest(frame_index: usize) -> Self {
        Self {
            frame_index,
            advance: 0.0,
            lateral_offset: 0.0,
            heading_jitter: 0.0,
        }
    }
}

/// Per-pixel ground truth for a rendered frame.
#[derive(Debug, Clone)]
pub struct GroundTruth {
    pub marker_mask: Vec<bool>,
    pub obstacle_mask: Vec<bool>,
    pub plane: Plane3,
}

enum Hit {
    Sky,
    Road { marker: bool },
    Obstacle,
}

/// Render one frame by casting a ray per pixel against the road plane and
/// the obstacle boxes; the nearest hit wins. Depth is the z-distance along
/// the optical axis, clipped to invalid beyond [`MAX_DEPTH_M`].
pub fn render_frame(spec: &SceneSpec, pose: &VehiclePose) -> (Frame, GroundTruth) {
    let cam = &spec.intrinsics;
    let (w, h) = (cam.width, cam.height);
    let (sp, cp) = spec.camera_pitch.sin_cos();
    let (sy, cy) = pose.heading_jitter.sin_cos();
    let height = spec.camera_height;
    let half_lane = spec.lane_width / 2.0;
    let half_marker = spec.marker_width / 2.0;

    // Obstacle boxes in camera-grounded world coordinates.
    let boxes: Vec<([f64; 3], [f64; 3])> = spec
        .obstacles
        .iter()
        .map(|b| {
            let cx = b.lateral - pose.lateral_offset;
            (
                [cx - b.size.0 / 2.0, height - b.size.1, b.distance - b.size.2 / 2.0],
                [cx + b.size.0 / 2.0, height, b.distance + b.size.2 / 2.0],
            )
        })
        .collect();

    let mut gray = vec![0u8; w * h];
    let mut depth = vec![0.0f64; w * h];
    let mut marker_mask = vec![false; w * h];
    let mut obstacle_mask = vec![false; w * h];

    let mut rng = ChaCha8Rng::seed_from_u64(
        spec.seed ^ (pose.frame_index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15),
    );
    let gray_noise = (spec.noise.gray_sigma > 0.0)
        .then(|| Normal::new(0.0, spec.noise.gray_sigma).unwrap());
    let depth_noise = (spec.noise.depth_sigma > 0.0)
        .then(|| Normal::new(0.0, spec.noise.depth_sigma).unwrap());

    for j in 0..h {
        let dy_c = (j as f64 - cam.cy) / cam.fy;
        for i in 0..w {
            let dx_c = (i as f64 - cam.cx) / cam.fx;
            // Camera ray with unit z, pitched then yawed into world frame.
            // The ray parameter t is then exactly the camera-frame z-depth.
            let dp = [dx_c, dy_c * cp + sp, -dy_c * sp + cp];
            let d = [dp[0] * cy + dp[2] * sy, dp[1], -dp[0] * sy + dp[2] * cy];

            let t_road = (d[1] > 1e-12).then(|| height / d[1]);
            let mut nearest = t_road.map(|t| (t, 0usize)); // 0 = road
            for (bi, (lo, hi)) in boxes.iter().enumerate() {
                if let Some(t) = ray_box(d, lo, hi) {
                    if nearest.is_none_or(|(bt, _)| t < bt) {
                        nearest = Some((t, bi + 1));
                    }
                }
            }

            let (hit, t_hit) = match nearest {
                None => (Hit::Sky, None),
                Some((t, 0)) => {
                    let lane_x = t * d[0] + pose.lateral_offset;
                    let lane_z = t * d[2] + pose.advance;
                    let on_marker = ((lane_x - half_lane).abs() <= half_marker
                        || (lane_x + half_lane).abs() <= half_marker)
                        && spec.marker_style.painted_at(lane_z);
                    (Hit::Road { marker: on_marker }, Some(t))
                }
                Some((t, _)) => (Hit::Obstacle, Some(t)),
            };

            let idx = j * w + i;
            let tone = match hit {
                Hit::Sky => SKY_TONE,
                Hit::Road { marker: true } => {
                    marker_mask[idx] = true;
                    MARKER_TONE
                }
                Hit::Road { marker: false } => ROAD_TONE,
                Hit::Obstacle => {
                    obstacle_mask[idx] = true;
                    OBSTACLE_TONE
                }
            };

            let mut g = f64::from(tone);
            if spec.noise.fog_density > 0.0 {
                let fog_t = t_hit.unwrap_or(MAX_DEPTH_M).min(MAX_DEPTH_M);
                let wfog = 1.0 - (-spec.noise.fog_density * fog_t).exp();
                g += (FOG_TONE - g) * wfog;
            }
            if let Some(n) = &gray_noise {
                g += n.sample(&mut rng);
            }
            gray[idx] = g.round().clamp(0.0, 255.0) as u8;

            if let Some(t) = t_hit {
                if t <= MAX_DEPTH_M {
                    let mut z = t;
                    if let Some(n) = &depth_noise {
                        z = (z + n.sample(&mut rng)).max(1e-3);
                    }
                    depth[idx] = z;
                }
            }
        }
    }

    let frame = Frame {
        gray: GrayImage::new(w, h, gray).unwrap(),
        depth: DepthImage::from_meters(w, h, depth).unwrap(),
    };
    let truth = GroundTruth {
        marker_mask,
        obstacle_mask,
        plane: spec.ground_plane(),
    };
    (frame, truth)
}

/// Slab intersection of the ray `t * d` (origin at the camera) with an
/// axis-aligned box; returns the entry parameter of the nearest hit ahead.
fn ray_box(d: [f64; 3], lo: &[f64; 3], hi: &[f64; 3]) -> Option<f64> {
    let mut t0 = 1e-9f64;
    let mut t1 = f64::INFINITY;
    for a in 0..3 {
        if d[a].abs() < 1e-15 {
            if 0.0 < lo[a] || 0.0 > hi[a] {
                return None;
            }
        } else {
            let (mut ta, mut tb) = (lo[a] / d[a], hi[a] / d[a]);
            if ta > tb {
                std::mem::swap(&mut ta, &mut tb);
            }
            t0 = t0.max(ta);
            t1 = t1.min(tb);
        }
    }
    (t0 <= t1).then_some(t0)
}

/// Render a sequence with the vehicle advancing, writing the dataset
/// directory layout (gray/depth/mask/obstacle/plane per frame) plus a
/// manifest echoing the scene settings.
pub fn make_dataset(
    spec: &SceneSpec,
    frames: usize,
    out_dir: impl AsRef<std::path::Path>,
) -> Result<Manifest> {
    spec.validate()?;
    if frames == 0 {
        return Err(Error::Parameter("frame count must be at least 1".into()));
    }
    let out_dir = out_dir.as_ref();
    std::fs::create_dir_all(out_dir)?;

    let mut jitter_rng = ChaCha8Rng::seed_from_u64(spec.seed.wrapping_mul(31).wrapping_add(7));
    for index in 0..frames {
        let pose = VehiclePose {
            frame_index: index,
            advance: index as f64 * 0.6,
            lateral_offset: 0.05 * (index as f64 * std::f64::consts::TAU / 140.0).sin(),
            heading_jitter: jitter_rng.gen_range(-0.003..0.003),
        };
        let (frame, truth) = render_frame(spec, &pose);
        let paths = FramePaths::new(out_dir, index);
        save_gray(&frame.gray, &paths.gray)?;
        save_depth_mm(&frame.depth, &paths.depth)?;
        save_mask(frame.gray.width, frame.gray.height, &truth.marker_mask, &paths.mask)?;
        save_mask(
            frame.gray.width,
            frame.gray.height,
            &truth.obstacle_mask,
            &paths.obstacle,
        )?;
        truth.plane.save(&paths.plane)?;
    }

    let manifest = Manifest {
        frames,
        intrinsics: spec.intrinsics.clone(),
        echo: vec![
            ("cameraHeight".into(), format!("{:?}", spec.camera_height)),
            ("cameraPitchDeg".into(), format!("{:?}", spec.camera_pitch.to_degrees())),
            ("laneWidth".into(), format!("{:?}", spec.lane_width)),
            ("markerWidth".into(), format!("{:?}", spec.marker_width)),
            ("markerStyle".into(), spec.marker_style.echo()),
            ("obstacles".into(), format!("{}", spec.obstacles.len())),
            ("graySigma".into(), format!("{:?}", spec.noise.gray_sigma)),
            ("depthSigma".into(), format!("{:?}", spec.noise.depth_sigma)),
            ("fogDensity".into(), format!("{:?}", spec.noise.fog_density)),
            ("seed".into(), format!("{}", spec.seed)),
        ],
    };
    manifest.save(out_dir)?;
    Ok(manifest)
}
