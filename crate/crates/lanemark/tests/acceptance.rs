//! Acceptance suite: one test per release criterion, each printing a
//! `ACCEPTANCE <n> <name>: ... -> pass` line (visible with `--nocapture`).
//!
//! Criteria 5-9 run the full pipeline over generated datasets; fixtures are
//! built once and shared across tests via `OnceLock`.

use std::path::{Path, PathBuf};
use std::sync::OnceLock;
use std::time::Instant;

use nalgebra::{Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lanemark::enhance::pca_angle_of_points;
use lanemark::harness::{
    evaluate, run_pipeline, stage_stats, Detector, DetectionResult, Status, Verdict,
};
use lanemark::imgcore::{
    load_mask, CameraIntrinsics, Config, DepthImage, FloatMap, FramePaths, GrayImage,
};
use lanemark::lanefit::Plane3;
use lanemark::matching::{make_template, ncc_match, Side, Template};
use lanemark::preprocess::{backproject, fals_normals, fals_precompute};
use lanemark::respond::{fuse, geom_map};
use lanemark::synthgen::{make_dataset, SceneSpec};

// ---------------------------------------------------------------- fixtures

fn fixture_dir(name: &str, spec: &SceneSpec, frames: usize) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("lanemark-acceptance-{name}"));
    let _ = std::fs::remove_dir_all(&dir);
    make_dataset(spec, frames, &dir).expect("dataset generation");
    dir
}

fn clean_dataset() -> &'static Path {
    static DIR: OnceLock<PathBuf> = OnceLock::new();
    DIR.get_or_init(|| fixture_dir("clean", &SceneSpec::desk_default(41), 200))
}

fn fog_dataset() -> &'static Path {
    static DIR: OnceLock<PathBuf> = OnceLock::new();
    DIR.get_or_init(|| fixture_dir("fog", &SceneSpec::fog_variant(42), 200))
}

fn obstacle_dataset() -> &'static Path {
    static DIR: OnceLock<PathBuf> = OnceLock::new();
    DIR.get_or_init(|| fixture_dir("obstacle", &SceneSpec::obstacle_variant(43), 200))
}

fn clean_results() -> &'static [DetectionResult] {
    static RESULTS: OnceLock<Vec<DetectionResult>> = OnceLock::new();
    RESULTS.get_or_init(|| run_pipeline(clean_dataset(), &Config::default()).expect("pipeline"))
}

fn fog_results() -> &'static [DetectionResult] {
    static RESULTS: OnceLock<Vec<DetectionResult>> = OnceLock::new();
    RESULTS.get_or_init(|| run_pipeline(fog_dataset(), &Config::default()).expect("pipeline"))
}

fn default_cam() -> CameraIntrinsics {
    CameraIntrinsics::new(525.0, 525.0, 319.5, 239.5, 640, 480).unwrap()
}

// ----------------------------------------------------------- criterion 1

#[test]
fn criterion_1_backprojection_round_trip() {
    let started = Instant::now();
    let cam = default_cam();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut data = vec![0.0f64; cam.width * cam.height];
    let mut picked = Vec::with_capacity(10_000);
    for _ in 0..10_000 {
        let x = rng.gen_range(0..cam.width);
        let y = rng.gen_range(0..cam.height);
        let d = rng.gen_range(0.3..59.0);
        data[y * cam.width + x] = d;
        picked.push((x, y));
    }
    let depth = DepthImage::from_meters(cam.width, cam.height, data).unwrap();
    let grid = backproject(&depth, &cam).unwrap();
    let mut max_err = 0.0f64;
    for (x, y) in picked {
        let p = grid.at(x, y);
        assert_eq!(p.z.to_bits(), depth.at(x, y).to_bits(), "z must equal D exactly");
        let iu = p.x / p.z * cam.fx + cam.cx;
        let ju = p.y / p.z * cam.fy + cam.cy;
        max_err = max_err.max((iu - x as f64).abs()).max((ju - y as f64).abs());
    }
    let elapsed = started.elapsed();
    assert!(max_err < 1e-6, "reprojection error {max_err}");
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    println!(
        "ACCEPTANCE 1 backprojection-round-trip: 10000 px, max reprojection {:.2e} px, z exact, {:.0} ms -> pass",
        max_err,
        elapsed.as_secs_f64() * 1e3
    );
}

// ----------------------------------------------------------- criterion 2

/// Independent total-least-squares plane normal: smallest principal axis of
/// the centered window points, oriented toward the camera.
fn svd_tls_normal(points: &[Vector3<f64>], ray: &Vector3<f64>) -> Vector3<f64> {
    let centroid: Vector3<f64> = points.iter().sum::<Vector3<f64>>() / points.len() as f64;
    let mut scatter = Matrix3::zeros();
    for p in points {
        let d = p - centroid;
        scatter += d * d.transpose();
    }
    let eig = scatter.symmetric_eigen();
    let mut idx = 0;
    for k in 1..3 {
        if eig.eigenvalues[k] < eig.eigenvalues[idx] {
            idx = k;
        }
    }
    let mut n = eig.eigenvectors.column(idx).into_owned().normalize();
    if n.dot(ray) > 0.0 {
        n = -n;
    }
    n
}

fn plane_depth(cam: &CameraIntrinsics, n: Vector3<f64>, offset: f64, noise: f64, seed: u64) -> DepthImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data = vec![0.0; cam.width * cam.height];
    for j in 0..cam.height {
        for i in 0..cam.width {
            let dir = Vector3::new((i as f64 - cam.cx) / cam.fx, (j as f64 - cam.cy) / cam.fy, 1.0);
            let z = offset / n.dot(&dir);
            let z = if noise > 0.0 {
                z + noise * gaussian(&mut rng)
            } else {
                z
            };
            data[j * cam.width + i] = z.max(1e-3);
        }
    }
    DepthImage::from_meters(cam.width, cam.height, data).unwrap()
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller; keeps the oracle free of the production noise path.
    let u1: f64 = rng.gen_range(1e-12..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn fals_vs_oracle_angles(noise: f64) -> Vec<f64> {
    let cam = CameraIntrinsics::new(28.0, 28.0, 12.5, 9.5, 26, 20).unwrap();
    let pre = fals_precompute(&cam, 5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut angles = Vec::new();
    let mut windows = 0usize;
    for plane_idx in 0..12 {
        let n = Vector3::new(rng.gen_range(-0.45..0.45), rng.gen_range(-0.45..0.45), 1.0)
            .normalize();
        let offset = rng.gen_range(1.0..4.0);
        let depth = plane_depth(&cam, n, offset, noise, 300 + plane_idx);
        let grid = backproject(&depth, &cam).unwrap();
        let nm = fals_normals(&grid, &pre, false).unwrap();
        for y in 2..cam.height - 2 {
            for x in 2..cam.width - 2 {
                if !nm.is_valid(x, y) {
                    continue;
                }
                let mut pts = Vec::with_capacity(25);
                for wy in y - 2..=y + 2 {
                    for wx in x - 2..=x + 2 {
                        assert!(grid.is_valid(wx, wy));
                        pts.push(grid.at(wx, wy));
                    }
                }
                windows += 1;
                let oracle = svd_tls_normal(&pts, &pre.ray(x, y));
                let angle = nm
                    .at(x, y)
                    .dot(&oracle)
                    .clamp(-1.0, 1.0)
                    .acos()
                    .to_degrees();
                angles.push(angle);
            }
        }
    }
    assert!(windows >= 100, "only {windows} windows sampled");
    angles
}

#[test]
fn criterion_2_fals_matches_svd_oracle() {
    let clean = fals_vs_oracle_angles(0.0);
    let max_clean = clean.iter().copied().fold(0.0f64, f64::max);
    assert!(max_clean < 0.5, "noiseless disagreement {max_clean} deg");

    let mut noisy = fals_vs_oracle_angles(0.01);
    noisy.sort_by(|a, b| a.total_cmp(b));
    let median = noisy[noisy.len() / 2];
    assert!(median < 2.0, "noisy median disagreement {median} deg");
    println!(
        "ACCEPTANCE 2 fals-vs-svd: {} windows, noiseless max {:.3} deg, noisy median {:.3} deg -> pass",
        clean.len(),
        max_clean,
        median
    );
}

// ----------------------------------------------------------- criterion 3

/// Textbook double-loop zero-mean NCC oracle.
fn ncc_brute_force(image: &GrayImage, t: &Template, floor: f64) -> FloatMap {
    let (w, h, ts) = (image.width, image.height, t.size);
    let n = (ts * ts) as f64;
    let t_mean = t.pixels.iter().map(|&p| f64::from(p)).sum::<f64>() / n;
    let mut out = FloatMap::zeros(w, h);
    for y0 in 0..=(h - ts) {
        for x0 in 0..=(w - ts) {
            let mut p_mean = 0.0;
            for v in 0..ts {
                for u in 0..ts {
                    p_mean += f64::from(image.at(x0 + u, y0 + v));
                }
            }
            p_mean /= n;
            let (mut num, mut pv, mut tv) = (0.0, 0.0, 0.0);
            for v in 0..ts {
                for u in 0..ts {
                    let a = f64::from(image.at(x0 + u, y0 + v)) - p_mean;
                    let b = f64::from(t.pixels[v * ts + u]) - t_mean;
                    num += a * b;
                    pv += a * a;
                    tv += b * b;
                }
            }
            let s = if pv <= 0.0 || tv <= 0.0 {
                0.0
            } else {
                (num / (pv * tv).sqrt()).max(floor)
            };
            out.set(x0 + ts / 2, y0 + ts / 2, s);
        }
    }
    out
}

#[test]
fn criterion_3_ncc_equals_brute_force() {
    let cfg = Config::default();
    let template = make_template(cfg.template_size, cfg.theta_left(), cfg.stripe_width, Side::Left)
        .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut max_diff = 0.0f64;
    for _ in 0..20 {
        let img = GrayImage::new(64, 64, (0..64 * 64).map(|_| rng.gen()).collect()).unwrap();
        let fast = ncc_match(&img, &template, cfg.ncc_floor).unwrap();
        let slow = ncc_brute_force(&img, &template, cfg.ncc_floor);
        for k in 0..fast.data.len() {
            max_diff = max_diff.max((fast.data[k] - slow.data[k]).abs());
        }
    }
    assert!(max_diff < 1e-6, "matcher diverges from oracle by {max_diff}");

    // Intensity gain/offset invariance: I -> 2*I + 31 without clipping.
    let mut gain_diff = 0.0f64;
    for _ in 0..5 {
        let base =
            GrayImage::new(64, 64, (0..64 * 64).map(|_| rng.gen_range(0..=112)).collect()).unwrap();
        let scaled =
            GrayImage::new(64, 64, base.data.iter().map(|&p| p * 2 + 31).collect()).unwrap();
        let a = ncc_match(&base, &template, cfg.ncc_floor).unwrap();
        let b = ncc_match(&scaled, &template, cfg.ncc_floor).unwrap();
        for k in 0..a.data.len() {
            gain_diff = gain_diff.max((a.data[k] - b.data[k]).abs());
        }
    }
    assert!(gain_diff < 1e-6, "gain/offset invariance violated by {gain_diff}");
    println!(
        "ACCEPTANCE 3 ncc-brute-force: 20 images max |diff| {:.2e}, gain/offset max |diff| {:.2e} -> pass",
        max_diff, gain_diff
    );
}

// ----------------------------------------------------------- criterion 4

#[test]
fn criterion_4_geometric_map_and_fusion_branches() {
    let cfg = Config::default();

    // Three hand-evaluated geometric map cases.
    let mk_normals = |n: Option<Vector3<f64>>, w: usize, h: usize| lanemark::preprocess::NormalMap {
        width: w,
        height: h,
        normals: vec![n.unwrap_or_else(Vector3::zeros); w * h],
        valid: vec![n.is_some(); w * h],
    };
    let d1 = DepthImage::from_meters(1, 1, vec![20.0]).unwrap();
    let g1 = geom_map(&mk_normals(Some(Vector3::new(0.0, 1.0, 0.0)), 1, 1), &d1, &cfg).unwrap();
    assert!((g1.at(0, 0) - 0.5).abs() < 1e-12);

    let h = 48;
    let d2 = DepthImage::from_meters(1, h, vec![0.0; h]).unwrap();
    let g2 = geom_map(&mk_normals(None, 1, h), &d2, &cfg).unwrap();
    let expected = 0.1 * (h as f64 - 1.0) / h as f64;
    assert!((g2.at(0, h - 1) - expected).abs() < 1e-12);

    let d3 = DepthImage::from_meters(1, 1, vec![10.0]).unwrap();
    let g3 = geom_map(&mk_normals(Some(Vector3::new(1.0, 0.0, 0.0)), 1, 1), &d3, &cfg).unwrap();
    assert!((g3.at(0, 0) - 0.05).abs() < 1e-12);

    // Pass-through branch is bit-exact wherever M < tau_G.
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let m = FloatMap::new(64, 48, (0..64 * 48).map(|_| rng.gen::<f64>()).collect()).unwrap();
    let g = FloatMap::new(64, 48, (0..64 * 48).map(|_| rng.gen::<f64>() * 0.5).collect()).unwrap();
    let r = fuse(&m, &g, cfg.tau_g).unwrap();
    let mut pass_through = 0;
    for k in 0..m.data.len() {
        if m.data[k] < cfg.tau_g {
            assert_eq!(r.data[k].to_bits(), m.data[k].to_bits());
            pass_through += 1;
        } else {
            assert_eq!(r.data[k], m.data[k] + g.data[k]);
        }
    }
    assert!(pass_through > 1000);
    println!(
        "ACCEPTANCE 4 geom-fusion-branches: 3 hand cases exact, {pass_through} pass-through pixels bit-exact -> pass"
    );
}

// ----------------------------------------------------------- criterion 5

#[test]
fn criterion_5_detection_quality() {
    let started = Instant::now();
    let cfg = Config::default();

    let clean = evaluate(clean_results(), clean_dataset(), cfg.tol_px, cfg.tol_deg).unwrap();
    assert!(
        clean.true_positive_rate >= 0.85,
        "clean TP {:.3}",
        clean.true_positive_rate
    );
    assert!(
        clean.false_positive_rate <= 0.05,
        "clean FP {:.3}",
        clean.false_positive_rate
    );

    let fog = evaluate(fog_results(), fog_dataset(), cfg.tol_px, cfg.tol_deg).unwrap();
    assert!(fog.true_positive_rate >= 0.75, "fog TP {:.3}", fog.true_positive_rate);
    assert!(fog.false_positive_rate <= 0.06, "fog FP {:.3}", fog.false_positive_rate);

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 300.0, "took {elapsed:?}");
    println!(
        "ACCEPTANCE 5 detection-quality: clean TP {:.3} FP {:.3}; fog TP {:.3} FP {:.3}; {:.0} s -> pass",
        clean.true_positive_rate,
        clean.false_positive_rate,
        fog.true_positive_rate,
        fog.false_positive_rate,
        elapsed.as_secs_f64()
    );
}

// ----------------------------------------------------------- criterion 6

#[test]
fn criterion_6_obstacle_suppression() {
    let dataset = obstacle_dataset();
    let cfg = Config::default();
    let manifest = lanemark::imgcore::Manifest::load(dataset).unwrap();
    let mut detector = Detector::new(cfg.clone(), manifest.intrinsics.clone()).unwrap();
    let mut results = Vec::new();
    let mut suppressed = 0usize;
    let mut frames_with_masks = 0usize;
    for index in 0..manifest.frames {
        let paths = FramePaths::new(dataset, index);
        let frame = paths.load_frame().unwrap();
        let maps = detector.respond_maps_for(&frame).unwrap();
        let (_, _, marker) = load_mask(&paths.mask).unwrap();
        let (_, _, obstacle) = load_mask(&paths.obstacle).unwrap();
        // Per-pixel lane evidence: the stronger of the two fused maps.
        let mean_over = |mask: &[bool]| {
            let mut sum = 0.0;
            let mut count = 0usize;
            for (k, &m) in mask.iter().enumerate() {
                if m {
                    sum += maps.left.data[k].max(maps.right.data[k]);
                    count += 1;
                }
            }
            (count > 0).then(|| sum / count as f64)
        };
        if let (Some(obst_mean), Some(marker_mean)) = (mean_over(&obstacle), mean_over(&marker)) {
            frames_with_masks += 1;
            if obst_mean < marker_mean {
                suppressed += 1;
            }
        }
        results.push(detector.process(index, &frame).unwrap());
    }
    assert_eq!(frames_with_masks, manifest.frames);
    let fraction = suppressed as f64 / frames_with_masks as f64;
    assert!(fraction >= 0.95, "suppression on only {fraction:.3} of frames");

    let report = evaluate(&results, dataset, cfg.tol_px, cfg.tol_deg).unwrap();
    assert!(
        report.false_positive_rate <= 0.08,
        "obstacle FP {:.3}",
        report.false_positive_rate
    );
    println!(
        "ACCEPTANCE 6 obstacle-suppression: mean R(obstacle) < mean R(marker) on {:.1}% of {} frames, FP {:.3} -> pass",
        fraction * 100.0,
        frames_with_masks,
        report.false_positive_rate
    );
}

// ----------------------------------------------------------- criterion 7

#[test]
fn criterion_7_per_frame_latency_and_stage_shares() {
    let dataset = clean_dataset();
    let manifest = lanemark::imgcore::Manifest::load(dataset).unwrap();
    let cfg = Config::default();
    let mut detector = Detector::new(cfg, manifest.intrinsics.clone()).unwrap();
    let frames: Vec<_> = (0..24)
        .map(|i| FramePaths::new(dataset, i).load_frame().unwrap())
        .collect();
    // Warm-up.
    for (i, frame) in frames.iter().take(3).enumerate() {
        detector.process(i, frame).unwrap();
    }
    // Three timed batches; the fastest mean damps scheduler noise.
    let mut batch_means = Vec::new();
    let mut results = Vec::new();
    for batch in 0..3 {
        let t0 = Instant::now();
        for (k, frame) in frames.iter().skip(3 + batch * 7).take(7).enumerate() {
            results.push(detector.process(3 + batch * 7 + k, frame).unwrap());
        }
        batch_means.push(t0.elapsed().as_secs_f64() * 1e3 / 7.0);
    }
    let best = batch_means.iter().copied().fold(f64::INFINITY, f64::min);
    assert!(best <= 100.0, "per-frame wall time {best:.1} ms");

    let stats = stage_stats(&results);
    let share = |name: &str| stats.iter().find(|s| s.name == name).unwrap().share;
    // Template matching and fusion together form the respond-map
    // computation; preprocessing plus respond-map computation must
    // dominate the frame budget.
    let respond_map_share = share("matching") + share("respond");
    let combined = share("preprocess") + respond_map_share;
    assert!(
        combined >= 0.70,
        "preprocess {:.2} + respond-map {:.2} = {combined:.2}",
        share("preprocess"),
        respond_map_share
    );
    println!(
        "ACCEPTANCE 7 latency: best batch {best:.1} ms/frame (640x480, single-threaded); \
         preprocess {:.1}% + respond-map (matching {:.1}% + fusion {:.1}%) = {:.1}% >= 70% -> pass",
        share("preprocess") * 100.0,
        share("matching") * 100.0,
        share("respond") * 100.0,
        combined * 100.0
    );
}

// ----------------------------------------------------------- criterion 8

#[test]
fn criterion_8_enhancement_properties() {
    // PCA rotation equivariance within 1e-6.
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let mut max_dev = 0.0f64;
    for _ in 0..20 {
        let pts: Vec<(f64, f64)> = (0..50)
            .map(|_| (rng.gen::<f64>() * 12.0, rng.gen::<f64>() * 4.0))
            .collect();
        let phi: f64 = rng.gen_range(0.1..3.0);
        let rotated: Vec<(f64, f64)> = pts
            .iter()
            .map(|&(x, y)| (x * phi.cos() - y * phi.sin(), x * phi.sin() + y * phi.cos()))
            .collect();
        let a = pca_angle_of_points(&pts, 0.0).unwrap();
        let b = pca_angle_of_points(&rotated, 0.0).unwrap();
        let diff = (b - a - phi).rem_euclid(std::f64::consts::PI);
        max_dev = max_dev.max(diff.min(std::f64::consts::PI - diff));
    }
    assert!(max_dev < 1e-6, "equivariance deviation {max_dev}");

    // Termination bound across the full acceptance runs.
    let cap = ((640f64.hypot(480.0)) / 5.0).ceil() as usize;
    let longest = clean_results()
        .iter()
        .chain(fog_results())
        .flat_map(|r| [&r.left_chain, &r.right_chain])
        .flatten()
        .map(|c| c.centers.len())
        .max()
        .unwrap();
    assert!(longest <= 2 * cap + 1, "chain length {longest} exceeds bound");

    // Angle feedback fixed point on a repeated identical frame.
    let (frame, _) = lanemark::synthgen::render_frame(
        &SceneSpec::desk_default(99),
        &lanemark::synthgen::VehiclePose::at_rest(0),
    );
    let mut detector = Detector::new(Config::default(), default_cam()).unwrap();
    let r1 = detector.process(0, &frame).unwrap();
    let r2 = detector.process(1, &frame).unwrap();
    assert_eq!(r1.status, Status::Detected);
    let drift = (r2.refined_theta - r1.refined_theta).abs().to_degrees();
    assert!(drift < 1.0, "theta drift {drift} deg");
    println!(
        "ACCEPTANCE 8 enhancement: pca equivariance {max_dev:.2e}, longest chain {longest} <= {}, theta drift {drift:.3} deg -> pass",
        2 * cap + 1
    );
}

// ----------------------------------------------------------- criterion 9

#[test]
fn criterion_9_detect_runs_are_byte_identical() {
    let dir = fixture_dir("determinism", &SceneSpec::desk_default(44), 40);
    let cfg = Config::default();
    let out_a = dir.join("a.results.txt");
    let out_b = dir.join("b.results.txt");
    let results_a = run_pipeline(&dir, &cfg).unwrap();
    lanemark::harness::write_results(&results_a, &out_a).unwrap();
    let results_b = run_pipeline(&dir, &cfg).unwrap();
    lanemark::harness::write_results(&results_b, &out_b).unwrap();
    let bytes_a = std::fs::read(&out_a).unwrap();
    let bytes_b = std::fs::read(&out_b).unwrap();
    assert_eq!(bytes_a, bytes_b, "detect runs differ");
    let detected = results_a
        .iter()
        .filter(|r| r.status == Status::Detected)
        .count();
    assert!(detected > 0, "determinism check needs detections");
    println!(
        "ACCEPTANCE 9 determinism: two detect runs over 40 frames byte-identical ({} bytes, {detected} detected) -> pass",
        bytes_a.len()
    );
}

// Shared-fixture sanity: the ground truth planes written by the generator
// agree with the analytic scene plane.
#[test]
fn ground_truth_plane_files_match_scene() {
    let dataset = clean_dataset();
    let spec = SceneSpec::desk_default(41);
    let expected = spec.ground_plane();
    let plane = Plane3::load(FramePaths::new(dataset, 0).plane).unwrap();
    // acos of a unit dot product bottoms out around 1e-8 even for equal
    // vectors; 1e-5 degrees still proves the file carries the exact plane.
    assert!(plane.normal_angle_deg(&expected) < 1e-5);
}

// Evaluation self-checks used by the criteria above: oracle-fed detections
// score TP 1.0 / FP 0.0, and a fully skipped run scores 0 / 0.
#[test]
fn evaluate_oracle_fed_bounds() {
    let dir = fixture_dir("eval-bounds", &SceneSpec::desk_default(45), 2);
    let manifest = lanemark::imgcore::Manifest::load(&dir).unwrap();
    let mut results = Vec::new();
    for index in 0..manifest.frames {
        let paths = FramePaths::new(&dir, index);
        let (w, _, mask) = load_mask(&paths.mask).unwrap();
        let truth = Plane3::load(&paths.plane).unwrap();
        let centers: Vec<(f64, f64)> = mask
            .iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .step_by(97)
            .map(|(k, _)| ((k % w) as f64, (k / w) as f64))
            .take(24)
            .collect();
        assert!(centers.len() >= 8);
        let chain = |side| lanemark::enhance::MarkerChain {
            side,
            centers: centers.clone(),
            theta: 1.9,
        };
        results.push(DetectionResult {
            frame_index: index,
            status: Status::Detected,
            left_chain: Some(chain(Side::Left)),
            right_chain: Some(chain(Side::Right)),
            plane: Some(lanemark::lanefit::LanePlane {
                plane: truth,
                source_pixels: [centers[0], centers[1], centers[2]],
            }),
            timings: Default::default(),
            refined_theta: 1.9,
        });
    }
    let report = evaluate(&results, &dir, 5.0, 5.0).unwrap();
    assert_eq!(report.true_positive_rate, 1.0);
    assert_eq!(report.false_positive_rate, 0.0);
    assert!(report
        .per_frame
        .iter()
        .all(|v| v.verdict == Verdict::TruePositive));

    // All-skipped results: both rates zero over the full denominator.
    let skipped: Vec<DetectionResult> = (0..manifest.frames)
        .map(|index| DetectionResult {
            frame_index: index,
            status: Status::Skipped(lanemark::harness::SkipReason::NoPeak),
            left_chain: None,
            right_chain: None,
            plane: None,
            timings: Default::default(),
            refined_theta: 0.0,
        })
        .collect();
    let report = evaluate(&skipped, &dir, 5.0, 5.0).unwrap();
    assert_eq!(report.true_positive_rate, 0.0);
    assert_eq!(report.false_positive_rate, 0.0);
}
