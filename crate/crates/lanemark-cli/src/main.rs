//! Command-line front end for the lane marker detection pipeline.
//!
//! Verbs: `generate` renders a synthetic dataset, `detect` runs the
//! pipeline and writes a results file (plus optional overlay images),
//! `eval` scores detections against ground truth, `bench` reports
//! per-stage timings. Exit codes: 0 success, 1 input/config errors,
//! 2 I/O errors.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use lanemark::harness::{
    bench_report, evaluate, run_pipeline_with, render_overlay, write_results, Status, Verdict,
};
use lanemark::imgcore::{frame_stem, save_gray, Config, FramePaths};
use lanemark::synthgen::{make_dataset, SceneSpec};

#[derive(Parser)]
#[command(name = "lanemark", about = "RGB-D lane marker detection toolbench", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    /// Baseline scene: solid markers, light sensor noise.
    Clean,
    /// Fog plus heavier gray noise.
    Fog,
    /// Baseline plus a box obstacle in the lane.
    Obstacle,
}

#[derive(Subcommand)]
enum Command {
    /// Render a synthetic RGB-D dataset with ground truth.
    Generate {
        /// Output dataset directory.
        #[arg(long)]
        out: PathBuf,
        /// Number of frames to render.
        #[arg(long, default_value_t = 200)]
        frames: usize,
        /// Scene random seed.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Scene preset.
        #[arg(long, value_enum, default_value_t = Preset::Clean)]
        preset: Preset,
    },
    /// Run the detection pipeline over a dataset.
    Detect {
        /// Dataset directory.
        dataset: PathBuf,
        /// Config file (`key = value` lines); defaults apply when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory for results.txt and overlays.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Write per-frame overlay PGMs with chains and peaks marked.
        #[arg(long)]
        overlay: bool,
        /// Keep template angles fixed at their configured values.
        #[arg(long)]
        no_feedback: bool,
    },
    /// Run the pipeline and score it against the dataset's ground truth.
    Eval {
        dataset: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        no_feedback: bool,
    },
    /// Run the pipeline and print the per-stage timing report.
    Bench {
        dataset: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn load_config(path: &Option<PathBuf>) -> lanemark::Result<Config> {
    match path {
        Some(p) => Config::from_file(p),
        None => Ok(Config::default()),
    }
}

fn run(cli: Cli) -> lanemark::Result<()> {
    match cli.command {
        Command::Generate {
            out,
            frames,
            seed,
            preset,
        } => {
            let spec = match preset {
                Preset::Clean => SceneSpec::desk_default(seed),
                Preset::Fog => SceneSpec::fog_variant(seed),
                Preset::Obstacle => SceneSpec::obstacle_variant(seed),
            };
            let manifest = make_dataset(&spec, frames, &out)?;
            println!(
                "wrote {} frames ({}x{}) to {}",
                manifest.frames,
                manifest.intrinsics.width,
                manifest.intrinsics.height,
                out.display()
            );
        }
        Command::Detect {
            dataset,
            config,
            out,
            overlay,
            no_feedback,
        } => {
            let cfg = load_config(&config)?;
            let results = run_pipeline_with(&dataset, &cfg, !no_feedback)?;
            std::fs::create_dir_all(&out)?;
            write_results(&results, out.join("results.txt"))?;
            if overlay {
                for r in &results {
                    let frame = FramePaths::new(&dataset, r.frame_index).load_frame()?;
                    let img = render_overlay(&frame.gray, r);
                    save_gray(&img, out.join(format!("{}.overlay.pgm", frame_stem(r.frame_index))))?;
                }
            }
            let detected = results
                .iter()
                .filter(|r| r.status == Status::Detected)
                .count();
            println!(
                "{detected}/{} frames detected; results in {}",
                results.len(),
                out.join("results.txt").display()
            );
        }
        Command::Eval {
            dataset,
            config,
            no_feedback,
        } => {
            let cfg = load_config(&config)?;
            let results = run_pipeline_with(&dataset, &cfg, !no_feedback)?;
            let report = evaluate(&results, &dataset, cfg.tol_px, cfg.tol_deg)?;
            let count = |f: &dyn Fn(&Verdict) -> bool| {
                report.per_frame.iter().filter(|v| f(&v.verdict)).count()
            };
            println!("frames: {}", report.frames);
            println!(
                "true positive rate:  {:.3} ({} frames)",
                report.true_positive_rate,
                count(&|v| matches!(v, Verdict::TruePositive))
            );
            println!(
                "false positive rate: {:.3} ({} frames)",
                report.false_positive_rate,
                count(&|v| matches!(v, Verdict::FalsePositive))
            );
            println!(
                "plane off tolerance: {}",
                count(&|v| matches!(v, Verdict::PlaneOff))
            );
            println!(
                "skipped:             {}",
                count(&|v| matches!(v, Verdict::Skipped(_)))
            );
            print!("{}", bench_report(&results));
        }
        Command::Bench { dataset, config } => {
            let cfg = load_config(&config)?;
            let results = run_pipeline_with(&dataset, &cfg, true)?;
            print!("{}", bench_report(&results));
        }
    }
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
