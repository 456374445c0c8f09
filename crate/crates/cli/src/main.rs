//! `rangeseg`: command-line driver for multi-range LiDAR range-view
//! segmentation experiments.

mod config;
mod frames;
mod pipeline;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use config::{PipelineConfig, PostMethod};

#[derive(Parser, Debug)]
#[command(name = "rangeseg", version, about = "Multi-range LiDAR range-view segmentation toolkit")]
struct Cli {
    /// Pipeline config file (TOML).
    #[arg(long, global = true, env = "FLARES_CONFIG")]
    config: Option<PathBuf>,
    /// Worker threads for per-frame processing; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

/// Flags overriding config values.
#[derive(Args, Debug, Clone, Default)]
struct Overrides {
    /// Range image height H.
    #[arg(long)]
    height: Option<usize>,
    /// Range image width W.
    #[arg(long)]
    width: Option<usize>,
    /// Number of sub-clouds N.
    #[arg(long)]
    subclouds: Option<usize>,
    /// Post-processor.
    #[arg(long, value_enum)]
    post: Option<PostMethod>,
    /// Post-processing window size (odd).
    #[arg(long)]
    kernel: Option<usize>,
    /// NNRI cut-off factor.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Sensor preset (semantickitti, nuscenes) or sensor file.
    #[arg(long)]
    sensor: Option<String>,
    /// Class map file.
    #[arg(long)]
    classes: Option<PathBuf>,
}

impl Overrides {
    fn apply(&self, cfg: &mut PipelineConfig) {
        let r = &mut cfg.rview;
        r.height = self.height.unwrap_or(r.height);
        r.width = self.width.unwrap_or(r.width);
        r.subclouds = self.subclouds.unwrap_or(r.subclouds);
        let p = &mut cfg.postproc;
        p.method = self.post.unwrap_or(p.method);
        p.kernel = self.kernel.unwrap_or(p.kernel);
        p.alpha = self.alpha.unwrap_or(p.alpha);
        cfg.seed = self.seed.unwrap_or(cfg.seed);
        if let Some(s) = &self.sensor {
            cfg.pcio.sensor = Some(s.clone());
        }
        if let Some(c) = &self.classes {
            cfg.pcio.class_map = Some(c.clone());
        }
    }
}

/// Point files or directories of them, plus where to find labels.
#[derive(Args, Debug, Clone)]
struct Inputs {
    /// Point files (.bin) or directories.
    #[arg(long, required = true, num_args = 1..)]
    input: Vec<PathBuf>,
    /// Directory holding `<frame>.label`; defaults to the frame's directory
    /// or a sibling `labels/` directory.
    #[arg(long)]
    labels: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Project frames into N range images (`<frame>.rimg`).
    Project {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        out_dir: PathBuf,
        #[command(flatten)]
        o: Overrides,
    },
    /// Split frames into N interleaved sub-clouds (`<frame>.sub<i>.bin`).
    Split {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        out_dir: PathBuf,
        #[command(flatten)]
        o: Overrides,
    },
    /// Paste-drop, geometric augmentation and multi-cloud fusion.
    Augment {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        out_dir: PathBuf,
        #[command(flatten)]
        o: Overrides,
    },
    /// Ray-cast labeled synthetic frames.
    Synth {
        /// Number of frames; frame i uses scene seed `seed + i`.
        #[arg(long)]
        frames: Option<usize>,
        #[arg(long)]
        out_dir: PathBuf,
        #[command(flatten)]
        o: Overrides,
    },
    /// Score volumes from ground-truth labels (`<frame>.svol`).
    MockPredict {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        out_dir: PathBuf,
        /// Label corruption probability.
        #[arg(long)]
        noise: Option<f64>,
        #[arg(long)]
        temperature: Option<f64>,
        #[command(flatten)]
        o: Overrides,
    },
    /// Per-point labels from score volumes (`<frame>.label`).
    Postprocess {
        /// Point files (.bin) or directories.
        #[arg(long, required = true, num_args = 1..)]
        input: Vec<PathBuf>,
        /// Directory holding `<frame>.svol`.
        #[arg(long)]
        scores: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        #[command(flatten)]
        o: Overrides,
    },
    /// IoU and accuracy of predicted against ground-truth label files.
    Eval {
        #[arg(long, required = true, num_args = 1..)]
        pred: Vec<PathBuf>,
        #[arg(long, required = true, num_args = 1..)]
        gt: Vec<PathBuf>,
        /// Also write the scores as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        o: Overrides,
    },
    /// Projection validity over a grid of resolutions, as CSV.
    Stats {
        /// Point files (.bin) or directories.
        #[arg(long, required = true, num_args = 1..)]
        input: Vec<PathBuf>,
        #[arg(long, value_delimiter = ',', default_values_t = [32, 64])]
        height: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = [512, 1024, 2048])]
        width: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_values_t = [1])]
        subclouds: Vec<usize>,
        /// Sensor preset or sensor file.
        #[arg(long)]
        sensor: Option<String>,
        /// CSV destination; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time projection and post-processing on one frame.
    Bench {
        /// Point file; a synthetic scene is used when absent.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        labels: Option<PathBuf>,
        #[arg(long, default_value_t = rangeseg::metrics::DEFAULT_WARMUP)]
        warmup: usize,
        #[arg(long, default_value_t = rangeseg::metrics::DEFAULT_MEASURED)]
        measured: usize,
        /// CSV destination; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        o: Overrides,
    },
}

fn load_config(path: Option<&PathBuf>, o: Option<&Overrides>) -> Result<PipelineConfig> {
    let mut cfg = match path {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    if let Some(o) = o {
        o.apply(&mut cfg);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<()> {
    let jobs = cli.jobs;
    let config = cli.config.as_ref();
    match cli.command {
        Command::Project { inputs, out_dir, o } => {
            let cfg = load_config(config, Some(&o))?;
            pipeline::project(&cfg, jobs, &inputs.input, inputs.labels.as_deref(), &out_dir)
        }
        Command::Split { inputs, out_dir, o } => {
            let cfg = load_config(config, Some(&o))?;
            pipeline::split(&cfg, jobs, &inputs.input, inputs.labels.as_deref(), &out_dir)
        }
        Command::Augment { inputs, out_dir, o } => {
            let cfg = load_config(config, Some(&o))?;
            pipeline::augment(&cfg, jobs, &inputs.input, inputs.labels.as_deref(), &out_dir)
        }
        Command::Synth { frames, out_dir, o } => {
            let cfg = load_config(config, Some(&o))?;
            pipeline::synth(&cfg, jobs, frames.unwrap_or(cfg.synth.frames), &out_dir)
        }
        Command::MockPredict { inputs, out_dir, noise, temperature, o } => {
            let mut cfg = load_config(config, Some(&o))?;
            cfg.mock.noise_rate = noise.unwrap_or(cfg.mock.noise_rate);
            cfg.mock.temperature = temperature.unwrap_or(cfg.mock.temperature);
            cfg.validate()?;
            pipeline::mock_predict(&cfg, jobs, &inputs.input, inputs.labels.as_deref(), &out_dir)
        }
        Command::Postprocess { input, scores, out_dir, o } => {
            let cfg = load_config(config, Some(&o))?;
            pipeline::postprocess(&cfg, jobs, &input, &scores, &out_dir)
        }
        Command::Eval { pred, gt, csv, o } => {
            let cfg = load_config(config, Some(&o))?;
            report::eval(&cfg, jobs, &pred, &gt, csv.as_deref())
        }
        Command::Stats { input, height, width, subclouds, sensor, out } => {
            let mut cfg = load_config(config, None)?;
            if sensor.is_some() {
                cfg.pcio.sensor = sensor;
            }
            let spec = cfg.sensor()?;
            report::stats(&spec, jobs, &input, &height, &width, &subclouds, out.as_deref())
        }
        Command::Bench { input, labels, warmup, measured, out, o } => {
            let cfg = load_config(config, Some(&o))?;
            anyhow::ensure!(measured > 0, "metrics: need at least one measured iteration");
            report::bench(&cfg, input.as_deref(), labels.as_deref(), warmup, measured, out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
