//! Pipeline configuration file: TOML with one table per library module.
//! Relative paths resolve against the file's directory.

use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use clap::ValueEnum;
use serde::Deserialize;

use rangeseg::augment::{GdaParams, WpdConfig};
use rangeseg::pcio::{ClassMap, PointCloud, SensorSpec};
use rangeseg::postproc::{KnnParams, NnriParams};
use rangeseg::synth::{synthetic_class_map, MockPredictorConfig, SceneSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum PostMethod {
    Nnri,
    /// Single-range KNN on each point's own sub-cloud image.
    Knn,
    KnnMulti,
    Nla,
}

impl PostMethod {
    pub fn name(self) -> &'static str {
        match self {
            PostMethod::Nnri => "nnri",
            PostMethod::Knn => "knn",
            PostMethod::KnnMulti => "knn-multi",
            PostMethod::Nla => "nla",
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PcioSection {
    /// Preset name (`semantickitti`, `nuscenes`) or sensor file path.
    pub sensor: Option<String>,
    pub class_map: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RviewSection {
    pub height: usize,
    pub width: usize,
    pub subclouds: usize,
}

impl Default for RviewSection {
    fn default() -> Self {
        RviewSection { height: 64, width: 2048, subclouds: rangeseg::rview::DEFAULT_SUBCLOUDS }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PostprocSection {
    pub method: PostMethod,
    pub kernel: usize,
    pub alpha: f64,
    pub r_mean: Option<f64>,
    pub r_std: Option<f64>,
    pub votes: usize,
    pub cutoff: f64,
    /// Gaussian vote width; 0 casts unit votes.
    pub sigma: f64,
}

impl Default for PostprocSection {
    fn default() -> Self {
        let knn = KnnParams::default();
        PostprocSection {
            method: PostMethod::Nnri,
            kernel: 3,
            alpha: 1.0,
            r_mean: None,
            r_std: None,
            votes: knn.votes,
            cutoff: knn.cutoff,
            sigma: knn.sigma.unwrap_or(0.0),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AugmentSection {
    pub threshold: f64,
    pub sample_frames: usize,
    pub per_point: bool,
    /// Paste-source frames; empty means the input frames themselves.
    pub pool: Vec<PathBuf>,
    pub flip_x: bool,
    pub translate: [[f64; 2]; 3],
    pub rotate_deg: [[f64; 2]; 3],
    pub probability: f64,
    pub clean_unlabeled: bool,
}

impl Default for AugmentSection {
    fn default() -> Self {
        let g = GdaParams::default();
        AugmentSection {
            threshold: rangeseg::augment::DEFAULT_THRESHOLD,
            sample_frames: rangeseg::augment::DEFAULT_SAMPLE_FRAMES,
            per_point: false,
            pool: Vec::new(),
            flip_x: g.flip_x,
            translate: g.translate.map(|(a, b)| [a, b]),
            rotate_deg: g.rotate_deg.map(|(a, b)| [a, b]),
            probability: g.probability,
            clean_unlabeled: true,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MockSection {
    pub noise_rate: f64,
    pub temperature: f64,
}

impl Default for MockSection {
    fn default() -> Self {
        MockSection { noise_rate: 0.0, temperature: 1.0 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthSection {
    pub frames: usize,
    pub extent: f64,
    pub vehicles: usize,
    pub poles: usize,
    pub signs: usize,
    pub pedestrians: usize,
    pub sensor_height: f64,
    pub beams: usize,
    pub azimuth_steps: usize,
}

impl Default for SynthSection {
    fn default() -> Self {
        let s = SceneSpec::default();
        SynthSection {
            frames: 1,
            extent: s.extent,
            vehicles: s.vehicles,
            poles: s.poles,
            signs: s.signs,
            pedestrians: s.pedestrians,
            sensor_height: s.sensor_height,
            beams: s.beams,
            azimuth_steps: s.azimuth_steps,
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    pub pcio: PcioSection,
    pub rview: RviewSection,
    pub postproc: PostprocSection,
    pub augment: AugmentSection,
    pub mock: MockSection,
    pub synth: SynthSection,
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("config: reading {}", path.display()))?;
        let mut cfg: PipelineConfig =
            toml::from_str(&text).with_context(|| format!("config: parsing {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        if let Some(map) = &cfg.pcio.class_map {
            cfg.pcio.class_map = Some(resolve(base, map));
        }
        if let Some(sensor) = &cfg.pcio.sensor {
            if SensorSpec::preset(sensor).is_none() {
                cfg.pcio.sensor = Some(resolve(base, Path::new(sensor)).display().to_string());
            }
        }
        cfg.augment.pool = cfg.augment.pool.iter().map(|p| resolve(base, p)).collect();
        Ok(cfg)
    }

    /// Checks referenced files and every module's parameter invariants.
    pub fn validate(&self) -> Result<()> {
        if let Some(map) = &self.pcio.class_map {
            ensure!(map.is_file(), "config: class map {} does not exist", map.display());
        }
        for p in &self.augment.pool {
            ensure!(p.is_file(), "config: pool frame {} does not exist", p.display());
        }
        let r = &self.rview;
        ensure!(r.height > 0 && r.width > 0, "rview: image size must be at least 1x1");
        ensure!(r.subclouds > 0, "rview: subclouds must be >= 1");
        self.nnri().validate().context("postproc")?;
        if self.postproc.method != PostMethod::Nnri {
            self.knn().validate().context("postproc")?;
        }
        self.gda().validate().context("augment")?;
        let m = &self.mock;
        ensure!((0.0..=1.0).contains(&m.noise_rate), "synth: noise_rate {} outside [0, 1]", m.noise_rate);
        ensure!(m.temperature > 0.0, "synth: temperature must be positive");
        Ok(())
    }

    pub fn sensor(&self) -> Result<SensorSpec> {
        match &self.pcio.sensor {
            None => Ok(SensorSpec::semantic_kitti()),
            Some(name) => match SensorSpec::preset(name) {
                Some(spec) => Ok(spec),
                None => SensorSpec::load(name).with_context(|| format!("pcio: sensor spec {name}")),
            },
        }
    }

    /// The configured class map, or the synthetic scene map when none is set.
    pub fn class_map(&self) -> Result<ClassMap> {
        match &self.pcio.class_map {
            None => Ok(synthetic_class_map()),
            Some(p) => ClassMap::load(p).with_context(|| format!("pcio: class map {}", p.display())),
        }
    }

    pub fn nnri(&self) -> NnriParams {
        let p = &self.postproc;
        NnriParams { kernel: p.kernel, alpha: p.alpha, r_mean: p.r_mean, r_std: p.r_std }
    }

    pub fn knn(&self) -> KnnParams {
        let p = &self.postproc;
        KnnParams {
            kernel: p.kernel,
            votes: p.votes,
            cutoff: p.cutoff,
            sigma: (p.sigma > 0.0).then_some(p.sigma),
        }
    }

    pub fn gda(&self) -> GdaParams {
        let a = &self.augment;
        GdaParams {
            flip_x: a.flip_x,
            translate: a.translate.map(|[lo, hi]| (lo, hi)),
            rotate_deg: a.rotate_deg.map(|[lo, hi]| (lo, hi)),
            probability: a.probability,
        }
    }

    pub fn wpd(&self, map: &ClassMap, pool: Vec<PointCloud>) -> WpdConfig {
        let a = &self.augment;
        WpdConfig {
            threshold: a.threshold,
            sample_frames: a.sample_frames,
            per_point: a.per_point,
            ..WpdConfig::from_class_map(map, pool)
        }
    }

    pub fn mock(&self, seed: u64) -> MockPredictorConfig {
        MockPredictorConfig { noise_rate: self.mock.noise_rate, temperature: self.mock.temperature, seed }
    }

    pub fn scene(&self, seed: u64) -> Result<SceneSpec> {
        let s = &self.synth;
        let spec = SceneSpec {
            seed,
            extent: s.extent,
            vehicles: s.vehicles,
            poles: s.poles,
            signs: s.signs,
            pedestrians: s.pedestrians,
            sensor: self.sensor()?,
            sensor_height: s.sensor_height,
            beams: s.beams,
            azimuth_steps: s.azimuth_steps,
        };
        if spec.beams == 0 || spec.azimuth_steps == 0 {
            bail!("synth: ray grid must be at least 1x1");
        }
        Ok(spec)
    }
}
