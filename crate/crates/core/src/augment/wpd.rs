use rand::seq::index;
use rand::Rng;

use crate::error::{Error, Result};
use crate::pcio::{ClassMap, PointCloud};

/// Weight boundary between paste (above) and drop (at or below) classes.
pub const DEFAULT_THRESHOLD: f64 = 0.1;
/// Pool frames sampled per call.
pub const DEFAULT_SAMPLE_FRAMES: usize = 6;

/// Weighted paste-drop settings.
#[derive(Debug, Clone, PartialEq)]
pub struct WpdConfig {
    /// Per-class weight in `[0, 1]`, used directly as paste or drop probability.
    pub weights: Vec<f64>,
    pub threshold: f64,
    pub sample_frames: usize,
    /// Draw paste/drop decisions per point instead of per class and frame.
    pub per_point: bool,
    /// Labeled source frames for pasting.
    pub pool: Vec<PointCloud>,
}

impl WpdConfig {
    /// Defaults with weights taken from the class map.
    pub fn from_class_map(map: &ClassMap, pool: Vec<PointCloud>) -> Self {
        WpdConfig {
            weights: map.wpd_weights(),
            threshold: DEFAULT_THRESHOLD,
            sample_frames: DEFAULT_SAMPLE_FRAMES,
            per_point: false,
            pool,
        }
    }

    pub fn is_paste_class(&self, class: usize) -> bool {
        self.weights[class] > self.threshold
    }

    fn validate(&self) -> Result<()> {
        if let Some(w) = self.weights.iter().find(|w| !(0.0..=1.0).contains(*w)) {
            return Err(Error::Config(format!("weight {w} outside [0, 1]")));
        }
        if !self.threshold.is_finite() {
            return Err(Error::Config("threshold must be finite".into()));
        }
        let any_paste = (0..self.weights.len()).any(|c| self.is_paste_class(c));
        if any_paste && self.pool.is_empty() {
            return Err(Error::Config("paste classes configured but the paste pool is empty".into()));
        }
        for (i, frame) in self.pool.iter().enumerate() {
            check_labels(frame, self.weights.len()).map_err(|e| Error::Config(format!("pool frame {i}: {e}")))?;
        }
        Ok(())
    }
}

fn check_labels(cloud: &PointCloud, classes: usize) -> Result<()> {
    let labels = cloud
        .labels
        .as_ref()
        .ok_or_else(|| Error::Param("cloud is not labeled".into()))?;
    if let Some(l) = labels.iter().find(|&&l| l as usize >= classes) {
        return Err(Error::Param(format!("label {l} has no weight ({classes} classes)")));
    }
    Ok(())
}

/// Weighted Paste-Drop in 3D.
///
/// Drop classes (weight <= threshold) are removed from `cloud` with
/// probability equal to their weight. Then `sample_frames` distinct pool
/// frames are drawn, and from each the points of every paste class
/// (weight above threshold) are copied verbatim with probability equal to the class
/// > weight. Surviving originals come first in their original order, pasted
/// > points follow in draw order.
pub fn wpd_plus<R: Rng>(cloud: &PointCloud, cfg: &WpdConfig, rng: &mut R) -> Result<PointCloud> {
    check_labels(cloud, cfg.weights.len())?;
    cfg.validate()?;
    let classes = cfg.weights.len();
    let labels = cloud.labels.as_ref().unwrap();

    let mut out = PointCloud::with_capacity(cloud.len(), true);
    if cfg.per_point {
        for (i, &l) in labels.iter().enumerate() {
            let w = cfg.weights[l as usize];
            let drop = !cfg.is_paste_class(l as usize) && w > 0.0 && rng.random_bool(w);
            if !drop {
                out.push_from(cloud, i);
            }
        }
    } else {
        let dropped: Vec<bool> = (0..classes)
            .map(|c| {
                let w = cfg.weights[c];
                !cfg.is_paste_class(c) && w > 0.0 && rng.random_bool(w)
            })
            .collect();
        for (i, &l) in labels.iter().enumerate() {
            if !dropped[l as usize] {
                out.push_from(cloud, i);
            }
        }
    }

    let paste: Vec<usize> = (0..classes).filter(|&c| cfg.is_paste_class(c)).collect();
    if paste.is_empty() {
        return Ok(out);
    }
    let frames = index::sample(rng, cfg.pool.len(), cfg.sample_frames.min(cfg.pool.len()));
    for f in frames.iter() {
        let frame = &cfg.pool[f];
        let frame_labels = frame.labels.as_ref().unwrap();
        if cfg.per_point {
            for (i, &l) in frame_labels.iter().enumerate() {
                let c = l as usize;
                if cfg.is_paste_class(c) && rng.random_bool(cfg.weights[c]) {
                    out.push_from(frame, i);
                }
            }
        } else {
            for &c in &paste {
                if !rng.random_bool(cfg.weights[c]) {
                    continue;
                }
                for (i, &l) in frame_labels.iter().enumerate() {
                    if l as usize == c {
                        out.push_from(frame, i);
                    }
                }
            }
        }
    }
    Ok(out)
}
