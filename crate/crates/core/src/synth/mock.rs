use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::pcio::ClassId;
use crate::postproc::ScoreVolume;
use crate::rview::RangeImage;

/// Noise model of the stand-in predictor.
#[derive(Debug, Clone, PartialEq)]
pub struct MockPredictorConfig {
    /// Probability of replacing a pixel's label with a uniformly drawn wrong class.
    pub noise_rate: f64,
    /// Softmax temperature applied to one-hot logits.
    pub temperature: f64,
    pub seed: u64,
}

impl Default for MockPredictorConfig {
    fn default() -> Self {
        MockPredictorConfig {
            noise_rate: 0.0,
            temperature: 1.0,
            seed: 0,
        }
    }
}

impl MockPredictorConfig {
    fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.noise_rate) {
            return Err(Error::Param(format!("noise rate {} outside [0, 1]", self.noise_rate)));
        }
        if !(self.temperature > 0.0) {
            return Err(Error::Param(format!("temperature {} must be positive", self.temperature)));
        }
        Ok(())
    }

    /// `(peak, rest)` probabilities of `softmax(onehot / T)` over `classes`.
    fn distribution(&self, classes: usize) -> (f32, f32) {
        let off = (-1.0 / self.temperature).exp();
        let peak = 1.0 / (1.0 + (classes as f64 - 1.0) * off);
        (peak as f32, (off * peak) as f32)
    }
}

/// Scores emitted by the mock predictor plus the labels it peaked at.
#[derive(Debug, Clone, PartialEq)]
pub struct MockOutput {
    pub scores: ScoreVolume,
    /// Post-corruption label per pixel, `N * H * W` (0 where unoccupied).
    pub labels: Vec<ClassId>,
    pub corrupted: usize,
}

fn predict_plane<R: Rng>(
    rng: &mut R,
    labels: &[ClassId],
    occupancy: &[bool],
    classes: usize,
    cfg: &MockPredictorConfig,
    n: usize,
    out: &mut MockOutput,
) -> Result<()> {
    let (peak, rest) = cfg.distribution(classes);
    let p = labels.len();
    let mut dist = vec![rest; classes];
    for px in 0..p {
        if !occupancy[px] {
            continue;
        }
        let truth = labels[px] as usize;
        if truth >= classes {
            return Err(Error::Param(format!("label {truth} outside [0, {classes})")));
        }
        let mut label = truth;
        if classes > 1 && cfg.noise_rate > 0.0 && rng.random_bool(cfg.noise_rate) {
            let r = rng.random_range(0..classes - 1);
            label = if r >= truth { r + 1 } else { r };
            out.corrupted += 1;
        }
        dist[label] = peak;
        out.scores.set_pixel(n, px, &dist);
        dist[label] = rest;
        out.labels[n * p + px] = label as ClassId;
    }
    Ok(())
}

/// Scores for one label plane, seeded from `cfg.seed`.
pub fn mock_predict(
    label_plane: &[ClassId],
    occupancy: &[bool],
    height: usize,
    width: usize,
    classes: usize,
    cfg: &MockPredictorConfig,
) -> Result<MockOutput> {
    cfg.validate()?;
    if label_plane.len() != height * width || occupancy.len() != height * width {
        return Err(Error::Shape(format!("plane buffers do not match {height}x{width}")));
    }
    if classes == 0 {
        return Err(Error::Param("need at least one class".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = MockOutput {
        scores: ScoreVolume::zeros(1, classes, height, width),
        labels: vec![0; height * width],
        corrupted: 0,
    };
    predict_plane(&mut rng, label_plane, occupancy, classes, cfg, 0, &mut out)?;
    Ok(out)
}

/// Scores for a stack of labeled range images, one random stream for the
/// whole stack.
pub fn mock_predict_images(images: &[RangeImage], classes: usize, cfg: &MockPredictorConfig) -> Result<MockOutput> {
    cfg.validate()?;
    let first = images.first().ok_or_else(|| Error::Shape("no range images".into()))?;
    if images.iter().any(|im| !im.same_shape(first)) {
        return Err(Error::Shape("range images differ in size".into()));
    }
    if classes == 0 {
        return Err(Error::Param("need at least one class".into()));
    }
    let (h, w) = (first.height, first.width);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = MockOutput {
        scores: ScoreVolume::zeros(images.len(), classes, h, w),
        labels: vec![0; images.len() * h * w],
        corrupted: 0,
    };
    for (n, im) in images.iter().enumerate() {
        let labels = im
            .label_plane
            .as_ref()
            .ok_or_else(|| Error::Param(format!("range image {n} has no label plane")))?;
        predict_plane(&mut rng, labels, &im.occupancy, classes, cfg, n, &mut out)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sharp_and_clean_is_one_hot() {
        let cfg = MockPredictorConfig { temperature: 1e-3, ..Default::default() };
        let out = mock_predict(&[2, 0, 1], &[true, false, true], 1, 3, 3, &cfg).unwrap();
        let s = &out.scores;
        assert_eq!((s.score(0, 2, 0), s.score(0, 0, 0), s.score(0, 1, 0)), (1.0, 0.0, 0.0));
        assert_eq!((0..3).map(|c| s.score(0, c, 1)).sum::<f32>(), 0.0);
        assert_eq!(s.score(0, 1, 2), 1.0);
        s.validate().unwrap();
    }

    #[test]
    fn full_noise_flips_every_binary_pixel() {
        let labels: Vec<ClassId> = (0..100).map(|i| (i % 2) as ClassId).collect();
        let cfg = MockPredictorConfig { noise_rate: 1.0, ..Default::default() };
        let out = mock_predict(&labels, &[true; 100], 10, 10, 2, &cfg).unwrap();
        let argmax = out.scores.argmax_labels();
        assert!(argmax.iter().zip(&labels).all(|(a, l)| a != l));
        assert_eq!(out.corrupted, 100);
    }

    #[test]
    fn argmax_matches_emitted_labels() {
        let labels: Vec<ClassId> = (0..400).map(|i| (i % 5) as ClassId).collect();
        let occ: Vec<bool> = (0..400).map(|i| i % 3 != 0).collect();
        let cfg = MockPredictorConfig { noise_rate: 0.3, temperature: 2.0, seed: 4 };
        let out = mock_predict(&labels, &occ, 20, 20, 5, &cfg).unwrap();
        out.scores.validate().unwrap();
        let argmax = out.scores.argmax_labels();
        for px in 0..400 {
            if occ[px] {
                assert_eq!(argmax[px], out.labels[px]);
            }
        }
    }
}
