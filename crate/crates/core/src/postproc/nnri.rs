use crate::error::{Error, Result};
use crate::pcio::ClassId;
use crate::postproc::window::check_points;
use crate::postproc::{argmax, check_kernel, RangeStack, ScoreVolume, Unfold, PAD};
use crate::rview::PointCoord;

/// Parameters of range-weighted neighbor interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct NnriParams {
    /// Odd window size `k`; padding is `(k - 1) / 2`.
    pub kernel: usize,
    /// Cut-off scale `alpha`.
    pub alpha: f64,
    /// Range normalization statistics. `None` means per-scan statistics
    /// over the queried points.
    pub r_mean: Option<f64>,
    pub r_std: Option<f64>,
}

impl Default for NnriParams {
    fn default() -> Self {
        NnriParams {
            kernel: 3,
            alpha: 1.0,
            r_mean: None,
            r_std: None,
        }
    }
}

impl NnriParams {
    pub fn pad(&self) -> usize {
        (self.kernel - 1) / 2
    }

    pub fn validate(&self) -> Result<()> {
        check_kernel(self.kernel)?;
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::Param(format!("alpha {} must be positive", self.alpha)));
        }
        if let Some(s) = self.r_std {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::Param(format!("r_std {s} must be positive")));
            }
        }
        Ok(())
    }
}

/// Adaptive neighbor cut-off `alpha * exp((range - r_mean) / r_std)`, in meters.
#[inline]
pub fn cutoff(range: f64, r_mean: f64, r_std: f64, alpha: f64) -> f64 {
    alpha * ((range - r_mean) / r_std).exp()
}

/// Mean and population standard deviation of point ranges. A zero or
/// undefined deviation is reported as 1.
pub fn range_statistics(points: &[PointCoord]) -> (f64, f64) {
    if points.is_empty() {
        return (0.0, 1.0);
    }
    let n = points.len() as f64;
    let mean = points.iter().map(|p| p.range as f64).sum::<f64>() / n;
    let var = points.iter().map(|p| (p.range as f64 - mean).powi(2)).sum::<f64>() / n;
    let std = var.sqrt();
    (mean, if std > 0.0 && std.is_finite() { std } else { 1.0 })
}

/// Nearest Neighbors Range Interpolation.
///
/// Each point gathers the `k x k` window at its pixel in every one of the
/// `N` images. A neighbor at range `r_n` gets weight
/// `1 - min(|r_n - r_p|, D) / D` with `D` from [`cutoff`]; unoccupied
/// neighbors get weight 0. The label is the argmax over classes of the
/// weighted score sum, ties to the lower class id. A point whose neighbors
/// all have weight 0 takes the argmax of its own pixel in its own sub-cloud.
pub fn nnri(
    scores: &ScoreVolume,
    ranges: &RangeStack,
    points: &[PointCoord],
    params: &NnriParams,
) -> Result<Vec<ClassId>> {
    params.validate()?;
    let (n_sub, c_n, h, w) = (scores.subclouds, scores.classes, scores.height, scores.width);
    if (ranges.subclouds, ranges.height, ranges.width) != (n_sub, h, w) {
        return Err(Error::Shape(format!(
            "scores are {n_sub}x{c_n}x{h}x{w}, ranges are {}x{}x{}",
            ranges.subclouds, ranges.height, ranges.width
        )));
    }
    if c_n == 0 || ranges.ranges.len() != n_sub * h * w || scores.scores.len() != n_sub * c_n * h * w {
        return Err(Error::Shape("score or range buffer does not match its shape".into()));
    }
    check_points(points, n_sub, h, w)?;

    let (stat_mean, stat_std) = range_statistics(points);
    let r_mean = params.r_mean.unwrap_or(stat_mean);
    let r_std = params.r_std.unwrap_or(stat_std);

    let unfold = Unfold::new(h, w, params.kernel);
    let p = h * w;
    let mut window = vec![PAD; unfold.slots()];
    // (offset of the neighbor's class-0 score, weight) for every neighbor
    // with nonzero weight, in image then slot order.
    let mut weighted: Vec<(usize, f64)> = Vec::with_capacity(n_sub * unfold.slots());
    let mut acc = vec![0.0f64; c_n];
    let mut labels = Vec::with_capacity(points.len());
    for pt in points {
        let r = pt.range as f64;
        let d = cutoff(r, r_mean, r_std, params.alpha);
        unfold.window(pt.v as usize, pt.u as usize, &mut window);
        weighted.clear();
        for n in 0..n_sub {
            let plane = ranges.plane(n);
            for &q in &window {
                if q == PAD {
                    continue;
                }
                let nr = plane[q as usize];
                if nr <= 0.0 {
                    continue;
                }
                // Beyond the cut-off the clamped weight is exactly 0.
                let delta = (nr as f64 - r).abs();
                if delta >= d {
                    continue;
                }
                let weight = 1.0 - delta / d;
                if weight > 0.0 {
                    weighted.push((n * c_n * p + q as usize, weight));
                }
            }
        }
        let label = if weighted.is_empty() {
            let own = pt.subcloud as usize * c_n * p + pt.v as usize * w + pt.u as usize;
            acc.iter_mut()
                .enumerate()
                .for_each(|(c, a)| *a = scores.scores[own + c * p] as f64);
            argmax(&acc)
        } else {
            for (c, a) in acc.iter_mut().enumerate() {
                let plane = &scores.scores[c * p..];
                *a = weighted.iter().map(|&(at, wt)| wt * plane[at] as f64).sum();
            }
            argmax(&acc)
        };
        labels.push(label as ClassId);
    }
    Ok(labels)
}
