use crate::error::{Error, Result};
use crate::pcio::ClassId;
use crate::postproc::window::check_points;
use crate::postproc::{argmax, check_kernel, LabeledPlane, Unfold, PAD};
use crate::rview::PointCoord;

/// Range-image KNN voting parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct KnnParams {
    /// Odd search window size.
    pub kernel: usize,
    /// Number of voting neighbors `K <= kernel^2`.
    pub votes: usize,
    /// Maximum range difference of a voting neighbor, meters.
    pub cutoff: f64,
    /// Gaussian vote weighting width; `None` casts unit votes.
    pub sigma: Option<f64>,
}

impl Default for KnnParams {
    fn default() -> Self {
        KnnParams {
            kernel: 3,
            votes: 5,
            cutoff: 1.0,
            sigma: Some(1.0),
        }
    }
}

impl KnnParams {
    pub fn validate(&self) -> Result<()> {
        check_kernel(self.kernel)?;
        if self.votes == 0 || self.votes > self.kernel * self.kernel {
            return Err(Error::Param(format!(
                "votes {} must be in [1, {}]",
                self.votes,
                self.kernel * self.kernel
            )));
        }
        if !(self.cutoff >= 0.0) {
            return Err(Error::Param(format!("cutoff {} must be >= 0", self.cutoff)));
        }
        if let Some(s) = self.sigma {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::Param(format!("sigma {s} must be positive")));
            }
        }
        Ok(())
    }
}

struct Voter {
    unfold: Unfold,
    window: Vec<u32>,
    candidates: Vec<(f64, usize)>,
}

impl Voter {
    fn new(height: usize, width: usize, kernel: usize) -> Self {
        Voter {
            unfold: Unfold::new(height, width, kernel),
            window: vec![PAD; kernel * kernel],
            candidates: Vec::with_capacity(kernel * kernel),
        }
    }

    /// Adds this plane's votes for `pt` into `votes`; returns whether any
    /// neighbor qualified.
    fn vote(&mut self, plane: &LabeledPlane, pt: &PointCoord, params: &KnnParams, votes: &mut [f64]) -> bool {
        let r = pt.range as f64;
        self.unfold.window(pt.v as usize, pt.u as usize, &mut self.window);
        self.candidates.clear();
        for (slot, &q) in self.window.iter().enumerate() {
            if q == PAD {
                continue;
            }
            let nr = plane.ranges[q as usize];
            if nr <= 0.0 {
                continue;
            }
            let delta = (nr as f64 - r).abs();
            if delta <= params.cutoff {
                self.candidates.push((delta, slot));
            }
        }
        if self.candidates.is_empty() {
            return false;
        }
        // Insertion sort by (delta, slot): windows hold at most k^2 entries.
        for i in 1..self.candidates.len() {
            let mut j = i;
            while j > 0 && self.candidates[j - 1] > self.candidates[j] {
                self.candidates.swap(j - 1, j);
                j -= 1;
            }
        }
        for &(delta, slot) in self.candidates.iter().take(params.votes) {
            let label = plane.labels[self.window[slot] as usize] as usize;
            votes[label] += match params.sigma {
                Some(s) => (-(delta * delta) / (2.0 * s * s)).exp(),
                None => 1.0,
            };
        }
        true
    }
}

fn own_label(plane: &LabeledPlane, pt: &PointCoord, ignore_id: ClassId) -> ClassId {
    let px = pt.v as usize * plane.width + pt.u as usize;
    if plane.ranges[px] > 0.0 {
        plane.labels[px]
    } else {
        ignore_id
    }
}

fn check_planes(planes: &[LabeledPlane], classes: usize) -> Result<(usize, usize)> {
    let first = planes.first().ok_or_else(|| Error::Shape("no label planes".into()))?;
    for p in planes {
        if (p.height, p.width) != (first.height, first.width) {
            return Err(Error::Shape("label planes differ in size".into()));
        }
        if p.ranges.len() != p.height * p.width || p.labels.len() != p.height * p.width {
            return Err(Error::Shape("label plane buffers do not match its size".into()));
        }
        p.check_labels(classes)?;
    }
    Ok((first.height, first.width))
}

/// KNN voting on one range image.
///
/// For each point, the `k x k` window at its pixel supplies neighbors whose
/// range differs from the point's by at most `cutoff`; the `K` closest in
/// range (ties by window slot) vote for their pixel label. Plurality wins,
/// ties to the lower class id. A point without qualifying neighbors keeps
/// its own pixel's label, or `ignore_id` if that pixel is empty.
pub fn knn_single(
    plane: &LabeledPlane,
    points: &[PointCoord],
    params: &KnnParams,
    classes: usize,
    ignore_id: ClassId,
) -> Result<Vec<ClassId>> {
    params.validate()?;
    let (h, w) = check_planes(std::slice::from_ref(plane), classes)?;
    check_points_uv(points, h, w)?;
    let mut voter = Voter::new(h, w, params.kernel);
    let mut votes = vec![0.0; classes];
    Ok(points
        .iter()
        .map(|pt| {
            votes.iter_mut().for_each(|v| *v = 0.0);
            if voter.vote(plane, pt, params, &mut votes) {
                argmax(&votes) as ClassId
            } else {
                own_label(plane, pt, ignore_id)
            }
        })
        .collect())
}

/// Multi-range KNN: per-image vote vectors are summed over all `N` images
/// before the argmax. Points without any qualifying neighbor fall back to
/// their own pixel in their own sub-cloud.
pub fn knn_multi(
    planes: &[LabeledPlane],
    points: &[PointCoord],
    params: &KnnParams,
    classes: usize,
    ignore_id: ClassId,
) -> Result<Vec<ClassId>> {
    params.validate()?;
    let (h, w) = check_planes(planes, classes)?;
    check_points(points, planes.len(), h, w)?;
    let mut voter = Voter::new(h, w, params.kernel);
    let mut total = vec![0.0; classes];
    let mut votes = vec![0.0; classes];
    Ok(points
        .iter()
        .map(|pt| {
            total.iter_mut().for_each(|v| *v = 0.0);
            let mut any = false;
            for plane in planes {
                votes.iter_mut().for_each(|v| *v = 0.0);
                any |= voter.vote(plane, pt, params, &mut votes);
                for (t, v) in total.iter_mut().zip(&votes) {
                    *t += v;
                }
            }
            if any {
                argmax(&total) as ClassId
            } else {
                own_label(&planes[pt.subcloud as usize], pt, ignore_id)
            }
        })
        .collect())
}

/// Runs [`knn_single`] for every point on its own sub-cloud's image.
pub fn knn_per_subcloud(
    planes: &[LabeledPlane],
    points: &[PointCoord],
    params: &KnnParams,
    classes: usize,
    ignore_id: ClassId,
) -> Result<Vec<ClassId>> {
    per_subcloud(planes, points, |plane, pts| knn_single(plane, pts, params, classes, ignore_id))
}

pub(crate) fn per_subcloud(
    planes: &[LabeledPlane],
    points: &[PointCoord],
    mut run: impl FnMut(&LabeledPlane, &[PointCoord]) -> Result<Vec<ClassId>>,
) -> Result<Vec<ClassId>> {
    let first = planes.first().ok_or_else(|| Error::Shape("no label planes".into()))?;
    check_points(points, planes.len(), first.height, first.width)?;
    let mut out = vec![0; points.len()];
    for (n, plane) in planes.iter().enumerate() {
        let (idx, pts): (Vec<usize>, Vec<PointCoord>) = points
            .iter()
            .enumerate()
            .filter(|(_, p)| p.subcloud as usize == n)
            .map(|(i, p)| (i, *p))
            .unzip();
        for (i, l) in idx.into_iter().zip(run(plane, &pts)?) {
            out[i] = l;
        }
    }
    Ok(out)
}

pub(crate) fn check_points_uv(points: &[PointCoord], height: usize, width: usize) -> Result<()> {
    for (i, p) in points.iter().enumerate() {
        if p.u as usize >= width || p.v as usize >= height {
            return Err(Error::Shape(format!(
                "point {i} at (u {}, v {}) outside {height}x{width}",
                p.u, p.v
            )));
        }
        if !(p.range > 0.0 && p.range.is_finite()) {
            return Err(Error::Param(format!("point {i} has range {}", p.range)));
        }
    }
    Ok(())
}
