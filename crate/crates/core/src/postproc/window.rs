use crate::error::{Error, Result};
use crate::pcio::ClassId;
use crate::rview::{PointCoord, RangeImage};

/// Marker for a window slot that falls into the vertical padding.
pub const PAD: u32 = u32::MAX;

/// `N x H x W` stack of range planes; values `<= 0` mark unoccupied pixels.
#[derive(Debug, Clone, PartialEq)]
pub struct RangeStack {
    pub subclouds: usize,
    pub height: usize,
    pub width: usize,
    pub ranges: Vec<f32>,
}

impl RangeStack {
    pub fn from_images(images: &[RangeImage]) -> Result<Self> {
        let first = images
            .first()
            .ok_or_else(|| Error::Shape("no range images".into()))?;
        if images.iter().any(|im| !im.same_shape(first)) {
            return Err(Error::Shape("range images differ in size".into()));
        }
        let ranges = images.iter().flat_map(|im| im.ranges().iter().copied()).collect();
        Ok(RangeStack {
            subclouds: images.len(),
            height: first.height,
            width: first.width,
            ranges,
        })
    }

    pub fn plane(&self, n: usize) -> &[f32] {
        let p = self.height * self.width;
        &self.ranges[n * p..(n + 1) * p]
    }
}

/// One range plane paired with per-pixel predicted labels.
#[derive(Debug, Clone, Copy)]
pub struct LabeledPlane<'a> {
    pub height: usize,
    pub width: usize,
    pub ranges: &'a [f32],
    pub labels: &'a [ClassId],
}

impl<'a> LabeledPlane<'a> {
    pub fn new(height: usize, width: usize, ranges: &'a [f32], labels: &'a [ClassId]) -> Result<Self> {
        let p = height * width;
        if ranges.len() != p || labels.len() != p {
            return Err(Error::Shape(format!(
                "plane {height}x{width} with {} ranges and {} labels",
                ranges.len(),
                labels.len()
            )));
        }
        Ok(LabeledPlane { height, width, ranges, labels })
    }

    /// Splits stacked range and label planes into per-sub-cloud views.
    pub fn stack(ranges: &'a RangeStack, labels: &'a [ClassId]) -> Result<Vec<Self>> {
        let p = ranges.height * ranges.width;
        if labels.len() != ranges.ranges.len() {
            return Err(Error::Shape(format!(
                "{} labels for a {}x{}x{} stack",
                labels.len(),
                ranges.subclouds,
                ranges.height,
                ranges.width
            )));
        }
        (0..ranges.subclouds)
            .map(|n| LabeledPlane::new(ranges.height, ranges.width, ranges.plane(n), &labels[n * p..(n + 1) * p]))
            .collect()
    }

    pub(crate) fn check_labels(&self, classes: usize) -> Result<()> {
        match self.labels.iter().zip(self.ranges).find(|(&l, &r)| r > 0.0 && l as usize >= classes) {
            Some((l, _)) => Err(Error::Param(format!("label {l} outside [0, {classes})"))),
            None => Ok(()),
        }
    }
}

/// Unfolds pixel indices with a `kernel x kernel` window.
///
/// Entry `px * k^2 + s` is the linear index of window slot `s` around pixel
/// `px`, slots ordered row-major from the top-left, or [`PAD`] when the slot
/// lies above or below the image. Columns wrap.
pub fn neighbor_table(height: usize, width: usize, kernel: usize) -> Vec<u32> {
    let unfold = Unfold::new(height, width, kernel);
    let k2 = kernel * kernel;
    let mut table = vec![PAD; height * width * k2];
    for v in 0..height {
        for u in 0..width {
            let base = (v * width + u) * k2;
            unfold.window(v, u, &mut table[base..base + k2]);
        }
    }
    table
}

/// On-the-fly form of [`neighbor_table`]: only the wrapped column indices
/// are precomputed, so building it costs `O(W k)` instead of `O(H W k^2)`.
pub(crate) struct Unfold {
    height: usize,
    width: usize,
    kernel: usize,
    /// `cols[u * k + j]` is the column of window column `j` around `u`.
    cols: Vec<u32>,
}

impl Unfold {
    pub(crate) fn new(height: usize, width: usize, kernel: usize) -> Self {
        let pad = (kernel / 2) as isize;
        let mut cols = Vec::with_capacity(width * kernel);
        for u in 0..width as isize {
            for dx in -pad..=pad {
                cols.push((u + dx).rem_euclid(width as isize) as u32);
            }
        }
        Unfold { height, width, kernel, cols }
    }

    pub(crate) fn slots(&self) -> usize {
        self.kernel * self.kernel
    }

    /// Writes the window of pixel `(v, u)` into `out`, which holds `k^2` slots.
    #[inline]
    pub(crate) fn window(&self, v: usize, u: usize, out: &mut [u32]) {
        let k = self.kernel;
        let pad = k / 2;
        let cols = &self.cols[u * k..(u + 1) * k];
        for (j, row_out) in out.chunks_exact_mut(k).enumerate() {
            let row = (v + j).wrapping_sub(pad);
            if row < self.height {
                let base = (row * self.width) as u32;
                for (o, &c) in row_out.iter_mut().zip(cols) {
                    *o = base + c;
                }
            } else {
                row_out.fill(PAD);
            }
        }
    }
}

pub(crate) fn check_points(points: &[PointCoord], subclouds: usize, height: usize, width: usize) -> Result<()> {
    for (i, p) in points.iter().enumerate() {
        if p.u as usize >= width || p.v as usize >= height || p.subcloud as usize >= subclouds {
            return Err(Error::Shape(format!(
                "point {i} at (subcloud {}, u {}, v {}) outside {subclouds}x{height}x{width}",
                p.subcloud, p.u, p.v
            )));
        }
        if !(p.range > 0.0 && p.range.is_finite()) {
            return Err(Error::Param(format!("point {i} has range {}", p.range)));
        }
    }
    Ok(())
}
