use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::pcio::{PointCloud, SensorSpec};
use crate::rview::{split_cloud, Channel, RangeImage};

const ASIN_TOL: f64 = 1e-9;
const NO_WINNER: u32 = u32::MAX;

/// Per-point link between the cloud and its range images.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionIndex {
    pub height: usize,
    pub width: usize,
    /// Number of sub-clouds `N`.
    pub subclouds: usize,
    pub us: Vec<u32>,
    pub vs: Vec<u32>,
    /// True iff the point is the one stored at its pixel.
    pub winner: Vec<bool>,
    pub subcloud: Vec<u32>,
    /// Point range in meters.
    pub ranges: Vec<f32>,
}

impl ProjectionIndex {
    pub fn len(&self) -> usize {
        self.us.len()
    }

    pub fn is_empty(&self) -> bool {
        self.us.is_empty()
    }
}

/// One row of [`unproject_coords`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointCoord {
    pub subcloud: u32,
    pub u: u32,
    pub v: u32,
    pub range: f32,
}

/// Pixel `(u, v)` of a point with range `d > 0`.
///
/// `u = floor(W/2 - W/(2 pi) * atan2(y, x))` and
/// `v = floor(H / (theta_max - theta_min) * (theta_max - asin(z / d)))`,
/// both clamped into the image so out-of-FoV points land on edge rows.
pub fn pixel_of(x: f64, y: f64, z: f64, d: f64, spec: &SensorSpec, height: usize, width: usize) -> Result<(u32, u32)> {
    let (h, w) = (height as f64, width as f64);
    let azimuth = y.atan2(x);
    let u = (w / 2.0 - (w / (2.0 * PI)) * azimuth).floor();

    let s = z / d;
    if !(s.abs() <= 1.0 + ASIN_TOL) {
        return Err(Error::Numeric(format!("asin argument {s} outside [-1, 1]")));
    }
    let elevation = s.clamp(-1.0, 1.0).asin();
    let v = ((h / spec.fov()) * (spec.theta_max - elevation)).floor();

    let u = u.clamp(0.0, w - 1.0) as u32;
    let v = v.clamp(0.0, h - 1.0) as u32;
    Ok((u, v))
}

fn check_dims(height: usize, width: usize) -> Result<()> {
    if height == 0 || width == 0 {
        return Err(Error::Param(format!("image size {height}x{width} must be at least 1x1")));
    }
    if height.checked_mul(width).is_none_or(|n| n >= NO_WINNER as usize) {
        return Err(Error::Param(format!("image size {height}x{width} too large")));
    }
    Ok(())
}

/// Projects a cloud onto one `height x width` range image. At each pixel the
/// point with the smallest range wins; equal ranges go to the lower index.
pub fn project(cloud: &PointCloud, spec: &SensorSpec, height: usize, width: usize) -> Result<(RangeImage, ProjectionIndex)> {
    check_dims(height, width)?;
    let n = cloud.len();
    let mut us = Vec::with_capacity(n);
    let mut vs = Vec::with_capacity(n);
    let mut ranges = Vec::with_capacity(n);
    let mut best = vec![NO_WINNER; height * width];
    let mut best_range = vec![f64::INFINITY; height * width];

    for i in 0..n {
        let d = cloud.range(i);
        if !(d > 0.0 && d.is_finite()) {
            return Err(Error::Param(format!("point {i} has invalid range {d}")));
        }
        let (u, v) = pixel_of(cloud.xs[i] as f64, cloud.ys[i] as f64, cloud.zs[i] as f64, d, spec, height, width)?;
        let px = v as usize * width + u as usize;
        if d < best_range[px] {
            best_range[px] = d;
            best[px] = i as u32;
        }
        us.push(u);
        vs.push(v);
        ranges.push(d);
    }

    let mut image = RangeImage::empty(height, width, cloud.is_labeled());
    let mut winner = vec![false; n];
    for (px, &i) in best.iter().enumerate() {
        if i == NO_WINNER {
            continue;
        }
        let i = i as usize;
        winner[i] = true;
        let mut values = [cloud.xs[i], cloud.ys[i], cloud.zs[i], cloud.intensities[i], 0.0];
        values[Channel::Range as usize] = ranges[i] as f32;
        image.set_pixel(px, values, cloud.labels.as_ref().map(|l| l[i]));
    }

    let index = ProjectionIndex {
        height,
        width,
        subclouds: 1,
        us,
        vs,
        winner,
        subcloud: vec![0; n],
        ranges: ranges.into_iter().map(|d| d as f32).collect(),
    };
    Ok((image, index))
}

/// Splits into `n` sub-clouds and projects each. The returned index is in
/// original point order and covers every point once.
pub fn project_multi(
    cloud: &PointCloud,
    spec: &SensorSpec,
    height: usize,
    width: usize,
    n: usize,
) -> Result<(Vec<RangeImage>, ProjectionIndex)> {
    check_dims(height, width)?;
    let split = split_cloud(cloud, n)?;
    let total = cloud.len();
    let mut index = ProjectionIndex {
        height,
        width,
        subclouds: n,
        us: vec![0; total],
        vs: vec![0; total],
        winner: vec![false; total],
        subcloud: vec![0; total],
        ranges: vec![0.0; total],
    };
    let mut images = Vec::with_capacity(n);
    for (i, (part, members)) in split.parts.iter().zip(&split.members).enumerate() {
        let (image, sub) = project(part, spec, height, width)?;
        for (local, &j) in members.iter().enumerate() {
            index.us[j] = sub.us[local];
            index.vs[j] = sub.vs[local];
            index.winner[j] = sub.winner[local];
            index.subcloud[j] = i as u32;
            index.ranges[j] = sub.ranges[local];
        }
        images.push(image);
    }
    Ok((images, index))
}

/// Per-point `(subcloud, u, v, range)` rows in original point order.
pub fn unproject_coords(index: &ProjectionIndex) -> Vec<PointCoord> {
    (0..index.len())
        .map(|j| PointCoord {
            subcloud: index.subcloud[j],
            u: index.us[j],
            v: index.vs[j],
            range: index.ranges[j],
        })
        .collect()
}
