use nalgebra::{Rotation3, Vector3};
use rand::Rng;

use crate::error::{Error, Result};
use crate::pcio::PointCloud;

/// Geometric augmentation settings. Each of flip, translation and rotation
/// is applied independently with `probability`.
#[derive(Debug, Clone, PartialEq)]
pub struct GdaParams {
    pub flip_x: bool,
    /// Per-axis translation ranges `(low, high)` in meters, `x, y, z`.
    pub translate: [(f64, f64); 3],
    /// Per-axis rotation ranges in degrees: roll (x), pitch (y), yaw (z).
    pub rotate_deg: [(f64, f64); 3],
    pub probability: f64,
}

impl Default for GdaParams {
    fn default() -> Self {
        GdaParams {
            flip_x: true,
            translate: [(-5.0, 5.0), (-3.0, 3.0), (-1.0, 0.0)],
            rotate_deg: [(-5.0, 5.0); 3],
            probability: 0.5,
        }
    }
}

impl GdaParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.probability) {
            return Err(Error::Param(format!("probability {} outside [0, 1]", self.probability)));
        }
        for (lo, hi) in self.translate.iter().chain(&self.rotate_deg) {
            if !(lo <= hi && lo.is_finite() && hi.is_finite()) {
                return Err(Error::Param(format!("range [{lo}, {hi}] is empty or not finite")));
            }
        }
        Ok(())
    }
}

/// Negates every x coordinate.
pub fn flip_x(cloud: &PointCloud) -> PointCloud {
    let mut out = cloud.clone();
    out.xs.iter_mut().for_each(|x| *x = -*x);
    out
}

/// Random flip, translation and rotation (in that order). Labels ride
/// along unchanged.
pub fn geometric_augment<R: Rng>(cloud: &PointCloud, params: &GdaParams, rng: &mut R) -> Result<PointCloud> {
    params.validate()?;
    let p = params.probability;
    let flip = params.flip_x && rng.random_bool(p);
    let shift = rng
        .random_bool(p)
        .then(|| Vector3::from_fn(|i, _| rng.random_range(params.translate[i].0..=params.translate[i].1)));
    let rotation = rng.random_bool(p).then(|| {
        let [roll, pitch, yaw] =
            std::array::from_fn(|i| rng.random_range(params.rotate_deg[i].0..=params.rotate_deg[i].1).to_radians());
        Rotation3::from_euler_angles(roll, pitch, yaw)
    });

    let mut out = if flip { flip_x(cloud) } else { cloud.clone() };
    if shift.is_none() && rotation.is_none() {
        return Ok(out);
    }
    for i in 0..out.len() {
        let mut v = Vector3::new(out.xs[i] as f64, out.ys[i] as f64, out.zs[i] as f64);
        if let Some(t) = &shift {
            v += t;
        }
        if let Some(r) = &rotation {
            v = r * v;
        }
        out.xs[i] = v.x as f32;
        out.ys[i] = v.y as f32;
        out.zs[i] = v.z as f32;
    }
    Ok(out)
}
