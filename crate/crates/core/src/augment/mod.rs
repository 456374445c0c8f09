//! Training-time augmentation.
//!
//! The pipeline order is fixed: [`wpd_plus`] and [`geometric_augment`] on
//! points, then split and projection, then [`clean_unlabeled`] and [`mcf`]
//! on the range images. [`augment_frame`] runs the whole chain.

mod gda;
mod mcf;
mod wpd;

pub use gda::{flip_x, geometric_augment, GdaParams};
pub use mcf::{clean_unlabeled, mcf};
pub use wpd::{wpd_plus, WpdConfig, DEFAULT_SAMPLE_FRAMES, DEFAULT_THRESHOLD};

use rand::Rng;

use crate::error::Result;
use crate::pcio::{ClassId, PointCloud, SensorSpec};
use crate::rview::{project_multi, RangeImage};

/// Output of [`augment_frame`].
#[derive(Debug, Clone)]
pub struct AugmentedFrame {
    pub cloud: PointCloud,
    /// One fused image per sub-cloud.
    pub images: Vec<RangeImage>,
}

/// Runs weighted paste-drop, geometric augmentation, splitting, projection,
/// unlabeled-pixel cleanup (when `ignore_id` is given) and multi-cloud
/// fusion, in that order.
#[allow(clippy::too_many_arguments)]
pub fn augment_frame<R: Rng>(
    cloud: &PointCloud,
    wpd: &WpdConfig,
    gda: &GdaParams,
    spec: &SensorSpec,
    height: usize,
    width: usize,
    subclouds: usize,
    ignore_id: Option<ClassId>,
    rng: &mut R,
) -> Result<AugmentedFrame> {
    let pasted = wpd_plus(cloud, wpd, rng)?;
    let moved = geometric_augment(&pasted, gda, rng)?;
    let (mut images, _) = project_multi(&moved, spec, height, width, subclouds)?;
    if let Some(ignore) = ignore_id {
        images = images
            .iter()
            .map(|im| clean_unlabeled(im, ignore))
            .collect::<Result<_>>()?;
    }
    let fused = (0..images.len()).map(|i| mcf(&images, i)).collect::<Result<_>>()?;
    Ok(AugmentedFrame { cloud: moved, images: fused })
}
