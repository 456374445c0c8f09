//! 2D to 3D label reconstruction.
//!
//! Every post-processor consumes per-point rows from
//! [`unproject_coords`](crate::rview::unproject_coords) and range planes
//! with the `-1` sentinel at unoccupied pixels. Windows wrap around
//! horizontally (azimuth is periodic) and are padded with unoccupied pixels
//! vertically.

mod knn;
mod nla;
mod nnri;
mod scores;
mod window;

pub use knn::{knn_multi, knn_per_subcloud, knn_single, KnnParams};
pub use nla::{nla, nla_per_subcloud};
pub use nnri::{cutoff, nnri, range_statistics, NnriParams};
pub use scores::{decode_scores, encode_scores, read_scores, write_scores, ScoreVolume, SVOL_MAGIC};
pub use window::{neighbor_table, LabeledPlane, RangeStack, PAD};

use window::Unfold;

use crate::error::{Error, Result};

pub(crate) fn check_kernel(kernel: usize) -> Result<()> {
    if kernel == 0 || kernel.is_multiple_of(2) {
        return Err(Error::Param(format!("kernel size {kernel} must be odd and >= 1")));
    }
    Ok(())
}

/// Index of the largest value; ties go to the lowest index.
pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}
