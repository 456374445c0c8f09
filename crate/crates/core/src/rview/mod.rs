//! Range-view projection.
//!
//! A cloud is optionally split into `N` sub-clouds by index modulo, each
//! sub-cloud is projected onto an `H x W` spherical grid, and every pixel
//! keeps the closest point that lands in it.

mod dump;
mod image;
mod projection;
mod split;
mod stats;

pub use dump::{decode_images, encode_images, read_images, write_images, RIMG_MAGIC};
pub use image::{Channel, RangeImage, CHANNELS, EMPTY_RANGE};
pub use projection::{pixel_of, project, project_multi, unproject_coords, PointCoord, ProjectionIndex};
pub use split::{split_cloud, Split};
pub use stats::{validity_stats, PartitionValidity, ValidityReport};

/// Sub-cloud count used for 64-beam data at 64 x 512.
pub const DEFAULT_SUBCLOUDS: usize = 3;
