//! Range-view processing toolkit for LiDAR semantic segmentation.
//!
//! The crate covers the full path around a 2D range-image predictor:
//!
//! - [`pcio`]: point cloud, label, class map and sensor file I/O.
//! - [`rview`]: spherical projection, modulo sub-cloud splitting and
//!   projection statistics.
//! - [`augment`]: geometric augmentation, weighted paste-drop in 3D,
//!   unlabeled-pixel cleanup and multi-cloud occupancy fusion.
//! - [`postproc`]: 2D to 3D label reconstruction (range-weighted
//!   neighbor interpolation, single and multi-range KNN voting, nearest
//!   label assignment).
//! - [`metrics`]: confusion matrices, IoU/accuracy scores and a latency
//!   harness.
//! - [`synth`]: a ray-cast virtual LiDAR over analytic scenes plus a mock
//!   predictor standing in for a trained network.

// `!(x > 0.0)` style checks are deliberate: they reject NaN too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod augment;
pub mod error;
pub mod metrics;
pub mod pcio;
pub mod postproc;
pub mod rview;
pub mod synth;

pub use error::{Error, Result};
pub use pcio::{ClassId, ClassMap, PointCloud, SensorSpec};
pub use postproc::ScoreVolume;
pub use rview::{ProjectionIndex, RangeImage};
