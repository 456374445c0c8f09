//! Point cloud, label, class map and sensor specification I/O.
//!
//! Binary layouts follow the SemanticKITTI convention:
//!
//! ```text
//! point file: [x:f32 | y:f32 | z:f32 | intensity:f32] * n   (little-endian)
//! label file: [label:u32] * n                               (little-endian)
//!             semantic id = label & 0xFFFF, instance id = label >> 16
//! ```
//!
//! Class maps and sensor specifications are TOML documents, see
//! [`ClassMap::from_toml_str`] and [`SensorSpec::from_toml_str`].

mod classmap;
mod cloud;
mod labels;
mod sensor;

pub use classmap::{ClassMap, ClassSpec};
pub use cloud::{decode_points, encode_points, read_point_cloud, write_point_cloud, LoadedCloud, PointCloud};
pub use labels::{
    decode_labels, encode_labels, read_labels, read_labels_for, write_labels, DecodedLabels,
};
pub use sensor::SensorSpec;

/// Contiguous training class id in `[0, C)`.
pub type ClassId = u16;
