use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::pcio::ClassId;

const POINT_STRIDE: usize = 16;

/// Columnar point cloud: coordinates in meters, remission in `[0, 1]` and
/// optional per-point train ids.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PointCloud {
    pub xs: Vec<f32>,
    pub ys: Vec<f32>,
    pub zs: Vec<f32>,
    pub intensities: Vec<f32>,
    pub labels: Option<Vec<ClassId>>,
}

impl PointCloud {
    pub fn with_capacity(n: usize, labeled: bool) -> Self {
        PointCloud {
            xs: Vec::with_capacity(n),
            ys: Vec::with_capacity(n),
            zs: Vec::with_capacity(n),
            intensities: Vec::with_capacity(n),
            labels: labeled.then(|| Vec::with_capacity(n)),
        }
    }

    /// Builds a cloud from parallel columns, checking that lengths agree.
    pub fn from_columns(
        xs: Vec<f32>,
        ys: Vec<f32>,
        zs: Vec<f32>,
        intensities: Vec<f32>,
        labels: Option<Vec<ClassId>>,
    ) -> Result<Self> {
        let n = xs.len();
        let labels_ok = labels.as_ref().is_none_or(|l| l.len() == n);
        if ys.len() != n || zs.len() != n || intensities.len() != n || !labels_ok {
            return Err(Error::Consistency(format!(
                "point cloud columns differ in length (x has {n})"
            )));
        }
        Ok(PointCloud {
            xs,
            ys,
            zs,
            intensities,
            labels,
        })
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn is_labeled(&self) -> bool {
        self.labels.is_some()
    }

    /// Appends one point. `label` must be `Some` exactly when the cloud is labeled.
    pub fn push(&mut self, x: f32, y: f32, z: f32, intensity: f32, label: Option<ClassId>) {
        self.xs.push(x);
        self.ys.push(y);
        self.zs.push(z);
        self.intensities.push(intensity);
        match (&mut self.labels, label) {
            (Some(labels), Some(l)) => labels.push(l),
            (None, None) => {}
            _ => panic!("label presence does not match cloud"),
        }
    }

    /// Copies point `i` of `other` onto the end of `self`.
    pub fn push_from(&mut self, other: &PointCloud, i: usize) {
        let label = other.labels.as_ref().map(|l| l[i]);
        self.push(other.xs[i], other.ys[i], other.zs[i], other.intensities[i], label);
    }

    /// Euclidean distance to the sensor origin, computed in double precision.
    #[inline]
    pub fn range(&self, i: usize) -> f64 {
        let (x, y, z) = (self.xs[i] as f64, self.ys[i] as f64, self.zs[i] as f64);
        (x * x + y * y + z * z).sqrt()
    }

    pub fn ranges(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.range(i)).collect()
    }

    /// Subset of points in the given order.
    pub fn select(&self, indices: &[usize]) -> PointCloud {
        let mut out = PointCloud::with_capacity(indices.len(), self.is_labeled());
        for &i in indices {
            out.push_from(self, i);
        }
        out
    }

    /// Attaches labels, replacing any existing ones.
    pub fn with_labels(mut self, labels: Vec<ClassId>) -> Result<Self> {
        if labels.len() != self.len() {
            return Err(Error::Consistency(format!(
                "{} labels for {} points",
                labels.len(),
                self.len()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }
}

/// A decoded point file. `kept[j]` is the file position of cloud point `j`;
/// `source_len` counts every record in the file, including dropped
/// invalid returns.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedCloud {
    pub cloud: PointCloud,
    pub kept: Vec<usize>,
    pub source_len: usize,
}

impl LoadedCloud {
    pub fn dropped(&self) -> usize {
        self.source_len - self.kept.len()
    }

    /// Spreads per-point values back to file positions, writing `fill` at
    /// dropped records.
    pub fn expand<T: Copy>(&self, values: &[T], fill: T) -> Vec<T> {
        assert_eq!(values.len(), self.kept.len());
        let mut out = vec![fill; self.source_len];
        for (&pos, &v) in self.kept.iter().zip(values) {
            out[pos] = v;
        }
        out
    }
}

/// Decodes little-endian `x, y, z, intensity` float quadruples. Records
/// at the origin or with a non-finite coordinate are dropped.
pub fn decode_points(bytes: &[u8]) -> Result<LoadedCloud> {
    if !bytes.len().is_multiple_of(POINT_STRIDE) {
        let offset = bytes.len() - bytes.len() % POINT_STRIDE;
        return Err(Error::format(
            "point file",
            offset,
            format!(
                "length {} is not a multiple of {POINT_STRIDE}; trailing {} bytes",
                bytes.len(),
                bytes.len() - offset
            ),
        ));
    }
    let n = bytes.len() / POINT_STRIDE;
    let mut cloud = PointCloud::with_capacity(n, false);
    let mut kept = Vec::with_capacity(n);
    for (j, rec) in bytes.chunks_exact(POINT_STRIDE).enumerate() {
        let f = |k: usize| f32::from_le_bytes(rec[4 * k..4 * k + 4].try_into().unwrap());
        let (x, y, z, t) = (f(0), f(1), f(2), f(3));
        // Invalid returns: origin points and non-finite coordinates.
        if (x == 0.0 && y == 0.0 && z == 0.0) || !(x.is_finite() && y.is_finite() && z.is_finite()) {
            continue;
        }
        cloud.push(x, y, z, t, None);
        kept.push(j);
    }
    Ok(LoadedCloud {
        cloud,
        kept,
        source_len: n,
    })
}

pub fn encode_points(cloud: &PointCloud) -> Vec<u8> {
    let mut out = Vec::with_capacity(cloud.len() * POINT_STRIDE);
    for i in 0..cloud.len() {
        for v in [cloud.xs[i], cloud.ys[i], cloud.zs[i], cloud.intensities[i]] {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

pub fn read_point_cloud(path: impl AsRef<Path>) -> Result<LoadedCloud> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_points(&bytes)
}

/// Writes coordinates and intensities; labels, if any, are not written.
pub fn write_point_cloud(cloud: &PointCloud, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_points(cloud)).map_err(|e| Error::io(path, e))
}
