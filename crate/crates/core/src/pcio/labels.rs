use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::pcio::{ClassId, ClassMap, LoadedCloud};

/// Train ids decoded from a label file. `unknown` counts raw ids absent from
/// the class map; those entries were mapped to the ignore id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodedLabels {
    pub labels: Vec<ClassId>,
    pub unknown: usize,
}

pub fn decode_labels(bytes: &[u8], map: &ClassMap) -> Result<DecodedLabels> {
    if !bytes.len().is_multiple_of(4) {
        return Err(Error::format(
            "label file",
            bytes.len() - bytes.len() % 4,
            format!("length {} is not a multiple of 4", bytes.len()),
        ));
    }
    let mut unknown = 0;
    let labels = bytes
        .chunks_exact(4)
        .map(|b| {
            let raw = u32::from_le_bytes(b.try_into().unwrap());
            let semantic = (raw & 0xFFFF) as u16;
            map.to_train(semantic).unwrap_or_else(|| {
                unknown += 1;
                map.ignore_id()
            })
        })
        .collect();
    Ok(DecodedLabels { labels, unknown })
}

pub fn read_labels(path: impl AsRef<Path>, map: &ClassMap) -> Result<DecodedLabels> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_labels(&bytes, map)
}

/// Reads the labels of a companion point file, keeping only entries of
/// points retained at load.
pub fn read_labels_for(
    path: impl AsRef<Path>,
    map: &ClassMap,
    cloud: &LoadedCloud,
) -> Result<DecodedLabels> {
    let path = path.as_ref();
    let decoded = read_labels(path, map)?;
    if decoded.labels.len() != cloud.source_len {
        return Err(Error::Consistency(format!(
            "{} has {} labels but its point file has {} points",
            path.display(),
            decoded.labels.len(),
            cloud.source_len
        )));
    }
    Ok(DecodedLabels {
        labels: cloud.kept.iter().map(|&j| decoded.labels[j]).collect(),
        unknown: decoded.unknown,
    })
}

/// Encodes train ids as canonical raw ids (instance bits zero).
pub fn encode_labels(labels: &[ClassId], map: &ClassMap) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(labels.len() * 4);
    for &l in labels {
        let raw = map.to_raw(l).ok_or_else(|| {
            Error::Param(format!(
                "train id {l} has no raw id (class map has {} classes)",
                map.num_classes()
            ))
        })?;
        out.extend_from_slice(&(raw as u32).to_le_bytes());
    }
    Ok(out)
}

pub fn write_labels(labels: &[ClassId], map: &ClassMap, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = encode_labels(labels, map)?;
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}
