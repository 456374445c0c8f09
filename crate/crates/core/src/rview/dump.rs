//! Binary range-image dump.
//!
//! A file is a sequence of records, one per image:
//!
//! ```text
//! magic      4 bytes  "RIMG"
//! height     u32 LE
//! width      u32 LE
//! channels   u32 LE   5, or 6 when a label plane is present
//! planes     channels * height * width f32 LE, row-major, in the order
//!            x, y, z, intensity, range[, label]
//! occupancy  height * width bytes, 0 or 1
//! ```
//!
//! Unoccupied pixels hold range -1 and 0 in the other planes; the label
//! plane holds the train id as a float, or -1 where unoccupied.

use std::path::Path;

use crate::error::{Error, Result};
use crate::pcio::ClassId;
use crate::rview::{Channel, RangeImage, CHANNELS};

pub const RIMG_MAGIC: &[u8; 4] = b"RIMG";

pub fn encode_images(images: &[RangeImage]) -> Vec<u8> {
    let mut out = Vec::new();
    for img in images {
        let channels = CHANNELS + img.label_plane.is_some() as usize;
        out.extend_from_slice(RIMG_MAGIC);
        for v in [img.height as u32, img.width as u32, channels as u32] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        for plane in &img.channels {
            for v in plane {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        if let Some(labels) = &img.label_plane {
            for (l, &occ) in labels.iter().zip(&img.occupancy) {
                let v = if occ { *l as f32 } else { -1.0 };
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        out.extend(img.occupancy.iter().map(|&o| o as u8));
    }
    out
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        if self.bytes.len() - self.pos < n {
            return Err(Error::format(
                "range image",
                self.pos,
                format!("truncated {what}: need {n} bytes, have {}", self.bytes.len() - self.pos),
            ));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }
}

fn f32s(bytes: &[u8]) -> Vec<f32> {
    bytes
        .chunks_exact(4)
        .map(|b| f32::from_le_bytes(b.try_into().unwrap()))
        .collect()
}

pub fn decode_images(bytes: &[u8]) -> Result<Vec<RangeImage>> {
    let mut cur = Cursor { bytes, pos: 0 };
    let mut images = Vec::new();
    while cur.pos < bytes.len() {
        let start = cur.pos;
        if cur.take(4, "magic")? != RIMG_MAGIC {
            return Err(Error::format("range image", start, "bad magic"));
        }
        let height = cur.u32("height")? as usize;
        let width = cur.u32("width")? as usize;
        let channels = cur.u32("channel count")? as usize;
        if channels != CHANNELS && channels != CHANNELS + 1 {
            return Err(Error::format(
                "range image",
                start + 12,
                format!("channel count {channels}, expected 5 or 6"),
            ));
        }
        let pixels = height
            .checked_mul(width)
            .filter(|&p| p > 0)
            .ok_or_else(|| Error::format("range image", start + 4, format!("bad size {height}x{width}")))?;
        let body = pixels
            .checked_mul(4 * channels + 1)
            .ok_or_else(|| Error::format("range image", start + 4, "size overflow"))?;
        if bytes.len() - cur.pos < body {
            return Err(Error::format(
                "range image",
                cur.pos,
                format!("truncated body: need {body} bytes, have {}", bytes.len() - cur.pos),
            ));
        }
        let body_start = cur.pos;
        let mut img = RangeImage::empty(height, width, channels > CHANNELS);
        for plane in img.channels.iter_mut() {
            *plane = f32s(cur.take(pixels * 4, "plane")?);
        }
        let label_values = (channels > CHANNELS)
            .then(|| cur.take(pixels * 4, "label plane").map(f32s))
            .transpose()?;
        let occ_start = cur.pos;
        for (i, &b) in cur.take(pixels, "occupancy")?.iter().enumerate() {
            img.occupancy[i] = match b {
                0 => false,
                1 => true,
                _ => return Err(Error::format("range image", occ_start + i, format!("occupancy byte {b}"))),
            };
        }
        for px in 0..pixels {
            let r = img.channels[Channel::Range as usize][px];
            if img.occupancy[px] && !(r > 0.0) {
                return Err(Error::format(
                    "range image",
                    body_start + (Channel::Range as usize * pixels + px) * 4,
                    format!("occupied pixel {px} has range {r}"),
                ));
            }
        }
        if let (Some(values), Some(plane)) = (label_values, img.label_plane.as_mut()) {
            for px in 0..pixels {
                if !img.occupancy[px] {
                    continue;
                }
                let v = values[px];
                if !(v >= 0.0 && v <= ClassId::MAX as f32 && v.fract() == 0.0) {
                    return Err(Error::format(
                        "range image",
                        body_start + (CHANNELS * pixels + px) * 4,
                        format!("label value {v} at pixel {px} is not a class id"),
                    ));
                }
                plane[px] = v as ClassId;
            }
        }
        images.push(img);
    }
    Ok(images)
}

pub fn read_images(path: impl AsRef<Path>) -> Result<Vec<RangeImage>> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_images(&bytes)
}

pub fn write_images(images: &[RangeImage], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, encode_images(images)).map_err(|e| Error::io(path, e))
}
