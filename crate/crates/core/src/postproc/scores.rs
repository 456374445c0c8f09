//! Per-class score volumes and their binary exchange format.
//!
//! ```text
//! magic      4 bytes  "SVOL"
//! N, C, H, W u32 LE each
//! scores     N * C * H * W f32 LE, index ((n * C + c) * H + v) * W + u
//! occupancy  N * H * W bytes, 0 or 1
//! ```
//!
//! Any framework exporting softmax outputs in this layout can feed the
//! post-processors directly.

use std::path::Path;

use crate::error::{Error, Result};
use crate::pcio::ClassId;

pub const SVOL_MAGIC: &[u8; 4] = b"SVOL";
const SUM_TOL: f32 = 1e-5;

/// `N x C x H x W` non-negative class scores. At occupied pixels scores sum
/// to 1; unoccupied pixels hold zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreVolume {
    pub subclouds: usize,
    pub classes: usize,
    pub height: usize,
    pub width: usize,
    pub scores: Vec<f32>,
    pub occupancy: Vec<bool>,
}

impl ScoreVolume {
    pub fn zeros(subclouds: usize, classes: usize, height: usize, width: usize) -> Self {
        ScoreVolume {
            subclouds,
            classes,
            height,
            width,
            scores: vec![0.0; subclouds * classes * height * width],
            occupancy: vec![false; subclouds * height * width],
        }
    }

    pub fn pixels(&self) -> usize {
        self.height * self.width
    }

    #[inline]
    pub fn score(&self, n: usize, c: usize, px: usize) -> f32 {
        self.scores[(n * self.classes + c) * self.pixels() + px]
    }

    pub fn is_occupied(&self, n: usize, px: usize) -> bool {
        self.occupancy[n * self.pixels() + px]
    }

    /// Writes a distribution at pixel `px` of sub-cloud `n` and marks it occupied.
    pub fn set_pixel(&mut self, n: usize, px: usize, dist: &[f32]) {
        assert_eq!(dist.len(), self.classes);
        let p = self.pixels();
        for (c, &s) in dist.iter().enumerate() {
            self.scores[(n * self.classes + c) * p + px] = s;
        }
        self.occupancy[n * p + px] = true;
    }

    /// Concatenates per-sub-cloud volumes along the first axis.
    pub fn stack(slices: Vec<ScoreVolume>) -> Result<Self> {
        let first = slices.first().ok_or_else(|| Error::Shape("no score slices".into()))?;
        let (c, h, w) = (first.classes, first.height, first.width);
        if slices.iter().any(|s| (s.classes, s.height, s.width) != (c, h, w)) {
            return Err(Error::Shape("score slices differ in shape".into()));
        }
        let mut out = ScoreVolume::zeros(0, c, h, w);
        for s in slices {
            out.subclouds += s.subclouds;
            out.scores.extend(s.scores);
            out.occupancy.extend(s.occupancy);
        }
        Ok(out)
    }

    /// Per-pixel argmax labels, `N * H * W`, ties to the lower class id.
    /// Unoccupied pixels get 0.
    pub fn argmax_labels(&self) -> Vec<ClassId> {
        let p = self.pixels();
        let mut out = vec![0; self.subclouds * p];
        for n in 0..self.subclouds {
            for px in 0..p {
                if !self.is_occupied(n, px) {
                    continue;
                }
                let mut best = 0;
                for c in 1..self.classes {
                    if self.score(n, c, px) > self.score(n, best, px) {
                        best = c;
                    }
                }
                out[n * p + px] = best as ClassId;
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.pixels();
        if self.classes == 0 || p == 0 || self.subclouds == 0 {
            return Err(Error::Shape(format!(
                "empty score volume {}x{}x{}x{}",
                self.subclouds, self.classes, self.height, self.width
            )));
        }
        if self.scores.len() != self.subclouds * self.classes * p || self.occupancy.len() != self.subclouds * p {
            return Err(Error::Shape("score volume buffers do not match its shape".into()));
        }
        for n in 0..self.subclouds {
            for px in 0..p {
                let mut sum = 0.0f32;
                for c in 0..self.classes {
                    let s = self.score(n, c, px);
                    if !(s >= 0.0 && s.is_finite()) {
                        return Err(Error::Consistency(format!("score {s} at sub-cloud {n} pixel {px}")));
                    }
                    sum += s;
                }
                let occupied = self.is_occupied(n, px);
                if occupied && (sum - 1.0).abs() > SUM_TOL {
                    return Err(Error::Consistency(format!(
                        "scores at sub-cloud {n} pixel {px} sum to {sum}"
                    )));
                }
                if !occupied && sum != 0.0 {
                    return Err(Error::Consistency(format!(
                        "unoccupied pixel {px} of sub-cloud {n} has non-zero scores"
                    )));
                }
            }
        }
        Ok(())
    }
}

pub fn encode_scores(volume: &ScoreVolume) -> Vec<u8> {
    let mut out = Vec::with_capacity(20 + volume.scores.len() * 4 + volume.occupancy.len());
    out.extend_from_slice(SVOL_MAGIC);
    for d in [volume.subclouds, volume.classes, volume.height, volume.width] {
        out.extend_from_slice(&(d as u32).to_le_bytes());
    }
    for s in &volume.scores {
        out.extend_from_slice(&s.to_le_bytes());
    }
    out.extend(volume.occupancy.iter().map(|&o| o as u8));
    out
}

/// Decodes and validates a score volume.
pub fn decode_scores(bytes: &[u8]) -> Result<ScoreVolume> {
    if bytes.len() < 20 {
        return Err(Error::format("score volume", bytes.len(), "truncated header"));
    }
    if &bytes[..4] != SVOL_MAGIC {
        return Err(Error::format("score volume", 0, "bad magic"));
    }
    let dim = |k: usize| u32::from_le_bytes(bytes[4 + 4 * k..8 + 4 * k].try_into().unwrap()) as usize;
    let (n, c, h, w) = (dim(0), dim(1), dim(2), dim(3));
    let overflow = || Error::format("score volume", 4, "size overflow");
    let planes = n.checked_mul(h).and_then(|x| x.checked_mul(w)).ok_or_else(overflow)?;
    let count = planes.checked_mul(c).ok_or_else(overflow)?;
    let expected = count
        .checked_mul(4)
        .and_then(|x| x.checked_add(planes))
        .and_then(|x| x.checked_add(20))
        .ok_or_else(overflow)?;
    if bytes.len() != expected {
        return Err(Error::format(
            "score volume",
            bytes.len().min(expected),
            format!("expected {expected} bytes for {n}x{c}x{h}x{w}, found {}", bytes.len()),
        ));
    }
    let scores = bytes[20..20 + count * 4]
        .chunks_exact(4)
        .map(|b| f32::from_le_bytes(b.try_into().unwrap()))
        .collect();
    let occ_start = 20 + count * 4;
    let mut occupancy = Vec::with_capacity(planes);
    for (i, &b) in bytes[occ_start..].iter().enumerate() {
        occupancy.push(match b {
            0 => false,
            1 => true,
            _ => return Err(Error::format("score volume", occ_start + i, format!("occupancy byte {b}"))),
        });
    }
    let volume = ScoreVolume {
        subclouds: n,
        classes: c,
        height: h,
        width: w,
        scores,
        occupancy,
    };
    volume.validate()?;
    Ok(volume)
}

pub fn read_scores(path: impl AsRef<Path>) -> Result<ScoreVolume> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_scores(&bytes)
}

pub fn write_scores(volume: &ScoreVolume, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, encode_scores(volume)).map_err(|e| Error::io(path, e))
}
