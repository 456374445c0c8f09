use crate::rview::{ProjectionIndex, RangeImage};

/// Projected-point counts for one partition.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionValidity {
    pub total_points: usize,
    pub projected_points: usize,
    pub validity: f64,
    pub occupancy_2d: f64,
}

/// 3D validity (fraction of points that own a pixel) and 2D occupancy of a
/// projection, overall and per sub-cloud.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidityReport {
    pub total_points: usize,
    pub projected_points: usize,
    pub validity: f64,
    pub occupancy_2d: f64,
    pub per_subcloud: Vec<PartitionValidity>,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// `index` and `images` must come from the same projection call.
pub fn validity_stats(index: &ProjectionIndex, images: &[RangeImage]) -> ValidityReport {
    let n = index.subclouds.max(images.len());
    let mut totals = vec![0usize; n];
    let mut winners = vec![0usize; n];
    for (&s, &w) in index.subcloud.iter().zip(&index.winner) {
        totals[s as usize] += 1;
        winners[s as usize] += w as usize;
    }
    let per_subcloud: Vec<PartitionValidity> = (0..n)
        .map(|i| {
            let occupied = images.get(i).map_or(0, |im| im.occupied_count());
            let pixels = images.get(i).map_or(0, |im| im.pixels());
            PartitionValidity {
                total_points: totals[i],
                projected_points: winners[i],
                validity: ratio(winners[i], totals[i]),
                occupancy_2d: ratio(occupied, pixels),
            }
        })
        .collect();
    let projected: usize = winners.iter().sum();
    let occupied: usize = images.iter().map(|im| im.occupied_count()).sum();
    let pixels: usize = images.iter().map(|im| im.pixels()).sum();
    ValidityReport {
        total_points: index.len(),
        projected_points: projected,
        validity: ratio(projected, index.len()),
        occupancy_2d: ratio(occupied, pixels),
        per_subcloud,
    }
}

impl ValidityReport {
    /// Mean 2D occupancy over sub-clouds.
    pub fn mean_subcloud_occupancy(&self) -> f64 {
        if self.per_subcloud.is_empty() {
            return 0.0;
        }
        self.per_subcloud.iter().map(|p| p.occupancy_2d).sum::<f64>() / self.per_subcloud.len() as f64
    }
}
