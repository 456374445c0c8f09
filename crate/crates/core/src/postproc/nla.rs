use crate::error::Result;
use crate::pcio::ClassId;
use crate::postproc::knn::{check_points_uv, per_subcloud};
use crate::postproc::{check_kernel, LabeledPlane};
use crate::rview::PointCoord;

/// Nearest Label Assignment: each point takes the label of the occupied
/// window pixel whose range is closest to its own. Ties go to the lower
/// `(row, col)`; an empty window yields `ignore_id`.
pub fn nla(plane: &LabeledPlane, points: &[PointCoord], kernel: usize, ignore_id: ClassId) -> Result<Vec<ClassId>> {
    check_kernel(kernel)?;
    check_points_uv(points, plane.height, plane.width)?;
    let (h, w) = (plane.height as isize, plane.width as isize);
    let pad = (kernel / 2) as isize;
    Ok(points
        .iter()
        .map(|pt| {
            let r = pt.range as f64;
            let mut best: Option<(f64, usize)> = None;
            for dy in -pad..=pad {
                let row = pt.v as isize + dy;
                if row < 0 || row >= h {
                    continue;
                }
                for dx in -pad..=pad {
                    let col = (pt.u as isize + dx).rem_euclid(w);
                    let px = (row * w + col) as usize;
                    let nr = plane.ranges[px];
                    if nr <= 0.0 {
                        continue;
                    }
                    let cand = ((nr as f64 - r).abs(), px);
                    if best.is_none_or(|b| cand < b) {
                        best = Some(cand);
                    }
                }
            }
            best.map_or(ignore_id, |(_, px)| plane.labels[px])
        })
        .collect())
}

/// Runs [`nla`] for every point on its own sub-cloud's image.
pub fn nla_per_subcloud(
    planes: &[LabeledPlane],
    points: &[PointCoord],
    kernel: usize,
    ignore_id: ClassId,
) -> Result<Vec<ClassId>> {
    per_subcloud(planes, points, |plane, pts| nla(plane, pts, kernel, ignore_id))
}
