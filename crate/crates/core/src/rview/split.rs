use crate::error::{Error, Result};
use crate::pcio::PointCloud;

/// Result of a modulo split: `parts[i]` holds the points whose original
/// index `j` satisfies `j % N == i`, in original order, and `members[i]`
/// lists those original indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Split {
    pub parts: Vec<PointCloud>,
    pub members: Vec<Vec<usize>>,
}

/// Splits a cloud into `n` interleaved sub-clouds.
///
/// File order is assumed to be firing order, so consecutive points are
/// angular neighbors and every sub-cloud covers the full field of view.
/// Shuffled clouds are split all the same, without that guarantee.
pub fn split_cloud(cloud: &PointCloud, n: usize) -> Result<Split> {
    if n == 0 {
        return Err(Error::Param("partition count must be >= 1".into()));
    }
    if n > cloud.len() {
        return Err(Error::Param(format!(
            "partition count {n} exceeds point count {}",
            cloud.len()
        )));
    }
    let members: Vec<Vec<usize>> = (0..n).map(|i| (i..cloud.len()).step_by(n).collect()).collect();
    let parts = members.iter().map(|m| cloud.select(m)).collect();
    Ok(Split { parts, members })
}
