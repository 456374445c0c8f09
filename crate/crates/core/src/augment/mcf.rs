use crate::error::{Error, Result};
use crate::pcio::ClassId;
use crate::rview::{Channel, RangeImage};

/// Empties every occupied pixel labeled `ignore_id`.
pub fn clean_unlabeled(image: &RangeImage, ignore_id: ClassId) -> Result<RangeImage> {
    let labels = image
        .label_plane
        .as_ref()
        .ok_or_else(|| Error::Param("clean_unlabeled needs a label plane".into()))?;
    let mut out = image.clone();
    for (px, &l) in labels.iter().enumerate() {
        if image.occupancy[px] && l == ignore_id {
            out.clear_pixel(px);
        }
    }
    Ok(out)
}

/// Multi-Cloud Fusion: fills the empty pixels of `images[target]` from the
/// sibling images at the same pixel. Among occupied siblings the one with
/// the smallest range donates all channels and its label (ties to the lower
/// image index). Occupied pixels are left untouched.
pub fn mcf(images: &[RangeImage], target: usize) -> Result<RangeImage> {
    let base = images
        .get(target)
        .ok_or_else(|| Error::Param(format!("target {target} outside {} images", images.len())))?;
    if images.iter().any(|im| !im.same_shape(base)) {
        return Err(Error::Shape("range images differ in size".into()));
    }
    if images.iter().any(|im| im.label_plane.is_some() != base.label_plane.is_some()) {
        return Err(Error::Shape("label planes present on some images only".into()));
    }
    let mut out = base.clone();
    for px in 0..base.pixels() {
        if base.occupancy[px] {
            continue;
        }
        let donor = images
            .iter()
            .enumerate()
            .filter(|(j, im)| *j != target && im.occupancy[px])
            .min_by(|(ja, a), (jb, b)| {
                let ra = a.channels[Channel::Range as usize][px];
                let rb = b.channels[Channel::Range as usize][px];
                ra.total_cmp(&rb).then(ja.cmp(jb))
            });
        if let Some((_, im)) = donor {
            let label = im.label_plane.as_ref().map(|l| l[px]);
            out.set_pixel(px, im.pixel(px), label);
        }
    }
    Ok(out)
}
