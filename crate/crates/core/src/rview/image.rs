use crate::pcio::ClassId;

pub const CHANNELS: usize = 5;

/// Range value stored at unoccupied pixels. Other channels hold 0 there.
pub const EMPTY_RANGE: f32 = -1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(usize)]
pub enum Channel {
    X = 0,
    Y = 1,
    Z = 2,
    Intensity = 3,
    Range = 4,
}

/// `H x W` raster with five row-major planes `(x, y, z, intensity, range)`,
/// an occupancy mask and an optional plane of train ids. Label values at
/// unoccupied pixels are unspecified (0).
#[derive(Debug, Clone, PartialEq)]
pub struct RangeImage {
    pub height: usize,
    pub width: usize,
    pub channels: [Vec<f32>; CHANNELS],
    pub occupancy: Vec<bool>,
    pub label_plane: Option<Vec<ClassId>>,
}

impl RangeImage {
    pub fn empty(height: usize, width: usize, labeled: bool) -> Self {
        let n = height * width;
        let mut channels: [Vec<f32>; CHANNELS] = Default::default();
        for (c, plane) in channels.iter_mut().enumerate() {
            let fill = if c == Channel::Range as usize { EMPTY_RANGE } else { 0.0 };
            *plane = vec![fill; n];
        }
        RangeImage {
            height,
            width,
            channels,
            occupancy: vec![false; n],
            label_plane: labeled.then(|| vec![0; n]),
        }
    }

    pub fn pixels(&self) -> usize {
        self.height * self.width
    }

    #[inline]
    pub fn index(&self, v: usize, u: usize) -> usize {
        v * self.width + u
    }

    pub fn plane(&self, channel: Channel) -> &[f32] {
        &self.channels[channel as usize]
    }

    pub fn ranges(&self) -> &[f32] {
        self.plane(Channel::Range)
    }

    pub fn pixel(&self, idx: usize) -> [f32; CHANNELS] {
        std::array::from_fn(|c| self.channels[c][idx])
    }

    pub fn set_pixel(&mut self, idx: usize, values: [f32; CHANNELS], label: Option<ClassId>) {
        for (plane, v) in self.channels.iter_mut().zip(values) {
            plane[idx] = v;
        }
        self.occupancy[idx] = true;
        if let (Some(plane), Some(l)) = (&mut self.label_plane, label) {
            plane[idx] = l;
        }
    }

    pub fn clear_pixel(&mut self, idx: usize) {
        for (c, plane) in self.channels.iter_mut().enumerate() {
            plane[idx] = if c == Channel::Range as usize { EMPTY_RANGE } else { 0.0 };
        }
        self.occupancy[idx] = false;
        if let Some(plane) = &mut self.label_plane {
            plane[idx] = 0;
        }
    }

    pub fn occupied_count(&self) -> usize {
        self.occupancy.iter().filter(|&&o| o).count()
    }

    /// Fraction of occupied pixels.
    pub fn occupancy_ratio(&self) -> f64 {
        if self.pixels() == 0 {
            0.0
        } else {
            self.occupied_count() as f64 / self.pixels() as f64
        }
    }

    pub fn same_shape(&self, other: &RangeImage) -> bool {
        self.height == other.height && self.width == other.width
    }
}
