use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};

/// Vertical field of view, beam count and valid range of a spinning LiDAR.
/// Angles are stored in radians.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorSpec {
    pub name: String,
    pub theta_max: f64,
    pub theta_min: f64,
    pub beams: usize,
    pub range_min: f64,
    pub range_max: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SensorFile {
    name: String,
    theta_max_deg: f64,
    theta_min_deg: f64,
    beams: usize,
    range_min_m: f64,
    range_max_m: f64,
}

impl SensorSpec {
    pub fn new(
        name: impl Into<String>,
        theta_max_deg: f64,
        theta_min_deg: f64,
        beams: usize,
        range_min: f64,
        range_max: f64,
    ) -> Result<Self> {
        let spec = SensorSpec {
            name: name.into(),
            theta_max: theta_max_deg.to_radians(),
            theta_min: theta_min_deg.to_radians(),
            beams,
            range_min,
            range_max,
        };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        if !(self.theta_max > self.theta_min) {
            return Err(Error::Config(format!(
                "sensor '{}': theta_max must exceed theta_min",
                self.name
            )));
        }
        if !(self.range_min > 0.0 && self.range_max > self.range_min) {
            return Err(Error::Config(format!(
                "sensor '{}': need range_max > range_min > 0",
                self.name
            )));
        }
        if self.beams == 0 {
            return Err(Error::Config(format!("sensor '{}': beams must be >= 1", self.name)));
        }
        Ok(())
    }

    /// 64-beam sensor: vertical FoV -25..3 deg, range 2..50 m.
    pub fn semantic_kitti() -> Self {
        SensorSpec::new("semantickitti", 3.0, -25.0, 64, 2.0, 50.0).unwrap()
    }

    /// 32-beam sensor: vertical FoV -30..10 deg, range 2..80 m.
    pub fn nuscenes() -> Self {
        SensorSpec::new("nuscenes", 10.0, -30.0, 32, 2.0, 80.0).unwrap()
    }

    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "semantickitti" => Some(Self::semantic_kitti()),
            "nuscenes" => Some(Self::nuscenes()),
            _ => None,
        }
    }

    /// Vertical field of view in radians.
    pub fn fov(&self) -> f64 {
        self.theta_max - self.theta_min
    }

    /// Parses the key-value form:
    ///
    /// ```toml
    /// name = "semantickitti"
    /// theta_max_deg = 3.0
    /// theta_min_deg = -25.0
    /// beams = 64
    /// range_min_m = 2.0
    /// range_max_m = 50.0
    /// ```
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let f: SensorFile =
            toml::from_str(text).map_err(|e| Error::Config(format!("sensor spec: {e}")))?;
        SensorSpec::new(
            f.name,
            f.theta_max_deg,
            f.theta_min_deg,
            f.beams,
            f.range_min_m,
            f.range_max_m,
        )
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_documented_keys() {
        let spec = SensorSpec::from_toml_str(
            "name = \"kitti\"\ntheta_max_deg = 3.0\ntheta_min_deg = -25.0\nbeams = 64\nrange_min_m = 2.0\nrange_max_m = 50.0\n",
        )
        .unwrap();
        assert_eq!(spec, SensorSpec { name: "kitti".into(), ..SensorSpec::semantic_kitti() });
    }

    #[test]
    fn rejects_inverted_fov() {
        assert!(SensorSpec::new("x", -25.0, 3.0, 64, 2.0, 50.0).is_err());
        assert!(SensorSpec::new("x", 3.0, -25.0, 0, 2.0, 50.0).is_err());
        assert!(SensorSpec::new("x", 3.0, -25.0, 64, 0.0, 50.0).is_err());
    }

    #[test]
    fn presets() {
        let n = SensorSpec::preset("nuscenes").unwrap();
        assert_eq!(n.beams, 32);
        assert!((n.fov().to_degrees() - 40.0).abs() < 1e-9);
        assert!(SensorSpec::preset("velodyne-vlp16").is_none());
    }
}
