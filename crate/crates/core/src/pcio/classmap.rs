use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pcio::ClassId;

const FREQUENCY_TOL: f64 = 1e-9;

/// One training class. Train ids are assigned by position in the map.
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ClassSpec {
    pub name: String,
    pub raw_ids: Vec<u16>,
    #[serde(default)]
    pub frequency: f64,
    /// Explicit paste/drop weight, overriding the frequency-derived one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<f64>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct ClassMapFile {
    ignore_id: ClassId,
    classes: Vec<ClassSpec>,
}

/// Mapping from raw dataset label ids to contiguous train ids, plus
/// per-class point frequencies.
///
/// ```toml
/// ignore_id = 0
///
/// [[classes]]
/// name = "unlabeled"
/// raw_ids = [0, 1]
///
/// [[classes]]
/// name = "car"
/// raw_ids = [10, 252]
/// frequency = 0.6
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct ClassMap {
    classes: Vec<ClassSpec>,
    ignore_id: ClassId,
    raw_to_train: HashMap<u16, ClassId>,
}

impl ClassMap {
    pub fn new(classes: Vec<ClassSpec>, ignore_id: ClassId) -> Result<Self> {
        if classes.is_empty() {
            return Err(Error::Config("class map has no classes".into()));
        }
        if classes.len() > ClassId::MAX as usize {
            return Err(Error::Config(format!("too many classes: {}", classes.len())));
        }
        if ignore_id as usize >= classes.len() {
            return Err(Error::Config(format!(
                "ignore_id {ignore_id} outside [0, {})",
                classes.len()
            )));
        }
        let mut raw_to_train = HashMap::new();
        for (train, class) in classes.iter().enumerate() {
            if class.raw_ids.is_empty() {
                return Err(Error::Config(format!("class '{}' has no raw ids", class.name)));
            }
            if !(class.frequency >= 0.0 && class.frequency <= 1.0) {
                return Err(Error::Config(format!(
                    "class '{}' frequency {} outside [0, 1]",
                    class.name, class.frequency
                )));
            }
            if let Some(w) = class.weight {
                if !(0.0..=1.0).contains(&w) {
                    return Err(Error::Config(format!(
                        "class '{}' weight {w} outside [0, 1]",
                        class.name
                    )));
                }
            }
            for &raw in &class.raw_ids {
                if let Some(prev) = raw_to_train.insert(raw, train as ClassId) {
                    return Err(Error::Config(format!(
                        "raw id {raw} assigned to both class {prev} and class {train}"
                    )));
                }
            }
        }
        let total: f64 = classes
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != ignore_id as usize)
            .map(|(_, c)| c.frequency)
            .sum();
        if (total - 1.0).abs() > FREQUENCY_TOL {
            return Err(Error::Config(format!(
                "class frequencies of non-ignored classes sum to {total}, expected 1"
            )));
        }
        Ok(ClassMap {
            classes,
            ignore_id,
            raw_to_train,
        })
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: ClassMapFile =
            toml::from_str(text).map_err(|e| Error::Config(format!("class map: {e}")))?;
        ClassMap::new(file.classes, file.ignore_id)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    /// Text accepted by [`ClassMap::from_toml_str`].
    pub fn to_toml_string(&self) -> String {
        let file = ClassMapFile { ignore_id: self.ignore_id, classes: self.classes.clone() };
        toml::to_string(&file).expect("class map serializes")
    }

    /// Number of train classes `C`.
    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn ignore_id(&self) -> ClassId {
        self.ignore_id
    }

    pub fn classes(&self) -> &[ClassSpec] {
        &self.classes
    }

    pub fn class_name(&self, id: ClassId) -> Option<&str> {
        self.classes.get(id as usize).map(|c| c.name.as_str())
    }

    pub fn class_by_name(&self, name: &str) -> Option<ClassId> {
        self.classes
            .iter()
            .position(|c| c.name == name)
            .map(|i| i as ClassId)
    }

    pub fn to_train(&self, raw: u16) -> Option<ClassId> {
        self.raw_to_train.get(&raw).copied()
    }

    /// Canonical raw id of a train class (the first listed).
    pub fn to_raw(&self, train: ClassId) -> Option<u16> {
        self.classes.get(train as usize).map(|c| c.raw_ids[0])
    }

    pub fn frequencies(&self) -> Vec<f64> {
        self.classes.iter().map(|c| c.frequency).collect()
    }

    /// Paste/drop weights in `[0, 1]`.
    ///
    /// Without an explicit override, `w_c = (1 / f_c) / max_k (1 / f_k)` over
    /// classes with positive frequency, i.e. `min_k f_k / f_c`. Classes with
    /// zero frequency get weight 1. The ignore class always gets 0.
    pub fn wpd_weights(&self) -> Vec<f64> {
        let min_freq = self
            .classes
            .iter()
            .enumerate()
            .filter(|(i, c)| *i != self.ignore_id as usize && c.frequency > 0.0)
            .map(|(_, c)| c.frequency)
            .fold(f64::INFINITY, f64::min);
        self.classes
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if i == self.ignore_id as usize {
                    0.0
                } else if let Some(w) = c.weight {
                    w
                } else if c.frequency > 0.0 {
                    min_freq / c.frequency
                } else {
                    1.0
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MAP: &str = r#"
ignore_id = 0

[[classes]]
name = "unlabeled"
raw_ids = [0, 1]

[[classes]]
name = "car"
raw_ids = [10]
frequency = 0.8

[[classes]]
name = "person"
raw_ids = [30, 31]
frequency = 0.2
"#;

    #[test]
    fn parses_and_maps() {
        let map = ClassMap::from_toml_str(MAP).unwrap();
        assert_eq!(map.num_classes(), 3);
        assert_eq!(map.to_train(10), Some(1));
        assert_eq!(map.to_train(31), Some(2));
        assert_eq!(map.to_train(999), None);
        assert_eq!(map.to_raw(2), Some(30));
        assert_eq!(map.class_by_name("car"), Some(1));
    }

    #[test]
    fn inverse_frequency_weights() {
        let map = ClassMap::from_toml_str(MAP).unwrap();
        let w = map.wpd_weights();
        assert_eq!(w[0], 0.0);
        assert!((w[1] - 0.25).abs() < 1e-12);
        assert!((w[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_frequency_sum() {
        let bad = MAP.replace("frequency = 0.2", "frequency = 0.3");
        assert!(matches!(ClassMap::from_toml_str(&bad), Err(Error::Config(_))));
    }

    #[test]
    fn rejects_duplicate_raw_id() {
        let bad = MAP.replace("raw_ids = [30, 31]", "raw_ids = [30, 10]");
        assert!(ClassMap::from_toml_str(&bad).is_err());
    }

    #[test]
    fn weight_override_wins() {
        let text = MAP.replace("frequency = 0.8", "frequency = 0.8\nweight = 0.5");
        let map = ClassMap::from_toml_str(&text).unwrap();
        assert_eq!(map.wpd_weights()[1], 0.5);
    }

    #[test]
    fn toml_text_round_trips() {
        let map = ClassMap::from_toml_str(MAP).unwrap();
        assert_eq!(ClassMap::from_toml_str(&map.to_toml_string()).unwrap(), map);
    }
}
