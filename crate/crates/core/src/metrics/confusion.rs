use std::ops::{Add, AddAssign};

use crate::error::{Error, Result};
use crate::pcio::ClassId;

/// `C x C` point counts, rows = ground truth, columns = prediction.
///
/// Points whose ground truth is the ignore class are not counted, so that
/// row stays zero. A prediction of the ignore class is still a miss for
/// the true class; the ignore class itself is never scored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    classes: usize,
    ignore_id: Option<ClassId>,
    counts: Vec<u64>,
}

impl ConfusionMatrix {
    pub fn new(classes: usize, ignore_id: Option<ClassId>) -> Self {
        ConfusionMatrix {
            classes,
            ignore_id,
            counts: vec![0; classes * classes],
        }
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn ignore_id(&self) -> Option<ClassId> {
        self.ignore_id
    }

    pub fn get(&self, gt: usize, pred: usize) -> u64 {
        self.counts[gt * self.classes + pred]
    }

    /// Number of evaluated points.
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Row-major counts.
    pub fn rows(&self) -> Vec<Vec<u64>> {
        self.counts.chunks(self.classes).map(|r| r.to_vec()).collect()
    }

    pub fn accumulate(&mut self, pred: &[ClassId], gt: &[ClassId]) -> Result<()> {
        if pred.len() != gt.len() {
            return Err(Error::Consistency(format!(
                "{} predictions for {} ground-truth labels",
                pred.len(),
                gt.len()
            )));
        }
        let c = self.classes;
        if let Some(&bad) = pred.iter().chain(gt).find(|&&l| l as usize >= c) {
            return Err(Error::Param(format!("label {bad} outside [0, {c})")));
        }
        for (&p, &g) in pred.iter().zip(gt) {
            if Some(g) == self.ignore_id {
                continue;
            }
            self.counts[g as usize * c + p as usize] += 1;
        }
        Ok(())
    }

    /// Per-class IoU and accuracy plus their means.
    ///
    /// `IoU_c = TP / (TP + FP + FN)`, `Acc_c = TP / (TP + FN)`. Classes with
    /// `TP + FP + FN = 0`, and the ignore class, have no score and are left
    /// out of the means; a class absent from the ground truth but predicted
    /// has IoU 0 and no accuracy.
    pub fn scores(&self) -> ClassScores {
        let c = self.classes;
        let mut iou = vec![None; c];
        let mut acc = vec![None; c];
        for k in 0..c {
            if Some(k as ClassId) == self.ignore_id {
                continue;
            }
            let tp = self.get(k, k);
            let row: u64 = (0..c).map(|p| self.get(k, p)).sum();
            let col: u64 = (0..c).map(|g| self.get(g, k)).sum();
            let (fn_, fp) = (row - tp, col - tp);
            let union = tp + fp + fn_;
            if union == 0 {
                continue;
            }
            iou[k] = Some(tp as f64 / union as f64);
            if row > 0 {
                acc[k] = Some(tp as f64 / row as f64);
            }
        }
        let mean = |v: &[Option<f64>]| {
            let vals: Vec<f64> = v.iter().flatten().copied().collect();
            if vals.is_empty() {
                0.0
            } else {
                vals.iter().sum::<f64>() / vals.len() as f64
            }
        };
        let overall = {
            let diag: u64 = (0..c).map(|k| self.get(k, k)).sum();
            let total = self.total();
            if total == 0 {
                0.0
            } else {
                diag as f64 / total as f64
            }
        };
        ClassScores {
            miou: mean(&iou),
            macc: mean(&acc),
            iou,
            acc,
            overall_accuracy: overall,
        }
    }
}

impl AddAssign<&ConfusionMatrix> for ConfusionMatrix {
    fn add_assign(&mut self, rhs: &ConfusionMatrix) {
        assert_eq!(self.classes, rhs.classes, "confusion matrices differ in class count");
        for (a, b) in self.counts.iter_mut().zip(&rhs.counts) {
            *a += b;
        }
    }
}

impl Add for ConfusionMatrix {
    type Output = ConfusionMatrix;

    fn add(mut self, rhs: ConfusionMatrix) -> ConfusionMatrix {
        self += &rhs;
        self
    }
}

/// Scores derived from a [`ConfusionMatrix`]. `None` marks an unscored class.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassScores {
    pub iou: Vec<Option<f64>>,
    pub acc: Vec<Option<f64>>,
    pub miou: f64,
    pub macc: f64,
    /// Fraction of evaluated points labeled correctly.
    pub overall_accuracy: f64,
}

pub fn confusion(pred: &[ClassId], gt: &[ClassId], classes: usize, ignore_id: Option<ClassId>) -> Result<ConfusionMatrix> {
    let mut m = ConfusionMatrix::new(classes, ignore_id);
    m.accumulate(pred, gt)?;
    Ok(m)
}
