//! Segmentation scores and latency measurement.

mod bench;
mod confusion;

pub use bench::{bench_stage, BenchReport, StageTiming, DEFAULT_MEASURED, DEFAULT_WARMUP};
pub use confusion::{confusion, ClassScores, ConfusionMatrix};
