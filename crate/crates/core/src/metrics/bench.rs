use std::hint::black_box;
use std::time::Instant;

/// Iterations discarded before timing starts.
pub const DEFAULT_WARMUP: usize = 100;
/// Iterations averaged after warm-up.
pub const DEFAULT_MEASURED: usize = 100;

/// Wall-clock statistics of one stage, milliseconds.
#[derive(Debug, Clone, PartialEq)]
pub struct StageTiming {
    pub name: String,
    pub mean_ms: f64,
    pub min_ms: f64,
    pub max_ms: f64,
}

/// Runs `stage` `warmup` times untimed, then `measured` times timed.
///
/// # Panics
///
/// If `measured` is zero.
pub fn bench_stage<T>(name: &str, warmup: usize, measured: usize, mut stage: impl FnMut() -> T) -> StageTiming {
    assert!(measured >= 1, "need at least one measured iteration");
    for _ in 0..warmup {
        black_box(stage());
    }
    let mut times = Vec::with_capacity(measured);
    for _ in 0..measured {
        let start = Instant::now();
        black_box(stage());
        times.push(start.elapsed().as_secs_f64() * 1e3);
    }
    let min = times.iter().copied().fold(f64::INFINITY, f64::min);
    let max = times.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mean = (times.iter().sum::<f64>() / measured as f64).clamp(min, max);
    StageTiming {
        name: name.to_string(),
        mean_ms: mean,
        min_ms: min,
        max_ms: max,
    }
}

/// Timings of several stages plus the configuration they ran under.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub warmup_iters: usize,
    pub measured_iters: usize,
    pub config: Vec<(String, String)>,
    pub stages: Vec<StageTiming>,
}

impl BenchReport {
    pub fn new(warmup_iters: usize, measured_iters: usize) -> Self {
        BenchReport {
            warmup_iters,
            measured_iters,
            config: Vec::new(),
            stages: Vec::new(),
        }
    }

    pub fn echo(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.config.push((key.to_string(), value.to_string()));
        self
    }

    pub fn run<T>(&mut self, name: &str, stage: impl FnMut() -> T) -> &StageTiming {
        let t = bench_stage(name, self.warmup_iters, self.measured_iters, stage);
        self.stages.push(t);
        self.stages.last().unwrap()
    }

    pub fn stage(&self, name: &str) -> Option<&StageTiming> {
        self.stages.iter().find(|s| s.name == name)
    }

    /// `stage,mean_ms,min_ms,max_ms,warmup,measured,<config keys>` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("stage,mean_ms,min_ms,max_ms,warmup,measured");
        for (k, _) in &self.config {
            out.push(',');
            out.push_str(k);
        }
        out.push('\n');
        for s in &self.stages {
            out.push_str(&format!(
                "{},{:.6},{:.6},{:.6},{},{}",
                s.name, s.mean_ms, s.min_ms, s.max_ms, self.warmup_iters, self.measured_iters
            ));
            for (_, v) in &self.config {
                out.push(',');
                out.push_str(v);
            }
            out.push('\n');
        }
        out
    }
}
