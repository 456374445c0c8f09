//! Brute-force reference implementations and random instance generators
//! shared by the integration tests.
#![allow(dead_code)]

use rand::Rng;
use rangeseg::postproc::{KnnParams, NnriParams, ScoreVolume};
use rangeseg::rview::PointCoord;
use rangeseg::ClassId;

/// A random post-processing problem: `n` range planes with labels and
/// scores, plus query points.
#[derive(Debug, Clone)]
pub struct Instance {
    pub n: usize,
    pub h: usize,
    pub w: usize,
    pub c: usize,
    pub k: usize,
    /// `n * h * w`, `<= 0` where empty.
    pub ranges: Vec<f32>,
    pub labels: Vec<ClassId>,
    pub scores: ScoreVolume,
    pub points: Vec<PointCoord>,
}

fn quantized_range<R: Rng>(rng: &mut R) -> f32 {
    // Half-meter steps make equal ranges, and hence ties, common.
    rng.random_range(2..=60) as f32 * 0.5
}

pub fn random_instance<R: Rng>(rng: &mut R) -> Instance {
    let n = rng.random_range(1..=3);
    let h = rng.random_range(1..=16);
    let w = rng.random_range(1..=16);
    let c = rng.random_range(1..=5);
    let k = if rng.random_bool(0.5) { 1 } else { 3 };
    let p = h * w;
    let fill = rng.random_range(0.2..=1.0);

    let mut ranges = vec![-1.0f32; n * p];
    let mut labels = vec![0 as ClassId; n * p];
    let mut scores = ScoreVolume::zeros(n, c, h, w);
    for i in 0..n {
        for px in 0..p {
            if !rng.random_bool(fill) {
                continue;
            }
            ranges[i * p + px] = quantized_range(rng);
            labels[i * p + px] = rng.random_range(0..c) as ClassId;
            let mut raw: Vec<f32> = (0..c).map(|_| rng.random_range(0..4) as f32).collect();
            raw[rng.random_range(0..c)] += 1.0;
            let sum: f32 = raw.iter().sum();
            let dist: Vec<f32> = raw.iter().map(|r| r / sum).collect();
            scores.set_pixel(i, px, &dist);
        }
    }

    let count = rng.random_range(1..=2 * p);
    let points = (0..count)
        .map(|_| {
            let subcloud = rng.random_range(0..n);
            let (u, v) = (rng.random_range(0..w), rng.random_range(0..h));
            let own = ranges[subcloud * p + v * w + u];
            let range = if own > 0.0 && rng.random_bool(0.5) { own } else { quantized_range(rng) };
            PointCoord { subcloud: subcloud as u32, u: u as u32, v: v as u32, range }
        })
        .collect();
    Instance { n, h, w, c, k, ranges, labels, scores, points }
}

pub fn random_nnri_params<R: Rng>(rng: &mut R, k: usize) -> NnriParams {
    let alpha = [0.25, 0.5, 1.0, 2.0, 4.0][rng.random_range(0..5)];
    let (r_mean, r_std) = if rng.random_bool(0.5) {
        (Some(rng.random_range(5.0..20.0)), Some(rng.random_range(1.0..8.0)))
    } else {
        (None, None)
    };
    NnriParams { kernel: k, alpha, r_mean, r_std }
}

pub fn random_knn_params<R: Rng>(rng: &mut R, k: usize) -> KnnParams {
    KnnParams {
        kernel: k,
        votes: rng.random_range(1..=k * k),
        cutoff: [0.0, 0.5, 1.0, 3.0, 100.0][rng.random_range(0..5)],
        sigma: if rng.random_bool(0.5) { None } else { Some(rng.random_range(0.3..3.0)) },
    }
}

/// Window around `(v, u)` as image pixels `(row, col)`, row-major from the
/// top-left; `None` above or below the image. Columns wrap around.
pub fn window(v: usize, u: usize, h: usize, w: usize, k: usize) -> Vec<Option<(usize, usize)>> {
    let half = (k / 2) as i64;
    let mut out = Vec::with_capacity(k * k);
    for dy in 0..k as i64 {
        let row = v as i64 + dy - half;
        for dx in 0..k as i64 {
            let col = (u as i64 + dx - half).rem_euclid(w as i64) as usize;
            out.push(if row >= 0 && row < h as i64 { Some((row as usize, col)) } else { None });
        }
    }
    out
}

fn first_max(values: &[f64]) -> usize {
    let mut best = 0;
    for i in 1..values.len() {
        if values[i] > values[best] {
            best = i;
        }
    }
    best
}

fn mean_std(points: &[PointCoord]) -> (f64, f64) {
    let n = points.len() as f64;
    let mean = points.iter().map(|p| p.range as f64).sum::<f64>() / n;
    let var = points.iter().map(|p| (p.range as f64 - mean).powi(2)).sum::<f64>() / n;
    let std = var.sqrt();
    (mean, if std > 0.0 { std } else { 1.0 })
}

pub fn oracle_nnri(inst: &Instance, params: &NnriParams) -> Vec<ClassId> {
    let (h, w, c) = (inst.h, inst.w, inst.c);
    let (m, s) = mean_std(&inst.points);
    let r_mean = params.r_mean.unwrap_or(m);
    let r_std = params.r_std.unwrap_or(s);
    let at = |n: usize, row: usize, col: usize| n * h * w + row * w + col;
    inst.points
        .iter()
        .map(|pt| {
            let r = pt.range as f64;
            let d = params.alpha * ((r - r_mean) / r_std).exp();
            let mut sums = vec![0.0f64; c];
            let mut total = 0.0;
            for n in 0..inst.n {
                for (row, col) in window(pt.v as usize, pt.u as usize, h, w, params.kernel).into_iter().flatten() {
                    let nr = inst.ranges[at(n, row, col)];
                    if nr <= 0.0 {
                        continue;
                    }
                    let weight = 1.0 - (nr as f64 - r).abs().min(d) / d;
                    total += weight;
                    for (cls, sum) in sums.iter_mut().enumerate() {
                        *sum += weight * inst.scores.score(n, cls, row * w + col) as f64;
                    }
                }
            }
            if total == 0.0 {
                let own = row_col_scores(inst, pt.subcloud as usize, pt.v as usize, pt.u as usize);
                first_max(&own) as ClassId
            } else {
                first_max(&sums) as ClassId
            }
        })
        .collect()
}

fn row_col_scores(inst: &Instance, n: usize, row: usize, col: usize) -> Vec<f64> {
    (0..inst.c)
        .map(|cls| inst.scores.score(n, cls, row * inst.w + col) as f64)
        .collect()
}

/// Votes of image `n` for `pt`, or `None` if no neighbor qualifies.
fn oracle_votes(inst: &Instance, n: usize, pt: &PointCoord, params: &KnnParams) -> Option<Vec<f64>> {
    let (h, w) = (inst.h, inst.w);
    let r = pt.range as f64;
    let mut cands: Vec<(f64, ClassId)> = Vec::new();
    for (row, col) in window(pt.v as usize, pt.u as usize, h, w, params.kernel).into_iter().flatten() {
        let idx = n * h * w + row * w + col;
        let nr = inst.ranges[idx];
        if nr > 0.0 && (nr as f64 - r).abs() <= params.cutoff {
            cands.push(((nr as f64 - r).abs(), inst.labels[idx]));
        }
    }
    if cands.is_empty() {
        return None;
    }
    // Stable: equal range gaps keep window order.
    cands.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut votes = vec![0.0; inst.c];
    for (delta, label) in cands.into_iter().take(params.votes) {
        votes[label as usize] += match params.sigma {
            None => 1.0,
            Some(s) => (-(delta * delta) / (2.0 * s * s)).exp(),
        };
    }
    Some(votes)
}

fn own_or_ignore(inst: &Instance, n: usize, pt: &PointCoord, ignore: ClassId) -> ClassId {
    let idx = n * inst.h * inst.w + pt.v as usize * inst.w + pt.u as usize;
    if inst.ranges[idx] > 0.0 {
        inst.labels[idx]
    } else {
        ignore
    }
}

/// Single-image KNN on image `n` for every point.
pub fn oracle_knn_single(inst: &Instance, n: usize, params: &KnnParams, ignore: ClassId) -> Vec<ClassId> {
    inst.points
        .iter()
        .map(|pt| match oracle_votes(inst, n, pt, params) {
            Some(v) => first_max(&v) as ClassId,
            None => own_or_ignore(inst, n, pt, ignore),
        })
        .collect()
}

pub fn oracle_knn_multi(inst: &Instance, params: &KnnParams, ignore: ClassId) -> Vec<ClassId> {
    inst.points
        .iter()
        .map(|pt| {
            let per_image: Vec<Option<Vec<f64>>> = (0..inst.n).map(|n| oracle_votes(inst, n, pt, params)).collect();
            if per_image.iter().all(Option::is_none) {
                return own_or_ignore(inst, pt.subcloud as usize, pt, ignore);
            }
            let mut total = vec![0.0; inst.c];
            for votes in per_image {
                let votes = votes.unwrap_or_else(|| vec![0.0; inst.c]);
                for (t, v) in total.iter_mut().zip(votes) {
                    *t += v;
                }
            }
            first_max(&total) as ClassId
        })
        .collect()
}

/// Nearest label assignment, each point on its own sub-cloud's image.
pub fn oracle_nla(inst: &Instance, kernel: usize, ignore: ClassId) -> Vec<ClassId> {
    let (h, w) = (inst.h, inst.w);
    inst.points
        .iter()
        .map(|pt| {
            let n = pt.subcloud as usize;
            let mut best: Option<(f64, usize, usize)> = None;
            for (row, col) in window(pt.v as usize, pt.u as usize, h, w, kernel).into_iter().flatten() {
                let nr = inst.ranges[n * h * w + row * w + col];
                if nr <= 0.0 {
                    continue;
                }
                let cand = ((nr as f64 - pt.range as f64).abs(), row, col);
                let better = match best {
                    None => true,
                    Some(b) => cand.0 < b.0 || (cand.0 == b.0 && (cand.1, cand.2) < (b.1, b.2)),
                };
                if better {
                    best = Some(cand);
                }
            }
            best.map_or(ignore, |(_, row, col)| inst.labels[n * h * w + row * w + col])
        })
        .collect()
}

/// Labels of one synthetic frame under each post-processor.
pub struct ScenePredictions {
    pub truth: Vec<ClassId>,
    pub nnri: Vec<ClassId>,
    pub knn_multi: Vec<ClassId>,
    pub knn_single: Vec<ClassId>,
}

/// Generates scene `seed` on a 64 x 512 ray grid, projects it into 3
/// sub-clouds, runs the mock predictor and every post-processor with
/// default parameters.
pub fn scene_predictions(seed: u64, noise_rate: f64) -> ScenePredictions {
    use rangeseg::postproc::{knn_multi, knn_per_subcloud, nnri, LabeledPlane, RangeStack};
    use rangeseg::rview::{project_multi, unproject_coords};
    use rangeseg::synth::{generate_scene, mock_predict_images, MockPredictorConfig, SceneSpec, SYNTHETIC_CLASSES};

    let spec = SceneSpec { seed, ..Default::default() };
    let scene = generate_scene(&spec).unwrap();
    let (images, index) = project_multi(&scene.cloud, &spec.sensor, spec.beams, spec.azimuth_steps, 3).unwrap();
    let cfg = MockPredictorConfig { noise_rate, temperature: 1.0, seed: seed ^ 0x5eed };
    let mock = mock_predict_images(&images, SYNTHETIC_CLASSES, &cfg).unwrap();
    let ranges = RangeStack::from_images(&images).unwrap();
    let points = unproject_coords(&index);
    let planes = LabeledPlane::stack(&ranges, &mock.labels).unwrap();
    let knn = KnnParams::default();
    ScenePredictions {
        truth: scene.cloud.labels.clone().unwrap(),
        nnri: nnri(&mock.scores, &ranges, &points, &NnriParams::default()).unwrap(),
        knn_multi: knn_multi(&planes, &points, &knn, SYNTHETIC_CLASSES, 0).unwrap(),
        knn_single: knn_per_subcloud(&planes, &points, &knn, SYNTHETIC_CLASSES, 0).unwrap(),
    }
}
