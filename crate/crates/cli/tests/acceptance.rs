//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.
//!
//! Set `RANGESEG_REAL_FRAME` to a 64-beam SemanticKITTI `.bin` file to add
//! the real-frame resolution-gain check to criterion 7.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rangeseg::augment::mcf;
use rangeseg::metrics::{bench_stage, confusion, ConfusionMatrix};
use rangeseg::postproc::{
    knn_multi, knn_single, nla_per_subcloud, nnri, KnnParams, LabeledPlane, NnriParams, RangeStack,
};
use rangeseg::rview::{project_multi, split_cloud, unproject_coords, validity_stats, Channel};
use rangeseg::synth::{generate_scene, mock_predict_images, MockPredictorConfig, SceneSpec, SYNTHETIC_CLASSES};
use rangeseg::{ClassId, PointCloud, SensorSpec};

use common::*;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn stack_of(inst: &Instance) -> RangeStack {
    RangeStack { subclouds: inst.n, height: inst.h, width: inst.w, ranges: inst.ranges.clone() }
}

fn oracle_equivalence() -> Check {
    const PER_METHOD: usize = 200;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut mismatches = [0usize; 4];
    for _ in 0..PER_METHOD {
        let inst = random_instance(&mut rng);
        let stack = stack_of(&inst);
        let planes = LabeledPlane::stack(&stack, &inst.labels).unwrap();
        let nnri_p = random_nnri_params(&mut rng, inst.k);
        let knn_p = random_knn_params(&mut rng, inst.k);
        let count = |a: Vec<ClassId>, b: Vec<ClassId>| a.iter().zip(&b).filter(|(x, y)| x != y).count();

        mismatches[0] += count(nnri(&inst.scores, &stack, &inst.points, &nnri_p).unwrap(), oracle_nnri(&inst, &nnri_p));
        let single = knn_single(&planes[0], &inst.points, &knn_p, inst.c, 0).unwrap();
        mismatches[1] += count(single, oracle_knn_single(&inst, 0, &knn_p, 0));
        mismatches[2] += count(knn_multi(&planes, &inst.points, &knn_p, inst.c, 0).unwrap(), oracle_knn_multi(&inst, &knn_p, 0));
        mismatches[3] += count(nla_per_subcloud(&planes, &inst.points, inst.k, 0).unwrap(), oracle_nla(&inst, inst.k, 0));
    }
    let detail = format!(
        "{PER_METHOD} instances each; mismatched labels nnri {}, knn_single {}, knn_multi {}, nla {}",
        mismatches[0], mismatches[1], mismatches[2], mismatches[3]
    );
    ensure(mismatches.iter().all(|&m| m == 0), || detail.clone())?;
    Ok(detail)
}

fn random_cloud<R: Rng>(rng: &mut R, n: usize) -> PointCloud {
    let mut c = PointCloud::with_capacity(n, true);
    while c.len() < n {
        let (x, y, z): (f32, f32, f32) = (rng.random_range(-70.0..70.0), rng.random_range(-70.0..70.0), rng.random_range(-5.0..4.0));
        if x * x + y * y + z * z > 1e-4 {
            // Some duplicated points force equal-range contention.
            let reps = if rng.random_bool(0.05) { 2 } else { 1 };
            for _ in 0..reps.min(n - c.len()) {
                c.push(x, y, z, rng.random(), Some(rng.random_range(0..4)));
            }
        }
    }
    c
}

fn partition_projection() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let spec = SensorSpec::semantic_kitti();
    for case in 0..1000 {
        let len = rng.random_range(1..600);
        let cloud = random_cloud(&mut rng, len);
        let n = rng.random_range(1..=cloud.len().min(6));
        let (h, w) = (rng.random_range(1..=64), rng.random_range(1..=512));

        let split = split_cloud(&cloud, n).unwrap();
        let mut seen = vec![0u8; cloud.len()];
        split.members.iter().flatten().for_each(|&j| seen[j] += 1);
        ensure(seen.iter().all(|&s| s == 1), || format!("case {case}: split is not a partition"))?;
        let sizes: Vec<usize> = split.parts.iter().map(PointCloud::len).collect();
        ensure(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1, || format!("case {case}: sizes {sizes:?}"))?;

        let first = project_multi(&cloud, &spec, h, w, n).unwrap();
        ensure(first == project_multi(&cloud, &spec, h, w, n).unwrap(), || format!("case {case}: projection differs on rerun"))?;
        let (images, index) = first;
        for j in 0..index.len() {
            let im = &images[index.subcloud[j] as usize];
            let px = im.index(index.vs[j] as usize, index.us[j] as usize);
            ensure(index.ranges[j] >= im.ranges()[px], || format!("case {case}: point {j} closer than its pixel's winner"))?;
        }
        for im in &images {
            for px in (0..im.pixels()).filter(|&px| im.occupancy[px]) {
                let [x, y, z] = [Channel::X, Channel::Y, Channel::Z].map(|c| im.plane(c)[px] as f64);
                let norm = (x * x + y * y + z * z).sqrt();
                let r = im.plane(Channel::Range)[px] as f64;
                ensure((r - norm).abs() <= 1e-5 * norm, || format!("case {case}: range {r} vs norm {norm}"))?;
            }
        }
    }
    Ok("1000 clouds: partition, determinism, contention and range-norm checks hold".into())
}

struct SceneScores {
    aggregate: ConfusionMatrix,
    mean_miou: [f64; 3],
}

/// Mean per-scene mIoU for nnri, knn_multi and per-sub-cloud knn, plus
/// the aggregate NNRI confusion matrix, over 20 scenes.
fn score_scenes(noise: f64) -> SceneScores {
    let mut aggregate = ConfusionMatrix::new(SYNTHETIC_CLASSES, Some(0));
    let mut mean_miou = [0.0; 3];
    for seed in 0..20 {
        let p = scene_predictions(seed, noise);
        for (i, pred) in [&p.nnri, &p.knn_multi, &p.knn_single].into_iter().enumerate() {
            let m = confusion(pred, &p.truth, SYNTHETIC_CLASSES, Some(0)).unwrap();
            mean_miou[i] += m.scores().miou / 20.0;
            if i == 0 {
                aggregate += &m;
            }
        }
    }
    SceneScores { aggregate, mean_miou }
}

fn end_to_end() -> Check {
    let s = score_scenes(0.0).aggregate.scores();
    let detail = format!("20 scenes, noise-free: accuracy {:.4} (>= 0.97), mIoU {:.4} (>= 0.95)", s.overall_accuracy, s.miou);
    ensure(s.overall_accuracy >= 0.97 && s.miou >= 0.95, || detail.clone())?;
    Ok(detail)
}

fn postprocessor_ordering() -> Check {
    let [a, b, c] = score_scenes(0.1).mean_miou;
    let detail = format!("noise 0.1, mean mIoU: nnri {a:.4} >= knn_multi {b:.4} >= knn_single {c:.4}");
    ensure(a >= b && b >= c, || detail.clone())?;
    Ok(detail)
}

fn latency_ordering() -> Check {
    let spec = SceneSpec { seed: 0, ..Default::default() };
    let scene = generate_scene(&spec).unwrap();
    let (images, index) = project_multi(&scene.cloud, &spec.sensor, 64, 512, 3).unwrap();
    let mock = mock_predict_images(&images, SYNTHETIC_CLASSES, &MockPredictorConfig::default()).unwrap();
    let stack = RangeStack::from_images(&images).unwrap();
    let points = unproject_coords(&index);
    let planes = LabeledPlane::stack(&stack, &mock.labels).unwrap();
    let knn_p = KnnParams::default();
    let unit = KnnParams { sigma: None, ..KnnParams::default() };

    let t_nnri = bench_stage("nnri", 100, 100, || nnri(&mock.scores, &stack, &points, &NnriParams::default()).unwrap());
    let t_knn = bench_stage("knn-multi", 100, 100, || knn_multi(&planes, &points, &knn_p, SYNTHETIC_CLASSES, 0).unwrap());
    let t_unit = bench_stage("knn-multi-unit", 100, 100, || knn_multi(&planes, &points, &unit, SYNTHETIC_CLASSES, 0).unwrap());
    let ratio = t_nnri.mean_ms / t_knn.mean_ms;
    let detail = format!(
        "64x512, N=3, k=3, {} points: nnri {:.3} ms, knn_multi {:.3} ms, ratio {ratio:.3} (<= 0.75); unit-vote knn_multi {:.3} ms, ratio {:.3}",
        points.len(),
        t_nnri.mean_ms,
        t_knn.mean_ms,
        t_unit.mean_ms,
        t_nnri.mean_ms / t_unit.mean_ms
    );
    ensure(ratio <= 0.75, || detail.clone())?;
    Ok(detail)
}

fn mcf_properties() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let spec = SensorSpec::semantic_kitti();
    for case in 0..100 {
        let len = rng.random_range(20..2000);
        let cloud = random_cloud(&mut rng, len);
        let n = rng.random_range(1..=4);
        let (h, w) = (rng.random_range(4..=64), rng.random_range(16..=512));
        let (images, _) = project_multi(&cloud, &spec, h, w, n).unwrap();
        let fused: Vec<_> = (0..n).map(|i| mcf(&images, i).unwrap()).collect();
        for (i, (before, after)) in images.iter().zip(&fused).enumerate() {
            ensure(after.occupied_count() >= before.occupied_count(), || format!("case {case}: image {i} lost pixels"))?;
            for px in (0..before.pixels()).filter(|&px| before.occupancy[px]) {
                let same = after.pixel(px) == before.pixel(px)
                    && after.label_plane.as_ref().unwrap()[px] == before.label_plane.as_ref().unwrap()[px];
                ensure(same, || format!("case {case}: image {i} pixel {px} changed"))?;
            }
            ensure(mcf(&fused, i).unwrap() == fused[i], || format!("case {case}: image {i} not idempotent"))?;
        }
        if n == 1 {
            ensure(fused[0] == images[0], || format!("case {case}: N=1 is not the identity"))?;
        }
    }
    Ok("100 projections: monotone occupancy, untouched occupied pixels, idempotent, N=1 identity".into())
}

fn occupancy_monotonicity() -> Check {
    let mut notes = Vec::new();
    for seed in 0..3 {
        let spec = SceneSpec { seed, beams: 128, azimuth_steps: 4096, ..Default::default() };
        let cloud = generate_scene(&spec).unwrap().cloud;
        let validity = |h, w| {
            let (im, idx) = project_multi(&cloud, &spec.sensor, h, w, 1).unwrap();
            validity_stats(&idx, &im).validity
        };
        let (heights, widths) = ([16, 32, 64, 128], [256, 512, 1024, 2048, 4096]);
        let grid: Vec<Vec<f64>> = heights.iter().map(|&h| widths.iter().map(|&w| validity(h, w)).collect()).collect();
        for i in 0..heights.len() {
            for j in 0..widths.len() {
                if i + 1 < heights.len() {
                    ensure(grid[i + 1][j] >= grid[i][j], || format!("scene {seed}: validity drops from H={} to H={}", heights[i], heights[i + 1]))?;
                }
                if j + 1 < widths.len() {
                    ensure(grid[i][j + 1] >= grid[i][j], || format!("scene {seed}: validity drops from W={} to W={}", widths[j], widths[j + 1]))?;
                }
            }
        }
        // A raster-ordered exact grid phase-locks with the modulo split, so
        // the N trend is measured on the same returns in a scrambled order.
        let mut order: Vec<usize> = (0..cloud.len()).collect();
        rand::seq::SliceRandom::shuffle(order.as_mut_slice(), &mut ChaCha8Rng::seed_from_u64(seed));
        let scrambled = cloud.select(&order);
        let mut last = f64::INFINITY;
        for n in 1..=6 {
            let (images, idx) = project_multi(&scrambled, &spec.sensor, 64, 1024, n).unwrap();
            let occ = validity_stats(&idx, &images).mean_subcloud_occupancy();
            ensure(occ <= last, || format!("scene {seed}: sub-cloud occupancy rises at N={n}"))?;
            last = occ;
        }
    }
    notes.push("3 dense scenes: validity non-decreasing in H and W, sub-cloud occupancy non-increasing in N".to_string());

    match std::env::var_os("RANGESEG_REAL_FRAME") {
        None => notes.push("real-frame ratio skipped (RANGESEG_REAL_FRAME unset)".into()),
        Some(frame) => {
            let out = Command::new(env!("CARGO_BIN_EXE_rangeseg"))
                .args(["stats", "--width", "1024,2048", "--height", "32,64", "--input"])
                .arg(&frame)
                .env_remove("FLARES_CONFIG")
                .output()
                .map_err(|e| e.to_string())?;
            ensure(out.status.success(), || String::from_utf8_lossy(&out.stderr).into_owned())?;
            let csv = String::from_utf8_lossy(&out.stdout);
            let v = |h: &str, w: &str| -> Result<f64, String> {
                csv.lines()
                    .map(|l| l.split(',').collect::<Vec<_>>())
                    .find(|f| f[1] == h && f[2] == w)
                    .and_then(|f| f[6].parse().ok())
                    .ok_or_else(|| format!("no validity for {h}x{w}"))
            };
            let base = v("32", "1024")?;
            let ratio = (v("64", "1024")? - base) / (v("32", "2048")? - base);
            let note = format!("real frame dV_H/dV_W = {ratio:.3} (in [0.5, 1.1])");
            ensure((0.5..=1.1).contains(&ratio), || note.clone())?;
            notes.push(note);
        }
    }
    Ok(notes.join("; "))
}

fn metrics_suite() -> Check {
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12;
    // Rows are ground truth: [[1, 0], [1, 2]].
    let s = confusion(&[0, 0, 1, 1], &[0, 1, 1, 1], 2, None).unwrap().scores();
    ensure(close(s.miou, 7.0 / 12.0), || format!("[[1,0],[1,2]] mIoU {}", s.miou))?;
    ensure(close(s.iou[0].unwrap(), 0.5) && close(s.iou[1].unwrap(), 2.0 / 3.0), || format!("IoUs {:?}", s.iou))?;
    ensure(close(s.macc, (1.0 + 2.0 / 3.0) / 2.0), || format!("mAcc {}", s.macc))?;

    // Ignored ground truth is skipped; a class absent everywhere is not averaged.
    let s = confusion(&[1, 2, 1, 2, 1], &[1, 2, 2, 0, 0], 4, Some(0)).unwrap().scores();
    ensure(close(s.iou[1].unwrap(), 0.5) && close(s.iou[2].unwrap(), 0.5), || format!("IoUs {:?}", s.iou))?;
    ensure(s.iou[3].is_none() && close(s.miou, 0.5), || format!("mIoU {}", s.miou))?;
    ensure(close(s.overall_accuracy, 2.0 / 3.0), || format!("overall {}", s.overall_accuracy))?;

    let perfect = confusion(&[0, 1, 2, 2], &[0, 1, 2, 2], 3, None).unwrap().scores();
    ensure(close(perfect.miou, 1.0) && close(perfect.macc, 1.0), || "perfect prediction".into())?;

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for case in 0..100 {
        let len = rng.random_range(0..500);
        let pred: Vec<ClassId> = (0..len).map(|_| rng.random_range(0..5)).collect();
        let gt: Vec<ClassId> = (0..len).map(|_| rng.random_range(0..5)).collect();
        let whole = confusion(&pred, &gt, 5, Some(0)).unwrap();
        let cut = rng.random_range(0..=len);
        let parts = confusion(&pred[..cut], &gt[..cut], 5, Some(0)).unwrap() + confusion(&pred[cut..], &gt[cut..], 5, Some(0)).unwrap();
        ensure(parts == whole, || format!("case {case}: split at {cut} is not additive"))?;
        let mut order: Vec<usize> = (0..len).collect();
        rand::seq::SliceRandom::shuffle(order.as_mut_slice(), &mut rng);
        let (sp, sg): (Vec<ClassId>, Vec<ClassId>) = order.iter().map(|&i| (pred[i], gt[i])).unzip();
        ensure(confusion(&sp, &sg, 5, Some(0)).unwrap() == whole, || format!("case {case}: order changes the matrix"))?;
    }
    Ok("hand cases (incl. [[1,0],[1,2]] -> 7/12) exact to 1e-12; 100 random splits additive and order-free".into())
}

fn snapshot(dir: &Path, out: &mut Vec<(String, Vec<u8>)>) {
    let mut entries: Vec<_> = std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    entries.sort();
    for p in entries {
        if p.is_dir() {
            snapshot(&p, out);
        } else {
            out.push((p.display().to_string(), std::fs::read(&p).unwrap()));
        }
    }
}

fn determinism() -> Check {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cwd = tmp.path();
    let cfg = "seed = 11\n[synth]\nbeams = 64\nazimuth_steps = 512\n[rview]\nheight = 64\nwidth = 512\n[mock]\nnoise_rate = 0.1\n";
    std::fs::write(cwd.join("pipeline.toml"), cfg).unwrap();
    let mut runs = Vec::new();
    for (i, jobs) in ["1", "4", "4"].iter().enumerate() {
        let dir = cwd.join(format!("run{i}"));
        let d = |s: &str| dir.join(s).display().to_string();
        let mut stdout = Vec::new();
        let steps: Vec<Vec<String>> = [
            vec!["synth", "--frames", "4", "--out-dir", &d("syn")],
            vec!["project", "--input", &d("syn"), "--out-dir", &d("rimg")],
            vec!["split", "--input", &d("syn"), "--out-dir", &d("split")],
            vec!["augment", "--input", &d("syn"), "--out-dir", &d("aug")],
            vec!["mock-predict", "--input", &d("syn"), "--out-dir", &d("scores")],
            vec!["postprocess", "--input", &d("syn"), "--scores", &d("scores"), "--out-dir", &d("nnri")],
            vec!["postprocess", "--input", &d("syn"), "--scores", &d("scores"), "--out-dir", &d("knn"), "--post", "knn"],
            vec!["postprocess", "--input", &d("syn"), "--scores", &d("scores"), "--out-dir", &d("knnm"), "--post", "knn-multi"],
            vec!["postprocess", "--input", &d("syn"), "--scores", &d("scores"), "--out-dir", &d("nla"), "--post", "nla"],
            vec!["eval", "--pred", &d("nnri"), "--gt", &d("syn"), "--csv", &d("eval.csv")],
            vec!["stats", "--input", &d("syn"), "--subclouds", "1,3"],
        ]
        .into_iter()
        .map(|v| v.into_iter().map(String::from).collect())
        .collect();
        for step in steps {
            let out = Command::new(env!("CARGO_BIN_EXE_rangeseg"))
                .args(["--config", "pipeline.toml", "--jobs", jobs])
                .args(&step)
                .current_dir(cwd)
                .env_remove("FLARES_CONFIG")
                .output()
                .map_err(|e| e.to_string())?;
            ensure(out.status.success(), || format!("{step:?}: {}", String::from_utf8_lossy(&out.stderr)))?;
            stdout.push(out.stdout);
        }
        let mut files = Vec::new();
        snapshot(&dir, &mut files);
        let files: Vec<(String, Vec<u8>)> = files
            .into_iter()
            .map(|(p, b)| (p.replacen(&dir.display().to_string(), "", 1), b))
            .collect();
        runs.push((files, stdout));
    }
    let count = runs[0].0.len();
    ensure(runs[0] == runs[1], || "--jobs 1 and --jobs 4 outputs differ".into())?;
    ensure(runs[1] == runs[2], || "repeated --jobs 4 outputs differ".into())?;
    Ok(format!("11 seeded commands x 3 runs (jobs 1, 4, 4): {count} output files byte-identical"))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("oracle equivalence", oracle_equivalence),
        ("partition/projection properties", partition_projection),
        ("end-to-end oracle pipeline", end_to_end),
        ("post-processor ordering", postprocessor_ordering),
        ("latency ordering", latency_ordering),
        ("MCF properties", mcf_properties),
        ("occupancy monotonicity", occupancy_monotonicity),
        ("metrics suite", metrics_suite),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {} PASS  {name}: {detail} [{secs:.1} s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} FAIL  {name}: {detail} [{secs:.1} s]", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
