//! Commands that measure: eval, stats and bench.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{ensure, Context, Result};

use rangeseg::metrics::{confusion, BenchReport, ClassScores, ConfusionMatrix};
use rangeseg::pcio::{read_labels, ClassMap, PointCloud};
use rangeseg::postproc::{knn_multi, knn_per_subcloud, nla_per_subcloud, nnri, LabeledPlane, RangeStack};
use rangeseg::rview::{project_multi, unproject_coords, validity_stats};
use rangeseg::synth::{generate_scene, mock_predict_images, MockPredictorConfig};
use rangeseg::SensorSpec;

use crate::config::PipelineConfig;
use crate::frames::{expand_inputs, label_path, load_frame, load_labeled, run_pool, stem};

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| format!("{x:.6}"))
}

/// `class,iou,acc` rows for every scored class, then `mean` and
/// `overall_accuracy` rows. Unscored values are left empty.
pub fn scores_csv(scores: &ClassScores, map: &ClassMap) -> String {
    let mut out = String::from("class,iou,acc\n");
    for c in 0..map.num_classes() {
        if c == map.ignore_id() as usize {
            continue;
        }
        let _ = writeln!(out, "{},{},{}", map.classes()[c].name, opt(scores.iou[c]), opt(scores.acc[c]));
    }
    let _ = writeln!(out, "mean,{:.6},{:.6}", scores.miou, scores.macc);
    let _ = writeln!(out, "overall_accuracy,{:.6},", scores.overall_accuracy);
    out
}

fn scores_table(scores: &ClassScores, map: &ClassMap) -> String {
    let cell = |v: Option<f64>| v.map_or_else(|| "n/a".to_string(), |x| format!("{:.2}", 100.0 * x));
    let mut out = format!("{:<16} {:>8} {:>8}\n", "class", "IoU %", "Acc %");
    for c in 0..map.num_classes() {
        if c == map.ignore_id() as usize {
            continue;
        }
        let _ = writeln!(out, "{:<16} {:>8} {:>8}", map.classes()[c].name, cell(scores.iou[c]), cell(scores.acc[c]));
    }
    let _ = writeln!(
        out,
        "mIoU {:.2}  mAcc {:.2}  overall accuracy {:.2}",
        100.0 * scores.miou,
        100.0 * scores.macc,
        100.0 * scores.overall_accuracy
    );
    out
}

pub fn eval(cfg: &PipelineConfig, jobs: usize, pred: &[PathBuf], gt: &[PathBuf], csv: Option<&Path>) -> Result<()> {
    let map = cfg.class_map()?;
    let (pred, gt) = (expand_inputs(pred, "label")?, expand_inputs(gt, "label")?);
    ensure!(pred.len() == gt.len(), "metrics: {} prediction files but {} ground-truth files", pred.len(), gt.len());
    let pairs: Vec<(PathBuf, PathBuf)> = pred.into_iter().zip(gt).collect();
    let parts = run_pool(jobs, &pairs, |_, (p, g)| {
        let read = |path: &Path| read_labels(path, &map).with_context(|| format!("pcio: reading {}", path.display()));
        let (p_l, g_l) = (read(p)?, read(g)?);
        let m = confusion(&p_l.labels, &g_l.labels, map.num_classes(), Some(map.ignore_id()))
            .with_context(|| format!("metrics: {} vs {}", p.display(), g.display()))?;
        Ok((m, p_l.unknown + g_l.unknown))
    })?;
    let mut total = ConfusionMatrix::new(map.num_classes(), Some(map.ignore_id()));
    let mut unknown = 0;
    for (m, u) in &parts {
        total += m;
        unknown += u;
    }
    if unknown > 0 {
        eprintln!("warning: {unknown} labels had raw ids missing from the class map and were ignored");
    }
    let scores = total.scores();
    print!("{}", scores_table(&scores, &map));
    if let Some(path) = csv {
        std::fs::write(path, scores_csv(&scores, &map)).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

/// Validity at one `(H, W, N)` grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct GridCell {
    pub height: usize,
    pub width: usize,
    pub subclouds: usize,
    pub points: usize,
    pub projected: usize,
    pub validity: f64,
    pub occupancy: f64,
    pub mean_subcloud_occupancy: f64,
}

pub fn validity_grid(cloud: &PointCloud, sensor: &SensorSpec, heights: &[usize], widths: &[usize], subclouds: &[usize]) -> Result<Vec<GridCell>> {
    let mut cells = Vec::new();
    for &h in heights {
        for &w in widths {
            for &n in subclouds {
                let (images, index) = project_multi(cloud, sensor, h, w, n).with_context(|| format!("rview: {h}x{w}, N={n}"))?;
                let v = validity_stats(&index, &images);
                cells.push(GridCell {
                    height: h,
                    width: w,
                    subclouds: n,
                    points: v.total_points,
                    projected: v.projected_points,
                    validity: v.validity,
                    occupancy: v.occupancy_2d,
                    mean_subcloud_occupancy: v.mean_subcloud_occupancy(),
                });
            }
        }
    }
    Ok(cells)
}

/// `(dV_H, dV_W, dV_H / dV_W)` from the 32 -> 64 row and 1024 -> 2048
/// column steps at `N = 1`, when the grid has them.
pub fn resolution_gain_ratio(cells: &[GridCell]) -> Option<(f64, f64, f64)> {
    let v = |h, w| cells.iter().find(|c| (c.height, c.width, c.subclouds) == (h, w, 1)).map(|c| c.validity);
    let base = v(32, 1024)?;
    let dh = v(64, 1024)? - base;
    let dw = v(32, 2048)? - base;
    Some((dh, dw, dh / dw))
}

pub fn stats(
    sensor: &SensorSpec,
    jobs: usize,
    input: &[PathBuf],
    heights: &[usize],
    widths: &[usize],
    subclouds: &[usize],
    out: Option<&Path>,
) -> Result<()> {
    let frames = expand_inputs(input, "bin")?;
    let grids = run_pool(jobs, &frames, |_, path| {
        let loaded = load_frame(path)?;
        validity_grid(&loaded.cloud, sensor, heights, widths, subclouds).with_context(|| format!("frame {}", path.display()))
    })?;
    let mut csv = String::from("frame,height,width,subclouds,points,projected,validity,occupancy_2d,mean_subcloud_occupancy\n");
    for (path, cells) in frames.iter().zip(&grids) {
        for c in cells {
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{},{:.6},{:.6},{:.6}",
                stem(path),
                c.height,
                c.width,
                c.subclouds,
                c.points,
                c.projected,
                c.validity,
                c.occupancy,
                c.mean_subcloud_occupancy
            );
        }
        if let Some((dh, dw, ratio)) = resolution_gain_ratio(cells) {
            let ratio = if dw > 0.0 { format!("{ratio:.4}") } else { "undefined".into() };
            eprintln!("{}: dV_H(32->64) = {dh:.6}, dV_W(1024->2048) = {dw:.6}, ratio = {ratio}", stem(path));
        }
    }
    match out {
        Some(p) => std::fs::write(p, csv).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

/// Times projection and every post-processor on one frame, single-threaded.
pub fn bench(
    cfg: &PipelineConfig,
    input: Option<&Path>,
    labels: Option<&Path>,
    warmup: usize,
    measured: usize,
    out: Option<&Path>,
) -> Result<()> {
    let (map, sensor) = (cfg.class_map()?, cfg.sensor()?);
    let cloud = match input {
        Some(path) if label_path(path, labels).is_some_and(|p| p.is_file()) => load_labeled(path, labels, &map)?.cloud,
        Some(path) => {
            let c = load_frame(path)?.cloud;
            let n = c.len();
            c.with_labels(vec![map.ignore_id(); n]).context("pcio")?
        }
        None => generate_scene(&cfg.scene(cfg.seed)?).context("synth")?.cloud,
    };
    let r = &cfg.rview;
    let classes = map.num_classes();
    let ignore = map.ignore_id();
    let (images, index) = project_multi(&cloud, &sensor, r.height, r.width, r.subclouds).context("rview")?;
    let mock = mock_predict_images(&images, classes, &MockPredictorConfig::default()).context("synth")?;
    let stack = RangeStack::from_images(&images).context("postproc")?;
    let points = unproject_coords(&index);
    let planes = LabeledPlane::stack(&stack, &mock.labels).context("postproc")?;
    let (nnri_p, knn_p) = (cfg.nnri(), cfg.knn());

    let mut report = BenchReport::new(warmup, measured);
    report
        .echo("height", r.height)
        .echo("width", r.width)
        .echo("subclouds", r.subclouds)
        .echo("kernel", cfg.postproc.kernel)
        .echo("points", cloud.len())
        .echo("classes", classes);
    report.run("project", || project_multi(&cloud, &sensor, r.height, r.width, r.subclouds));
    report.run("nnri", || nnri(&mock.scores, &stack, &points, &nnri_p));
    report.run("knn-multi", || knn_multi(&planes, &points, &knn_p, classes, ignore));
    report.run("knn", || knn_per_subcloud(&planes, &points, &knn_p, classes, ignore));
    report.run("nla", || nla_per_subcloud(&planes, &points, cfg.postproc.kernel, ignore));
    let csv = report.to_csv();
    match out {
        Some(p) => std::fs::write(p, csv).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}
