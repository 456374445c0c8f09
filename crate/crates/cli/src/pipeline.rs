//! Commands that transform frames: project, split, augment, synth,
//! mock-predict and postprocess.

use std::path::{Path, PathBuf};

use anyhow::{ensure, Context, Result};

use rangeseg::augment::augment_frame;
use rangeseg::pcio::{write_labels, write_point_cloud, ClassMap, LoadedCloud, PointCloud};
use rangeseg::postproc::{
    knn_multi, knn_per_subcloud, nla_per_subcloud, nnri, read_scores, write_scores, LabeledPlane, RangeStack,
};
use rangeseg::rview::{project_multi, split_cloud, unproject_coords, validity_stats, write_images};
use rangeseg::synth::{generate_scene, mock_predict_images, synthetic_class_map};
use rangeseg::ClassId;

use crate::config::{PipelineConfig, PostMethod};
use crate::frames::{
    create_dir, expand_inputs, frame_rng, frame_seed, label_path, load_frame, load_labeled, run_pool, stem,
};

/// Loads a frame with labels when a label file can be found.
fn load_maybe_labeled(path: &Path, labels: Option<&Path>, map: &ClassMap) -> Result<LoadedCloud> {
    match label_path(path, labels) {
        Some(lp) if lp.is_file() => load_labeled(path, labels, map),
        _ => load_frame(path),
    }
}

fn write_cloud(cloud: &PointCloud, map: &ClassMap, out_dir: &Path, name: &str) -> Result<()> {
    let bin = out_dir.join(format!("{name}.bin"));
    write_point_cloud(cloud, &bin).with_context(|| format!("pcio: writing {}", bin.display()))?;
    if let Some(labels) = &cloud.labels {
        let lp = out_dir.join(format!("{name}.label"));
        write_labels(labels, map, &lp).with_context(|| format!("pcio: writing {}", lp.display()))?;
    }
    Ok(())
}

pub fn project(cfg: &PipelineConfig, jobs: usize, input: &[PathBuf], labels: Option<&Path>, out_dir: &Path) -> Result<()> {
    let frames = expand_inputs(input, "bin")?;
    let (map, sensor) = (cfg.class_map()?, cfg.sensor()?);
    let r = &cfg.rview;
    create_dir(out_dir)?;
    let lines = run_pool(jobs, &frames, |_, path| {
        let loaded = load_maybe_labeled(path, labels, &map)?;
        let (images, index) = project_multi(&loaded.cloud, &sensor, r.height, r.width, r.subclouds)
            .with_context(|| format!("rview: projecting {}", path.display()))?;
        let name = stem(path);
        let out = out_dir.join(format!("{name}.rimg"));
        write_images(&images, &out).with_context(|| format!("rview: writing {}", out.display()))?;
        let v = validity_stats(&index, &images);
        Ok(format!("{name} points={} validity={:.6} occupancy={:.6}", v.total_points, v.validity, v.occupancy_2d))
    })?;
    lines.iter().for_each(|l| println!("{l}"));
    Ok(())
}

pub fn split(cfg: &PipelineConfig, jobs: usize, input: &[PathBuf], labels: Option<&Path>, out_dir: &Path) -> Result<()> {
    let frames = expand_inputs(input, "bin")?;
    let map = cfg.class_map()?;
    create_dir(out_dir)?;
    run_pool(jobs, &frames, |_, path| {
        let loaded = load_maybe_labeled(path, labels, &map)?;
        let split = split_cloud(&loaded.cloud, cfg.rview.subclouds)
            .with_context(|| format!("rview: splitting {}", path.display()))?;
        let name = stem(path);
        for (i, part) in split.parts.iter().enumerate() {
            write_cloud(part, &map, out_dir, &format!("{name}.sub{i}"))?;
        }
        Ok(())
    })?;
    Ok(())
}

pub fn augment(cfg: &PipelineConfig, jobs: usize, input: &[PathBuf], labels: Option<&Path>, out_dir: &Path) -> Result<()> {
    let frames = expand_inputs(input, "bin")?;
    let (map, sensor) = (cfg.class_map()?, cfg.sensor()?);
    let clouds = run_pool(jobs, &frames, |_, p| load_labeled(p, labels, &map).map(|l| l.cloud))?;
    let pool = if cfg.augment.pool.is_empty() {
        clouds.clone()
    } else {
        run_pool(jobs, &cfg.augment.pool, |_, p| load_labeled(p, None, &map).map(|l| l.cloud))?
    };
    let wpd = cfg.wpd(&map, pool);
    let gda = cfg.gda();
    let ignore = cfg.augment.clean_unlabeled.then_some(map.ignore_id());
    let r = &cfg.rview;
    create_dir(out_dir)?;
    run_pool(jobs, &frames, |i, path| {
        let mut rng = frame_rng(cfg.seed, i);
        let out = augment_frame(&clouds[i], &wpd, &gda, &sensor, r.height, r.width, r.subclouds, ignore, &mut rng)
            .with_context(|| format!("augment: {}", path.display()))?;
        let name = stem(path);
        write_cloud(&out.cloud, &map, out_dir, &name)?;
        let rimg = out_dir.join(format!("{name}.rimg"));
        write_images(&out.images, &rimg).with_context(|| format!("rview: writing {}", rimg.display()))
    })?;
    Ok(())
}

/// Frame `i` is generated from scene seed `seed + i`.
pub fn synth(cfg: &PipelineConfig, jobs: usize, frames: usize, out_dir: &Path) -> Result<()> {
    let map = synthetic_class_map();
    create_dir(out_dir)?;
    let classes = out_dir.join("classes.toml");
    std::fs::write(&classes, map.to_toml_string()).with_context(|| format!("writing {}", classes.display()))?;
    let ids: Vec<usize> = (0..frames).collect();
    run_pool(jobs, &ids, |_, &i| {
        let spec = cfg.scene(cfg.seed.wrapping_add(i as u64))?;
        let scene = generate_scene(&spec).context("synth")?;
        write_cloud(&scene.cloud, &map, out_dir, &format!("{i:06}"))
    })?;
    Ok(())
}

pub fn mock_predict(cfg: &PipelineConfig, jobs: usize, input: &[PathBuf], labels: Option<&Path>, out_dir: &Path) -> Result<()> {
    let frames = expand_inputs(input, "bin")?;
    let (map, sensor) = (cfg.class_map()?, cfg.sensor()?);
    let r = &cfg.rview;
    create_dir(out_dir)?;
    let lines = run_pool(jobs, &frames, |i, path| {
        let loaded = load_labeled(path, labels, &map)?;
        let (images, _) = project_multi(&loaded.cloud, &sensor, r.height, r.width, r.subclouds)
            .with_context(|| format!("rview: projecting {}", path.display()))?;
        let mock = mock_predict_images(&images, map.num_classes(), &cfg.mock(frame_seed(cfg.seed, i)))
            .with_context(|| format!("synth: mock prediction for {}", path.display()))?;
        let name = stem(path);
        let out = out_dir.join(format!("{name}.svol"));
        write_scores(&mock.scores, &out).with_context(|| format!("postproc: writing {}", out.display()))?;
        Ok(format!("{name} corrupted={}", mock.corrupted))
    })?;
    lines.iter().for_each(|l| println!("{l}"));
    Ok(())
}

/// Labels for every point of `cloud` from a score volume.
pub fn reconstruct(
    cfg: &PipelineConfig,
    cloud: &PointCloud,
    scores: &rangeseg::postproc::ScoreVolume,
    map: &ClassMap,
) -> Result<Vec<ClassId>> {
    let sensor = cfg.sensor()?;
    let r = &cfg.rview;
    ensure!(
        (scores.subclouds, scores.height, scores.width) == (r.subclouds, r.height, r.width),
        "postproc: score volume is {}x{}x{} (N x H x W), config expects {}x{}x{}",
        scores.subclouds,
        scores.height,
        scores.width,
        r.subclouds,
        r.height,
        r.width
    );
    ensure!(
        scores.classes == map.num_classes(),
        "postproc: score volume has {} classes, class map has {}",
        scores.classes,
        map.num_classes()
    );
    let (images, index) = project_multi(cloud, &sensor, r.height, r.width, r.subclouds).context("rview")?;
    let points = unproject_coords(&index);
    let stack = RangeStack::from_images(&images).context("postproc")?;
    let (classes, ignore) = (map.num_classes(), map.ignore_id());
    let labels = match cfg.postproc.method {
        PostMethod::Nnri => nnri(scores, &stack, &points, &cfg.nnri()),
        method => {
            let argmax = scores.argmax_labels();
            let planes = LabeledPlane::stack(&stack, &argmax).context("postproc")?;
            match method {
                PostMethod::Knn => knn_per_subcloud(&planes, &points, &cfg.knn(), classes, ignore),
                PostMethod::KnnMulti => knn_multi(&planes, &points, &cfg.knn(), classes, ignore),
                _ => nla_per_subcloud(&planes, &points, cfg.postproc.kernel, ignore),
            }
        }
    };
    labels.with_context(|| format!("postproc: {}", cfg.postproc.method.name()))
}

pub fn postprocess(cfg: &PipelineConfig, jobs: usize, input: &[PathBuf], scores_dir: &Path, out_dir: &Path) -> Result<()> {
    let frames = expand_inputs(input, "bin")?;
    let map = cfg.class_map()?;
    create_dir(out_dir)?;
    run_pool(jobs, &frames, |_, path| {
        let loaded = load_frame(path)?;
        let name = stem(path);
        let svol = scores_dir.join(format!("{name}.svol"));
        let scores = read_scores(&svol).with_context(|| format!("postproc: reading {}", svol.display()))?;
        let labels = reconstruct(cfg, &loaded.cloud, &scores, &map)
            .with_context(|| format!("frame {}", path.display()))?;
        let full = loaded.expand(&labels, map.ignore_id());
        let out = out_dir.join(format!("{name}.label"));
        write_labels(&full, &map, &out).with_context(|| format!("pcio: writing {}", out.display()))
    })?;
    Ok(())
}
