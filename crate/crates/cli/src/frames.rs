//! Frame discovery and the per-frame worker pool.

use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use rangeseg::pcio::{read_labels_for, read_point_cloud, ClassMap, LoadedCloud};

/// Expands files and directories (non-recursive, sorted by name) into a
/// list of files with extension `ext`.
pub fn expand_inputs(inputs: &[PathBuf], ext: &str) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for input in inputs {
        if input.is_dir() {
            let mut found: Vec<PathBuf> = std::fs::read_dir(input)
                .with_context(|| format!("pcio: listing {}", input.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.is_file() && p.extension().is_some_and(|e| e == ext))
                .collect();
            found.sort();
            out.extend(found);
        } else {
            ensure!(input.is_file(), "pcio: input {} does not exist", input.display());
            out.push(input.clone());
        }
    }
    ensure!(!out.is_empty(), "pcio: no .{ext} inputs found");
    Ok(out)
}

pub fn stem(path: &Path) -> String {
    path.file_stem().map_or_else(|| "frame".into(), |s| s.to_string_lossy().into_owned())
}

/// Label file for a point file: `<labels_dir>/<stem>.label` when a
/// directory is given, else the first existing of `<dir>/<stem>.label` and
/// the KITTI layout `<dir>/../labels/<stem>.label`.
pub fn label_path(frame: &Path, labels_dir: Option<&Path>) -> Option<PathBuf> {
    let name = format!("{}.label", stem(frame));
    if let Some(dir) = labels_dir {
        return Some(dir.join(name));
    }
    let dir = frame.parent().unwrap_or(Path::new("."));
    [dir.join(&name), dir.join("..").join("labels").join(&name)]
        .into_iter()
        .find(|p| p.is_file())
}

pub fn load_frame(path: &Path) -> Result<LoadedCloud> {
    read_point_cloud(path).with_context(|| format!("pcio: reading {}", path.display()))
}

/// Loads a frame and attaches its labels; fails if no label file is found.
pub fn load_labeled(path: &Path, labels_dir: Option<&Path>, map: &ClassMap) -> Result<LoadedCloud> {
    let mut loaded = load_frame(path)?;
    let Some(lp) = label_path(path, labels_dir) else {
        bail!("pcio: no label file found for {}", path.display());
    };
    let labels = read_labels_for(&lp, map, &loaded).with_context(|| format!("pcio: reading {}", lp.display()))?;
    loaded.cloud = loaded.cloud.with_labels(labels.labels).context("pcio")?;
    Ok(loaded)
}

/// Runs `job` on every item in a pool of `jobs` threads (0 = all cores).
/// Results come back in input order and the first failing item, in input
/// order, determines the error.
pub fn run_pool<T, R, F>(jobs: usize, items: &[T], job: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(usize, &T) -> Result<R> + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .context("building worker pool")?;
    pool.install(|| items.par_iter().enumerate().map(|(i, t)| job(i, t)).collect::<Vec<_>>())
        .into_iter()
        .collect()
}

/// Random stream of frame `index`, independent of scheduling.
pub fn frame_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Scalar seed for frame `index` (splitmix64 of the pair).
pub fn frame_seed(seed: u64, index: usize) -> u64 {
    let mut z = seed ^ (index as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}
