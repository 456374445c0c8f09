use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::pcio::{ClassId, ClassMap, ClassSpec, PointCloud, SensorSpec};
use crate::synth::{Primitive, Ray};

pub const UNLABELED: ClassId = 0;
pub const GROUND: ClassId = 1;
pub const VEHICLE: ClassId = 2;
pub const POLE: ClassId = 3;
pub const SIGN: ClassId = 4;
pub const PEDESTRIAN: ClassId = 5;
pub const SYNTHETIC_CLASSES: usize = 6;

/// Closest object placement distance from the sensor, meters.
const MIN_DISTANCE: f64 = 5.0;
/// Largest horizontal half-extent of any object, meters.
const MAX_HALF_EXTENT: f64 = 2.5;

/// Class map for synthetic scenes. Frequencies are deliberately long-tailed.
pub fn synthetic_class_map() -> ClassMap {
    let class = |name: &str, raw: u16, frequency: f64| ClassSpec {
        name: name.into(),
        raw_ids: vec![raw],
        frequency,
        weight: None,
    };
    ClassMap::new(
        vec![
            class("unlabeled", 0, 0.0),
            class("ground", 40, 0.80),
            class("vehicle", 10, 0.15),
            class("pole", 80, 0.025),
            class("sign", 81, 0.01),
            class("pedestrian", 30, 0.015),
        ],
        UNLABELED,
    )
    .expect("synthetic class map is valid")
}

/// Parameters of a procedurally generated scene.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneSpec {
    pub seed: u64,
    /// Objects are placed between 5 m and `extent` meters from the sensor.
    pub extent: f64,
    pub vehicles: usize,
    pub poles: usize,
    pub signs: usize,
    pub pedestrians: usize,
    pub sensor: SensorSpec,
    /// Sensor height above the ground plane, meters.
    pub sensor_height: f64,
    pub beams: usize,
    pub azimuth_steps: usize,
}

impl Default for SceneSpec {
    fn default() -> Self {
        SceneSpec {
            seed: 0,
            extent: 40.0,
            vehicles: 10,
            poles: 14,
            signs: 8,
            pedestrians: 12,
            sensor: SensorSpec::semantic_kitti(),
            sensor_height: 1.73,
            beams: 64,
            azimuth_steps: 512,
        }
    }
}

impl SceneSpec {
    fn validate(&self) -> Result<()> {
        if self.beams == 0 || self.azimuth_steps == 0 {
            return Err(Error::Param("ray grid must be at least 1x1".into()));
        }
        if !(self.extent >= MIN_DISTANCE && self.extent + MAX_HALF_EXTENT < self.sensor.range_max) {
            return Err(Error::Param(format!(
                "extent {} must lie in [{MIN_DISTANCE}, range_max - {MAX_HALF_EXTENT})",
                self.extent
            )));
        }
        if !(self.sensor_height > 0.0) {
            return Err(Error::Param("sensor height must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneObject {
    pub class: ClassId,
    pub shape: Primitive,
}

/// Ground plane plus labeled objects.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub objects: Vec<SceneObject>,
}

impl Scene {
    /// Nearest hit over all primitives, with its class.
    pub fn cast(&self, ray: &Ray) -> Option<(f64, ClassId)> {
        self.objects
            .iter()
            .filter_map(|o| o.shape.intersect(ray).map(|h| (h.t, o.class)))
            .min_by(|a, b| a.0.total_cmp(&b.0))
    }
}

/// A generated frame. `ranges[i]` is the exact intersection distance of
/// point `i`; the cloud holds the hit point rounded to `f32`. `rays[i]` is
/// the `(beam, azimuth step)` that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticScene {
    pub scene: Scene,
    pub cloud: PointCloud,
    pub ranges: Vec<f64>,
    pub rays: Vec<(u32, u32)>,
}

/// Unit direction of ray `(beam, step)`: beams sit at the centers of `beams`
/// equal elevation bins spanning the sensor's vertical field of view, steps
/// at the centers of `steps` azimuth bins, so an `H = beams`, `W = steps`
/// projection gives every ray its own pixel.
pub fn ray_direction(sensor: &SensorSpec, beams: usize, steps: usize, beam: usize, step: usize) -> [f64; 3] {
    let elevation = sensor.theta_max - (beam as f64 + 0.5) * sensor.fov() / beams as f64;
    let azimuth = (steps as f64 / 2.0 - step as f64 - 0.5) * 2.0 * PI / steps as f64;
    [
        elevation.cos() * azimuth.cos(),
        elevation.cos() * azimuth.sin(),
        elevation.sin(),
    ]
}

fn intensity_of(class: ClassId) -> f32 {
    match class {
        GROUND => 0.3,
        VEHICLE => 0.6,
        POLE => 0.4,
        SIGN => 0.9,
        PEDESTRIAN => 0.2,
        _ => 0.0,
    }
}

fn place_objects(spec: &SceneSpec, rng: &mut ChaCha8Rng) -> Vec<SceneObject> {
    let ground = -spec.sensor_height;
    let mut objects = vec![SceneObject { class: GROUND, shape: Primitive::Ground { height: ground } }];
    let spot = |rng: &mut ChaCha8Rng| {
        let phi = rng.random_range(0.0..2.0 * PI);
        let d = rng.random_range(MIN_DISTANCE..=spec.extent);
        (d * phi.cos(), d * phi.sin(), phi)
    };
    let boxed = |cx: f64, cy: f64, half: [f64; 2], z0: f64, z1: f64| Primitive::Aabb {
        min: [cx - half[0], cy - half[1], z0],
        max: [cx + half[0], cy + half[1], z1],
    };
    for _ in 0..spec.vehicles {
        let (x, y, _) = spot(rng);
        let half = if rng.random_bool(0.5) { [2.25, 0.9] } else { [0.9, 2.25] };
        objects.push(SceneObject { class: VEHICLE, shape: boxed(x, y, half, ground, ground + 1.6) });
    }
    for _ in 0..spec.poles {
        let (x, y, _) = spot(rng);
        objects.push(SceneObject {
            class: POLE,
            shape: Primitive::Cylinder { center: [x, y], radius: 0.15, z0: ground, z1: ground + 5.0 },
        });
    }
    for _ in 0..spec.signs {
        let (x, y, phi) = spot(rng);
        // Thin side faces the sensor's dominant axis.
        let half = if phi.cos().abs() > phi.sin().abs() { [0.03, 0.4] } else { [0.4, 0.03] };
        objects.push(SceneObject { class: SIGN, shape: boxed(x, y, half, ground + 2.0, ground + 2.8) });
    }
    for _ in 0..spec.pedestrians {
        let (x, y, _) = spot(rng);
        objects.push(SceneObject { class: PEDESTRIAN, shape: boxed(x, y, [0.25, 0.25], ground, ground + 1.75) });
    }
    objects
}

/// Places objects for `spec.seed` and scans them with [`scan_scene`].
pub fn generate_scene(spec: &SceneSpec) -> Result<SyntheticScene> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let scene = Scene { objects: place_objects(spec, &mut rng) };
    Ok(scan_scene(scene, spec))
}

/// Casts one ray per `(beam, azimuth step)`, beam-major, and keeps hits
/// within the sensor's range limits. Only the sensor and ray grid of `spec`
/// are used.
pub fn scan_scene(scene: Scene, spec: &SceneSpec) -> SyntheticScene {
    let mut cloud = PointCloud::with_capacity(spec.beams * spec.azimuth_steps, true);
    let mut ranges = Vec::new();
    let mut rays = Vec::new();
    for beam in 0..spec.beams {
        for step in 0..spec.azimuth_steps {
            let ray = Ray {
                origin: [0.0; 3],
                dir: ray_direction(&spec.sensor, spec.beams, spec.azimuth_steps, beam, step),
            };
            let Some((t, class)) = scene.cast(&ray) else { continue };
            if t < spec.sensor.range_min || t > spec.sensor.range_max {
                continue;
            }
            let p = ray.at(t);
            cloud.push(p[0] as f32, p[1] as f32, p[2] as f32, intensity_of(class), Some(class));
            ranges.push(t);
            rays.push((beam as u32, step as u32));
        }
    }
    SyntheticScene { scene, cloud, ranges, rays }
}
