//! Desk-scale ground truth: a ray-cast virtual LiDAR over procedurally
//! placed analytic primitives, and a mock predictor that turns label planes
//! into score volumes.

mod geometry;
mod mock;
mod scene;

pub use geometry::{Hit, Primitive, Ray};
pub use mock::{mock_predict, mock_predict_images, MockOutput, MockPredictorConfig};
pub use scene::{
    generate_scene, scan_scene, ray_direction, synthetic_class_map, Scene, SceneObject, SceneSpec, SyntheticScene, GROUND,
    PEDESTRIAN, POLE, SIGN, SYNTHETIC_CLASSES, UNLABELED, VEHICLE,
};
