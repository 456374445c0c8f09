//! Closed-form ray intersections.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ray {
    pub origin: [f64; 3],
    /// Unit direction.
    pub dir: [f64; 3],
}

impl Ray {
    pub fn at(&self, t: f64) -> [f64; 3] {
        std::array::from_fn(|i| self.origin[i] + t * self.dir[i])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Primitive {
    /// Horizontal plane `z = height`, unbounded.
    Ground { height: f64 },
    /// Axis-aligned box. Thin boxes model panels.
    Aabb { min: [f64; 3], max: [f64; 3] },
    /// Vertical solid cylinder with caps at `z0` and `z1`.
    Cylinder { center: [f64; 2], radius: f64, z0: f64, z1: f64 },
}

/// Distance along the ray to the first surface point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hit {
    pub t: f64,
}

const EPS: f64 = 1e-12;

impl Primitive {
    /// First intersection with `t > 0`, if any.
    pub fn intersect(&self, ray: &Ray) -> Option<Hit> {
        let t = match *self {
            Primitive::Ground { height } => {
                if ray.dir[2].abs() < EPS {
                    return None;
                }
                let t = (height - ray.origin[2]) / ray.dir[2];
                (t > 0.0).then_some(t)
            }
            Primitive::Aabb { min, max } => slab(ray, min, max),
            Primitive::Cylinder { center, radius, z0, z1 } => cylinder(ray, center, radius, z0, z1),
        }?;
        Some(Hit { t })
    }
}

fn slab(ray: &Ray, min: [f64; 3], max: [f64; 3]) -> Option<f64> {
    let mut t_near = f64::NEG_INFINITY;
    let mut t_far = f64::INFINITY;
    for i in 0..3 {
        if ray.dir[i].abs() < EPS {
            if ray.origin[i] < min[i] || ray.origin[i] > max[i] {
                return None;
            }
            continue;
        }
        let a = (min[i] - ray.origin[i]) / ray.dir[i];
        let b = (max[i] - ray.origin[i]) / ray.dir[i];
        t_near = t_near.max(a.min(b));
        t_far = t_far.min(a.max(b));
    }
    if t_near > t_far || t_far <= 0.0 {
        return None;
    }
    Some(if t_near > 0.0 { t_near } else { t_far })
}

fn cylinder(ray: &Ray, center: [f64; 2], radius: f64, z0: f64, z1: f64) -> Option<f64> {
    let (ox, oy) = (ray.origin[0] - center[0], ray.origin[1] - center[1]);
    let (dx, dy) = (ray.dir[0], ray.dir[1]);
    let mut best: Option<f64> = None;
    let mut consider = |t: f64| {
        if t > 0.0 && best.is_none_or(|b| t < b) {
            best = Some(t);
        }
    };
    let a = dx * dx + dy * dy;
    if a > EPS {
        let b = 2.0 * (ox * dx + oy * dy);
        let c = ox * ox + oy * oy - radius * radius;
        let disc = b * b - 4.0 * a * c;
        if disc >= 0.0 {
            let sq = disc.sqrt();
            for t in [(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)] {
                let z = ray.origin[2] + t * ray.dir[2];
                if z >= z0 && z <= z1 {
                    consider(t);
                }
            }
        }
    }
    if ray.dir[2].abs() > EPS {
        for zc in [z0, z1] {
            let t = (zc - ray.origin[2]) / ray.dir[2];
            let (x, y) = (ox + t * dx, oy + t * dy);
            if x * x + y * y <= radius * radius {
                consider(t);
            }
        }
    }
    best
}
