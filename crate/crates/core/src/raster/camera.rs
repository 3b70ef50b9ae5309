use crate::linalg::Vec3;
use crate::scalar::Real;

/// Orbit camera looking at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct Camera<S> {
    /// Rotation about +Y; 0 places the camera on the +Z axis.
    pub azimuth: S,
    pub elevation: S,
    pub radius: S,
    pub fov_y: S,
    pub width: usize,
    pub height: usize,
    pub descriptor: String,
}

/// Camera frame: eye position and orthonormal right/up/forward axes.
#[derive(Debug, Clone, Copy)]
pub struct Frame<S> {
    pub eye: Vec3<S>,
    pub right: Vec3<S>,
    pub up: Vec3<S>,
    pub forward: Vec3<S>,
}

impl<S: Real> Camera<S> {
    pub fn new(azimuth: S, elevation: S, radius: S, fov_y: S, width: usize, height: usize, descriptor: impl Into<String>) -> Self {
        Self {
            azimuth,
            elevation,
            radius,
            fov_y,
            width,
            height,
            descriptor: descriptor.into(),
        }
    }

    pub fn is_valid(&self) -> bool {
        self.radius > S::zero()
            && self.fov_y > S::zero()
            && self.fov_y < S::PI()
            && self.width >= 1
            && self.height >= 1
    }

    pub fn eye(&self) -> Vec3<S> {
        let (ce, se) = (self.elevation.cos(), self.elevation.sin());
        Vec3::new(
            self.radius * ce * self.azimuth.sin(),
            self.radius * se,
            self.radius * ce * self.azimuth.cos(),
        )
    }

    /// World +Y is up, except near the poles where the up vector points away
    /// from the azimuth direction so the frame stays well defined.
    pub fn frame(&self) -> Frame<S> {
        let eye = self.eye();
        let forward = (-eye).normalize();
        let world_up = Vec3::new(S::zero(), S::one(), S::zero());
        let right = match forward.cross(world_up).try_normalize() {
            Some(r) if forward.cross(world_up).norm() > S::lit(1e-6) => r,
            _ => {
                let s = if self.elevation > S::zero() { S::one() } else { -S::one() };
                let alt_up = Vec3::new(-self.azimuth.sin() * s, S::zero(), -self.azimuth.cos() * s);
                forward.cross(alt_up).normalize()
            }
        };
        let up = right.cross(forward);
        Frame {
            eye,
            right,
            up,
            forward,
        }
    }

    /// tan(fov_y/2) and the horizontal counterpart.
    pub fn tan_half_fov(&self) -> (S, S) {
        let ty = (self.fov_y * S::lit(0.5)).tan();
        let aspect = S::from_usize_lossy(self.width) / S::from_usize_lossy(self.height);
        (ty * aspect, ty)
    }

    /// Focal length in pixels along y.
    pub fn focal_px(&self) -> S {
        S::from_usize_lossy(self.height) * S::lit(0.5) / self.tan_half_fov().1
    }

    /// Unnormalized world-space direction through pixel coordinate `(px, py)`
    /// (pixel centers at half-integers); its forward component is 1.
    pub fn ray_dir(&self, frame: &Frame<S>, px: S, py: S) -> Vec3<S> {
        let (tx, ty) = self.tan_half_fov();
        let two = S::lit(2.0);
        let nx = (two * px / S::from_usize_lossy(self.width) - S::one()) * tx;
        let ny = (S::one() - two * py / S::from_usize_lossy(self.height)) * ty;
        frame.forward + frame.right * nx + frame.up * ny
    }

    /// Projects a world point to `(px, py, view_depth)`.
    pub fn project(&self, frame: &Frame<S>, p: Vec3<S>) -> (S, S, S) {
        let d = p - frame.eye;
        let z = d.dot(frame.forward);
        let (tx, ty) = self.tan_half_fov();
        let half = S::lit(0.5);
        let px = (d.dot(frame.right) / (z * tx) + S::one()) * half * S::from_usize_lossy(self.width);
        let py = (S::one() - d.dot(frame.up) / (z * ty)) * half * S::from_usize_lossy(self.height);
        (px, py, z)
    }
}

/// Ordered cameras plus the pairs that sit on opposite sides of the object.
#[derive(Debug, Clone, PartialEq)]
pub struct ViewPlan<S> {
    pub cameras: Vec<Camera<S>>,
    pub symmetric_pairs: Vec<(usize, usize)>,
}

pub const RING_DESCRIPTORS: [&str; 8] = [
    "front",
    "left front",
    "left",
    "left back",
    "back",
    "right back",
    "right",
    "right front",
];

pub const DEFAULT_RADIUS: f64 = 2.0;
pub const DEFAULT_FOV_DEG: f64 = 45.0;
pub const DEFAULT_IMAGE_SIZE: usize = 1024;

/// The ten-view surround plan: eight cameras on the equator every 45° plus top and bottom.
pub fn make_view_plan<S: Real>(image_size: (usize, usize), radius: S, fov_y: S) -> ViewPlan<S> {
    orbit_view_plan(8, image_size, radius, fov_y)
}

/// `ring` equatorial cameras at even azimuth spacing followed by top and bottom.
/// Cameras half a turn apart are paired when `ring` is even.
pub fn orbit_view_plan<S: Real>(ring: usize, image_size: (usize, usize), radius: S, fov_y: S) -> ViewPlan<S> {
    let (w, h) = image_size;
    let mut cameras: Vec<Camera<S>> = (0..ring)
        .map(|k| {
            let descriptor = if ring == 8 {
                RING_DESCRIPTORS[k].to_string()
            } else {
                format!("azimuth {}", (360 * k) / ring.max(1))
            };
            let az = S::TAU() * S::from_usize_lossy(k) / S::from_usize_lossy(ring);
            Camera::new(az, S::zero(), radius, fov_y, w, h, descriptor)
        })
        .collect();
    cameras.push(Camera::new(S::zero(), S::FRAC_PI_2(), radius, fov_y, w, h, "top"));
    cameras.push(Camera::new(S::zero(), -S::FRAC_PI_2(), radius, fov_y, w, h, "bottom"));
    let symmetric_pairs = if ring % 2 == 0 {
        (0..ring / 2).map(|k| (k, k + ring / 2)).collect()
    } else {
        Vec::new()
    };
    ViewPlan {
        cameras,
        symmetric_pairs,
    }
}

impl<S: Real> ViewPlan<S> {
    pub fn default_plan() -> Self {
        make_view_plan(
            (DEFAULT_IMAGE_SIZE, DEFAULT_IMAGE_SIZE),
            S::lit(DEFAULT_RADIUS),
            S::lit(DEFAULT_FOV_DEG.to_radians()),
        )
    }

    /// Plan with `views` cameras: `views - 2` on the equator plus top and bottom.
    pub fn with_view_count(views: usize, image_size: (usize, usize), radius: S, fov_y: S) -> Option<Self> {
        (views >= 3).then(|| orbit_view_plan(views - 2, image_size, radius, fov_y))
    }

    /// Cameras with no symmetric partner.
    pub fn unpaired(&self) -> Vec<usize> {
        (0..self.cameras.len())
            .filter(|i| !self.symmetric_pairs.iter().any(|&(a, b)| a == *i || b == *i))
            .collect()
    }
}
