use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{AngleSemantics, DEFAULT_FOV_DEG, DEFAULT_IMAGE_SIZE, DEFAULT_RADIUS};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum OptimizerKind {
    Adam { beta1: f64, beta2: f64, epsilon: f64 },
    Sgd,
}

impl Default for OptimizerKind {
    fn default() -> Self {
        OptimizerKind::Adam {
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitTexture {
    #[default]
    White,
    File(PathBuf),
}

/// All bake tunables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BakeConfig {
    pub hi_resolution: usize,
    pub lo_resolution: usize,
    pub steps_per_view: usize,
    pub learning_rate: f64,
    /// Weight of the downsampled-high vs low-resolution texture loss.
    pub uv_loss_weight: f64,
    /// Normal/view angle separating update from keep pixels, radians.
    pub keep_update_threshold: f64,
    pub angle_semantics: AngleSemantics,
    pub optimizer: OptimizerKind,
    pub checkerboard_keep_blend: bool,
    /// Width in pixels of the keep band affected by the checkerboard blend.
    pub checkerboard_band: usize,
    pub init_texture: InitTexture,
    /// Texels whose accumulated update is at most this are reported as gaps.
    pub gap_epsilon: f64,
    pub render_size: usize,
    pub camera_radius: f64,
    pub fov_y_deg: f64,
    pub views: usize,
    pub seed: u64,
}

impl Default for BakeConfig {
    fn default() -> Self {
        Self {
            hi_resolution: 1024,
            lo_resolution: 256,
            steps_per_view: 200,
            learning_rate: 0.01,
            uv_loss_weight: 1.0,
            keep_update_threshold: std::f64::consts::PI / 5.0,
            angle_semantics: AngleSemantics::Facing,
            optimizer: OptimizerKind::default(),
            checkerboard_keep_blend: false,
            checkerboard_band: 8,
            init_texture: InitTexture::White,
            gap_epsilon: 1e-9,
            render_size: DEFAULT_IMAGE_SIZE,
            camera_radius: DEFAULT_RADIUS,
            fov_y_deg: DEFAULT_FOV_DEG,
            views: 10,
            seed: 0,
        }
    }
}

impl BakeConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.hi_resolution == 0 || self.lo_resolution == 0 {
            return fail("resolutions must be positive".into());
        }
        if self.hi_resolution % self.lo_resolution != 0 {
            return fail(format!(
                "low resolution {} does not divide high resolution {}",
                self.lo_resolution, self.hi_resolution
            ));
        }
        if self.steps_per_view == 0 {
            return fail("steps per view must be at least 1".into());
        }
        if !(self.learning_rate > 0.0) {
            return fail("learning rate must be positive".into());
        }
        if !(self.uv_loss_weight >= 0.0) {
            return fail("uv loss weight must be nonnegative".into());
        }
        let t = self.keep_update_threshold;
        if !(t > 0.0 && t < std::f64::consts::FRAC_PI_2) {
            return fail(format!("threshold {t} rad outside (0, pi/2)"));
        }
        if !(self.gap_epsilon >= 0.0) {
            return fail("gap epsilon must be nonnegative".into());
        }
        if self.render_size == 0 || !(self.camera_radius > 0.0) {
            return fail("render size and camera radius must be positive".into());
        }
        if !(self.fov_y_deg > 0.0 && self.fov_y_deg < 180.0) {
            return fail("fov must lie in (0, 180) degrees".into());
        }
        if self.views < 3 {
            return fail("at least 3 views are required".into());
        }
        if let OptimizerKind::Adam { beta1, beta2, epsilon } = self.optimizer {
            if !((0.0..1.0).contains(&beta1) && (0.0..1.0).contains(&beta2) && epsilon > 0.0) {
                return fail("invalid Adam constants".into());
            }
        }
        Ok(())
    }

    pub fn downsample_factor(&self) -> usize {
        self.hi_resolution / self.lo_resolution
    }

    /// Noise level sent to generators: partial for a textured start, full from white.
    pub fn noise_strength(&self) -> f64 {
        match self.init_texture {
            InitTexture::White => 1.0,
            InitTexture::File(_) => 0.6,
        }
    }
}
