use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::config::BakeConfig;
use crate::raster::Camera;
use crate::scalar::Real;

/// Everything a bake produced, in plain numbers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BakeReport {
    pub config: BakeConfig,
    /// Settings outside [`BakeConfig`] (mesh path, source, prompt), as given.
    #[serde(default)]
    pub settings: Vec<(String, String)>,
    pub views: Vec<ViewReport>,
    pub gbuffers_rasterized: usize,
    pub gaps: Option<GapReport>,
    #[serde(default)]
    pub artifacts: Artifacts,
    pub timings: Timings,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CameraRecord {
    pub azimuth: f64,
    pub elevation: f64,
    pub radius: f64,
    pub fov_y: f64,
    pub width: usize,
    pub height: usize,
    pub descriptor: String,
}

impl CameraRecord {
    pub fn from_camera<S: Real>(c: &Camera<S>) -> Self {
        Self {
            azimuth: c.azimuth.as_f64(),
            elevation: c.elevation.as_f64(),
            radius: c.radius.as_f64(),
            fov_y: c.fov_y.as_f64(),
            width: c.width,
            height: c.height,
            descriptor: c.descriptor.clone(),
        }
    }

    pub fn to_camera<S: Real>(&self) -> Camera<S> {
        Camera::new(
            S::lit(self.azimuth),
            S::lit(self.elevation),
            S::lit(self.radius),
            S::lit(self.fov_y),
            self.width,
            self.height,
            self.descriptor.clone(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViewReport {
    pub index: usize,
    pub camera: CameraRecord,
    /// Plan indices generated together with this view (itself included).
    pub group: Vec<usize>,
    pub covered_pixels: usize,
    pub update_pixels: usize,
    /// Per-step losses, measured before each step.
    pub loss_hi: Vec<f64>,
    pub loss_lo: Vec<f64>,
    pub loss_uv: Vec<f64>,
    /// Update-region PSNR of the high-resolution render against the blended
    /// target right after this view; `null` when they match exactly.
    #[serde(with = "inf_as_null")]
    pub psnr_update: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub epsilon: f64,
    pub count: usize,
    /// Texels inside the high-resolution UV coverage.
    pub total: usize,
    pub fraction: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Artifacts {
    pub mesh: Option<PathBuf>,
    pub texture: Option<PathBuf>,
    pub lo_texture: Option<PathBuf>,
    pub update_magnitude: Option<PathBuf>,
}

/// Wall-clock seconds per stage.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub rasterize: f64,
    pub generate: f64,
    pub optimize: f64,
    pub gap_scan: f64,
    pub total: f64,
}

impl BakeReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// Copy with timings zeroed, for comparing runs.
    pub fn without_timings(&self) -> Self {
        Self {
            timings: Timings::default(),
            ..self.clone()
        }
    }
}

mod inf_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<Se: Serializer>(v: &f64, s: Se) -> Result<Se::Ok, Se::Error> {
        if v.is_infinite() && *v > 0.0 {
            s.serialize_none()
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}
