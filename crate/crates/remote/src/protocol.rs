//! JSON bodies of `POST /v1/generate`.

use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use serde::{Deserialize, Serialize};
use texrestore::raster::Camera;
use texrestore::Real;

pub const GENERATE_PATH: &str = "/v1/generate";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerateRequest {
    pub prompt: String,
    pub negative_prompt: String,
    pub denoise_steps: u32,
    pub noise_strength: f64,
    pub seed: u64,
    pub views: Vec<WireView>,
    /// Horizontal splice of the views' depth maps, as sent to a generator
    /// that takes a single condition image.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub condition_png_b64: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WireView {
    pub descriptor: String,
    pub depth_png_b64: String,
    pub init_png_b64: String,
    pub mask_png_b64: String,
    pub camera: WireCamera,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WireCamera {
    pub azimuth: f64,
    pub elevation: f64,
    pub radius: f64,
    pub fov_y: f64,
    pub width: usize,
    pub height: usize,
}

impl WireCamera {
    pub fn from_camera<S: Real>(c: &Camera<S>) -> Self {
        Self {
            azimuth: c.azimuth.as_f64(),
            elevation: c.elevation.as_f64(),
            radius: c.radius.as_f64(),
            fov_y: c.fov_y.as_f64(),
            width: c.width,
            height: c.height,
        }
    }

    pub fn to_camera<S: Real>(&self, descriptor: &str) -> Camera<S> {
        Camera::new(
            S::lit(self.azimuth),
            S::lit(self.elevation),
            S::lit(self.radius),
            S::lit(self.fov_y),
            self.width,
            self.height,
            descriptor,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerateResponse {
    pub images_png_b64: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
}

pub fn encode_b64(bytes: &[u8]) -> String {
    STANDARD.encode(bytes)
}

pub fn decode_b64(text: &str) -> Result<Vec<u8>, base64::DecodeError> {
    STANDARD.decode(text)
}
