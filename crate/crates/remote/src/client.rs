use std::time::Duration;

use texrestore::image::{split_horizontal, Image, Mask};
use texrestore::imagesource::{blend_keep_update, splice_condition, ImageSource, SourceError, ViewRequest};
use texrestore::raster::depth_to_gray16;
use texrestore::Real;

use crate::protocol::{
    decode_b64, encode_b64, ErrorBody, GenerateRequest, GenerateResponse, WireCamera, WireView, GENERATE_PATH,
};

pub const DEFAULT_DENOISE_STEPS: u32 = 100;

/// Target provider backed by an HTTP generation service.
pub struct RemoteSource {
    endpoint: String,
    pub prompt: String,
    pub negative_prompt: String,
    pub denoise_steps: u32,
    pub noise_strength: f64,
    pub seed: u64,
    agent: ureq::Agent,
}

impl RemoteSource {
    /// `endpoint` is the service root, e.g. `http://127.0.0.1:8000`.
    pub fn new(endpoint: impl Into<String>) -> Self {
        let agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(Duration::from_secs(3600)))
            .build()
            .into();
        Self {
            endpoint: endpoint.into().trim_end_matches('/').to_string(),
            prompt: String::new(),
            negative_prompt: String::new(),
            denoise_steps: DEFAULT_DENOISE_STEPS,
            noise_strength: 1.0,
            seed: 0,
            agent,
        }
    }

    pub fn url(&self) -> String {
        format!("{}{}", self.endpoint, GENERATE_PATH)
    }

    pub fn build_request<S: Real>(&self, views: &[ViewRequest<'_, S>]) -> Result<GenerateRequest, SourceError> {
        let png = |r: texrestore::Result<Vec<u8>>| r.map_err(|e| SourceError::Other(e.to_string()));
        let depths: Vec<_> = views.iter().map(|v| depth_to_gray16(v.gbuffer)).collect();
        let wire = views
            .iter()
            .zip(&depths)
            .map(|(v, d)| {
                Ok(WireView {
                    descriptor: v.camera.descriptor.clone(),
                    depth_png_b64: encode_b64(&png(d.to_png())?),
                    init_png_b64: encode_b64(&png(v.init.to_png())?),
                    mask_png_b64: encode_b64(&png(v.update_mask.to_png())?),
                    camera: WireCamera::from_camera(v.camera),
                })
            })
            .collect::<Result<Vec<_>, SourceError>>()?;
        let condition = match depths.as_slice() {
            [a, b] => Some(png(splice_condition(a, Some(b)).and_then(|c| c.to_png()))?),
            _ => None,
        };
        Ok(GenerateRequest {
            prompt: self.prompt.clone(),
            negative_prompt: self.negative_prompt.clone(),
            denoise_steps: self.denoise_steps,
            noise_strength: self.noise_strength,
            seed: self.seed,
            views: wire,
            condition_png_b64: condition.map(|c| encode_b64(&c)),
        })
    }
}

fn decode_image<S: Real>(b64: &str) -> Result<Image<S>, SourceError> {
    let bytes = decode_b64(b64).map_err(|e| SourceError::Malformed(format!("base64: {e}")))?;
    Image::from_png(&bytes).map_err(|e| SourceError::Malformed(e.to_string()))
}

fn expect_size<S: Real>(view: &ViewRequest<'_, S>, img: &Image<S>) -> Result<(), SourceError> {
    let expected = (view.camera.width, view.camera.height);
    if img.dims() != expected {
        return Err(SourceError::SizeMismatch {
            view: view.camera.descriptor.clone(),
            expected,
            got: img.dims(),
        });
    }
    Ok(())
}

impl<S: Real> ImageSource<S> for RemoteSource {
    fn generate(&mut self, views: &[ViewRequest<'_, S>]) -> Result<Vec<Image<S>>, SourceError> {
        let body = serde_json::to_vec(&self.build_request(views)?)
            .map_err(|e| SourceError::Other(format!("encoding request: {e}")))?;
        let mut resp = self
            .agent
            .post(&self.url())
            .header("content-type", "application/json")
            .send(&body[..])
            .map_err(|e| SourceError::Connection(e.to_string()))?;
        let status = resp.status().as_u16();
        let text = resp
            .body_mut()
            .with_config()
            .limit(u64::MAX)
            .read_to_string()
            .map_err(|e| SourceError::Connection(e.to_string()))?;
        if status != 200 {
            let message = serde_json::from_str::<ErrorBody>(&text)
                .map(|b| b.error)
                .unwrap_or_else(|_| text.chars().take(200).collect());
            return Err(SourceError::Status { status, message });
        }
        let parsed: GenerateResponse =
            serde_json::from_str(&text).map_err(|e| SourceError::Malformed(format!("response body: {e}")))?;
        let images: Vec<Image<S>> = match (parsed.images_png_b64.len(), views.len()) {
            (n, m) if n == m => parsed
                .images_png_b64
                .iter()
                .map(|b| decode_image(b))
                .collect::<Result<_, _>>()?,
            (1, 2) => {
                let joined: Image<S> = decode_image(&parsed.images_png_b64[0])?;
                let left = views[0].camera.width;
                let expected = (left + views[1].camera.width, views[0].camera.height);
                if joined.dims() != expected {
                    return Err(SourceError::SizeMismatch {
                        view: format!("{} | {}", views[0].camera.descriptor, views[1].camera.descriptor),
                        expected,
                        got: joined.dims(),
                    });
                }
                let (a, b) = split_horizontal(&joined, left).map_err(|e| SourceError::Malformed(e.to_string()))?;
                vec![a, b]
            }
            (n, m) => {
                return Err(SourceError::Malformed(format!("{n} image(s) returned for {m} view(s)")));
            }
        };
        views
            .iter()
            .zip(images)
            .map(|(v, img)| {
                expect_size(v, &img)?;
                blend(&img, v.init, v.update_mask)
            })
            .collect()
    }
}

fn blend<S: Real>(generated: &Image<S>, init: &Image<S>, mask: &Mask) -> Result<Image<S>, SourceError> {
    blend_keep_update(generated, init, mask).map_err(|e| SourceError::Other(e.to_string()))
}
