//! Providers of per-view target images and the keep/update blend.

mod blend;
mod files;
mod oracle;
mod pairing;

pub use blend::blend_keep_update;
pub use files::{descriptor_file_name, FilesSource};
pub use oracle::{oracle_targets, OracleSource};
pub use pairing::{pair_symmetric_views, splice_condition, split_condition, ViewGroup};

use thiserror::Error;

use crate::image::{Image, Mask};
use crate::raster::{Camera, GBuffer};
use crate::scalar::Real;

/// Everything a provider may use to produce one view's target.
pub struct ViewRequest<'a, S> {
    pub camera: &'a Camera<S>,
    pub gbuffer: &'a GBuffer<S>,
    /// Render of the current texture from this view.
    pub init: &'a Image<S>,
    pub update_mask: &'a Mask,
}

#[derive(Debug, Error)]
pub enum SourceError {
    #[error("connection failed: {0}")]
    Connection(String),
    #[error("generator returned HTTP {status}: {message}")]
    Status { status: u16, message: String },
    #[error("malformed generator response: {0}")]
    Malformed(String),
    #[error("image size mismatch for view {view:?}: expected {expected:?}, got {got:?}")]
    SizeMismatch {
        view: String,
        expected: (usize, usize),
        got: (usize, usize),
    },
    #[error("{0}")]
    Other(String),
}

/// A provider of target images. Called once per view group with one request
/// per view; must return one image per request with the request's size.
pub trait ImageSource<S: Real> {
    fn generate(&mut self, views: &[ViewRequest<'_, S>]) -> Result<Vec<Image<S>>, SourceError>;
}

pub(crate) fn check_sizes<S: Real>(views: &[ViewRequest<'_, S>], images: &[Image<S>]) -> Result<(), SourceError> {
    if images.len() != views.len() {
        return Err(SourceError::Malformed(format!(
            "{} image(s) for {} view(s)",
            images.len(),
            views.len()
        )));
    }
    for (v, img) in views.iter().zip(images) {
        let expected = (v.camera.width, v.camera.height);
        if img.dims() != expected {
            return Err(SourceError::SizeMismatch {
                view: v.camera.descriptor.clone(),
                expected,
                got: img.dims(),
            });
        }
    }
    Ok(())
}
