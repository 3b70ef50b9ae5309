use super::{ImageSource, SourceError, ViewRequest};
use crate::error::Result;
use crate::geometry::Mesh;
use crate::image::Image;
use crate::raster::{rasterize, Camera};
use crate::scalar::Real;
use crate::texopt::Texture;

/// Render of a ground-truth textured mesh from `camera`.
pub fn oracle_targets<S: Real>(gt_mesh: &Mesh<S>, gt_texture: &Texture<S>, camera: &Camera<S>) -> Result<Image<S>> {
    Ok(rasterize(gt_mesh, camera, Some(gt_texture))?.color)
}

/// Target provider that renders a hidden ground truth, giving perfectly
/// view-consistent targets.
pub struct OracleSource<S> {
    mesh: Mesh<S>,
    texture: Texture<S>,
}

impl<S: Real> OracleSource<S> {
    pub fn new(mesh: Mesh<S>, texture: Texture<S>) -> Result<Self> {
        mesh.require_bake_ready()?;
        Ok(Self { mesh, texture })
    }

    pub fn mesh(&self) -> &Mesh<S> {
        &self.mesh
    }

    pub fn texture(&self) -> &Texture<S> {
        &self.texture
    }

    pub fn render(&self, camera: &Camera<S>) -> Result<Image<S>> {
        oracle_targets(&self.mesh, &self.texture, camera)
    }
}

impl<S: Real> ImageSource<S> for OracleSource<S> {
    fn generate(&mut self, views: &[ViewRequest<'_, S>]) -> Result<Vec<Image<S>>, SourceError> {
        views
            .iter()
            .map(|v| self.render(v.camera).map_err(|e| SourceError::Other(e.to_string())))
            .collect()
    }
}
