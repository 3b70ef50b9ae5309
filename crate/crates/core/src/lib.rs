//! Texture restoration for simplified meshes.
//!
//! A high-resolution texture is baked onto a mesh by gradient descent against
//! posed target images, with a jointly optimized low-resolution texture
//! supervising the downsampled high-resolution one so that texels no pixel
//! samples still receive updates.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the aliases
//! below name the common instantiations.

pub mod decimation;
mod diag;
pub mod error;
pub mod geometry;
pub mod image;
pub mod imagesource;
pub mod linalg;
pub mod metrics;
pub mod raster;
pub mod scalar;
pub mod texopt;

pub use error::{BakeAborted, Error, Result};
pub use scalar::{cast, Real};

pub type Mesh32 = geometry::Mesh<f32>;
pub type Mesh64 = geometry::Mesh<f64>;
pub type Texture32 = texopt::Texture<f32>;
pub type Texture64 = texopt::Texture<f64>;
pub type Image32 = image::Image<f32>;
pub type Image64 = image::Image<f64>;
pub type GBuffer32 = raster::GBuffer<f32>;
pub type GBuffer64 = raster::GBuffer<f64>;
pub type Camera32 = raster::Camera<f32>;
pub type Camera64 = raster::Camera<f64>;
