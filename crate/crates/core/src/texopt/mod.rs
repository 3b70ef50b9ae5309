//! Texture optimization: differentiable bilinear sampling, view and
//! dual-resolution losses, the per-view optimizer and the multi-view bake.

mod bake;
mod config;
mod loss;
mod optim;
mod report;
mod texture;

pub use bake::{
    bake, bake_with_init, initial_textures, optimize_view, optimize_view_with, BakeOutput, OptimizerState, ViewLosses,
};
pub use config::{BakeConfig, InitTexture, OptimizerKind};
pub use loss::{render_view, uv_self_supervision, view_loss_and_grad};
pub use report::{Artifacts, BakeReport, CameraRecord, GapReport, Timings, ViewReport};
pub use texture::{
    bilinear_footprint, downsample_box, downsample_box_adjoint, upsample_nearest, uv_to_texel, Footprint, TexelGrad,
    Texture,
};
