//! CPU rasterization: orbit cameras, per-view G-buffers, keep/update
//! partitions and UV-space coverage masks.

mod camera;
mod masks;
mod rasterize;

pub use camera::{
    make_view_plan, orbit_view_plan, Camera, Frame, ViewPlan, DEFAULT_FOV_DEG, DEFAULT_IMAGE_SIZE, DEFAULT_RADIUS,
    RING_DESCRIPTORS,
};
pub use masks::{
    checkerboard_keep_blend, classify_keep_update, rasterize_uv_coverage, rasterize_uv_ids, texel_surface_points,
    AngleSemantics,
};
pub use rasterize::{depth_to_gray16, rasterize, GBuffer, BACKGROUND, UNTEXTURED_GRAY};
