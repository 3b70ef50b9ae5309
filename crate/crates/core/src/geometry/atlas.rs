//! Deterministic per-triangle chart packer used when a mesh has no usable UVs.
//!
//! Triangles are packed two per square grid cell: one in the lower-left half and
//! one in the upper-right half. Each chart is a right isosceles triangle whose
//! right angle receives the triangle's widest corner. Charts are inset from the
//! cell border by [`CELL_MARGIN_TEXELS`] and the two halves of a cell are pulled
//! apart along the diagonal, so at the declared resolution any two charts are at
//! least two texels apart.

use super::Mesh;
use crate::error::{Error, Result};
use crate::linalg::Vec2;
use crate::scalar::Real;

/// Inset of every chart from its cell border, in texels.
pub const CELL_MARGIN_TEXELS: f64 = 1.0;
/// Leg shortening that separates the two hypotenuses of a cell, in texels.
/// Perpendicular distance between them is `sqrt(2)` times this.
pub const DIAGONAL_GAP_TEXELS: f64 = 1.5;
/// Smallest chart leg accepted, in texels.
pub const MIN_CHART_TEXELS: f64 = 4.0;

pub fn generate_fallback_atlas<S: Real>(mesh: &Mesh<S>, texture_resolution: usize) -> Result<Mesh<S>> {
    let n = mesh.triangle_count();
    if n == 0 {
        return Err(Error::NoTriangles);
    }
    let res = texture_resolution as f64;
    let cells = n.div_ceil(2);
    let grid = (cells as f64).sqrt().ceil() as usize;
    let cell = 1.0 / grid as f64;
    let margin = CELL_MARGIN_TEXELS / res;
    let leg = cell - 2.0 * margin - DIAGONAL_GAP_TEXELS / res;
    if leg * res < MIN_CHART_TEXELS {
        return Err(Error::AtlasTooDense {
            side: leg * res,
            resolution: texture_resolution,
        });
    }

    let uvs = (0..n)
        .map(|t| {
            let c = t / 2;
            let (ox, oy) = ((c % grid) as f64 * cell, (c / grid) as f64 * cell);
            let right = widest_corner(mesh, t);
            let local: [(f64, f64); 3] = if t % 2 == 0 {
                let (x, y) = (ox + margin, oy + margin);
                [(x, y), (x + leg, y), (x, y + leg)]
            } else {
                let (x, y) = (ox + cell - margin, oy + cell - margin);
                [(x, y), (x - leg, y), (x, y - leg)]
            };
            let mut w = [Vec2::zero(); 3];
            for k in 0..3 {
                let (u, v) = local[k];
                w[(right + k) % 3] = Vec2::new(S::lit(u), S::lit(v));
            }
            w
        })
        .collect();
    mesh.clone().with_corner_uvs(Some(uvs))
}

fn widest_corner<S: Real>(mesh: &Mesh<S>, t: usize) -> usize {
    let p = mesh.triangle_positions(t);
    let mut best = (0, f64::NEG_INFINITY);
    for k in 0..3 {
        let a = (p[(k + 1) % 3] - p[k]).cast::<f64>();
        let b = (p[(k + 2) % 3] - p[k]).cast::<f64>();
        let angle = a.cross(b).norm().atan2(a.dot(b));
        if angle > best.1 {
            best = (k, angle);
        }
    }
    best.0
}
