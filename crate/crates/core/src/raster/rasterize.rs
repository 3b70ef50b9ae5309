use rayon::prelude::*;

use super::camera::Camera;
use crate::error::{Error, Result};
use crate::geometry::Mesh;
use crate::image::{Grid, Image, Mask};
use crate::linalg::{Vec2, Vec3};
use crate::scalar::Real;
use crate::texopt::Texture;

/// Flat shade for untextured renders.
pub const UNTEXTURED_GRAY: f64 = 0.8;
/// Color of pixels no triangle covers.
pub const BACKGROUND: f64 = 1.0;

const BAND_ROWS: usize = 16;

/// Per-pixel rasterization output.
#[derive(Debug, Clone, PartialEq)]
pub struct GBuffer<S> {
    pub width: usize,
    pub height: usize,
    pub color: Image<S>,
    /// Euclidean distance from the eye along the pixel ray; +∞ where uncovered.
    pub depth: Grid<S>,
    pub normal: Grid<Vec3<S>>,
    pub uv: Grid<Vec2<S>>,
    pub tri_id: Grid<Option<u32>>,
    /// Cosine between the surface normal and the direction from the surface toward the eye.
    pub facing_cos: Grid<S>,
    pub coverage: Mask,
}

impl<S: Real> GBuffer<S> {
    pub fn covered_count(&self) -> usize {
        self.coverage.count()
    }

    pub fn empty(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            color: Image::filled(width, height, [S::lit(BACKGROUND); 3]),
            depth: Grid::filled(width, height, S::infinity()),
            normal: Grid::filled(width, height, Vec3::zero()),
            uv: Grid::filled(width, height, Vec2::zero()),
            tri_id: Grid::filled(width, height, None),
            facing_cos: Grid::filled(width, height, S::zero()),
            coverage: Grid::filled(width, height, false),
        }
    }
}

struct Projected<S> {
    tri: u32,
    screen: [(S, S); 3],
    inv_z: [S; 3],
    area: S,
    y_range: (usize, usize),
    x_range: (usize, usize),
}

#[derive(Clone, Copy)]
struct Hit<S> {
    depth: S,
    tri: u32,
    bary: [S; 3],
}

/// Z-buffered perspective rasterization with back-face culling.
///
/// Pixel `(x, y)` is sampled at `(x + 0.5, y + 0.5)`. Attributes use
/// perspective-correct barycentrics. Equal depths resolve to the lower
/// triangle index, so the output does not depend on the thread count.
pub fn rasterize<S: Real>(mesh: &Mesh<S>, camera: &Camera<S>, texture: Option<&Texture<S>>) -> Result<GBuffer<S>> {
    if !camera.is_valid() {
        return Err(Error::Config(format!("invalid camera {:?}", camera.descriptor)));
    }
    if texture.is_some() {
        mesh.require_bake_ready()?;
    }
    let (w, h) = (camera.width, camera.height);
    let frame = camera.frame();
    let near = camera.radius * S::lit(1e-4);

    let projected: Vec<Projected<S>> = (0..mesh.triangle_count())
        .into_par_iter()
        .filter_map(|t| {
            let p = mesh.triangle_positions(t);
            let n = (p[1] - p[0]).cross(p[2] - p[0]);
            if n.dot(frame.eye - p[0]) <= S::zero() {
                return None;
            }
            let mut screen = [(S::zero(), S::zero()); 3];
            let mut inv_z = [S::zero(); 3];
            for k in 0..3 {
                let (x, y, z) = camera.project(&frame, p[k]);
                if z <= near {
                    // TODO: clip against the near plane instead of dropping the triangle.
                    return None;
                }
                screen[k] = (x, y);
                inv_z[k] = S::one() / z;
            }
            let area = edge(screen[0], screen[1], screen[2]);
            if area == S::zero() || !area.is_finite() {
                return None;
            }
            let xs = screen.map(|s| s.0);
            let ys = screen.map(|s| s.1);
            let range = |v: [S; 3], n: usize| -> Option<(usize, usize)> {
                let lo = v[0].min(v[1]).min(v[2]) - S::lit(0.5);
                let hi = v[0].max(v[1]).max(v[2]) - S::lit(0.5);
                let lo = lo.ceil().max(S::zero());
                let hi = hi.floor().min(S::from_usize_lossy(n) - S::one());
                (lo <= hi).then(|| (lo.to_usize().unwrap_or(0), hi.to_usize().unwrap_or(0)))
            };
            Some(Projected {
                tri: t as u32,
                screen,
                inv_z,
                area,
                y_range: range(ys, h)?,
                x_range: range(xs, w)?,
            })
        })
        .collect();

    let bands = h.div_ceil(BAND_ROWS);
    let mut binned: Vec<Vec<u32>> = vec![Vec::new(); bands];
    for (i, pt) in projected.iter().enumerate() {
        for band in binned.iter_mut().take(pt.y_range.1 / BAND_ROWS + 1).skip(pt.y_range.0 / BAND_ROWS) {
            band.push(i as u32);
        }
    }

    let empty = Hit {
        depth: S::infinity(),
        tri: u32::MAX,
        bary: [S::zero(); 3],
    };
    let mut hits = vec![empty; w * h];
    let half = S::lit(0.5);
    hits.par_chunks_mut(w * BAND_ROWS).enumerate().for_each(|(band, rows)| {
        let y0 = band * BAND_ROWS;
        let y1 = y0 + rows.len() / w;
        for &pi in &binned[band] {
            let pt = &projected[pi as usize];
            let p = mesh.triangle_positions(pt.tri as usize);
            for y in pt.y_range.0.max(y0)..=pt.y_range.1.min(y1 - 1) {
                let py = S::from_usize_lossy(y) + half;
                for x in pt.x_range.0..=pt.x_range.1 {
                    let px = S::from_usize_lossy(x) + half;
                    let q = (px, py);
                    let b0 = edge(pt.screen[1], pt.screen[2], q) / pt.area;
                    let b1 = edge(pt.screen[2], pt.screen[0], q) / pt.area;
                    let b2 = edge(pt.screen[0], pt.screen[1], q) / pt.area;
                    if b0 < S::zero() || b1 < S::zero() || b2 < S::zero() {
                        continue;
                    }
                    let w0 = b0 * pt.inv_z[0];
                    let w1 = b1 * pt.inv_z[1];
                    let w2 = b2 * pt.inv_z[2];
                    let sum = w0 + w1 + w2;
                    let bary = [w0 / sum, w1 / sum, w2 / sum];
                    let point = p[0] * bary[0] + p[1] * bary[1] + p[2] * bary[2];
                    let depth = (point - frame.eye).norm();
                    let slot = &mut rows[(y - y0) * w + x];
                    if depth < slot.depth || (depth == slot.depth && pt.tri < slot.tri) {
                        *slot = Hit {
                            depth,
                            tri: pt.tri,
                            bary,
                        };
                    }
                }
            }
        }
    });

    let uvs = mesh.corner_uvs();
    let normals = mesh.vertex_normals();
    let gray = S::lit(UNTEXTURED_GRAY);
    let shaded: Vec<_> = hits
        .par_iter()
        .map(|hit| {
            if hit.tri == u32::MAX {
                return None;
            }
            let t = hit.tri as usize;
            let [i0, i1, i2] = mesh.triangles()[t].map(|i| i as usize);
            let b = hit.bary;
            let p = mesh.triangle_positions(t);
            let point = p[0] * b[0] + p[1] * b[1] + p[2] * b[2];
            let n = (normals[i0] * b[0] + normals[i1] * b[1] + normals[i2] * b[2])
                .try_normalize()
                .unwrap_or_else(|| (p[1] - p[0]).cross(p[2] - p[0]).normalize());
            let uv = uvs
                .map(|u| {
                    let w = u[t];
                    w[0] * b[0] + w[1] * b[1] + w[2] * b[2]
                })
                .unwrap_or(Vec2::zero());
            let to_eye = (frame.eye - point).normalize();
            let facing = n.dot(to_eye).max(-S::one()).min(S::one());
            let color = match texture {
                Some(tex) => tex.sample_bilinear(clamp_uv(uv)).0,
                None => [gray; 3],
            };
            Some((color, hit.depth, n, uv, hit.tri, facing))
        })
        .collect();

    let mut g = GBuffer::empty(w, h);
    for (i, s) in shaded.into_iter().enumerate() {
        if let Some((color, depth, n, uv, tri, facing)) = s {
            g.color.as_mut_slice()[i] = color;
            g.depth.as_mut_slice()[i] = depth;
            g.normal.as_mut_slice()[i] = n;
            g.uv.as_mut_slice()[i] = uv;
            g.tri_id.as_mut_slice()[i] = Some(tri);
            g.facing_cos.as_mut_slice()[i] = facing;
            g.coverage.as_mut_slice()[i] = true;
        }
    }
    Ok(g)
}

#[inline]
fn clamp_uv<S: Real>(uv: Vec2<S>) -> Vec2<S> {
    Vec2::new(uv.x.max(S::zero()).min(S::one()), uv.y.max(S::zero()).min(S::one()))
}

#[inline]
fn edge<S: Real>(a: (S, S), b: (S, S), p: (S, S)) -> S {
    (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0)
}

/// Depth normalized over covered pixels (nearest = 65535, farthest = 0) with
/// uncovered pixels 0, as 16-bit grayscale.
pub fn depth_to_gray16<S: Real>(g: &GBuffer<S>) -> Grid<u16> {
    let covered = g.depth.as_slice().iter().zip(g.coverage.as_slice()).filter(|(_, &c)| c).map(|(&d, _)| d);
    let (near, far) = covered.fold((S::infinity(), S::neg_infinity()), |(lo, hi), d| (lo.min(d), hi.max(d)));
    let span = far - near;
    let data = g
        .depth
        .as_slice()
        .iter()
        .zip(g.coverage.as_slice())
        .map(|(&d, &c)| {
            if !c {
                0
            } else {
                let v = if span > S::zero() { (far - d) / span } else { S::one() };
                (v.max(S::zero()).min(S::one()) * S::lit(65535.0)).round().to_u16().unwrap_or(0)
            }
        })
        .collect();
    Grid::from_vec(g.width, g.height, data).expect("same dimensions")
}
