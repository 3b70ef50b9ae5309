use super::GBuffer;
use crate::geometry::Mesh;
use crate::image::{Grid, Mask};
use crate::linalg::Vec3;
use crate::scalar::Real;

/// How the normal/view angle threshold splits covered pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AngleSemantics {
    /// Update where the surface faces the camera within the threshold.
    #[default]
    Facing,
    /// Update where the angle exceeds the threshold (exact complement of `Facing`).
    Literal,
}

/// Update (`true`) / keep (`false`) partition of a view. Uncovered pixels are keep.
pub fn classify_keep_update<S: Real>(g: &GBuffer<S>, threshold: S, semantics: AngleSemantics) -> Mask {
    let cos_t = threshold.cos();
    let data = g
        .coverage
        .as_slice()
        .iter()
        .zip(g.facing_cos.as_slice())
        .map(|(&covered, &f)| {
            covered
                && match semantics {
                    AngleSemantics::Facing => f > cos_t,
                    AngleSemantics::Literal => !(f > cos_t),
                }
        })
        .collect();
    Mask::from_vec(g.width, g.height, data).expect("same dimensions")
}

/// Moves covered keep pixels within `band` pixels (Chebyshev) of the update
/// region into the update region on a 2×2 checkerboard.
pub fn checkerboard_keep_blend(update: &Mask, coverage: &Mask, band: usize) -> Mask {
    let (w, h) = update.dims();
    let dist = chebyshev_distance(update);
    Mask::from_fn(w, h, |x, y| {
        let i = y * w + x;
        if update.as_slice()[i] {
            return true;
        }
        coverage.as_slice()[i] && dist[i] <= band && ((x / 2) + (y / 2)) % 2 == 0
    })
}

/// Chessboard distance to the nearest `true` cell (two-pass chamfer transform).
fn chebyshev_distance(m: &Mask) -> Vec<usize> {
    let (w, h) = m.dims();
    let far = w + h;
    let mut d: Vec<usize> = m.as_slice().iter().map(|&b| if b { 0 } else { far }).collect();
    for y in 0..h {
        for x in 0..w {
            let mut best = d[y * w + x];
            for (dx, dy) in [(-1i64, -1i64), (0, -1), (1, -1), (-1, 0)] {
                let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                if nx >= 0 && ny >= 0 && (nx as usize) < w {
                    best = best.min(d[ny as usize * w + nx as usize] + 1);
                }
            }
            d[y * w + x] = best;
        }
    }
    for y in (0..h).rev() {
        for x in (0..w).rev() {
            let mut best = d[y * w + x];
            for (dx, dy) in [(1i64, 1i64), (0, 1), (-1, 1), (1, 0)] {
                let (nx, ny) = (x as i64 + dx, y as i64 + dy);
                if nx >= 0 && (nx as usize) < w && (ny as usize) < h {
                    best = best.min(d[ny as usize * w + nx as usize] + 1);
                }
            }
            d[y * w + x] = best;
        }
    }
    d
}

/// UV triangle of `t` in continuous texel space (x right, y down, texel `i`
/// spans `[i, i+1]`).
fn uv_texel_triangle<S: Real>(mesh: &Mesh<S>, t: usize, res: usize) -> Option<[(f64, f64); 3]> {
    let w = mesh.corner_uvs()?[t];
    let r = res as f64;
    Some(w.map(|uv| (uv.x.as_f64() * r, (1.0 - uv.y.as_f64()) * r)))
}

/// Closed triangle / axis-aligned square overlap by separating axes.
fn overlaps_texel(tri: &[(f64, f64); 3], i: usize, j: usize) -> bool {
    let (x0, y0) = (i as f64, j as f64);
    let (x1, y1) = (x0 + 1.0, y0 + 1.0);
    let xs = tri.map(|p| p.0);
    let ys = tri.map(|p| p.1);
    if xs.iter().cloned().fold(f64::INFINITY, f64::min) > x1
        || xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max) < x0
        || ys.iter().cloned().fold(f64::INFINITY, f64::min) > y1
        || ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max) < y0
    {
        return false;
    }
    let corners = [(x0, y0), (x1, y0), (x0, y1), (x1, y1)];
    for k in 0..3 {
        let a = tri[k];
        let b = tri[(k + 1) % 3];
        let c = tri[(k + 2) % 3];
        let n = (b.1 - a.1, a.0 - b.0);
        let side = |p: (f64, f64)| n.0 * (p.0 - a.0) + n.1 * (p.1 - a.1);
        let s = side(c);
        if s == 0.0 {
            continue;
        }
        if corners.iter().all(|&q| side(q) * s < 0.0) {
            return false;
        }
    }
    true
}

fn texel_range(tri: &[(f64, f64); 3], res: usize) -> Option<((usize, usize), (usize, usize))> {
    let lo = |v: [f64; 3]| (v[0].min(v[1]).min(v[2]).floor() - 1.0).max(0.0) as usize;
    let hi = |v: [f64; 3]| {
        let m = v[0].max(v[1]).max(v[2]).floor() + 1.0;
        if m < 0.0 {
            None
        } else {
            Some((m as usize).min(res - 1))
        }
    };
    let xs = tri.map(|p| p.0);
    let ys = tri.map(|p| p.1);
    let (x0, y0) = (lo(xs), lo(ys));
    let (x1, y1) = (hi(xs)?, hi(ys)?);
    (x0 <= x1 && y0 <= y1).then_some(((x0, x1), (y0, y1)))
}

fn for_each_covered_texel<S: Real>(mesh: &Mesh<S>, res: usize, mut f: impl FnMut(usize, usize)) {
    if res == 0 {
        return;
    }
    for t in 0..mesh.triangle_count() {
        let Some(tri) = uv_texel_triangle(mesh, t, res) else {
            return;
        };
        let Some(((x0, x1), (y0, y1))) = texel_range(&tri, res) else {
            continue;
        };
        for j in y0..=y1 {
            for i in x0..=x1 {
                if overlaps_texel(&tri, i, j) {
                    f(t, j * res + i);
                }
            }
        }
    }
}

/// Texel mask of the mesh's UV footprint at `resolution`².
///
/// A texel is set when its square touches a UV triangle, i.e. its center lies
/// inside the triangle or within half a texel of it in the max-norm. The rule
/// nests across resolutions: a texel set at resolution `r` lies in a block whose
/// coarse texel is set at every resolution `r / k`.
pub fn rasterize_uv_coverage<S: Real>(mesh: &Mesh<S>, resolution: usize) -> Mask {
    let mut m = Mask::filled(resolution, resolution, false);
    let data = m.as_mut_slice();
    for_each_covered_texel(mesh, resolution, |_, i| data[i] = true);
    m
}

/// Per-texel owning triangle and the number of texels claimed by more than one triangle.
pub fn rasterize_uv_ids<S: Real>(mesh: &Mesh<S>, resolution: usize) -> (Grid<Option<u32>>, usize) {
    let mut ids = Grid::filled(resolution, resolution, None);
    let mut conflicts = 0;
    let data = ids.as_mut_slice();
    for_each_covered_texel(mesh, resolution, |t, i| match data[i] {
        Some(prev) if prev != t as u32 => conflicts += 1,
        _ => data[i] = Some(t as u32),
    });
    (ids, conflicts)
}

/// Surface point under each covered texel center (texel centers outside their
/// triangle are projected onto it).
pub fn texel_surface_points<S: Real>(mesh: &Mesh<S>, resolution: usize) -> Grid<Option<Vec3<S>>> {
    let (ids, _) = rasterize_uv_ids(mesh, resolution);
    let res = resolution;
    let mut out = Grid::filled(res, res, None);
    for j in 0..res {
        for i in 0..res {
            let Some(t) = *ids.get(i, j) else { continue };
            let tri = uv_texel_triangle(mesh, t as usize, res).expect("ids imply UVs");
            let q = (i as f64 + 0.5, j as f64 + 0.5);
            let area = cross2(tri[0], tri[1], tri[2]);
            let mut b = [
                cross2(tri[1], tri[2], q) / area,
                cross2(tri[2], tri[0], q) / area,
                cross2(tri[0], tri[1], q) / area,
            ];
            for v in b.iter_mut() {
                *v = v.max(0.0);
            }
            let s: f64 = b.iter().sum();
            let p = mesh.triangle_positions(t as usize);
            let pos = p[0] * S::lit(b[0] / s) + p[1] * S::lit(b[1] / s) + p[2] * S::lit(b[2] / s);
            out.set(i, j, Some(pos));
        }
    }
    out
}

fn cross2(a: (f64, f64), b: (f64, f64), p: (f64, f64)) -> f64 {
    (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::generate_fallback_atlas;
    use crate::geometry::shapes::{cube, grid_quad, icosphere};
    use crate::linalg::Vec2;
    use crate::raster::{rasterize, Camera};
    use proptest::prelude::*;

    fn front(size: usize) -> Camera<f64> {
        Camera::new(0.0, 0.0, 2.0, 45f64.to_radians(), size, size, "front")
    }

    #[test]
    fn head_on_plane_is_all_update() {
        let g = rasterize(&grid_quad::<f64>(2), &front(48), None).unwrap();
        let m = classify_keep_update(&g, std::f64::consts::PI / 5.0, AngleSemantics::Facing);
        assert_eq!(m, g.coverage);
    }

    #[test]
    fn sphere_update_fraction_matches_closed_form() {
        let (r, d, theta) = (0.5f64, 2.0f64, std::f64::consts::PI / 5.0);
        let g = rasterize(&icosphere::<f64>(5, r), &front(384), None).unwrap();
        let m = classify_keep_update(&g, theta, AngleSemantics::Facing);
        let measured = m.count() as f64 / g.covered_count() as f64;
        let (sc, su) = (r / d, r / d * theta.sin());
        let expected = (su.asin().tan() / sc.asin().tan()).powi(2);
        assert!((measured / expected - 1.0).abs() < 0.02, "{measured} vs {expected}");
    }

    #[test]
    fn partitions_covered_pixels_exactly() {
        let g = rasterize(&icosphere::<f64>(3, 0.5), &front(64), None).unwrap();
        for t in [0.1, std::f64::consts::PI / 5.0, 1.2] {
            let f = classify_keep_update(&g, t, AngleSemantics::Facing);
            let l = classify_keep_update(&g, t, AngleSemantics::Literal);
            for i in 0..f.len() {
                let covered = g.coverage.as_slice()[i];
                assert!(!(f.as_slice()[i] && l.as_slice()[i]));
                assert_eq!(f.as_slice()[i] || l.as_slice()[i], covered);
            }
        }
        let near_half_pi = classify_keep_update(&g, std::f64::consts::FRAC_PI_2 - 1e-12, AngleSemantics::Facing);
        for i in 0..near_half_pi.len() {
            let front_facing = g.coverage.as_slice()[i] && g.facing_cos.as_slice()[i] > 1e-9;
            if front_facing {
                assert!(near_half_pi.as_slice()[i]);
            }
        }
    }

    #[test]
    fn checkerboard_only_touches_covered_keep_band() {
        let update = Mask::from_fn(32, 32, |x, _| x < 10);
        let coverage = Mask::from_fn(32, 32, |_, y| y < 28);
        let out = checkerboard_keep_blend(&update, &coverage, 4);
        for y in 0..32 {
            for x in 0..32 {
                let v = *out.get(x, y);
                if x < 10 {
                    assert!(v);
                } else if x > 13 || y >= 28 {
                    assert!(!v, "{x},{y}");
                } else {
                    assert_eq!(v, ((x / 2) + (y / 2)) % 2 == 0);
                }
            }
        }
        assert_eq!(checkerboard_keep_blend(&update, &coverage, 0), update);
    }

    proptest! {
        #[test]
        fn chebyshev_matches_brute_force(bits in proptest::collection::vec(any::<bool>(), 63)) {
            let m = Mask::from_vec(9, 7, bits).unwrap();
            let d = chebyshev_distance(&m);
            for y in 0..7i64 {
                for x in 0..9i64 {
                    let mut best = 16usize;
                    for v in 0..7i64 {
                        for u in 0..9i64 {
                            if *m.get(u as usize, v as usize) {
                                best = best.min((u - x).abs().max((v - y).abs()) as usize);
                            }
                        }
                    }
                    prop_assert_eq!(d[(y * 9 + x) as usize], best);
                }
            }
        }
    }

    #[test]
    fn lower_left_half_coverage() {
        let m = Mesh::<f64>::new(
            vec![Vec3::new(0.0, 0.0, 0.0), Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.0)],
            vec![[0, 1, 2]],
            Some(vec![[Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)]]),
        )
        .unwrap();
        let mask = rasterize_uv_coverage(&m, 64);
        let frac = mask.count() as f64 / 4096.0;
        assert!((frac - 0.5).abs() < 0.04, "{}", mask.count());
        // Bottom-left texel in, top-right texel out.
        assert!(*mask.get(0, 63) && !*mask.get(63, 0));
        assert_eq!(rasterize_uv_coverage(&Mesh::<f64>::empty(), 16).count(), 0);
    }

    #[test]
    fn cube_atlas_coverage_is_resolution_independent() {
        let m = generate_fallback_atlas(&cube::<f64>(1.0), 256).unwrap();
        let a = rasterize_uv_coverage(&m, 256).count() as f64 / 256f64.powi(2);
        let b = rasterize_uv_coverage(&m, 1024).count() as f64 / 1024f64.powi(2);
        let perimeter: f64 = m
            .corner_uvs()
            .unwrap()
            .iter()
            .map(|w| (0..3).map(|k| (w[(k + 1) % 3] - w[k]).dot(w[(k + 1) % 3] - w[k]).sqrt()).sum::<f64>())
            .sum();
        assert!((a - b).abs() <= 2.0 * perimeter / 256.0, "{a} vs {b}");
        // The half-texel border is the whole difference: it shrinks 4x with the texel.
        let c = rasterize_uv_coverage(&m, 512).count() as f64 / 512f64.powi(2);
        assert!(((a - b) / (c - b) - 3.0).abs() < 0.3);
    }

    #[test]
    fn coverage_nests_across_resolutions() {
        let m = generate_fallback_atlas(&icosphere::<f64>(2, 0.5), 512).unwrap();
        let hi = rasterize_uv_coverage(&m, 512);
        let lo = rasterize_uv_coverage(&m, 128);
        for y in 0..512 {
            for x in 0..512 {
                if *hi.get(x, y) {
                    assert!(*lo.get(x / 4, y / 4));
                }
            }
        }
    }

    #[test]
    fn surface_points_lie_on_their_triangles() {
        let m = generate_fallback_atlas(&icosphere::<f64>(1, 0.5), 128).unwrap();
        let pts = texel_surface_points(&m, 128);
        let cov = rasterize_uv_coverage(&m, 128);
        for (p, &c) in pts.as_slice().iter().zip(cov.as_slice()) {
            assert_eq!(p.is_some(), c);
            if let Some(p) = p {
                assert!(p.norm() <= 0.5 + 1e-12 && p.norm() > 0.39);
            }
        }
    }
}
