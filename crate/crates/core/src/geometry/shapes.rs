//! Procedural meshes used by tests, examples and the acceptance suite.

use std::collections::HashMap;

use super::Mesh;
use crate::linalg::{Vec2, Vec3};
use crate::scalar::Real;

fn v<S: Real>(x: f64, y: f64, z: f64) -> Vec3<S> {
    Vec3::new(S::lit(x), S::lit(y), S::lit(z))
}

/// Axis-aligned cube of side `size` centered at the origin, outward CCW winding.
/// Face diagonals join the even-parity corners, so area-weighted corner
/// normals are exact diagonals.
pub fn cube<S: Real>(size: f64) -> Mesh<S> {
    let h = size * 0.5;
    let positions = (0..8)
        .map(|i| {
            let s = |bit: usize| if i & bit != 0 { h } else { -h };
            v(s(1), s(2), s(4))
        })
        .collect();
    let triangles = vec![
        [0, 4, 6], [0, 6, 2], // -x
        [1, 3, 5], [3, 7, 5], // +x
        [0, 1, 5], [0, 5, 4], // -y
        [2, 6, 3], [6, 7, 3], // +y
        [0, 2, 3], [0, 3, 1], // -z
        [4, 5, 6], [5, 7, 6], // +z
    ];
    Mesh::new(positions, triangles, None).expect("cube is valid")
}

/// Flat square `[-0.5,0.5]²` in the z=0 plane, facing +Z, split into `n`×`n`
/// cells, with planar UVs `(x + 0.5, y + 0.5)`.
pub fn grid_quad<S: Real>(n: usize) -> Mesh<S> {
    assert!(n >= 1);
    let mut positions = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            positions.push(v(i as f64 / n as f64 - 0.5, j as f64 / n as f64 - 0.5, 0.0));
        }
    }
    let idx = |i: usize, j: usize| (j * (n + 1) + i) as u32;
    let mut triangles = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            triangles.push([idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)]);
            triangles.push([idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)]);
        }
    }
    let uvs = triangles
        .iter()
        .map(|t| {
            t.map(|i| {
                let p: Vec3<S> = positions[i as usize];
                Vec2::new(p.x + S::lit(0.5), p.y + S::lit(0.5))
            })
        })
        .collect();
    Mesh::new(positions, triangles, Some(uvs)).expect("grid is valid")
}

/// Geodesic sphere: an icosahedron subdivided `subdivisions` times (20·4ⁿ faces).
pub fn icosphere<S: Real>(subdivisions: u32, radius: f64) -> Mesh<S> {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let mut pts: Vec<[f64; 3]> = vec![
        [-1.0, phi, 0.0], [1.0, phi, 0.0], [-1.0, -phi, 0.0], [1.0, -phi, 0.0],
        [0.0, -1.0, phi], [0.0, 1.0, phi], [0.0, -1.0, -phi], [0.0, 1.0, -phi],
        [phi, 0.0, -1.0], [phi, 0.0, 1.0], [-phi, 0.0, -1.0], [-phi, 0.0, 1.0],
    ];
    let unit = |p: [f64; 3]| {
        let n = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
        [p[0] / n, p[1] / n, p[2] / n]
    };
    for p in pts.iter_mut() {
        *p = unit(*p);
    }
    let mut tris: Vec<[u32; 3]> = vec![
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ];
    for _ in 0..subdivisions {
        let mut mid: HashMap<(u32, u32), u32> = HashMap::new();
        let mut next = Vec::with_capacity(tris.len() * 4);
        let mut midpoint = |a: u32, b: u32, pts: &mut Vec<[f64; 3]>| {
            let key = (a.min(b), a.max(b));
            *mid.entry(key).or_insert_with(|| {
                let (pa, pb) = (pts[a as usize], pts[b as usize]);
                pts.push(unit([
                    (pa[0] + pb[0]) * 0.5,
                    (pa[1] + pb[1]) * 0.5,
                    (pa[2] + pb[2]) * 0.5,
                ]));
                (pts.len() - 1) as u32
            })
        };
        for [a, b, c] in tris {
            let ab = midpoint(a, b, &mut pts);
            let bc = midpoint(b, c, &mut pts);
            let ca = midpoint(c, a, &mut pts);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        tris = next;
    }
    let positions: Vec<Vec3<S>> = pts
        .iter()
        .map(|p| v(p[0] * radius, p[1] * radius, p[2] * radius))
        .collect();
    let normals = pts.iter().map(|p| v(p[0], p[1], p[2])).collect();
    Mesh::with_normals(positions, tris, None, normals).expect("icosphere is valid")
}

/// Closed cylinder along +Y with `segments` around, `rows` along the side and
/// fan caps. Caps carry their own rim vertices, so the rim is a hard edge.
pub fn cylinder<S: Real>(segments: usize, rows: usize, radius: f64, height: f64) -> Mesh<S> {
    assert!(segments >= 3 && rows >= 1);
    let rim = |y: f64| -> Vec<Vec3<S>> {
        (0..segments)
            .map(|s| {
                let a = std::f64::consts::TAU * s as f64 / segments as f64;
                v(radius * a.sin(), y, radius * a.cos())
            })
            .collect()
    };
    let mut positions = Vec::new();
    for r in 0..=rows {
        positions.extend(rim(height * (r as f64 / rows as f64 - 0.5)));
    }
    let ring = |r: usize, s: usize| (r * segments + s % segments) as u32;
    let mut triangles = Vec::new();
    for r in 0..rows {
        for s in 0..segments {
            let (a, b) = (ring(r, s), ring(r, s + 1));
            let (c, d) = (ring(r + 1, s + 1), ring(r + 1, s));
            triangles.push([a, b, c]);
            triangles.push([a, c, d]);
        }
    }
    for (y, up) in [(-height * 0.5, false), (height * 0.5, true)] {
        let start = positions.len() as u32;
        positions.extend(rim(y));
        let center = positions.len() as u32;
        positions.push(v(0.0, y, 0.0));
        for s in 0..segments {
            let (a, b) = (start + s as u32, start + ((s + 1) % segments) as u32);
            triangles.push(if up { [center, a, b] } else { [center, b, a] });
        }
    }
    Mesh::new(positions, triangles, None).expect("cylinder is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn signed_volume(m: &Mesh<f64>) -> f64 {
        (0..m.triangle_count())
            .map(|t| {
                let [a, b, c] = m.triangle_positions(t);
                a.dot(b.cross(c)) / 6.0
            })
            .sum()
    }

    #[test]
    fn closed_shapes_are_outward_oriented() {
        assert!((signed_volume(&cube(1.0)) - 1.0).abs() < 1e-12);
        let cyl = cylinder(64, 3, 0.5, 1.0);
        let exact = std::f64::consts::PI * 0.25;
        let v = signed_volume(&cyl);
        assert!(v > 0.0 && (v - exact).abs() / exact < 0.01, "{v}");
        let s = icosphere(3, 0.5);
        assert!(signed_volume(&s) > 0.45);
        let top = cyl.vertex_normals()[cyl.vertex_count() - 1];
        assert!((top.y - 1.0).abs() < 1e-12);
        let rim = cyl.vertex_normals()[cyl.vertex_count() - 2];
        assert!((rim.y - 1.0).abs() < 1e-12, "{rim:?}");
    }

    #[test]
    fn icosphere_face_counts() {
        assert_eq!(icosphere::<f64>(0, 1.0).triangle_count(), 20);
        assert_eq!(icosphere::<f64>(4, 1.0).triangle_count(), 5120);
        assert_eq!(icosphere::<f64>(4, 1.0).vertex_count(), 2562);
    }
}
