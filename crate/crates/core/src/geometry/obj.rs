//! Wavefront OBJ reader and writer (v / vt / vn / f records).

use std::fmt::Write as _;
use std::path::Path;

use super::Mesh;
use crate::diag;
use crate::error::{Error, Result};
use crate::linalg::{Vec2, Vec3};
use crate::scalar::Real;

#[derive(Clone, Copy)]
struct Corner {
    v: usize,
    vt: Option<usize>,
    vn: Option<usize>,
}

pub fn load_obj<S: Real>(path: impl AsRef<Path>) -> Result<Mesh<S>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_obj(&text, path)
}

/// Parses OBJ text; `origin` is used for error messages only.
pub fn parse_obj<S: Real>(text: &str, origin: &Path) -> Result<Mesh<S>> {
    let parse_err = |line: usize, message: String| Error::Parse {
        path: origin.to_path_buf(),
        line,
        message,
    };
    let mut positions: Vec<Vec3<S>> = Vec::new();
    let mut texcoords: Vec<Vec2<S>> = Vec::new();
    let mut normals: Vec<Vec3<S>> = Vec::new();
    let mut faces: Vec<(usize, Vec<Corner>)> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        let mut fields = line.split_whitespace();
        let Some(tag) = fields.next() else { continue };
        let mut floats = |n: usize| -> Result<Vec<f64>> {
            let vals: Vec<f64> = fields
                .by_ref()
                .take(n)
                .map(|f| f.parse::<f64>().map_err(|e| parse_err(lineno, format!("bad number {f:?}: {e}"))))
                .collect::<Result<_>>()?;
            if vals.len() < n {
                return Err(parse_err(lineno, format!("expected {n} numbers after {tag:?}")));
            }
            Ok(vals)
        };
        match tag {
            "v" => {
                let p = floats(3)?;
                positions.push(Vec3::new(S::lit(p[0]), S::lit(p[1]), S::lit(p[2])));
            }
            "vt" => {
                let t = floats(2)?;
                texcoords.push(Vec2::new(S::lit(t[0]), S::lit(t[1])));
            }
            "vn" => {
                let n = floats(3)?;
                normals.push(Vec3::new(S::lit(n[0]), S::lit(n[1]), S::lit(n[2])));
            }
            "f" => {
                let corners = fields
                    .map(|f| {
                        parse_corner(f, positions.len(), texcoords.len(), normals.len())
                            .map_err(|m| parse_err(lineno, m))
                    })
                    .collect::<Result<Vec<_>>>()?;
                if corners.len() < 3 {
                    return Err(parse_err(lineno, "face with fewer than 3 corners".into()));
                }
                faces.push((lineno, corners));
            }
            _ => {}
        }
    }

    let mut triangles = Vec::new();
    let mut wedges: Vec<[Option<usize>; 3]> = Vec::new();
    let mut corner_normals: Vec<(usize, usize)> = Vec::new();
    let mut dropped = 0usize;
    for (lineno, corners) in &faces {
        for k in 1..corners.len() - 1 {
            let tri = [corners[0], corners[k], corners[k + 1]];
            if let Some(c) = tri.iter().find(|c| c.v >= positions.len()) {
                return Err(Error::IndexOutOfRange {
                    triangle: triangles.len(),
                    index: c.v,
                    count: positions.len(),
                });
            }
            if tri[0].v == tri[1].v || tri[1].v == tri[2].v || tri[0].v == tri[2].v {
                dropped += 1;
                diag::warn(format_args!("{}:{lineno}: dropping triangle with repeated vertex", origin.display()));
                continue;
            }
            for c in &tri {
                if let Some(n) = c.vn {
                    corner_normals.push((c.v, n));
                }
            }
            triangles.push(tri.map(|c| c.v as u32));
            wedges.push(tri.map(|c| c.vt));
        }
    }
    if triangles.is_empty() {
        return Err(Error::NoTriangles);
    }
    if dropped > 0 {
        diag::warn(format_args!("{dropped} degenerate triangle(s) dropped"));
    }

    let corner_uvs = if wedges.iter().all(|w| w.iter().all(Option::is_some)) {
        Some(
            wedges
                .iter()
                .map(|w| w.map(|i| texcoords[i.expect("checked above")]))
                .collect::<Vec<_>>(),
        )
    } else {
        if wedges.iter().any(|w| w.iter().any(Option::is_some)) {
            diag::warn(format_args!("{}: some corners lack vt; UVs ignored", origin.display()));
        }
        None
    };

    let all_have_normals = corner_normals.len() == triangles.len() * 3;
    let mesh = if all_have_normals {
        let mut acc = vec![Vec3::zero(); positions.len()];
        for (vi, ni) in corner_normals {
            acc[vi] += normals[ni];
        }
        let orphan = acc.iter().any(|n| n.try_normalize().is_none());
        let mesh = Mesh::with_normals(positions, triangles, corner_uvs, acc)?;
        if orphan {
            mesh.compute_vertex_normals()
        } else {
            mesh
        }
    } else {
        Mesh::new(positions, triangles, corner_uvs)?
    };
    if mesh.corner_uvs().is_some() && !mesh.is_bake_ready() {
        diag::warn(format_args!(
            "{}: UVs outside [0,1] or degenerate UV triangles; mesh is not bake-ready",
            origin.display()
        ));
    }
    Ok(mesh)
}

fn parse_corner(field: &str, nv: usize, nt: usize, nn: usize) -> std::result::Result<Corner, String> {
    let resolve = |s: &str, count: usize, what: &str| -> std::result::Result<usize, String> {
        let i: i64 = s.parse().map_err(|_| format!("bad {what} index {s:?}"))?;
        match i {
            0 => Err(format!("{what} index 0 is invalid")),
            i if i > 0 => Ok(i as usize - 1),
            // relative indices count back from the most recent element
            i => {
                let back = (-i) as usize;
                if back > count {
                    Err(format!("relative {what} index {i} out of range"))
                } else {
                    Ok(count - back)
                }
            }
        }
    };
    let mut parts = field.split('/');
    let v = resolve(parts.next().unwrap_or(""), nv, "vertex")?;
    let vt = match parts.next() {
        Some("") | None => None,
        Some(s) => {
            let i = resolve(s, nt, "texcoord")?;
            if i >= nt {
                return Err(format!("texcoord index {} out of range", i + 1));
            }
            Some(i)
        }
    };
    let vn = match parts.next() {
        Some("") | None => None,
        Some(s) => {
            let i = resolve(s, nn, "normal")?;
            if i >= nn {
                return Err(format!("normal index {} out of range", i + 1));
            }
            Some(i)
        }
    };
    Ok(Corner { v, vt, vn })
}

/// Serializes with shortest round-trip number formatting.
pub fn obj_string<S: Real>(mesh: &Mesh<S>) -> String {
    let mut out = String::new();
    for p in mesh.positions() {
        let _ = writeln!(out, "v {} {} {}", p.x, p.y, p.z);
    }
    for n in mesh.vertex_normals() {
        let _ = writeln!(out, "vn {} {} {}", n.x, n.y, n.z);
    }
    if let Some(uvs) = mesh.corner_uvs() {
        for w in uvs {
            for uv in w {
                let _ = writeln!(out, "vt {} {}", uv.x, uv.y);
            }
        }
    }
    let has_uv = mesh.corner_uvs().is_some();
    for (t, tri) in mesh.triangles().iter().enumerate() {
        out.push('f');
        for (k, &vi) in tri.iter().enumerate() {
            let vi = vi + 1;
            if has_uv {
                let _ = write!(out, " {vi}/{}/{vi}", 3 * t + k + 1);
            } else {
                let _ = write!(out, " {vi}//{vi}");
            }
        }
        out.push('\n');
    }
    out
}

pub fn write_obj<S: Real>(mesh: &Mesh<S>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, obj_string(mesh)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::shapes;

    fn parse(text: &str) -> Result<Mesh<f64>> {
        parse_obj(text, Path::new("test.obj"))
    }

    const CUBE: &str = "\
v 0 0 0\nv 1 0 0\nv 0 1 0\nv 1 1 0\nv 0 0 1\nv 1 0 1\nv 0 1 1\nv 1 1 1
f 1 5 7\nf 1 7 3\nf 2 4 8\nf 2 8 6\nf 1 2 6\nf 1 6 5
f 3 7 8\nf 3 8 4\nf 1 3 4\nf 1 4 2\nf 5 6 8\nf 5 8 7
";

    #[test]
    fn cube_without_texcoords() {
        let m = parse(CUBE).unwrap();
        assert_eq!(m.triangle_count(), 12);
        assert_eq!(m.vertex_count(), 8);
        assert!(!m.is_bake_ready());
    }

    #[test]
    fn out_of_range_face() {
        let text = CUBE.replace("f 5 8 7", "f 5 8 9");
        assert!(matches!(parse(&text), Err(Error::IndexOutOfRange { index: 8, count: 8, .. })));
    }

    #[test]
    fn out_of_range_face_index_error() {
        // positive index beyond the vertex list but parsed later
        let text = "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 4\n";
        assert!(matches!(parse(text), Err(Error::IndexOutOfRange { index: 3, count: 3, .. })));
    }

    #[test]
    fn zero_triangles() {
        assert!(matches!(parse("v 0 0 0\n"), Err(Error::NoTriangles)));
    }

    #[test]
    fn polygon_fan_and_relative_indices() {
        let text = "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nvt 0 0\nvt 1 0\nvt 1 1\nvt 0 1\nf -4/-4 -3/-3 -2/-2 -1/-1\n";
        let m = parse(text).unwrap();
        assert_eq!(m.triangles(), &[[0, 1, 2], [0, 2, 3]]);
        assert!(m.is_bake_ready());
        assert_eq!(m.corner_uvs().unwrap()[1][2], Vec2::new(0.0, 1.0));
    }

    #[test]
    fn round_trip_is_exact() {
        let mesh = crate::geometry::generate_fallback_atlas(&shapes::icosphere::<f64>(2, 0.5), 512).unwrap();
        let back = parse(&obj_string(&mesh)).unwrap();
        assert_eq!(back.positions(), mesh.positions());
        assert_eq!(back.triangles(), mesh.triangles());
        assert_eq!(back.corner_uvs(), mesh.corner_uvs());
        for (a, b) in back.vertex_normals().iter().zip(mesh.vertex_normals()) {
            assert!((*a - *b).norm() < 1e-12);
        }
    }
}
