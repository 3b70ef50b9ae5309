use crate::diag;
use crate::error::{Error, Result};
use crate::linalg::{Vec2, Vec3};
use crate::scalar::Real;

/// Indexed triangle mesh with per-corner ("wedge") UVs and per-vertex normals.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh<S> {
    positions: Vec<Vec3<S>>,
    triangles: Vec<[u32; 3]>,
    corner_uvs: Option<Vec<[Vec2<S>; 3]>>,
    vertex_normals: Vec<Vec3<S>>,
}

/// Uniform scale followed by translation: `p' = p * scale + offset`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Similarity<S> {
    pub scale: S,
    pub offset: Vec3<S>,
}

impl<S: Real> Similarity<S> {
    pub fn identity() -> Self {
        Self {
            scale: S::one(),
            offset: Vec3::zero(),
        }
    }

    #[inline]
    pub fn apply(&self, p: Vec3<S>) -> Vec3<S> {
        p * self.scale + self.offset
    }
}

impl<S: Real> Mesh<S> {
    /// Builds a mesh and computes area-weighted vertex normals.
    pub fn new(
        positions: Vec<Vec3<S>>,
        triangles: Vec<[u32; 3]>,
        corner_uvs: Option<Vec<[Vec2<S>; 3]>>,
    ) -> Result<Self> {
        let n = positions.len();
        Self::with_normals(positions, triangles, corner_uvs, vec![Vec3::zero(); n])
            .map(Self::compute_vertex_normals)
    }

    /// Builds a mesh with caller-supplied normals. Normals are renormalized.
    pub fn with_normals(
        positions: Vec<Vec3<S>>,
        triangles: Vec<[u32; 3]>,
        corner_uvs: Option<Vec<[Vec2<S>; 3]>>,
        vertex_normals: Vec<Vec3<S>>,
    ) -> Result<Self> {
        let count = positions.len();
        for (t, tri) in triangles.iter().enumerate() {
            for &i in tri {
                if i as usize >= count {
                    return Err(Error::IndexOutOfRange {
                        triangle: t,
                        index: i as usize,
                        count,
                    });
                }
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(Error::RepeatedIndex(t));
            }
        }
        if let Some(uvs) = &corner_uvs {
            if uvs.len() != triangles.len() {
                return Err(Error::Dimensions(format!(
                    "{} UV wedges for {} triangles",
                    uvs.len(),
                    triangles.len()
                )));
            }
        }
        if vertex_normals.len() != count {
            return Err(Error::Dimensions(format!(
                "{} normals for {count} vertices",
                vertex_normals.len()
            )));
        }
        let vertex_normals = vertex_normals
            .into_iter()
            .map(|n| n.try_normalize().unwrap_or(Vec3::zero()))
            .collect();
        Ok(Self {
            positions,
            triangles,
            corner_uvs,
            vertex_normals,
        })
    }

    pub fn empty() -> Self {
        Self {
            positions: Vec::new(),
            triangles: Vec::new(),
            corner_uvs: None,
            vertex_normals: Vec::new(),
        }
    }

    pub fn positions(&self) -> &[Vec3<S>] {
        &self.positions
    }

    pub fn triangles(&self) -> &[[u32; 3]] {
        &self.triangles
    }

    pub fn corner_uvs(&self) -> Option<&[[Vec2<S>; 3]]> {
        self.corner_uvs.as_deref()
    }

    pub fn vertex_normals(&self) -> &[Vec3<S>] {
        &self.vertex_normals
    }

    pub fn vertex_count(&self) -> usize {
        self.positions.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn triangle_positions(&self, t: usize) -> [Vec3<S>; 3] {
        let [a, b, c] = self.triangles[t];
        [
            self.positions[a as usize],
            self.positions[b as usize],
            self.positions[c as usize],
        ]
    }

    /// Cross product of the triangle's edges; its length is twice the area.
    pub fn face_cross(&self, t: usize) -> Vec3<S> {
        let [a, b, c] = self.triangle_positions(t);
        (b - a).cross(c - a)
    }

    pub fn face_area(&self, t: usize) -> S {
        self.face_cross(t).norm() * S::lit(0.5)
    }

    /// True when every corner has a UV in [0,1]² and every UV footprint has nonzero area.
    pub fn is_bake_ready(&self) -> bool {
        let Some(uvs) = &self.corner_uvs else {
            return false;
        };
        let unit = |v: S| v >= S::zero() && v <= S::one();
        uvs.iter().all(|w| {
            w.iter().all(|uv| unit(uv.x) && unit(uv.y)) && (w[1] - w[0]).cross(w[2] - w[0]) != S::zero()
        })
    }

    pub fn require_bake_ready(&self) -> Result<()> {
        if self.is_bake_ready() {
            Ok(())
        } else {
            Err(Error::NotBakeReady)
        }
    }

    /// Axis-aligned bounding box `(min, max)`; `None` for a mesh without vertices.
    pub fn bounds(&self) -> Option<(Vec3<S>, Vec3<S>)> {
        let first = *self.positions.first()?;
        Some(
            self.positions
                .iter()
                .fold((first, first), |(lo, hi), &p| (lo.min(p), hi.max(p))),
        )
    }

    /// Transform that centers the bounding box at the origin with longest side 1.
    pub fn unit_box_transform(&self) -> Result<Similarity<S>> {
        let (lo, hi) = self.bounds().ok_or(Error::Degenerate("mesh has no vertices"))?;
        let extent = (hi - lo).max_component();
        if !(extent > S::zero()) {
            return Err(Error::Degenerate("all vertices coincide"));
        }
        let scale = S::one() / extent;
        let center = (lo + hi) * S::lit(0.5);
        Ok(Similarity {
            scale,
            offset: -center * scale,
        })
    }

    /// Centers the bounding box at the origin and scales its longest side to 1.
    pub fn normalize_unit(&self) -> Result<Self> {
        Ok(self.transformed(&self.unit_box_transform()?))
    }

    pub fn transformed(&self, tf: &Similarity<S>) -> Self {
        Self {
            positions: self.positions.iter().map(|&p| tf.apply(p)).collect(),
            ..self.clone()
        }
    }

    /// Recomputes vertex normals as the normalized area-weighted mean of incident
    /// face normals. Isolated vertices get +Z.
    pub fn compute_vertex_normals(mut self) -> Self {
        let mut acc = vec![Vec3::zero(); self.positions.len()];
        for t in 0..self.triangles.len() {
            // |cross| = 2 * area, so summing raw cross products is area weighting.
            let c = self.face_cross(t);
            for &i in &self.triangles[t] {
                acc[i as usize] += c;
            }
        }
        let mut isolated = 0usize;
        self.vertex_normals = acc
            .into_iter()
            .map(|n| {
                n.try_normalize().unwrap_or_else(|| {
                    isolated += 1;
                    Vec3::new(S::zero(), S::zero(), S::one())
                })
            })
            .collect();
        if isolated > 0 {
            diag::warn(format_args!(
                "{isolated} vertex(es) without a non-degenerate incident face; normal set to +Z"
            ));
        }
        self
    }

    pub fn with_corner_uvs(mut self, uvs: Option<Vec<[Vec2<S>; 3]>>) -> Result<Self> {
        if let Some(u) = &uvs {
            if u.len() != self.triangles.len() {
                return Err(Error::Dimensions(format!(
                    "{} UV wedges for {} triangles",
                    u.len(),
                    self.triangles.len()
                )));
            }
        }
        self.corner_uvs = uvs;
        Ok(self)
    }

    pub fn cast<T: Real>(&self) -> Mesh<T> {
        Mesh {
            positions: self.positions.iter().map(|p| p.cast()).collect(),
            triangles: self.triangles.clone(),
            corner_uvs: self
                .corner_uvs
                .as_ref()
                .map(|u| u.iter().map(|w| w.map(|uv| uv.cast())).collect()),
            vertex_normals: self.vertex_normals.iter().map(|n| n.cast()).collect(),
        }
    }
}
