//! Triangle meshes: loading, validation, normalization, normals and a fallback UV atlas.

mod atlas;
mod mesh;
mod obj;
pub mod shapes;

pub use atlas::{generate_fallback_atlas, CELL_MARGIN_TEXELS, DIAGONAL_GAP_TEXELS, MIN_CHART_TEXELS};
pub use mesh::{Mesh, Similarity};
pub use obj::{load_obj, obj_string, parse_obj, write_obj};

/// Loads an OBJ file. Alias of [`load_obj`].
pub fn load_mesh<S: crate::scalar::Real>(path: impl AsRef<std::path::Path>) -> crate::error::Result<Mesh<S>> {
    load_obj(path)
}
