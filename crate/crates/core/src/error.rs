use std::path::PathBuf;

use thiserror::Error;

use crate::imagesource::SourceError;
use crate::texopt::BakeReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("triangle {triangle} references vertex {index} but the mesh has {count} vertices")]
    IndexOutOfRange {
        triangle: usize,
        index: usize,
        count: usize,
    },
    #[error("triangle {0} repeats a vertex index")]
    RepeatedIndex(usize),
    #[error("mesh has no triangles")]
    NoTriangles,
    #[error("mesh is degenerate: {0}")]
    Degenerate(&'static str),
    #[error("mesh has no UV coordinates")]
    NotBakeReady,
    #[error("atlas chart side would be {side:.2} texels at resolution {resolution}; use a larger texture resolution")]
    AtlasTooDense { side: f64, resolution: usize },
    #[error("dimension mismatch: {0}")]
    Dimensions(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("png: {0}")]
    Png(String),
    #[error("mask selects no texels")]
    EmptyMask,
    #[error(transparent)]
    Source(#[from] SourceError),
}

/// A bake that stopped part-way; the report covers the views completed so far.
#[derive(Debug, Error)]
#[error("bake aborted after {} view(s): {error}", partial.views.len())]
pub struct BakeAborted {
    #[source]
    pub error: Error,
    pub partial: Box<BakeReport>,
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
