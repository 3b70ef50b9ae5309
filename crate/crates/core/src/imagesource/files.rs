use std::path::PathBuf;

use super::{check_sizes, ImageSource, SourceError, ViewRequest};
use crate::image::Image;
use crate::scalar::Real;

/// `"left front"` → `"left_front.png"`.
pub fn descriptor_file_name(descriptor: &str) -> String {
    let slug: String = descriptor
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_lowercase() } else { '_' })
        .collect();
    format!("{slug}.png")
}

/// Reads pre-generated targets from `<dir>/<descriptor>.png`.
pub struct FilesSource {
    dir: PathBuf,
}

impl FilesSource {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }
}

impl<S: Real> ImageSource<S> for FilesSource {
    fn generate(&mut self, views: &[ViewRequest<'_, S>]) -> Result<Vec<Image<S>>, SourceError> {
        let images = views
            .iter()
            .map(|v| {
                let path = self.dir.join(descriptor_file_name(&v.camera.descriptor));
                Image::load_png(&path).map_err(|e| SourceError::Other(e.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        check_sizes(views, &images)?;
        Ok(images)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slugs() {
        assert_eq!(descriptor_file_name("left front"), "left_front.png");
        assert_eq!(descriptor_file_name("top"), "top.png");
    }
}
