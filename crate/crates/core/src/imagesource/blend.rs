use crate::error::Result;
use crate::image::{Image, Mask};
use crate::scalar::Real;

/// Per-pixel selection: generated where the mask is set, the initial render elsewhere.
pub fn blend_keep_update<S: Real>(generated: &Image<S>, init: &Image<S>, update: &Mask) -> Result<Image<S>> {
    generated.check_dims(init, "generated vs init")?;
    generated.check_dims(update, "generated vs mask")?;
    let data = generated
        .as_slice()
        .iter()
        .zip(init.as_slice())
        .zip(update.as_slice())
        .map(|((&g, &i), &m)| if m { g } else { i })
        .collect();
    Image::from_vec(generated.width(), generated.height(), data)
}
