//! Losses and their analytic texel gradients.

use rayon::prelude::*;

use super::texture::{downsample_box, downsample_box_adjoint, Footprint, TexelGrad, Texture};
use crate::diag;
use crate::error::{Error, Result};
use crate::image::{Image, Mask};
use crate::raster::{GBuffer, BACKGROUND};
use crate::scalar::Real;

/// Fixed chunk length for reductions; partial sums are combined in chunk order
/// so results do not depend on the thread count.
pub(crate) const REDUCE_CHUNK: usize = 4096;

pub(crate) fn det_sum<S: Real>(values: &[S]) -> S {
    let partial: Vec<S> = values.par_chunks(REDUCE_CHUNK).map(|c| c.iter().copied().sum()).collect();
    partial.into_iter().sum()
}

#[inline]
fn sq3<S: Real>(d: [S; 3]) -> S {
    d[0] * d[0] + d[1] * d[1] + d[2] * d[2]
}

#[inline]
fn sub3<S: Real>(a: [S; 3], b: [S; 3]) -> [S; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

/// Renders the G-buffer's view from `texture`: covered pixels sample the
/// texture at their UV, uncovered pixels are white.
pub fn render_view<S: Real>(texture: &Texture<S>, g: &GBuffer<S>) -> Image<S> {
    let bg = [S::lit(BACKGROUND); 3];
    let data: Vec<[S; 3]> = g
        .uv
        .as_slice()
        .par_iter()
        .zip(g.coverage.as_slice().par_iter())
        .map(|(&uv, &c)| if c { texture.sample_bilinear(uv).0 } else { bg })
        .collect();
    Image::from_vec(g.width, g.height, data).expect("same dimensions")
}

/// Mean over masked pixels of the squared RGB distance between the render of
/// `texture` and `target`, and its gradient with respect to every texel.
///
/// Reference implementation: pixels are visited in raster order and scattered
/// sequentially. [`ViewSplat`] computes the same quantities incrementally.
pub fn view_loss_and_grad<S: Real>(
    texture: &Texture<S>,
    g: &GBuffer<S>,
    target: &Image<S>,
    mask: &Mask,
) -> Result<(S, TexelGrad<S>)> {
    g.coverage.check_dims(target, "target vs G-buffer")?;
    g.coverage.check_dims(mask, "mask vs G-buffer")?;
    let mut grad = TexelGrad::filled(texture.width(), texture.height(), [S::zero(); 3]);
    let n = mask
        .as_slice()
        .iter()
        .zip(g.coverage.as_slice())
        .filter(|(&m, &c)| m && c)
        .count();
    if n == 0 {
        diag::warn("view loss: empty pixel mask");
        return Ok((S::zero(), grad));
    }
    let scale = S::lit(2.0) / S::from_usize_lossy(n);
    let mut loss = S::zero();
    let gd = grad.as_mut_slice();
    for p in 0..mask.len() {
        if !(mask.as_slice()[p] && g.coverage.as_slice()[p]) {
            continue;
        }
        let (color, fp) = texture.sample_bilinear(g.uv.as_slice()[p]);
        let r = sub3(color, target.as_slice()[p]);
        loss += sq3(r);
        for (t, w) in fp.iter() {
            for c in 0..3 {
                gd[t][c] += scale * r[c] * w;
            }
        }
    }
    Ok((loss / S::from_usize_lossy(n), grad))
}

fn check_uv_inputs<S: Real>(hi: &Texture<S>, lo: &Texture<S>, mask_lo: &Mask) -> Result<usize> {
    if mask_lo.dims() != (lo.width(), lo.height()) {
        return Err(Error::Dimensions(format!(
            "coverage mask is {}x{} but the low-resolution texture is {}x{}",
            mask_lo.width(),
            mask_lo.height(),
            lo.width(),
            lo.height()
        )));
    }
    let f = hi.width() / lo.width().max(1);
    if lo.width() == 0 || f == 0 || hi.width() != f * lo.width() || hi.height() != f * lo.height() {
        return Err(Error::Dimensions(format!(
            "low resolution {}x{} does not divide {}x{}",
            lo.width(),
            lo.height(),
            hi.width(),
            hi.height()
        )));
    }
    if mask_lo.count() == 0 {
        return Err(Error::EmptyMask);
    }
    Ok(f)
}

/// Masked MSE between the box-downsampled high-resolution texture and the
/// low-resolution texture, with gradient flowing only into the high-resolution
/// texture (the low-resolution one is a constant reference here).
pub fn uv_self_supervision<S: Real>(hi: &Texture<S>, lo: &Texture<S>, mask_lo: &Mask) -> Result<(S, TexelGrad<S>)> {
    let f = check_uv_inputs(hi, lo, mask_lo)?;
    let down = downsample_box(hi.image(), f)?;
    let n = S::from_usize_lossy(mask_lo.count());
    let two_over_n = S::lit(2.0) / n;
    let mut loss = S::zero();
    let coarse: Vec<[S; 3]> = down
        .as_slice()
        .iter()
        .zip(lo.texels())
        .zip(mask_lo.as_slice())
        .map(|((&d, &t), &m)| {
            if m {
                let r = sub3(d, t);
                loss += sq3(r);
                r.map(|c| c * two_over_n)
            } else {
                [S::zero(); 3]
            }
        })
        .collect();
    let coarse = Image::from_vec(lo.width(), lo.height(), coarse)?;
    Ok((loss / n, downsample_box_adjoint(&coarse, f)))
}

/// Pixel → texel scatter plan for one view, fixed while the view is optimized.
///
/// Holds each masked pixel's bilinear footprint and the transposed
/// (texel → pixels) table so gradients reduce per texel in pixel order.
pub(crate) struct ViewSplat<S> {
    pixels: Vec<u32>,
    footprints: Vec<Footprint<S>>,
    touched: Vec<u32>,
    offsets: Vec<u32>,
    entries: Vec<(u32, S)>,
}

impl<S: Real> ViewSplat<S> {
    pub fn new(texture: &Texture<S>, g: &GBuffer<S>, mask: &Mask) -> Self {
        let pixels: Vec<u32> = (0..mask.len())
            .filter(|&p| mask.as_slice()[p] && g.coverage.as_slice()[p])
            .map(|p| p as u32)
            .collect();
        let footprints: Vec<Footprint<S>> = pixels
            .par_iter()
            .map(|&p| texture.footprint(g.uv.as_slice()[p as usize]))
            .collect();
        let mut pairs: Vec<(u32, u32, S)> = footprints
            .iter()
            .enumerate()
            .flat_map(|(k, fp)| fp.iter().map(move |(t, w)| (t as u32, k as u32, w)))
            .collect();
        pairs.par_sort_unstable_by_key(|&(t, k, _)| (t, k));
        let mut touched = Vec::new();
        let mut offsets = Vec::new();
        let mut entries = Vec::with_capacity(pairs.len());
        for (i, &(t, k, w)) in pairs.iter().enumerate() {
            if i == 0 || pairs[i - 1].0 != t {
                touched.push(t);
                offsets.push(entries.len() as u32);
            }
            entries.push((k, w));
        }
        offsets.push(entries.len() as u32);
        Self {
            pixels,
            footprints,
            touched,
            offsets,
            entries,
        }
    }

    /// Texels with at least one nonzero bilinear weight, ascending.
    pub fn touched(&self) -> &[u32] {
        &self.touched
    }

    /// Residuals `render − target` per masked pixel and the mean squared norm.
    pub fn residuals(&self, texture: &Texture<S>, target: &Image<S>) -> (S, Vec<[S; 3]>) {
        let r: Vec<[S; 3]> = self
            .pixels
            .par_iter()
            .zip(self.footprints.par_iter())
            .map(|(&p, fp)| sub3(texture.gather(fp), target.as_slice()[p as usize]))
            .collect();
        if r.is_empty() {
            return (S::zero(), r);
        }
        let sq: Vec<S> = r.iter().map(|&d| sq3(d)).collect();
        (det_sum(&sq) / S::from_usize_lossy(r.len()), r)
    }

    /// Writes `2/N · Σ w·r` into every touched texel of `grad` (overwriting).
    pub fn scatter(&self, residuals: &[[S; 3]], grad: &mut [[S; 3]]) {
        if self.pixels.is_empty() {
            return;
        }
        let scale = S::lit(2.0) / S::from_usize_lossy(self.pixels.len());
        let sums: Vec<[S; 3]> = (0..self.touched.len())
            .into_par_iter()
            .map(|i| {
                let (a, b) = (self.offsets[i] as usize, self.offsets[i + 1] as usize);
                let mut acc = [S::zero(); 3];
                for &(k, w) in &self.entries[a..b] {
                    let r = residuals[k as usize];
                    acc[0] += w * r[0];
                    acc[1] += w * r[1];
                    acc[2] += w * r[2];
                }
                acc.map(|c| c * scale)
            })
            .collect();
        for (&t, g) in self.touched.iter().zip(sums) {
            grad[t as usize] = g;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{generate_fallback_atlas, shapes};
    use crate::raster::{rasterize, Camera};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_texture(w: usize, h: usize, rng: &mut ChaCha8Rng) -> Texture<f64> {
        Texture::from_image(Image::from_fn(w, h, |_, _| {
            [rng.random_range(0.1..0.9), rng.random_range(0.1..0.9), rng.random_range(0.1..0.9)]
        }))
    }

    fn quad_view() -> GBuffer<f64> {
        let quad = generate_fallback_atlas(&shapes::grid_quad::<f64>(1), 64).unwrap();
        let cam = Camera::new(0.0, 0.0, 2.0, 45f64.to_radians(), 48, 48, "front");
        rasterize(&quad, &cam, None).unwrap()
    }

    #[test]
    fn target_equal_to_render_gives_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let tex = random_texture(32, 32, &mut rng);
        let g = quad_view();
        let target = render_view(&tex, &g);
        let (loss, grad) = view_loss_and_grad(&tex, &g, &target, &g.coverage).unwrap();
        assert_eq!(loss, 0.0);
        assert!(grad.as_slice().iter().all(|c| *c == [0.0; 3]));
    }

    #[test]
    fn single_pixel_closed_form() {
        // 2x2 texture, one pixel sampling exactly texel 3's center
        let tex = Texture::<f64>::filled(2, 2, [0.5; 3]);
        let mut g = GBuffer::<f64>::empty(1, 1);
        g.coverage.set(0, 0, true);
        g.uv.set(0, 0, crate::linalg::Vec2::new(0.75, 0.25));
        let target = Image::filled(1, 1, [0.25, 0.5, 1.0]);
        let (loss, grad) = view_loss_and_grad(&tex, &g, &target, &g.coverage).unwrap();
        assert!((loss - (0.0625 + 0.25)).abs() < 1e-15);
        assert_eq!(grad.as_slice()[3], [0.5, 0.0, -1.0]);
        assert!(grad.as_slice()[..3].iter().all(|c| *c == [0.0; 3]));
    }

    #[test]
    fn empty_mask_is_zero_loss() {
        let tex = Texture::<f64>::white(4, 4);
        let g = quad_view();
        let mask = Mask::filled(g.width, g.height, false);
        let (loss, grad) = view_loss_and_grad(&tex, &g, &g.color, &mask).unwrap();
        assert_eq!(loss, 0.0);
        assert!(grad.as_slice().iter().all(|c| *c == [0.0; 3]));
    }

    #[test]
    fn splat_matches_reference() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let tex = random_texture(40, 40, &mut rng);
        let g = quad_view();
        let target = Image::from_fn(g.width, g.height, |_, _| [rng.random(), rng.random(), rng.random()]);
        let mask = Mask::from_fn(g.width, g.height, |x, y| (x * 7 + y * 3) % 5 != 0);
        let (loss, grad) = view_loss_and_grad(&tex, &g, &target, &mask).unwrap();
        let splat = ViewSplat::new(&tex, &g, &mask);
        let (l2, r) = splat.residuals(&tex, &target);
        let mut g2 = vec![[0.0; 3]; tex.texel_count()];
        splat.scatter(&r, &mut g2);
        assert!((loss - l2).abs() < 1e-12);
        for (a, b) in grad.as_slice().iter().zip(&g2) {
            for c in 0..3 {
                assert!((a[c] - b[c]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn uv_loss_zero_for_exact_upsample() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let lo = random_texture(8, 8, &mut rng);
        let hi = Texture::from_image(super::super::texture::upsample_nearest(lo.image(), 4));
        let mask = Mask::from_fn(8, 8, |x, y| x > y);
        let (loss, grad) = uv_self_supervision(&hi, &lo, &mask).unwrap();
        assert_eq!(loss, 0.0);
        assert!(grad.as_slice().iter().all(|c| *c == [0.0; 3]));
    }

    #[test]
    fn uv_loss_single_texel_closed_form() {
        let lo = Texture::<f64>::filled(4, 4, [0.5; 3]);
        let mut hi = Texture::<f64>::filled(16, 16, [0.5; 3]);
        let delta = 0.125;
        // raise lo-texel (1, 2) in the red channel of every hi texel of its block
        for y in 8..12 {
            for x in 4..8 {
                hi.set_texel(y * 16 + x, [0.5 + delta, 0.5, 0.5]);
            }
        }
        let mask = Mask::from_fn(4, 4, |x, y| (x + y) % 2 == 1);
        let n = mask.count() as f64;
        let (loss, grad) = uv_self_supervision(&hi, &lo, &mask).unwrap();
        assert!((loss - delta * delta / n).abs() < 1e-15);
        let expect = 2.0 * delta / (n * 16.0);
        for y in 0..16 {
            for x in 0..16 {
                let g = grad.get(x, y);
                if (4..8).contains(&x) && (8..12).contains(&y) {
                    assert!((g[0] - expect).abs() < 1e-15 && g[1] == 0.0);
                } else {
                    assert_eq!(*g, [0.0; 3]);
                }
            }
        }
    }

    #[test]
    fn uv_loss_errors() {
        let lo = Texture::<f64>::white(4, 4);
        let hi = Texture::<f64>::white(10, 10);
        assert!(uv_self_supervision(&hi, &lo, &Mask::filled(4, 4, true)).is_err());
        let hi = Texture::<f64>::white(16, 16);
        assert!(matches!(
            uv_self_supervision(&hi, &lo, &Mask::filled(4, 4, false)),
            Err(Error::EmptyMask)
        ));
        assert!(uv_self_supervision(&hi, &lo, &Mask::filled(8, 8, true)).is_err());
    }
}
