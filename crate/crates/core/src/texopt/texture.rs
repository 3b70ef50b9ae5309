use crate::error::{Error, Result};
use crate::image::{Grid, Image, Mask};
use crate::linalg::Vec2;
use crate::scalar::Real;

/// Per-texel RGB gradient (or any per-texel 3-vector field).
pub type TexelGrad<S> = Grid<[S; 3]>;

/// RGB texture in [0,1] with a running record of how much each texel has moved.
#[derive(Debug, Clone, PartialEq)]
pub struct Texture<S> {
    image: Image<S>,
    update_magnitude: Grid<S>,
}

/// The texels a bilinear sample reads and their weights.
///
/// Duplicate texels (from edge clamping) are merged and zero weights dropped,
/// so the entries are exactly the texels that receive gradient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Footprint<S> {
    texels: [u32; 4],
    weights: [S; 4],
    len: u8,
}

impl<S: Real> Footprint<S> {
    fn push(&mut self, texel: u32, w: S) {
        if w == S::zero() {
            return;
        }
        let n = self.len as usize;
        if let Some(k) = self.texels[..n].iter().position(|&t| t == texel) {
            self.weights[k] += w;
        } else {
            self.texels[n] = texel;
            self.weights[n] = w;
            self.len += 1;
        }
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, S)> + '_ {
        self.texels[..self.len()]
            .iter()
            .zip(&self.weights[..self.len()])
            .map(|(&t, &w)| (t as usize, w))
    }
}

/// Continuous texel coordinates of `uv`; texel centers sit at integers.
/// `v = 1` is the top row.
#[inline]
pub fn uv_to_texel<S: Real>(uv: Vec2<S>, width: usize, height: usize) -> (S, S) {
    (
        uv.x * S::from_usize_lossy(width) - S::lit(0.5),
        (S::one() - uv.y) * S::from_usize_lossy(height) - S::lit(0.5),
    )
}

/// Bilinear footprint with half-texel-centered addressing and edge clamping.
pub fn bilinear_footprint<S: Real>(width: usize, height: usize, uv: Vec2<S>) -> Footprint<S> {
    let (x, y) = uv_to_texel(uv, width, height);
    let (x0, y0) = (x.floor(), y.floor());
    let (fx, fy) = (x - x0, y - y0);
    let clamp = |v: S, n: usize| -> u32 {
        let i = v.to_i64().unwrap_or(0);
        i.clamp(0, n as i64 - 1) as u32
    };
    let (i0, i1) = (clamp(x0, width), clamp(x0 + S::one(), width));
    let (j0, j1) = (clamp(y0, height), clamp(y0 + S::one(), height));
    let w = width as u32;
    let mut fp = Footprint {
        texels: [0; 4],
        weights: [S::zero(); 4],
        len: 0,
    };
    let (gx, gy) = (S::one() - fx, S::one() - fy);
    fp.push(j0 * w + i0, gx * gy);
    fp.push(j0 * w + i1, fx * gy);
    fp.push(j1 * w + i0, gx * fy);
    fp.push(j1 * w + i1, fx * fy);
    fp
}

impl<S: Real> Texture<S> {
    pub fn filled(width: usize, height: usize, color: [S; 3]) -> Self {
        Self::from_image(Image::filled(width, height, color))
    }

    pub fn white(width: usize, height: usize) -> Self {
        Self::filled(width, height, [S::one(); 3])
    }

    /// Wraps an image, clamping values into [0,1].
    pub fn from_image(image: Image<S>) -> Self {
        let (w, h) = image.dims();
        let clamp01 = |c: S| c.max(S::zero()).min(S::one());
        Self {
            image: image.map(|px| px.map(clamp01)),
            update_magnitude: Grid::filled(w, h, S::zero()),
        }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.image.width()
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.image.height()
    }

    pub fn texel_count(&self) -> usize {
        self.image.len()
    }

    pub fn image(&self) -> &Image<S> {
        &self.image
    }

    pub fn into_image(self) -> Image<S> {
        self.image
    }

    pub fn texels(&self) -> &[[S; 3]] {
        self.image.as_slice()
    }

    pub(crate) fn parts_mut(&mut self) -> (&mut [[S; 3]], &mut [S]) {
        (self.image.as_mut_slice(), self.update_magnitude.as_mut_slice())
    }

    pub fn update_magnitude(&self) -> &Grid<S> {
        &self.update_magnitude
    }

    pub fn with_update_magnitude(mut self, m: Grid<S>) -> Result<Self> {
        self.image.check_dims(&m, "update magnitude")?;
        self.update_magnitude = m;
        Ok(self)
    }

    /// Sets texel `i`, clamped to [0,1]. Does not count as an optimizer update.
    pub fn set_texel(&mut self, i: usize, c: [S; 3]) {
        self.image.as_mut_slice()[i] = c.map(|v| v.max(S::zero()).min(S::one()));
    }

    #[inline]
    pub fn footprint(&self, uv: Vec2<S>) -> Footprint<S> {
        bilinear_footprint(self.width(), self.height(), uv)
    }

    /// Bilinear sample at `uv` together with the footprint that produced it.
    pub fn sample_bilinear(&self, uv: Vec2<S>) -> ([S; 3], Footprint<S>) {
        let fp = self.footprint(uv);
        (self.gather(&fp), fp)
    }

    #[inline]
    pub fn gather(&self, fp: &Footprint<S>) -> [S; 3] {
        let data = self.image.as_slice();
        let mut it = fp.iter();
        let Some((t0, _)) = it.next() else {
            return [S::zero(); 3];
        };
        // Written relative to the first texel so constant regions reproduce exactly.
        let base = data[t0];
        let mut c = base;
        for (t, w) in it {
            let px = data[t];
            c[0] += w * (px[0] - base[0]);
            c[1] += w * (px[1] - base[1]);
            c[2] += w * (px[2] - base[2]);
        }
        c
    }

    /// Unweighted mean over `factor`×`factor` blocks.
    pub fn downsample_box(&self, factor: usize) -> Result<Texture<S>> {
        Ok(Texture::from_image(downsample_box(&self.image, factor)?))
    }

    /// Resamples onto a `width`×`height` grid by bilinear lookup at texel centers.
    pub fn resampled(&self, width: usize, height: usize) -> Texture<S> {
        if (width, height) == self.image.dims() {
            return Texture::from_image(self.image.clone());
        }
        let img = Image::from_fn(width, height, |x, y| {
            let uv = Vec2::new(
                (S::from_usize_lossy(x) + S::lit(0.5)) / S::from_usize_lossy(width),
                S::one() - (S::from_usize_lossy(y) + S::lit(0.5)) / S::from_usize_lossy(height),
            );
            self.sample_bilinear(uv).0
        });
        Texture::from_image(img)
    }

    /// Texels whose accumulated update is at most `epsilon` inside `coverage`.
    pub fn scan_point_gaps(&self, coverage: &Mask, epsilon: S) -> Result<(usize, Mask)> {
        self.image.check_dims(coverage, "gap scan coverage")?;
        let data: Vec<bool> = coverage
            .as_slice()
            .iter()
            .zip(self.update_magnitude.as_slice())
            .map(|(&inside, &m)| inside && m <= epsilon)
            .collect();
        let count = data.iter().filter(|&&g| g).count();
        Ok((count, Mask::from_vec(self.width(), self.height(), data)?))
    }
}

fn check_factor<T: Clone>(g: &Grid<T>, factor: usize) -> Result<()> {
    if factor == 0 || g.width() % factor != 0 || g.height() % factor != 0 {
        return Err(Error::Dimensions(format!(
            "downsample factor {factor} does not divide {}x{}",
            g.width(),
            g.height()
        )));
    }
    Ok(())
}

fn pairwise_sum<S: Real>(v: &[[S; 3]]) -> [S; 3] {
    match v.len() {
        0 => [S::zero(); 3],
        1 => v[0],
        n => {
            let (a, b) = (pairwise_sum(&v[..n / 2]), pairwise_sum(&v[n / 2..]));
            [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
        }
    }
}

/// Box-filter downsample of an RGB grid. Blocks are summed pairwise, so a
/// constant block maps back to its value exactly for power-of-two factors.
pub fn downsample_box<S: Real>(src: &Image<S>, factor: usize) -> Result<Image<S>> {
    check_factor(src, factor)?;
    let (w, h) = (src.width() / factor, src.height() / factor);
    let inv = S::one() / S::from_usize_lossy(factor * factor);
    let data = src.as_slice();
    let sw = src.width();
    Ok(Image::from_fn(w, h, |x, y| {
        let mut rows = [[S::zero(); 3]; 64];
        let mut heap;
        let sums: &mut [[S; 3]] = if factor <= 64 {
            &mut rows[..factor]
        } else {
            heap = vec![[S::zero(); 3]; factor];
            &mut heap
        };
        for (dy, s) in sums.iter_mut().enumerate() {
            let row = (y * factor + dy) * sw + x * factor;
            *s = pairwise_sum(&data[row..row + factor]);
        }
        pairwise_sum(sums).map(|c| c * inv)
    }))
}

/// Adjoint of [`downsample_box`]: each coarse value is spread uniformly over its
/// block, scaled by `1/factor²`.
pub fn downsample_box_adjoint<S: Real>(coarse: &Image<S>, factor: usize) -> Image<S> {
    let inv = S::one() / S::from_usize_lossy(factor * factor);
    Image::from_fn(coarse.width() * factor, coarse.height() * factor, |x, y| {
        coarse.get(x / factor, y / factor).map(|c| c * inv)
    })
}

/// Nearest-neighbour upsample; [`downsample_box`] undoes it exactly for power-of-two factors.
pub fn upsample_nearest<S: Real>(coarse: &Image<S>, factor: usize) -> Image<S> {
    Image::from_fn(coarse.width() * factor, coarse.height() * factor, |x, y| {
        *coarse.get(x / factor, y / factor)
    })
}
