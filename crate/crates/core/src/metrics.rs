//! Image fidelity metrics and the finite-difference gradient checker.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::image::{Image, Mask};
use crate::scalar::Real;
use crate::texopt::{TexelGrad, Texture};

/// Mean of squared channel differences over masked (or all) pixels.
/// An empty selection gives 0.
pub fn image_mse<S: Real>(a: &Image<S>, b: &Image<S>, mask: Option<&Mask>) -> Result<f64> {
    a.check_dims(b, "mse operands")?;
    if let Some(m) = mask {
        a.check_dims(m, "mse mask")?;
    }
    let mut sum = 0.0f64;
    let mut n = 0usize;
    for (p, (x, y)) in a.as_slice().iter().zip(b.as_slice()).enumerate() {
        if mask.is_some_and(|m| !m.as_slice()[p]) {
            continue;
        }
        for c in 0..3 {
            let d = x[c].as_f64() - y[c].as_f64();
            sum += d * d;
        }
        n += 3;
    }
    Ok(if n == 0 { 0.0 } else { sum / n as f64 })
}

/// Peak signal-to-noise ratio for [0,1] images; identical inputs give `f64::INFINITY`.
pub fn psnr<S: Real>(a: &Image<S>, b: &Image<S>, mask: Option<&Mask>) -> Result<f64> {
    Ok(psnr_from_mse(image_mse(a, b, mask)?))
}

pub fn psnr_from_mse(mse: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        -10.0 * mse.log10()
    }
}

/// Largest relative error between central differences of `f` and
/// `analytic` over `samples` randomly chosen (texel, channel) entries.
/// The denominator is `max(|analytic|, 1e-8)`.
pub fn finite_diff_check<S, F>(
    texture: &Texture<S>,
    f: F,
    analytic: &TexelGrad<S>,
    samples: usize,
    h: f64,
    seed: u64,
) -> Result<f64>
where
    S: Real,
    F: Fn(&Texture<S>) -> Result<f64>,
{
    texture.image().check_dims(analytic, "analytic gradient")?;
    let entries = texture.texel_count() * 3;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picks = sample(&mut rng, entries, samples.min(entries));
    let mut probe = texture.clone();
    let mut worst = 0.0f64;
    for k in picks.iter() {
        let (t, c) = (k / 3, k % 3);
        let base = texture.texels()[t];
        let mut plus = base;
        plus[c] += S::lit(h);
        probe.set_texel(t, plus);
        let fp = f(&probe)?;
        let mut minus = base;
        minus[c] -= S::lit(h);
        probe.set_texel(t, minus);
        let fm = f(&probe)?;
        probe.set_texel(t, base);
        let numeric = (fp - fm) / (2.0 * h);
        let exact = analytic.as_slice()[t][c].as_f64();
        worst = worst.max((numeric - exact).abs() / exact.abs().max(1e-8));
    }
    Ok(worst)
}
