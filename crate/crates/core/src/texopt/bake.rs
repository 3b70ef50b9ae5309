//! Per-view optimization and the full multi-view bake.

use std::time::Instant;

use rayon::prelude::*;

use super::config::{BakeConfig, InitTexture, OptimizerKind};
use super::loss::{det_sum, render_view, ViewSplat};
use super::optim::TexelOptimizer;
use super::report::{BakeReport, CameraRecord, GapReport, Timings, ViewReport};
use super::texture::{downsample_box, Texture};
use crate::error::{BakeAborted, Error, Result};
use crate::geometry::Mesh;
use crate::image::{Image, Mask};
use crate::imagesource::{blend_keep_update, check_sizes, pair_symmetric_views, ImageSource, ViewRequest};
use crate::metrics::psnr;
use crate::raster::{
    checkerboard_keep_blend, classify_keep_update, rasterize, rasterize_uv_coverage, GBuffer, ViewPlan,
};
use crate::scalar::Real;

/// Loss curves of one [`optimize_view`] call, one entry per step.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ViewLosses {
    pub loss_hi: Vec<f64>,
    pub loss_lo: Vec<f64>,
    pub loss_uv: Vec<f64>,
}

/// Final textures of a bake and its report.
#[derive(Debug, Clone)]
pub struct BakeOutput<S> {
    pub texture: Texture<S>,
    pub lo_texture: Texture<S>,
    /// Gap mask at high resolution.
    pub gap_mask: Mask,
    pub report: BakeReport,
}

/// Runs `cfg.steps_per_view` joint steps on the high-resolution texture `hi`
/// and the low-resolution texture `lo` against one view's target.
///
/// Each step takes the masked view MSE gradient for both textures and, when
/// `cfg.uv_loss_weight > 0`, adds the weighted gradient of the masked MSE
/// between `downsample(hi)` and `lo` (over `mask_v_lo`) to `hi` only.
/// A fresh optimizer state is used for every call; see [`optimize_view_with`]
/// to carry moments across views.
#[allow(clippy::too_many_arguments)]
pub fn optimize_view<S: Real>(
    hi: &mut Texture<S>,
    lo: &mut Texture<S>,
    gbuffer: &GBuffer<S>,
    target: &Image<S>,
    update_mask: &Mask,
    mask_v_lo: &Mask,
    cfg: &BakeConfig,
) -> Result<ViewLosses> {
    let mut state = OptimizerState::new(cfg.optimizer, cfg.learning_rate, hi, lo);
    optimize_view_with(&mut state, hi, lo, gbuffer, target, update_mask, mask_v_lo, cfg)
}

/// Optimizer moments for a high/low texture pair. A bake keeps one for its
/// whole run, so each texel's step size reflects all the views it was seen in.
#[derive(Debug, Clone)]
pub struct OptimizerState<S> {
    hi: TexelOptimizer<S>,
    lo: TexelOptimizer<S>,
}

impl<S: Real> OptimizerState<S> {
    pub fn new(kind: OptimizerKind, learning_rate: f64, hi: &Texture<S>, lo: &Texture<S>) -> Self {
        Self {
            hi: TexelOptimizer::new(kind, learning_rate, hi.texel_count()),
            lo: TexelOptimizer::new(kind, learning_rate, lo.texel_count()),
        }
    }
}

/// [`optimize_view`] continuing from `state`.
#[allow(clippy::too_many_arguments)]
pub fn optimize_view_with<S: Real>(
    state: &mut OptimizerState<S>,
    hi: &mut Texture<S>,
    lo: &mut Texture<S>,
    gbuffer: &GBuffer<S>,
    target: &Image<S>,
    update_mask: &Mask,
    mask_v_lo: &Mask,
    cfg: &BakeConfig,
) -> Result<ViewLosses> {
    gbuffer.coverage.check_dims(target, "target vs G-buffer")?;
    gbuffer.coverage.check_dims(update_mask, "update mask vs G-buffer")?;
    if hi.width() % lo.width().max(1) != 0 || lo.width() == 0 || lo.height() == 0 {
        return Err(Error::Dimensions("low resolution must divide high resolution".into()));
    }
    let f = hi.width() / lo.width();
    if hi.height() != f * lo.height() || hi.width() != f * lo.width() {
        return Err(Error::Dimensions("textures must share aspect and an integer factor".into()));
    }
    if mask_v_lo.dims() != (lo.width(), lo.height()) {
        return Err(Error::Dimensions("coverage mask must match the low-resolution texture".into()));
    }
    let lambda = S::lit(cfg.uv_loss_weight);
    let use_uv = cfg.uv_loss_weight > 0.0;
    let mv_count = mask_v_lo.count();
    if use_uv && mv_count == 0 {
        return Err(Error::EmptyMask);
    }

    let splat_hi = ViewSplat::new(hi, gbuffer, update_mask);
    let splat_lo = ViewSplat::new(lo, gbuffer, update_mask);
    let (hw, lw) = (hi.width(), lo.width());
    let mv = mask_v_lo.as_slice();

    let mut active_hi = vec![false; hi.texel_count()];
    for &t in splat_hi.touched() {
        active_hi[t as usize] = true;
    }
    if use_uv {
        active_hi.par_iter_mut().enumerate().for_each(|(i, a)| {
            let (x, y) = (i % hw, i / hw);
            *a |= mv[(y / f) * lw + x / f];
        });
    }
    let mut active_lo = vec![false; lo.texel_count()];
    for &t in splat_lo.touched() {
        active_lo[t as usize] = true;
    }

    let OptimizerState { hi: opt_hi, lo: opt_lo } = state;
    let mut grad_hi = vec![[S::zero(); 3]; hi.texel_count()];
    let mut grad_lo = vec![[S::zero(); 3]; lo.texel_count()];
    let uv_scale = if use_uv {
        lambda * S::lit(2.0) / (S::from_usize_lossy(mv_count) * S::from_usize_lossy(f * f))
    } else {
        S::zero()
    };

    let mut losses = ViewLosses::default();
    for _ in 0..cfg.steps_per_view {
        let (l_hi, r_hi) = splat_hi.residuals(hi, target);
        let (l_lo, r_lo) = splat_lo.residuals(lo, target);
        splat_hi.scatter(&r_hi, &mut grad_hi);
        splat_lo.scatter(&r_lo, &mut grad_lo);

        // Per low-resolution texel: downsample(hi) − lo inside the coverage mask, zero elsewhere.
        let uv_diff: Vec<[S; 3]> = if use_uv {
            let down = downsample_box(hi.image(), f)?;
            down.as_slice()
                .par_iter()
                .zip(lo.texels().par_iter())
                .zip(mv.par_iter())
                .map(|((d, t), &m)| {
                    if m {
                        [d[0] - t[0], d[1] - t[1], d[2] - t[2]]
                    } else {
                        [S::zero(); 3]
                    }
                })
                .collect()
        } else {
            Vec::new()
        };
        let l_uv = if use_uv {
            let sq: Vec<S> = uv_diff.iter().map(|d| d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).collect();
            det_sum(&sq) / S::from_usize_lossy(mv_count)
        } else {
            S::zero()
        };

        {
            let (texels, magnitude) = hi.parts_mut();
            let grad_hi = &grad_hi;
            let uv_diff = &uv_diff;
            opt_hi.step(texels, magnitude, &active_hi, |i| {
                let mut g = grad_hi[i];
                if use_uv {
                    let (x, y) = (i % hw, i / hw);
                    let d = uv_diff[(y / f) * lw + x / f];
                    for c in 0..3 {
                        g[c] += uv_scale * d[c];
                    }
                }
                g
            });
        }
        {
            let (texels, magnitude) = lo.parts_mut();
            let grad_lo = &grad_lo;
            opt_lo.step(texels, magnitude, &active_lo, |i| grad_lo[i]);
        }
        losses.loss_hi.push(l_hi.as_f64());
        losses.loss_lo.push(l_lo.as_f64());
        losses.loss_uv.push(l_uv.as_f64());
    }
    Ok(losses)
}

/// Starting textures for a bake: the configured init (white, or a PNG
/// resampled to the high resolution) and its box downsample.
pub fn initial_textures<S: Real>(cfg: &BakeConfig) -> Result<(Texture<S>, Texture<S>)> {
    let hi = match &cfg.init_texture {
        InitTexture::White => Texture::white(cfg.hi_resolution, cfg.hi_resolution),
        InitTexture::File(path) => {
            Texture::from_image(Image::load_png(path)?).resampled(cfg.hi_resolution, cfg.hi_resolution)
        }
    };
    let lo = hi.downsample_box(cfg.downsample_factor())?;
    Ok((hi, lo))
}

/// Multi-view bake from the configured initial texture.
pub fn bake<S: Real, Src: ImageSource<S> + ?Sized>(
    mesh: &Mesh<S>,
    plan: &ViewPlan<S>,
    source: &mut Src,
    cfg: &BakeConfig,
) -> Result<BakeOutput<S>, BakeAborted> {
    let empty = || BakeReport {
        config: cfg.clone(),
        settings: Vec::new(),
        views: Vec::new(),
        gbuffers_rasterized: 0,
        gaps: None,
        artifacts: Default::default(),
        timings: Timings::default(),
    };
    let abort = |error: Error| BakeAborted {
        error,
        partial: Box::new(empty()),
    };
    cfg.validate().map_err(abort)?;
    let (hi, _) = initial_textures::<S>(cfg).map_err(abort)?;
    bake_with_init(mesh, plan, source, cfg, hi)
}

/// Multi-view bake starting from `init` (resampled to the high resolution).
/// `cfg.init_texture` is only echoed into the report.
pub fn bake_with_init<S: Real, Src: ImageSource<S> + ?Sized>(
    mesh: &Mesh<S>,
    plan: &ViewPlan<S>,
    source: &mut Src,
    cfg: &BakeConfig,
    init: Texture<S>,
) -> Result<BakeOutput<S>, BakeAborted> {
    let start = Instant::now();
    let mut report = BakeReport {
        config: cfg.clone(),
        settings: Vec::new(),
        views: Vec::new(),
        gbuffers_rasterized: 0,
        gaps: None,
        artifacts: Default::default(),
        timings: Timings::default(),
    };
    macro_rules! attempt {
        ($e:expr) => {
            match $e {
                Ok(v) => v,
                Err(e) => {
                    report.timings.total = start.elapsed().as_secs_f64();
                    return Err(BakeAborted {
                        error: e.into(),
                        partial: Box::new(report),
                    });
                }
            }
        };
    }
    attempt!(cfg.validate());
    attempt!(mesh.require_bake_ready());
    let mut hi = init.resampled(cfg.hi_resolution, cfg.hi_resolution);
    let mut lo = attempt!(hi.downsample_box(cfg.downsample_factor()));
    let mask_v_lo = rasterize_uv_coverage(mesh, cfg.lo_resolution);
    if cfg.uv_loss_weight > 0.0 && mask_v_lo.count() == 0 {
        attempt!(Err::<(), _>(Error::EmptyMask));
    }
    let threshold = S::lit(cfg.keep_update_threshold);
    let mut state = OptimizerState::new(cfg.optimizer, cfg.learning_rate, &hi, &lo);

    for group in pair_symmetric_views(plan) {
        let members = group.indices();
        let t0 = Instant::now();
        let mut gbuffers = Vec::with_capacity(members.len());
        for &i in &members {
            gbuffers.push(attempt!(rasterize(mesh, &plan.cameras[i], None)));
            report.gbuffers_rasterized += 1;
        }
        let inits: Vec<Image<S>> = gbuffers.iter().map(|g| render_view(&hi, g)).collect();
        let masks: Vec<Mask> = gbuffers
            .iter()
            .map(|g| {
                let m = classify_keep_update(g, threshold, cfg.angle_semantics);
                if cfg.checkerboard_keep_blend {
                    checkerboard_keep_blend(&m, &g.coverage, cfg.checkerboard_band)
                } else {
                    m
                }
            })
            .collect();
        report.timings.rasterize += t0.elapsed().as_secs_f64();

        let t1 = Instant::now();
        let requests: Vec<ViewRequest<'_, S>> = members
            .iter()
            .enumerate()
            .map(|(k, &i)| ViewRequest {
                camera: &plan.cameras[i],
                gbuffer: &gbuffers[k],
                init: &inits[k],
                update_mask: &masks[k],
            })
            .collect();
        let generated = attempt!(source.generate(&requests));
        attempt!(check_sizes(&requests, &generated));
        report.timings.generate += t1.elapsed().as_secs_f64();

        let t2 = Instant::now();
        for (k, &i) in members.iter().enumerate() {
            let target = attempt!(blend_keep_update(&generated[k], &inits[k], &masks[k]));
            let losses = attempt!(optimize_view_with(
                &mut state,
                &mut hi,
                &mut lo,
                &gbuffers[k],
                &target,
                &masks[k],
                &mask_v_lo,
                cfg
            ));
            let update = masks[k].and(&gbuffers[k].coverage);
            let psnr_update = if update.count() == 0 {
                f64::INFINITY
            } else {
                attempt!(psnr(&render_view(&hi, &gbuffers[k]), &target, Some(&update)))
            };
            report.views.push(ViewReport {
                index: i,
                camera: CameraRecord::from_camera(&plan.cameras[i]),
                group: members.clone(),
                covered_pixels: gbuffers[k].covered_count(),
                update_pixels: update.count(),
                loss_hi: losses.loss_hi,
                loss_lo: losses.loss_lo,
                loss_uv: losses.loss_uv,
                psnr_update,
            });
        }
        report.timings.optimize += t2.elapsed().as_secs_f64();
    }

    let t3 = Instant::now();
    let coverage_hi = rasterize_uv_coverage(mesh, cfg.hi_resolution);
    let (count, gap_mask) = attempt!(hi.scan_point_gaps(&coverage_hi, S::lit(cfg.gap_epsilon)));
    let total = coverage_hi.count();
    report.gaps = Some(GapReport {
        epsilon: cfg.gap_epsilon,
        count,
        total,
        fraction: if total == 0 { 0.0 } else { count as f64 / total as f64 },
    });
    report.timings.gap_scan = t3.elapsed().as_secs_f64();
    report.timings.total = start.elapsed().as_secs_f64();
    Ok(BakeOutput {
        texture: hi,
        lo_texture: lo,
        gap_mask,
        report,
    })
}
