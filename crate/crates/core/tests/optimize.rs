use texrestore::geometry::shapes::{grid_quad, icosphere};
use texrestore::geometry::{generate_fallback_atlas, Mesh, Similarity};
use texrestore::image::{Image, Mask};
use texrestore::imagesource::{ImageSource, OracleSource, SourceError, ViewRequest};
use texrestore::linalg::Vec3;
use texrestore::raster::{classify_keep_update, orbit_view_plan, rasterize, rasterize_uv_coverage, Camera, ViewPlan};
use texrestore::texopt::{
    bake, bake_with_init, bilinear_footprint, optimize_view, render_view, BakeConfig, InitTexture, Texture,
};

fn small_config() -> BakeConfig {
    BakeConfig {
        hi_resolution: 128,
        lo_resolution: 32,
        steps_per_view: 30,
        render_size: 64,
        ..BakeConfig::default()
    }
}

fn sphere() -> Mesh<f64> {
    generate_fallback_atlas(&icosphere::<f64>(2, 0.5), 128).unwrap()
}

fn gt_texture(res: usize) -> Texture<f64> {
    Texture::from_image(Image::from_fn(res, res, |x, y| {
        let (u, v) = (x as f64 / res as f64, y as f64 / res as f64);
        [
            0.25 + 0.2 * (6.0 * u).sin(),
            0.3 + 0.2 * (5.0 * v).cos(),
            0.2 + 0.1 * (4.0 * (u + v)).sin(),
        ]
    }))
}

fn plan(cfg: &BakeConfig) -> ViewPlan<f64> {
    orbit_view_plan(8, (cfg.render_size, cfg.render_size), 2.0, 45f64.to_radians())
}

fn big_quad() -> Mesh<f64> {
    grid_quad::<f64>(4).transformed(&Similarity {
        scale: 4.0,
        offset: Vec3::zero(),
    })
}

#[test]
fn render_of_current_texture_is_a_fixed_point() {
    let cfg = BakeConfig {
        uv_loss_weight: 0.0,
        ..small_config()
    };
    let mesh = sphere();
    let cam = Camera::new(0.3, 0.2, 2.0, 0.8, 64, 64, "probe");
    let g = rasterize(&mesh, &cam, None).unwrap();
    let mut hi = gt_texture(128);
    let mut lo = hi.downsample_box(4).unwrap();
    let target = render_view(&hi, &g);
    let mask = classify_keep_update(&g, cfg.keep_update_threshold, cfg.angle_semantics);
    let before = hi.clone();
    let losses = optimize_view(&mut hi, &mut lo, &g, &target, &mask, &Mask::filled(32, 32, true), &cfg).unwrap();
    assert_eq!(losses.loss_hi.len(), 30);
    assert!(losses.loss_hi.iter().all(|&l| l == 0.0));
    for (a, b) in hi.texels().iter().zip(before.texels()) {
        for c in 0..3 {
            assert!((a[c] - b[c]).abs() <= 1e-8);
        }
    }
}

#[test]
fn solid_red_target_converges() {
    let cfg = BakeConfig {
        hi_resolution: 64,
        lo_resolution: 16,
        steps_per_view: 200,
        ..BakeConfig::default()
    };
    let mesh = big_quad();
    let cam = Camera::new(0.0, 0.0, 2.0, 45f64.to_radians(), 48, 48, "front");
    let g = rasterize(&mesh, &cam, None).unwrap();
    assert_eq!(g.covered_count(), 48 * 48);
    let mask = classify_keep_update(&g, cfg.keep_update_threshold, cfg.angle_semantics);
    let target = Image::filled(48, 48, [1.0, 0.0, 0.0]);
    let mut hi = Texture::white(64, 64);
    let mut lo = hi.downsample_box(4).unwrap();
    let mv = rasterize_uv_coverage(&mesh, 16);
    let losses = optimize_view(&mut hi, &mut lo, &g, &target, &mask, &mv, &cfg).unwrap();
    let decreasing = losses.loss_hi.windows(2).filter(|w| w[1] < w[0]).count();
    assert!(decreasing as f64 >= 0.95 * 199.0, "{decreasing}");
    let final_mse = texrestore::metrics::image_mse(&render_view(&hi, &g), &target, Some(&mask)).unwrap() * 3.0;
    assert!(final_mse < 1e-3, "{final_mse}");
    assert!(hi.texels().iter().flatten().all(|c| (0.0..=1.0).contains(c)));
}

#[test]
fn default_plan_rasterizes_ten_views() {
    let cfg = BakeConfig {
        steps_per_view: 2,
        ..small_config()
    };
    let mesh = sphere();
    let mut oracle = OracleSource::new(mesh.clone(), gt_texture(128)).unwrap();
    let out = bake(&mesh, &plan(&cfg), &mut oracle, &cfg).unwrap();
    assert_eq!(out.report.gbuffers_rasterized, 10);
    assert_eq!(out.report.views.len(), 10);
    let order: Vec<usize> = out.report.views.iter().map(|v| v.index).collect();
    assert_eq!(order, vec![0, 4, 1, 5, 2, 6, 3, 7, 8, 9]);
}

/// Records the init renders it is given and answers with them.
struct Recorder(Vec<Image<f64>>);

impl ImageSource<f64> for Recorder {
    fn generate(&mut self, views: &[ViewRequest<'_, f64>]) -> Result<Vec<Image<f64>>, SourceError> {
        self.0.extend(views.iter().map(|v| v.init.clone()));
        Ok(views.iter().map(|v| v.init.clone()).collect())
    }
}

#[test]
fn file_init_is_rendered_before_optimization() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rough.png");
    let rough = gt_texture(48);
    rough.image().save_png(&path).unwrap();
    let cfg = BakeConfig {
        init_texture: InitTexture::File(path.clone()),
        steps_per_view: 1,
        ..small_config()
    };
    let mesh = sphere();
    let mut rec = Recorder(Vec::new());
    let p = plan(&cfg);
    bake(&mesh, &p, &mut rec, &cfg).unwrap();
    let expected = Texture::from_image(Image::load_png(&path).unwrap()).resampled(128, 128);
    let g = rasterize(&mesh, &p.cameras[0], None).unwrap();
    let want = render_view(&expected, &g);
    for (a, b) in rec.0[0].as_slice().iter().zip(want.as_slice()) {
        for c in 0..3 {
            assert!((a[c] - b[c]).abs() < 1e-6);
        }
    }
    assert!((cfg.noise_strength() - 0.6).abs() < 1e-12);
}

struct Failing;

impl ImageSource<f64> for Failing {
    fn generate(&mut self, _: &[ViewRequest<'_, f64>]) -> Result<Vec<Image<f64>>, SourceError> {
        Err(SourceError::Connection("refused".into()))
    }
}

#[test]
fn source_failure_aborts_with_partial_report() {
    let cfg = small_config();
    let mesh = sphere();
    let err = bake(&mesh, &plan(&cfg), &mut Failing, &cfg).unwrap_err();
    assert!(err.partial.views.is_empty());
    assert_eq!(err.partial.gbuffers_rasterized, 2);
    assert!(err.to_string().contains("refused"));
}

/// Texels any update-mask pixel of any view samples with nonzero weight.
fn sampled_texels(mesh: &Mesh<f64>, p: &ViewPlan<f64>, cfg: &BakeConfig) -> Vec<bool> {
    let res = cfg.hi_resolution;
    let mut hit = vec![false; res * res];
    for cam in &p.cameras {
        let g = rasterize(mesh, cam, None).unwrap();
        let m = classify_keep_update(&g, cfg.keep_update_threshold, cfg.angle_semantics);
        for i in 0..m.len() {
            if m.as_slice()[i] {
                for (t, _) in bilinear_footprint(res, res, g.uv.as_slice()[i]).iter() {
                    hit[t] = true;
                }
            }
        }
    }
    hit
}

#[test]
fn without_uv_loss_only_sampled_texels_move() {
    let cfg = BakeConfig {
        uv_loss_weight: 0.0,
        hi_resolution: 256,
        lo_resolution: 64,
        steps_per_view: 5,
        ..small_config()
    };
    let mesh = generate_fallback_atlas(&icosphere::<f64>(2, 0.5), 256).unwrap();
    let mut oracle = OracleSource::new(mesh.clone(), gt_texture(128)).unwrap();
    let p = plan(&cfg);
    let out = bake(&mesh, &p, &mut oracle, &cfg).unwrap();
    let hit = sampled_texels(&mesh, &p, &cfg);
    let mag = out.texture.update_magnitude().as_slice();
    let mut moved_unsampled = 0;
    let mut unsampled_in_coverage = 0;
    let coverage = rasterize_uv_coverage(&mesh, 256);
    for i in 0..mag.len() {
        if !hit[i] && mag[i] != 0.0 {
            moved_unsampled += 1;
        }
        if !hit[i] && coverage.as_slice()[i] {
            unsampled_in_coverage += 1;
        }
    }
    assert_eq!(moved_unsampled, 0);
    // 64² renders cannot reach every texel of a 256² atlas: gaps exist.
    assert!(unsampled_in_coverage > 0);
    assert_eq!(out.report.gaps.as_ref().unwrap().count, out.gap_mask.count());
    assert!(out.report.gaps.unwrap().count >= 1);
}

#[test]
fn uv_loss_reaches_every_block_in_coverage() {
    let cfg = BakeConfig {
        uv_loss_weight: 1.0,
        hi_resolution: 256,
        lo_resolution: 64,
        steps_per_view: 5,
        ..small_config()
    };
    let mesh = generate_fallback_atlas(&icosphere::<f64>(2, 0.5), 256).unwrap();
    let mut oracle = OracleSource::new(mesh.clone(), gt_texture(128)).unwrap();
    let out = bake_with_init(&mesh, &plan(&cfg), &mut oracle, &cfg, Texture::white(256, 256)).unwrap();
    assert!(out.report.views.iter().any(|v| v.loss_uv.iter().any(|&l| l > 0.0)));
    // Every high-resolution texel whose low-resolution texel is sampled by
    // some view receives an update through the block average, whether or not
    // a pixel samples it directly.
    let mv = rasterize_uv_coverage(&mesh, 64);
    let lo_cfg = BakeConfig {
        hi_resolution: 64,
        ..cfg.clone()
    };
    let p = plan(&cfg);
    let lo_hit = sampled_texels(&mesh, &p, &lo_cfg);
    let hi_hit = sampled_texels(&mesh, &p, &cfg);
    let mag = out.texture.update_magnitude();
    let mut reached_only_by_uv = 0;
    for y in 0..256 {
        for x in 0..256 {
            if *mv.get(x / 4, y / 4) && lo_hit[(y / 4) * 64 + x / 4] {
                assert!(*mag.get(x, y) > 0.0, "texel {x},{y}");
                if !hi_hit[y * 256 + x] {
                    reached_only_by_uv += 1;
                }
            }
        }
    }
    assert!(reached_only_by_uv > 0);
    let no_uv = BakeConfig {
        uv_loss_weight: 0.0,
        ..cfg.clone()
    };
    let base = bake(&mesh, &p, &mut oracle, &no_uv).unwrap();
    assert!(out.report.gaps.as_ref().unwrap().count < base.report.gaps.as_ref().unwrap().count);
}

#[test]
fn update_magnitude_is_monotone_and_values_stay_in_range() {
    let cfg = BakeConfig {
        steps_per_view: 4,
        learning_rate: 0.3,
        optimizer: texrestore::texopt::OptimizerKind::Sgd,
        ..small_config()
    };
    let mesh = sphere();
    let oracle = OracleSource::new(mesh.clone(), gt_texture(128)).unwrap();
    let p = plan(&cfg);
    let mut hi = Texture::white(128, 128);
    let mut lo = hi.downsample_box(4).unwrap();
    let mv = rasterize_uv_coverage(&mesh, 32);
    for cam in &p.cameras {
        let g = rasterize(&mesh, cam, None).unwrap();
        let m = classify_keep_update(&g, cfg.keep_update_threshold, cfg.angle_semantics);
        let target = oracle.render(cam).unwrap();
        let before = hi.update_magnitude().clone();
        optimize_view(&mut hi, &mut lo, &g, &target, &m, &mv, &cfg).unwrap();
        for (a, b) in hi.update_magnitude().as_slice().iter().zip(before.as_slice()) {
            assert!(a >= b);
        }
        assert!(hi.texels().iter().chain(lo.texels()).flatten().all(|c| (0.0..=1.0).contains(c)));
    }
}
