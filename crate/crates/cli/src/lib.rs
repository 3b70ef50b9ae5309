//! `texrestore` command line: decimate, bake, render, eval, gapscan and serve-mock.

mod options;
mod sidecar;

use std::ffi::OsString;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use texrestore::decimation::decimate_with_stats;
use texrestore::geometry::{generate_fallback_atlas, load_mesh, write_obj};
use texrestore::image::Image;
use texrestore::imagesource::{descriptor_file_name, FilesSource, ImageSource, OracleSource};
use texrestore::metrics::psnr;
use texrestore::raster::{classify_keep_update, rasterize, rasterize_uv_coverage, Camera, ViewPlan};
use texrestore::texopt::{bake, Artifacts, BakeReport, Texture};
use texrestore::Mesh64;
use texrestore_remote::{serve_mock, MockGenerator, RemoteSource};

pub use options::{degrees_to_radians, BakeOptions};

#[derive(Debug, Parser)]
#[command(name = "texrestore", version, about = "Texture restoration for simplified meshes")]
pub struct Cli {
    /// Worker threads (defaults to all cores)
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simplify a mesh by quadric edge collapse
    Decimate(DecimateArgs),
    /// Bake a texture for a mesh from posed target images
    Bake(BakeOptions),
    /// Render a textured mesh from one plan view (or `all` into a directory)
    Render(RenderArgs),
    /// Print per-view update-region PSNR of a baked texture against target images
    Eval(EvalArgs),
    /// Write the point-gap mask of a bake
    Gapscan(GapscanArgs),
    /// Serve oracle renders of a textured mesh over the generation protocol
    ServeMock(ServeArgs),
}

#[derive(Debug, Args)]
pub struct DecimateArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub faces: usize,
    #[arg(long = "preserve-seams")]
    pub preserve_seams: bool,
    /// Replace UVs with a fallback atlas laid out for this texture resolution
    #[arg(long)]
    pub reatlas: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ViewArgs {
    #[arg(long, default_value_t = 10)]
    pub views: usize,
    #[arg(long, default_value_t = 1024)]
    pub size: usize,
    #[arg(long, default_value_t = 2.0)]
    pub radius: f64,
    #[arg(long = "fov-deg", default_value_t = 45.0)]
    pub fov_deg: f64,
    #[arg(long = "no-normalize")]
    pub no_normalize: bool,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[arg(long)]
    pub mesh: PathBuf,
    #[arg(long)]
    pub texture: PathBuf,
    /// Descriptor (e.g. "left front"), plan index, or `all`
    #[arg(long)]
    pub view: String,
    /// Image path, or a directory for `--view all`
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub plan: ViewArgs,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub report: PathBuf,
    /// Directory of `<descriptor>.png` target images
    #[arg(long)]
    pub against: PathBuf,
}

#[derive(Debug, Args)]
pub struct GapscanArgs {
    #[arg(long)]
    pub report: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long)]
    pub mesh: PathBuf,
    #[arg(long)]
    pub texture: PathBuf,
    #[arg(long)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    #[arg(long = "no-normalize")]
    pub no_normalize: bool,
}

type Outcome = Result<(), String>;

/// Parses `argv` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(reason) => {
            eprintln!("error: {}", reason.lines().next().unwrap_or(""));
            1
        }
    }
}

pub fn execute(cli: Cli) -> Outcome {
    let work = move || match cli.command {
        Command::Decimate(a) => decimate_cmd(a),
        Command::Bake(a) => bake_cmd(a),
        Command::Render(a) => render_cmd(a),
        Command::Eval(a) => eval_cmd(a),
        Command::Gapscan(a) => gapscan_cmd(a),
        Command::ServeMock(a) => serve_cmd(a),
    };
    match cli.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| e.to_string())?
            .install(work),
        None => work(),
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn load_scene_mesh(path: &Path, normalize: bool) -> Result<Mesh64, String> {
    let mesh: Mesh64 = load_mesh(path).map_err(err)?;
    if normalize {
        mesh.normalize_unit().map_err(err)
    } else {
        Ok(mesh)
    }
}

fn load_texture(path: &Path) -> Result<Texture<f64>, String> {
    Ok(Texture::from_image(Image::load_png(path).map_err(err)?))
}

fn decimate_cmd(a: DecimateArgs) -> Outcome {
    let mesh: Mesh64 = load_mesh(&a.input).map_err(err)?;
    let (mut out, stats) = decimate_with_stats(&mesh, a.faces, a.preserve_seams).map_err(err)?;
    if let Some(res) = a.reatlas {
        out = generate_fallback_atlas(&out, res).map_err(err)?;
    }
    write_obj(&out, &a.out).map_err(err)?;
    println!(
        "{} -> {} faces ({} collapses{})",
        stats.input_faces,
        out.triangle_count(),
        stats.collapses,
        if stats.reached_target { "" } else { ", target not reached" }
    );
    Ok(())
}

enum Source {
    Oracle(PathBuf, PathBuf),
    Files(PathBuf),
    Remote(String),
}

fn parse_source(arg: &str) -> Result<Source, String> {
    let (kind, rest) = arg.split_once(':').ok_or_else(|| format!("bad --source {arg:?}"))?;
    match kind {
        "oracle" => {
            let (mesh, tex) = rest
                .split_once(':')
                .ok_or_else(|| format!("--source oracle needs oracle:MESH.obj:TEXTURE.png, got {arg:?}"))?;
            Ok(Source::Oracle(mesh.into(), tex.into()))
        }
        "files" => Ok(Source::Files(rest.into())),
        "remote" => Ok(Source::Remote(rest.into())),
        _ => Err(format!("unknown source kind {kind:?}; expected oracle, files or remote")),
    }
}

fn with_extension(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}"))
}

fn absolute(path: &Path) -> PathBuf {
    std::path::absolute(path).unwrap_or_else(|_| path.to_path_buf())
}

fn write_report(report: &BakeReport, path: &Path) -> Outcome {
    std::fs::write(path, report.to_json()).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn bake_cmd(flags: BakeOptions) -> Outcome {
    let opts = flags.resolve()?;
    let cfg = opts.bake_config()?;
    let mesh_path = opts.mesh.clone().ok_or("bake needs --mesh")?;
    let out_path = opts.out.clone().ok_or("bake needs --out")?;
    let report_path = opts.report.clone().ok_or("bake needs --report")?;
    let normalize = !opts.no_normalize;
    let mesh = load_scene_mesh(&mesh_path, normalize)?;
    let plan = ViewPlan::with_view_count(
        cfg.views,
        (cfg.render_size, cfg.render_size),
        cfg.camera_radius,
        cfg.fov_y_deg.to_radians(),
    )
    .ok_or("at least 3 views are required")?;
    let mut source: Box<dyn ImageSource<f64>> = match parse_source(opts.source.as_deref().unwrap_or("files:."))? {
        Source::Oracle(m, t) => Box::new(OracleSource::new(load_scene_mesh(&m, normalize)?, load_texture(&t)?).map_err(err)?),
        Source::Files(dir) => Box::new(FilesSource::new(dir)),
        Source::Remote(url) => {
            let mut r = RemoteSource::new(url);
            r.prompt = opts.prompt.clone().unwrap_or_default();
            r.negative_prompt = opts.negative_prompt.clone().unwrap_or_default();
            if let Some(n) = opts.denoise_steps {
                r.denoise_steps = n;
            }
            r.noise_strength = cfg.noise_strength();
            r.seed = cfg.seed;
            Box::new(r)
        }
    };
    let settings = opts.pairs();
    let out = match bake(&mesh, &plan, source.as_mut(), &cfg) {
        Ok(o) => o,
        Err(aborted) => {
            let mut partial = *aborted.partial;
            partial.settings = settings;
            write_report(&partial, &report_path)?;
            return Err(aborted.error.to_string());
        }
    };
    let lo_path = with_extension(&out_path, ".lo.png");
    let mag_path = with_extension(&out_path, ".update.bin");
    out.texture.image().save_png(&out_path).map_err(err)?;
    out.lo_texture.image().save_png(&lo_path).map_err(err)?;
    sidecar::save(out.texture.update_magnitude(), &mag_path)?;
    let mut report = out.report;
    report.settings = settings;
    report.artifacts = Artifacts {
        mesh: Some(absolute(&mesh_path)),
        texture: Some(absolute(&out_path)),
        lo_texture: Some(absolute(&lo_path)),
        update_magnitude: Some(absolute(&mag_path)),
    };
    write_report(&report, &report_path)?;
    if let Some(g) = &report.gaps {
        println!(
            "baked {} views; gaps {} / {} ({:.4}%)",
            report.views.len(),
            g.count,
            g.total,
            100.0 * g.fraction
        );
    }
    Ok(())
}

fn pick_views<'a>(plan: &'a ViewPlan<f64>, view: &str) -> Result<Vec<&'a Camera<f64>>, String> {
    if view == "all" {
        return Ok(plan.cameras.iter().collect());
    }
    if let Ok(i) = view.parse::<usize>() {
        return plan.cameras.get(i).map(|c| vec![c]).ok_or(format!("view index {i} out of range"));
    }
    plan.cameras
        .iter()
        .find(|c| c.descriptor == view)
        .map(|c| vec![c])
        .ok_or(format!("no view named {view:?}"))
}

fn render_cmd(a: RenderArgs) -> Outcome {
    let mesh = load_scene_mesh(&a.mesh, !a.plan.no_normalize)?;
    let texture = load_texture(&a.texture)?;
    let p = &a.plan;
    let plan = ViewPlan::with_view_count(p.views, (p.size, p.size), p.radius, p.fov_deg.to_radians())
        .ok_or("at least 3 views are required")?;
    let cams = pick_views(&plan, &a.view)?;
    if a.view == "all" {
        std::fs::create_dir_all(&a.out).map_err(|e| format!("cannot create {}: {e}", a.out.display()))?;
    }
    for cam in cams {
        let g = rasterize(&mesh, cam, Some(&texture)).map_err(err)?;
        let path = if a.view == "all" {
            a.out.join(descriptor_file_name(&cam.descriptor))
        } else {
            a.out.clone()
        };
        g.color.save_png(&path).map_err(err)?;
    }
    Ok(())
}

fn read_report(path: &Path) -> Result<BakeReport, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    BakeReport::from_json(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn artifact<'a>(p: &'a Option<PathBuf>, what: &str) -> Result<&'a Path, String> {
    p.as_deref().ok_or_else(|| format!("report has no {what} artifact"))
}

fn report_normalizes(report: &BakeReport) -> bool {
    !report.settings.iter().any(|(k, v)| k == "no-normalize" && v == "true")
}

fn eval_cmd(a: EvalArgs) -> Outcome {
    let report = read_report(&a.report)?;
    let mesh = load_scene_mesh(artifact(&report.artifacts.mesh, "mesh")?, report_normalizes(&report))?;
    let texture = load_texture(artifact(&report.artifacts.texture, "texture")?)?;
    let cfg = &report.config;
    println!("{:>4}  {:<14} {:>10}  {:>9}", "view", "descriptor", "update_px", "psnr_db");
    let mut sum = 0.0;
    for v in &report.views {
        let cam: Camera<f64> = v.camera.to_camera();
        let g = rasterize(&mesh, &cam, Some(&texture)).map_err(err)?;
        let target = Image::<f64>::load_png(a.against.join(descriptor_file_name(&cam.descriptor))).map_err(err)?;
        let mask = classify_keep_update(&g, cfg.keep_update_threshold, cfg.angle_semantics);
        let db = psnr(&g.color, &target, Some(&mask)).map_err(err)?;
        sum += db.min(99.0);
        println!("{:>4}  {:<14} {:>10}  {:>9.3}", v.index, cam.descriptor, mask.count(), db);
    }
    if !report.views.is_empty() {
        println!("mean  {:<14} {:>10}  {:>9.3}", "", "", sum / report.views.len() as f64);
    }
    Ok(())
}

fn gapscan_cmd(a: GapscanArgs) -> Outcome {
    let report = read_report(&a.report)?;
    let mesh = load_scene_mesh(artifact(&report.artifacts.mesh, "mesh")?, report_normalizes(&report))?;
    let magnitude = sidecar::load(artifact(&report.artifacts.update_magnitude, "update magnitude")?)?;
    let res = report.config.hi_resolution;
    if magnitude.dims() != (res, res) {
        return Err(format!(
            "update magnitude is {:?} but the report's high resolution is {res}",
            magnitude.dims()
        ));
    }
    let coverage = rasterize_uv_coverage(&mesh, res);
    let tex = Texture::white(res, res).with_update_magnitude(magnitude).map_err(err)?;
    let (count, mask) = tex.scan_point_gaps(&coverage, report.config.gap_epsilon).map_err(err)?;
    mask.to_png()
        .and_then(|png| std::fs::write(&a.out, png).map_err(|e| texrestore::Error::Png(e.to_string())))
        .map_err(err)?;
    let total = coverage.count();
    println!(
        "gaps {count} / {total} ({:.4}%)",
        if total == 0 { 0.0 } else { 100.0 * count as f64 / total as f64 }
    );
    Ok(())
}

fn serve_cmd(a: ServeArgs) -> Outcome {
    let mesh = load_scene_mesh(&a.mesh, !a.no_normalize)?;
    let generator = MockGenerator::new(mesh, load_texture(&a.texture)?).map_err(err)?;
    let addr: SocketAddr = format!("{}:{}", a.host, a.port)
        .parse()
        .map_err(|e| format!("bad address: {e}"))?;
    println!("serving mock generator on http://{addr}");
    serve_mock(generator, addr).map_err(err)
}
