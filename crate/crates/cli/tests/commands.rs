use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use texrestore::geometry::shapes::icosphere;
use texrestore::geometry::{generate_fallback_atlas, load_mesh, write_obj};
use texrestore::image::{Image, Mask};
use texrestore::texopt::BakeReport;
use texrestore::Mesh64;
use texrestore_remote::{MockGenerator, MockServer};

fn texrestore(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_texrestore")).args(args).output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

struct Scene {
    dir: tempfile::TempDir,
    gt_mesh: PathBuf,
    gt_texture: PathBuf,
}

impl Scene {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let gt_mesh = dir.path().join("gt.obj");
        let gt_texture = dir.path().join("gt.png");
        let mesh = generate_fallback_atlas(&icosphere::<f64>(2, 0.5), 256).unwrap();
        write_obj(&mesh, &gt_mesh).unwrap();
        Image::<f64>::from_fn(64, 64, |x, y| [x as f64 / 63.0, y as f64 / 63.0, 0.5])
            .save_png(&gt_texture)
            .unwrap();
        Scene { dir, gt_mesh, gt_texture }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn oracle(&self) -> String {
        format!("oracle:{}:{}", s(&self.gt_mesh), s(&self.gt_texture))
    }

    fn small_bake(&self, extra: &[&str], tag: &str) -> (Output, PathBuf, PathBuf) {
        let out = self.path(&format!("{tag}.png"));
        let report = self.path(&format!("{tag}.json"));
        let mut args = vec![
            "bake",
            "--mesh",
            s(&self.gt_mesh),
            "--out",
            s(&out),
            "--report",
            s(&report),
            "--hi",
            "64",
            "--lo",
            "16",
            "--render-size",
            "48",
            "--steps",
            "5",
        ];
        args.extend_from_slice(extra);
        let o = texrestore(&args);
        (o, out, report)
    }
}

#[test]
fn decimate_reaches_face_target() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("sphere.obj");
    let output = dir.path().join("low.obj");
    write_obj(&icosphere::<f64>(4, 1.0), &input).unwrap();
    let o = texrestore(&["decimate", "--in", s(&input), "--out", s(&output), "--faces", "3000", "--reatlas", "1024"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let m: Mesh64 = load_mesh(&output).unwrap();
    assert!(m.triangle_count() <= 3000);
    assert!(m.is_bake_ready());
}

#[test]
fn bake_eval_gapscan_end_to_end() {
    let sc = Scene::new();
    let oracle = sc.oracle();
    let (o, out, report) = sc.small_bake(&["--source", &oracle, "--threshold-deg", "36"], "run");
    assert!(o.status.success(), "{}", stderr(&o));
    let r = BakeReport::from_json(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r.views.len(), 10);
    assert_eq!(r.config.keep_update_threshold, std::f64::consts::PI / 5.0);
    assert!(r.settings.contains(&("source".to_string(), oracle.clone())));
    assert!(r.settings.contains(&("steps".to_string(), "5".to_string())));
    assert!(out.exists() && sc.path("run.lo.png").exists() && sc.path("run.update.bin").exists());

    let targets = sc.path("targets");
    let o = texrestore(&[
        "render", "--mesh", s(&sc.gt_mesh), "--texture", s(&sc.gt_texture), "--view", "all", "--out", s(&targets),
        "--size", "48",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(targets.join("left_front.png").exists());

    let o = texrestore(&["eval", "--report", s(&report), "--against", s(&targets)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let table = String::from_utf8(o.stdout).unwrap();
    assert!(table.contains("psnr_db") && table.contains("left front") && table.contains("mean"));
    assert_eq!(table.lines().count(), 12);

    let mask_path = sc.path("gaps.png");
    let o = texrestore(&["gapscan", "--report", s(&report), "--out", s(&mask_path)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let mask = Mask::from_png(&std::fs::read(&mask_path).unwrap()).unwrap();
    assert_eq!(mask.count(), r.gaps.as_ref().unwrap().count);
}

#[test]
fn config_file_supplies_values_and_flags_win() {
    let sc = Scene::new();
    let cfg = sc.path("bake.cfg");
    std::fs::write(&cfg, format!("source = {}\nsteps = 3\nseed = 11\nlambda_uv = 0.5\n", sc.oracle())).unwrap();
    let (o, _, report) = sc.small_bake(&["--config", s(&cfg), "--seed", "4"], "cfg");
    assert!(o.status.success(), "{}", stderr(&o));
    let r = BakeReport::from_json(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r.config.seed, 4);
    assert_eq!(r.config.uv_loss_weight, 0.5);
    assert_eq!(r.config.steps_per_view, 5);
    assert_eq!(r.views[0].loss_hi.len(), 5);
}

#[test]
fn bake_through_remote_mock() {
    let sc = Scene::new();
    let mesh: Mesh64 = load_mesh(&sc.gt_mesh).unwrap();
    let tex = texrestore::texopt::Texture::from_image(Image::load_png(&sc.gt_texture).unwrap());
    let server = MockServer::spawn(
        MockGenerator::new(mesh.normalize_unit().unwrap(), tex).unwrap(),
        "127.0.0.1:0".parse().unwrap(),
    )
    .unwrap();
    let source = format!("remote:{}", server.url());
    let (o, _, report) = sc.small_bake(&["--source", &source, "--prompt", "a ball"], "remote");
    assert!(o.status.success(), "{}", stderr(&o));
    let r = BakeReport::from_json(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r.views.len(), 10);
}

#[test]
fn failures_exit_nonzero_with_one_line() {
    let o = texrestore(&["bake", "--frobnicate"]);
    assert!(!o.status.success());

    let sc = Scene::new();
    let o = texrestore(&["bake", "--mesh", s(&sc.gt_mesh), "--out", "x.png", "--report", "x.json", "--hi", "64", "--lo", "24"]);
    assert!(!o.status.success());
    let msg = stderr(&o);
    assert_eq!(msg.trim().lines().count(), 1, "{msg}");
    assert!(msg.contains("divide"));

    let o = texrestore(&["render", "--mesh", "/nonexistent.obj", "--texture", "x.png", "--view", "front", "--out", "o.png"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("nonexistent"));
}

#[test]
fn refused_remote_writes_partial_report() {
    let sc = Scene::new();
    let port = std::net::TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let source = format!("remote:http://127.0.0.1:{port}");
    let (o, _, report) = sc.small_bake(&["--source", &source], "refused");
    assert!(!o.status.success());
    let r = BakeReport::from_json(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert!(r.views.is_empty());
    assert_eq!(r.gbuffers_rasterized, 2);
}

#[test]
fn thread_count_does_not_change_the_bake() {
    let sc = Scene::new();
    let oracle = sc.oracle();
    let (a, out_a, rep_a) = sc.small_bake(&["--source", &oracle], "t1");
    let out_b = sc.path("t3.png");
    let rep_b = sc.path("t3.json");
    let b = texrestore(&[
        "--threads", "3", "bake", "--mesh", s(&sc.gt_mesh), "--out", s(&out_b), "--report", s(&rep_b), "--hi", "64",
        "--lo", "16", "--render-size", "48", "--steps", "5", "--source", &oracle,
    ]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(std::fs::read(sc.path("t1.update.bin")).unwrap(), std::fs::read(sc.path("t3.update.bin")).unwrap());
    assert_eq!(std::fs::read(&out_a).unwrap(), std::fs::read(&out_b).unwrap());
    let ra = BakeReport::from_json(&std::fs::read_to_string(&rep_a).unwrap()).unwrap();
    let rb = BakeReport::from_json(&std::fs::read_to_string(&rep_b).unwrap()).unwrap();
    assert_eq!(ra.views, rb.views);
    assert_eq!(ra.gaps, rb.gaps);
}
