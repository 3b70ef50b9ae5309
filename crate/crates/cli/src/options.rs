use std::path::{Path, PathBuf};

use clap::Args;
use texrestore::raster::AngleSemantics;
use texrestore::texopt::{BakeConfig, InitTexture, OptimizerKind};

/// Flags of `bake`. Every flag has a `key=value` equivalent for `--config`
/// files, using the flag name without dashes.
#[derive(Debug, Clone, Default, Args)]
pub struct BakeOptions {
    /// key=value file with defaults for any of the flags below
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub mesh: Option<PathBuf>,
    /// Output texture PNG
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Initial texture PNG (white when omitted)
    #[arg(long)]
    pub init: Option<PathBuf>,
    #[arg(long)]
    pub views: Option<usize>,
    #[arg(long)]
    pub hi: Option<usize>,
    #[arg(long)]
    pub lo: Option<usize>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long = "lambda-uv")]
    pub lambda_uv: Option<f64>,
    #[arg(long = "threshold-deg")]
    pub threshold_deg: Option<f64>,
    /// oracle:GT.obj:GT.png | files:DIR | remote:URL
    #[arg(long)]
    pub source: Option<String>,
    #[arg(long)]
    pub prompt: Option<String>,
    #[arg(long = "negative-prompt")]
    pub negative_prompt: Option<String>,
    #[arg(long = "denoise-steps")]
    pub denoise_steps: Option<u32>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// adam | sgd
    #[arg(long)]
    pub optimizer: Option<String>,
    #[arg(long = "render-size")]
    pub render_size: Option<usize>,
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long = "fov-deg")]
    pub fov_deg: Option<f64>,
    #[arg(long = "gap-epsilon")]
    pub gap_epsilon: Option<f64>,
    #[arg(long = "checkerboard-band")]
    pub checkerboard_band: Option<usize>,
    /// Update pixels are those NOT facing the camera within the threshold
    #[arg(long = "literal-angle")]
    pub literal_angle: bool,
    #[arg(long)]
    pub checkerboard: bool,
    /// Bake the mesh in its own coordinates instead of the unit box
    #[arg(long = "no-normalize")]
    pub no_normalize: bool,
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, String>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e| format!("{key}: {e}"))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, String> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => Err(format!("{key}: expected true or false, got {value:?}")),
    }
}

macro_rules! fields {
    ($m:ident; opt: $($o:ident = $ok:literal),*; flag: $($f:ident = $fk:literal),*) => {
        impl BakeOptions {
            fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
                match key {
                    $($ok => self.$o = Some(parse(key, value)?),)*
                    $($fk => self.$f = parse_bool(key, value)?,)*
                    _ => return Err(format!("unknown key {key:?}")),
                }
                Ok(())
            }

            /// `self` with unset values taken from `$m`.
            pub fn or(self, $m: BakeOptions) -> BakeOptions {
                BakeOptions {
                    config: self.config.or($m.config),
                    $($o: self.$o.or($m.$o),)*
                    $($f: self.$f || $m.$f,)*
                }
            }

            /// Every set value as `key=value`, in flag order.
            pub fn pairs(&self) -> Vec<(String, String)> {
                let mut out = Vec::new();
                $(if let Some(v) = &self.$o {
                    out.push(($ok.to_string(), display(v)));
                })*
                $(out.push(($fk.to_string(), self.$f.to_string()));)*
                out
            }
        }
    };
}

trait Echo {
    fn echo(&self) -> String;
}

impl Echo for PathBuf {
    fn echo(&self) -> String {
        self.display().to_string()
    }
}

macro_rules! echo_display {
    ($($t:ty),*) => {$(
        impl Echo for $t {
            fn echo(&self) -> String {
                self.to_string()
            }
        }
    )*};
}

echo_display!(String, usize, u32, u64, f64);

fn display<T: Echo>(v: &T) -> String {
    v.echo()
}

fields!(file;
    opt: mesh = "mesh", out = "out", report = "report", init = "init", views = "views", hi = "hi", lo = "lo",
        steps = "steps", lr = "lr", lambda_uv = "lambda-uv", threshold_deg = "threshold-deg", source = "source",
        prompt = "prompt", negative_prompt = "negative-prompt", denoise_steps = "denoise-steps", seed = "seed",
        optimizer = "optimizer", render_size = "render-size", radius = "radius", fov_deg = "fov-deg",
        gap_epsilon = "gap-epsilon", checkerboard_band = "checkerboard-band";
    flag: literal_angle = "literal-angle", checkerboard = "checkerboard", no_normalize = "no-normalize");

impl BakeOptions {
    /// Parses `key=value` lines. Blank lines and `#` comments are skipped;
    /// underscores in keys are read as dashes.
    pub fn from_config_text(text: &str, origin: &Path) -> Result<BakeOptions, String> {
        let mut opts = BakeOptions::default();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| format!("{}:{}: expected key=value", origin.display(), n + 1))?;
            let key = k.trim().replace('_', "-");
            opts.set(&key, v.trim())
                .map_err(|e| format!("{}:{}: {e}", origin.display(), n + 1))?;
        }
        Ok(opts)
    }

    /// Flags merged over the `--config` file, if any.
    pub fn resolve(self) -> Result<BakeOptions, String> {
        match self.config.clone() {
            Some(path) => {
                let text = std::fs::read_to_string(&path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
                Ok(self.or(BakeOptions::from_config_text(&text, &path)?))
            }
            None => Ok(self),
        }
    }

    pub fn bake_config(&self) -> Result<BakeConfig, String> {
        let d = BakeConfig::default();
        let hi = self.hi.unwrap_or(d.hi_resolution);
        let optimizer = match self.optimizer.as_deref() {
            None | Some("adam") => OptimizerKind::default(),
            Some("sgd") => OptimizerKind::Sgd,
            Some(other) => return Err(format!("unknown optimizer {other:?}; expected adam or sgd")),
        };
        let cfg = BakeConfig {
            hi_resolution: hi,
            lo_resolution: self.lo.unwrap_or((hi / 4).max(1)),
            steps_per_view: self.steps.unwrap_or(d.steps_per_view),
            learning_rate: self.lr.unwrap_or(d.learning_rate),
            uv_loss_weight: self.lambda_uv.unwrap_or(d.uv_loss_weight),
            keep_update_threshold: self.threshold_deg.map(degrees_to_radians).unwrap_or(d.keep_update_threshold),
            angle_semantics: if self.literal_angle {
                AngleSemantics::Literal
            } else {
                AngleSemantics::Facing
            },
            optimizer,
            checkerboard_keep_blend: self.checkerboard,
            checkerboard_band: self.checkerboard_band.unwrap_or(d.checkerboard_band),
            init_texture: self.init.clone().map(InitTexture::File).unwrap_or_default(),
            gap_epsilon: self.gap_epsilon.unwrap_or(d.gap_epsilon),
            render_size: self.render_size.unwrap_or(d.render_size),
            camera_radius: self.radius.unwrap_or(d.camera_radius),
            fov_y_deg: self.fov_deg.unwrap_or(d.fov_y_deg),
            views: self.views.unwrap_or(d.views),
            seed: self.seed.unwrap_or(d.seed),
        };
        cfg.validate().map_err(|e| e.to_string())?;
        Ok(cfg)
    }
}

/// Degrees to radians, exact for whole divisors of 180 (36° is exactly π/5).
pub fn degrees_to_radians(deg: f64) -> f64 {
    let q = 180.0 / deg;
    if q.fract() == 0.0 && q * deg == 180.0 {
        std::f64::consts::PI / q
    } else {
        deg.to_radians()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thirty_six_degrees_is_pi_over_five() {
        assert_eq!(degrees_to_radians(36.0), std::f64::consts::PI / 5.0);
        assert_eq!(degrees_to_radians(90.0), std::f64::consts::FRAC_PI_2);
        assert!((degrees_to_radians(37.0) - 37f64.to_radians()).abs() < 1e-15);
    }

    #[test]
    fn defaults_match_library_defaults() {
        let cfg = BakeOptions::default().bake_config().unwrap();
        assert_eq!(cfg, BakeConfig::default());
        assert_eq!(cfg.views, 10);
        assert_eq!(cfg.render_size, 1024);
        assert_eq!(cfg.steps_per_view, 200);
    }

    #[test]
    fn low_resolution_follows_high_by_default() {
        let opts = BakeOptions {
            hi: Some(512),
            ..Default::default()
        };
        assert_eq!(opts.bake_config().unwrap().lo_resolution, 128);
    }

    #[test]
    fn flags_override_file_values() {
        let file = BakeOptions::from_config_text(
            "# ablation\nsteps = 50\nlambda_uv=0\nsource=remote:http://h:1\ncheckerboard=true\n",
            Path::new("c.txt"),
        )
        .unwrap();
        let flags = BakeOptions {
            steps: Some(7),
            ..Default::default()
        };
        let merged = flags.or(file);
        assert_eq!(merged.steps, Some(7));
        assert_eq!(merged.lambda_uv, Some(0.0));
        assert_eq!(merged.source.as_deref(), Some("remote:http://h:1"));
        assert!(merged.checkerboard);
        let pairs = merged.pairs();
        assert!(pairs.contains(&("steps".into(), "7".into())));
        assert!(pairs.contains(&("source".into(), "remote:http://h:1".into())));
    }

    #[test]
    fn echoed_pairs_reparse_to_the_same_options() {
        let opts = BakeOptions {
            mesh: Some("m.obj".into()),
            hi: Some(256),
            threshold_deg: Some(36.0),
            prompt: Some("a mug".into()),
            literal_angle: true,
            ..Default::default()
        };
        let text: String = opts.pairs().iter().map(|(k, v)| format!("{k}={v}\n")).collect();
        let back = BakeOptions::from_config_text(&text, Path::new("echo")).unwrap();
        assert_eq!(back.pairs(), opts.pairs());
        assert_eq!(back.bake_config().unwrap(), opts.bake_config().unwrap());
    }

    #[test]
    fn bad_config_lines_are_rejected() {
        let p = Path::new("c.txt");
        assert!(BakeOptions::from_config_text("colour=red", p).unwrap_err().contains("unknown key"));
        assert!(BakeOptions::from_config_text("steps", p).unwrap_err().contains("c.txt:1"));
        assert!(BakeOptions::from_config_text("steps=many", p).is_err());
        assert!(BakeOptions::from_config_text("checkerboard=maybe", p).is_err());
    }

    #[test]
    fn inconsistent_resolutions_fail() {
        let opts = BakeOptions {
            hi: Some(1000),
            lo: Some(300),
            ..Default::default()
        };
        assert!(opts.bake_config().unwrap_err().contains("divide"));
    }
}
