use std::path::Path;

use crate::error::{Error, Result};

/// Pipeline parameters. Defaults follow the reference operating point:
/// 32x32 templates, 5x5 normal-estimation window, depth threshold 20 m,
/// fusion weights alpha 0.4 / beta 0.1, fusion gate 0.5, jump step 5 px
/// and activation threshold 0.75.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    /// Half-binary intensity threshold; pixels below it are zeroed.
    pub tau_c: u16,
    /// Template side length in pixels.
    pub template_size: usize,
    /// Normal-estimation window side (odd).
    pub fals_window: usize,
    /// Depth threshold separating the two geometric-map branches (meters).
    pub t_d: f64,
    /// Weight of the normal-alignment term in the geometric map.
    pub alpha: f64,
    /// Weight of the depth/row term in the geometric map.
    pub beta: f64,
    /// Matching score above which the geometric map is fused in.
    pub tau_g: f64,
    /// Sliding-box jump step in pixels.
    pub jump_step: u32,
    /// Respond-value threshold for peak regions and box subsets.
    pub p_pca: f64,
    /// Lower clamp applied to raw correlation scores.
    pub ncc_floor: f64,
    /// Initial left-template stripe angle in degrees; the right template
    /// mirrors it. Adapted per frame by the enhancement feedback.
    pub theta_left_deg: f64,
    /// Template stripe width in pixels.
    pub stripe_width: usize,
    /// Use z-depth instead of Euclidean range in the normal-estimation loss.
    pub fals_z_depth: bool,
    /// Evaluation: max pixel distance from a chain center to ground truth.
    pub tol_px: f64,
    /// Evaluation: max angle between fitted and ground-truth plane normals.
    pub tol_deg: f64,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            tau_c: 160,
            template_size: 32,
            fals_window: 5,
            t_d: 20.0,
            alpha: 0.4,
            beta: 0.1,
            tau_g: 0.5,
            jump_step: 5,
            p_pca: 0.75,
            ncc_floor: 0.0,
            theta_left_deg: 110.0,
            stripe_width: 8,
            fals_z_depth: false,
            tol_px: 5.0,
            tol_deg: 5.0,
        }
    }
}

impl Config {
    /// Parse a `key = value` config file; `#` starts a comment, missing keys
    /// keep their defaults, unknown keys are rejected.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())?;
        Self::from_str_content(&text)
    }

    pub fn from_str_content(text: &str) -> Result<Self> {
        let mut cfg = Config::default();
        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = match raw.find('#') {
                Some(p) => &raw[..p],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::config("expected `key = value`", lineno))?;
            let (key, value) = (key.trim(), value.trim());

            fn num<T: std::str::FromStr>(v: &str, key: &str, line: usize) -> Result<T> {
                v.parse()
                    .map_err(|_| Error::config(format!("unparsable value `{v}` for {key}"), line))
            }

            match key {
                "tauC" => cfg.tau_c = num(value, key, lineno)?,
                "templateSize" => cfg.template_size = num(value, key, lineno)?,
                "falsWindow" => cfg.fals_window = num(value, key, lineno)?,
                "tD" => cfg.t_d = num(value, key, lineno)?,
                "alpha" => cfg.alpha = num(value, key, lineno)?,
                "beta" => cfg.beta = num(value, key, lineno)?,
                "tauG" => cfg.tau_g = num(value, key, lineno)?,
                "r" => cfg.jump_step = num(value, key, lineno)?,
                "pPca" => cfg.p_pca = num(value, key, lineno)?,
                "nccFloor" => cfg.ncc_floor = num(value, key, lineno)?,
                "thetaLeftDeg" => cfg.theta_left_deg = num(value, key, lineno)?,
                "stripeWidth" => cfg.stripe_width = num(value, key, lineno)?,
                "falsZDepth" => cfg.fals_z_depth = num(value, key, lineno)?,
                "tolPx" => cfg.tol_px = num(value, key, lineno)?,
                "tolDeg" => cfg.tol_deg = num(value, key, lineno)?,
                _ => return Err(Error::config(format!("unknown key `{key}`"), lineno)),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, msg: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::config_global(msg))
            }
        };
        check(
            [self.t_d, self.alpha, self.beta, self.tau_g, self.p_pca, self.ncc_floor]
                .iter()
                .all(|v| v.is_finite()),
            "all thresholds must be finite",
        )?;
        check(self.t_d > 0.0, "tD must be positive")?;
        check(
            self.alpha >= 0.0 && self.beta >= 0.0 && self.alpha + self.beta <= 1.0,
            "alpha + beta must not exceed 1",
        )?;
        check(self.tau_g > 0.0 && self.tau_g < 1.0, "tauG must lie in (0, 1)")?;
        check(self.p_pca > 0.0 && self.p_pca < 1.0, "pPca must lie in (0, 1)")?;
        check(self.template_size >= 8, "templateSize must be at least 8")?;
        check(
            self.fals_window >= 3 && self.fals_window % 2 == 1,
            "falsWindow must be odd and at least 3",
        )?;
        check(self.jump_step >= 1, "r must be at least 1")?;
        check(
            self.stripe_width > 0 && self.stripe_width < self.template_size,
            "stripeWidth must lie in (0, templateSize)",
        )?;
        check(
            self.theta_left_deg > 0.0 && self.theta_left_deg < 180.0,
            "thetaLeftDeg must lie in (0, 180)",
        )?;
        check(self.tol_px > 0.0 && self.tol_deg > 0.0, "tolerances must be positive")?;
        Ok(())
    }

    /// Initial left-template angle in radians.
    pub fn theta_left(&self) -> f64 {
        self.theta_left_deg.to_radians()
    }
}
