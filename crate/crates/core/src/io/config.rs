//! TOML configuration files: the simulator scene description and the
//! pipeline run configuration.

use super::FormatError;
use crate::f2f::F2fConfig;
use crate::losses::LossWeights;
use crate::scale::ScaleAlignConfig;
use crate::se3::CameraIntrinsics;
use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntrinsicsConfig {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: usize,
    pub height: usize,
}

impl IntrinsicsConfig {
    pub fn build(&self) -> Result<CameraIntrinsics, FormatError> {
        CameraIntrinsics::new(self.fx, self.fy, self.cx, self.cy, self.width, self.height)
            .map_err(|e| FormatError::Invalid(e.to_string()))
    }
}

/// Scene description consumed by the `simulate` command.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFileConfig {
    pub seed: u64,
    /// Number of frames; frames - 1 pairs are generated.
    pub frames: usize,
    #[serde(default = "default_matches_per_pair")]
    pub matches_per_pair: usize,
    #[serde(default = "default_depth_min")]
    pub depth_min: f64,
    #[serde(default = "default_depth_max")]
    pub depth_max: f64,
    /// Per-frame turn magnitude bound (degrees).
    #[serde(default = "default_turn_deg")]
    pub max_turn_deg: f64,
    /// Mean forward translation per frame (meters).
    #[serde(default = "default_forward_step")]
    pub forward_step: f64,
    #[serde(default)]
    pub pixel_noise_sigma: f64,
    #[serde(default)]
    pub outlier_fraction: f64,
    #[serde(default)]
    pub pure_rotation: bool,
    /// Rotation noise (degrees/frame) applied to the emitted predicted poses.
    #[serde(default = "default_pred_rot_noise")]
    pub pred_rotation_noise_deg: f64,
    /// Relative translation noise applied to the emitted predicted poses.
    #[serde(default = "default_pred_trans_noise")]
    pub pred_translation_noise: f64,
    /// Also emit per-frame splat depth maps.
    #[serde(default)]
    pub emit_depth: bool,
    pub intrinsics: IntrinsicsConfig,
}

fn default_matches_per_pair() -> usize {
    200
}
fn default_depth_min() -> f64 {
    4.0
}
fn default_depth_max() -> f64 {
    30.0
}
fn default_turn_deg() -> f64 {
    1.5
}
fn default_forward_step() -> f64 {
    1.0
}
fn default_pred_rot_noise() -> f64 {
    0.5
}
fn default_pred_trans_noise() -> f64 {
    0.01
}

pub fn parse_scene_config(text: &str) -> Result<SceneFileConfig, FormatError> {
    let cfg: SceneFileConfig =
        toml::from_str(text).map_err(|e| FormatError::Invalid(e.to_string()))?;
    if cfg.frames < 2 {
        return Err(FormatError::Invalid("need at least 2 frames".into()));
    }
    if !(cfg.depth_min > 0.0 && cfg.depth_max > cfg.depth_min) {
        return Err(FormatError::Invalid(format!(
            "depth range ({}, {}) must satisfy 0 < min < max",
            cfg.depth_min, cfg.depth_max
        )));
    }
    if !(0.0..1.0).contains(&cfg.outlier_fraction) {
        return Err(FormatError::Invalid(
            "outlier_fraction must be in [0, 1)".into(),
        ));
    }
    cfg.intrinsics.build()?;
    Ok(cfg)
}

/// Aggregated pipeline settings: intrinsics, solver initialization, solver
/// and scale-alignment parameters, and the loss weights.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub intrinsics: CameraIntrinsics,
    pub init: InitChoice,
    pub f2f: F2fConfig,
    pub scale: ScaleAlignConfig,
    pub weights: LossWeights,
}

/// Initialization selector, file-format level (the prior rotations come from
/// a pose file resolved by the caller).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitChoice {
    Identity,
    Constant,
    Prior,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunConfigFile {
    intrinsics: IntrinsicsConfig,
    #[serde(default)]
    init: Option<InitChoice>,
    #[serde(default)]
    f2f: Option<F2fConfigFile>,
    #[serde(default)]
    scale: Option<ScaleConfigFile>,
    #[serde(default)]
    weights: Option<WeightsFile>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct F2fConfigFile {
    max_iterations: Option<usize>,
    param_tol: Option<f64>,
    objective_tol: Option<f64>,
    damping_init: Option<f64>,
    damping_up: Option<f64>,
    damping_down: Option<f64>,
    fd_step: Option<f64>,
    confidence_threshold: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScaleConfigFile {
    rounds: Option<usize>,
    sample_fraction: Option<f64>,
    inlier_threshold: Option<f64>,
    cheirality_min_fraction: Option<f64>,
    delta_max: Option<f64>,
    seed: Option<u64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightsFile {
    smoothness: Option<f64>,
    depth_consistency: Option<f64>,
    rotation: Option<f64>,
}

pub fn parse_run_config(text: &str) -> Result<RunConfig, FormatError> {
    let file: RunConfigFile =
        toml::from_str(text).map_err(|e| FormatError::Invalid(e.to_string()))?;

    let mut f2f = F2fConfig::default();
    if let Some(f) = file.f2f {
        if let Some(v) = f.max_iterations {
            f2f.max_iterations = v;
        }
        if let Some(v) = f.param_tol {
            f2f.param_tol = v;
        }
        if let Some(v) = f.objective_tol {
            f2f.objective_tol = v;
        }
        if let Some(v) = f.damping_init {
            f2f.damping_init = v;
        }
        if let Some(v) = f.damping_up {
            f2f.damping_up = v;
        }
        if let Some(v) = f.damping_down {
            f2f.damping_down = v;
        }
        if let Some(v) = f.fd_step {
            f2f.fd_step = v;
        }
        if let Some(v) = f.confidence_threshold {
            f2f.confidence_threshold = v;
        }
    }
    f2f.validate()
        .map_err(|e| FormatError::Invalid(e.to_string()))?;

    let mut scale = ScaleAlignConfig::default();
    if let Some(s) = file.scale {
        if let Some(v) = s.rounds {
            scale.rounds = v;
        }
        if let Some(v) = s.sample_fraction {
            scale.sample_fraction = v;
        }
        if let Some(v) = s.inlier_threshold {
            scale.inlier_threshold = v;
        }
        if let Some(v) = s.cheirality_min_fraction {
            scale.cheirality_min_fraction = v;
        }
        if let Some(v) = s.delta_max {
            scale.delta_max = v;
        }
        if let Some(v) = s.seed {
            scale.seed = v;
        }
    }
    scale
        .validate()
        .map_err(|e| FormatError::Invalid(e.to_string()))?;

    let mut weights = LossWeights::default();
    if let Some(w) = file.weights {
        if let Some(v) = w.smoothness {
            weights.smoothness = v;
        }
        if let Some(v) = w.depth_consistency {
            weights.depth_consistency = v;
        }
        if let Some(v) = w.rotation {
            weights.rotation = v;
        }
    }
    if weights.smoothness < 0.0 || weights.depth_consistency < 0.0 || weights.rotation < 0.0 {
        return Err(FormatError::Invalid("loss weights must be non-negative".into()));
    }

    Ok(RunConfig {
        intrinsics: file.intrinsics.build()?,
        init: file.init.unwrap_or(InitChoice::Identity),
        f2f,
        scale,
        weights,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SCENE: &str = r#"
seed = 7
frames = 20
matches_per_pair = 120
[intrinsics]
fx = 500.0
fy = 500.0
cx = 320.0
cy = 240.0
width = 640
height = 480
"#;

    #[test]
    fn scene_config_parses_with_defaults() {
        let cfg = parse_scene_config(SCENE).unwrap();
        assert_eq!(cfg.frames, 20);
        assert_eq!(cfg.matches_per_pair, 120);
        assert_eq!(cfg.depth_min, 4.0);
        assert!(!cfg.emit_depth);
    }

    #[test]
    fn scene_config_validates() {
        assert!(parse_scene_config("").is_err());
        let bad = SCENE.replace("frames = 20", "frames = 1");
        assert!(parse_scene_config(&bad).is_err());
        let unknown = format!("{SCENE}\nbogus_field = 1\n");
        assert!(parse_scene_config(&unknown).is_err());
    }

    #[test]
    fn run_config_defaults() {
        let text = r#"
[intrinsics]
fx = 500.0
fy = 500.0
cx = 320.0
cy = 240.0
width = 640
height = 480
"#;
        let cfg = parse_run_config(text).unwrap();
        assert_eq!(cfg.init, InitChoice::Identity);
        assert_eq!(cfg.f2f.confidence_threshold, 0.9);
        assert_eq!(cfg.scale.rounds, 10);
        assert_eq!(cfg.weights.smoothness, 1e-3);
        assert_eq!(cfg.weights.depth_consistency, 0.5);
        assert_eq!(cfg.weights.rotation, 1.0);
    }

    #[test]
    fn run_config_overrides() {
        let text = r#"
init = "prior"
[intrinsics]
fx = 500.0
fy = 500.0
cx = 320.0
cy = 240.0
width = 640
height = 480
[f2f]
confidence_threshold = 0.5
[weights]
smoothness = 0.01
"#;
        let cfg = parse_run_config(text).unwrap();
        assert_eq!(cfg.init, InitChoice::Prior);
        assert_eq!(cfg.f2f.confidence_threshold, 0.5);
        assert_eq!(cfg.weights.smoothness, 0.01);
    }

    #[test]
    fn run_config_rejects_bad_values() {
        let text = r#"
[intrinsics]
fx = -1.0
fy = 500.0
cx = 320.0
cy = 240.0
width = 640
height = 480
"#;
        assert!(parse_run_config(text).is_err());
    }
}
