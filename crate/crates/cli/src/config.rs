//! TOML run configuration.
//!
//! Every section is optional and falls back to the bench defaults, so an empty file
//! describes the standard fronto-plane experiment.

use serde::{Deserialize, Serialize};

use esl_core::bench::{self, SceneKind};
use esl_core::{
    EslConfig, Mc3dConfig, NoiseConfig, PinholeIntrinsics, Point3, PostprocConfig, ScanTiming,
    ScenePrimitive, SgmConfig, SimScene, StepSide, StereoRig, TvParams,
};

use crate::error::CliError;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub rig: RigSection,
    pub timing: TimingSection,
    pub scene: SceneSection,
    pub noise: NoiseSection,
    pub esl: EslSection,
    pub sgm: SgmSection,
    pub mc3d: Mc3dSection,
    pub postproc: PostprocSection,
    pub run: RunSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Intrinsics {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: usize,
    pub height: usize,
}

impl From<PinholeIntrinsics<f64>> for Intrinsics {
    fn from(p: PinholeIntrinsics<f64>) -> Self {
        Intrinsics {
            fx: p.fx,
            fy: p.fy,
            cx: p.cx,
            cy: p.cy,
            width: p.width,
            height: p.height,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RigSection {
    pub camera: Intrinsics,
    pub projector: Intrinsics,
    /// Meters.
    pub baseline: f64,
}

impl Default for RigSection {
    fn default() -> Self {
        let (rig, _) = bench::standard_rig::<f64>();
        RigSection {
            camera: rig.camera.into(),
            projector: rig.projector.into(),
            baseline: rig.baseline,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimingSection {
    /// Hz.
    pub frequency: f64,
    pub lines: usize,
    pub pixels_per_line: usize,
    /// µs.
    pub t0: f64,
}

impl Default for TimingSection {
    fn default() -> Self {
        let (_, t) = bench::standard_rig::<f64>();
        TimingSection {
            frequency: t.frequency,
            lines: t.lines,
            pixels_per_line: t.pixels_per_line,
            t0: t.t0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Primitive {
    FrontoPlane {
        depth: f64,
    },
    /// Plane through the optical axis at `center_depth` with the given (unnormalized)
    /// normal.
    SlantedPlane {
        normal: [f64; 3],
        center_depth: f64,
    },
    Sphere {
        center: [f64; 3],
        radius: f64,
    },
    StepEdge {
        near: f64,
        far: f64,
        split_column: f64,
        near_side: Side,
    },
}

impl Primitive {
    fn to_core(self) -> ScenePrimitive<f64> {
        match self {
            Primitive::FrontoPlane { depth } => ScenePrimitive::FrontoPlane { depth },
            Primitive::SlantedPlane {
                normal,
                center_depth,
            } => ScenePrimitive::slanted_plane(
                Point3::new(normal[0], normal[1], normal[2]),
                center_depth,
            ),
            Primitive::Sphere { center, radius } => ScenePrimitive::Sphere {
                center: Point3::new(center[0], center[1], center[2]),
                radius,
            },
            Primitive::StepEdge {
                near,
                far,
                split_column,
                near_side,
            } => ScenePrimitive::StepEdge {
                near,
                far,
                split_column,
                near_side: match near_side {
                    Side::Left => StepSide::Left,
                    Side::Right => StepSide::Right,
                },
            },
        }
    }

    fn from_core(p: ScenePrimitive<f64>) -> Self {
        match p {
            ScenePrimitive::FrontoPlane { depth } => Primitive::FrontoPlane { depth },
            ScenePrimitive::SlantedPlane { normal, offset } => Primitive::SlantedPlane {
                normal: [normal.x, normal.y, normal.z],
                center_depth: offset / normal.z,
            },
            ScenePrimitive::Sphere { center, radius } => Primitive::Sphere {
                center: [center.x, center.y, center.z],
                radius,
            },
            ScenePrimitive::StepEdge {
                near,
                far,
                split_column,
                near_side,
            } => Primitive::StepEdge {
                near,
                far,
                split_column,
                near_side: match near_side {
                    StepSide::Left => Side::Left,
                    StepSide::Right => Side::Right,
                },
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneSection {
    /// Label used in evaluation tables.
    pub name: String,
    pub primitives: Vec<Primitive>,
}

impl Default for SceneSection {
    fn default() -> Self {
        SceneSection::standard(SceneKind::Plane)
    }
}

impl SceneSection {
    pub fn standard(kind: SceneKind) -> Self {
        SceneSection {
            name: kind.name().to_string(),
            primitives: bench::standard_primitives::<f64>(kind)
                .into_iter()
                .map(Primitive::from_core)
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseSection {
    /// µs.
    pub jitter_sigma: f64,
    /// µs.
    pub latency: f64,
    pub burst_group: usize,
    pub dropout_prob: f64,
    pub seed: u64,
}

impl Default for NoiseSection {
    fn default() -> Self {
        let n = bench::BenchConfig::<f64>::default().noise;
        NoiseSection {
            jitter_sigma: 2.0,
            latency: n.latency,
            burst_group: n.burst_group,
            dropout_prob: n.dropout_prob,
            seed: n.seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EslSection {
    pub window: usize,
    pub disparity_min: usize,
    pub disparity_max: usize,
    pub min_valid_fraction: f64,
    pub subpixel: bool,
    /// TV weight (m) for the optional regularization step; absent disables it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tv_lambda: Option<f64>,
    pub tv_iterations: usize,
    /// Search only the point-wise estimate ± this many pixels; absent searches the
    /// full range.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed_radius: Option<usize>,
}

impl Default for EslSection {
    fn default() -> Self {
        let e = bench::BenchConfig::<f64>::default().esl;
        EslSection {
            window: e.window,
            disparity_min: e.disparity_min,
            disparity_max: e.disparity_max,
            min_valid_fraction: e.min_valid_fraction,
            subpixel: e.subpixel,
            tv_lambda: None,
            tv_iterations: 100,
            seed_radius: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SgmSection {
    /// µs.
    pub p1: f64,
    /// µs.
    pub p2: f64,
    pub directions: usize,
    pub disparity_min: usize,
    pub disparity_max: usize,
}

impl Default for SgmSection {
    fn default() -> Self {
        let s = bench::BenchConfig::<f64>::default().sgm;
        SgmSection {
            p1: s.p1,
            p2: s.p2,
            directions: s.directions,
            disparity_min: s.disparity_min,
            disparity_max: s.disparity_max,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Mc3dSection {
    /// µs; absent means "same as the simulated latency".
    #[serde(skip_serializing_if = "Option::is_none")]
    pub latency_est: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PostprocSection {
    pub median: bool,
    pub median_kernel: usize,
    pub inpaint: bool,
    pub max_hole_radius: usize,
    pub tv: bool,
    pub tv_lambda: f64,
    pub tv_iterations: usize,
}

impl Default for PostprocSection {
    fn default() -> Self {
        let tv = TvParams::<f64>::default();
        PostprocSection {
            median: true,
            median_kernel: 5,
            inpaint: true,
            max_hole_radius: 4,
            tv: true,
            tv_lambda: tv.lambda,
            tv_iterations: tv.iterations,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum MethodChoice {
    Esl,
    Mc3d,
    Sgm,
}

impl MethodChoice {
    pub fn name(self) -> &'static str {
        match self {
            MethodChoice::Esl => "esl",
            MethodChoice::Mc3d => "mc3d",
            MethodChoice::Sgm => "sgm",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    pub method: MethodChoice,
    pub output_dir: String,
    /// Jitter levels (µs) swept by `bench`.
    pub jitter_levels: Vec<f64>,
    /// Fill-rate tolerance as a fraction of mean reference depth.
    pub fill_threshold: f64,
}

impl Default for RunSection {
    fn default() -> Self {
        let b = bench::BenchConfig::<f64>::default();
        RunSection {
            method: MethodChoice::Esl,
            output_dir: ".".into(),
            jitter_levels: b.jitter_levels,
            fill_threshold: b.fill_threshold,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| CliError::Parse(e.to_string()))?;
        let cfg: RunConfig = table
            .try_into()
            .map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Checks every section by building the corresponding library values.
    pub fn validate(&self) -> Result<(), CliError> {
        let scene = self.scene()?;
        let width = scene.rig.camera.width;
        self.noise().validate()?;
        self.esl().validate(width)?;
        self.sgm().validate(width)?;
        let p = &self.postproc;
        if p.median && (p.median_kernel < 3 || p.median_kernel.is_multiple_of(2)) {
            return Err(CliError::Config(format!(
                "postproc.median_kernel must be odd and >= 3, got {}",
                p.median_kernel
            )));
        }
        if p.tv && (!(p.tv_lambda > 0.0) || p.tv_iterations == 0) {
            return Err(CliError::Config(
                "postproc TV needs tv_lambda > 0 and tv_iterations >= 1".into(),
            ));
        }
        if !(self.run.fill_threshold > 0.0) {
            return Err(CliError::Config(
                "run.fill_threshold must be positive".into(),
            ));
        }
        if self.run.jitter_levels.iter().any(|j| !(*j >= 0.0)) {
            return Err(CliError::Config("run.jitter_levels must be >= 0".into()));
        }
        Ok(())
    }

    pub fn rig(&self) -> Result<StereoRig<f64>, CliError> {
        let conv =
            |i: Intrinsics| PinholeIntrinsics::new(i.fx, i.fy, i.cx, i.cy, i.width, i.height);
        Ok(StereoRig::new(
            conv(self.rig.camera)?,
            conv(self.rig.projector)?,
            self.rig.baseline,
        )?)
    }

    pub fn timing(&self) -> Result<ScanTiming<f64>, CliError> {
        let t = &self.timing;
        Ok(ScanTiming::new(
            t.frequency,
            t.lines,
            t.pixels_per_line,
            t.t0,
        )?)
    }

    pub fn scene(&self) -> Result<SimScene<f64>, CliError> {
        let primitives = self.scene.primitives.iter().map(|p| p.to_core()).collect();
        Ok(SimScene::new(primitives, self.rig()?, self.timing()?)?)
    }

    pub fn noise(&self) -> NoiseConfig<f64> {
        let n = &self.noise;
        NoiseConfig {
            jitter_sigma: n.jitter_sigma,
            latency: n.latency,
            burst_group: n.burst_group,
            dropout_prob: n.dropout_prob,
            seed: n.seed,
        }
    }

    pub fn esl(&self) -> EslConfig<f64> {
        let e = &self.esl;
        EslConfig {
            window: e.window,
            disparity_min: e.disparity_min,
            disparity_max: e.disparity_max,
            min_valid_fraction: e.min_valid_fraction,
            subpixel: e.subpixel,
            tv_refine: e.tv_lambda.map(|lambda| TvParams {
                lambda,
                iterations: e.tv_iterations,
            }),
        }
    }

    pub fn sgm(&self) -> SgmConfig<f64> {
        let s = &self.sgm;
        SgmConfig {
            p1: s.p1,
            p2: s.p2,
            directions: s.directions,
            disparity_min: s.disparity_min,
            disparity_max: s.disparity_max,
        }
    }

    pub fn mc3d(&self) -> Mc3dConfig<f64> {
        Mc3dConfig {
            latency_est: self.latency_est(),
        }
    }

    pub fn latency_est(&self) -> f64 {
        self.mc3d.latency_est.unwrap_or(self.noise.latency)
    }

    pub fn postproc(&self) -> PostprocConfig<f64> {
        let p = &self.postproc;
        PostprocConfig {
            median_kernel: p.median.then_some(p.median_kernel),
            max_hole_radius: p.inpaint.then_some(p.max_hole_radius),
            tv: p.tv.then_some(TvParams {
                lambda: p.tv_lambda,
                iterations: p.tv_iterations,
            }),
        }
    }

    pub fn bench(&self) -> bench::BenchConfig<f64> {
        bench::BenchConfig {
            esl: self.esl(),
            sgm: self.sgm(),
            postproc: self.postproc(),
            noise: self.noise(),
            jitter_levels: self.run.jitter_levels.clone(),
            fill_threshold: self.run.fill_threshold,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let cfg = RunConfig::from_toml("").unwrap();
        assert_eq!(cfg, RunConfig::default());
    }

    #[test]
    fn round_trip_is_fixed_point() {
        let mut cfg = RunConfig::default();
        cfg.esl.tv_lambda = Some(0.01);
        cfg.scene = SceneSection::standard(SceneKind::Step);
        let text = cfg.to_toml();
        let back = RunConfig::from_toml(&text).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.to_toml(), text);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(matches!(
            RunConfig::from_toml("[esl]\nwindoww = 5\n"),
            Err(CliError::Config(_))
        ));
        assert!(matches!(
            RunConfig::from_toml("[bogus]\n"),
            Err(CliError::Config(_))
        ));
    }

    #[test]
    fn syntax_errors_are_parse_errors() {
        assert!(matches!(
            RunConfig::from_toml("[esl\nwindow = 5\n"),
            Err(CliError::Parse(_))
        ));
    }

    #[test]
    fn invalid_values_rejected() {
        assert!(RunConfig::from_toml("[esl]\nwindow = 4\n").is_err());
        assert!(RunConfig::from_toml(
            "[timing]\nfrequency = 1400.0\nlines = 10\npixels_per_line = 200\nt0 = 0.0\n"
        )
        .is_err());
    }
}
