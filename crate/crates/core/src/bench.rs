//! Synthetic benchmark: standard rig and scenes, and a runner comparing the three
//! estimators (raw and post-processed) over jitter levels.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::baselines::{mc3d_disparity, sgm_estimate, Mc3dConfig, SgmConfig};
use crate::error::Result;
use crate::esl::{estimate_depth, EslConfig};
use crate::geometry::{PinholeIntrinsics, Point3, ScanTiming, ScenePrimitive, StepSide, StereoRig};
use crate::grid::DepthMap;
use crate::metrics::{fill_rate, rmse, DEFAULT_FILL_THRESHOLD};
use crate::postproc::{postprocess, PostprocConfig};
use crate::scalar::Scalar;
use crate::simulator::{
    illuminated_ground_truth, matching_time_maps, simulate_scan, NoiseConfig, SimScene,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Esl,
    Mc3d,
    Sgm,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Esl, Method::Mc3d, Method::Sgm];

    pub fn name(self) -> &'static str {
        match self {
            Method::Esl => "esl",
            Method::Mc3d => "mc3d",
            Method::Sgm => "sgm",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SceneKind {
    Plane,
    SlantedPlane,
    Sphere,
    Step,
    /// Step with the near plane on the camera side, hiding lit far-plane points.
    OccludingStep,
    SphereOnBackdrop,
}

impl SceneKind {
    pub const ALL: [SceneKind; 4] = [
        SceneKind::Plane,
        SceneKind::SlantedPlane,
        SceneKind::Sphere,
        SceneKind::Step,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SceneKind::Plane => "plane",
            SceneKind::SlantedPlane => "slanted",
            SceneKind::Sphere => "sphere",
            SceneKind::Step => "step",
            SceneKind::OccludingStep => "step-occluding",
            SceneKind::SphereOnBackdrop => "sphere-backdrop",
        }
    }
}

/// Bench scan frequency, Hz: one projector column every 5.1 µs.
pub const BENCH_FREQUENCY: f64 = 1400.0;

/// 320×240 camera with a 600 px focal length and its principal point left of center.
/// The projector, 11 cm to the right, has the same focal length but a smaller 140×200
/// image, so around 0.5 m its light falls well inside the camera frame.
pub fn standard_rig<T: Scalar>() -> (StereoRig<T>, ScanTiming<T>) {
    rig_with_frequency(T::lit(BENCH_FREQUENCY))
}

pub fn rig_with_frequency<T: Scalar>(frequency: T) -> (StereoRig<T>, ScanTiming<T>) {
    let lit = T::lit;
    let camera = PinholeIntrinsics {
        fx: lit(600.0),
        fy: lit(600.0),
        cx: lit(90.0),
        cy: lit(120.0),
        width: 320,
        height: 240,
    };
    let projector = PinholeIntrinsics {
        fx: lit(600.0),
        fy: lit(600.0),
        cx: lit(70.0),
        cy: lit(100.0),
        width: 140,
        height: 200,
    };
    let rig = StereoRig {
        camera,
        projector,
        baseline: lit(0.11),
        rectified: true,
    };
    let timing = ScanTiming {
        frequency,
        lines: projector.width,
        pixels_per_line: projector.height,
        t0: T::zero(),
    };
    (rig, timing)
}

pub fn standard_primitives<T: Scalar>(kind: SceneKind) -> Vec<ScenePrimitive<T>> {
    let lit = T::lit;
    match kind {
        SceneKind::Plane => vec![ScenePrimitive::FrontoPlane { depth: lit(0.49) }],
        SceneKind::SlantedPlane => vec![ScenePrimitive::slanted_plane(
            Point3::new(lit(0.3), lit(0.15), lit(1.0)),
            lit(0.5),
        )],
        SceneKind::Sphere => vec![ScenePrimitive::Sphere {
            center: Point3::new(lit(0.11), T::zero(), lit(0.7)),
            radius: lit(0.2),
        }],
        SceneKind::Step => vec![ScenePrimitive::StepEdge {
            near: lit(0.45),
            far: lit(0.54),
            split_column: lit(225.5),
            near_side: StepSide::Right,
        }],
        SceneKind::OccludingStep => vec![ScenePrimitive::StepEdge {
            near: lit(0.45),
            far: lit(0.54),
            split_column: lit(225.5),
            near_side: StepSide::Left,
        }],
        SceneKind::SphereOnBackdrop => vec![
            ScenePrimitive::Sphere {
                center: Point3::new(lit(0.11), T::zero(), lit(0.52)),
                radius: lit(0.07),
            },
            ScenePrimitive::FrontoPlane { depth: lit(0.6) },
        ],
    }
}

pub fn standard_scene<T: Scalar>(kind: SceneKind) -> SimScene<T> {
    let (rig, timing) = standard_rig();
    SimScene {
        primitives: standard_primitives(kind),
        rig,
        timing,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig<T> {
    pub esl: EslConfig<T>,
    pub sgm: SgmConfig<T>,
    pub postproc: PostprocConfig<T>,
    /// Noise applied to every run; its `jitter_sigma` is replaced by each sweep level.
    pub noise: NoiseConfig<T>,
    pub jitter_levels: Vec<T>,
    pub fill_threshold: T,
}

impl<T: Scalar> Default for BenchConfig<T> {
    fn default() -> Self {
        BenchConfig {
            esl: EslConfig {
                window: 7,
                disparity_min: 100,
                disparity_max: 180,
                ..EslConfig::default()
            },
            sgm: SgmConfig {
                disparity_min: 100,
                disparity_max: 180,
                ..SgmConfig::default()
            },
            postproc: PostprocConfig::default(),
            noise: NoiseConfig {
                latency: T::lit(15.0),
                seed: 7,
                ..NoiseConfig::default()
            },
            jitter_levels: vec![T::zero(), T::lit(2.0), T::lit(8.0)],
            fill_threshold: T::lit(DEFAULT_FILL_THRESHOLD),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow<T> {
    pub scene: String,
    pub method: Method,
    pub jitter: T,
    pub processed: bool,
    pub fill_rate: T,
    pub rmse_cm: Option<T>,
}

/// Raw depth maps of all three estimators on one simulated pass.
pub fn estimate_all<T: Scalar>(
    scene: &SimScene<T>,
    noise: &NoiseConfig<T>,
    esl: &EslConfig<T>,
    sgm: &SgmConfig<T>,
) -> Result<Vec<(Method, DepthMap<T>)>> {
    let stream = simulate_scan(scene, noise, 0)?;
    let (tau_c, tau_p) = matching_time_maps(scene, &stream, noise.latency)?;
    let mc3d_cfg = Mc3dConfig {
        latency_est: noise.latency,
    };
    let rig = &scene.rig;
    let esl_depth = estimate_depth(&tau_c, &tau_p, rig, esl)?;
    let mc3d_depth =
        mc3d_disparity(&tau_c, &scene.timing, rig, &mc3d_cfg)?.map(|d| rig.depth_from_disparity(d));
    let sgm_depth = sgm_estimate(&tau_c, &tau_p, rig, sgm)?;
    Ok(vec![
        (Method::Esl, esl_depth),
        (Method::Mc3d, mc3d_depth),
        (Method::Sgm, sgm_depth),
    ])
}

/// Evaluates every method, raw and post-processed, on one scene at every jitter level.
pub fn run_scene<T: Scalar>(
    name: &str,
    scene: &SimScene<T>,
    cfg: &BenchConfig<T>,
) -> Result<Vec<BenchRow<T>>> {
    let gt = illuminated_ground_truth(scene);
    let per_level: Vec<Vec<BenchRow<T>>> = cfg
        .jitter_levels
        .par_iter()
        .map(|&jitter| {
            let noise = NoiseConfig {
                jitter_sigma: jitter,
                ..cfg.noise
            };
            let mut rows = Vec::new();
            for (method, raw) in estimate_all(scene, &noise, &cfg.esl, &cfg.sgm)? {
                let processed = postprocess(&raw, &cfg.postproc)?;
                for (is_proc, map) in [(false, &raw), (true, &processed)] {
                    rows.push(BenchRow {
                        scene: name.to_string(),
                        method,
                        jitter,
                        processed: is_proc,
                        fill_rate: fill_rate(map, &gt, cfg.fill_threshold).unwrap_or(T::zero()),
                        rmse_cm: rmse(map, &gt).ok(),
                    });
                }
            }
            Ok(rows)
        })
        .collect::<Result<_>>()?;
    Ok(per_level.into_iter().flatten().collect())
}

pub fn run_bench<T: Scalar>(cfg: &BenchConfig<T>) -> Result<Vec<BenchRow<T>>> {
    let mut rows = Vec::new();
    for kind in SceneKind::ALL {
        rows.extend(run_scene(kind.name(), &standard_scene(kind), cfg)?);
    }
    Ok(rows)
}

/// Tab-separated table: scene, method, jitter, processing flag, fill rate, RMSE (cm).
pub fn format_tsv<T: Scalar>(rows: &[BenchRow<T>]) -> String {
    let mut out = String::from("scene\tmethod\tjitter_us\tproc\tFR\tRMSE_cm\n");
    for r in rows {
        let rmse = r
            .rmse_cm
            .map_or_else(|| "nan".to_string(), |v| format!("{:.4}", v.to_f64_lossy()));
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{:.4}\t{}",
            r.scene,
            r.method.name(),
            r.jitter,
            if r.processed { "proc" } else { "raw" },
            r.fill_rate.to_f64_lossy(),
            rmse
        );
    }
    out
}
