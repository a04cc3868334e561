use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use esl_core::bench::{self, SceneKind};
use esl_core::pfm::{read_pfm, write_pfm};
use esl_core::simulator::illuminated_ground_truth;
use esl_core::{
    averaged_reference, build_camera_time_map, colorize, estimate_depth, estimate_depth_seeded,
    fill_rate, mc3d_disparity, projector_time_map_on_camera_grid, read_events, rmse, sgm_estimate,
    simulate_scan, write_events, write_ppm, ColorRange, DepthMap, MetricError, PolarityFilter,
    TimeMap,
};

use crate::config::{MethodChoice, RunConfig};
use crate::error::CliError;

pub enum EstimateInput<'a> {
    Events(&'a Path),
    TimeMap(&'a Path),
}

/// Relative output paths live under `run.output_dir`.
fn output_path(cfg: &RunConfig, path: &Path) -> Result<PathBuf, CliError> {
    let full = if path.is_relative() {
        Path::new(&cfg.run.output_dir).join(path)
    } else {
        path.to_path_buf()
    };
    if let Some(parent) = full.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    Ok(full)
}

fn write_text(cfg: &RunConfig, path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => {
            let p = output_path(cfg, p)?;
            std::fs::write(&p, text).map_err(|e| CliError::io(&p, e))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn simulate(
    cfg: &RunConfig,
    events: &Path,
    gt: Option<&Path>,
    tau_c: Option<&Path>,
    tau_p: Option<&Path>,
    pass: u64,
) -> Result<(), CliError> {
    let scene = cfg.scene()?;
    let stream = simulate_scan(&scene, &cfg.noise(), pass)?;
    write_events(&stream, output_path(cfg, events)?)?;
    if let Some(p) = gt {
        write_pfm(&illuminated_ground_truth(&scene), output_path(cfg, p)?)?;
    }
    if let Some(p) = tau_c {
        let map = build_camera_time_map(&stream, PolarityFilter::PositiveOnly)?;
        write_pfm(map.grid(), output_path(cfg, p)?)?;
    }
    if let Some(p) = tau_p {
        let timing = scene.timing.shifted(cfg.latency_est());
        let map = projector_time_map_on_camera_grid(&timing, &scene.rig)?;
        write_pfm(map.grid(), output_path(cfg, p)?)?;
    }
    Ok(())
}

fn read_time_map(cfg: &RunConfig, path: &Path) -> Result<TimeMap<f64>, CliError> {
    let timing = cfg.timing()?;
    Ok(TimeMap::from_grid(
        read_pfm(path)?,
        timing.t0,
        timing.pass_duration_us(),
    ))
}

pub fn estimate(
    cfg: &RunConfig,
    input: EstimateInput<'_>,
    tau_p: Option<&Path>,
    method: MethodChoice,
    out: &Path,
) -> Result<(), CliError> {
    let rig = cfg.rig()?;
    let timing = cfg.timing()?;
    let tau_c = match input {
        EstimateInput::Events(p) => {
            build_camera_time_map(&read_events::<f64>(p)?, PolarityFilter::PositiveOnly)?
        }
        EstimateInput::TimeMap(p) => read_time_map(cfg, p)?,
    };
    if tau_c.width() != rig.camera.width || tau_c.height() != rig.camera.height {
        return Err(CliError::Data(format!(
            "camera input is {}x{} but the rig camera is {}x{}",
            tau_c.width(),
            tau_c.height(),
            rig.camera.width,
            rig.camera.height
        )));
    }
    let tau_p = || -> Result<TimeMap<f64>, CliError> {
        let map = match tau_p {
            Some(p) => read_time_map(cfg, p)?,
            None => projector_time_map_on_camera_grid(&timing.shifted(cfg.latency_est()), &rig)?,
        };
        if !map.grid().same_shape(tau_c.grid()) {
            return Err(CliError::Data(
                "projector time map does not match the camera time map".into(),
            ));
        }
        Ok(map)
    };
    let depth: DepthMap<f64> = match method {
        MethodChoice::Mc3d => {
            mc3d_disparity(&tau_c, &timing, &rig, &cfg.mc3d())?.map(|d| rig.depth_from_disparity(d))
        }
        MethodChoice::Sgm => sgm_estimate(&tau_c, &tau_p()?, &rig, &cfg.sgm())?,
        MethodChoice::Esl => {
            let tau_p = tau_p()?;
            match cfg.esl.seed_radius {
                Some(radius) => {
                    let seed = mc3d_disparity(&tau_c, &timing, &rig, &cfg.mc3d())?;
                    estimate_depth_seeded(&tau_c, &tau_p, &rig, &cfg.esl(), &seed, radius)?
                }
                None => estimate_depth(&tau_c, &tau_p, &rig, &cfg.esl())?,
            }
        }
    };
    write_pfm(&depth, output_path(cfg, out)?)?;
    Ok(())
}

pub fn postproc(cfg: &RunConfig, input: &Path, out: &Path) -> Result<(), CliError> {
    let map: DepthMap<f64> = read_pfm(input)?;
    let processed = esl_core::postprocess(&map, &cfg.postproc())?;
    write_pfm(&processed, output_path(cfg, out)?)?;
    Ok(())
}

fn fmt_value(v: Option<f64>) -> String {
    v.map_or_else(|| "nan".to_string(), |v| format!("{v:.4}"))
}

pub fn eval(
    cfg: &RunConfig,
    estimate: &Path,
    gt: &Path,
    scene: &str,
    method: &str,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let est: DepthMap<f64> = read_pfm(estimate)?;
    let gt: DepthMap<f64> = read_pfm(gt)?;
    let fr = fill_rate(&est, &gt, cfg.run.fill_threshold)?;
    let err = match rmse(&est, &gt) {
        Ok(v) => Some(v),
        Err(MetricError::NoOverlap) => None,
        Err(e) => return Err(e.into()),
    };
    let mut text = String::from("scene\tmethod\tFR\tRMSE_cm\n");
    let _ = writeln!(text, "{scene}\t{method}\t{:.4}\t{}", fr, fmt_value(err));
    write_text(cfg, out, &text)
}

pub fn render(
    cfg: &RunConfig,
    input: &Path,
    out: &Path,
    range: Option<(f64, f64)>,
) -> Result<(), CliError> {
    let map: DepthMap<f64> = read_pfm(input)?;
    let range = match range {
        Some((min, max)) => ColorRange::Fixed { min, max },
        None => ColorRange::Auto,
    };
    write_ppm(&colorize(&map, range), output_path(cfg, out)?)?;
    Ok(())
}

pub fn bench(
    cfg: &RunConfig,
    out: Option<&Path>,
    extra_scenes: bool,
    config_scene: bool,
) -> Result<(), CliError> {
    let bench_cfg = cfg.bench();
    let rows = if config_scene {
        bench::run_scene(&cfg.scene.name, &cfg.scene()?, &bench_cfg)?
    } else {
        let mut rows = bench::run_bench(&bench_cfg)?;
        if extra_scenes {
            for kind in [SceneKind::OccludingStep, SceneKind::SphereOnBackdrop] {
                rows.extend(bench::run_scene(
                    kind.name(),
                    &bench::standard_scene(kind),
                    &bench_cfg,
                )?);
            }
        }
        rows
    };
    write_text(cfg, out, &bench::format_tsv(&rows))
}

pub fn reference(cfg: &RunConfig, out: &Path, passes: usize) -> Result<(), CliError> {
    let map = averaged_reference(&cfg.scene()?, &cfg.noise(), passes)?;
    write_pfm(&map, output_path(cfg, out)?)?;
    Ok(())
}
