//! Depth estimation for an event camera paired with a raster-scanning laser projector.
//!
//! The projector lights one point at a time, so every camera event carries the time at
//! which its scene point was illuminated. Matching the camera's per-pixel event times
//! against the projector's known scan schedule yields disparity and hence depth.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the aliases at the
//! bottom of this file fix the common choices.

pub mod baselines;
pub mod bench;
pub mod error;
pub mod esl;
pub mod events;
pub mod geometry;
pub mod grid;
pub mod metrics;
mod palette;
pub mod pfm;
pub mod postproc;
pub mod render;
pub mod scalar;
pub mod simulator;

pub use baselines::{
    mc3d_disparity, mc3d_estimate, mc3d_legacy_interpolate, sgm_aggregate, sgm_cost_volume,
    sgm_disparity, sgm_estimate, CostVolume, LegacyInterpolation, Mc3dConfig, SgmConfig,
    TwoPlaneCalib,
};
pub use error::{Error, Result};
pub use esl::{
    cost_profile, estimate_depth, estimate_depth_seeded, estimate_disparity,
    estimate_disparity_seeded, window_cost, CostProfile, EslConfig,
};
pub use events::{
    build_camera_time_map, build_projector_time_map, projector_time_map_on_camera_grid,
    read_events, resample_projector_time_map, write_events, Event, EventStream, Polarity,
    PolarityFilter, TimeMap,
};
pub use geometry::{
    intersect_camera_ray, intersect_projector_ray, PinholeIntrinsics, Point2, Point3, ScanTiming,
    ScenePrimitive, StepSide, StereoRig,
};
pub use grid::{DepthMap, DisparityMap, Grid};
pub use metrics::{fill_rate, rmse, signed_difference, MetricError};
pub use postproc::{
    inpaint_holes, median_filter, postprocess, tv_denoise, PostprocConfig, TvParams,
};
pub use render::{colorize, write_ppm, ColorRange, RgbImage};
pub use scalar::Scalar;
pub use simulator::{
    averaged_reference, ground_truth_depth, illuminated_ground_truth, matching_time_maps,
    simulate_scan, NoiseConfig, SimScene,
};

pub type DepthMap64 = DepthMap<f64>;
pub type DepthMap32 = DepthMap<f32>;
pub type TimeMap64 = TimeMap<f64>;
pub type TimeMap32 = TimeMap<f32>;
pub type EventStream64 = EventStream<f64>;
pub type EventStream32 = EventStream<f32>;
pub type StereoRig64 = StereoRig<f64>;
pub type StereoRig32 = StereoRig<f32>;
pub type ScanTiming64 = ScanTiming<f64>;
pub type ScanTiming32 = ScanTiming<f32>;
pub type SimScene64 = SimScene<f64>;
pub type SimScene32 = SimScene<f32>;
pub type EslConfig64 = EslConfig<f64>;
pub type EslConfig32 = EslConfig<f32>;
pub type SgmConfig64 = SgmConfig<f64>;
pub type SgmConfig32 = SgmConfig<f32>;
pub type NoiseConfig64 = NoiseConfig<f64>;
pub type NoiseConfig32 = NoiseConfig<f32>;
