//! Point-wise baseline: every event timestamp is inverted through the scan model to
//! the projector pixel that was lit at that instant, and the resulting correspondence
//! is triangulated on its own.

use crate::error::{Error, Result};
use crate::events::{build_camera_time_map, EventStream, PolarityFilter, TimeMap};
use crate::geometry::{Point2, ScanTiming, StereoRig};
use crate::grid::{DepthMap, DisparityMap, Grid};
use crate::scalar::Scalar;

/// Slack (in dwell units) that keeps timestamps sitting exactly on a dwell boundary
/// from falling into the previous slot through rounding.
const SLOT_EPS: f64 = 1e-6;

/// Half the timestamp resolution of the event format, µs. A start-of-dwell event can
/// be written up to this much early.
const HALF_QUANTUM_US: f64 = 5e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mc3dConfig<T> {
    /// Assumed constant sensor latency, µs, removed before inverting the scan.
    pub latency_est: T,
}

impl<T: Scalar> Default for Mc3dConfig<T> {
    fn default() -> Self {
        Mc3dConfig {
            latency_est: T::zero(),
        }
    }
}

/// Disparity per pixel from the last (positive) event at that pixel.
pub fn mc3d_disparity<T: Scalar>(
    tau_c: &TimeMap<T>,
    timing: &ScanTiming<T>,
    rig: &StereoRig<T>,
    cfg: &Mc3dConfig<T>,
) -> Result<DisparityMap<T>> {
    timing.validate()?;
    if tau_c.width() != rig.camera.width || tau_c.height() != rig.camera.height {
        return Err(Error::config(
            "camera time map does not match camera intrinsics",
        ));
    }
    let dwell = timing.dt_us();
    let slack = (T::lit(HALF_QUANTUM_US) / dwell + T::lit(SLOT_EPS)).min(T::lit(0.25));
    let slots = T::from_usize_lossy(timing.pixel_count());

    Ok(Grid::from_fn(tau_c.width(), tau_c.height(), |x, y| {
        let t = tau_c.get(x, y)?;
        let r = t - timing.t0 - cfg.latency_est;
        let slot = (r / dwell + slack).floor();
        if slot < T::zero() || slot >= slots {
            return None;
        }
        let slot = slot.to_usize()?;
        let line = T::from_usize_lossy(slot / timing.pixels_per_line);
        let pixel = T::from_usize_lossy(slot % timing.pixels_per_line);
        let canonical = rig.projector_to_canonical(Point2::new(line, pixel));
        let d = T::from_usize_lossy(x) - canonical.x;
        (d > T::zero()).then_some(d)
    }))
}

pub fn mc3d_estimate<T: Scalar>(
    stream: &EventStream<T>,
    timing: &ScanTiming<T>,
    rig: &StereoRig<T>,
    cfg: &Mc3dConfig<T>,
) -> Result<DepthMap<T>> {
    let tau_c = build_camera_time_map(stream, PolarityFilter::PositiveOnly)?;
    let disparity = mc3d_disparity(&tau_c, timing, rig, cfg)?;
    Ok(disparity.map(|d| rig.depth_from_disparity(d)))
}

/// Disparity maps of two reference planes, used by the original two-plane depth
/// interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoPlaneCalib<T> {
    pub near_disparity: DisparityMap<T>,
    pub far_disparity: DisparityMap<T>,
    pub near_depth: T,
    pub far_depth: T,
}

impl<T: Scalar> TwoPlaneCalib<T> {
    pub fn new(
        near_disparity: DisparityMap<T>,
        far_disparity: DisparityMap<T>,
        near_depth: T,
        far_depth: T,
    ) -> Result<Self> {
        let calib = TwoPlaneCalib {
            near_disparity,
            far_disparity,
            near_depth,
            far_depth,
        };
        calib.validate()?;
        Ok(calib)
    }

    fn validate_shape(&self) -> Result<()> {
        if !(self.near_depth < self.far_depth) {
            return Err(Error::config("near plane must be closer than far plane"));
        }
        if !self.near_disparity.same_shape(&self.far_disparity) {
            return Err(Error::config("reference disparity maps differ in size"));
        }
        Ok(())
    }

    /// Also requires the near plane disparity to exceed the far one at every pixel
    /// where both are known.
    pub fn validate(&self) -> Result<()> {
        self.validate_shape()?;
        for (i, (n, f)) in self
            .near_disparity
            .cells()
            .iter()
            .zip(self.far_disparity.cells())
            .enumerate()
        {
            if let (Some(n), Some(f)) = (n, f) {
                if !(n > f) {
                    return Err(Error::Data {
                        index: i,
                        message: format!("near disparity {n} not larger than far disparity {f}"),
                    });
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LegacyInterpolation {
    /// `Z = Zn + Zf (d - dn) / (df - dn)`, exactly as published.
    #[default]
    AsPublished,
    /// `Z = Zn + (Zf - Zn) (d - dn) / (df - dn)`, which reaches `Zf` at `d = df`.
    Endpoint,
}

pub fn mc3d_legacy_interpolate<T: Scalar>(
    disparity: &DisparityMap<T>,
    calib: &TwoPlaneCalib<T>,
    variant: LegacyInterpolation,
) -> Result<DepthMap<T>> {
    calib.validate_shape()?;
    if !disparity.same_shape(&calib.near_disparity) {
        return Err(Error::config(
            "disparity map does not match reference planes",
        ));
    }
    let scale = match variant {
        LegacyInterpolation::AsPublished => calib.far_depth,
        LegacyInterpolation::Endpoint => calib.far_depth - calib.near_depth,
    };
    Ok(Grid::from_fn(
        disparity.width(),
        disparity.height(),
        |x, y| {
            let d = disparity.get(x, y)?;
            let dn = calib.near_disparity.get(x, y)?;
            let df = calib.far_disparity.get(x, y)?;
            let span = df - dn;
            if span == T::zero() {
                return None;
            }
            Some(calib.near_depth + scale * (d - dn) / span)
        },
    ))
}
