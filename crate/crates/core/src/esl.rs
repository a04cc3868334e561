//! Depth from spatio-temporal consistency between the camera and projector time maps.
//!
//! For a camera pixel and a candidate disparity `d`, the cost is the mean squared
//! timestamp difference between a `W`×`W` window of the camera map and the window of
//! the projector map `d` columns to the left. The disparity with the lowest cost wins.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::events::TimeMap;
use crate::geometry::StereoRig;
use crate::grid::{DepthMap, DisparityMap, Grid};
use crate::postproc::{tv_denoise, TvParams};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EslConfig<T> {
    /// Side of the square matching window; odd.
    pub window: usize,
    pub disparity_min: usize,
    pub disparity_max: usize,
    /// Fraction of window cells that must be valid in both maps.
    pub min_valid_fraction: T,
    /// Parabolic refinement of the integer minimum.
    pub subpixel: bool,
    /// Optional TV regularization of the resulting depth map.
    pub tv_refine: Option<TvParams<T>>,
}

impl<T: Scalar> Default for EslConfig<T> {
    fn default() -> Self {
        EslConfig {
            window: 7,
            disparity_min: 0,
            disparity_max: 64,
            min_valid_fraction: T::lit(0.5),
            subpixel: false,
            tv_refine: None,
        }
    }
}

impl<T: Scalar> EslConfig<T> {
    pub fn validate(&self, width: usize) -> Result<()> {
        if self.window == 0 || self.window.is_multiple_of(2) {
            return Err(Error::config(format!(
                "window must be odd and >= 1, got {}",
                self.window
            )));
        }
        if self.disparity_min >= self.disparity_max || self.disparity_max >= width {
            return Err(Error::config(format!(
                "disparity range [{}, {}] invalid for width {width}",
                self.disparity_min, self.disparity_max
            )));
        }
        if !(self.min_valid_fraction > T::zero() && self.min_valid_fraction <= T::one()) {
            return Err(Error::config(format!(
                "min_valid_fraction must be in (0, 1], got {}",
                self.min_valid_fraction
            )));
        }
        if let Some(tv) = self.tv_refine {
            if !(tv.lambda > T::zero()) || tv.iterations == 0 {
                return Err(Error::config(
                    "tv_refine needs a positive lambda and iterations",
                ));
            }
        }
        Ok(())
    }

    fn min_count(&self) -> T {
        self.min_valid_fraction * T::from_usize_lossy(self.window * self.window)
    }
}

/// Costs of every candidate disparity at one pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct CostProfile<T> {
    pub disparity_min: usize,
    /// Cost of `disparity_min + k`, µs²; `None` where the window was unusable.
    pub costs: Vec<Option<T>>,
    /// Index into `costs` of the smallest cost (first one on ties).
    pub argmin: Option<usize>,
}

impl<T: Scalar> CostProfile<T> {
    pub fn is_valid(&self) -> bool {
        self.argmin.is_some()
    }

    pub fn best_disparity(&self) -> Option<usize> {
        self.argmin.map(|k| self.disparity_min + k)
    }
}

fn check_inputs<T: Scalar>(
    tau_c: &TimeMap<T>,
    tau_p: &TimeMap<T>,
    cfg: &EslConfig<T>,
) -> Result<()> {
    if !tau_c.same_shape(tau_p) {
        return Err(Error::config(format!(
            "time maps differ in size: {}x{} vs {}x{}",
            tau_c.width(),
            tau_c.height(),
            tau_p.width(),
            tau_p.height()
        )));
    }
    cfg.validate(tau_c.width())
}

#[inline]
fn cost_unchecked<T: Scalar>(
    tau_c: &Grid<T>,
    tau_p: &Grid<T>,
    x: usize,
    y: usize,
    d: usize,
    half: usize,
    min_count: T,
) -> Option<T> {
    let (w, h) = (tau_c.width(), tau_c.height());
    if x < half + d || y < half || x + half >= w || y + half >= h {
        return None;
    }
    let c = tau_c.cells();
    let p = tau_p.cells();
    let mut sum = T::zero();
    let mut count = 0usize;
    for wy in y - half..=y + half {
        let row = wy * w;
        for wx in x - half..=x + half {
            if let (Some(a), Some(b)) = (c[row + wx], p[row + wx - d]) {
                let diff = a - b;
                sum += diff * diff;
                count += 1;
            }
        }
    }
    let n = T::from_usize_lossy(count);
    (count > 0 && n >= min_count).then(|| sum / n)
}

/// Mean squared timestamp difference over the window cells valid in both maps, or
/// `None` when the window leaves either frame or too few cells are valid.
pub fn window_cost<T: Scalar>(
    tau_c: &TimeMap<T>,
    tau_p: &TimeMap<T>,
    x: usize,
    y: usize,
    d: usize,
    cfg: &EslConfig<T>,
) -> Option<T> {
    cost_unchecked(tau_c, tau_p, x, y, d, cfg.window / 2, cfg.min_count())
}

fn profile_in<T: Scalar>(
    tau_c: &Grid<T>,
    tau_p: &Grid<T>,
    x: usize,
    y: usize,
    lo: usize,
    hi: usize,
    cfg: &EslConfig<T>,
) -> CostProfile<T> {
    let half = cfg.window / 2;
    let min_count = cfg.min_count();
    let costs: Vec<Option<T>> = (lo..=hi)
        .map(|d| cost_unchecked(tau_c, tau_p, x, y, d, half, min_count))
        .collect();
    let mut argmin: Option<usize> = None;
    for (k, c) in costs.iter().enumerate() {
        if let Some(c) = *c {
            if argmin.is_none_or(|b| c < costs[b].expect("valid argmin")) {
                argmin = Some(k);
            }
        }
    }
    CostProfile {
        disparity_min: lo,
        costs,
        argmin,
    }
}

pub fn cost_profile<T: Scalar>(
    tau_c: &TimeMap<T>,
    tau_p: &TimeMap<T>,
    x: usize,
    y: usize,
    cfg: &EslConfig<T>,
) -> Result<CostProfile<T>> {
    check_inputs(tau_c, tau_p, cfg)?;
    if x >= tau_c.width() || y >= tau_c.height() {
        return Err(Error::domain(format!(
            "pixel ({x}, {y}) outside the time map"
        )));
    }
    Ok(profile_in(
        tau_c,
        tau_p,
        x,
        y,
        cfg.disparity_min,
        cfg.disparity_max,
        cfg,
    ))
}

/// Parabola through the costs around the minimum; offset clamped to half a pixel.
fn refine<T: Scalar>(profile: &CostProfile<T>, k: usize) -> T {
    let best = T::from_usize_lossy(profile.disparity_min + k);
    if k == 0 || k + 1 >= profile.costs.len() {
        return best;
    }
    let (Some(l), Some(c), Some(r)) =
        (profile.costs[k - 1], profile.costs[k], profile.costs[k + 1])
    else {
        return best;
    };
    let denom = l - T::lit(2.0) * c + r;
    if !(denom > T::zero()) {
        return best;
    }
    let half = T::lit(0.5);
    let offset = (half * (l - r) / denom).max(-half).min(half);
    best + offset
}

fn solve<T: Scalar>(
    tau_c: &TimeMap<T>,
    tau_p: &TimeMap<T>,
    cfg: &EslConfig<T>,
    range: impl Fn(usize, usize) -> Option<(usize, usize)> + Sync,
) -> Result<DisparityMap<T>> {
    let (w, h) = (tau_c.width(), tau_c.height());
    let rows: Vec<Vec<Option<T>>> = (0..h)
        .into_par_iter()
        .map(|y| {
            (0..w)
                .map(|x| {
                    let (lo, hi) = range(x, y)?;
                    let profile = profile_in(tau_c, tau_p, x, y, lo, hi, cfg);
                    let k = profile.argmin?;
                    Some(if cfg.subpixel {
                        refine(&profile, k)
                    } else {
                        T::from_usize_lossy(lo + k)
                    })
                })
                .collect()
        })
        .collect();
    Grid::from_cells(w, h, rows.into_iter().flatten().collect())
}

/// Disparity of every pixel by exhaustive search over the configured range.
pub fn estimate_disparity<T: Scalar>(
    tau_c: &TimeMap<T>,
    tau_p: &TimeMap<T>,
    cfg: &EslConfig<T>,
) -> Result<DisparityMap<T>> {
    check_inputs(tau_c, tau_p, cfg)?;
    solve(tau_c, tau_p, cfg, |_, _| {
        Some((cfg.disparity_min, cfg.disparity_max))
    })
}

/// Like [`estimate_disparity`], but searching only `seed ± radius` (intersected with
/// the configured range) where the seed map has a value. Pixels without a seed use the
/// full range.
pub fn estimate_disparity_seeded<T: Scalar>(
    tau_c: &TimeMap<T>,
    tau_p: &TimeMap<T>,
    cfg: &EslConfig<T>,
    seed: &DisparityMap<T>,
    radius: usize,
) -> Result<DisparityMap<T>> {
    check_inputs(tau_c, tau_p, cfg)?;
    if !seed.same_shape(tau_c.grid()) {
        return Err(Error::config(
            "seed disparity map does not match the time maps",
        ));
    }
    let (dmin, dmax) = (cfg.disparity_min, cfg.disparity_max);
    solve(tau_c, tau_p, cfg, |x, y| match seed.get(x, y) {
        None => Some((dmin, dmax)),
        Some(s) => {
            let s = s.round().to_f64_lossy();
            let lo = (s - radius as f64).max(dmin as f64);
            let hi = (s + radius as f64).min(dmax as f64);
            (lo <= hi).then_some((lo as usize, hi as usize))
        }
    })
}

fn to_depth<T: Scalar>(
    disparity: &DisparityMap<T>,
    rig: &StereoRig<T>,
    cfg: &EslConfig<T>,
) -> Result<DepthMap<T>> {
    let depth = disparity.map(|d| rig.depth_from_disparity(d));
    match cfg.tv_refine {
        Some(tv) => tv_denoise(&depth, tv.lambda, tv.iterations),
        None => Ok(depth),
    }
}

pub fn estimate_depth<T: Scalar>(
    tau_c: &TimeMap<T>,
    tau_p: &TimeMap<T>,
    rig: &StereoRig<T>,
    cfg: &EslConfig<T>,
) -> Result<DepthMap<T>> {
    to_depth(&estimate_disparity(tau_c, tau_p, cfg)?, rig, cfg)
}

/// Depth with the search narrowed around a coarse initial disparity map, e.g. the
/// point-wise baseline.
pub fn estimate_depth_seeded<T: Scalar>(
    tau_c: &TimeMap<T>,
    tau_p: &TimeMap<T>,
    rig: &StereoRig<T>,
    cfg: &EslConfig<T>,
    seed: &DisparityMap<T>,
    radius: usize,
) -> Result<DepthMap<T>> {
    to_depth(
        &estimate_disparity_seeded(tau_c, tau_p, cfg, seed, radius)?,
        rig,
        cfg,
    )
}
