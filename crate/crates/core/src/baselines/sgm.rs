//! Semi-global matching on time maps.
//!
//! The per-pixel matching cost is the absolute timestamp difference between a camera
//! pixel and the projector pixel `d` columns to its left. Costs are aggregated along
//! 1, 2, 4 or 8 scanline directions with the usual two-penalty recursion
//!
//! `L(p, d) = C(p, d) + min(L(p-r, d), L(p-r, d±1) + P1, min_k L(p-r, k) + P2) - min_k L(p-r, k)`
//!
//! and the disparity is the winner-take-all argmin of the summed path costs.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::events::TimeMap;
use crate::geometry::StereoRig;
use crate::grid::{DepthMap, DisparityMap, Grid};
use crate::scalar::Scalar;

const DIRECTIONS: [(isize, isize); 8] = [
    (1, 0),
    (-1, 0),
    (0, 1),
    (0, -1),
    (1, 1),
    (-1, -1),
    (-1, 1),
    (1, -1),
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SgmConfig<T> {
    /// Penalty for a one-pixel disparity change between path neighbours (µs).
    pub p1: T,
    /// Penalty for larger disparity jumps (µs).
    pub p2: T,
    /// Number of aggregation paths: 1, 2, 4 or 8.
    pub directions: usize,
    pub disparity_min: usize,
    pub disparity_max: usize,
}

impl<T: Scalar> Default for SgmConfig<T> {
    fn default() -> Self {
        SgmConfig {
            p1: T::lit(2.0),
            p2: T::lit(16.0),
            directions: 4,
            disparity_min: 0,
            disparity_max: 64,
        }
    }
}

impl<T: Scalar> SgmConfig<T> {
    pub fn validate(&self, width: usize) -> Result<()> {
        if !(self.p1 >= T::zero() && self.p1 <= self.p2) {
            return Err(Error::config(format!(
                "penalties must satisfy 0 <= p1 <= p2, got p1={} p2={}",
                self.p1, self.p2
            )));
        }
        if ![1, 2, 4, 8].contains(&self.directions) {
            return Err(Error::config(format!(
                "directions must be 1, 2, 4 or 8, got {}",
                self.directions
            )));
        }
        if self.disparity_min >= self.disparity_max || self.disparity_max >= width {
            return Err(Error::config(format!(
                "disparity range [{}, {}] invalid for width {width}",
                self.disparity_min, self.disparity_max
            )));
        }
        Ok(())
    }

    fn candidates(&self) -> usize {
        self.disparity_max - self.disparity_min + 1
    }
}

/// Dense cost volume, laid out pixel-major: `costs[(y * width + x) * candidates + k]`
/// holds the cost of disparity `disparity_min + k`.
#[derive(Debug, Clone, PartialEq)]
pub struct CostVolume<T> {
    pub width: usize,
    pub height: usize,
    pub disparity_min: usize,
    pub candidates: usize,
    pub costs: Vec<T>,
    /// Whether a pixel had at least one candidate with both time map cells valid.
    pub matchable: Vec<bool>,
    /// Cost substituted wherever a candidate could not be evaluated.
    pub invalid_cost: T,
}

impl<T: Scalar> CostVolume<T> {
    #[inline]
    pub fn at(&self, x: usize, y: usize) -> &[T] {
        let i = (y * self.width + x) * self.candidates;
        &self.costs[i..i + self.candidates]
    }
}

fn check_grids<T: Scalar>(tau_c: &TimeMap<T>, tau_p: &TimeMap<T>) -> Result<()> {
    if !tau_c.same_shape(tau_p) {
        return Err(Error::config(format!(
            "time maps differ in size: {}x{} vs {}x{}",
            tau_c.width(),
            tau_c.height(),
            tau_p.width(),
            tau_p.height()
        )));
    }
    Ok(())
}

/// Nearest-rank 99th percentile.
fn percentile_99<T: Scalar>(mut values: Vec<T>) -> Option<T> {
    if values.is_empty() {
        return None;
    }
    let rank = ((values.len() as f64) * 0.99).ceil() as usize;
    let idx = rank.clamp(1, values.len()) - 1;
    let (_, v, _) =
        values.select_nth_unstable_by(idx, |a, b| a.partial_cmp(b).expect("finite cost"));
    Some(*v)
}

pub fn sgm_cost_volume<T: Scalar>(
    tau_c: &TimeMap<T>,
    tau_p: &TimeMap<T>,
    cfg: &SgmConfig<T>,
) -> Result<CostVolume<T>> {
    check_grids(tau_c, tau_p)?;
    cfg.validate(tau_c.width())?;
    let (w, h, n) = (tau_c.width(), tau_c.height(), cfg.candidates());
    let mut raw: Vec<Option<T>> = vec![None; w * h * n];
    raw.par_chunks_mut(w * n).enumerate().for_each(|(y, row)| {
        for x in 0..w {
            let Some(c) = tau_c.get(x, y) else { continue };
            for k in 0..n {
                let d = cfg.disparity_min + k;
                if d > x {
                    break;
                }
                if let Some(p) = tau_p.get(x - d, y) {
                    row[x * n + k] = Some((c - p).abs());
                }
            }
        }
    });

    let finite: Vec<T> = raw.iter().filter_map(|c| *c).collect();
    let max = finite.iter().copied().fold(T::zero(), T::max);
    let invalid_cost = match percentile_99(finite) {
        Some(p) if p > T::zero() => p * T::lit(10.0),
        _ if max > T::zero() => max * T::lit(10.0),
        _ => T::one(),
    };
    let matchable = raw
        .chunks(n)
        .map(|px| px.iter().any(Option::is_some))
        .collect();
    let costs = raw.into_iter().map(|c| c.unwrap_or(invalid_cost)).collect();
    Ok(CostVolume {
        width: w,
        height: h,
        disparity_min: cfg.disparity_min,
        candidates: n,
        costs,
        matchable,
        invalid_cost,
    })
}

/// Pixels of every scanline for direction `(dx, dy)`, in traversal order.
fn scanlines(w: usize, h: usize, (dx, dy): (isize, isize)) -> Vec<Vec<usize>> {
    let inside = |x: isize, y: isize| x >= 0 && y >= 0 && (x as usize) < w && (y as usize) < h;
    let mut lines = Vec::new();
    for y in 0..h as isize {
        for x in 0..w as isize {
            if inside(x - dx, y - dy) {
                continue;
            }
            let mut line = Vec::new();
            let (mut cx, mut cy) = (x, y);
            while inside(cx, cy) {
                line.push(cy as usize * w + cx as usize);
                cx += dx;
                cy += dy;
            }
            lines.push(line);
        }
    }
    lines
}

fn aggregate_line<T: Scalar>(volume: &CostVolume<T>, line: &[usize], p1: T, p2: T) -> Vec<T> {
    let n = volume.candidates;
    let mut out = vec![T::zero(); line.len() * n];
    for (step, &pix) in line.iter().enumerate() {
        let cost = &volume.costs[pix * n..(pix + 1) * n];
        if step == 0 {
            out[..n].copy_from_slice(cost);
            continue;
        }
        let (done, rest) = out.split_at_mut(step * n);
        let prev = &done[(step - 1) * n..];
        let cur = &mut rest[..n];
        let prev_min = prev.iter().copied().fold(T::infinity(), T::min);
        for k in 0..n {
            let mut best = prev[k];
            if k > 0 {
                best = best.min(prev[k - 1] + p1);
            }
            if k + 1 < n {
                best = best.min(prev[k + 1] + p1);
            }
            best = best.min(prev_min + p2);
            cur[k] = cost[k] + (best - prev_min);
        }
    }
    out
}

/// Sum of path costs over the configured directions.
///
/// Scanlines of one direction are independent and run in parallel; directions are
/// accumulated one after another in a fixed order, so the result does not depend on
/// the thread count.
pub fn sgm_aggregate<T: Scalar>(volume: &CostVolume<T>, cfg: &SgmConfig<T>) -> Vec<T> {
    let n = volume.candidates;
    let mut total = vec![T::zero(); volume.costs.len()];
    for &dir in &DIRECTIONS[..cfg.directions] {
        let lines = scanlines(volume.width, volume.height, dir);
        let paths: Vec<Vec<T>> = lines
            .par_iter()
            .map(|line| aggregate_line(volume, line, cfg.p1, cfg.p2))
            .collect();
        for (line, path) in lines.iter().zip(&paths) {
            for (step, &pix) in line.iter().enumerate() {
                let dst = &mut total[pix * n..(pix + 1) * n];
                for (t, v) in dst.iter_mut().zip(&path[step * n..(step + 1) * n]) {
                    *t += *v;
                }
            }
        }
    }
    total
}

pub fn sgm_disparity<T: Scalar>(
    tau_c: &TimeMap<T>,
    tau_p: &TimeMap<T>,
    cfg: &SgmConfig<T>,
) -> Result<DisparityMap<T>> {
    let volume = sgm_cost_volume(tau_c, tau_p, cfg)?;
    let total = sgm_aggregate(&volume, cfg);
    let n = volume.candidates;
    let cells = total
        .chunks(n)
        .zip(&volume.matchable)
        .map(|(costs, &ok)| {
            if !ok {
                return None;
            }
            let mut best = 0;
            for k in 1..n {
                if costs[k] < costs[best] {
                    best = k;
                }
            }
            Some(T::from_usize_lossy(cfg.disparity_min + best))
        })
        .collect();
    Grid::from_cells(volume.width, volume.height, cells)
}

pub fn sgm_estimate<T: Scalar>(
    tau_c: &TimeMap<T>,
    tau_p: &TimeMap<T>,
    rig: &StereoRig<T>,
    cfg: &SgmConfig<T>,
) -> Result<DepthMap<T>> {
    Ok(sgm_disparity(tau_c, tau_p, cfg)?.map(|d| rig.depth_from_disparity(d)))
}
