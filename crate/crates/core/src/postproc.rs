//! Depth-map clean-up: median filtering, hole filling and total-variation denoising.
//!
//! None of the steps can move a value outside the range of its input, and only
//! inpainting ever turns an invalid cell into a valid one.

use crate::error::{Error, Result};
use crate::grid::{DepthMap, Grid};
use crate::scalar::Scalar;

const INPAINT_TOLERANCE: f64 = 1e-6;
const INPAINT_MAX_ITERATIONS: usize = 1000;

/// Median of the valid cells in a `kernel`×`kernel` window around each valid cell.
/// With an even number of valid neighbours the two middle values are averaged.
pub fn median_filter<T: Scalar>(map: &DepthMap<T>, kernel: usize) -> Result<DepthMap<T>> {
    if kernel < 3 || kernel.is_multiple_of(2) {
        return Err(Error::domain(format!(
            "median kernel must be odd and >= 3, got {kernel}"
        )));
    }
    let h = (kernel / 2) as isize;
    let mut buf = Vec::with_capacity(kernel * kernel);
    Ok(Grid::from_fn(map.width(), map.height(), |x, y| {
        map.get(x, y)?;
        buf.clear();
        for dy in -h..=h {
            for dx in -h..=h {
                if let Some(v) = map.get_signed(x as isize + dx, y as isize + dy) {
                    buf.push(v);
                }
            }
        }
        buf.sort_by(|a, b| a.partial_cmp(b).expect("finite depth"));
        let n = buf.len();
        Some(if n % 2 == 1 {
            buf[n / 2]
        } else {
            (buf[n / 2 - 1] + buf[n / 2]) / T::lit(2.0)
        })
    }))
}

/// Fills holes whose nearest valid cell lies within `max_hole_radius` (Euclidean, in
/// pixels) by harmonic interpolation: each fillable cell starts at the mean of the
/// valid cells within the radius and is then repeatedly replaced by the mean of its
/// 4-neighbours until the largest update drops below 1e-6 m.
pub fn inpaint_holes<T: Scalar>(map: &DepthMap<T>, max_hole_radius: usize) -> DepthMap<T> {
    let (w, h) = (map.width(), map.height());
    let r = max_hole_radius as isize;
    let r2 = r * r;

    let mut fill: Vec<usize> = Vec::new();
    let mut out = map.clone();
    for y in 0..h {
        for x in 0..w {
            if map.get(x, y).is_some() {
                continue;
            }
            let (mut sum, mut n) = (T::zero(), 0usize);
            for dy in -r..=r {
                for dx in -r..=r {
                    if dx * dx + dy * dy > r2 {
                        continue;
                    }
                    if let Some(v) = map.get_signed(x as isize + dx, y as isize + dy) {
                        sum += v;
                        n += 1;
                    }
                }
            }
            if n > 0 {
                out.set(x, y, Some(sum / T::from_usize_lossy(n)));
                fill.push(y * w + x);
            }
        }
    }
    if fill.is_empty() {
        return out;
    }

    let tol = T::lit(INPAINT_TOLERANCE);
    let mut next = out.cells().to_vec();
    for _ in 0..INPAINT_MAX_ITERATIONS {
        let cur = out.cells();
        let mut max_change = T::zero();
        for &i in &fill {
            let (x, y) = ((i % w) as isize, (i / w) as isize);
            let (mut sum, mut n) = (T::zero(), 0usize);
            for (dx, dy) in [(-1, 0), (1, 0), (0, -1), (0, 1)] {
                if let Some(v) = out.get_signed(x + dx, y + dy) {
                    sum += v;
                    n += 1;
                }
            }
            let v = sum / T::from_usize_lossy(n);
            max_change = max_change.max((v - cur[i].expect("fillable cell")).abs());
            next[i] = Some(v);
        }
        out.cells_mut().copy_from_slice(&next);
        if max_change < tol {
            break;
        }
    }
    out
}

/// Anisotropic ROF denoising, `min_u Σ (u - z)² / (2 λ) + TV(u)`, on the valid cells.
///
/// Solved by projected gradient on the dual field. Differences are only taken between
/// pairs of valid cells, so holes neither contribute data nor couple their neighbours.
pub fn tv_denoise<T: Scalar>(
    map: &DepthMap<T>,
    lambda: T,
    iterations: usize,
) -> Result<DepthMap<T>> {
    if !(lambda > T::zero()) {
        return Err(Error::domain(format!(
            "TV weight must be positive, got {lambda}"
        )));
    }
    if iterations == 0 {
        return Err(Error::domain("TV needs at least one iteration"));
    }
    let Some((lo, hi)) = map.value_range() else {
        return Ok(map.clone());
    };
    let (w, h) = (map.width(), map.height());
    let cells = map.cells();
    let z: Vec<T> = cells.iter().map(|c| c.unwrap_or(T::zero())).collect();
    let link_x: Vec<bool> = (0..w * h)
        .map(|i| i % w + 1 < w && cells[i].is_some() && cells[i + 1].is_some())
        .collect();
    let link_y: Vec<bool> = (0..w * h)
        .map(|i| i + w < w * h && cells[i].is_some() && cells[i + w].is_some())
        .collect();

    let tau = T::lit(0.125);
    let mut px = vec![T::zero(); w * h];
    let mut py = vec![T::zero(); w * h];
    let mut div = vec![T::zero(); w * h];
    let divergence = |px: &[T], py: &[T], div: &mut [T]| {
        for i in 0..w * h {
            let mut v = T::zero();
            if link_x[i] {
                v += px[i];
            }
            if i % w > 0 && link_x[i - 1] {
                v -= px[i - 1];
            }
            if link_y[i] {
                v += py[i];
            }
            if i >= w && link_y[i - w] {
                v -= py[i - w];
            }
            div[i] = v;
        }
    };
    let one = T::one();
    for _ in 0..iterations {
        divergence(&px, &py, &mut div);
        // With u = z + λ div p the dual objective is |div p + z / λ|², whose
        // descent direction is the gradient of (div p + z / λ).
        for i in 0..w * h {
            let g = |j: usize| div[j] + z[j] / lambda;
            if link_x[i] {
                px[i] = (px[i] + tau * (g(i + 1) - g(i))).max(-one).min(one);
            }
            if link_y[i] {
                py[i] = (py[i] + tau * (g(i + w) - g(i))).max(-one).min(one);
            }
        }
    }
    divergence(&px, &py, &mut div);
    let out = cells
        .iter()
        .enumerate()
        .map(|(i, c)| c.map(|v| (v + lambda * div[i]).max(lo).min(hi)))
        .collect();
    Grid::from_cells(w, h, out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PostprocConfig<T> {
    /// Median kernel side; `None` skips the step.
    pub median_kernel: Option<usize>,
    pub max_hole_radius: Option<usize>,
    pub tv: Option<TvParams<T>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TvParams<T> {
    pub lambda: T,
    pub iterations: usize,
}

impl<T: Scalar> Default for TvParams<T> {
    fn default() -> Self {
        TvParams {
            lambda: T::lit(DEFAULT_TV_LAMBDA),
            iterations: 100,
        }
    }
}

/// Default TV weight, meters.
pub const DEFAULT_TV_LAMBDA: f64 = 0.002;

impl<T: Scalar> Default for PostprocConfig<T> {
    fn default() -> Self {
        PostprocConfig {
            median_kernel: Some(5),
            max_hole_radius: Some(4),
            tv: Some(TvParams::default()),
        }
    }
}

/// Median, then inpainting, then TV, skipping disabled steps.
pub fn postprocess<T: Scalar>(map: &DepthMap<T>, cfg: &PostprocConfig<T>) -> Result<DepthMap<T>> {
    let mut out = match cfg.median_kernel {
        Some(k) => median_filter(map, k)?,
        None => map.clone(),
    };
    if let Some(r) = cfg.max_hole_radius {
        out = inpaint_holes(&out, r);
    }
    if let Some(tv) = cfg.tv {
        out = tv_denoise(&out, tv.lambda, tv.iterations)?;
    }
    Ok(out)
}
