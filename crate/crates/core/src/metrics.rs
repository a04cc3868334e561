//! Depth-map quality measures against a reference map.

use thiserror::Error;

use crate::grid::{DepthMap, Grid};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricError {
    #[error("maps differ in size: {0}x{1} vs {2}x{3}")]
    ShapeMismatch(usize, usize, usize, usize),
    #[error("no pixel is valid in both maps")]
    NoOverlap,
    #[error("reference map has no valid pixel")]
    NoGroundTruth,
}

fn check_shape<T: Scalar>(est: &DepthMap<T>, gt: &DepthMap<T>) -> Result<(), MetricError> {
    if est.same_shape(gt) {
        Ok(())
    } else {
        Err(MetricError::ShapeMismatch(
            est.width(),
            est.height(),
            gt.width(),
            gt.height(),
        ))
    }
}

fn to_cm<T: Scalar>(v: T) -> T {
    v * T::lit(100.0)
}

/// Root mean squared depth difference in centimeters over pixels valid in both maps.
pub fn rmse<T: Scalar>(est: &DepthMap<T>, gt: &DepthMap<T>) -> Result<T, MetricError> {
    check_shape(est, gt)?;
    let (mut sum, mut n) = (T::zero(), 0usize);
    for (e, g) in est.cells().iter().zip(gt.cells()) {
        if let (Some(e), Some(g)) = (e, g) {
            let d = to_cm(*e - *g);
            sum += d * d;
            n += 1;
        }
    }
    if n == 0 {
        return Err(MetricError::NoOverlap);
    }
    Ok((sum / T::from_usize_lossy(n)).sqrt())
}

/// Fraction of valid reference pixels with an estimate within
/// `threshold_fraction × mean reference depth`.
pub fn fill_rate<T: Scalar>(
    est: &DepthMap<T>,
    gt: &DepthMap<T>,
    threshold_fraction: T,
) -> Result<T, MetricError> {
    check_shape(est, gt)?;
    let n_gt = gt.valid_count();
    if n_gt == 0 {
        return Err(MetricError::NoGroundTruth);
    }
    let mean = gt.valid_values().sum::<T>() / T::from_usize_lossy(n_gt);
    let threshold = threshold_fraction * mean;
    let hits = est
        .cells()
        .iter()
        .zip(gt.cells())
        .filter(|(e, g)| match (e, g) {
            (Some(e), Some(g)) => (*e - *g).abs() <= threshold,
            _ => false,
        })
        .count();
    Ok(T::from_usize_lossy(hits) / T::from_usize_lossy(n_gt))
}

/// Default fill-rate tolerance: 1% of the mean reference depth.
pub const DEFAULT_FILL_THRESHOLD: f64 = 0.01;

/// Per-pixel `est - gt` in centimeters where both are valid.
pub fn signed_difference<T: Scalar>(
    est: &DepthMap<T>,
    gt: &DepthMap<T>,
) -> Result<Grid<T>, MetricError> {
    check_shape(est, gt)?;
    let cells = est
        .cells()
        .iter()
        .zip(gt.cells())
        .map(|(e, g)| Some(to_cm((*e)? - (*g)?)))
        .collect();
    Ok(Grid::from_cells(est.width(), est.height(), cells).expect("shape checked"))
}

/// Spatial variance of the valid cells of a map.
pub fn spatial_variance<T: Scalar>(map: &Grid<T>) -> Option<T> {
    let n = map.valid_count();
    if n == 0 {
        return None;
    }
    let n_t = T::from_usize_lossy(n);
    let mean = map.valid_values().sum::<T>() / n_t;
    Some(
        map.valid_values()
            .map(|v| (v - mean) * (v - mean))
            .sum::<T>()
            / n_t,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_maps() {
        let m = Grid::filled(4, 3, 0.5f64);
        assert_eq!(rmse(&m, &m), Ok(0.0));
        assert_eq!(fill_rate(&m, &m, 0.01), Ok(1.0));
        assert!(signed_difference(&m, &m)
            .unwrap()
            .valid_values()
            .all(|v| v == 0.0));
    }

    #[test]
    fn one_cm_bias() {
        let gt = Grid::filled(4, 3, 0.5f64);
        let est = Grid::filled(4, 3, 0.51f64);
        assert!((rmse(&est, &gt).unwrap() - 1.0).abs() < 1e-9);
        assert!(signed_difference(&est, &gt)
            .unwrap()
            .valid_values()
            .all(|v| (v - 1.0).abs() < 1e-9));
    }

    #[test]
    fn error_cases() {
        let a = Grid::<f64>::new(2, 2);
        let b = Grid::filled(2, 2, 1.0);
        assert_eq!(rmse(&a, &b), Err(MetricError::NoOverlap));
        assert_eq!(fill_rate(&b, &a, 0.01), Err(MetricError::NoGroundTruth));
        assert_eq!(fill_rate(&a, &b, 0.01), Ok(0.0));
        let c = Grid::filled(3, 2, 1.0);
        assert!(matches!(
            rmse(&c, &b),
            Err(MetricError::ShapeMismatch(3, 2, 2, 2))
        ));
    }
}
