//! Reference estimators the spatio-temporal matcher is compared against.

mod mc3d;
mod sgm;

pub use mc3d::{
    mc3d_disparity, mc3d_estimate, mc3d_legacy_interpolate, LegacyInterpolation, Mc3dConfig,
    TwoPlaneCalib,
};
pub use sgm::{sgm_aggregate, sgm_cost_volume, sgm_disparity, sgm_estimate, CostVolume, SgmConfig};
