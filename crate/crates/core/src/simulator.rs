//! Synthetic scanner: the projector raster-scans an analytic scene and the event
//! camera reports one positive event per illuminated pixel, with latency, jitter,
//! dropout and burst-mode readout applied to the timestamps.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::baselines::{mc3d_estimate, Mc3dConfig};
use crate::error::{Error, Result};
use crate::events::{
    build_camera_time_map, projector_time_map_on_camera_grid, quantize_timestamp, Event,
    EventStream, PolarityFilter, TimeMap,
};
use crate::geometry::{nearest_hit, Point2, Point3, ScanTiming, ScenePrimitive, StereoRig};
use crate::grid::{DepthMap, Grid};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseConfig<T> {
    /// Standard deviation of Gaussian timestamp noise, µs.
    pub jitter_sigma: T,
    /// Constant delay added to every timestamp, µs.
    pub latency: T,
    /// Camera rows sharing one timestamp in burst readout; 1 disables it.
    pub burst_group: usize,
    pub dropout_prob: T,
    pub seed: u64,
}

impl<T: Scalar> Default for NoiseConfig<T> {
    fn default() -> Self {
        NoiseConfig {
            jitter_sigma: T::zero(),
            latency: T::zero(),
            burst_group: 1,
            dropout_prob: T::zero(),
            seed: 0,
        }
    }
}

impl<T: Scalar> NoiseConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.jitter_sigma >= T::zero()) || !self.jitter_sigma.is_finite() {
            return Err(Error::config(format!(
                "jitter_sigma must be >= 0, got {}",
                self.jitter_sigma
            )));
        }
        if !(self.latency >= T::zero()) || !self.latency.is_finite() {
            return Err(Error::config(format!(
                "latency must be >= 0, got {}",
                self.latency
            )));
        }
        if self.burst_group == 0 {
            return Err(Error::config("burst_group must be >= 1"));
        }
        if !(self.dropout_prob >= T::zero() && self.dropout_prob <= T::one()) {
            return Err(Error::config(format!(
                "dropout_prob must be in [0, 1], got {}",
                self.dropout_prob
            )));
        }
        Ok(())
    }

    pub fn noiseless() -> Self {
        Self::default()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimScene<T> {
    /// Surfaces in the scene; the nearest hit along a ray wins.
    pub primitives: Vec<ScenePrimitive<T>>,
    pub rig: StereoRig<T>,
    pub timing: ScanTiming<T>,
}

impl<T: Scalar> SimScene<T> {
    pub fn new(
        primitives: Vec<ScenePrimitive<T>>,
        rig: StereoRig<T>,
        timing: ScanTiming<T>,
    ) -> Result<Self> {
        let scene = SimScene {
            primitives,
            rig,
            timing,
        };
        scene.validate()?;
        Ok(scene)
    }

    pub fn validate(&self) -> Result<()> {
        if self.primitives.is_empty() {
            return Err(Error::config("scene needs at least one primitive"));
        }
        for p in &self.primitives {
            p.validate()?;
        }
        self.rig.validate()?;
        self.timing.validate()?;
        if self.rig.projector.width != self.timing.lines
            || self.rig.projector.height != self.timing.pixels_per_line
        {
            return Err(Error::config(format!(
                "projector image {}x{} does not match a rotated raster of {} lines x {} pixels",
                self.rig.projector.width,
                self.rig.projector.height,
                self.timing.lines,
                self.timing.pixels_per_line
            )));
        }
        Ok(())
    }

    fn camera_hit(&self, dir: Point3<T>) -> Option<T> {
        nearest_hit(&self.primitives, &self.rig.camera, Point3::default(), dir)
    }

    fn projector_hit(&self, dir: Point3<T>) -> Option<Point3<T>> {
        let origin = self.rig.projector_center();
        nearest_hit(&self.primitives, &self.rig.camera, origin, dir).map(|s| origin + dir * s)
    }

    fn same_point(&self, a: T, b: T) -> bool {
        let tol = T::lit(1e-6).max(T::epsilon() * T::lit(256.0)) * (T::one() + a.abs());
        (a - b).abs() <= tol
    }
}

struct Raw<T> {
    x: usize,
    y: usize,
    t: T,
}

/// One scan pass. Deterministic in `(scene, noise, pass_index)`.
///
/// Projector pixels are visited in raster order. Each lit surface point that the
/// camera sees (in frame and not occluded) becomes one candidate event; the dropout
/// draw and the jitter draw are taken for every such candidate so the random stream
/// does not depend on the noise levels.
pub fn simulate_scan<T: Scalar>(
    scene: &SimScene<T>,
    noise: &NoiseConfig<T>,
    pass_index: u64,
) -> Result<EventStream<T>> {
    scene.validate()?;
    noise.validate()?;
    let rig = &scene.rig;
    let timing = &scene.timing;
    let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
    rng.set_stream(pass_index);

    let mut events: Vec<Event<T>> = Vec::new();
    let mut line_events: Vec<Raw<T>> = Vec::new();
    for line in 0..timing.lines {
        line_events.clear();
        for pixel in 0..timing.pixels_per_line {
            let q = Point2::new(T::from_usize_lossy(line), T::from_usize_lossy(pixel));
            let Some(point) = scene.projector_hit(rig.projector.ray(q)) else {
                continue;
            };
            let Some(uv) = rig.camera.project(point) else {
                continue;
            };
            let Some((x, y)) = rig.camera.pixel_of(uv) else {
                continue;
            };
            let visible = scene
                .camera_hit(rig.camera.ray(uv))
                .is_some_and(|z| scene.same_point(z, point.z));
            if !visible {
                continue;
            }
            let u: f64 = rng.random();
            let n: f64 = rng.sample(StandardNormal);
            if T::lit(u) < noise.dropout_prob {
                continue;
            }
            let t = timing.timestamp_unchecked(line, pixel)
                + noise.latency
                + noise.jitter_sigma * T::lit(n);
            line_events.push(Raw { x, y, t });
        }
        if noise.burst_group > 1 {
            apply_burst(&mut line_events, noise.burst_group);
        }
        events.extend(
            line_events
                .iter()
                .map(|r| Event::positive(r.x, r.y, quantize_timestamp(r.t))),
        );
    }
    events.sort_by(|a, b| a.t.partial_cmp(&b.t).expect("finite timestamp"));
    EventStream::new(
        events,
        rig.camera.width,
        rig.camera.height,
        timing.t0,
        timing.pass_duration_us(),
    )
}

/// Within one raster line, every event in a band of `group` camera rows takes the
/// earliest timestamp of that band.
fn apply_burst<T: Scalar>(events: &mut [Raw<T>], group: usize) {
    let mut first: Vec<(usize, T)> = Vec::new();
    for e in events.iter() {
        let band = e.y / group;
        match first.iter_mut().find(|(b, _)| *b == band) {
            Some((_, t)) => *t = t.min(e.t),
            None => first.push((band, e.t)),
        }
    }
    for e in events.iter_mut() {
        let band = e.y / group;
        e.t = first
            .iter()
            .find(|(b, _)| *b == band)
            .expect("band recorded")
            .1;
    }
}

/// Depth of the nearest surface along every camera pixel ray.
pub fn ground_truth_depth<T: Scalar>(scene: &SimScene<T>) -> DepthMap<T> {
    let cam = &scene.rig.camera;
    Grid::from_fn(cam.width, cam.height, |x, y| {
        scene.camera_hit(cam.ray(Point2::new(T::from_usize_lossy(x), T::from_usize_lossy(y))))
    })
}

/// Ground truth restricted to the region the projector can light: the surface point
/// seen by the pixel must be inside the projector image and not shadowed from it.
pub fn illuminated_ground_truth<T: Scalar>(scene: &SimScene<T>) -> DepthMap<T> {
    let rig = &scene.rig;
    let gt = ground_truth_depth(scene);
    Grid::from_fn(gt.width(), gt.height(), |x, y| {
        let z = gt.get(x, y)?;
        let point = rig
            .camera
            .ray(Point2::new(T::from_usize_lossy(x), T::from_usize_lossy(y)))
            * z;
        let q = rig.project_to_projector(point)?;
        if !rig.projector.contains(q) {
            return None;
        }
        let lit = scene.projector_hit(rig.projector.ray(q))?;
        scene.same_point(lit.z, z).then_some(z)
    })
}

/// Camera and projector time maps on the shared camera grid. The projector map is
/// offset by `latency_est` so a matching latency cancels.
pub fn matching_time_maps<T: Scalar>(
    scene: &SimScene<T>,
    stream: &EventStream<T>,
    latency_est: T,
) -> Result<(TimeMap<T>, TimeMap<T>)> {
    let tau_c = build_camera_time_map(stream, PolarityFilter::PositiveOnly)?;
    let tau_p = projector_time_map_on_camera_grid(&scene.timing.shifted(latency_est), &scene.rig)?;
    Ok((tau_c, tau_p))
}

/// Mean of the point-wise estimates of `passes` independent scans, pixel by pixel.
pub fn averaged_reference<T: Scalar>(
    scene: &SimScene<T>,
    noise: &NoiseConfig<T>,
    passes: usize,
) -> Result<DepthMap<T>> {
    if passes == 0 {
        return Err(Error::domain("averaged reference needs at least one pass"));
    }
    let cfg = Mc3dConfig {
        latency_est: noise.latency,
    };
    let maps: Vec<DepthMap<T>> = (0..passes as u64)
        .into_par_iter()
        .map(|pass| {
            mc3d_estimate(
                &simulate_scan(scene, noise, pass)?,
                &scene.timing,
                &scene.rig,
                &cfg,
            )
        })
        .collect::<Result<_>>()?;
    // Deviations from the first valid sample are summed, so identical passes average
    // to exactly that sample.
    let (w, h) = (maps[0].width(), maps[0].height());
    let mut base: Vec<Option<T>> = vec![None; w * h];
    let mut dev = vec![T::zero(); w * h];
    let mut count = vec![0usize; w * h];
    for m in &maps {
        for (i, v) in m.cells().iter().enumerate() {
            if let Some(v) = *v {
                let b = *base[i].get_or_insert(v);
                dev[i] += v - b;
                count[i] += 1;
            }
        }
    }
    let cells = base
        .into_iter()
        .zip(dev)
        .zip(count)
        .map(|((b, d), n)| b.map(|b| b + d / T::from_usize_lossy(n)))
        .collect();
    Grid::from_cells(w, h, cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{PinholeIntrinsics, StepSide};

    fn scene(prims: Vec<ScenePrimitive<f64>>) -> SimScene<f64> {
        let cam = PinholeIntrinsics::new(60.0, 60.0, 16.0, 12.0, 32, 24).unwrap();
        let rig = StereoRig::new(cam, cam, 0.05).unwrap();
        let timing = ScanTiming::new(1000.0, 32, 24, 0.0).unwrap();
        SimScene::new(prims, rig, timing).unwrap()
    }

    #[test]
    fn scene_rejects_mismatched_raster() {
        let mut s = scene(vec![ScenePrimitive::FrontoPlane { depth: 0.5 }]);
        s.timing.lines = 10;
        assert!(s.validate().is_err());
        s.timing.lines = 32;
        s.primitives.clear();
        assert!(s.validate().is_err());
    }

    #[test]
    fn full_dropout_is_silent() {
        let s = scene(vec![ScenePrimitive::FrontoPlane { depth: 0.5 }]);
        let noise = NoiseConfig {
            dropout_prob: 1.0,
            ..Default::default()
        };
        assert!(simulate_scan(&s, &noise, 0).unwrap().is_empty());
    }

    #[test]
    fn burst_shares_band_minimum() {
        let mut ev = vec![
            Raw { x: 0, y: 0, t: 5.0 },
            Raw { x: 0, y: 1, t: 3.0 },
            Raw { x: 0, y: 2, t: 7.0 },
        ];
        apply_burst(&mut ev, 2);
        assert_eq!(
            ev.iter().map(|e| e.t).collect::<Vec<_>>(),
            vec![3.0, 3.0, 7.0]
        );
    }

    #[test]
    fn step_ground_truth_has_two_depths() {
        let s = scene(vec![ScenePrimitive::StepEdge {
            near: 0.4,
            far: 0.6,
            split_column: 20.0,
            near_side: StepSide::Left,
        }]);
        let gt = ground_truth_depth(&s);
        for y in 0..24 {
            for x in 0..32 {
                assert_eq!(gt.get(x, y), Some(if x < 20 { 0.4 } else { 0.6 }));
            }
        }
    }

    #[test]
    fn zero_passes_rejected() {
        let s = scene(vec![ScenePrimitive::FrontoPlane { depth: 0.5 }]);
        assert!(averaged_reference(&s, &NoiseConfig::default(), 0).is_err());
    }
}
