//! Camera and projector models, raster scan timing, rectified point transfer and
//! scene primitives used to synthesize ground truth.
//!
//! All geometry lives in the rectified canonical frame: the camera sits at the origin
//! looking down +z, and the projector is translated by `baseline` along +x with the
//! same orientation. A scene point at depth `Z` seen at camera column `u` is lit by the
//! projector column `u - b F / Z` once the projector image is resampled to camera focal
//! scale, so disparity is always nonnegative for points in front of the rig.

use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

const MICROS_PER_SECOND: f64 = 1.0e6;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2<T> {
    pub x: T,
    pub y: T,
}

impl<T> Point2<T> {
    pub const fn new(x: T, y: T) -> Self {
        Point2 { x, y }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Scalar> Point3<T> {
    pub const fn new(x: T, y: T, z: T) -> Self {
        Point3 { x, y, z }
    }

    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn norm(self) -> T {
        self.dot(self).sqrt()
    }

    pub fn normalized(self) -> Self {
        self * (T::one() / self.norm())
    }
}

impl<T: Scalar> Add for Point3<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Point3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<T: Scalar> Sub for Point3<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Point3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<T: Scalar> Mul<T> for Point3<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        Point3::new(self.x * s, self.y * s, self.z * s)
    }
}

/// Raster scan timing of the laser point projector.
///
/// The projector is mounted rotated by 90 degrees, so each raster line is an image
/// *column* swept top to bottom, and consecutive lines advance left to right. Adjacent
/// pixels on a (horizontal) epipolar line are therefore one line period apart rather
/// than one pixel dwell apart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanTiming<T> {
    /// Scan frequency in Hz; one pass takes `1 / frequency` seconds.
    pub frequency: T,
    pub lines: usize,
    pub pixels_per_line: usize,
    /// Start of the scan pass, microseconds.
    pub t0: T,
}

impl<T: Scalar> ScanTiming<T> {
    pub fn new(frequency: T, lines: usize, pixels_per_line: usize, t0: T) -> Result<Self> {
        let timing = ScanTiming {
            frequency,
            lines,
            pixels_per_line,
            t0,
        };
        timing.validate()?;
        Ok(timing)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.frequency > T::zero()) || !self.frequency.is_finite() {
            return Err(Error::config(format!(
                "scan frequency must be positive, got {}",
                self.frequency
            )));
        }
        if self.lines == 0 || self.pixels_per_line == 0 {
            return Err(Error::config(
                "scan needs at least one line and one pixel per line",
            ));
        }
        if !self.t0.is_finite() {
            return Err(Error::config("scan start time must be finite"));
        }
        Ok(())
    }

    /// Dwell time per projector pixel, seconds.
    pub fn dt(&self) -> T {
        T::one() / (self.frequency * T::from_usize_lossy(self.lines * self.pixels_per_line))
    }

    /// Time to sweep one raster line, seconds.
    pub fn dt_line(&self) -> T {
        T::one() / (self.frequency * T::from_usize_lossy(self.lines))
    }

    pub fn pass_duration(&self) -> T {
        T::one() / self.frequency
    }

    pub fn dt_us(&self) -> T {
        self.dt() * T::lit(MICROS_PER_SECOND)
    }

    pub fn dt_line_us(&self) -> T {
        self.dt_line() * T::lit(MICROS_PER_SECOND)
    }

    pub fn pass_duration_us(&self) -> T {
        self.pass_duration() * T::lit(MICROS_PER_SECOND)
    }

    pub fn pixel_count(&self) -> usize {
        self.lines * self.pixels_per_line
    }

    /// Time (µs) at which the laser reaches `pixel_in_line` of raster line `line_index`.
    pub fn projector_timestamp(&self, line_index: usize, pixel_in_line: usize) -> Result<T> {
        if line_index >= self.lines || pixel_in_line >= self.pixels_per_line {
            return Err(Error::domain(format!(
                "projector pixel (line {line_index}, pixel {pixel_in_line}) outside {}x{} scan",
                self.lines, self.pixels_per_line
            )));
        }
        Ok(self.timestamp_unchecked(line_index, pixel_in_line))
    }

    #[inline]
    pub(crate) fn timestamp_unchecked(&self, line_index: usize, pixel_in_line: usize) -> T {
        self.t0
            + T::from_usize_lossy(line_index) * self.dt_line_us()
            + T::from_usize_lossy(pixel_in_line) * self.dt_us()
    }

    /// Same scan with its start shifted by `offset` microseconds.
    pub fn shifted(&self, offset: T) -> Self {
        ScanTiming {
            t0: self.t0 + offset,
            ..*self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PinholeIntrinsics<T> {
    pub fx: T,
    pub fy: T,
    pub cx: T,
    pub cy: T,
    pub width: usize,
    pub height: usize,
}

impl<T: Scalar> PinholeIntrinsics<T> {
    pub fn new(fx: T, fy: T, cx: T, cy: T, width: usize, height: usize) -> Result<Self> {
        let k = PinholeIntrinsics {
            fx,
            fy,
            cx,
            cy,
            width,
            height,
        };
        k.validate()?;
        Ok(k)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.fx > T::zero() && self.fy > T::zero()) {
            return Err(Error::config("focal lengths must be positive"));
        }
        if self.width == 0 || self.height == 0 {
            return Err(Error::config("sensor must have nonzero size"));
        }
        let (w, h) = (
            T::from_usize_lossy(self.width),
            T::from_usize_lossy(self.height),
        );
        if !(self.cx >= T::zero() && self.cx < w && self.cy >= T::zero() && self.cy < h) {
            return Err(Error::config(format!(
                "principal point ({}, {}) outside {}x{} sensor",
                self.cx, self.cy, self.width, self.height
            )));
        }
        Ok(())
    }

    /// Viewing ray direction through a pixel, scaled to unit depth.
    pub fn ray(&self, p: Point2<T>) -> Point3<T> {
        Point3::new(
            (p.x - self.cx) / self.fx,
            (p.y - self.cy) / self.fy,
            T::one(),
        )
    }

    /// Perspective projection of a point given in this device's frame.
    pub fn project(&self, p: Point3<T>) -> Option<Point2<T>> {
        if !(p.z > T::zero()) {
            return None;
        }
        Some(Point2::new(
            self.fx * p.x / p.z + self.cx,
            self.fy * p.y / p.z + self.cy,
        ))
    }

    /// Whether a continuous pixel coordinate rounds to a pixel inside the sensor.
    pub fn contains(&self, p: Point2<T>) -> bool {
        let half = T::lit(0.5);
        p.x >= -half
            && p.y >= -half
            && p.x < T::from_usize_lossy(self.width) - half
            && p.y < T::from_usize_lossy(self.height) - half
    }

    /// Nearest integer pixel, if inside the sensor.
    pub fn pixel_of(&self, p: Point2<T>) -> Option<(usize, usize)> {
        if !self.contains(p) {
            return None;
        }
        let x = (p.x + T::lit(0.5)).floor().to_usize()?;
        let y = (p.y + T::lit(0.5)).floor().to_usize()?;
        (x < self.width && y < self.height).then_some((x, y))
    }
}

/// Result of transferring a camera pixel to the projector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transfer<T> {
    /// Projector point on the canonical (camera focal scale) grid.
    pub point: Point2<T>,
    /// False when the point lies outside the physical projector image.
    pub in_frustum: bool,
}

/// Rectified camera/projector pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StereoRig<T> {
    pub camera: PinholeIntrinsics<T>,
    pub projector: PinholeIntrinsics<T>,
    /// Camera-to-projector distance along +x, meters.
    pub baseline: T,
    pub rectified: bool,
}

impl<T: Scalar> StereoRig<T> {
    pub fn new(
        camera: PinholeIntrinsics<T>,
        projector: PinholeIntrinsics<T>,
        baseline: T,
    ) -> Result<Self> {
        let rig = StereoRig {
            camera,
            projector,
            baseline,
            rectified: true,
        };
        rig.validate()?;
        Ok(rig)
    }

    pub fn validate(&self) -> Result<()> {
        self.camera.validate()?;
        self.projector.validate()?;
        if !(self.baseline > T::zero()) {
            return Err(Error::config(format!(
                "baseline must be positive, got {}",
                self.baseline
            )));
        }
        Ok(())
    }

    /// Rectified focal length used for triangulation (camera fx).
    #[inline]
    pub fn focal(&self) -> T {
        self.camera.fx
    }

    pub fn projector_center(&self) -> Point3<T> {
        Point3::new(self.baseline, T::zero(), T::zero())
    }

    pub fn disparity_from_depth(&self, depth: T) -> Result<T> {
        if !(depth > T::zero()) {
            return Err(Error::domain(format!(
                "depth must be positive, got {depth}"
            )));
        }
        Ok(self.baseline * self.focal() / depth)
    }

    /// `b F / d`; `None` marks a nonpositive (infinitely far or unphysical) disparity.
    pub fn depth_from_disparity(&self, disparity: T) -> Option<T> {
        (disparity > T::zero()).then(|| self.baseline * self.focal() / disparity)
    }

    pub fn transfer_camera_to_projector(&self, x_c: Point2<T>, depth: T) -> Result<Transfer<T>> {
        if !self.rectified {
            return Err(Error::domain("point transfer requires a rectified rig"));
        }
        if !self.camera.contains(x_c) {
            return Err(Error::domain(format!(
                "camera pixel ({}, {}) outside sensor",
                x_c.x, x_c.y
            )));
        }
        let d = self.disparity_from_depth(depth)?;
        let point = Point2::new(x_c.x - d, x_c.y);
        let in_frustum = self.projector.contains(self.canonical_to_projector(point));
        Ok(Transfer { point, in_frustum })
    }

    /// Maps a canonical-grid coordinate to the physical projector image.
    pub fn canonical_to_projector(&self, p: Point2<T>) -> Point2<T> {
        let (c, q) = (&self.camera, &self.projector);
        Point2::new(
            q.fx * (p.x - c.cx) / c.fx + q.cx,
            q.fy * (p.y - c.cy) / c.fy + q.cy,
        )
    }

    /// Inverse of [`canonical_to_projector`](Self::canonical_to_projector).
    pub fn projector_to_canonical(&self, p: Point2<T>) -> Point2<T> {
        let (c, q) = (&self.camera, &self.projector);
        Point2::new(
            c.fx * (p.x - q.cx) / q.fx + c.cx,
            c.fy * (p.y - q.cy) / q.fy + c.cy,
        )
    }

    /// Projects a camera-frame point into the physical projector image.
    pub fn project_to_projector(&self, p: Point3<T>) -> Option<Point2<T>> {
        self.projector.project(p - self.projector_center())
    }
}

/// Analytic scene surfaces used as synthetic ground truth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScenePrimitive<T> {
    /// Plane `z = depth`.
    FrontoPlane {
        depth: T,
    },
    /// Plane `normal . X = offset`, camera frame.
    SlantedPlane {
        normal: Point3<T>,
        offset: T,
    },
    Sphere {
        center: Point3<T>,
        radius: T,
    },
    /// Two fronto-parallel half planes meeting at the camera ray through
    /// `split_column`. The near plane covers the columns on `near_side` of it; the
    /// split column itself belongs to the right-hand plane.
    StepEdge {
        near: T,
        far: T,
        split_column: T,
        near_side: StepSide,
    },
}

/// Which side of a step edge the near plane occupies, as seen by the camera.
///
/// With the projector to the right of the camera, a near plane on the right casts a
/// shadow onto the far plane next to the edge; a near plane on the left hides part of
/// the lit far plane from the camera instead.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StepSide {
    #[default]
    Left,
    Right,
}

impl<T: Scalar> ScenePrimitive<T> {
    /// Builds a slanted plane through the point on the optical axis at `center_depth`.
    pub fn slanted_plane(normal: Point3<T>, center_depth: T) -> Self {
        let normal = normal.normalized();
        ScenePrimitive::SlantedPlane {
            normal,
            offset: normal.z * center_depth,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            ScenePrimitive::FrontoPlane { depth } => depth > T::zero(),
            ScenePrimitive::SlantedPlane { normal, offset } => {
                (normal.norm() - T::one()).abs() < T::lit(1e-6)
                    && normal.z != T::zero()
                    && offset / normal.z > T::zero()
            }
            ScenePrimitive::Sphere { center, radius } => radius > T::zero() && center.z > T::zero(),
            ScenePrimitive::StepEdge { near, far, .. } => {
                near > T::zero() && far > T::zero() && near < far
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::config(format!("invalid scene primitive {self:?}")))
        }
    }

    /// Ray parameter of the nearest positive hit of `origin + s * dir`.
    ///
    /// Callers pass `origin.z == 0` and `dir.z == 1`, so the parameter equals the depth
    /// of the hit point.
    pub fn intersect(
        &self,
        camera: &PinholeIntrinsics<T>,
        origin: Point3<T>,
        dir: Point3<T>,
    ) -> Option<T> {
        let eps = T::lit(1e-12);
        match *self {
            ScenePrimitive::FrontoPlane { depth } => {
                let s = (depth - origin.z) / dir.z;
                (s > eps).then_some(s)
            }
            ScenePrimitive::SlantedPlane { normal, offset } => {
                let denom = normal.dot(dir);
                if denom == T::zero() {
                    return None;
                }
                let s = (offset - normal.dot(origin)) / denom;
                (s > eps).then_some(s)
            }
            ScenePrimitive::Sphere { center, radius } => {
                let oc = origin - center;
                let a = dir.dot(dir);
                let half_b = dir.dot(oc);
                let c = oc.dot(oc) - radius * radius;
                let disc = half_b * half_b - a * c;
                if disc < T::zero() {
                    return None;
                }
                let root = disc.sqrt();
                let near = (-half_b - root) / a;
                if near > eps {
                    return Some(near);
                }
                let far = (-half_b + root) / a;
                (far > eps).then_some(far)
            }
            ScenePrimitive::StepEdge {
                near,
                far,
                split_column,
                near_side,
            } => {
                let slope = (split_column - camera.cx) / camera.fx;
                let hit = |depth: T, on_near_side: bool| {
                    let s = (depth - origin.z) / dir.z;
                    if !(s > eps) {
                        return None;
                    }
                    let x = origin.x + s * dir.x;
                    let edge = depth * slope;
                    let near_here = match near_side {
                        StepSide::Left => x < edge,
                        StepSide::Right => x >= edge,
                    };
                    let accepted = on_near_side == near_here;
                    accepted.then_some(s)
                };
                match (hit(near, true), hit(far, false)) {
                    (Some(a), Some(b)) => Some(a.min(b)),
                    (a, b) => a.or(b),
                }
            }
        }
    }
}

/// Depth of the nearest hit of the camera ray through pixel `x_c`, or `None` on a miss.
pub fn intersect_camera_ray<T: Scalar>(
    primitive: &ScenePrimitive<T>,
    rig: &StereoRig<T>,
    x_c: Point2<T>,
) -> Option<T> {
    primitive.intersect(&rig.camera, Point3::default(), rig.camera.ray(x_c))
}

/// Camera-frame point lit by the projector ray through physical projector pixel `x_p`.
pub fn intersect_projector_ray<T: Scalar>(
    primitive: &ScenePrimitive<T>,
    rig: &StereoRig<T>,
    x_p: Point2<T>,
) -> Option<Point3<T>> {
    let origin = rig.projector_center();
    let dir = rig.projector.ray(x_p);
    primitive
        .intersect(&rig.camera, origin, dir)
        .map(|s| origin + dir * s)
}

/// Nearest hit over a list of primitives along a ray, as a ray parameter.
pub fn nearest_hit<T: Scalar>(
    primitives: &[ScenePrimitive<T>],
    camera: &PinholeIntrinsics<T>,
    origin: Point3<T>,
    dir: Point3<T>,
) -> Option<T> {
    primitives
        .iter()
        .filter_map(|p| p.intersect(camera, origin, dir))
        .fold(None, |best: Option<T>, s| {
            Some(best.map_or(s, |b| b.min(s)))
        })
}
