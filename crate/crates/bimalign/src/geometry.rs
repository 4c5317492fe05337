//! Rigid-body transforms, the pinhole camera model, and the primitive
//! distance kernels everything else is built on.
//!
//! Conventions used throughout the crate:
//!
//! * Poses are world-from-camera: `apply` maps camera-frame points into
//!   the world frame.
//! * The camera looks along +z, +x right, +y down (pinhole convention).
//! * Euler angles are intrinsic Z-Y-X (yaw, then pitch, then roll),
//!   reported in degrees.

use nalgebra::{Matrix3, Unit, UnitQuaternion, Vector2, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scene::SemanticClass;

pub const DEG_PER_RAD: f64 = 180.0 / std::f64::consts::PI;
pub const RAD_PER_DEG: f64 = std::f64::consts::PI / 180.0;

/// Rigid SE(3) transform: rotation stored as a unit quaternion plus a
/// translation in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub rotation: UnitQuaternion<f64>,
    pub translation: Vector3<f64>,
}

impl Pose {
    pub fn identity() -> Self {
        Pose {
            rotation: UnitQuaternion::identity(),
            translation: Vector3::zeros(),
        }
    }

    pub fn new(rotation: UnitQuaternion<f64>, translation: Vector3<f64>) -> Self {
        Pose {
            rotation,
            translation,
        }
    }

    pub fn from_translation(t: Vector3<f64>) -> Self {
        Pose::new(UnitQuaternion::identity(), t)
    }

    /// Rotation about the world z axis, degrees.
    pub fn from_yaw_deg(yaw: f64) -> Self {
        Pose::new(
            UnitQuaternion::from_axis_angle(&Vector3::z_axis(), yaw * RAD_PER_DEG),
            Vector3::zeros(),
        )
    }

    /// Intrinsic Z-Y-X composition from degrees.
    pub fn from_yaw_pitch_roll_deg(yaw: f64, pitch: f64, roll: f64) -> Self {
        Pose::new(
            UnitQuaternion::from_euler_angles(
                roll * RAD_PER_DEG,
                pitch * RAD_PER_DEG,
                yaw * RAD_PER_DEG,
            ),
            Vector3::zeros(),
        )
    }

    /// `compose(a, b)` applies `b` first, then `a`.
    pub fn compose(&self, other: &Pose) -> Pose {
        Pose {
            rotation: self.rotation * other.rotation,
            translation: self.rotation * other.translation + self.translation,
        }
    }

    pub fn inverse(&self) -> Pose {
        let inv_rot = self.rotation.inverse();
        Pose {
            rotation: inv_rot,
            translation: -(inv_rot * self.translation),
        }
    }

    /// R·x + t.
    pub fn apply(&self, x: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * x + self.translation
    }

    /// Left-multiplied local update: rotation gets `exp(omega)` on the
    /// left, translation is additive. This is the optimizer's 6-parameter
    /// chart around the current pose.
    pub fn retract(&self, omega: &Vector3<f64>, delta_t: &Vector3<f64>) -> Pose {
        Pose {
            rotation: UnitQuaternion::from_scaled_axis(*omega) * self.rotation,
            translation: self.translation + delta_t,
        }
    }

    /// Geodesic angle of the relative rotation between two poses, degrees
    /// in [0, 180].
    pub fn rotation_geodesic_deg(a: &Pose, b: &Pose) -> f64 {
        a.rotation.angle_to(&b.rotation) * DEG_PER_RAD
    }

    /// Intrinsic Z-Y-X Euler decomposition of the rotation, in degrees.
    pub fn to_yaw_pitch_roll(&self) -> EulerAngles {
        euler_zyx_deg(&self.rotation.to_rotation_matrix().into_inner())
    }
}

/// Yaw/pitch/roll in degrees. `gimbal_degenerate` is set when |pitch| is
/// within 1e-6 degrees of 90; roll is then 0 by convention and yaw absorbs
/// the remaining freedom.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EulerAngles {
    pub yaw: f64,
    pub pitch: f64,
    pub roll: f64,
    pub gimbal_degenerate: bool,
}

/// Decompose a rotation matrix as Rz(yaw)·Ry(pitch)·Rx(roll), degrees.
pub fn euler_zyx_deg(r: &Matrix3<f64>) -> EulerAngles {
    let sin_pitch = (-r[(2, 0)]).clamp(-1.0, 1.0);
    let pitch = sin_pitch.asin();
    let gimbal = (pitch.abs() * DEG_PER_RAD - 90.0).abs() < 1e-6;
    if gimbal {
        // cos(pitch) = 0: yaw and roll share an axis. Fix roll = 0.
        let yaw = f64::atan2(-r[(0, 1)], r[(1, 1)]);
        EulerAngles {
            yaw: yaw * DEG_PER_RAD,
            pitch: pitch * DEG_PER_RAD,
            roll: 0.0,
            gimbal_degenerate: true,
        }
    } else {
        let yaw = f64::atan2(r[(1, 0)], r[(0, 0)]);
        let roll = f64::atan2(r[(2, 1)], r[(2, 2)]);
        EulerAngles {
            yaw: yaw * DEG_PER_RAD,
            pitch: pitch * DEG_PER_RAD,
            roll: roll * DEG_PER_RAD,
            gimbal_degenerate: false,
        }
    }
}

/// Undistorted pinhole camera. `extrinsic` is the camera-from-LiDAR
/// transform for externally ingested data; the built-in simulator works
/// directly in the camera frame and leaves it at identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CameraModel {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: u32,
    pub height: u32,
    #[serde(default = "Pose::identity")]
    pub extrinsic: Pose,
}

impl CameraModel {
    pub fn new(fx: f64, fy: f64, cx: f64, cy: f64, width: u32, height: u32) -> Result<Self> {
        let cam = CameraModel {
            fx,
            fy,
            cx,
            cy,
            width,
            height,
            extrinsic: Pose::identity(),
        };
        cam.validate()?;
        Ok(cam)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.fx > 0.0 && self.fy > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "focal lengths must be positive, got fx={} fy={}",
                self.fx, self.fy
            )));
        }
        let cx_ok = self.cx >= 0.0 && self.cx < self.width as f64;
        let cy_ok = self.cy >= 0.0 && self.cy < self.height as f64;
        if !(cx_ok && cy_ok) {
            return Err(Error::InvalidArgument(format!(
                "principal point ({}, {}) outside image {}x{}",
                self.cx, self.cy, self.width, self.height
            )));
        }
        Ok(())
    }

    /// Pinhole projection. Returns `None` (out of view) when the point is
    /// behind the camera or projects outside the image bounds.
    pub fn project(&self, x_cam: &Vector3<f64>) -> Option<(f64, f64)> {
        if x_cam.z <= 0.0 {
            return None;
        }
        let u = self.fx * x_cam.x / x_cam.z + self.cx;
        let v = self.fy * x_cam.y / x_cam.z + self.cy;
        if u < 0.0 || u >= self.width as f64 || v < 0.0 || v >= self.height as f64 {
            return None;
        }
        Some((u, v))
    }

    /// Inverse pinhole at z-depth `depth` (meters).
    pub fn backproject(&self, u: f64, v: f64, depth: f64) -> Result<Vector3<f64>> {
        if !(depth > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "backproject needs positive depth, got {depth}"
            )));
        }
        Ok(Vector3::new(
            (u - self.cx) / self.fx * depth,
            (v - self.cy) / self.fy * depth,
            depth,
        ))
    }

    /// Unit-z ray direction through pixel (u, v) in the camera frame. The
    /// parameter along this direction is the z-depth directly.
    pub fn ray_direction(&self, u: f64, v: f64) -> Vector3<f64> {
        Vector3::new((u - self.cx) / self.fx, (v - self.cy) / self.fy, 1.0)
    }
}

/// Plane n·x = offset with unit normal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Plane {
    pub normal: Unit<Vector3<f64>>,
    pub offset: f64,
}

impl Plane {
    pub fn new(normal: Vector3<f64>, offset: f64) -> Result<Self> {
        let norm = normal.norm();
        if norm < 1e-12 {
            return Err(Error::InvalidArgument(
                "plane normal must be nonzero".into(),
            ));
        }
        // Rescale so the same point set satisfies n̂·x = offset/|n|.
        Ok(Plane {
            normal: Unit::new_normalize(normal),
            offset: offset / norm,
        })
    }

    /// Horizontal plane z = height with +z normal.
    pub fn horizontal(height: f64) -> Self {
        Plane {
            normal: Vector3::z_axis(),
            offset: height,
        }
    }

    /// Signed distance n·x − offset.
    pub fn signed_distance(&self, x: &Vector3<f64>) -> f64 {
        self.normal.dot(x) - self.offset
    }
}

/// Signed point-to-plane distance (meters).
pub fn point_to_plane(x: &Vector3<f64>, plane: &Plane) -> f64 {
    plane.signed_distance(x)
}

/// 2D line segment with a wall/column semantic class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment2D {
    pub start: Vector2<f64>,
    pub end: Vector2<f64>,
    pub class: SemanticClass,
}

impl Segment2D {
    pub fn new(start: Vector2<f64>, end: Vector2<f64>, class: SemanticClass) -> Result<Self> {
        if (end - start).norm() <= 1e-6 {
            return Err(Error::InvalidArgument(format!(
                "degenerate segment: start {:?} too close to end {:?}",
                start, end
            )));
        }
        Ok(Segment2D { start, end, class })
    }

    pub fn length(&self) -> f64 {
        (self.end - self.start).norm()
    }

    /// Closest point on the closed segment and the distance to it.
    pub fn closest_point(&self, x: &Vector2<f64>) -> (f64, Vector2<f64>) {
        let d = self.end - self.start;
        let t = ((x - self.start).dot(&d) / d.norm_squared()).clamp(0.0, 1.0);
        let closest = self.start + d * t;
        ((x - closest).norm(), closest)
    }

    /// Signed distance used by the optimizer's wall/column residuals:
    /// magnitude equals the closed-segment distance, sign tells which side
    /// of the (extended) segment line the point lies on, so the residual is
    /// continuous across the endpoint clamp boundary.
    pub fn signed_distance(&self, x: &Vector2<f64>) -> f64 {
        let d = self.end - self.start;
        let len = d.norm();
        let u = d / len;
        let normal = Vector2::new(-u.y, u.x);
        let rel = x - self.start;
        let along = rel.dot(&u);
        let side = rel.dot(&normal);
        if along >= 0.0 && along <= len {
            side
        } else {
            let endpoint = if along < 0.0 { self.start } else { self.end };
            let dist = (x - endpoint).norm();
            if side >= 0.0 {
                dist
            } else {
                -dist
            }
        }
    }
}

/// Euclidean distance to the closest point on a closed segment.
pub fn point_to_segment(x: &Vector2<f64>, s: &Segment2D) -> (f64, Vector2<f64>) {
    s.closest_point(x)
}
