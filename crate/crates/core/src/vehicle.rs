//! Differential-drive (unicycle) kinematics.
//!
//! A pose advances under a constant body-frame velocity command using the
//! exact closed-form arc solution rather than per-step Euler integration, so
//! results are independent of how finely callers subdivide time.

use std::f64::consts::PI;

use thiserror::Error;

/// Largest |w| (rad/s) treated as "driving straight". Below this the arc
/// radius v/w is numerically meaningless and the limit formula is exact.
pub const STRAIGHT_LINE_OMEGA: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VehicleError {
    #[error("velocity command v={v}, w={w} out of range (finite, |v| <= 1.0, |w| <= 2.0)")]
    CommandOutOfRange { v: f64, w: f64 },
}

/// Robot pose in world coordinates (meters, radians).
///
/// The heading is always kept normalized to `(-pi, pi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobotPose {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

impl RobotPose {
    /// Builds a pose, normalizing the heading into `(-pi, pi]`.
    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        RobotPose {
            x,
            y,
            theta: normalize_angle(theta),
        }
    }
}

/// Body-frame velocity command: forward speed `v` (m/s) and yaw rate `w`
/// (rad/s). Commands are validated once at construction; `|v| <= 1.0` and
/// `|w| <= 2.0` are sanity bounds for this toolkit, not physical limits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocityCommand {
    v: f64,
    w: f64,
}

impl VelocityCommand {
    pub fn new(v: f64, w: f64) -> Result<Self, VehicleError> {
        if !v.is_finite() || !w.is_finite() || v.abs() > 1.0 || w.abs() > 2.0 {
            return Err(VehicleError::CommandOutOfRange { v, w });
        }
        Ok(VelocityCommand { v, w })
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    pub fn w(&self) -> f64 {
        self.w
    }
}

/// Normalizes an angle to `(-pi, pi]`.
pub fn normalize_angle(a: f64) -> f64 {
    PI - (PI - a).rem_euclid(2.0 * PI)
}

/// Smallest signed difference `a - b` in `(-pi, pi]`.
pub fn angle_difference(a: f64, b: f64) -> f64 {
    normalize_angle(a - b)
}

/// Advances `pose` under constant `cmd` for `dt > 0` seconds.
///
/// For `|w| >= STRAIGHT_LINE_OMEGA` the robot follows a circular arc of
/// radius v/w:
///
/// ```text
/// x' = x + (v/w) * (sin(theta + w dt) - sin(theta))
/// y' = y - (v/w) * (cos(theta + w dt) - cos(theta))
/// theta' = theta + w dt
/// ```
///
/// otherwise it moves in a straight line along the current heading. The
/// returned heading is normalized to `(-pi, pi]`.
pub fn integrate(pose: RobotPose, cmd: VelocityCommand, dt: f64) -> RobotPose {
    debug_assert!(dt > 0.0, "integration requires dt > 0");
    let (v, w) = (cmd.v(), cmd.w());
    if w.abs() < STRAIGHT_LINE_OMEGA {
        RobotPose::new(
            pose.x + v * dt * pose.theta.cos(),
            pose.y + v * dt * pose.theta.sin(),
            pose.theta + w * dt,
        )
    } else {
        let radius = v / w;
        let heading = pose.theta + w * dt;
        RobotPose::new(
            pose.x + radius * (heading.sin() - pose.theta.sin()),
            pose.y - radius * (heading.cos() - pose.theta.cos()),
            heading,
        )
    }
}
