use std::f64::consts::PI;

/// A planar rigid-body motion: rotation by `theta` about the origin followed
/// by translation `(tx, ty)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose2D {
    pub tx: f64,
    pub ty: f64,
    /// Rotation angle in radians, normalized to `[-pi, pi)`.
    pub theta: f64,
}

impl Pose2D {
    pub fn new(tx: f64, ty: f64, theta: f64) -> Self {
        Pose2D {
            tx,
            ty,
            theta: normalize_angle(theta),
        }
    }

    pub fn identity() -> Self {
        Pose2D {
            tx: 0.0,
            ty: 0.0,
            theta: 0.0,
        }
    }

    /// Map a point from the pose's source frame into the target frame.
    pub fn apply(&self, p: (f64, f64)) -> (f64, f64) {
        let (s, c) = self.theta.sin_cos();
        (c * p.0 - s * p.1 + self.tx, s * p.0 + c * p.1 + self.ty)
    }

    /// The inverse motion, so `pose.inverse().apply(pose.apply(p)) == p`.
    pub fn inverse(&self) -> Self {
        let (s, c) = self.theta.sin_cos();
        Pose2D::new(
            -(c * self.tx + s * self.ty),
            s * self.tx - c * self.ty,
            -self.theta,
        )
    }

    /// Composition `self ∘ other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &Pose2D) -> Self {
        let (s, c) = self.theta.sin_cos();
        Pose2D::new(
            c * other.tx - s * other.ty + self.tx,
            s * other.tx + c * other.ty + self.ty,
            self.theta + other.theta,
        )
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.tx.abs() <= tol && self.ty.abs() <= tol && self.theta.abs() <= tol
    }
}

/// Wrap an angle to `[-pi, pi)`.
pub fn normalize_angle(a: f64) -> f64 {
    let mut a = a % (2.0 * PI);
    if a < -PI {
        a += 2.0 * PI;
    } else if a >= PI {
        a -= 2.0 * PI;
    }
    a
}
