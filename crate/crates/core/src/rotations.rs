//! Algebra of rescaled Rodrigues rotation vectors.
//!
//! A rotation of angle `‖θ‖ < π` about the axis `θ̂` is stored as the
//! rescaled Rodrigues vector
//!
//! ```text
//! α = 2 tan(‖θ‖/2) θ̂
//! ```
//!
//! twice the classical Gibbs vector. The representation covers every rotation
//! except angle π exactly, the associated rotation matrix is a rational
//! function of α (no trigonometry), and the composition of two rotations is a
//! closed-form algebraic expression that lands back in SO(3) automatically.
//!
//! Composition order convention: `a.compose(b)` is the rotation obtained by
//! applying `a` first and `b` second, i.e.
//!
//! ```text
//! R(a ⊕ b) = R(b) · R(a)
//! ```
//!
//! so composing a state attitude with an increment built from the *spatial*
//! angular velocity is a left (inertial-frame) update. Every routine in this
//! module is a pure function of its inputs and safe to call concurrently.

use crate::error::Error;
use crate::Result;
use nalgebra as na;

pub type Vec3 = na::Vector3<f64>;
pub type Mat3 = na::Matrix3<f64>;

/// Guard on the composition denominator `4 − a·b`; at `a·b = 4` the composed
/// angle reaches π and the representation blows up.
const COMPOSE_GUARD: f64 = 1e-9;

/// Below this rotation angle the tan/atan rescaling factors are evaluated by
/// truncated series to avoid 0/0.
const SMALL_ANGLE: f64 = 1e-4;

/// Cross-product (skew-symmetric) matrix: `skew(v) * w == v × w`.
pub fn skew(v: &Vec3) -> Mat3 {
    Mat3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// Inverse of [`skew`]: extract the axial vector of an antisymmetric matrix.
///
/// Fails with [`Error::NotAntisymmetric`] if the symmetric part exceeds
/// `1e-8` of the matrix norm.
pub fn unskew(m: &Mat3) -> Result<Vec3> {
    let defect = (m + m.transpose()).norm();
    let norm = m.norm();
    if defect > 1e-8 * norm {
        return Err(Error::NotAntisymmetric { defect, norm });
    }
    // Average the two off-diagonal copies of each component.
    Ok(Vec3::new(
        0.5 * (m[(2, 1)] - m[(1, 2)]),
        0.5 * (m[(0, 2)] - m[(2, 0)]),
        0.5 * (m[(1, 0)] - m[(0, 1)]),
    ))
}

/// A rotation stored as a rescaled Rodrigues vector `α = 2 tan(‖θ‖/2) θ̂`.
///
/// Any finite vector is a valid rotation; the represented angle
/// `2 arctan(‖α‖/2)` lies in `[0, π)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RodriguesVector(pub Vec3);

impl Default for RodriguesVector {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl RodriguesVector {
    /// The identity rotation.
    pub const IDENTITY: Self = RodriguesVector(Vec3::new(0.0, 0.0, 0.0));

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        RodriguesVector(Vec3::new(x, y, z))
    }

    /// Convert an Euler rotation vector (axis-angle exponential coordinates,
    /// `R = e^{S(θ)}`) to the rescaled Rodrigues form.
    ///
    /// Fails with [`Error::AngleOutOfRange`] for `‖θ‖ ≥ π − 1e-9`, where the
    /// representation is singular.
    pub fn from_euler(theta: &Vec3) -> Result<Self> {
        let t = theta.norm();
        if t >= std::f64::consts::PI - 1e-9 {
            return Err(Error::AngleOutOfRange { angle: t });
        }
        // α = θ · tan(t/2)/(t/2); series for small t keeps C¹ continuity.
        let factor = if t < SMALL_ANGLE {
            let t2 = t * t;
            1.0 + t2 / 12.0 + t2 * t2 / 120.0
        } else {
            (t / 2.0).tan() / (t / 2.0)
        };
        Ok(RodriguesVector(theta * factor))
    }

    /// Convert back to the Euler rotation vector, `‖θ‖ = 2 arctan(‖α‖/2)`.
    pub fn to_euler(&self) -> Vec3 {
        let x = self.0.norm();
        let factor = if x < SMALL_ANGLE {
            let x2 = x * x;
            1.0 - x2 / 12.0 + x2 * x2 / 80.0
        } else {
            2.0 * (x / 2.0).atan() / x
        };
        self.0 * factor
    }

    /// Rotation angle in radians, `2 arctan(‖α‖/2) ∈ [0, π)`.
    ///
    /// This equals `‖log R‖_F / √2` and is the rotation term of the
    /// trajectory norm used by the diagnostics.
    pub fn angle(&self) -> f64 {
        2.0 * (self.0.norm() / 2.0).atan()
    }

    /// Reconstruct the rotation matrix:
    ///
    /// ```text
    /// R(α) = I + 4/(4 + ‖α‖²) [S(α) + ½ S(α)²]
    /// ```
    ///
    /// The result is orthonormal with unit determinant for any finite α,
    /// without normalization.
    pub fn rotation_matrix(&self) -> RotationMatrix {
        let s = skew(&self.0);
        let c = 4.0 / (4.0 + self.0.norm_squared());
        RotationMatrix(Mat3::identity() + (s + 0.5 * s * s) * c)
    }

    /// Compose two rotations: apply `self` first, then `other`.
    ///
    /// ```text
    /// a ⊕ b = 4/(4 − a·b) [a + b − ½ a×b],      R(a ⊕ b) = R(b) R(a)
    /// ```
    ///
    /// The representation is projective: when the composed angle passes π
    /// the signed denominator wraps the result to the equivalent short
    /// rotation, so trajectories may revolve freely. Only a composed angle
    /// of exactly π is unrepresentable; [`Error::CompositionSingular`] is
    /// returned when `a·b` falls inside the guard band around 4 where the
    /// denominator vanishes.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        let dot = self.0.dot(&other.0);
        let denom = 4.0 - dot;
        if denom.abs() < COMPOSE_GUARD {
            return Err(Error::CompositionSingular { dot });
        }
        let num = self.0 + other.0 - 0.5 * self.0.cross(&other.0);
        Ok(RodriguesVector(num * (4.0 / denom)))
    }

    /// The inverse rotation: `R(−α) = R(α)ᵀ`.
    pub fn inverse(&self) -> Self {
        RodriguesVector(-self.0)
    }
}

/// Relative rotation between two attitudes, defined by the matrix identity
///
/// ```text
/// R(relative_rotation(a_i, a_j)) = R(a_i) · R(a_j)ᵀ
/// ```
///
/// Under the composition convention of this module that is
/// `a_j.inverse() ⊕ a_i`.
pub fn relative_rotation(a_i: &RodriguesVector, a_j: &RodriguesVector) -> Result<RodriguesVector> {
    a_j.inverse().compose(a_i)
}

/// A rotation matrix reconstructed from a rescaled Rodrigues vector.
///
/// Orthonormal with determinant +1 by construction (up to roundoff); no
/// reprojection is performed anywhere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RotationMatrix(Mat3);

impl RotationMatrix {
    pub const IDENTITY: Self =
        RotationMatrix(Mat3::new(1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0));

    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    /// Rotate a vector: `R v` (body frame to inertial frame).
    pub fn apply(&self, v: &Vec3) -> Vec3 {
        self.0 * v
    }

    /// Rotate by the inverse: `Rᵀ v` (inertial frame to body frame).
    pub fn apply_transpose(&self, v: &Vec3) -> Vec3 {
        self.0.transpose() * v
    }

    /// `‖RᵀR − I‖_F`, for validity checks in tests and diagnostics.
    pub fn orthonormality_defect(&self) -> f64 {
        (self.0.transpose() * self.0 - Mat3::identity()).norm()
    }

    pub fn determinant(&self) -> f64 {
        self.0.determinant()
    }
}
