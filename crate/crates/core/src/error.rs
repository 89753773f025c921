use thiserror::Error;

/// Errors produced by the rotation algebra, the steppers and the diagnostics.
#[derive(Debug, Error)]
pub enum Error {
    /// `unskew` was handed a matrix with a symmetric part above tolerance.
    #[error("matrix is not antisymmetric (‖m + mᵀ‖_F = {defect:.3e}, ‖m‖_F = {norm:.3e})")]
    NotAntisymmetric { defect: f64, norm: f64 },

    /// Euler rotation vector with angle at or beyond π, which the rescaled
    /// Rodrigues vector cannot represent.
    #[error("rotation angle {angle} rad is outside the representable range [0, π)")]
    AngleOutOfRange { angle: f64 },

    /// Composition of two rotations whose combined angle reaches π, where the
    /// composition denominator vanishes.
    #[error("rotation composition is singular (a·b = {dot}, composed angle reaches π)")]
    CompositionSingular { dot: f64 },

    /// The incremental rotation of a single step reached π/2; the time step
    /// is too large for the current angular velocity.
    #[error("incremental rotation reached π/2 (h²‖ω + (h/2J)·m‖² = {discriminant} ≥ 1); reduce the time step")]
    IncrementTooLarge { discriminant: f64 },

    /// Two interacting bodies have (numerically) coincident centers, so no
    /// interaction direction can be formed.
    #[error("bodies {i} and {j} have coincident centers (separation {separation:.3e})")]
    CoincidentCenters { i: usize, j: usize, separation: f64 },

    /// A scenario builder was given parameters that describe no valid geometry.
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    /// A trajectory handed to a quadrature routine is not uniformly sampled.
    #[error("trajectory samples are not on a uniform time grid (spacing {found} vs {expected})")]
    NonuniformGrid { expected: f64, found: f64 },

    /// The reference energy for a relative energy error is zero.
    #[error("reference energy is zero; relative energy error is undefined")]
    ZeroReferenceEnergy,

    /// Two trajectories that must span the same time interval do not.
    #[error("trajectories span different intervals ([{a0}, {a1}] vs [{b0}, {b1}])")]
    MismatchedSpan { a0: f64, a1: f64, b0: f64, b1: f64 },

    /// A state stopped being finite during time integration.
    #[error("state became non-finite")]
    NonFiniteState,

    /// A stepper failed; carries the index of the offending step.
    #[error("simulation failed at step {step}: {source}")]
    StepFailed {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    /// Not enough data points for the requested fit or study.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// An operation was called with an out-of-range parameter.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    /// Wrap an error with the step index at which it occurred.
    pub fn at_step(self, step: usize) -> Self {
        Error::StepFailed {
            step,
            source: Box::new(self),
        }
    }
}
