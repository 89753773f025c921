//! Explicit variational steppers for systems of spherical rigid bodies.
//!
//! Three discrete maps advance `(x, v, α, Ω)` per body, where `x` is the
//! center-of-mass position, `v` its velocity, `α` the attitude as a rescaled
//! Rodrigues vector and `Ω` the angular velocity in the inertial (spatial)
//! frame:
//!
//! * [`StepScheme::Vti1`] — the closed-form map with the exact incremental
//!   rotation [`delta_alpha_exact`].
//! * [`StepScheme::Vti2`] — identical except the increment is truncated to
//!   second order ([`delta_alpha_truncated`]); its translational half is
//!   exactly velocity Verlet / explicit Newmark (β = 0, γ = 1/2).
//! * [`StepScheme::Vti3`] — the first-order map with symplectic-Euler
//!   structure: velocities first, then positions and attitudes.
//!
//! Forces and moments come from a [`PotentialModel`]. Each step consumes the
//! model evaluation at its start and returns the one at its end, so a
//! simulation performs exactly one model evaluation per step.

use crate::diagnostics::{self, EnergyLedger, Momenta};
use crate::error::Error;
use crate::rotations::{RodriguesVector, Vec3};
use crate::Result;

/// Mass and inertia of one spherical body.
///
/// `inertia` is the scalar rotational moment of inertia (identical about any
/// axis for a sphere); `diameter` is used by contact laws and may be zero for
/// point bodies.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BodyProperties {
    pub mass: f64,
    pub inertia: f64,
    pub diameter: f64,
}

/// Kinematic state of one body.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BodyState {
    pub position: Vec3,
    pub velocity: Vec3,
    pub attitude: RodriguesVector,
    /// Angular velocity in the inertial frame (`Ω = R ω`).
    pub angular_velocity: Vec3,
}

impl BodyState {
    pub fn at_rest(position: Vec3) -> Self {
        BodyState {
            position,
            velocity: Vec3::zeros(),
            attitude: RodriguesVector::IDENTITY,
            angular_velocity: Vec3::zeros(),
        }
    }

    fn is_finite(&self) -> bool {
        self.position.iter().all(|c| c.is_finite())
            && self.velocity.iter().all(|c| c.is_finite())
            && self.attitude.0.iter().all(|c| c.is_finite())
            && self.angular_velocity.iter().all(|c| c.is_finite())
    }
}

/// State of the whole system: per-body kinematics plus the (constant)
/// per-body properties, kept parallel.
#[derive(Clone, Debug)]
pub struct SystemState {
    pub time: f64,
    pub bodies: Vec<BodyState>,
    pub props: Vec<BodyProperties>,
}

impl SystemState {
    /// Panics if the lists differ in length or are empty.
    pub fn new(bodies: Vec<BodyState>, props: Vec<BodyProperties>) -> Self {
        assert_eq!(
            bodies.len(),
            props.len(),
            "bodies and props must be parallel"
        );
        assert!(!bodies.is_empty(), "system needs at least one body");
        SystemState {
            time: 0.0,
            bodies,
            props,
        }
    }

    pub fn n_bodies(&self) -> usize {
        self.bodies.len()
    }

    pub fn is_finite(&self) -> bool {
        self.bodies.iter().all(|b| b.is_finite())
    }
}

/// Spatial force `F` and spatial moment `RM` per body, as produced by a
/// [`PotentialModel`] at one configuration.
#[derive(Clone, Debug, Default)]
pub struct ForceMoment {
    pub force: Vec<Vec3>,
    /// Moments in the inertial frame (`S(RM) = R S(M) Rᵀ`).
    pub moment: Vec<Vec3>,
}

impl ForceMoment {
    pub fn zeros(n: usize) -> Self {
        ForceMoment {
            force: vec![Vec3::zeros(); n],
            moment: vec![Vec3::zeros(); n],
        }
    }

    pub fn add_force(&mut self, i: usize, f: Vec3) {
        self.force[i] += f;
    }

    pub fn add_moment(&mut self, i: usize, m: Vec3) {
        self.moment[i] += m;
    }
}

/// Named potential-energy contributions of a model at one configuration.
///
/// The fields mirror the columns of the output ledger; models fill the terms
/// they produce and leave the rest at zero.
#[derive(Clone, Copy, Debug, Default, PartialEq, serde::Serialize)]
pub struct PotentialTerms {
    /// Binder torsion/bending energy.
    pub bending: f64,
    /// Binder axial (stretch) energy.
    pub axial: f64,
    /// Binder shear energy.
    pub shear: f64,
    /// Particle-particle contact energy.
    pub contact: f64,
    /// Particle-wall contact energy.
    pub wall: f64,
    /// Pendulum gravity energy.
    pub pendulum: f64,
}

impl PotentialTerms {
    pub fn total(&self) -> f64 {
        self.bending + self.axial + self.shear + self.contact + self.wall + self.pendulum
    }
}

/// A potential energy `U(configuration)` together with its exact negative
/// gradient (forces) and left rotational derivative (spatial moments).
///
/// Contract, checked generically by the finite-difference suites in
/// [`crate::checks`]: perturbing `x_k` changes the energy at rate `−F_k`, and
/// perturbing `R_k → e^{εS(η)} R_k` changes it at rate `−RM_k · η`.
pub trait PotentialModel {
    fn potential(&self, state: &SystemState) -> Result<PotentialTerms>;
    fn forces_and_moments(&self, state: &SystemState) -> Result<ForceMoment>;
}

/// Selector for the three discrete maps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepScheme {
    Vti1,
    Vti2,
    Vti3,
}

impl StepScheme {
    pub fn name(&self) -> &'static str {
        match self {
            StepScheme::Vti1 => "vti1",
            StepScheme::Vti2 => "vti2",
            StepScheme::Vti3 => "vti3",
        }
    }
}

/// Exact incremental rotation of the closed-form map:
///
/// ```text
/// Δα = 2h / (1 + √(1 − h²‖w‖²)) · w,      w = Ω + (h/2J) RM
/// ```
///
/// Valid for `h²‖w‖² < 1` (incremental rotation below π/2); the other root
/// of the underlying quadratic does not vanish with `w` and is discarded.
pub fn delta_alpha_exact(
    angular_velocity: &Vec3,
    moment: &Vec3,
    inertia: f64,
    h: f64,
) -> Result<RodriguesVector> {
    let w = angular_velocity + moment * (h / (2.0 * inertia));
    let discriminant = h * h * w.norm_squared();
    if discriminant >= 1.0 {
        return Err(Error::IncrementTooLarge { discriminant });
    }
    let coeff = 2.0 * h / (1.0 + (1.0 - discriminant).sqrt());
    Ok(RodriguesVector(w * coeff))
}

/// Second-order truncation of [`delta_alpha_exact`]:
///
/// ```text
/// Δα = h Ω + (h²/2J) RM
/// ```
///
/// The two differ by O(h³).
pub fn delta_alpha_truncated(
    angular_velocity: &Vec3,
    moment: &Vec3,
    inertia: f64,
    h: f64,
) -> RodriguesVector {
    RodriguesVector(angular_velocity * h + moment * (h * h / (2.0 * inertia)))
}

fn step_vti12<M: PotentialModel + ?Sized>(
    state: &SystemState,
    model: &M,
    h: f64,
    cached: &ForceMoment,
    exact_increment: bool,
) -> Result<(SystemState, ForceMoment)> {
    let mut next = state.clone();
    for (i, body) in state.bodies.iter().enumerate() {
        let p = &state.props[i];
        next.bodies[i].position =
            body.position + body.velocity * h + cached.force[i] * (h * h / (2.0 * p.mass));
        let delta = if exact_increment {
            delta_alpha_exact(&body.angular_velocity, &cached.moment[i], p.inertia, h)?
        } else {
            delta_alpha_truncated(&body.angular_velocity, &cached.moment[i], p.inertia, h)
        };
        next.bodies[i].attitude = body.attitude.compose(&delta)?;
    }
    next.time = state.time + h;
    let fresh = model.forces_and_moments(&next)?;
    for (i, body) in state.bodies.iter().enumerate() {
        let p = &state.props[i];
        next.bodies[i].velocity =
            body.velocity + (cached.force[i] + fresh.force[i]) * (h / (2.0 * p.mass));
        next.bodies[i].angular_velocity =
            body.angular_velocity + (cached.moment[i] + fresh.moment[i]) * (h / (2.0 * p.inertia));
    }
    Ok((next, fresh))
}

/// One step of the closed-form explicit map (second order, exact increment).
///
/// `cached` must be the model evaluation at `state`; the returned
/// [`ForceMoment`] is the evaluation at the new configuration, for reuse.
pub fn step_vti1<M: PotentialModel + ?Sized>(
    state: &SystemState,
    model: &M,
    h: f64,
    cached: &ForceMoment,
) -> Result<(SystemState, ForceMoment)> {
    step_vti12(state, model, h, cached, true)
}

/// One step of the velocity-Verlet-like map (second order, truncated
/// increment). Same calling convention as [`step_vti1`].
pub fn step_vti2<M: PotentialModel + ?Sized>(
    state: &SystemState,
    model: &M,
    h: f64,
    cached: &ForceMoment,
) -> Result<(SystemState, ForceMoment)> {
    step_vti12(state, model, h, cached, false)
}

/// One step of the first-order map with symplectic-Euler structure:
/// velocities are updated from the old-configuration forces, then positions
/// and attitudes advance with the *new* velocities.
pub fn step_vti3<M: PotentialModel + ?Sized>(
    state: &SystemState,
    model: &M,
    h: f64,
    cached: &ForceMoment,
) -> Result<(SystemState, ForceMoment)> {
    let mut next = state.clone();
    for (i, body) in state.bodies.iter().enumerate() {
        let p = &state.props[i];
        let v_new = body.velocity + cached.force[i] * (h / p.mass);
        let omega_new = body.angular_velocity + cached.moment[i] * (h / p.inertia);
        next.bodies[i].velocity = v_new;
        next.bodies[i].angular_velocity = omega_new;
        next.bodies[i].position = body.position + v_new * h;
        let delta = RodriguesVector(omega_new * h);
        next.bodies[i].attitude = body.attitude.compose(&delta)?;
    }
    next.time = state.time + h;
    let fresh = model.forces_and_moments(&next)?;
    Ok((next, fresh))
}

/// Dispatch one step of the selected scheme.
pub fn step<M: PotentialModel + ?Sized>(
    scheme: StepScheme,
    state: &SystemState,
    model: &M,
    h: f64,
    cached: &ForceMoment,
) -> Result<(SystemState, ForceMoment)> {
    match scheme {
        StepScheme::Vti1 => step_vti1(state, model, h, cached),
        StepScheme::Vti2 => step_vti2(state, model, h, cached),
        StepScheme::Vti3 => step_vti3(state, model, h, cached),
    }
}

/// Integrate from `initial` over `N = round(t_end/h)` steps, invoking
/// `sampler` with the state, energy ledger and momenta at `t = 0` and after
/// every `sample_every`-th step.
///
/// Sample times are placed at exact multiples of `h` (no accumulation), so a
/// recorded trajectory is a uniform grid. Stepper failures are reported with
/// the index of the offending step attached. Returns the final state.
pub fn simulate<M, F>(
    initial: &SystemState,
    model: &M,
    scheme: StepScheme,
    h: f64,
    t_end: f64,
    sample_every: usize,
    mut sampler: F,
) -> Result<SystemState>
where
    M: PotentialModel + ?Sized,
    F: FnMut(&SystemState, &EnergyLedger, &Momenta),
{
    if h <= 0.0 || !h.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "time step must be positive, got {h}"
        )));
    }
    if t_end < 0.0 || !t_end.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "t_end must be non-negative, got {t_end}"
        )));
    }
    let sample_every = sample_every.max(1);
    let n_steps = (t_end / h).round() as usize;
    let t0 = initial.time;

    let mut state = initial.clone();
    let ledger = diagnostics::energy_ledger(&state, model)?;
    sampler(&state, &ledger, &diagnostics::momenta(&state));

    let mut cached = model.forces_and_moments(&state)?;
    for k in 1..=n_steps {
        let (mut next, fresh) =
            step(scheme, &state, model, h, &cached).map_err(|e| e.at_step(k))?;
        next.time = t0 + k as f64 * h;
        state = next;
        cached = fresh;
        if k % sample_every == 0 {
            if !state.is_finite() {
                return Err(Error::NonFiniteState.at_step(k));
            }
            let ledger = diagnostics::energy_ledger(&state, model).map_err(|e| e.at_step(k))?;
            sampler(&state, &ledger, &diagnostics::momenta(&state));
        }
    }
    Ok(state)
}
