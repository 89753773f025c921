//! Self-contained verification suites: rotation-composition oracles,
//! finite-difference force/moment consistency, incremental-rotation
//! truncation order, time-reversibility, bitwise velocity-Verlet structure
//! and momentum conservation.
//!
//! The same routines back the `check` CLI command and the acceptance tests.
//! All randomized suites are deterministic for a given seed.

use crate::dynamics::{
    delta_alpha_exact, delta_alpha_truncated, step, BodyProperties, BodyState, PotentialModel,
    StepScheme, SystemState,
};
use crate::models::{
    build_pendulum, build_torus, BinderModel, Bond, PendulumParams, ShearMode, TorusParams, Wall,
};
use crate::rotations::{RodriguesVector, Vec3};
use crate::Result;
use nalgebra::{Unit, UnitQuaternion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Result of one verification suite.
#[derive(Clone, Debug, serde::Serialize)]
pub struct CheckOutcome {
    pub name: String,
    /// The worst deviation the suite measured.
    pub measured: f64,
    /// The bound it must stay below (or equal, for exact checks).
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckOutcome {
    fn new(name: &str, measured: f64, tolerance: f64) -> Self {
        CheckOutcome {
            name: name.to_string(),
            measured,
            tolerance,
            pass: measured <= tolerance && measured.is_finite(),
        }
    }
}

fn rand_unit(rng: &mut impl Rng) -> Vec3 {
    loop {
        let v = Vec3::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let n = v.norm();
        if (0.1..=1.0).contains(&n) {
            return v / n;
        }
    }
}

/// Random rotation with angle uniform in `(0, max_angle)`.
fn rand_rodrigues(rng: &mut impl Rng, max_angle: f64) -> RodriguesVector {
    let angle = rng.gen_range(1e-6..max_angle);
    RodriguesVector(rand_unit(rng) * 2.0 * (angle / 2.0).tan())
}

fn quaternion_of(a: &RodriguesVector) -> UnitQuaternion<f64> {
    let angle = a.angle();
    if angle == 0.0 {
        return UnitQuaternion::identity();
    }
    UnitQuaternion::from_axis_angle(&Unit::new_normalize(a.0), angle)
}

/// Composition against the unit-quaternion product: for admitted pairs the
/// rescaled vector extracted from `q_b ⊗ q_a` must match `a ⊕ b`.
/// Also verifies the matrix homomorphism `R(a ⊕ b) = R(b) R(a)`.
pub fn composition_oracle(seed: u64, samples: usize) -> Result<(CheckOutcome, CheckOutcome)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst_quat: f64 = 0.0;
    let mut worst_mat: f64 = 0.0;
    let mut accepted = 0usize;
    while accepted < samples {
        let a = rand_rodrigues(&mut rng, 2.6);
        let b = rand_rodrigues(&mut rng, 2.6);
        let q = quaternion_of(&b) * quaternion_of(&a);
        let (w, v) = (q.w, Vec3::new(q.i, q.j, q.k));
        // keep the composed angle below π − 0.1 (w = cos(θ/2) must stay positive)
        if w < ((std::f64::consts::PI - 0.1) / 2.0).cos() {
            continue;
        }
        accepted += 1;
        let expected = v * (2.0 / w);
        let composed = a.compose(&b)?;
        worst_quat = worst_quat.max((composed.0 - expected).norm());

        let product = b.rotation_matrix().matrix() * a.rotation_matrix().matrix();
        worst_mat = worst_mat.max((composed.rotation_matrix().matrix() - product).abs().max());
    }
    Ok((
        CheckOutcome::new("compose/quaternion-oracle", worst_quat, 1e-12),
        CheckOutcome::new("compose/matrix-homomorphism", worst_mat, 1e-12),
    ))
}

/// Central finite difference of the energy in every position coordinate
/// against `−F`. Returns the worst deviation relative to the largest force
/// in the system (floored at 1).
pub fn fd_force_deviation<M: PotentialModel + ?Sized>(
    model: &M,
    state: &SystemState,
    eps: f64,
) -> Result<f64> {
    let fm = model.forces_and_moments(state)?;
    let scale = fm.force.iter().map(Vec3::norm).fold(1.0f64, f64::max);
    let mut worst: f64 = 0.0;
    for i in 0..state.n_bodies() {
        let mut grad = Vec3::zeros();
        for axis in 0..3 {
            let mut plus = state.clone();
            plus.bodies[i].position[axis] += eps;
            let mut minus = state.clone();
            minus.bodies[i].position[axis] -= eps;
            grad[axis] =
                (model.potential(&plus)?.total() - model.potential(&minus)?.total()) / (2.0 * eps);
        }
        worst = worst.max((grad + fm.force[i]).norm() / scale);
    }
    Ok(worst)
}

/// Directional derivative of the energy under left rotation perturbations
/// `R → e^{εS(η)} R` against `−RM·η`, for three random unit directions per
/// body. Deviation is relative to the largest moment (floored at 1).
pub fn fd_moment_deviation<M: PotentialModel + ?Sized>(
    model: &M,
    state: &SystemState,
    eps: f64,
    rng: &mut impl Rng,
) -> Result<f64> {
    let fm = model.forces_and_moments(state)?;
    let scale = fm.moment.iter().map(Vec3::norm).fold(1.0f64, f64::max);
    let mut worst: f64 = 0.0;
    for i in 0..state.n_bodies() {
        for _ in 0..3 {
            let eta = rand_unit(rng);
            let tick = RodriguesVector::from_euler(&(eta * eps))?;
            let mut plus = state.clone();
            plus.bodies[i].attitude = state.bodies[i].attitude.compose(&tick)?;
            let mut minus = state.clone();
            minus.bodies[i].attitude = state.bodies[i].attitude.compose(&tick.inverse())?;
            let du =
                (model.potential(&plus)?.total() - model.potential(&minus)?.total()) / (2.0 * eps);
            worst = worst.max((du + fm.moment[i].dot(&eta)).abs() / scale);
        }
    }
    Ok(worst)
}

/// Worst force+moment finite-difference deviation of a model over a set of
/// random configurations produced by `configure`.
fn fd_suite<M, F>(
    name: &str,
    seed: u64,
    configs: usize,
    model: &M,
    mut configure: F,
) -> Result<CheckOutcome>
where
    M: PotentialModel + ?Sized,
    F: FnMut(&mut ChaCha8Rng) -> SystemState,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..configs {
        let state = configure(&mut rng);
        worst = worst.max(fd_force_deviation(model, &state, 1e-5)?);
        worst = worst.max(fd_moment_deviation(model, &state, 1e-5, &mut rng)?);
    }
    Ok(CheckOutcome::new(name, worst, 1e-6))
}

fn two_bodies(
    x_i: Vec3,
    x_j: Vec3,
    a_i: RodriguesVector,
    a_j: RodriguesVector,
    d: f64,
) -> SystemState {
    let props = BodyProperties {
        mass: 1.0,
        inertia: 1.0,
        diameter: d,
    };
    let mk = |position, attitude| BodyState {
        position,
        velocity: Vec3::zeros(),
        attitude,
        angular_velocity: Vec3::zeros(),
    };
    SystemState::new(vec![mk(x_i, a_i), mk(x_j, a_j)], vec![props, props])
}

fn term_bond(km: f64, ka: f64, ks: f64) -> Bond {
    Bond {
        i: 0,
        j: 1,
        rest_separation: Vec3::new(1.0, 0.0, 0.0),
        bending_stiffness: km,
        axial_stiffness: ka,
        shear_stiffness: ks,
    }
}

fn term_model(
    km: f64,
    ka: f64,
    ks: f64,
    kpp: f64,
    wall: Option<Wall>,
    mode: ShearMode,
) -> BinderModel {
    BinderModel {
        bonds: vec![term_bond(km, ka, ks)],
        contact_stiffness: kpp,
        wall,
        shear_mode: mode,
    }
}

/// Random two-body configuration: separation within `(0.8, 1.3)` of the rest
/// length, attitudes bounded so relative rotations stay far from π.
fn generic_pair_config(rng: &mut ChaCha8Rng, diameter: f64) -> SystemState {
    let dir = rand_unit(rng);
    let len = rng.gen_range(0.8..1.3);
    let x_j = Vec3::new(
        rng.gen_range(-0.5..0.5),
        rng.gen_range(-0.5..0.5),
        rng.gen_range(-0.5..0.5),
    );
    let x_i = x_j + dir * len;
    let a_i = rand_rodrigues(rng, 1.2);
    let a_j = rand_rodrigues(rng, 1.2);
    two_bodies(x_i, x_j, a_i, a_j, diameter)
}

/// Overlapping two-body configuration with overlap ratio in `(0.02, 0.15)`.
fn contact_pair_config(rng: &mut ChaCha8Rng) -> SystemState {
    let dir = rand_unit(rng);
    let len = rng.gen_range(0.85..0.98);
    let x_j = Vec3::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5), 0.0);
    two_bodies(
        x_j + dir * len,
        x_j,
        RodriguesVector::IDENTITY,
        RodriguesVector::IDENTITY,
        1.0,
    )
}

/// Small deformed bonded ring, optionally pressed against a wall.
///
/// Particles are pushed radially *outward* by 2–12%, which keeps every pair
/// separation clear of the contact onset so finite differencing never
/// straddles the `[·]₊` kink; the wall (when requested) is placed so the
/// nearest particle overlaps it by a comfortable margin instead.
fn deformed_ring(
    rng: &mut ChaCha8Rng,
    mode: ShearMode,
    with_wall: bool,
) -> (SystemState, BinderModel) {
    let params = TorusParams {
        n_particles: 8,
        torus_diameter: 1.6,
        shear_mode: mode,
        wall: None,
        ..Default::default()
    };
    let (mut state, mut model) = build_torus(&params).unwrap();
    let dp = state.props[0].diameter;
    let center = state
        .bodies
        .iter()
        .fold(Vec3::zeros(), |acc, b| acc + b.position)
        / state.n_bodies() as f64;
    for b in &mut state.bodies {
        let radial = b.position - center;
        b.position += radial * rng.gen_range(0.02..0.12)
            + Vec3::new(0.0, 0.0, rng.gen_range(-0.05..0.05) * dp);
        b.attitude = rand_rodrigues(rng, 0.5);
    }
    if with_wall {
        let min_x = state
            .bodies
            .iter()
            .map(|b| b.position.x)
            .fold(f64::INFINITY, f64::min);
        model.wall = Some(Wall {
            normal: Vec3::new(1.0, 0.0, 0.0),
            offset: min_x - 0.35 * dp,
            stiffness: 2100.0,
        });
    }
    (state, model)
}

/// Finite-difference consistency of every potential term and of the full
/// models, at `configs` random configurations each.
pub fn fd_consistency_suites(seed: u64, configs: usize) -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();

    let (pendulum_state, pendulum_model) = build_pendulum(&PendulumParams::default());
    out.push(fd_suite(
        "fd/pendulum",
        seed,
        configs,
        &pendulum_model,
        |rng| {
            let mut s = pendulum_state.clone();
            s.bodies[0].attitude = rand_rodrigues(rng, 2.5);
            s
        },
    )?);

    out.push(fd_suite(
        "fd/bending",
        seed.wrapping_add(1),
        configs,
        &term_model(10.0, 0.0, 0.0, 0.0, None, ShearMode::Paper),
        |rng| generic_pair_config(rng, 0.0),
    )?);
    out.push(fd_suite(
        "fd/axial",
        seed.wrapping_add(2),
        configs,
        &term_model(0.0, 200.0, 0.0, 0.0, None, ShearMode::Paper),
        |rng| generic_pair_config(rng, 0.0),
    )?);
    out.push(fd_suite(
        "fd/shear-paper",
        seed.wrapping_add(3),
        configs,
        &term_model(0.0, 0.0, 200.0, 0.0, None, ShearMode::Paper),
        |rng| generic_pair_config(rng, 0.0),
    )?);
    out.push(fd_suite(
        "fd/shear-invariant",
        seed.wrapping_add(4),
        configs,
        &term_model(0.0, 0.0, 200.0, 0.0, None, ShearMode::Invariant),
        |rng| generic_pair_config(rng, 0.0),
    )?);
    out.push(fd_suite(
        "fd/contact",
        seed.wrapping_add(5),
        configs,
        &term_model(0.0, 0.0, 0.0, 2100.0, None, ShearMode::Paper),
        contact_pair_config,
    )?);

    let wall = Wall {
        normal: Vec3::new(1.0, 0.0, 0.0),
        offset: 0.0,
        stiffness: 2100.0,
    };
    out.push(fd_suite(
        "fd/wall",
        seed.wrapping_add(6),
        configs,
        &BinderModel {
            bonds: vec![],
            contact_stiffness: 0.0,
            wall: Some(wall),
            shear_mode: ShearMode::Paper,
        },
        |rng| {
            // gap between 10% and 90% of the radius; the second body is far away
            let x = Vec3::new(
                rng.gen_range(0.05..0.45),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            two_bodies(
                x,
                Vec3::new(5.0, 5.0, 0.0),
                RodriguesVector::IDENTITY,
                RodriguesVector::IDENTITY,
                1.0,
            )
        },
    )?);

    for (name, mode, offset) in [
        ("fd/binder-full-paper", ShearMode::Paper, 7u64),
        ("fd/binder-full-invariant", ShearMode::Invariant, 8u64),
    ] {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(offset));
        let mut worst: f64 = 0.0;
        for _ in 0..configs {
            let (state, model) = deformed_ring(&mut rng, mode, true);
            worst = worst.max(fd_force_deviation(&model, &state, 1e-5)?);
            worst = worst.max(fd_moment_deviation(&model, &state, 1e-5, &mut rng)?);
        }
        out.push(CheckOutcome::new(name, worst, 1e-6));
    }
    Ok(out)
}

/// Truncation order of the incremental rotation: the gap between the exact
/// and truncated forms must shrink by 10³ when `h` shrinks by 10.
pub fn truncation_order_check() -> CheckOutcome {
    let omega = Vec3::new(0.4, -0.25, 0.6);
    let moment = Vec3::new(-0.3, 0.5, 0.2);
    let gap = |h: f64| {
        let exact = delta_alpha_exact(&omega, &moment, 1.0, h).unwrap();
        let truncated = delta_alpha_truncated(&omega, &moment, 1.0, h);
        (exact.0 - truncated.0).norm()
    };
    let hs = [1e-1, 1e-2, 1e-3];
    let mut worst: f64 = 0.0;
    for w in hs.windows(2) {
        let ratio = gap(w[0]) / gap(w[1]);
        worst = worst.max((ratio - 1000.0).abs());
    }
    CheckOutcome::new("delta-alpha/truncation-order", worst, 100.0)
}

fn run_steps<M: PotentialModel + ?Sized>(
    state: &SystemState,
    model: &M,
    scheme: StepScheme,
    h: f64,
    n: usize,
) -> Result<SystemState> {
    let mut s = state.clone();
    let mut cached = model.forces_and_moments(&s)?;
    for k in 0..n {
        let (next, fresh) = step(scheme, &s, model, h, &cached).map_err(|e| e.at_step(k + 1))?;
        s = next;
        cached = fresh;
    }
    Ok(s)
}

fn flip_velocities(state: &mut SystemState) {
    for b in &mut state.bodies {
        b.velocity = -b.velocity;
        b.angular_velocity = -b.angular_velocity;
    }
}

/// Largest per-component relative deviation between two states (floored at
/// magnitude 1, so small quantities are compared absolutely).
pub fn state_deviation(a: &SystemState, b: &SystemState) -> f64 {
    let mut worst: f64 = 0.0;
    for (x, y) in a.bodies.iter().zip(&b.bodies) {
        let pairs = [
            (x.position, y.position),
            (x.velocity, y.velocity),
            (x.attitude.0, y.attitude.0),
            (x.angular_velocity, y.angular_velocity),
        ];
        for (u, v) in pairs {
            for c in 0..3 {
                worst = worst.max((u[c] - v[c]).abs() / u[c].abs().max(1.0));
            }
        }
    }
    worst
}

/// Integrate the pendulum forward `n` steps, flip all velocities, integrate
/// `n` more, flip again: the initial state must reappear.
pub fn reversibility_check(scheme: StepScheme, n: usize, h: f64) -> Result<CheckOutcome> {
    let (s0, model) = build_pendulum(&PendulumParams::default());
    let mut state = run_steps(&s0, &model, scheme, h, n)?;
    flip_velocities(&mut state);
    let mut back = run_steps(&state, &model, scheme, h, n)?;
    flip_velocities(&mut back);
    Ok(CheckOutcome::new(
        &format!("reversibility/{}", scheme.name()),
        state_deviation(&back, &s0),
        1e-8,
    ))
}

/// Rotation-free chain: advance it with the second-order stepper and with a
/// plainly written velocity Verlet; every position and velocity must agree
/// bit for bit.
pub fn verlet_equivalence_check() -> Result<CheckOutcome> {
    // three masses joined by axial bonds, stretched so forces are nonzero
    let props = [1.0, 2.0, 0.5].map(|mass| BodyProperties {
        mass,
        inertia: 1.0,
        diameter: 0.0,
    });
    let positions = [
        Vec3::new(0.0, 0.0, 0.0),
        Vec3::new(1.3, 0.1, 0.0),
        Vec3::new(2.4, -0.2, 0.3),
    ];
    let velocities = [
        Vec3::new(0.1, 0.0, -0.05),
        Vec3::new(-0.2, 0.15, 0.0),
        Vec3::new(0.0, -0.1, 0.1),
    ];
    let bodies: Vec<BodyState> = positions
        .iter()
        .zip(&velocities)
        .map(|(&position, &velocity)| BodyState {
            position,
            velocity,
            attitude: RodriguesVector::IDENTITY,
            angular_velocity: Vec3::zeros(),
        })
        .collect();
    let state = SystemState::new(bodies, props.to_vec());
    let bond = |i: usize, j: usize| Bond {
        i,
        j,
        rest_separation: Vec3::new(1.0, 0.0, 0.0),
        bending_stiffness: 0.0,
        axial_stiffness: 50.0,
        shear_stiffness: 0.0,
    };
    let model = BinderModel {
        bonds: vec![bond(0, 1), bond(1, 2)],
        contact_stiffness: 0.0,
        wall: None,
        shear_mode: ShearMode::Paper,
    };

    let h = 1e-3;
    let n = 200;

    // reference: velocity Verlet on (x, v) only
    let mut rx: Vec<Vec3> = positions.to_vec();
    let mut rv: Vec<Vec3> = velocities.to_vec();
    let mut ref_state = state.clone();
    let mut rf = model.forces_and_moments(&ref_state)?.force;

    let mut vti = state.clone();
    let mut cached = model.forces_and_moments(&vti)?;

    let mut worst: f64 = 0.0;
    for _ in 0..n {
        // reference half of the comparison
        for i in 0..rx.len() {
            let m = ref_state.props[i].mass;
            rx[i] = rx[i] + rv[i] * h + rf[i] * (h * h / (2.0 * m));
        }
        for (i, b) in ref_state.bodies.iter_mut().enumerate() {
            b.position = rx[i];
        }
        let rf_new = model.forces_and_moments(&ref_state)?.force;
        for i in 0..rv.len() {
            let m = ref_state.props[i].mass;
            rv[i] += (rf[i] + rf_new[i]) * (h / (2.0 * m));
        }
        rf = rf_new;

        let (next, fresh) = step(StepScheme::Vti2, &vti, &model, h, &cached)?;
        vti = next;
        cached = fresh;

        for i in 0..rx.len() {
            for c in 0..3 {
                worst = worst.max((vti.bodies[i].position[c] - rx[i][c]).abs());
                worst = worst.max((vti.bodies[i].velocity[c] - rv[i][c]).abs());
            }
        }
    }
    Ok(CheckOutcome::new(
        "vti2/velocity-verlet-bitwise",
        worst,
        0.0,
    ))
}

/// Momentum conservation on a randomly deformed free-floating ring with the
/// rotation-invariant shear energy: every component of `P` and of the total
/// angular momentum must hold to 1e-11 of the momentum scale.
pub fn momentum_conservation_check(
    seed: u64,
    scheme: StepScheme,
) -> Result<(CheckOutcome, CheckOutcome)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut state, model) = deformed_ring(&mut rng, ShearMode::Invariant, false);
    for b in &mut state.bodies {
        b.velocity = Vec3::new(
            rng.gen_range(-0.5..0.5),
            rng.gen_range(-0.5..0.5),
            rng.gen_range(-0.5..0.5),
        );
        b.angular_velocity = Vec3::new(
            rng.gen_range(-0.5..0.5),
            rng.gen_range(-0.5..0.5),
            rng.gen_range(-0.5..0.5),
        );
    }

    let m0 = crate::diagnostics::momenta(&state);
    let scale = m0.linear.norm().max(m0.total_angular.norm()).max(1.0);
    let mut worst_p: f64 = 0.0;
    let mut worst_l: f64 = 0.0;
    crate::dynamics::simulate(&state, &model, scheme, 1e-3, 2.0, 10, |_, _, m| {
        worst_p = worst_p.max((m.linear - m0.linear).abs().max() / scale);
        worst_l = worst_l.max((m.total_angular - m0.total_angular).abs().max() / scale);
    })?;
    Ok((
        CheckOutcome::new(
            &format!("momentum/linear-{}", scheme.name()),
            worst_p,
            1e-11,
        ),
        CheckOutcome::new(
            &format!("momentum/angular-{}", scheme.name()),
            worst_l,
            1e-11,
        ),
    ))
}

/// Run every suite. Used by the CLI `check` command.
pub fn run_all(seed: u64) -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    let (quat, mat) = composition_oracle(seed, 1000)?;
    out.push(quat);
    out.push(mat);
    out.extend(fd_consistency_suites(seed, 20)?);
    out.push(truncation_order_check());
    out.push(reversibility_check(StepScheme::Vti1, 1000, 1e-2)?);
    out.push(reversibility_check(StepScheme::Vti2, 1000, 1e-2)?);
    out.push(verlet_equivalence_check()?);
    for scheme in [StepScheme::Vti1, StepScheme::Vti2] {
        let (p, l) = momentum_conservation_check(seed, scheme)?;
        out.push(p);
        out.push(l);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::ForceMoment;

    #[test]
    fn all_checks_pass_default_seed() {
        for outcome in run_all(0).unwrap() {
            assert!(
                outcome.pass,
                "{} measured {} vs tolerance {}",
                outcome.name, outcome.measured, outcome.tolerance
            );
        }
    }

    #[test]
    fn corrupted_force_sign_fails_fd() {
        // negative control: a model whose force disagrees with its energy
        struct FlippedSign(BinderModel);
        impl PotentialModel for FlippedSign {
            fn potential(&self, s: &SystemState) -> crate::Result<crate::dynamics::PotentialTerms> {
                self.0.potential(s)
            }
            fn forces_and_moments(&self, s: &SystemState) -> crate::Result<ForceMoment> {
                let mut fm = self.0.forces_and_moments(s)?;
                for f in &mut fm.force {
                    *f = -*f;
                }
                Ok(fm)
            }
        }
        let model = FlippedSign(term_model(0.0, 200.0, 0.0, 0.0, None, ShearMode::Paper));
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let state = generic_pair_config(&mut rng, 0.0);
        let dev = fd_force_deviation(&model, &state, 1e-5).unwrap();
        assert!(
            dev > 1e-3,
            "expected the corrupted model to fail, got {dev}"
        );
    }
}
