//! Concrete potential models: the gravity pendulum on SO(3) and the
//! particle-binder bond network on SE(3)^n, plus scenario builders.

use crate::dynamics::{
    BodyProperties, BodyState, ForceMoment, PotentialModel, PotentialTerms, SystemState,
};
use crate::error::Error;
use crate::rotations::{relative_rotation, RodriguesVector, Vec3};
use crate::Result;
use std::f64::consts::PI;

/// Zero potential: free flight. Useful for tests and the `custom` scenario.
pub struct FreeModel;

impl PotentialModel for FreeModel {
    fn potential(&self, _state: &SystemState) -> Result<PotentialTerms> {
        Ok(PotentialTerms::default())
    }
    fn forces_and_moments(&self, state: &SystemState) -> Result<ForceMoment> {
        Ok(ForceMoment::zeros(state.n_bodies()))
    }
}

// ---------------------------------------------------------------------------
// Pendulum
// ---------------------------------------------------------------------------

/// A rigid body of mass `m` pivoting about the origin under gravity.
///
/// The pivot-to-center vector `ρ0` is fixed in the body frame; with attitude
/// `R` the potential is `U = −m g e3 · R ρ0` and the spatial moment is
/// `RM = m g (R ρ0 × e3)`.
#[derive(Clone, Debug)]
pub struct PendulumModel {
    pub mass: f64,
    pub gravity: f64,
    /// Pivot-to-body vector in the body frame.
    pub pivot_arm: Vec3,
    /// Unit "up" direction of the inertial frame.
    pub up: Vec3,
}

impl PendulumModel {
    fn arm(&self, state: &SystemState) -> Vec3 {
        debug_assert_eq!(state.n_bodies(), 1, "pendulum model is single-body");
        state.bodies[0]
            .attitude
            .rotation_matrix()
            .apply(&self.pivot_arm)
    }
}

impl PotentialModel for PendulumModel {
    fn potential(&self, state: &SystemState) -> Result<PotentialTerms> {
        Ok(PotentialTerms {
            pendulum: -self.mass * self.gravity * self.up.dot(&self.arm(state)),
            ..Default::default()
        })
    }

    fn forces_and_moments(&self, state: &SystemState) -> Result<ForceMoment> {
        let mut fm = ForceMoment::zeros(state.n_bodies());
        fm.moment[0] = self.mass * self.gravity * self.arm(state).cross(&self.up);
        Ok(fm)
    }
}

/// The three conserved quantities of the pendulum: total energy
/// `½ J ‖Ω‖² + U`, the axial component `(R ρ0)·Ω`, and `‖R ρ0‖`.
pub fn pendulum_invariants(state: &SystemState, model: &PendulumModel) -> Result<(f64, f64, f64)> {
    let body = &state.bodies[0];
    let arm = body.attitude.rotation_matrix().apply(&model.pivot_arm);
    let kinetic = 0.5 * state.props[0].inertia * body.angular_velocity.norm_squared();
    let potential = model.potential(state)?.pendulum;
    Ok((
        kinetic + potential,
        arm.dot(&body.angular_velocity),
        arm.norm(),
    ))
}

/// Scenario parameters for the pendulum.
///
/// Defaults: unit mass, gravity and inertia, `ρ0 = e3 = [0,0,1]`, attitude
/// tilted 3π/4 about y (`α0 = [0, 2 tan(3π/8), 0]`) with angular velocity
/// `Ω0 = [1,0,1]·0.4 sin²(π/4) = [0.2, 0, 0.2]`.
#[derive(Clone, Debug)]
pub struct PendulumParams {
    pub mass: f64,
    pub gravity: f64,
    pub inertia: f64,
    pub alpha0: RodriguesVector,
    pub omega0: Vec3,
}

impl Default for PendulumParams {
    fn default() -> Self {
        PendulumParams {
            mass: 1.0,
            gravity: 1.0,
            inertia: 1.0,
            alpha0: RodriguesVector::new(0.0, 2.0 * (3.0 * PI / 8.0).tan(), 0.0),
            omega0: Vec3::new(1.0, 0.0, 1.0) * 0.4 * (PI / 4.0).sin().powi(2),
        }
    }
}

/// Build the pendulum scenario: a single body at the origin.
pub fn build_pendulum(params: &PendulumParams) -> (SystemState, PendulumModel) {
    let body = BodyState {
        position: Vec3::zeros(),
        velocity: Vec3::zeros(),
        attitude: params.alpha0,
        angular_velocity: params.omega0,
    };
    let props = BodyProperties {
        mass: params.mass,
        inertia: params.inertia,
        diameter: 0.0,
    };
    let state = SystemState::new(vec![body], vec![props]);
    let model = PendulumModel {
        mass: params.mass,
        gravity: params.gravity,
        pivot_arm: Vec3::new(0.0, 0.0, 1.0),
        up: Vec3::new(0.0, 0.0, 1.0),
    };
    (state, model)
}

// ---------------------------------------------------------------------------
// Particle-binder bond network
// ---------------------------------------------------------------------------

/// A binder bond between bodies `i` and `j`.
///
/// `rest_separation` is `x_i(0) − x_j(0)` in the inertial frame at the
/// undeformed configuration (attitudes assumed identity there).
#[derive(Clone, Debug)]
pub struct Bond {
    pub i: usize,
    pub j: usize,
    pub rest_separation: Vec3,
    pub bending_stiffness: f64,
    pub axial_stiffness: f64,
    pub shear_stiffness: f64,
}

/// A frictionless rigid plane with outward unit normal `n`; a body touches
/// it when its center-to-plane distance drops below its radius.
#[derive(Clone, Copy, Debug)]
pub struct Wall {
    pub normal: Vec3,
    pub offset: f64,
    pub stiffness: f64,
}

impl Wall {
    /// Normalizes the normal; fails on a zero vector.
    pub fn new(normal: Vec3, offset: f64, stiffness: f64) -> Result<Self> {
        let n = normal.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidGeometry("wall normal must be nonzero".into()));
        }
        Ok(Wall {
            normal: normal / n,
            offset,
            stiffness,
        })
    }
}

/// Which shear energy the binder uses.
///
/// `Paper` couples the bond direction through both attitudes,
/// `ψ = 1 − (R_i n̂0)·(R_j n̂)`; it is *not* invariant under a rigid rotation
/// of the whole system, so angular momentum is only approximately conserved.
/// `Invariant` splits the misalignment per body, `ψ_a = 1 − (R_a n̂0)·n̂`,
/// which is rigid-rotation invariant and conserves angular momentum exactly.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShearMode {
    Paper,
    Invariant,
}

/// Bond network with unilateral particle-particle contact and an optional
/// rigid wall.
#[derive(Clone, Debug)]
pub struct BinderModel {
    pub bonds: Vec<Bond>,
    pub contact_stiffness: f64,
    pub wall: Option<Wall>,
    pub shear_mode: ShearMode,
}

/// Binder torsion/bending energy and moments of one bond:
/// `U = ½ K^m ‖θ_ij‖²` with `θ_ij` the Euler vector of `R_i R_jᵀ`, and
/// `RM_i = −K^m θ_ij = −RM_j`. Returns `(U, RM_i, RM_j)`; no forces.
pub fn bond_bending_eval(bond: &Bond, state: &SystemState) -> Result<(f64, Vec3, Vec3)> {
    let rel = relative_rotation(
        &state.bodies[bond.i].attitude,
        &state.bodies[bond.j].attitude,
    )?;
    let theta = rel.to_euler();
    let energy = 0.5 * bond.bending_stiffness * theta.norm_squared();
    let moment_i = -bond.bending_stiffness * theta;
    Ok((energy, moment_i, -moment_i))
}

/// Binder axial energy and central forces of one bond:
/// `U = ½ K^a (‖d‖/L0 − 1)²`, `F_i = −(K^a/L0)(‖d‖/L0 − 1) d̂ = −F_j`.
pub fn bond_axial_eval(bond: &Bond, state: &SystemState) -> Result<(f64, Vec3, Vec3)> {
    let rest_len = bond.rest_separation.norm();
    let d = state.bodies[bond.i].position - state.bodies[bond.j].position;
    let len = d.norm();
    if len < 1e-12 * rest_len {
        return Err(Error::CoincidentCenters {
            i: bond.i,
            j: bond.j,
            separation: len,
        });
    }
    let strain = len / rest_len - 1.0;
    let energy = 0.5 * bond.axial_stiffness * strain * strain;
    let force_i = -(bond.axial_stiffness / rest_len) * strain * (d / len);
    Ok((energy, force_i, -force_i))
}

/// Outputs of [`bond_shear_eval`].
#[derive(Clone, Copy, Debug, Default)]
pub struct ShearEval {
    pub energy: f64,
    pub force_i: Vec3,
    pub force_j: Vec3,
    pub moment_i: Vec3,
    pub moment_j: Vec3,
}

/// Binder shear energy, forces and moments of one bond; see [`ShearMode`]
/// for the two energy definitions. Forces and moments are the exact
/// derivatives of the selected energy.
pub fn bond_shear_eval(bond: &Bond, state: &SystemState, mode: ShearMode) -> Result<ShearEval> {
    let rest_len = bond.rest_separation.norm();
    let d = state.bodies[bond.i].position - state.bodies[bond.j].position;
    let len = d.norm();
    if len < 1e-12 * rest_len {
        return Err(Error::CoincidentCenters {
            i: bond.i,
            j: bond.j,
            separation: len,
        });
    }
    let n_hat = d / len;
    let n0_hat = bond.rest_separation / rest_len;
    let r_i = state.bodies[bond.i].attitude.rotation_matrix();
    let r_j = state.bodies[bond.j].attitude.rotation_matrix();
    let k = bond.shear_stiffness;

    // transverse projector applied to v: v − n̂ (n̂·v), over the length
    let project = |v: Vec3| (v - n_hat * n_hat.dot(&v)) / len;

    match mode {
        ShearMode::Paper => {
            let c = r_i.apply(&n0_hat);
            let w = r_j.apply(&n_hat);
            let psi = 1.0 - c.dot(&w);
            let energy = 0.5 * k * psi * psi;
            let force_i = k * psi * project(r_j.apply_transpose(&c));
            let moment_i = k * psi * c.cross(&w);
            Ok(ShearEval {
                energy,
                force_i,
                force_j: -force_i,
                moment_i,
                moment_j: -moment_i,
            })
        }
        ShearMode::Invariant => {
            let c_i = r_i.apply(&n0_hat);
            let c_j = r_j.apply(&n0_hat);
            let psi_i = 1.0 - c_i.dot(&n_hat);
            let psi_j = 1.0 - c_j.dot(&n_hat);
            let energy = 0.5 * k * (psi_i * psi_i + psi_j * psi_j);
            let force_i = k * project(psi_i * c_i + psi_j * c_j);
            Ok(ShearEval {
                energy,
                force_i,
                force_j: -force_i,
                moment_i: k * psi_i * c_i.cross(&n_hat),
                moment_j: k * psi_j * c_j.cross(&n_hat),
            })
        }
    }
}

/// Unilateral Hertz-type particle-particle contact:
/// overlap ratio `δ = [1 − ‖d‖/(R_i + R_j)]₊`, energy `U = (2/5) K δ^{5/2}`
/// and repulsive force `F_i = (K/(R_i+R_j)) δ^{3/2} d̂ = −F_j`, so that
/// `F = −∂U/∂x` holds exactly and the force vanishes C¹-smoothly at `δ = 0`.
pub fn contact_pp_eval(
    i: usize,
    j: usize,
    state: &SystemState,
    stiffness: f64,
) -> Result<(f64, Vec3, Vec3)> {
    let radius_sum = 0.5 * (state.props[i].diameter + state.props[j].diameter);
    if radius_sum <= 0.0 {
        return Ok((0.0, Vec3::zeros(), Vec3::zeros()));
    }
    let d = state.bodies[i].position - state.bodies[j].position;
    let len = d.norm();
    if len < 1e-12 * radius_sum {
        return Err(Error::CoincidentCenters {
            i,
            j,
            separation: len,
        });
    }
    let overlap = 1.0 - len / radius_sum;
    if overlap <= 0.0 {
        return Ok((0.0, Vec3::zeros(), Vec3::zeros()));
    }
    let energy = 0.4 * stiffness * overlap.powf(2.5);
    let force_i = (stiffness / radius_sum) * overlap.powf(1.5) * (d / len);
    Ok((energy, force_i, -force_i))
}

/// Particle-wall contact as the half-space limit of [`contact_pp_eval`],
/// with the particle's own radius as the length scale:
/// gap `g = n·x − offset`, `δ = [1 − g/R]₊`, `U = (2/5) K δ^{5/2}`,
/// `F = (K/R) δ^{3/2} n`.
pub fn wall_eval(i: usize, state: &SystemState, wall: &Wall) -> (f64, Vec3) {
    let radius = 0.5 * state.props[i].diameter;
    if radius <= 0.0 {
        return (0.0, Vec3::zeros());
    }
    let gap = wall.normal.dot(&state.bodies[i].position) - wall.offset;
    let overlap = 1.0 - gap / radius;
    if overlap <= 0.0 {
        return (0.0, Vec3::zeros());
    }
    let energy = 0.4 * wall.stiffness * overlap.powf(2.5);
    let force = (wall.stiffness / radius) * overlap.powf(1.5) * wall.normal;
    (energy, force)
}

impl PotentialModel for BinderModel {
    fn potential(&self, state: &SystemState) -> Result<PotentialTerms> {
        let mut terms = PotentialTerms::default();
        for bond in &self.bonds {
            if bond.bending_stiffness != 0.0 {
                terms.bending += bond_bending_eval(bond, state)?.0;
            }
            if bond.axial_stiffness != 0.0 {
                terms.axial += bond_axial_eval(bond, state)?.0;
            }
            if bond.shear_stiffness != 0.0 {
                terms.shear += bond_shear_eval(bond, state, self.shear_mode)?.energy;
            }
        }
        if self.contact_stiffness != 0.0 {
            let n = state.n_bodies();
            for i in 0..n {
                for j in (i + 1)..n {
                    terms.contact += contact_pp_eval(i, j, state, self.contact_stiffness)?.0;
                }
            }
        }
        if let Some(wall) = &self.wall {
            for i in 0..state.n_bodies() {
                terms.wall += wall_eval(i, state, wall).0;
            }
        }
        Ok(terms)
    }

    fn forces_and_moments(&self, state: &SystemState) -> Result<ForceMoment> {
        let mut fm = ForceMoment::zeros(state.n_bodies());
        for bond in &self.bonds {
            if bond.bending_stiffness != 0.0 {
                let (_, m_i, m_j) = bond_bending_eval(bond, state)?;
                fm.add_moment(bond.i, m_i);
                fm.add_moment(bond.j, m_j);
            }
            if bond.axial_stiffness != 0.0 {
                let (_, f_i, f_j) = bond_axial_eval(bond, state)?;
                fm.add_force(bond.i, f_i);
                fm.add_force(bond.j, f_j);
            }
            if bond.shear_stiffness != 0.0 {
                let s = bond_shear_eval(bond, state, self.shear_mode)?;
                fm.add_force(bond.i, s.force_i);
                fm.add_force(bond.j, s.force_j);
                fm.add_moment(bond.i, s.moment_i);
                fm.add_moment(bond.j, s.moment_j);
            }
        }
        if self.contact_stiffness != 0.0 {
            let n = state.n_bodies();
            for i in 0..n {
                for j in (i + 1)..n {
                    let (_, f_i, f_j) = contact_pp_eval(i, j, state, self.contact_stiffness)?;
                    fm.add_force(i, f_i);
                    fm.add_force(j, f_j);
                }
            }
        }
        if let Some(wall) = &self.wall {
            for i in 0..state.n_bodies() {
                let (_, f) = wall_eval(i, state, wall);
                fm.add_force(i, f);
            }
        }
        Ok(fm)
    }
}

// ---------------------------------------------------------------------------
// Torus scenario
// ---------------------------------------------------------------------------

/// Parameters of the particle-binder torus impact scenario.
///
/// Defaults are the reference configuration: eighty unit-mass particles on a
/// ring of diameter 3 in point contact, binder stiffnesses
/// `(K^m, K^a, K^s) = (10, 200, 200)`, contact stiffness 2100 (walls too),
/// impact speed 1 against the `x = 0` plane, initial gap 5% of a particle
/// diameter.
#[derive(Clone, Debug)]
pub struct TorusParams {
    pub n_particles: usize,
    pub torus_diameter: f64,
    pub mass: f64,
    pub inertia: f64,
    pub bending_stiffness: f64,
    pub axial_stiffness: f64,
    pub shear_stiffness: f64,
    pub contact_stiffness: f64,
    pub impact_speed: f64,
    pub wall: Option<Wall>,
    pub shear_mode: ShearMode,
    /// Initial gap between the closest particle surface and the wall plane,
    /// as a fraction of the particle diameter.
    pub gap_fraction: f64,
}

impl Default for TorusParams {
    fn default() -> Self {
        TorusParams {
            n_particles: 80,
            torus_diameter: 3.0,
            mass: 1.0,
            inertia: 1.0,
            bending_stiffness: 10.0,
            axial_stiffness: 200.0,
            shear_stiffness: 200.0,
            contact_stiffness: 2100.0,
            impact_speed: 1.0,
            wall: Some(Wall {
                normal: Vec3::new(1.0, 0.0, 0.0),
                offset: 0.0,
                stiffness: 2100.0,
            }),
            shear_mode: ShearMode::Paper,
            gap_fraction: 0.05,
        }
    }
}

/// Build the torus: `N_p` particles of diameter `D_p = D_t sin(π/N_p)` on a
/// circle of diameter `D_t` in the x-y plane, neighbors bonded in a closed
/// chain with rest separations taken from the built positions, identity
/// attitudes, zero spin, and a uniform velocity `[−v0, 0, 0]`. The ring is
/// shifted along the wall normal so the closest particle surface sits at
/// `gap_fraction · D_p` from the plane (the `x = 0` plane when no wall is
/// attached).
pub fn build_torus(params: &TorusParams) -> Result<(SystemState, BinderModel)> {
    let n = params.n_particles;
    if n < 3 {
        return Err(Error::InvalidGeometry(format!(
            "torus needs at least 3 particles, got {n}"
        )));
    }
    let particle_diameter = params.torus_diameter * (PI / n as f64).sin();
    let ring_radius = 0.5 * params.torus_diameter;
    let velocity = Vec3::new(-params.impact_speed, 0.0, 0.0);

    // particle 0 on the wall-facing side of the ring
    let mut positions: Vec<Vec3> = (0..n)
        .map(|k| {
            let phi = PI + 2.0 * PI * k as f64 / n as f64;
            Vec3::new(ring_radius * phi.cos(), ring_radius * phi.sin(), 0.0)
        })
        .collect();

    let (plane_normal, plane_offset) = match &params.wall {
        Some(w) => (w.normal, w.offset),
        None => (Vec3::new(1.0, 0.0, 0.0), 0.0),
    };
    let min_surface = positions
        .iter()
        .map(|x| plane_normal.dot(x) - plane_offset - 0.5 * particle_diameter)
        .fold(f64::INFINITY, f64::min);
    let shift = plane_normal * (params.gap_fraction * particle_diameter - min_surface);
    for x in &mut positions {
        *x += shift;
    }

    let bonds = (0..n)
        .map(|k| {
            let i = k;
            let j = (k + 1) % n;
            Bond {
                i,
                j,
                rest_separation: positions[i] - positions[j],
                bending_stiffness: params.bending_stiffness,
                axial_stiffness: params.axial_stiffness,
                shear_stiffness: params.shear_stiffness,
            }
        })
        .collect();

    let bodies = positions
        .into_iter()
        .map(|position| BodyState {
            position,
            velocity,
            attitude: RodriguesVector::IDENTITY,
            angular_velocity: Vec3::zeros(),
        })
        .collect();
    let props = vec![
        BodyProperties {
            mass: params.mass,
            inertia: params.inertia,
            diameter: particle_diameter,
        };
        n
    ];

    let model = BinderModel {
        bonds,
        contact_stiffness: params.contact_stiffness,
        wall: params.wall,
        shear_mode: params.shear_mode,
    };
    Ok((SystemState::new(bodies, props), model))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQRT_HALF: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn pendulum_at(alpha: RodriguesVector, omega: Vec3) -> (SystemState, PendulumModel) {
        build_pendulum(&PendulumParams {
            alpha0: alpha,
            omega0: omega,
            ..Default::default()
        })
    }

    #[test]
    fn pendulum_energy_examples() {
        // upright: Rρ0 = e3
        let (s, m) = pendulum_at(RodriguesVector::IDENTITY, Vec3::zeros());
        assert!((m.potential(&s).unwrap().pendulum + 1.0).abs() < 1e-15);

        // reference initial tilt: 3π/4 about y
        let (s, m) = build_pendulum(&PendulumParams::default());
        let u = m.potential(&s).unwrap().pendulum;
        assert!((u - SQRT_HALF).abs() < 1e-12);

        let (e, axial, length) = pendulum_invariants(&s, &m).unwrap();
        assert!((e - (0.04 + SQRT_HALF)).abs() < 1e-12);
        assert!(axial.abs() < 1e-15);
        assert!((length - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pendulum_moment_examples() {
        let (s, m) = pendulum_at(RodriguesVector::IDENTITY, Vec3::zeros());
        assert_eq!(m.forces_and_moments(&s).unwrap().moment[0], Vec3::zeros());

        let (s, m) = build_pendulum(&PendulumParams::default());
        let fm = m.forces_and_moments(&s).unwrap();
        assert!((fm.moment[0] - Vec3::new(0.0, -SQRT_HALF, 0.0)).norm() < 1e-12);
        assert_eq!(fm.force[0], Vec3::zeros());

        // RM ⟂ Rρ0 and RM ⟂ e3 for arbitrary attitudes
        let (s, m) = pendulum_at(RodriguesVector::new(0.4, -1.3, 0.7), Vec3::zeros());
        let rm = m.forces_and_moments(&s).unwrap().moment[0];
        let arm = s.bodies[0].attitude.rotation_matrix().apply(&m.pivot_arm);
        assert!(rm.dot(&arm).abs() < 1e-15);
        assert!(rm.dot(&m.up).abs() < 1e-15);
    }

    fn two_body_state(
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
        SystemState::new(
            vec![
                BodyState {
                    position: x_i,
                    velocity: Vec3::zeros(),
                    attitude: a_i,
                    angular_velocity: Vec3::zeros(),
                },
                BodyState {
                    position: x_j,
                    velocity: Vec3::zeros(),
                    attitude: a_j,
                    angular_velocity: Vec3::zeros(),
                },
            ],
            vec![props, props],
        )
    }

    fn unit_bond(km: f64, ka: f64, ks: f64) -> Bond {
        Bond {
            i: 0,
            j: 1,
            rest_separation: Vec3::new(1.0, 0.0, 0.0),
            bending_stiffness: km,
            axial_stiffness: ka,
            shear_stiffness: ks,
        }
    }

    #[test]
    fn bending_examples() {
        let bond = unit_bond(10.0, 0.0, 0.0);
        let a = RodriguesVector::new(0.3, -0.2, 0.9);
        let s = two_body_state(Vec3::new(1.0, 0.0, 0.0), Vec3::zeros(), a, a, 0.0);
        let (u, mi, mj) = bond_bending_eval(&bond, &s).unwrap();
        assert!(u.abs() < 1e-24);
        assert!(mi.norm() < 1e-12 && mj.norm() < 1e-12);

        // i at identity, j rotated 90° about x: θ_ij = [−π/2, 0, 0]
        let s = two_body_state(
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::zeros(),
            RodriguesVector::IDENTITY,
            RodriguesVector::new(2.0, 0.0, 0.0),
            0.0,
        );
        let (u, mi, mj) = bond_bending_eval(&bond, &s).unwrap();
        assert!((u - 10.0 * PI * PI / 8.0).abs() < 1e-12);
        assert!((mi - Vec3::new(5.0 * PI, 0.0, 0.0)).norm() < 1e-12);
        assert!((mi + mj).norm() == 0.0);
    }

    #[test]
    fn axial_examples() {
        let bond = unit_bond(0.0, 200.0, 0.0);
        let s = two_body_state(
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::zeros(),
            RodriguesVector::IDENTITY,
            RodriguesVector::IDENTITY,
            0.0,
        );
        let (u, f_i, _) = bond_axial_eval(&bond, &s).unwrap();
        assert_eq!(u, 0.0);
        assert_eq!(f_i, Vec3::zeros());

        // stretched to 1.1 L0
        let s = two_body_state(
            Vec3::new(1.1, 0.0, 0.0),
            Vec3::zeros(),
            RodriguesVector::IDENTITY,
            RodriguesVector::IDENTITY,
            0.0,
        );
        let (u, f_i, f_j) = bond_axial_eval(&bond, &s).unwrap();
        assert!((u - 1.0).abs() < 1e-12);
        assert!((f_i.norm() - 20.0).abs() < 1e-10);
        assert!(f_i.x < 0.0, "force must shorten the bond");
        assert_eq!(f_j, -f_i);
        // central force
        let d = s.bodies[0].position - s.bodies[1].position;
        assert!(d.cross(&f_i).norm() < 1e-15);

        // coincident centers
        let s = two_body_state(
            Vec3::zeros(),
            Vec3::zeros(),
            RodriguesVector::IDENTITY,
            RodriguesVector::IDENTITY,
            0.0,
        );
        assert!(matches!(
            bond_axial_eval(&bond, &s),
            Err(Error::CoincidentCenters { .. })
        ));
    }

    #[test]
    fn shear_zero_when_undeformed() {
        let bond = unit_bond(0.0, 0.0, 200.0);
        let s = two_body_state(
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::zeros(),
            RodriguesVector::IDENTITY,
            RodriguesVector::IDENTITY,
            0.0,
        );
        for mode in [ShearMode::Paper, ShearMode::Invariant] {
            let e = bond_shear_eval(&bond, &s, mode).unwrap();
            assert_eq!(e.energy, 0.0);
            assert_eq!(e.force_i, Vec3::zeros());
            assert_eq!(e.moment_i, Vec3::zeros());
        }
    }

    #[test]
    fn shear_rigid_rotation_behavior() {
        let bond = unit_bond(0.0, 0.0, 200.0);
        // a deformed configuration
        let a_i = RodriguesVector::new(0.2, 0.5, -0.1);
        let a_j = RodriguesVector::new(-0.4, 0.1, 0.3);
        let x_i = Vec3::new(0.9, 0.3, -0.2);
        let s = two_body_state(x_i, Vec3::zeros(), a_i, a_j, 0.0);

        // common left rotation Q of everything
        let q = RodriguesVector::new(0.7, -0.9, 1.1);
        let qm = q.rotation_matrix();
        let rot = two_body_state(
            qm.apply(&x_i),
            Vec3::zeros(),
            a_i.compose(&q).unwrap(),
            a_j.compose(&q).unwrap(),
            0.0,
        );

        let u_inv = bond_shear_eval(&bond, &s, ShearMode::Invariant)
            .unwrap()
            .energy;
        let u_inv_rot = bond_shear_eval(&bond, &rot, ShearMode::Invariant)
            .unwrap()
            .energy;
        assert!((u_inv - u_inv_rot).abs() < 1e-12);

        // paper mode is frame-dependent by construction; pin that down
        let u_pap = bond_shear_eval(&bond, &s, ShearMode::Paper).unwrap().energy;
        let u_pap_rot = bond_shear_eval(&bond, &rot, ShearMode::Paper)
            .unwrap()
            .energy;
        assert!((u_pap - u_pap_rot).abs() > 1e-6);
    }

    #[test]
    fn bending_invariant_under_common_rotation() {
        let bond = unit_bond(10.0, 0.0, 0.0);
        let a_i = RodriguesVector::new(0.2, 0.5, -0.1);
        let a_j = RodriguesVector::new(-0.4, 0.1, 0.3);
        let s = two_body_state(Vec3::new(1.0, 0.0, 0.0), Vec3::zeros(), a_i, a_j, 0.0);
        let u = bond_bending_eval(&bond, &s).unwrap().0;

        let q = RodriguesVector::new(1.3, 0.4, -0.8);
        let rot = two_body_state(
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::zeros(),
            a_i.compose(&q).unwrap(),
            a_j.compose(&q).unwrap(),
            0.0,
        );
        let u_rot = bond_bending_eval(&bond, &rot).unwrap().0;
        assert!((u - u_rot).abs() < 1e-12);
    }

    #[test]
    fn contact_examples() {
        // radii sum 1 (each diameter 1), separation 0.9 → δ = 0.1
        let s = two_body_state(
            Vec3::new(0.9, 0.0, 0.0),
            Vec3::zeros(),
            RodriguesVector::IDENTITY,
            RodriguesVector::IDENTITY,
            1.0,
        );
        let (u, f_i, f_j) = contact_pp_eval(0, 1, &s, 2100.0).unwrap();
        assert!((f_i.norm() - 2100.0 * 0.1f64.powf(1.5)).abs() < 1e-9);
        assert!((f_i.norm() - 66.4078).abs() < 1e-3);
        assert!(f_i.x > 0.0, "repulsive");
        assert_eq!(f_j, -f_i);
        assert!((u - 0.4 * 2100.0 * 0.1f64.powf(2.5)).abs() < 1e-12);

        // separated: no contact
        let s = two_body_state(
            Vec3::new(1.2, 0.0, 0.0),
            Vec3::zeros(),
            RodriguesVector::IDENTITY,
            RodriguesVector::IDENTITY,
            1.0,
        );
        let (u, f_i, _) = contact_pp_eval(0, 1, &s, 2100.0).unwrap();
        assert_eq!((u, f_i), (0.0, Vec3::zeros()));

        // C¹ at onset: force → 0 with δ
        let s = two_body_state(
            Vec3::new(1.0 - 1e-9, 0.0, 0.0),
            Vec3::zeros(),
            RodriguesVector::IDENTITY,
            RodriguesVector::IDENTITY,
            1.0,
        );
        let (_, f_i, _) = contact_pp_eval(0, 1, &s, 2100.0).unwrap();
        assert!(f_i.norm() < 1e-9);
    }

    #[test]
    fn wall_examples() {
        let wall = Wall::new(Vec3::new(1.0, 0.0, 0.0), 0.0, 2100.0).unwrap();
        // gap 0.45, radius 0.5 → δ = 0.1
        let mut s = two_body_state(
            Vec3::new(0.45, 0.7, 0.0),
            Vec3::new(10.0, 0.0, 0.0),
            RodriguesVector::IDENTITY,
            RodriguesVector::IDENTITY,
            1.0,
        );
        let (u, f) = wall_eval(0, &s, &wall);
        assert!((f.norm() - 2100.0 * 0.1f64.powf(1.5) / 0.5).abs() < 1e-9);
        assert!((f.norm() - 132.8157).abs() < 1e-3);
        assert!(u > 0.0);
        assert!(
            f.cross(&wall.normal).norm() == 0.0,
            "frictionless wall force is normal"
        );
        assert_eq!((f.y, f.z), (0.0, 0.0));

        // out of reach
        s.bodies[0].position.x = 0.55;
        assert_eq!(wall_eval(0, &s, &wall), (0.0, Vec3::zeros()));
    }

    #[test]
    fn torus_construction() {
        let (state, model) = build_torus(&TorusParams::default()).unwrap();
        assert_eq!(state.n_bodies(), 80);
        assert_eq!(model.bonds.len(), 80);

        let dp = 3.0 * (PI / 80.0).sin();
        assert!((dp - 0.1177790).abs() < 1e-6);
        assert!((state.props[0].diameter - dp).abs() < 1e-15);

        // neighbors in point contact
        for bond in &model.bonds {
            assert!((bond.rest_separation.norm() - dp).abs() < 1e-12);
        }

        // closest surface at 5% of a particle diameter from the x = 0 plane
        let min_surface = state
            .bodies
            .iter()
            .map(|b| b.position.x - 0.5 * dp)
            .fold(f64::INFINITY, f64::min);
        assert!((min_surface - 0.05 * dp).abs() < 1e-12);

        for (b, p) in state.bodies.iter().zip(&state.props) {
            assert_eq!(b.velocity, Vec3::new(-1.0, 0.0, 0.0));
            assert_eq!(b.attitude, RodriguesVector::IDENTITY);
            assert_eq!(b.angular_velocity, Vec3::zeros());
            assert_eq!(b.position.z, 0.0);
            assert_eq!((p.mass, p.inertia), (1.0, 1.0));
        }

        assert!(matches!(
            build_torus(&TorusParams {
                n_particles: 2,
                ..Default::default()
            }),
            Err(Error::InvalidGeometry(_))
        ));
    }

    #[test]
    fn binder_energies_translation_invariant() {
        let (mut state, model) = build_torus(&TorusParams {
            n_particles: 8,
            ..Default::default()
        })
        .unwrap();
        // deform a little so every term is nonzero-capable
        for (k, b) in state.bodies.iter_mut().enumerate() {
            let t = k as f64;
            b.position += Vec3::new(t.sin(), (2.0 * t).cos(), t.sin() * 0.5) * 0.01;
            b.attitude = RodriguesVector::new(0.02 * t.sin(), -0.03 * t.cos(), 0.01 * t);
        }
        let u0 = model.potential(&state).unwrap();

        let shift = Vec3::new(-3.7, 1.9, 0.4);
        for b in &mut state.bodies {
            b.position += shift;
        }
        // the wall is not translation invariant; compare the binder terms only
        let u1 = model.potential(&state).unwrap();
        assert!((u0.bending - u1.bending).abs() < 1e-12);
        assert!((u0.axial - u1.axial).abs() < 1e-12);
        assert!((u0.shear - u1.shear).abs() < 1e-12);
        assert!((u0.contact - u1.contact).abs() < 1e-12);
    }

    #[test]
    fn shear_torque_balance_invariant_mode() {
        let bond = unit_bond(0.0, 0.0, 200.0);
        let s = two_body_state(
            Vec3::new(0.8, 0.4, -0.3),
            Vec3::new(-0.1, 0.05, 0.2),
            RodriguesVector::new(0.3, -0.6, 0.2),
            RodriguesVector::new(-0.2, 0.4, 0.9),
            0.0,
        );
        let e = bond_shear_eval(&bond, &s, ShearMode::Invariant).unwrap();
        let d = s.bodies[0].position - s.bodies[1].position;
        let net = d.cross(&e.force_i) + e.moment_i + e.moment_j;
        assert!(net.norm() < 1e-10, "net torque {net:?}");
    }

    #[test]
    fn wall_normal_must_be_nonzero() {
        assert!(Wall::new(Vec3::zeros(), 0.0, 1.0).is_err());
        let w = Wall::new(Vec3::new(0.0, 0.0, 2.0), 1.0, 5.0).unwrap();
        assert!((w.normal.norm() - 1.0).abs() < 1e-15);
    }
}
