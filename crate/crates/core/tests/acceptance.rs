//! Acceptance suite: one test per criterion, each printing a single
//! `ACCEPTANCE <n> (<name>): PASS|FAIL` line with the measured values.
//!
//! Criteria 3, 4 and 6 exercise the particle-binder impact at step sizes
//! where the scenario's contact stiffness (K = 2100 acting on particles of
//! diameter ≈ 0.118, wall-contact frequency ω ≈ 4.5·10²) exceeds what a
//! fixed-step explicit scheme can resolve: h = 10⁻² sits beyond the hω < 2
//! stability limit and the impact scrambles trajectory phases enough that
//! pointwise self-convergence saturates. Those tests assert the stated
//! bounds anyway and are expected to fail; the printed measurements document
//! the actual behavior. See the test bodies for details.

use std::time::Instant;

use rodmech_core::checks;
use rodmech_core::diagnostics::{convergence_study, RefRule};
use rodmech_core::dynamics::{
    simulate, ForceMoment, PotentialModel, PotentialTerms, StepScheme, SystemState,
};
use rodmech_core::models::{
    build_pendulum, build_torus, pendulum_invariants, PendulumParams, ShearMode, TorusParams,
};
use rodmech_core::rotations::Vec3;

fn report(n: usize, name: &str, pass: bool, detail: &str) -> bool {
    println!(
        "ACCEPTANCE {n} ({name}): {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    pass
}

fn in_window(x: f64, lo: f64, hi: f64) -> bool {
    x.is_finite() && x >= lo && x <= hi
}

#[test]
fn criterion_1_pendulum_convergence() {
    let started = Instant::now();
    let (s0, model) = build_pendulum(&PendulumParams::default());
    let h_list = [1e-1, 3e-2, 1e-2, 3e-3, 1e-3];
    let mut pass = true;
    let mut detail = String::new();
    for scheme in [StepScheme::Vti1, StepScheme::Vti2] {
        let r = convergence_study(&s0, &model, scheme, &h_list, 10.0, RefRule::default()).unwrap();
        let e_ok = in_window(r.energy_fit.slope, 1.8, 2.2);
        let q_ok = in_window(r.trajectory_fit.slope, 0.8, 1.2);
        pass &= e_ok && q_ok;
        detail.push_str(&format!(
            "{}: energy slope {:.3} (want [1.8,2.2]), q slope {:.3} (want [0.8,1.2]); ",
            scheme.name(),
            r.energy_fit.slope,
            r.trajectory_fit.slope
        ));
    }
    let elapsed = started.elapsed().as_secs_f64();
    let time_ok = elapsed < 10.0;
    pass &= time_ok;
    detail.push_str(&format!("runtime {elapsed:.2}s (want < 10s)"));
    assert!(report(1, "pendulum convergence", pass, &detail));
}

#[test]
fn criterion_2_pendulum_exact_invariants() {
    let (s0, model) = build_pendulum(&PendulumParams::default());
    let mut pass = true;
    let mut detail = String::new();
    for scheme in [StepScheme::Vti1, StepScheme::Vti2] {
        let mut max_axial: f64 = 0.0;
        let mut max_len_dev: f64 = 0.0;
        simulate(&s0, &model, scheme, 1e-3, 100.0, 1, |state, _, _| {
            let (_, axial, length) = pendulum_invariants(state, &model).unwrap();
            max_axial = max_axial.max(axial.abs());
            max_len_dev = max_len_dev.max((length - 1.0).abs());
        })
        .unwrap();
        let ok = max_axial <= 1e-12 && max_len_dev <= 1e-13;
        pass &= ok;
        detail.push_str(&format!(
            "{}: max|Rρ0·Ω| = {max_axial:.2e} (≤1e-12), max|‖Rρ0‖−1| = {max_len_dev:.2e} (≤1e-13); ",
            scheme.name()
        ));
    }
    assert!(report(2, "pendulum exact invariants", pass, &detail));
}

#[test]
fn criterion_3_torus_impact_energy() {
    let (s0, model) = build_torus(&TorusParams::default()).unwrap();
    let mut e0 = f64::NAN;
    let mut ke_trans0 = f64::NAN;
    let mut max_drift: f64 = 0.0;
    let mut max_terms = PotentialTerms::default();
    let mut max_ke_rot: f64 = 0.0;
    let mut first = true;
    let result = simulate(
        &s0,
        &model,
        StepScheme::Vti2,
        1e-3,
        25.0,
        1,
        |_, ledger, _| {
            if first {
                e0 = ledger.total;
                ke_trans0 = ledger.kinetic_translational;
                first = false;
            }
            max_drift = max_drift.max((ledger.total - e0).abs() / e0.abs());
            max_ke_rot = max_ke_rot.max(ledger.kinetic_rotational);
            let p = &ledger.potential;
            max_terms.bending = max_terms.bending.max(p.bending);
            max_terms.axial = max_terms.axial.max(p.axial);
            max_terms.shear = max_terms.shear.max(p.shear);
            max_terms.contact = max_terms.contact.max(p.contact);
            max_terms.wall = max_terms.wall.max(p.wall);
        },
    );

    let completed = result.is_ok();
    let threshold = 1e-4 * 40.0;
    let transfer_ok = completed
        && (ke_trans0 - 40.0).abs() < 1e-9
        && max_terms.bending > threshold
        && max_terms.axial > threshold
        && max_terms.shear > threshold
        && max_terms.contact > threshold
        && max_terms.wall > threshold
        && max_ke_rot > threshold;
    let drift_ok = completed && max_drift <= 1e-3;
    let detail = format!(
        "completed={completed}; ke_trans(0)={ke_trans0:.6}; term maxima Um={:.3} Ua={:.3} Us={:.3} Upp={:.3} Upw={:.3} ke_rot={:.3}; max|E−E0|/E0 = {max_drift:.3e} (want ≤ 1e-3)",
        max_terms.bending, max_terms.axial, max_terms.shear, max_terms.contact, max_terms.wall, max_ke_rot
    );
    assert!(report(
        3,
        "torus impact energy",
        transfer_ok && drift_ok,
        &detail
    ));
}

#[test]
fn criterion_4_long_time_stability() {
    let (s0, model) = build_torus(&TorusParams::default()).unwrap();
    let mut pass = true;
    let mut detail = String::new();
    for scheme in [StepScheme::Vti2, StepScheme::Vti3] {
        let mut e0 = f64::NAN;
        let mut first = true;
        let mut early: f64 = 0.0;
        let mut late: f64 = 0.0;
        let result = simulate(&s0, &model, scheme, 1e-2, 500.0, 5, |state, ledger, _| {
            if first {
                e0 = ledger.total;
                first = false;
            }
            let drift = (ledger.total - e0).abs() / e0.abs();
            if state.time <= 250.0 {
                early = early.max(drift);
            } else {
                late = late.max(drift);
            }
        });
        match result {
            Ok(_) => {
                let ok = early.is_finite() && late.is_finite() && late <= 2.0 * early;
                pass &= ok;
                detail.push_str(&format!(
                    "{}: max drift [0,250] = {early:.3e}, (250,500] = {late:.3e} (want late ≤ 2×early, bounded); ",
                    scheme.name()
                ));
            }
            Err(e) => {
                pass = false;
                detail.push_str(&format!("{}: did not complete ({e}); ", scheme.name()));
            }
        }
    }
    assert!(report(4, "torus long-time stability", pass, &detail));
}

#[test]
fn criterion_5_momentum_conservation() {
    let mut pass = true;
    let mut detail = String::new();

    // free-floating: every component of P and L_total
    let free = TorusParams {
        wall: None,
        shear_mode: ShearMode::Invariant,
        ..Default::default()
    };
    let (s0, model) = build_torus(&free).unwrap();
    for scheme in [StepScheme::Vti1, StepScheme::Vti2] {
        let mut m0 = None;
        let mut worst: f64 = 0.0;
        simulate(&s0, &model, scheme, 1e-3, 25.0, 1, |_, _, m| {
            let m0 = m0.get_or_insert(*m);
            worst = worst
                .max((m.linear - m0.linear).abs().max())
                .max((m.total_angular - m0.total_angular).abs().max());
        })
        .unwrap();
        let m0 = m0.unwrap();
        let scale = m0.linear.norm().max(m0.total_angular.norm()).max(1.0);
        let rel = worst / scale;
        pass &= rel <= 1e-11;
        detail.push_str(&format!(
            "free {}: max component drift {rel:.2e} rel (≤1e-11); ",
            scheme.name()
        ));
    }

    // with the wall: the symmetry-protected components P_y, P_z, L_x
    let walled = TorusParams {
        shear_mode: ShearMode::Invariant,
        ..Default::default()
    };
    let (s0, model) = build_torus(&walled).unwrap();
    for scheme in [StepScheme::Vti1, StepScheme::Vti2] {
        let mut m0 = None;
        let mut worst: f64 = 0.0;
        simulate(&s0, &model, scheme, 1e-3, 25.0, 1, |_, _, m| {
            let m0 = m0.get_or_insert(*m);
            worst = worst
                .max((m.linear.y - m0.linear.y).abs())
                .max((m.linear.z - m0.linear.z).abs())
                .max((m.total_angular.x - m0.total_angular.x).abs());
        })
        .unwrap();
        let m0 = m0.unwrap();
        let scale = m0.linear.norm().max(m0.total_angular.norm()).max(1.0);
        let rel = worst / scale;
        pass &= rel <= 1e-10;
        detail.push_str(&format!(
            "wall {}: max (Py,Pz,Lx) drift {rel:.2e} rel (≤1e-10); ",
            scheme.name()
        ));
    }
    assert!(report(5, "momentum conservation", pass, &detail));
}

#[test]
fn criterion_6_torus_convergence() {
    let (s0, model) = build_torus(&TorusParams::default()).unwrap();
    let h_list = [1e-2, 3e-3, 1e-3];
    let mut pass = true;
    let mut detail = String::new();
    for (scheme, e_window, q_window) in [
        (StepScheme::Vti1, (1.8, 2.2), (0.8, 1.2)),
        (StepScheme::Vti2, (1.8, 2.2), (0.8, 1.2)),
        (StepScheme::Vti3, (0.8, 1.2), (0.8, 1.2)),
    ] {
        match convergence_study(&s0, &model, scheme, &h_list, 10.0, RefRule::default()) {
            Ok(r) => {
                let e_ok = in_window(r.energy_fit.slope, e_window.0, e_window.1);
                let q_ok = in_window(r.trajectory_fit.slope, q_window.0, q_window.1);
                pass &= e_ok && q_ok;
                detail.push_str(&format!(
                    "{}: energy slope {:.3} (want [{},{}]), q slope {:.3} (want [{},{}]); ",
                    scheme.name(),
                    r.energy_fit.slope,
                    e_window.0,
                    e_window.1,
                    r.trajectory_fit.slope,
                    q_window.0,
                    q_window.1
                ));
            }
            Err(e) => {
                pass = false;
                detail.push_str(&format!("{}: study failed ({e}); ", scheme.name()));
            }
        }
    }
    assert!(report(6, "torus convergence", pass, &detail));
}

#[test]
fn criterion_7_oracle_suites() {
    let outcomes = checks::run_all(0).unwrap();
    let pass = outcomes.iter().all(|c| c.pass);
    let mut detail = String::new();
    for c in &outcomes {
        detail.push_str(&format!(
            "{} {:.2e}{}; ",
            c.name,
            c.measured,
            if c.pass { "" } else { " (FAILED)" }
        ));
    }
    assert!(report(7, "oracle suites", pass, &detail));
}

/// Pendulum variant whose moment rotates the up direction into the body
/// frame, `RM = Rρ0 × Rᵀe3`, instead of the energy-consistent
/// `mg (Rρ0 × e3)`. A negative control: it must fail the
/// finite-difference consistency check.
struct MismatchedMomentPendulum(rodmech_core::models::PendulumModel);

impl PotentialModel for MismatchedMomentPendulum {
    fn potential(&self, s: &SystemState) -> rodmech_core::Result<PotentialTerms> {
        self.0.potential(s)
    }
    fn forces_and_moments(&self, s: &SystemState) -> rodmech_core::Result<ForceMoment> {
        let mut fm = ForceMoment::zeros(s.n_bodies());
        let r = s.bodies[0].attitude.rotation_matrix();
        let arm = r.apply(&self.0.pivot_arm);
        fm.moment[0] = arm.cross(&r.apply_transpose(&self.0.up));
        Ok(fm)
    }
}

/// Hertz contact with a 5/2 energy prefactor against the unchanged force:
/// off from `−∂U/∂x` by a factor 25/4. The second negative control.
struct MismatchedPrefactorContact {
    stiffness: f64,
}

impl PotentialModel for MismatchedPrefactorContact {
    fn potential(&self, s: &SystemState) -> rodmech_core::Result<PotentialTerms> {
        let radius_sum = 0.5 * (s.props[0].diameter + s.props[1].diameter);
        let len = (s.bodies[0].position - s.bodies[1].position).norm();
        let overlap = (1.0 - len / radius_sum).max(0.0);
        Ok(PotentialTerms {
            contact: 2.5 * self.stiffness * overlap.powf(2.5),
            ..Default::default()
        })
    }
    fn forces_and_moments(&self, s: &SystemState) -> rodmech_core::Result<ForceMoment> {
        let radius_sum = 0.5 * (s.props[0].diameter + s.props[1].diameter);
        let d = s.bodies[0].position - s.bodies[1].position;
        let len = d.norm();
        let overlap = (1.0 - len / radius_sum).max(0.0);
        let mut fm = ForceMoment::zeros(2);
        let f = (self.stiffness / radius_sum) * overlap.powf(1.5) * (d / len);
        fm.force[0] = f;
        fm.force[1] = -f;
        Ok(fm)
    }
}

#[test]
fn criterion_8_negative_control_regressions() {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);

    // the implemented pendulum passes, the printed moment fails
    let (s0, good) = build_pendulum(&PendulumParams::default());
    let mismatched = MismatchedMomentPendulum(good.clone());
    let mut good_dev: f64 = 0.0;
    let mut mismatched_dev: f64 = 0.0;
    for _ in 0..20 {
        let mut s = s0.clone();
        let angle = rand::Rng::gen_range(&mut rng, 0.3..2.5);
        let axis = Vec3::new(
            rand::Rng::gen_range(&mut rng, -1.0..1.0),
            rand::Rng::gen_range(&mut rng, -1.0..1.0),
            rand::Rng::gen_range(&mut rng, -1.0..1.0),
        )
        .normalize();
        s.bodies[0].attitude =
            rodmech_core::rotations::RodriguesVector(axis * 2.0 * (angle / 2.0_f64).tan());
        good_dev = good_dev.max(checks::fd_moment_deviation(&good, &s, 1e-5, &mut rng).unwrap());
        mismatched_dev = mismatched_dev
            .max(checks::fd_moment_deviation(&mismatched, &s, 1e-5, &mut rng).unwrap());
    }

    // the implemented contact passes, the 5/2 prefactor fails
    let (torus_state, _) = build_torus(&TorusParams {
        n_particles: 3,
        ..Default::default()
    })
    .unwrap();
    let mut contact_state = torus_state.clone();
    // compress two particles into smooth overlap
    let towards = contact_state.bodies[1].position - contact_state.bodies[0].position;
    contact_state.bodies[1].position -= towards * 0.1;
    let good_contact = rodmech_core::models::BinderModel {
        bonds: vec![],
        contact_stiffness: 2100.0,
        wall: None,
        shear_mode: ShearMode::Paper,
    };
    let mismatched_contact = MismatchedPrefactorContact { stiffness: 2100.0 };
    let pair = SystemState::new(
        contact_state.bodies[0..2].to_vec(),
        contact_state.props[0..2].to_vec(),
    );
    let good_contact_dev = checks::fd_force_deviation(&good_contact, &pair, 1e-5).unwrap();
    let mismatched_contact_dev =
        checks::fd_force_deviation(&mismatched_contact, &pair, 1e-5).unwrap();

    let pass = good_dev <= 1e-6
        && mismatched_dev > 1e-6
        && good_contact_dev <= 1e-6
        && mismatched_contact_dev > 1e-6;
    let detail = format!(
        "pendulum moment: implemented dev {good_dev:.2e} (≤1e-6), mismatched dev {mismatched_dev:.2e} (>1e-6); \
         contact prefactor: implemented dev {good_contact_dev:.2e} (≤1e-6), mismatched dev {mismatched_contact_dev:.2e} (>1e-6)"
    );
    assert!(report(8, "negative-control regressions", pass, &detail));
}
