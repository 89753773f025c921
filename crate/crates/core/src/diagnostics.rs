//! Conservation and convergence diagnostics: the per-sample energy ledger,
//! momentum maps, the Sobolev-type trajectory norm, relative error measures
//! for trajectories and total energy, and the convergence-order harness.

use crate::dynamics::{
    simulate, BodyState, PotentialModel, PotentialTerms, StepScheme, SystemState,
};
use crate::error::Error;
use crate::rotations::Vec3;
use crate::Result;
use rayon::prelude::*;

/// Energy breakdown at one instant. `total` is the sum of every other entry.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct EnergyLedger {
    pub time: f64,
    pub kinetic_translational: f64,
    pub kinetic_rotational: f64,
    pub potential: PotentialTerms,
    pub total: f64,
}

/// The momentum maps: total linear momentum, spin angular momentum `Σ J Ω`,
/// and total angular momentum `Σ (x × m v + J Ω)` about the inertial origin.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct Momenta {
    pub linear: Vec3,
    pub spin: Vec3,
    pub total_angular: Vec3,
}

/// One point of a recorded trajectory.
#[derive(Clone, Debug)]
pub struct TrajectorySample {
    pub time: f64,
    pub bodies: Vec<BodyState>,
}

impl TrajectorySample {
    pub fn of(state: &SystemState) -> Self {
        TrajectorySample {
            time: state.time,
            bodies: state.bodies.clone(),
        }
    }
}

/// Kinetic energy from the state plus the model's potential terms.
///
/// For spherical bodies `‖ω‖ = ‖Ω‖`, so the rotational term is
/// `Σ ½ J ‖Ω‖²` in the inertial frame.
pub fn energy_ledger<M: PotentialModel + ?Sized>(
    state: &SystemState,
    model: &M,
) -> Result<EnergyLedger> {
    let mut ke_trans = 0.0;
    let mut ke_rot = 0.0;
    for (body, props) in state.bodies.iter().zip(&state.props) {
        ke_trans += 0.5 * props.mass * body.velocity.norm_squared();
        ke_rot += 0.5 * props.inertia * body.angular_velocity.norm_squared();
    }
    let potential = model.potential(state)?;
    Ok(EnergyLedger {
        time: state.time,
        kinetic_translational: ke_trans,
        kinetic_rotational: ke_rot,
        potential,
        total: ke_trans + ke_rot + potential.total(),
    })
}

/// Momentum maps of a state; see [`Momenta`].
pub fn momenta(state: &SystemState) -> Momenta {
    let mut linear = Vec3::zeros();
    let mut spin = Vec3::zeros();
    let mut orbital = Vec3::zeros();
    for (body, props) in state.bodies.iter().zip(&state.props) {
        let p = props.mass * body.velocity;
        linear += p;
        spin += props.inertia * body.angular_velocity;
        orbital += body.position.cross(&p);
    }
    Momenta {
        linear,
        spin,
        total_angular: orbital + spin,
    }
}

/// Streaming trapezoidal quadrature of a scalar signal on a time grid.
#[derive(Clone, Copy, Debug, Default)]
pub struct TrapezoidAccumulator {
    prev: Option<(f64, f64)>,
    sum: f64,
}

impl TrapezoidAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, t: f64, value: f64) {
        if let Some((tp, vp)) = self.prev {
            self.sum += 0.5 * (vp + value) * (t - tp);
        }
        self.prev = Some((t, value));
    }

    pub fn integral(&self) -> f64 {
        self.sum
    }
}

/// Squared trajectory-norm integrand of one state:
/// `Σ_bodies ‖x‖² + ‖v‖² + θ(α)² + ‖Ω‖²`, where `θ(α)` is the rotation
/// angle (the `‖log R‖²_F / 2` term).
pub fn h1_integrand(bodies: &[BodyState]) -> f64 {
    bodies
        .iter()
        .map(|b| {
            b.position.norm_squared()
                + b.velocity.norm_squared()
                + b.attitude.angle().powi(2)
                + b.angular_velocity.norm_squared()
        })
        .sum()
}

fn check_uniform_grid(traj: &[TrajectorySample]) -> Result<()> {
    if traj.len() < 2 {
        return Err(Error::InsufficientData(
            "trajectory norm needs at least two samples".into(),
        ));
    }
    let dt = traj[1].time - traj[0].time;
    for w in traj.windows(2) {
        let step = w[1].time - w[0].time;
        if (step - dt).abs() > 1e-6 * dt.abs().max(1e-300) {
            return Err(Error::NonuniformGrid {
                expected: dt,
                found: step,
            });
        }
    }
    Ok(())
}

/// Squared H¹-type norm of a uniformly sampled trajectory, by trapezoidal
/// quadrature of [`h1_integrand`] over the sampled span.
pub fn h1_norm_sq(traj: &[TrajectorySample]) -> Result<f64> {
    check_uniform_grid(traj)?;
    let mut acc = TrapezoidAccumulator::new();
    for s in traj {
        acc.push(s.time, h1_integrand(&s.bodies));
    }
    Ok(acc.integral())
}

/// Relative energy error over a run:
/// `√∫(E_h(t) − E0)² dt / √∫E0² dt`, both by trapezoid on the sample grid
/// spanning `span` time units. Fails if `E0 = 0`.
pub fn e_error(energy_samples: &[f64], e0: f64, span: f64) -> Result<f64> {
    if e0 == 0.0 {
        return Err(Error::ZeroReferenceEnergy);
    }
    if energy_samples.len() < 2 || span <= 0.0 {
        return Err(Error::InsufficientData(
            "energy error needs at least two samples over a positive span".into(),
        ));
    }
    let dt = span / (energy_samples.len() - 1) as f64;
    let mut acc = TrapezoidAccumulator::new();
    for (k, e) in energy_samples.iter().enumerate() {
        acc.push(k as f64 * dt, (e - e0).powi(2));
    }
    Ok((acc.integral() / (e0 * e0 * span)).sqrt())
}

/// Relative trajectory error between a run and a reference over the same
/// span, as the root of the difference of their squared norms:
///
/// ```text
/// q-error = |‖q_h‖² − ‖q_ref‖²|^{1/2} / ‖q_ref‖
/// ```
///
/// The grids may differ as long as the spans agree; each norm is integrated
/// on its own grid.
pub fn q_error(traj_h: &[TrajectorySample], traj_ref: &[TrajectorySample]) -> Result<f64> {
    if traj_h.len() < 2 || traj_ref.len() < 2 {
        return Err(Error::InsufficientData(
            "trajectory error needs at least two samples".into(),
        ));
    }
    let (a0, a1) = (traj_h[0].time, traj_h.last().unwrap().time);
    let (b0, b1) = (traj_ref[0].time, traj_ref.last().unwrap().time);
    let tol = 1e-9 * (b1 - b0).abs().max(1.0);
    if (a0 - b0).abs() > tol || (a1 - b1).abs() > tol {
        return Err(Error::MismatchedSpan { a0, a1, b0, b1 });
    }
    let norm_h = h1_norm_sq(traj_h)?;
    let norm_ref = h1_norm_sq(traj_ref)?;
    if norm_ref == 0.0 {
        return Err(Error::InvalidParameter(
            "reference trajectory has zero norm".into(),
        ));
    }
    Ok(((norm_h - norm_ref).abs() / norm_ref).sqrt())
}

/// Least-squares power-law fit `error ≈ C · hᵖ` on log-log axes.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Ordinary least squares of `ln error` against `ln h`.
///
/// Points with non-positive error are rejected; at least two must remain.
pub fn fit_loglog(points: &[(f64, f64)]) -> Result<FitResult> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(h, e)| *h > 0.0 && *e > 0.0)
        .map(|(h, e)| (h.ln(), e.ln()))
        .collect();
    if logs.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "log-log fit needs at least 2 positive points, got {}",
            logs.len()
        )));
    }
    let n = logs.len() as f64;
    let mean_x = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = logs
        .iter()
        .map(|p| (p.1 - (intercept + slope * p.0)).powi(2))
        .sum();
    let ss_tot: f64 = logs.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let r_squared = if ss_tot == 0.0 {
        if ss_res == 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        1.0 - ss_res / ss_tot
    };
    Ok(FitResult {
        slope,
        intercept,
        r_squared,
    })
}

/// How the reference trajectory of a convergence study is produced: the same
/// scenario integrated with `scheme` at `min(h_list) / step_divisor`.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct RefRule {
    pub scheme: StepScheme,
    pub step_divisor: u32,
}

impl Default for RefRule {
    fn default() -> Self {
        RefRule {
            scheme: StepScheme::Vti1,
            step_divisor: 10,
        }
    }
}

/// Errors measured at one step size.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct ConvergencePoint {
    pub h: f64,
    pub e_error: f64,
    pub q_error: f64,
    /// Conventional relative H¹ norm of the trajectory *difference*,
    /// `‖q_h − q_ref‖ / ‖q_ref‖` — a stricter measure than [`q_error`];
    /// only available when the grid aligns with the reference grid.
    pub q_error_diff: Option<f64>,
}

/// Result of a convergence study over a list of step sizes.
#[derive(Clone, Debug, serde::Serialize)]
pub struct ConvergenceReport {
    pub scheme: StepScheme,
    pub t_end: f64,
    pub ref_h: f64,
    pub points: Vec<ConvergencePoint>,
    pub energy_fit: FitResult,
    pub trajectory_fit: FitResult,
}

struct RunAccumulators {
    e0: f64,
    energy_sq_dev: TrapezoidAccumulator,
    h1: TrapezoidAccumulator,
    diff: TrapezoidAccumulator,
    diff_valid: bool,
}

/// Run the same scenario at every `h` in `h_list` (descending), measure the
/// relative energy and trajectory errors against the [`RefRule`] reference
/// run, and fit log-log slopes. Runs execute in parallel on the current
/// rayon pool; the report order is deterministic.
pub fn convergence_study<M>(
    initial: &SystemState,
    model: &M,
    scheme: StepScheme,
    h_list: &[f64],
    t_end: f64,
    ref_rule: RefRule,
) -> Result<ConvergenceReport>
where
    M: PotentialModel + Sync + ?Sized,
{
    if h_list.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "convergence study needs at least 3 step sizes, got {}",
            h_list.len()
        )));
    }
    if t_end <= 0.0 {
        return Err(Error::InvalidParameter(
            "convergence study needs a positive span".into(),
        ));
    }
    let mut hs = h_list.to_vec();
    hs.sort_by(|a, b| b.partial_cmp(a).unwrap());
    if hs.windows(2).any(|w| w[0] == w[1]) || hs.iter().any(|h| *h <= 0.0) {
        return Err(Error::InvalidParameter(
            "step sizes must be positive and distinct".into(),
        ));
    }
    let h_min = *hs.last().unwrap();
    if ref_rule.step_divisor == 0 {
        return Err(Error::InvalidParameter(
            "reference divisor must be ≥ 1".into(),
        ));
    }
    let h_ref = h_min / ref_rule.step_divisor as f64;

    // Reference run: stream its norm and keep samples on the h_min grid so
    // aligned coarse runs can also measure the plain difference norm.
    let divisor = ref_rule.step_divisor as usize;
    let mut ref_norm_acc = TrapezoidAccumulator::new();
    let mut ref_coarse: Vec<TrajectorySample> = Vec::new();
    {
        let mut k = 0usize;
        simulate(
            initial,
            model,
            ref_rule.scheme,
            h_ref,
            t_end,
            1,
            |s, _, _| {
                ref_norm_acc.push(s.time, h1_integrand(&s.bodies));
                if k.is_multiple_of(divisor) {
                    ref_coarse.push(TrajectorySample::of(s));
                }
                k += 1;
            },
        )?;
    }
    let ref_norm_sq = ref_norm_acc.integral();
    if ref_norm_sq == 0.0 {
        return Err(Error::InvalidParameter(
            "reference trajectory has zero norm".into(),
        ));
    }

    let points: Result<Vec<ConvergencePoint>> = hs
        .par_iter()
        .map(|&h| {
            let ratio = h / h_min;
            let stride = ratio.round() as usize;
            let aligned = stride >= 1 && (ratio - stride as f64).abs() < 1e-9;

            let mut acc = RunAccumulators {
                e0: f64::NAN,
                energy_sq_dev: TrapezoidAccumulator::new(),
                h1: TrapezoidAccumulator::new(),
                diff: TrapezoidAccumulator::new(),
                diff_valid: aligned,
            };
            let mut k = 0usize;
            simulate(initial, model, scheme, h, t_end, 1, |s, ledger, _| {
                if k == 0 {
                    acc.e0 = ledger.total;
                }
                acc.energy_sq_dev
                    .push(s.time, (ledger.total - acc.e0).powi(2));
                acc.h1.push(s.time, h1_integrand(&s.bodies));
                if acc.diff_valid {
                    match ref_coarse.get(k * stride) {
                        Some(r) => {
                            let d = difference_integrand(&s.bodies, &r.bodies);
                            acc.diff.push(s.time, d);
                        }
                        None => acc.diff_valid = false,
                    }
                }
                k += 1;
            })?;

            if acc.e0 == 0.0 {
                return Err(Error::ZeroReferenceEnergy);
            }
            let e_err = (acc.energy_sq_dev.integral() / (acc.e0 * acc.e0 * t_end)).sqrt();
            let q_err = ((acc.h1.integral() - ref_norm_sq).abs() / ref_norm_sq).sqrt();
            let q_diff = acc
                .diff_valid
                .then(|| (acc.diff.integral() / ref_norm_sq).sqrt());
            Ok(ConvergencePoint {
                h,
                e_error: e_err,
                q_error: q_err,
                q_error_diff: q_diff,
            })
        })
        .collect();
    let points = points?;

    let energy_fit = fit_loglog(&points.iter().map(|p| (p.h, p.e_error)).collect::<Vec<_>>())?;
    let trajectory_fit = fit_loglog(&points.iter().map(|p| (p.h, p.q_error)).collect::<Vec<_>>())?;
    Ok(ConvergenceReport {
        scheme,
        t_end,
        ref_h: h_ref,
        points,
        energy_fit,
        trajectory_fit,
    })
}

/// Squared pointwise difference of two states of the same system, measured
/// like [`h1_integrand`] with the rotation part as the relative rotation
/// angle.
pub fn difference_integrand(a: &[BodyState], b: &[BodyState]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let rot = crate::rotations::relative_rotation(&x.attitude, &y.attitude)
                .map(|r| r.angle())
                .unwrap_or(std::f64::consts::PI);
            (x.position - y.position).norm_squared()
                + (x.velocity - y.velocity).norm_squared()
                + rot * rot
                + (x.angular_velocity - y.angular_velocity).norm_squared()
        })
        .sum()
}
