//! Scenario configuration: a single JSON document whose absent fields fall
//! back to the reference parameter sets of each scenario.

use rodmech_core::dynamics::{BodyProperties, BodyState, StepScheme, SystemState};
use rodmech_core::models::{
    build_pendulum, build_torus, BinderModel, PendulumModel, PendulumParams, ShearMode,
    TorusParams, Wall,
};
use rodmech_core::rotations::{RodriguesVector, Vec3};
use serde::Deserialize;

use crate::CliError;

fn de_vec3(v: [f64; 3]) -> Vec3 {
    Vec3::new(v[0], v[1], v[2])
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioKind {
    Pendulum,
    Torus,
    Custom,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PendulumConfig {
    #[serde(default = "one")]
    pub m: f64,
    #[serde(default = "one")]
    pub g: f64,
    #[serde(default = "one")]
    pub j: f64,
    /// Initial attitude (rescaled Rodrigues vector); default is the
    /// reference tilt of 3π/4 about y.
    pub alpha0: Option<[f64; 3]>,
    /// Initial spatial angular velocity; default `[0.2, 0, 0.2]`.
    pub omega0: Option<[f64; 3]>,
}

impl Default for PendulumConfig {
    fn default() -> Self {
        PendulumConfig {
            m: 1.0,
            g: 1.0,
            j: 1.0,
            alpha0: None,
            omega0: None,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WallConfig {
    #[serde(default = "yes")]
    pub enabled: bool,
    #[serde(default = "unit_x")]
    pub normal: [f64; 3],
    #[serde(default)]
    pub offset: f64,
}

impl Default for WallConfig {
    fn default() -> Self {
        WallConfig {
            enabled: true,
            normal: [1.0, 0.0, 0.0],
            offset: 0.0,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TorusConfig {
    #[serde(default = "eighty")]
    pub np: usize,
    #[serde(default = "three")]
    pub dt: f64,
    #[serde(default = "one")]
    pub m: f64,
    #[serde(default = "one")]
    pub j: f64,
    #[serde(default = "ten")]
    pub km: f64,
    #[serde(default = "two_hundred")]
    pub ka: f64,
    #[serde(default = "two_hundred")]
    pub ks: f64,
    #[serde(default = "contact_k")]
    pub kpp: f64,
    #[serde(default = "contact_k")]
    pub kpw: f64,
    #[serde(default = "one")]
    pub v0: f64,
    #[serde(default)]
    pub wall: WallConfig,
    #[serde(default = "paper_shear")]
    pub shear_mode: ShearMode,
    #[serde(default = "gap")]
    pub gap_fraction: f64,
}

impl Default for TorusConfig {
    fn default() -> Self {
        serde_json::from_str("{}").unwrap()
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomBody {
    pub x: [f64; 3],
    #[serde(default)]
    pub v: [f64; 3],
    #[serde(default)]
    pub alpha: [f64; 3],
    #[serde(default)]
    pub omega: [f64; 3],
    #[serde(default = "one")]
    pub m: f64,
    #[serde(default = "one")]
    pub j: f64,
    #[serde(default)]
    pub d: f64,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomConfig {
    pub bodies: Vec<CustomBody>,
}

fn one() -> f64 {
    1.0
}
fn three() -> f64 {
    3.0
}
fn ten() -> f64 {
    10.0
}
fn two_hundred() -> f64 {
    200.0
}
fn contact_k() -> f64 {
    2100.0
}
fn gap() -> f64 {
    0.05
}
fn eighty() -> usize {
    80
}
fn yes() -> bool {
    true
}
fn unit_x() -> [f64; 3] {
    [1.0, 0.0, 0.0]
}

/// Top-level configuration document.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "default_scenario")]
    pub scenario: ScenarioKind,
    pub scheme: Option<StepScheme>,
    pub h: Option<f64>,
    pub t_end: Option<f64>,
    #[serde(default = "default_sample_every")]
    pub sample_every: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub pendulum: PendulumConfig,
    #[serde(default)]
    pub torus: TorusConfig,
    pub custom: Option<CustomConfig>,
}

fn default_scenario() -> ScenarioKind {
    ScenarioKind::Pendulum
}
fn default_sample_every() -> usize {
    1
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        serde_json::from_str("{}").unwrap()
    }
}

/// A fully resolved run: scenario state + model plus the time-stepping plan.
pub struct ResolvedRun {
    pub scenario: BuiltScenario,
    pub scheme: StepScheme,
    pub h: f64,
    pub t_end: f64,
    pub sample_every: usize,
    pub seed: u64,
}

pub enum BuiltScenario {
    Pendulum(SystemState, PendulumModel),
    Torus(SystemState, BinderModel),
    Custom(SystemState),
}

impl BuiltScenario {
    pub fn name(&self) -> &'static str {
        match self {
            BuiltScenario::Pendulum(..) => "pendulum",
            BuiltScenario::Torus(..) => "torus",
            BuiltScenario::Custom(..) => "custom",
        }
    }
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("config parse error: {e}")))
    }

    /// Apply scenario defaults and build the initial state and model.
    pub fn resolve(&self) -> Result<ResolvedRun, CliError> {
        let (default_h, default_t_end) = match self.scenario {
            ScenarioKind::Pendulum => (1e-3, 100.0),
            ScenarioKind::Torus => (1e-3, 35.0),
            ScenarioKind::Custom => (1e-3, 1.0),
        };
        let h = self.h.unwrap_or(default_h);
        let t_end = self.t_end.unwrap_or(default_t_end);
        let scheme = self.scheme.unwrap_or(StepScheme::Vti2);
        if !(h > 0.0 && h.is_finite()) {
            return Err(CliError::Config(format!("h must be positive, got {h}")));
        }
        if !(t_end >= 0.0 && t_end.is_finite()) {
            return Err(CliError::Config(format!(
                "t_end must be non-negative, got {t_end}"
            )));
        }
        if self.sample_every == 0 {
            return Err(CliError::Config("sample_every must be ≥ 1".into()));
        }

        let scenario = match self.scenario {
            ScenarioKind::Pendulum => {
                let c = &self.pendulum;
                if c.m <= 0.0 || c.j <= 0.0 {
                    return Err(CliError::Config(
                        "pendulum mass and inertia must be positive".into(),
                    ));
                }
                let defaults = PendulumParams::default();
                let params = PendulumParams {
                    mass: c.m,
                    gravity: c.g,
                    inertia: c.j,
                    alpha0: c
                        .alpha0
                        .map(|a| RodriguesVector(de_vec3(a)))
                        .unwrap_or(defaults.alpha0),
                    omega0: c.omega0.map(de_vec3).unwrap_or(defaults.omega0),
                };
                let (state, model) = build_pendulum(&params);
                BuiltScenario::Pendulum(state, model)
            }
            ScenarioKind::Torus => {
                let c = &self.torus;
                if c.m <= 0.0 || c.j <= 0.0 {
                    return Err(CliError::Config(
                        "torus mass and inertia must be positive".into(),
                    ));
                }
                let wall = if c.wall.enabled {
                    Some(
                        Wall::new(de_vec3(c.wall.normal), c.wall.offset, c.kpw)
                            .map_err(|e| CliError::Config(e.to_string()))?,
                    )
                } else {
                    None
                };
                let params = TorusParams {
                    n_particles: c.np,
                    torus_diameter: c.dt,
                    mass: c.m,
                    inertia: c.j,
                    bending_stiffness: c.km,
                    axial_stiffness: c.ka,
                    shear_stiffness: c.ks,
                    contact_stiffness: c.kpp,
                    impact_speed: c.v0,
                    wall,
                    shear_mode: c.shear_mode,
                    gap_fraction: c.gap_fraction,
                };
                let (state, model) =
                    build_torus(&params).map_err(|e| CliError::Config(e.to_string()))?;
                BuiltScenario::Torus(state, model)
            }
            ScenarioKind::Custom => {
                let c = self.custom.as_ref().ok_or_else(|| {
                    CliError::Config("custom scenario needs a `custom.bodies` list".into())
                })?;
                if c.bodies.is_empty() {
                    return Err(CliError::Config(
                        "custom scenario needs at least one body".into(),
                    ));
                }
                let mut bodies = Vec::new();
                let mut props = Vec::new();
                for b in &c.bodies {
                    if b.m <= 0.0 || b.j <= 0.0 {
                        return Err(CliError::Config(
                            "body mass and inertia must be positive".into(),
                        ));
                    }
                    bodies.push(BodyState {
                        position: de_vec3(b.x),
                        velocity: de_vec3(b.v),
                        attitude: RodriguesVector(de_vec3(b.alpha)),
                        angular_velocity: de_vec3(b.omega),
                    });
                    props.push(BodyProperties {
                        mass: b.m,
                        inertia: b.j,
                        diameter: b.d,
                    });
                }
                BuiltScenario::Custom(SystemState::new(bodies, props))
            }
        };

        Ok(ResolvedRun {
            scenario,
            scheme,
            h,
            t_end,
            sample_every: self.sample_every,
            seed: self.seed,
        })
    }
}

fn paper_shear() -> ShearMode {
    ShearMode::Paper
}
