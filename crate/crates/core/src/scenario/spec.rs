//! Scenario configuration: shipped defaults, TOML overlays and validation.

use serde::{Deserialize, Serialize};

use super::ScenarioError;
use crate::dynamics::{SolverConfig, StressBcForm, StressBcGradient};
use crate::material::{DamageCriterion, JohnsonCook, Material, StrainMeasure, Viscosity};

/// Names accepted by [`ScenarioSpec::preset`].
pub const SCENARIOS: [&str; 8] = [
    "branching",
    "hole-plate-1",
    "hole-plate-2",
    "hole-plate-3",
    "chalk",
    "kalthoff",
    "taylor",
    "bar",
];

/// Complete, resolved description of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub scenario: String,
    /// Particle spacing (m).
    pub dp: f64,
    /// Smoothing length over particle spacing.
    pub h_ratio: f64,
    /// Simulated time (s).
    pub t_end: f64,
    /// Number of snapshot intervals over `t_end`.
    pub snapshots: usize,
    pub material: MaterialSpec,
    pub damage: DamageSpec,
    pub solver: SolverSpec,
    pub load: LoadSpec,
    pub geometry: Geometry,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialSpec {
    pub rho0: f64,
    pub youngs: f64,
    pub poisson: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub yield_stress: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub johnson_cook: Option<JohnsonCook<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DamageSpec {
    None,
    MaxPrincipalStrain {
        eps_max: f64,
        #[serde(default)]
        measure: StrainMeasure,
        /// See [`DamageSpec::threshold_scale`].
        #[serde(default, skip_serializing_if = "Option::is_none")]
        reference_h: Option<f64>,
    },
    MaxPrincipalStress {
        sigma_max: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        reference_h: Option<f64>,
    },
    CriticalStretch {
        delta_tc: f64,
    },
    JohnsonCook,
}

impl DamageSpec {
    /// Multiplier `√(h_ref / h)` on a point-wise failure threshold calibrated
    /// at smoothing length `h_ref`.
    ///
    /// Near a sharp notch the stress sampled one kernel radius from the tip
    /// grows like `1/√h`, so a fixed strain or stress threshold makes the
    /// effective toughness scale with `√h`. Rescaling the threshold keeps the
    /// fracture energy of a calibrated parameter set when the same problem is
    /// run on a coarser or finer lattice. Without `reference_h` the threshold
    /// is used as given.
    pub fn threshold_scale(&self, h: f64) -> f64 {
        match *self {
            DamageSpec::MaxPrincipalStrain { reference_h: Some(r), .. }
            | DamageSpec::MaxPrincipalStress { reference_h: Some(r), .. } => (r / h).sqrt(),
            _ => 1.0,
        }
    }

    /// Damage criterion at smoothing length `h`.
    pub fn criterion(&self, h: f64) -> DamageCriterion<f64> {
        let k = self.threshold_scale(h);
        match *self {
            DamageSpec::None => DamageCriterion::None,
            DamageSpec::MaxPrincipalStrain { eps_max, measure, .. } => DamageCriterion::MaxPrincipalStrain {
                eps_max: eps_max * k,
                measure,
            },
            DamageSpec::MaxPrincipalStress { sigma_max, .. } => DamageCriterion::MaxPrincipalStress {
                sigma_max: sigma_max * k,
            },
            DamageSpec::CriticalStretch { delta_tc } => DamageCriterion::CriticalStretch { delta_tc },
            DamageSpec::JohnsonCook => DamageCriterion::JohnsonCook,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    pub cfl: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub artificial_pressure: bool,
    pub stress_bc_gradient: StressBcGradient,
    pub stress_bc_form: StressBcForm,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_dt: Option<f64>,
}

impl Default for SolverSpec {
    fn default() -> Self {
        Self {
            cfl: 0.3,
            beta1: 1.0,
            beta2: 1.0,
            artificial_pressure: true,
            stress_bc_gradient: StressBcGradient::Raw,
            stress_bc_form: StressBcForm::Symmetric,
            fixed_dt: None,
        }
    }
}

impl From<&SolverSpec> for SolverConfig<f64> {
    fn from(s: &SolverSpec) -> Self {
        SolverConfig {
            cfl: s.cfl,
            viscosity: Viscosity {
                beta1: s.beta1,
                beta2: s.beta2,
            },
            artificial_pressure: s.artificial_pressure,
            stress_bc_gradient: s.stress_bc_gradient,
            stress_bc_form: s.stress_bc_form,
            fixed_dt: s.fixed_dt,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadSpec {
    /// Applied boundary stress amplitude (Pa).
    pub sigma: f64,
    /// Impact or drive velocity (m/s).
    pub velocity: f64,
    /// Stress ramp duration as a fraction of `t_end`; zero is a step load.
    pub ramp_fraction: f64,
}

/// Geometry generators. Lengths in metres.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Geometry {
    /// Plate `length × width` with an edge notch along the mid-line, loaded
    /// in tension on the two long edges.
    NotchedPlate {
        length: f64,
        width: f64,
        notch_length: f64,
        /// Thickness (in particle layers) of each loaded edge band.
        load_layers: usize,
    },
    /// Plate clamped on its bottom edge and pulled on its top edge, with an
    /// edge notch on the left side and a circular hole.
    HolePlate {
        width: f64,
        length: f64,
        notch_length: f64,
        notch_height: f64,
        hole_center: [f64; 2],
        hole_radius: f64,
        clamp_layers: usize,
        load_layers: usize,
    },
    /// Cylinder along `x` twisted by counter-rotating end velocity fields.
    TorsionBar { length: f64, diameter: f64, drive_length: f64 },
    /// Edge-notched plate half-model (symmetry plane `y = 0`) as a thin slab,
    /// struck on the edge `x = 0` below the notch.
    ImpactPlate {
        width: f64,
        height: f64,
        notch_length: f64,
        notch_offset: f64,
        layers: usize,
        impactor_depth: usize,
    },
    /// Flat-ended cylinder along `z` striking a rigid wall at `z = 0`.
    Projectile { length: f64, diameter: f64 },
    /// Square-section free bar along `x` with an initial Gaussian velocity
    /// pulse `u_x = v exp(-((x - c)/w)²)`, for wave-speed measurements.
    ThinBar {
        length: f64,
        section_layers: usize,
        pulse_center: f64,
        pulse_width: f64,
    },
}

impl ScenarioSpec {
    /// Shipped defaults for a named scenario.
    pub fn preset(name: &str) -> Result<Self, ScenarioError> {
        let glass = MaterialSpec {
            rho0: 2450.0,
            youngs: 32e9,
            poisson: 0.2,
            yield_stress: None,
            johnson_cook: None,
        };
        let spec = match name {
            "branching" => Self {
                scenario: name.into(),
                dp: 0.125e-3,
                h_ratio: 2.0,
                t_end: 80e-6,
                snapshots: 50,
                material: glass,
                damage: DamageSpec::MaxPrincipalStrain {
                    eps_max: 0.000509,
                    measure: StrainMeasure::Accumulated,
                    reference_h: Some(0.25e-3),
                },
                solver: SolverSpec::default(),
                load: LoadSpec {
                    sigma: 1e6,
                    velocity: 0.0,
                    ramp_fraction: 0.01,
                },
                geometry: Geometry::NotchedPlate {
                    length: 0.1,
                    width: 0.04,
                    notch_length: 0.05,
                    load_layers: 4,
                },
            },
            "hole-plate-1" | "hole-plate-2" | "hole-plate-3" => {
                let case = name.as_bytes()[name.len() - 1] - b'0';
                Self {
                    scenario: name.into(),
                    dp: 0.1e-3,
                    h_ratio: 1.5,
                    t_end: 60e-6,
                    snapshots: 50,
                    material: MaterialSpec {
                        rho0: 2700.0,
                        youngs: 71.4e9,
                        poisson: 0.25,
                        yield_stress: None,
                        johnson_cook: None,
                    },
                    damage: DamageSpec::MaxPrincipalStrain {
                        eps_max: 0.00483,
                        measure: StrainMeasure::Accumulated,
                        reference_h: Some(0.15e-3),
                    },
                    solver: SolverSpec::default(),
                    load: LoadSpec {
                        sigma: 25e6,
                        velocity: 0.0,
                        ramp_fraction: 0.01,
                    },
                    geometry: Geometry::HolePlate {
                        width: 0.04,
                        length: 0.06,
                        notch_length: 0.01,
                        notch_height: 0.005 * f64::from(case),
                        hole_center: [0.025, 0.02],
                        hole_radius: 0.005,
                        clamp_layers: 3,
                        load_layers: 3,
                    },
                }
            }
            "chalk" => Self {
                scenario: name.into(),
                dp: 0.4e-3,
                h_ratio: 1.3,
                t_end: 200e-6,
                snapshots: 50,
                material: MaterialSpec {
                    rho0: 1150.0,
                    youngs: 2e9,
                    poisson: 0.18,
                    yield_stress: None,
                    johnson_cook: None,
                },
                damage: DamageSpec::MaxPrincipalStress {
                    sigma_max: 15e6,
                    reference_h: None,
                },
                solver: SolverSpec::default(),
                load: LoadSpec {
                    sigma: 0.0,
                    velocity: 28.3,
                    ramp_fraction: 1.0,
                },
                geometry: Geometry::TorsionBar {
                    length: 0.1,
                    diameter: 0.008,
                    drive_length: 0.02,
                },
            },
            "kalthoff" => Self {
                scenario: name.into(),
                dp: 0.8e-3,
                h_ratio: 1.3,
                t_end: 90e-6,
                snapshots: 50,
                material: MaterialSpec {
                    rho0: 8000.0,
                    youngs: 190e9,
                    poisson: 0.3,
                    yield_stress: None,
                    johnson_cook: None,
                },
                damage: DamageSpec::CriticalStretch { delta_tc: 0.0044 },
                solver: SolverSpec::default(),
                load: LoadSpec {
                    sigma: 0.0,
                    velocity: 16.5,
                    ramp_fraction: 0.0,
                },
                geometry: Geometry::ImpactPlate {
                    width: 0.1,
                    height: 0.1,
                    notch_length: 0.05,
                    notch_offset: 0.025,
                    layers: 3,
                    impactor_depth: 2,
                },
            },
            "taylor" => Self {
                scenario: name.into(),
                dp: 0.3e-3,
                h_ratio: 2.0,
                t_end: 40e-6,
                snapshots: 50,
                material: MaterialSpec {
                    rho0: 7850.0,
                    youngs: 200e9,
                    poisson: 0.33,
                    yield_stress: None,
                    johnson_cook: Some(weldox_460e()),
                },
                damage: DamageSpec::JohnsonCook,
                solver: SolverSpec::default(),
                load: LoadSpec {
                    sigma: 0.0,
                    velocity: 600.0,
                    ramp_fraction: 0.0,
                },
                geometry: Geometry::Projectile {
                    length: 0.03,
                    diameter: 0.006,
                },
            },
            "bar" => Self {
                scenario: name.into(),
                dp: 1e-3,
                h_ratio: 1.3,
                t_end: 30e-6,
                snapshots: 30,
                material: glass,
                damage: DamageSpec::None,
                solver: SolverSpec::default(),
                load: LoadSpec {
                    sigma: 0.0,
                    velocity: 0.1,
                    ramp_fraction: 0.0,
                },
                geometry: Geometry::ThinBar {
                    length: 0.2,
                    section_layers: 3,
                    pulse_center: 0.03,
                    pulse_width: 0.006,
                },
            },
            other => return Err(ScenarioError::UnknownScenario(other.to_string())),
        };
        Ok(spec)
    }

    /// Preset for `name` overlaid with a TOML document; unknown keys are rejected.
    pub fn from_toml(name: &str, text: &str) -> Result<Self, ScenarioError> {
        let base = Self::preset(name)?;
        let overlay: toml::Table = toml::from_str(text).map_err(|e| ScenarioError::Config(e.to_string()))?;
        let mut merged = toml::Table::try_from(&base).map_err(|e| ScenarioError::Config(e.to_string()))?;
        merge(&mut merged, overlay);
        let spec: Self = toml::Value::Table(merged)
            .try_into()
            .map_err(|e: toml::de::Error| ScenarioError::Config(e.to_string()))?;
        if spec.scenario != name {
            return Err(ScenarioError::Config(format!(
                "config file is for scenario '{}', not '{name}'",
                spec.scenario
            )));
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("scenario spec is always representable as TOML")
    }

    pub fn smoothing_length(&self) -> f64 {
        self.h_ratio * self.dp
    }

    pub fn ramp_time(&self) -> f64 {
        self.load.ramp_fraction * self.t_end
    }

    pub fn material(&self) -> Result<Material<f64>, ScenarioError> {
        let m = &self.material;
        let mut mat = Material::elastic(m.rho0, m.youngs, m.poisson)?;
        if let Some(y) = m.yield_stress {
            mat = mat.with_yield_stress(y);
        }
        if let Some(jc) = m.johnson_cook {
            mat = mat.with_johnson_cook(jc);
        }
        Ok(mat.with_criterion(self.damage.criterion(self.smoothing_length()))?)
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(ScenarioError::Config(format!("{name} must be positive, got {v}")))
            }
        };
        positive("dp", self.dp)?;
        positive("h_ratio", self.h_ratio)?;
        positive("t_end", self.t_end)?;
        positive("solver.cfl", self.solver.cfl)?;
        if let Some(dt) = self.solver.fixed_dt {
            positive("solver.fixed_dt", dt)?;
        }
        if self.snapshots == 0 {
            return Err(ScenarioError::Config("snapshots must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.load.ramp_fraction) {
            return Err(ScenarioError::Config("load.ramp_fraction must lie in [0, 1]".into()));
        }
        self.material()?;
        Ok(())
    }
}

/// Placeholder Johnson-Cook constants for Weldox 460E steel (external source,
/// override from a config file for quantitative work).
pub fn weldox_460e() -> JohnsonCook<f64> {
    JohnsonCook {
        a: 490e6,
        b: 807e6,
        n: 0.73,
        c: 0.0114,
        m: 0.94,
        ref_strain_rate: 5e-4,
        t_room: 293.0,
        t_melt: 1800.0,
        d1: 0.0705,
        d2: 1.732,
        d3: -0.54,
        d4: -0.015,
        d5: 0.0,
        specific_heat: 452.0,
        taylor_quinney: 0.9,
    }
}

/// Recursive table merge. A table whose `kind` changes is replaced wholesale
/// so that fields of the previous variant do not leak into the new one.
fn merge(base: &mut toml::Table, overlay: toml::Table) {
    for (key, value) in overlay {
        match (base.get_mut(&key), value) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) if b.get("kind") == o.get("kind") || o.get("kind").is_none() => {
                merge(b, o)
            }
            (_, v) => {
                base.insert(key, v);
            }
        }
    }
}
