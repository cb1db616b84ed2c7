//! Scenario documents: every input of the assessments and simulations, with
//! the published parameter set available as the `paper` preset.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::aero::{AeroTable, DEFAULT_TRIM};
use crate::control::{ControllerParams, MotorLaw};
use crate::crosswind::{Aircraft, Environment};
use crate::dynamics::{PitchModel, PlantParams};
use crate::error::{Error, Result};
use crate::propeller::PropellerSizing;
use crate::rotational::RotationalConfig;
use crate::sim::SimulationConfig;
use crate::vertical::ClimbConfig;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerticalSection {
    pub propellers: PropellerSizing,
    pub climb: ClimbConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearSection {
    /// Rail length [m].
    pub travel_length: f64,
    /// Viscous friction coefficient per aircraft [kg/s].
    pub viscous_coeff: Vec<f64>,
    pub climb: ClimbConfig,
    pub propellers: PropellerSizing,
}

impl LinearSection {
    pub fn viscous_coeff_for(&self, aircraft_index: usize) -> Result<f64> {
        self.viscous_coeff
            .get(aircraft_index)
            .copied()
            .ok_or_else(|| {
                Error::Config(format!(
                    "linear.viscous_coeff has no entry for aircraft {}",
                    aircraft_index + 1
                ))
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicSection {
    /// Plant parameters per aircraft.
    pub plants: Vec<PlantParams>,
    pub duration: f64,
    pub step: f64,
    pub initial_line: f64,
    pub initial_position: f64,
    #[serde(default)]
    pub pitch_model: PitchModel,
    /// CSV file `alpha_deg,cl,cd`; the built-in Clark-Y table when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aero_table: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlSection {
    /// Controller parameters per aircraft.
    pub controllers: Vec<ControllerParams>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    pub environment: Environment,
    pub aircraft: Vec<Aircraft>,
    pub vertical: VerticalSection,
    pub rotational: RotationalConfig,
    pub linear: LinearSection,
    pub dynamic: DynamicSection,
    pub control: ControlSection,
}

impl Default for Scenario {
    fn default() -> Self {
        Self::paper()
    }
}

struct Size {
    span: f64,
    viscous: f64,
    plant: PlantParams,
    ctrl: ControllerParams,
}

fn paper_sizes() -> [Size; 3] {
    let plant = |j_m1,
                 beta_m1,
                 r_m1,
                 j_m2,
                 beta_m2,
                 r_m2,
                 slide_mass,
                 aircraft_mass,
                 beta_s,
                 k_t,
                 r_t,
                 area| {
        PlantParams {
            j_m1,
            beta_m1,
            r_m1,
            j_m2,
            beta_m2,
            r_m2,
            slide_mass,
            beta_s,
            aircraft_mass,
            wing_area: area,
            tether_stiffness: k_t,
            tether_radius: r_t,
            tether_density: 970.0,
            pitch_bandwidth: 10.0,
            trim: DEFAULT_TRIM,
        }
    };
    let ctrl = |k_m1, k_m2, k_t, omega_p, omega_z2, max_torque_m1, max_torque_m2, max_thrust| {
        ControllerParams {
            takeoff_speed: 30.0,
            climb_speed: 1.0,
            k_m1,
            k_m2,
            k_t,
            omega_p,
            omega_z1: 0.2,
            omega_z2,
            max_torque_m1,
            max_torque_m2,
            max_thrust,
            sample_rate: 100.0,
            motor_law: MotorLaw::ShaftSpeed,
        }
    };
    [
        Size {
            span: 5.0,
            viscous: 0.1,
            plant: plant(
                1.3, 0.001, 0.2, 0.03, 0.001, 0.1, 6.0, 37.5, 0.1, 1e5, 0.0025, 2.5,
            ),
            ctrl: ctrl(3.0, 10.0, 100.0, 16.0, 1.0, 750.0, 48.0, 80.0),
        },
        Size {
            span: 10.0,
            viscous: 0.3,
            plant: plant(
                30.0, 0.002, 0.5, 0.1, 0.002, 0.15, 30.0, 150.0, 0.3, 9.1e5, 0.0075, 10.0,
            ),
            ctrl: ctrl(20.0, 50.0, 150.0, 32.0, 2.0, 3000.0, 290.0, 350.0),
        },
        Size {
            span: 20.0,
            viscous: 1.0,
            plant: plant(
                490.0, 0.003, 1.0, 2.0, 0.003, 0.4, 120.0, 600.0, 1.0, 2.5e5, 0.0125, 40.0,
            ),
            // 600 N cannot hold the climb of a 600 kg aircraft; see README
            ctrl: ctrl(160.0, 200.0, 600.0, 32.0, 2.0, 12000.0, 3500.0, 1200.0),
        },
    ]
}

impl Scenario {
    /// Published parameters: three aircraft of 5, 10 and 20 m span with
    /// aspect ratio 10 and wing loading 15 kg/m^2.
    pub fn paper() -> Self {
        let sizes = paper_sizes();
        let climb = ClimbConfig::default();
        Self {
            environment: Environment::default(),
            aircraft: sizes
                .iter()
                .map(|s| {
                    Aircraft::new(s.span, 10.0, 15.0, 1.0, 0.1).expect("preset aircraft are valid")
                })
                .collect(),
            vertical: VerticalSection {
                propellers: PropellerSizing {
                    count: 2,
                    diameter_over_chord: 1.0,
                    efficiency: 0.7,
                },
                climb,
            },
            rotational: RotationalConfig::default(),
            linear: LinearSection {
                travel_length: 12.0,
                viscous_coeff: sizes.iter().map(|s| s.viscous).collect(),
                climb,
                propellers: PropellerSizing {
                    count: 2,
                    diameter_over_chord: 0.5,
                    efficiency: 0.7,
                },
            },
            dynamic: DynamicSection {
                plants: sizes.iter().map(|s| s.plant).collect(),
                duration: 30.0,
                step: 2e-4,
                initial_line: 2.0,
                initial_position: 0.0,
                pitch_model: PitchModel::Tracking,
                aero_table: None,
            },
            control: ControlSection {
                controllers: sizes.iter().map(|s| s.ctrl).collect(),
            },
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "paper" => Ok(Self::paper()),
            other => Err(Error::Config(format!(
                "unknown preset '{other}' (available: paper)"
            ))),
        }
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let s: Scenario = serde_json::from_str(text)?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read scenario {}: {e}", path.display())))?;
        Self::from_json_str(&text).map_err(|e| match e {
            Error::Json(j) => Error::Config(format!("{}: {j}", path.display())),
            other => other,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        self.environment.validate()?;
        let n = self.aircraft.len();
        if n == 0 {
            return Err(Error::Config("scenario needs at least one aircraft".into()));
        }
        self.vertical.climb.validate()?;
        self.linear.climb.validate()?;
        self.rotational.validate()?;
        for (what, len) in [
            ("linear.viscous_coeff", self.linear.viscous_coeff.len()),
            ("dynamic.plants", self.dynamic.plants.len()),
            ("control.controllers", self.control.controllers.len()),
        ] {
            if len != n {
                return Err(Error::Config(format!(
                    "{what} has {len} entries but the scenario has {n} aircraft"
                )));
            }
        }
        if self.linear.viscous_coeff.iter().any(|c| !(*c >= 0.0))
            || !(self.linear.travel_length > 0.0)
        {
            return Err(Error::Config(
                "linear: travel_length must be > 0 and viscous coefficients >= 0".into(),
            ));
        }
        for (i, ac) in self.aircraft.iter().enumerate() {
            self.vertical.propellers.for_aircraft(ac)?;
            self.linear.propellers.for_aircraft(ac)?;
            let p = &self.dynamic.plants[i];
            p.validate()?;
            let close = |a: f64, b: f64| ((a - b) / b).abs() <= 1e-9;
            if !close(p.aircraft_mass, ac.mass()) || !close(p.wing_area, ac.area()) {
                return Err(Error::Config(format!(
                    "dynamic.plants[{i}]: mass {} kg and area {} m^2 differ from aircraft {} ({} kg, {} m^2)",
                    p.aircraft_mass,
                    p.wing_area,
                    i + 1,
                    ac.mass(),
                    ac.area()
                )));
            }
            self.control.controllers[i].validate()?;
        }
        Ok(())
    }

    pub fn aircraft_at(&self, index: usize) -> Result<&Aircraft> {
        self.aircraft.get(index).ok_or_else(|| {
            Error::Config(format!(
                "aircraft {} requested but the scenario has {}",
                index + 1,
                self.aircraft.len()
            ))
        })
    }

    pub fn aero_table(&self) -> Result<AeroTable> {
        match &self.dynamic.aero_table {
            None => Ok(AeroTable::clark_y()),
            Some(p) => AeroTable::from_csv_path(p),
        }
    }

    pub fn simulation_config(&self, index: usize) -> Result<SimulationConfig> {
        let ac = self.aircraft_at(index)?;
        Ok(SimulationConfig {
            plant: self.dynamic.plants[index],
            controller: self.control.controllers[index],
            aero: self.aero_table()?,
            env: self.environment,
            pitch_model: self.dynamic.pitch_model,
            propellers: self.linear.propellers.for_aircraft(ac)?,
            duration: self.dynamic.duration,
            step: self.dynamic.step,
            initial_line: self.dynamic.initial_line,
            initial_position: self.dynamic.initial_position,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paper_preset_is_valid() {
        let s = Scenario::paper();
        s.validate().unwrap();
        assert_eq!(s.aircraft.len(), 3);
        let areas: Vec<f64> = s.aircraft.iter().map(Aircraft::area).collect();
        assert_eq!(areas, vec![2.5, 10.0, 40.0]);
        let diam = s
            .linear
            .propellers
            .for_aircraft(&s.aircraft[1])
            .unwrap()
            .diameter;
        assert!((diam - 0.5).abs() < 1e-12);
    }

    #[test]
    fn json_roundtrip_is_identical() {
        let s = Scenario::paper();
        let back = Scenario::from_json_str(&s.to_json().unwrap()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn missing_sections_fall_back_to_preset() {
        let s = Scenario::from_json_str(
            r#"{"environment": {"rho": 1.225, "g": 9.81, "wind_speed": 12.0}}"#,
        )
        .unwrap();
        assert_eq!(s.environment.rho, 1.225);
        assert_eq!(s.linear, Scenario::paper().linear);
    }

    #[test]
    fn schema_errors_are_descriptive() {
        let err = Scenario::from_json_str(
            "{\n  \"environment\": {\"rho\": 1.2, \"g\": 9.81, \"wind\": 3}\n}",
        )
        .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("wind") && msg.contains("line 2"), "{msg}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn mismatched_lengths_rejected() {
        let mut s = Scenario::paper();
        s.control.controllers.pop();
        assert!(matches!(s.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn plant_must_match_aircraft() {
        let mut s = Scenario::paper();
        s.dynamic.plants[0].aircraft_mass = 40.0;
        assert!(s.validate().is_err());
    }
}
