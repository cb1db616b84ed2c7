//! Vertical take-off on vertical-axis propellers.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::concept::{ConceptAssessment, TakeoffConcept};
use crate::crosswind::{Aircraft, Environment};
use crate::error::{Error, Result};
use crate::propeller::{PropellerBank, PropellerSizing};
use crate::scenario::Scenario;

/// Climb profile and on-board energy storage shared by the concepts that
/// carry batteries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClimbConfig {
    /// Height to reach on on-board power [m].
    pub target_height: f64,
    /// Vertical climb speed [m/s].
    pub climb_speed: f64,
    /// Battery energy density [J/kg].
    pub battery_energy_density: f64,
    /// Motor power density [W/kg].
    pub motor_power_density: f64,
}

impl Default for ClimbConfig {
    fn default() -> Self {
        Self {
            target_height: 100.0,
            climb_speed: 1.0,
            battery_energy_density: 720e3,
            motor_power_density: 2.5e3,
        }
    }
}

impl ClimbConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.target_height > 0.0
            && self.climb_speed > 0.0
            && self.battery_energy_density > 0.0
            && self.motor_power_density > 0.0;
        if !ok {
            return Err(Error::Config(format!(
                "climb/storage parameters must be positive (got {self:?})"
            )));
        }
        Ok(())
    }

    /// Battery plus motor mass per watt of installed on-board power [kg/W].
    pub fn mass_per_watt(&self) -> f64 {
        self.target_height / (self.climb_speed * self.battery_energy_density)
            + 1.0 / self.motor_power_density
    }
}

/// Climb settings of the vertical concept.
pub type VerticalConfig = ClimbConfig;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerticalAssessment {
    pub onboard_power: f64,
    pub added_mass: f64,
    pub ground_area: f64,
    pub iterations: usize,
}

pub(crate) const MASS_FIXED_POINT_MAX_ITER: usize = 100;
pub(crate) const MASS_FIXED_POINT_TOL: f64 = 1e-12;

pub fn assess_vertical(
    env: &Environment,
    ac: &Aircraft,
    props: &PropellerBank,
    cfg: &VerticalConfig,
) -> Result<VerticalAssessment> {
    props.validate()?;
    cfg.validate()?;
    let k = cfg.mass_per_watt();
    let power_at = |dm: f64| props.shaft_power((ac.mass() + dm) * env.g, cfg.climb_speed, env.rho);

    let mut dm = 0.0;
    for it in 1..=MASS_FIXED_POINT_MAX_ITER {
        let p = power_at(dm)?;
        let next = p * k;
        if !next.is_finite() {
            break;
        }
        if (next - dm).abs() <= MASS_FIXED_POINT_TOL {
            return Ok(VerticalAssessment {
                onboard_power: p,
                added_mass: next,
                ground_area: std::f64::consts::PI * ac.wingspan().powi(2) / 4.0,
                iterations: it,
            });
        }
        dm = next;
    }
    Err(Error::NonConvergence {
        what: "vertical take-off mass/power fixed point",
        iterations: MASS_FIXED_POINT_MAX_ITER,
    })
}

/// Vertical take-off as a registered concept.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerticalConcept {
    pub propellers: PropellerSizing,
    pub config: VerticalConfig,
}

impl VerticalConcept {
    pub fn from_scenario(s: &Scenario) -> Result<Self> {
        Ok(Self {
            propellers: s.vertical.propellers,
            config: s.vertical.climb,
        })
    }
}

impl TakeoffConcept for VerticalConcept {
    fn name(&self) -> &'static str {
        "vertical"
    }

    fn description(&self) -> &'static str {
        "vertical take-off with on-board vertical-axis propellers"
    }

    fn assess(&self, env: &Environment, ac: &Aircraft) -> Result<ConceptAssessment> {
        let props = self.propellers.for_aircraft(ac)?;
        let v = assess_vertical(env, ac, &props, &self.config)?;
        let mut details = BTreeMap::new();
        details.insert("propeller_disk_area_m2".into(), props.disk_area());
        details.insert("fixed_point_iterations".into(), v.iterations as f64);
        Ok(ConceptAssessment {
            concept: self.name().into(),
            peak_ground_power: 0.0,
            peak_onboard_power: v.onboard_power,
            added_mass: v.added_mass,
            ground_area: v.ground_area,
            area_floor: 0.0,
            details,
        })
    }
}
