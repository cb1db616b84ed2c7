use serde::{Deserialize, Serialize};

use crate::crosswind::Aircraft;
use crate::error::{Error, Result};

/// A set of identical propellers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropellerBank {
    pub count: u32,
    /// Diameter of one propeller [m].
    pub diameter: f64,
    /// Shaft-to-fluid conversion efficiency.
    pub efficiency: f64,
}

impl PropellerBank {
    pub fn new(count: u32, diameter: f64, efficiency: f64) -> Result<Self> {
        let bank = Self {
            count,
            diameter,
            efficiency,
        };
        bank.validate()?;
        Ok(bank)
    }

    pub fn validate(&self) -> Result<()> {
        if self.count == 0
            || !(self.diameter > 0.0)
            || !(self.efficiency > 0.0 && self.efficiency <= 1.0)
        {
            return Err(Error::Config(format!(
                "propeller bank requires count >= 1, diameter > 0, 0 < efficiency <= 1 (got {self:?})"
            )));
        }
        Ok(())
    }

    /// Total swept disk area [m^2].
    pub fn disk_area(&self) -> f64 {
        f64::from(self.count) * std::f64::consts::PI * self.diameter * self.diameter / 4.0
    }

    pub fn shaft_power(&self, thrust: f64, inflow_speed: f64, rho: f64) -> Result<f64> {
        actuator_disk_power(thrust, inflow_speed, self.disk_area(), self.efficiency, rho)
    }
}

/// Propeller bank sized relative to the wing chord.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropellerSizing {
    pub count: u32,
    /// Propeller diameter divided by the wing chord.
    pub diameter_over_chord: f64,
    pub efficiency: f64,
}

impl PropellerSizing {
    pub fn for_aircraft(&self, ac: &Aircraft) -> Result<PropellerBank> {
        PropellerBank::new(
            self.count,
            self.diameter_over_chord * ac.chord(),
            self.efficiency,
        )
    }
}

/// Shaft power needed to produce `thrust` through a disk of area `disk_area`
/// with axial inflow `inflow_speed`, from momentum theory [W].
pub fn actuator_disk_power(
    thrust: f64,
    inflow_speed: f64,
    disk_area: f64,
    efficiency: f64,
    rho: f64,
) -> Result<f64> {
    if !(disk_area > 0.0) {
        return Err(Error::domain(format!(
            "propeller disk area must be positive, got {disk_area}"
        )));
    }
    if !(thrust >= 0.0) {
        return Err(Error::domain(format!(
            "thrust must be non-negative, got {thrust}"
        )));
    }
    let induced = (thrust / (2.0 * rho * disk_area) + inflow_speed * inflow_speed / 4.0).sqrt();
    Ok(thrust / efficiency * (induced + inflow_speed / 2.0))
}
