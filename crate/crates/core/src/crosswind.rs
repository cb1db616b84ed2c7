//! Shared domain types and the crosswind traction-power model used as the
//! reference power of every take-off concept.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ambient conditions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Environment {
    /// Air density [kg/m^3].
    pub rho: f64,
    /// Gravitational acceleration [m/s^2].
    pub g: f64,
    /// Nominal wind speed used for the crosswind reference power [m/s].
    pub wind_speed: f64,
}

impl Default for Environment {
    fn default() -> Self {
        Self {
            rho: 1.2,
            g: 9.81,
            wind_speed: 15.0,
        }
    }
}

impl Environment {
    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0) || !(self.g > 0.0) || !(self.wind_speed >= 0.0) {
            return Err(Error::Config(format!(
                "environment requires rho > 0, g > 0, wind_speed >= 0 (got {self:?})"
            )));
        }
        Ok(())
    }
}

/// Serialized form of an [`Aircraft`]: area and mass are derived quantities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AircraftSpec {
    pub wingspan: f64,
    pub aspect_ratio: f64,
    pub wing_loading: f64,
    pub lift_coeff: f64,
    pub drag_coeff: f64,
}

/// One rigid wing. Area and mass are kept consistent with span, aspect
/// ratio and wing loading (`A = d^2 / lambda`, `m = w_l A`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AircraftSpec", into = "AircraftSpec")]
pub struct Aircraft {
    wingspan: f64,
    aspect_ratio: f64,
    area: f64,
    wing_loading: f64,
    mass: f64,
    lift_coeff: f64,
    drag_coeff: f64,
}

impl Aircraft {
    pub fn new(
        wingspan: f64,
        aspect_ratio: f64,
        wing_loading: f64,
        lift_coeff: f64,
        drag_coeff: f64,
    ) -> Result<Self> {
        let area = wingspan * wingspan / aspect_ratio;
        Self::from_parts(
            wingspan,
            aspect_ratio,
            area,
            wing_loading,
            wing_loading * area,
            lift_coeff,
            drag_coeff,
        )
    }

    /// Builds an aircraft from an explicit set of parameters, rejecting
    /// combinations that violate `A = d^2/lambda` or `m = w_l A`.
    pub fn from_parts(
        wingspan: f64,
        aspect_ratio: f64,
        area: f64,
        wing_loading: f64,
        mass: f64,
        lift_coeff: f64,
        drag_coeff: f64,
    ) -> Result<Self> {
        let all = [
            wingspan,
            aspect_ratio,
            area,
            wing_loading,
            mass,
            lift_coeff,
            drag_coeff,
        ];
        if all.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::Config(
                "aircraft parameters must be finite and positive".into(),
            ));
        }
        let expected_area = wingspan * wingspan / aspect_ratio;
        if ((area - expected_area) / expected_area).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "wing area {area} m^2 inconsistent with span {wingspan} m and aspect ratio {aspect_ratio} (expected {expected_area})"
            )));
        }
        if ((mass - wing_loading * area) / mass).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "mass {mass} kg inconsistent with wing loading {wing_loading} kg/m^2 and area {area} m^2"
            )));
        }
        if lift_coeff / drag_coeff <= 1.0 {
            return Err(Error::Config(format!(
                "aerodynamic efficiency C_l/C_d = {} must exceed 1",
                lift_coeff / drag_coeff
            )));
        }
        Ok(Self {
            wingspan,
            aspect_ratio,
            area,
            wing_loading,
            mass,
            lift_coeff,
            drag_coeff,
        })
    }

    pub fn wingspan(&self) -> f64 {
        self.wingspan
    }
    pub fn aspect_ratio(&self) -> f64 {
        self.aspect_ratio
    }
    pub fn chord(&self) -> f64 {
        self.wingspan / self.aspect_ratio
    }
    pub fn area(&self) -> f64 {
        self.area
    }
    pub fn wing_loading(&self) -> f64 {
        self.wing_loading
    }
    pub fn mass(&self) -> f64 {
        self.mass
    }
    pub fn lift_coeff(&self) -> f64 {
        self.lift_coeff
    }
    /// Equivalent drag coefficient (aircraft plus line).
    pub fn drag_coeff(&self) -> f64 {
        self.drag_coeff
    }
    pub fn efficiency(&self) -> f64 {
        self.lift_coeff / self.drag_coeff
    }

    /// Same wing with a different area at constant wing loading.
    pub fn scaled_area(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.wingspan * factor.sqrt(),
            self.aspect_ratio,
            self.wing_loading,
            self.lift_coeff,
            self.drag_coeff,
        )
    }
}

impl TryFrom<AircraftSpec> for Aircraft {
    type Error = Error;

    fn try_from(s: AircraftSpec) -> Result<Self> {
        Aircraft::new(
            s.wingspan,
            s.aspect_ratio,
            s.wing_loading,
            s.lift_coeff,
            s.drag_coeff,
        )
    }
}

impl From<Aircraft> for AircraftSpec {
    fn from(a: Aircraft) -> Self {
        AircraftSpec {
            wingspan: a.wingspan,
            aspect_ratio: a.aspect_ratio,
            wing_loading: a.wing_loading,
            lift_coeff: a.lift_coeff,
            drag_coeff: a.drag_coeff,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TetherSpec {
    /// Line diameter [m].
    pub diameter: f64,
    pub drag_coeff: f64,
    /// Deployed length [m].
    pub length: f64,
    /// Reeling speed, positive when reeling out [m/s].
    pub reel_speed: f64,
}

impl TetherSpec {
    pub fn new(diameter: f64, drag_coeff: f64, length: f64, reel_speed: f64) -> Result<Self> {
        if !(diameter > 0.0) || !(length >= 0.0) {
            return Err(Error::domain(
                "tether requires diameter > 0 and length >= 0",
            ));
        }
        Ok(Self {
            diameter,
            drag_coeff,
            length,
            reel_speed,
        })
    }
}

/// Aircraft drag plus the distributed drag of a straight line.
pub fn equivalent_drag(drag_coeff: f64, tether: &TetherSpec, area: f64) -> Result<f64> {
    if !(area > 0.0) {
        return Err(Error::domain(format!(
            "wing area must be positive, got {area}"
        )));
    }
    Ok(drag_coeff + tether.diameter * tether.length * tether.drag_coeff / (4.0 * area))
}

/// Traction force on the tether during crosswind flight [N].
///
/// `elevation` and `azimuth` are in radians. The aircraft's `C_d` is taken
/// as the equivalent coefficient already.
pub fn crosswind_tether_force(
    env: &Environment,
    ac: &Aircraft,
    tether: &TetherSpec,
    elevation: f64,
    azimuth: f64,
) -> f64 {
    let apparent = env.wind_speed * azimuth.cos() * elevation.cos() - tether.reel_speed;
    0.5 * env.rho * ac.area() * ac.lift_coeff().powi(3) / ac.drag_coeff().powi(2)
        * apparent
        * apparent
}

/// Instantaneous mechanical power `T * l_dot` [W].
pub fn crosswind_power(
    env: &Environment,
    ac: &Aircraft,
    tether: &TetherSpec,
    elevation: f64,
    azimuth: f64,
) -> f64 {
    crosswind_tether_force(env, ac, tether, elevation, azimuth) * tether.reel_speed
}

/// Peak traction power, reached at `l_dot = W/3` with the aircraft downwind [W].
pub fn peak_crosswind_power(env: &Environment, ac: &Aircraft) -> f64 {
    2.0 / 27.0 * env.rho * ac.area() * ac.lift_coeff().powi(3) / ac.drag_coeff().powi(2)
        * env.wind_speed.powi(3)
}
