use serde::{Deserialize, Serialize};

use crate::crosswind::{peak_crosswind_power, Aircraft, Environment};
use crate::error::{Error, Result};

/// Dimensionless scalings of the quantitative comparison criteria: power
/// relative to the crosswind peak, mass relative to the bare aircraft, and
/// ground area split into a size-independent floor plus a share of wing area.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriteriaScalings {
    pub eta_pg: f64,
    pub eta_pob: f64,
    pub eta_m: f64,
    pub area_floor: f64,
    pub eta_ag: f64,
}

pub fn criteria_from_assessment(
    peak_ground_power: f64,
    peak_onboard_power: f64,
    added_mass: f64,
    ground_area: f64,
    area_floor: f64,
    ac: &Aircraft,
    env: &Environment,
) -> Result<CriteriaScalings> {
    let reference = peak_crosswind_power(env, ac);
    if !(reference > 0.0) {
        return Err(Error::domain(
            "peak crosswind power is zero; power criteria are undefined",
        ));
    }
    Ok(CriteriaScalings {
        eta_pg: peak_ground_power / reference,
        eta_pob: peak_onboard_power / reference,
        eta_m: added_mass / ac.mass(),
        area_floor,
        eta_ag: (ground_area - area_floor) / ac.area(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_inputs_give_zero_scalings() {
        let ac = Aircraft::new(10.0, 10.0, 15.0, 1.0, 0.1).unwrap();
        let c = criteria_from_assessment(0.0, 0.0, 0.0, 0.0, 0.0, &ac, &Environment::default())
            .unwrap();
        assert_eq!(
            c,
            CriteriaScalings {
                eta_pg: 0.0,
                eta_pob: 0.0,
                eta_m: 0.0,
                area_floor: 0.0,
                eta_ag: 0.0
            }
        );
    }

    #[test]
    fn calm_wind_is_rejected() {
        let ac = Aircraft::new(10.0, 10.0, 15.0, 1.0, 0.1).unwrap();
        let env = Environment {
            wind_speed: 0.0,
            ..Environment::default()
        };
        assert!(criteria_from_assessment(1.0, 1.0, 1.0, 1.0, 0.0, &ac, &env).is_err());
    }

    #[test]
    fn scalings_divide_by_references() {
        let ac = Aircraft::new(10.0, 10.0, 15.0, 1.0, 0.1).unwrap();
        let c =
            criteria_from_assessment(30e3, 9e3, 15.0, 200.0, 100.0, &ac, &Environment::default())
                .unwrap();
        assert!((c.eta_pg - 0.1).abs() < 1e-12);
        assert!((c.eta_pob - 0.03).abs() < 1e-12);
        assert!((c.eta_m - 0.1).abs() < 1e-12);
        assert!((c.eta_ag - 10.0).abs() < 1e-12);
    }
}
