//! Linear take-off: ground acceleration on a rail followed by a climb on
//! on-board horizontal-axis propellers.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::concept::{ConceptAssessment, TakeoffConcept};
use crate::crosswind::{Aircraft, Environment};
use crate::error::{Error, Result};
use crate::propeller::{PropellerBank, PropellerSizing};
use crate::scenario::Scenario;
use crate::vertical::{ClimbConfig, MASS_FIXED_POINT_MAX_ITER, MASS_FIXED_POINT_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearConfig {
    /// Ground travel distance available for acceleration [m].
    pub travel_length: f64,
    /// Viscous friction coefficient of the rail system [kg/s].
    pub viscous_coeff: f64,
    pub climb: ClimbConfig,
    pub propellers: PropellerBank,
}

impl LinearConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.travel_length > 0.0) || !(self.viscous_coeff >= 0.0) {
            return Err(Error::Config(format!(
                "linear take-off requires travel length > 0 and viscous coefficient >= 0 (got {} m, {} kg/s)",
                self.travel_length, self.viscous_coeff
            )));
        }
        self.climb.validate()?;
        self.propellers.validate()
    }
}

/// Speed at which lift equals the weight of the loaded aircraft [m/s].
pub fn takeoff_speed(env: &Environment, ac: &Aircraft, added_mass: f64) -> f64 {
    (2.0 * (ac.mass() + added_mass) * env.g / (env.rho * ac.area() * ac.lift_coeff())).sqrt()
}

/// Peak power of the ground machinery accelerating the aircraft to
/// take-off speed over the travel length [W].
pub fn ground_power(
    env: &Environment,
    ac: &Aircraft,
    travel_length: f64,
    viscous_coeff: f64,
    added_mass: f64,
) -> f64 {
    let v = takeoff_speed(env, ac, added_mass);
    let inertia = (ac.mass() + added_mass) * v * v / (2.0 * travel_length);
    let drag = 0.5 * env.rho * ac.drag_coeff() * ac.area() * v * v;
    let viscous = viscous_coeff * v;
    v * (inertia + drag + viscous)
}

/// Steady climb at a given climb ratio (vertical over forward speed).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClimbSolution {
    pub climb_ratio: f64,
    /// Forward speed [m/s].
    pub forward_speed: f64,
    /// Required propeller thrust [N].
    pub thrust: f64,
}

pub fn climb_solution(
    env: &Environment,
    ac: &Aircraft,
    added_mass: f64,
    climb_ratio: f64,
) -> Result<ClimbSolution> {
    let eff = ac.efficiency();
    if !(climb_ratio >= 0.0) || climb_ratio >= eff {
        return Err(Error::domain(format!(
            "climb ratio {climb_ratio} outside [0, C_l/C_d = {eff}): no steady climb possible"
        )));
    }
    let weight = (ac.mass() + added_mass) * env.g;
    let c = climb_ratio;
    let lift_factor =
        0.5 * env.rho * ac.area() * ac.lift_coeff() * (1.0 + c * c).sqrt() * (1.0 - c / eff);
    Ok(ClimbSolution {
        climb_ratio: c,
        forward_speed: (weight / lift_factor).sqrt(),
        thrust: weight * (1.0 + c * eff) / (eff - c),
    })
}

/// Climb solution that reaches the vertical speed `climb_speed`: the climb
/// ratio satisfies `c_r * v_fwd(c_r) = v_c`, found by bisection on (0, 1).
pub fn climb_for_speed(
    env: &Environment,
    ac: &Aircraft,
    added_mass: f64,
    climb_speed: f64,
) -> Result<ClimbSolution> {
    if !(climb_speed >= 0.0) {
        return Err(Error::domain(format!(
            "climb speed must be >= 0, got {climb_speed}"
        )));
    }
    let hi_limit = 1.0f64.min(ac.efficiency() * (1.0 - 1e-12));
    let excess = |c: f64| -> Result<f64> {
        Ok(c * climb_solution(env, ac, added_mass, c)?.forward_speed - climb_speed)
    };
    if excess(hi_limit)? < 0.0 {
        return Err(Error::Infeasible(format!(
            "climb speed {climb_speed} m/s needs a climb ratio above {hi_limit}"
        )));
    }
    let (mut lo, mut hi) = (0.0, hi_limit);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if excess(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-16 {
            break;
        }
    }
    climb_solution(env, ac, added_mass, 0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearAssessment {
    pub takeoff_speed: f64,
    pub ground_power: f64,
    pub onboard_power: f64,
    pub added_mass: f64,
    pub ground_area: f64,
    /// Ground area that does not scale with wing area [m^2].
    pub area_floor: f64,
    pub climb: ClimbSolution,
}

pub fn assess_linear(
    env: &Environment,
    ac: &Aircraft,
    cfg: &LinearConfig,
) -> Result<LinearAssessment> {
    cfg.validate()?;
    let k = cfg.climb.mass_per_watt();
    let mut dm = 0.0;
    for _ in 0..MASS_FIXED_POINT_MAX_ITER {
        let climb = climb_for_speed(env, ac, dm, cfg.climb.climb_speed)?;
        let p_ob = cfg
            .propellers
            .shaft_power(climb.thrust, climb.forward_speed, env.rho)?;
        let next = p_ob * k;
        if !next.is_finite() {
            break;
        }
        if (next - dm).abs() <= MASS_FIXED_POINT_TOL {
            let floor = std::f64::consts::PI * cfg.travel_length.powi(2) / 4.0;
            return Ok(LinearAssessment {
                takeoff_speed: takeoff_speed(env, ac, next),
                ground_power: ground_power(env, ac, cfg.travel_length, cfg.viscous_coeff, next),
                onboard_power: p_ob,
                added_mass: next,
                ground_area: floor + std::f64::consts::PI * ac.aspect_ratio() / 4.0 * ac.area(),
                area_floor: floor,
                climb,
            });
        }
        dm = next;
    }
    Err(Error::NonConvergence {
        what: "linear take-off mass/power fixed point",
        iterations: MASS_FIXED_POINT_MAX_ITER,
    })
}

/// Linear take-off as a registered concept, sized for one aircraft.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearConcept {
    pub travel_length: f64,
    pub viscous_coeff: f64,
    pub climb: ClimbConfig,
    pub propellers: PropellerSizing,
}

impl LinearConcept {
    pub fn from_scenario(s: &Scenario, aircraft_index: usize) -> Result<Self> {
        Ok(Self {
            travel_length: s.linear.travel_length,
            viscous_coeff: s.linear.viscous_coeff_for(aircraft_index)?,
            climb: s.linear.climb,
            propellers: s.linear.propellers,
        })
    }
}

impl TakeoffConcept for LinearConcept {
    fn name(&self) -> &'static str {
        "linear"
    }

    fn description(&self) -> &'static str {
        "rail acceleration on the ground, then climb on on-board propellers"
    }

    fn assess(&self, env: &Environment, ac: &Aircraft) -> Result<ConceptAssessment> {
        let cfg = LinearConfig {
            travel_length: self.travel_length,
            viscous_coeff: self.viscous_coeff,
            climb: self.climb,
            propellers: self.propellers.for_aircraft(ac)?,
        };
        let a = assess_linear(env, ac, &cfg)?;
        let mut details = BTreeMap::new();
        details.insert("takeoff_speed_m_s".into(), a.takeoff_speed);
        details.insert("climb_ratio".into(), a.climb.climb_ratio);
        details.insert("forward_speed_m_s".into(), a.climb.forward_speed);
        details.insert("thrust_N".into(), a.climb.thrust);
        Ok(ConceptAssessment {
            concept: self.name().into(),
            peak_ground_power: a.ground_power,
            peak_onboard_power: a.onboard_power,
            added_mass: a.added_mass,
            ground_area: a.ground_area,
            area_floor: a.area_floor,
            details,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const CV: [f64; 3] = [0.1, 0.3, 1.0];
    const SPANS: [f64; 3] = [5.0, 10.0, 20.0];

    fn ac(span: f64) -> Aircraft {
        Aircraft::new(span, 10.0, 15.0, 1.0, 0.1).unwrap()
    }

    fn cfg(i: usize) -> LinearConfig {
        let a = ac(SPANS[i]);
        LinearConfig {
            travel_length: 12.0,
            viscous_coeff: CV[i],
            climb: ClimbConfig::default(),
            propellers: PropellerBank::new(2, a.chord() / 2.0, 0.7).unwrap(),
        }
    }

    #[test]
    fn takeoff_speed_examples() {
        let env = Environment::default();
        let a = ac(10.0);
        let v = takeoff_speed(&env, &a, 0.0);
        assert!((v - (2.0 * 15.0 * 9.81 / 1.2f64).sqrt()).abs() < 1e-12);
        assert!((v - 15.66).abs() < 0.01);
        let doubled = takeoff_speed(&env, &a, a.mass());
        assert!((doubled / v - 2f64.sqrt()).abs() < 1e-12);
        let high_lift = Aircraft::new(10.0, 10.0, 15.0, 2.0, 0.1).unwrap();
        let v2 = takeoff_speed(&env, &high_lift, 0.0);
        assert!((v2 * v2 - v * v / 2.0).abs() < 1e-9);
    }

    #[test]
    fn ground_power_pure_inertia() {
        let env = Environment::default();
        let a = Aircraft::new(10.0, 10.0, 15.0, 1.0, 1e-300).unwrap();
        let v = takeoff_speed(&env, &a, 3.0);
        let p = ground_power(&env, &a, 12.0, 0.0, 3.0);
        let expected = 153.0 * v.powi(3) / 24.0;
        assert!((p - expected).abs() / expected < 1e-12);
    }

    #[test]
    fn level_flight_climb() {
        let env = Environment::default();
        let a = ac(10.0);
        let c = climb_solution(&env, &a, 2.0, 0.0).unwrap();
        assert!((c.thrust - 152.0 * 9.81 * 0.1).abs() < 1e-9);
        assert!((c.forward_speed - takeoff_speed(&env, &a, 2.0)).abs() < 1e-12);
        assert!(climb_solution(&env, &a, 0.0, 10.0).is_err());
    }

    #[test]
    fn climb_for_unit_vertical_speed() {
        // bisection fixed point, substituted back into the vertical
        // equilibrium and the exact thrust balance
        let env = Environment::default();
        let a = ac(10.0);
        let c = climb_for_speed(&env, &a, 5.0, 1.0).unwrap();
        assert!((c.climb_ratio * c.forward_speed - 1.0).abs() < 1e-12);
        assert!((c.forward_speed - 15.95).abs() < 0.01, "{c:?}");
        assert!((c.climb_ratio - 0.0627).abs() < 5e-4, "{c:?}");
        assert!((c.thrust - 248.9).abs() < 0.5, "{c:?}");
    }

    #[test]
    fn exact_and_small_ratio_thrust_agree() {
        let env = Environment::default();
        let a = ac(10.0);
        for i in 0..=20 {
            let cr = 0.01 * i as f64;
            let c = climb_solution(&env, &a, 0.0, cr).unwrap();
            let approx = a.mass() * env.g * (0.1 + cr);
            assert!((c.thrust - approx).abs() / c.thrust < 0.02, "cr={cr}");
        }
    }

    #[test]
    fn table_values() {
        let env = Environment::default();
        // (ground kW, on-board kW, added kg, area m^2)
        let frozen = [
            (7.1441, 2.3186, 1.2495, 132.73),
            (28.55, 9.274, 4.998, 191.6),
            (114.15, 37.10, 19.99, 427.3),
        ];
        for (i, (pg, pob, dm, ag)) in frozen.into_iter().enumerate() {
            let r = assess_linear(&env, &ac(SPANS[i]), &cfg(i)).unwrap();
            assert!((r.ground_power / 1e3 - pg).abs() / pg < 1e-3, "{r:?}");
            assert!((r.onboard_power / 1e3 - pob).abs() / pob < 1e-3, "{r:?}");
            assert!((r.added_mass - dm).abs() / dm < 1e-3, "{r:?}");
            assert!((r.ground_area - ag).abs() / ag < 1e-3, "{r:?}");
            assert!((r.takeoff_speed - 15.7).abs() < 0.4, "{r:?}");
        }
    }

    #[test]
    fn fixed_point_is_consistent() {
        let env = Environment::default();
        let a = ac(10.0);
        let c = cfg(1);
        let r = assess_linear(&env, &a, &c).unwrap();
        let climb = climb_for_speed(&env, &a, r.added_mass, 1.0).unwrap();
        let p = c
            .propellers
            .shaft_power(climb.thrust, climb.forward_speed, env.rho)
            .unwrap();
        assert!(((p - r.onboard_power) / p).abs() < 1e-10);
        assert!(((r.added_mass - p * c.climb.mass_per_watt()) / r.added_mass).abs() < 1e-10);
        let pg = ground_power(&env, &a, 12.0, 0.3, r.added_mass);
        assert_eq!(pg, r.ground_power);
        // area floor and wing-area share
        assert_eq!(r.area_floor, std::f64::consts::PI * 36.0);
        assert!(
            ((r.ground_area - r.area_floor) / a.area() - std::f64::consts::PI * 10.0 / 4.0).abs()
                < 1e-12
        );
    }

    #[test]
    fn infinite_storage_density_adds_no_mass() {
        let env = Environment::default();
        let mut c = cfg(1);
        c.climb.battery_energy_density = f64::INFINITY;
        c.climb.motor_power_density = f64::INFINITY;
        let r = assess_linear(&env, &ac(10.0), &c).unwrap();
        assert_eq!(r.added_mass, 0.0);
    }

    proptest! {
        #[test]
        fn climb_invariants(cr in 0.0f64..0.9, dm in 0.0f64..50.0, span in 2.0f64..30.0) {
            let env = Environment::default();
            let a = ac(span);
            let c = climb_solution(&env, &a, dm, cr).unwrap();
            let weight = (a.mass() + dm) * env.g;
            let root = (1.0 + cr * cr).sqrt();
            let airspeed_sq = c.forward_speed.powi(2) * (1.0 + cr * cr);
            let lift = 0.5 * env.rho * a.area() * a.lift_coeff() * airspeed_sq;
            let drag = lift * a.drag_coeff() / a.lift_coeff();
            // forces projected with sin(da) = cr/root, cos(da) = 1/root
            let vertical = lift / root - drag * cr / root;
            prop_assert!(((vertical - weight) / weight).abs() < 1e-10);
            let horizontal = lift * cr / root + drag / root;
            prop_assert!(((horizontal - c.thrust) / c.thrust).abs() < 1e-12);
        }

        #[test]
        fn ground_power_decreases_with_travel_length(l in 2.0f64..50.0, extra in 0.1f64..20.0) {
            let env = Environment::default();
            let a = ac(10.0);
            prop_assert!(ground_power(&env, &a, l + extra, 0.3, 0.0) < ground_power(&env, &a, l, 0.3, 0.0));
        }
    }
}
