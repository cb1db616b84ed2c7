//! Rotational take-off: the aircraft is towed on its line by a rotating
//! arm until lift carries it up while the line is reeled out.

mod equilibrium;
mod search;
mod sweep;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use equilibrium::{
    equilibrium_residuals, geometry, line_tension, solve_equilibrium, ArmPose, EquilibriumPoint,
    Geometry, RotationalEquilibrium,
};
pub use search::{
    max_gamma_v, min_arm_length, min_power_at, optimal_arm, peak_power_profile, ArmProfile,
    Infeasibility, RotationalOptimum,
};
pub use sweep::{
    max_gamma_curve, power_vs_arm, power_vs_gamma_v, write_sweep_csv, SweepRow, SWEEP_HEADER,
};

use crate::concept::{ConceptAssessment, TakeoffConcept};
use crate::crosswind::{Aircraft, Environment};
use crate::error::{Error, Result};
use crate::scenario::Scenario;

/// Operating limits and search grids. Angles in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RotationalConfig {
    /// Largest admissible angle between the wing's lift and the line [rad].
    pub zeta_max: f64,
    /// Line reel-out speed [m/s].
    pub reel_speed: f64,
    /// Desired climb speed; with the reel-out speed it bounds the elevation
    /// from below [m/s].
    pub climb_speed: f64,
    /// User lower bound on the elevation [rad].
    pub gamma_v_min: f64,
    pub gamma_v_max: f64,
    pub arm_min: f64,
    pub arm_max: f64,
    /// Longest line considered [m].
    pub line_max: f64,
    pub line_grid: usize,
    pub gamma_v_grid: usize,
    pub arm_grid: usize,
    /// Coarse azimuth samples before golden-section refinement.
    pub gamma_h_grid: usize,
    /// Elevation used to size the shortest admissible arm [rad].
    pub min_arm_gamma_v: f64,
}

impl Default for RotationalConfig {
    fn default() -> Self {
        Self {
            zeta_max: 50f64.to_radians(),
            reel_speed: 1.6,
            climb_speed: 1.0,
            gamma_v_min: 0.0,
            gamma_v_max: 90f64.to_radians(),
            arm_min: 30.0,
            arm_max: 50.0,
            line_max: 100.0,
            line_grid: 60,
            gamma_v_grid: 26,
            arm_grid: 21,
            gamma_h_grid: 90,
            min_arm_gamma_v: 40f64.to_radians(),
        }
    }
}

impl RotationalConfig {
    pub fn validate(&self) -> Result<()> {
        let half_pi = std::f64::consts::FRAC_PI_2;
        let mut problems = Vec::new();
        if !(self.zeta_max > 0.0 && self.zeta_max < half_pi) {
            problems.push("zeta_max must lie in (0, pi/2)");
        }
        if !(self.reel_speed > 0.0) || !(self.climb_speed >= 0.0) {
            problems.push("reel_speed must be > 0 and climb_speed >= 0");
        }
        if self.climb_speed > self.reel_speed {
            problems.push("climb_speed cannot exceed reel_speed");
        }
        if !(self.gamma_v_min >= 0.0
            && self.gamma_v_max <= half_pi
            && self.gamma_v_min <= self.gamma_v_max)
        {
            problems.push("elevation bounds must satisfy 0 <= gamma_v_min <= gamma_v_max <= pi/2");
        }
        if !(self.arm_min > 0.0 && self.arm_min <= self.arm_max) {
            problems.push("arm range must satisfy 0 < arm_min <= arm_max");
        }
        if !(self.line_max >= 0.0) {
            problems.push("line_max must be >= 0");
        }
        if self.line_grid < 2 || self.gamma_v_grid < 2 || self.arm_grid < 2 || self.gamma_h_grid < 3
        {
            problems.push("grids need at least 2 points (3 for gamma_h_grid)");
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(format!(
                "rotational: {}",
                problems.join("; ")
            )))
        }
    }

    /// Effective lower elevation bound: the line must rise at least as fast
    /// as the requested climb speed.
    pub fn gamma_v_lower(&self) -> Result<f64> {
        if self.climb_speed > self.reel_speed {
            return Err(Error::Config(
                "rotational: climb_speed cannot exceed reel_speed".into(),
            ));
        }
        Ok(self
            .gamma_v_min
            .max((self.climb_speed / self.reel_speed).asin())
            .min(self.gamma_v_max))
    }

    pub fn line_values(&self) -> Vec<f64> {
        linspace(0.0, self.line_max, self.line_grid)
    }

    pub fn gamma_v_values(&self) -> Result<Vec<f64>> {
        Ok(linspace(
            self.gamma_v_lower()?,
            self.gamma_v_max,
            self.gamma_v_grid,
        ))
    }

    pub fn arm_values(&self) -> Vec<f64> {
        linspace(self.arm_min, self.arm_max, self.arm_grid)
    }
}

pub(crate) fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![a];
    }
    (0..n)
        .map(|i| {
            if i + 1 == n {
                b
            } else {
                a + (b - a) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

/// Rotational take-off as a registered concept.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationalConcept {
    pub config: RotationalConfig,
}

impl RotationalConcept {
    pub fn from_scenario(s: &Scenario) -> Result<Self> {
        s.rotational.validate()?;
        Ok(Self {
            config: s.rotational,
        })
    }
}

impl TakeoffConcept for RotationalConcept {
    fn name(&self) -> &'static str {
        "rotational"
    }

    fn description(&self) -> &'static str {
        "towed on its line by a rotating arm until airborne"
    }

    fn assess(&self, env: &Environment, ac: &Aircraft) -> Result<ConceptAssessment> {
        // the still-air assumption holds whatever the nominal wind
        let still = Environment {
            wind_speed: 0.0,
            ..*env
        };
        let opt = optimal_arm(&still, ac, &self.config)?;
        let eq = opt.profile.equilibrium;
        let mut details = BTreeMap::new();
        details.insert("arm_m".into(), opt.arm);
        details.insert("omega_rad_s".into(), eq.omega);
        details.insert("tip_speed_m_s".into(), eq.tip_speed());
        details.insert("airspeed_m_s".into(), eq.tangential_speed);
        details.insert("gamma_v_min_rad".into(), opt.gamma_v_min);
        details.insert("gamma_v_rad".into(), eq.gamma_v);
        details.insert("gamma_h_rad".into(), eq.gamma_h);
        details.insert("zeta_rad".into(), eq.zeta);
        details.insert("line_m".into(), eq.line);
        details.insert("tension_N".into(), eq.tension);
        Ok(ConceptAssessment {
            concept: self.name().into(),
            peak_ground_power: opt.power,
            peak_onboard_power: 0.0,
            added_mass: 0.0,
            ground_area: opt.ground_area,
            area_floor: opt.ground_area,
            details,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ac(span: f64) -> Aircraft {
        Aircraft::new(span, 10.0, 15.0, 1.0, 0.1).unwrap()
    }

    fn coarse() -> RotationalConfig {
        RotationalConfig {
            line_grid: 6,
            gamma_v_grid: 6,
            arm_grid: 3,
            gamma_h_grid: 45,
            ..RotationalConfig::default()
        }
    }

    #[test]
    fn lower_elevation_bound() {
        let cfg = RotationalConfig::default();
        let g = cfg.gamma_v_lower().unwrap().to_degrees();
        assert!((g - 38.682).abs() < 1e-3, "{g}");
        let raised = RotationalConfig {
            gamma_v_min: 40f64.to_radians(),
            ..cfg
        };
        assert!((raised.gamma_v_lower().unwrap().to_degrees() - 40.0).abs() < 1e-12);
        let bad = RotationalConfig {
            climb_speed: 2.0,
            ..cfg
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn linspace_hits_endpoints() {
        let v = linspace(0.0, 100.0, 60);
        assert_eq!(v.len(), 60);
        assert_eq!(v[0], 0.0);
        assert_eq!(v[59], 100.0);
    }

    #[test]
    fn min_power_beats_azimuth_grid() {
        let env = Environment {
            wind_speed: 0.0,
            ..Environment::default()
        };
        let a = ac(10.0);
        let cfg = RotationalConfig::default();
        for (arm, line, gv) in [(50.0, 0.0, 38.7), (40.0, 20.0, 45.0), (30.0, 60.0, 55.0)] {
            let gv = f64::to_radians(gv);
            let eq = min_power_at(&env, &a, &cfg, arm, line, gv).unwrap();
            let grid: Vec<Option<f64>> = (1..200)
                .map(|k| {
                    let gh = std::f64::consts::FRAC_PI_2 * k as f64 / 200.0;
                    solve_equilibrium(
                        &env,
                        &a,
                        ArmPose {
                            arm,
                            line,
                            gamma_v: gv,
                        },
                        gh,
                    )
                    .ok()
                    .filter(|e| (e.zeta - gv).abs() <= cfg.zeta_max && e.tension >= 0.0)
                    .map(|e| e.power)
                })
                .collect();
            let best = grid.iter().flatten().cloned().fold(f64::INFINITY, f64::min);
            assert!(eq.power <= best * (1.0 + 1e-9), "{} vs {best}", eq.power);
            assert!(eq.power >= 0.95 * best, "{} vs {best}", eq.power);
            assert!(eq.residual_norm < 1e-8);
        }
    }

    #[test]
    fn roll_limit_is_named() {
        let env = Environment {
            wind_speed: 0.0,
            ..Environment::default()
        };
        let cfg = RotationalConfig::default();
        let err = min_power_at(&env, &ac(10.0), &cfg, 10.0, 0.0, 80f64.to_radians()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("infeasible"), "{msg}");
    }

    #[test]
    fn optimum_on_coarse_grid() {
        let env = Environment {
            wind_speed: 0.0,
            ..Environment::default()
        };
        let opt = optimal_arm(&env, &ac(10.0), &coarse()).unwrap();
        assert_eq!(opt.arm, 50.0);
        assert_eq!(opt.ground_area, std::f64::consts::PI * 2500.0);
        assert!(opt.power > 0.0);
        assert!(opt.profile.equilibrium.residual_norm < 1e-8);
        let powers: Vec<f64> = opt.power_by_arm.iter().filter_map(|p| p.1).collect();
        assert!(
            powers.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9)),
            "{powers:?}"
        );
    }

    #[test]
    fn empty_arm_range_reports_binding_constraint() {
        let env = Environment {
            wind_speed: 0.0,
            ..Environment::default()
        };
        let cfg = RotationalConfig {
            arm_min: 1.0,
            arm_max: 2.0,
            ..coarse()
        };
        let err = optimal_arm(&env, &ac(10.0), &cfg).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("no arm length"), "{msg}");
        assert!(
            msg.contains("roll constraint") || msg.contains("no equilibrium"),
            "{msg}"
        );
    }
}
