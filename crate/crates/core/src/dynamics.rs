//! Hybrid model of the linear take-off: winch, slide and a 2-D aircraft,
//! first carried by the slide, then airborne.
//!
//! State components (0-based indices): 0 winch angle, 1 winch speed,
//! 2 slide-motor angle, 3 slide-motor speed, 4/5 aircraft horizontal
//! position and velocity, 6/7 vertical position and velocity, 8 pitch
//! angle, 9 pitch rate.

use serde::{Deserialize, Serialize};

use crate::aero::AeroTable;
use crate::crosswind::Environment;
use crate::error::{Error, Result};

pub const STATE_DIM: usize = 10;
pub type State = [f64; STATE_DIM];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Aircraft rigidly attached to the slide.
    Carried,
    /// Aircraft in free flight.
    Airborne,
}

impl Mode {
    /// Numeric code used in trajectory exports.
    pub fn code(self) -> u8 {
        match self {
            Mode::Carried => 1,
            Mode::Airborne => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HybridState {
    pub x: State,
    pub mode: Mode,
}

/// Winch torque, slide-motor torque and propeller thrust.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ControlInput {
    pub u1: f64,
    pub u2: f64,
    pub u3: f64,
}

/// Closed-loop pitch behaviour in free flight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PitchModel {
    /// The pitch rate relaxes towards the rate of the tracked angle
    /// `-delta_alpha`, so the pitch angle follows `-delta_alpha` as a
    /// first-order lag with time constant `1/omega_beta`.
    #[default]
    Tracking,
    /// The pitch rate relaxes towards `-delta_alpha` itself.
    RateToAngle,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlantParams {
    /// Winch inertia [kg m^2].
    pub j_m1: f64,
    pub beta_m1: f64,
    /// Winch drum radius [m].
    pub r_m1: f64,
    /// Slide pulley inertia [kg m^2].
    pub j_m2: f64,
    pub beta_m2: f64,
    /// Slide pulley radius [m].
    pub r_m2: f64,
    pub slide_mass: f64,
    /// Viscous friction of belt, slide and rail [kg/s].
    pub beta_s: f64,
    pub aircraft_mass: f64,
    pub wing_area: f64,
    /// Line stiffness [N/m].
    pub tether_stiffness: f64,
    pub tether_radius: f64,
    /// Line material density [kg/m^3].
    pub tether_density: f64,
    /// Pitch closed-loop bandwidth [rad/s].
    pub pitch_bandwidth: f64,
    /// Wing incidence giving `alpha = trim` in level flight at zero pitch [rad].
    pub trim: f64,
}

impl PlantParams {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.j_m1,
            self.beta_m1,
            self.r_m1,
            self.j_m2,
            self.beta_m2,
            self.r_m2,
            self.slide_mass,
            self.beta_s,
            self.aircraft_mass,
            self.wing_area,
            self.tether_stiffness,
            self.tether_radius,
            self.tether_density,
            self.pitch_bandwidth,
            self.trim,
        ];
        if all.iter().any(|v| !(v.is_finite() && *v >= 0.0)) || self.r_m1 <= 0.0 || self.r_m2 <= 0.0
        {
            return Err(Error::Config(format!(
                "plant parameters must be finite and non-negative with positive radii (got {self:?})"
            )));
        }
        if self.j_m1 <= 0.0
            || self.j_m2 + self.slide_mass * self.r_m2 * self.r_m2 <= 0.0
            || self.aircraft_mass <= 0.0
        {
            return Err(Error::Config(
                "plant inertias and aircraft mass must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Mass of line reeled off the winch [kg].
    pub fn reeled_tether_mass(&self, winch_angle: f64) -> f64 {
        self.tether_density
            * std::f64::consts::PI
            * self.tether_radius.powi(2)
            * self.r_m1
            * winch_angle
    }
}

/// Angle between the aircraft velocity and the horizontal, positive when
/// descending. Zero at rest.
pub fn delta_alpha(x: &State, mode: Mode) -> Result<f64> {
    let (vx, vy) = (x[5], x[7]);
    if vx.hypot(vy) < 1e-9 {
        return Ok(0.0);
    }
    if vx > 0.0 {
        return Ok((-vy).atan2(vx));
    }
    match mode {
        Mode::Carried => Ok((-vy / vx).atan()),
        Mode::Airborne => Err(Error::domain(format!(
            "aircraft flying backwards (horizontal speed {vx} m/s)"
        ))),
    }
}

/// Line tension: the spring pulls only while the aircraft is farther from
/// the winch than the reeled-out length.
pub fn tether_tension(x: &State, p: &PlantParams) -> f64 {
    (p.tether_stiffness * (x[4].hypot(x[6]) - p.r_m1 * x[0])).max(0.0)
}

/// Aerodynamic loads on the aircraft.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AeroLoads {
    pub lift: f64,
    pub drag: f64,
    pub delta_alpha: f64,
    pub alpha: f64,
}

/// Plant model: parameters, ambient conditions and aerodynamics.
#[derive(Debug, Clone, PartialEq)]
pub struct TakeoffModel {
    pub params: PlantParams,
    pub env: Environment,
    pub aero: AeroTable,
    pub pitch: PitchModel,
}

impl TakeoffModel {
    pub fn aero_loads(&self, x: &State, mode: Mode) -> Result<AeroLoads> {
        let da = delta_alpha(x, mode)?;
        let alpha = self.params.trim + da + x[8];
        let (cl, cd) = self.aero.coefficients(alpha)?;
        let q = 0.5 * self.env.rho * self.params.wing_area * (x[5] * x[5] + x[7] * x[7]);
        Ok(AeroLoads {
            lift: q * cl,
            drag: q * cd,
            delta_alpha: da,
            alpha,
        })
    }

    /// Vertical lift exceeds weight.
    pub fn switch_condition(&self, x: &State) -> Result<bool> {
        let f = self.aero_loads(x, Mode::Carried)?;
        Ok(f.lift * f.delta_alpha.cos() > self.params.aircraft_mass * self.env.g)
    }

    pub fn derivative(&self, s: &HybridState, u: &ControlInput) -> Result<State> {
        match s.mode {
            Mode::Carried => self.carried_derivative(&s.x, u),
            Mode::Airborne => self.airborne_derivative(&s.x, u),
        }
    }

    /// Aircraft slaved to the slide; the line acts on winch and slide.
    pub fn carried_derivative(&self, x: &State, u: &ControlInput) -> Result<State> {
        let p = &self.params;
        let t = tether_tension(x, p);
        let f = self.aero_loads(x, Mode::Carried)?;
        let (sa, ca) = f.delta_alpha.sin_cos();
        let slide_inertia = p.j_m2 + (p.slide_mass + p.aircraft_mass) * p.r_m2 * p.r_m2;
        let slide_force = -t - f.drag * ca + f.lift * sa - p.beta_s * p.r_m2 * x[3];
        let slide_acc = (p.r_m2 * slide_force - p.beta_m2 * x[3] + u.u2) / slide_inertia;
        Ok([
            x[1],
            (p.r_m1 * t - p.beta_m1 * x[1] + u.u1) / p.j_m1,
            x[3],
            slide_acc,
            x[5],
            p.r_m2 * slide_acc,
            x[7],
            0.0,
            x[9],
            0.0,
        ])
    }

    /// Free flight with the reeled-out line mass lumped into the aircraft.
    pub fn airborne_derivative(&self, x: &State, u: &ControlInput) -> Result<State> {
        let p = &self.params;
        let g = self.env.g;
        let t = tether_tension(x, p);
        let f = self.aero_loads(x, Mode::Airborne)?;
        let (sa, ca) = f.delta_alpha.sin_cos();
        let (sp, cp) = x[8].sin_cos();
        let mass = p.aircraft_mass + p.reeled_tether_mass(x[0]);
        let ax = (f.lift * sa - f.drag * ca + cp * u.u3) / mass;
        let ay = (f.lift * ca + f.drag * sa - mass * g + sp * u.u3) / mass;
        let target = match self.pitch {
            PitchModel::RateToAngle => -f.delta_alpha,
            PitchModel::Tracking => {
                let v2 = x[5] * x[5] + x[7] * x[7];
                if v2 < 1e-18 {
                    0.0
                } else {
                    -(x[7] * ax - x[5] * ay) / v2
                }
            }
        };
        Ok([
            x[1],
            (p.r_m1 * t - p.beta_m1 * x[1] + u.u1) / p.j_m1,
            x[3],
            (-p.r_m2 * p.r_m2 * p.beta_s * x[3] - p.beta_m2 * x[3] + u.u2)
                / (p.j_m2 + p.slide_mass * p.r_m2 * p.r_m2),
            x[5],
            ax,
            x[7],
            ay,
            x[9],
            p.pitch_bandwidth * (target - x[9]),
        ])
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;

    pub(crate) fn plant10() -> PlantParams {
        PlantParams {
            j_m1: 30.0,
            beta_m1: 0.002,
            r_m1: 0.5,
            j_m2: 0.1,
            beta_m2: 0.002,
            r_m2: 0.15,
            slide_mass: 30.0,
            beta_s: 0.3,
            aircraft_mass: 150.0,
            wing_area: 10.0,
            tether_stiffness: 9.1e5,
            tether_radius: 0.0075,
            tether_density: 970.0,
            pitch_bandwidth: 10.0,
            trim: 0.24,
        }
    }

    fn model(pitch: PitchModel) -> TakeoffModel {
        TakeoffModel {
            params: plant10(),
            env: Environment::default(),
            aero: AeroTable::clark_y(),
            pitch,
        }
    }

    /// Second coding of both modes, written component by component from
    /// the force and torque balances.
    fn reference(m: &TakeoffModel, x: &State, u: &ControlInput, mode: Mode) -> State {
        let p = &m.params;
        let dist = (x[4] * x[4] + x[6] * x[6]).sqrt();
        let stretch = dist - p.r_m1 * x[0];
        let tension = if stretch > 0.0 {
            p.tether_stiffness * stretch
        } else {
            0.0
        };
        let speed2 = x[5] * x[5] + x[7] * x[7];
        let da = if speed2.sqrt() < 1e-9 {
            0.0
        } else {
            (-x[7] / x[5]).atan()
        };
        let (cl, cd) = m.aero.coefficients(p.trim + da + x[8]).unwrap();
        let lift = 0.5 * m.env.rho * p.wing_area * cl * speed2;
        let drag = 0.5 * m.env.rho * p.wing_area * cd * speed2;
        let mut d = [0.0; STATE_DIM];
        d[0] = x[1];
        d[1] = (u.u1 + p.r_m1 * tension - p.beta_m1 * x[1]) / p.j_m1;
        d[2] = x[3];
        d[4] = x[5];
        d[6] = x[7];
        d[8] = x[9];
        match mode {
            Mode::Carried => {
                let torque = u.u2 - p.beta_m2 * x[3]
                    + p.r_m2 * (lift * da.sin() - drag * da.cos() - tension)
                    - p.r_m2 * p.r_m2 * p.beta_s * x[3];
                d[3] = torque / (p.j_m2 + p.r_m2 * p.r_m2 * (p.slide_mass + p.aircraft_mass));
                d[5] = d[3] * p.r_m2;
            }
            Mode::Airborne => {
                let tether_mass = p.tether_density
                    * std::f64::consts::PI
                    * p.tether_radius
                    * p.tether_radius
                    * p.r_m1
                    * x[0];
                let total = p.aircraft_mass + tether_mass;
                d[3] = (u.u2 - (p.beta_m2 + p.beta_s * p.r_m2 * p.r_m2) * x[3])
                    / (p.j_m2 + p.slide_mass * p.r_m2 * p.r_m2);
                d[5] = (u.u3 * x[8].cos() - drag * da.cos() + lift * da.sin()) / total;
                d[7] = (u.u3 * x[8].sin() + lift * da.cos() + drag * da.sin()) / total - m.env.g;
                d[9] = match m.pitch {
                    PitchModel::RateToAngle => p.pitch_bandwidth * (-da - x[9]),
                    PitchModel::Tracking => {
                        let da_dot = (x[7] * d[5] - x[5] * d[7]) / speed2;
                        p.pitch_bandwidth * (-da_dot - x[9])
                    }
                };
            }
        }
        d
    }

    #[test]
    fn delta_alpha_examples() {
        let mut x = [0.0; STATE_DIM];
        assert_eq!(delta_alpha(&x, Mode::Airborne).unwrap(), 0.0);
        x[5] = 10.0;
        assert_eq!(delta_alpha(&x, Mode::Airborne).unwrap(), 0.0);
        x[7] = 1.0;
        assert!((delta_alpha(&x, Mode::Airborne).unwrap() + 0.099_668_652_5).abs() < 1e-9);
        x[7] = -1.0;
        assert!((delta_alpha(&x, Mode::Airborne).unwrap() - 0.099_668_652_5).abs() < 1e-9);
        x[5] = -1.0;
        assert!(delta_alpha(&x, Mode::Airborne).is_err());
    }

    #[test]
    fn tension_examples() {
        let p = plant10();
        let mut x = [0.0; STATE_DIM];
        x[0] = 4.0;
        x[4] = 1.0;
        assert_eq!(tether_tension(&x, &p), 0.0);
        x[4] = 2.0;
        assert_eq!(tether_tension(&x, &p), 0.0);
        x[4] = 2.001;
        assert!((tether_tension(&x, &p) - 910.0).abs() < 1e-6);
    }

    #[test]
    fn rest_is_an_equilibrium() {
        let m = model(PitchModel::Tracking);
        let x = [0.0; STATE_DIM];
        let d = m.carried_derivative(&x, &ControlInput::default()).unwrap();
        assert_eq!(d, [0.0; STATE_DIM]);
    }

    #[test]
    fn full_slide_torque_from_rest() {
        let m = model(PitchModel::Tracking);
        let p = m.params;
        let u = ControlInput {
            u1: 0.0,
            u2: 290.0,
            u3: 0.0,
        };
        let d = m.carried_derivative(&[0.0; STATE_DIM], &u).unwrap();
        let expected = 290.0 / (p.j_m2 + (p.slide_mass + p.aircraft_mass) * p.r_m2 * p.r_m2);
        assert!((d[3] - expected).abs() < 1e-12);
        assert!((d[5] - p.r_m2 * expected).abs() < 1e-12);
    }

    #[test]
    fn steady_level_flight() {
        let mut m = model(PitchModel::RateToAngle);
        // no line mass so that lift alone balances the weight
        m.params.tether_density = 0.0;
        let v = (150.0 * 9.81 / (0.5 * 1.2 * 10.0 * 1.0f64)).sqrt();
        let mut x = [0.0; STATE_DIM];
        x[5] = v;
        x[4] = 30.0;
        x[0] = 100.0;
        let drag = 0.5 * 1.2 * 10.0 * 0.1 * v * v;
        let d = m
            .airborne_derivative(
                &x,
                &ControlInput {
                    u1: 0.0,
                    u2: 0.0,
                    u3: drag,
                },
            )
            .unwrap();
        assert!(d[5].abs() < 1e-12, "{d:?}");
        assert!(d[7].abs() < 1e-12, "{d:?}");
    }

    #[test]
    fn reeled_line_mass() {
        let p = plant10();
        let mt = p.reeled_tether_mass(20.0 / p.r_m1);
        assert!((mt - 970.0 * std::f64::consts::PI * 0.0075f64.powi(2) * 20.0).abs() < 1e-12);
        assert!((mt - 3.43).abs() < 0.01);
    }

    #[test]
    fn ballistic_without_aero_or_line() {
        let zero = AeroTable::new(vec![
            crate::aero::AeroSample {
                alpha_deg: -90.0,
                cl: 0.0,
                cd: 1e-300,
            },
            crate::aero::AeroSample {
                alpha_deg: 90.0,
                cl: 0.0,
                cd: 1e-300,
            },
        ])
        .unwrap();
        let mut m = model(PitchModel::Tracking);
        m.aero = zero;
        m.params.tether_stiffness = 0.0;
        m.params.tether_density = 0.0;
        let mut x = [0.0; STATE_DIM];
        x[5] = 12.0;
        x[7] = 3.0;
        x[8] = 0.3;
        let d = m
            .airborne_derivative(
                &x,
                &ControlInput {
                    u1: 0.0,
                    u2: 0.0,
                    u3: 100.0,
                },
            )
            .unwrap();
        assert!((d[7] - (-9.81 + 0.3f64.sin() * 100.0 / 150.0)).abs() < 1e-12);
        assert!((d[5] - 0.3f64.cos() * 100.0 / 150.0).abs() < 1e-12);
    }

    #[test]
    fn switch_boundary() {
        let m = model(PitchModel::Tracking);
        let mut x = [0.0; STATE_DIM];
        assert!(!m.switch_condition(&x).unwrap());
        // lift equals weight exactly at this speed, up to rounding
        let v = (150.0 * 9.81 / (0.5 * 1.2 * 10.0f64)).sqrt();
        x[5] = v * (1.0 - 1e-12);
        assert!(!m.switch_condition(&x).unwrap());
        x[5] = v * (1.0 + 1e-12);
        assert!(m.switch_condition(&x).unwrap());
        assert!((v - 15.66).abs() < 0.01);
    }

    fn random_state() -> impl Strategy<Value = (State, ControlInput)> {
        (
            prop::array::uniform10(-1.0f64..1.0),
            (-3000.0f64..3000.0, -300.0f64..300.0, 0.0f64..400.0),
        )
            .prop_map(|(r, (u1, u2, u3))| {
                let x = [
                    4.0 + 40.0 * (r[0] + 1.0),
                    30.0 * r[1],
                    100.0 * (r[2] + 1.0),
                    110.0 * r[3],
                    5.0 + 40.0 * (r[4] + 1.0),
                    14.0 + 6.0 * r[5],
                    20.0 * (r[6] + 1.0),
                    1.2 * r[7],
                    0.05 * r[8],
                    0.5 * r[9],
                ];
                (x, ControlInput { u1, u2, u3 })
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn derivatives_match_second_coding((x, u) in random_state()) {
            for pitch in [PitchModel::Tracking, PitchModel::RateToAngle] {
                let m = model(pitch);
                let mut carried = x;
                carried[6] = 0.0;
                carried[7] = 0.0;
                carried[8] = 0.0;
                carried[9] = 0.0;
                let a = m.carried_derivative(&carried, &u).unwrap();
                let b = reference(&m, &carried, &u, Mode::Carried);
                for i in 0..STATE_DIM {
                    prop_assert!((a[i] - b[i]).abs() <= 1e-12 * (1.0 + b[i].abs()), "carried {i}: {} vs {}", a[i], b[i]);
                }
                let a = m.airborne_derivative(&x, &u).unwrap();
                let b = reference(&m, &x, &u, Mode::Airborne);
                for i in 0..STATE_DIM {
                    prop_assert!((a[i] - b[i]).abs() <= 1e-12 * (1.0 + b[i].abs()), "airborne {i}: {} vs {}", a[i], b[i]);
                }
            }
        }

        #[test]
        fn derivatives_are_deterministic((x, u) in random_state()) {
            let m = model(PitchModel::Tracking);
            let a = m.airborne_derivative(&x, &u).unwrap();
            let b = m.airborne_derivative(&x, &u).unwrap();
            prop_assert!(a.iter().zip(&b).all(|(p, q)| p.to_bits() == q.to_bits()));
        }
    }
}
