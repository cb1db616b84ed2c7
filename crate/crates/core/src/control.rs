//! Discrete-time controllers of the linear take-off: proportional speed
//! loops for winch and slide motor, a lead-lag cascade for the propeller
//! thrust, and input saturation.

use serde::{Deserialize, Serialize};

use crate::dynamics::{ControlInput, Mode, PlantParams, State};
use crate::error::{Error, Result};

/// Which speed the proportional motor laws compare.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MotorLaw {
    /// Error on shaft speed: `K (v_ref / r - omega)`.
    #[default]
    ShaftSpeed,
    /// Error on rim speed: `K (v_ref - r omega)`.
    SurfaceSpeed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControllerParams {
    /// Slide speed target while carried [m/s].
    pub takeoff_speed: f64,
    /// Climb rate target once airborne [m/s].
    pub climb_speed: f64,
    pub k_m1: f64,
    pub k_m2: f64,
    pub k_t: f64,
    pub omega_p: f64,
    pub omega_z1: f64,
    pub omega_z2: f64,
    pub max_torque_m1: f64,
    pub max_torque_m2: f64,
    pub max_thrust: f64,
    /// Controller sampling rate [Hz].
    pub sample_rate: f64,
    #[serde(default)]
    pub motor_law: MotorLaw,
}

impl ControllerParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            self.k_m1,
            self.k_m2,
            self.k_t,
            self.omega_p,
            self.omega_z1,
            self.omega_z2,
            self.max_torque_m1,
            self.max_torque_m2,
            self.max_thrust,
            self.sample_rate,
        ];
        if positive.iter().any(|v| !(v.is_finite() && *v >= 0.0))
            || !(self.sample_rate > 0.0)
            || !(self.omega_p > 0.0 && self.omega_z1 > 0.0 && self.omega_z2 > 0.0)
            || !self.takeoff_speed.is_finite()
            || !self.climb_speed.is_finite()
        {
            return Err(Error::Config(format!(
                "controller parameters must be finite, non-negative, with positive corner frequencies and sample rate (got {self:?})"
            )));
        }
        Ok(())
    }

    pub fn sample_period(&self) -> f64 {
        1.0 / self.sample_rate
    }

    /// Clamp raw commands to actuator limits; thrust cannot be negative.
    pub fn saturate(&self, raw: ControlInput) -> ControlInput {
        ControlInput {
            u1: raw.u1.clamp(-self.max_torque_m1, self.max_torque_m1),
            u2: raw.u2.clamp(-self.max_torque_m2, self.max_torque_m2),
            u3: raw.u3.clamp(0.0, self.max_thrust),
        }
    }
}

/// Raw (unsaturated) winch and slide-motor torques.
///
/// Carried: both motors track the take-off speed. Airborne: the winch pays
/// out line at the aircraft speed and the slide is braked to rest.
pub fn motor_commands(mode: Mode, x: &State, c: &ControllerParams, p: &PlantParams) -> (f64, f64) {
    let winch_ref = match mode {
        Mode::Carried => c.takeoff_speed,
        Mode::Airborne => x[5].hypot(x[7]),
    };
    let slide_ref = match mode {
        Mode::Carried => c.takeoff_speed,
        Mode::Airborne => 0.0,
    };
    match c.motor_law {
        MotorLaw::ShaftSpeed => (
            c.k_m1 * (winch_ref / p.r_m1 - x[1]),
            c.k_m2 * (slide_ref / p.r_m2 - x[3]),
        ),
        MotorLaw::SurfaceSpeed => (
            c.k_m1 * (winch_ref - p.r_m1 * x[1]),
            c.k_m2 * (slide_ref - p.r_m2 * x[3]),
        ),
    }
}

/// Tustin discretization of `K (1 + s/z1)(1 + s/z2) / (s (1 + s/p))`,
/// realized in parallel form as direct feedthrough, an integrator and a
/// first-order lag. The integrator is frozen while the output saturates in
/// the direction the error pushes.
#[derive(Debug, Clone, PartialEq)]
pub struct PropellerController {
    direct: f64,
    integral_gain: f64,
    lag_gain: f64,
    lag_pole: f64,
    lag_input: f64,
    half_period: f64,
    integral: f64,
    lag: f64,
    last_error: f64,
}

impl PropellerController {
    pub fn new(c: &ControllerParams) -> Self {
        let t = c.sample_period();
        let (p, z1, z2) = (c.omega_p, c.omega_z1, c.omega_z2);
        let k = 2.0 / t;
        Self {
            direct: c.k_t * p / (z1 * z2),
            integral_gain: c.k_t,
            lag_gain: -c.k_t * (1.0 - p / z1) * (1.0 - p / z2),
            lag_pole: (k - p) / (k + p),
            lag_input: 1.0 / (k + p),
            half_period: 0.5 * t,
            integral: 0.0,
            lag: 0.0,
            last_error: 0.0,
        }
    }

    pub fn reset(&mut self) {
        self.integral = 0.0;
        self.lag = 0.0;
        self.last_error = 0.0;
    }

    fn output(&self, e: f64, integral: f64, lag: f64) -> f64 {
        self.direct * e + self.integral_gain * integral + self.lag_gain * lag
    }

    /// One unconstrained step; the returned value is the raw command.
    pub fn step(&mut self, e: f64) -> f64 {
        self.integral += self.half_period * (e + self.last_error);
        self.lag = self.lag_pole * self.lag + self.lag_input * (e + self.last_error);
        self.last_error = e;
        self.output(e, self.integral, self.lag)
    }

    /// One step with conditional integration against `[lo, hi]`. Returns the
    /// raw command, which the caller saturates.
    pub fn step_limited(&mut self, e: f64, lo: f64, hi: f64) -> f64 {
        let integral = self.integral + self.half_period * (e + self.last_error);
        let lag = self.lag_pole * self.lag + self.lag_input * (e + self.last_error);
        let raw = self.output(e, integral, lag);
        let winding = (raw > hi && e > 0.0) || (raw < lo && e < 0.0);
        if !winding {
            self.integral = integral;
        }
        self.lag = lag;
        self.last_error = e;
        self.output(e, self.integral, self.lag)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{tests::plant10, STATE_DIM};
    use proptest::prelude::*;

    pub(crate) fn ctrl10() -> ControllerParams {
        ControllerParams {
            takeoff_speed: 30.0,
            climb_speed: 1.0,
            k_m1: 20.0,
            k_m2: 50.0,
            k_t: 150.0,
            omega_p: 32.0,
            omega_z1: 0.2,
            omega_z2: 2.0,
            max_torque_m1: 3000.0,
            max_torque_m2: 290.0,
            max_thrust: 350.0,
            sample_rate: 100.0,
            motor_law: MotorLaw::ShaftSpeed,
        }
    }

    fn continuous_gain(c: &ControllerParams, w: f64) -> f64 {
        let num = (1.0 + (w / c.omega_z1).powi(2)).sqrt() * (1.0 + (w / c.omega_z2).powi(2)).sqrt();
        let den = w * (1.0 + (w / c.omega_p).powi(2)).sqrt();
        c.k_t * num / den
    }

    #[test]
    fn frequency_response_matches_design() {
        let c = ctrl10();
        let w = 0.1 * c.omega_z1;
        let t = c.sample_period();
        let mut pc = PropellerController::new(&c);
        let period = (2.0 * std::f64::consts::PI / w / t).ceil() as usize;
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for k in 0..5 * period {
            let u = pc.step((w * k as f64 * t).sin());
            if k >= 4 * period {
                lo = lo.min(u);
                hi = hi.max(u);
            }
        }
        let measured = 0.5 * (hi - lo);
        let design = continuous_gain(&c, w);
        assert!(
            (measured / design - 1.0).abs() < 0.01,
            "{measured} vs {design}"
        );
    }

    #[test]
    fn zero_error_gives_zero_output() {
        let mut pc = PropellerController::new(&ctrl10());
        for _ in 0..1000 {
            assert_eq!(pc.step(0.0), 0.0);
        }
    }

    #[test]
    fn constant_error_ramps() {
        let c = ctrl10();
        let mut pc = PropellerController::new(&c);
        let mut prev = pc.step(1.0);
        for k in 0..5000 {
            let u = pc.step(1.0);
            if k > 100 {
                assert!(u > prev);
            }
            prev = u;
        }
        // slope tends to K_T per second
        let a = pc.step(1.0);
        let b = pc.step(1.0);
        assert!(((b - a) / c.sample_period() - c.k_t).abs() < 1e-6 * c.k_t);
    }

    #[test]
    fn integrator_freezes_in_saturation() {
        let c = ctrl10();
        let mut pc = PropellerController::new(&c);
        for _ in 0..2000 {
            pc.step_limited(1.0, 0.0, c.max_thrust);
        }
        let stuck = pc.integral;
        pc.step_limited(1.0, 0.0, c.max_thrust);
        assert_eq!(pc.integral, stuck);
        // still pushing outward at the lower limit: frozen
        pc.step_limited(-0.1, 0.0, c.max_thrust);
        assert_eq!(pc.integral, stuck);
        // inside the limits it integrates again
        pc.step_limited(0.5, -1e9, 1e9);
        assert!(pc.integral > stuck);
    }

    #[test]
    fn motor_law_examples() {
        let p = plant10();
        let mut c = ctrl10();
        let mut x = [0.0; STATE_DIM];
        c.motor_law = MotorLaw::SurfaceSpeed;
        let (u1, _) = motor_commands(Mode::Carried, &x, &c, &p);
        assert_eq!(u1, 600.0);
        assert_eq!(
            c.saturate(ControlInput {
                u1,
                u2: 0.0,
                u3: 0.0
            })
            .u1,
            600.0
        );
        x[1] = 30.0 / p.r_m1;
        x[3] = 30.0 / p.r_m2;
        for law in [MotorLaw::ShaftSpeed, MotorLaw::SurfaceSpeed] {
            c.motor_law = law;
            let (u1, u2) = motor_commands(Mode::Carried, &x, &c, &p);
            assert!(u1.abs() < 1e-12 && u2.abs() < 1e-12);
            let (_, u2) = motor_commands(Mode::Airborne, &[0.0; STATE_DIM], &c, &p);
            assert_eq!(u2, 0.0);
        }
        c.motor_law = MotorLaw::ShaftSpeed;
        let (u1, u2) = motor_commands(Mode::Carried, &[0.0; STATE_DIM], &c, &p);
        assert_eq!(u1, 20.0 * 60.0);
        assert_eq!(u2, 50.0 * 200.0);
    }

    #[test]
    fn saturation_examples() {
        let c = ctrl10();
        let ok = ControlInput {
            u1: 10.0,
            u2: -20.0,
            u3: 30.0,
        };
        assert_eq!(c.saturate(ok), ok);
        let s = c.saturate(ControlInput {
            u1: 0.0,
            u2: 2900.0,
            u3: -5.0,
        });
        assert_eq!(s.u3, 0.0);
        assert_eq!(s.u2, 290.0);
    }

    proptest! {
        #[test]
        fn controller_is_linear(
            a in prop::collection::vec(-2.0f64..2.0, 50),
            b in prop::collection::vec(-2.0f64..2.0, 50),
        ) {
            let c = ctrl10();
            let (mut pa, mut pb, mut pab) =
                (PropellerController::new(&c), PropellerController::new(&c), PropellerController::new(&c));
            for (ea, eb) in a.iter().zip(&b) {
                let ya = pa.step(*ea);
                let yb = pb.step(*eb);
                let yab = pab.step(ea + eb);
                let scale = 1.0 + ya.abs().max(yb.abs());
                prop_assert!((ya + yb - yab).abs() < 1e-12 * scale);
            }
        }
    }
}
