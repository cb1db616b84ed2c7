//! Closed-loop simulation of the linear take-off: fixed-step RK4 under a
//! zero-order hold, with the lift-off instant located by bisection.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::aero::AeroTable;
use crate::control::{motor_commands, ControllerParams, PropellerController};
use crate::crosswind::Environment;
use crate::dynamics::{
    tether_tension, ControlInput, HybridState, Mode, PitchModel, PlantParams, State, TakeoffModel,
    STATE_DIM,
};
use crate::error::{Error, Result};
use crate::propeller::PropellerBank;

/// Width of the bracket on the lift-off instant [s].
const SWITCH_TIME_TOL: f64 = 1e-12;

pub const TRAJECTORY_HEADER: &str =
    "t_s,x1,x2,x3,x4,x5,x6,x7,x8,x9,x10,mode,u1_Nm,u2_Nm,u3_N,tension_N,P_M1_W,P_M2_W,P_prop_W";

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub plant: PlantParams,
    pub controller: ControllerParams,
    pub aero: AeroTable,
    pub env: Environment,
    pub pitch_model: PitchModel,
    pub propellers: PropellerBank,
    /// Simulated horizon [s].
    pub duration: f64,
    /// Integrator step [s].
    pub step: f64,
    /// Line reeled out at start [m].
    pub initial_line: f64,
    /// Horizontal start position of the aircraft [m].
    pub initial_position: f64,
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        self.plant.validate()?;
        self.controller.validate()?;
        self.env.validate()?;
        self.propellers.validate()?;
        let ts = self.controller.sample_period();
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return Err(Error::Config(format!(
                "duration must be positive (got {})",
                self.duration
            )));
        }
        if !(self.step > 0.0 && self.step <= 0.5 * ts) {
            return Err(Error::Config(format!(
                "integrator step {} s must be positive and at most half the sampling period {} s",
                self.step, ts
            )));
        }
        let ratio = ts / self.step;
        if (ratio - ratio.round()).abs() > 1e-9 * ratio {
            return Err(Error::Config(format!(
                "sampling period {ts} s must be an integer multiple of the integrator step {} s",
                self.step
            )));
        }
        if !(self.initial_line >= 0.0 && self.initial_position.is_finite()) {
            return Err(Error::Config(
                "initial line length must be non-negative".into(),
            ));
        }
        Ok(())
    }

    pub fn model(&self) -> TakeoffModel {
        TakeoffModel {
            params: self.plant,
            env: self.env,
            aero: self.aero.clone(),
            pitch: self.pitch_model,
        }
    }

    pub fn initial_state(&self) -> State {
        let mut x = [0.0; STATE_DIM];
        x[0] = self.initial_line / self.plant.r_m1;
        x[4] = self.initial_position;
        x
    }
}

/// One logged sample, taken at a controller update.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub t: f64,
    pub x: State,
    pub mode: Mode,
    /// Held input from this sample to the next.
    pub input: ControlInput,
    pub tension: f64,
    pub lift: f64,
    pub drag: f64,
    pub power_m1: f64,
    pub power_m2: f64,
    pub power_prop: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwitchEvent {
    pub time: f64,
    pub state: State,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Trajectory {
    pub records: Vec<Record>,
    pub switch: Option<SwitchEvent>,
}

impl Trajectory {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(TRAJECTORY_HEADER.split(','))?;
        for r in &self.records {
            let mut row: Vec<String> = Vec::with_capacity(19);
            row.push(r.t.to_string());
            row.extend(r.x.iter().map(f64::to_string));
            row.push(r.mode.code().to_string());
            for v in [
                r.input.u1,
                r.input.u2,
                r.input.u3,
                r.tension,
                r.power_m1,
                r.power_m2,
                r.power_prop,
            ] {
                row.push(v.to_string());
            }
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn rk4(model: &TakeoffModel, mode: Mode, x: &State, u: &ControlInput, h: f64) -> Result<State> {
    let f = |y: &State| model.derivative(&HybridState { x: *y, mode }, u);
    let shifted = |k: &State, c: f64| -> State { std::array::from_fn(|i| x[i] + c * k[i]) };
    let k1 = f(x)?;
    let k2 = f(&shifted(&k1, 0.5 * h))?;
    let k3 = f(&shifted(&k2, 0.5 * h))?;
    let k4 = f(&shifted(&k3, h))?;
    Ok(std::array::from_fn(|i| {
        x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
    }))
}

struct Loop<'a> {
    cfg: &'a SimulationConfig,
    model: TakeoffModel,
    prop: PropellerController,
}

impl Loop<'_> {
    fn control(&mut self, s: &HybridState) -> ControlInput {
        let c = &self.cfg.controller;
        let (u1, u2) = motor_commands(s.mode, &s.x, c, &self.cfg.plant);
        let u3 = match s.mode {
            Mode::Carried => 0.0,
            Mode::Airborne => self
                .prop
                .step_limited(c.climb_speed - s.x[7], 0.0, c.max_thrust),
        };
        c.saturate(ControlInput { u1, u2, u3 })
    }

    fn record(&self, t: f64, s: &HybridState, u: ControlInput) -> Result<Record> {
        let loads = self.model.aero_loads(&s.x, s.mode)?;
        let airspeed = s.x[5].hypot(s.x[7]);
        Ok(Record {
            t,
            x: s.x,
            mode: s.mode,
            input: u,
            tension: tether_tension(&s.x, &self.cfg.plant),
            lift: loads.lift,
            drag: loads.drag,
            power_m1: u.u1 * s.x[1],
            power_m2: u.u2 * s.x[3],
            power_prop: self
                .cfg
                .propellers
                .shaft_power(u.u3, airspeed, self.cfg.env.rho)?,
        })
    }

    /// Advance one integrator step, switching mode inside the step if the
    /// lift-off condition is met.
    fn substep(
        &self,
        s: &mut HybridState,
        u: &ControlInput,
        t0: f64,
        h: f64,
    ) -> Result<Option<SwitchEvent>> {
        let next = rk4(&self.model, s.mode, &s.x, u, h)?;
        if s.mode == Mode::Airborne || !self.model.switch_condition(&next)? {
            s.x = next;
            return Ok(None);
        }
        let (mut lo, mut hi) = (0.0, h);
        let mut at_hi = next;
        while hi - lo > SWITCH_TIME_TOL {
            let mid = 0.5 * (lo + hi);
            let y = rk4(&self.model, Mode::Carried, &s.x, u, mid)?;
            if self.model.switch_condition(&y)? {
                hi = mid;
                at_hi = y;
            } else {
                lo = mid;
            }
        }
        let event = SwitchEvent {
            time: t0 + hi,
            state: at_hi,
        };
        s.mode = Mode::Airborne;
        s.x = if h - hi > 0.0 {
            rk4(&self.model, Mode::Airborne, &at_hi, u, h - hi)?
        } else {
            at_hi
        };
        Ok(Some(event))
    }
}

/// Simulate and keep whatever was computed before a failure.
pub fn run_partial(cfg: &SimulationConfig) -> (Trajectory, Option<Error>) {
    let mut traj = Trajectory::default();
    if let Err(e) = cfg.validate() {
        return (traj, Some(e));
    }
    let mut lp = Loop {
        cfg,
        model: cfg.model(),
        prop: PropellerController::new(&cfg.controller),
    };
    let ts = cfg.controller.sample_period();
    let n_sub = (ts / cfg.step).round() as usize;
    let h = ts / n_sub as f64;
    let n_samples = (cfg.duration / ts + 1e-9).floor() as usize;
    let mut s = HybridState {
        x: cfg.initial_state(),
        mode: Mode::Carried,
    };
    let diverged = |time: f64, reason: String| Error::Diverged { time, reason };

    for k in 0..=n_samples {
        let t = k as f64 * ts;
        let u = lp.control(&s);
        match lp.record(t, &s, u) {
            Ok(r) => traj.records.push(r),
            Err(e) => return (traj, Some(diverged(t, e.to_string()))),
        }
        if k == n_samples {
            break;
        }
        for j in 0..n_sub {
            let t0 = (k * n_sub + j) as f64 * h;
            match lp.substep(&mut s, &u, t0, h) {
                Ok(Some(ev)) => traj.switch = Some(ev),
                Ok(None) => {}
                Err(e) => return (traj, Some(diverged(t0, e.to_string()))),
            }
            if let Some(i) = s.x.iter().position(|v| !v.is_finite()) {
                return (
                    traj,
                    Some(diverged(
                        t0 + h,
                        format!("state component x{} is not finite", i + 1),
                    )),
                );
            }
        }
    }
    (traj, None)
}

pub fn run(cfg: &SimulationConfig) -> Result<Trajectory> {
    match run_partial(cfg) {
        (t, None) => Ok(t),
        (_, Some(e)) => Err(e),
    }
}

/// Peak powers and lift-off figures of a simulated take-off.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerSummary {
    /// Peak slide-motor power while carried; the figure compared with the
    /// static ground-power estimate [W].
    pub peak_ground_w: f64,
    pub peak_winch_w: f64,
    /// Peak of the summed absolute winch and slide-motor powers while carried [W].
    pub peak_ground_total_w: f64,
    pub peak_propeller_w: f64,
    pub takeoff_time_s: f64,
    pub takeoff_distance_m: f64,
    pub takeoff_speed_ms: f64,
    /// Furthest slide position reached [m].
    pub slide_travel_m: f64,
    pub max_tension_n: f64,
    /// Mean climb rate over the final `settle_window_s` of the run [m/s].
    pub steady_vertical_speed_ms: f64,
    pub settle_window_s: f64,
    pub final_height_m: f64,
}

/// Window at the end of the run over which the climb rate is averaged [s].
pub const SETTLE_WINDOW: f64 = 5.0;

pub fn power_summary(traj: &Trajectory, plant: &PlantParams) -> Result<PowerSummary> {
    let sw = traj.switch.ok_or_else(|| {
        Error::Infeasible("aircraft never left the slide (no lift-off within the horizon)".into())
    })?;
    let last = traj
        .records
        .last()
        .ok_or_else(|| Error::Infeasible("empty trajectory".into()))?;
    let carried = traj.records.iter().filter(|r| r.mode == Mode::Carried);
    let peak = |f: &dyn Fn(&Record) -> f64| carried.clone().map(f).fold(0.0, f64::max);
    let window: Vec<&Record> = traj
        .records
        .iter()
        .filter(|r| r.mode == Mode::Airborne && r.t >= last.t - SETTLE_WINDOW - 1e-9)
        .collect();
    let steady = if window.is_empty() {
        f64::NAN
    } else {
        window.iter().map(|r| r.x[7]).sum::<f64>() / window.len() as f64
    };
    let slide = traj
        .records
        .iter()
        .map(|r| r.x[2])
        .chain(std::iter::once(sw.state[2]))
        .fold(f64::NEG_INFINITY, f64::max)
        * plant.r_m2;
    Ok(PowerSummary {
        peak_ground_w: peak(&|r| r.power_m2.abs()),
        peak_winch_w: peak(&|r| r.power_m1.abs()),
        peak_ground_total_w: peak(&|r| r.power_m1.abs() + r.power_m2.abs()),
        peak_propeller_w: traj
            .records
            .iter()
            .map(|r| r.power_prop)
            .fold(0.0, f64::max),
        takeoff_time_s: sw.time,
        takeoff_distance_m: sw.state[4],
        takeoff_speed_ms: sw.state[5].hypot(sw.state[7]),
        slide_travel_m: slide,
        max_tension_n: traj.records.iter().map(|r| r.tension).fold(0.0, f64::max),
        steady_vertical_speed_ms: steady,
        settle_window_s: SETTLE_WINDOW,
        final_height_m: last.x[6],
    })
}
