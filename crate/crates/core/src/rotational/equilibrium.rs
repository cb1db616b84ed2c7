//! Force balance of an aircraft towed on a straight line from the tip of a
//! rotating arm, in still air.

use serde::{Deserialize, Serialize};

use crate::crosswind::{Aircraft, Environment};
use crate::error::{Error, Result};

/// Arm length, deployed line length and line elevation, all held fixed
/// while the equilibrium is solved.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArmPose {
    /// Arm length R [m].
    pub arm: f64,
    /// Line length l [m].
    pub line: f64,
    /// Line elevation gamma_V [rad].
    pub gamma_v: f64,
}

/// Aircraft position seen from the rotation axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    /// Angle between the arm and the aircraft's radius vector [rad].
    pub psi: f64,
    /// Distance of the aircraft from the rotation axis [m].
    pub r_prime: f64,
}

pub fn geometry(arm: f64, line: f64, gamma_v: f64, gamma_h: f64) -> Result<Geometry> {
    if !(arm > 0.0) || !(line >= 0.0) {
        return Err(Error::domain(format!(
            "arm length must be > 0 and line length >= 0 (got R = {arm}, l = {line})"
        )));
    }
    let horizontal = line * gamma_v.cos();
    let psi = (horizontal * gamma_h.sin() / (arm + horizontal * gamma_h.cos())).atan();
    let c = psi.cos();
    if c.abs() < 1e-12 {
        return Err(Error::DegenerateGeometry(format!(
            "aircraft radius vector perpendicular to the arm (psi = {psi})"
        )));
    }
    Ok(Geometry {
        psi,
        r_prime: (arm + horizontal * gamma_h.cos()) / c,
    })
}

/// Candidate unknowns of the force balance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumPoint {
    /// Roll angle of the aircraft [rad].
    pub zeta: f64,
    /// Angular speed of the arm [rad/s].
    pub omega: f64,
    /// Line azimuth relative to the arm [rad].
    pub gamma_h: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotationalEquilibrium {
    pub arm: f64,
    pub line: f64,
    pub gamma_v: f64,
    pub gamma_h: f64,
    pub zeta: f64,
    pub omega: f64,
    pub psi: f64,
    pub r_prime: f64,
    /// Airspeed of the aircraft `R' omega` [m/s].
    pub tangential_speed: f64,
    /// Line tension [N].
    pub tension: f64,
    /// Tension component that loads the arm against its rotation [N].
    pub tension_perp: f64,
    /// Mechanical power to keep the arm turning [W].
    pub power: f64,
    /// Largest absolute force-balance residual, in units of the weight.
    pub residual_norm: f64,
}

impl RotationalEquilibrium {
    /// Speed of the arm tip [m/s].
    pub fn tip_speed(&self) -> f64 {
        self.arm * self.omega
    }
}

/// Everything about one `(R, l, gamma_V, gamma_H)` that does not depend on
/// the unknowns `(zeta, omega)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Frame {
    pose: ArmPose,
    gamma_h: f64,
    geom: Geometry,
    sin_d: f64,
    cos_d: f64,
    sin_v: f64,
    cos_v: f64,
    mass: f64,
    weight: f64,
    lift_k: f64,
    drag_k: f64,
    speed_hint: f64,
}

struct Loads {
    lift: f64,
    drag: f64,
    centrifugal: f64,
}

impl Frame {
    pub(crate) fn new(
        env: &Environment,
        ac: &Aircraft,
        pose: ArmPose,
        gamma_h: f64,
    ) -> Result<Self> {
        let geom = geometry(pose.arm, pose.line, pose.gamma_v, gamma_h)?;
        let delta = gamma_h - geom.psi;
        Ok(Self {
            pose,
            gamma_h,
            geom,
            sin_d: delta.sin(),
            cos_d: delta.cos(),
            sin_v: pose.gamma_v.sin(),
            cos_v: pose.gamma_v.cos(),
            mass: ac.mass(),
            weight: ac.mass() * env.g,
            lift_k: 0.5 * env.rho * ac.area() * ac.lift_coeff(),
            drag_k: 0.5 * env.rho * ac.area() * ac.drag_coeff(),
            speed_hint: (2.0 * ac.wing_loading() * env.g / (env.rho * ac.lift_coeff())).sqrt(),
        })
    }

    fn loads(&self, omega: f64) -> Loads {
        let v = self.geom.r_prime * omega;
        let v2 = v * v;
        Loads {
            lift: self.lift_k * v2,
            drag: self.drag_k * v2,
            centrifugal: self.mass * v2 / self.geom.r_prime,
        }
    }

    /// Normalized residuals of the in-plane and out-of-plane balances.
    pub(crate) fn residuals(&self, zeta: f64, omega: f64) -> [f64; 2] {
        let f = self.loads(omega);
        let r1 = f.drag * self.cos_d - (f.lift * zeta.cos() + f.centrifugal) * self.sin_d;
        let r2 = f.lift * self.cos_d * (zeta - self.pose.gamma_v).sin()
            - self.weight * self.cos_v
            - (f.centrifugal * self.cos_d + f.drag * self.sin_d) * self.sin_v;
        [r1 / self.weight, r2 / self.weight]
    }

    pub(crate) fn tension(&self, zeta: f64, omega: f64) -> f64 {
        let f = self.loads(omega);
        f.lift * self.cos_d * (zeta - self.pose.gamma_v).cos() - self.weight * self.sin_v
            + (f.drag * self.sin_d + f.centrifugal * self.cos_d) * self.cos_v
    }

    fn starts(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let w = self.speed_hint / self.geom.r_prime;
        [0.1, -0.1, 0.8, 1.4].into_iter().flat_map(move |dz| {
            [1.0, 0.7, 1.4]
                .into_iter()
                .map(move |s| (self.pose.gamma_v + dz, w * s))
        })
    }

    /// Root of the residuals with `omega > 0`, trying `guess` first and then
    /// a fixed set of starts.
    pub(crate) fn solve(&self, guess: Option<(f64, f64)>) -> Option<RotationalEquilibrium> {
        guess
            .into_iter()
            .chain(self.starts())
            .find_map(|(z, w)| self.newton(z, w))
            .map(|(z, w, res)| self.equilibrium(z, w, res))
    }

    fn newton(&self, zeta0: f64, omega0: f64) -> Option<(f64, f64, f64)> {
        let norm = |r: [f64; 2]| r[0].abs().max(r[1].abs());
        let (mut z, mut w) = (zeta0, omega0);
        let mut n = norm(self.residuals(z, w));
        for _ in 0..NEWTON_MAX_ITER {
            if !n.is_finite() {
                return None;
            }
            if n < NEWTON_TOL {
                break;
            }
            let hz = JACOBIAN_STEP * z.abs().max(1.0);
            let hw = JACOBIAN_STEP * w.abs().max(1.0);
            let (zp, zm) = (self.residuals(z + hz, w), self.residuals(z - hz, w));
            let (wp, wm) = (self.residuals(z, w + hw), self.residuals(z, w - hw));
            let j = [
                [(zp[0] - zm[0]) / (2.0 * hz), (wp[0] - wm[0]) / (2.0 * hw)],
                [(zp[1] - zm[1]) / (2.0 * hz), (wp[1] - wm[1]) / (2.0 * hw)],
            ];
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            if !det.is_finite() || det.abs() < 1e-300 {
                return None;
            }
            let r = self.residuals(z, w);
            let dz = -(j[1][1] * r[0] - j[0][1] * r[1]) / det;
            let dw = -(-j[1][0] * r[0] + j[0][0] * r[1]) / det;
            let mut lambda = 1.0;
            let mut accepted = false;
            for _ in 0..40 {
                let (zn, wn) = (z + lambda * dz, w + lambda * dw);
                if wn > 0.0 {
                    let nn = norm(self.residuals(zn, wn));
                    if nn < n {
                        z = zn;
                        w = wn;
                        n = nn;
                        accepted = true;
                        break;
                    }
                }
                lambda *= 0.5;
            }
            if !accepted {
                return None;
            }
        }
        if n < ACCEPT_TOL && w > 0.0 {
            Some((z.sin().atan2(z.cos()), w, n))
        } else {
            None
        }
    }

    fn equilibrium(&self, zeta: f64, omega: f64, residual_norm: f64) -> RotationalEquilibrium {
        let tension = self.tension(zeta, omega);
        let tension_perp = tension * self.gamma_h.sin() * self.cos_v;
        RotationalEquilibrium {
            arm: self.pose.arm,
            line: self.pose.line,
            gamma_v: self.pose.gamma_v,
            gamma_h: self.gamma_h,
            zeta,
            omega,
            psi: self.geom.psi,
            r_prime: self.geom.r_prime,
            tangential_speed: self.geom.r_prime * omega,
            tension,
            tension_perp,
            power: self.pose.arm * tension_perp * omega,
            residual_norm,
        }
    }
}

const NEWTON_MAX_ITER: usize = 50;
const NEWTON_TOL: f64 = 1e-13;
const ACCEPT_TOL: f64 = 1e-10;
const JACOBIAN_STEP: f64 = 1e-6;

/// Residuals of the two force balances perpendicular to the line at a
/// candidate point, divided by the aircraft weight.
pub fn equilibrium_residuals(
    env: &Environment,
    ac: &Aircraft,
    pose: ArmPose,
    point: EquilibriumPoint,
) -> Result<[f64; 2]> {
    Ok(Frame::new(env, ac, pose, point.gamma_h)?.residuals(point.zeta, point.omega))
}

/// Line tension at a candidate point [N].
pub fn line_tension(
    env: &Environment,
    ac: &Aircraft,
    pose: ArmPose,
    point: EquilibriumPoint,
) -> Result<f64> {
    Ok(Frame::new(env, ac, pose, point.gamma_h)?.tension(point.zeta, point.omega))
}

/// Solves both force balances for `(zeta, omega)` at fixed `gamma_H` with
/// damped Newton iterations from several starts.
pub fn solve_equilibrium(
    env: &Environment,
    ac: &Aircraft,
    pose: ArmPose,
    gamma_h: f64,
) -> Result<RotationalEquilibrium> {
    if !(gamma_h > 0.0 && gamma_h < std::f64::consts::FRAC_PI_2) {
        return Err(Error::domain(format!(
            "line azimuth must lie in (0, pi/2), got {gamma_h}"
        )));
    }
    Frame::new(env, ac, pose, gamma_h)?
        .solve(None)
        .ok_or_else(|| {
            Error::Infeasible(format!(
                "no equilibrium at R = {} m, l = {} m, gamma_V = {:.3} deg, gamma_H = {:.3} deg",
                pose.arm,
                pose.line,
                pose.gamma_v.to_degrees(),
                gamma_h.to_degrees()
            ))
        })
}
