//! Nested searches over line azimuth, line length, elevation and arm length.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::equilibrium::{ArmPose, Frame, RotationalEquilibrium};
use super::RotationalConfig;
use crate::crosswind::{Aircraft, Environment};
use crate::error::{Error, Result};

/// Why no admissible equilibrium exists at a pose.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Infeasibility {
    /// The force balances have no solution with positive angular speed and
    /// a taut line for any azimuth.
    NoEquilibrium,
    /// Equilibria exist but all violate the roll-angle limit.
    RollLimit,
}

impl Infeasibility {
    pub fn describe(self, cfg: &RotationalConfig) -> String {
        match self {
            Infeasibility::NoEquilibrium => {
                "no equilibrium with omega > 0 and a taut line exists".to_string()
            }
            Infeasibility::RollLimit => format!(
                "roll constraint |zeta - gamma_V| <= {:.1} deg is violated by every equilibrium",
                cfg.zeta_max.to_degrees()
            ),
        }
    }
}

pub(crate) type PoseOutcome = std::result::Result<RotationalEquilibrium, Infeasibility>;

const GOLDEN_TOL: f64 = 1e-10;

/// True once any azimuth of the coarse grid gives an admissible
/// equilibrium; cheaper than the full minimisation.
pub(crate) fn admissible_exists(
    env: &Environment,
    ac: &Aircraft,
    cfg: &RotationalConfig,
    pose: ArmPose,
) -> Result<bool> {
    let step = std::f64::consts::FRAC_PI_2 / cfg.gamma_h_grid as f64;
    let mut guess = None;
    for k in 0..cfg.gamma_h_grid {
        let frame = Frame::new(env, ac, pose, (k as f64 + 0.5) * step)?;
        match frame.solve(guess) {
            Some(eq) => {
                if eq.tension >= 0.0 && (eq.zeta - pose.gamma_v).abs() <= cfg.zeta_max {
                    return Ok(true);
                }
                guess = Some((eq.zeta, eq.omega));
            }
            None => guess = None,
        }
    }
    Ok(false)
}

/// Minimum arm power over the line azimuth at a fixed pose.
pub(crate) fn min_power_inner(
    env: &Environment,
    ac: &Aircraft,
    cfg: &RotationalConfig,
    pose: ArmPose,
) -> Result<PoseOutcome> {
    let half_pi = std::f64::consts::FRAC_PI_2;
    let n = cfg.gamma_h_grid;
    let step = half_pi / n as f64;
    let mut any_equilibrium = false;
    let mut guess = None;
    let mut best: Option<(usize, RotationalEquilibrium)> = None;
    let admissible = |eq: &RotationalEquilibrium| {
        eq.tension >= 0.0 && (eq.zeta - pose.gamma_v).abs() <= cfg.zeta_max
    };

    for k in 0..n {
        let gh = (k as f64 + 0.5) * step;
        let frame = Frame::new(env, ac, pose, gh)?;
        match frame.solve(guess) {
            Some(eq) => {
                any_equilibrium |= eq.tension >= 0.0;
                guess = Some((eq.zeta, eq.omega));
                if admissible(&eq) && best.as_ref().is_none_or(|(_, b)| eq.power < b.power) {
                    best = Some((k, eq));
                }
            }
            None => guess = None,
        }
    }
    let Some((k, grid_best)) = best else {
        return Ok(Err(if any_equilibrium {
            Infeasibility::RollLimit
        } else {
            Infeasibility::NoEquilibrium
        }));
    };

    // golden-section refinement inside the bracket around the best sample;
    // inadmissible azimuths count as infinitely expensive
    let mut best = grid_best;
    let eval = |gh: f64, best: &mut RotationalEquilibrium| -> Result<f64> {
        let frame = Frame::new(env, ac, pose, gh)?;
        match frame.solve(Some((best.zeta, best.omega))) {
            Some(eq) if admissible(&eq) => {
                if eq.power < best.power {
                    *best = eq;
                }
                Ok(eq.power)
            }
            _ => Ok(f64::INFINITY),
        }
    };
    let centre = (k as f64 + 0.5) * step;
    let mut a = (centre - step).max(1e-9);
    let mut b = (centre + step).min(half_pi - 1e-9);
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let mut fc = eval(c, &mut best)?;
    let mut fd = eval(d, &mut best)?;
    while b - a > GOLDEN_TOL {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = eval(c, &mut best)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = eval(d, &mut best)?;
        }
    }
    Ok(Ok(best))
}

/// Minimum arm power over the line azimuth at `(R, l, gamma_V)`, subject to
/// the roll-angle limit. Infeasible poses give [`Error::Infeasible`].
pub fn min_power_at(
    env: &Environment,
    ac: &Aircraft,
    cfg: &RotationalConfig,
    arm: f64,
    line: f64,
    gamma_v: f64,
) -> Result<RotationalEquilibrium> {
    let pose = ArmPose { arm, line, gamma_v };
    min_power_inner(env, ac, cfg, pose)?.map_err(|why| {
        Error::Infeasible(format!(
            "R = {arm} m, l = {line} m, gamma_V = {:.3} deg: {}",
            gamma_v.to_degrees(),
            why.describe(cfg)
        ))
    })
}

/// Peak power over the line length at the best elevation, for one arm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArmProfile {
    pub arm: f64,
    /// Required peak power [W].
    pub power: f64,
    /// Elevation achieving the minimum [rad].
    pub gamma_v: f64,
    /// Line length at which the peak occurs [m].
    pub line: f64,
    /// Equilibrium at the peak.
    pub equilibrium: RotationalEquilibrium,
}

/// Min over elevation of the max over line length of [`min_power_at`].
///
/// Elevations whose running maximum already exceeds the best value found
/// so far are abandoned early, which leaves the result unchanged.
pub(crate) fn profile_inner(
    env: &Environment,
    ac: &Aircraft,
    cfg: &RotationalConfig,
    arm: f64,
) -> Result<std::result::Result<ArmProfile, Infeasibility>> {
    let lines = cfg.line_values();
    let mut best: Option<ArmProfile> = None;
    let mut first_reason = None;
    for gamma_v in cfg.gamma_v_values()? {
        let mut worst: Option<RotationalEquilibrium> = None;
        let mut pruned = false;
        for &line in &lines {
            match min_power_inner(env, ac, cfg, ArmPose { arm, line, gamma_v })? {
                Err(why) => {
                    first_reason.get_or_insert(why);
                    pruned = true;
                    break;
                }
                Ok(eq) => {
                    if best.as_ref().is_some_and(|b| eq.power >= b.power) {
                        pruned = true;
                        break;
                    }
                    if worst.as_ref().is_none_or(|w| eq.power > w.power) {
                        worst = Some(eq);
                    }
                }
            }
        }
        if pruned {
            continue;
        }
        if let Some(w) = worst {
            best = Some(ArmProfile {
                arm,
                power: w.power,
                gamma_v,
                line: w.line,
                equilibrium: w,
            });
        }
    }
    Ok(best.ok_or(first_reason.unwrap_or(Infeasibility::NoEquilibrium)))
}

pub fn peak_power_profile(
    env: &Environment,
    ac: &Aircraft,
    cfg: &RotationalConfig,
    arm: f64,
) -> Result<ArmProfile> {
    cfg.validate()?;
    let lower = cfg.gamma_v_lower()?;
    profile_inner(env, ac, cfg, arm)?.map_err(|why| {
        Error::Infeasible(format!(
            "arm length {arm} m: no elevation in [{:.2}, {:.2}] deg works for every line length up to {} m; {}",
            lower.to_degrees(),
            cfg.gamma_v_max.to_degrees(),
            cfg.line_max,
            why.describe(cfg)
        ))
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RotationalOptimum {
    pub arm: f64,
    pub power: f64,
    /// Ground area swept by the arm [m^2].
    pub ground_area: f64,
    /// Lowest admissible line elevation [rad].
    pub gamma_v_min: f64,
    pub profile: ArmProfile,
    /// Peak power for every arm length of the grid; `None` where infeasible.
    pub power_by_arm: Vec<(f64, Option<f64>)>,
}

/// Arm length in the configured range that minimises the peak power.
pub fn optimal_arm(
    env: &Environment,
    ac: &Aircraft,
    cfg: &RotationalConfig,
) -> Result<RotationalOptimum> {
    cfg.validate()?;
    let arms = cfg.arm_values();
    let results: Vec<_> = arms
        .par_iter()
        .map(|&arm| profile_inner(env, ac, cfg, arm))
        .collect::<Result<_>>()?;
    let mut best: Option<ArmProfile> = None;
    let mut reason = None;
    for r in &results {
        match r {
            Ok(p) => {
                if best.as_ref().is_none_or(|b| p.power < b.power) {
                    best = Some(*p);
                }
            }
            Err(why) => {
                reason.get_or_insert(*why);
            }
        }
    }
    let Some(profile) = best else {
        return Err(Error::Infeasible(format!(
            "no arm length in [{}, {}] m admits a rotational take-off: {}",
            cfg.arm_min,
            cfg.arm_max,
            reason.unwrap_or(Infeasibility::NoEquilibrium).describe(cfg)
        )));
    };
    Ok(RotationalOptimum {
        arm: profile.arm,
        power: profile.power,
        ground_area: std::f64::consts::PI * profile.arm * profile.arm,
        gamma_v_min: cfg.gamma_v_lower()?,
        profile,
        power_by_arm: arms
            .iter()
            .zip(&results)
            .map(|(&a, r)| (a, r.as_ref().ok().map(|p| p.power)))
            .collect(),
    })
}

/// True if every line length of the grid admits an equilibrium at the
/// given elevation.
pub(crate) fn feasible_for_all_lines(
    env: &Environment,
    ac: &Aircraft,
    cfg: &RotationalConfig,
    arm: f64,
    gamma_v: f64,
) -> Result<bool> {
    for line in cfg.line_values() {
        if !admissible_exists(env, ac, cfg, ArmPose { arm, line, gamma_v })? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Shortest arm for which the elevation `gamma_v` is admissible at every
/// line length of the grid, by bisection to `tol` metres.
pub fn min_arm_length(
    env: &Environment,
    ac: &Aircraft,
    cfg: &RotationalConfig,
    gamma_v: f64,
    tol: f64,
) -> Result<f64> {
    cfg.validate()?;
    let mut hi = cfg.arm_max;
    if !feasible_for_all_lines(env, ac, cfg, hi, gamma_v)? {
        return Err(Error::Infeasible(format!(
            "elevation {:.2} deg is not reachable even with the longest arm ({} m)",
            gamma_v.to_degrees(),
            cfg.arm_max
        )));
    }
    let mut lo = tol;
    if feasible_for_all_lines(env, ac, cfg, lo, gamma_v)? {
        return Ok(lo);
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if feasible_for_all_lines(env, ac, cfg, mid, gamma_v)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Largest admissible elevation at `(R, l)`: a coarse scan from the
/// horizontal up, then bisection to `tol` radians.
pub fn max_gamma_v(
    env: &Environment,
    ac: &Aircraft,
    cfg: &RotationalConfig,
    arm: f64,
    line: f64,
    tol: f64,
) -> Result<Option<RotationalEquilibrium>> {
    const SCAN_STEPS: usize = 45;
    let top = cfg.gamma_v_max;
    let pose = |gv: f64| ArmPose {
        arm,
        line,
        gamma_v: gv,
    };
    let feasible = |gv: f64| admissible_exists(env, ac, cfg, pose(gv));
    let scan = |k: usize| top * k as f64 / SCAN_STEPS as f64;
    let mut found = None;
    for k in (0..=SCAN_STEPS).rev() {
        if feasible(scan(k))? {
            found = Some(k);
            break;
        }
    }
    let Some(k) = found else {
        return Ok(None);
    };
    let mut best = scan(k);
    if k < SCAN_STEPS {
        let mut hi = scan(k + 1);
        while hi - best > tol {
            let mid = 0.5 * (best + hi);
            if feasible(mid)? {
                best = mid;
            } else {
                hi = mid;
            }
        }
    }
    Ok(min_power_inner(env, ac, cfg, pose(best))?.ok())
}
