//! Plot-ready sweep tables.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::equilibrium::{ArmPose, RotationalEquilibrium};
use super::search::{max_gamma_v, min_power_inner};
use super::RotationalConfig;
use crate::crosswind::{Aircraft, Environment};
use crate::error::Result;

pub const SWEEP_HEADER: &str =
    "R_m,l_m,gammaV_deg,gammaH_deg,zeta_deg,omega_rad_s,power_W,feasible";

/// One sweep sample; solution fields are empty where no admissible
/// equilibrium exists.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    #[serde(rename = "R_m")]
    pub arm: f64,
    #[serde(rename = "l_m")]
    pub line: f64,
    #[serde(rename = "gammaV_deg")]
    pub gamma_v_deg: Option<f64>,
    #[serde(rename = "gammaH_deg")]
    pub gamma_h_deg: Option<f64>,
    pub zeta_deg: Option<f64>,
    pub omega_rad_s: Option<f64>,
    #[serde(rename = "power_W")]
    pub power_w: Option<f64>,
    pub feasible: bool,
}

impl SweepRow {
    fn solved(eq: &RotationalEquilibrium) -> Self {
        Self {
            arm: eq.arm,
            line: eq.line,
            gamma_v_deg: Some(eq.gamma_v.to_degrees()),
            gamma_h_deg: Some(eq.gamma_h.to_degrees()),
            zeta_deg: Some(eq.zeta.to_degrees()),
            omega_rad_s: Some(eq.omega),
            power_w: Some(eq.power),
            feasible: true,
        }
    }

    fn infeasible(arm: f64, line: f64, gamma_v: Option<f64>) -> Self {
        Self {
            arm,
            line,
            gamma_v_deg: gamma_v.map(f64::to_degrees),
            gamma_h_deg: None,
            zeta_deg: None,
            omega_rad_s: None,
            power_w: None,
            feasible: false,
        }
    }
}

fn row_at(
    env: &Environment,
    ac: &Aircraft,
    cfg: &RotationalConfig,
    pose: ArmPose,
) -> Result<SweepRow> {
    Ok(match min_power_inner(env, ac, cfg, pose)? {
        Ok(eq) => SweepRow::solved(&eq),
        Err(_) => SweepRow::infeasible(pose.arm, pose.line, Some(pose.gamma_v)),
    })
}

/// Highest admissible elevation for every line length of the grid, found
/// to 0.1 degree.
pub fn max_gamma_curve(
    env: &Environment,
    ac: &Aircraft,
    cfg: &RotationalConfig,
    arm: f64,
) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    let tol = 0.1f64.to_radians();
    cfg.line_values()
        .par_iter()
        .map(|&line| {
            Ok(match max_gamma_v(env, ac, cfg, arm, line, tol)? {
                Some(eq) => SweepRow::solved(&eq),
                None => SweepRow::infeasible(arm, line, None),
            })
        })
        .collect()
}

/// Minimum power at one line length and elevation across the arm grid.
pub fn power_vs_arm(
    env: &Environment,
    ac: &Aircraft,
    cfg: &RotationalConfig,
    line: f64,
    gamma_v: f64,
) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    cfg.arm_values()
        .par_iter()
        .map(|&arm| row_at(env, ac, cfg, ArmPose { arm, line, gamma_v }))
        .collect()
}

/// Minimum power at one arm and line length across the elevation grid.
pub fn power_vs_gamma_v(
    env: &Environment,
    ac: &Aircraft,
    cfg: &RotationalConfig,
    arm: f64,
    line: f64,
) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    cfg.gamma_v_values()?
        .par_iter()
        .map(|&gamma_v| row_at(env, ac, cfg, ArmPose { arm, line, gamma_v }))
        .collect()
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record(SWEEP_HEADER.split(','))?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
