//! The four analyses behind the command-line front-end, returning report
//! values that render as text, JSON or CSV.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::concept::{ConceptAssessment, ConceptRegistry};
use crate::criteria::CriteriaScalings;
use crate::crosswind::{peak_crosswind_power, Aircraft};
use crate::error::{Error, Result};
use crate::linear::{assess_linear, LinearConfig};
use crate::rotational::{
    max_gamma_curve, power_vs_arm, power_vs_gamma_v, write_sweep_csv, SweepRow,
};
use crate::scenario::Scenario;
use crate::sim::{power_summary, run_partial, PowerSummary};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(Error::Config(format!(
                "unknown format '{s}' (text, json, csv)"
            ))),
        }
    }
}

/// Which aircraft of the scenario to process.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Selection {
    #[default]
    All,
    /// Zero-based index.
    One(usize),
}

impl std::str::FromStr for Selection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "all" {
            return Ok(Selection::All);
        }
        match s.parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Selection::One(n - 1)),
            _ => Err(Error::Config(format!(
                "aircraft must be 'all' or a 1-based index, got '{s}'"
            ))),
        }
    }
}

impl Selection {
    pub fn indices(self, scenario: &Scenario) -> Result<Vec<usize>> {
        match self {
            Selection::All => Ok((0..scenario.aircraft.len()).collect()),
            Selection::One(i) => {
                scenario.aircraft_at(i)?;
                Ok(vec![i])
            }
        }
    }
}

/// Three significant digits, as in the published tables.
pub fn sig3(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let digits = 2 - x.abs().log10().floor() as i32;
    format!("{:.*}", digits.max(0) as usize, x)
}

fn kw(w: f64) -> String {
    sig3(w / 1e3)
}

#[derive(Debug, Clone, Serialize)]
pub struct AssessRow {
    /// One-based aircraft number.
    pub aircraft: usize,
    pub wingspan_m: f64,
    pub peak_crosswind_power_w: f64,
    #[serde(flatten)]
    pub assessment: ConceptAssessment,
    /// Absent when the crosswind reference power is zero.
    pub criteria: Option<CriteriaScalings>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AssessReport {
    pub rows: Vec<AssessRow>,
}

pub fn assess(
    scenario: &Scenario,
    registry: &ConceptRegistry,
    selection: Selection,
    concepts: &[String],
) -> Result<AssessReport> {
    let names: Vec<String> = if concepts.is_empty() {
        registry.names().map(String::from).collect()
    } else {
        concepts.to_vec()
    };
    for n in &names {
        if !registry.contains(n) {
            registry.build(n, scenario, 0)?;
        }
    }
    let env = scenario.environment;
    let mut rows = Vec::new();
    for i in selection.indices(scenario)? {
        let ac = scenario.aircraft_at(i)?;
        for n in &names {
            let concept = registry.build(n, scenario, i)?;
            let a = concept.assess(&env, ac)?;
            let criteria = match a.criteria(ac, &env) {
                Ok(c) => Some(c),
                Err(Error::Domain(_)) => None,
                Err(e) => return Err(e),
            };
            rows.push(AssessRow {
                aircraft: i + 1,
                wingspan_m: ac.wingspan(),
                peak_crosswind_power_w: peak_crosswind_power(&env, ac),
                assessment: a,
                criteria,
            });
        }
    }
    Ok(AssessReport { rows })
}

const UNDEFINED: &str = "undefined";

fn opt(v: Option<f64>, f: impl Fn(f64) -> String) -> String {
    v.map_or_else(|| UNDEFINED.to_string(), f)
}

impl AssessReport {
    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => Ok(serde_json::to_string_pretty(self)? + "\n"),
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record([
                    "aircraft",
                    "wingspan_m",
                    "concept",
                    "peak_crosswind_power_W",
                    "peak_ground_power_W",
                    "peak_onboard_power_W",
                    "added_mass_kg",
                    "ground_area_m2",
                    "area_floor_m2",
                    "eta_Pg",
                    "eta_Pob",
                    "eta_m",
                    "eta_Ag",
                ])?;
                for r in &self.rows {
                    let a = &r.assessment;
                    let c = r.criteria;
                    let full = |v: f64| v.to_string();
                    w.write_record([
                        r.aircraft.to_string(),
                        full(r.wingspan_m),
                        a.concept.clone(),
                        full(r.peak_crosswind_power_w),
                        full(a.peak_ground_power),
                        full(a.peak_onboard_power),
                        full(a.added_mass),
                        full(a.ground_area),
                        full(a.area_floor),
                        opt(c.map(|c| c.eta_pg), full),
                        opt(c.map(|c| c.eta_pob), full),
                        opt(c.map(|c| c.eta_m), full),
                        opt(c.map(|c| c.eta_ag), full),
                    ])?;
                }
                Ok(
                    String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.into_error()))?)
                        .expect("csv output is utf-8"),
                )
            }
            Format::Text => {
                let mut s = String::new();
                let _ = writeln!(
                    s,
                    "{:>3} {:>6} {:<11} {:>9} {:>9} {:>9} {:>8} {:>9} {:>7} {:>7} {:>7} {:>9} {:>7}",
                    "#", "span", "concept", "P*_m kW", "P_g kW", "P_ob kW", "dm kg", "A_g m2", "eta_Pg", "eta_Pob",
                    "eta_m", "floor m2", "eta_Ag"
                );
                for r in &self.rows {
                    let a = &r.assessment;
                    let c = r.criteria;
                    let pct = |v: f64| format!("{:.1}%", 100.0 * v);
                    let _ = writeln!(
                        s,
                        "{:>3} {:>6} {:<11} {:>9} {:>9} {:>9} {:>8} {:>9} {:>7} {:>7} {:>7} {:>9} {:>7}",
                        r.aircraft,
                        r.wingspan_m,
                        a.concept,
                        kw(r.peak_crosswind_power_w),
                        kw(a.peak_ground_power),
                        kw(a.peak_onboard_power),
                        sig3(a.added_mass),
                        sig3(a.ground_area),
                        opt(c.map(|c| c.eta_pg), pct),
                        opt(c.map(|c| c.eta_pob), pct),
                        opt(c.map(|c| c.eta_m), pct),
                        sig3(a.area_floor),
                        opt(c.map(|c| c.eta_ag), |v| format!("{v:.3}")),
                    );
                }
                Ok(s)
            }
        }
    }
}

/// Which plot-ready tables a rotational sweep produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    /// Highest elevation against line length for a few wing loadings and arms.
    MaxGamma,
    /// Power against arm length.
    PowerVsArm,
    /// Power against elevation.
    PowerVsGammaV,
}

impl std::str::FromStr for SweepKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "max-gamma" => Ok(SweepKind::MaxGamma),
            "power-arm" => Ok(SweepKind::PowerVsArm),
            "power-gamma" => Ok(SweepKind::PowerVsGammaV),
            _ => Err(Error::Config(format!(
                "unknown sweep '{s}' (max-gamma, power-arm, power-gamma)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOptions {
    pub kinds: Vec<SweepKind>,
    /// Line length of the power tables [m].
    pub line: f64,
    /// Arm of the power-against-elevation table; the longest arm when absent.
    pub arm: Option<f64>,
    /// Elevation of the power-against-arm table; the lowest admissible when absent.
    pub gamma_v: Option<f64>,
    /// (wing loading, arm) pairs of the maximum-elevation curves.
    pub max_gamma_cases: Vec<(f64, f64)>,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            kinds: vec![
                SweepKind::MaxGamma,
                SweepKind::PowerVsArm,
                SweepKind::PowerVsGammaV,
            ],
            line: 1.0,
            arm: None,
            gamma_v: None,
            max_gamma_cases: vec![(15.0, 10.0), (15.0, 40.0), (30.0, 40.0)],
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepTable {
    pub name: String,
    pub rows: Vec<SweepRow>,
}

fn with_loading(ac: &Aircraft, wing_loading: f64) -> Result<Aircraft> {
    Aircraft::new(
        ac.wingspan(),
        ac.aspect_ratio(),
        wing_loading,
        ac.lift_coeff(),
        ac.drag_coeff(),
    )
}

fn tag(x: f64) -> String {
    format!("{x}").replace('.', "p")
}

pub fn rotational_sweep(
    scenario: &Scenario,
    selection: Selection,
    opts: &SweepOptions,
) -> Result<Vec<SweepTable>> {
    let env = crate::crosswind::Environment {
        wind_speed: 0.0,
        ..scenario.environment
    };
    let cfg = scenario.rotational;
    cfg.validate()?;
    let mut tables = Vec::new();
    for i in selection.indices(scenario)? {
        let ac = scenario.aircraft_at(i)?;
        let d = tag(ac.wingspan());
        for kind in &opts.kinds {
            match kind {
                SweepKind::MaxGamma => {
                    for &(wl, arm) in &opts.max_gamma_cases {
                        let loaded = with_loading(ac, wl)?;
                        tables.push(SweepTable {
                            name: format!("max_gamma_d{d}_wl{}_R{}", tag(wl), tag(arm)),
                            rows: max_gamma_curve(&env, &loaded, &cfg, arm)?,
                        });
                    }
                }
                SweepKind::PowerVsArm => {
                    let gv = match opts.gamma_v {
                        Some(g) => g,
                        None => cfg.gamma_v_lower()?,
                    };
                    tables.push(SweepTable {
                        name: format!("power_vs_arm_d{d}_l{}", tag(opts.line)),
                        rows: power_vs_arm(&env, ac, &cfg, opts.line, gv)?,
                    });
                }
                SweepKind::PowerVsGammaV => {
                    let arm = opts.arm.unwrap_or(cfg.arm_max);
                    tables.push(SweepTable {
                        name: format!("power_vs_gamma_d{d}_R{}_l{}", tag(arm), tag(opts.line)),
                        rows: power_vs_gamma_v(&env, ac, &cfg, arm, opts.line)?,
                    });
                }
            }
        }
    }
    if !tables.is_empty() && tables.iter().all(|t| t.rows.iter().all(|r| !r.feasible)) {
        return Err(Error::Infeasible(
            "no sweep point admits a rotational equilibrium within the elevation and line-angle limits".into(),
        ));
    }
    Ok(tables)
}

pub fn write_sweep_tables(tables: &[SweepTable], dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    tables
        .iter()
        .map(|t| {
            let path = dir.join(format!("{}.csv", t.name));
            write_sweep_csv(&t.rows, std::fs::File::create(&path)?)?;
            Ok(path)
        })
        .collect()
}

pub fn render_sweep(tables: &[SweepTable], files: &[PathBuf], format: Format) -> Result<String> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(tables)? + "\n"),
        Format::Csv => {
            let mut out = Vec::new();
            let rows: Vec<SweepRow> = tables.iter().flat_map(|t| t.rows.iter().copied()).collect();
            write_sweep_csv(&rows, &mut out)?;
            Ok(String::from_utf8(out).expect("csv output is utf-8"))
        }
        Format::Text => {
            let mut s = String::new();
            for (t, f) in tables.iter().zip(files) {
                let feasible = t.rows.iter().filter(|r| r.feasible).count();
                let _ = writeln!(
                    s,
                    "{:<40} {:>3}/{:<3} feasible  -> {}",
                    t.name,
                    feasible,
                    t.rows.len(),
                    f.display()
                );
            }
            Ok(s)
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulationReport {
    pub aircraft: usize,
    pub wingspan_m: f64,
    /// `airborne`, `not airborne` or the reason the run stopped.
    pub status: String,
    pub summary: Option<PowerSummary>,
    #[serde(skip)]
    pub trajectory: crate::sim::Trajectory,
    #[serde(skip)]
    pub failure: Option<String>,
}

/// Runs the selected simulations in parallel; results keep scenario order.
pub fn simulate(
    scenario: &Scenario,
    selection: Selection,
    duration: Option<f64>,
) -> Result<Vec<SimulationReport>> {
    let indices = selection.indices(scenario)?;
    let configs = indices
        .iter()
        .map(|&i| {
            let mut c = scenario.simulation_config(i)?;
            if let Some(d) = duration {
                c.duration = d;
            }
            c.validate()?;
            Ok((i, c))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(configs
        .par_iter()
        .map(|(i, cfg)| {
            let (traj, err) = run_partial(cfg);
            let summary = power_summary(&traj, &cfg.plant).ok();
            let status = match (&err, &summary) {
                (Some(e), _) => e.to_string(),
                (None, Some(_)) => "airborne".to_string(),
                (None, None) => "not airborne".to_string(),
            };
            SimulationReport {
                aircraft: i + 1,
                wingspan_m: scenario.aircraft[*i].wingspan(),
                status,
                summary,
                trajectory: traj,
                failure: err.map(|e| e.to_string()),
            }
        })
        .collect())
}

pub fn write_trajectories(reports: &[SimulationReport], dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    reports
        .iter()
        .map(|r| {
            let path = dir.join(format!("trajectory_d{}.csv", tag(r.wingspan_m)));
            r.trajectory.write_csv(std::fs::File::create(&path)?)?;
            Ok(path)
        })
        .collect()
}

pub fn render_simulations(reports: &[SimulationReport], format: Format) -> Result<String> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(reports)? + "\n"),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record([
                "aircraft",
                "wingspan_m",
                "status",
                "peak_ground_W",
                "peak_winch_W",
                "peak_ground_total_W",
                "peak_propeller_W",
                "takeoff_time_s",
                "takeoff_distance_m",
                "takeoff_speed_m_s",
                "slide_travel_m",
                "max_tension_N",
                "steady_vertical_speed_m_s",
                "final_height_m",
            ])?;
            for r in reports {
                let mut row = vec![
                    r.aircraft.to_string(),
                    r.wingspan_m.to_string(),
                    r.status.clone(),
                ];
                match &r.summary {
                    Some(s) => row.extend(
                        [
                            s.peak_ground_w,
                            s.peak_winch_w,
                            s.peak_ground_total_w,
                            s.peak_propeller_w,
                            s.takeoff_time_s,
                            s.takeoff_distance_m,
                            s.takeoff_speed_ms,
                            s.slide_travel_m,
                            s.max_tension_n,
                            s.steady_vertical_speed_ms,
                            s.final_height_m,
                        ]
                        .iter()
                        .map(f64::to_string),
                    ),
                    None => row.extend(std::iter::repeat_n(String::new(), 11)),
                }
                w.write_record(&row)?;
            }
            Ok(
                String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.into_error()))?)
                    .expect("csv output is utf-8"),
            )
        }
        Format::Text => {
            let mut out = String::new();
            for r in reports {
                let _ = writeln!(
                    out,
                    "aircraft {} (span {} m): {}",
                    r.aircraft, r.wingspan_m, r.status
                );
                if let Some(s) = &r.summary {
                    let _ = writeln!(
                        out,
                        "  lift-off          t = {} s at x = {} m, speed {} m/s",
                        sig3(s.takeoff_time_s),
                        sig3(s.takeoff_distance_m),
                        sig3(s.takeoff_speed_ms)
                    );
                    let _ = writeln!(out, "  slide travel      {} m", sig3(s.slide_travel_m));
                    let _ = writeln!(
                        out,
                        "  ground power      slide motor {} kW, winch {} kW, combined {} kW",
                        kw(s.peak_ground_w),
                        kw(s.peak_winch_w),
                        kw(s.peak_ground_total_w)
                    );
                    let _ = writeln!(out, "  propeller power   {} kW", kw(s.peak_propeller_w));
                    let _ = writeln!(
                        out,
                        "  climb rate        {} m/s (mean over last {} s), height {} m",
                        sig3(s.steady_vertical_speed_ms),
                        s.settle_window_s,
                        sig3(s.final_height_m)
                    );
                    let _ = writeln!(out, "  max line tension  {} N", sig3(s.max_tension_n));
                }
            }
            Ok(out)
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonColumn {
    pub aircraft: usize,
    pub wingspan_m: f64,
    pub peak_crosswind_power_w: f64,
    pub static_ground_w: f64,
    pub static_propeller_w: f64,
    pub simulated_ground_w: Option<f64>,
    pub simulated_propeller_w: Option<f64>,
    pub status: String,
}

/// Static linear assessment next to the simulated take-off for each
/// selected aircraft.
pub fn compare(scenario: &Scenario, selection: Selection) -> Result<Vec<ComparisonColumn>> {
    let sims = simulate(scenario, selection, None)?;
    let env = scenario.environment;
    sims.into_iter()
        .map(|sim| {
            let i = sim.aircraft - 1;
            let ac = scenario.aircraft_at(i)?;
            let cfg = LinearConfig {
                travel_length: scenario.linear.travel_length,
                viscous_coeff: scenario.linear.viscous_coeff_for(i)?,
                climb: scenario.linear.climb,
                propellers: scenario.linear.propellers.for_aircraft(ac)?,
            };
            let lin = assess_linear(&env, ac, &cfg)?;
            Ok(ComparisonColumn {
                aircraft: sim.aircraft,
                wingspan_m: sim.wingspan_m,
                peak_crosswind_power_w: peak_crosswind_power(&env, ac),
                static_ground_w: lin.ground_power,
                static_propeller_w: lin.onboard_power,
                simulated_ground_w: sim.summary.map(|s| s.peak_ground_w),
                simulated_propeller_w: sim.summary.map(|s| s.peak_propeller_w),
                status: sim.status,
            })
        })
        .collect()
}

type ColumnField = fn(&ComparisonColumn) -> Option<f64>;

pub fn render_comparison(cols: &[ComparisonColumn], format: Format) -> Result<String> {
    let rows: [(&str, ColumnField); 4] = [
        ("ground, static", |c| Some(c.static_ground_w)),
        ("ground, simulated", |c| c.simulated_ground_w),
        ("propeller, static", |c| Some(c.static_propeller_w)),
        ("propeller, simulated", |c| c.simulated_propeller_w),
    ];
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(cols)? + "\n"),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut header = vec!["quantity".to_string()];
            header.extend(cols.iter().map(|c| format!("d{}_W", c.wingspan_m)));
            w.write_record(&header)?;
            for (name, get) in rows {
                let mut row = vec![name.to_string()];
                row.extend(
                    cols.iter()
                        .map(|c| get(c).map_or_else(String::new, |v| v.to_string())),
                );
                w.write_record(&row)?;
            }
            Ok(
                String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.into_error()))?)
                    .expect("csv output is utf-8"),
            )
        }
        Format::Text => {
            let mut out = format!("{:<22}", "span (m)");
            for c in cols {
                let _ = write!(out, "{:>18}", c.wingspan_m);
            }
            out.push('\n');
            for (name, get) in rows {
                let _ = write!(out, "{name:<22}");
                for c in cols {
                    let cell = match get(c) {
                        Some(v) if c.peak_crosswind_power_w > 0.0 => {
                            format!(
                                "{} kW ({:.0}%)",
                                kw(v),
                                100.0 * v / c.peak_crosswind_power_w
                            )
                        }
                        Some(v) => format!("{} kW", kw(v)),
                        None => "n/a".to_string(),
                    };
                    let _ = write!(out, "{cell:>18}");
                }
                out.push('\n');
            }
            for c in cols.iter().filter(|c| c.status != "airborne") {
                let _ = writeln!(out, "aircraft {}: {}", c.aircraft, c.status);
            }
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_significant_digits() {
        assert_eq!(sig3(55.937), "55.9");
        assert_eq!(sig3(223.71), "224");
        assert_eq!(sig3(7.1449), "7.14");
        assert_eq!(sig3(0.0627), "0.0627");
        assert_eq!(sig3(7854.0), "7854");
    }

    #[test]
    fn selection_parsing() {
        let s = Scenario::paper();
        assert_eq!(
            "all".parse::<Selection>().unwrap().indices(&s).unwrap(),
            vec![0, 1, 2]
        );
        assert_eq!(
            "2".parse::<Selection>().unwrap().indices(&s).unwrap(),
            vec![1]
        );
        assert!("0".parse::<Selection>().is_err());
        assert!("4".parse::<Selection>().unwrap().indices(&s).is_err());
    }

    #[test]
    fn zero_wind_marks_criteria_undefined() {
        let mut s = Scenario::paper();
        s.environment.wind_speed = 0.0;
        let reg = ConceptRegistry::builtin();
        let r = assess(
            &s,
            &reg,
            Selection::One(1),
            &["linear".into(), "vertical".into()],
        )
        .unwrap();
        assert_eq!(r.rows.len(), 2);
        assert!(r
            .rows
            .iter()
            .all(|row| row.criteria.is_none() && row.peak_crosswind_power_w == 0.0));
        let text = r.render(Format::Text).unwrap();
        assert!(text.contains(UNDEFINED));
        let csv = r.render(Format::Csv).unwrap();
        assert!(csv
            .lines()
            .nth(1)
            .unwrap()
            .ends_with("undefined,undefined,undefined,undefined"));
    }

    #[test]
    fn unknown_concept_is_a_config_error() {
        let s = Scenario::paper();
        let err = assess(
            &s,
            &ConceptRegistry::builtin(),
            Selection::All,
            &["balloon".into()],
        )
        .unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn short_run_reports_not_airborne() {
        let r = simulate(&Scenario::paper(), Selection::One(1), Some(0.1)).unwrap();
        assert_eq!(r[0].status, "not airborne");
        assert!(r[0].summary.is_none());
        assert!(render_simulations(&r, Format::Text)
            .unwrap()
            .contains("not airborne"));
    }
}
