//! Angle-of-attack dependent lift and drag coefficients.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Trim incidence of the default table's calibration anchor [rad].
pub const DEFAULT_TRIM: f64 = 0.24;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AeroSample {
    pub alpha_deg: f64,
    pub cl: f64,
    pub cd: f64,
}

/// Piecewise-linear coefficient table. Knots are kept in degrees so that a
/// table written to CSV and read back is bit-identical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<AeroSample>", into = "Vec<AeroSample>")]
pub struct AeroTable {
    samples: Vec<AeroSample>,
}

impl TryFrom<Vec<AeroSample>> for AeroTable {
    type Error = Error;

    fn try_from(samples: Vec<AeroSample>) -> Result<Self> {
        AeroTable::new(samples)
    }
}

impl From<AeroTable> for Vec<AeroSample> {
    fn from(t: AeroTable) -> Self {
        t.samples
    }
}

impl AeroTable {
    pub fn new(samples: Vec<AeroSample>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::Config(
                "aero table needs at least two samples".into(),
            ));
        }
        for w in samples.windows(2) {
            if !(w[1].alpha_deg > w[0].alpha_deg) {
                return Err(Error::Config(format!(
                    "aero table angles must increase strictly ({} then {})",
                    w[0].alpha_deg, w[1].alpha_deg
                )));
            }
        }
        if let Some(s) = samples
            .iter()
            .find(|s| !(s.cd > 0.0) || !s.cl.is_finite() || !s.cd.is_finite())
        {
            return Err(Error::Config(format!(
                "aero table needs finite coefficients and cd > 0 (alpha = {} deg)",
                s.alpha_deg
            )));
        }
        let (lo, hi) = (samples[0].alpha_deg, samples[samples.len() - 1].alpha_deg);
        if lo > -10.0 || hi < 25.0 {
            return Err(Error::Config(format!(
                "aero table must cover at least [-10, 25] deg, covers [{lo}, {hi}]"
            )));
        }
        Ok(Self { samples })
    }

    /// Finite wing with a Clark-Y section: zero lift at -4 deg, stall at
    /// 18 deg, parabolic drag polar. Lift 1.0 and drag 0.1 are pinned at
    /// the default trim incidence.
    pub fn clark_y() -> Self {
        let drag = |a: f64| 0.03 + 0.07 * ((a + 2.0) / 15.75).powi(2);
        let trim = DEFAULT_TRIM.to_degrees();
        let lift = [
            (-10.0, -0.40),
            (-6.0, -0.16),
            (-4.0, 0.0),
            (0.0, 0.30),
            (4.0, 0.60),
            (8.0, 0.80),
            (10.0, 0.89),
            (12.0, 0.95),
            (trim, 1.0),
            (15.0, 1.03),
            (16.0, 1.05),
            (18.0, 1.07),
            (20.0, 1.00),
            (22.0, 0.92),
            (25.0, 0.82),
        ];
        let samples = lift
            .iter()
            .map(|&(a, cl)| AeroSample {
                alpha_deg: a,
                cl,
                cd: if a == trim { 0.1 } else { drag(a) },
            })
            .collect();
        Self::new(samples).expect("built-in table is valid")
    }

    pub fn samples(&self) -> &[AeroSample] {
        &self.samples
    }

    /// Angle range covered by the table [rad].
    pub fn range(&self) -> (f64, f64) {
        (
            self.samples[0].alpha_deg.to_radians(),
            self.samples[self.samples.len() - 1].alpha_deg.to_radians(),
        )
    }

    /// Lift and drag coefficient at `alpha` [rad].
    pub fn coefficients(&self, alpha: f64) -> Result<(f64, f64)> {
        let a = alpha.to_degrees();
        let s = &self.samples;
        let (first, last) = (s[0].alpha_deg, s[s.len() - 1].alpha_deg);
        if !(a >= first && a <= last) {
            return Err(Error::OutOfEnvelope {
                alpha_deg: a,
                min_deg: first,
                max_deg: last,
            });
        }
        let i = s
            .partition_point(|p| p.alpha_deg <= a)
            .clamp(1, s.len() - 1);
        let (p, q) = (&s[i - 1], &s[i]);
        // degree/radian round trips can miss a knot by an ulp
        for k in [p, q] {
            if (a - k.alpha_deg).abs() <= 1e-12 * k.alpha_deg.abs().max(1.0) {
                return Ok((k.cl, k.cd));
            }
        }
        let t = (a - p.alpha_deg) / (q.alpha_deg - p.alpha_deg);
        Ok((p.cl + t * (q.cl - p.cl), p.cd + t * (q.cd - p.cd)))
    }

    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let headers = r.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["alpha_deg", "cl", "cd"] {
            return Err(Error::Config(format!(
                "aero table header must be 'alpha_deg,cl,cd', found '{}'",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let samples = r
            .deserialize()
            .collect::<std::result::Result<Vec<AeroSample>, _>>()?;
        Self::new(samples)
    }

    pub fn from_csv_path(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| {
            Error::Config(format!("cannot open aero table {}: {e}", path.display()))
        })?;
        Self::from_csv_reader(file)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for s in &self.samples {
            w.serialize(s)?;
        }
        w.flush()?;
        Ok(())
    }
}
