//! Serialized report formats. The JSON schema is stable:
//!
//! ```json
//! {
//!   "params": {"lambda": "rat:1/2", "eta": "rat:0/1", "theta": 1.823},
//!   "radius_sq": "441/4",
//!   "histogram": {"1": 1, "7": 3},
//!   "orbit_reps": [{"x": "-1", "y": "0", "period": 7, "symmetry_class": "doubly_symmetric"}],
//!   "unresolved": [],
//!   "counts": {...}, "bounds": {...},
//!   "empirical_c": "64/21",
//!   "meta": {"scanned_states": 349, "max_steps": 10000000}
//! }
//! ```
//!
//! Exact values are rendered in the coefficient-text grammar (rationals
//! as `p/q`), so re-parsing a report reproduces the in-memory census
//! exactly. The CSV carries the orbit representatives with the fixed
//! column contract `canonical_x,canonical_y,period,symmetry_class`.

use std::collections::BTreeMap;

use anyhow::{anyhow, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use discrot::census::{
    CensusBounds, CensusCounts, CensusReport, OrbitRecord, ScanMeta, UnresolvedRecord,
};
use discrot::dynamics::{LatticeState, RotationParams};
use discrot::exact::FieldElement;

pub fn rational_text(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_rational_text(s: &str) -> Result<BigRational> {
    let (n, d) = s
        .split_once('/')
        .ok_or_else(|| anyhow!("malformed rational `{s}`"))?;
    let n: BigInt = n.parse()?;
    let d: BigInt = d.parse()?;
    Ok(BigRational::new(n, d))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonParams {
    pub lambda: String,
    pub eta: String,
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonOrbitRep {
    pub x: String,
    pub y: String,
    pub period: u64,
    pub symmetry_class: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonUnresolved {
    pub x: String,
    pub y: String,
    pub steps_used: u64,
    pub max_norm_sq: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonCounts {
    pub fix_phi_seeds: u64,
    pub fix_g_seeds: u64,
    pub trap_points: u64,
    pub trap_points_mod_reflection: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonBounds {
    pub two_r_cos_half_theta: f64,
    pub r_plus_r_cos_half_theta: f64,
    pub two_floor_r_plus_1: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonMeta {
    pub scanned_states: u64,
    pub max_steps: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonReport {
    pub params: JsonParams,
    pub radius_sq: String,
    pub histogram: BTreeMap<u64, u64>,
    pub orbit_reps: Vec<JsonOrbitRep>,
    pub unresolved: Vec<JsonUnresolved>,
    pub counts: JsonCounts,
    pub bounds: JsonBounds,
    pub empirical_c: String,
    pub meta: JsonMeta,
}

impl JsonReport {
    pub fn from_census(report: &CensusReport) -> Self {
        Self {
            params: JsonParams {
                lambda: report.params.lambda().to_string(),
                eta: report.params.eta().to_string(),
                theta: report.params.theta(),
            },
            radius_sq: rational_text(&report.radius_sq),
            histogram: report.histogram.clone(),
            orbit_reps: report
                .orbit_reps
                .iter()
                .map(|r| JsonOrbitRep {
                    x: r.canonical.x.to_string(),
                    y: r.canonical.y.to_string(),
                    period: r.period,
                    symmetry_class: r.class.to_string(),
                })
                .collect(),
            unresolved: report
                .unresolved
                .iter()
                .map(|u| JsonUnresolved {
                    x: u.seed.x.to_string(),
                    y: u.seed.y.to_string(),
                    steps_used: u.steps_used,
                    max_norm_sq: u.max_norm_sq.to_string(),
                })
                .collect(),
            counts: JsonCounts {
                fix_phi_seeds: report.counts.fix_phi_seeds,
                fix_g_seeds: report.counts.fix_g_seeds,
                trap_points: report.counts.trap_points,
                trap_points_mod_reflection: report.counts.trap_points_mod_reflection,
            },
            bounds: JsonBounds {
                two_r_cos_half_theta: report.bounds.two_r_cos_half_theta,
                r_plus_r_cos_half_theta: report.bounds.r_plus_r_cos_half_theta,
                two_floor_r_plus_1: report.bounds.two_floor_r_plus_1,
            },
            empirical_c: rational_text(&report.empirical_c),
            meta: JsonMeta {
                scanned_states: report.meta.scanned_states,
                max_steps: report.meta.max_steps,
            },
        }
    }

    /// Rebuild the in-memory census from its serialized form.
    pub fn to_census(&self) -> Result<CensusReport> {
        let lambda: FieldElement = self
            .params
            .lambda
            .parse()
            .map_err(|e| anyhow!("lambda: {e}"))?;
        let eta: FieldElement = self.params.eta.parse().map_err(|e| anyhow!("eta: {e}"))?;
        let params = RotationParams::new(lambda, eta)?;
        let orbit_reps = self
            .orbit_reps
            .iter()
            .map(|r| {
                Ok(OrbitRecord {
                    canonical: LatticeState {
                        x: r.x.parse()?,
                        y: r.y.parse()?,
                    },
                    period: r.period,
                    class: r
                        .symmetry_class
                        .parse()
                        .map_err(|e| anyhow!("symmetry class: {e}"))?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let unresolved = self
            .unresolved
            .iter()
            .map(|u| {
                Ok(UnresolvedRecord {
                    seed: LatticeState {
                        x: u.x.parse()?,
                        y: u.y.parse()?,
                    },
                    steps_used: u.steps_used,
                    max_norm_sq: u
                        .max_norm_sq
                        .parse()
                        .map_err(|e| anyhow!("max_norm_sq: {e}"))?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CensusReport {
            params,
            radius_sq: parse_rational_text(&self.radius_sq)?,
            histogram: self.histogram.clone(),
            orbit_reps,
            unresolved,
            counts: CensusCounts {
                fix_phi_seeds: self.counts.fix_phi_seeds,
                fix_g_seeds: self.counts.fix_g_seeds,
                trap_points: self.counts.trap_points,
                trap_points_mod_reflection: self.counts.trap_points_mod_reflection,
            },
            bounds: CensusBounds {
                two_r_cos_half_theta: self.bounds.two_r_cos_half_theta,
                r_plus_r_cos_half_theta: self.bounds.r_plus_r_cos_half_theta,
                two_floor_r_plus_1: self.bounds.two_floor_r_plus_1,
            },
            empirical_c: parse_rational_text(&self.empirical_c)?,
            meta: ScanMeta {
                scanned_states: self.meta.scanned_states,
                max_steps: self.meta.max_steps,
            },
        })
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Column contract: `canonical_x,canonical_y,period,symmetry_class`.
pub fn orbit_reps_csv(reps: &[OrbitRecord]) -> String {
    let mut out = String::from("canonical_x,canonical_y,period,symmetry_class\n");
    for r in reps {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.canonical.x, r.canonical.y, r.period, r.class
        ));
    }
    out
}
