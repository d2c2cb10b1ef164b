//! CSV result files. Headers are part of the output schema and pinned by tests.

use hwnrisk_core::actuarial::SurplusPath;
use hwnrisk_core::geometry::PointPattern;

use crate::assess::AssessmentReport;
use crate::error::{HarnessError, Result};
use crate::sweep::SweepRow;

pub const OUTAGE_HEADER: [&str; 6] = ["zeta_j", "alpha_j", "outage", "ci_halfwidth", "trials", "seed"];
pub const RUIN_HEADER: [&str; 6] = ["premium_rate", "lambda", "ruin", "ci_halfwidth", "paths", "seed"];
pub const SWEEP_HEADER: [&str; 15] = [
    "axis",
    "value",
    "zeta_j",
    "alpha_j",
    "tau_db",
    "premium_rate",
    "outage",
    "outage_ci_halfwidth",
    "trials",
    "outage_seed",
    "lambda",
    "ruin",
    "ruin_ci_halfwidth",
    "paths",
    "seed",
];
pub const ASSESSMENT_HEADER: [&str; 14] = [
    "outage",
    "outage_ci_halfwidth",
    "trials",
    "forced_outage",
    "users",
    "lambda",
    "premium_rate",
    "ruin",
    "ruin_ci_halfwidth",
    "paths",
    "calibrated_premium_rate",
    "config_digest",
    "seed",
    "tool_version",
];
pub const CALIBRATION_HEADER: [&str; 8] = [
    "target_ruin",
    "premium_rate",
    "aggregate_premium",
    "ruin_at_premium",
    "lower_premium_rate",
    "ruin_at_lower",
    "lambda",
    "paths",
];
pub const PATTERN_HEADER: [&str; 2] = ["x", "y"];
pub const PATH_HEADER: [&str; 2] = ["t", "reserve"];

/// Rows of already formatted fields.
pub type Table = Vec<Vec<String>>;

fn f(v: f64) -> String {
    v.to_string()
}

/// CSV bytes for `header` and `rows`, newline terminated.
pub fn encode_csv(header: &[&str], rows: &Table) -> Result<Vec<u8>> {
    let err = |e: &dyn std::fmt::Display| HarnessError::Csv(e.to_string());
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header).map_err(|e| err(&e))?;
    for r in rows {
        w.write_record(r).map_err(|e| err(&e))?;
    }
    w.into_inner().map_err(|e| err(&e))
}

pub fn outage_rows(rows: &[SweepRow]) -> Table {
    rows.iter()
        .map(|r| {
            vec![
                f(r.zeta_j),
                f(r.alpha_j),
                f(r.outage.probability),
                f(r.outage.ci_halfwidth),
                r.outage.trials.to_string(),
                r.seed.to_string(),
            ]
        })
        .collect()
}

pub fn ruin_rows(rows: &[SweepRow]) -> Table {
    rows.iter()
        .map(|r| {
            vec![
                f(r.premium_rate),
                f(r.lambda),
                f(r.ruin),
                f(r.ruin_ci_halfwidth),
                r.paths.to_string(),
                r.seed.to_string(),
            ]
        })
        .collect()
}

pub fn sweep_rows(rows: &[SweepRow]) -> Table {
    rows.iter()
        .map(|r| {
            vec![
                r.axis.name().to_string(),
                f(r.value),
                f(r.zeta_j),
                f(r.alpha_j),
                f(r.tau_db),
                f(r.premium_rate),
                f(r.outage.probability),
                f(r.outage.ci_halfwidth),
                r.outage.trials.to_string(),
                r.outage.seed.to_string(),
                f(r.lambda),
                f(r.ruin),
                f(r.ruin_ci_halfwidth),
                r.paths.to_string(),
                r.seed.to_string(),
            ]
        })
        .collect()
}

pub fn assessment_rows(r: &AssessmentReport) -> Table {
    vec![vec![
        f(r.outage.probability),
        f(r.outage.ci_halfwidth),
        r.outage.trials.to_string(),
        r.outage.forced.to_string(),
        r.users.to_string(),
        f(r.claim_intensity),
        f(r.premium_rate),
        f(r.ruin.probability),
        f(r.ruin.ci_halfwidth),
        r.ruin.paths.to_string(),
        r.calibration.map_or(String::new(), |c| f(c.premium_rate)),
        r.config_digest.clone(),
        r.seed.to_string(),
        r.tool_version.clone(),
    ]]
}

pub fn calibration_rows(r: &AssessmentReport) -> Table {
    r.calibration
        .iter()
        .map(|c| {
            vec![
                f(c.target_ruin),
                f(c.premium_rate),
                f(c.aggregate_premium),
                f(c.ruin_at_premium),
                f(c.lower_premium_rate),
                f(c.ruin_at_lower),
                f(r.claim_intensity),
                r.ruin.paths.to_string(),
            ]
        })
        .collect()
}

pub fn pattern_rows(p: &PointPattern) -> Table {
    p.points.iter().map(|q| vec![f(q.x), f(q.y)]).collect()
}

pub fn path_rows(p: &SurplusPath) -> Table {
    p.events().into_iter().map(|(t, r)| vec![f(t), f(r)]).collect()
}
