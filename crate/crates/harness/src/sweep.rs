//! One-parameter sweeps over a scenario.
//!
//! Every row is what [`assess`](crate::assess::assess) would report for the
//! scenario with the swept parameter replaced, and all rows share their
//! random numbers: jammer densities through the reference-density coupling,
//! premiums and thresholds because they do not enter the sampling at all.

use std::fmt;
use std::str::FromStr;

use hwnrisk_core::hwn::JammerConfig;
use serde::{Deserialize, Serialize};

use crate::assess::{
    jammer_coordinates, report_from_outage, scenario_outage, scenario_outage_over_jammers, AssessOptions, OutageSummary,
};
use crate::config::ScenarioConfig;
use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    ZetaJ,
    AlphaJ,
    PremiumRate,
    Tau,
}

impl Axis {
    pub const ALL: [Axis; 4] = [Axis::ZetaJ, Axis::AlphaJ, Axis::PremiumRate, Axis::Tau];

    pub fn name(self) -> &'static str {
        match self {
            Axis::ZetaJ => "zeta_j",
            Axis::AlphaJ => "alpha_j",
            Axis::PremiumRate => "premium_rate",
            Axis::Tau => "tau",
        }
    }

    /// Values listed for this axis in the scenario's sweep block.
    pub fn configured_values(self, config: &ScenarioConfig) -> Option<Vec<f64>> {
        let s = config.sweep.as_ref()?;
        match self {
            Axis::ZetaJ => s.zeta_j.clone(),
            Axis::AlphaJ => s.alpha_j.clone(),
            Axis::PremiumRate => s.premium_rate.clone(),
            Axis::Tau => s.tau_db.clone(),
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Axis {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zeta_j" => Ok(Axis::ZetaJ),
            "alpha_j" => Ok(Axis::AlphaJ),
            "premium_rate" => Ok(Axis::PremiumRate),
            "tau" | "tau_db" => Ok(Axis::Tau),
            other => Err(HarnessError::Config {
                field: "axis".into(),
                reason: format!("unknown axis `{other}`, expected one of zeta_j, alpha_j, premium_rate, tau"),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub axis: Axis,
    pub value: f64,
    pub zeta_j: f64,
    pub alpha_j: f64,
    pub tau_db: f64,
    /// Per user.
    pub premium_rate: f64,
    pub outage: OutageSummary,
    pub lambda: f64,
    pub ruin: f64,
    pub ruin_ci_halfwidth: f64,
    pub paths: u64,
    pub ruin_seed: u64,
    pub seed: u64,
}

/// Scenario with the swept parameter set to `value`.
pub fn apply(config: &ScenarioConfig, axis: Axis, value: f64) -> Result<ScenarioConfig> {
    let mut c = config.clone();
    match axis {
        Axis::ZetaJ => jammers_mut(&mut c)?.density = value,
        Axis::AlphaJ => jammers_mut(&mut c)?.alpha = Some(value),
        Axis::PremiumRate => c.insurance.premium_rate = value,
        Axis::Tau => c.network.sinr_threshold_db = value,
    }
    // Values are checked by the scenario validation with their own paths.
    c.sweep = None;
    c.validate().map_err(|e| match e {
        HarnessError::Config { field, reason } => HarnessError::Config {
            field: format!("sweep.{axis} ({field})"),
            reason: format!("value {value}: {reason}"),
        },
        other => other,
    })?;
    Ok(c)
}

fn jammers_mut(c: &mut ScenarioConfig) -> Result<&mut crate::config::TransmitterSection> {
    c.network.jammers.as_mut().ok_or_else(|| HarnessError::Config {
        field: "network.jammers".into(),
        reason: "a jammer sweep needs a jammer block".into(),
    })
}

fn row(config: &ScenarioConfig, axis: Axis, value: f64, outage: OutageSummary) -> Result<SweepRow> {
    let report = report_from_outage(config, outage, AssessOptions::default())?;
    let (zeta_j, alpha_j) = jammer_coordinates(&config.network_config()?);
    Ok(SweepRow {
        axis,
        value,
        zeta_j,
        alpha_j,
        tau_db: config.network.sinr_threshold_db,
        premium_rate: config.insurance.premium_rate,
        outage,
        lambda: report.claim_intensity,
        ruin: report.ruin.probability,
        ruin_ci_halfwidth: report.ruin.ci_halfwidth,
        paths: report.ruin.paths,
        ruin_seed: report.ruin.seed,
        seed: config.simulation.seed,
    })
}

/// Runs the sweep, one row per value in the given order.
pub fn sweep(config: &ScenarioConfig, axis: Axis, values: &[f64]) -> Result<Vec<SweepRow>> {
    config.validate()?;
    if values.is_empty() {
        return Err(HarnessError::Config {
            field: format!("sweep.{axis}"),
            reason: "no values to sweep".into(),
        });
    }
    let configs = values
        .iter()
        .map(|&v| apply(config, axis, v))
        .collect::<Result<Vec<_>>>()?;
    let network = config.network_config()?;
    let outages: Vec<OutageSummary> = match axis {
        Axis::ZetaJ | Axis::AlphaJ => {
            let jammers: Vec<JammerConfig> = configs
                .iter()
                .map(|c| Ok(c.network_config()?.jammers.expect("jammer block checked")))
                .collect::<Result<_>>()?;
            scenario_outage_over_jammers(config, &network, &jammers)?
                .iter()
                .map(OutageSummary::simulated)
                .collect()
        }
        Axis::PremiumRate => {
            let o = OutageSummary::simulated(&scenario_outage(config, &network)?);
            vec![o; values.len()]
        }
        Axis::Tau => configs
            .iter()
            .map(|c| Ok(OutageSummary::simulated(&scenario_outage(c, &c.network_config()?)?)))
            .collect::<Result<_>>()?,
    };
    configs
        .iter()
        .zip(values)
        .zip(outages)
        .map(|((c, &v), o)| row(c, axis, v, o))
        .collect()
}
