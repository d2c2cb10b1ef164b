//! Network outage to insurer ruin.

use hwnrisk_core::actuarial::{calibrate_premium, ruin_probability, CalibrationSettings, RuinEstimate};
use hwnrisk_core::hwn::{
    conditional_outage, conditional_outage_sweep, estimate_outage, estimate_outage_jammer_sweep_from, JammerConfig,
    NetworkConfig, OutageEstimate,
};
use hwnrisk_core::seed::child_seed;
use serde::Serialize;

use crate::config::{alpha_of, OutageMethodChoice, ScenarioConfig};
use crate::error::{HarnessError, Result};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Seed of the outage stage under a master seed.
pub fn outage_seed(master: u64) -> u64 {
    child_seed(master, "outage", 0)
}

/// Seed of the ruin and calibration stages under a master seed.
pub fn ruin_seed(master: u64) -> u64 {
    child_seed(master, "ruin", 0)
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct AssessOptions {
    /// Use this outage probability instead of simulating the network.
    pub forced_outage: Option<f64>,
    /// Run premium calibration when the scenario has a calibration block.
    pub calibrate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OutageSummary {
    pub probability: f64,
    pub ci_halfwidth: f64,
    pub trials: u64,
    pub seed: u64,
    pub forced: bool,
}

impl OutageSummary {
    pub(crate) fn simulated(e: &OutageEstimate) -> Self {
        Self {
            probability: e.probability,
            ci_halfwidth: e.half_width,
            trials: e.trials,
            seed: e.seed,
            forced: false,
        }
    }

    fn forced(p: f64) -> Self {
        Self {
            probability: p,
            ci_halfwidth: 0.0,
            trials: 0,
            seed: 0,
            forced: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RuinSummary {
    pub probability: f64,
    pub ci_halfwidth: f64,
    pub paths: u64,
    pub seed: u64,
}

impl From<RuinEstimate> for RuinSummary {
    fn from(e: RuinEstimate) -> Self {
        Self {
            probability: e.probability,
            ci_halfwidth: e.half_width,
            paths: e.paths,
            seed: e.seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CalibrationSummary {
    pub target_ruin: f64,
    /// Per user.
    pub premium_rate: f64,
    pub aggregate_premium: f64,
    pub ruin_at_premium: f64,
    pub lower_premium_rate: f64,
    pub ruin_at_lower: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssessmentReport {
    pub outage: OutageSummary,
    pub users: u64,
    /// Claims per time unit, outage probability times users.
    pub claim_intensity: f64,
    /// Per user.
    pub premium_rate: f64,
    pub aggregate_premium: f64,
    pub ruin: RuinSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub calibration: Option<CalibrationSummary>,
    pub config_digest: String,
    pub seed: u64,
    pub tool_version: String,
}

/// Outage of the scenario's network with the configured estimator.
///
/// Jammer fields are always drawn at the scenario's reference density and
/// spread out to the requested one, so scenarios that differ only in jammer
/// density share their random numbers.
pub fn scenario_outage(config: &ScenarioConfig, network: &NetworkConfig) -> Result<OutageEstimate> {
    let sim = &config.simulation;
    let seed = outage_seed(sim.seed);
    let estimate = match (sim.outage_method, network.jammers) {
        (OutageMethodChoice::Conditional, _) => conditional_outage(network, sim.trials, seed)?,
        (OutageMethodChoice::Indicator, None) => estimate_outage(network, sim.trials, seed)?,
        (OutageMethodChoice::Indicator, Some(j)) => estimate_outage_jammer_sweep_from(
            network,
            config.network.jammer_reference_density,
            &[j.spec.density],
            sim.trials,
            seed,
        )?[0],
    };
    Ok(estimate)
}

/// Outages of the scenario's network with each jammer field in turn, on
/// common tier samples. Equal entry by entry to [`scenario_outage`] with the
/// jammer field replaced.
pub fn scenario_outage_over_jammers(
    config: &ScenarioConfig,
    network: &NetworkConfig,
    jammers: &[JammerConfig],
) -> Result<Vec<OutageEstimate>> {
    let sim = &config.simulation;
    let seed = outage_seed(sim.seed);
    match sim.outage_method {
        OutageMethodChoice::Conditional => {
            let list: Vec<Option<JammerConfig>> = jammers.iter().copied().map(Some).collect();
            Ok(conditional_outage_sweep(network, &list, sim.trials, seed)?)
        }
        OutageMethodChoice::Indicator => {
            // Densities can share one call only when the process is fixed.
            let same_process = jammers.windows(2).all(|w| {
                w[0].spec.process == w[1].spec.process
                    && w[0].power_mw == w[1].power_mw
                    && w[0].pathloss_exponent == w[1].pathloss_exponent
            });
            if same_process && !jammers.is_empty() {
                let mut net = network.clone();
                net.jammers = Some(jammers[0]);
                let densities: Vec<f64> = jammers.iter().map(|j| j.spec.density).collect();
                return Ok(estimate_outage_jammer_sweep_from(
                    &net,
                    config.network.jammer_reference_density,
                    &densities,
                    sim.trials,
                    seed,
                )?);
            }
            jammers
                .iter()
                .map(|j| {
                    let mut net = network.clone();
                    net.jammers = Some(*j);
                    scenario_outage(config, &net)
                })
                .collect()
        }
    }
}

/// Report for a given outage estimate: claim intensity, ruin and optionally
/// the calibrated premium.
pub fn report_from_outage(
    config: &ScenarioConfig,
    outage: OutageSummary,
    options: AssessOptions,
) -> Result<AssessmentReport> {
    let users = config.network.users;
    let lambda = outage.probability * users as f64;
    let insurance = config.insurance_config(lambda);
    let seed = ruin_seed(config.simulation.seed);
    let ruin = ruin_probability(&insurance, config.simulation.paths, seed)?;
    let calibration = match (&config.calibration, options.calibrate) {
        (Some(cal), true) => {
            let scale = users as f64;
            let c = calibrate_premium(
                &insurance,
                cal.target_ruin,
                CalibrationSettings {
                    paths: config.simulation.paths,
                    seed,
                    resolution: cal.resolution * scale,
                    max_premium: cal.max_premium_rate * scale,
                },
            )?;
            Some(CalibrationSummary {
                target_ruin: cal.target_ruin,
                premium_rate: c.premium_rate / scale,
                aggregate_premium: c.premium_rate,
                ruin_at_premium: c.ruin_at_premium,
                lower_premium_rate: c.lower_premium / scale,
                ruin_at_lower: c.ruin_at_lower,
            })
        }
        _ => None,
    };
    Ok(AssessmentReport {
        outage,
        users,
        claim_intensity: lambda,
        premium_rate: config.insurance.premium_rate,
        aggregate_premium: insurance.premium_rate,
        ruin: ruin.into(),
        calibration,
        config_digest: config.digest(),
        seed: config.simulation.seed,
        tool_version: TOOL_VERSION.to_string(),
    })
}

/// Outage estimate, then ruin at `λ = p̂ U`, then (optionally) calibration.
pub fn assess(config: &ScenarioConfig, options: AssessOptions) -> Result<AssessmentReport> {
    config.validate()?;
    let outage = match options.forced_outage {
        Some(p) => {
            if !(0.0..=1.0).contains(&p) {
                return Err(HarnessError::Config {
                    field: "forced_outage".into(),
                    reason: format!("must lie in [0, 1], got {p}"),
                });
            }
            OutageSummary::forced(p)
        }
        None => OutageSummary::simulated(&scenario_outage(config, &config.network_config()?)?),
    };
    report_from_outage(config, outage, options)
}

/// `(zeta_j, alpha_j)` describing the scenario's jammer field; zeros without
/// jammers.
pub fn jammer_coordinates(network: &NetworkConfig) -> (f64, f64) {
    network
        .jammers
        .map_or((0.0, 0.0), |j| (j.spec.density, alpha_of(j.spec.process)))
}
