//! Scenario configuration files.
//!
//! A scenario is a JSON document. Every field except the jammer block has a
//! default taken from the reference two-tier scenario, so `{}` is a valid
//! (jammer-free) scenario. Unknown fields are rejected.

use std::fs;
use std::path::Path;

use hwnrisk_core::actuarial::{ClaimDistribution, InsuranceConfig};
use hwnrisk_core::geometry::{Process, ProcessSpec, SamplerLimits, Window};
use hwnrisk_core::hwn::{NetworkConfig, Transmitters};
use hwnrisk_core::{db_to_linear, dbm_to_mw};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{HarnessError, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub schema_version: u32,
    pub network: NetworkSection,
    pub insurance: InsuranceSection,
    pub simulation: SimulationSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub calibration: Option<CalibrationSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
}

/// One tier of base stations or the jammer field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransmitterSection {
    pub power_dbm: f64,
    pub pathloss_exponent: f64,
    /// Points per unit area.
    pub density: f64,
    /// Repulsion in (0, 1]. Absent or 0 selects the Poisson process.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkSection {
    pub tiers: Vec<TransmitterSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jammers: Option<TransmitterSection>,
    pub reuse_factor: f64,
    /// Noise power; absent means interference-limited.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise_dbm: Option<f64>,
    pub sinr_threshold_db: f64,
    pub window_radius: f64,
    /// Insured users; the claim intensity is outage probability times users.
    pub users: u64,
    pub max_matrix_dim: usize,
    /// Jammer patterns are drawn at this density and spread out to lower
    /// ones, which couples runs at different jammer densities.
    pub jammer_reference_density: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClaimsSection {
    Deterministic { amount: f64 },
    Exponential { mean: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InsuranceSection {
    pub initial_reserve: f64,
    /// Premium per user per time unit.
    pub premium_rate: f64,
    pub horizon: f64,
    pub claims: ClaimsSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutageMethodChoice {
    /// Fraction of trials in outage.
    Indicator,
    /// Fading and jammers averaged analytically per tier sample.
    Conditional,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationSection {
    pub seed: u64,
    pub trials: u64,
    pub paths: u64,
    pub outage_method: OutageMethodChoice,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CalibrationSection {
    pub target_ruin: f64,
    /// Per-user premium resolution.
    pub resolution: f64,
    /// Per-user premium upper bound of the search.
    pub max_premium_rate: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zeta_j: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_j: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub premium_rate: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_db: Option<Vec<f64>>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            network: NetworkSection::default(),
            insurance: InsuranceSection::default(),
            simulation: SimulationSection::default(),
            calibration: None,
            sweep: None,
        }
    }
}

impl Default for NetworkSection {
    fn default() -> Self {
        Self {
            tiers: vec![
                TransmitterSection {
                    power_dbm: 40.0,
                    pathloss_exponent: 3.5,
                    density: 0.002,
                    alpha: Some(0.5),
                },
                TransmitterSection {
                    power_dbm: 33.0,
                    pathloss_exponent: 4.0,
                    density: 0.01,
                    alpha: Some(0.5),
                },
            ],
            jammers: None,
            reuse_factor: 1.0,
            noise_dbm: None,
            sinr_threshold_db: -20.0,
            window_radius: 40.0,
            users: 1000,
            max_matrix_dim: SamplerLimits::default().max_matrix_dim,
            jammer_reference_density: 0.01,
        }
    }
}

impl Default for ClaimsSection {
    fn default() -> Self {
        Self::Deterministic { amount: 0.5 }
    }
}

impl Default for InsuranceSection {
    fn default() -> Self {
        Self {
            initial_reserve: 1.0,
            premium_rate: 0.1,
            horizon: 10.0,
            claims: ClaimsSection::default(),
        }
    }
}

impl Default for SimulationSection {
    fn default() -> Self {
        Self {
            seed: 20_240_601,
            trials: 2000,
            paths: 10_000,
            outage_method: OutageMethodChoice::Indicator,
        }
    }
}

impl Default for CalibrationSection {
    fn default() -> Self {
        Self {
            target_ruin: 0.01,
            resolution: 1e-4,
            max_premium_rate: 1.0,
        }
    }
}

/// Jammer density grid of the reference scenario.
pub fn preset_jammer_densities() -> Vec<f64> {
    (0..=10).map(|i| f64::from(10 + 99 * i) / 1e5).collect()
}

impl ScenarioConfig {
    /// The reference scenario, including its jammer field and sweep axes.
    pub fn preset() -> Self {
        let mut c = Self::default();
        c.network.jammers = Some(TransmitterSection {
            power_dbm: 30.0,
            pathloss_exponent: 4.0,
            density: 0.005,
            alpha: Some(1.0),
        });
        c.calibration = Some(CalibrationSection::default());
        c.sweep = Some(SweepSection {
            zeta_j: Some(preset_jammer_densities()),
            alpha_j: Some(vec![0.0, 0.5, 1.0]),
            premium_rate: Some(vec![0.02, 0.03, 0.04, 0.05, 0.06, 0.08, 0.1, 0.15, 0.2]),
            tau_db: Some(vec![-30.0, -25.0, -20.0, -15.0, -10.0]),
        });
        c
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text).map_err(|e| HarnessError::Parse(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_json(&text).map_err(|e| match e {
            HarnessError::Parse(m) => HarnessError::Parse(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Canonical JSON: keys sorted, no whitespace, defaults filled in.
    pub fn canonical_json(&self) -> String {
        // serde_json::Value keeps object keys in sorted order.
        let value = serde_json::to_value(self).expect("config serializes");
        serde_json::to_string(&value).expect("value serializes")
    }

    /// SHA-256 of the canonical JSON, hex encoded.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_json().as_bytes()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(field(
                "schema_version",
                format!("unsupported version {}, expected {SCHEMA_VERSION}", self.schema_version),
            ));
        }
        let n = &self.network;
        if n.tiers.is_empty() {
            return Err(field("network.tiers", "at least one tier is required"));
        }
        for (i, t) in n.tiers.iter().enumerate() {
            validate_transmitter(&format!("network.tiers[{i}]"), t)?;
        }
        if let Some(j) = &n.jammers {
            validate_transmitter("network.jammers", j)?;
            if j.density > n.jammer_reference_density {
                return Err(field(
                    "network.jammer_reference_density",
                    format!("must be at least the jammer density {}", j.density),
                ));
            }
        }
        if !(n.reuse_factor > 0.0 && n.reuse_factor <= 1.0) {
            return Err(field(
                "network.reuse_factor",
                format!("must lie in (0, 1], got {}", n.reuse_factor),
            ));
        }
        if let Some(noise) = n.noise_dbm {
            finite("network.noise_dbm", noise)?;
        }
        finite("network.sinr_threshold_db", n.sinr_threshold_db)?;
        positive("network.window_radius", n.window_radius)?;
        if n.users == 0 {
            return Err(field("network.users", "must be at least 1"));
        }
        if n.max_matrix_dim == 0 {
            return Err(field("network.max_matrix_dim", "must be at least 1"));
        }
        nonnegative("network.jammer_reference_density", n.jammer_reference_density)?;

        let ins = &self.insurance;
        nonnegative("insurance.initial_reserve", ins.initial_reserve)?;
        nonnegative("insurance.premium_rate", ins.premium_rate)?;
        positive("insurance.horizon", ins.horizon)?;
        match ins.claims {
            ClaimsSection::Deterministic { amount } => positive("insurance.claims.amount", amount)?,
            ClaimsSection::Exponential { mean } => positive("insurance.claims.mean", mean)?,
        }

        let sim = &self.simulation;
        if sim.trials == 0 {
            return Err(field("simulation.trials", "must be at least 1"));
        }
        if sim.paths < 2 {
            return Err(field("simulation.paths", "must be at least 2"));
        }

        if let Some(cal) = &self.calibration {
            if !(cal.target_ruin > 0.0 && cal.target_ruin < 1.0) {
                return Err(field("calibration.target_ruin", "must lie in (0, 1)"));
            }
            positive("calibration.resolution", cal.resolution)?;
            positive("calibration.max_premium_rate", cal.max_premium_rate)?;
        }

        if let Some(s) = &self.sweep {
            let reference = n.jammer_reference_density;
            sweep_list("sweep.zeta_j", s.zeta_j.as_deref(), |v| v >= 0.0 && v <= reference)?;
            sweep_list("sweep.alpha_j", s.alpha_j.as_deref(), |v| (0.0..=1.0).contains(&v))?;
            sweep_list("sweep.premium_rate", s.premium_rate.as_deref(), |v| v >= 0.0)?;
            sweep_list("sweep.tau_db", s.tau_db.as_deref(), |_| true)?;
        }
        // The core model performs its own checks; anything it still rejects
        // is reported against the network block.
        self.network_config().map(|_| ())
    }

    /// The network model described by this scenario.
    pub fn network_config(&self) -> Result<NetworkConfig> {
        let n = &self.network;
        let window = Window::new(n.window_radius).map_err(|e| core_field("network.window_radius", e))?;
        let tiers = n
            .tiers
            .iter()
            .enumerate()
            .map(|(i, t)| transmitter(t).map_err(|e| core_field(&format!("network.tiers[{i}]"), e)))
            .collect::<Result<Vec<_>>>()?;
        let mut config = NetworkConfig::new(tiers, window);
        config.jammers = n
            .jammers
            .as_ref()
            .map(|j| transmitter(j).map_err(|e| core_field("network.jammers", e)))
            .transpose()?;
        config.reuse_factor = n.reuse_factor;
        config.noise_mw = n.noise_dbm.map_or(0.0, dbm_to_mw);
        config.sinr_threshold = db_to_linear(n.sinr_threshold_db);
        config.user_count = n.users;
        config.limits = SamplerLimits {
            max_matrix_dim: n.max_matrix_dim,
        };
        config.validate().map_err(|e| core_field("network", e))?;
        Ok(config)
    }

    /// Aggregate premium income per time unit.
    pub fn aggregate_premium(&self) -> f64 {
        self.insurance.premium_rate * self.network.users as f64
    }

    /// The insurer model at claim intensity `lambda`.
    pub fn insurance_config(&self, lambda: f64) -> InsuranceConfig {
        let ins = &self.insurance;
        InsuranceConfig {
            initial_reserve: ins.initial_reserve,
            premium_rate: self.aggregate_premium(),
            claim_intensity: lambda,
            claims: match ins.claims {
                ClaimsSection::Deterministic { amount } => ClaimDistribution::Deterministic(amount),
                ClaimsSection::Exponential { mean } => ClaimDistribution::Exponential { mean },
            },
            horizon: ins.horizon,
        }
    }
}

/// `None` and 0 select the Poisson process.
pub fn process_from_alpha(alpha: Option<f64>) -> std::result::Result<Process, hwnrisk_core::Error> {
    match alpha {
        None | Some(0.0) => Ok(Process::Poisson),
        Some(a) => Process::alpha_ginibre(a),
    }
}

/// Inverse of [`process_from_alpha`] for reporting.
pub fn alpha_of(process: Process) -> f64 {
    match process {
        Process::Poisson => 0.0,
        Process::AlphaGinibre { alpha } => alpha,
    }
}

fn transmitter(t: &TransmitterSection) -> std::result::Result<Transmitters, hwnrisk_core::Error> {
    let spec = ProcessSpec {
        density: t.density,
        process: process_from_alpha(t.alpha)?,
    };
    spec.validate()?;
    Transmitters::from_dbm(t.power_dbm, spec, t.pathloss_exponent)
}

fn validate_transmitter(path: &str, t: &TransmitterSection) -> Result<()> {
    finite(&format!("{path}.power_dbm"), t.power_dbm)?;
    if !(t.pathloss_exponent > 2.0 && t.pathloss_exponent.is_finite()) {
        return Err(field(
            &format!("{path}.pathloss_exponent"),
            format!("must exceed 2, got {}", t.pathloss_exponent),
        ));
    }
    nonnegative(&format!("{path}.density"), t.density)?;
    if let Some(a) = t.alpha {
        if !(0.0..=1.0).contains(&a) {
            return Err(field(&format!("{path}.alpha"), format!("must lie in [0, 1], got {a}")));
        }
    }
    Ok(())
}

fn field(path: &str, reason: impl Into<String>) -> HarnessError {
    HarnessError::Config {
        field: path.to_string(),
        reason: reason.into(),
    }
}

fn core_field(path: &str, e: hwnrisk_core::Error) -> HarnessError {
    match e {
        hwnrisk_core::Error::InvalidParameter { name, reason } => field(&format!("{path}.{name}"), reason),
        other => field(path, other.to_string()),
    }
}

fn finite(path: &str, v: f64) -> Result<()> {
    if !v.is_finite() {
        return Err(field(path, format!("must be finite, got {v}")));
    }
    Ok(())
}

fn positive(path: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(field(path, format!("must be positive and finite, got {v}")));
    }
    Ok(())
}

fn nonnegative(path: &str, v: f64) -> Result<()> {
    if !(v >= 0.0 && v.is_finite()) {
        return Err(field(path, format!("must be finite and >= 0, got {v}")));
    }
    Ok(())
}

fn sweep_list(path: &str, values: Option<&[f64]>, ok: impl Fn(f64) -> bool) -> Result<()> {
    let Some(values) = values else {
        return Ok(());
    };
    if values.is_empty() {
        return Err(field(path, "must not be empty when present"));
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite() || !ok(**v)) {
        return Err(field(path, format!("value {v} is out of range")));
    }
    Ok(())
}
