//! K-tier heterogeneous network with jammers, seen from a typical user at the
//! origin of the observation window.
//!
//! Every tier is a stationary point process of base stations. The user is
//! served by the base station with the largest average received power
//! `P_k r^(-μ_k)`; all other base stations are co-channel with probability `ξ`
//! (frequency reuse), and every jammer always transmits. Channels combine
//! path loss with unit-mean Rayleigh block fading, so received powers carry an
//! independent `Exp(1)` factor. A trial is in outage when its SINR falls below
//! the threshold or when no base station exists in the window.

mod conditional;
mod coupled;
pub mod oracle;

use alloc::format;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::{invalid, Error, Result};
use crate::geometry::{self, PointPattern, Process, ProcessSpec, SamplerLimits, Window};
use crate::math::{bernoulli_half_width, dbm_to_mw, pow};
use crate::seed;

pub use conditional::{conditional_outage, conditional_outage_sweep, jammer_laplace};
pub use coupled::{estimate_outage_jammer_sweep, estimate_outage_jammer_sweep_from};

/// A class of transmitters sharing power, spatial law and path loss: either a
/// base-station tier or the jammer field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transmitters {
    pub power_mw: f64,
    pub spec: ProcessSpec,
    pub pathloss_exponent: f64,
}

pub type TierConfig = Transmitters;
pub type JammerConfig = Transmitters;

impl Transmitters {
    pub fn new(power_mw: f64, spec: ProcessSpec, pathloss_exponent: f64) -> Result<Self> {
        let t = Self {
            power_mw,
            spec,
            pathloss_exponent,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn from_dbm(power_dbm: f64, spec: ProcessSpec, pathloss_exponent: f64) -> Result<Self> {
        if !power_dbm.is_finite() {
            return Err(invalid("transmit_power", format!("must be finite, got {power_dbm}")));
        }
        Self::new(dbm_to_mw(power_dbm), spec, pathloss_exponent)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.power_mw > 0.0 && self.power_mw.is_finite()) {
            return Err(invalid(
                "transmit_power",
                format!("must be positive and finite, got {} mW", self.power_mw),
            ));
        }
        if !(self.pathloss_exponent > 2.0 && self.pathloss_exponent.is_finite()) {
            return Err(invalid(
                "pathloss_exponent",
                format!("must exceed 2, got {}", self.pathloss_exponent),
            ));
        }
        self.spec.validate()
    }

    /// Average received power at distance `d`.
    pub fn mean_power(&self, d: f64) -> f64 {
        self.power_mw * pow(d, -self.pathloss_exponent)
    }

    pub fn with_density(&self, density: f64) -> Self {
        Self {
            spec: ProcessSpec { density, ..self.spec },
            ..*self
        }
    }

    pub fn with_process(&self, process: Process) -> Self {
        Self {
            spec: ProcessSpec { process, ..self.spec },
            ..*self
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkConfig {
    pub tiers: Vec<TierConfig>,
    pub jammers: Option<JammerConfig>,
    /// Probability `ξ ∈ (0, 1]` that a non-serving base station shares the channel.
    pub reuse_factor: f64,
    /// Noise power in mW; zero means interference-limited.
    pub noise_mw: f64,
    /// Linear SINR threshold `τ`.
    pub sinr_threshold: f64,
    pub window: Window,
    pub user_count: u64,
    pub limits: SamplerLimits,
}

impl NetworkConfig {
    /// Interference-limited network with full reuse and a single user.
    pub fn new(tiers: Vec<TierConfig>, window: Window) -> Self {
        Self {
            tiers,
            jammers: None,
            reuse_factor: 1.0,
            noise_mw: 0.0,
            sinr_threshold: 1.0,
            window,
            user_count: 1,
            limits: SamplerLimits::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.tiers.is_empty() {
            return Err(invalid("tiers", "at least one tier is required"));
        }
        for tier in &self.tiers {
            tier.validate()?;
        }
        if let Some(j) = &self.jammers {
            j.validate()?;
        }
        if !(self.reuse_factor > 0.0 && self.reuse_factor <= 1.0) {
            return Err(invalid(
                "reuse_factor",
                format!("must lie in (0, 1], got {}", self.reuse_factor),
            ));
        }
        if !(self.noise_mw >= 0.0 && self.noise_mw.is_finite()) {
            return Err(invalid(
                "noise_power",
                format!("must be finite and >= 0, got {}", self.noise_mw),
            ));
        }
        if !(self.sinr_threshold >= 0.0 && self.sinr_threshold.is_finite()) {
            return Err(invalid(
                "sinr_threshold",
                format!("must be finite and >= 0, got {}", self.sinr_threshold),
            ));
        }
        if self.user_count == 0 {
            return Err(invalid("user_count", "must be at least 1"));
        }
        Ok(())
    }
}

/// The base station the typical user associates with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Serving {
    pub tier: usize,
    /// Index into the tier's pattern.
    pub index: usize,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkRealization {
    pub tiers: Vec<PointPattern>,
    pub jammers: PointPattern,
    /// `None` when every tier is empty in this realization.
    pub serving: Option<Serving>,
    /// Co-channel flags after reuse thinning; the serving station is always active.
    pub active: Vec<Vec<bool>>,
}

impl NetworkRealization {
    /// Active and total counts over non-serving base stations.
    pub fn interferer_counts(&self) -> (usize, usize) {
        let mut active = 0;
        let mut total = 0;
        for (k, flags) in self.active.iter().enumerate() {
            for (i, &a) in flags.iter().enumerate() {
                if matches!(self.serving, Some(s) if s.tier == k && s.index == i) {
                    continue;
                }
                total += 1;
                active += usize::from(a);
            }
        }
        (active, total)
    }
}

/// Max-average-received-power association over per-tier nearest distances.
///
/// Ties go to the lower tier index.
pub fn associate(candidates: &[Option<f64>], tiers: &[TierConfig]) -> Result<(usize, f64)> {
    if candidates.len() != tiers.len() {
        return Err(Error::InvalidInput(format!(
            "{} candidate distances for {} tiers",
            candidates.len(),
            tiers.len()
        )));
    }
    let mut best: Option<(usize, f64, f64)> = None;
    for (k, (cand, tier)) in candidates.iter().zip(tiers).enumerate() {
        let Some(r) = *cand else { continue };
        let p = tier.mean_power(r);
        if best.is_none_or(|(_, _, bp)| p > bp) {
            best = Some((k, r, p));
        }
    }
    best.map(|(k, r, _)| (k, r)).ok_or(Error::NoCoverage)
}

pub(crate) struct TierGeometry {
    pub tiers: Vec<PointPattern>,
    pub serving: Option<Serving>,
}

pub(crate) fn realize_tiers(config: &NetworkConfig, seed: u64) -> Result<TierGeometry> {
    let tiers = config
        .tiers
        .iter()
        .enumerate()
        .map(|(k, t)| {
            geometry::sample(
                &t.spec,
                config.window,
                seed::child_seed(seed, "tier", k as u64),
                config.limits,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let nearest: Vec<Option<(usize, f64)>> = tiers.iter().map(PointPattern::nearest_to_origin).collect();
    let candidates: Vec<Option<f64>> = nearest.iter().map(|n| n.map(|(_, d)| d)).collect();
    let serving = match associate(&candidates, &config.tiers) {
        Ok((tier, distance)) => Some(Serving {
            tier,
            index: nearest[tier].map(|(i, _)| i).unwrap_or(0),
            distance,
        }),
        Err(Error::NoCoverage) => None,
        Err(e) => return Err(e),
    };
    Ok(TierGeometry { tiers, serving })
}

pub(crate) fn jammer_seed(geometry_seed: u64) -> u64 {
    seed::child_seed(geometry_seed, "jammers", 0)
}

/// Draws tier and jammer patterns, applies reuse thinning and associates the
/// typical user.
pub fn realize_network(config: &NetworkConfig, seed: u64) -> Result<NetworkRealization> {
    config.validate()?;
    let TierGeometry { tiers, serving } = realize_tiers(config, seed)?;
    let jammers = match &config.jammers {
        Some(j) => geometry::sample(&j.spec, config.window, jammer_seed(seed), config.limits)?,
        None => PointPattern::empty(config.window, Process::Poisson),
    };
    let mut reuse = seed::child_rng(seed, "reuse", 0);
    let active = tiers
        .iter()
        .enumerate()
        .map(|(k, pattern)| {
            (0..pattern.len())
                .map(|i| {
                    let is_serving = matches!(serving, Some(s) if s.tier == k && s.index == i);
                    if config.reuse_factor >= 1.0 {
                        true
                    } else {
                        let keep = reuse.random::<f64>() < config.reuse_factor;
                        is_serving || keep
                    }
                })
                .collect()
        })
        .collect();
    Ok(NetworkRealization {
        tiers,
        jammers,
        serving,
        active,
    })
}

pub(crate) fn sinr_from_parts(signal: f64, noise: f64, tier_interference: f64, jammer_interference: f64) -> f64 {
    let denom = noise + tier_interference + jammer_interference;
    if denom == 0.0 {
        f64::INFINITY
    } else {
        signal / denom
    }
}

/// Signal power and co-channel tier interference at the origin. Fading is
/// drawn for every base station in tier order, active or not.
pub(crate) fn tier_powers(
    config: &NetworkConfig,
    tiers: &[PointPattern],
    serving: Serving,
    active: Option<&[Vec<bool>]>,
    fading: &mut seed::SimRng,
) -> (f64, f64) {
    let mut signal = 0.0;
    let mut interference = 0.0;
    for (k, (pattern, tier)) in tiers.iter().zip(&config.tiers).enumerate() {
        for (i, p) in pattern.points.iter().enumerate() {
            let h: f64 = Exp1.sample(fading);
            let received = h * tier.mean_power(p.norm());
            if k == serving.tier && i == serving.index {
                signal = received;
            } else if active.is_none_or(|a| a[k][i]) {
                interference += received;
            }
        }
    }
    (signal, interference)
}

/// One SINR draw (linear) at the origin for a fixed realization.
///
/// Returns `+∞` when there is neither noise nor any interferer.
pub fn sinr_sample(realization: &NetworkRealization, config: &NetworkConfig, seed: u64) -> Result<f64> {
    let serving = realization.serving.ok_or(Error::NoCoverage)?;
    let mut fading = seed::rng(seed);
    let (signal, tier_interference) = tier_powers(
        config,
        &realization.tiers,
        serving,
        Some(&realization.active),
        &mut fading,
    );
    let mut jammer_interference = 0.0;
    if let Some(j) = &config.jammers {
        for p in &realization.jammers.points {
            let h: f64 = Exp1.sample(&mut fading);
            jammer_interference += h * j.mean_power(p.norm());
        }
    }
    Ok(sinr_from_parts(
        signal,
        config.noise_mw,
        tier_interference,
        jammer_interference,
    ))
}

pub(crate) fn trial_seeds(seed: u64, trial: u64) -> (u64, u64) {
    (
        seed::child_seed(seed, "geometry", trial),
        seed::child_seed(seed, "fading", trial),
    )
}

/// SINR of trial `trial` under master seed `seed`, or `None` without coverage.
///
/// Trial `i` always sees the same geometry and fading for a given seed, so
/// thresholds, powers and reserve parameters can be compared with common
/// random numbers.
pub fn trial_sinr(config: &NetworkConfig, seed: u64, trial: u64) -> Result<Option<f64>> {
    let (geometry_seed, fading_seed) = trial_seeds(seed, trial);
    let realization = realize_network(config, geometry_seed)?;
    if realization.serving.is_none() {
        return Ok(None);
    }
    sinr_sample(&realization, config, fading_seed).map(Some)
}

pub(crate) fn is_outage(sinr: Option<f64>, threshold: f64) -> bool {
    sinr.is_none_or(|s| s < threshold)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutageMethod {
    /// Fraction of trials whose sampled SINR falls below the threshold.
    Indicator,
    /// Mean of the outage probability conditional on the tier geometry, with
    /// fading, reuse and the jammer field integrated out analytically.
    Conditional,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageEstimate {
    pub probability: f64,
    /// Half-width of the 95% confidence interval.
    pub half_width: f64,
    pub trials: u64,
    pub seed: u64,
    pub method: OutageMethod,
}

impl OutageEstimate {
    pub(crate) fn from_count(outages: u64, trials: u64, seed: u64) -> Self {
        let p = outages as f64 / trials as f64;
        Self {
            probability: p,
            half_width: bernoulli_half_width(p, trials),
            trials,
            seed,
            method: OutageMethod::Indicator,
        }
    }

    /// Standard error implied by the half-width.
    pub fn standard_error(&self) -> f64 {
        self.half_width / 1.96
    }
}

fn check_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        return Err(invalid("trials", "must be at least 1"));
    }
    Ok(())
}

/// Monte Carlo service-outage probability of the typical user.
///
/// Each trial draws fresh geometry and fading from seeds derived from
/// `(seed, trial)`; no-coverage trials count as outages.
pub fn estimate_outage(config: &NetworkConfig, trials: u64, seed: u64) -> Result<OutageEstimate> {
    config.validate()?;
    check_trials(trials)?;
    let mut outages = 0u64;
    for t in 0..trials {
        if is_outage(trial_sinr(config, seed, t)?, config.sinr_threshold) {
            outages += 1;
        }
    }
    Ok(OutageEstimate::from_count(outages, trials, seed))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceReport {
    pub at_radius: OutageEstimate,
    pub at_double_radius: OutageEstimate,
    pub delta: f64,
}

impl ConvergenceReport {
    pub fn converged(&self, tolerance: f64) -> bool {
        self.delta < tolerance
    }
}

/// Compares outage estimates at window radius `R` and `2R`.
pub fn convergence_check(config: &NetworkConfig, trials: u64, seed: u64) -> Result<ConvergenceReport> {
    let at_radius = estimate_outage(config, trials, seed)?;
    let mut wide = config.clone();
    wide.window = Window::new(2.0 * config.window.radius())?;
    let at_double_radius = estimate_outage(&wide, trials, seed)?;
    Ok(ConvergenceReport {
        at_radius,
        at_double_radius,
        delta: (at_radius.probability - at_double_radius.probability).abs(),
    })
}
