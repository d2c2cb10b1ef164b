//! Compound Poisson surplus process and finite-time ruin.
//!
//! The reserve is `R(t) = y + c t - Σ_{k ≤ N_t} W_k`. It only drops at claim
//! instants, so the infimum over `[0, T]` is attained either at time 0 or
//! right after a claim, and event-driven simulation gives it exactly.
//!
//! Claim epochs are generated as cumulative unit-rate exponential spacings
//! divided by `λ`. For a fixed path seed this couples every intensity: a
//! larger `λ` moves every claim earlier and admits more claims before `T`,
//! so the infimum is pathwise non-increasing in `λ` as well as
//! non-decreasing in `y` and `c`.

mod calibrate;
mod oracle;

use alloc::format;
use alloc::vec::Vec;

use rand_distr::{Distribution, Exp1};

use crate::error::{invalid, Result};
use crate::math::{bernoulli_half_width, ceil};
use crate::seed::{self, SimRng};

pub use calibrate::{calibrate_premium, Calibration, CalibrationSettings};
pub use oracle::{cramer_lundberg_ruin, deterministic_claim_oracle, DeterministicOracle};

/// Claim (indemnity) amount law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClaimDistribution {
    Deterministic(f64),
    Exponential { mean: f64 },
}

impl ClaimDistribution {
    pub fn validate(&self) -> Result<()> {
        let v = match *self {
            Self::Deterministic(w) => w,
            Self::Exponential { mean } => mean,
        };
        if !(v > 0.0 && v.is_finite()) {
            return Err(invalid(
                "claims",
                format!("amount must be positive and finite, got {v}"),
            ));
        }
        Ok(())
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Self::Deterministic(w) => w,
            Self::Exponential { mean } => mean,
        }
    }

    fn draw(&self, rng: &mut SimRng) -> f64 {
        match *self {
            Self::Deterministic(w) => w,
            Self::Exponential { mean } => {
                let e: f64 = Exp1.sample(rng);
                mean * e
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InsuranceConfig {
    pub initial_reserve: f64,
    /// Aggregate premium income per time unit.
    pub premium_rate: f64,
    /// Claims per time unit.
    pub claim_intensity: f64,
    pub claims: ClaimDistribution,
    pub horizon: f64,
}

fn check_nonnegative(name: &'static str, v: f64) -> Result<()> {
    if !(v >= 0.0 && v.is_finite()) {
        return Err(invalid(name, format!("must be finite and >= 0, got {v}")));
    }
    Ok(())
}

impl InsuranceConfig {
    pub fn validate(&self) -> Result<()> {
        check_nonnegative("initial_reserve", self.initial_reserve)?;
        check_nonnegative("premium_rate", self.premium_rate)?;
        check_nonnegative("claim_intensity", self.claim_intensity)?;
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(invalid(
                "horizon",
                format!("must be positive and finite, got {}", self.horizon),
            ));
        }
        self.claims.validate()
    }

    /// `θ = c / (λ E[W]) - 1`, or `None` without claims.
    pub fn safety_loading(&self) -> Option<f64> {
        let outflow = self.claim_intensity * self.claims.mean();
        (outflow > 0.0).then(|| self.premium_rate / outflow - 1.0)
    }

    pub fn with_premium_rate(&self, premium_rate: f64) -> Self {
        Self { premium_rate, ..*self }
    }

    pub fn with_claim_intensity(&self, claim_intensity: f64) -> Self {
        Self {
            claim_intensity,
            ..*self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Claim {
    pub time: f64,
    pub amount: f64,
}

/// Claims of one path in time order, stopping at the horizon.
struct ClaimStream<'a> {
    config: &'a InsuranceConfig,
    rng: SimRng,
    elapsed: f64,
    done: bool,
}

impl<'a> ClaimStream<'a> {
    fn new(config: &'a InsuranceConfig, path_seed: u64) -> Self {
        Self {
            config,
            rng: seed::rng(path_seed),
            elapsed: 0.0,
            done: config.claim_intensity == 0.0,
        }
    }
}

impl Iterator for ClaimStream<'_> {
    type Item = Claim;

    fn next(&mut self) -> Option<Claim> {
        if self.done {
            return None;
        }
        let e: f64 = Exp1.sample(&mut self.rng);
        self.elapsed += e;
        // The amount is drawn before the horizon check so that the k-th
        // amount is the same for every intensity.
        let amount = self.config.claims.draw(&mut self.rng);
        let time = self.elapsed / self.config.claim_intensity;
        if time > self.config.horizon {
            self.done = true;
            return None;
        }
        Some(Claim { time, amount })
    }
}

/// Event list of one surplus path.
#[derive(Debug, Clone, PartialEq)]
pub struct SurplusPath {
    pub initial_reserve: f64,
    pub premium_rate: f64,
    pub horizon: f64,
    pub claims: Vec<Claim>,
    /// Reserve immediately after each claim.
    pub reserves: Vec<f64>,
    pub infimum: f64,
    pub ruined: bool,
}

impl SurplusPath {
    /// Builds a path from explicit claims, e.g. for scripted scenarios.
    pub fn from_claims(config: &InsuranceConfig, claims: Vec<Claim>) -> Result<Self> {
        config.validate()?;
        let mut prev = 0.0;
        for (k, c) in claims.iter().enumerate() {
            if !(c.time >= 0.0 && c.time <= config.horizon) || (k > 0 && c.time <= prev) {
                return Err(invalid(
                    "claims",
                    "times must be strictly increasing within [0, horizon]",
                ));
            }
            if !(c.amount >= 0.0 && c.amount.is_finite()) {
                return Err(invalid("claims", "amounts must be finite and >= 0"));
            }
            prev = c.time;
        }
        let mut total = 0.0;
        let reserves: Vec<f64> = claims
            .iter()
            .map(|c| {
                total += c.amount;
                config.initial_reserve + config.premium_rate * c.time - total
            })
            .collect();
        let infimum = reserves.iter().copied().fold(config.initial_reserve, f64::min);
        Ok(Self {
            initial_reserve: config.initial_reserve,
            premium_rate: config.premium_rate,
            horizon: config.horizon,
            claims,
            reserves,
            infimum,
            ruined: infimum < 0.0,
        })
    }

    /// `R(t)` for `t` in `[0, T]`, right-continuous at claims.
    pub fn reserve_at(&self, t: f64) -> f64 {
        let paid: f64 = self.claims.iter().take_while(|c| c.time <= t).map(|c| c.amount).sum();
        self.initial_reserve + self.premium_rate * t - paid
    }

    pub fn final_reserve(&self) -> f64 {
        self.reserve_at(self.horizon)
    }

    /// `(t, reserve)` vertices of the piecewise-linear trajectory: the start,
    /// the levels just before and just after each claim, and the horizon.
    pub fn events(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(2 * self.claims.len() + 2);
        out.push((0.0, self.initial_reserve));
        for (c, &after) in self.claims.iter().zip(&self.reserves) {
            out.push((c.time, after + c.amount));
            out.push((c.time, after));
        }
        let last = self.claims.last().map_or(0.0, |c| c.time);
        if last < self.horizon || self.claims.is_empty() {
            out.push((self.horizon, self.final_reserve()));
        }
        out
    }
}

/// Seed of path `index` under master `seed`.
pub fn path_seed(seed: u64, index: u64) -> u64 {
    seed::child_seed(seed, "surplus-path", index)
}

/// Simulates one path with its own seed.
pub fn simulate_surplus_path(config: &InsuranceConfig, seed: u64) -> Result<SurplusPath> {
    config.validate()?;
    SurplusPath::from_claims(config, ClaimStream::new(config, seed).collect())
}

/// Infimum of the path with the given seed, without storing its events.
pub fn path_infimum(config: &InsuranceConfig, seed: u64) -> f64 {
    let mut total = 0.0;
    let mut inf = config.initial_reserve;
    for c in ClaimStream::new(config, seed) {
        total += c.amount;
        inf = inf.min(config.initial_reserve + config.premium_rate * c.time - total);
    }
    inf
}

/// Smallest premium rate at which the path with the given seed is not
/// ruined: ruin holds exactly when `c < critical_premium`. Paths that are
/// safe for every `c >= 0` give `-inf`.
pub fn critical_premium(config: &InsuranceConfig, seed: u64) -> f64 {
    let mut total = 0.0;
    let mut worst = f64::NEG_INFINITY;
    for c in ClaimStream::new(config, seed) {
        total += c.amount;
        let deficit = total - config.initial_reserve;
        if deficit > 0.0 {
            let needed = if c.time > 0.0 { deficit / c.time } else { f64::INFINITY };
            worst = worst.max(needed);
        }
    }
    worst
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RuinEstimate {
    pub probability: f64,
    /// Half-width of the 95% confidence interval.
    pub half_width: f64,
    pub paths: u64,
    pub seed: u64,
}

impl RuinEstimate {
    fn from_count(ruined: u64, paths: u64, seed: u64) -> Self {
        let p = ruined as f64 / paths as f64;
        Self {
            probability: p,
            half_width: bernoulli_half_width(p, paths),
            paths,
            seed,
        }
    }

    pub fn standard_error(&self) -> f64 {
        self.half_width / 1.96
    }
}

fn check_paths(paths: u64, min: u64) -> Result<()> {
    if paths < min {
        return Err(invalid("paths", format!("must be at least {min}, got {paths}")));
    }
    Ok(())
}

/// Fraction of `paths` simulated paths whose infimum is negative.
pub fn ruin_probability(config: &InsuranceConfig, paths: u64, seed: u64) -> Result<RuinEstimate> {
    config.validate()?;
    check_paths(paths, 1)?;
    let ruined = (0..paths)
        .filter(|&i| path_infimum(config, path_seed(seed, i)) < 0.0)
        .count() as u64;
    Ok(RuinEstimate::from_count(ruined, paths, seed))
}

/// Ruin estimates for several claim intensities on the same paths.
pub fn ruin_probability_by_intensity(
    config: &InsuranceConfig,
    intensities: &[f64],
    paths: u64,
    seed: u64,
) -> Result<Vec<RuinEstimate>> {
    intensities
        .iter()
        .map(|&l| ruin_probability(&config.with_claim_intensity(l), paths, seed))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InfimumDistribution {
    /// Path infima in ascending order.
    pub infima: Vec<f64>,
    pub ruin_probability: f64,
    /// `(q, value)` pairs of the empirical quantile function.
    pub quantiles: Vec<(f64, f64)>,
    pub histogram: Vec<HistogramBin>,
}

impl InfimumDistribution {
    /// Empirical `P(M <= x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        self.infima.partition_point(|&m| m <= x) as f64 / self.infima.len() as f64
    }
}

/// Empirical law of the path infimum over `paths` paths, with a histogram of
/// `bins` equal-width bins spanning the observed range.
pub fn infimum_distribution(
    config: &InsuranceConfig,
    paths: u64,
    seed: u64,
    quantiles: &[f64],
    bins: usize,
) -> Result<InfimumDistribution> {
    config.validate()?;
    check_paths(paths, 2)?;
    if let Some(&q) = quantiles.iter().find(|&&q| !(q > 0.0 && q < 1.0)) {
        return Err(invalid("quantiles", format!("must lie in (0, 1), got {q}")));
    }
    if bins == 0 {
        return Err(invalid("bins", "must be at least 1"));
    }
    let mut infima: Vec<f64> = (0..paths).map(|i| path_infimum(config, path_seed(seed, i))).collect();
    infima.sort_by(f64::total_cmp);
    let n = infima.len();
    let ruined = infima.partition_point(|&m| m < 0.0);
    let quantiles = quantiles
        .iter()
        .map(|&q| {
            let rank = (ceil(q * n as f64) as usize).clamp(1, n);
            (q, infima[rank - 1])
        })
        .collect();
    let (lo, hi) = (infima[0], infima[n - 1]);
    let bins = if hi > lo { bins } else { 1 };
    let width = (hi - lo) / bins as f64;
    let mut histogram: Vec<HistogramBin> = (0..bins)
        .map(|b| HistogramBin {
            lo: lo + b as f64 * width,
            hi: if b + 1 == bins { hi } else { lo + (b + 1) as f64 * width },
            count: 0,
        })
        .collect();
    for &m in &infima {
        let b = if width > 0.0 { ((m - lo) / width) as usize } else { 0 };
        histogram[b.min(bins - 1)].count += 1;
    }
    Ok(InfimumDistribution {
        infima,
        ruin_probability: ruined as f64 / n as f64,
        quantiles,
        histogram,
    })
}

#[cfg(test)]
mod tests;
