//! Outage conditional on the tier geometry.
//!
//! Given base-station positions and the serving link, Rayleigh fading makes
//! the coverage probability a product of Laplace transforms. With
//! `s = τ / (P_s r_s^(-μ_s))`:
//!
//! ```text
//! P(SINR ≥ τ | tiers) = exp(-s σ²)
//!     · Π_{i ≠ serving} (1 - ξ + ξ / (1 + s P_i d_i^(-μ_i)))
//!     · E_J[ Π_j 1 / (1 + s P_J d_j^(-μ_J)) ]
//! ```
//!
//! The jammer factor is a probability generating functional of the jammer
//! field with `f(d) = 1 / (1 + d^μ_J / (s P_J))`, restricted to the window:
//!
//! - Poisson: `exp(-ζ_J ∫_0^R f(d) 2πd dd)`;
//! - α-Ginibre (thinning of Ginibre at `ζ' = ζ_J/α` from an `M`×`M` matrix):
//!   the eigenvalue moduli of a Ginibre matrix are independent with
//!   `π ζ' |z_k|² ~ Gamma(k, 1)`, `k = 1..M`, and the factor only involves
//!   distances, so it equals `Π_k (1 - α E[f(|z_k|) 1{|z_k| < R}])`.
//!
//! Averaging this over sampled tiers gives an unbiased outage estimator whose
//! variance excludes fading and jammer placement, which is what makes small
//! repulsion effects in the jammer field measurable.

use alloc::vec;
use alloc::vec::Vec;

use super::{check_trials, realize_tiers, trial_seeds, JammerConfig, NetworkConfig, OutageEstimate, OutageMethod};
use crate::error::Result;
use crate::geometry::{ginibre_matrix_dim, Process, Window};
use crate::math::{exp, lgamma, log, pow, sqrt, PI};
use crate::quad::{integrate, Tolerance};

const TOL: Tolerance = Tolerance {
    abs: 1e-13,
    rel: 1e-10,
    max_intervals: 4000,
};

/// `E_J[Π_j 1/(1 + s P_J d_j^(-μ_J))]` for the jammer field inside `window`.
pub fn jammer_laplace(jammer: &JammerConfig, s: f64, window: Window) -> Result<f64> {
    let density = jammer.spec.density;
    if density == 0.0 || s == 0.0 {
        return Ok(1.0);
    }
    let c = s * jammer.power_mw;
    let mu = jammer.pathloss_exponent;
    let radius = window.radius();
    let f = move |d: f64| c / (c + pow(d, mu));
    match jammer.spec.process {
        Process::Poisson => {
            let knee = pow(c, 1.0 / mu).min(radius);
            let near = integrate(|d| 2.0 * PI * d * f(d), 0.0, knee, TOL)?;
            let far = integrate(|d| 2.0 * PI * d * f(d), knee, radius, TOL)?;
            Ok(exp(-density * (near.value + far.value)))
        }
        Process::AlphaGinibre { alpha } => {
            let base = density / alpha;
            let m = ginibre_matrix_dim(base, window);
            let x_max = PI * base * radius * radius;
            let mut product = 1.0;
            for k in 1..=m {
                let kf = k as f64;
                let log_norm = lgamma(kf);
                let gamma_pdf = |x: f64| {
                    if x <= 0.0 {
                        return if k == 1 { 1.0 } else { 0.0 };
                    }
                    exp((kf - 1.0) * log(x) - x - log_norm)
                };
                let integrand = |x: f64| f(sqrt(x / (PI * base))) * gamma_pdf(x);
                // Split at the Gamma mode so the peak is never straddled blindly.
                let mode = (kf - 1.0).clamp(0.0, x_max);
                let lo = integrate(integrand, 0.0, mode, TOL)?;
                let hi = integrate(integrand, mode, x_max, TOL)?;
                product *= 1.0 - alpha * (lo.value + hi.value);
            }
            Ok(product)
        }
    }
}

struct TierFactor {
    /// Outage is certain (no coverage).
    uncovered: bool,
    s: f64,
    coverage_without_jammers: f64,
}

fn tier_factor(config: &NetworkConfig, geometry_seed: u64) -> Result<TierFactor> {
    let geometry = realize_tiers(config, geometry_seed)?;
    let Some(serving) = geometry.serving else {
        return Ok(TierFactor {
            uncovered: true,
            s: 0.0,
            coverage_without_jammers: 0.0,
        });
    };
    let serving_tier = &config.tiers[serving.tier];
    let s = config.sinr_threshold / serving_tier.mean_power(serving.distance);
    let xi = config.reuse_factor;
    let mut coverage = exp(-s * config.noise_mw);
    for (k, (pattern, tier)) in geometry.tiers.iter().zip(&config.tiers).enumerate() {
        for (i, p) in pattern.points.iter().enumerate() {
            if k == serving.tier && i == serving.index {
                continue;
            }
            coverage *= 1.0 - xi + xi / (1.0 + s * tier.mean_power(p.norm()));
        }
    }
    Ok(TierFactor {
        uncovered: false,
        s,
        coverage_without_jammers: coverage,
    })
}

fn summarize(sum: f64, sum_sq: f64, trials: u64, seed: u64) -> OutageEstimate {
    let n = trials as f64;
    let mean = sum / n;
    let variance = if trials > 1 {
        ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    OutageEstimate {
        probability: mean.clamp(0.0, 1.0),
        half_width: 1.96 * sqrt(variance / n),
        trials,
        seed,
        method: OutageMethod::Conditional,
    }
}

/// Conditional-expectation outage estimate for `config`.
///
/// Uses the same tier geometry per trial as [`super::estimate_outage`] with
/// the same seed.
pub fn conditional_outage(config: &NetworkConfig, trials: u64, seed: u64) -> Result<OutageEstimate> {
    let jammers = [config.jammers];
    Ok(conditional_outage_sweep(config, &jammers, trials, seed)?[0])
}

/// Conditional-expectation outage for several jammer fields over one set of
/// tier realizations.
///
/// The configured jammer field is replaced by each entry of `jammers` in
/// turn (`None` means no jammers). Differences between entries are therefore
/// free of tier-geometry noise.
pub fn conditional_outage_sweep(
    config: &NetworkConfig,
    jammers: &[Option<JammerConfig>],
    trials: u64,
    seed: u64,
) -> Result<Vec<OutageEstimate>> {
    config.validate()?;
    check_trials(trials)?;
    for j in jammers.iter().flatten() {
        j.validate()?;
    }
    let mut sums = vec![(0.0f64, 0.0f64); jammers.len()];
    for t in 0..trials {
        let (geometry_seed, _) = trial_seeds(seed, t);
        let tier = tier_factor(config, geometry_seed)?;
        for (acc, jammer) in sums.iter_mut().zip(jammers) {
            let outage = if tier.uncovered {
                1.0
            } else {
                let jam = match jammer {
                    Some(j) => jammer_laplace(j, tier.s, config.window)?,
                    None => 1.0,
                };
                1.0 - tier.coverage_without_jammers * jam
            };
            acc.0 += outage;
            acc.1 += outage * outage;
        }
    }
    Ok(sums.into_iter().map(|(s, sq)| summarize(s, sq, trials, seed)).collect())
}
