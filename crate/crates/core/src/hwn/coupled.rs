use alloc::vec;
use alloc::vec::Vec;

use rand_distr::{Distribution, Exp1};

use super::{
    check_trials, is_outage, jammer_seed, realize_network, sinr_from_parts, tier_powers, trial_seeds, NetworkConfig,
    OutageEstimate,
};
use crate::error::{invalid, Result};
use crate::geometry::DensityCoupling;
use crate::seed;

/// Outage estimates over a list of jammer densities with common random numbers.
///
/// Tiers, reuse flags and all fading are shared across densities. The jammer
/// field is sampled once at the largest density and pushed outwards for the
/// others (see [`DensityCoupling`]), each jammer keeping its fading draw, so
/// every trial's jammer interference is non-decreasing in density and the
/// returned outage probabilities are non-decreasing in density path by path.
/// With a single density equal to the configured one, the result is identical
/// to [`super::estimate_outage`].
pub fn estimate_outage_jammer_sweep(
    config: &NetworkConfig,
    densities: &[f64],
    trials: u64,
    seed: u64,
) -> Result<Vec<OutageEstimate>> {
    let max_density = densities.iter().copied().fold(0.0, f64::max);
    estimate_outage_jammer_sweep_from(config, max_density, densities, trials, seed)
}

/// Like [`estimate_outage_jammer_sweep`], with the master jammer pattern
/// sampled at `reference_density` instead of the largest requested density.
///
/// Separate calls that share `reference_density` and `seed` are coupled with
/// each other as well.
pub fn estimate_outage_jammer_sweep_from(
    config: &NetworkConfig,
    reference_density: f64,
    densities: &[f64],
    trials: u64,
    seed: u64,
) -> Result<Vec<OutageEstimate>> {
    config.validate()?;
    check_trials(trials)?;
    let jammer = config
        .jammers
        .ok_or_else(|| invalid("jammers", "a jammer sweep needs a jammer configuration"))?;
    if densities.is_empty() || densities.iter().any(|d| !(*d >= 0.0 && d.is_finite())) {
        return Err(invalid(
            "zeta_j",
            "densities must be a non-empty list of finite values >= 0",
        ));
    }
    if densities.iter().any(|&d| d > reference_density) || !reference_density.is_finite() {
        return Err(invalid(
            "reference_density",
            "must be finite and cover every requested density",
        ));
    }
    let mut base_config = config.clone();
    base_config.jammers = None;
    let master_spec = jammer.with_density(reference_density).spec;

    let mut outages = vec![0u64; densities.len()];
    for t in 0..trials {
        let (geometry_seed, fading_seed) = trial_seeds(seed, t);
        let realization = realize_network(&base_config, geometry_seed)?;
        let Some(serving) = realization.serving else {
            for o in &mut outages {
                *o += 1;
            }
            continue;
        };
        let coupling = DensityCoupling::sample(&master_spec, config.window, jammer_seed(geometry_seed), config.limits)?;
        let mut fading = seed::rng(fading_seed);
        let (signal, tier_interference) = tier_powers(
            config,
            &realization.tiers,
            serving,
            Some(&realization.active),
            &mut fading,
        );
        let jammer_fading: Vec<f64> = (0..coupling.base().len()).map(|_| Exp1.sample(&mut fading)).collect();
        for (o, &density) in outages.iter_mut().zip(densities) {
            let jammer_interference: f64 = coupling
                .at_density(density)?
                .into_iter()
                .map(|(i, p)| jammer_fading[i] * jammer.mean_power(p.norm()))
                .sum();
            let sinr = sinr_from_parts(signal, config.noise_mw, tier_interference, jammer_interference);
            if is_outage(Some(sinr), config.sinr_threshold) {
                *o += 1;
            }
        }
    }
    Ok(outages
        .into_iter()
        .map(|o| OutageEstimate::from_count(o, trials, seed))
        .collect())
}
