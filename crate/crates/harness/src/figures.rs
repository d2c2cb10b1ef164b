//! Illustrative reserve trajectories.

use hwnrisk_core::actuarial::{path_infimum, simulate_surplus_path, InsuranceConfig, SurplusPath};
use hwnrisk_core::seed::child_seed;
use hwnrisk_core::Error;

use crate::error::Result;

/// One ruined and one surviving trajectory of the same insurer.
#[derive(Debug, Clone, PartialEq)]
pub struct PathPair {
    pub ruined: SurplusPath,
    pub ruined_index: u64,
    pub safe: SurplusPath,
    pub safe_index: u64,
}

pub fn sample_path_seed(seed: u64, index: u64) -> u64 {
    child_seed(seed, "sample-path", index)
}

/// Scans path seeds in order and keeps the first ruined path and the first
/// surviving path with at least one claim.
pub fn reserve_path_pair(config: &InsuranceConfig, seed: u64, max_scan: u64) -> Result<PathPair> {
    config.validate()?;
    let mut ruined = None;
    let mut safe = None;
    for i in 0..max_scan {
        let s = sample_path_seed(seed, i);
        let m = path_infimum(config, s);
        if m < 0.0 {
            ruined = ruined.or(Some(i));
        } else if safe.is_none() && !simulate_surplus_path(config, s)?.claims.is_empty() {
            safe = Some(i);
        }
        if let (Some(r), Some(k)) = (ruined, safe) {
            return Ok(PathPair {
                ruined: simulate_surplus_path(config, sample_path_seed(seed, r))?,
                ruined_index: r,
                safe: simulate_surplus_path(config, sample_path_seed(seed, k))?,
                safe_index: k,
            });
        }
    }
    Err(Error::ResourceLimit(format!(
        "no ruined and surviving path pair within {max_scan} seeds (ruined found: {}, surviving found: {})",
        ruined.is_some(),
        safe.is_some()
    ))
    .into())
}
