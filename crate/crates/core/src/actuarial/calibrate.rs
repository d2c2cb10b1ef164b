use alloc::format;
use alloc::vec::Vec;

use super::{critical_premium, path_seed, InsuranceConfig};
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationSettings {
    pub paths: u64,
    pub seed: u64,
    /// Bisection stops once the bracket is narrower than this.
    pub resolution: f64,
    /// Upper end of the search range.
    pub max_premium: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibration {
    /// Upper end of the final bracket.
    pub premium_rate: f64,
    pub ruin_at_premium: f64,
    /// Lower end of the final bracket and its ruin estimate (above target).
    pub lower_premium: f64,
    pub ruin_at_lower: f64,
    pub iterations: u32,
}

/// Smallest premium rate (to within `resolution`) whose estimated ruin
/// probability does not exceed `target`.
///
/// Every probe reuses the same paths. Each path is summarized by its critical
/// premium (ruin exactly below it), so a probe is a count over cached values
/// and the estimate is non-increasing in the premium by construction.
pub fn calibrate_premium(
    template: &InsuranceConfig,
    target: f64,
    settings: CalibrationSettings,
) -> Result<Calibration> {
    template.validate()?;
    if !(target > 0.0 && target < 1.0) {
        return Err(invalid("target", format!("must lie in (0, 1), got {target}")));
    }
    if settings.paths == 0 {
        return Err(invalid("paths", "must be at least 1"));
    }
    if !(settings.resolution > 0.0 && settings.resolution.is_finite()) {
        return Err(invalid("resolution", "must be positive and finite"));
    }
    if !(settings.max_premium > 0.0 && settings.max_premium.is_finite()) {
        return Err(invalid("max_premium", "must be positive and finite"));
    }
    let critical: Vec<f64> = (0..settings.paths)
        .map(|i| critical_premium(template, path_seed(settings.seed, i)))
        .collect();
    let n = settings.paths as f64;
    let ruin = |c: f64| critical.iter().filter(|&&k| c < k).count() as f64 / n;

    let at_zero = ruin(0.0);
    if at_zero <= target {
        return Ok(Calibration {
            premium_rate: 0.0,
            ruin_at_premium: at_zero,
            lower_premium: 0.0,
            ruin_at_lower: at_zero,
            iterations: 0,
        });
    }
    let at_max = ruin(settings.max_premium);
    if at_max > target {
        return Err(Error::Calibration {
            target,
            max_premium: settings.max_premium,
            ruin_at_max: at_max,
        });
    }
    let (mut lo, mut hi) = (0.0, settings.max_premium);
    let (mut ruin_lo, mut ruin_hi) = (at_zero, at_max);
    let mut iterations = 0;
    while hi - lo >= settings.resolution {
        let mid = 0.5 * (lo + hi);
        let r = ruin(mid);
        if r <= target {
            (hi, ruin_hi) = (mid, r);
        } else {
            (lo, ruin_lo) = (mid, r);
        }
        iterations += 1;
    }
    Ok(Calibration {
        premium_rate: hi,
        ruin_at_premium: ruin_hi,
        lower_premium: lo,
        ruin_at_lower: ruin_lo,
        iterations,
    })
}
