use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::{ClaimDistribution, InsuranceConfig};
use crate::error::{invalid, Error, Result};
use crate::math::{ceil, exp, lgamma, log};

/// Poisson tail mass targeted by the default truncation.
const DEFAULT_TAIL: f64 = 1e-12;

/// Finite-horizon non-ruin probability for deterministic claims.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeterministicOracle {
    /// Non-ruin probability summed over claim counts up to `max_n`. The exact
    /// value lies in `[non_ruin, non_ruin + tail_bound]`.
    pub non_ruin: f64,
    /// `P(N_T > max_n)`.
    pub tail_bound: f64,
    pub max_n: usize,
}

impl DeterministicOracle {
    pub fn ruin(&self) -> f64 {
        1.0 - self.non_ruin
    }
}

fn log_poisson_pmf(n: usize, mean: f64, log_fact: &[f64]) -> f64 {
    if mean == 0.0 {
        return if n == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    n as f64 * log(mean) - mean - log_fact[n]
}

fn poisson_upper_tail(max_n: usize, mean: f64) -> f64 {
    if mean == 0.0 {
        return 0.0;
    }
    let mut n = max_n + 1;
    let mut term = exp(n as f64 * log(mean) - mean - lgamma(n as f64 + 1.0));
    let mut sum = 0.0;
    loop {
        sum += term;
        n += 1;
        term *= mean / n as f64;
        if n as f64 > mean && (term == 0.0 || term < 1e-18 * sum) {
            return sum;
        }
    }
}

fn default_max_n(mean: f64) -> usize {
    let mut n = ceil(mean) as usize;
    while poisson_upper_tail(n, mean) >= DEFAULT_TAIL {
        n += 1 + n / 16;
    }
    n
}

/// `P(U_(k) >= a_k, k = 1..n)` for sorted uniforms, with `a` non-decreasing
/// and every `a_k < 1`.
///
/// Scans the breakpoints left to right, tracking how many of the `n` points
/// lie below the current one. Given `j` points below `a_{k-1}`, the other
/// `n - j` are uniform on `[a_{k-1}, 1]`, so the count entering
/// `[a_{k-1}, a_k)` is binomial. The constraint is at most `k - 1` points
/// below `a_k`.
fn order_statistics_above(a: &[f64], log_fact: &[f64]) -> f64 {
    let n = a.len();
    let mut dist = vec![0.0f64; n + 1];
    dist[0] = 1.0;
    let mut prev = 0.0;
    let mut next = vec![0.0f64; n + 1];
    for (k, &b) in a.iter().enumerate() {
        // At most `k` points may lie below the (k+1)-th breakpoint.
        let cap = k;
        let width = b - prev;
        next.iter_mut().for_each(|x| *x = 0.0);
        if width <= 0.0 {
            next[..=cap].copy_from_slice(&dist[..=cap]);
        } else {
            let p = width / (1.0 - prev);
            let (lp, lq) = (log(p), libm::log1p(-p));
            for j in 0..=cap.min(n) {
                let w = dist[j];
                if w == 0.0 {
                    continue;
                }
                let r = n - j;
                for m in 0..=(cap - j).min(r) {
                    let log_pmf = log_fact[r] - log_fact[m] - log_fact[r - m] + m as f64 * lp + (r - m) as f64 * lq;
                    next[j + m] += w * exp(log_pmf);
                }
            }
        }
        core::mem::swap(&mut dist, &mut next);
        prev = b;
    }
    dist.iter().sum()
}

/// Exact finite-horizon non-ruin probability for `Deterministic(w)` claims,
/// truncated at `max_n` claims (default: Poisson tail below `1e-12`).
///
/// Ruin happens at claim `k` exactly when `t_k < (k w - y) / c`. Given `n`
/// claims the epochs are sorted uniforms on `[0, T]`, so
/// `P(no ruin) = Σ_n P(N_T = n) P(U_(k) >= a_k, k <= n)` with
/// `a_k = max(0, (k w - y) / (c T))`; any `a_k >= 1` with `k <= n` forces ruin.
pub fn deterministic_claim_oracle(config: &InsuranceConfig, max_n: Option<usize>) -> Result<DeterministicOracle> {
    config.validate()?;
    let ClaimDistribution::Deterministic(w) = config.claims else {
        return Err(invalid("claims", "oracle needs deterministic claims"));
    };
    let mean = config.claim_intensity * config.horizon;
    let max_n = max_n.unwrap_or_else(|| default_max_n(mean));
    if max_n > 5000 {
        return Err(Error::ResourceLimit(format!(
            "oracle truncation {max_n} exceeds 5000 claims"
        )));
    }
    let log_fact: Vec<f64> = (0..=max_n).map(|n| lgamma(n as f64 + 1.0)).collect();
    let (y, c, t) = (config.initial_reserve, config.premium_rate, config.horizon);
    let mut non_ruin = 0.0;
    for n in 0..=max_n {
        let log_weight = log_poisson_pmf(n, mean, &log_fact);
        if log_weight == f64::NEG_INFINITY {
            continue;
        }
        let safe = if c == 0.0 {
            if n as f64 * w <= y {
                1.0
            } else {
                0.0
            }
        } else {
            let a: Vec<f64> = (1..=n).map(|k| ((k as f64 * w - y) / (c * t)).max(0.0)).collect();
            if a.last().is_some_and(|&x| x >= 1.0) {
                0.0
            } else {
                order_statistics_above(&a, &log_fact)
            }
        };
        non_ruin += exp(log_weight) * safe;
    }
    Ok(DeterministicOracle {
        non_ruin,
        tail_bound: poisson_upper_tail(max_n, mean),
        max_n,
    })
}

/// Infinite-horizon ruin probability with exponential claims,
/// `ψ(u) = exp(-θ u / ((1 + θ) E[W])) / (1 + θ)`, or 1 when `θ <= 0`.
pub fn cramer_lundberg_ruin(config: &InsuranceConfig) -> Result<f64> {
    config.validate()?;
    let ClaimDistribution::Exponential { mean } = config.claims else {
        return Err(invalid("claims", "closed form needs exponential claims"));
    };
    let Some(theta) = config.safety_loading() else {
        return Ok(0.0);
    };
    if theta <= 0.0 {
        return Ok(1.0);
    }
    Ok(exp(-theta * config.initial_reserve / ((1.0 + theta) * mean)) / (1.0 + theta))
}
