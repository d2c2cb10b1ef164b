use super::*;
use crate::math::{exp, sqrt};
use proptest::prelude::*;

fn config(y: f64, c: f64, lambda: f64, claims: ClaimDistribution, t: f64) -> InsuranceConfig {
    InsuranceConfig {
        initial_reserve: y,
        premium_rate: c,
        claim_intensity: lambda,
        claims,
        horizon: t,
    }
}

fn preset_like() -> InsuranceConfig {
    config(1.0, 0.1, 1.0, ClaimDistribution::Deterministic(0.5), 10.0)
}

/// Non-ruin probability by a forward pass over the Poisson claim count.
///
/// Ruin at claim `k` means it arrives before `b_k = (k w - y) / c`. So the
/// path survives iff at most `k - 1` claims arrive in `[0, min(b_k, T))` for
/// every `k`. Between breakpoints the count grows by Poisson increments.
fn poisson_count_dp(cfg: &InsuranceConfig, cap: usize) -> f64 {
    let ClaimDistribution::Deterministic(w) = cfg.claims else {
        unreachable!()
    };
    let (y, c, t, lambda) = (cfg.initial_reserve, cfg.premium_rate, cfg.horizon, cfg.claim_intensity);
    let mut dist = vec![0.0; cap + 1];
    dist[0] = 1.0;
    let mut now = 0.0;
    let mut k = 1usize;
    loop {
        let deficit = k as f64 * w - y;
        let b = if deficit <= 0.0 {
            0.0
        } else if c == 0.0 {
            t
        } else {
            (deficit / c).min(t)
        };
        if b > now {
            let m = lambda * (b - now);
            let mut next = vec![0.0; cap + 1];
            for (j, &p) in dist.iter().enumerate() {
                let mut term = exp(-m);
                for i in 0..=(cap - j) {
                    next[j + i] += p * term;
                    term *= m / (i + 1) as f64;
                }
            }
            dist = next;
            now = b;
        }
        for x in dist.iter_mut().skip(k) {
            *x = 0.0;
        }
        if b >= t || k >= cap {
            break;
        }
        k += 1;
    }
    dist.iter().sum()
}

#[test]
fn no_claims_path() {
    let cfg = preset_like();
    let path = SurplusPath::from_claims(&cfg, vec![]).unwrap();
    assert_eq!(path.infimum, 1.0);
    assert!(!path.ruined);
    assert!((path.final_reserve() - 2.0).abs() < 1e-12);
    assert_eq!(path.events(), vec![(0.0, 1.0), (10.0, path.final_reserve())]);
}

#[test]
fn single_small_claim_is_absorbed() {
    let path = SurplusPath::from_claims(&preset_like(), vec![Claim { time: 5.0, amount: 0.5 }]).unwrap();
    assert!((path.reserves[0] - 1.0).abs() < 1e-12);
    assert!((path.infimum - 1.0).abs() < 1e-12);
    assert!(!path.ruined);
}

#[test]
fn single_large_claim_ruins() {
    let path = SurplusPath::from_claims(&preset_like(), vec![Claim { time: 1.0, amount: 2.0 }]).unwrap();
    assert!((path.reserves[0] + 0.9).abs() < 1e-12);
    assert!((path.infimum + 0.9).abs() < 1e-12);
    assert!(path.ruined);
}

#[test]
fn scripted_claims_are_validated() {
    let cfg = preset_like();
    let c = |time| Claim { time, amount: 0.1 };
    assert!(SurplusPath::from_claims(&cfg, vec![c(2.0), c(1.0)]).is_err());
    assert!(SurplusPath::from_claims(&cfg, vec![c(1.0), c(1.0)]).is_err());
    assert!(SurplusPath::from_claims(&cfg, vec![c(11.0)]).is_err());
    let mut bad = cfg;
    bad.horizon = 0.0;
    assert!(bad.validate().is_err());
    bad = cfg;
    bad.claims = ClaimDistribution::Exponential { mean: -1.0 };
    assert!(bad.validate().is_err());
}

#[test]
fn events_trace_the_sawtooth() {
    let cfg = config(1.0, 0.1, 2.0, ClaimDistribution::Deterministic(0.5), 10.0);
    let path = simulate_surplus_path(&cfg, 17).unwrap();
    let ev = path.events();
    assert_eq!(ev[0], (0.0, 1.0));
    for w in ev.windows(2) {
        let ((t0, r0), (t1, r1)) = (w[0], w[1]);
        assert!(t1 >= t0);
        if t1 == t0 {
            assert!((r0 - r1 - 0.5).abs() < 1e-12, "jump of one claim");
        } else {
            assert!((r1 - r0 - 0.1 * (t1 - t0)).abs() < 1e-9, "linear growth");
        }
    }
    assert_eq!(ev.last().unwrap().0, 10.0);
}

#[test]
fn simulated_path_matches_streaming_infimum() {
    let cfg = config(0.5, 0.3, 3.0, ClaimDistribution::Exponential { mean: 0.2 }, 10.0);
    for s in 0..200 {
        let p = simulate_surplus_path(&cfg, s).unwrap();
        assert_eq!(p.infimum, path_infimum(&cfg, s));
        assert_eq!(p.ruined, p.infimum < 0.0);
    }
}

#[test]
fn claim_count_is_poisson() {
    let cfg = config(1.0, 0.1, 2.5, ClaimDistribution::Deterministic(0.5), 4.0);
    let n = 20_000;
    let counts: Vec<f64> = (0..n)
        .map(|s| simulate_surplus_path(&cfg, s).unwrap().claims.len() as f64)
        .collect();
    let mean = counts.iter().sum::<f64>() / n as f64;
    let var = counts.iter().map(|c| (c - mean) * (c - mean)).sum::<f64>() / (n - 1) as f64;
    assert!((mean - 10.0).abs() < 4.0 * sqrt(10.0 / n as f64), "{mean}");
    assert!((var / 10.0 - 1.0).abs() < 0.05, "{var}");
}

#[test]
fn zero_intensity_never_ruins() {
    let cfg = config(0.0, 0.0, 0.0, ClaimDistribution::Deterministic(1.0), 10.0);
    assert_eq!(ruin_probability(&cfg, 100, 1).unwrap().probability, 0.0);
    let dist = infimum_distribution(&cfg, 50, 1, &[0.1, 0.9], 5).unwrap();
    assert!(dist.infima.iter().all(|&m| m == 0.0));
    assert_eq!(dist.histogram.len(), 1);
    assert_eq!(dist.histogram[0].count, 50);
}

#[test]
fn no_reserve_no_premium_ruins_on_first_claim() {
    let cfg = config(0.0, 0.0, 0.1, ClaimDistribution::Exponential { mean: 2.0 }, 10.0);
    let est = ruin_probability(&cfg, 50_000, 3).unwrap();
    let want = 1.0 - exp(-1.0);
    assert!((est.probability - want).abs() < 4.0 * est.standard_error(), "{est:?}");
}

#[test]
fn infimum_distribution_agrees_with_ruin_probability() {
    let cfg = config(1.0, 1.0, 2.0, ClaimDistribution::Deterministic(1.0), 5.0);
    let dist = infimum_distribution(&cfg, 5000, 8, &[0.05, 0.5, 0.95], 20).unwrap();
    let est = ruin_probability(&cfg, 5000, 8).unwrap();
    assert_eq!(dist.ruin_probability, est.probability);
    assert_eq!(dist.histogram.iter().map(|b| b.count).sum::<u64>(), 5000);
    assert!(dist.quantiles.windows(2).all(|w| w[0].1 <= w[1].1));
    assert_eq!(dist.cdf(f64::INFINITY), 1.0);
    assert!(infimum_distribution(&cfg, 1, 8, &[0.5], 5).is_err());
    assert!(infimum_distribution(&cfg, 10, 8, &[1.0], 5).is_err());
}

#[test]
fn shifting_the_reserve_shifts_every_infimum() {
    let cfg = config(1.0, 0.5, 2.0, ClaimDistribution::Exponential { mean: 0.4 }, 8.0);
    let mut shifted = cfg;
    shifted.initial_reserve += 0.75;
    let a = infimum_distribution(&cfg, 500, 4, &[0.5], 4).unwrap();
    let b = infimum_distribution(&shifted, 500, 4, &[0.5], 4).unwrap();
    for (x, y) in a.infima.iter().zip(&b.infima) {
        assert!((y - x - 0.75).abs() < 1e-12);
    }
}

#[test]
fn deterministic_oracle_matches_poisson_count_recursion() {
    let cases = [
        config(1.0, 1.0, 1.0, ClaimDistribution::Deterministic(1.0), 5.0),
        config(0.0, 0.0, 0.1, ClaimDistribution::Deterministic(1.0), 10.0),
        config(1.0, 0.1, 1.0, ClaimDistribution::Deterministic(0.5), 10.0),
        config(2.5, 0.7, 3.0, ClaimDistribution::Deterministic(0.9), 4.0),
        config(0.3, 5.0, 4.0, ClaimDistribution::Deterministic(1.0), 3.0),
        config(1.0, 0.0, 0.5, ClaimDistribution::Deterministic(0.4), 6.0),
    ];
    for cfg in cases {
        let oracle = deterministic_claim_oracle(&cfg, None).unwrap();
        assert!(oracle.tail_bound < 1e-10);
        let dp = poisson_count_dp(&cfg, oracle.max_n + 40);
        assert!(
            (oracle.non_ruin - dp).abs() < 1e-9,
            "{cfg:?}: {} vs {dp}",
            oracle.non_ruin
        );
    }
}

#[test]
fn deterministic_oracle_trivial_cases() {
    let cfg = config(0.0, 0.0, 0.1, ClaimDistribution::Deterministic(2.0), 10.0);
    let o = deterministic_claim_oracle(&cfg, None).unwrap();
    assert!((o.non_ruin - exp(-1.0)).abs() < 1e-12);

    let cfg = config(10.0, 0.0, 0.2, ClaimDistribution::Deterministic(0.5), 10.0);
    let o = deterministic_claim_oracle(&cfg, Some(20)).unwrap();
    assert!((o.non_ruin + o.tail_bound - 1.0).abs() < 1e-12);

    let exp_claims = config(1.0, 1.0, 1.0, ClaimDistribution::Exponential { mean: 1.0 }, 5.0);
    assert!(deterministic_claim_oracle(&exp_claims, None).is_err());
}

#[test]
fn deterministic_oracle_matches_simulation() {
    let cfg = config(1.0, 1.0, 1.0, ClaimDistribution::Deterministic(1.0), 5.0);
    let oracle = deterministic_claim_oracle(&cfg, None).unwrap();
    let est = ruin_probability(&cfg, 200_000, 12).unwrap();
    assert!((est.probability - oracle.ruin()).abs() < 3.0 * est.standard_error());
}

#[test]
fn cramer_lundberg_value() {
    let cfg = config(3.0, 1.5, 1.0, ClaimDistribution::Exponential { mean: 1.0 }, 200.0);
    let psi = cramer_lundberg_ruin(&cfg).unwrap();
    assert!((psi - 2.0 / 3.0 * exp(-1.0)).abs() < 1e-15);
    assert!((psi - 0.2453).abs() < 5e-5);
    assert_eq!(cramer_lundberg_ruin(&cfg.with_premium_rate(0.5)).unwrap(), 1.0);
    assert_eq!(cramer_lundberg_ruin(&cfg.with_claim_intensity(0.0)).unwrap(), 0.0);
}

#[test]
fn intensity_sweep_is_monotone() {
    let cfg = config(1.0, 2.0, 1.0, ClaimDistribution::Exponential { mean: 0.5 }, 10.0);
    let sweep = ruin_probability_by_intensity(&cfg, &[0.0, 1.0, 2.0, 4.0, 8.0], 4000, 5).unwrap();
    assert_eq!(sweep[0].probability, 0.0);
    assert!(sweep.windows(2).all(|w| w[0].probability <= w[1].probability));
    assert!(sweep[4].probability > sweep[1].probability);
}

#[test]
fn calibration_without_claims_is_free() {
    let cfg = config(1.0, 0.0, 0.0, ClaimDistribution::Deterministic(1.0), 10.0);
    let settings = CalibrationSettings {
        paths: 100,
        seed: 1,
        resolution: 1e-3,
        max_premium: 10.0,
    };
    assert_eq!(calibrate_premium(&cfg, 0.05, settings).unwrap().premium_rate, 0.0);
}

#[test]
fn calibration_satisfies_bisection_contract() {
    let cfg = config(1.0, 0.0, 5.0, ClaimDistribution::Deterministic(0.5), 10.0);
    let settings = CalibrationSettings {
        paths: 4000,
        seed: 9,
        resolution: 0.01,
        max_premium: 50.0,
    };
    let cal = calibrate_premium(&cfg, 0.05, settings).unwrap();
    let ruin_at = |c| {
        ruin_probability(&cfg.with_premium_rate(c), settings.paths, settings.seed)
            .unwrap()
            .probability
    };
    assert_eq!(ruin_at(cal.premium_rate), cal.ruin_at_premium);
    assert!(cal.ruin_at_premium <= 0.05);
    assert!(ruin_at(cal.premium_rate - settings.resolution) > 0.05);
    assert!(cal.premium_rate - cal.lower_premium < settings.resolution);

    let tight = CalibrationSettings {
        max_premium: 0.5,
        ..settings
    };
    assert!(matches!(
        calibrate_premium(&cfg, 0.05, tight),
        Err(crate::Error::Calibration { .. })
    ));
    assert!(calibrate_premium(&cfg, 1.0, settings).is_err());
}

#[test]
fn calibration_inverts_cramer_lundberg() {
    let cfg = config(3.0, 0.0, 1.0, ClaimDistribution::Exponential { mean: 1.0 }, 200.0);
    let target = 0.1;
    let settings = CalibrationSettings {
        paths: 40_000,
        seed: 2,
        resolution: 0.005,
        max_premium: 10.0,
    };
    let cal = calibrate_premium(&cfg, target, settings).unwrap();
    // Closed-form root by bisection on the analytic curve.
    let psi = |c: f64| cramer_lundberg_ruin(&cfg.with_premium_rate(c)).unwrap();
    let (mut lo, mut hi) = (1.0, 10.0);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if psi(mid) <= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let se = sqrt(target * (1.0 - target) / settings.paths as f64);
    let slope = (psi(hi - 0.01) - psi(hi + 0.01)) / 0.02;
    let tolerance = settings.resolution + 3.0 * se / slope;
    assert!(
        (cal.premium_rate - hi).abs() < tolerance,
        "{} vs {hi} (tol {tolerance})",
        cal.premium_rate
    );
}

#[test]
fn critical_premium_decides_ruin() {
    let cfg = config(0.5, 0.0, 3.0, ClaimDistribution::Exponential { mean: 0.4 }, 5.0);
    for s in 0..300 {
        let k = critical_premium(&cfg, s);
        for c in [0.0, 0.3, 0.9, 1.7, 4.0] {
            assert_eq!(
                path_infimum(&cfg.with_premium_rate(c), s) < 0.0,
                c < k,
                "seed {s} c {c} k {k}"
            );
        }
    }
}

fn arb_claims() -> impl Strategy<Value = ClaimDistribution> {
    prop_oneof![
        (0.05f64..2.0).prop_map(ClaimDistribution::Deterministic),
        (0.05f64..2.0).prop_map(|mean| ClaimDistribution::Exponential { mean }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn infimum_is_monotone_in_reserve_premium_and_intensity(
        seed in any::<u64>(),
        y in 0.0f64..3.0,
        c in 0.0f64..3.0,
        lambda in 0.0f64..5.0,
        dy in 0.0f64..1.0,
        dc in 0.0f64..1.0,
        dl in 0.0f64..2.0,
        claims in arb_claims(),
    ) {
        let cfg = config(y, c, lambda, claims, 10.0);
        let m = path_infimum(&cfg, seed);
        let richer = InsuranceConfig { initial_reserve: y + dy, ..cfg };
        prop_assert!(path_infimum(&richer, seed) >= m);
        prop_assert!(path_infimum(&cfg.with_premium_rate(c + dc), seed) >= m);
        prop_assert!(path_infimum(&cfg.with_claim_intensity(lambda + dl), seed) <= m);
    }

    #[test]
    fn larger_claims_lower_the_infimum(seed in any::<u64>(), mean in 0.05f64..2.0, factor in 1.0f64..3.0) {
        let cfg = config(1.0, 0.5, 2.0, ClaimDistribution::Exponential { mean }, 10.0);
        let heavier = InsuranceConfig { claims: ClaimDistribution::Exponential { mean: mean * factor }, ..cfg };
        prop_assert!(path_infimum(&heavier, seed) <= path_infimum(&cfg, seed));
    }

    #[test]
    fn extra_inspection_times_never_lower_the_infimum(
        seed in any::<u64>(),
        times in proptest::collection::vec(0.0f64..=1.0, 1..40),
        claims in arb_claims(),
    ) {
        let cfg = config(0.5, 0.4, 3.0, claims, 10.0);
        let path = simulate_surplus_path(&cfg, seed).unwrap();
        for u in times {
            prop_assert!(path.reserve_at(u * cfg.horizon) >= path.infimum);
        }
    }
}
