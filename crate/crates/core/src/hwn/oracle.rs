//! Closed-form coverage of a single interference-limited Poisson tier.
//!
//! With nearest-BS association, Rayleigh fading and full reuse, the coverage
//! probability conditional on serving distance `r` is
//! `exp(-π ζ r² ρ(τ, μ))` with
//! `ρ(τ, μ) = τ^(2/μ) ∫_{τ^(-2/μ)}^∞ du / (1 + u^(μ/2))`.
//! Averaging over the nearest-neighbour law `2πζ r exp(-πζ r²)` gives
//! `1 / (1 + ρ)`. A Poisson jammer field multiplies the conditional coverage
//! by its Laplace functional
//! `exp(-π ζ_J Γ(1 + 2/μ_J) Γ(1 - 2/μ_J) (τ P_J r^μ / P)^(2/μ_J))`.

use alloc::format;

use crate::error::{invalid, Result};
use crate::math::{exp, pow, tgamma, PI};
use crate::quad::{integrate_to_infinity, Tolerance};

const TOL: Tolerance = Tolerance {
    abs: 1e-14,
    rel: 1e-9,
    max_intervals: 4000,
};

/// Poisson jammer field entering the coverage oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JammerTerm {
    pub density: f64,
    pub power_mw: f64,
    pub pathloss_exponent: f64,
}

fn check_exponent(name: &'static str, mu: f64) -> Result<()> {
    if !(mu > 2.0 && mu.is_finite()) {
        return Err(invalid(name, format!("must exceed 2, got {mu}")));
    }
    Ok(())
}

/// Interference integral `ρ(τ, μ)` for a linear threshold `τ`.
pub fn rho(threshold: f64, mu: f64) -> Result<f64> {
    check_exponent("pathloss_exponent", mu)?;
    if !(threshold >= 0.0 && threshold.is_finite()) {
        return Err(invalid(
            "sinr_threshold",
            format!("must be finite and >= 0, got {threshold}"),
        ));
    }
    if threshold == 0.0 {
        return Ok(0.0);
    }
    let lower = pow(threshold, -2.0 / mu);
    let tail = integrate_to_infinity(|u| 1.0 / (1.0 + pow(u, mu / 2.0)), lower, TOL)?;
    Ok(pow(threshold, 2.0 / mu) * tail.value)
}

/// `Γ(1 + 2/μ) Γ(1 - 2/μ)`, the Rayleigh shot-noise constant of a Poisson field.
pub fn shot_noise_constant(mu: f64) -> Result<f64> {
    check_exponent("jammer.pathloss_exponent", mu)?;
    Ok(tgamma(1.0 + 2.0 / mu) * tgamma(1.0 - 2.0 / mu))
}

/// Coverage probability of the typical user of one Poisson tier
/// (`serving_power_mw`, `serving_density`, exponent `mu`), optionally with a
/// Poisson jammer field. Outage is one minus this value.
pub fn ppp_coverage_oracle(
    threshold: f64,
    mu: f64,
    serving_power_mw: f64,
    serving_density: f64,
    jammer: Option<JammerTerm>,
) -> Result<f64> {
    let rho = rho(threshold, mu)?;
    let Some(j) = jammer.filter(|j| j.density > 0.0) else {
        return Ok(1.0 / (1.0 + rho));
    };
    let constant = shot_noise_constant(j.pathloss_exponent)?;
    if !(serving_density > 0.0 && serving_power_mw > 0.0) {
        return Err(invalid("serving", "density and power must be positive"));
    }
    // Substitute v = π ζ r², so dv = 2π ζ r dr and r^μ = (v / (π ζ))^(μ/2).
    let jam_scale =
        PI * j.density * constant * pow(threshold * j.power_mw / serving_power_mw, 2.0 / j.pathloss_exponent);
    let exponent = mu / j.pathloss_exponent;
    let v_scale = 1.0 / (PI * serving_density);
    let integral = integrate_to_infinity(
        |v| exp(-v * (1.0 + rho) - jam_scale * pow(v * v_scale, exponent)),
        0.0,
        TOL,
    )?;
    Ok(integral.value)
}
