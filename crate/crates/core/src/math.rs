pub(crate) use libm::{ceil, exp, lgamma, log, pow, sqrt, tgamma};

pub(crate) const PI: f64 = core::f64::consts::PI;

pub(crate) fn acos_clamped(x: f64) -> f64 {
    libm::acos(x.clamp(-1.0, 1.0))
}

/// dBm to milliwatts.
pub fn dbm_to_mw(dbm: f64) -> f64 {
    pow(10.0, dbm / 10.0)
}

pub fn mw_to_dbm(mw: f64) -> f64 {
    10.0 * libm::log10(mw)
}

/// Decibels to a linear power ratio.
pub fn db_to_linear(db: f64) -> f64 {
    pow(10.0, db / 10.0)
}

pub fn linear_to_db(ratio: f64) -> f64 {
    10.0 * libm::log10(ratio)
}

/// Half-width of a 95% normal confidence interval for a Bernoulli mean.
pub(crate) fn bernoulli_half_width(p: f64, n: u64) -> f64 {
    1.96 * sqrt(p * (1.0 - p) / n as f64)
}
