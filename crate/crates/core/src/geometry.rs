//! Point processes on a disk and the summary statistics used to validate them.
//!
//! The α-Ginibre process of intensity `ζ` is built as an independent thinning,
//! with retention probability `α`, of a Ginibre process of intensity `ζ/α`.
//! This keeps the intensity at `ζ` and gives the pair correlation
//! `1 - exp(-π ζ r² / α)`, which tends to the Poisson value 1 as `α → 0`.
//!
//! Ginibre points are eigenvalues of an `M`×`M` matrix of independent standard
//! complex Gaussians. Unscaled they have intensity `1/π` on the disk of radius
//! `√M`; coordinates are rescaled by `1/√(π ζ')` and points outside the window
//! are dropped. `M = ⌈1.25 π ζ' R²⌉` keeps the window well inside the bulk.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};

use crate::error::{invalid, Error, Result};
use crate::linalg::ComplexMatrix;
use crate::math::{acos_clamped, ceil, exp, sqrt, PI};
use crate::seed;

/// Circular observation window centred at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    radius: f64,
}

impl Window {
    pub fn new(radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(invalid(
                "window.radius",
                format!("must be positive and finite, got {radius}"),
            ));
        }
        Ok(Self { radius })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn area(&self) -> f64 {
        PI * self.radius * self.radius
    }

    pub fn contains(&self, p: Point) -> bool {
        p.norm() < self.radius
    }

    /// Area of the window intersected with its translate by a vector of length `d`.
    pub fn overlap_area(&self, d: f64) -> f64 {
        let r = self.radius;
        if d >= 2.0 * r {
            return 0.0;
        }
        2.0 * r * r * acos_clamped(d / (2.0 * r)) - 0.5 * d * sqrt(4.0 * r * r - d * d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Distance to the origin.
    pub fn norm(&self) -> f64 {
        libm::hypot(self.x, self.y)
    }

    pub fn distance(&self, other: &Point) -> f64 {
        libm::hypot(self.x - other.x, self.y - other.y)
    }

    fn scaled(&self, factor: f64) -> Point {
        Point::new(self.x * factor, self.y * factor)
    }
}

/// Which point process generated a pattern.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Process {
    /// Homogeneous Poisson, the `α → 0` limit.
    Poisson,
    /// α-Ginibre with repulsion `alpha ∈ (0, 1]`.
    AlphaGinibre { alpha: f64 },
}

impl Process {
    pub fn alpha_ginibre(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(invalid("repulsion", format!("alpha must lie in (0, 1], got {alpha}")));
        }
        Ok(Self::AlphaGinibre { alpha })
    }

    /// Repulsion parameter, with Poisson reported as `0`.
    pub fn alpha(&self) -> f64 {
        match self {
            Process::Poisson => 0.0,
            Process::AlphaGinibre { alpha } => *alpha,
        }
    }
}

/// Intensity and repulsion of a stationary point process.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProcessSpec {
    pub density: f64,
    pub process: Process,
}

impl ProcessSpec {
    pub fn poisson(density: f64) -> Result<Self> {
        let spec = Self {
            density,
            process: Process::Poisson,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn alpha_ginibre(density: f64, alpha: f64) -> Result<Self> {
        let spec = Self {
            density,
            process: Process::alpha_ginibre(alpha)?,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.density >= 0.0 && self.density.is_finite()) {
            return Err(invalid(
                "density",
                format!("must be finite and >= 0, got {}", self.density),
            ));
        }
        if let Process::AlphaGinibre { alpha } = self.process {
            Process::alpha_ginibre(alpha)?;
        }
        Ok(())
    }

    /// Target pair correlation at distance `r`.
    pub fn pair_correlation(&self, r: f64) -> f64 {
        match self.process {
            Process::Poisson => 1.0,
            Process::AlphaGinibre { alpha } => ginibre_pair_correlation(self.density / alpha, r),
        }
    }
}

/// Pair correlation `1 - exp(-π ζ r²)` of the Ginibre process of intensity `ζ`.
pub fn ginibre_pair_correlation(density: f64, r: f64) -> f64 {
    1.0 - exp(-PI * density * r * r)
}

/// Caps the matrix dimension of the Ginibre sampler.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplerLimits {
    pub max_matrix_dim: usize,
}

impl Default for SamplerLimits {
    fn default() -> Self {
        Self { max_matrix_dim: 2048 }
    }
}

/// A finite set of points inside a window.
#[derive(Debug, Clone, PartialEq)]
pub struct PointPattern {
    pub points: Vec<Point>,
    pub window: Window,
    pub process: Process,
}

impl PointPattern {
    pub fn empty(window: Window, process: Process) -> Self {
        Self {
            points: Vec::new(),
            window,
            process,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Index and distance to the origin of the closest point.
    pub fn nearest_to_origin(&self) -> Option<(usize, f64)> {
        self.points
            .iter()
            .map(Point::norm)
            .enumerate()
            .fold(None, |best, (i, d)| match best {
                Some((_, bd)) if bd <= d => best,
                _ => Some((i, d)),
            })
    }

    fn has_coincident_points(&self) -> bool {
        let mut sorted: Vec<Point> = self.points.clone();
        sorted.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
        sorted.windows(2).any(|w| w[0] == w[1])
    }
}

const MAX_ATTEMPTS: u64 = 8;

/// Homogeneous Poisson pattern: Poisson(ζπR²) count, points uniform on the disk.
pub fn sample_ppp(spec: &ProcessSpec, window: Window, seed: u64) -> Result<PointPattern> {
    spec.validate()?;
    if spec.process != Process::Poisson {
        return Err(invalid("process", "sample_ppp needs a Poisson spec"));
    }
    for attempt in 0..MAX_ATTEMPTS {
        let pattern = PointPattern {
            points: uniform_disk_points(spec.density, window, &mut seed::child_rng(seed, "ppp", attempt)),
            window,
            process: Process::Poisson,
        };
        if !pattern.has_coincident_points() {
            return Ok(pattern);
        }
    }
    Err(Error::InvalidInput(
        "could not sample a pattern without coincident points".into(),
    ))
}

fn uniform_disk_points(density: f64, window: Window, rng: &mut seed::SimRng) -> Vec<Point> {
    let mean = density * window.area();
    if mean <= 0.0 {
        return Vec::new();
    }
    let n = match Poisson::new(mean) {
        Ok(p) => p.sample(rng) as usize,
        Err(_) => 0,
    };
    let r = window.radius();
    (0..n)
        .map(|_| {
            let rho = r * sqrt(rng.random::<f64>());
            let theta = 2.0 * PI * rng.random::<f64>();
            Point::new(rho * libm::cos(theta), rho * libm::sin(theta))
        })
        .filter(|p| window.contains(*p))
        .collect()
}

/// Matrix dimension used to sample a Ginibre process of intensity `density`.
pub fn ginibre_matrix_dim(density: f64, window: Window) -> usize {
    ceil(1.25 * PI * density * window.radius() * window.radius()) as usize
}

/// Ginibre process of intensity `density` restricted to the window.
pub fn sample_ginibre(density: f64, window: Window, seed: u64, limits: SamplerLimits) -> Result<Vec<Point>> {
    if !(density >= 0.0 && density.is_finite()) {
        return Err(invalid("density", format!("must be finite and >= 0, got {density}")));
    }
    let m = ginibre_matrix_dim(density, window);
    if m > limits.max_matrix_dim {
        return Err(Error::ResourceLimit(format!(
            "Ginibre sampler needs a {m}x{m} matrix (cap {})",
            limits.max_matrix_dim
        )));
    }
    if m == 0 {
        return Ok(Vec::new());
    }
    let mut rng = seed::child_rng(seed, "ginibre", 0);
    let half = sqrt(0.5);
    let matrix = ComplexMatrix::from_fn(m, |_, _| {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        Complex64::new(re * half, im * half)
    });
    let scale = 1.0 / sqrt(PI * density);
    Ok(matrix
        .into_eigenvalues()?
        .into_iter()
        .map(|z| Point::new(z.re * scale, z.im * scale))
        .filter(|p| window.contains(*p))
        .collect())
}

/// α-Ginibre pattern via thinning of a Ginibre process of intensity `ζ/α`.
pub fn sample_alpha_gpp(spec: &ProcessSpec, window: Window, seed: u64) -> Result<PointPattern> {
    sample_alpha_gpp_with_limits(spec, window, seed, SamplerLimits::default())
}

pub fn sample_alpha_gpp_with_limits(
    spec: &ProcessSpec,
    window: Window,
    seed: u64,
    limits: SamplerLimits,
) -> Result<PointPattern> {
    spec.validate()?;
    let Process::AlphaGinibre { alpha } = spec.process else {
        return Err(invalid("process", "sample_alpha_gpp needs an alpha-Ginibre spec"));
    };
    if spec.density == 0.0 {
        return Ok(PointPattern::empty(window, spec.process));
    }
    for attempt in 0..MAX_ATTEMPTS {
        let attempt_seed = seed::child_seed(seed, "alpha-gpp", attempt);
        let base = sample_ginibre(spec.density / alpha, window, attempt_seed, limits)?;
        let mut keep = seed::child_rng(attempt_seed, "thinning", 0);
        let points = if alpha >= 1.0 {
            base
        } else {
            base.into_iter().filter(|_| keep.random::<f64>() < alpha).collect()
        };
        let pattern = PointPattern {
            points,
            window,
            process: spec.process,
        };
        if !pattern.has_coincident_points() {
            return Ok(pattern);
        }
    }
    Err(Error::InvalidInput(
        "could not sample a pattern without coincident points".into(),
    ))
}

/// Samples any supported process.
pub fn sample(spec: &ProcessSpec, window: Window, seed: u64, limits: SamplerLimits) -> Result<PointPattern> {
    match spec.process {
        Process::Poisson => sample_ppp(spec, window, seed),
        Process::AlphaGinibre { .. } => sample_alpha_gpp_with_limits(spec, window, seed, limits),
    }
}

/// A pattern sampled at a maximal density that can be pushed outwards to any
/// lower density.
///
/// Scaling coordinates by `√(ζ_max/ζ)` maps a stationary pattern of intensity
/// `ζ_max` to one of intensity `ζ` with the same law for both Poisson and
/// α-Ginibre processes (repulsion is preserved). Distances to the origin only
/// grow as `ζ` falls, and the retained set shrinks, so any quantity that is
/// monotone in the point configuration is monotone in `ζ` path by path.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityCoupling {
    base: PointPattern,
    base_density: f64,
}

impl DensityCoupling {
    pub fn sample(spec: &ProcessSpec, window: Window, seed: u64, limits: SamplerLimits) -> Result<Self> {
        Ok(Self {
            base: sample(spec, window, seed, limits)?,
            base_density: spec.density,
        })
    }

    pub fn base(&self) -> &PointPattern {
        &self.base
    }

    pub fn base_density(&self) -> f64 {
        self.base_density
    }

    /// Points of the coupled pattern at `density`, tagged with their index in
    /// the base pattern.
    pub fn at_density(&self, density: f64) -> Result<Vec<(usize, Point)>> {
        if !(density >= 0.0 && density <= self.base_density) {
            return Err(invalid(
                "density",
                format!("coupled density {density} outside [0, {}]", self.base_density),
            ));
        }
        if density == 0.0 {
            return Ok(Vec::new());
        }
        let factor = sqrt(self.base_density / density);
        let window = self.base.window;
        Ok(self
            .base
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| (i, p.scaled(factor)))
            .filter(|(_, p)| window.contains(*p))
            .collect())
    }

    pub fn pattern_at(&self, density: f64) -> Result<PointPattern> {
        Ok(PointPattern {
            points: self.at_density(density)?.into_iter().map(|(_, p)| p).collect(),
            window: self.base.window,
            process: self.base.process,
        })
    }
}

/// One bin of a pair-correlation estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairCorrelationBin {
    pub r_lo: f64,
    pub r_hi: f64,
    pub g: f64,
}

impl PairCorrelationBin {
    pub fn r_mid(&self) -> f64 {
        0.5 * (self.r_lo + self.r_hi)
    }
}

/// Translation-corrected pair-correlation estimate pooled over patterns.
///
/// Each ordered pair at distance `d` is weighted by `1/|W ∩ (W + d)|`; the
/// squared intensity is estimated per pattern by `n(n-1)/|W|²`.
pub fn pair_correlation(patterns: &[PointPattern], bin_edges: &[f64]) -> Result<Vec<PairCorrelationBin>> {
    if patterns.len() < 2 {
        return Err(Error::InvalidInput(
            "pair correlation needs at least two patterns".into(),
        ));
    }
    let window = patterns[0].window;
    if patterns.iter().any(|p| p.window != window) {
        return Err(Error::InvalidInput("patterns have mismatched windows".into()));
    }
    if bin_edges.len() < 2 || bin_edges.windows(2).any(|w| !(w[1] > w[0])) || bin_edges[0] < 0.0 {
        return Err(Error::InvalidInput(
            "bin edges must be non-negative and strictly increasing".into(),
        ));
    }
    let r_max = *bin_edges.last().unwrap_or(&0.0);
    if r_max >= 2.0 * window.radius() {
        return Err(Error::InvalidInput(format!(
            "largest bin edge {r_max} must be below the window diameter"
        )));
    }
    let bins = bin_edges.len() - 1;
    let mut weighted = alloc::vec![0.0f64; bins];
    let mut intensity_sq = 0.0;
    let area = window.area();
    for pattern in patterns {
        let n = pattern.len() as f64;
        intensity_sq += n * (n - 1.0) / (area * area);
        for (i, a) in pattern.points.iter().enumerate() {
            for b in &pattern.points[i + 1..] {
                let d = a.distance(b);
                if d < bin_edges[0] || d >= r_max {
                    continue;
                }
                let k = bin_edges.partition_point(|&e| e <= d) - 1;
                // Each unordered pair counts twice.
                weighted[k] += 2.0 / window.overlap_area(d);
            }
        }
    }
    Ok(bin_edges
        .windows(2)
        .zip(weighted)
        .map(|(e, w)| {
            let ring = PI * (e[1] * e[1] - e[0] * e[0]);
            let g = if intensity_sq > 0.0 {
                w / (ring * intensity_sq)
            } else {
                0.0
            };
            PairCorrelationBin {
                r_lo: e[0],
                r_hi: e[1],
                g,
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountStatistics {
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    pub patterns: usize,
}

impl CountStatistics {
    /// Standard error of the mean count.
    pub fn standard_error(&self) -> f64 {
        sqrt(self.variance / self.patterns as f64)
    }
}

pub fn count_statistics(patterns: &[PointPattern]) -> Result<CountStatistics> {
    if patterns.len() < 2 {
        return Err(Error::InvalidInput(
            "count statistics need at least two patterns".into(),
        ));
    }
    let n = patterns.len() as f64;
    let mean = patterns.iter().map(|p| p.len() as f64).sum::<f64>() / n;
    let variance = patterns
        .iter()
        .map(|p| {
            let d = p.len() as f64 - mean;
            d * d
        })
        .sum::<f64>()
        / (n - 1.0);
    Ok(CountStatistics {
        mean,
        variance,
        patterns: patterns.len(),
    })
}
