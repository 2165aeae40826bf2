//! Bernoulli placement simulator.
//!
//! A stream of `n_tokens` independent Bernoulli(p) decisions models a
//! writer choosing, token by token, whether to place the next entity. The
//! gap between consecutive placements — failures before a success — is
//! geometric with mean (1−p)/p, and the accumulated gap per k consecutive
//! placements is negative-binomial with mean k(1−p)/p and variance
//! k(1−p)/p². In the continuous limit those become the exponential and
//! gamma waiting times, with rate β = −ln(1−p) ≈ p for small p; the check
//! below reports the empirically fitted rate next to both readings.
//!
//! Decisions come from a ChaCha8 stream keyed by the seed, so a
//! configuration reproduces bit-identical samples across runs and
//! platforms; parallel replicas should vary the seed.

use crate::fitting::{self, FamilyParams};
use rand::distributions::{Bernoulli, Distribution};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GenModelError {
    #[error("placement probability must be in (0, 1], got {0}")]
    InvalidProbability(f64),
    #[error("token stream must hold at least one decision")]
    EmptyStream,
    #[error("successes per waiting time (k) must be at least 1")]
    ZeroK,
    #[error("need at least {need} gaps, got {got}")]
    InsufficientGaps { need: usize, got: usize },
}

/// Simulation configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlacementConfig {
    /// Per-decision placement probability, in (0, 1].
    pub p: f64,
    /// Number of Bernoulli decisions to draw.
    pub n_tokens: u64,
    /// Successes accumulated per recorded waiting time.
    pub k: u32,
    pub seed: u64,
}

impl PlacementConfig {
    pub fn validate(&self) -> Result<(), GenModelError> {
        if !(self.p > 0.0 && self.p <= 1.0) || !self.p.is_finite() {
            return Err(GenModelError::InvalidProbability(self.p));
        }
        if self.n_tokens == 0 {
            return Err(GenModelError::EmptyStream);
        }
        if self.k == 0 {
            return Err(GenModelError::ZeroK);
        }
        Ok(())
    }
}

/// Waiting times extracted from one simulated stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapSample {
    /// Failures accumulated per k successes; the first gap counts from the
    /// stream start, a trailing incomplete group is dropped.
    pub gaps: Vec<u64>,
    /// Total successes in the stream, including any incomplete group.
    pub n_successes: u64,
}

impl GapSample {
    pub fn mean(&self) -> Option<f64> {
        if self.gaps.is_empty() {
            return None;
        }
        Some(self.gaps.iter().sum::<u64>() as f64 / self.gaps.len() as f64)
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> Option<f64> {
        if self.gaps.len() < 2 {
            return None;
        }
        let mean = self.mean()?;
        let ss: f64 = self
            .gaps
            .iter()
            .map(|&g| {
                let d = g as f64 - mean;
                d * d
            })
            .sum();
        Some(ss / (self.gaps.len() - 1) as f64)
    }

    /// Histogram of gap values, ascending.
    pub fn histogram(&self) -> BTreeMap<u64, u64> {
        let mut hist = BTreeMap::new();
        for &g in &self.gaps {
            *hist.entry(g).or_insert(0) += 1;
        }
        hist
    }
}

/// Draw the decision stream and collect waiting times.
pub fn simulate_gaps(config: &PlacementConfig) -> Result<GapSample, GenModelError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let coin = Bernoulli::new(config.p).expect("probability validated");

    let expected = (config.n_tokens as f64 * config.p / config.k as f64 * 1.05) as usize + 16;
    let mut gaps = Vec::with_capacity(expected);
    let mut failures: u64 = 0;
    let mut group_successes: u32 = 0;
    let mut n_successes: u64 = 0;

    for _ in 0..config.n_tokens {
        if coin.sample(&mut rng) {
            n_successes += 1;
            group_successes += 1;
            if group_successes == config.k {
                gaps.push(failures);
                failures = 0;
                group_successes = 0;
            }
        } else {
            failures += 1;
        }
    }

    Ok(GapSample { gaps, n_successes })
}

/// Minimum sample size for the distribution check.
pub const MIN_GAPS_FOR_CHECK: usize = 10_000;

/// Outcome of the distribution check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapCheck {
    /// KL divergence of the empirical gap pmf against the geometric pmf
    /// with success probability p, truncated at the largest observed gap.
    pub kl_vs_geometric: f64,
    /// Exponential rate −b of a gamma-type curve fitted to the empirical
    /// frequency-distance series; `None` when the support is too small to
    /// fit. Compare against −ln(1−p) (and p for small p).
    pub fitted_rate: Option<f64>,
}

/// Geometric pmf (failures before first success) truncated at `t_max`
/// inclusive and renormalized.
pub fn truncated_geometric_pmf(p: f64, t_max: u64) -> Vec<f64> {
    let q = 1.0 - p;
    let mut pmf: Vec<f64> = (0..=t_max).map(|t| p * q.powf(t as f64)).collect();
    let total: f64 = pmf.iter().sum();
    for v in &mut pmf {
        *v /= total;
    }
    pmf
}

/// Compare a gap sample against its theoretical law.
pub fn gap_distribution_check(sample: &GapSample, p: f64) -> Result<GapCheck, GenModelError> {
    if !(p > 0.0 && p <= 1.0) || !p.is_finite() {
        return Err(GenModelError::InvalidProbability(p));
    }
    if sample.gaps.len() < MIN_GAPS_FOR_CHECK {
        return Err(GenModelError::InsufficientGaps {
            need: MIN_GAPS_FOR_CHECK,
            got: sample.gaps.len(),
        });
    }

    let t_max = *sample.gaps.iter().max().expect("non-empty sample");
    let mut counts = vec![0u64; t_max as usize + 1];
    for &g in &sample.gaps {
        counts[g as usize] += 1;
    }
    let n = sample.gaps.len() as f64;
    let empirical: Vec<f64> = counts.iter().map(|&c| c as f64 / n).collect();
    let geometric = truncated_geometric_pmf(p, t_max);
    let kl_vs_geometric = fitting::kl_divergence(&empirical, &geometric)
        .expect("both pmfs are normalized and non-negative");

    Ok(GapCheck {
        kl_vs_geometric,
        fitted_rate: fitted_gap_rate(sample),
    })
}

/// Fit a gamma-type curve to the empirical frequency-distance series of the
/// gaps and return its exponential rate −b.
pub fn fitted_gap_rate(sample: &GapSample) -> Option<f64> {
    let hist = sample.histogram();
    if hist.len() < 4 {
        return None;
    }
    let total: u64 = hist.values().sum();
    let offset = if hist.contains_key(&0) { 1 } else { 0 };
    let xs: Vec<f64> = hist.keys().map(|&g| (g + offset) as f64).collect();
    let ys: Vec<f64> = hist.values().map(|&c| c as f64 / total as f64).collect();
    match fitting::fit_gamma_type(&xs, &ys) {
        Ok(report) => match report.params {
            FamilyParams::GammaType(params) => Some(params.rate()),
            _ => None,
        },
        Err(_) => None,
    }
}
