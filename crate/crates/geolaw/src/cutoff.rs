//! Upper-cutoff estimation.
//!
//! Given the multiset of observed object values of one dimension and the
//! shape/rate pair (α, β) of a fitted gamma-type curve (α = a + 1,
//! β = −b), the potential upper cutoff o_M is the fixed point of
//!
//! ```text
//! D_e = N · (o_m / o_M)^(1/α) · e^(β·(o_m − o_M))
//! o_M = o_m · (1 + D_e / N)^(1/α)
//! ```
//!
//! iterated from the largest observed value. N is the number of objects
//! (distinct values by default, total observations by flag), o_m the
//! smallest observed value. The iteration is not guaranteed to contract
//! for every (α, β); a run that oscillates or overflows is reported with
//! `converged = false` and the best finite iterate rather than crashing —
//! the deviation statistic itself may legitimately come out infinite.
//!
//! For a frequency-over-value curve with an interior maximum (a > 0,
//! b < 0) there is also a direct estimate: the positive integer nearest to
//! the curve's peak at −a/b, saturated at the observed maximum.

use crate::fitting::GammaTypeParams;
use crate::jsonfmt::maybe_nonfinite;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative o_M change below which the iteration stops.
pub const CUTOFF_TOLERANCE: f64 = 1e-9;
/// Iteration cap.
pub const MAX_CUTOFF_ITERATIONS: usize = 10_000;

#[derive(Debug, Error)]
pub enum CutoffError {
    #[error("alpha must be nonzero")]
    ZeroAlpha,
    #[error("observed multiset is empty")]
    EmptyObserved,
    #[error("observed values must be positive and finite, got {0}")]
    BadObservedValue(f64),
    #[error("curve has no interior maximum (needs a > 0 and b < 0)")]
    NoInteriorMaximum,
}

/// How N counts the observed multiset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectCounting {
    /// Number of distinct values.
    #[default]
    Distinct,
    /// Total number of observations.
    Total,
}

/// Result of the fixed-point estimation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffEstimate {
    /// Lower cutoff: smallest observed value.
    #[serde(rename = "o_m")]
    pub lower_cutoff: f64,
    /// Largest observed value, also the iteration's starting point.
    #[serde(rename = "oo_M")]
    pub observed_max: f64,
    /// Estimated upper cutoff, clamped to at least the lower cutoff.
    #[serde(rename = "o_M")]
    pub estimated_cutoff: f64,
    /// Deviation statistic at the final iterate; may be infinite.
    #[serde(rename = "d_e", with = "maybe_nonfinite")]
    pub deviation: f64,
    /// Mean deviation over the finite iterates.
    #[serde(rename = "d_e_mean", with = "maybe_nonfinite")]
    pub deviation_mean: f64,
    pub n_objects: u64,
    pub iterations: u32,
    pub converged: bool,
}

/// `D_e = N · (o_m / o_M)^(1/α) · e^(β·(o_m − o_M))`
pub fn deviation_statistic(n: u64, lower: f64, upper: f64, alpha: f64, beta: f64) -> f64 {
    n as f64 * (lower / upper).powf(1.0 / alpha) * (beta * (lower - upper)).exp()
}

/// `o_M = o_m · (1 + D_e / N)^(1/α)`
pub fn cutoff_update(lower: f64, deviation: f64, n: u64, alpha: f64) -> f64 {
    lower * (1.0 + deviation / n as f64).powf(1.0 / alpha)
}

/// Object count N of a multiset under the chosen counting mode.
pub fn count_objects(observed: &[f64], counting: ObjectCounting) -> u64 {
    match counting {
        ObjectCounting::Total => observed.len() as u64,
        ObjectCounting::Distinct => {
            let mut sorted = observed.to_vec();
            sorted.sort_by(f64::total_cmp);
            sorted.dedup();
            sorted.len() as u64
        }
    }
}

/// Fixed-point estimation with distinct-value object counting.
pub fn estimate_cutoff(
    observed: &[f64],
    alpha: f64,
    beta: f64,
) -> Result<CutoffEstimate, CutoffError> {
    estimate_cutoff_with(observed, alpha, beta, ObjectCounting::Distinct)
}

/// Fixed-point estimation of the upper cutoff.
pub fn estimate_cutoff_with(
    observed: &[f64],
    alpha: f64,
    beta: f64,
    counting: ObjectCounting,
) -> Result<CutoffEstimate, CutoffError> {
    if alpha == 0.0 {
        return Err(CutoffError::ZeroAlpha);
    }
    if observed.is_empty() {
        return Err(CutoffError::EmptyObserved);
    }
    for &v in observed {
        if !(v.is_finite() && v > 0.0) {
            return Err(CutoffError::BadObservedValue(v));
        }
    }

    let lower = observed.iter().cloned().fold(f64::INFINITY, f64::min);
    let observed_max = observed.iter().cloned().fold(0.0f64, f64::max);
    let n = count_objects(observed, counting);

    let mut upper = observed_max;
    let mut deviation = f64::NAN;
    let mut deviation_sum = 0.0;
    let mut finite_iterates = 0u32;
    let mut iterations = 0u32;
    let mut converged = false;

    for _ in 0..MAX_CUTOFF_ITERATIONS {
        iterations += 1;
        deviation = deviation_statistic(n, lower, upper, alpha, beta);
        if !deviation.is_finite() {
            break;
        }
        deviation_sum += deviation;
        finite_iterates += 1;
        let next = cutoff_update(lower, deviation, n, alpha);
        if !next.is_finite() {
            break;
        }
        let rel = (next - upper).abs() / next.abs().max(f64::MIN_POSITIVE);
        upper = next;
        if rel < CUTOFF_TOLERANCE {
            converged = true;
            break;
        }
    }

    let deviation_mean = if finite_iterates > 0 {
        deviation_sum / f64::from(finite_iterates)
    } else {
        deviation
    };

    Ok(CutoffEstimate {
        lower_cutoff: lower,
        observed_max,
        estimated_cutoff: upper.max(lower),
        deviation,
        deviation_mean,
        n_objects: n,
        iterations,
        converged,
    })
}

/// Direct cutoff for a frequency-over-value curve with an interior maximum:
/// the better of the two integers flanking the peak −a/b, saturated at the
/// observed maximum.
pub fn fl_special_cutoff(params: &GammaTypeParams, observed_max: f64) -> Result<f64, CutoffError> {
    if params.a <= 0.0 || params.b >= 0.0 {
        return Err(CutoffError::NoInteriorMaximum);
    }
    let peak = -params.a / params.b;
    let lo = peak.floor().max(1.0);
    let hi = peak.ceil().max(1.0);
    let value = |l: f64| params.c * l.powf(params.a) * (params.b * l).exp();
    let candidate = if value(hi) > value(lo) { hi } else { lo };
    Ok(observed_max.max(candidate))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_deviation_forces_lower_cutoff() {
        for alpha in [0.263, 0.5, 1.0, 2.0, -1.5] {
            for lower in [1.0, 3.5, 120.0] {
                assert_eq!(cutoff_update(lower, 0.0, 100, alpha), lower);
            }
        }
    }

    #[test]
    fn converged_run_satisfies_fixed_point_residual() {
        // Decaying gamma-type values: a = 1, b = −0.2 → α = 2, β = 0.2.
        let observed: Vec<f64> = (1..=50)
            .map(|i| {
                let x = i as f64;
                0.5 * x * (-0.2 * x).exp()
            })
            .collect();
        let estimate = estimate_cutoff(&observed, 2.0, 0.2).unwrap();
        assert!(estimate.converged, "{estimate:?}");
        assert!(estimate.estimated_cutoff >= estimate.lower_cutoff);

        let next = cutoff_update(
            estimate.lower_cutoff,
            estimate.deviation,
            estimate.n_objects,
            2.0,
        );
        let residual = (estimate.estimated_cutoff - next).abs() / estimate.estimated_cutoff;
        assert!(residual < 1e-6, "residual {residual}");
    }

    #[test]
    fn idempotent_at_the_fixed_point() {
        let observed = [1.0, 2.0, 4.0, 9.0, 20.0, 50.0];
        let estimate = estimate_cutoff(&observed, 2.0, 0.2).unwrap();
        assert!(estimate.converged);
        let dev = deviation_statistic(
            estimate.n_objects,
            estimate.lower_cutoff,
            estimate.estimated_cutoff,
            2.0,
            0.2,
        );
        let next = cutoff_update(estimate.lower_cutoff, dev, estimate.n_objects, 2.0);
        let rel = (next - estimate.estimated_cutoff).abs() / estimate.estimated_cutoff;
        assert!(rel < 1e-6, "step moved the fixed point by {rel}");
    }

    #[test]
    fn overflowing_deviation_is_reported_not_fatal() {
        // β < 0 with a large span makes e^(β(o_m − o_M)) overflow.
        let estimate = estimate_cutoff(&[1.0, 2000.0], 0.5, -1.0).unwrap();
        assert!(!estimate.converged);
        assert!(estimate.deviation.is_infinite());
        assert!(estimate.estimated_cutoff.is_finite());
        assert!(estimate.estimated_cutoff >= estimate.lower_cutoff);
    }

    #[test]
    fn non_contracting_parameters_hit_the_cap() {
        // Small α with o_m = 1 oscillates between o_m and o_m·2^(1/α).
        let observed: Vec<f64> = (1..=100).map(f64::from).collect();
        let estimate = estimate_cutoff(&observed, 0.15, 0.004).unwrap();
        assert!(!estimate.converged);
        assert_eq!(estimate.iterations as usize, MAX_CUTOFF_ITERATIONS);
        assert!(estimate.estimated_cutoff >= estimate.lower_cutoff);
        assert!(estimate.deviation_mean.is_finite());
    }

    #[test]
    fn scaling_the_data_scales_both_observed_cutoffs() {
        let observed = [1.0, 2.0, 4.0, 9.0, 20.0, 50.0];
        let scaled: Vec<f64> = observed.iter().map(|v| v * 7.0).collect();
        let base = estimate_cutoff(&observed, 2.0, 0.2).unwrap();
        let big = estimate_cutoff(&scaled, 2.0, 0.2).unwrap();
        assert_eq!(big.lower_cutoff, base.lower_cutoff * 7.0);
        assert_eq!(big.observed_max, base.observed_max * 7.0);
    }

    #[test]
    fn object_counting_modes() {
        let observed = [1.0, 1.0, 2.0, 2.0, 3.0];
        let distinct = estimate_cutoff(&observed, 2.0, 0.2).unwrap();
        let total = estimate_cutoff_with(&observed, 2.0, 0.2, ObjectCounting::Total).unwrap();
        assert_eq!(distinct.n_objects, 3);
        assert_eq!(total.n_objects, 5);
    }

    #[test]
    fn input_validation() {
        assert!(matches!(
            estimate_cutoff(&[1.0], 0.0, 0.1),
            Err(CutoffError::ZeroAlpha)
        ));
        assert!(matches!(
            estimate_cutoff(&[], 1.0, 0.1),
            Err(CutoffError::EmptyObserved)
        ));
        assert!(matches!(
            estimate_cutoff(&[1.0, -2.0], 1.0, 0.1),
            Err(CutoffError::BadObservedValue(_))
        ));
    }

    #[test]
    fn fl_special_cases() {
        // Peak exactly at 7; saturates at the larger observed maximum.
        let params = GammaTypeParams {
            c: 0.013,
            a: 1.792,
            b: -0.256,
        };
        assert_eq!(fl_special_cutoff(&params, 25_467.0).unwrap(), 25_467.0);

        // Peak at 2 dominates a small observed maximum.
        let params = GammaTypeParams {
            c: 1.0,
            a: 2.0,
            b: -1.0,
        };
        assert_eq!(fl_special_cutoff(&params, 1.0).unwrap(), 2.0);

        // Positive rate: unbounded curve, no interior maximum.
        let params = GammaTypeParams {
            c: 1.0,
            a: 2.0,
            b: 0.1,
        };
        assert!(matches!(
            fl_special_cutoff(&params, 1.0),
            Err(CutoffError::NoInteriorMaximum)
        ));
    }

    #[test]
    fn fl_picks_the_better_flanking_integer() {
        // Peak at 2.5: f(2) vs f(3) decides.
        let params = GammaTypeParams {
            c: 1.0,
            a: 2.5,
            b: -1.0,
        };
        let f = |l: f64| params.c * l.powf(params.a) * (params.b * l).exp();
        let expect = if f(3.0) > f(2.0) { 3.0 } else { 2.0 };
        assert_eq!(fl_special_cutoff(&params, 0.5).unwrap(), expect);
    }

    #[test]
    fn estimate_serializes_nonfinite_deviation() {
        let estimate = estimate_cutoff(&[1.0, 2000.0], 0.5, -1.0).unwrap();
        let json = crate::jsonfmt::to_canonical_json(&estimate).unwrap();
        assert!(json.contains("\"d_e\": \"inf\""), "{json}");
        let back: CutoffEstimate = serde_json::from_str(&json).unwrap();
        assert!(back.deviation.is_infinite());
    }
}
