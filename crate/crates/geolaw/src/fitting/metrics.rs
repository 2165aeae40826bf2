//! Goodness-of-fit metrics.
//!
//! Four scores compare an observed vector `p` against a fitted vector `q`:
//!
//! * `R² = 1 − Σ(pᵢ−qᵢ)² / Σ(pᵢ−avg(p))²` — primary score; above 0.9 is a
//!   strong fit, above 0.8 acceptable.
//! * `KL = Σ pᵢ ln(pᵢ/qᵢ)` over normalized vectors; fitted mass below
//!   [`Q_CLAMP`] is raised to the clamp and `q` renormalized so a curve that
//!   touches zero cannot blow the divergence up to infinity.
//! * `JS = ½Σ pᵢ ln(pᵢ/(pᵢ+qᵢ)) + ½Σ qᵢ ln(qᵢ/(pᵢ+qᵢ)) + ln 2`, symmetric
//!   and bounded by ln 2; zero-numerator terms contribute 0.
//! * `MAPE = mean over pᵢ ≠ 0 of |qᵢ−pᵢ|/|pᵢ|`, kept as a fraction here and
//!   multiplied by 100 only for human-facing output.
//!
//! Natural logarithms throughout.

use serde::{Deserialize, Serialize};
use std::f64::consts::LN_2;
use thiserror::Error;

/// Floor applied to fitted mass in the KL divergence.
pub const Q_CLAMP: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum MetricError {
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("need at least {need} values, got {got}")]
    TooFewValues { need: usize, got: usize },
    #[error("observed values are constant; variance undefined")]
    UndefinedVariance,
    #[error("vector has no mass; cannot normalize")]
    ZeroMass,
    #[error("negative entry {value} at index {index}")]
    NegativeEntry { index: usize, value: f64 },
    #[error("all observed values are zero")]
    AllZeroObserved,
}

/// Coefficient of determination of `q` against observed `p`.
pub fn r_squared(p: &[f64], q: &[f64]) -> Result<f64, MetricError> {
    check_lengths(p, q)?;
    if p.len() < 2 {
        return Err(MetricError::TooFewValues {
            need: 2,
            got: p.len(),
        });
    }
    let mean = p.iter().sum::<f64>() / p.len() as f64;
    let ss_tot: f64 = p.iter().map(|v| (v - mean) * (v - mean)).sum();
    if ss_tot == 0.0 {
        return Err(MetricError::UndefinedVariance);
    }
    let ss_res = sse(p, q);
    Ok(1.0 - ss_res / ss_tot)
}

/// Sum of squared deviations Σ(pᵢ−qᵢ)².
pub fn sse(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// Kullback-Leibler divergence of normalized `p` from normalized, clamped `q`.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> Result<f64, MetricError> {
    check_lengths(p, q)?;
    let p = normalized(p)?;
    let mut q = normalized(q)?;
    let mut clamped = false;
    for v in &mut q {
        if *v < Q_CLAMP {
            *v = Q_CLAMP;
            clamped = true;
        }
    }
    if clamped {
        let s: f64 = q.iter().sum();
        for v in &mut q {
            *v /= s;
        }
    }
    let mut total = 0.0;
    for (a, b) in p.iter().zip(&q) {
        if *a > 0.0 {
            total += a * (a / b).ln();
        }
    }
    Ok(total.max(0.0))
}

/// Jensen-Shannon divergence of normalized `p` and `q`; symmetric, in [0, ln 2].
pub fn js_divergence(p: &[f64], q: &[f64]) -> Result<f64, MetricError> {
    check_lengths(p, q)?;
    let p = normalized(p)?;
    let q = normalized(q)?;
    let mut total = 0.0;
    for (a, b) in p.iter().zip(&q) {
        let m = a + b;
        if *a > 0.0 {
            total += 0.5 * a * (a / m).ln();
        }
        if *b > 0.0 {
            total += 0.5 * b * (b / m).ln();
        }
    }
    Ok((total + LN_2).max(0.0))
}

/// Mean absolute percentage error as a fraction, skipping zero observations.
pub fn mape(p: &[f64], q: &[f64]) -> Result<f64, MetricError> {
    check_lengths(p, q)?;
    let mut total = 0.0;
    let mut n = 0usize;
    for (a, b) in p.iter().zip(q) {
        if *a != 0.0 {
            total += ((b - a) / a).abs();
            n += 1;
        }
    }
    if n == 0 {
        return Err(MetricError::AllZeroObserved);
    }
    Ok(total / n as f64)
}

fn check_lengths(p: &[f64], q: &[f64]) -> Result<(), MetricError> {
    if p.len() != q.len() {
        return Err(MetricError::LengthMismatch(p.len(), q.len()));
    }
    Ok(())
}

fn normalized(v: &[f64]) -> Result<Vec<f64>, MetricError> {
    for (index, &value) in v.iter().enumerate() {
        if value < 0.0 {
            return Err(MetricError::NegativeEntry { index, value });
        }
    }
    let s: f64 = v.iter().sum();
    if s <= 0.0 || !s.is_finite() {
        return Err(MetricError::ZeroMass);
    }
    Ok(v.iter().map(|x| x / s).collect())
}

/// Fit quality bucket derived from R² alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QualityLabel {
    Strong,
    Acceptable,
    Poor,
}

impl QualityLabel {
    /// Strong above 0.9, acceptable above 0.8, poor otherwise.
    pub fn from_r_squared(r2: f64) -> Self {
        if r2 > 0.9 {
            QualityLabel::Strong
        } else if r2 > 0.8 {
            QualityLabel::Acceptable
        } else {
            QualityLabel::Poor
        }
    }
}

/// The four scores plus the R²-derived quality bucket.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitMetrics {
    pub r_squared: f64,
    pub kl: f64,
    pub js: f64,
    pub mape: f64,
    pub quality_label: QualityLabel,
}

/// Compute all four metrics of `fitted` against `observed`.
///
/// A constant observed series has no variance, so R² is taken as 1 when the
/// fit reproduces it exactly and 0 otherwise; this keeps degenerate flat
/// series reportable instead of erroring out of the whole fit.
pub fn fit_metrics(observed: &[f64], fitted: &[f64]) -> Result<FitMetrics, MetricError> {
    let r_squared = match r_squared(observed, fitted) {
        Ok(v) => v,
        Err(MetricError::UndefinedVariance) => {
            if sse(observed, fitted) == 0.0 {
                1.0
            } else {
                0.0
            }
        }
        Err(e) => return Err(e),
    };
    Ok(FitMetrics {
        r_squared,
        kl: kl_divergence(observed, fitted)?,
        js: js_divergence(observed, fitted)?,
        mape: mape(observed, fitted)?,
        quality_label: QualityLabel::from_r_squared(r_squared),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn r_squared_perfect_fit_is_one() {
        let p = [0.3, 1.7, 4.4, 2.2];
        assert_eq!(r_squared(&p, &p).unwrap(), 1.0);
    }

    #[test]
    fn r_squared_mean_baseline_is_zero() {
        let p = [1.0, 2.0, 3.0, 6.0];
        let mean = 3.0;
        let q = [mean; 4];
        assert!(r_squared(&p, &q).unwrap().abs() < 1e-15);
    }

    #[test]
    fn r_squared_hand_value() {
        // Σ(p−q)² = 1, Σ(p−avg)² = 2 → 1 − 1/2
        let r2 = r_squared(&[1.0, 2.0, 3.0], &[1.0, 2.0, 4.0]).unwrap();
        assert!((r2 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn r_squared_constant_observed_errors() {
        let err = r_squared(&[2.0, 2.0, 2.0], &[1.0, 2.0, 3.0]).unwrap_err();
        assert!(matches!(err, MetricError::UndefinedVariance));
    }

    #[test]
    fn kl_identical_is_zero() {
        let p = [0.2, 0.5, 0.3];
        assert_eq!(kl_divergence(&p, &p).unwrap(), 0.0);
    }

    #[test]
    fn kl_single_term() {
        let kl = kl_divergence(&[1.0, 0.0], &[0.5, 0.5]).unwrap();
        assert!((kl - LN_2).abs() < 1e-15);
    }

    #[test]
    fn kl_hand_value() {
        // 0.5·ln 2 + 0.5·ln(2/3) ≈ 0.143841
        let kl = kl_divergence(&[0.5, 0.5], &[0.25, 0.75]).unwrap();
        let expect = 0.5 * LN_2 + 0.5 * (2.0f64 / 3.0).ln();
        assert!((kl - expect).abs() < 1e-15);
        assert!((kl - 0.143841).abs() < 1e-6);
    }

    #[test]
    fn kl_clamps_zero_fitted_mass() {
        let kl = kl_divergence(&[0.5, 0.5], &[1.0, 0.0]).unwrap();
        assert!(kl.is_finite());
        assert!(kl > 1.0);
    }

    #[test]
    fn js_identical_is_zero() {
        let p = [0.1, 0.6, 0.3];
        assert!(js_divergence(&p, &p).unwrap().abs() <= 1e-12);
    }

    #[test]
    fn js_disjoint_supports_attain_ln2() {
        let js = js_divergence(&[1.0, 0.0], &[0.0, 1.0]).unwrap();
        assert!((js - LN_2).abs() < 1e-15);
    }

    #[test]
    fn js_hand_value() {
        // ½ln(2/3) + ¼ln(1/3) + ln 2 ≈ 0.215762
        let js = js_divergence(&[1.0, 0.0], &[0.5, 0.5]).unwrap();
        let expect = 0.5 * (2.0f64 / 3.0).ln() + 0.25 * (1.0f64 / 3.0).ln() + LN_2;
        assert!((js - expect).abs() < 1e-15);
        assert!((js - 0.215762).abs() < 1e-6);
    }

    #[test]
    fn mape_hand_values() {
        assert_eq!(mape(&[2.0, 4.0], &[2.0, 4.0]).unwrap(), 0.0);
        assert!((mape(&[2.0, 4.0], &[1.0, 5.0]).unwrap() - 0.375).abs() < 1e-15);
        // zero-observed points are excluded
        assert_eq!(mape(&[0.0, 2.0], &[9.0, 2.0]).unwrap(), 0.0);
    }

    #[test]
    fn mape_all_zero_observed_errors() {
        assert!(matches!(
            mape(&[0.0, 0.0], &[1.0, 1.0]).unwrap_err(),
            MetricError::AllZeroObserved
        ));
    }

    #[test]
    fn zero_mass_and_negative_entries_error() {
        assert!(matches!(
            kl_divergence(&[0.0, 0.0], &[0.5, 0.5]).unwrap_err(),
            MetricError::ZeroMass
        ));
        assert!(matches!(
            js_divergence(&[0.5, -0.1], &[0.5, 0.5]).unwrap_err(),
            MetricError::NegativeEntry { index: 1, .. }
        ));
    }

    #[test]
    fn quality_label_thresholds() {
        assert_eq!(QualityLabel::from_r_squared(0.95), QualityLabel::Strong);
        assert_eq!(QualityLabel::from_r_squared(0.85), QualityLabel::Acceptable);
        assert_eq!(QualityLabel::from_r_squared(0.5), QualityLabel::Poor);
        // boundaries are exclusive
        assert_eq!(QualityLabel::from_r_squared(0.9), QualityLabel::Acceptable);
        assert_eq!(QualityLabel::from_r_squared(0.8), QualityLabel::Poor);
    }

    #[test]
    fn fit_metrics_constant_observed() {
        let m = fit_metrics(&[0.25; 5], &[0.25; 5]).unwrap();
        assert_eq!(m.r_squared, 1.0);
        assert_eq!(m.quality_label, QualityLabel::Strong);
        let m = fit_metrics(&[0.25; 5], &[0.3; 5]).unwrap();
        assert_eq!(m.r_squared, 0.0);
        assert_eq!(m.quality_label, QualityLabel::Poor);
    }

    fn positive_vec() -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(1e-6..1.0f64, 2..16)
    }

    proptest! {
        #[test]
        fn js_is_symmetric_and_bounded(p in positive_vec(), q in positive_vec()) {
            let n = p.len().min(q.len());
            let (p, q) = (&p[..n], &q[..n]);
            let a = js_divergence(p, q).unwrap();
            let b = js_divergence(q, p).unwrap();
            prop_assert!((a - b).abs() <= 1e-12);
            prop_assert!(a >= 0.0);
            prop_assert!(a <= LN_2 + 1e-12);
        }

        #[test]
        fn kl_is_nonnegative(p in positive_vec(), q in positive_vec()) {
            let n = p.len().min(q.len());
            let kl = kl_divergence(&p[..n], &q[..n]).unwrap();
            prop_assert!(kl >= 0.0);
        }

        #[test]
        fn r_squared_never_exceeds_one(p in positive_vec(), q in positive_vec()) {
            let n = p.len().min(q.len());
            if let Ok(r2) = r_squared(&p[..n], &q[..n]) {
                prop_assert!(r2 <= 1.0);
            }
        }

        #[test]
        fn mape_is_nonnegative(p in positive_vec(), q in positive_vec()) {
            let n = p.len().min(q.len());
            prop_assert!(mape(&p[..n], &q[..n]).unwrap() >= 0.0);
        }
    }
}
