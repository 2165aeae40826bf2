//! Curve families and least-squares fitting.
//!
//! Three families are fitted against (x, y) series:
//!
//! * gamma-type: `y = c · x^a · e^(b·x)` — a power law with an exponential
//!   factor; with `α = a + 1`, `β = −b`, `c = β^α/Γ(α)` it is exactly the
//!   gamma density, and with `b = 0` it degenerates to Zipf.
//! * Gaussian:   `y = 1/(√(2π)σ) · e^(−(x−μ)²/(2σ²))` — amplitude pinned to
//!   the density normalization unless a free amplitude is requested.
//! * Zipf:       `y = c / x^δ`.
//!
//! Gamma-type and Zipf start from an ordinary least-squares solve on the
//! log-transformed model; the Gaussian starts from moment estimates. All
//! three are refined by damped Gauss-Newton on the linear-space SSE. The
//! gamma-type fit additionally restarts from the finished Zipf solution
//! (its `b = 0` submodel) and keeps the better of the two refinements, so
//! the nested family can never score worse than its special case.

pub mod metrics;
mod solver;

pub use metrics::{
    fit_metrics, js_divergence, kl_divergence, mape, r_squared, sse, FitMetrics, MetricError,
    QualityLabel,
};

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FitError {
    #[error("need at least 4 points, got {0}")]
    InsufficientData(usize),
    #[error("x must be positive, got {0}")]
    DomainX(f64),
    #[error("non-positive x value {value} at index {index}")]
    NonPositiveX { index: usize, value: f64 },
    #[error("non-positive y value {value} at index {index}; filter the series first")]
    NonPositiveY { index: usize, value: f64 },
    #[error("non-finite value at index {0}")]
    NonFinite(usize),
    #[error("x and y lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("linear initialization failed: singular normal equations")]
    SingularInit,
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// The three curve families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    GammaType,
    Gaussian,
    Zipf,
}

impl Family {
    pub fn as_str(&self) -> &'static str {
        match self {
            Family::GammaType => "gamma_type",
            Family::Gaussian => "gaussian",
            Family::Zipf => "zipf",
        }
    }

    pub fn all() -> [Family; 3] {
        [Family::GammaType, Family::Gaussian, Family::Zipf]
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Parameters of `y = c · x^a · e^(b·x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaTypeParams {
    /// Prefactor; strictly positive.
    pub c: f64,
    /// Power exponent.
    pub a: f64,
    /// Exponential rate.
    pub b: f64,
}

impl GammaTypeParams {
    /// Shape parameter of the equivalent gamma density, `α = a + 1`.
    pub fn shape(&self) -> f64 {
        self.a + 1.0
    }

    /// Rate parameter of the equivalent gamma density, `β = −b`.
    pub fn rate(&self) -> f64 {
        -self.b
    }
}

/// Parameters of the Gaussian density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussParams {
    pub mu: f64,
    /// Strictly positive; clamped at 1e-9 during fitting.
    pub sigma: f64,
    /// Present only for free-amplitude fits; `None` means the density
    /// normalization `1/(√(2π)σ)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
}

/// Parameters of `y = c / x^δ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZipfParams {
    pub c: f64,
    pub delta: f64,
}

/// Per-family parameter record inside a [`FitReport`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FamilyParams {
    GammaType(GammaTypeParams),
    Gaussian(GaussParams),
    Zipf(ZipfParams),
}

/// Outcome of fitting one family to one series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub family: Family,
    pub params: FamilyParams,
    pub metrics: FitMetrics,
    pub sse: f64,
    pub n_points: usize,
    pub converged: bool,
    pub iterations: usize,
}

/// Evaluate the gamma-type curve at `x > 0`.
pub fn eval_gamma_type(params: &GammaTypeParams, x: f64) -> Result<f64, FitError> {
    if x <= 0.0 {
        return Err(FitError::DomainX(x));
    }
    Ok(gamma_model(&[params.c, params.a, params.b], x))
}

/// Evaluate the Gaussian at any `x`.
pub fn eval_gaussian(params: &GaussParams, x: f64) -> f64 {
    let amplitude = params
        .amplitude
        .unwrap_or_else(|| 1.0 / ((2.0 * PI).sqrt() * params.sigma));
    let z = (x - params.mu) / params.sigma;
    amplitude * (-0.5 * z * z).exp()
}

/// Evaluate the Zipf curve at `x > 0`.
pub fn eval_zipf(params: &ZipfParams, x: f64) -> Result<f64, FitError> {
    if x <= 0.0 {
        return Err(FitError::DomainX(x));
    }
    Ok(params.c / x.powf(params.delta))
}

/// Evaluate whichever family a parameter record belongs to.
pub fn eval_family(params: &FamilyParams, x: f64) -> Result<f64, FitError> {
    match params {
        FamilyParams::GammaType(p) => eval_gamma_type(p, x),
        FamilyParams::Gaussian(p) => Ok(eval_gaussian(p, x)),
        FamilyParams::Zipf(p) => eval_zipf(p, x),
    }
}

fn gamma_model(p: &[f64; 3], x: f64) -> f64 {
    p[0] * x.powf(p[1]) * (p[2] * x).exp()
}

fn gamma_gradient(p: &[f64; 3], x: f64) -> [f64; 3] {
    let f = gamma_model(p, x);
    [f / p[0], f * x.ln(), f * x]
}

fn zipf_model(p: &[f64; 2], x: f64) -> f64 {
    p[0] * x.powf(-p[1])
}

fn zipf_gradient(p: &[f64; 2], x: f64) -> [f64; 2] {
    let f = zipf_model(p, x);
    [f / p[0], -f * x.ln()]
}

const SIGMA_FLOOR: f64 = 1e-9;

fn gauss_fixed_model(p: &[f64; 2], x: f64) -> f64 {
    let (mu, sigma) = (p[0], p[1]);
    let z = (x - mu) / sigma;
    (-0.5 * z * z).exp() / ((2.0 * PI).sqrt() * sigma)
}

fn gauss_fixed_gradient(p: &[f64; 2], x: f64) -> [f64; 2] {
    let (mu, sigma) = (p[0], p[1]);
    let f = gauss_fixed_model(p, x);
    let d = x - mu;
    [
        f * d / (sigma * sigma),
        f * (d * d / (sigma * sigma * sigma) - 1.0 / sigma),
    ]
}

fn gauss_free_model(p: &[f64; 3], x: f64) -> f64 {
    let (amp, mu, sigma) = (p[0], p[1], p[2]);
    let z = (x - mu) / sigma;
    amp * (-0.5 * z * z).exp()
}

fn gauss_free_gradient(p: &[f64; 3], x: f64) -> [f64; 3] {
    let (amp, mu, sigma) = (p[0], p[1], p[2]);
    let f = gauss_free_model(p, x);
    let d = x - mu;
    [
        f / amp,
        f * d / (sigma * sigma),
        f * d * d / (sigma * sigma * sigma),
    ]
}

fn validate_series(xs: &[f64], ys: &[f64], positive_x: bool) -> Result<(), FitError> {
    if xs.len() != ys.len() {
        return Err(FitError::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.len() < 4 {
        return Err(FitError::InsufficientData(xs.len()));
    }
    for (index, (&x, &y)) in xs.iter().zip(ys).enumerate() {
        if !x.is_finite() || !y.is_finite() {
            return Err(FitError::NonFinite(index));
        }
        if positive_x && x <= 0.0 {
            return Err(FitError::NonPositiveX { index, value: x });
        }
        if y <= 0.0 {
            return Err(FitError::NonPositiveY { index, value: y });
        }
    }
    Ok(())
}

fn is_constant(ys: &[f64]) -> bool {
    let first = ys[0];
    ys.iter().all(|&y| (y - first).abs() <= first.abs() * 1e-14)
}

fn assemble_report<const P: usize>(
    family: Family,
    params: FamilyParams,
    xs: &[f64],
    ys: &[f64],
    model: impl Fn(&[f64; P], f64) -> f64,
    refined: &solver::Refined<P>,
) -> Result<FitReport, FitError> {
    let fitted: Vec<f64> = xs.iter().map(|&x| model(&refined.params, x)).collect();
    let metrics = fit_metrics(ys, &fitted)?;
    Ok(FitReport {
        family,
        params,
        metrics,
        sse: refined.sse,
        n_points: xs.len(),
        converged: refined.converged,
        iterations: refined.iterations,
    })
}

/// Fit the gamma-type curve by log-space OLS plus Gauss-Newton refinement.
pub fn fit_gamma_type(xs: &[f64], ys: &[f64]) -> Result<FitReport, FitError> {
    validate_series(xs, ys, true)?;

    // Constant series: the flat member of the family, solved directly
    // instead of running an ill-conditioned refinement.
    if is_constant(ys) {
        let c = ys.iter().sum::<f64>() / ys.len() as f64;
        let flat = solver::Refined {
            params: [c, 0.0, 0.0],
            sse: ys.iter().map(|&y| (y - c) * (y - c)).sum(),
            iterations: 0,
            converged: true,
        };
        return assemble_report(
            Family::GammaType,
            FamilyParams::GammaType(GammaTypeParams { c, a: 0.0, b: 0.0 }),
            xs,
            ys,
            gamma_model,
            &flat,
        );
    }

    let log_ys: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let feasible = |p: &[f64; 3]| p[0] > 0.0 && p.iter().all(|v| v.is_finite());

    let mut starts: Vec<[f64; 3]> = Vec::new();
    if let Some(beta) = solver::linear_least_squares(xs, &log_ys, |x| [1.0, x.ln(), x]) {
        let start = [beta[0].exp(), beta[1], beta[2]];
        if feasible(&start) {
            starts.push(start);
        }
    }
    // Restart from the fitted Zipf solution (the b = 0 submodel) so the
    // richer family never ends up above its own special case.
    if let Ok(zipf) = fit_zipf(xs, ys) {
        if let FamilyParams::Zipf(z) = zipf.params {
            let start = [z.c, -z.delta, 0.0];
            if feasible(&start) {
                starts.push(start);
            }
        }
    }
    if starts.is_empty() {
        return Err(FitError::SingularInit);
    }

    let mut best: Option<solver::Refined<3>> = None;
    for start in starts {
        let refined = solver::gauss_newton(start, xs, ys, gamma_model, gamma_gradient, feasible);
        if !refined.sse.is_finite() {
            continue;
        }
        let better = match &best {
            None => true,
            Some(b) => refined.sse < b.sse,
        };
        if better {
            best = Some(refined);
        }
    }
    let refined = best.ok_or(FitError::SingularInit)?;
    let [c, a, b] = refined.params;
    assemble_report(
        Family::GammaType,
        FamilyParams::GammaType(GammaTypeParams { c, a, b }),
        xs,
        ys,
        gamma_model,
        &refined,
    )
}

/// Fit the Zipf curve by log-log OLS plus Gauss-Newton refinement.
pub fn fit_zipf(xs: &[f64], ys: &[f64]) -> Result<FitReport, FitError> {
    validate_series(xs, ys, true)?;

    if is_constant(ys) {
        let c = ys.iter().sum::<f64>() / ys.len() as f64;
        let flat = solver::Refined {
            params: [c, 0.0],
            sse: ys.iter().map(|&y| (y - c) * (y - c)).sum(),
            iterations: 0,
            converged: true,
        };
        return assemble_report(
            Family::Zipf,
            FamilyParams::Zipf(ZipfParams { c, delta: 0.0 }),
            xs,
            ys,
            zipf_model,
            &flat,
        );
    }

    let log_ys: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let beta = solver::linear_least_squares(xs, &log_ys, |x| [1.0, x.ln()])
        .ok_or(FitError::SingularInit)?;
    let start = [beta[0].exp(), -beta[1]];
    let feasible = |p: &[f64; 2]| p[0] > 0.0 && p.iter().all(|v| v.is_finite());
    if !feasible(&start) {
        return Err(FitError::SingularInit);
    }
    let refined = solver::gauss_newton(start, xs, ys, zipf_model, zipf_gradient, feasible);
    let [c, delta] = refined.params;
    assemble_report(
        Family::Zipf,
        FamilyParams::Zipf(ZipfParams { c, delta }),
        xs,
        ys,
        zipf_model,
        &refined,
    )
}

/// Fit the Gaussian with the amplitude pinned to the density normalization.
pub fn fit_gaussian(xs: &[f64], ys: &[f64]) -> Result<FitReport, FitError> {
    fit_gaussian_with(xs, ys, false)
}

/// Fit the Gaussian, optionally with a free amplitude parameter.
///
/// Initialization is the y-weighted mean and standard deviation of x; the
/// refinement keeps σ at or above 1e-9.
pub fn fit_gaussian_with(
    xs: &[f64],
    ys: &[f64],
    free_amplitude: bool,
) -> Result<FitReport, FitError> {
    validate_series(xs, ys, false)?;

    let mass: f64 = ys.iter().sum();
    let mu0 = xs.iter().zip(ys).map(|(&x, &y)| x * y).sum::<f64>() / mass;
    let var0 = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| y * (x - mu0) * (x - mu0))
        .sum::<f64>()
        / mass;
    let sigma0 = var0.sqrt().max(SIGMA_FLOOR);

    if free_amplitude {
        let amp0 = 1.0 / ((2.0 * PI).sqrt() * sigma0);
        let feasible =
            |p: &[f64; 3]| p[0] > 0.0 && p[2] >= SIGMA_FLOOR && p.iter().all(|v| v.is_finite());
        let refined = solver::gauss_newton(
            [amp0, mu0, sigma0],
            xs,
            ys,
            gauss_free_model,
            gauss_free_gradient,
            feasible,
        );
        let [amplitude, mu, sigma] = refined.params;
        assemble_report(
            Family::Gaussian,
            FamilyParams::Gaussian(GaussParams {
                mu,
                sigma,
                amplitude: Some(amplitude),
            }),
            xs,
            ys,
            gauss_free_model,
            &refined,
        )
    } else {
        let feasible = |p: &[f64; 2]| p[1] >= SIGMA_FLOOR && p.iter().all(|v| v.is_finite());
        let refined = solver::gauss_newton(
            [mu0, sigma0],
            xs,
            ys,
            gauss_fixed_model,
            gauss_fixed_gradient,
            feasible,
        );
        let [mu, sigma] = refined.params;
        assemble_report(
            Family::Gaussian,
            FamilyParams::Gaussian(GaussParams {
                mu,
                sigma,
                amplitude: None,
            }),
            xs,
            ys,
            gauss_fixed_model,
            &refined,
        )
    }
}

/// Fit one named family.
pub fn fit_family(xs: &[f64], ys: &[f64], family: Family) -> Result<FitReport, FitError> {
    fit_family_with(xs, ys, family, false)
}

pub fn fit_family_with(
    xs: &[f64],
    ys: &[f64],
    family: Family,
    free_amplitude: bool,
) -> Result<FitReport, FitError> {
    match family {
        Family::GammaType => fit_gamma_type(xs, ys),
        Family::Gaussian => fit_gaussian_with(xs, ys, free_amplitude),
        Family::Zipf => fit_zipf(xs, ys),
    }
}

/// A family that could not be fitted, kept alongside the successful ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyFailure {
    pub family: Family,
    pub error: String,
}

/// Result of fitting several families to the same series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    /// Successful fits, best first: descending R², ties by ascending KL.
    pub ranked: Vec<FitReport>,
    pub failures: Vec<FamilyFailure>,
}

/// Fit every requested family; failures become entries instead of aborting.
pub fn compare_families(xs: &[f64], ys: &[f64], families: &[Family]) -> Comparison {
    compare_families_with(xs, ys, families, false)
}

pub fn compare_families_with(
    xs: &[f64],
    ys: &[f64],
    families: &[Family],
    free_amplitude: bool,
) -> Comparison {
    let mut ranked = Vec::new();
    let mut failures = Vec::new();
    for &family in families {
        match fit_family_with(xs, ys, family, free_amplitude) {
            Ok(report) => ranked.push(report),
            Err(error) => failures.push(FamilyFailure {
                family,
                error: error.to_string(),
            }),
        }
    }
    ranked.sort_by(|l, r| {
        r.metrics
            .r_squared
            .total_cmp(&l.metrics.r_squared)
            .then(l.metrics.kl.total_cmp(&r.metrics.kl))
    });
    Comparison { ranked, failures }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel_err(actual: f64, expected: f64) -> f64 {
        (actual - expected).abs() / expected.abs().max(f64::MIN_POSITIVE)
    }

    fn gamma_series(c: f64, a: f64, b: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
        let xs: Vec<f64> = (1..=n).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| c * x.powf(a) * (b * x).exp()).collect();
        (xs, ys)
    }

    #[test]
    fn eval_gamma_type_examples() {
        let flat = GammaTypeParams {
            c: 1.0,
            a: 0.0,
            b: 0.0,
        };
        assert_eq!(eval_gamma_type(&flat, 5.0).unwrap(), 1.0);

        let p = GammaTypeParams {
            c: 2.0,
            a: 1.0,
            b: -1.0,
        };
        assert!((eval_gamma_type(&p, 1.0).unwrap() - 2.0 * (-1.0f64).exp()).abs() < 1e-12);
        assert!((eval_gamma_type(&p, 1.0).unwrap() - 0.735759).abs() < 1e-6);

        let q = GammaTypeParams {
            c: 0.015,
            a: -0.737,
            b: 2e-5,
        };
        assert!((eval_gamma_type(&q, 1.0).unwrap() - 0.015 * (2e-5f64).exp()).abs() < 1e-15);
        assert!((eval_gamma_type(&q, 1.0).unwrap() - 0.0150003).abs() < 1e-7);

        assert!(matches!(
            eval_gamma_type(&flat, 0.0).unwrap_err(),
            FitError::DomainX(_)
        ));
    }

    #[test]
    fn eval_gaussian_examples() {
        let std = GaussParams {
            mu: 0.0,
            sigma: 1.0,
            amplitude: None,
        };
        assert!((eval_gaussian(&std, 0.0) - 0.398942).abs() < 1e-6);
        let shifted = GaussParams {
            mu: 3.0,
            sigma: 1.0,
            amplitude: None,
        };
        assert!((eval_gaussian(&shifted, 3.0) - 0.398942).abs() < 1e-6);
        let wide = GaussParams {
            mu: 0.0,
            sigma: 2.0,
            amplitude: None,
        };
        assert!((eval_gaussian(&wide, 2.0) - 0.120985).abs() < 1e-6);
    }

    #[test]
    fn eval_zipf_examples() {
        assert_eq!(
            eval_zipf(&ZipfParams { c: 1.0, delta: 1.0 }, 2.0).unwrap(),
            0.5
        );
        assert_eq!(
            eval_zipf(&ZipfParams { c: 1.0, delta: 0.0 }, 7.0).unwrap(),
            1.0
        );
        assert!(
            (eval_zipf(&ZipfParams { c: 0.1, delta: 2.0 }, 4.0).unwrap() - 0.00625).abs() < 1e-15
        );
        assert!(eval_zipf(&ZipfParams { c: 1.0, delta: 1.0 }, -1.0).is_err());
    }

    #[test]
    fn gamma_fit_recovers_exact_parameters() {
        let (xs, ys) = gamma_series(0.5, 1.0, -0.2, 50);
        let report = fit_gamma_type(&xs, &ys).unwrap();
        let FamilyParams::GammaType(p) = report.params else {
            panic!("wrong params variant")
        };
        assert!(rel_err(p.c, 0.5) < 1e-6, "c = {}", p.c);
        assert!(rel_err(p.a, 1.0) < 1e-6, "a = {}", p.a);
        assert!(rel_err(p.b, -0.2) < 1e-6, "b = {}", p.b);
        assert!(report.metrics.r_squared >= 1.0 - 1e-12);
    }

    #[test]
    fn gamma_fit_flat_series() {
        let xs: Vec<f64> = (1..=10).map(f64::from).collect();
        let ys = vec![0.25; 10];
        let report = fit_gamma_type(&xs, &ys).unwrap();
        let FamilyParams::GammaType(p) = report.params else {
            panic!("wrong params variant")
        };
        assert!((p.c - 0.25).abs() < 1e-8);
        assert!(p.a.abs() < 1e-8);
        assert!(p.b.abs() < 1e-8);
        assert!(report.converged);
    }

    #[test]
    fn gamma_fit_rejects_bad_series() {
        let xs = [1.0, 2.0, 3.0];
        let ys = [1.0, 0.5, 0.25];
        assert!(matches!(
            fit_gamma_type(&xs, &ys).unwrap_err(),
            FitError::InsufficientData(3)
        ));
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys = [1.0, 0.5, 0.0, 0.25];
        assert!(matches!(
            fit_gamma_type(&xs, &ys).unwrap_err(),
            FitError::NonPositiveY { index: 2, .. }
        ));
    }

    #[test]
    fn zipf_fit_recovers_exponent() {
        let xs: Vec<f64> = (1..=20).map(f64::from).collect();
        let total: f64 = xs.iter().map(|x| 1.0 / x).sum();
        let ys: Vec<f64> = xs.iter().map(|x| 1.0 / x / total).collect();
        let report = fit_zipf(&xs, &ys).unwrap();
        let FamilyParams::Zipf(p) = report.params else {
            panic!("wrong params variant")
        };
        assert!(rel_err(p.delta, 1.0) < 1e-6);
        assert!(report.metrics.r_squared >= 1.0 - 1e-12);
    }

    #[test]
    fn gaussian_fit_recovers_parameters() {
        let truth = GaussParams {
            mu: 10.0,
            sigma: 2.0,
            amplitude: None,
        };
        let xs: Vec<f64> = (1..=20).map(f64::from).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| eval_gaussian(&truth, x)).collect();
        let report = fit_gaussian(&xs, &ys).unwrap();
        let FamilyParams::Gaussian(p) = report.params else {
            panic!("wrong params variant")
        };
        assert!(rel_err(p.mu, 10.0) < 1e-6, "mu = {}", p.mu);
        assert!(rel_err(p.sigma, 2.0) < 1e-6, "sigma = {}", p.sigma);
        assert!(report.metrics.r_squared >= 1.0 - 1e-12);
    }

    #[test]
    fn free_amplitude_fit_reports_amplitude() {
        let xs: Vec<f64> = (1..=20).map(f64::from).collect();
        let ys: Vec<f64> = xs
            .iter()
            .map(|&x| 3.0 * (-0.5 * ((x - 10.0) / 2.0) * ((x - 10.0) / 2.0)).exp())
            .collect();
        let report = fit_gaussian_with(&xs, &ys, true).unwrap();
        let FamilyParams::Gaussian(p) = report.params else {
            panic!("wrong params variant")
        };
        let amp = p.amplitude.expect("free amplitude requested");
        assert!(rel_err(amp, 3.0) < 1e-6);
        assert!(rel_err(p.mu, 10.0) < 1e-6);
    }

    #[test]
    fn zipf_underfits_gamma_data() {
        let (xs, ys) = gamma_series(0.5, 1.0, -0.2, 50);
        let gamma = fit_gamma_type(&xs, &ys).unwrap();
        let zipf = fit_zipf(&xs, &ys).unwrap();
        assert!(zipf.metrics.r_squared < gamma.metrics.r_squared);
    }

    #[test]
    fn gamma_never_scores_below_zipf() {
        let xs: Vec<f64> = (1..=20).map(f64::from).collect();
        let total: f64 = xs.iter().map(|x| 1.0 / x).sum();
        let ys: Vec<f64> = xs.iter().map(|x| 1.0 / x / total).collect();
        let gamma = fit_gamma_type(&xs, &ys).unwrap();
        let zipf = fit_zipf(&xs, &ys).unwrap();
        assert!(gamma.sse <= zipf.sse + 1e-9);
        assert!(gamma.metrics.r_squared >= zipf.metrics.r_squared - 1e-9);
    }

    #[test]
    fn comparison_ranks_generating_family_first() {
        let (xs, ys) = gamma_series(0.5, 1.0, -0.2, 50);
        let cmp = compare_families(&xs, &ys, &Family::all());
        assert_eq!(cmp.ranked[0].family, Family::GammaType);
        assert!(cmp.failures.is_empty());

        let truth = GaussParams {
            mu: 10.0,
            sigma: 2.0,
            amplitude: None,
        };
        let xs: Vec<f64> = (1..=20).map(f64::from).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| eval_gaussian(&truth, x)).collect();
        let cmp = compare_families(&xs, &ys, &Family::all());
        assert_eq!(cmp.ranked[0].family, Family::Gaussian);
    }

    #[test]
    fn comparison_keeps_failures_without_aborting() {
        // x = 0 breaks gamma/zipf but not the Gaussian
        let xs = [0.0, 1.0, 2.0, 3.0, 4.0];
        let ys = [0.1, 0.4, 0.6, 0.4, 0.1];
        let cmp = compare_families(&xs, &ys, &Family::all());
        assert_eq!(cmp.ranked.len(), 1);
        assert_eq!(cmp.ranked[0].family, Family::Gaussian);
        assert_eq!(cmp.failures.len(), 2);
    }

    #[test]
    fn sse_is_consistent_with_r_squared() {
        let (xs, ys) = gamma_series(0.3, 0.8, -0.1, 30);
        let noisy: Vec<f64> = ys
            .iter()
            .enumerate()
            .map(|(i, &y)| y * (1.0 + 0.01 * ((i % 3) as f64 - 1.0)))
            .collect();
        let report = fit_gamma_type(&xs, &noisy).unwrap();
        let mean = noisy.iter().sum::<f64>() / noisy.len() as f64;
        let ss_tot: f64 = noisy.iter().map(|y| (y - mean) * (y - mean)).sum();
        let implied = 1.0 - report.sse / ss_tot;
        assert!((implied - report.metrics.r_squared).abs() < 1e-9);
    }

    #[test]
    fn family_params_round_trip_untagged() {
        for params in [
            FamilyParams::GammaType(GammaTypeParams {
                c: 0.5,
                a: 1.0,
                b: -0.2,
            }),
            FamilyParams::Gaussian(GaussParams {
                mu: 1.0,
                sigma: 2.0,
                amplitude: None,
            }),
            FamilyParams::Zipf(ZipfParams { c: 0.5, delta: 1.5 }),
        ] {
            let s = serde_json::to_string(&params).unwrap();
            let back: FamilyParams = serde_json::from_str(&s).unwrap();
            assert_eq!(back, params);
        }
    }
}
