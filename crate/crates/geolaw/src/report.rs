//! Analysis report assembly and file emission.
//!
//! `report.json` is the canonical machine-readable output: one block per
//! requested view holding the series (normalized values plus raw counts),
//! the ranked fits, and the optional cutoff estimate, preceded by a corpus
//! summary and an echo of the effective configuration. Serialization goes
//! through [`crate::jsonfmt`], so two runs over the same inputs produce
//! byte-identical files.
//!
//! CSV outputs are for plotting and re-ingestion: per-series
//! `series_<view>.csv` (x, y, raw_count), per-view `plot_<view>.csv`
//! (x, y_observed, y_fitted from the best-ranked family), and per-dimension
//! `bins_<dimension>.csv` in the familiar table layout (one row per
//! dataset, bin labels as columns). Numeric series values are printed with
//! 17 significant digits so `fit` can read them back without loss.

use crate::corpus::UnitMode;
use crate::cutoff::{CutoffEstimate, ObjectCounting};
use crate::fitting::{Family, FamilyFailure, FitReport};
use crate::genmodel::PlacementConfig;
use crate::jsonfmt::fmt_f64;
use crate::stats::{BinnedSummary, DistributionSeries, View};
use serde::{Deserialize, Serialize};

/// Corpus-level tallies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusSummary {
    pub n_documents: usize,
    /// Entity occurrences.
    pub n_entities: usize,
    /// Distinct entity surfaces (after optional case folding).
    pub n_distinct_entities: usize,
}

/// Echo of the effective analyze configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub inputs: Vec<String>,
    pub format: String,
    pub dims: Vec<String>,
    pub unit: UnitMode,
    pub families: Vec<Family>,
    pub cutoff: bool,
    pub tag_filter: Vec<String>,
    pub strict: bool,
    pub doc_separator: String,
    pub fold_case: bool,
    pub free_amplitude: bool,
    pub n_counting: ObjectCounting,
    pub per_file: bool,
    /// The value-rank views share the frequency-rank axis; recorded here so
    /// consumers know which ordering produced them.
    pub rank_order: String,
}

/// How a view's cutoff was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutoffBlock {
    #[serde(flatten)]
    pub estimate: CutoffEstimate,
    /// "fixed_point", "fl_maximum", or "observed_max_fallback".
    pub method: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

/// Everything computed for one view.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViewBlock {
    pub view: View,
    pub series: DistributionSeries,
    /// Successful fits, best first.
    pub fits: Vec<FitReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fit_failures: Vec<FamilyFailure>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<CutoffBlock>,
}

/// The full analyze report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub tool_version: String,
    pub config: ConfigEcho,
    pub corpus: CorpusSummary,
    pub views: Vec<ViewBlock>,
}

/// The simulate verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationVerdict {
    pub config: PlacementConfig,
    pub n_gaps: usize,
    pub mean: Option<f64>,
    pub variance: Option<f64>,
    /// Absent when the sample is too small for the distribution check.
    pub kl_vs_geometric: Option<f64>,
    pub fitted_rate: Option<f64>,
    /// Exponential-limit rate −ln(1−p); infinite at p = 1.
    #[serde(with = "crate::jsonfmt::maybe_nonfinite")]
    pub beta_theory: f64,
    /// Poissonization reading of the rate: p itself.
    pub beta_poisson: f64,
}

// ---------------------------------------------------------------------------
// CSV emission
// ---------------------------------------------------------------------------

/// `x,y,raw_count` rows, 17-significant-digit floats.
pub fn series_csv(series: &DistributionSeries) -> String {
    let mut out = String::from("x,y,raw_count\n");
    for p in &series.points {
        out.push_str(&fmt_f64(p.x));
        out.push(',');
        out.push_str(&fmt_f64(p.y));
        out.push(',');
        out.push_str(&fmt_f64(p.raw_count));
        out.push('\n');
    }
    out
}

/// `x,y_observed,y_fitted` rows for external plotting.
pub fn plot_csv(series: &DistributionSeries, fitted: &[f64]) -> String {
    let mut out = String::from("x,y_observed,y_fitted\n");
    for (p, &f) in series.points.iter().zip(fitted) {
        out.push_str(&fmt_f64(p.x));
        out.push(',');
        out.push_str(&fmt_f64(p.y));
        out.push(',');
        out.push_str(&fmt_f64(f));
        out.push('\n');
    }
    out
}

/// Percentage table, one row per named dataset, two-decimal percents.
pub fn bins_csv(rows: &[(String, BinnedSummary)]) -> String {
    let mut out = String::from("dataset");
    if let Some((_, first)) = rows.first() {
        for bin in &first.bins {
            out.push(',');
            out.push_str(&bin.label);
        }
    }
    out.push('\n');
    for (name, summary) in rows {
        out.push_str(name);
        for bin in &summary.bins {
            out.push_str(&format!(",{:.2}", bin.percent));
        }
        out.push('\n');
    }
    out
}

/// Gap histogram as `gap,count` rows, ascending.
pub fn gaps_csv(gaps: &[u64]) -> String {
    let mut hist = std::collections::BTreeMap::new();
    for &g in gaps {
        *hist.entry(g).or_insert(0u64) += 1;
    }
    let mut out = String::from("gap,count\n");
    for (gap, count) in hist {
        out.push_str(&format!("{gap},{count}\n"));
    }
    out
}
