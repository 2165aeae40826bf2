//! The seven distribution views and the binned percentage summaries.
//!
//! Three dimensions are read off a corpus — entity quantity, entity length,
//! and inter-entity distance — and unfold into seven views:
//!
//! | view                | x                    | y (normalized)             |
//! |---------------------|----------------------|----------------------------|
//! | quantity_freq_rank  | rank                 | occurrence share of entity |
//! | length_freq_rank    | rank                 | occurrence share of length |
//! | freq_length         | length value         | occurrence share of length |
//! | length_rank         | rank (same as above) | length / Σ distinct lengths|
//! | distance_freq_rank  | rank                 | share of distance          |
//! | freq_distance       | distance value       | share of distance          |
//! | distance_rank       | rank (same as above) | distance / Σ distinct      |
//!
//! Ranks order by descending frequency; ties break toward the smaller value
//! (lengths, distances) or the earlier first corpus occurrence (entities),
//! so extraction is deterministic. The value views keep the frequency-rank
//! ordering so all views of one dimension share a single rank axis.
//!
//! Distances may be zero, and a zero x or y cannot be fed to curves that
//! are singular at the origin, so when a zero distance is present every
//! distance value used as a coordinate is shifted by +1 and the shift is
//! recorded in `x_offset_applied` for reports to undo. Each point also
//! carries its unnormalized `raw_count` (the occurrence count, or the
//! unshifted value for the value-ranked views).

use crate::corpus::{Corpus, UnitMode};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("no entity spans in corpus")]
    NoEntities,
    #[error("no intra-document entity pair")]
    NoEntityPairs,
}

/// The seven distribution views.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum View {
    QuantityFreqRank,
    LengthFreqRank,
    FreqLength,
    LengthRank,
    DistanceFreqRank,
    FreqDistance,
    DistanceRank,
}

impl View {
    pub fn as_str(&self) -> &'static str {
        match self {
            View::QuantityFreqRank => "quantity_freq_rank",
            View::LengthFreqRank => "length_freq_rank",
            View::FreqLength => "freq_length",
            View::LengthRank => "length_rank",
            View::DistanceFreqRank => "distance_freq_rank",
            View::FreqDistance => "freq_distance",
            View::DistanceRank => "distance_rank",
        }
    }

    pub fn all() -> [View; 7] {
        [
            View::QuantityFreqRank,
            View::LengthFreqRank,
            View::FreqLength,
            View::LengthRank,
            View::DistanceFreqRank,
            View::FreqDistance,
            View::DistanceRank,
        ]
    }

    pub fn dimension(&self) -> Dimension {
        match self {
            View::QuantityFreqRank => Dimension::Quantity,
            View::LengthFreqRank | View::FreqLength | View::LengthRank => Dimension::Length,
            View::DistanceFreqRank | View::FreqDistance | View::DistanceRank => Dimension::Distance,
        }
    }
}

impl std::fmt::Display for View {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One point of a series: coordinate, normalized value, raw value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub x: f64,
    pub y: f64,
    pub raw_count: f64,
}

/// Ordered (x, y) pairs for one view.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionSeries {
    pub view: View,
    pub points: Vec<SeriesPoint>,
    pub normalized: bool,
    /// +1 shift applied to distance coordinates when a zero distance occurs.
    pub x_offset_applied: u32,
}

impl DistributionSeries {
    pub fn xs(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.x).collect()
    }

    pub fn ys(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.y).collect()
    }

    /// Raw (unnormalized) values, the cutoff estimator's object multiset.
    pub fn raw_values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.raw_count).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dimension {
    Quantity,
    Length,
    Distance,
}

impl Dimension {
    pub fn as_str(&self) -> &'static str {
        match self {
            Dimension::Quantity => "quantity",
            Dimension::Length => "length",
            Dimension::Distance => "distance",
        }
    }

    pub fn views(&self) -> &'static [View] {
        match self {
            Dimension::Quantity => &[View::QuantityFreqRank],
            Dimension::Length => &[View::LengthFreqRank, View::FreqLength, View::LengthRank],
            Dimension::Distance => &[
                View::DistanceFreqRank,
                View::FreqDistance,
                View::DistanceRank,
            ],
        }
    }
}

impl std::fmt::Display for Dimension {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One labeled bin of a percentage table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinEntry {
    pub label: String,
    pub percent: f64,
}

/// Percentage table over the fixed bin layout of one dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinnedSummary {
    pub dimension: Dimension,
    pub bins: Vec<BinEntry>,
}

// ---------------------------------------------------------------------------
// Raw multiset extraction
// ---------------------------------------------------------------------------

/// Occurrence count per distinct entity surface, in first-appearance order.
pub fn entity_counts(corpus: &Corpus, fold_case: bool) -> Vec<(String, u64)> {
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut counts: Vec<(String, u64)> = Vec::new();
    for doc in &corpus.documents {
        for span in &doc.spans {
            let key = if fold_case {
                span.surface.to_lowercase()
            } else {
                span.surface.clone()
            };
            match index.get(&key) {
                Some(&i) => counts[i].1 += 1,
                None => {
                    index.insert(key.clone(), counts.len());
                    counts.push((key, 1));
                }
            }
        }
    }
    counts
}

/// Character length of every entity occurrence.
pub fn span_lengths(corpus: &Corpus) -> Vec<u64> {
    corpus
        .documents
        .iter()
        .flat_map(|d| d.spans.iter().map(|s| s.char_length as u64))
        .collect()
}

/// Distance between each pair of consecutive spans within one document,
/// in the corpus unit mode: characters strictly between the spans, or whole
/// tokens strictly between them.
pub fn span_distances(corpus: &Corpus) -> Vec<u64> {
    let mut distances = Vec::new();
    for doc in &corpus.documents {
        for pair in doc.spans.windows(2) {
            let d = match corpus.unit_mode {
                UnitMode::Character => (pair[1].char_start - pair[0].char_end) as u64,
                UnitMode::Token => pair[1].start_token.saturating_sub(pair[0].end_token + 1) as u64,
            };
            distances.push(d);
        }
    }
    distances
}

// ---------------------------------------------------------------------------
// Series extraction
// ---------------------------------------------------------------------------

/// Quantity frequency-rank series.
pub fn quantity_series(corpus: &Corpus) -> Result<DistributionSeries, StatsError> {
    quantity_series_with(corpus, false)
}

/// Quantity frequency-rank series with optional case folding of surfaces.
pub fn quantity_series_with(
    corpus: &Corpus,
    fold_case: bool,
) -> Result<DistributionSeries, StatsError> {
    let mut counts = entity_counts(corpus, fold_case);
    if counts.is_empty() {
        return Err(StatsError::NoEntities);
    }
    // Stable sort keeps first-occurrence order among equal counts.
    counts.sort_by_key(|entry| std::cmp::Reverse(entry.1));
    let total: u64 = counts.iter().map(|(_, c)| c).sum();
    let points = counts
        .iter()
        .enumerate()
        .map(|(i, (_, count))| SeriesPoint {
            x: (i + 1) as f64,
            y: *count as f64 / total as f64,
            raw_count: *count as f64,
        })
        .collect();
    Ok(DistributionSeries {
        view: View::QuantityFreqRank,
        points,
        normalized: true,
        x_offset_applied: 0,
    })
}

/// The three views over one dimension's value multiset.
pub struct ValueViews {
    pub freq_rank: DistributionSeries,
    pub freq_value: DistributionSeries,
    pub value_rank: DistributionSeries,
}

/// The three length views: frequency-rank, frequency-length, length-rank.
pub fn length_series(corpus: &Corpus) -> Result<ValueViews, StatsError> {
    let lengths = span_lengths(corpus);
    if lengths.is_empty() {
        return Err(StatsError::NoEntities);
    }
    Ok(value_views(
        &lengths,
        View::LengthFreqRank,
        View::FreqLength,
        View::LengthRank,
    ))
}

/// The three distance views: frequency-rank, frequency-distance,
/// distance-rank.
pub fn distance_series(corpus: &Corpus) -> Result<ValueViews, StatsError> {
    let distances = span_distances(corpus);
    if distances.is_empty() {
        return Err(StatsError::NoEntityPairs);
    }
    Ok(value_views(
        &distances,
        View::DistanceFreqRank,
        View::FreqDistance,
        View::DistanceRank,
    ))
}

fn value_views(
    values: &[u64],
    freq_rank_view: View,
    freq_value_view: View,
    value_rank_view: View,
) -> ValueViews {
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    for &v in values {
        *counts.entry(v).or_insert(0) += 1;
    }
    let total = values.len() as f64;
    let offset: u64 = if counts.contains_key(&0) { 1 } else { 0 };

    // (a) frequency over the value itself, values ascending.
    let freq_value = DistributionSeries {
        view: freq_value_view,
        points: counts
            .iter()
            .map(|(&value, &count)| SeriesPoint {
                x: (value + offset) as f64,
                y: count as f64 / total,
                raw_count: count as f64,
            })
            .collect(),
        normalized: true,
        x_offset_applied: offset as u32,
    };

    // Rank order: descending count, ties toward the smaller value.
    let mut by_rank: Vec<(u64, u64)> = counts.iter().map(|(&v, &c)| (v, c)).collect();
    by_rank.sort_by(|l, r| r.1.cmp(&l.1).then(l.0.cmp(&r.0)));

    let freq_rank = DistributionSeries {
        view: freq_rank_view,
        points: by_rank
            .iter()
            .enumerate()
            .map(|(i, &(_, count))| SeriesPoint {
                x: (i + 1) as f64,
                y: count as f64 / total,
                raw_count: count as f64,
            })
            .collect(),
        normalized: true,
        x_offset_applied: 0,
    };

    // (c) the value itself over the shared rank axis, normalized by the sum
    // of the distinct (shifted) values.
    let value_sum: u64 = counts.keys().map(|&v| v + offset).sum();
    let value_rank = DistributionSeries {
        view: value_rank_view,
        points: by_rank
            .iter()
            .enumerate()
            .map(|(i, &(value, _))| SeriesPoint {
                x: (i + 1) as f64,
                y: (value + offset) as f64 / value_sum as f64,
                raw_count: value as f64,
            })
            .collect(),
        normalized: true,
        x_offset_applied: offset as u32,
    };

    ValueViews {
        freq_rank,
        freq_value,
        value_rank,
    }
}

// ---------------------------------------------------------------------------
// Binned summaries
// ---------------------------------------------------------------------------

/// Bin labels of a dimension: 1..10 (0..10 for distance), 11-20, 21-30, 31+.
pub fn bin_labels(dimension: Dimension) -> Vec<String> {
    let start = match dimension {
        Dimension::Distance => 0u64,
        _ => 1,
    };
    let mut labels: Vec<String> = (start..=10).map(|v| v.to_string()).collect();
    labels.extend(["11-20", "21-30", "31+"].map(str::to_string));
    labels
}

fn bin_index(dimension: Dimension, value: u64) -> usize {
    let start = match dimension {
        Dimension::Distance => 0u64,
        _ => 1,
    };
    match value {
        v if v <= 10 => (v - start) as usize,
        v if v <= 20 => (11 - start) as usize,
        v if v <= 30 => (12 - start) as usize,
        _ => (13 - start) as usize,
    }
}

/// Percentage table of one dimension in the fixed bin layout.
///
/// Quantity bins count distinct entities by their occurrence count; length
/// and distance bins count occurrences. Percentages are rounded to two
/// decimals, so a row sums to 100 ± 0.1.
pub fn binned_summary(corpus: &Corpus, dimension: Dimension) -> Result<BinnedSummary, StatsError> {
    let values: Vec<u64> = match dimension {
        Dimension::Quantity => entity_counts(corpus, false)
            .into_iter()
            .map(|(_, c)| c)
            .collect(),
        Dimension::Length => span_lengths(corpus),
        Dimension::Distance => span_distances(corpus),
    };
    if values.is_empty() {
        return Err(match dimension {
            Dimension::Distance => StatsError::NoEntityPairs,
            _ => StatsError::NoEntities,
        });
    }
    let labels = bin_labels(dimension);
    let mut tallies = vec![0u64; labels.len()];
    for &v in &values {
        tallies[bin_index(dimension, v)] += 1;
    }
    let total = values.len() as f64;
    let bins = labels
        .into_iter()
        .zip(tallies)
        .map(|(label, tally)| BinEntry {
            label,
            percent: (10_000.0 * tally as f64 / total).round() / 100.0,
        })
        .collect();
    Ok(BinnedSummary { dimension, bins })
}
