//! Command-line front end: `analyze`, `simulate`, and `fit`.
//!
//! Exit codes: 0 success; 1 input parse/IO error (messages name file and
//! line); 2 empty dimension, or a `fit` input with fewer than 4 rows; 3 fit
//! failure on every requested family for some view (the partial report is
//! still written).
//!
//! `GEOLAW_THREADS` caps worker concurrency for multi-file parsing and
//! per-view fitting; outputs are byte-identical regardless of the cap.

use crate::corpus::{
    conll::{parse_conll, ConllOptions},
    jsonl::{parse_jsonl_spans, JsonlOptions},
    Corpus, UnitMode,
};
use crate::cutoff::{
    count_objects, deviation_statistic, estimate_cutoff_with, fl_special_cutoff, CutoffEstimate,
    ObjectCounting,
};
use crate::fitting::{
    compare_families_with, eval_family, fit_gamma_type, Comparison, Family, FamilyParams,
    FitReport, GammaTypeParams,
};
use crate::genmodel::{gap_distribution_check, simulate_gaps, PlacementConfig, MIN_GAPS_FOR_CHECK};
use crate::jsonfmt::to_canonical_json;
use crate::report::{
    bins_csv, gaps_csv, plot_csv, series_csv, AnalysisReport, ConfigEcho, CorpusSummary,
    CutoffBlock, SimulationVerdict, ViewBlock,
};
use crate::stats::{
    binned_summary, distance_series, entity_counts, length_series, quantity_series_with,
    BinnedSummary, Dimension, DistributionSeries, View,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "geolaw",
    version,
    about = "Distribution-law analysis for entity-annotated corpora"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse corpora, extract distribution views, fit curves, estimate cutoffs.
    Analyze(AnalyzeArgs),
    /// Simulate Bernoulli entity placement and check the waiting-time law.
    Simulate(SimulateArgs),
    /// Fit curve families to an x,y series from a CSV file.
    Fit(FitArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum InputFormat {
    Conll,
    Jsonl,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DimArg {
    Quantity,
    Length,
    Distance,
}

impl DimArg {
    fn dimension(self) -> Dimension {
        match self {
            DimArg::Quantity => Dimension::Quantity,
            DimArg::Length => Dimension::Length,
            DimArg::Distance => Dimension::Distance,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    Gamma,
    Zipf,
    Gauss,
}

impl FamilyArg {
    fn family(self) -> Family {
        match self {
            FamilyArg::Gamma => Family::GammaType,
            FamilyArg::Zipf => Family::Zipf,
            FamilyArg::Gauss => Family::Gaussian,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum UnitArg {
    Char,
    Token,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CountingArg {
    Distinct,
    Total,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Input corpus files.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    /// Input annotation format.
    #[arg(long, value_enum, default_value = "conll")]
    format: InputFormat,
    /// Dimensions to analyze.
    #[arg(long, value_delimiter = ',', default_values = ["quantity", "length", "distance"])]
    dims: Vec<DimArg>,
    /// Distance unit: characters or whole tokens between spans.
    #[arg(long, value_enum, default_value = "char")]
    unit: UnitArg,
    /// Curve families to fit per view.
    #[arg(long, value_delimiter = ',', default_values = ["gamma", "zipf", "gauss"])]
    families: Vec<FamilyArg>,
    /// Estimate the upper cutoff of each view.
    #[arg(long)]
    cutoff: bool,
    /// Output directory for report.json and the CSV files.
    #[arg(long)]
    out: PathBuf,
    /// Entity types to keep (default: all).
    #[arg(long, value_delimiter = ',')]
    tag_filter: Vec<String>,
    /// Error on stray I- tags instead of repairing them.
    #[arg(long)]
    strict: bool,
    /// Marker line starting a new document in CoNLL input.
    #[arg(long, default_value = "-DOCSTART-")]
    doc_separator: String,
    /// Merge entity surfaces case-insensitively.
    #[arg(long)]
    fold_case: bool,
    /// Also write per-input-file reports and bin rows.
    #[arg(long)]
    per_file: bool,
    /// Fit the Gaussian with a free amplitude instead of the density normalization.
    #[arg(long)]
    free_amplitude: bool,
    /// How the cutoff estimator counts objects.
    #[arg(long, value_enum, default_value = "distinct")]
    n_counting: CountingArg,
}

#[derive(Args)]
struct SimulateArgs {
    /// Per-decision placement probability, in (0, 1].
    #[arg(long)]
    p: f64,
    /// Number of Bernoulli decisions to draw.
    #[arg(long)]
    tokens: u64,
    /// Successes per recorded waiting time.
    #[arg(long, default_value_t = 1)]
    k: u32,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Output directory for gaps.csv and verdict.json.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct FitArgs {
    /// CSV file with x,y columns (a header row is optional).
    #[arg(long)]
    series: PathBuf,
    /// gamma | zipf | gauss | all
    #[arg(long, default_value = "all")]
    family: String,
    /// Fit the Gaussian with a free amplitude.
    #[arg(long)]
    free_amplitude: bool,
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

/// Parse arguments and run; returns the process exit code.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code().try_into().unwrap_or(2u8));
        }
    };
    let outcome = match cli.command {
        Command::Analyze(args) => cmd_analyze(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Fit(args) => cmd_fit(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("geolaw: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

/// Worker cap: `GEOLAW_THREADS`, else available parallelism.
fn thread_cap() -> usize {
    std::env::var("GEOLAW_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
}

/// Order-preserving parallel map over owned items, at most `cap` workers.
fn par_map<T, R, F>(items: Vec<T>, cap: usize, f: &F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync,
{
    let n = items.len();
    let workers = cap.max(1).min(n.max(1));
    if workers <= 1 || n <= 1 {
        return items.into_iter().map(f).collect();
    }
    let chunk = n.div_ceil(workers);
    let mut results: Vec<Option<R>> = std::iter::repeat_with(|| None).take(n).collect();
    std::thread::scope(|scope| {
        let mut rest: &mut [Option<R>] = &mut results;
        let mut iter = items.into_iter();
        loop {
            let batch: Vec<T> = iter.by_ref().take(chunk).collect();
            if batch.is_empty() {
                break;
            }
            let (head, tail) = rest.split_at_mut(batch.len());
            rest = tail;
            scope.spawn(move || {
                for (slot, item) in head.iter_mut().zip(batch) {
                    *slot = Some(f(item));
                }
            });
        }
    });
    results
        .into_iter()
        .map(|r| r.expect("worker filled every slot"))
        .collect()
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

struct AnalyzeConfig {
    dims: Vec<Dimension>,
    families: Vec<Family>,
    unit: UnitMode,
    cutoff: bool,
    fold_case: bool,
    free_amplitude: bool,
    counting: ObjectCounting,
    thread_cap: usize,
}

/// Report and bin tables of one input file under `--per-file`.
struct FileStratum {
    name: String,
    report: AnalysisReport,
    bins: Vec<(Dimension, BinnedSummary)>,
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<(), Failure> {
    let cap = thread_cap();
    let unit = match args.unit {
        UnitArg::Char => UnitMode::Character,
        UnitArg::Token => UnitMode::Token,
    };

    // Canonical dimension order, deduplicated.
    let mut dims: Vec<Dimension> = Vec::new();
    for dim in [Dimension::Quantity, Dimension::Length, Dimension::Distance] {
        if args.dims.iter().any(|d| d.dimension() == dim) {
            dims.push(dim);
        }
    }
    let mut families: Vec<Family> = Vec::new();
    for arg in &args.families {
        let family = arg.family();
        if !families.contains(&family) {
            families.push(family);
        }
    }

    // Parse every input before anything is written.
    let tag_filter: BTreeSet<String> = args.tag_filter.iter().cloned().collect();
    let parse_one = |path: PathBuf| -> Result<Corpus, Failure> {
        let file = fs::File::open(&path)
            .map_err(|e| Failure::new(1, format!("{}: {e}", path.display())))?;
        let reader = std::io::BufReader::new(file);
        let corpus = match args.format {
            InputFormat::Conll => {
                let options = ConllOptions {
                    tag_filter: tag_filter.clone(),
                    strict: args.strict,
                    doc_separator: args.doc_separator.clone(),
                    unit_mode: unit,
                };
                parse_conll(reader, &options)
            }
            InputFormat::Jsonl => {
                let options = JsonlOptions {
                    tag_filter: tag_filter.clone(),
                    unit_mode: unit,
                };
                parse_jsonl_spans(reader, &options)
            }
        };
        corpus.map_err(|e| Failure::new(1, format!("{}: {e}", path.display())))
    };
    let parsed = par_map(args.inputs.clone(), cap, &parse_one);
    let mut corpora = Vec::with_capacity(parsed.len());
    for result in parsed {
        corpora.push(result?);
    }

    let config = AnalyzeConfig {
        dims: dims.clone(),
        families: families.clone(),
        unit,
        cutoff: args.cutoff,
        fold_case: args.fold_case,
        free_amplitude: args.free_amplitude,
        counting: match args.n_counting {
            CountingArg::Distinct => ObjectCounting::Distinct,
            CountingArg::Total => ObjectCounting::Total,
        },
        thread_cap: cap,
    };

    let echo = ConfigEcho {
        inputs: args
            .inputs
            .iter()
            .map(|p| p.display().to_string())
            .collect(),
        format: match args.format {
            InputFormat::Conll => "conll".to_string(),
            InputFormat::Jsonl => "jsonl".to_string(),
        },
        dims: dims.iter().map(|d| d.as_str().to_string()).collect(),
        unit,
        families: families.clone(),
        cutoff: args.cutoff,
        tag_filter: args.tag_filter.clone(),
        strict: args.strict,
        doc_separator: args.doc_separator.clone(),
        fold_case: args.fold_case,
        free_amplitude: args.free_amplitude,
        n_counting: config.counting,
        per_file: args.per_file,
        rank_order: "frequency".to_string(),
    };

    let merged = Corpus::merge(corpora.clone(), unit);
    let (report, bins) = analyze_corpus(&merged, &config, &echo)?;

    // Per-file strata are optional extras; empty dimensions there are
    // skipped rather than fatal.
    let mut per_file: Vec<FileStratum> = Vec::new();
    if args.per_file {
        let mut used_names: BTreeSet<String> = BTreeSet::new();
        for (path, corpus) in args.inputs.iter().zip(&corpora) {
            let name = unique_stem(path, &mut used_names);
            match analyze_corpus_lenient(corpus, &config, &echo) {
                Ok((report, bins)) => per_file.push(FileStratum { name, report, bins }),
                Err(failure) => {
                    eprintln!(
                        "geolaw: skipping per-file report for {name}: {}",
                        failure.message
                    )
                }
            }
        }
    }

    // Write outputs.
    let out = &args.out;
    fs::create_dir_all(out).map_err(|e| Failure::new(1, format!("{}: {e}", out.display())))?;
    write_file(&out.join("report.json"), &canonical(&report)?)?;
    for block in &report.views {
        let name = format!("series_{}.csv", block.view.as_str());
        write_file(&out.join(name), &series_csv(&block.series))?;
        if let Some(best) = block.fits.first() {
            let fitted: Vec<f64> = block
                .series
                .points
                .iter()
                .map(|p| eval_family(&best.params, p.x).unwrap_or(f64::NAN))
                .collect();
            let name = format!("plot_{}.csv", block.view.as_str());
            write_file(&out.join(name), &plot_csv(&block.series, &fitted))?;
        }
    }
    for (dimension, summary) in &bins {
        let mut rows = vec![("all".to_string(), summary.clone())];
        for stratum in &per_file {
            if let Some((_, s)) = stratum.bins.iter().find(|(d, _)| d == dimension) {
                rows.push((stratum.name.clone(), s.clone()));
            }
        }
        let name = format!("bins_{}.csv", dimension.as_str());
        write_file(&out.join(name), &bins_csv(&rows))?;
    }
    for stratum in &per_file {
        write_file(
            &out.join(format!("report_{}.json", stratum.name)),
            &canonical(&stratum.report)?,
        )?;
    }

    // A fit-eligible view where every requested family failed surfaces as
    // exit 3 after the partial report has been written. Series too short to
    // fit at all only record their per-family refusals in the report.
    let all_failed = report
        .views
        .iter()
        .find(|b| b.fits.is_empty() && !config.families.is_empty() && b.series.points.len() >= 4);
    if let Some(block) = all_failed {
        return Err(Failure::new(
            3,
            format!("all requested families failed for view {}", block.view),
        ));
    }
    Ok(())
}

/// Full pipeline over one corpus. Empty requested dimensions are fatal
/// (exit 2).
fn analyze_corpus(
    corpus: &Corpus,
    config: &AnalyzeConfig,
    echo: &ConfigEcho,
) -> Result<(AnalysisReport, Vec<(Dimension, BinnedSummary)>), Failure> {
    let mut series: Vec<DistributionSeries> = Vec::new();
    let mut bins: Vec<(Dimension, BinnedSummary)> = Vec::new();
    for &dimension in &config.dims {
        match dimension {
            Dimension::Quantity => {
                series.push(
                    quantity_series_with(corpus, config.fold_case)
                        .map_err(|e| Failure::new(2, e.to_string()))?,
                );
            }
            Dimension::Length => {
                let views = length_series(corpus).map_err(|e| Failure::new(2, e.to_string()))?;
                series.push(views.freq_rank);
                series.push(views.freq_value);
                series.push(views.value_rank);
            }
            Dimension::Distance => {
                let views = distance_series(corpus).map_err(|e| Failure::new(2, e.to_string()))?;
                series.push(views.freq_rank);
                series.push(views.freq_value);
                series.push(views.value_rank);
            }
        }
        bins.push((
            dimension,
            binned_summary(corpus, dimension).map_err(|e| Failure::new(2, e.to_string()))?,
        ));
    }
    // Canonical view order in the report.
    series.sort_by_key(|s| View::all().iter().position(|v| *v == s.view));

    let families = config.families.clone();
    let free_amplitude = config.free_amplitude;
    let comparisons: Vec<Comparison> = par_map(
        series.iter().collect::<Vec<_>>(),
        config.thread_cap,
        &|s: &DistributionSeries| {
            compare_families_with(&s.xs(), &s.ys(), &families, free_amplitude)
        },
    );

    let mut views = Vec::with_capacity(series.len());
    for (s, comparison) in series.into_iter().zip(comparisons) {
        let cutoff = if config.cutoff {
            view_cutoff(&s, &comparison, config.counting)
        } else {
            None
        };
        views.push(ViewBlock {
            view: s.view,
            series: s,
            fits: comparison.ranked,
            fit_failures: comparison.failures,
            cutoff,
        });
    }

    let counts = entity_counts(corpus, config.fold_case);
    let report = AnalysisReport {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config: echo.clone(),
        corpus: CorpusSummary {
            n_documents: corpus.documents.len(),
            n_entities: corpus.total_spans(),
            n_distinct_entities: counts.len(),
        },
        views,
    };
    Ok((report, bins))
}

/// Per-file variant: dimensions that are empty for this file are dropped.
fn analyze_corpus_lenient(
    corpus: &Corpus,
    config: &AnalyzeConfig,
    echo: &ConfigEcho,
) -> Result<(AnalysisReport, Vec<(Dimension, BinnedSummary)>), Failure> {
    let present: Vec<Dimension> = config
        .dims
        .iter()
        .copied()
        .filter(|&d| binned_summary(corpus, d).is_ok())
        .collect();
    if present.is_empty() {
        return Err(Failure::new(2, "no non-empty dimension"));
    }
    let narrowed = AnalyzeConfig {
        dims: present,
        families: config.families.clone(),
        unit: config.unit,
        cutoff: config.cutoff,
        fold_case: config.fold_case,
        free_amplitude: config.free_amplitude,
        counting: config.counting,
        thread_cap: config.thread_cap,
    };
    analyze_corpus(corpus, &narrowed, echo)
}

/// Cutoff for one view from its raw value multiset and its gamma-type fit.
///
/// The frequency-over-length view uses the direct peak estimate when the
/// fitted curve has an interior maximum; everything else iterates the
/// fixed point. Needs shape/rate from a gamma-type fit, which is fitted
/// on the spot when the family was not requested.
fn view_cutoff(
    series: &DistributionSeries,
    comparison: &Comparison,
    counting: ObjectCounting,
) -> Option<CutoffBlock> {
    let params = comparison
        .ranked
        .iter()
        .find_map(|r| match (&r.family, &r.params) {
            (Family::GammaType, FamilyParams::GammaType(p)) => Some(*p),
            _ => None,
        })
        .or_else(|| {
            fit_gamma_type(&series.xs(), &series.ys())
                .ok()
                .and_then(|r| match r.params {
                    FamilyParams::GammaType(p) => Some(p),
                    _ => None,
                })
        });
    let Some(params) = params else {
        eprintln!(
            "geolaw: no gamma-type fit available for {}; cutoff skipped",
            series.view
        );
        return None;
    };
    let mut observed = series.raw_values();
    // Distance-rank raw values keep the true distances, which may include
    // zero; the estimator needs positive objects, so the series' recorded
    // +1 shift applies to the cutoff multiset as well.
    if series.view == View::DistanceRank && series.x_offset_applied > 0 {
        for v in &mut observed {
            *v += f64::from(series.x_offset_applied);
        }
    }
    let (alpha, beta) = (params.shape(), params.rate());
    if alpha == 0.0 {
        eprintln!(
            "geolaw: fitted shape is zero for {}; cutoff skipped",
            series.view
        );
        return None;
    }

    if series.view == View::FreqLength {
        return Some(fl_cutoff_block(&params, &observed, counting));
    }

    match estimate_cutoff_with(&observed, alpha, beta, counting) {
        Ok(estimate) => Some(CutoffBlock {
            estimate,
            method: "fixed_point".to_string(),
            warning: None,
        }),
        Err(e) => {
            eprintln!("geolaw: cutoff failed for {}: {e}", series.view);
            None
        }
    }
}

/// Direct peak estimate for the frequency-over-length view, falling back to
/// the observed maximum when the fitted curve is unbounded.
fn fl_cutoff_block(
    params: &GammaTypeParams,
    observed: &[f64],
    counting: ObjectCounting,
) -> CutoffBlock {
    let lower = observed.iter().cloned().fold(f64::INFINITY, f64::min);
    let observed_max = observed.iter().cloned().fold(0.0f64, f64::max);
    let n = count_objects(observed, counting);
    let (alpha, beta) = (params.shape(), params.rate());
    let (estimated, method, warning) = match fl_special_cutoff(params, observed_max) {
        Ok(v) => (v, "fl_maximum", None),
        Err(e) => (observed_max, "observed_max_fallback", Some(e.to_string())),
    };
    let deviation = deviation_statistic(n, lower, estimated, alpha, beta);
    CutoffBlock {
        estimate: CutoffEstimate {
            lower_cutoff: lower,
            observed_max,
            estimated_cutoff: estimated.max(lower),
            deviation,
            deviation_mean: deviation,
            n_objects: n,
            iterations: 0,
            converged: true,
        },
        method: method.to_string(),
        warning,
    }
}

fn unique_stem(path: &Path, used: &mut BTreeSet<String>) -> String {
    let stem: String = path
        .file_stem()
        .map(|s| s.to_string_lossy().to_string())
        .unwrap_or_else(|| "input".to_string())
        .chars()
        .map(|c| {
            if c.is_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect();
    let mut candidate = stem.clone();
    let mut i = 1;
    while !used.insert(candidate.clone()) {
        i += 1;
        candidate = format!("{stem}_{i}");
    }
    candidate
}

fn canonical<T: serde::Serialize>(value: &T) -> Result<String, Failure> {
    to_canonical_json(value).map_err(|e| Failure::new(1, format!("serialization failed: {e}")))
}

fn write_file(path: &Path, content: &str) -> Result<(), Failure> {
    fs::write(path, content).map_err(|e| Failure::new(1, format!("{}: {e}", path.display())))
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

fn cmd_simulate(args: SimulateArgs) -> Result<(), Failure> {
    let config = PlacementConfig {
        p: args.p,
        n_tokens: args.tokens,
        k: args.k,
        seed: args.seed,
    };
    config
        .validate()
        .map_err(|e| Failure::new(1, e.to_string()))?;
    let sample = simulate_gaps(&config).map_err(|e| Failure::new(1, e.to_string()))?;

    let check = if sample.gaps.len() >= MIN_GAPS_FOR_CHECK {
        Some(
            gap_distribution_check(&sample, config.p)
                .map_err(|e| Failure::new(1, e.to_string()))?,
        )
    } else {
        None
    };

    let verdict = SimulationVerdict {
        config,
        n_gaps: sample.gaps.len(),
        mean: sample.mean(),
        variance: sample.variance(),
        kl_vs_geometric: check.map(|c| c.kl_vs_geometric),
        fitted_rate: check.and_then(|c| c.fitted_rate),
        beta_theory: -(1.0 - config.p).ln(),
        beta_poisson: config.p,
    };

    fs::create_dir_all(&args.out)
        .map_err(|e| Failure::new(1, format!("{}: {e}", args.out.display())))?;
    write_file(&args.out.join("gaps.csv"), &gaps_csv(&sample.gaps))?;
    write_file(&args.out.join("verdict.json"), &canonical(&verdict)?)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// fit
// ---------------------------------------------------------------------------

fn cmd_fit(args: FitArgs) -> Result<(), Failure> {
    let (xs, ys) = read_series_csv(&args.series)?;
    match args.family.as_str() {
        "all" => {
            let comparison = compare_families_with(&xs, &ys, &Family::all(), args.free_amplitude);
            print!("{}", canonical(&comparison)?);
            if comparison.ranked.is_empty() {
                return Err(Failure::new(3, "all families failed"));
            }
            Ok(())
        }
        name => {
            let family = match name {
                "gamma" => Family::GammaType,
                "zipf" => Family::Zipf,
                "gauss" => Family::Gaussian,
                other => {
                    return Err(Failure::new(
                        1,
                        format!("unknown family {other:?} (expected gamma|zipf|gauss|all)"),
                    ))
                }
            };
            let report: FitReport =
                crate::fitting::fit_family_with(&xs, &ys, family, args.free_amplitude)
                    .map_err(|e| Failure::new(1, format!("fit failed: {e}")))?;
            print!("{}", canonical(&report)?);
            Ok(())
        }
    }
}

/// Read a two-column series CSV. The header row is optional; when present
/// it must name an `x` column and a `y` (or `y_observed`) column. Extra
/// columns are ignored.
fn read_series_csv(path: &Path) -> Result<(Vec<f64>, Vec<f64>), Failure> {
    let content = fs::read_to_string(path)
        .map_err(|e| Failure::new(1, format!("{}: {e}", path.display())))?;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut columns: Option<(usize, usize)> = None;
    for (i, line) in content.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if columns.is_none() {
            let numeric = fields.iter().all(|f| f.parse::<f64>().is_ok());
            if numeric && fields.len() >= 2 {
                columns = Some((0, 1));
            } else {
                let lower: Vec<String> = fields.iter().map(|f| f.to_lowercase()).collect();
                let x_col = lower.iter().position(|f| f == "x");
                let y_col = lower.iter().position(|f| f == "y" || f == "y_observed");
                match (x_col, y_col) {
                    (Some(x), Some(y)) => {
                        columns = Some((x, y));
                        continue;
                    }
                    _ => {
                        return Err(Failure::new(
                            1,
                            format!("{}: line {}: expected x,y columns", path.display(), i + 1),
                        ))
                    }
                }
            }
        }
        let (x_col, y_col) = columns.expect("set above");
        let parse = |col: usize| -> Result<f64, Failure> {
            fields
                .get(col)
                .and_then(|f| f.parse::<f64>().ok())
                .ok_or_else(|| {
                    Failure::new(
                        1,
                        format!("{}: line {}: malformed row", path.display(), i + 1),
                    )
                })
        };
        xs.push(parse(x_col)?);
        ys.push(parse(y_col)?);
    }
    if xs.len() < 4 {
        return Err(Failure::new(
            2,
            format!("need at least 4 rows, got {}", xs.len()),
        ));
    }
    Ok((xs, ys))
}
