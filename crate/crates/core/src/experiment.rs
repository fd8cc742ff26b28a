//! Ablation harness over the five feature-block configurations and the
//! report/plot bundle built from its results.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dataset::{split, Dataset, SplitSpec};
use crate::error::{Error, Result};
use crate::gbt::{self, BoostParams, BoostedEnsemble};
use crate::linreg::{self, LinearModel};
use crate::metrics::{evaluate, MetricsReport};
use crate::schema::{Category, FeatureId};
use crate::stats::CorrelationMatrix;
use crate::svg;

/// Reference intercept of the all-feature linear model.
pub const REFERENCE_INTERCEPT: f64 = 548_013.555_766_962_4;
pub const INTERCEPT_TOLERANCE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AblationName {
    OnlyP,
    WithoutA,
    WithoutT,
    WithoutS,
    Pats,
}

impl AblationName {
    pub const ALL: [AblationName; 5] = [
        AblationName::OnlyP,
        AblationName::WithoutA,
        AblationName::WithoutT,
        AblationName::WithoutS,
        AblationName::Pats,
    ];

    pub fn label(self) -> &'static str {
        match self {
            AblationName::OnlyP => "w/ only P",
            AblationName::WithoutA => "w/o A",
            AblationName::WithoutT => "w/o T",
            AblationName::WithoutS => "w/o S",
            AblationName::Pats => "w/ PATS",
        }
    }

    pub fn slug(self) -> &'static str {
        match self {
            AblationName::OnlyP => "only-p",
            AblationName::WithoutA => "wo-a",
            AblationName::WithoutT => "wo-t",
            AblationName::WithoutS => "wo-s",
            AblationName::Pats => "pats",
        }
    }

    /// Feature categories dropped from the full set.
    fn excluded(self) -> &'static [Category] {
        match self {
            AblationName::OnlyP => &[Category::Amenity, Category::Traffic, Category::Emotions],
            AblationName::WithoutA => &[Category::Amenity],
            AblationName::WithoutT => &[Category::Traffic],
            AblationName::WithoutS => &[Category::Emotions],
            AblationName::Pats => &[],
        }
    }
}

impl fmt::Display for AblationName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for AblationName {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        AblationName::ALL
            .into_iter()
            .find(|n| n.label() == s || n.slug() == s)
            .ok_or_else(|| {
                let names: Vec<_> = AblationName::ALL.iter().map(|n| n.slug()).collect();
                format!(
                    "unknown config `{s}` (expected one of {})",
                    names.join(", ")
                )
            })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AblationConfig {
    pub name: AblationName,
    pub feature_subset: Vec<FeatureId>,
}

impl AblationConfig {
    pub fn new(name: AblationName) -> Self {
        let feature_subset = FeatureId::all()
            .filter(|f| !name.excluded().contains(&f.category()))
            .collect();
        AblationConfig {
            name,
            feature_subset,
        }
    }

    pub fn canonical() -> Vec<AblationConfig> {
        AblationName::ALL
            .into_iter()
            .map(AblationConfig::new)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ModelKind {
    Linear,
    Boosted,
}

impl ModelKind {
    pub const ALL: [ModelKind; 2] = [ModelKind::Linear, ModelKind::Boosted];

    pub fn label(self) -> &'static str {
        match self {
            ModelKind::Linear => "Linear regression",
            ModelKind::Boosted => "XGBoost regression",
        }
    }

    pub fn slug(self) -> &'static str {
        match self {
            ModelKind::Linear => "linear",
            ModelKind::Boosted => "boosted",
        }
    }
}

/// A trained model of either kind.
#[derive(Debug, Clone, PartialEq)]
pub enum TrainedModel {
    Linear(LinearModel),
    Boosted(BoostedEnsemble),
}

impl TrainedModel {
    pub fn fit(
        kind: ModelKind,
        train: &Dataset,
        subset: &[FeatureId],
        params: &BoostParams,
    ) -> Result<Self> {
        Ok(match kind {
            ModelKind::Linear => TrainedModel::Linear(linreg::fit_linear(train, subset)?),
            ModelKind::Boosted => TrainedModel::Boosted(gbt::fit_boosted(train, subset, params)?),
        })
    }

    pub fn predict(&self, data: &Dataset) -> Vec<f64> {
        match self {
            TrainedModel::Linear(m) => linreg::predict_dataset(m, data),
            TrainedModel::Boosted(m) => gbt::predict_dataset(m, data),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub config: AblationConfig,
    pub model_kind: ModelKind,
    pub train_metrics: MetricsReport,
    pub test_metrics: MetricsReport,
    pub seed: u64,
    pub params: Option<BoostParams>,
    /// Digest of the train/test partition this cell was fitted on.
    pub partition: String,
    #[serde(skip)]
    pub test_predictions: Vec<f64>,
}

/// A cell that could not be trained or evaluated.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellFailure {
    pub config: AblationConfig,
    pub model_kind: ModelKind,
    pub error: String,
}

pub type CellResult = std::result::Result<ExperimentResult, CellFailure>;

#[derive(Debug, Clone)]
pub struct AblationRun {
    /// Ten cells: all linear configs, then all boosted configs, each in
    /// canonical config order.
    pub results: Vec<CellResult>,
    pub split: SplitSpec,
    pub test_targets: Vec<f64>,
    pub partition_digest: String,
}

impl AblationRun {
    pub fn cell(&self, kind: ModelKind, name: AblationName) -> Option<&ExperimentResult> {
        self.results.iter().find_map(|r| match r {
            Ok(e) if e.model_kind == kind && e.config.name == name => Some(e),
            _ => None,
        })
    }
}

/// Split and boosting seeds derived from one run seed.
pub fn derive_seeds(seed: u64) -> (u64, u64) {
    (seed, seed ^ 0x9E37_79B9_7F4A_7C15)
}

/// SHA-256 over the bit patterns of both partitions in order.
pub fn partition_digest(train: &Dataset, test: &Dataset) -> String {
    let mut hasher = Sha256::new();
    for (tag, part) in [(b'T', train), (b'E', test)] {
        hasher.update([tag]);
        hasher.update((part.len() as u64).to_le_bytes());
        for r in part.records() {
            for v in r.features.iter().chain(std::iter::once(&r.price)) {
                hasher.update(v.to_bits().to_le_bytes());
            }
        }
    }
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn run_cell(
    config: &AblationConfig,
    kind: ModelKind,
    train: &Dataset,
    test: &Dataset,
    params: &BoostParams,
    seed: u64,
) -> CellResult {
    let fail = |e: Error| CellFailure {
        config: config.clone(),
        model_kind: kind,
        error: e.to_string(),
    };
    let model = TrainedModel::fit(kind, train, &config.feature_subset, params).map_err(fail)?;
    let k = config.feature_subset.len();
    let train_metrics = evaluate(&train.targets(), &model.predict(train), k).map_err(fail)?;
    let test_predictions = model.predict(test);
    let test_metrics = evaluate(&test.targets(), &test_predictions, k).map_err(fail)?;
    Ok(ExperimentResult {
        config: config.clone(),
        model_kind: kind,
        train_metrics,
        test_metrics,
        seed,
        params: (kind == ModelKind::Boosted).then_some(*params),
        partition: partition_digest(train, test),
        test_predictions,
    })
}

/// Trains and evaluates both model kinds on every configuration, all on the
/// same train/test partition. Cells run concurrently; failures are kept per
/// cell.
pub fn run_ablation(data: &Dataset, spec: SplitSpec, params: &BoostParams) -> Result<AblationRun> {
    params.validate()?;
    let (train, test) = split(data, spec);
    if train.is_empty() || test.is_empty() {
        return Err(Error::InsufficientSamples {
            n: data.len(),
            k: 0,
        });
    }
    let configs = AblationConfig::canonical();
    let cells: Vec<(ModelKind, &AblationConfig)> = ModelKind::ALL
        .iter()
        .flat_map(|&k| configs.iter().map(move |c| (k, c)))
        .collect();
    let results = cells
        .par_iter()
        .map(|&(kind, config)| run_cell(config, kind, &train, &test, params, spec.seed))
        .collect();
    Ok(AblationRun {
        results,
        split: spec,
        test_targets: test.targets(),
        partition_digest: partition_digest(&train, &test),
    })
}

/// One linear fit per candidate fit set, checked against the reference
/// intercept.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InterceptFit {
    pub model: LinearModel,
    pub intercept_within_tolerance: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinearFits {
    pub reference_intercept: f64,
    pub relative_tolerance: f64,
    pub train_split: InterceptFit,
    pub full_data: InterceptFit,
}

pub fn intercept_matches(intercept: f64) -> bool {
    ((intercept - REFERENCE_INTERCEPT) / REFERENCE_INTERCEPT).abs() <= INTERCEPT_TOLERANCE
}

/// All-feature linear model on the training split and on the full data.
pub fn linear_fits(data: &Dataset, spec: SplitSpec) -> Result<LinearFits> {
    let all: Vec<FeatureId> = FeatureId::all().collect();
    let (train, _) = split(data, spec);
    let wrap = |model: LinearModel| InterceptFit {
        intercept_within_tolerance: intercept_matches(model.intercept),
        model,
    };
    Ok(LinearFits {
        reference_intercept: REFERENCE_INTERCEPT,
        relative_tolerance: INTERCEPT_TOLERANCE,
        train_split: wrap(linreg::fit_linear(&train, &all)?),
        full_data: wrap(linreg::fit_linear(data, &all)?),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    ScatterActualVsPredicted,
    ResidualsVsPredicted,
    ErrorHistogram,
    CorrelationHeatmap,
    ImportanceBar,
}

impl PlotKind {
    pub fn slug(self) -> &'static str {
        match self {
            PlotKind::ScatterActualVsPredicted => "scatter_actual_vs_predicted",
            PlotKind::ResidualsVsPredicted => "residuals_vs_predicted",
            PlotKind::ErrorHistogram => "error_histogram",
            PlotKind::CorrelationHeatmap => "correlation_heatmap",
            PlotKind::ImportanceBar => "importance_bar",
        }
    }
}

/// Which chart to draw, over which model's predictions (for the three
/// prediction charts), and where to write it.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    pub kind: PlotKind,
    pub model: Option<ModelKind>,
    pub path: PathBuf,
}

impl PlotSpec {
    fn prediction_plots(dir: &Path) -> Vec<PlotSpec> {
        let mut out = Vec::new();
        for kind in [
            PlotKind::ScatterActualVsPredicted,
            PlotKind::ResidualsVsPredicted,
            PlotKind::ErrorHistogram,
        ] {
            for model in ModelKind::ALL {
                out.push(PlotSpec {
                    kind,
                    model: Some(model),
                    path: dir.join(format!("{}_{}.svg", kind.slug(), model.slug())),
                });
            }
        }
        out
    }
}

/// Everything a full report needs. Optional parts are skipped when absent.
#[derive(Debug, Clone, Copy)]
pub struct ReportInputs<'a> {
    pub run: &'a AblationRun,
    pub correlation: Option<&'a CorrelationMatrix>,
    pub importance: Option<&'a [(FeatureId, usize)]>,
    pub linear: Option<&'a LinearFits>,
}

const TABLE3_HEADER: [&str; 7] = ["Data", "Method", "R2", "AdjR2", "MAE", "MSE", "RMSE"];

/// Rows in reporting order: training set then testing set, each
/// with the linear block before the boosted block.
pub fn table3_csv(results: &[CellResult]) -> Result<String> {
    metrics_table(results, &AblationName::ALL)
}

/// Same layout as [`table3_csv`], restricted to `names`. Cells without a
/// result are written as `NA`.
pub fn metrics_table(results: &[CellResult], names: &[AblationName]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::format("table3.csv", e);
    w.write_record(TABLE3_HEADER).map_err(csv_err)?;
    for (set, testing) in [("Training set", false), ("Testing set", true)] {
        for kind in ModelKind::ALL {
            for &name in names {
                let method = format!("{} {}", kind.label(), name.label());
                let cell = results.iter().find(|r| match r {
                    Ok(e) => e.model_kind == kind && e.config.name == name,
                    Err(f) => f.model_kind == kind && f.config.name == name,
                });
                let mut row = vec![set.to_string(), method];
                match cell {
                    Some(Ok(e)) => {
                        let m = if testing {
                            &e.test_metrics
                        } else {
                            &e.train_metrics
                        };
                        row.extend(
                            [m.r2, m.adjusted_r2, m.mae, m.mse, m.rmse].map(|v| v.to_string()),
                        );
                    }
                    _ => row.extend(std::iter::repeat_n("NA".to_string(), 5)),
                }
                w.write_record(&row).map_err(csv_err)?;
            }
        }
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::format("table3.csv", e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn importance_csv(ranking: &[(FeatureId, usize)]) -> String {
    let mut out = String::from("rank,feature,fscore\n");
    for (i, (f, c)) in ranking.iter().enumerate() {
        out.push_str(&format!("{},{},{}\n", i + 1, f.name(), c));
    }
    out
}

pub fn correlation_csv(matrix: &CorrelationMatrix) -> Result<String> {
    let mut buf = Vec::new();
    matrix
        .write_csv(&mut buf)
        .map_err(|e| Error::format("correlation.csv", e))?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(contents.as_bytes())
        .map_err(|e| Error::io(path, e))
}

fn render_plot(spec: &PlotSpec, inputs: &ReportInputs<'_>) -> Option<String> {
    match spec.kind {
        PlotKind::CorrelationHeatmap => inputs
            .correlation
            .map(|c| svg::heatmap("Pearson correlation", c.labels(), c.values())),
        PlotKind::ImportanceBar => inputs.importance.map(|ranking| {
            let bars: Vec<(String, f64)> = ranking
                .iter()
                .map(|(f, c)| (f.name().to_string(), *c as f64))
                .collect();
            svg::bar_chart("Feature importance (split count)", "F score", &bars)
        }),
        kind => {
            let model = spec.model?;
            let cell = inputs.run.cell(model, AblationName::Pats)?;
            let (actual, pred) = (&inputs.run.test_targets, &cell.test_predictions);
            let title = format!(
                "{} {} (testing set)",
                model.label(),
                AblationName::Pats.label()
            );
            Some(match kind {
                PlotKind::ScatterActualVsPredicted => {
                    svg::scatter_actual_vs_predicted(&title, actual, pred)
                }
                PlotKind::ResidualsVsPredicted => svg::residuals_vs_predicted(&title, actual, pred),
                _ => svg::error_histogram(&title, actual, pred, 40),
            })
        }
    }
}

/// Writes `table3.csv` and the six prediction charts. Returns the paths
/// written.
pub fn emit_ablation(run: &AblationRun, dir: &Path) -> Result<Vec<PathBuf>> {
    emit(
        &ReportInputs {
            run,
            correlation: None,
            importance: None,
            linear: None,
        },
        dir,
    )
}

/// Writes the full bundle: `table3.csv`, `table2.json`, `correlation.csv`,
/// `importance.csv` and one SVG per plot. Output bytes depend only on the
/// inputs.
pub fn emit_report(inputs: &ReportInputs<'_>, dir: &Path) -> Result<Vec<PathBuf>> {
    emit(inputs, dir)
}

fn emit(inputs: &ReportInputs<'_>, dir: &Path) -> Result<Vec<PathBuf>> {
    if inputs.run.results.is_empty() {
        return Err(Error::InvalidParameter(
            "no ablation results to report".into(),
        ));
    }
    // Render everything before touching the filesystem.
    let mut files: Vec<(PathBuf, String)> =
        vec![(dir.join("table3.csv"), table3_csv(&inputs.run.results)?)];
    if let Some(fits) = inputs.linear {
        let json = serde_json::to_string_pretty(fits).expect("fits serialize") + "\n";
        files.push((dir.join("table2.json"), json));
    }
    if let Some(c) = inputs.correlation {
        files.push((dir.join("correlation.csv"), correlation_csv(c)?));
    }
    if let Some(r) = inputs.importance {
        files.push((dir.join("importance.csv"), importance_csv(r)));
    }
    let mut plots = PlotSpec::prediction_plots(dir);
    plots.push(PlotSpec {
        kind: PlotKind::CorrelationHeatmap,
        model: None,
        path: dir.join("correlation_heatmap.svg"),
    });
    plots.push(PlotSpec {
        kind: PlotKind::ImportanceBar,
        model: None,
        path: dir.join("importance_bar.svg"),
    });
    for spec in &plots {
        if let Some(svg) = render_plot(spec, inputs) {
            files.push((spec.path.clone(), svg));
        }
    }

    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for (path, contents) in &files {
        write_file(path, contents)?;
    }
    Ok(files.into_iter().map(|(p, _)| p).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{generate, SynthConfig};

    fn indices(name: AblationName) -> Vec<usize> {
        AblationConfig::new(name)
            .feature_subset
            .iter()
            .map(|f| f.index())
            .collect()
    }

    #[test]
    fn subsets_follow_categories() {
        assert_eq!(indices(AblationName::OnlyP), (0..=7).collect::<Vec<_>>());
        assert_eq!(
            indices(AblationName::WithoutA),
            (0..=7).chain(20..=25).collect::<Vec<_>>()
        );
        assert_eq!(
            indices(AblationName::WithoutT),
            (0..=19).chain(21..=25).collect::<Vec<_>>()
        );
        assert_eq!(
            indices(AblationName::WithoutS),
            (0..=20).collect::<Vec<_>>()
        );
        assert_eq!(indices(AblationName::Pats), (0..=25).collect::<Vec<_>>());
    }

    #[test]
    fn names_parse() {
        assert_eq!(
            "w/o A".parse::<AblationName>().unwrap(),
            AblationName::WithoutA
        );
        assert_eq!("pats".parse::<AblationName>().unwrap(), AblationName::Pats);
        assert!("PATS".parse::<AblationName>().is_err());
    }

    #[test]
    fn ten_cells_and_table_layout() {
        let data = generate(SynthConfig::new(300, 2));
        let params = BoostParams {
            n_trees: 5,
            ..BoostParams::default()
        };
        let run = run_ablation(&data, SplitSpec::default(), &params).unwrap();
        assert_eq!(run.results.len(), 10);
        let names: Vec<_> = run
            .results
            .iter()
            .map(|r| r.as_ref().unwrap().config.name)
            .collect();
        assert_eq!(&names[..5], &AblationName::ALL);
        assert_eq!(&names[5..], &AblationName::ALL);
        let k = run
            .cell(ModelKind::Linear, AblationName::WithoutA)
            .unwrap()
            .test_metrics
            .k;
        assert_eq!(k, 14);

        let csv = table3_csv(&run.results).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "Data,Method,R2,AdjR2,MAE,MSE,RMSE");
        assert_eq!(lines.len(), 21);
        assert!(lines[1].starts_with("Training set,Linear regression w/ only P,"));
        assert!(lines[20].starts_with("Testing set,XGBoost regression w/ PATS,"));
    }

    #[test]
    fn failed_cells_are_recorded() {
        // 40 rows → 12 test rows: too few to evaluate 26 features (n ≤ k + 1)
        // but enough for the 8 property features.
        let data = generate(SynthConfig::new(40, 3));
        let params = BoostParams {
            n_trees: 2,
            ..BoostParams::default()
        };
        let run = run_ablation(&data, SplitSpec::default(), &params).unwrap();
        assert_eq!(run.results.len(), 10);
        for kind in ModelKind::ALL {
            assert!(run.cell(kind, AblationName::OnlyP).is_some());
            assert!(run.cell(kind, AblationName::Pats).is_none());
        }
        let failure = run
            .results
            .iter()
            .filter_map(|r| r.as_ref().err())
            .find(|f| f.config.name == AblationName::Pats)
            .unwrap();
        assert!(failure.error.contains("insufficient samples"));
        let csv = table3_csv(&run.results).unwrap();
        assert!(csv.contains("Linear regression w/ PATS,NA,NA,NA,NA,NA"));
    }

    #[test]
    fn empty_results_write_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("report");
        let run = AblationRun {
            results: vec![],
            split: SplitSpec::default(),
            test_targets: vec![],
            partition_digest: String::new(),
        };
        assert!(emit_ablation(&run, &out).is_err());
        assert!(!out.exists());
    }

    #[test]
    fn intercept_tolerance() {
        assert!(intercept_matches(REFERENCE_INTERCEPT * 1.009));
        assert!(!intercept_matches(REFERENCE_INTERCEPT * 0.98));
    }

    #[test]
    fn digest_tracks_partition() {
        let data = generate(SynthConfig::new(50, 1));
        let (a, b) = split(&data, SplitSpec::default());
        let (c, d) = split(&data, SplitSpec::new(0.7, 43).unwrap());
        assert_eq!(partition_digest(&a, &b), partition_digest(&a, &b));
        assert_ne!(partition_digest(&a, &b), partition_digest(&c, &d));
        assert_eq!(partition_digest(&a, &b).len(), 64);
    }
}
