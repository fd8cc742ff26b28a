//! Command-line front end. Usage errors exit with status 2, data and I/O
//! errors with status 1.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::dataset::{ingest_csv, split, Dataset, SplitSpec, DEFAULT_SEED, DEFAULT_TRAIN_FRACTION};
use crate::error::{Error, Result};
use crate::experiment::{
    self, derive_seeds, emit_ablation, emit_report, linear_fits, metrics_table, partition_digest,
    run_ablation, AblationConfig, AblationName, CellResult, ExperimentResult, ModelKind,
    ReportInputs, TrainedModel,
};
use crate::gbt::{feature_importance, fit_boosted, BoostParams, BoostedEnsemble};
use crate::geofeatures::{self, DeriveOptions, RawSources};
use crate::linreg::LinearModel;
use crate::metrics::evaluate;
use crate::stats::correlation_matrix;

#[derive(Debug, Parser)]
#[command(
    name = "pricelab",
    version,
    about = "Multi-source real-estate price modelling"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    /// Run seed; split and boosting seeds are derived from it.
    #[arg(long, env = "PATE_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long = "train-frac", default_value_t = DEFAULT_TRAIN_FRACTION)]
    pub train_frac: f64,
}

impl SplitArgs {
    fn spec(&self) -> Result<SplitSpec> {
        SplitSpec::new(self.train_frac, derive_seeds(self.seed).0)
    }
}

#[derive(Debug, Args)]
pub struct BoostArgs {
    #[arg(long, default_value_t = 100)]
    pub trees: usize,
    #[arg(long, default_value_t = 6)]
    pub depth: usize,
    #[arg(long, default_value_t = 0.3)]
    pub eta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 0.0)]
    pub gamma: f64,
}

impl BoostArgs {
    fn params(&self, seed: u64) -> Result<BoostParams> {
        let p = BoostParams {
            n_trees: self.trees,
            max_depth: self.depth,
            learning_rate: self.eta,
            lambda: self.lambda,
            gamma: self.gamma,
            seed: derive_seeds(seed).1,
            ..BoostParams::default()
        };
        p.validate()?;
        Ok(p)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a canonical 27-column CSV; optionally rewrite it.
    Ingest {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Derive amenity, traffic and emotion features from raw sources.
    Features {
        /// Property CSV: Year,Elvt,RmNum,HllNum,KchNum,BthNum,Lat,Lng,Price
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        pois: PathBuf,
        #[arg(long)]
        traffic: PathBuf,
        #[arg(long)]
        emotions: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the 27×27 Pearson correlation matrix.
    Correlate {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit both models on the training split and save them as JSON.
    Train {
        #[arg(long)]
        data: PathBuf,
        #[command(flatten)]
        split: SplitArgs,
        #[command(flatten)]
        boost: BoostArgs,
        #[arg(long, default_value = "pats")]
        config: AblationName,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score models saved by `train` on both partitions.
    Evaluate {
        #[arg(long)]
        data: PathBuf,
        #[command(flatten)]
        split: SplitArgs,
        /// Directory holding the output of `train`; metrics.csv goes there too.
        #[arg(long)]
        out: PathBuf,
    },
    /// Rank features by split count of the boosted model.
    Importance {
        #[arg(long)]
        data: PathBuf,
        #[command(flatten)]
        split: SplitArgs,
        #[command(flatten)]
        boost: BoostArgs,
        #[arg(long, default_value = "pats")]
        config: AblationName,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run all ten ablation cells; write table3.csv and prediction charts.
    Ablate {
        #[arg(long)]
        data: PathBuf,
        #[command(flatten)]
        split: SplitArgs,
        #[command(flatten)]
        boost: BoostArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Full report bundle: tables, correlation, importance and all charts.
    Report {
        #[arg(long)]
        data: PathBuf,
        #[command(flatten)]
        split: SplitArgs,
        #[command(flatten)]
        boost: BoostArgs,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Written next to trained models so `evaluate` can check it scores the
/// same partition.
#[derive(Debug, Serialize, Deserialize)]
struct TrainManifest {
    config: AblationName,
    seed: u64,
    train_fraction: f64,
    partition: String,
}

/// Parses `args` and runs the command.
pub fn main<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn write(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Ingest { data, out } => {
            let ds = ingest_csv(&data)?;
            println!("{}: {} records", data.display(), ds.len());
            if let Some(out) = out {
                ds.save_csv(&out)?;
            }
        }
        Command::Features {
            data,
            pois,
            traffic,
            emotions,
            out,
        } => {
            let properties = geofeatures::read_properties(&data)?;
            let sources = RawSources {
                pois: geofeatures::read_pois(&pois)?,
                traffic: geofeatures::read_traffic(&traffic)?,
                emotions: geofeatures::read_emotions(&emotions)?,
            };
            let ds = geofeatures::derive_dataset(
                &properties,
                &sources,
                DeriveOptions::default(),
                data.display().to_string(),
            )?;
            ds.save_csv(&out)?;
            println!("{}: {} records", out.display(), ds.len());
        }
        Command::Correlate { data, out } => {
            let ds = ingest_csv(&data)?;
            let m = correlation_matrix(&ds)?;
            write(&out, &experiment::correlation_csv(&m)?)?;
        }
        Command::Train {
            data,
            split: split_args,
            boost,
            config,
            out,
        } => {
            let ds = ingest_csv(&data)?;
            let spec = split_args.spec()?;
            let params = boost.params(split_args.seed)?;
            let (train, test) = split(&ds, spec);
            let subset = AblationConfig::new(config).feature_subset;
            let linear = crate::linreg::fit_linear(&train, &subset)?;
            let boosted = fit_boosted(&train, &subset, &params)?;
            let manifest = TrainManifest {
                config,
                seed: split_args.seed,
                train_fraction: spec.train_fraction,
                partition: partition_digest(&train, &test),
            };
            write(&out.join("linear.json"), &(linear.to_json() + "\n"))?;
            write(&out.join("boosted.json"), &(boosted.to_json() + "\n"))?;
            write(
                &out.join("train.json"),
                &(serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n"),
            )?;
        }
        Command::Evaluate {
            data,
            split: split_args,
            out,
        } => {
            let ds = ingest_csv(&data)?;
            let spec = split_args.spec()?;
            let (train, test) = split(&ds, spec);
            let parse_err = |p: &Path, e: serde_json::Error| Error::format(p, e);
            let manifest_path = out.join("train.json");
            let manifest: TrainManifest = serde_json::from_str(&read(&manifest_path)?)
                .map_err(|e| parse_err(&manifest_path, e))?;
            if manifest.partition != partition_digest(&train, &test) {
                return Err(Error::InvalidParameter(format!(
                    "partition differs from the one used by train (seed {}, train-frac {})",
                    manifest.seed, manifest.train_fraction
                )));
            }
            let linear_path = out.join("linear.json");
            let linear: LinearModel = serde_json::from_str(&read(&linear_path)?)
                .map_err(|e| parse_err(&linear_path, e))?;
            let boosted_path = out.join("boosted.json");
            let boosted: BoostedEnsemble = serde_json::from_str(&read(&boosted_path)?)
                .map_err(|e| parse_err(&boosted_path, e))?;
            let config = AblationConfig::new(manifest.config);
            let k = config.feature_subset.len();
            let models = [
                (ModelKind::Linear, TrainedModel::Linear(linear)),
                (ModelKind::Boosted, TrainedModel::Boosted(boosted.clone())),
            ];
            let mut results: Vec<CellResult> = Vec::new();
            for (kind, model) in models {
                let test_predictions = model.predict(&test);
                results.push(Ok(ExperimentResult {
                    config: config.clone(),
                    model_kind: kind,
                    train_metrics: evaluate(&train.targets(), &model.predict(&train), k)?,
                    test_metrics: evaluate(&test.targets(), &test_predictions, k)?,
                    seed: spec.seed,
                    params: (kind == ModelKind::Boosted).then_some(boosted.params),
                    partition: manifest.partition.clone(),
                    test_predictions,
                }));
            }
            write(
                &out.join("metrics.csv"),
                &metrics_table(&results, &[config.name])?,
            )?;
        }
        Command::Importance {
            data,
            split: split_args,
            boost,
            config,
            out,
        } => {
            let ds = ingest_csv(&data)?;
            let (train, _) = split(&ds, split_args.spec()?);
            let subset = AblationConfig::new(config).feature_subset;
            let model = fit_boosted(&train, &subset, &boost.params(split_args.seed)?)?;
            write(
                &out,
                &experiment::importance_csv(&feature_importance(&model)),
            )?;
        }
        Command::Ablate {
            data,
            split: split_args,
            boost,
            out,
        } => {
            let ds = ingest_csv(&data)?;
            let run = run_ablation(&ds, split_args.spec()?, &boost.params(split_args.seed)?)?;
            report_failures(&run.results);
            emit_ablation(&run, &out)?;
        }
        Command::Report {
            data,
            split: split_args,
            boost,
            out,
        } => {
            let ds = ingest_csv(&data)?;
            let spec = split_args.spec()?;
            let params = boost.params(split_args.seed)?;
            let run = run_ablation(&ds, spec, &params)?;
            report_failures(&run.results);
            let correlation = correlation_matrix(&ds)?;
            let importance = importance_for(&ds, spec, &params)?;
            let linear = linear_fits(&ds, spec).ok();
            let inputs = ReportInputs {
                run: &run,
                correlation: Some(&correlation),
                importance: Some(&importance),
                linear: linear.as_ref(),
            };
            emit_report(&inputs, &out)?;
        }
    }
    Ok(())
}

fn importance_for(
    ds: &Dataset,
    spec: SplitSpec,
    params: &BoostParams,
) -> Result<Vec<(crate::schema::FeatureId, usize)>> {
    let (train, _) = split(ds, spec);
    let subset = AblationConfig::new(AblationName::Pats).feature_subset;
    Ok(feature_importance(&fit_boosted(&train, &subset, params)?))
}

fn report_failures(results: &[CellResult]) {
    for f in results.iter().filter_map(|r| r.as_ref().err()) {
        log::warn!("{} {}: {}", f.model_kind.label(), f.config.name, f.error);
    }
}
