//! Record types, CSV ingestion/serialization and seeded train/test splitting.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schema::{csv_header, FeatureId, FEATURE_NAMES, NUM_FEATURES, TARGET_NAME};

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_TRAIN_FRACTION: f64 = 0.7;

/// One transaction: 26 features ordered by [`FeatureId`] index plus the
/// price per square meter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropertyRecord {
    pub features: [f64; NUM_FEATURES],
    pub price: f64,
}

impl PropertyRecord {
    pub fn new(features: [f64; NUM_FEATURES], price: f64) -> Self {
        PropertyRecord { features, price }
    }

    pub fn get(&self, feature: FeatureId) -> f64 {
        self.features[feature.index()]
    }

    /// Checks the per-record domain constraints; the message names the
    /// first offending field.
    pub fn validate(&self) -> std::result::Result<(), String> {
        for (i, v) in self.features.iter().enumerate() {
            if !v.is_finite() {
                return Err(format!("{} is not finite", FEATURE_NAMES[i]));
            }
        }
        if !(self.price.is_finite() && self.price > 0.0) {
            return Err(format!("Price must be > 0, got {}", self.price));
        }
        let f = &self.features;
        if f[1] != 0.0 && f[1] != 1.0 {
            return Err(format!("Elvt must be 0 or 1, got {}", f[1]));
        }
        for i in 2..=5 {
            if f[i] < 0.0 || f[i].fract() != 0.0 {
                return Err(format!(
                    "{} must be a non-negative integer, got {}",
                    FEATURE_NAMES[i], f[i]
                ));
            }
        }
        for i in (8..=18).step_by(2) {
            if f[i] < 0.0 {
                return Err(format!("{} must be >= 0, got {}", FEATURE_NAMES[i], f[i]));
            }
        }
        for i in (9..=19).step_by(2) {
            if !(0.0..=1000.0).contains(&f[i]) {
                return Err(format!(
                    "{} must lie in [0, 1000], got {}",
                    FEATURE_NAMES[i], f[i]
                ));
            }
        }
        for i in 21..=25 {
            if !(0.0..=100.0).contains(&f[i]) {
                return Err(format!(
                    "{} must lie in [0, 100], got {}",
                    FEATURE_NAMES[i], f[i]
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    records: Vec<PropertyRecord>,
    schema: Vec<FeatureId>,
    provenance: String,
}

impl Dataset {
    /// Builds a dataset after validating every record. Row numbers in
    /// errors are 1-based.
    pub fn new(records: Vec<PropertyRecord>, provenance: impl Into<String>) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::EmptyDataset);
        }
        for (i, r) in records.iter().enumerate() {
            r.validate().map_err(|message| Error::InvariantViolation {
                row: i + 1,
                message,
            })?;
        }
        Ok(Dataset {
            records,
            schema: FeatureId::all().collect(),
            provenance: provenance.into(),
        })
    }

    pub fn records(&self) -> &[PropertyRecord] {
        &self.records
    }

    pub fn schema(&self) -> &[FeatureId] {
        &self.schema
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn column(&self, feature: FeatureId) -> Vec<f64> {
        self.records.iter().map(|r| r.get(feature)).collect()
    }

    pub fn targets(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.price).collect()
    }

    /// All 27 columns (26 features then `Price`) in schema order.
    pub fn columns(&self) -> Vec<Vec<f64>> {
        let mut cols: Vec<Vec<f64>> = FeatureId::all().map(|f| self.column(f)).collect();
        cols.push(self.targets());
        cols
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(csv_header())?;
        let mut fields = Vec::with_capacity(NUM_FEATURES + 1);
        for r in &self.records {
            fields.clear();
            fields.extend(r.features.iter().map(|v| v.to_string()));
            fields.push(r.price.to_string());
            w.write_record(&fields)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(file).map_err(|e| Error::format(path, e))
    }
}

/// Reads a canonical 27-column CSV file.
pub fn ingest_csv(path: &Path) -> Result<Dataset> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file, path.display().to_string())
}

/// Parses canonical CSV from any reader. The header must match
/// [`csv_header`] exactly; empty or non-numeric cells are errors.
pub fn read_csv<R: Read>(reader: R, provenance: impl Into<String>) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let expected = csv_header();
    let headers = rdr.headers().map_err(|e| Error::ParseError {
        row: 0,
        column: String::new(),
        message: e.to_string(),
    })?;
    for (position, name) in expected.iter().enumerate() {
        let found = headers.get(position).unwrap_or("");
        if found != *name {
            return Err(Error::MissingColumn {
                position,
                expected: (*name).to_string(),
                found: found.to_string(),
            });
        }
    }
    if headers.len() > expected.len() {
        return Err(Error::MissingColumn {
            position: expected.len(),
            expected: String::new(),
            found: headers[expected.len()].to_string(),
        });
    }

    let mut records = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row_no = i + 1;
        let row = row.map_err(|e| Error::ParseError {
            row: row_no,
            column: String::new(),
            message: e.to_string(),
        })?;
        if row.len() != expected.len() {
            return Err(Error::ParseError {
                row: row_no,
                column: expected.get(row.len()).unwrap_or(&TARGET_NAME).to_string(),
                message: format!("expected {} fields, found {}", expected.len(), row.len()),
            });
        }
        let mut values = [0.0; NUM_FEATURES + 1];
        for (j, cell) in row.iter().enumerate() {
            values[j] = parse_cell(cell).map_err(|message| Error::ParseError {
                row: row_no,
                column: expected[j].to_string(),
                message,
            })?;
        }
        let mut features = [0.0; NUM_FEATURES];
        features.copy_from_slice(&values[..NUM_FEATURES]);
        records.push(PropertyRecord::new(features, values[NUM_FEATURES]));
    }
    Dataset::new(records, provenance)
}

pub(crate) fn parse_cell(cell: &str) -> std::result::Result<f64, String> {
    if cell.is_empty() {
        return Err("missing value".to_string());
    }
    match cell.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(format!("`{cell}` is not a finite number")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            train_fraction: DEFAULT_TRAIN_FRACTION,
            seed: DEFAULT_SEED,
        }
    }
}

impl SplitSpec {
    pub fn new(train_fraction: f64, seed: u64) -> Result<Self> {
        if !(train_fraction > 0.0 && train_fraction < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "train fraction must lie in (0, 1), got {train_fraction}"
            )));
        }
        Ok(SplitSpec {
            train_fraction,
            seed,
        })
    }

    pub fn train_size(&self, n: usize) -> usize {
        (n as f64 * self.train_fraction).floor() as usize
    }

    /// The shuffled index order; the first `train_size(n)` entries form
    /// the training partition.
    pub fn permutation(&self, n: usize) -> Vec<usize> {
        let mut order: Vec<usize> = (0..n).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        order.shuffle(&mut rng);
        order
    }
}

/// Seeded uniform shuffle followed by a prefix cut.
pub fn split(data: &Dataset, spec: SplitSpec) -> (Dataset, Dataset) {
    let n = data.len();
    let order = spec.permutation(n);
    let cut = spec.train_size(n);
    let pick = |idx: &[usize]| idx.iter().map(|&i| data.records[i]).collect::<Vec<_>>();
    let train = Dataset {
        records: pick(&order[..cut]),
        schema: data.schema.clone(),
        provenance: format!("{}#train(seed={})", data.provenance, spec.seed),
    };
    let test = Dataset {
        records: pick(&order[cut..]),
        schema: data.schema.clone(),
        provenance: format!("{}#test(seed={})", data.provenance, spec.seed),
    };
    (train, test)
}
