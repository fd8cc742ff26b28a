//! Pearson correlation and the labeled feature/price correlation matrix.

use std::io::Write;

use rayon::prelude::*;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::schema::{csv_header, NUM_FEATURES};

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Centered sum of squares, computed around the two-pass mean.
fn sum_sq_dev(xs: &[f64], m: f64) -> f64 {
    xs.iter().map(|x| (x - m) * (x - m)).sum()
}

/// Pearson's r between two equally long columns.
///
/// Uses two passes (means first, then deviations), which keeps columns with
/// large offsets such as build years or prices well conditioned.
pub fn pearson(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() || u.len() < 2 {
        return Err(Error::LengthMismatch {
            left: u.len(),
            right: v.len(),
        });
    }
    let (mu, mv) = (mean(u), mean(v));
    let (su, sv) = (sum_sq_dev(u, mu), sum_sq_dev(v, mv));
    if su == 0.0 {
        return Err(Error::DegenerateColumn("u".into()));
    }
    if sv == 0.0 {
        return Err(Error::DegenerateColumn("v".into()));
    }
    let cov: f64 = u.iter().zip(v).map(|(a, b)| (a - mu) * (b - mv)).sum();
    Ok((cov / (su.sqrt() * sv.sqrt())).clamp(-1.0, 1.0))
}

/// Symmetric matrix of Pearson coefficients. Cells involving a zero-variance
/// column are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    labels: Vec<String>,
    values: Vec<Vec<Option<f64>>>,
}

impl CorrelationMatrix {
    /// Pairwise correlation of arbitrary labeled columns.
    pub fn from_columns(labels: Vec<String>, columns: &[Vec<f64>]) -> Result<Self> {
        let k = columns.len();
        if labels.len() != k {
            return Err(Error::LengthMismatch {
                left: labels.len(),
                right: k,
            });
        }
        let n = columns.first().map_or(0, Vec::len);
        if n < 2 || columns.iter().any(|c| c.len() != n) {
            return Err(Error::LengthMismatch { left: n, right: 2 });
        }
        let upper: Vec<Vec<Option<f64>>> = (0..k)
            .into_par_iter()
            .map(|i| {
                (i..k)
                    .map(|j| pearson(&columns[i], &columns[j]).ok())
                    .collect()
            })
            .collect();
        let mut values = vec![vec![None; k]; k];
        for (i, row) in upper.into_iter().enumerate() {
            for (off, cell) in row.into_iter().enumerate() {
                values[i][i + off] = cell;
                values[i + off][i] = cell;
            }
        }
        Ok(CorrelationMatrix { labels, values })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn values(&self) -> &[Vec<Option<f64>>] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.values[i][j]
    }

    pub fn by_name(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.labels.iter().position(|l| l == a)?;
        let j = self.labels.iter().position(|l| l == b)?;
        self.values[i][j]
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Header row of labels (first cell empty), then one row per label.
    /// Undefined cells are written as `NA`.
    pub fn write_csv<W: Write>(&self, writer: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec![String::new()];
        header.extend(self.labels.iter().cloned());
        w.write_record(&header)?;
        for (label, row) in self.labels.iter().zip(&self.values) {
            let mut rec = vec![label.clone()];
            rec.extend(row.iter().map(|c| match c {
                Some(v) => v.to_string(),
                None => "NA".to_string(),
            }));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// 27×27 correlation over the 26 features and `Price`.
pub fn correlation_matrix(data: &Dataset) -> Result<CorrelationMatrix> {
    if data.len() < 2 {
        return Err(Error::InsufficientSamples {
            n: data.len(),
            k: 0,
        });
    }
    let labels = csv_header().into_iter().map(String::from).collect();
    let m = CorrelationMatrix::from_columns(labels, &data.columns())?;
    debug_assert_eq!(m.len(), NUM_FEATURES + 1);
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exact_relations() {
        assert!((pearson(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!((pearson(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap() + 1.0).abs() < 1e-15);
        // deviations (-1.5,-.5,.5,1.5) and (-1.5,.5,-.5,1.5): 4 / (√5·√5)
        let r = pearson(&[1.0, 2.0, 3.0, 4.0], &[1.0, 3.0, 2.0, 4.0]).unwrap();
        assert!((r - 0.8).abs() < 1e-15);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            pearson(&[1.0, 2.0], &[1.0]),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            pearson(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]),
            Err(Error::DegenerateColumn(_))
        ));
        assert!(pearson(&[1.0], &[1.0]).is_err());
    }

    #[test]
    fn constant_column_marked_undefined() {
        let cols = vec![
            vec![1.0, 2.0, 3.0, 5.0],
            vec![7.0, 7.0, 7.0, 7.0],
            vec![2.0, 1.0, 0.0, 4.0],
        ];
        let labels = vec!["a".into(), "b".into(), "c".into()];
        let m = CorrelationMatrix::from_columns(labels, &cols).unwrap();
        for i in 0..3 {
            assert_eq!(m.get(1, i), None);
            assert_eq!(m.get(i, 1), None);
        }
        assert!(m.get(0, 2).is_some());
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(",a,b,c\n"));
        assert!(text.contains("b,NA,NA,NA\n"));
    }

    #[test]
    fn identical_columns_give_ones() {
        let base = vec![3.0, 1.0, 4.0, 1.0, 5.0, 9.0, 2.0, 6.0];
        let cols = vec![base; 27];
        let labels = (0..27).map(|i| i.to_string()).collect();
        let m = CorrelationMatrix::from_columns(labels, &cols).unwrap();
        for row in m.values() {
            for c in row {
                assert!((c.unwrap() - 1.0).abs() < 1e-12);
            }
        }
    }

    proptest! {
        #[test]
        fn symmetric_and_affine_invariant(
            u in proptest::collection::vec(-1e3f64..1e3, 5..40),
            a in 0.1f64..100.0,
            b in -1e4f64..1e4,
            seed in 0u64..u64::MAX,
        ) {
            let v: Vec<f64> = u.iter().enumerate()
                .map(|(i, x)| x.sin() * 10.0 + ((seed >> (i % 60)) & 7) as f64)
                .collect();
            if let (Ok(r1), Ok(r2)) = (pearson(&u, &v), pearson(&v, &u)) {
                prop_assert!((r1 - r2).abs() < 1e-12);
                let scaled: Vec<f64> = u.iter().map(|x| a * x + b).collect();
                let r3 = pearson(&scaled, &v).unwrap();
                prop_assert!((r1 - r3).abs() < 1e-12);
                prop_assert!((pearson(&u, &scaled).unwrap() - 1.0).abs() < 1e-12);
                let neg: Vec<f64> = u.iter().map(|x| -a * x + b).collect();
                prop_assert!((pearson(&u, &neg).unwrap() + 1.0).abs() < 1e-12);
            }
        }
    }
}
