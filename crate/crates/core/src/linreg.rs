//! Ordinary least squares with intercept, solved by Householder QR on the
//! raw (unstandardized) design matrix.

use log::warn;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::schema::FeatureId;

/// A pivot counts as rank deficient when `|R_kk|` falls below this fraction
/// of the original column norm.
const RANK_TOLERANCE: f64 = 1e-10;
const RIDGE_SCALE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub feature: FeatureId,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub intercept: f64,
    pub coefficients: Vec<Coefficient>,
    /// Set when the design was rank deficient and a small ridge term was
    /// added to complete the fit.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ridge: Option<f64>,
}

impl LinearModel {
    pub fn feature_subset(&self) -> Vec<FeatureId> {
        self.coefficients.iter().map(|c| c.feature).collect()
    }

    pub fn coefficient(&self, feature: FeatureId) -> Option<f64> {
        self.coefficients
            .iter()
            .find(|c| c.feature == feature)
            .map(|c| c.value)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }
}

/// Dense column-major matrix, just enough for a thin QR.
struct Columns {
    rows: usize,
    data: Vec<Vec<f64>>,
}

/// Householder QR of a tall matrix. `R` is left in the upper triangle of
/// the columns; reflectors are kept for applying `Qᵀ`.
struct Qr {
    cols: Columns,
    reflectors: Vec<Vec<f64>>,
    diag: Vec<f64>,
}

impl Qr {
    fn factor(mut cols: Columns) -> Qr {
        let p = cols.data.len();
        let m = cols.rows;
        let mut reflectors = Vec::with_capacity(p);
        let mut diag = Vec::with_capacity(p);
        for k in 0..p {
            let col = &cols.data[k];
            let norm = col[k..].iter().map(|x| x * x).sum::<f64>().sqrt();
            let mut v: Vec<f64> = col[k..].to_vec();
            let alpha = if v[0] > 0.0 { -norm } else { norm };
            v[0] -= alpha;
            let vnorm2: f64 = v.iter().map(|x| x * x).sum();
            if vnorm2 > 0.0 {
                for j in k..p {
                    let c = &mut cols.data[j][k..m];
                    let dot: f64 = v.iter().zip(c.iter()).map(|(a, b)| a * b).sum();
                    let f = 2.0 * dot / vnorm2;
                    for (ci, vi) in c.iter_mut().zip(&v) {
                        *ci -= f * vi;
                    }
                }
            }
            diag.push(cols.data[k][k]);
            reflectors.push(v);
        }
        Qr {
            cols,
            reflectors,
            diag,
        }
    }

    fn apply_qt(&self, y: &mut [f64]) {
        for (k, v) in self.reflectors.iter().enumerate() {
            let vnorm2: f64 = v.iter().map(|x| x * x).sum();
            if vnorm2 == 0.0 {
                continue;
            }
            let seg = &mut y[k..];
            let dot: f64 = v.iter().zip(seg.iter()).map(|(a, b)| a * b).sum();
            let f = 2.0 * dot / vnorm2;
            for (yi, vi) in seg.iter_mut().zip(v) {
                *yi -= f * vi;
            }
        }
    }

    fn solve(&self, y: &[f64]) -> Vec<f64> {
        let mut qty = y.to_vec();
        self.apply_qt(&mut qty);
        let p = self.diag.len();
        let mut beta = vec![0.0; p];
        for k in (0..p).rev() {
            let s: f64 = (k + 1..p).map(|j| self.cols.data[j][k] * beta[j]).sum();
            beta[k] = (qty[k] - s) / self.diag[k];
        }
        beta
    }
}

/// Least-squares solution of `X β ≈ y` for column-major `X`.
///
/// When a pivot collapses the system is re-solved with a ridge term of
/// `1e-8 × mean(diag XᵀX)` on the first `penalized` coefficients, by
/// augmenting `X` with `√ridge` rows; the ridge value is returned alongside
/// the solution in that case.
fn least_squares(
    columns: Vec<Vec<f64>>,
    y: &[f64],
    penalized: usize,
) -> Result<(Vec<f64>, Option<f64>)> {
    let n = y.len();
    let p = columns.len();
    let norms: Vec<f64> = columns
        .iter()
        .map(|c| c.iter().map(|x| x * x).sum::<f64>().sqrt())
        .collect();
    let qr = Qr::factor(Columns {
        rows: n,
        data: columns.clone(),
    });
    let deficient = qr
        .diag
        .iter()
        .zip(&norms)
        .any(|(r, norm)| r.is_nan() || r.abs() <= RANK_TOLERANCE * norm);
    if !deficient {
        let beta = qr.solve(y);
        if beta.iter().all(|b| b.is_finite()) {
            return Ok((beta, None));
        }
    }

    let condition = condition_estimate(&qr.diag);
    let ridge = RIDGE_SCALE * norms.iter().map(|x| x * x).sum::<f64>() / p as f64;
    warn!("rank-deficient design (condition ~{condition:e}); refitting with ridge {ridge:e}");
    if !(ridge > 0.0 && ridge.is_finite()) {
        return Err(Error::SingularDesign { condition });
    }
    let root = ridge.sqrt();
    let augmented: Vec<Vec<f64>> = columns
        .into_iter()
        .enumerate()
        .map(|(j, mut c)| {
            c.extend((0..penalized).map(|i| if i == j { root } else { 0.0 }));
            c
        })
        .collect();
    let mut y_aug = y.to_vec();
    y_aug.extend(std::iter::repeat_n(0.0, penalized));
    let qr = Qr::factor(Columns {
        rows: n + penalized,
        data: augmented,
    });
    let beta = qr.solve(&y_aug);
    if beta.iter().all(|b| b.is_finite()) {
        Ok((beta, Some(ridge)))
    } else {
        Err(Error::SingularDesign { condition })
    }
}

fn condition_estimate(diag: &[f64]) -> f64 {
    let max = diag.iter().fold(0.0f64, |a, d| a.max(d.abs()));
    let min = diag.iter().fold(f64::INFINITY, |a, d| a.min(d.abs()));
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Slopes and intercept of a least-squares fit on raw columns.
#[derive(Debug, Clone, PartialEq)]
pub struct OlsFit {
    pub slopes: Vec<f64>,
    pub intercept: f64,
    pub ridge: Option<f64>,
}

/// Least squares of `y` on `columns` plus an all-ones column.
pub fn ols(columns: &[&[f64]], y: &[f64]) -> Result<OlsFit> {
    let n = y.len();
    if n <= columns.len() + 1 {
        return Err(Error::InsufficientSamples {
            n,
            k: columns.len(),
        });
    }
    if let Some(c) = columns.iter().find(|c| c.len() != n) {
        return Err(Error::LengthMismatch {
            left: c.len(),
            right: n,
        });
    }
    let mut design: Vec<Vec<f64>> = columns.iter().map(|c| c.to_vec()).collect();
    design.push(vec![1.0; n]);
    let (mut beta, ridge) = least_squares(design, y, columns.len())?;
    let intercept = beta.pop().expect("intercept column present");
    Ok(OlsFit {
        slopes: beta,
        intercept,
        ridge,
    })
}

/// Fits `Price ≈ Σ αᵢ xᵢ + β` over `subset`.
pub fn fit_linear(train: &Dataset, subset: &[FeatureId]) -> Result<LinearModel> {
    let columns: Vec<Vec<f64>> = subset.iter().map(|&f| train.column(f)).collect();
    let views: Vec<&[f64]> = columns.iter().map(Vec::as_slice).collect();
    let fit = ols(&views, &train.targets())?;
    Ok(LinearModel {
        intercept: fit.intercept,
        coefficients: subset
            .iter()
            .zip(fit.slopes)
            .map(|(&feature, value)| Coefficient { feature, value })
            .collect(),
        ridge: fit.ridge,
    })
}

/// Dot product plus intercept. `row` is indexed by feature index; a feature
/// is missing when the row is too short or holds NaN.
pub fn predict_linear(model: &LinearModel, row: &[f64]) -> Result<f64> {
    let mut y = model.intercept;
    for c in &model.coefficients {
        match row.get(c.feature.index()) {
            Some(x) if !x.is_nan() => y += c.value * x,
            _ => return Err(Error::MissingFeature(c.feature.name().to_string())),
        }
    }
    Ok(y)
}

pub fn predict_dataset(model: &LinearModel, data: &Dataset) -> Vec<f64> {
    data.records()
        .iter()
        .map(|r| predict_linear(model, &r.features).expect("full-width record"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::PropertyRecord;
    use crate::schema::NUM_FEATURES;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dataset_from(xs: &[[f64; NUM_FEATURES]], y: &[f64]) -> Dataset {
        Dataset::new(
            xs.iter()
                .zip(y)
                .map(|(x, &p)| PropertyRecord::new(*x, p))
                .collect(),
            "test",
        )
        .unwrap()
    }

    /// Random records satisfying the record invariants.
    fn random_rows(rng: &mut ChaCha8Rng, n: usize) -> Vec<[f64; NUM_FEATURES]> {
        (0..n)
            .map(|_| {
                let mut f = [0.0; NUM_FEATURES];
                f[0] = rng.gen_range(1950..2020) as f64;
                f[1] = rng.gen_range(0..2) as f64;
                for v in &mut f[2..6] {
                    *v = rng.gen_range(0..5) as f64;
                }
                f[6] = rng.gen_range(39.7..40.1);
                f[7] = rng.gen_range(116.2..116.6);
                for i in (8..=18).step_by(2) {
                    f[i] = rng.gen_range(0..50) as f64;
                    f[i + 1] = rng.gen_range(0.0..1000.0);
                }
                f[20] = rng.gen_range(10.0..60.0);
                for v in &mut f[21..] {
                    *v = rng.gen_range(0.0..100.0);
                }
                f
            })
            .collect()
    }

    #[test]
    fn exact_line() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let xs = random_rows(&mut rng, 20);
        let y: Vec<f64> = xs.iter().map(|x| 2.0 * x[0] + 3.0).collect();
        let m = fit_linear(&dataset_from(&xs, &y), &[FeatureId::YEAR]).unwrap();
        assert!((m.coefficients[0].value - 2.0).abs() < 1e-9);
        assert!((m.intercept - 3.0).abs() < 1e-9);
        assert!(m.ridge.is_none());
    }

    #[test]
    fn prediction_rules() {
        let m = LinearModel {
            intercept: 3.0,
            coefficients: vec![Coefficient {
                feature: FeatureId::YEAR,
                value: 2.0,
            }],
            ridge: None,
        };
        assert_eq!(predict_linear(&m, &[0.0; NUM_FEATURES]).unwrap(), 3.0);
        let mut row = [0.0; NUM_FEATURES];
        row[0] = 5.0;
        assert_eq!(predict_linear(&m, &row).unwrap(), 13.0);
        assert!(matches!(
            predict_linear(&m, &[]),
            Err(Error::MissingFeature(_))
        ));
        assert!(matches!(
            predict_linear(&m, &[f64::NAN]),
            Err(Error::MissingFeature(_))
        ));
    }

    #[test]
    fn too_few_records() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let xs = random_rows(&mut rng, 3);
        let ds = dataset_from(&xs, &[1.0, 2.0, 3.0]);
        let subset: Vec<_> = FeatureId::all().take(2).collect();
        assert!(matches!(
            fit_linear(&ds, &subset),
            Err(Error::InsufficientSamples { .. })
        ));
    }

    #[test]
    fn collinear_design_falls_back_to_ridge() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut xs = random_rows(&mut rng, 60);
        for x in &mut xs {
            x[5] = x[2];
        }
        let y: Vec<f64> = xs.iter().map(|x| 1000.0 + 50.0 * x[2] + x[0]).collect();
        let subset = [FeatureId::YEAR, FeatureId::RM_NUM, FeatureId::BTH_NUM];
        let m = fit_linear(&dataset_from(&xs, &y), &subset).unwrap();
        assert!(m.ridge.is_some());
        let pred = predict_dataset(&m, &dataset_from(&xs, &y));
        let max_err = pred
            .iter()
            .zip(&y)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(max_err < 0.5, "{max_err}");
        assert!((m.coefficients[1].value + m.coefficients[2].value - 50.0).abs() < 0.2);
    }

    #[test]
    fn reference_model_on_hand_built_row() {
        let values = [
            -225.754, 8321.2, -2341.1, -1195.1, 16563.6, 4251.97, 10408.0, -4548.27, 28.063,
            25.2256, 307.328, 3.91726, 316.915, -10.4586, 150.618, 6.581, 109.195, 15.6027,
            -236.629, 4.77269, 157.894, 194.2, 860.433, 33.1033, 35.2334, 212.4,
        ];
        let m = LinearModel {
            intercept: 548013.5557669624,
            coefficients: FeatureId::all()
                .zip(values)
                .map(|(feature, value)| Coefficient { feature, value })
                .collect(),
            ridge: None,
        };
        let row = [
            2004.0, 1.0, 2.0, 1.0, 1.0, 1.0, 39.91, 116.41, 12.0, 430.5, 3.0, 612.0, 9.0, 388.2,
            5.0, 702.9, 31.0, 251.4, 14.0, 520.0, 27.5, 12.0, 8.0, 55.0, 15.0, 10.0,
        ];
        let oracle = values
            .iter()
            .zip(&row)
            .rev()
            .map(|(a, x)| a * x)
            .sum::<f64>()
            + 548013.5557669624;
        let got = predict_linear(&m, &row).unwrap();
        assert!(
            (got - oracle).abs() <= 1e-9 * oracle.abs(),
            "{got} vs {oracle}"
        );
    }

    #[test]
    fn residuals_orthogonal_and_order_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let xs = random_rows(&mut rng, 150);
        let y: Vec<f64> = xs
            .iter()
            .map(|x| 2e4 + 3.0 * x[0] - 10.0 * x[9] + rng.gen_range(-500.0..500.0))
            .collect();
        let ds = dataset_from(&xs, &y);
        let all: Vec<_> = FeatureId::all().collect();
        let m = fit_linear(&ds, &all).unwrap();
        let resid: Vec<f64> = predict_dataset(&m, &ds)
            .iter()
            .zip(&y)
            .map(|(p, t)| t - p)
            .collect();
        let rnorm = resid.iter().map(|r| r * r).sum::<f64>().sqrt();
        let mut cols: Vec<Vec<f64>> = all.iter().map(|&f| ds.column(f)).collect();
        cols.push(vec![1.0; ds.len()]);
        for c in &cols {
            let cnorm = c.iter().map(|x| x * x).sum::<f64>().sqrt();
            let dot: f64 = c.iter().zip(&resid).map(|(a, b)| a * b).sum();
            assert!(dot.abs() <= 1e-6 * cnorm * rnorm, "{dot}");
        }

        let mut rev_x = xs.clone();
        let mut rev_y = y.clone();
        rev_x.reverse();
        rev_y.reverse();
        let m2 = fit_linear(&dataset_from(&rev_x, &rev_y), &all).unwrap();
        for (a, b) in m.coefficients.iter().zip(&m2.coefficients) {
            assert!((a.value - b.value).abs() <= 1e-9 * (1.0 + a.value.abs()));
        }
    }

    #[test]
    fn json_shape() {
        let m = LinearModel {
            intercept: 1.5,
            coefficients: vec![Coefficient {
                feature: FeatureId::LAT,
                value: -0.25,
            }],
            ridge: None,
        };
        let v: serde_json::Value = serde_json::from_str(&m.to_json()).unwrap();
        assert_eq!(v["intercept"], 1.5);
        assert_eq!(v["coefficients"][0]["feature"], "Lat");
        assert_eq!(v["coefficients"][0]["value"], -0.25);
        let back: LinearModel = serde_json::from_str(&m.to_json()).unwrap();
        assert_eq!(back, m);
    }
}
