use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Goodness-of-fit summary for one set of predictions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub r2: f64,
    pub adjusted_r2: f64,
    pub mae: f64,
    pub mse: f64,
    pub rmse: f64,
    pub n: usize,
    /// Independent variables in the model, excluding the constant.
    pub k: usize,
}

/// R², adjusted R², MAE, MSE and RMSE of `yhat` against `y`.
///
/// R² is not clamped and goes negative for models worse than the mean.
pub fn evaluate(y: &[f64], yhat: &[f64], k: usize) -> Result<MetricsReport> {
    let n = y.len();
    if yhat.len() != n {
        return Err(Error::LengthMismatch {
            left: n,
            right: yhat.len(),
        });
    }
    if n <= k + 1 {
        return Err(Error::InsufficientSamples { n, k });
    }
    let mean = y.iter().sum::<f64>() / n as f64;
    let ss_tot: f64 = y.iter().map(|v| (v - mean) * (v - mean)).sum();
    if ss_tot == 0.0 {
        return Err(Error::DegenerateTarget);
    }
    let (mut ss_res, mut abs_sum) = (0.0, 0.0);
    for (a, p) in y.iter().zip(yhat) {
        let e = a - p;
        ss_res += e * e;
        abs_sum += e.abs();
    }
    let nf = n as f64;
    let r2 = 1.0 - ss_res / ss_tot;
    let mse = ss_res / nf;
    Ok(MetricsReport {
        r2,
        adjusted_r2: 1.0 - (1.0 - r2) * (nf - 1.0) / (nf - k as f64 - 1.0),
        mae: abs_sum / nf,
        mse,
        rmse: mse.sqrt(),
        n,
        k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn perfect_prediction() {
        let m = evaluate(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0], 1).unwrap();
        assert_eq!((m.r2, m.mae, m.mse, m.rmse), (1.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn mean_predictor() {
        // Σ(y − ȳ)² = 2, Σ|e| = 2, Σe² = 2
        let m = evaluate(&[1.0, 2.0, 3.0], &[2.0, 2.0, 2.0], 1).unwrap();
        assert_eq!(m.r2, 0.0);
        assert!((m.mae - 2.0 / 3.0).abs() < 1e-15);
        assert!((m.mse - 2.0 / 3.0).abs() < 1e-15);
        assert!((m.rmse - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn adjusted_r2_by_hand() {
        // r2 = 0.5 with n = 10: 1 − 0.5·9/7
        let y: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let ss_tot = 82.5;
        // Shift every prediction by c so that n·c² = 0.5·ss_tot.
        let c = (0.5 * ss_tot / 10.0f64).sqrt();
        let yhat: Vec<f64> = y.iter().map(|v| v + c).collect();
        let m = evaluate(&y, &yhat, 2).unwrap();
        assert!((m.r2 - 0.5).abs() < 1e-12);
        assert!((m.adjusted_r2 - (1.0 - 0.5 * 9.0 / 7.0)).abs() < 1e-12);
        assert!((m.adjusted_r2 - 0.357142857).abs() < 1e-8);
    }

    #[test]
    fn error_cases() {
        assert!(matches!(
            evaluate(&[1.0, 2.0], &[1.0], 0),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            evaluate(&[5.0; 4], &[1.0; 4], 1),
            Err(Error::DegenerateTarget)
        ));
        assert!(matches!(
            evaluate(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0], 2),
            Err(Error::InsufficientSamples { n: 3, k: 2 })
        ));
    }

    #[test]
    fn negative_r2_is_reported() {
        let m = evaluate(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0], 1).unwrap();
        assert_eq!(m.r2, -3.0);
    }

    proptest! {
        #[test]
        fn identities(
            pairs in proptest::collection::vec((-1e5f64..1e5, -1e5f64..1e5), 5..60),
            k in 0usize..3,
            rot in 0usize..5,
        ) {
            let y: Vec<f64> = pairs.iter().map(|p| p.0).collect();
            let yhat: Vec<f64> = pairs.iter().map(|p| p.1).collect();
            let m = evaluate(&y, &yhat, k).unwrap();
            prop_assert!(m.mae <= m.rmse * (1.0 + 1e-12));
            prop_assert!((m.rmse * m.rmse - m.mse).abs() <= 1e-12 * m.mse.max(1.0));
            prop_assert!(m.r2 <= 1.0);
            if k >= 1 && m.r2 < 1.0 {
                prop_assert!(m.adjusted_r2 <= m.r2);
            }
            let (mut y2, mut yh2) = (y.clone(), yhat.clone());
            y2.rotate_left(rot);
            yh2.rotate_left(rot);
            let m2 = evaluate(&y2, &yh2, k).unwrap();
            prop_assert!((m.r2 - m2.r2).abs() < 1e-9);
            prop_assert!((m.mae - m2.mae).abs() <= 1e-9 * m.mae.max(1.0));

            let mean = y.iter().sum::<f64>() / y.len() as f64;
            let flat = vec![mean; y.len()];
            prop_assert_eq!(evaluate(&y, &flat, k).unwrap().r2, 0.0);
        }
    }
}
