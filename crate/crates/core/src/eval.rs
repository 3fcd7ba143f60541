//! Error metrics and per-run summaries: RMSE, the frame-wise failure rule,
//! and aggregation across repeated runs.

use thiserror::Error;

use crate::scalar::Real;

/// Failure threshold on the frame-wise error (radians).
pub const FAILURE_THRESHOLD_RAD: f64 = 0.3;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum EvalError {
    #[error("empty error series")]
    EmptySeries,
}

/// Root-mean-square of an error series.
pub fn compute_rmse<T: Real>(errors: &[T]) -> Result<T, EvalError> {
    if errors.is_empty() {
        return Err(EvalError::EmptySeries);
    }
    let mut acc = T::zero();
    for &e in errors {
        acc += e * e;
    }
    Ok((acc / T::of(errors.len() as f64)).sqrt())
}

/// A run fails when the frame-wise error exceeds `threshold` on strictly more
/// than half the frames.
pub fn detect_failure<T: Real>(errors: &[T], threshold: T) -> bool {
    let over = errors.iter().filter(|e| e.abs() > threshold).count();
    2 * over > errors.len()
}

/// Order statistics of a series (computed on sorted data so results are
/// independent of input order).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesStats<T> {
    pub mean: T,
    pub median: T,
    pub min: T,
    pub max: T,
}

pub fn series_stats<T: Real>(values: &[T]) -> Result<SeriesStats<T>, EvalError> {
    if values.is_empty() {
        return Err(EvalError::EmptySeries);
    }
    let mut sorted: Vec<T> = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("no NaN in series"));
    let n = sorted.len();
    let mut sum = T::zero();
    for &v in &sorted {
        sum += v;
    }
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / T::of(2.0)
    };
    Ok(SeriesStats {
        mean: sum / T::of(n as f64),
        median,
        min: sorted[0],
        max: sorted[n - 1],
    })
}

/// Per-method summary of one tracked run.
#[derive(Clone, Debug, PartialEq)]
pub struct MethodSummary<T> {
    pub method: String,
    pub rmse_roll: T,
    pub rmse_pitch: T,
    /// Statistics of the per-frame combined error magnitude.
    pub error_stats: SeriesStats<T>,
    pub failed: bool,
}

impl<T: Real> MethodSummary<T> {
    /// Summarize per-frame roll/pitch errors for one method. The failure rule
    /// runs on the combined chart-distance error per frame.
    pub fn from_errors(method: &str, roll_errors: &[T], pitch_errors: &[T]) -> Result<Self, EvalError> {
        assert_eq!(roll_errors.len(), pitch_errors.len());
        let combined: Vec<T> = roll_errors
            .iter()
            .zip(pitch_errors)
            .map(|(&r, &p)| (r * r + p * p).sqrt())
            .collect();
        Ok(Self {
            method: method.to_string(),
            rmse_roll: compute_rmse(roll_errors)?,
            rmse_pitch: compute_rmse(pitch_errors)?,
            error_stats: series_stats(&combined)?,
            failed: detect_failure(&combined, T::of(FAILURE_THRESHOLD_RAD)),
        })
    }
}

/// Cross-run aggregate of one numeric summary column.
#[derive(Clone, Debug, PartialEq)]
pub struct ColumnAggregate<T> {
    pub column: String,
    pub stats: SeriesStats<T>,
}

/// Aggregate the summaries of repeated runs of one method. Input order does
/// not matter.
pub fn aggregate_method_runs<T: Real>(
    method: &str,
    runs: &[MethodSummary<T>],
) -> Result<Vec<ColumnAggregate<T>>, EvalError> {
    if runs.is_empty() {
        return Err(EvalError::EmptySeries);
    }
    debug_assert!(runs.iter().all(|r| r.method == method));
    let column = |name: &str, values: Vec<T>| -> Result<ColumnAggregate<T>, EvalError> {
        Ok(ColumnAggregate { column: name.to_string(), stats: series_stats(&values)? })
    };
    Ok(vec![
        column("rmse_roll", runs.iter().map(|r| r.rmse_roll).collect())?,
        column("rmse_pitch", runs.iter().map(|r| r.rmse_pitch).collect())?,
        column("mean_err", runs.iter().map(|r| r.error_stats.mean).collect())?,
        column("median_err", runs.iter().map(|r| r.error_stats.median).collect())?,
        column("min_err", runs.iter().map(|r| r.error_stats.min).collect())?,
        column("max_err", runs.iter().map(|r| r.error_stats.max).collect())?,
    ])
}
