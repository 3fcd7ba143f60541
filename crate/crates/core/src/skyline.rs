//! Skyline tracking: extract the sky/ground boundary from a binary mask, fit a
//! line, and convert slope/height changes against a reference frame into
//! roll and pitch observations.

use thiserror::Error;

use crate::geometry::{CameraIntrinsics, OrientationRP};
use crate::mask::{BinaryMask, Cell};
use crate::observation::{Observation, ObservationSource};
use crate::scalar::Real;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum SkylineError {
    /// Fewer than two sampled columns contained a sky-to-ground transition.
    #[error("no sky/ground boundary found in the searched region")]
    NoBoundaryFound,
    /// All boundary points share one column; a line fit is underdetermined.
    #[error("boundary points span a single column")]
    DegenerateColumnSet,
}

/// Fitted skyline: `v = slope * u + intercept` in pixel coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SkylineEstimate<T> {
    pub slope: T,
    pub intercept: T,
    /// Line height at the image center column, `slope * width/2 + intercept`.
    pub center_height: T,
    pub n_points: usize,
    pub residual_rms: T,
    pub timestamp: T,
}

/// Predicted skyline for the next frame under constant angular velocity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinePrediction<T> {
    pub slope: T,
    pub intercept: T,
}

#[derive(Clone, Copy, Debug)]
pub struct SkylineConfig<T> {
    /// Sample every n-th column when searching for boundary points.
    pub column_stride: u32,
    /// Vertical search window half-width (pixels) around the predicted line.
    pub search_halfwidth: u32,
    /// Roll magnitude below which no roll compensation is applied before the
    /// pitch estimate (radians).
    pub dead_band: T,
    /// Constant variance attached to emitted observations (radians^2).
    pub variance: T,
}

impl<T: Real> Default for SkylineConfig<T> {
    fn default() -> Self {
        let half_deg = T::radians_from_degrees(0.5);
        Self {
            column_stride: 8,
            search_halfwidth: 40,
            dead_band: T::radians_from_degrees(0.2),
            variance: half_deg * half_deg,
        }
    }
}

/// Find the boundary row for each sampled column.
///
/// Scanning downward, a boundary is the first ground row below a sky cell.
/// With a prediction, only rows within `+-search_halfwidth` of the predicted
/// line are considered and ties between multiple transitions resolve to the
/// one nearest the prediction; without one the whole column is scanned.
/// Columns with no transition are skipped.
pub fn extract_boundary<T: Real>(
    mask: &BinaryMask,
    predicted: Option<&LinePrediction<T>>,
    column_stride: u32,
    search_halfwidth: u32,
) -> Result<Vec<(T, T)>, SkylineError> {
    assert!(column_stride >= 1, "column stride must be at least 1");
    let (w, h) = (mask.width(), mask.height());
    if h < 2 {
        return Err(SkylineError::NoBoundaryFound);
    }
    let mut points = Vec::new();
    let mut u = 0u32;
    while u < w {
        let (v_lo, v_hi, v_pred) = match predicted {
            Some(line) => {
                let v_pred = line.slope * T::of(f64::from(u)) + line.intercept;
                let center = v_pred.round().as_f64();
                let lo = (center - f64::from(search_halfwidth)).max(0.0) as u32;
                let hi_f = center + f64::from(search_halfwidth);
                if hi_f < 0.0 || lo > h - 2 {
                    u += column_stride;
                    continue;
                }
                (lo, (hi_f as u32).min(h - 2), Some(v_pred))
            }
            None => (0, h - 2, None),
        };

        let mut best: Option<(u32, T)> = None;
        for v in v_lo..=v_hi {
            if mask.get(u, v) == Cell::Sky && mask.get(u, v + 1) == Cell::Ground {
                let row = v + 1;
                match v_pred {
                    Some(p) => {
                        let dist = (T::of(f64::from(row)) - p).abs();
                        if best.is_none_or(|(_, d)| dist < d) {
                            best = Some((row, dist));
                        }
                    }
                    None => {
                        best = Some((row, T::zero()));
                        break;
                    }
                }
            }
        }
        if let Some((row, _)) = best {
            points.push((T::of(f64::from(u)), T::of(f64::from(row))));
        }
        u += column_stride;
    }
    if points.len() < 2 {
        return Err(SkylineError::NoBoundaryFound);
    }
    Ok(points)
}

/// Ordinary least-squares fit of `v` on `u` through the boundary points.
pub fn fit_line<T: Real>(
    points: &[(T, T)],
    image_width: u32,
    timestamp: T,
) -> Result<SkylineEstimate<T>, SkylineError> {
    if points.len() < 2 {
        return Err(SkylineError::DegenerateColumnSet);
    }
    let n = T::of(points.len() as f64);
    let mut su = T::zero();
    let mut sv = T::zero();
    for &(u, v) in points {
        su += u;
        sv += v;
    }
    let (mu, mv) = (su / n, sv / n);
    let mut suv = T::zero();
    let mut suu = T::zero();
    for &(u, v) in points {
        suv += (u - mu) * (v - mv);
        suu += (u - mu) * (u - mu);
    }
    if suu <= T::zero() {
        return Err(SkylineError::DegenerateColumnSet);
    }
    let slope = suv / suu;
    let intercept = mv - slope * mu;
    let mut sq = T::zero();
    for &(u, v) in points {
        let r = v - (slope * u + intercept);
        sq += r * r;
    }
    Ok(SkylineEstimate {
        slope,
        intercept,
        center_height: slope * T::of(f64::from(image_width) / 2.0) + intercept,
        n_points: points.len(),
        residual_rms: (sq / n).sqrt(),
        timestamp,
    })
}

/// Roll change between two fitted skylines: `atan(m) - atan(m')`.
pub fn roll_delta<T: Real>(current: &SkylineEstimate<T>, reference: &SkylineEstimate<T>) -> T {
    current.slope.atan() - reference.slope.atan()
}

/// Pitch change from two skyline center heights:
/// `atan((h1 - cy)/fy) - atan((h2 - cy)/fy)`.
pub fn pitch_from_heights<T: Real>(h1: T, h2: T, k: &CameraIntrinsics<T>) -> T {
    ((h1 - k.cy) / k.fy).atan() - ((h2 - k.cy) / k.fy).atan()
}

/// Pitch change between two fitted skylines (see [`pitch_from_heights`]).
pub fn pitch_delta<T: Real>(
    current: &SkylineEstimate<T>,
    reference: &SkylineEstimate<T>,
    k: &CameraIntrinsics<T>,
) -> T {
    pitch_from_heights(current.center_height, reference.center_height, k)
}

/// Extrapolate slope and intercept linearly from the last two estimates.
///
/// Returns the prediction and whether the constant-velocity extrapolation was
/// possible; with equal timestamps the previous line is held instead.
pub fn predict_line<T: Real>(
    prev: &SkylineEstimate<T>,
    prev2: &SkylineEstimate<T>,
    dt: T,
) -> (LinePrediction<T>, bool) {
    let span = prev.timestamp - prev2.timestamp;
    if span <= T::zero() {
        return (
            LinePrediction { slope: prev.slope, intercept: prev.intercept },
            false,
        );
    }
    let f = dt / span;
    (
        LinePrediction {
            slope: prev.slope + (prev.slope - prev2.slope) * f,
            intercept: prev.intercept + (prev.intercept - prev2.intercept) * f,
        },
        true,
    )
}

/// Rotate pixel points by `angle` about `(cx, cy)` (positive angle turns
/// +u toward +v).
fn rotate_points<T: Real>(points: &[(T, T)], cx: T, cy: T, angle: T) -> Vec<(T, T)> {
    let (s, c) = (angle.sin(), angle.cos());
    points
        .iter()
        .map(|&(u, v)| {
            let (du, dv) = (u - cx, v - cy);
            (cx + c * du - s * dv, cy + s * du + c * dv)
        })
        .collect()
}

/// Stateful skyline tracker. The first successfully fitted frame becomes the
/// reference; subsequent frames yield absolute roll/pitch relative to it.
#[derive(Clone, Debug)]
pub struct SkylineTracker<T> {
    intrinsics: CameraIntrinsics<T>,
    config: SkylineConfig<T>,
    reference: Option<SkylineEstimate<T>>,
    prev: Option<SkylineEstimate<T>>,
    prev2: Option<SkylineEstimate<T>>,
}

impl<T: Real> SkylineTracker<T> {
    pub fn new(intrinsics: CameraIntrinsics<T>, config: SkylineConfig<T>) -> Self {
        Self { intrinsics, config, reference: None, prev: None, prev2: None }
    }

    pub fn reference(&self) -> Option<&SkylineEstimate<T>> {
        self.reference.as_ref()
    }

    /// Track one frame. Untrackable frames propagate as errors and leave the
    /// two-frame history untouched.
    pub fn track(&mut self, mask: &BinaryMask, timestamp: T) -> Result<Observation<T>, SkylineError> {
        // Window the search only once two estimates support an extrapolation.
        let prediction = match (&self.prev, &self.prev2) {
            (Some(p), Some(p2)) => Some(predict_line(p, p2, timestamp - p.timestamp).0),
            _ => None,
        };
        let points = extract_boundary(
            mask,
            prediction.as_ref(),
            self.config.column_stride,
            self.config.search_halfwidth,
        )?;
        let current = fit_line(&points, mask.width(), timestamp)?;

        let reference = match &self.reference {
            Some(r) => *r,
            None => {
                self.reference = Some(current);
                self.prev = Some(current);
                return Ok(Observation::new(
                    ObservationSource::Skyline,
                    OrientationRP::zero(),
                    self.config.variance,
                    timestamp,
                ));
            }
        };

        let roll = roll_delta(&current, &reference);
        // Pitch is read from the center height after undoing the measured roll
        // about the principal point; skipped inside the dead band where the
        // correction is below quantization anyway.
        let h1 = if roll.abs() > self.config.dead_band {
            let compensated = rotate_points(&points, self.intrinsics.cx, self.intrinsics.cy, -roll);
            fit_line(&compensated, mask.width(), timestamp)?.center_height
        } else {
            current.center_height
        };
        let pitch = pitch_from_heights(h1, reference.center_height, &self.intrinsics);

        self.prev2 = self.prev;
        self.prev = Some(current);
        Ok(Observation::new(
            ObservationSource::Skyline,
            OrientationRP::new(roll, pitch),
            self.config.variance,
            timestamp,
        ))
    }
}
