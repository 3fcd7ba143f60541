//! `skytilt track`: run estimation methods over a recorded scenario and emit
//! per-frame and summary CSVs.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use skytilt::eval::MethodSummary;
use skytilt::filter::{FilterConfig, ManifoldFilter, ManifoldGrid};
use skytilt::geometry::OrientationRP;
use skytilt::groundplane::{GroundPlaneConfig, GroundTracker};
use skytilt::io::{read_barometer_csv, read_imu_csv, read_mask_pgm, read_trajectory_csv};
use skytilt::sim::ImuBaseline;
use skytilt::skyline::{SkylineConfig, SkylineTracker};
use skytilt::{BinaryMask, ObservationF64};

use crate::simulate::{BARO_CSV, IMU_CSV, MASK_DIR, SCENARIO_CONFIG, TRUTH_CSV};
use crate::{mask_filename, CliError};

/// Time constant of the filtered-IMU-only comparison track (seconds).
pub const BASELINE_SMOOTHING_S: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Method {
    Imu,
    Skyline,
    Ground,
    Fusion,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Imu, Method::Skyline, Method::Ground, Method::Fusion];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Imu => "imu",
            Method::Skyline => "skyline",
            Method::Ground => "ground",
            Method::Fusion => "fusion",
        }
    }

    fn needs_masks(self) -> bool {
        !matches!(self, Method::Imu)
    }
}

impl FromStr for Method {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "imu" => Ok(Method::Imu),
            "skyline" => Ok(Method::Skyline),
            "ground" => Ok(Method::Ground),
            "fusion" => Ok(Method::Fusion),
            other => Err(CliError::Config {
                message: format!("unknown method `{other}` (expected imu|skyline|ground|fusion)"),
            }),
        }
    }
}

/// Parse a comma-separated method list into canonical order, deduplicated.
/// An empty string selects no methods at all.
pub fn parse_methods(spec: &str) -> Result<Vec<Method>, CliError> {
    let mut methods: Vec<Method> = spec
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(Method::from_str)
        .collect::<Result<_, _>>()?;
    methods.sort();
    methods.dedup();
    Ok(methods)
}

pub struct TrackOptions {
    pub scenario_dir: PathBuf,
    pub methods: Vec<Method>,
    pub out: PathBuf,
    pub seed: u64,
}

/// Per-method per-frame estimates plus summary rows.
pub struct TrackOutcome {
    pub frames: usize,
    pub summaries: Vec<MethodSummary<f64>>,
}

/// Path of the summary CSV written next to the per-frame CSV `out`.
pub fn summary_path(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "run".into());
    out.with_file_name(format!("{stem}_summary.csv"))
}

struct MethodState {
    method: Method,
    estimates: Vec<OrientationRP<f64>>,
    last: OrientationRP<f64>,
    baseline: ImuBaseline<f64>,
    skyline: Option<SkylineTracker<f64>>,
    ground: Option<GroundTracker<f64>>,
    filter: Option<ManifoldFilter<f64>>,
    fusion_skyline: Option<SkylineTracker<f64>>,
    fusion_ground: Option<GroundTracker<f64>>,
}

impl MethodState {
    fn new(method: Method, intrinsics: skytilt::IntrinsicsF64, seed: u64) -> Self {
        let ground_config = GroundPlaneConfig { seed, ..GroundPlaneConfig::default() };
        let mut state = Self {
            method,
            estimates: Vec::new(),
            last: OrientationRP::zero(),
            baseline: ImuBaseline::new(BASELINE_SMOOTHING_S),
            skyline: None,
            ground: None,
            filter: None,
            fusion_skyline: None,
            fusion_ground: None,
        };
        match method {
            Method::Imu => {}
            Method::Skyline => {
                state.skyline = Some(SkylineTracker::new(intrinsics, SkylineConfig::default()))
            }
            Method::Ground => state.ground = Some(GroundTracker::new(intrinsics, ground_config)),
            Method::Fusion => {
                state.fusion_skyline = Some(SkylineTracker::new(intrinsics, SkylineConfig::default()));
                state.fusion_ground = Some(GroundTracker::new(intrinsics, ground_config));
                let filter_config = FilterConfig { seed, ..FilterConfig::default() };
                state.filter = Some(ManifoldFilter::new(ManifoldGrid::default_grid(), filter_config));
            }
        }
        state
    }

    fn advance(
        &mut self,
        t: f64,
        imu: &ObservationF64,
        height: f64,
        mask: Option<&BinaryMask>,
    ) -> Result<(), CliError> {
        let estimate = match self.method {
            Method::Imu => self.baseline.push(t, imu.value),
            Method::Skyline => {
                let tracker = self.skyline.as_mut().expect("skyline tracker");
                let mask = mask.expect("mask required for skyline method");
                match tracker.track(mask, t) {
                    Ok(obs) => obs.value,
                    Err(_) => self.last, // untrackable frame: hold the last estimate
                }
            }
            Method::Ground => {
                let tracker = self.ground.as_ref().expect("ground tracker");
                let mask = mask.expect("mask required for ground method");
                // Standalone ground tracking leans on the raw IMU attitude for
                // the back-projection gravity direction.
                match tracker.track(mask, height, imu.value, t) {
                    Ok(obs) => obs.value,
                    Err(_) => self.last,
                }
            }
            Method::Fusion => {
                let mask = mask.expect("mask required for fusion method");
                let sky = self
                    .fusion_skyline
                    .as_mut()
                    .expect("fusion skyline tracker")
                    .track(mask, t)
                    .ok();
                // The ground pipeline gets the previous fused attitude as its
                // gravity hint; level before the first estimate.
                let ground = self
                    .fusion_ground
                    .as_ref()
                    .expect("fusion ground tracker")
                    .track(mask, height, self.last, t)
                    .ok();
                let filter = self.filter.as_mut().expect("fusion filter");
                filter
                    .step(imu, sky.as_ref(), ground.as_ref(), t)
                    .map_err(|e| CliError::Internal { message: e.to_string() })?
                    .value
            }
        };
        self.last = estimate;
        self.estimates.push(estimate);
        Ok(())
    }
}

/// Run the requested methods over a scenario and write both CSVs.
pub fn run_track(opts: &TrackOptions) -> Result<TrackOutcome, CliError> {
    let dir = &opts.scenario_dir;
    // A broken scenario directory is a data problem, whatever went wrong inside.
    let cfg = crate::simulate::load_config(&dir.join(SCENARIO_CONFIG)).map_err(|e| match e {
        CliError::Config { message } => CliError::data(format!("scenario config: {message}")),
        other => other,
    })?;
    let truth = read_trajectory_csv::<f64>(&dir.join(TRUTH_CSV))?;
    let imu = read_imu_csv::<f64>(&dir.join(IMU_CSV))?;
    let baro = read_barometer_csv::<f64>(&dir.join(BARO_CSV))?;

    let frames = truth.samples.len();
    if imu.len() != frames || baro.len() != frames {
        return Err(CliError::data(format!(
            "stream length mismatch: truth {frames}, imu {}, baro {}",
            imu.len(),
            baro.len()
        )));
    }

    let mut states: Vec<MethodState> = opts
        .methods
        .iter()
        .map(|&m| MethodState::new(m, cfg.intrinsics(), opts.seed))
        .collect();
    let need_masks = opts.methods.iter().any(|m| m.needs_masks());

    for k in 0..frames {
        let sample = &truth.samples[k];
        let t = sample.timestamp;
        let mask = if need_masks {
            Some(load_mask(dir, k, cfg.width, cfg.height)?)
        } else {
            None
        };
        for state in &mut states {
            state.advance(t, &imu[k], baro[k].1, mask.as_ref())?;
        }
    }

    write_per_frame_csv(&opts.out, &truth, &states)?;
    let summaries = summarize(&truth, &states)?;
    write_summary_csv(&summary_path(&opts.out), &summaries)?;
    Ok(TrackOutcome { frames, summaries })
}

fn load_mask(dir: &Path, index: usize, width: u32, height: u32) -> Result<BinaryMask, CliError> {
    let path = dir.join(MASK_DIR).join(mask_filename(index));
    let mask = read_mask_pgm(&path)?;
    if mask.width() != width || mask.height() != height {
        return Err(CliError::data(format!(
            "{}: mask size {}x{} does not match scenario {}x{}",
            path.display(),
            mask.width(),
            mask.height(),
            width,
            height
        )));
    }
    Ok(mask)
}

fn write_per_frame_csv(
    out: &Path,
    truth: &skytilt::TrajectoryF64,
    states: &[MethodState],
) -> Result<(), CliError> {
    let mut text = String::from("t,truth_roll,truth_pitch");
    for s in states {
        let m = s.method.as_str();
        let _ = write!(text, ",{m}_roll,{m}_pitch,{m}_err_roll,{m}_err_pitch");
    }
    text.push('\n');
    for (k, sample) in truth.samples.iter().enumerate() {
        let _ = write!(
            text,
            "{},{},{}",
            sample.timestamp, sample.orientation.roll, sample.orientation.pitch
        );
        for s in states {
            let est = s.estimates[k];
            let _ = write!(
                text,
                ",{},{},{},{}",
                est.roll,
                est.pitch,
                est.roll - sample.orientation.roll,
                est.pitch - sample.orientation.pitch
            );
        }
        text.push('\n');
    }
    if let Some(parent) = out.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    fs::write(out, text)?;
    Ok(())
}

fn summarize(
    truth: &skytilt::TrajectoryF64,
    states: &[MethodState],
) -> Result<Vec<MethodSummary<f64>>, CliError> {
    let mut out = Vec::new();
    for s in states {
        if truth.samples.is_empty() {
            continue;
        }
        let roll_errors: Vec<f64> = s
            .estimates
            .iter()
            .zip(&truth.samples)
            .map(|(e, t)| e.roll - t.orientation.roll)
            .collect();
        let pitch_errors: Vec<f64> = s
            .estimates
            .iter()
            .zip(&truth.samples)
            .map(|(e, t)| e.pitch - t.orientation.pitch)
            .collect();
        let summary = MethodSummary::from_errors(s.method.as_str(), &roll_errors, &pitch_errors)
            .map_err(|e| CliError::Internal { message: e.to_string() })?;
        out.push(summary);
    }
    Ok(out)
}

pub const SUMMARY_HEADER: &str = "method,rmse_roll,rmse_pitch,mean_err,median_err,min_err,max_err,failed";

fn write_summary_csv(path: &Path, summaries: &[MethodSummary<f64>]) -> Result<(), CliError> {
    let mut text = String::from(SUMMARY_HEADER);
    text.push('\n');
    for s in summaries {
        let _ = writeln!(
            text,
            "{},{},{},{},{},{},{},{}",
            s.method,
            s.rmse_roll,
            s.rmse_pitch,
            s.error_stats.mean,
            s.error_stats.median,
            s.error_stats.min,
            s.error_stats.max,
            s.failed
        );
    }
    fs::write(path, text)?;
    Ok(())
}

/// Parse a summary CSV back into rows (used by `report`).
pub fn read_summary_csv(path: &Path) -> Result<Vec<MethodSummary<f64>>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::data(format!("{}: {e}", path.display())))?;
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == SUMMARY_HEADER => {}
        other => {
            return Err(CliError::data(format!(
                "{}: summary schema mismatch (header {:?})",
                path.display(),
                other
            )))
        }
    }
    let mut out = Vec::new();
    for (idx, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 8 {
            return Err(CliError::data(format!(
                "{}:{}: expected 8 fields, found {}",
                path.display(),
                idx + 2,
                fields.len()
            )));
        }
        let num = |i: usize| -> Result<f64, CliError> {
            fields[i].parse::<f64>().map_err(|_| {
                CliError::data(format!("{}:{}: bad number `{}`", path.display(), idx + 2, fields[i]))
            })
        };
        out.push(MethodSummary {
            method: fields[0].to_string(),
            rmse_roll: num(1)?,
            rmse_pitch: num(2)?,
            error_stats: skytilt::eval::SeriesStats {
                mean: num(3)?,
                median: num(4)?,
                min: num(5)?,
                max: num(6)?,
            },
            failed: match fields[7] {
                "true" => true,
                "false" => false,
                other => {
                    return Err(CliError::data(format!(
                        "{}:{}: bad failed flag `{other}`",
                        path.display(),
                        idx + 2
                    )))
                }
            },
        });
    }
    Ok(out)
}
