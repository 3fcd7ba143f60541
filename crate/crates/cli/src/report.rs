//! `skytilt report`: aggregate summary CSVs from repeated runs.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use skytilt::eval::{aggregate_method_runs, MethodSummary};

use crate::track::read_summary_csv;
use crate::CliError;

pub struct ReportOptions {
    pub inputs: Vec<PathBuf>,
    /// Output prefix: writes `<prefix>_aggregate.csv` and `<prefix>_plot.csv`.
    pub out_prefix: PathBuf,
}

pub fn aggregate_path(prefix: &Path) -> PathBuf {
    suffixed(prefix, "_aggregate.csv")
}

pub fn plot_path(prefix: &Path) -> PathBuf {
    suffixed(prefix, "_plot.csv")
}

fn suffixed(prefix: &Path, suffix: &str) -> PathBuf {
    let mut name = prefix
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "report".into());
    name.push_str(suffix);
    prefix.with_file_name(name)
}

/// Read all run summaries, aggregate per method, and emit the aggregate plus
/// box-plot-ready per-run data. Outputs do not depend on the input order.
pub fn run_report(opts: &ReportOptions) -> Result<(), CliError> {
    if opts.inputs.is_empty() {
        return Err(CliError::data("report needs at least one run summary CSV"));
    }
    let mut rows: Vec<MethodSummary<f64>> = Vec::new();
    for path in &opts.inputs {
        rows.extend(read_summary_csv(path)?);
    }

    let mut methods: Vec<String> = rows.iter().map(|r| r.method.clone()).collect();
    methods.sort();
    methods.dedup();

    let mut aggregate = String::from("method,column,mean,median,min,max\n");
    let mut plot = String::from("method,rmse_roll,rmse_pitch,mean_err,median_err,min_err,max_err\n");
    for method in &methods {
        let mut runs: Vec<MethodSummary<f64>> =
            rows.iter().filter(|r| &r.method == method).cloned().collect();
        // Canonical row order keeps the outputs permutation-invariant.
        runs.sort_by(|a, b| {
            (a.rmse_roll, a.rmse_pitch, a.error_stats.mean)
                .partial_cmp(&(b.rmse_roll, b.rmse_pitch, b.error_stats.mean))
                .expect("no NaN in summaries")
        });
        for col in aggregate_method_runs(method, &runs)
            .map_err(|e| CliError::Internal { message: e.to_string() })?
        {
            let _ = writeln!(
                aggregate,
                "{method},{},{},{},{},{}",
                col.column, col.stats.mean, col.stats.median, col.stats.min, col.stats.max
            );
        }
        for r in &runs {
            let _ = writeln!(
                plot,
                "{method},{},{},{},{},{},{}",
                r.rmse_roll,
                r.rmse_pitch,
                r.error_stats.mean,
                r.error_stats.median,
                r.error_stats.min,
                r.error_stats.max
            );
        }
    }

    if let Some(parent) = opts.out_prefix.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    fs::write(aggregate_path(&opts.out_prefix), aggregate)?;
    fs::write(plot_path(&opts.out_prefix), plot)?;
    Ok(())
}
