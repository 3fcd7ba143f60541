//! `skytilt simulate`: generate a scenario directory from a configuration.

use std::fs;
use std::path::Path;

use skytilt::io::{write_barometer_csv, write_imu_csv, write_mask_pgm, write_trajectory_csv};
use skytilt::sim::{make_trajectory_at_height, render_mask, simulate_barometer, simulate_imu, SensorNoiseModel};

use crate::config::{parse_simulate_config, SimulateConfig};
use crate::{mask_filename, CliError};

/// Scenario directory layout produced by [`run_simulate`].
pub const SCENARIO_CONFIG: &str = "scenario.cfg";
pub const TRUTH_CSV: &str = "truth.csv";
pub const IMU_CSV: &str = "imu.csv";
pub const BARO_CSV: &str = "baro.csv";
pub const MASK_DIR: &str = "masks";

pub fn load_config(path: &Path) -> Result<SimulateConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Config {
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    parse_simulate_config(&text)
}

/// Generate trajectory, masks, and sensor streams under `out_dir`.
pub fn run_simulate(config_path: &Path, out_dir: &Path) -> Result<(), CliError> {
    let cfg = load_config(config_path)?;
    write_scenario(&cfg, out_dir)
}

/// Write a fully resolved scenario; shared by the CLI and the test harness.
pub fn write_scenario(cfg: &SimulateConfig, out_dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(out_dir)?;
    let mask_dir = out_dir.join(MASK_DIR);
    fs::create_dir_all(&mask_dir)?;

    let traj = make_trajectory_at_height(
        cfg.pattern,
        cfg.speed_deg_s.to_radians(),
        cfg.duration_s,
        cfg.rate_hz,
        cfg.seed,
        cfg.height_m,
    );
    let noise = SensorNoiseModel {
        imu_sigma: cfg.imu_sigma_deg.to_radians(),
        imu_bias_rate: cfg.imu_bias_rate_deg_s.to_radians(),
        baro_sigma: cfg.baro_sigma_m,
        seed: cfg.seed,
    };
    let imu = simulate_imu(&traj, &noise);
    let baro = simulate_barometer(&traj, &noise);

    fs::write(out_dir.join(SCENARIO_CONFIG), cfg.render())?;
    write_trajectory_csv(&traj, &out_dir.join(TRUTH_CSV))?;
    write_imu_csv(&imu, &out_dir.join(IMU_CSV))?;
    write_barometer_csv(&baro, &out_dir.join(BARO_CSV))?;

    let intrinsics = cfg.intrinsics();
    for (i, sample) in traj.samples.iter().enumerate() {
        let mask = render_mask(sample.orientation, &intrinsics, (cfg.width, cfg.height));
        write_mask_pgm(&mask, &mask_dir.join(mask_filename(i)))?;
    }
    Ok(())
}
