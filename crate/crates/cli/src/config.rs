//! Flat `key = value` scenario configuration.

use skytilt::sim::Pattern;

use crate::CliError;

/// Fully resolved simulation configuration. `seed` and `pattern` are
/// mandatory in config files; everything else has a default.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimulateConfig {
    pub pattern: Pattern,
    pub seed: u64,
    pub speed_deg_s: f64,
    pub duration_s: f64,
    pub rate_hz: f64,
    pub width: u32,
    pub height: u32,
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub height_m: f64,
    pub imu_sigma_deg: f64,
    pub imu_bias_rate_deg_s: f64,
    pub baro_sigma_m: f64,
}

impl SimulateConfig {
    pub fn defaults(pattern: Pattern, seed: u64) -> Self {
        Self {
            pattern,
            seed,
            speed_deg_s: 3.0,
            duration_s: 120.0,
            rate_hz: 20.0,
            width: 640,
            height: 480,
            fx: 500.0,
            fy: 500.0,
            cx: 320.0,
            cy: 240.0,
            height_m: 400.0,
            imu_sigma_deg: 1.0,
            imu_bias_rate_deg_s: 0.3,
            baro_sigma_m: 0.5,
        }
    }

    pub fn intrinsics(&self) -> skytilt::IntrinsicsF64 {
        skytilt::IntrinsicsF64::new(self.fx, self.fy, self.cx, self.cy)
    }

    /// Serialize with every key explicit, parseable by [`parse_simulate_config`].
    pub fn render(&self) -> String {
        let pattern = match self.pattern {
            Pattern::Roll => "roll",
            Pattern::Pitch => "pitch",
            Pattern::Mixed => "mixed",
        };
        format!(
            "pattern = {pattern}\nseed = {}\nspeed_deg_s = {}\nduration_s = {}\nrate_hz = {}\n\
             width = {}\nheight = {}\nfx = {}\nfy = {}\ncx = {}\ncy = {}\nheight_m = {}\n\
             imu_sigma_deg = {}\nimu_bias_rate_deg_s = {}\nbaro_sigma_m = {}\n",
            self.seed,
            self.speed_deg_s,
            self.duration_s,
            self.rate_hz,
            self.width,
            self.height,
            self.fx,
            self.fy,
            self.cx,
            self.cy,
            self.height_m,
            self.imu_sigma_deg,
            self.imu_bias_rate_deg_s,
            self.baro_sigma_m,
        )
    }
}

fn config_err(line: usize, message: impl Into<String>) -> CliError {
    CliError::Config { message: format!("line {line}: {}", message.into()) }
}

/// Parse `key = value` lines; `#` starts a comment, blank lines are ignored.
/// Unknown keys and malformed lines are errors with their line number.
pub fn parse_simulate_config(text: &str) -> Result<SimulateConfig, CliError> {
    let mut pattern: Option<Pattern> = None;
    let mut seed: Option<u64> = None;
    let mut cx: Option<f64> = None;
    let mut cy: Option<f64> = None;
    // Start from defaults with placeholders for the mandatory fields.
    let mut cfg = SimulateConfig::defaults(Pattern::Roll, 0);

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| config_err(line_no, format!("expected `key = value`, found `{line}`")))?;
        let key = key.trim();
        let value = value.trim();
        let parse_f64 = |v: &str| -> Result<f64, CliError> {
            v.parse::<f64>()
                .map_err(|_| config_err(line_no, format!("`{key}` expects a number, found `{v}`")))
        };
        let parse_u32 = |v: &str| -> Result<u32, CliError> {
            v.parse::<u32>()
                .map_err(|_| config_err(line_no, format!("`{key}` expects an integer, found `{v}`")))
        };
        match key {
            "pattern" => {
                pattern = Some(match value {
                    "roll" => Pattern::Roll,
                    "pitch" => Pattern::Pitch,
                    "mixed" => Pattern::Mixed,
                    other => {
                        return Err(config_err(
                            line_no,
                            format!("`pattern` must be roll|pitch|mixed, found `{other}`"),
                        ))
                    }
                })
            }
            "seed" => {
                seed = Some(value.parse::<u64>().map_err(|_| {
                    config_err(line_no, format!("`seed` expects an unsigned integer, found `{value}`"))
                })?)
            }
            "speed_deg_s" => cfg.speed_deg_s = parse_f64(value)?,
            "duration_s" => cfg.duration_s = parse_f64(value)?,
            "rate_hz" => cfg.rate_hz = parse_f64(value)?,
            "width" => cfg.width = parse_u32(value)?,
            "height" => cfg.height = parse_u32(value)?,
            "fx" => cfg.fx = parse_f64(value)?,
            "fy" => cfg.fy = parse_f64(value)?,
            "cx" => cx = Some(parse_f64(value)?),
            "cy" => cy = Some(parse_f64(value)?),
            "height_m" => cfg.height_m = parse_f64(value)?,
            "imu_sigma_deg" => cfg.imu_sigma_deg = parse_f64(value)?,
            "imu_bias_rate_deg_s" => cfg.imu_bias_rate_deg_s = parse_f64(value)?,
            "baro_sigma_m" => cfg.baro_sigma_m = parse_f64(value)?,
            other => return Err(config_err(line_no, format!("unknown key `{other}`"))),
        }
    }

    cfg.pattern = pattern.ok_or_else(|| CliError::Config {
        message: "missing required key `pattern`".into(),
    })?;
    cfg.seed = seed.ok_or_else(|| CliError::Config {
        message: "missing required key `seed`".into(),
    })?;
    if cfg.rate_hz <= 0.0 {
        return Err(CliError::Config { message: "`rate_hz` must be positive".into() });
    }
    cfg.cx = cx.unwrap_or(f64::from(cfg.width) / 2.0);
    cfg.cy = cy.unwrap_or(f64::from(cfg.height) / 2.0);
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_applies_defaults() {
        let cfg = parse_simulate_config("pattern = roll\nseed = 7\n").unwrap();
        assert_eq!(cfg.pattern, Pattern::Roll);
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.rate_hz, 20.0);
        assert_eq!(cfg.cx, 320.0);
        assert_eq!(cfg.cy, 240.0);
    }

    #[test]
    fn derived_principal_point_follows_size() {
        let cfg = parse_simulate_config("pattern = mixed\nseed = 1\nwidth = 160\nheight = 120\n").unwrap();
        assert_eq!(cfg.cx, 80.0);
        assert_eq!(cfg.cy, 60.0);
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let cfg = parse_simulate_config("# scenario\n\npattern = pitch\nseed = 3\nspeed_deg_s = 9\n").unwrap();
        assert_eq!(cfg.pattern, Pattern::Pitch);
        assert_eq!(cfg.speed_deg_s, 9.0);
    }

    #[test]
    fn missing_seed_is_rejected() {
        let err = parse_simulate_config("pattern = roll\n").unwrap_err();
        assert!(err.to_string().contains("seed"));
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let err = parse_simulate_config("pattern = roll\nseed = 1\nbogus line\n").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }

    #[test]
    fn unknown_key_reports_line_number() {
        let err = parse_simulate_config("pattern = roll\nseed = 1\nspeeed = 3\n").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
        assert!(err.to_string().contains("speeed"), "{err}");
    }

    #[test]
    fn render_parse_round_trip() {
        let mut cfg = SimulateConfig::defaults(Pattern::Mixed, 42);
        cfg.speed_deg_s = 9.0;
        cfg.width = 160;
        cfg.cx = 80.0;
        let back = parse_simulate_config(&cfg.render()).unwrap();
        assert_eq!(cfg, back);
    }
}
