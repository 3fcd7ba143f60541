//! File formats: binary PGM masks and the CSV sensor/trajectory streams.
//!
//! All writers are byte-deterministic: floats are written with Rust's
//! shortest round-trip formatting and read back exactly.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use thiserror::Error;

use crate::geometry::OrientationRP;
use crate::mask::{BinaryMask, Cell};
use crate::observation::{Observation, ObservationSource};
use crate::scalar::Real;
use crate::sim::{Trajectory, TrajectorySample};

const PGM_SKY: u8 = 255;
const PGM_GROUND: u8 = 0;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("{path}:{line}: {message}")]
    Parse { path: String, line: usize, message: String },
}

impl FormatError {
    fn parse(path: &Path, line: usize, message: impl Into<String>) -> Self {
        FormatError::Parse {
            path: path.display().to_string(),
            line,
            message: message.into(),
        }
    }
}

/// Write a mask as binary PGM (P5), one byte per pixel: 0 ground, 255 sky.
pub fn write_mask_pgm(mask: &BinaryMask, path: &Path) -> Result<(), FormatError> {
    let mut w = BufWriter::new(File::create(path)?);
    write!(w, "P5\n{} {}\n255\n", mask.width(), mask.height())?;
    let bytes: Vec<u8> = mask
        .cells()
        .iter()
        .map(|&c| if c == Cell::Sky { PGM_SKY } else { PGM_GROUND })
        .collect();
    w.write_all(&bytes)?;
    Ok(())
}

/// Read a mask written by [`write_mask_pgm`]. Only the exact 0/255 values are
/// accepted; anything else is a data error.
pub fn read_mask_pgm(path: &Path) -> Result<BinaryMask, FormatError> {
    let mut raw = Vec::new();
    File::open(path)?.read_to_end(&mut raw)?;

    // Header: three whitespace-separated tokens after the magic.
    let mut pos = 0usize;
    let mut next_token = |raw: &[u8]| -> Result<String, FormatError> {
        while pos < raw.len() && raw[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < raw.len() && !raw[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(FormatError::parse(path, 1, "truncated PGM header"));
        }
        Ok(String::from_utf8_lossy(&raw[start..pos]).into_owned())
    };

    if next_token(&raw)? != "P5" {
        return Err(FormatError::parse(path, 1, "not a binary PGM (P5) file"));
    }
    let width: u32 = next_token(&raw)?
        .parse()
        .map_err(|_| FormatError::parse(path, 1, "bad width"))?;
    let height: u32 = next_token(&raw)?
        .parse()
        .map_err(|_| FormatError::parse(path, 1, "bad height"))?;
    let maxval = next_token(&raw)?;
    if maxval != "255" {
        return Err(FormatError::parse(path, 1, format!("unsupported maxval {maxval}")));
    }
    pos += 1; // single whitespace byte after the header

    let expected = (width as usize) * (height as usize);
    let data = raw.get(pos..pos + expected).ok_or_else(|| {
        FormatError::parse(path, 1, format!("expected {expected} pixel bytes"))
    })?;
    let mut cells = Vec::with_capacity(expected);
    for &b in data {
        cells.push(match b {
            PGM_SKY => Cell::Sky,
            PGM_GROUND => Cell::Ground,
            other => {
                return Err(FormatError::parse(path, 1, format!("invalid pixel value {other}")))
            }
        });
    }
    Ok(BinaryMask::new(width, height, cells))
}

fn open_lines(path: &Path) -> Result<impl Iterator<Item = std::io::Result<String>>, FormatError> {
    Ok(BufReader::new(File::open(path)?).lines())
}

fn parse_fields<T: Real>(
    path: &Path,
    line_no: usize,
    line: &str,
    expected: usize,
) -> Result<Vec<T>, FormatError> {
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() != expected {
        return Err(FormatError::parse(
            path,
            line_no,
            format!("expected {expected} fields, found {}", fields.len()),
        ));
    }
    fields
        .iter()
        .map(|f| {
            f.trim()
                .parse::<f64>()
                .map(T::of)
                .map_err(|_| FormatError::parse(path, line_no, format!("bad number `{f}`")))
        })
        .collect()
}

fn check_header(path: &Path, got: Option<std::io::Result<String>>, want: &str) -> Result<(), FormatError> {
    match got {
        Some(Ok(line)) if line == want => Ok(()),
        Some(Ok(line)) => Err(FormatError::parse(path, 1, format!("expected header `{want}`, found `{line}`"))),
        Some(Err(e)) => Err(e.into()),
        None => Err(FormatError::parse(path, 1, format!("missing header `{want}`"))),
    }
}

/// Ground-truth trajectory CSV: `t,roll,pitch,height`.
pub fn write_trajectory_csv<T: Real>(traj: &Trajectory<T>, path: &Path) -> Result<(), FormatError> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "t,roll,pitch,height")?;
    for s in &traj.samples {
        writeln!(
            w,
            "{},{},{},{}",
            s.timestamp.as_f64(),
            s.orientation.roll.as_f64(),
            s.orientation.pitch.as_f64(),
            s.height.as_f64()
        )?;
    }
    Ok(())
}

pub fn read_trajectory_csv<T: Real>(path: &Path) -> Result<Trajectory<T>, FormatError> {
    let mut lines = open_lines(path)?;
    check_header(path, lines.next(), "t,roll,pitch,height")?;
    let mut samples = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let f = parse_fields::<T>(path, i + 2, &line, 4)?;
        samples.push(TrajectorySample {
            timestamp: f[0],
            orientation: OrientationRP::new(f[1], f[2]),
            height: f[3],
        });
    }
    Ok(Trajectory { samples })
}

/// IMU stream CSV: `t,roll,pitch,var`.
pub fn write_imu_csv<T: Real>(stream: &[Observation<T>], path: &Path) -> Result<(), FormatError> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "t,roll,pitch,var")?;
    for o in stream {
        writeln!(
            w,
            "{},{},{},{}",
            o.timestamp.as_f64(),
            o.value.roll.as_f64(),
            o.value.pitch.as_f64(),
            o.variance.as_f64()
        )?;
    }
    Ok(())
}

pub fn read_imu_csv<T: Real>(path: &Path) -> Result<Vec<Observation<T>>, FormatError> {
    let mut lines = open_lines(path)?;
    check_header(path, lines.next(), "t,roll,pitch,var")?;
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let f = parse_fields::<T>(path, i + 2, &line, 4)?;
        out.push(Observation::new(
            ObservationSource::Imu,
            OrientationRP::new(f[1], f[2]),
            f[3],
            f[0],
        ));
    }
    Ok(out)
}

/// Barometer stream CSV: `t,height`.
pub fn write_barometer_csv<T: Real>(stream: &[(T, T)], path: &Path) -> Result<(), FormatError> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "t,height")?;
    for &(t, h) in stream {
        writeln!(w, "{},{}", t.as_f64(), h.as_f64())?;
    }
    Ok(())
}

pub fn read_barometer_csv<T: Real>(path: &Path) -> Result<Vec<(T, T)>, FormatError> {
    let mut lines = open_lines(path)?;
    check_header(path, lines.next(), "t,height")?;
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let f = parse_fields::<T>(path, i + 2, &line, 2)?;
        out.push((f[0], f[1]));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{make_trajectory, simulate_barometer, simulate_imu, Pattern, SensorNoiseModel};

    fn tmp(name: &str) -> std::path::PathBuf {
        let mut p = std::env::temp_dir();
        p.push(format!("skytilt-io-{}-{}", std::process::id(), name));
        p
    }

    #[test]
    fn mask_round_trips_exactly() {
        let mask = BinaryMask::from_fn(37, 23, |u, v| {
            if (u + 2 * v) % 5 < 2 {
                Cell::Sky
            } else {
                Cell::Ground
            }
        });
        let path = tmp("mask.pgm");
        write_mask_pgm(&mask, &path).unwrap();
        let back = read_mask_pgm(&path).unwrap();
        assert_eq!(mask, back);
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn mask_reader_rejects_foreign_values() {
        let path = tmp("bad.pgm");
        std::fs::write(&path, b"P5\n2 1\n255\n\x01\x02").unwrap();
        assert!(matches!(read_mask_pgm(&path), Err(FormatError::Parse { .. })));
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn streams_round_trip() {
        let traj = make_trajectory(Pattern::Mixed, 9f64.to_radians(), 3.0, 20.0, 8);
        let noise = SensorNoiseModel { imu_sigma: 0.01, imu_bias_rate: 0.001, baro_sigma: 0.4, seed: 8 };
        let imu = simulate_imu(&traj, &noise);
        let baro = simulate_barometer(&traj, &noise);

        let tp = tmp("truth.csv");
        let ip = tmp("imu.csv");
        let bp = tmp("baro.csv");
        write_trajectory_csv(&traj, &tp).unwrap();
        write_imu_csv(&imu, &ip).unwrap();
        write_barometer_csv(&baro, &bp).unwrap();

        let traj2 = read_trajectory_csv::<f64>(&tp).unwrap();
        assert_eq!(traj.samples, traj2.samples);
        let imu2 = read_imu_csv::<f64>(&ip).unwrap();
        assert_eq!(imu, imu2);
        let baro2 = read_barometer_csv::<f64>(&bp).unwrap();
        assert_eq!(baro, baro2);
        for p in [tp, ip, bp] {
            std::fs::remove_file(&p).ok();
        }
    }

    #[test]
    fn csv_errors_carry_line_numbers() {
        let path = tmp("broken.csv");
        std::fs::write(&path, "t,roll,pitch,height\n0,0,0,400\n1,oops,0,400\n").unwrap();
        match read_trajectory_csv::<f64>(&path) {
            Err(FormatError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn header_mismatch_is_an_error() {
        let path = tmp("hdr.csv");
        std::fs::write(&path, "time,roll\n").unwrap();
        assert!(read_barometer_csv::<f64>(&path).is_err());
        std::fs::remove_file(&path).ok();
    }
}
