//! Synthetic test bed: ground-truth trajectories, flat-earth mask rendering,
//! and noisy IMU/barometer streams, all bit-reproducible under a fixed seed.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::geometry::{CameraIntrinsics, OrientationRP};
use crate::mask::{BinaryMask, Cell};
use crate::observation::{Observation, ObservationSource};
use crate::scalar::Real;

/// Default flight height (meters), above the ground-plane trigger.
pub const DEFAULT_HEIGHT_M: f64 = 400.0;
/// Sweep amplitude for the single-axis patterns (degrees).
pub const SWEEP_AMPLITUDE_DEG: f64 = 30.0;
/// Mean-reversion rate of the mixed-pattern random walk (1/s).
const MIXED_REVERSION: f64 = 0.15;

/// Ground-truth motion pattern.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pattern {
    Roll,
    Pitch,
    Mixed,
}

/// One ground-truth sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrajectorySample<T> {
    pub timestamp: T,
    pub orientation: OrientationRP<T>,
    pub height: T,
}

/// Time-ordered ground-truth sequence.
#[derive(Clone, Debug, Default)]
pub struct Trajectory<T> {
    pub samples: Vec<TrajectorySample<T>>,
}

/// Sensor noise configuration for the synthetic IMU and barometer.
#[derive(Clone, Copy, Debug)]
pub struct SensorNoiseModel<T> {
    /// IMU white-noise standard deviation per axis (radians).
    pub imu_sigma: T,
    /// IMU bias drift rate (radians/s); the bias is not reported to consumers.
    pub imu_bias_rate: T,
    /// Barometer white-noise standard deviation (meters).
    pub baro_sigma: T,
    pub seed: u64,
}

impl<T: Real> SensorNoiseModel<T> {
    pub fn noiseless(seed: u64) -> Self {
        Self { imu_sigma: T::zero(), imu_bias_rate: T::zero(), baro_sigma: T::zero(), seed }
    }
}

fn triangle_sweep<T: Real>(t: T, speed: T, amplitude: T) -> T {
    if speed <= T::zero() {
        return T::zero();
    }
    let quarter = amplitude / speed;
    let period = T::of(4.0) * quarter;
    let u = t - (t / period).floor() * period;
    if u < quarter {
        speed * u
    } else if u < T::of(3.0) * quarter {
        amplitude - speed * (u - quarter)
    } else {
        -amplitude + speed * (u - T::of(3.0) * quarter)
    }
}

/// Generate a trajectory at constant `height`.
///
/// `Roll`/`Pitch` sweep the named axis as a triangle wave of `speed` within
/// +-30 degrees, holding the other axis at zero. `Mixed` runs a mean-reverting
/// random walk on both axes whose per-step rate has RMS `speed`, clipped to
/// +-30 degrees.
pub fn make_trajectory_at_height<T: Real>(
    pattern: Pattern,
    speed: T,
    duration: T,
    rate_hz: T,
    seed: u64,
    height: T,
) -> Trajectory<T> {
    let count = (duration * rate_hz).round().as_f64().max(0.0) as usize;
    let dt = T::one() / rate_hz;
    let amplitude = T::radians_from_degrees(SWEEP_AMPLITUDE_DEG);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut walk = OrientationRP::<T>::zero();
    let mut samples = Vec::with_capacity(count);
    for k in 0..count {
        let t = T::of(k as f64) * dt;
        let orientation = match pattern {
            Pattern::Roll => OrientationRP::new(triangle_sweep(t, speed, amplitude), T::zero()),
            Pattern::Pitch => OrientationRP::new(T::zero(), triangle_sweep(t, speed, amplitude)),
            Pattern::Mixed => {
                if k > 0 {
                    let lambda = T::of(MIXED_REVERSION);
                    let step_sigma = speed * dt;
                    let axis = |x: T, rng: &mut ChaCha8Rng| {
                        let z: f64 = rng.sample(StandardNormal);
                        let next = x - lambda * x * dt + step_sigma * T::of(z);
                        next.max(-amplitude).min(amplitude)
                    };
                    walk = OrientationRP::new(axis(walk.roll, &mut rng), axis(walk.pitch, &mut rng));
                }
                walk
            }
        };
        samples.push(TrajectorySample { timestamp: t, orientation, height });
    }
    Trajectory { samples }
}

/// [`make_trajectory_at_height`] at the default 400 m flight height.
pub fn make_trajectory<T: Real>(
    pattern: Pattern,
    speed: T,
    duration: T,
    rate_hz: T,
    seed: u64,
) -> Trajectory<T> {
    make_trajectory_at_height(pattern, speed, duration, rate_hz, seed, T::of(DEFAULT_HEIGHT_M))
}

/// Render the flat-earth sky/ground mask for one camera attitude.
///
/// A pixel is sky iff its body-frame ray `r` satisfies
/// `r . gravity_in_body < 0` (it points above the horizon).
pub fn render_mask<T: Real>(
    orientation: OrientationRP<T>,
    k: &CameraIntrinsics<T>,
    size: (u32, u32),
) -> BinaryMask {
    let g = orientation.gravity_in_body();
    let (width, height) = size;
    BinaryMask::from_fn(width, height, |u, v| {
        let x = (T::of(f64::from(u)) - k.cx) / k.fx;
        let y = (T::of(f64::from(v)) - k.cy) / k.fy;
        // Body-frame ray through the pixel is (1, x, y).
        let down = g.x + g.y * x + g.z * y;
        if down < T::zero() {
            Cell::Sky
        } else {
            Cell::Ground
        }
    })
}

/// Synthesize the IMU stream: truth plus linear bias drift plus white noise
/// per axis. The reported variance covers the white noise only.
pub fn simulate_imu<T: Real>(traj: &Trajectory<T>, noise: &SensorNoiseModel<T>) -> Vec<Observation<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
    let variance = noise.imu_sigma * noise.imu_sigma;
    traj.samples
        .iter()
        .map(|s| {
            let bias = noise.imu_bias_rate * s.timestamp;
            let axis = |truth: T, rng: &mut ChaCha8Rng| {
                let z: f64 = rng.sample(StandardNormal);
                truth + bias + noise.imu_sigma * T::of(z)
            };
            let value = OrientationRP::new(
                axis(s.orientation.roll, &mut rng),
                axis(s.orientation.pitch, &mut rng),
            );
            Observation::new(ObservationSource::Imu, value, variance, s.timestamp)
        })
        .collect()
}

/// Synthesize the barometer stream: truth height plus white noise.
pub fn simulate_barometer<T: Real>(traj: &Trajectory<T>, noise: &SensorNoiseModel<T>) -> Vec<(T, T)> {
    let mut rng = ChaCha8Rng::seed_from_u64(noise.seed.wrapping_add(0x9E37_79B9));
    traj.samples
        .iter()
        .map(|s| {
            let z: f64 = rng.sample(StandardNormal);
            (s.timestamp, s.height + noise.baro_sigma * T::of(z))
        })
        .collect()
}

/// First-order low-pass over IMU observations; the comparison track standing
/// in for a filtered-IMU-only pipeline.
#[derive(Clone, Copy, Debug)]
pub struct ImuBaseline<T> {
    /// Time constant (seconds); zero passes the input through.
    pub smoothing: T,
    state: Option<(T, OrientationRP<T>)>,
}

impl<T: Real> ImuBaseline<T> {
    pub fn new(smoothing: T) -> Self {
        Self { smoothing, state: None }
    }

    pub fn push(&mut self, timestamp: T, value: OrientationRP<T>) -> OrientationRP<T> {
        let next = match self.state {
            None => value,
            Some((t_prev, prev)) => {
                if self.smoothing <= T::zero() {
                    value
                } else {
                    let dt = timestamp - t_prev;
                    let alpha = T::one() - (-dt / self.smoothing).exp();
                    OrientationRP::new(
                        prev.roll + alpha * (value.roll - prev.roll),
                        prev.pitch + alpha * (value.pitch - prev.pitch),
                    )
                }
            }
        };
        self.state = Some((timestamp, next));
        next
    }
}

/// Run the baseline over a whole IMU stream.
pub fn baseline_imu_only<T: Real>(imu: &[Observation<T>], smoothing: T) -> Vec<OrientationRP<T>> {
    let mut ema = ImuBaseline::new(smoothing);
    imu.iter().map(|o| ema.push(o.timestamp, o.value)).collect()
}
