//! Adaptive particle filter on the discretized roll/pitch manifold.
//!
//! Each step runs predict -> update -> lifetime maintenance -> resampling ->
//! estimate. Prediction seeds coarse-level particles from the IMU around a
//! constant-angular-velocity extrapolation; vision observations reweight the
//! population with a Gaussian kernel of the chart distance and spawn children
//! at finer resolutions near the (fused) observation; aged particles fall back
//! to coarser cells and eventually expire.

mod grid;

pub use grid::{CellId, Level, ManifoldGrid};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::geometry::OrientationRP;
use crate::observation::{Observation, ObservationSource};
use crate::scalar::Real;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum FilterError {
    #[error("filter holds no particles with positive weight")]
    EmptyFilter,
}

/// Weighted hypothesis occupying one grid cell.
#[derive(Clone, Copy, Debug)]
pub struct Particle<T> {
    pub cell: CellId,
    pub weight: T,
    pub birth_time: T,
    pub center: OrientationRP<T>,
}

#[derive(Clone, Copy, Debug)]
pub struct FilterConfig<T> {
    /// Base particle count N; also the post-resampling population size.
    pub particle_count: usize,
    /// Children spawned per eligible parent.
    pub children_per_spawn: usize,
    /// Chart distance within which a particle spawns children (radians).
    pub spawn_radius: T,
    /// Width of the Gaussian weighting kernel (radians).
    pub weight_sigma: T,
    /// Age after which a particle falls back one resolution level (seconds).
    pub coarsen_after: T,
    /// Age after which a particle is removed (seconds).
    pub max_age: T,
    /// Additive IMU spread term b: sampling std-dev is sigma_imu + b (radians).
    pub bias_offset: T,
    /// Resample when ESS drops below this fraction of the population.
    pub resample_threshold: T,
    /// Angular rate assumed before two outputs exist (radians/s per axis).
    pub rate_hint: OrientationRP<T>,
    /// Seed for all stochastic draws.
    pub seed: u64,
}

impl<T: Real> Default for FilterConfig<T> {
    fn default() -> Self {
        Self {
            particle_count: 500,
            children_per_spawn: 8,
            spawn_radius: T::radians_from_degrees(1.0),
            weight_sigma: T::radians_from_degrees(1.0),
            coarsen_after: T::of(2.0),
            max_age: T::of(6.0),
            bias_offset: T::radians_from_degrees(0.2),
            resample_threshold: T::of(0.5),
            rate_hint: OrientationRP::zero(),
            seed: 0,
        }
    }
}

impl<T: Real> FilterConfig<T> {
    pub fn validate(&self) {
        assert!(self.particle_count > 0);
        assert!(self.children_per_spawn > 0);
        assert!(self.spawn_radius > T::zero());
        assert!(self.weight_sigma > T::zero());
        assert!(self.coarsen_after > T::zero());
        assert!(self.max_age > self.coarsen_after);
        assert!(self.bias_offset >= T::zero());
        assert!(self.resample_threshold > T::zero() && self.resample_threshold <= T::one());
    }
}

/// Filter output: weighted mean state and the effective sample size behind it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FusedEstimate<T> {
    pub value: OrientationRP<T>,
    pub timestamp: T,
    pub effective_sample_size: T,
}

/// Inverse-variance fusion of the two vision pipelines (per axis):
/// `var_f = (1/var_1 + 1/var_2)^-1`, `mean_f = var_f (mean_1/var_1 + mean_2/var_2)`.
pub fn fuse_cv<T: Real>(c1: &Observation<T>, c2: &Observation<T>) -> (OrientationRP<T>, T) {
    debug_assert!(c1.variance > T::zero() && c2.variance > T::zero());
    let w1 = T::one() / c1.variance;
    let w2 = T::one() / c2.variance;
    let var = T::one() / (w1 + w2);
    let mean = OrientationRP::new(
        var * (c1.value.roll * w1 + c2.value.roll * w2),
        var * (c1.value.pitch * w1 + c2.value.pitch * w2),
    );
    (mean, var)
}

/// Systematic (low-variance) resampling: draw positions `offset + j/n` for
/// `j = 0..n` through the cumulative weight sum. `offset` must lie in `[0, 1/n)`.
pub fn systematic_indices<T: Real>(weights: &[T], n_draws: usize, offset: T) -> Vec<usize> {
    debug_assert!(!weights.is_empty() && n_draws > 0);
    let n = T::of(n_draws as f64);
    let mut indices = Vec::with_capacity(n_draws);
    let mut cumulative = weights[0];
    let mut i = 0usize;
    for j in 0..n_draws {
        let position = offset + T::of(j as f64) / n;
        while position >= cumulative && i + 1 < weights.len() {
            i += 1;
            cumulative += weights[i];
        }
        indices.push(i);
    }
    indices
}

/// Adaptive particle filter state. Exclusively owned by one execution context;
/// all stochastic draws come from a single seeded generator.
#[derive(Clone, Debug)]
pub struct ManifoldFilter<T> {
    grid: ManifoldGrid<T>,
    config: FilterConfig<T>,
    rng: ChaCha8Rng,
    particles: Vec<Particle<T>>,
    /// Last two outputs (newest first) for the constant-velocity rate.
    outputs: [Option<(T, OrientationRP<T>)>; 2],
    last_predict_time: Option<T>,
    reinit_count: u64,
}

impl<T: Real> ManifoldFilter<T> {
    pub fn new(grid: ManifoldGrid<T>, config: FilterConfig<T>) -> Self {
        config.validate();
        Self {
            grid,
            config,
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            particles: Vec::new(),
            outputs: [None, None],
            last_predict_time: None,
            reinit_count: 0,
        }
    }

    pub fn particles(&self) -> &[Particle<T>] {
        &self.particles
    }

    pub fn grid(&self) -> &ManifoldGrid<T> {
        &self.grid
    }

    /// Number of times weight underflow forced a reinitialization.
    pub fn reinit_count(&self) -> u64 {
        self.reinit_count
    }

    fn sample_gaussian(&mut self, mean: T, sigma: T) -> T {
        if sigma <= T::zero() {
            mean
        } else {
            let z: f64 = self.rng.sample(StandardNormal);
            mean + sigma * T::of(z)
        }
    }

    fn spawn_at(&mut self, level: Level, mean: OrientationRP<T>, sigma: T, birth_time: T, weight: T) -> Particle<T> {
        let roll = self.sample_gaussian(mean.roll, sigma);
        let pitch = self.sample_gaussian(mean.pitch, sigma);
        let cell = self.grid.snap(OrientationRP::new(roll, pitch), level);
        Particle { cell, weight, birth_time, center: self.grid.center(cell) }
    }

    /// Current angular rate from the last two outputs (constant velocity).
    fn angular_rate(&self) -> OrientationRP<T> {
        match (&self.outputs[0], &self.outputs[1]) {
            (Some((t1, e1)), Some((t2, e2))) if *t1 > *t2 => {
                let inv = T::one() / (*t1 - *t2);
                OrientationRP::new((e1.roll - e2.roll) * inv, (e1.pitch - e2.pitch) * inv)
            }
            _ => self.config.rate_hint,
        }
    }

    /// Seed N coarse-level particles from the IMU observation, each axis drawn
    /// from `N(mean + rate * dt, sigma_imu + b)`. Existing particles are kept.
    pub fn predict(&mut self, imu: &Observation<T>, now: T) {
        debug_assert_eq!(imu.source, ObservationSource::Imu);
        let dt = self.last_predict_time.map_or(T::zero(), |t| now - t);
        self.last_predict_time = Some(now);
        let rate = self.angular_rate();
        self.predict_with_rate(imu, now, dt, rate);
    }

    /// Prediction with an explicit rate/interval, the testable core of
    /// [`predict`](Self::predict).
    pub fn predict_with_rate(&mut self, imu: &Observation<T>, now: T, dt: T, rate: OrientationRP<T>) {
        let mean = OrientationRP::new(
            imu.value.roll + rate.roll * dt,
            imu.value.pitch + rate.pitch * dt,
        );
        let sigma = imu.variance.sqrt() + self.config.bias_offset;
        let weight = T::one() / T::of(self.config.particle_count as f64);
        for _ in 0..self.config.particle_count {
            let p = self.spawn_at(Level::Coarse, mean, sigma, now, weight);
            self.particles.push(p);
        }
        self.normalize_weights();
    }

    /// Reweight all particles against the available vision observations and
    /// spawn children near them; see the module docs for the full contract.
    pub fn update(&mut self, c1: Option<&Observation<T>>, c2: Option<&Observation<T>>, now: T) {
        let (target, spawn_level, spawn_sigma, freshest) = match (c1, c2) {
            (Some(a), Some(b)) => {
                let (mean, var) = fuse_cv(a, b);
                (mean, Level::Fine, var.sqrt(), if a.timestamp >= b.timestamp { *a } else { *b })
            }
            (Some(a), None) => (a.value, Level::Mid, a.variance.sqrt(), *a),
            (None, Some(b)) => (b.value, Level::Mid, b.variance.sqrt(), *b),
            (None, None) => return,
        };

        let inv_two_sigma_sq = T::one() / (T::of(2.0) * self.config.weight_sigma * self.config.weight_sigma);
        let kernel = |d: T| (-(d * d) * inv_two_sigma_sq).exp();

        let mut spawned = Vec::new();
        for idx in 0..self.particles.len() {
            let d = self.particles[idx].center.angular_distance(&target);
            self.particles[idx].weight *= kernel(d);
            if d <= self.config.spawn_radius {
                let parent_weight = self.particles[idx].weight;
                for _ in 0..self.config.children_per_spawn {
                    let mut child = self.spawn_at(spawn_level, target, spawn_sigma, now, T::zero());
                    let dc = child.center.angular_distance(&target);
                    child.weight = parent_weight * kernel(dc);
                    spawned.push(child);
                }
            }
        }
        self.particles.extend(spawned);

        if !self.normalize_weights() {
            // Numerical underflow wiped the population; restart around the
            // freshest observation at mid resolution.
            self.reinitialize_from(&freshest, now);
        }
    }

    fn reinitialize_from(&mut self, obs: &Observation<T>, now: T) {
        self.reinit_count += 1;
        self.particles.clear();
        let sigma = obs.variance.sqrt();
        let weight = T::one() / T::of(self.config.particle_count as f64);
        for _ in 0..self.config.particle_count {
            let p = self.spawn_at(Level::Mid, obs.value, sigma, now, weight);
            self.particles.push(p);
        }
    }

    /// Demote particles older than `coarsen_after` one level (resetting their
    /// birth time) and drop particles older than `max_age`.
    pub fn maintain_lifetime(&mut self, now: T) {
        let max_age = self.config.max_age;
        self.particles.retain(|p| now - p.birth_time <= max_age);
        let coarsen = self.config.coarsen_after;
        for p in &mut self.particles {
            if now - p.birth_time > coarsen && p.cell.level != Level::Coarse {
                p.cell = self.grid.demote(p.cell);
                p.center = self.grid.center(p.cell);
                p.birth_time = now;
            }
        }
        self.normalize_weights();
    }

    /// Systematic resampling back to the base population size whenever the
    /// effective sample size degenerates or the population outgrew its cap.
    pub fn resample(&mut self) {
        let count = self.particles.len();
        if count == 0 {
            return;
        }
        let ess = self.effective_sample_size();
        let trigger_ess = ess < self.config.resample_threshold * T::of(count as f64);
        let trigger_cap = count > 2 * self.config.particle_count;
        if !(trigger_ess || trigger_cap) {
            return;
        }
        let n = self.config.particle_count;
        let offset = T::of(self.rng.random::<f64>()) / T::of(n as f64);
        let weights: Vec<T> = self.particles.iter().map(|p| p.weight).collect();
        let indices = systematic_indices(&weights, n, offset);
        let uniform = T::one() / T::of(n as f64);
        self.particles = indices
            .into_iter()
            .map(|i| {
                let mut p = self.particles[i];
                p.weight = uniform;
                p
            })
            .collect();
    }

    pub fn effective_sample_size(&self) -> T {
        let mut sum = T::zero();
        let mut sum_sq = T::zero();
        for p in &self.particles {
            sum += p.weight;
            sum_sq += p.weight * p.weight;
        }
        if sum_sq <= T::zero() {
            T::zero()
        } else {
            (sum * sum) / sum_sq
        }
    }

    /// Weight-weighted mean of particle centers.
    pub fn estimate(&self, timestamp: T) -> Result<FusedEstimate<T>, FilterError> {
        let mut sum = T::zero();
        let mut roll = T::zero();
        let mut pitch = T::zero();
        for p in &self.particles {
            sum += p.weight;
            roll += p.weight * p.center.roll;
            pitch += p.weight * p.center.pitch;
        }
        if sum <= T::zero() {
            return Err(FilterError::EmptyFilter);
        }
        Ok(FusedEstimate {
            value: OrientationRP::new(roll / sum, pitch / sum),
            timestamp,
            effective_sample_size: self.effective_sample_size(),
        })
    }

    /// One full filter cycle: predict, update with whatever vision
    /// observations are present, age the population, resample, estimate.
    pub fn step(
        &mut self,
        imu: &Observation<T>,
        c1: Option<&Observation<T>>,
        c2: Option<&Observation<T>>,
        now: T,
    ) -> Result<FusedEstimate<T>, FilterError> {
        self.predict(imu, now);
        if c1.is_some() || c2.is_some() {
            self.update(c1, c2, now);
        }
        self.maintain_lifetime(now);
        self.resample();
        let est = self.estimate(now)?;
        self.outputs = [Some((now, est.value)), self.outputs[0]];
        Ok(est)
    }

    /// Normalize weights to sum one. Returns false when the total is zero or
    /// non-finite (degenerate population).
    fn normalize_weights(&mut self) -> bool {
        let mut sum = T::zero();
        for p in &self.particles {
            sum += p.weight;
        }
        if sum <= T::zero() || !sum.is_finite() {
            return false;
        }
        let inv = T::one() / sum;
        for p in &mut self.particles {
            p.weight *= inv;
        }
        true
    }
}
