//! Deterministic random number plumbing.
//!
//! Every stochastic component draws from a ChaCha8 stream seeded through
//! [`derive_seed`], so a (master seed, index) pair pins a trial exactly,
//! independent of execution order, platform, or thread count.

use crate::error::ConfigError;
use crate::num;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// splitmix64 finalizer; a well-mixed 64-bit permutation.
#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Derive the seed for substream `index` of `master`. Stable across
/// platforms and releases; recorded outputs depend on it.
#[inline]
pub fn derive_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index))
}

/// A seeded source of uniform and standard-normal variates.
#[derive(Debug, Clone)]
pub struct TrialRng {
    rng: ChaCha8Rng,
    spare_normal: Option<f64>,
}

impl TrialRng {
    pub fn seed_from_u64(seed: u64) -> TrialRng {
        TrialRng {
            rng: ChaCha8Rng::seed_from_u64(seed),
            spare_normal: None,
        }
    }

    /// Uniform in `[0, 1)`.
    #[inline]
    pub fn uniform01(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `(0, 1]`; safe as a logarithm argument.
    #[inline]
    fn uniform01_open_low(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`.
    #[inline]
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform01()
    }

    /// Standard normal via the Box-Muller transform (pairs cached).
    pub fn standard_normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        let u1 = self.uniform01_open_low();
        let u2 = self.uniform01();
        let radius = num::sqrt(-2.0 * num::ln(u1));
        let angle = 2.0 * core::f64::consts::PI * u2;
        self.spare_normal = Some(radius * num::sin(angle));
        radius * num::cos(angle)
    }
}

/// Per-step lateral force source. Implementations must be idempotent per
/// step index: querying the same step twice returns the same value.
pub trait LateralForce {
    fn at_step(&mut self, step: u64) -> f64;
}

/// The oscillating random force: `Rm * z` with `z ~ N(0,1)`, resampled every
/// `round(1/(f dt))` steps and held constant in between (zero-order hold).
#[derive(Debug, Clone)]
pub struct OscillatingForce {
    magnitude: f64,
    interval: u64,
    rng: TrialRng,
    bucket: Option<u64>,
    current: f64,
}

impl OscillatingForce {
    pub fn new(magnitude: f64, hz: f64, dt: f64, seed: u64) -> Result<Self, ConfigError> {
        let valid = hz > 0.0 && dt > 0.0 && hz * dt <= 1.0;
        if !valid {
            return Err(ConfigError::Invalid {
                field: "f",
                what: "oscillator frequency",
                reason: "requires f > 0, dt > 0 and f * dt <= 1",
            });
        }
        let interval = num::round(1.0 / (hz * dt)) as u64;
        Ok(OscillatingForce {
            magnitude,
            interval: interval.max(1),
            rng: TrialRng::seed_from_u64(seed),
            bucket: None,
            current: 0.0,
        })
    }

    /// Steps between resamples.
    pub fn interval(&self) -> u64 {
        self.interval
    }
}

impl LateralForce for OscillatingForce {
    fn at_step(&mut self, step: u64) -> f64 {
        let bucket = step / self.interval;
        if self.bucket != Some(bucket) {
            self.bucket = Some(bucket);
            self.current = self.magnitude * self.rng.standard_normal();
        }
        self.current
    }
}

/// Fixed force sequence, one value per resample bucket. Used by tests to
/// replay or mirror a recorded sequence. Runs out -> zero.
#[derive(Debug, Clone)]
pub struct ScriptedForce {
    values: alloc::vec::Vec<f64>,
    interval: u64,
}

impl ScriptedForce {
    pub fn new(values: alloc::vec::Vec<f64>, interval: u64) -> ScriptedForce {
        ScriptedForce {
            values,
            interval: interval.max(1),
        }
    }
}

impl LateralForce for ScriptedForce {
    fn at_step(&mut self, step: u64) -> f64 {
        let bucket = (step / self.interval) as usize;
        self.values.get(bucket).copied().unwrap_or(0.0)
    }
}

/// Zero lateral force.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoForce;

impl LateralForce for NoForce {
    fn at_step(&mut self, _step: u64) -> f64 {
        0.0
    }
}
