//! Transmitted pulse models.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::rng::{derive_seed, TAG_WAVEFORM};
use crate::C64;

/// Linear FM pulse with its phase stationary at the pulse center.
/// Half-open pulse support `[0, duration)`, with a relative slack of 1e-9 at
/// both ends so samples landing exactly on an edge fall the same way
/// regardless of rounding.
#[inline]
fn in_support(tau: f64, duration: f64) -> bool {
    let slack = 1e-9 * duration;
    tau >= -slack && tau < duration - slack
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChirpWaveform {
    pub bandwidth: f64,
    pub duration: f64,
}

impl ChirpWaveform {
    pub fn new(bandwidth: f64, duration: f64) -> Result<Self> {
        let w = ChirpWaveform {
            bandwidth,
            duration,
        };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.bandwidth > 0.0 && self.bandwidth.is_finite()) {
            return Err(Error::invalid("bandwidth", "must be positive"));
        }
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return Err(Error::invalid("duration", "must be positive"));
        }
        Ok(())
    }

    pub fn chirp_rate(&self) -> f64 {
        self.bandwidth / self.duration
    }

    /// `exp(j pi K (tau - T/2)^2)` on `[0, T)`, zero elsewhere.
    #[inline]
    pub fn sample(&self, tau: f64) -> C64 {
        if !in_support(tau, self.duration) {
            return C64::new(0.0, 0.0);
        }
        let u = tau - 0.5 * self.duration;
        C64::from_polar(1.0, PI * self.chirp_rate() * u * u)
    }
}

/// Pseudo-random phase pulses, one member per pulse index.
///
/// Each member holds `samples` piecewise-constant unit phasors across the
/// pulse; the phase of bin `b` of member `i` is a hash of `(seed, i, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomWaveformFamily {
    pub duration: f64,
    pub samples: usize,
    pub seed: u64,
}

impl RandomWaveformFamily {
    pub fn new(duration: f64, samples: usize, seed: u64) -> Result<Self> {
        let w = RandomWaveformFamily {
            duration,
            samples,
            seed,
        };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return Err(Error::invalid("duration", "must be positive"));
        }
        if self.samples == 0 {
            return Err(Error::invalid("samples", "must be at least 1"));
        }
        Ok(())
    }

    /// Occupied bandwidth, one over the phase-bin width.
    pub fn bandwidth(&self) -> f64 {
        self.samples as f64 / self.duration
    }

    fn bin_phasor(&self, member: i64, bin: usize) -> C64 {
        let h = derive_seed(self.seed, &[TAG_WAVEFORM, member as u64, bin as u64]);
        // 53 high bits to a uniform phase in [0, 2pi)
        let u = (h >> 11) as f64 / (1u64 << 53) as f64;
        C64::from_polar(1.0, 2.0 * PI * u)
    }

    pub fn sample(&self, member: i64, tau: f64) -> C64 {
        if !in_support(tau, self.duration) {
            return C64::new(0.0, 0.0);
        }
        let bin = ((tau / self.duration).max(0.0) * self.samples as f64) as usize;
        self.bin_phasor(member, bin.min(self.samples - 1))
    }

    /// All phase bins of one member.
    pub fn member(&self, member: i64) -> Vec<C64> {
        (0..self.samples).map(|b| self.bin_phasor(member, b)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Waveform {
    Chirp(ChirpWaveform),
    Random(RandomWaveformFamily),
}

impl Waveform {
    pub fn validate(&self) -> Result<()> {
        match self {
            Waveform::Chirp(w) => w.validate(),
            Waveform::Random(w) => w.validate(),
        }
    }

    pub fn bandwidth(&self) -> f64 {
        match self {
            Waveform::Chirp(w) => w.bandwidth,
            Waveform::Random(w) => w.bandwidth(),
        }
    }

    pub fn duration(&self) -> f64 {
        match self {
            Waveform::Chirp(w) => w.duration,
            Waveform::Random(w) => w.duration,
        }
    }

    /// Baseband pulse value at delay `tau` into pulse `pulse_index`.
    #[inline]
    pub fn sample_pulse(&self, pulse_index: i64, tau: f64) -> C64 {
        match self {
            Waveform::Chirp(w) => w.sample(tau),
            Waveform::Random(w) => w.sample(pulse_index, tau),
        }
    }
}

/// Peak of the discrete cross-correlation of member `j` against member `i`,
/// relative to the autocorrelation peak of member `i`.
pub fn cross_correlation_peak_ratio(family: &RandomWaveformFamily, i: i64, j: i64) -> Result<f64> {
    if i != j && family.samples < 2 {
        return Err(Error::invalid(
            "samples",
            "cross-correlation needs at least 2 samples per pulse",
        ));
    }
    let a = family.member(i);
    let b = family.member(j);
    let auto: f64 = a.iter().map(|z| z.norm_sqr()).sum();
    let n = a.len() as isize;
    let mut peak = 0.0f64;
    for lag in -(n - 1)..n {
        let mut acc = C64::new(0.0, 0.0);
        for (k, bk) in b.iter().enumerate() {
            let ka = k as isize + lag;
            if (0..n).contains(&ka) {
                acc += a[ka as usize] * bk.conj();
            }
        }
        peak = peak.max(acc.norm());
    }
    Ok(peak / auto)
}
