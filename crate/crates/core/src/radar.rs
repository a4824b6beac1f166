//! Exact time-domain observation model for a side-looking strip-map SAR.

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{check_len, Error, Result};
use crate::recon::LinearOperator;
use crate::rng::{self, TAG_NOISE};
use crate::sampling::{PlanDescriptor, SamplingPlan};
use crate::scene::{SceneGeometry, SceneGrid};
use crate::waveform::{ChirpWaveform, Waveform};
use crate::C64;

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Default cap on the number of complex entries of a dense observation matrix.
pub const DEFAULT_DENSE_BUDGET: usize = 1 << 26;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadarConfig {
    /// Carrier frequency, Hz.
    pub carrier: f64,
    /// Platform speed, m/s.
    pub speed: f64,
    /// Nominal (full-rate) pulse repetition frequency, Hz.
    pub prf: f64,
    /// Full-rate range sampling frequency, Hz.
    pub sample_rate: f64,
    pub waveform: Waveform,
    /// Slant range the fast operator is referenced to, m.
    pub reference_range: f64,
    /// Synthetic aperture duration; a target is illuminated while
    /// `|t - t_target| <= aperture_time / 2`.
    pub aperture_time: f64,
    /// Full-rate pulse count of the acquisition window.
    pub pulses: usize,
    /// Full-rate range samples per pulse.
    pub range_samples: usize,
}

impl RadarConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &'static str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(name, format!("must be positive and finite, got {v}")))
            }
        };
        positive("carrier", self.carrier)?;
        positive("prf", self.prf)?;
        positive("sample_rate", self.sample_rate)?;
        positive("reference_range", self.reference_range)?;
        if !(self.speed >= 0.0 && self.speed.is_finite()) {
            return Err(Error::invalid("speed", "must be non-negative and finite"));
        }
        if !(self.aperture_time > 0.0) {
            return Err(Error::invalid("aperture_time", "must be positive"));
        }
        self.waveform.validate()?;
        if self.sample_rate < self.waveform.bandwidth() * (1.0 - 1e-12) {
            return Err(Error::invalid(
                "sample_rate",
                format!(
                    "{} Hz is below the waveform bandwidth {} Hz",
                    self.sample_rate,
                    self.waveform.bandwidth()
                ),
            ));
        }
        if self.pulses == 0 || self.range_samples == 0 {
            return Err(Error::invalid("pulses/range_samples", "must be at least 1"));
        }
        Ok(())
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier
    }

    /// Azimuth FM rate of a target at slant range `r0`, Hz/s.
    pub fn doppler_rate(&self, r0: f64) -> f64 {
        2.0 * self.speed * self.speed / (self.wavelength() * r0)
    }

    /// Grid whose cells coincide with full-rate samples: one pulse per azimuth
    /// row, one range bin per column, centered on the reference range.
    pub fn matched_geometry(&self, rows: usize, cols: usize) -> Result<SceneGeometry> {
        let cell_range = SPEED_OF_LIGHT / (2.0 * self.sample_rate);
        SceneGeometry::new(
            rows,
            cols,
            self.speed / self.prf,
            cell_range,
            self.reference_range - (cols as f64 - 1.0) / 2.0 * cell_range,
        )
    }

    /// Whether a target is illuminated `eta` seconds from broadside. The
    /// bound is inclusive with a relative slack of 1e-9 so that pulses landing
    /// exactly on the aperture edge are kept regardless of rounding.
    #[inline]
    pub fn illuminates(&self, eta: f64) -> bool {
        eta.abs() <= 0.5 * self.aperture_time * (1.0 + 1e-9)
    }

    pub fn pulse_index(&self, t: f64) -> i64 {
        (t * self.prf).round() as i64
    }
}

/// A named parameter set with its default scene size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Preset {
    pub radar: RadarConfig,
    pub scene_rows: usize,
    pub scene_cols: usize,
}

impl Preset {
    pub fn geometry(&self) -> Result<SceneGeometry> {
        self.radar.matched_geometry(self.scene_rows, self.scene_cols)
    }
}

pub const PRESET_NAMES: [&str; 3] = ["desk-small", "desk", "tianjin-c-band"];

/// C-band geometry scaled so that the azimuth bandwidth equals the PRF and an
/// aperture spans `aperture_pulses` pulses.
fn desk_radar(
    bandwidth: f64,
    sample_rate: f64,
    pulse_samples: usize,
    aperture_pulses: usize,
    pulses: usize,
    range_samples: usize,
) -> RadarConfig {
    let carrier = 5.4e9;
    let speed = 100.0;
    let reference_range = 5000.0;
    let ka = 2.0 * speed * speed * carrier / (SPEED_OF_LIGHT * reference_range);
    let prf = (ka * aperture_pulses as f64).sqrt();
    RadarConfig {
        carrier,
        speed,
        prf,
        sample_rate,
        waveform: Waveform::Chirp(ChirpWaveform {
            bandwidth,
            duration: pulse_samples as f64 / sample_rate,
        }),
        reference_range,
        aperture_time: aperture_pulses as f64 / prf,
        pulses,
        range_samples,
    }
}

pub fn preset(name: &str) -> Result<Preset> {
    match name {
        // Image-sized data window; small enough for dense Monte-Carlo sweeps.
        "desk-small" => Ok(Preset {
            radar: desk_radar(100e6, 100e6, 7, 16, 24, 32),
            scene_rows: 24,
            scene_cols: 32,
        }),
        "desk" => Ok(Preset {
            radar: desk_radar(100e6, 120e6, 255, 48, 128, 512),
            scene_rows: 64,
            scene_cols: 128,
        }),
        "tianjin-c-band" => {
            let carrier = 5.4e9;
            let speed = 108.0;
            let reference_range = 5000.0;
            let antenna = 0.9;
            let wavelength = SPEED_OF_LIGHT / carrier;
            Ok(Preset {
                radar: RadarConfig {
                    carrier,
                    speed,
                    prf: 768.0,
                    sample_rate: 750e6,
                    waveform: Waveform::Chirp(ChirpWaveform {
                        bandwidth: 500e6,
                        duration: 38e-6,
                    }),
                    reference_range,
                    aperture_time: wavelength * reference_range / (antenna * speed),
                    pulses: 4096,
                    range_samples: 32768,
                },
                scene_rows: 1024,
                scene_cols: 2048,
            })
        }
        other => Err(Error::invalid(
            "preset",
            format!("unknown preset `{other}`, expected one of {PRESET_NAMES:?}"),
        )),
    }
}

/// Sample instants of the full-rate acquisition grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FullRateTiming {
    pub azimuth: Vec<f64>,
    pub range: Vec<f64>,
}

impl FullRateTiming {
    /// Pulses centered on the scene; range window centered on the pulse
    /// centers of the scene's middle range.
    ///
    /// With `range_samples = cols + pulse_samples` on a matched grid the
    /// window runs from the nearest echo start to the farthest echo end.
    pub fn aligned(config: &RadarConfig, geometry: &SceneGeometry) -> Self {
        FullRateTiming {
            azimuth: azimuth_grid(config),
            range: range_grid(config, geometry),
        }
    }
}

pub fn azimuth_grid(config: &RadarConfig) -> Vec<f64> {
    let half = (config.pulses as f64 - 1.0) / 2.0;
    (0..config.pulses)
        .map(|k| (k as f64 - half) / config.prf)
        .collect()
}

pub fn range_grid(config: &RadarConfig, geometry: &SceneGeometry) -> Vec<f64> {
    let center =
        2.0 * geometry.center_range() / SPEED_OF_LIGHT + 0.5 * config.waveform.duration();
    let half = (config.range_samples as f64 - 1.0) / 2.0;
    (0..config.range_samples)
        .map(|l| center + (l as f64 - half) / config.sample_rate)
        .collect()
}

#[inline]
pub fn instantaneous_range(r0: f64, speed: f64, t: f64) -> f64 {
    (r0 * r0 + speed * speed * t * t).sqrt()
}

/// Echo of a point target with reflectivity `sigma` at closest range `r0`
/// passing broadside at time `azimuth_offset`, sampled at `(t, tau)`.
pub fn point_target_echo(
    config: &RadarConfig,
    sigma: C64,
    r0: f64,
    azimuth_offset: f64,
    t: f64,
    tau: f64,
) -> C64 {
    let eta = t - azimuth_offset;
    if !config.illuminates(eta) {
        return C64::new(0.0, 0.0);
    }
    let r = instantaneous_range(r0, config.speed, eta);
    let p = config
        .waveform
        .sample_pulse(config.pulse_index(t), tau - 2.0 * r / SPEED_OF_LIGHT);
    if p == C64::new(0.0, 0.0) {
        return p;
    }
    sigma * C64::from_polar(1.0, -4.0 * PI * config.carrier * r / SPEED_OF_LIGHT) * p
}

/// Dense matrix of the observation model on a given timing.
///
/// Row `k * L + l` is sample `(t_k, tau_l)`, column `m * N + n` is cell `(m, n)`.
#[derive(Debug, Clone)]
pub struct DenseObservation {
    pub matrix: Vec<C64>,
    pub rows: usize,
    pub cols: usize,
    pub config: RadarConfig,
    pub geometry: SceneGeometry,
    pub timing: FullRateTiming,
}

/// Fill the matrix rows for the listed `(k, l)` samples.
fn observation_rows(
    config: &RadarConfig,
    geometry: &SceneGeometry,
    azimuth: &[f64],
    range: &[f64],
    samples: &[(usize, usize)],
) -> Vec<C64> {
    let cols = geometry.len();
    let mut matrix = vec![C64::new(0.0, 0.0); samples.len() * cols];
    matrix
        .par_chunks_mut(cols)
        .zip(samples.par_iter())
        .for_each(|(row, &(k, l))| {
            let t = azimuth[k];
            let tau = range[l];
            for m in 0..geometry.rows {
                let offset = azimuth_offset(config, geometry, m);
                for n in 0..geometry.cols {
                    row[geometry.index(m, n)] = point_target_echo(
                        config,
                        C64::new(1.0, 0.0),
                        geometry.slant_range(n),
                        offset,
                        t,
                        tau,
                    );
                }
            }
        });
    matrix
}

/// Broadside time of scene row `m`.
pub fn azimuth_offset(config: &RadarConfig, geometry: &SceneGeometry, m: usize) -> f64 {
    if config.speed > 0.0 {
        geometry.azimuth_position(m) / config.speed
    } else {
        0.0
    }
}

pub fn build_dense_observation(
    config: &RadarConfig,
    geometry: &SceneGeometry,
    timing: &FullRateTiming,
) -> Result<DenseObservation> {
    build_dense_observation_with_budget(config, geometry, timing, DEFAULT_DENSE_BUDGET)
}

pub fn build_dense_observation_with_budget(
    config: &RadarConfig,
    geometry: &SceneGeometry,
    timing: &FullRateTiming,
    budget: usize,
) -> Result<DenseObservation> {
    config.validate()?;
    geometry.validate()?;
    let rows = timing.azimuth.len() * timing.range.len();
    let cols = geometry.len();
    let needed = rows.saturating_mul(cols);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let samples: Vec<(usize, usize)> = (0..timing.azimuth.len())
        .flat_map(|k| (0..timing.range.len()).map(move |l| (k, l)))
        .collect();
    let matrix = observation_rows(config, geometry, &timing.azimuth, &timing.range, &samples);
    Ok(DenseObservation {
        matrix,
        rows,
        cols,
        config: *config,
        geometry: *geometry,
        timing: timing.clone(),
    })
}

fn dense_apply(matrix: &[C64], cols: usize, x: &[C64], out: &mut [C64]) {
    out.par_iter_mut()
        .zip(matrix.par_chunks(cols))
        .for_each(|(o, row)| {
            *o = row.iter().zip(x).map(|(h, v)| h * v).sum();
        });
}

fn dense_apply_adjoint(matrix: &[C64], cols: usize, y: &[C64], out: &mut [C64]) {
    out.iter_mut().for_each(|o| *o = C64::new(0.0, 0.0));
    for (row, yr) in matrix.chunks(cols).zip(y) {
        if *yr == C64::new(0.0, 0.0) {
            continue;
        }
        for (o, h) in out.iter_mut().zip(row) {
            *o += h.conj() * yr;
        }
    }
}

impl DenseObservation {
    pub fn forward(&self, x: &[C64]) -> Result<Vec<C64>> {
        check_len("dense forward input", self.cols, x.len())?;
        let mut out = vec![C64::new(0.0, 0.0); self.rows];
        dense_apply(&self.matrix, self.cols, x, &mut out);
        Ok(out)
    }

    pub fn adjoint(&self, y: &[C64]) -> Result<Vec<C64>> {
        check_len("dense adjoint input", self.rows, y.len())?;
        let mut out = vec![C64::new(0.0, 0.0); self.cols];
        dense_apply_adjoint(&self.matrix, self.cols, y, &mut out);
        Ok(out)
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        self.matrix.chunks(self.cols).map(|row| row[j]).collect()
    }
}

impl LinearOperator for DenseObservation {
    fn domain_len(&self) -> usize {
        self.cols
    }
    fn range_len(&self) -> usize {
        self.rows
    }
    fn apply(&self, x: &[C64], out: &mut [C64]) {
        dense_apply(&self.matrix, self.cols, x, out);
    }
    fn apply_adjoint(&self, y: &[C64], out: &mut [C64]) {
        dense_apply_adjoint(&self.matrix, self.cols, y, out);
    }
}

/// Dense observation restricted to the acquired samples of an echo layout.
///
/// Maps scenes to echo-shaped vectors with zeros at unacquired positions,
/// storing only the acquired rows.
#[derive(Debug, Clone)]
pub struct SampledObservation {
    matrix: Vec<C64>,
    acquired: Vec<usize>,
    echo_len: usize,
    cols: usize,
}

impl SampledObservation {
    pub fn new(config: &RadarConfig, geometry: &SceneGeometry, echo: &EchoData) -> Result<Self> {
        Self::with_budget(config, geometry, echo, DEFAULT_DENSE_BUDGET)
    }

    pub fn with_budget(
        config: &RadarConfig,
        geometry: &SceneGeometry,
        echo: &EchoData,
        budget: usize,
    ) -> Result<Self> {
        config.validate()?;
        geometry.validate()?;
        let acquired: Vec<usize> = (0..echo.mask.len()).filter(|&i| echo.mask[i]).collect();
        let needed = acquired.len().saturating_mul(geometry.len());
        if needed > budget {
            return Err(Error::BudgetExceeded { needed, budget });
        }
        let samples: Vec<(usize, usize)> = acquired
            .iter()
            .map(|&i| (i / echo.cols, i % echo.cols))
            .collect();
        let matrix = observation_rows(
            config,
            geometry,
            &echo.azimuth_times,
            &echo.range_times,
            &samples,
        );
        Ok(SampledObservation {
            matrix,
            acquired,
            echo_len: echo.data.len(),
            cols: geometry.len(),
        })
    }

    pub fn acquired_len(&self) -> usize {
        self.acquired.len()
    }
}

impl LinearOperator for SampledObservation {
    fn domain_len(&self) -> usize {
        self.cols
    }
    fn range_len(&self) -> usize {
        self.echo_len
    }
    fn apply(&self, x: &[C64], out: &mut [C64]) {
        let mut packed = vec![C64::new(0.0, 0.0); self.acquired.len()];
        dense_apply(&self.matrix, self.cols, x, &mut packed);
        out.iter_mut().for_each(|o| *o = C64::new(0.0, 0.0));
        for (&i, v) in self.acquired.iter().zip(packed) {
            out[i] = v;
        }
    }
    fn apply_adjoint(&self, y: &[C64], out: &mut [C64]) {
        let packed: Vec<C64> = self.acquired.iter().map(|&i| y[i]).collect();
        dense_apply_adjoint(&self.matrix, self.cols, &packed, out);
    }
}

/// Raw echo samples: rows are pulses, columns full-rate range bins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EchoData {
    pub rows: usize,
    pub cols: usize,
    #[serde(skip)]
    pub data: Vec<C64>,
    pub azimuth_times: Vec<f64>,
    pub range_times: Vec<f64>,
    #[serde(skip)]
    pub mask: Vec<bool>,
    pub plan: Option<PlanDescriptor>,
    /// Noise variance per complex sample, zero when noiseless.
    pub noise_variance: f64,
    /// Measured signal-to-noise ratio over acquired samples, if noise was added.
    pub empirical_snr_db: Option<f64>,
}

impl EchoData {
    pub fn acquired(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    /// Fraction of full-rate range bins kept, averaged over pulses.
    pub fn range_ratio(&self) -> f64 {
        if self.rows == 0 {
            return 0.0;
        }
        self.acquired() as f64 / (self.rows * self.cols) as f64
    }

    pub fn validate(&self) -> Result<()> {
        check_len("echo data", self.rows * self.cols, self.data.len())?;
        check_len("echo mask", self.rows * self.cols, self.mask.len())?;
        check_len("azimuth times", self.rows, self.azimuth_times.len())?;
        check_len("range times", self.cols, self.range_times.len())?;
        if self
            .data
            .iter()
            .zip(&self.mask)
            .any(|(z, &m)| !m && *z != C64::new(0.0, 0.0))
        {
            return Err(Error::invalid("echo", "masked-out samples must be zero"));
        }
        Ok(())
    }
}

/// Noiseless echo of `scene` at the listed pulse times and range times,
/// evaluated only where `range_mask` is set.
fn superposition(
    config: &RadarConfig,
    scene: &SceneGrid,
    azimuth: &[f64],
    range: &[f64],
    range_mask: &[bool],
) -> Vec<C64> {
    let g = scene.geometry;
    let targets: Vec<(f64, f64, C64)> = scene
        .targets()
        .map(|(m, n, z)| (g.slant_range(n), azimuth_offset(config, &g, m), z))
        .collect();
    let cols = range.len();
    let mut data = vec![C64::new(0.0, 0.0); azimuth.len() * cols];
    let tau0 = range.first().copied().unwrap_or(0.0);
    let duration = config.waveform.duration();
    data.par_chunks_mut(cols.max(1))
        .zip(azimuth.par_iter())
        .for_each(|(row, &t)| {
            let pulse = config.pulse_index(t);
            for &(r0, offset, sigma) in &targets {
                let eta = t - offset;
                if !config.illuminates(eta) {
                    continue;
                }
                let r = instantaneous_range(r0, config.speed, eta);
                let delay = 2.0 * r / SPEED_OF_LIGHT;
                let amp = sigma * C64::from_polar(1.0, -4.0 * PI * config.carrier * r / SPEED_OF_LIGHT);
                // Only bins that can see the pulse; the support test in the
                // waveform settles the edges exactly.
                let first = (((delay - tau0) * config.sample_rate).floor() as i64 - 1).max(0) as usize;
                let last = (((delay + duration - tau0) * config.sample_rate).ceil() as i64 + 1)
                    .clamp(-1, cols as i64 - 1);
                if last < first as i64 {
                    continue;
                }
                for l in first..=last as usize {
                    if range_mask[l] {
                        row[l] += amp * config.waveform.sample_pulse(pulse, range[l] - delay);
                    }
                }
            }
        });
    data
}

/// Echo of `scene` acquired with `plan`, with optional complex white noise at
/// `snr_db` (mean signal power over acquired samples divided by noise variance).
pub fn simulate_echo(
    config: &RadarConfig,
    scene: &SceneGrid,
    plan: &SamplingPlan,
    snr_db: Option<f64>,
    seed: u64,
) -> Result<EchoData> {
    config.validate()?;
    check_len("plan range mask", config.range_samples, plan.range_mask.len())?;
    let range = range_grid(config, &scene.geometry);
    let rows = plan.azimuth_times.len();
    let cols = range.len();
    let mut data = superposition(config, scene, &plan.azimuth_times, &range, &plan.range_mask);
    let mask: Vec<bool> = (0..rows).flat_map(|_| plan.range_mask.iter().copied()).collect();

    let acquired = mask.iter().filter(|&&b| b).count();
    let mut noise_variance = 0.0;
    let mut empirical_snr_db = None;
    if let Some(snr) = snr_db {
        if snr.is_nan() || snr == f64::NEG_INFINITY {
            return Err(Error::invalid("snr_db", "must be finite or +inf"));
        }
        if snr.is_finite() && acquired > 0 {
            let signal: f64 = data.iter().map(|z| z.norm_sqr()).sum::<f64>();
            noise_variance = signal / acquired as f64 / 10f64.powf(snr / 10.0);
            let std = (noise_variance / 2.0).sqrt();
            let noise_energy: f64 = data
                .par_chunks_mut(cols.max(1))
                .zip(mask.par_chunks(cols.max(1)))
                .enumerate()
                .map(|(k, (row, row_mask))| {
                    let mut rng = rng::stream(seed, &[TAG_NOISE, k as u64]);
                    let mut energy = 0.0;
                    for (z, &m) in row.iter_mut().zip(row_mask) {
                        let re: f64 = StandardNormal.sample(&mut rng);
                        let im: f64 = StandardNormal.sample(&mut rng);
                        if m {
                            let n = C64::new(std * re, std * im);
                            energy += n.norm_sqr();
                            *z += n;
                        }
                    }
                    energy
                })
                .collect::<Vec<f64>>()
                .iter()
                .sum();
            if noise_energy > 0.0 && signal > 0.0 {
                empirical_snr_db = Some(10.0 * (signal / noise_energy).log10());
            }
        }
    }

    Ok(EchoData {
        rows,
        cols,
        data,
        azimuth_times: plan.azimuth_times.clone(),
        range_times: range,
        mask,
        plan: Some(plan.descriptor.clone()),
        noise_variance,
        empirical_snr_db,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::uniform_plan;
    use crate::scene::random_sparse_scene;

    fn small_config() -> RadarConfig {
        let mut c = preset("desk-small").unwrap().radar;
        c.pulses = 8;
        c.range_samples = 16;
        c
    }

    #[test]
    fn range_history() {
        assert_eq!(instantaneous_range(5000.0, 0.0, 7.0), 5000.0);
        assert_eq!(instantaneous_range(3000.0, 100.0, 0.0), 3000.0);
        assert!((instantaneous_range(3000.0, 100.0, 40.0) - 5000.0).abs() < 1e-9);
    }

    #[test]
    fn echo_support_and_phase_convention() {
        let mut c = small_config();
        c.speed = 0.0;
        let tp = c.waveform.duration();
        let r0 = 5000.0;
        assert_eq!(
            point_target_echo(&c, C64::new(0.0, 0.0), r0, 0.0, 0.1, 2.0 * r0 / SPEED_OF_LIGHT),
            C64::new(0.0, 0.0)
        );
        let outside = 2.0 * r0 / SPEED_OF_LIGHT + 2.0 * tp;
        assert_eq!(point_target_echo(&c, C64::new(1.0, 0.0), r0, 0.0, 0.0, outside), C64::new(0.0, 0.0));
        // Tune the carrier so the two-way phase is a whole number of turns.
        let turns = (2.0 * c.carrier * r0 / SPEED_OF_LIGHT).round();
        c.carrier = turns * SPEED_OF_LIGHT / (2.0 * r0);
        let z = point_target_echo(&c, C64::new(1.0, 0.0), r0, 0.0, 0.0, 2.0 * r0 / SPEED_OF_LIGHT + tp / 2.0);
        assert!((z - C64::new(1.0, 0.0)).norm() < 1e-6, "{z}");
    }

    #[test]
    fn one_cell_matrix_is_the_echo() {
        let c = small_config();
        let g = SceneGeometry::new(1, 1, 1.0, 1.0, 5000.0).unwrap();
        let timing = FullRateTiming {
            azimuth: vec![0.01],
            range: vec![2.0 * 5000.0 / SPEED_OF_LIGHT + 1e-8],
        };
        let h = build_dense_observation(&c, &g, &timing).unwrap();
        let direct = point_target_echo(&c, C64::new(1.0, 0.0), 5000.0, 0.0, 0.01, timing.range[0]);
        assert_eq!(h.matrix, vec![direct]);
        assert_ne!(direct, C64::new(0.0, 0.0));
    }

    #[test]
    fn budget_guard() {
        let c = small_config();
        let g = c.matched_geometry(4, 4).unwrap();
        let t = FullRateTiming::aligned(&c, &g);
        assert!(matches!(
            build_dense_observation_with_budget(&c, &g, &t, 100),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn stationary_platform_rows_identical() {
        let mut c = small_config();
        c.speed = 0.0;
        let g = SceneGeometry::new(3, 6, 1.0, 1.5, 4995.0).unwrap();
        let scene = random_sparse_scene(g, 5, (1.0, 2.0), 4).unwrap();
        let plan = uniform_plan(&c, 1.0, 1.0, 0).unwrap();
        let echo = simulate_echo(&c, &scene, &plan, None, 0).unwrap();
        let first = &echo.data[..echo.cols];
        assert!(first.iter().any(|z| z.norm() > 0.0));
        for row in echo.data.chunks(echo.cols) {
            assert_eq!(row, first);
        }
    }

    #[test]
    fn zero_scene_zero_echo() {
        let c = small_config();
        let g = c.matched_geometry(8, 8).unwrap();
        let scene = SceneGrid::zeros(g).unwrap();
        let plan = uniform_plan(&c, 1.0, 0.5, 0).unwrap();
        let echo = simulate_echo(&c, &scene, &plan, Some(30.0), 1).unwrap();
        assert!(echo.data.iter().all(|z| *z == C64::new(0.0, 0.0)));
        echo.validate().unwrap();
    }

    #[test]
    fn unknown_preset_is_rejected() {
        assert!(preset("x-band").is_err());
        for name in PRESET_NAMES {
            preset(name).unwrap().radar.validate().unwrap();
        }
    }
}
