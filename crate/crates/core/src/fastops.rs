//! FFT-based observation operators built from chirp-scaling phase functions,
//! and a range-Doppler matched-filter imager.
//!
//! The imaging chain on a zero-padded grid is
//! azimuth FFT, scaling phase, range FFT, bulk phase, range IFFT, azimuth
//! phase, azimuth IFFT. The observation operator is its conjugate transpose
//! followed by the sampling mask, so forward and adjoint are exact adjoints of
//! each other whatever the approximation quality of the imaging chain.

use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{check_len, Error, Result};
use crate::radar::{azimuth_grid, azimuth_offset, instantaneous_range, point_target_echo, range_grid, EchoData, RadarConfig, SPEED_OF_LIGHT};
use crate::recon::LinearOperator;
use crate::scene::SceneGeometry;
use crate::waveform::Waveform;
use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);

/// Smallest `2^a 3^b 5^c` not below `n`.
pub fn fft_friendly_len(n: usize) -> usize {
    let mut m = n.max(1);
    loop {
        let mut r = m;
        for p in [2, 3, 5] {
            while r % p == 0 {
                r /= p;
            }
        }
        if r == 1 {
            return m;
        }
        m += 1;
    }
}

/// Signed frequency of DFT bin `i` out of `n` at sample rate `fs`.
fn bin_frequency(i: usize, n: usize, fs: f64) -> f64 {
    let s = if i < n.div_ceil(2) { i as f64 } else { i as f64 - n as f64 };
    s * fs / n as f64
}

struct Plans {
    az_fwd: Arc<dyn Fft<f64>>,
    az_inv: Arc<dyn Fft<f64>>,
    rg_fwd: Arc<dyn Fft<f64>>,
    rg_inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Plans {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("Plans")
    }
}

/// Padded working grid: `kp` azimuth rows by `lp` range columns.
#[derive(Debug)]
struct Grid {
    config: RadarConfig,
    geometry: SceneGeometry,
    pulses: usize,
    bins: usize,
    kp: usize,
    lp: usize,
    /// Padded position of data sample (0, 0).
    data_row: usize,
    data_col: usize,
    /// Padded position of scene cell (0, 0).
    scene_row: usize,
    scene_col: usize,
    /// Pulse time minus broadside time when data row and scene row coincide
    /// on the padded grid.
    az_shift: f64,
    /// Range time minus two-way delay when data column and scene column
    /// coincide on the padded grid.
    rg_shift: f64,
    plans: Plans,
}

impl Grid {
    fn new(config: &RadarConfig, geometry: &SceneGeometry) -> Result<Self> {
        config.validate()?;
        geometry.validate()?;
        if config.speed <= 0.0 {
            return Err(Error::invalid("speed", "the fast operator needs a moving platform"));
        }
        let (k, l) = (config.pulses, config.range_samples);
        let (m, n) = (geometry.rows, geometry.cols);
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * b.abs();
        if !close(geometry.cell_azimuth, config.speed / config.prf)
            || !close(geometry.cell_range, SPEED_OF_LIGHT / (2.0 * config.sample_rate))
        {
            return Err(Error::invalid(
                "scene",
                "cells must match the full-rate grid (v / prf in azimuth, c / (2 fs) in range)",
            ));
        }
        let aperture = (config.aperture_time * config.prf).ceil() as usize;
        let pulse = (config.waveform.duration() * config.sample_rate).ceil() as usize;
        let r_max = geometry.slant_range(n - 1);
        let d_min = doppler_factor(config, 0.5 * config.prf.min(doppler_bandwidth(config, geometry.origin_range)));
        let migration = (2.0 * r_max * (1.0 / d_min - 1.0) / SPEED_OF_LIGHT * config.sample_rate).ceil() as usize;
        let kp = fft_friendly_len(k + (1.25 * aperture as f64).ceil() as usize);
        let lp = fft_friendly_len(l + pulse + 2 * migration + 2);
        let data_row = (kp - k) / 2;
        let data_col = (lp - l) / 2;

        // Place scene cells on the padded grid at the nearest sample to their
        // broadside time and pulse center; the fractional remainders go into
        // the range kernel and the azimuth histories.
        let t = azimuth_grid(config);
        let tau = range_grid(config, geometry);
        let broadside = azimuth_offset(config, geometry, 0);
        let delay = 2.0 * geometry.origin_range / SPEED_OF_LIGHT;
        let row_off = ((broadside - t[0]) * config.prf).round();
        let col_off = ((delay + 0.5 * config.waveform.duration() - tau[0]) * config.sample_rate).round();
        if row_off < 0.0 || col_off < 0.0 || row_off as usize + m > k || col_off as usize + n > l {
            return Err(Error::invalid(
                "scene",
                format!("a {m}x{n} scene must lie inside the {k}x{l} data window"),
            ));
        }
        let scene_row = data_row + row_off as usize;
        let scene_col = data_col + col_off as usize;
        let az_shift = t[0] + row_off / config.prf - broadside;
        let rg_shift = tau[0] + col_off / config.sample_rate - delay;
        let mut planner = FftPlanner::new();
        Ok(Grid {
            config: *config,
            geometry: *geometry,
            pulses: k,
            bins: l,
            kp,
            lp,
            data_row,
            data_col,
            scene_row,
            scene_col,
            az_shift,
            rg_shift,
            plans: Plans {
                az_fwd: planner.plan_fft_forward(kp),
                az_inv: planner.plan_fft_inverse(kp),
                rg_fwd: planner.plan_fft_forward(lp),
                rg_inv: planner.plan_fft_inverse(lp),
            },
        })
    }

    /// Two-way delay of the range whose focused response sits in padded
    /// column `j`.
    fn tau(&self, j: usize) -> f64 {
        2.0 * self.geometry.origin_range / SPEED_OF_LIGHT
            + (j as f64 - self.scene_col as f64) / self.config.sample_rate
    }

    /// Transmitted pulse as seen `i` columns after a target's own column
    /// (signed, circular), so column 0 holds the target's sample nearest the
    /// pulse center.
    fn range_kernel(&self) -> Vec<C64> {
        (0..self.lp)
            .map(|j| {
                let i = bin_frequency(j, self.lp, self.lp as f64);
                self.config
                    .waveform
                    .sample_pulse(0, i / self.config.sample_rate + self.rg_shift)
            })
            .collect()
    }

    fn az_freq(&self, i: usize) -> f64 {
        bin_frequency(i, self.kp, self.config.prf)
    }

    fn rg_freq(&self, j: usize) -> f64 {
        bin_frequency(j, self.lp, self.config.sample_rate)
    }

    fn zeros(&self) -> Vec<C64> {
        vec![ZERO; self.kp * self.lp]
    }

    fn embed_data(&self, y: &[C64], mask: Option<&[bool]>, buf: &mut [C64]) {
        for k in 0..self.pulses {
            let dst = (self.data_row + k) * self.lp + self.data_col;
            let src = k * self.bins;
            for l in 0..self.bins {
                let keep = mask.map_or(true, |m| m[src + l]);
                buf[dst + l] = if keep { y[src + l] } else { ZERO };
            }
        }
    }

    fn crop_data(&self, buf: &[C64], scale: C64, mask: Option<&[bool]>, out: &mut [C64]) {
        for k in 0..self.pulses {
            let src = (self.data_row + k) * self.lp + self.data_col;
            let dst = k * self.bins;
            for l in 0..self.bins {
                let keep = mask.map_or(true, |m| m[dst + l]);
                out[dst + l] = if keep { buf[src + l] * scale } else { ZERO };
            }
        }
    }

    fn embed_scene(&self, x: &[C64], buf: &mut [C64]) {
        let g = &self.geometry;
        for m in 0..g.rows {
            let dst = (self.scene_row + m) * self.lp + self.scene_col;
            buf[dst..dst + g.cols].copy_from_slice(&x[m * g.cols..(m + 1) * g.cols]);
        }
    }

    fn crop_scene(&self, buf: &[C64], scale: C64, out: &mut [C64]) {
        let g = &self.geometry;
        for m in 0..g.rows {
            let src = (self.scene_row + m) * self.lp + self.scene_col;
            for n in 0..g.cols {
                out[m * g.cols + n] = buf[src + n] * scale;
            }
        }
    }

    fn range_fft(&self, buf: &mut [C64], inverse: bool) {
        let fft = if inverse { &self.plans.rg_inv } else { &self.plans.rg_fwd };
        fft_rows(buf, self.lp, fft);
    }

    fn azimuth_fft(&self, buf: &mut [C64], inverse: bool) {
        let fft = if inverse { &self.plans.az_inv } else { &self.plans.az_fwd };
        let mut t = vec![ZERO; buf.len()];
        transpose(buf, self.kp, self.lp, &mut t);
        fft_rows(&mut t, self.kp, fft);
        transpose(&t, self.lp, self.kp, buf);
    }
}

fn fft_rows(buf: &mut [C64], width: usize, fft: &Arc<dyn Fft<f64>>) {
    let scratch_len = fft.get_inplace_scratch_len();
    buf.par_chunks_mut(width).for_each_init(
        || vec![ZERO; scratch_len],
        |scratch, row| fft.process_with_scratch(row, scratch),
    );
}

fn transpose(src: &[C64], rows: usize, cols: usize, dst: &mut [C64]) {
    const B: usize = 32;
    for r0 in (0..rows).step_by(B) {
        for c0 in (0..cols).step_by(B) {
            for r in r0..(r0 + B).min(rows) {
                for c in c0..(c0 + B).min(cols) {
                    dst[c * rows + r] = src[r * cols + c];
                }
            }
        }
    }
}

fn multiply(buf: &mut [C64], phase: &[C64], conjugate: bool) {
    buf.par_iter_mut().zip(phase.par_iter()).for_each(|(b, p)| {
        *b *= if conjugate { p.conj() } else { *p };
    });
}

/// Range-cell-migration factor `sqrt(1 - (lambda f / 2v)^2)`.
fn doppler_factor(config: &RadarConfig, f_eta: f64) -> f64 {
    let s = config.wavelength() * f_eta / (2.0 * config.speed);
    (1.0 - s * s).max(1e-6).sqrt()
}

/// Doppler bandwidth swept by a target at range `r0` over the aperture.
fn doppler_bandwidth(config: &RadarConfig, r0: f64) -> f64 {
    config.doppler_rate(r0) * config.aperture_time
}

fn chirp_rate(config: &RadarConfig) -> f64 {
    let w = config.waveform;
    w.bandwidth() / w.duration()
}

/// Echo of a unit target at scene cell `(m, n)` on the full-rate grid.
fn unit_echo(config: &RadarConfig, geometry: &SceneGeometry, m: usize, n: usize) -> Vec<C64> {
    let t = azimuth_grid(config);
    let tau = range_grid(config, geometry);
    let offset = geometry.azimuth_position(m) / config.speed;
    let r0 = geometry.slant_range(n);
    t.iter()
        .flat_map(|&tk| {
            tau.iter()
                .map(move |&tl| point_target_echo(config, C64::new(1.0, 0.0), r0, offset, tk, tl))
        })
        .collect()
}

fn modified_rate(config: &RadarConfig, kr: f64, f_eta: f64, d: f64) -> f64 {
    let (c, v, fc) = (SPEED_OF_LIGHT, config.speed, config.carrier);
    kr / (1.0 - kr * c * config.reference_range * f_eta * f_eta / (2.0 * v * v * fc.powi(3) * d.powi(3)))
}

/// Conjugated ratio of the exact sampled pulse spectrum to its
/// stationary-phase form `exp(-j pi f^2 / kr)`, on the padded range bins,
/// scaled to unit RMS.
///
/// Folding it into the bulk filter makes a target's range response the true
/// time-limited chirp instead of an ideal flat band.
fn pulse_correction(grid: &Grid, kr: f64) -> Vec<C64> {
    let mut spectrum = grid.range_kernel();
    let taps = spectrum.iter().filter(|z| **z != ZERO).count().max(1) as f64;
    grid.plans.rg_fwd.process(&mut spectrum);
    // |spectrum|^2 averages `taps` over the padded bins; normalize to unit RMS
    let norm = 1.0 / taps.sqrt();
    spectrum
        .iter()
        .enumerate()
        .map(|(j, z)| {
            let f = grid.rg_freq(j);
            (z * C64::from_polar(norm, PI * f * f / kr)).conj()
        })
        .collect()
}

/// Azimuth matched filters on (azimuth frequency, range time).
///
/// Each range column gets the conjugated DFT of the exact sampled azimuth
/// phase history at its range, so the aperture window and any Doppler
/// aliasing are modeled rather than approximated by stationary phase. The
/// chirp-scaling residual phase is folded in.
fn azimuth_filters(grid: &Grid, kr: f64) -> Vec<C64> {
    let config = &grid.config;
    let (kp, lp) = (grid.kp, grid.lp);
    let c = SPEED_OF_LIGHT;
    let r_ref = config.reference_range;
    let fft = &grid.plans.az_fwd;
    let mut columns = vec![ZERO; kp * lp];
    columns.par_chunks_mut(kp).enumerate().for_each(|(j, col)| {
        let r0 = 0.5 * c * grid.tau(j);
        let mut taps = 0usize;
        for (i, z) in col.iter_mut().enumerate() {
            let eta = bin_frequency(i, kp, kp as f64) / config.prf + grid.az_shift;
            if config.illuminates(eta) {
                let r = instantaneous_range(r0, config.speed, eta);
                *z = C64::from_polar(1.0, -4.0 * PI * config.carrier * r / c);
                taps += 1;
            }
        }
        fft.process(col);
        let norm = 1.0 / (taps.max(1) as f64).sqrt();
        for (i, z) in col.iter_mut().enumerate() {
            let f_eta = grid.az_freq(i);
            let d = doppler_factor(config, f_eta);
            let km = modified_rate(config, kr, f_eta, d);
            let residual = 4.0 * PI * km / (c * c) * (1.0 - d) * (r0 - r_ref).powi(2) / (d * d);
            *z = z.conj() * norm * C64::from_polar(1.0, -residual);
        }
    });
    let mut out = vec![ZERO; kp * lp];
    transpose(&columns, lp, kp, &mut out);
    out
}

/// Chirp-scaling observation operator with a sampling mask.
#[derive(Debug, Clone)]
pub struct DecoupledOperator {
    grid: Arc<Grid>,
    /// Scaling phase on (azimuth frequency, range time).
    scaling: Arc<Vec<C64>>,
    /// Bulk range compression and migration phase on (azimuth frequency,
    /// range frequency), zero outside the range band.
    bulk: Arc<Vec<C64>>,
    /// Azimuth compression and residual phase on (azimuth frequency, range
    /// time), zero outside the Doppler band.
    azimuth: Arc<Vec<C64>>,
    mask: Arc<Vec<bool>>,
    /// Complex calibration gain times the FFT normalization.
    gain: C64,
}

impl DecoupledOperator {
    /// Operator for a scene on `geometry` observed on the full-rate grid of
    /// `config`, restricted to `mask` (`pulses x range_samples`, row-major).
    pub fn new(config: &RadarConfig, geometry: &SceneGeometry, mask: Vec<bool>) -> Result<Self> {
        let grid = Grid::new(config, geometry)?;
        check_len("operator mask", grid.pulses * grid.bins, mask.len())?;
        if !matches!(config.waveform, Waveform::Chirp(_)) {
            return Err(Error::invalid("waveform", "the fast operator needs a chirp waveform"));
        }
        let c = SPEED_OF_LIGHT;
        let (kp, lp) = (grid.kp, grid.lp);
        let kr = chirp_rate(config);
        let r_ref = config.reference_range;

        let pulse_fix = pulse_correction(&grid, kr);
        let mut scaling = vec![ZERO; kp * lp];
        let mut bulk = vec![ZERO; kp * lp];
        for i in 0..kp {
            let f_eta = grid.az_freq(i);
            let d = doppler_factor(config, f_eta);
            let km = modified_rate(config, kr, f_eta, d);
            for j in 0..lp {
                let tau = grid.tau(j);
                let u = tau - 2.0 * r_ref / (c * d);
                scaling[i * lp + j] = C64::from_polar(1.0, PI * km * (1.0 / d - 1.0) * u * u);

                let f_tau = grid.rg_freq(j);
                let phase = PI * d * f_tau * f_tau / km
                    + 2.0 * PI * f_tau * 2.0 * r_ref * (1.0 / d - 1.0) / c;
                bulk[i * lp + j] = C64::from_polar(1.0, phase) * pulse_fix[j];
            }
        }
        let azimuth = azimuth_filters(&grid, kr);
        let mut op = DecoupledOperator {
            grid: Arc::new(grid),
            scaling: Arc::new(scaling),
            bulk: Arc::new(bulk),
            azimuth: Arc::new(azimuth),
            mask: Arc::new(vec![true; config.pulses * config.range_samples]),
            gain: C64::new(1.0 / (kp * lp) as f64, 0.0),
        };
        op.calibrate();
        op.mask = Arc::new(mask);
        Ok(op)
    }

    /// Fit the complex gain so that a centered unit target reproduces the exact echo.
    fn calibrate(&mut self) {
        let g = &self.grid.geometry;
        let (m, n) = (g.rows / 2, g.cols / 2);
        let mut x = vec![ZERO; g.len()];
        x[g.index(m, n)] = C64::new(1.0, 0.0);
        let model = self.forward(&x);
        let exact = unit_echo(&self.grid.config, g, m, n);
        let num: C64 = model.iter().zip(&exact).map(|(a, b)| a.conj() * b).sum();
        let den: f64 = model.iter().map(|a| a.norm_sqr()).sum();
        if den > 0.0 {
            self.gain *= num / den;
        }
    }

    /// Same operator with another sampling mask.
    pub fn with_mask(&self, mask: Vec<bool>) -> Result<Self> {
        check_len("operator mask", self.mask.len(), mask.len())?;
        Ok(DecoupledOperator {
            mask: Arc::new(mask),
            ..self.clone()
        })
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    /// Padded working grid size `(azimuth, range)`.
    pub fn padded_shape(&self) -> (usize, usize) {
        (self.grid.kp, self.grid.lp)
    }

    /// Scaling, bulk and azimuth phase arrays; entries outside the band
    /// windows are zero.
    pub fn phase_functions(&self) -> [&[C64]; 3] {
        [&self.scaling, &self.bulk, &self.azimuth]
    }

    /// Imaging chain on the padded grid, or its conjugate transpose.
    fn chain(&self, buf: &mut [C64], imaging: bool) {
        let g = &self.grid;
        if imaging {
            g.azimuth_fft(buf, false);
            multiply(buf, &self.scaling, false);
            g.range_fft(buf, false);
            multiply(buf, &self.bulk, false);
            g.range_fft(buf, true);
            multiply(buf, &self.azimuth, false);
            g.azimuth_fft(buf, true);
        } else {
            g.azimuth_fft(buf, false);
            multiply(buf, &self.azimuth, true);
            g.range_fft(buf, false);
            multiply(buf, &self.bulk, true);
            g.range_fft(buf, true);
            multiply(buf, &self.scaling, true);
            g.azimuth_fft(buf, true);
        }
    }
}

impl LinearOperator for DecoupledOperator {
    fn domain_len(&self) -> usize {
        self.grid.geometry.len()
    }
    fn range_len(&self) -> usize {
        self.grid.pulses * self.grid.bins
    }
    fn apply(&self, x: &[C64], out: &mut [C64]) {
        let mut buf = self.grid.zeros();
        self.grid.embed_scene(x, &mut buf);
        self.chain(&mut buf, false);
        self.grid.crop_data(&buf, self.gain, Some(&self.mask), out);
    }
    fn apply_adjoint(&self, y: &[C64], out: &mut [C64]) {
        let mut buf = self.grid.zeros();
        self.grid.embed_data(y, Some(&self.mask), &mut buf);
        self.chain(&mut buf, true);
        self.grid.crop_scene(&buf, self.gain.conj(), out);
    }
}

pub fn fast_forward(op: &DecoupledOperator, x: &[C64]) -> Result<Vec<C64>> {
    check_len("fast forward input", op.domain_len(), x.len())?;
    Ok(op.forward(x))
}

pub fn fast_adjoint(op: &DecoupledOperator, y: &[C64]) -> Result<Vec<C64>> {
    check_len("fast adjoint input", op.range_len(), y.len())?;
    Ok(op.adjoint(y))
}

/// Range-Doppler image of full-rate uniform data on the scene grid.
///
/// Range compression by the replica matched filter, bulk migration
/// correction at the scene-center range by a range-frequency linear phase,
/// then azimuth compression. Calibrated so a unit target images to 1.
pub fn rda_focus(echo: &EchoData, config: &RadarConfig, geometry: &SceneGeometry) -> Result<Vec<C64>> {
    let grid = Grid::new(config, geometry)?;
    let chirp = match config.waveform {
        Waveform::Chirp(w) => w,
        Waveform::Random(_) => {
            return Err(Error::invalid("waveform", "range-Doppler focusing needs a chirp waveform"))
        }
    };
    echo.validate()?;
    if echo.rows != config.pulses || echo.cols != config.range_samples {
        return Err(Error::NotFullRate(format!(
            "echo is {}x{}, grid is {}x{}",
            echo.rows, echo.cols, config.pulses, config.range_samples
        )));
    }
    if echo.mask.iter().any(|&b| !b) {
        return Err(Error::NotFullRate("echo has unacquired samples".into()));
    }
    let expected = azimuth_grid(config);
    let tol = 1e-6 / config.prf;
    if echo.azimuth_times.iter().zip(&expected).any(|(a, b)| (a - b).abs() > tol) {
        return Err(Error::NotFullRate("pulse times are not the uniform full-rate grid".into()));
    }

    let (kp, lp) = (grid.kp, grid.lp);
    let c = SPEED_OF_LIGHT;
    let mut replica = grid.range_kernel();
    grid.plans.rg_fwd.process(&mut replica);
    let band = 0.5 * chirp.bandwidth;
    let matched: Vec<C64> = replica
        .iter()
        .enumerate()
        .map(|(j, z)| if grid.rg_freq(j).abs() <= band { z.conj() } else { ZERO })
        .collect();
    let r_center = geometry.center_range();
    let band_doppler = 0.5 * doppler_bandwidth(config, geometry.origin_range);
    let mut rcmc = vec![ZERO; kp * lp];
    let mut compress = vec![ZERO; kp * lp];
    for i in 0..kp {
        let f_eta = grid.az_freq(i);
        let d = doppler_factor(config, f_eta);
        for j in 0..lp {
            let f_tau = grid.rg_freq(j);
            rcmc[i * lp + j] =
                matched[j] * C64::from_polar(1.0, 2.0 * PI * f_tau * 2.0 * r_center * (1.0 / d - 1.0) / c);
            if f_eta.abs() <= band_doppler {
                let r0 = 0.5 * c * grid.tau(j);
                compress[i * lp + j] = C64::from_polar(1.0, 4.0 * PI * r0 * config.carrier * d / c);
            }
        }
    }

    let focus = |data: &[C64]| -> Vec<C64> {
        let mut buf = grid.zeros();
        grid.embed_data(data, None, &mut buf);
        grid.azimuth_fft(&mut buf, false);
        // matched filter and migration correction share one range round trip
        grid.range_fft(&mut buf, false);
        multiply(&mut buf, &rcmc, false);
        grid.range_fft(&mut buf, true);
        multiply(&mut buf, &compress, false);
        grid.azimuth_fft(&mut buf, true);
        let mut out = vec![ZERO; geometry.len()];
        grid.crop_scene(&buf, C64::new(1.0, 0.0), &mut out);
        out
    };

    let (mc, nc) = (geometry.rows / 2, geometry.cols / 2);
    let reference = focus(&unit_echo(config, geometry, mc, nc))[geometry.index(mc, nc)];
    if reference.norm() == 0.0 {
        return Err(Error::invalid("config", "unit target does not focus on this grid"));
    }
    let scale = reference.inv();
    Ok(focus(&echo.data).into_iter().map(|z| z * scale).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn friendly_lengths() {
        assert_eq!(fft_friendly_len(1), 1);
        assert_eq!(fft_friendly_len(7), 8);
        assert_eq!(fft_friendly_len(97), 100);
        assert_eq!(fft_friendly_len(128), 128);
        assert_eq!(fft_friendly_len(161), 162);
    }

    #[test]
    fn signed_bins() {
        assert_eq!(bin_frequency(0, 4, 4.0), 0.0);
        assert_eq!(bin_frequency(1, 4, 4.0), 1.0);
        assert_eq!(bin_frequency(2, 4, 4.0), -2.0);
        assert_eq!(bin_frequency(3, 4, 4.0), -1.0);
        assert_eq!(bin_frequency(2, 5, 5.0), 2.0);
        assert_eq!(bin_frequency(3, 5, 5.0), -2.0);
    }

    #[test]
    fn transpose_round_trip() {
        let src: Vec<C64> = (0..35).map(|i| C64::new(i as f64, -(i as f64))).collect();
        let mut t = vec![ZERO; 35];
        let mut back = vec![ZERO; 35];
        transpose(&src, 5, 7, &mut t);
        // element (row 0, col 1) of the 5x7 source lands at (row 1, col 0)
        assert_eq!(t[5], src[1]);
        transpose(&t, 7, 5, &mut back);
        assert_eq!(back, src);
    }
}
