#![allow(dead_code)]

use std::f64::consts::PI;

use sparse_sar::radar::{preset, RadarConfig};
use sparse_sar::sampling::{uniform_plan, SamplingPlan};
use sparse_sar::scene::{SceneGeometry, SceneGrid};
use sparse_sar::waveform::Waveform;
use sparse_sar::C64;

pub const C: f64 = 299_792_458.0;

/// desk-small radar with its data window resized and a matched scene.
pub fn small(pulses: usize, bins: usize, rows: usize, cols: usize) -> (RadarConfig, SceneGeometry) {
    let mut c = preset("desk-small").unwrap().radar;
    c.pulses = pulses;
    c.range_samples = bins;
    let g = c.matched_geometry(rows, cols).unwrap();
    (c, g)
}

/// Long-pulse geometry with sub-cell range migration.
pub fn low_curvature(pulses: usize, bins: usize, rows: usize, cols: usize) -> (RadarConfig, SceneGeometry) {
    let mut c = preset("desk").unwrap().radar;
    c.pulses = pulses;
    c.range_samples = bins;
    let g = c.matched_geometry(rows, cols).unwrap();
    (c, g)
}

pub fn full_plan(c: &RadarConfig) -> SamplingPlan {
    uniform_plan(c, 1.0, 1.0, 0).unwrap()
}

pub fn one_hot(g: &SceneGeometry, m: usize, n: usize) -> Vec<C64> {
    let mut x = vec![C64::new(0.0, 0.0); g.len()];
    x[g.index(m, n)] = C64::new(1.0, 0.0);
    x
}

pub fn relative_l2(a: &[C64], b: &[C64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    (num / den).sqrt()
}

pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Closed-form echo of every target of `scene` on the full-rate grid,
/// written out from the model definition without touching the crate's
/// timing or waveform code.
pub fn oracle_echo(c: &RadarConfig, scene: &SceneGrid) -> Vec<C64> {
    let (bandwidth, duration) = match c.waveform {
        Waveform::Chirp(w) => (w.bandwidth, w.duration),
        _ => panic!("oracle handles chirps only"),
    };
    let rate = bandwidth / duration;
    let g = scene.geometry;
    let center = g.origin_range + (g.cols as f64 - 1.0) / 2.0 * g.cell_range;
    let (k_len, l_len) = (c.pulses, c.range_samples);
    let mut y = vec![C64::new(0.0, 0.0); k_len * l_len];
    for k in 0..k_len {
        let t = (k as f64 - (k_len as f64 - 1.0) / 2.0) / c.prf;
        for l in 0..l_len {
            let tau = 2.0 * center / C + duration / 2.0 + (l as f64 - (l_len as f64 - 1.0) / 2.0) / c.sample_rate;
            let mut acc = C64::new(0.0, 0.0);
            for m in 0..g.rows {
                let along = (m as f64 - (g.rows as f64 - 1.0) / 2.0) * g.cell_azimuth;
                for n in 0..g.cols {
                    let sigma = scene.reflectivity[m * g.cols + n];
                    if sigma == C64::new(0.0, 0.0) {
                        continue;
                    }
                    let eta = t - along / c.speed;
                    if eta.abs() > c.aperture_time / 2.0 * (1.0 + 1e-9) {
                        continue;
                    }
                    let r0 = g.origin_range + n as f64 * g.cell_range;
                    let r = (r0 * r0 + c.speed * c.speed * eta * eta).sqrt();
                    let u = tau - 2.0 * r / C;
                    if u < -1e-9 * duration || u >= duration * (1.0 - 1e-9) {
                        continue;
                    }
                    let v = u - duration / 2.0;
                    acc += sigma * C64::from_polar(1.0, -4.0 * PI * c.carrier * r / C + PI * rate * v * v);
                }
            }
            y[k * l_len + l] = acc;
        }
    }
    y
}
