//! Acquisition plans: which pulses are transmitted and which range bins are kept.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::radar::{azimuth_grid, EchoData, RadarConfig};
use crate::rng::{self, TAG_PLAN, TAG_RANGE_MASK};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    Uniform,
    Jittered,
}

/// Parameters a plan was generated from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanDescriptor {
    pub kind: SchemeKind,
    /// Azimuth under-sampling factor; mean pulse spacing is `1 / (alpha * prf)`.
    pub alpha: f64,
    /// Bound on the deviation of each interval from the mean spacing, seconds.
    pub jitter_half_width: f64,
    pub range_ratio: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplingPlan {
    /// Strictly increasing pulse times, seconds.
    pub azimuth_times: Vec<f64>,
    /// One flag per full-rate range bin, shared by all pulses.
    pub range_mask: Vec<bool>,
    pub descriptor: PlanDescriptor,
}

impl SamplingPlan {
    pub fn range_ratio(&self) -> f64 {
        self.range_mask.iter().filter(|&&b| b).count() as f64 / self.range_mask.len() as f64
    }

    pub fn intervals(&self) -> Vec<f64> {
        self.azimuth_times.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Sample mask on the full-rate `pulses x range_samples` grid, assigning
    /// each pulse to its nearest full-rate slot.
    pub fn grid_mask(&self, config: &RadarConfig) -> Vec<bool> {
        let grid = azimuth_grid(config);
        let cols = self.range_mask.len();
        let mut mask = vec![false; grid.len() * cols];
        if grid.is_empty() {
            return mask;
        }
        let t0 = grid[0];
        for &t in &self.azimuth_times {
            let k = ((t - t0) * config.prf).round();
            if k < 0.0 || k as usize >= grid.len() {
                continue;
            }
            let k = k as usize;
            mask[k * cols..(k + 1) * cols].copy_from_slice(&self.range_mask);
        }
        mask
    }
}

fn check_ratio(name: &'static str, r: f64) -> Result<()> {
    if r > 0.0 && r <= 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("{r} is outside (0, 1]")))
    }
}

/// Split an overall sampling ratio into azimuth and range parts, holding the
/// range ratio at `fixed_range` whenever the overall ratio allows it.
pub fn split_ratio(ratio: f64, fixed_range: f64) -> Result<(f64, f64)> {
    check_ratio("ratio", ratio)?;
    check_ratio("fixed_range_ratio", fixed_range)?;
    if ratio <= fixed_range {
        Ok((ratio / fixed_range, fixed_range))
    } else {
        Ok((1.0, ratio))
    }
}

/// Number of kept bins, `round(ratio * len)` with ties to even.
pub fn kept_count(len: usize, ratio: f64) -> usize {
    ((ratio * len as f64).round_ties_even() as usize).min(len)
}

/// Pulse times at spacing `1 / (alpha * prf)` covering the full-rate window.
fn regular_times(config: &RadarConfig, alpha: f64) -> Vec<f64> {
    let grid = azimuth_grid(config);
    let (first, last) = (grid[0], grid[grid.len() - 1]);
    let dt = 1.0 / (alpha * config.prf);
    let count = ((last - first) / dt + 1e-9).floor() as usize + 1;
    (0..count).map(|n| first + n as f64 * dt).collect()
}

/// Evenly spread deterministic range selection with the exact kept count.
fn strided_range_mask(len: usize, ratio: f64) -> Vec<bool> {
    let kept = kept_count(len, ratio);
    let mut mask = vec![false; len];
    for i in 0..kept {
        mask[i * len / kept] = true;
    }
    mask
}

pub fn uniform_plan(
    config: &RadarConfig,
    alpha: f64,
    range_ratio: f64,
    seed: u64,
) -> Result<SamplingPlan> {
    check_ratio("alpha", alpha)?;
    check_ratio("range_ratio", range_ratio)?;
    config.validate()?;
    Ok(SamplingPlan {
        azimuth_times: regular_times(config, alpha),
        range_mask: strided_range_mask(config.range_samples, range_ratio),
        descriptor: PlanDescriptor {
            kind: SchemeKind::Uniform,
            alpha,
            jitter_half_width: 0.0,
            range_ratio,
            seed,
        },
    })
}

/// Regular pulse train at `1 / (alpha * prf)` with each pulse displaced by
/// `U[-j_w/2, j_w/2]`, so consecutive intervals stay within `mean +- j_w`.
pub fn jittered_plan(
    config: &RadarConfig,
    alpha: f64,
    jitter_half_width: f64,
    range_ratio: f64,
    seed: u64,
) -> Result<SamplingPlan> {
    check_ratio("alpha", alpha)?;
    check_ratio("range_ratio", range_ratio)?;
    config.validate()?;
    let bound = 1.0 / (2.0 * alpha * config.prf);
    if !(jitter_half_width >= 0.0 && jitter_half_width < bound) {
        return Err(Error::invalid(
            "jitter_half_width",
            format!("{jitter_half_width} s must lie in [0, {bound}) to keep pulses ordered"),
        ));
    }
    let mut rng = rng::stream(seed, &[TAG_PLAN]);
    let mut times = regular_times(config, alpha);
    if jitter_half_width > 0.0 {
        let h = 0.5 * jitter_half_width;
        for t in &mut times {
            *t += rng.random_range(-h..=h);
        }
    }
    Ok(SamplingPlan {
        azimuth_times: times,
        range_mask: random_range_mask(config.range_samples, range_ratio, seed)?,
        descriptor: PlanDescriptor {
            kind: SchemeKind::Jittered,
            alpha,
            jitter_half_width,
            range_ratio,
            seed,
        },
    })
}

/// Exactly `round(ratio * len)` bins chosen uniformly without replacement.
pub fn random_range_mask(len: usize, ratio: f64, seed: u64) -> Result<Vec<bool>> {
    check_ratio("range_ratio", ratio)?;
    let kept = kept_count(len, ratio);
    let mut rng = rng::stream(seed, &[TAG_RANGE_MASK]);
    let mut mask = vec![false; len];
    for i in rand::seq::index::sample(&mut rng, len, kept) {
        mask[i] = true;
    }
    Ok(mask)
}

/// Keep only the samples of `full` selected by `plan`, zeroing and unmasking
/// the rest. Every plan pulse must coincide with a pulse of `full`.
pub fn resample_plan(full: &EchoData, plan: &SamplingPlan) -> Result<EchoData> {
    check_len("plan range mask", full.cols, plan.range_mask.len())?;
    let spacing = full
        .azimuth_times
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    let tol = if spacing.is_finite() { 1e-6 * spacing } else { 1e-12 };
    let mut selected = vec![false; full.rows];
    for &t in &plan.azimuth_times {
        let k = full
            .azimuth_times
            .partition_point(|&s| s < t - tol);
        if k >= full.rows || (full.azimuth_times[k] - t).abs() > tol {
            return Err(Error::NotSubset(format!("pulse at t = {t} s is not on the acquisition grid")));
        }
        selected[k] = true;
    }
    let mut out = full.clone();
    for (k, &pulse_kept) in selected.iter().enumerate() {
        for l in 0..full.cols {
            let i = k * full.cols + l;
            let keep = pulse_kept && plan.range_mask[l];
            if keep && !full.mask[i] {
                return Err(Error::NotSubset(format!("sample ({k}, {l}) was never acquired")));
            }
            out.mask[i] = keep;
            if !keep {
                out.data[i] = C64::new(0.0, 0.0);
            }
        }
    }
    out.plan = Some(plan.descriptor.clone());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radar::{preset, simulate_echo};
    use crate::scene::random_sparse_scene;
    use proptest::prelude::*;

    fn config(pulses: usize, prf: f64) -> RadarConfig {
        let mut c = preset("desk-small").unwrap().radar;
        c.pulses = pulses;
        c.prf = prf;
        c.range_samples = 100;
        c
    }

    #[test]
    fn uniform_spacing() {
        let c = config(64, 768.0);
        let p = uniform_plan(&c, 1.0, 1.0, 0).unwrap();
        assert_eq!(p.azimuth_times.len(), 64);
        for d in p.intervals() {
            assert!((d - 1.0 / 768.0).abs() < 1e-15);
        }
        assert!(p.range_mask.iter().all(|&b| b));
        let p = uniform_plan(&c, 0.5, 0.85, 0).unwrap();
        for d in p.intervals() {
            assert!((d - 2.0 / 768.0).abs() < 1e-15);
        }
        assert_eq!(p.range_mask.iter().filter(|&&b| b).count(), 85);
        assert!(uniform_plan(&c, 1.5, 1.0, 0).is_err());
        assert!(uniform_plan(&c, 0.5, 0.0, 0).is_err());
    }

    #[test]
    fn zero_jitter_matches_uniform() {
        let c = config(50, 768.0);
        let j = jittered_plan(&c, 0.7, 0.0, 1.0, 9).unwrap();
        let u = uniform_plan(&c, 0.7, 1.0, 9).unwrap();
        assert_eq!(j.azimuth_times, u.azimuth_times);
        assert!(jittered_plan(&c, 0.7, 1.0 / (2.0 * 0.7 * 768.0), 1.0, 9).is_err());
    }

    #[test]
    fn range_mask_counts() {
        assert!(random_range_mask(37, 1.0, 3).unwrap().iter().all(|&b| b));
        let m = random_range_mask(100, 0.85, 3).unwrap();
        assert_eq!(m.iter().filter(|&&b| b).count(), 85);
        assert_eq!(m, random_range_mask(100, 0.85, 3).unwrap());
        assert_ne!(m, random_range_mask(100, 0.85, 4).unwrap());
        // 2.5 rounds to 2, 3.5 to 4
        assert_eq!(kept_count(10, 0.25), 2);
        assert_eq!(kept_count(10, 0.35), 4);
    }

    #[test]
    fn interval_histogram_is_triangular() {
        // Difference of two independent U[-h, h] offsets has a triangular
        // density on [-2h, 2h]; compare bin masses with the closed form.
        let prf = 768.0;
        let alpha = 0.7;
        let jw = 0.3 / prf;
        let c = config(150_000, prf);
        let p = jittered_plan(&c, alpha, jw, 1.0, 21).unwrap();
        let mean = 1.0 / (alpha * prf);
        let d: Vec<f64> = p.intervals().iter().map(|x| (x - mean) / jw).collect();
        assert!(d.len() >= 100_000);
        let bins = 10;
        let mut hist = vec![0usize; bins];
        for x in &d {
            let b = (((x + 1.0) / 2.0) * bins as f64).floor() as usize;
            hist[b.min(bins - 1)] += 1;
        }
        let cdf = |u: f64| {
            if u <= 0.0 {
                (1.0 + u).powi(2) / 2.0
            } else {
                1.0 - (1.0 - u).powi(2) / 2.0
            }
        };
        for (b, &count) in hist.iter().enumerate() {
            let lo = -1.0 + 2.0 * b as f64 / bins as f64;
            let hi = lo + 2.0 / bins as f64;
            let expected = (cdf(hi) - cdf(lo)) * d.len() as f64;
            let sd = expected.sqrt();
            assert!(
                (count as f64 - expected).abs() < 5.0 * sd,
                "bin {b}: {count} vs {expected}"
            );
        }
    }

    #[test]
    fn resample_semantics() {
        let c = {
            let mut c = preset("desk-small").unwrap().radar;
            c.pulses = 12;
            c.range_samples = 20;
            c
        };
        let g = c.matched_geometry(12, 12).unwrap();
        let scene = random_sparse_scene(g, 10, (1.0, 2.0), 2).unwrap();
        let full_plan = uniform_plan(&c, 1.0, 1.0, 0).unwrap();
        let full = simulate_echo(&c, &scene, &full_plan, None, 0).unwrap();
        assert_eq!(resample_plan(&full, &full_plan).unwrap(), full);

        let sub = SamplingPlan {
            azimuth_times: full.azimuth_times.iter().step_by(2).copied().collect(),
            range_mask: random_range_mask(20, 0.7, 1).unwrap(),
            descriptor: full_plan.descriptor.clone(),
        };
        let out = resample_plan(&full, &sub).unwrap();
        out.validate().unwrap();
        for i in 0..out.data.len() {
            if out.mask[i] {
                assert_eq!(out.data[i], full.data[i]);
            } else {
                assert_eq!(out.data[i], C64::new(0.0, 0.0));
            }
        }

        let empty = SamplingPlan {
            azimuth_times: vec![],
            range_mask: vec![true; 20],
            descriptor: full_plan.descriptor.clone(),
        };
        let out = resample_plan(&full, &empty).unwrap();
        assert!(out.mask.iter().all(|&b| !b));
        assert!(out.data.iter().all(|z| *z == C64::new(0.0, 0.0)));

        let off_grid = SamplingPlan {
            azimuth_times: vec![full.azimuth_times[3] + 0.3 / c.prf],
            ..empty
        };
        assert!(matches!(resample_plan(&full, &off_grid), Err(Error::NotSubset(_))));
    }

    proptest! {
        #[test]
        fn jittered_intervals_within_bound(alpha in 0.2f64..=1.0, frac in 0.0f64..0.999, seed in any::<u64>()) {
            let c = config(400, 500.0);
            let mean = 1.0 / (alpha * c.prf);
            let jw = frac / (2.0 * alpha * c.prf);
            let p = jittered_plan(&c, alpha, jw, 0.5, seed).unwrap();
            for d in p.intervals() {
                prop_assert!(d > 0.0);
                prop_assert!(d >= mean - jw - 1e-12 && d <= mean + jw + 1e-12);
            }
            let count = p.range_mask.iter().filter(|&&b| b).count();
            prop_assert!((count as f64 - 0.5 * c.range_samples as f64).abs() <= 1.0);
        }

        #[test]
        fn plans_are_deterministic(alpha in 0.3f64..=1.0, seed in any::<u64>()) {
            let c = config(64, 300.0);
            let jw = 0.4 / (2.0 * alpha * c.prf);
            prop_assert_eq!(jittered_plan(&c, alpha, jw, 0.8, seed).unwrap(), jittered_plan(&c, alpha, jw, 0.8, seed).unwrap());
        }
    }
}
