//! Recovery metrics, phase-transition diagrams and two-target distinguishing tests.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::experiment::{reconstruct, Experiment, SolverSpec, SweepPoint};
use crate::fastops::rda_focus;
use crate::radar::{simulate_echo, RadarConfig};
use crate::rng::derive_seed;
use crate::sampling::uniform_plan;
use crate::scene::{two_point_scene, Axis, SceneGeometry};
use crate::C64;

/// Mean squared difference of amplitudes.
pub fn mse(image: &[C64], reference: &[C64]) -> Result<f64> {
    check_len("mse operands", reference.len(), image.len())?;
    if image.is_empty() {
        return Ok(0.0);
    }
    let sum: f64 = image
        .iter()
        .zip(reference)
        .map(|(a, b)| (a.norm() - b.norm()).powi(2))
        .sum();
    Ok(sum / image.len() as f64)
}

/// `|| |x_hat| - |x| ||_2 / ||x||_2`.
pub fn relative_amplitude_error(estimate: &[C64], truth: &[C64]) -> Result<f64> {
    check_len("estimate", truth.len(), estimate.len())?;
    let den: f64 = truth.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if den == 0.0 {
        return Err(Error::invalid("truth", "relative error is undefined for an all-zero scene"));
    }
    let num: f64 = estimate
        .iter()
        .zip(truth)
        .map(|(a, b)| (a.norm() - b.norm()).powi(2))
        .sum::<f64>()
        .sqrt();
    Ok(num / den)
}

/// F1 score between the true support and the cells of the estimate above
/// half the weakest true target.
pub fn support_f1(estimate: &[C64], truth: &[C64]) -> f64 {
    let min_strong = truth
        .iter()
        .map(|z| z.norm())
        .filter(|&a| a > 0.0)
        .fold(f64::INFINITY, f64::min);
    if !min_strong.is_finite() {
        // no true targets: perfect only if nothing is detected
        return if estimate.iter().all(|z| z.norm() == 0.0) { 1.0 } else { 0.0 };
    }
    let cut = 0.5 * min_strong;
    let (mut tp, mut fp, mut fneg) = (0usize, 0usize, 0usize);
    for (e, t) in estimate.iter().zip(truth) {
        match (e.norm() > cut, t.norm() > 0.0) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fneg += 1,
            _ => {}
        }
    }
    if tp == 0 {
        return 0.0;
    }
    2.0 * tp as f64 / (2 * tp + fp + fneg) as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuccessKind {
    RelativeError,
    SupportF1,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuccessRule {
    pub kind: SuccessKind,
    pub threshold: f64,
}

impl Default for SuccessRule {
    fn default() -> Self {
        SuccessRule {
            kind: SuccessKind::RelativeError,
            threshold: 0.1,
        }
    }
}

impl SuccessRule {
    pub fn validate(&self) -> Result<()> {
        let ok = match self.kind {
            SuccessKind::RelativeError => self.threshold > 0.0,
            SuccessKind::SupportF1 => self.threshold > 0.0 && self.threshold <= 1.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid("threshold", format!("{} is out of range for {:?}", self.threshold, self.kind)))
        }
    }

    pub fn evaluate(&self, estimate: &[C64], truth: &[C64]) -> Result<bool> {
        self.validate()?;
        check_len("estimate", truth.len(), estimate.len())?;
        Ok(match self.kind {
            SuccessKind::RelativeError => relative_amplitude_error(estimate, truth)? <= self.threshold,
            SuccessKind::SupportF1 => support_f1(estimate, truth) >= self.threshold,
        })
    }
}

pub fn is_success(estimate: &[C64], truth: &[C64], rule: &SuccessRule) -> Result<bool> {
    rule.evaluate(estimate, truth)
}

/// Axes of a phase diagram. An infinite SNR means noiseless.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagramAxes {
    pub sparsities: Vec<f64>,
    pub ratios: Vec<f64>,
    pub snrs_db: Vec<f64>,
}

impl DiagramAxes {
    pub fn validate(&self) -> Result<()> {
        for (name, axis) in [
            ("sparsity axis", &self.sparsities),
            ("ratio axis", &self.ratios),
            ("snr axis", &self.snrs_db),
        ] {
            if axis.is_empty() {
                return Err(Error::invalid(name, "must not be empty"));
            }
            if axis.windows(2).any(|w| !(w[0] < w[1])) || axis.iter().any(|v| v.is_nan()) {
                return Err(Error::invalid(name, "must be strictly increasing"));
            }
        }
        Ok(())
    }

    pub fn cells(&self) -> usize {
        self.sparsities.len() * self.ratios.len() * self.snrs_db.len()
    }

    /// Flat index of `(sparsity, ratio, snr)`; snr varies fastest.
    pub fn index(&self, s: usize, r: usize, n: usize) -> usize {
        (s * self.ratios.len() + r) * self.snrs_db.len() + n
    }

    fn point(&self, i: usize, scheme: crate::sampling::SchemeKind) -> SweepPoint {
        let nn = self.snrs_db.len();
        let nr = self.ratios.len();
        let snr = self.snrs_db[i % nn];
        SweepPoint {
            sparsity: self.sparsities[i / (nn * nr)],
            ratio: self.ratios[(i / nn) % nr],
            snr_db: snr.is_finite().then_some(snr),
            scheme,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseDiagram {
    pub axes: DiagramAxes,
    pub trials: usize,
    /// Successes per cell, indexed by [`DiagramAxes::index`].
    pub successes: Vec<usize>,
    /// Trials per cell that ended in solver divergence (counted as failures).
    pub diverged: Vec<usize>,
    pub rule: SuccessRule,
    pub master_seed: u64,
}

impl PhaseDiagram {
    pub fn probability(&self, s: usize, r: usize, n: usize) -> f64 {
        self.successes[self.axes.index(s, r, n)] as f64 / self.trials as f64
    }

    /// CSV with one row per cell.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("sparsity,ratio,snr_db,successes,trials,probability\n");
        for s in 0..self.axes.sparsities.len() {
            for r in 0..self.axes.ratios.len() {
                for n in 0..self.axes.snrs_db.len() {
                    let snr = self.axes.snrs_db[n];
                    let snr = if snr.is_finite() { format!("{snr}") } else { "inf".into() };
                    out.push_str(&format!(
                        "{},{},{},{},{},{}\n",
                        self.axes.sparsities[s],
                        self.axes.ratios[r],
                        snr,
                        self.successes[self.axes.index(s, r, n)],
                        self.trials,
                        self.probability(s, r, n)
                    ));
                }
            }
        }
        out
    }
}

/// Upper bound on cells times trials for one diagram.
pub const DIAGRAM_BUDGET: usize = 100_000;

/// Success fraction of `experiment` over every cell of `axes`. Trial `t` is
/// seeded from `(master_seed, t)` in every cell.
pub fn phase_diagram(
    experiment: &Experiment,
    axes: &DiagramAxes,
    trials: usize,
    rule: SuccessRule,
    master_seed: u64,
) -> Result<PhaseDiagram> {
    axes.validate()?;
    rule.validate()?;
    if trials == 0 {
        return Err(Error::invalid("trials", "must be at least 1"));
    }
    if axes.cells() * trials > DIAGRAM_BUDGET {
        return Err(Error::invalid(
            "trials",
            format!("{} cells x {trials} trials exceeds {DIAGRAM_BUDGET}", axes.cells()),
        ));
    }
    let exp = Experiment {
        rule,
        ..experiment.clone()
    };
    let points: Vec<SweepPoint> = (0..axes.cells()).map(|i| axes.point(i, exp.scheme)).collect();
    let rows = exp.sweep(&points, trials, master_seed)?;
    Ok(PhaseDiagram {
        axes: axes.clone(),
        trials,
        successes: rows.iter().map(|r| r.successes).collect(),
        diverged: rows.iter().map(|r| r.diverged).collect(),
        rule,
        master_seed,
    })
}

/// Image formation used by the distinguishing probe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Imager {
    Sparse(SolverSpec),
    MatchedFilter,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeOutcome {
    /// Smallest separation in cells resolved in at least 90% of trials.
    Resolved(usize),
    Unresolved { max_separation: usize },
}

/// Local maxima of `profile` that reach half of its peak.
pub fn strong_local_maxima(profile: &[f64]) -> Vec<usize> {
    let peak = profile.iter().copied().fold(0.0, f64::max);
    if peak <= 0.0 {
        return Vec::new();
    }
    (0..profile.len())
        .filter(|&i| {
            let p = profile[i];
            let left = i == 0 || p > profile[i - 1];
            let right = i + 1 == profile.len() || p >= profile[i + 1];
            left && right && p >= 0.5 * peak
        })
        .collect()
}

/// Whether the strong local maxima of the amplitude profile through two
/// targets are exactly the two target cells.
pub fn resolves_pair(image: &[C64], geometry: &SceneGeometry, separation: usize, axis: Axis) -> bool {
    if separation == 0 {
        return false;
    }
    let (along, across) = match axis {
        Axis::Azimuth => (geometry.rows, geometry.cols),
        Axis::Range => (geometry.cols, geometry.rows),
    };
    let lo = (along - 1 - separation) / 2;
    let mid = (across - 1) / 2;
    let profile: Vec<f64> = (0..along)
        .map(|p| {
            let (m, n) = match axis {
                Axis::Azimuth => (p, mid),
                Axis::Range => (mid, p),
            };
            image[geometry.index(m, n)].norm()
        })
        .collect();
    strong_local_maxima(&profile) == vec![lo, lo + separation]
}

/// Smallest two-target separation along `axis` that `imager` resolves in at
/// least 90% of `trials` noisy full-rate acquisitions.
#[allow(clippy::too_many_arguments)]
pub fn distinguishing_probe(
    config: &RadarConfig,
    geometry: &SceneGeometry,
    axis: Axis,
    max_separation: usize,
    imager: Imager,
    trials: usize,
    snr_db: Option<f64>,
    seed: u64,
) -> Result<ProbeOutcome> {
    if trials == 0 {
        return Err(Error::invalid("trials", "must be at least 1"));
    }
    let plan = uniform_plan(config, 1.0, 1.0, 0)?;
    for separation in 1..=max_separation {
        let scene = two_point_scene(*geometry, separation, axis)?;
        let resolved: Vec<Result<bool>> = (0..trials)
            .into_par_iter()
            .map(|t| {
                let echo = simulate_echo(
                    config,
                    &scene,
                    &plan,
                    snr_db,
                    derive_seed(seed, &[separation as u64, t as u64]),
                )?;
                let image = match imager {
                    Imager::Sparse(spec) => reconstruct(config, geometry, &echo, &spec)?.estimate,
                    Imager::MatchedFilter => rda_focus(&echo, config, geometry)?,
                };
                Ok(resolves_pair(&image, geometry, separation, axis))
            })
            .collect();
        let mut hits = 0;
        for r in resolved {
            hits += r? as usize;
        }
        if hits as f64 >= 0.9 * trials as f64 {
            return Ok(ProbeOutcome::Resolved(separation));
        }
    }
    Ok(ProbeOutcome::Unresolved { max_separation })
}
