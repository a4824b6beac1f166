//! Simulate, under-sample, reconstruct and score: the trial pipeline shared by
//! sweeps, phase diagrams and the command-line analyses.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::{mse, relative_amplitude_error, support_f1, SuccessRule};
use crate::fastops::DecoupledOperator;
use crate::radar::{azimuth_grid, simulate_echo, EchoData, RadarConfig, SampledObservation};
use crate::recon::{ist_solve, LinearOperator, ReconConfig, ReconResult};
use crate::rng::derive_seed;
use crate::sampling::{jittered_plan, split_ratio, uniform_plan, SamplingPlan, SchemeKind};
use crate::scene::{random_sparse_scene, SceneGeometry, SceneGrid};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    Dense,
    Fast,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum LambdaRule {
    /// Fraction of `max |Phi^H y|`.
    FractionOfMax(f64),
    /// Percentile of `|Phi^H y|`.
    Percentile(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSpec {
    pub q: f64,
    pub lambda: LambdaRule,
    pub max_iters: usize,
    pub stop_tol: f64,
    pub continuation: usize,
    pub operator: OperatorKind,
}

impl Default for SolverSpec {
    fn default() -> Self {
        SolverSpec {
            q: 1.0,
            lambda: LambdaRule::FractionOfMax(0.01),
            max_iters: 500,
            stop_tol: 1e-6,
            continuation: 30,
            operator: OperatorKind::Dense,
        }
    }
}

/// Map echo rows onto the full-rate pulse grid by nearest slot.
pub fn echo_on_grid(echo: &EchoData, config: &RadarConfig) -> Result<(Vec<C64>, Vec<bool>)> {
    let grid = azimuth_grid(config);
    if echo.cols != config.range_samples {
        return Err(Error::ShapeMismatch {
            what: "echo range bins",
            expected: config.range_samples,
            got: echo.cols,
        });
    }
    let cols = echo.cols;
    let mut data = vec![C64::new(0.0, 0.0); grid.len() * cols];
    let mut mask = vec![false; grid.len() * cols];
    for (k, &t) in echo.azimuth_times.iter().enumerate() {
        let slot = ((t - grid[0]) * config.prf).round();
        if slot < 0.0 || slot as usize >= grid.len() {
            continue;
        }
        let slot = slot as usize;
        for l in 0..cols {
            let i = k * cols + l;
            if echo.mask[i] {
                data[slot * cols + l] = echo.data[i];
                mask[slot * cols + l] = true;
            }
        }
    }
    Ok((data, mask))
}

/// Reconstruct a scene from an echo with the given solver.
pub fn reconstruct(
    config: &RadarConfig,
    geometry: &SceneGeometry,
    echo: &EchoData,
    solver: &SolverSpec,
) -> Result<ReconResult> {
    match solver.operator {
        OperatorKind::Dense => {
            let op = SampledObservation::new(config, geometry, echo)?;
            solve_with(&op, &echo.data, solver)
        }
        OperatorKind::Fast => {
            let (y, mask) = echo_on_grid(echo, config)?;
            let op = DecoupledOperator::new(config, geometry, mask)?;
            solve_with(&op, &y, solver)
        }
    }
}

fn solve_with<Op: LinearOperator>(op: &Op, y: &[C64], solver: &SolverSpec) -> Result<ReconResult> {
    let lambda = match solver.lambda {
        LambdaRule::FractionOfMax(f) => {
            if !(f >= 0.0) {
                return Err(Error::invalid("lambda", "fraction must be non-negative"));
            }
            f * op.adjoint(y).iter().map(|z| z.norm()).fold(0.0, f64::max)
        }
        LambdaRule::Percentile(p) => crate::recon::select_lambda(op, y, p)?,
    };
    let cfg = ReconConfig {
        q: solver.q,
        lambda,
        step: None,
        max_iters: solver.max_iters,
        stop_tol: solver.stop_tol,
        continuation: solver.continuation,
    };
    ist_solve(op, y, &cfg, None)
}

/// Reference image for MSE.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reference {
    /// Ground-truth reflectivity.
    Truth,
    /// Reconstruction from full-rate data of the same scene and noise seed.
    FullSampled,
}

/// Everything a Monte-Carlo trial needs besides the sweep coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub radar: RadarConfig,
    pub geometry: SceneGeometry,
    /// Magnitude range of strong cells.
    pub amplitude: (f64, f64),
    pub scheme: SchemeKind,
    /// Jitter half-width as a fraction of its ordering bound `1 / (2 alpha prf)`.
    pub jitter_fraction: f64,
    /// Range ratio held fixed while the azimuth factor absorbs the rest.
    pub fixed_range_ratio: f64,
    pub solver: SolverSpec,
    pub rule: SuccessRule,
    pub reference: Reference,
}

/// One point of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub sparsity: f64,
    pub ratio: f64,
    /// `None` means noiseless.
    pub snr_db: Option<f64>,
    pub scheme: SchemeKind,
}

#[derive(Debug, Clone)]
pub struct TrialOutcome {
    pub truth: SceneGrid,
    /// Empty when the solver diverged.
    pub estimate: Vec<C64>,
    pub relative_error: f64,
    pub mse: f64,
    pub f1: f64,
    pub success: bool,
    pub iterations: usize,
    pub residual: f64,
    pub diverged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub point: SweepPoint,
    pub trials: usize,
    pub successes: usize,
    pub diverged: usize,
    pub mean_mse: f64,
    pub mean_relative_error: f64,
}

impl SweepRow {
    pub fn probability(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }
}

impl Experiment {
    pub fn validate(&self) -> Result<()> {
        self.radar.validate()?;
        self.geometry.validate()?;
        self.rule.validate()?;
        if !(self.jitter_fraction >= 0.0 && self.jitter_fraction < 1.0) {
            return Err(Error::invalid("jitter_fraction", "must lie in [0, 1)"));
        }
        Ok(())
    }

    pub fn strong_cells(&self, sparsity: f64) -> Result<usize> {
        if !(0.0..=1.0).contains(&sparsity) {
            return Err(Error::invalid("sparsity", format!("{sparsity} is outside [0, 1]")));
        }
        Ok((sparsity * self.geometry.len() as f64).round_ties_even() as usize)
    }

    pub fn plan(&self, ratio: f64, scheme: SchemeKind, seed: u64) -> Result<SamplingPlan> {
        let (alpha, range_ratio) = split_ratio(ratio, self.fixed_range_ratio)?;
        match scheme {
            SchemeKind::Uniform => uniform_plan(&self.radar, alpha, range_ratio, seed),
            SchemeKind::Jittered => {
                let jw = self.jitter_fraction / (2.0 * alpha * self.radar.prf);
                jittered_plan(&self.radar, alpha, jw, range_ratio, seed)
            }
        }
    }

    pub fn scene(&self, sparsity: f64, seed: u64) -> Result<SceneGrid> {
        random_sparse_scene(self.geometry, self.strong_cells(sparsity)?, self.amplitude, seed)
    }

    /// Simulate and reconstruct one instance. Solver divergence is reported
    /// as a failed trial, not an error.
    pub fn run_trial(&self, point: &SweepPoint, seed: u64) -> Result<TrialOutcome> {
        let truth = self.scene(point.sparsity, derive_seed(seed, &[1]))?;
        let plan = self.plan(point.ratio, point.scheme, derive_seed(seed, &[2]))?;
        let echo = simulate_echo(&self.radar, &truth, &plan, point.snr_db, derive_seed(seed, &[3]))?;
        let strong = truth.targets().count();
        match reconstruct(&self.radar, &self.geometry, &echo, &self.solver) {
            Ok(r) => {
                let reference = match self.reference {
                    Reference::Truth => truth.reflectivity.clone(),
                    Reference::FullSampled => {
                        let full = self.plan(1.0, point.scheme, derive_seed(seed, &[2]))?;
                        let echo = simulate_echo(&self.radar, &truth, &full, point.snr_db, derive_seed(seed, &[3]))?;
                        reconstruct(&self.radar, &self.geometry, &echo, &self.solver)?.estimate
                    }
                };
                let relative_error = if strong > 0 {
                    relative_amplitude_error(&r.estimate, &truth.reflectivity)?
                } else {
                    0.0
                };
                Ok(TrialOutcome {
                    success: self.rule.evaluate(&r.estimate, &truth.reflectivity)?,
                    relative_error,
                    mse: mse(&r.estimate, &reference)?,
                    f1: support_f1(&r.estimate, &truth.reflectivity),
                    iterations: r.iterations,
                    residual: r.residual,
                    estimate: r.estimate,
                    truth,
                    diverged: false,
                })
            }
            Err(Error::Diverged { iteration }) => Ok(TrialOutcome {
                truth,
                estimate: Vec::new(),
                relative_error: f64::INFINITY,
                mse: f64::INFINITY,
                f1: 0.0,
                success: false,
                iterations: iteration,
                residual: f64::INFINITY,
                diverged: true,
            }),
            Err(e) => Err(e),
        }
    }

    /// Run `trials` instances at every point. Trial `t` is seeded from
    /// `(master_seed, t)` at every point, so points are compared on the same
    /// scenes, plans and noise draws (common random numbers) and results do
    /// not depend on scheduling.
    pub fn sweep(&self, points: &[SweepPoint], trials: usize, master_seed: u64) -> Result<Vec<SweepRow>> {
        let outcomes = self.sweep_outcomes(points, trials, master_seed, |_| ())?;
        Ok(outcomes.into_iter().map(|(row, _)| row).collect())
    }

    /// Like [`Experiment::sweep`], also keeping `keep(first trial)` per point.
    pub fn sweep_outcomes<T: Send>(
        &self,
        points: &[SweepPoint],
        trials: usize,
        master_seed: u64,
        keep: impl Fn(&TrialOutcome) -> T + Sync,
    ) -> Result<Vec<(SweepRow, T)>> {
        self.validate()?;
        if trials == 0 {
            return Err(Error::invalid("trials", "must be at least 1"));
        }
        let jobs: Vec<(usize, usize)> = (0..points.len())
            .flat_map(|p| (0..trials).map(move |t| (p, t)))
            .collect();
        let results: Vec<Result<(TrialOutcome, Option<T>)>> = jobs
            .par_iter()
            .map(|&(p, t)| {
                let o = self.run_trial(&points[p], derive_seed(master_seed, &[t as u64]))?;
                let kept = (t == 0).then(|| keep(&o));
                Ok((o, kept))
            })
            .collect();
        let mut rows = Vec::with_capacity(points.len());
        let mut iter = results.into_iter();
        for point in points {
            let mut successes = 0;
            let mut diverged = 0;
            let mut mse_sum = 0.0;
            let mut err_sum = 0.0;
            let mut kept = None;
            for _ in 0..trials {
                let (o, k) = iter.next().expect("one result per job")?;
                successes += o.success as usize;
                diverged += o.diverged as usize;
                mse_sum += o.mse;
                err_sum += o.relative_error;
                if k.is_some() {
                    kept = k;
                }
            }
            rows.push((
                SweepRow {
                    point: *point,
                    trials,
                    successes,
                    diverged,
                    mean_mse: mse_sum / trials as f64,
                    mean_relative_error: err_sum / trials as f64,
                },
                kept.expect("first trial kept"),
            ));
        }
        Ok(rows)
    }
}
