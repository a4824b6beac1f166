//! Command-line front end.
//!
//! Exit codes: 0 success, 2 configuration error, 3 I/O error, 4 numerical
//! divergence.

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::config::{ExperimentConfig, SceneSpec};
use crate::error::{Error, Result};
use crate::eval::{mse, phase_diagram, relative_amplitude_error, support_f1};
use crate::experiment::{reconstruct, SweepPoint, SweepRow};
use crate::io;
use crate::radar::simulate_echo;
use crate::rng::derive_seed;
use crate::sampling::{jittered_plan, uniform_plan, SchemeKind};
use crate::scene::{random_sparse_scene, two_point_scene, SceneGrid};
use crate::C64;

#[derive(Parser, Debug)]
#[command(name = "sparse-sar", version, about = "Sparse SAR simulation, reconstruction and phase-transition analysis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// JSON experiment config; defaults apply when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Master seed, overriding the config.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (results do not depend on it).
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Simulate an echo and write it with the true scene.
    Simulate(Common),
    /// Reconstruct a scene from an echo written by `simulate`.
    Reconstruct {
        #[command(flatten)]
        common: Common,
        /// Echo base path (without extension).
        #[arg(long)]
        echo: PathBuf,
        /// True scene base path, for metrics.
        #[arg(long)]
        truth: Option<PathBuf>,
    },
    /// Run one of the recovery analyses.
    Analyze {
        kind: AnalysisKind,
        #[command(flatten)]
        common: Common,
    },
    /// Monte-Carlo phase diagram over sparsity, sampling ratio and SNR.
    PhaseDiagram(Common),
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnalysisKind {
    Sparsity,
    Sampling,
    Snr,
    Scheme,
}

impl AnalysisKind {
    fn name(self) -> &'static str {
        match self {
            AnalysisKind::Sparsity => "sparsity",
            AnalysisKind::Sampling => "sampling",
            AnalysisKind::Snr => "snr",
            AnalysisKind::Scheme => "scheme",
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io { .. } | Error::Format { .. } => 3,
        Error::Diverged { .. } => 4,
        _ => 2,
    }
}

pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Loaded config plus resolved output directory.
struct Run {
    cfg: ExperimentConfig,
    out: PathBuf,
    files: Vec<PathBuf>,
}

impl Run {
    fn new(common: &Common) -> Result<Self> {
        if let Some(n) = common.threads {
            // A second initialization in the same process is harmless.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
        }
        let mut cfg = match &common.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        if let Some(s) = common.seed {
            cfg.seed = s;
        }
        let out = common
            .out
            .clone()
            .or_else(|| cfg.output_dir.clone())
            .ok_or_else(|| Error::Config("no output directory: pass --out or set output_dir".into()))?;
        std::fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;
        Ok(Run { cfg, out, files: Vec::new() })
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let p = self.path(name);
        io::write_bytes(&p, bytes)?;
        self.files.push(p);
        Ok(())
    }

    /// Write the effective config and the manifest.
    fn finish(mut self) -> Result<()> {
        let mut text = serde_json::to_string_pretty(&self.cfg).expect("config serializes");
        text.push('\n');
        self.write("config.json", text.as_bytes())?;
        io::write_manifest(&self.out, &self.files)?;
        Ok(())
    }
}

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Simulate(common) => cmd_simulate(&common),
        Command::Reconstruct { common, echo, truth } => cmd_reconstruct(&common, &echo, truth.as_deref()),
        Command::Analyze { kind, common } => cmd_analysis(kind, &common),
        Command::PhaseDiagram(common) => cmd_phase_diagram(&common),
    }
}

fn build_scene(cfg: &ExperimentConfig) -> Result<SceneGrid> {
    let (_, geometry) = cfg.radar.resolve()?;
    let seed = derive_seed(cfg.seed, &[1]);
    match &cfg.scene {
        SceneSpec::RandomSparse { sparsity, amplitude } => {
            let k = (sparsity * geometry.len() as f64).round_ties_even() as usize;
            random_sparse_scene(geometry, k, (amplitude[0], amplitude[1]), seed)
        }
        SceneSpec::TwoPoint { separation, axis } => two_point_scene(geometry, *separation, *axis)
            .map_err(|e| Error::Config(format!("scene.separation: {e}"))),
        SceneSpec::Zero => SceneGrid::zeros(geometry),
        SceneSpec::File { path } => {
            let s = io::load_scene(path)?;
            if s.geometry != geometry {
                return Err(Error::Config(format!(
                    "scene.path: {} does not match the radar grid",
                    path.display()
                )));
            }
            Ok(s)
        }
    }
}

pub fn cmd_simulate(common: &Common) -> Result<()> {
    let mut run = Run::new(common)?;
    let cfg = run.cfg.clone();
    let (radar, _) = cfg.radar.resolve()?;
    let scene = build_scene(&cfg)?;
    let (alpha, range_ratio) = cfg.sampling.factors()?;
    let plan_seed = derive_seed(cfg.seed, &[2]);
    let plan = match cfg.sampling.scheme {
        SchemeKind::Uniform => uniform_plan(&radar, alpha, range_ratio, plan_seed)?,
        SchemeKind::Jittered => {
            let jw = cfg.sampling.jitter_fraction / (2.0 * alpha * radar.prf);
            jittered_plan(&radar, alpha, jw, range_ratio, plan_seed)?
        }
    };
    let echo = simulate_echo(&radar, &scene, &plan, cfg.sampling.snr_db, derive_seed(cfg.seed, &[3]))?;
    run.files.extend(io::save_scene(&run.path("scene"), &scene)?);
    run.files.extend(io::save_echo(&run.path("echo"), &echo)?);
    println!(
        "pulses acquired: {} of {} full-rate",
        echo.rows, radar.pulses
    );
    println!("range ratio: {:.4}", plan.range_ratio());
    println!("samples acquired: {}", echo.acquired());
    match echo.empirical_snr_db {
        Some(s) => println!("empirical snr: {s:.2} dB"),
        None => println!("empirical snr: noiseless"),
    }
    run.finish()
}

pub fn cmd_reconstruct(common: &Common, echo_base: &Path, truth_base: Option<&Path>) -> Result<()> {
    let mut run = Run::new(common)?;
    let cfg = run.cfg.clone();
    let (radar, geometry) = cfg.radar.resolve()?;
    let echo = io::load_echo(echo_base)?;
    let truth = truth_base.map(io::load_scene).transpose()?;
    if let Some(t) = &truth {
        if t.geometry != geometry {
            return Err(Error::Config("truth scene does not match the radar grid".into()));
        }
    }
    let started = Instant::now();
    let result = reconstruct(&radar, &geometry, &echo, &cfg.recon)?;
    let elapsed = started.elapsed();
    let image = SceneGrid::from_vec(geometry, result.estimate.clone())?;
    run.files.extend(io::save_scene(&run.path("image"), &image)?);
    let pgm = io::encode_pgm(&image.reflectivity, geometry.rows, geometry.cols, cfg.eval.dynamic_range_db)?;
    run.write("image.pgm", &pgm)?;

    let mut metrics = String::from("mse,relative_error,support_f1,residual,iterations\n");
    let (m, rel, f1) = match &truth {
        Some(t) => {
            let rel = relative_amplitude_error(&image.reflectivity, &t.reflectivity)
                .map(|v| v.to_string())
                .unwrap_or_default();
            (
                mse(&image.reflectivity, &t.reflectivity)?.to_string(),
                rel,
                support_f1(&image.reflectivity, &t.reflectivity).to_string(),
            )
        }
        None => Default::default(),
    };
    metrics.push_str(&format!("{m},{rel},{f1},{},{}\n", result.residual, result.iterations));
    run.write("metrics.csv", metrics.as_bytes())?;

    let mut trace = String::from("iteration,objective,residual\n");
    for (i, (o, r)) in result.objective.iter().zip(&result.residuals).enumerate() {
        trace.push_str(&format!("{i},{o},{r}\n"));
    }
    run.write("trace.csv", trace.as_bytes())?;
    println!("iterations: {}", result.iterations);
    println!("residual: {:.6e}", result.residual);
    println!("wall time: {:.3} s", elapsed.as_secs_f64());
    run.finish()
}

fn sweep_points(kind: AnalysisKind, cfg: &ExperimentConfig) -> Vec<SweepPoint> {
    let ratio = cfg.sampling.ratio;
    let snr = cfg.sampling.snr_db;
    let scheme = cfg.sampling.scheme;
    let base_sparsity = match cfg.scene {
        SceneSpec::RandomSparse { sparsity, .. } => sparsity,
        _ => 0.095,
    };
    let e = &cfg.eval;
    match kind {
        AnalysisKind::Sparsity => e
            .sparsities
            .iter()
            .map(|&s| SweepPoint { sparsity: s, ratio, snr_db: snr, scheme })
            .collect(),
        AnalysisKind::Sampling => e
            .sampling_sparsities
            .iter()
            .flat_map(|&s| {
                e.ratios
                    .iter()
                    .map(move |&r| SweepPoint { sparsity: s, ratio: r, snr_db: snr, scheme })
            })
            .collect(),
        AnalysisKind::Snr => e
            .snr_losses_db
            .iter()
            .map(|&loss| SweepPoint {
                sparsity: base_sparsity,
                ratio,
                snr_db: snr.map(|s| s - loss),
                scheme,
            })
            .collect(),
        AnalysisKind::Scheme => [SchemeKind::Jittered, SchemeKind::Uniform]
            .iter()
            .map(|&scheme| SweepPoint { sparsity: base_sparsity, ratio, snr_db: snr, scheme })
            .collect(),
    }
}

fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(
        "scheme,sparsity,ratio,snr_db,trials,successes,diverged,probability,mean_mse,mean_relative_error\n",
    );
    for r in rows {
        let p = &r.point;
        let scheme = match p.scheme {
            SchemeKind::Uniform => "uniform",
            SchemeKind::Jittered => "jittered",
        };
        let snr = p.snr_db.map_or("inf".to_string(), |s| s.to_string());
        out.push_str(&format!(
            "{scheme},{},{},{snr},{},{},{},{},{},{}\n",
            p.sparsity,
            p.ratio,
            r.trials,
            r.successes,
            r.diverged,
            r.probability(),
            r.mean_mse,
            r.mean_relative_error
        ));
    }
    out
}

pub fn cmd_analysis(kind: AnalysisKind, common: &Common) -> Result<()> {
    let mut run = Run::new(common)?;
    let cfg = run.cfg.clone();
    let experiment = cfg.experiment()?;
    let points = sweep_points(kind, &cfg);
    let dr = cfg.eval.dynamic_range_db;
    let g = experiment.geometry;
    let rows = experiment.sweep_outcomes(&points, cfg.eval.trials, cfg.seed, |o| {
        if o.estimate.is_empty() {
            vec![C64::new(0.0, 0.0); g.len()]
        } else {
            o.estimate.clone()
        }
    })?;
    let name = kind.name();
    let table: Vec<SweepRow> = rows.iter().map(|(r, _)| r.clone()).collect();
    run.write(&format!("{name}.csv"), sweep_csv(&table).as_bytes())?;
    for (i, (_, image)) in rows.iter().enumerate() {
        run.write(&format!("{name}_{i:02}.pgm"), &io::encode_pgm(image, g.rows, g.cols, dr)?)?;
    }
    for r in &table {
        println!(
            "{name}: sparsity {} ratio {} snr {:?} {:?}: p = {:.2}, mse = {:.4}",
            r.point.sparsity,
            r.point.ratio,
            r.point.snr_db,
            r.point.scheme,
            r.probability(),
            r.mean_mse
        );
    }
    run.finish()
}

pub fn cmd_phase_diagram(common: &Common) -> Result<()> {
    let mut run = Run::new(common)?;
    let cfg = run.cfg.clone();
    let experiment = cfg.experiment()?;
    let axes = cfg.eval.phase_diagram.axes()?;
    let d = phase_diagram(&experiment, &axes, cfg.eval.trials, cfg.eval.rule, cfg.seed)?;
    run.write("phase_diagram.csv", d.to_csv().as_bytes())?;
    let meta = serde_json::json!({
        "axes": {
            "sparsities": d.axes.sparsities,
            "ratios": d.axes.ratios,
            "snrs_db": cfg.eval.phase_diagram.snrs_db,
        },
        "trials": d.trials,
        "successes": d.successes,
        "diverged": d.diverged,
        "rule": d.rule,
        "scheme": experiment.scheme,
        "master_seed": d.master_seed,
    });
    let mut text = serde_json::to_string_pretty(&meta).expect("diagram serializes");
    text.push('\n');
    run.write("phase_diagram.json", text.as_bytes())?;
    println!("{} cells x {} trials", d.axes.cells(), d.trials);
    run.finish()
}
