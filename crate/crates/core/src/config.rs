//! JSON experiment configuration.
//!
//! Every field has a default, so `{}` is a valid config (the `desk-small`
//! preset, a 9.5% sparse scene, jittered 70% sampling at 30 dB). Unknown keys
//! are rejected.

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::eval::{DiagramAxes, SuccessRule};
use crate::experiment::{Experiment, Reference, SolverSpec};
use crate::radar::{preset, RadarConfig};
use crate::sampling::{split_ratio, SchemeKind};
use crate::scene::{Axis, SceneGeometry};
use crate::waveform::{ChirpWaveform, Waveform};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: String,
    pub radar: RadarSpec,
    pub scene: SceneSpec,
    pub sampling: SamplingSpec,
    pub recon: SolverSpec,
    pub eval: EvalSpec,
    /// Used when `--out` is not given.
    pub output_dir: Option<PathBuf>,
    /// Master seed; `--seed` overrides it.
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            scenario: "default".into(),
            radar: RadarSpec::default(),
            scene: SceneSpec::default(),
            sampling: SamplingSpec::default(),
            recon: SolverSpec::default(),
            eval: EvalSpec::default(),
            output_dir: None,
            seed: 0,
        }
    }
}

/// A named preset with optional overrides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RadarSpec {
    pub preset: String,
    pub scene_rows: Option<usize>,
    pub scene_cols: Option<usize>,
    pub carrier: Option<f64>,
    pub speed: Option<f64>,
    pub prf: Option<f64>,
    pub sample_rate: Option<f64>,
    pub bandwidth: Option<f64>,
    pub pulse_duration: Option<f64>,
    pub reference_range: Option<f64>,
    pub aperture_time: Option<f64>,
    pub pulses: Option<usize>,
    pub range_samples: Option<usize>,
}

impl Default for RadarSpec {
    fn default() -> Self {
        RadarSpec {
            preset: "desk-small".into(),
            scene_rows: None,
            scene_cols: None,
            carrier: None,
            speed: None,
            prf: None,
            sample_rate: None,
            bandwidth: None,
            pulse_duration: None,
            reference_range: None,
            aperture_time: None,
            pulses: None,
            range_samples: None,
        }
    }
}

impl RadarSpec {
    pub fn resolve(&self) -> Result<(RadarConfig, SceneGeometry)> {
        let p = preset(&self.preset).map_err(|e| Error::Config(format!("radar.preset: {e}")))?;
        let mut r = p.radar;
        macro_rules! set {
            ($($field:ident),*) => { $( if let Some(v) = self.$field { r.$field = v; } )* };
        }
        set!(carrier, speed, prf, sample_rate, reference_range, aperture_time, pulses, range_samples);
        if self.bandwidth.is_some() || self.pulse_duration.is_some() {
            let bandwidth = self.bandwidth.unwrap_or(r.waveform.bandwidth());
            let duration = self.pulse_duration.unwrap_or(r.waveform.duration());
            r.waveform = Waveform::Chirp(ChirpWaveform { bandwidth, duration });
        }
        r.validate().map_err(|e| Error::Config(format!("radar: {e}")))?;
        let geometry = r
            .matched_geometry(self.scene_rows.unwrap_or(p.scene_rows), self.scene_cols.unwrap_or(p.scene_cols))
            .map_err(|e| Error::Config(format!("radar.scene_rows/scene_cols: {e}")))?;
        Ok((r, geometry))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "snake_case", deny_unknown_fields)]
pub enum SceneSpec {
    RandomSparse { sparsity: f64, amplitude: [f64; 2] },
    TwoPoint { separation: usize, axis: Axis },
    Zero,
    /// A scene written by `simulate` (base path without extension).
    File { path: PathBuf },
}

impl Default for SceneSpec {
    fn default() -> Self {
        SceneSpec::RandomSparse {
            sparsity: 0.095,
            amplitude: [1.0, 2.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplingSpec {
    pub scheme: SchemeKind,
    /// Overall fraction of full-rate samples kept.
    pub ratio: f64,
    /// Range ratio held fixed while the azimuth factor absorbs the rest.
    pub fixed_range_ratio: f64,
    /// Explicit azimuth factor; overrides the split of `ratio`.
    pub alpha: Option<f64>,
    /// Explicit range ratio; overrides the split of `ratio`.
    pub range_ratio: Option<f64>,
    /// Jitter half-width as a fraction of its bound `1 / (2 alpha prf)`.
    pub jitter_fraction: f64,
    /// `null` for noiseless data.
    pub snr_db: Option<f64>,
}

impl Default for SamplingSpec {
    fn default() -> Self {
        SamplingSpec {
            scheme: SchemeKind::Jittered,
            ratio: 0.7,
            fixed_range_ratio: 0.85,
            alpha: None,
            range_ratio: None,
            jitter_fraction: 0.95,
            snr_db: Some(30.0),
        }
    }
}

impl SamplingSpec {
    /// Azimuth factor and range ratio after applying overrides.
    pub fn factors(&self) -> Result<(f64, f64)> {
        let (a, r) = split_ratio(self.ratio, self.fixed_range_ratio)
            .map_err(|e| Error::Config(format!("sampling: {e}")))?;
        let alpha = self.alpha.unwrap_or(a);
        let range = self.range_ratio.unwrap_or(r);
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::Config(format!("sampling.alpha = {alpha} is outside (0, 1]")));
        }
        if !(range > 0.0 && range <= 1.0) {
            return Err(Error::Config(format!("sampling.range_ratio = {range} is outside (0, 1]")));
        }
        if !(self.jitter_fraction >= 0.0 && self.jitter_fraction < 1.0) {
            return Err(Error::Config(format!(
                "sampling.jitter_fraction = {} is outside [0, 1)",
                self.jitter_fraction
            )));
        }
        Ok((alpha, range))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalSpec {
    pub rule: SuccessRule,
    pub trials: usize,
    pub reference: Reference,
    pub dynamic_range_db: f64,
    /// Sparsity levels of the sparsity analysis.
    pub sparsities: Vec<f64>,
    /// Sampling ratios of the sampling analysis.
    pub ratios: Vec<f64>,
    /// Sparsities compared by the sampling analysis.
    pub sampling_sparsities: Vec<f64>,
    /// SNR reductions of the SNR analysis, dB below `sampling.snr_db`.
    pub snr_losses_db: Vec<f64>,
    pub phase_diagram: AxesSpec,
}

impl Default for EvalSpec {
    fn default() -> Self {
        EvalSpec {
            rule: SuccessRule::default(),
            trials: 20,
            reference: Reference::Truth,
            dynamic_range_db: 40.0,
            sparsities: vec![0.008, 0.03, 0.095, 0.5, 0.92],
            ratios: vec![0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0],
            sampling_sparsities: vec![0.03, 0.095],
            snr_losses_db: vec![0.0, 3.0, 6.0, 9.0, 12.0, 15.0, 18.0],
            phase_diagram: AxesSpec::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AxesSpec {
    pub sparsities: Vec<f64>,
    pub ratios: Vec<f64>,
    /// `null` entries mean noiseless and sort last.
    pub snrs_db: Vec<Option<f64>>,
}

impl Default for AxesSpec {
    fn default() -> Self {
        AxesSpec {
            sparsities: vec![0.03, 0.095, 0.2],
            ratios: vec![0.4, 0.6, 0.8, 1.0],
            snrs_db: vec![Some(30.0)],
        }
    }
}

impl AxesSpec {
    pub fn axes(&self) -> Result<DiagramAxes> {
        let axes = DiagramAxes {
            sparsities: self.sparsities.clone(),
            ratios: self.ratios.clone(),
            snrs_db: self.snrs_db.iter().map(|s| s.unwrap_or(f64::INFINITY)).collect(),
        };
        axes.validate().map_err(|e| Error::Config(format!("eval.phase_diagram: {e}")))?;
        Ok(axes)
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        let cfg: ExperimentConfig = serde_json::from_slice(&bytes)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.radar.resolve()?;
        self.sampling.factors()?;
        if let Some(s) = self.sampling.snr_db {
            if !s.is_finite() {
                return Err(Error::Config("sampling.snr_db must be finite or null".into()));
            }
        }
        match &self.scene {
            SceneSpec::RandomSparse { sparsity, amplitude } => {
                if !(0.0..=1.0).contains(sparsity) {
                    return Err(Error::Config(format!("scene.sparsity = {sparsity} is outside [0, 1]")));
                }
                if !(amplitude[0] > 0.0 && amplitude[0] <= amplitude[1]) {
                    return Err(Error::Config("scene.amplitude needs 0 < low <= high".into()));
                }
            }
            SceneSpec::File { path } => {
                let json = crate::io::with_suffix(path, ".json");
                if !json.exists() {
                    return Err(Error::Config(format!("scene.path: {} does not exist", json.display())));
                }
            }
            SceneSpec::TwoPoint { .. } | SceneSpec::Zero => {}
        }
        self.recon_config_check()?;
        self.eval.rule.validate().map_err(|e| Error::Config(format!("eval.rule: {e}")))?;
        if self.eval.trials == 0 {
            return Err(Error::Config("eval.trials must be at least 1".into()));
        }
        if !(self.eval.dynamic_range_db > 0.0) {
            return Err(Error::Config("eval.dynamic_range_db must be positive".into()));
        }
        self.eval.phase_diagram.axes()?;
        Ok(())
    }

    fn recon_config_check(&self) -> Result<()> {
        let r = &self.recon;
        if !(r.q > 0.0 && r.q <= 1.0) {
            return Err(Error::Config(format!("recon.q = {} is outside (0, 1]", r.q)));
        }
        if r.max_iters == 0 {
            return Err(Error::Config("recon.max_iters must be at least 1".into()));
        }
        Ok(())
    }

    /// Trial pipeline described by this config.
    pub fn experiment(&self) -> Result<Experiment> {
        let (radar, geometry) = self.radar.resolve()?;
        let amplitude = match self.scene {
            SceneSpec::RandomSparse { amplitude, .. } => (amplitude[0], amplitude[1]),
            _ => (1.0, 2.0),
        };
        Ok(Experiment {
            radar,
            geometry,
            amplitude,
            scheme: self.sampling.scheme,
            jitter_fraction: self.sampling.jitter_fraction,
            fixed_range_ratio: self.sampling.fixed_range_ratio,
            solver: self.recon,
            rule: self.eval.rule,
            reference: self.eval.reference,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_uses_defaults() {
        let c: ExperimentConfig = serde_json::from_str("{}").unwrap();
        assert_eq!(c, ExperimentConfig::default());
        c.validate().unwrap();
        let e = c.experiment().unwrap();
        assert_eq!((e.geometry.rows, e.geometry.cols), (24, 32));
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"sampling": {"ratoi": 0.5}}"#).is_err());
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"extra": 1}"#).is_err());
    }

    #[test]
    fn alpha_bound_is_named() {
        let c: ExperimentConfig = serde_json::from_str(r#"{"sampling": {"alpha": 1.5}}"#).unwrap();
        let msg = c.validate().unwrap_err().to_string();
        assert!(msg.contains("sampling.alpha"), "{msg}");
    }

    #[test]
    fn effective_config_round_trips() {
        let c: ExperimentConfig =
            serde_json::from_str(r#"{"scene": {"generator": "two_point", "separation": 3, "axis": "range"}, "sampling": {"snr_db": null}}"#)
                .unwrap();
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<ExperimentConfig>(&text).unwrap(), c);
    }
}
