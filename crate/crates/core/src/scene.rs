//! Discretized target scenes.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, TAG_SCENE};
use crate::C64;

/// Grid layout shared by scenes, operators and reconstructed images.
///
/// Row `m` sits at azimuth position `(m - (rows - 1) / 2) * cell_azimuth`,
/// column `n` at slant range `origin_range + n * cell_range`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SceneGeometry {
    pub rows: usize,
    pub cols: usize,
    pub cell_azimuth: f64,
    pub cell_range: f64,
    pub origin_range: f64,
}

impl SceneGeometry {
    pub fn new(
        rows: usize,
        cols: usize,
        cell_azimuth: f64,
        cell_range: f64,
        origin_range: f64,
    ) -> Result<Self> {
        let g = SceneGeometry {
            rows,
            cols,
            cell_azimuth,
            cell_range,
            origin_range,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.rows == 0 || self.cols == 0 {
            return Err(Error::invalid("scene", "rows and cols must be at least 1"));
        }
        if !(self.cell_azimuth > 0.0 && self.cell_range > 0.0) {
            return Err(Error::invalid("scene", "cell sizes must be positive"));
        }
        if !(self.origin_range > 0.0 && self.origin_range.is_finite()) {
            return Err(Error::invalid("origin_range", "must be positive and finite"));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, m: usize, n: usize) -> usize {
        m * self.cols + n
    }

    #[inline]
    pub fn unflatten(&self, i: usize) -> (usize, usize) {
        (i / self.cols, i % self.cols)
    }

    pub fn azimuth_position(&self, m: usize) -> f64 {
        (m as f64 - (self.rows as f64 - 1.0) / 2.0) * self.cell_azimuth
    }

    pub fn slant_range(&self, n: usize) -> f64 {
        self.origin_range + n as f64 * self.cell_range
    }

    pub fn center_range(&self) -> f64 {
        self.origin_range + (self.cols as f64 - 1.0) / 2.0 * self.cell_range
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneGrid {
    pub geometry: SceneGeometry,
    /// Complex reflectivity, flattened with [`SceneGeometry::index`].
    pub reflectivity: Vec<C64>,
}

impl SceneGrid {
    pub fn zeros(geometry: SceneGeometry) -> Result<Self> {
        geometry.validate()?;
        Ok(SceneGrid {
            geometry,
            reflectivity: vec![C64::new(0.0, 0.0); geometry.len()],
        })
    }

    pub fn from_vec(geometry: SceneGeometry, reflectivity: Vec<C64>) -> Result<Self> {
        geometry.validate()?;
        crate::error::check_len("scene reflectivity", geometry.len(), reflectivity.len())?;
        if reflectivity.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::invalid("reflectivity", "all values must be finite"));
        }
        Ok(SceneGrid {
            geometry,
            reflectivity,
        })
    }

    pub fn get(&self, m: usize, n: usize) -> C64 {
        self.reflectivity[self.geometry.index(m, n)]
    }

    pub fn set(&mut self, m: usize, n: usize, value: C64) {
        let i = self.geometry.index(m, n);
        self.reflectivity[i] = value;
    }

    /// Nonzero cells as `(m, n, value)`.
    pub fn targets(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        self.reflectivity
            .iter()
            .enumerate()
            .filter(|(_, z)| z.norm_sqr() > 0.0)
            .map(|(i, &z)| {
                let (m, n) = self.geometry.unflatten(i);
                (m, n, z)
            })
    }
}

/// Cells with magnitude strictly above `threshold` count as strong.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrongTargetRule {
    pub threshold: f64,
}

impl StrongTargetRule {
    pub fn new(threshold: f64) -> Result<Self> {
        if !(threshold >= 0.0) {
            return Err(Error::invalid("threshold", "must be non-negative"));
        }
        Ok(StrongTargetRule { threshold })
    }
}

/// Fraction of strong cells in the scene.
pub fn sparsity(scene: &SceneGrid, rule: StrongTargetRule) -> f64 {
    let strong = scene
        .reflectivity
        .iter()
        .filter(|z| z.norm() > rule.threshold)
        .count();
    strong as f64 / scene.reflectivity.len() as f64
}

/// Scene with exactly `k` nonzero cells at uniformly chosen positions, magnitudes
/// uniform in `amplitude` and phases uniform in `[0, 2pi)`.
pub fn random_sparse_scene(
    geometry: SceneGeometry,
    k: usize,
    amplitude: (f64, f64),
    seed: u64,
) -> Result<SceneGrid> {
    let mut scene = SceneGrid::zeros(geometry)?;
    let total = geometry.len();
    if k > total {
        return Err(Error::invalid(
            "k",
            format!("{k} strong cells do not fit in {total} cells"),
        ));
    }
    let (low, high) = amplitude;
    if !(low > 0.0 && low <= high && high.is_finite()) {
        return Err(Error::invalid("amplitude", "need 0 < low <= high"));
    }
    let mut rng = rng::stream(seed, &[TAG_SCENE]);
    let mut positions = rand::seq::index::sample(&mut rng, total, k).into_vec();
    positions.sort_unstable();
    for i in positions {
        let mag = if low == high {
            low
        } else {
            rng.random_range(low..=high)
        };
        let phase = rng.random::<f64>() * std::f64::consts::TAU;
        scene.reflectivity[i] = C64::from_polar(mag, phase);
    }
    Ok(scene)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    Azimuth,
    Range,
}

/// Two unit targets placed symmetrically about the grid center along `axis`,
/// `separation` cells apart. A zero separation yields one target of amplitude 2.
pub fn two_point_scene(geometry: SceneGeometry, separation: usize, axis: Axis) -> Result<SceneGrid> {
    let mut scene = SceneGrid::zeros(geometry)?;
    let (along, across) = match axis {
        Axis::Azimuth => (geometry.rows, geometry.cols),
        Axis::Range => (geometry.cols, geometry.rows),
    };
    if separation >= along {
        return Err(Error::invalid(
            "separation",
            format!("{separation} cells does not fit along an axis of {along} cells"),
        ));
    }
    let lo = (along - 1 - separation) / 2;
    let hi = lo + separation;
    let mid = (across - 1) / 2;
    for p in [lo, hi] {
        let (m, n) = match axis {
            Axis::Azimuth => (p, mid),
            Axis::Range => (mid, p),
        };
        let i = geometry.index(m, n);
        scene.reflectivity[i] += C64::new(1.0, 0.0);
    }
    Ok(scene)
}
