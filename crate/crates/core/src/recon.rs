//! l_q-regularized reconstruction by iterative shrinkage-thresholding.

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::rng::{self, TAG_POWER};
use crate::C64;

/// A linear map with its conjugate transpose.
pub trait LinearOperator {
    fn domain_len(&self) -> usize;
    fn range_len(&self) -> usize;
    fn apply(&self, x: &[C64], out: &mut [C64]);
    fn apply_adjoint(&self, y: &[C64], out: &mut [C64]);

    fn forward(&self, x: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.range_len()];
        self.apply(x, &mut out);
        out
    }

    fn adjoint(&self, y: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.domain_len()];
        self.apply_adjoint(y, &mut out);
        out
    }
}

impl<T: LinearOperator + ?Sized> LinearOperator for &T {
    fn domain_len(&self) -> usize {
        (**self).domain_len()
    }
    fn range_len(&self) -> usize {
        (**self).range_len()
    }
    fn apply(&self, x: &[C64], out: &mut [C64]) {
        (**self).apply(x, out)
    }
    fn apply_adjoint(&self, y: &[C64], out: &mut [C64]) {
        (**self).apply_adjoint(y, out)
    }
}

/// Plain row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<C64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        check_len("matrix data", rows * cols, data.len())?;
        Ok(DenseMatrix { rows, cols, data })
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![C64::new(0.0, 0.0); n * n];
        for i in 0..n {
            data[i * n + i] = C64::new(1.0, 0.0);
        }
        DenseMatrix { rows: n, cols: n, data }
    }

    pub fn diagonal(d: &[f64]) -> Self {
        let n = d.len();
        let mut m = Self::identity(n);
        for (i, v) in d.iter().enumerate() {
            m.data[i * n + i] = C64::new(*v, 0.0);
        }
        m
    }
}

impl LinearOperator for DenseMatrix {
    fn domain_len(&self) -> usize {
        self.cols
    }
    fn range_len(&self) -> usize {
        self.rows
    }
    fn apply(&self, x: &[C64], out: &mut [C64]) {
        for (o, row) in out.iter_mut().zip(self.data.chunks(self.cols)) {
            *o = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }
    fn apply_adjoint(&self, y: &[C64], out: &mut [C64]) {
        out.iter_mut().for_each(|o| *o = C64::new(0.0, 0.0));
        for (row, yr) in self.data.chunks(self.cols).zip(y) {
            for (o, a) in out.iter_mut().zip(row) {
                *o += a.conj() * yr;
            }
        }
    }
}

/// Magnitude shrinkage, phase preserved.
///
/// `q = 1`: soft threshold, the minimizer of `|v - u|^2 / 2 + t |u|`.
/// `q < 1`: the minimizer of `|v - u|^2 + t |u|^q`; `q = 1/2` uses the closed
/// form half-thresholding rule, other exponents a scalar root search.
pub fn shrink(value: C64, threshold: f64, q: f64) -> C64 {
    let r = value.norm();
    if r == 0.0 {
        return C64::new(0.0, 0.0);
    }
    let mag = if q == 1.0 {
        (r - threshold).max(0.0)
    } else if q == 0.5 {
        half_threshold(r, threshold)
    } else {
        lq_threshold(r, threshold, q)
    };
    if mag == 0.0 {
        C64::new(0.0, 0.0)
    } else {
        value * (mag / r)
    }
}

/// Cutoff below which the q = 1/2 rule returns zero.
pub fn half_threshold_cutoff(t: f64) -> f64 {
    54f64.cbrt() / 4.0 * t.powf(2.0 / 3.0)
}

fn half_threshold(r: f64, t: f64) -> f64 {
    if r <= half_threshold_cutoff(t) {
        return 0.0;
    }
    let phi = ((t / 8.0) * (r / 3.0).powf(-1.5)).acos();
    2.0 / 3.0 * r * (1.0 + (2.0 * std::f64::consts::PI / 3.0 - 2.0 / 3.0 * phi).cos())
}

fn lq_threshold(r: f64, t: f64, q: f64) -> f64 {
    if t == 0.0 {
        return r;
    }
    let cost = |u: f64| (u - r) * (u - r) + t * u.powf(q);
    let slope = |u: f64| 2.0 * (u - r) + t * q * u.powf(q - 1.0);
    // The cost is concave below u_min and convex above it.
    let u_min = (t * q * (1.0 - q) / 2.0).powf(1.0 / (2.0 - q));
    if u_min >= r || slope(u_min) >= 0.0 {
        return 0.0;
    }
    let (mut lo, mut hi) = (u_min, r);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if slope(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * r {
            break;
        }
    }
    let u = 0.5 * (lo + hi);
    if cost(u) < cost(0.0) {
        u
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReconConfig {
    /// Penalty exponent in (0, 1].
    pub q: f64,
    pub lambda: f64,
    /// Gradient step; `None` uses `0.9 / ||Phi||^2`.
    pub step: Option<f64>,
    pub max_iters: usize,
    /// Stop once the relative iterate change drops below this.
    pub stop_tol: f64,
    /// Iterations over which lambda decreases geometrically from
    /// `max(lambda, max|Phi^H y| / 2)` to `lambda`; 0 disables.
    pub continuation: usize,
}

impl Default for ReconConfig {
    fn default() -> Self {
        ReconConfig {
            q: 1.0,
            lambda: 0.0,
            step: None,
            max_iters: 500,
            stop_tol: 1e-6,
            continuation: 0,
        }
    }
}

impl ReconConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.q > 0.0 && self.q <= 1.0) {
            return Err(Error::invalid("q", format!("{} is outside (0, 1]", self.q)));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::invalid("lambda", "must be non-negative and finite"));
        }
        if let Some(mu) = self.step {
            if !(mu > 0.0 && mu.is_finite()) {
                return Err(Error::invalid("step", "must be positive"));
            }
        }
        if self.max_iters == 0 {
            return Err(Error::invalid("max_iters", "must be at least 1"));
        }
        if !(self.stop_tol >= 0.0) {
            return Err(Error::invalid("stop_tol", "must be non-negative"));
        }
        Ok(())
    }

    /// Threshold handed to [`shrink`] for a given lambda and step.
    pub fn threshold(&self, lambda: f64, step: f64) -> f64 {
        if self.q == 1.0 {
            lambda * step
        } else {
            2.0 * lambda * step
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconResult {
    pub estimate: Vec<C64>,
    pub iterations: usize,
    /// `||y - Phi x||_2` at the returned estimate.
    pub residual: f64,
    /// Objective `||y - Phi x||^2 / 2 + lambda * sum |x|^q` of every iterate,
    /// starting with the initial point.
    pub objective: Vec<f64>,
    /// `||y - Phi x||_2` of every iterate, aligned with `objective`.
    pub residuals: Vec<f64>,
    pub step: f64,
}

pub fn penalty(x: &[C64], q: f64) -> f64 {
    if q == 1.0 {
        x.iter().map(|z| z.norm()).sum()
    } else {
        x.iter().map(|z| z.norm().powf(q)).sum()
    }
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Iterate `x <- shrink(x + mu Phi^H (y - Phi x))` from `x0` (default zero).
pub fn ist_solve<Op: LinearOperator + ?Sized>(
    op: &Op,
    y: &[C64],
    cfg: &ReconConfig,
    x0: Option<&[C64]>,
) -> Result<ReconResult> {
    cfg.validate()?;
    let n = op.domain_len();
    check_len("measurement", op.range_len(), y.len())?;
    let mut x = match x0 {
        Some(v) => {
            check_len("initial estimate", n, v.len())?;
            v.to_vec()
        }
        None => vec![C64::new(0.0, 0.0); n],
    };
    let step = match cfg.step {
        Some(mu) => mu,
        None => {
            let s = estimate_operator_norm(op, 50, 0);
            if s > 0.0 {
                0.9 / (s * s)
            } else {
                1.0
            }
        }
    };

    let lambda_start = if cfg.continuation > 0 {
        let back = op.adjoint(y);
        let peak = back.iter().map(|z| z.norm()).fold(0.0, f64::max);
        cfg.lambda.max(0.5 * peak)
    } else {
        cfg.lambda
    };
    let lambda_at = |k: usize| {
        if k >= cfg.continuation || lambda_start == cfg.lambda || cfg.lambda == 0.0 {
            cfg.lambda
        } else {
            lambda_start * (cfg.lambda / lambda_start).powf(k as f64 / cfg.continuation as f64)
        }
    };

    let mut fx = vec![C64::new(0.0, 0.0); y.len()];
    let mut grad = vec![C64::new(0.0, 0.0); n];
    let mut next = vec![C64::new(0.0, 0.0); n];
    let mut objective = Vec::new();
    let mut residuals = Vec::new();
    let mut iterations = 0;
    for k in 0..cfg.max_iters {
        op.apply(&x, &mut fx);
        for (r, yi) in fx.iter_mut().zip(y) {
            *r = yi - *r;
        }
        let rn = norm(&fx);
        residuals.push(rn);
        objective.push(0.5 * rn * rn + cfg.lambda * penalty(&x, cfg.q));
        op.apply_adjoint(&fx, &mut grad);
        let thr = cfg.threshold(lambda_at(k), step);
        for ((xn, xi), gi) in next.iter_mut().zip(&x).zip(&grad) {
            *xn = shrink(xi + step * gi, thr, cfg.q);
        }
        if next.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::Diverged { iteration: k + 1 });
        }
        let mut diff = 0.0;
        let mut size = 0.0;
        for (a, b) in next.iter().zip(&x) {
            diff += (a - b).norm_sqr();
            size += a.norm_sqr();
        }
        std::mem::swap(&mut x, &mut next);
        iterations = k + 1;
        let change = if size > 0.0 { (diff / size).sqrt() } else if diff > 0.0 { 1.0 } else { 0.0 };
        if k + 1 >= cfg.continuation && change < cfg.stop_tol {
            break;
        }
    }
    op.apply(&x, &mut fx);
    for (r, yi) in fx.iter_mut().zip(y) {
        *r = yi - *r;
    }
    let residual = norm(&fx);
    residuals.push(residual);
    objective.push(0.5 * residual * residual + cfg.lambda * penalty(&x, cfg.q));
    if !residual.is_finite() {
        return Err(Error::Diverged { iteration: iterations });
    }
    Ok(ReconResult {
        estimate: x,
        iterations,
        residual,
        objective,
        residuals,
        step,
    })
}

/// Largest singular value by power iteration on `Phi^H Phi`.
pub fn estimate_operator_norm<Op: LinearOperator + ?Sized>(op: &Op, iters: usize, seed: u64) -> f64 {
    let n = op.domain_len();
    if n == 0 {
        return 0.0;
    }
    let mut rng = rng::stream(seed, &[TAG_POWER]);
    let mut v: Vec<C64> = (0..n)
        .map(|_| C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
        .collect();
    let mut fv = vec![C64::new(0.0, 0.0); op.range_len()];
    let mut w = vec![C64::new(0.0, 0.0); n];
    for _ in 0..iters.max(1) {
        let s = norm(&v);
        if s == 0.0 {
            return 0.0;
        }
        v.iter_mut().for_each(|z| *z /= s);
        op.apply(&v, &mut fv);
        op.apply_adjoint(&fv, &mut w);
        std::mem::swap(&mut v, &mut w);
    }
    let s = norm(&v);
    if s == 0.0 {
        return 0.0;
    }
    v.iter_mut().for_each(|z| *z /= s);
    op.apply(&v, &mut fv);
    norm(&fv)
}

/// Lambda at which the first iterate from zero keeps only the entries of
/// `|Phi^H y|` above the given percentile (linear interpolation between order
/// statistics).
pub fn select_lambda<Op: LinearOperator + ?Sized>(op: &Op, y: &[C64], percentile: f64) -> Result<f64> {
    if !(percentile > 0.0 && percentile <= 100.0) {
        return Err(Error::invalid("percentile", format!("{percentile} is outside (0, 100]")));
    }
    check_len("measurement", op.range_len(), y.len())?;
    let mut mags: Vec<f64> = op.adjoint(y).iter().map(|z| z.norm()).collect();
    if mags.is_empty() {
        return Ok(0.0);
    }
    mags.sort_by(f64::total_cmp);
    let pos = percentile / 100.0 * (mags.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    Ok(mags[lo] + (pos - lo as f64) * (mags[hi] - mags[lo]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn soft_threshold_examples() {
        let v = C64::from_polar(3.0, 0.7);
        let s = shrink(v, 1.0, 1.0);
        assert!((s.norm() - 2.0).abs() < 1e-12);
        assert!((s.arg() - 0.7).abs() < 1e-12);
        assert_eq!(shrink(C64::from_polar(0.9, 1.0), 1.0, 1.0), C64::new(0.0, 0.0));
        assert_eq!(shrink(C64::new(0.0, 0.0), 0.0, 0.5), C64::new(0.0, 0.0));
    }

    /// Brute-force minimizer of `(v - u)^2 + t u^q` on a fine grid.
    fn grid_min(v: f64, t: f64, q: f64) -> f64 {
        let steps = 200_000;
        (0..=steps)
            .map(|i| v * 1.2 * i as f64 / steps as f64)
            .map(|u| (u, (v - u).powi(2) + t * u.powf(q)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap()
            .0
    }

    #[test]
    fn half_threshold_matches_grid_search() {
        let t = 0.8;
        let cut = half_threshold_cutoff(t);
        for &v in &[0.2, 0.5, cut * 0.99, cut * 1.01, 1.0, 2.0, 5.0] {
            let got = shrink(C64::new(v, 0.0), t, 0.5).re;
            let want = grid_min(v, t, 0.5);
            assert!((got - want).abs() < 1e-4 * v.max(1.0), "v={v}: {got} vs {want}");
        }
        assert_eq!(shrink(C64::new(cut * 0.999, 0.0), t, 0.5), C64::new(0.0, 0.0));
    }

    #[test]
    fn general_q_matches_grid_search() {
        for &q in &[0.3, 0.7, 0.9] {
            for &v in &[0.3, 0.8, 1.5, 3.0] {
                let got = shrink(C64::new(0.0, v), 0.6, q).im;
                let want = grid_min(v, 0.6, q);
                assert!((got - want).abs() < 1e-4 * v.max(1.0), "q={q} v={v}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn scalar_lasso_fixed_point() {
        // 1/2 (5 - u)^2 + lambda |u| with lambda = 1 is minimized at u = 4.
        let op = DenseMatrix::identity(1);
        let cfg = ReconConfig {
            lambda: 1.0,
            step: Some(1.0),
            ..Default::default()
        };
        let r = ist_solve(&op, &[C64::new(5.0, 0.0)], &cfg, None).unwrap();
        assert!((r.estimate[0] - C64::new(4.0, 0.0)).norm() < 1e-8);
        let best = (0..=100_000)
            .map(|i| i as f64 * 1e-4)
            .min_by(|a, b| (0.5 * (5.0 - a).powi(2) + a).total_cmp(&(0.5 * (5.0 - b).powi(2) + b)))
            .unwrap();
        assert!((best - 4.0).abs() < 1e-3);
    }

    #[test]
    fn zero_data_stops_immediately() {
        let op = DenseMatrix::diagonal(&[2.0, 1.0, 0.5]);
        let cfg = ReconConfig { lambda: 0.1, ..Default::default() };
        let r = ist_solve(&op, &[C64::new(0.0, 0.0); 3], &cfg, None).unwrap();
        assert_eq!(r.iterations, 1);
        assert!(r.estimate.iter().all(|z| *z == C64::new(0.0, 0.0)));
    }

    #[test]
    fn divergence_is_reported() {
        let op = DenseMatrix::diagonal(&[3.0]);
        let cfg = ReconConfig { step: Some(10.0), max_iters: 2000, ..Default::default() };
        assert!(matches!(
            ist_solve(&op, &[C64::new(1.0, 0.0)], &cfg, None),
            Err(Error::Diverged { .. })
        ));
    }

    #[test]
    fn identity_recovers_data_as_lambda_vanishes() {
        let op = DenseMatrix::identity(4);
        let y: Vec<C64> = (0..4).map(|i| C64::new(i as f64 - 1.5, 0.3 * i as f64)).collect();
        let cfg = ReconConfig { lambda: 1e-12, ..Default::default() };
        let r = ist_solve(&op, &y, &cfg, None).unwrap();
        let err: f64 = r.estimate.iter().zip(&y).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        assert!(err / norm(&y) <= 1e-6);
    }

    #[test]
    fn operator_norm_known_spectra() {
        assert!((estimate_operator_norm(&DenseMatrix::identity(5), 3, 1) - 1.0).abs() < 1e-6);
        assert!((estimate_operator_norm(&DenseMatrix::diagonal(&[3.0, 1.0]), 25, 1) - 3.0).abs() < 1e-3);
    }

    #[test]
    fn lambda_percentiles() {
        let op = DenseMatrix::diagonal(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        let y = vec![C64::new(1.0, 0.0); 5];
        assert_eq!(select_lambda(&op, &[C64::new(0.0, 0.0); 5], 50.0).unwrap(), 0.0);
        assert_eq!(select_lambda(&op, &y, 100.0).unwrap(), 5.0);
        assert_eq!(select_lambda(&op, &y, 50.0).unwrap(), 3.0);
        assert!((select_lambda(&op, &y, 10.0).unwrap() - 1.4).abs() < 1e-12);
        assert!(select_lambda(&op, &y, 0.0).is_err());
    }

    fn random_matrix(rows: usize, cols: usize, seed: u64) -> DenseMatrix {
        let mut rng = rng::stream(seed, &[]);
        let data = (0..rows * cols)
            .map(|_| C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
            .collect();
        DenseMatrix::new(rows, cols, data).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn objective_non_increasing(seed in any::<u64>(), lam in 0.01f64..2.0) {
            let op = random_matrix(12, 20, seed);
            let y = random_matrix(12, 1, seed ^ 1).data;
            let s = estimate_operator_norm(&op, 200, 0);
            let cfg = ReconConfig { lambda: lam, step: Some(1.0 / (s * s * 1.001)), max_iters: 200, stop_tol: 0.0, ..Default::default() };
            let r = ist_solve(&op, &y, &cfg, None).unwrap();
            for w in r.objective.windows(2) {
                prop_assert!(w[1] <= w[0] * (1.0 + 1e-9) + 1e-12, "{} -> {}", w[0], w[1]);
            }
        }

        #[test]
        fn scaling_covariance(seed in any::<u64>(), c in 0.1f64..10.0) {
            let op = random_matrix(10, 16, seed);
            let y = random_matrix(10, 1, seed ^ 2).data;
            let lam = select_lambda(&op, &y, 80.0).unwrap();
            let cfg = ReconConfig { lambda: lam, max_iters: 100, stop_tol: 0.0, ..Default::default() };
            let a = ist_solve(&op, &y, &cfg, None).unwrap();
            let cy: Vec<C64> = y.iter().map(|z| z * c).collect();
            let lam_c = select_lambda(&op, &cy, 80.0).unwrap();
            let b = ist_solve(&op, &cy, &ReconConfig { lambda: lam_c, ..cfg }, None).unwrap();
            let scale = norm(&b.estimate).max(1e-300);
            for (u, v) in a.estimate.iter().zip(&b.estimate) {
                prop_assert!((u * c - v).norm() <= 1e-8 * scale.max(1.0));
            }
        }

        #[test]
        fn returned_point_is_a_fixed_point(seed in any::<u64>()) {
            let op = random_matrix(15, 10, seed);
            let y = random_matrix(15, 1, seed ^ 3).data;
            let cfg = ReconConfig { lambda: 0.5, max_iters: 5000, stop_tol: 1e-10, ..Default::default() };
            let r = ist_solve(&op, &y, &cfg, None).unwrap();
            let res: Vec<C64> = op.forward(&r.estimate).iter().zip(&y).map(|(a, b)| b - a).collect();
            let g = op.adjoint(&res);
            let thr = cfg.threshold(cfg.lambda, r.step);
            let moved: Vec<C64> = r.estimate.iter().zip(&g).map(|(x, g)| shrink(x + r.step * g, thr, 1.0)).collect();
            let diff: f64 = moved.iter().zip(&r.estimate).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
            prop_assert!(diff <= 1e-6 * norm(&r.estimate).max(1e-12));
        }

        #[test]
        fn masking_never_increases_norm(seed in any::<u64>(), keep in proptest::collection::vec(any::<bool>(), 8)) {
            let full = random_matrix(8, 6, seed);
            let mut masked = full.clone();
            for (r, k) in keep.iter().enumerate() {
                if !k {
                    masked.data[r * 6..(r + 1) * 6].iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
                }
            }
            let a = estimate_operator_norm(&full, 500, 3);
            let b = estimate_operator_norm(&masked, 500, 3);
            prop_assert!(b <= a + 1e-6);
        }
    }
}
