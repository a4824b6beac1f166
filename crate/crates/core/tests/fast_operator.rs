mod common;

use common::*;
use sparse_sar::eval::resolves_pair;
use sparse_sar::fastops::{fast_adjoint, fast_forward, rda_focus, DecoupledOperator};
use sparse_sar::radar::simulate_echo;
use sparse_sar::rng::stream;
use sparse_sar::scene::{two_point_scene, Axis, SceneGrid};
use sparse_sar::C64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

fn random_vec(len: usize, seed: u64) -> Vec<C64> {
    let mut rng = stream(seed, &[42]);
    (0..len)
        .map(|_| C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
        .collect()
}

fn random_mask(len: usize, keep: f64, seed: u64) -> Vec<bool> {
    let mut rng = stream(seed, &[43]);
    (0..len).map(|_| rng.random::<f64>() < keep).collect()
}

fn argmax(v: &[C64]) -> usize {
    (0..v.len()).max_by(|&a, &b| v[a].norm().total_cmp(&v[b].norm())).unwrap()
}

/// Scene sizes with data windows 16 pulses and 32 bins wider.
const GRIDS: [(usize, usize); 9] = [
    (16, 32), (16, 64), (16, 128),
    (32, 32), (32, 64), (32, 128),
    (64, 32), (64, 64), (64, 128),
];

#[test]
fn adjoint_identity_on_every_grid() {
    for (i, &(m, n)) in GRIDS.iter().enumerate() {
        let (c, g) = low_curvature(m + 16, n + 32, m, n);
        let mask = random_mask(c.pulses * c.range_samples, 0.7, i as u64);
        let op = DecoupledOperator::new(&c, &g, mask).unwrap();
        let x = random_vec(g.len(), 2 * i as u64);
        let y = random_vec(c.pulses * c.range_samples, 2 * i as u64 + 1);
        let ax = fast_forward(&op, &x).unwrap();
        let lhs = inner(&ax, &y);
        let rhs = inner(&x, &fast_adjoint(&op, &y).unwrap());
        let err = (lhs - rhs).norm() / (norm(&ax) * norm(&y));
        assert!(err <= 1e-6, "{m}x{n}: {err:e}");
    }
}

#[test]
fn single_target_matches_the_exact_echo() {
    for &(m, n) in &GRIDS {
        let (c, g) = low_curvature(m + 16, n + 32, m, n);
        let op = DecoupledOperator::new(&c, &g, vec![true; c.pulses * c.range_samples]).unwrap();
        for &(a, b) in &[(m / 2, n / 2), (m / 5, n - 3), (m - 2, 1)] {
            let scene = SceneGrid::from_vec(g, one_hot(&g, a, b)).unwrap();
            let exact = simulate_echo(&c, &scene, &full_plan(&c), None, 0).unwrap();
            let err = relative_l2(&fast_forward(&op, &scene.reflectivity).unwrap(), &exact.data);
            assert!(err <= 0.05, "{m}x{n} cell ({a}, {b}): {err}");
        }
    }
}

#[test]
fn short_pulse_preset_stays_close() {
    let (c, g) = small(24, 32, 24, 32);
    let op = DecoupledOperator::new(&c, &g, vec![true; c.pulses * c.range_samples]).unwrap();
    let scene = SceneGrid::from_vec(g, one_hot(&g, 10, 20)).unwrap();
    let exact = simulate_echo(&c, &scene, &full_plan(&c), None, 0).unwrap();
    assert!(relative_l2(&op.forward(&scene.reflectivity), &exact.data) <= 0.05);
}

#[test]
fn matched_filter_focuses_on_the_target() {
    let (c, g) = low_curvature(48, 96, 32, 64);
    let op = DecoupledOperator::new(&c, &g, vec![true; c.pulses * c.range_samples]).unwrap();
    for &(a, b) in &[(16, 32), (5, 50), (27, 9)] {
        let x = one_hot(&g, a, b);
        let image = fast_adjoint(&op, &fast_forward(&op, &x).unwrap()).unwrap();
        let (pm, pn) = g.unflatten(argmax(&image));
        assert!(pm.abs_diff(a) <= 1 && pn.abs_diff(b) <= 1, "({a}, {b}) -> ({pm}, {pn})");
        // the mainlobe region holds most of the energy
        let total: f64 = image.iter().map(|z| z.norm_sqr()).sum();
        let local: f64 = (a.saturating_sub(2)..=(a + 2).min(g.rows - 1))
            .flat_map(|m| (b.saturating_sub(2)..=(b + 2).min(g.cols - 1)).map(move |n| (m, n)))
            .map(|(m, n)| image[g.index(m, n)].norm_sqr())
            .sum();
        assert!(local >= 0.5 * total, "{}", local / total);
    }
}

#[test]
fn range_doppler_focus_places_and_scales_targets() {
    // window holds every target's full aperture and pulse
    let (c, g) = low_curvature(32 + 48, 64 + 258, 32, 64);
    for &(a, b) in &[(16, 32), (5, 50), (27, 9)] {
        let mut scene = SceneGrid::zeros(g).unwrap();
        scene.set(a, b, C64::from_polar(2.0, 0.7));
        let echo = simulate_echo(&c, &scene, &full_plan(&c), None, 0).unwrap();
        let image = rda_focus(&echo, &c, &g).unwrap();
        let (pm, pn) = g.unflatten(argmax(&image));
        assert!(pm.abs_diff(a) <= 1 && pn.abs_diff(b) <= 1, "({a}, {b}) -> ({pm}, {pn})");
        let peak = image[g.index(a, b)];
        assert!((peak.norm() - 2.0).abs() < 0.2, "{peak}");
    }
}

#[test]
fn range_doppler_resolves_one_rayleigh_cell() {
    // c / 2B is 1.2 cells at this sampling rate, so two cells apart is resolvable
    let (c, g) = low_curvature(31 + 48, 31 + 258, 31, 31);
    for axis in [Axis::Range, Axis::Azimuth] {
        let scene = two_point_scene(g, 2, axis).unwrap();
        let echo = simulate_echo(&c, &scene, &full_plan(&c), None, 0).unwrap();
        let image = rda_focus(&echo, &c, &g).unwrap();
        assert!(resolves_pair(&image, &g, 2, axis), "{axis:?}");
    }
}

#[test]
fn range_doppler_rejects_undersampled_data() {
    let (c, g) = low_curvature(48, 96, 32, 64);
    let scene = SceneGrid::from_vec(g, one_hot(&g, 3, 3)).unwrap();
    let mut echo = simulate_echo(&c, &scene, &full_plan(&c), None, 0).unwrap();
    echo.mask[5] = false;
    echo.data[5] = C64::new(0.0, 0.0);
    assert!(rda_focus(&echo, &c, &g).is_err());
}

#[test]
fn mask_is_idempotent() {
    let (c, g) = low_curvature(32, 64, 16, 32);
    let mask = random_mask(c.pulses * c.range_samples, 0.5, 9);
    let op = DecoupledOperator::new(&c, &g, mask.clone()).unwrap();
    let x = random_vec(g.len(), 3);
    let y = op.forward(&x);
    for (v, &keep) in y.iter().zip(&mask) {
        if !keep {
            assert_eq!(*v, C64::new(0.0, 0.0));
        }
    }
    // masking the measured data changes nothing
    let masked: Vec<C64> = y.iter().zip(&mask).map(|(v, &k)| if k { *v } else { C64::new(0.0, 0.0) }).collect();
    assert_eq!(op.adjoint(&masked), op.adjoint(&y));
    // restricting to the same mask again gives the same operator
    let again = op.with_mask(mask).unwrap();
    assert_eq!(again.forward(&x), y);
}

#[test]
fn rejects_mismatched_grids() {
    let (c, _) = low_curvature(32, 64, 16, 32);
    let g = sparse_sar::scene::SceneGeometry::new(16, 32, 1.0, 1.0, 5000.0).unwrap();
    assert!(DecoupledOperator::new(&c, &g, vec![true; 32 * 64]).is_err());
    let too_big = c.matched_geometry(40, 32).unwrap();
    assert!(DecoupledOperator::new(&c, &too_big, vec![true; 32 * 64]).is_err());
    let g = c.matched_geometry(16, 32).unwrap();
    assert!(DecoupledOperator::new(&c, &g, vec![true; 7]).is_err());
}

use sparse_sar::recon::LinearOperator;
