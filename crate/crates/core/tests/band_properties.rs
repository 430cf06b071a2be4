use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use bloch_core::bands::{eval_bands, export_surface, find_critical_points, PointClass};
use bloch_core::*;

const FIGURE_POINT: [i64; 9] = [4, 1, 8, 7, 5, 1, 3, 2, 6];

fn model(alpha: &[f64]) -> BandModel {
    BandModel::new(&mother(), alpha, Convention::Divergence).unwrap()
}

/// Central difference with a step chosen for ~1e-10 truncation error.
fn fd_gradient(m: &BandModel, k: [f64; 2], band: usize) -> [f64; 2] {
    let h = 1e-5;
    let mut g = [0.0; 2];
    for (i, gi) in g.iter_mut().enumerate() {
        let mut p = k;
        let mut q = k;
        p[i] += h;
        q[i] -= h;
        *gi = (m.value(p, band) - m.value(q, band)) / (2.0 * h);
    }
    g
}

#[test]
fn gradient_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    while checked < 1000 {
        let alpha: Vec<f64> = (0..9).map(|_| rng.random_range(0.5..10.0)).collect();
        let m = model(&alpha);
        let k = [rng.random_range(-PI..PI), rng.random_range(-PI..PI)];
        // skip points close to a band crossing where lambda is not smooth
        if m.discriminant(k).sqrt() < 1e-2 * (1.0 + m.weight_sum()) {
            continue;
        }
        for band in [1, 2] {
            let a = m.gradient(k, band);
            let f = fd_gradient(&m, k, band);
            let scale = m.weight_sum().max(a[0].hypot(a[1]));
            for i in 0..2 {
                assert!(
                    (a[i] - f[i]).abs() <= 1e-6 * scale,
                    "band {band} at {k:?}: analytic {a:?} vs fd {f:?}"
                );
            }
        }
        checked += 1;
    }
}

#[test]
fn hessian_matches_finite_differences() {
    let m = model(&FIGURE_POINT.map(|a| a as f64));
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let k = [rng.random_range(-PI..PI), rng.random_range(-PI..PI)];
        for band in [1, 2] {
            let a = m.hessian(k, band);
            let f = m.fd_hessian(k, band, 1e-4);
            for i in 0..2 {
                for j in 0..2 {
                    assert!((a[i][j] - f[i][j]).abs() <= 1e-4 * (1.0 + m.weight_sum()));
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn spectrum_is_bounded_and_even(
        alpha in prop::collection::vec(0.0f64..10.0, 9),
        k in prop::array::uniform2(-PI..PI),
    ) {
        let m = model(&alpha);
        let [l1, l2] = m.eigenvalues(k);
        let g = mother();
        // Gershgorin: each row sum of |entries| is at most twice the weighted degree
        let mut degree = [0.0f64; 2];
        for (&(u, v), w) in g.edge_ends().iter().zip(&alpha) {
            degree[u] += w;
            degree[v] += w;
        }
        let top = 2.0 * degree[0].max(degree[1]);
        let tol = 1e-9 * (1.0 + top);
        prop_assert!(l1 >= -tol && l1 <= l2 + tol && l2 <= top + tol);
        let [r1, r2] = m.eigenvalues([-k[0], -k[1]]);
        prop_assert!((l1 - r1).abs() <= tol && (l2 - r2).abs() <= tol);
        let sum = 2.0 * alpha.iter().sum::<f64>();
        let zero = m.eigenvalues([0.0, 0.0]);
        prop_assert!(zero[0].abs() <= tol);
        prop_assert!(zero[0] + zero[1] <= sum + tol);
    }
}

/// Critical points found numerically satisfy the polynomial system.
#[test]
fn critical_points_solve_the_system() {
    let sys = build_system(&build_symbol(&mother(), Convention::Divergence).unwrap()).unwrap();
    let f = sys.specialize(&FIGURE_POINT).unwrap();
    let m = model(&FIGURE_POINT.map(|a| a as f64));
    let opts = BandOptions::default();
    let grid = eval_bands(&m, &opts).unwrap();
    let report = find_critical_points(&m, &grid, &opts);
    assert!(report.dropped.is_empty());
    assert_eq!(report.points.len(), 8);
    for p in &report.points {
        assert_ne!(p.class, PointClass::Degenerate);
        let z: Vec<Complex64> = p.k.iter().map(|&x| Complex64::from_polar(1.0, x)).collect();
        let point = [Complex64::new(p.lambda, 0.0), z[0], z[1], z[0].inv(), z[1].inv()];
        for fi in &f[..3] {
            let v = fi.eval_complex(&point);
            assert!(v.norm() <= 1e-6, "residual {v} at {p:?}");
        }
        let det = f[3].eval_complex(&point);
        assert!(det.norm() > 1e-3, "Hessian equation vanishes at a nondegenerate point {p:?}");
    }
}

#[test]
fn csv_round_trip() {
    let m = model(&FIGURE_POINT.map(|a| a as f64));
    let opts = BandOptions {
        n: 16,
        ..BandOptions::default()
    };
    let grid = eval_bands(&m, &opts).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("surface.csv");
    export_surface(&grid, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k1,k2,lambda1,lambda2"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 16 * 16);
    for i in 0..16 {
        for j in 0..16 {
            let row = &rows[i * 16 + j];
            let k = grid.k(i, j);
            let rel = |a: f64, b: f64| (a - b).abs() <= 1e-10 * (1.0 + b.abs());
            assert!(rel(row[0], k[0]) && rel(row[1], k[1]));
            assert!(rel(row[2], grid.band(1)[i * 16 + j]));
            assert!(rel(row[3], grid.band(2)[i * 16 + j]));
            assert!(row[2] <= row[3]);
        }
    }
}
