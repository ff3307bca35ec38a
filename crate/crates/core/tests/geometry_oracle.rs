//! Curvature of radial curves against oracles that share no code with the
//! library: the hyperboloid model with 8th-order differences on a 4x finer
//! grid, and the polar formula with exact derivatives.

mod common;

use std::f64::consts::PI;
use std::sync::Arc;

use hyperflow::geometry::{check_convex, geometry_fields, RadialState};
use hyperflow::SphereGrid;

fn profile(t: f64) -> f64 {
    1.0 + 0.1 * (2.0 * t).cos()
}

fn hyperboloid_curvature(t: f64, h: f64) -> f64 {
    common::hyperboloid_curvature(&profile, t, h)
}

/// Polar formula with exact derivatives of the profile.
fn polar_curvature(t: f64, amp: f64) -> f64 {
    let r = 1.0 + amp * (2.0 * t).cos();
    let p = -2.0 * amp * (2.0 * t).sin();
    let q = -4.0 * amp * (2.0 * t).cos();
    let (s, c) = (r.sinh(), r.cosh());
    (s * s * c + 2.0 * c * p * p - s * q) / (s * s + p * p).powf(1.5)
}

fn library_curvature(nodes: usize) -> (Arc<SphereGrid>, Vec<f64>) {
    let grid = Arc::new(SphereGrid::new(1, nodes).unwrap());
    let state = RadialState::from_fn(grid.clone(), 0.0, profile).unwrap();
    (grid, geometry_fields(&state).unwrap().gauss())
}

#[test]
fn oracles_agree_with_each_other() {
    let h = 2.0 * PI / 2048.0;
    for j in 0..64 {
        let t = j as f64 * PI / 32.0;
        let a = hyperboloid_curvature(t, h);
        let b = polar_curvature(t, 0.1);
        assert!((a - b).abs() < 1e-9 * b.abs(), "θ = {t}: {a} vs {b}");
    }
}

#[test]
fn curvature_at_reference_angles_n512() {
    let (grid, k) = library_curvature(512);
    let h = 2.0 * PI / 2048.0;
    for j in [0, 64, 128] {
        let t = grid.theta()[j];
        let oracle = hyperboloid_curvature(t, h);
        let rel = (k[j] - oracle).abs() / oracle.abs();
        assert!(rel < 1e-8, "θ = {t}: relative error {rel:e}");
    }
}

#[test]
fn curvature_converges_at_fourth_order() {
    let errs: Vec<f64> = [64, 128, 256, 512]
        .into_iter()
        .map(|n| {
            let (grid, k) = library_curvature(n);
            let h = 2.0 * PI / (4 * n) as f64;
            grid.theta()
                .iter()
                .zip(&k)
                .map(|(&t, kk)| (kk - hyperboloid_curvature(t, h)).abs())
                .fold(0.0, f64::max)
        })
        .collect();
    for w in errs.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!((order - 4.0).abs() < 0.3, "observed order {order}, errors {errs:?}");
    }
    assert!(errs[3] < 1e-8);
}

#[test]
fn support_times_w_is_phi() {
    for nodes in [64, 512] {
        let grid = Arc::new(SphereGrid::new(1, nodes).unwrap());
        let state = RadialState::from_fn(grid, 0.0, profile).unwrap();
        for g in geometry_fields(&state).unwrap().nodes {
            assert!((g.u * g.w - g.phi).abs() <= 1e-14 * g.phi);
        }
    }
}

#[test]
fn strong_perturbation_is_not_convex() {
    let fine: f64 = (0..20000)
        .map(|j| polar_curvature(j as f64 * 2.0 * PI / 20000.0, 0.9))
        .fold(f64::INFINITY, f64::min);
    assert!(fine < 0.0, "oracle finds no negative curvature");
    let grid = Arc::new(SphereGrid::new(1, 512).unwrap());
    let state = RadialState::from_fn(grid, 0.0, |t| 1.0 + 0.9 * (2.0 * t).cos()).unwrap();
    assert!(!check_convex(&geometry_fields(&state).unwrap()).convex);
}

#[test]
fn meridian_curvature_of_rotation_surface() {
    // A meridian plane through the axis is totally geodesic, so one principal
    // curvature of the surface is the curvature of the meridian curve.
    let grid = Arc::new(SphereGrid::new(2, 257).unwrap());
    let state = RadialState::from_fn(grid.clone(), 0.0, profile).unwrap();
    let fields = geometry_fields(&state).unwrap();
    let h = PI / 1024.0;
    for (j, g) in fields.nodes.iter().enumerate() {
        let oracle = hyperboloid_curvature(grid.theta()[j], h);
        let err = g.kappa.iter().map(|k| (k - oracle).abs()).fold(f64::INFINITY, f64::min);
        assert!(err < 1e-6, "node {j}: {:?} vs {oracle}", g.kappa);
    }
}
