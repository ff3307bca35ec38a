//! Functionals against quadratures written independently of the library.

mod common;

use std::f64::consts::PI;
use std::sync::Arc;

use hyperflow::functionals::{
    conserved_integral, ellipsoid_radius, j_functional, klein_project, q_functional, residual, uniqueness_check,
    FunctionalConfig, KleinState,
};
use hyperflow::geometry::{geometry_fields, RadialState};
use hyperflow::{run, DataFamily, FlowMode, FlowProblem, InitialShape, NumericControls, ProblemConfig, SphereGrid};

use common::simpson;

#[test]
fn q_of_equilibrium_circle() {
    let rho0 = 2.0_f64.acosh();
    let r0 = rho0.tanh();
    let a = 0.4;
    let psi = simpson(|s| 1.0 / (s * (1.0 - s * s).sqrt()), a, r0, 200_000);
    let omega = simpson(|s| 1.0 / (s * (1.0 - s * s)), a, r0, 200_000);
    // ∫ dσ over the Gauss image of a closed convex curve is 2π.
    let oracle = 2.0 * PI * (2.0 * psi - omega);

    let grid = Arc::new(SphereGrid::new(1, 64).unwrap());
    let state = RadialState::geodesic_sphere(grid.clone(), rho0).unwrap();
    let k = klein_project(&state).unwrap();
    let cfg = FunctionalConfig::new(a, 0.5, 1e-12).unwrap();
    let q = q_functional(&k, &vec![2.0; 64], 2.0, &grid, &cfg).unwrap();
    assert!((q - oracle).abs() < 1e-10, "{q} vs {oracle}");
}

fn ellipsoid_j_oracle(e1: f64, e2: f64, a: f64) -> f64 {
    common::ellipsoid_j(e1, e2, a)
}

#[test]
fn j_of_klein_ellipsoid() {
    let (e1, e2, a) = (0.9, 0.5, 0.25);
    let oracle = ellipsoid_j_oracle(e1, e2, a);
    let grid = Arc::new(SphereGrid::new(2, 1025).unwrap());
    let r: Vec<f64> = grid.theta().iter().map(|&t| ellipsoid_radius(e1, e2, t)).collect();
    let k = KleinState::from_euclidean_radial(&grid, &r).unwrap();
    let cfg = FunctionalConfig::new(a, 0.1, 1e-12).unwrap();
    let j = j_functional(&k, &grid, &cfg).unwrap();
    assert!((j - oracle).abs() < 1e-8, "{j} vs {oracle}, diff {:e}", j - oracle);
}

#[test]
fn j_stays_bounded_as_the_ellipsoid_stretches() {
    let grid = Arc::new(SphereGrid::new(2, 257).unwrap());
    let cfg = FunctionalConfig::new(0.25, 0.1, 1e-12).unwrap();
    let mut prev_umax = 0.0;
    for e1 in [0.9, 0.99, 0.999] {
        let r: Vec<f64> = grid.theta().iter().map(|&t| ellipsoid_radius(e1, 0.5, t)).collect();
        let k = KleinState::from_euclidean_radial(&grid, &r).unwrap();
        let j = j_functional(&k, &grid, &cfg).unwrap();
        let bound = ellipsoid_j_oracle(1.0 - 1e-9, 0.5, 0.25);
        assert!(j < bound, "J = {j} above the limiting value {bound}");
        let umax = k.uhat.iter().copied().fold(0.0, f64::max);
        assert!(umax > prev_umax);
        prev_umax = umax;
    }
}

#[test]
fn conserved_integral_of_circle() {
    let grid = Arc::new(SphereGrid::new(1, 64).unwrap());
    let (rho0, b) = (0.7_f64, 0.3_f64);
    let state = RadialState::geodesic_sphere(grid, rho0).unwrap();
    let cfg = FunctionalConfig::new(0.2, b, 1e-12).unwrap();
    let v = conserved_integral(&state, &vec![1.0; 64], 2.0, &cfg).unwrap();
    let inner = simpson(|s| 1.0 / s.sinh(), b, rho0, 100_000);
    assert!((v - 2.0 * PI * inner).abs() < 1e-11);
    let at_b = RadialState::geodesic_sphere(state.grid.clone(), b).unwrap();
    assert_eq!(conserved_integral(&at_b, &vec![1.0; 64], 2.0, &cfg).unwrap(), 0.0);
}

#[test]
fn residual_of_circle_with_doubled_data() {
    let grid = Arc::new(SphereGrid::new(1, 64).unwrap());
    let state = RadialState::geodesic_sphere(grid.clone(), 2.0_f64.acosh()).unwrap();
    let fields = geometry_fields(&state).unwrap();
    let r = residual(&fields, &grid, &vec![4.0; 64], 2.0, FlowMode::Unnormalized);
    assert!((r.linf - 0.5).abs() < 1e-14);
    let r = residual(&fields, &grid, &vec![2.0; 64], 2.0, FlowMode::Unnormalized);
    assert!(r.linf < 1e-14);
}

#[test]
fn identical_runs_have_zero_distance() {
    let problem = FlowProblem::new(ProblemConfig {
        n: 1,
        alpha: 2.0,
        nodes: 32,
        mode: FlowMode::Unnormalized,
        data: DataFamily::Constant { c: 2.0 },
        initial: InitialShape::Sphere { rho: 1.0 },
        controls: NumericControls { tol_rel: 1e-6, ..Default::default() },
    })
    .unwrap();
    let a = run(&problem);
    let b = run(&problem);
    assert_eq!(uniqueness_check(&a, &b).unwrap(), 0.0);
    let mut other = problem.config.clone();
    other.nodes = 64;
    let c = run(&FlowProblem::new(other).unwrap());
    assert!(uniqueness_check(&a, &c).is_err());
}
