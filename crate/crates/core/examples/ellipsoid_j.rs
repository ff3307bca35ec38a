//! J on preimages of Klein rotation ellipsoids with e1 → 1: the support
//! function approaches 1 while J stays bounded.

use std::sync::Arc;

use hyperflow::functionals::{ellipsoid_radius, j_functional, FunctionalConfig, KleinState};
use hyperflow::SphereGrid;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = Arc::new(SphereGrid::new(2, 257)?);
    let e2 = 0.5;
    let cfg = FunctionalConfig::new(0.5 * e2, 0.1, 1e-12)?;
    let mut prev: Option<f64> = None;
    for e1 in [0.9, 0.99, 0.999, 0.9999] {
        let r: Vec<f64> = grid.theta().iter().map(|&t| ellipsoid_radius(e1, e2, t)).collect();
        let k = KleinState::from_euclidean_radial(&grid, &r)?;
        let j = j_functional(&k, &grid, &cfg)?;
        let umax = k.uhat.iter().copied().fold(0.0, f64::max);
        let growth = prev.map(|p| format!("{:+.2}%", 100.0 * (j - p) / p)).unwrap_or_default();
        println!("e1 = {e1:<8} max uhat = {umax:.6}  J = {j:.6} {growth}");
        prev = Some(j);
    }
    Ok(())
}
