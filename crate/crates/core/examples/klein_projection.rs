//! Projects a convex curve into the Klein disc and compares the intrinsic
//! curvature with the one obtained from the Euclidean image.

use std::sync::Arc;

use hyperflow::functionals::{klein_consistency, klein_curvature_factor, klein_project};
use hyperflow::geometry::RadialState;
use hyperflow::SphereGrid;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = Arc::new(SphereGrid::new(1, 256)?);
    let state = RadialState::from_fn(grid.clone(), 0.0, |t| 0.9 + 0.08 * (2.0 * t).cos())?;
    let k = klein_project(&state)?;
    println!("{:>8} {:>10} {:>10} {:>10} {:>12}", "theta", "r", "uhat", "Khat", "K");
    for j in (0..grid.len()).step_by(32) {
        let kk = k.khat[j] * klein_curvature_factor(1, k.r[j], k.uhat[j]);
        println!(
            "{:8.4} {:10.6} {:10.6} {:10.6} {:12.8}",
            grid.theta()[j],
            k.r[j],
            k.uhat[j],
            k.khat[j],
            kk
        );
    }
    for nodes in [64, 128, 256, 512] {
        let g = Arc::new(SphereGrid::new(1, nodes)?);
        let s = RadialState::from_fn(g, 0.0, |t| 0.9 + 0.08 * (2.0 * t).cos())?;
        println!("N = {nodes:4}: curvature-law mismatch {:.3e}", klein_consistency(&s)?);
    }
    Ok(())
}
