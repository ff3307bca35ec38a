//! Curvature of the curve ρ = 1 + 0.1 cos 2θ in H² under grid refinement,
//! against a reference computed from exact derivatives.

use std::sync::Arc;

use hyperflow::geometry::{geometry_fields, node_geometry, RadialState};
use hyperflow::SphereGrid;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let profile = |t: f64| 1.0 + 0.1 * (2.0 * t).cos();
    for nodes in [64, 128, 256, 512] {
        let grid = Arc::new(SphereGrid::new(1, nodes)?);
        let state = RadialState::from_fn(grid.clone(), 0.0, profile)?;
        let fields = geometry_fields(&state)?;
        let mut k_err: f64 = 0.0;
        let mut uw_err: f64 = 0.0;
        for (t, g) in grid.theta().iter().zip(&fields.nodes) {
            let exact = node_geometry(
                1,
                profile(*t),
                [-0.2 * (2.0 * t).sin(), 0.0],
                [[-0.4 * (2.0 * t).cos(), 0.0], [0.0, 0.0]],
            );
            k_err = k_err.max((g.gauss - exact.gauss).abs());
            uw_err = uw_err.max((g.u * g.w - g.phi).abs());
        }
        println!("N = {nodes:4}: max |K - K_exact| = {k_err:.3e}, max |u w - phi| = {uw_err:.1e}");
    }
    Ok(())
}
