//! Two different convex initial curves flow to the same solution of
//! φ^α K = f̃ u.

use hyperflow::functionals::uniqueness_check;
use hyperflow::{run, DataFamily, FlowMode, FlowProblem, InitialShape, NumericControls, ProblemConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = |initial| ProblemConfig {
        n: 1,
        alpha: 3.0,
        nodes: 128,
        mode: FlowMode::Unnormalized,
        data: DataFamily::EvenCosine { c0: 2.0, coeffs: vec![0.5] },
        initial,
        controls: NumericControls::default(),
    };
    let a = FlowProblem::new(config(InitialShape::Sphere { rho: 0.3 }))?;
    let b = FlowProblem::new(config(InitialShape::KleinEllipsoid { e1: 0.6, e2: 0.35 }))?;
    let (ra, rb) = rayon::join(|| run(&a), || run(&b));
    println!("circle:  {} after {} steps", ra.verdict, ra.steps);
    println!("ellipse: {} after {} steps", rb.verdict, rb.steps);
    println!("max |rho_a - rho_b| = {:.3e}", uniqueness_check(&ra, &rb)?);
    Ok(())
}
