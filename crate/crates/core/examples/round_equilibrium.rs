//! Geodesic circles flowing to the round equilibrium `ρ* = arccosh 2`
//! under `α = 2`, `f̃ = 2` in H².

use std::time::Instant;

use hyperflow::{run, DataFamily, FlowMode, FlowProblem, InitialShape, NumericControls, ProblemConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let target = 2.0_f64.acosh();
    for rho0 in [0.3, 2.0] {
        let problem = FlowProblem::new(ProblemConfig {
            n: 1,
            alpha: 2.0,
            nodes: 256,
            mode: FlowMode::Unnormalized,
            data: DataFamily::Constant { c: 2.0 },
            initial: InitialShape::Sphere { rho: rho0 },
            controls: NumericControls::default(),
        })?;
        let clock = Instant::now();
        let result = run(&problem);
        let err = result.state.rho.iter().map(|r| (r - target).abs()).fold(0.0, f64::max);
        println!(
            "rho0 = {rho0}: {} after {} steps, t = {:.3}, max|rho - arccosh 2| = {err:.2e}, {:.2?}",
            result.verdict,
            result.steps,
            result.state.t,
            clock.elapsed()
        );
    }
    Ok(())
}
