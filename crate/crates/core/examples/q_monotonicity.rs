//! Q along the unnormalized flow with α = 3 and f̃ = 2 + 0.5 cos 2θ.

use hyperflow::{run, DataFamily, FlowMode, FlowProblem, InitialShape, NumericControls, ProblemConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let problem = FlowProblem::new(ProblemConfig {
        n: 1,
        alpha: 3.0,
        nodes: 128,
        mode: FlowMode::Unnormalized,
        data: DataFamily::EvenCosine { c0: 2.0, coeffs: vec![0.5] },
        initial: InitialShape::Sphere { rho: 0.3 },
        controls: NumericControls { trace_stride: 500, ..Default::default() },
    })?;
    let result = run(&problem);
    println!("regime: {}", problem.regime);
    for row in result.trace.rows.iter().step_by(4) {
        println!("t = {:8.4}  Q = {:.12}  residual = {:.2e}", row.t, row.q, row.residual_linf);
    }
    let worst = result.trace.worst_decrease(|r| r.q, 1e-10);
    println!("{}; worst Q decrease beyond tolerance: {worst:.2e}", result.verdict);
    Ok(())
}
