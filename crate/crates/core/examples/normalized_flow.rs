//! Normalized flow: conserved integral, decreasing J, and the constant c of
//! the limiting equation.

use hyperflow::{run, DataFamily, FlowMode, FlowProblem, InitialShape, NumericControls, ProblemConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let problem = FlowProblem::new(ProblemConfig {
        n: 1,
        alpha: 2.5,
        nodes: 128,
        mode: FlowMode::Normalized,
        data: DataFamily::Constant { c: 1.0 },
        initial: InitialShape::Cosine { c0: 0.8, coeffs: vec![0.0, 0.05] },
        controls: NumericControls { trace_stride: 200, ..Default::default() },
    })?;
    let result = run(&problem);
    for row in &result.trace.rows {
        println!(
            "t = {:7.4}  eta = {:.10}  J = {:.12}  conserved = {:.15}",
            row.t, row.eta, row.j, row.conserved
        );
    }
    println!("{} after {} steps", result.verdict, result.steps);
    println!("relative drift of the conserved integral: {:.2e}", result.conserved_drift(&problem)?);
    println!("c* = {:.12}, spread {:.2e}", result.c_star, result.residual.ratio_spread);
    println!("final radius in [{:.10}, {:.10}]", result.state.rho_min(), result.state.rho_max());
    Ok(())
}
