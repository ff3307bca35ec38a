//! With α = n + 1 and f̃ ≡ 0.5 a small circle never reaches an equilibrium:
//! it contracts at rate sinh ρ (1 − 2 cosh ρ).

use hyperflow::flow::rhs;
use hyperflow::{run, DataFamily, FlowMode, FlowProblem, InitialShape, NumericControls, ProblemConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let problem = FlowProblem::new(ProblemConfig {
        n: 1,
        alpha: 2.0,
        nodes: 64,
        mode: FlowMode::Unnormalized,
        data: DataFamily::Constant { c: 0.5 },
        initial: InitialShape::Sphere { rho: 0.2 },
        controls: NumericControls { t_max: 50.0, trace_stride: 1000, ..Default::default() },
    })?;
    let rate = rhs(&problem.initial, &problem, 1.0)?[0];
    let exact = 0.2_f64.sinh() * (1.0 - 2.0 * 0.2_f64.cosh());
    println!("initial rate {rate:.15} (closed form {exact:.15})");
    let result = run(&problem);
    for row in &result.trace.rows {
        println!("t = {:8.4}  rho_max = {:.6e}", row.t, row.rho_max);
    }
    println!(
        "{}: rho_max strictly decreasing = {}",
        result.verdict, result.monitors.rho_max_strictly_decreasing
    );
    Ok(())
}
