//! A rotation surface in H³ flowing under α = 3 = n + 1 with
//! f̃ = 2 + 0.4 P₂(cos θ).

use hyperflow::functionals::klein_project;
use hyperflow::geometry::geometry_fields;
use hyperflow::{run, DataFamily, FlowMode, FlowProblem, InitialShape, NumericControls, ProblemConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let problem = FlowProblem::new(ProblemConfig {
        n: 2,
        alpha: 3.0,
        nodes: 65,
        mode: FlowMode::Unnormalized,
        data: DataFamily::EvenLegendre { coeffs: vec![2.0, 0.4] },
        initial: InitialShape::KleinEllipsoid { e1: 0.5, e2: 0.4 },
        controls: NumericControls::default(),
    })?;
    println!("regime: {}", problem.regime);
    let result = run(&problem);
    println!("{} after {} steps, residual {:.2e}", result.verdict, result.steps, result.residual.linf);
    let fields = geometry_fields(&result.state)?;
    let k = klein_project(&result.state)?;
    println!("{:>8} {:>12} {:>12} {:>12} {:>10}", "theta", "rho", "kappa_1", "kappa_2", "uhat");
    for j in (0..problem.grid.len()).step_by(8) {
        let g = &fields.nodes[j];
        println!(
            "{:8.4} {:12.8} {:12.8} {:12.8} {:10.6}",
            problem.grid.theta()[j],
            result.state.rho[j],
            g.kappa[0],
            g.kappa[1],
            k.uhat[j]
        );
    }
    Ok(())
}
