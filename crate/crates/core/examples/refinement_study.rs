//! Grid refinement sweep driven through the scenario layer.

use hyperflow::scenario::{load_scenario, sweep, SweepParam};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../scenarios/normalized-even.json");
    let scenario = load_scenario(path)?;
    let report = sweep(&scenario, SweepParam::Nodes, &[64.0, 128.0, 256.0], None)?;
    for row in &report.rows {
        match &row.outcome {
            Ok(s) => println!(
                "N = {:4}: {} in {} steps, Klein mismatch {:.3e}, drift {:.2e}",
                row.value,
                s.verdict,
                s.steps,
                s.klein_mismatch_max,
                s.conserved_drift.unwrap_or(f64::NAN)
            ),
            Err(e) => println!("N = {:4}: {e}", row.value),
        }
    }
    println!("observed orders: {:?}", report.aggregate.klein_orders);
    Ok(())
}
