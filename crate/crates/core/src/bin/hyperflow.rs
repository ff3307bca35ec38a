use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hyperflow::error::ScenarioError;
use hyperflow::scenario::{self, SweepParam};

#[derive(Parser)]
#[command(name = "hyperflow", version, about = "Run, sweep and verify curvature-flow scenarios")]
struct Cli {
    /// Output directory for artifacts.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Only print failures.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario.
    Run { scenario: PathBuf },
    /// Run a scenario once per parameter value.
    Sweep {
        scenario: PathBuf,
        /// alpha, N, cfl, f-amplitude or e1
        #[arg(long)]
        param: String,
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
    },
    /// Run every scenario and sweep of a suite file.
    Verify { suite: PathBuf },
}

fn fail(e: &ScenarioError) -> ExitCode {
    let report = serde_json::json!({ "error": e.kind(), "message": e.to_string() });
    eprintln!("{report}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => fail(&e),
    }
}

fn run(cli: &Cli) -> Result<bool, ScenarioError> {
    match &cli.command {
        Command::Run { scenario: path } => {
            let s = scenario::load_scenario(path)?;
            let dir = cli
                .out
                .clone()
                .or_else(|| s.outputs.clone())
                .unwrap_or_else(|| PathBuf::from("out").join(&s.name));
            let report = scenario::run_scenario(&s, Some(&dir))?;
            let sum = &report.summary;
            if !cli.quiet || !sum.passed {
                println!(
                    "{} {}: {} ({}), {} steps, residual {:.3e}, {:.2}s -> {}",
                    if sum.passed { "PASS" } else { "FAIL" },
                    sum.name,
                    sum.verdict,
                    sum.regime,
                    sum.steps,
                    sum.residual_linf,
                    sum.wall_time_s,
                    dir.display()
                );
                for reason in &sum.failure_reasons {
                    println!("  {reason}");
                }
            }
            Ok(sum.passed)
        }
        Command::Sweep { scenario: path, param, values } => {
            let s = scenario::load_scenario(path)?;
            let param: SweepParam = param.parse()?;
            let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("out").join(format!("{}-sweep", s.name)));
            let report = scenario::sweep(&s, param, values, Some(&dir))?;
            if !cli.quiet {
                print!("{}", scenario::sweep_csv(&report.rows));
                println!("{}", serde_json::to_string(&report.aggregate).expect("aggregate serializes"));
            }
            Ok(report.aggregate.failures == 0)
        }
        Command::Verify { suite } => {
            let loaded = scenario::load_suite(suite)?;
            let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("out").join(&loaded.name));
            let entries = scenario::verify(&loaded, Some(&dir));
            let mut all = true;
            for e in &entries {
                all &= e.passed;
                if !cli.quiet || !e.passed {
                    println!("{} {}: {}", if e.passed { "PASS" } else { "FAIL" }, e.name, e.detail);
                }
            }
            Ok(all)
        }
    }
}
