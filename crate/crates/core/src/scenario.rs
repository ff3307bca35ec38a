//! Scenario files, the experiment runner, parameter sweeps and suites.
//!
//! A scenario is a JSON document:
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "name": "round-circle",
//!   "problem": {
//!     "n": 1, "alpha": 2.0, "nodes": 256, "mode": "unnormalized",
//!     "data": { "family": "constant", "c": 2.0 },
//!     "initial": { "shape": "sphere", "rho": 0.3 }
//!   },
//!   "asserts": [ { "check": "rho_target", "value": 1.3169578969248166, "tol": 1e-6 } ]
//! }
//! ```
//!
//! See `scenarios/SCHEMA.md` in the repository for every field.

use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::ScenarioError;
use crate::flow::{self, FlowResult};
use crate::functionals::{self, FunctionalConfig, KleinState};
use crate::geometry::{geometry_fields, RadialState};
use crate::grid::SphereGrid;
use crate::problem::{FlowMode, FlowProblem, InitialShape, ProblemConfig};
use crate::trace::fmt_f64;

pub const SCHEMA_VERSION: u32 = 1;

/// What a scenario computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    /// Integrate the flow.
    #[default]
    Flow,
    /// Evaluate the functionals on the initial shape only.
    Evaluate,
}

/// Declared outcome of a flow scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expect {
    #[default]
    Converged,
    Timeout,
    Shrinking,
    Failed,
}

impl Expect {
    pub fn label(self) -> &'static str {
        match self {
            Expect::Converged => "converged",
            Expect::Timeout => "timeout",
            Expect::Shrinking => "shrinking",
            Expect::Failed => "failed",
        }
    }
}

fn default_mono_tol() -> f64 {
    1e-10
}

/// Named invariant checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "snake_case", deny_unknown_fields)]
pub enum Assert {
    /// `Q(t_{k+1}) ≥ Q(t_k) − tol (1 + |Q|)` over the trace.
    QMonotone {
        #[serde(default = "default_mono_tol")]
        tol: f64,
    },
    /// `J(t_{k+1}) ≤ J(t_k) + tol (1 + |J|)` over the trace.
    JMonotone {
        #[serde(default = "default_mono_tol")]
        tol: f64,
    },
    /// Relative drift of `∫ Ω(ρ)/f dθ` between start and end.
    ConservedDrift { tol: f64 },
    /// Final normalized L∞ residual.
    ResidualTarget { tol: f64 },
    /// Star-shapedness, C⁰ corridor, gradient witness, maximum principle
    /// and positive Θ corridor.
    Corridor,
    /// Largest antipodal defect along the run.
    Evenness { tol: f64 },
    /// Final profiles of the main and the `pair` run agree.
    UniquenessPair { tol: f64 },
    /// `max_j |ρ_j − value|` at the end.
    RhoTarget { value: f64, tol: f64 },
    /// ρ_max decreases strictly at every step.
    RhoMaxDecreasing,
    /// `max_j |∂ρ/∂t(0) − value| / |value|`.
    InitialRate { value: f64, rel_tol: f64 },
    /// Largest relative Klein curvature-law mismatch along the trace.
    KleinConsistency { tol: f64 },
    /// Relative spread of the principal curvatures of the final state.
    KappaSpread { tol: f64 },
    /// Relative spread of `φ^α K / (f̃ u)` on the final state.
    CStarSpread { tol: f64 },
}

impl Assert {
    pub fn name(&self) -> &'static str {
        match self {
            Assert::QMonotone { .. } => "q_monotone",
            Assert::JMonotone { .. } => "j_monotone",
            Assert::ConservedDrift { .. } => "conserved_drift",
            Assert::ResidualTarget { .. } => "residual_target",
            Assert::Corridor => "corridor",
            Assert::Evenness { .. } => "evenness",
            Assert::UniquenessPair { .. } => "uniqueness_pair",
            Assert::RhoTarget { .. } => "rho_target",
            Assert::RhoMaxDecreasing => "rho_max_decreasing",
            Assert::InitialRate { .. } => "initial_rate",
            Assert::KleinConsistency { .. } => "klein_consistency",
            Assert::KappaSpread { .. } => "kappa_spread",
            Assert::CStarSpread { .. } => "c_star_spread",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    pub name: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub task: Task,
    pub problem: ProblemConfig,
    /// Second initial shape for uniqueness checks.
    #[serde(default)]
    pub pair: Option<InitialShape>,
    #[serde(default)]
    pub expect: Expect,
    /// Admit normalized runs outside `2 < α ≤ n+1`.
    #[serde(default)]
    pub allow_exploratory: bool,
    /// Enforce asserts even outside the theorem regimes (they are only
    /// reported otherwise).
    #[serde(default)]
    pub strict: bool,
    #[serde(default)]
    pub asserts: Vec<Assert>,
    /// Output directory; the command line `--out` takes precedence.
    #[serde(default)]
    pub outputs: Option<PathBuf>,
}

fn schema(path: &str, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Schema { path: path.into(), message: message.into() }
}

fn read(path: &Path) -> Result<String, ScenarioError> {
    fs::read_to_string(path).map_err(|source| ScenarioError::Io { path: path.display().to_string(), source })
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, ScenarioError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        schema(&path, e.into_inner().to_string())
    })
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        let s: Scenario = parse(text)?;
        s.validate()?;
        Ok(s)
    }

    /// Checks everything serde cannot: versions, ranges, cross references
    /// and positivity of f̃ on the target grid.
    pub fn validate(&self) -> Result<(), ScenarioError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(schema(
                "schema_version",
                format!("unsupported version {}, expected {SCHEMA_VERSION}", self.schema_version),
            ));
        }
        if self.name.trim().is_empty() {
            return Err(schema("name", "must not be empty"));
        }
        let p = &self.problem;
        if p.mode == FlowMode::Normalized && !self.allow_exploratory {
            let upper = p.n as f64 + 1.0;
            if !(p.alpha > 2.0 && p.alpha <= upper) {
                return Err(schema(
                    "problem.alpha",
                    format!("normalized flow needs 2 < alpha <= n+1 = {upper}, got {}", p.alpha),
                ));
            }
        }
        for (i, a) in self.asserts.iter().enumerate() {
            if matches!(a, Assert::UniquenessPair { .. }) && self.pair.is_none() {
                return Err(schema(&format!("asserts[{i}]"), "uniqueness_pair needs a `pair` initial shape"));
            }
            if self.task == Task::Evaluate {
                return Err(schema(&format!("asserts[{i}]"), "evaluate scenarios take no asserts"));
            }
        }
        let grid = SphereGrid::new(p.n, p.nodes).map_err(|e| schema("problem.nodes", e.to_string()))?;
        let (min, theta) = grid
            .theta()
            .iter()
            .map(|&t| (p.data.eval(grid.dim(), t), t))
            .fold((f64::INFINITY, 0.0), |acc, v| if v.0 < acc.0 { v } else { acc });
        if !(min > 0.0) {
            return Err(ScenarioError::Positivity { min, theta });
        }
        self.flow_problem()?;
        if let Some(shape) = &self.pair {
            let mut cfg = p.clone();
            cfg.initial = shape.clone();
            FlowProblem::new(cfg).map_err(|e| schema("pair", e.to_string()))?;
        }
        Ok(())
    }

    pub fn flow_problem(&self) -> Result<FlowProblem, ScenarioError> {
        FlowProblem::new(self.problem.clone()).map_err(|e| ScenarioError::Invalid(e.to_string()))
    }

    fn pair_problem(&self, grid: Arc<SphereGrid>) -> Option<Result<FlowProblem, ScenarioError>> {
        self.pair.as_ref().map(|shape| {
            let mut cfg = self.problem.clone();
            cfg.initial = shape.clone();
            FlowProblem::on_grid(cfg, grid).map_err(|e| ScenarioError::Invalid(e.to_string()))
        })
    }
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario, ScenarioError> {
    Scenario::from_json(&read(path.as_ref())?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssertOutcome {
    pub check: String,
    pub passed: bool,
    /// Measured quantity compared against the tolerance.
    pub value: f64,
    /// Reported but not counted (exploratory regime).
    pub gated: bool,
    pub detail: String,
}

/// Key set of `summary.json`. Every key is always present.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub schema_version: u32,
    pub name: String,
    pub task: Task,
    pub regime: String,
    pub theorem_regime: bool,
    pub verdict: String,
    pub expected_verdict: String,
    pub passed: bool,
    pub failure_reasons: Vec<String>,
    pub steps: usize,
    pub t_final: f64,
    pub wall_time_s: f64,
    pub residual_linf: f64,
    pub residual_l2: f64,
    pub c_star: f64,
    pub c_star_spread: f64,
    pub rho_min: f64,
    pub rho_max: f64,
    pub q_final: f64,
    pub j_final: f64,
    pub uhat_max: f64,
    pub conserved_drift: Option<f64>,
    pub uniqueness_distance: Option<f64>,
    pub klein_mismatch_max: f64,
    pub asserts: Vec<AssertOutcome>,
}

/// Everything a scenario run produced.
#[derive(Debug, Clone)]
pub struct ScenarioReport {
    pub summary: Summary,
    pub result: Option<FlowResult>,
    pub pair_result: Option<FlowResult>,
    pub final_state: RadialState,
}

impl ScenarioReport {
    pub fn passed(&self) -> bool {
        self.summary.passed
    }
}

/// Runs a validated scenario and, when `out` is given, writes `trace.csv`,
/// `profile_final.csv` and `summary.json` there (and the pair run's files
/// under `pair/`).
pub fn run_scenario(s: &Scenario, out: Option<&Path>) -> Result<ScenarioReport, ScenarioError> {
    let clock = Instant::now();
    let problem = s.flow_problem()?;
    let report = match s.task {
        Task::Flow => run_flow(s, &problem, clock)?,
        Task::Evaluate => evaluate(s, &problem, clock),
    };
    if let Some(dir) = out {
        write_outputs(dir, &problem, &report)?;
    }
    Ok(report)
}

fn run_flow(s: &Scenario, problem: &FlowProblem, clock: Instant) -> Result<ScenarioReport, ScenarioError> {
    let pair_problem = s.pair_problem(problem.grid.clone()).transpose()?;
    let (result, pair_result) = rayon::join(|| flow::run(problem), || pair_problem.as_ref().map(flow::run));
    let wall = clock.elapsed().as_secs_f64();

    let drift = result.conserved_drift(problem).ok();
    let distance = pair_result.as_ref().and_then(|b| functionals::uniqueness_check(&result, b).ok());
    let gated = !s.strict && !problem.regime.is_theorem();
    let mut outcomes: Vec<AssertOutcome> = s
        .asserts
        .iter()
        .map(|a| check(a, &result, pair_result.as_ref(), drift, distance, gated))
        .collect();
    if let Some(b) = &pair_result {
        if s.asserts.iter().any(|a| matches!(a, Assert::UniquenessPair { .. })) && !b.converged() {
            outcomes.push(AssertOutcome {
                check: "pair_converged".into(),
                passed: false,
                value: b.residual.linf,
                gated,
                detail: format!("pair run {}", b.verdict),
            });
        }
    }

    let mut failures = Vec::new();
    let verdict_ok = result.verdict.label() == s.expect.label();
    if !verdict_ok {
        failures.push(format!("verdict {} but expected {}", result.verdict, s.expect.label()));
    }
    for o in outcomes.iter().filter(|o| !o.passed && !o.gated) {
        failures.push(format!("{}: {}", o.check, o.detail));
    }
    let last = result.trace.last().copied().unwrap_or_default();
    let uhat_max = functionals::klein_project(&result.state)
        .map(|k| k.uhat.iter().copied().fold(f64::NEG_INFINITY, f64::max))
        .unwrap_or(f64::NAN);
    let summary = Summary {
        schema_version: SCHEMA_VERSION,
        name: s.name.clone(),
        task: s.task,
        regime: problem.regime.to_string(),
        theorem_regime: problem.regime.is_theorem(),
        verdict: result.verdict.to_string(),
        expected_verdict: s.expect.label().into(),
        passed: failures.is_empty(),
        failure_reasons: failures,
        steps: result.steps,
        t_final: result.state.t,
        wall_time_s: wall,
        residual_linf: result.residual.linf,
        residual_l2: result.residual.l2,
        c_star: result.c_star,
        c_star_spread: result.residual.ratio_spread,
        rho_min: result.state.rho_min(),
        rho_max: result.state.rho_max(),
        q_final: last.q,
        j_final: last.j,
        uhat_max,
        conserved_drift: drift,
        uniqueness_distance: distance,
        klein_mismatch_max: result.monitors.klein_mismatch_max,
        asserts: outcomes,
    };
    Ok(ScenarioReport { summary, final_state: result.state.clone(), result: Some(result), pair_result })
}

fn outcome(a: &Assert, value: f64, passed: bool, gated: bool, detail: String) -> AssertOutcome {
    AssertOutcome { check: a.name().into(), passed, value, gated, detail }
}

fn below(a: &Assert, value: f64, tol: f64, gated: bool, what: &str) -> AssertOutcome {
    outcome(a, value, value <= tol, gated, format!("{what} = {value:.3e}, tolerance {tol:.3e}"))
}

fn check(
    a: &Assert,
    r: &FlowResult,
    pair: Option<&FlowResult>,
    drift: Option<f64>,
    distance: Option<f64>,
    gated: bool,
) -> AssertOutcome {
    let m = &r.monitors;
    match a {
        Assert::QMonotone { tol } => {
            let worst = r.trace.worst_decrease(|row| row.q, *tol);
            let nan = r.trace.rows.iter().filter(|row| row.q.is_nan()).count();
            let passed = worst <= 0.0 && nan == 0;
            outcome(a, worst, passed, gated, format!("worst decrease beyond tolerance {worst:.3e}, {nan} NaN rows"))
        }
        Assert::JMonotone { tol } => {
            let worst = r.trace.worst_increase(|row| row.j, *tol);
            let nan = r.trace.rows.iter().filter(|row| row.j.is_nan()).count();
            let passed = worst <= 0.0 && nan == 0;
            outcome(a, worst, passed, gated, format!("worst increase beyond tolerance {worst:.3e}, {nan} NaN rows"))
        }
        Assert::ConservedDrift { tol } => below(a, drift.unwrap_or(f64::NAN), *tol, gated, "relative drift"),
        Assert::ResidualTarget { tol } => below(a, r.residual.linf, *tol, gated, "residual"),
        Assert::Corridor => {
            let worst = [m.c0_upper_excess, m.c0_lower_excess, m.gradient_excess, m.max_principle_excess]
                .into_iter()
                .fold(f64::NEG_INFINITY, f64::max);
            let passed = m.star_shaped && worst <= 0.0 && m.theta_min > 0.0 && m.theta_max.is_finite();
            outcome(
                a,
                worst,
                passed,
                gated,
                format!(
                    "star-shaped {}, C0 excess ({:.2e}, {:.2e}), C1 excess {:.2e}, max-principle excess {:.2e}, Θ in [{:.4e}, {:.4e}]",
                    m.star_shaped,
                    m.c0_upper_excess,
                    m.c0_lower_excess,
                    m.gradient_excess,
                    m.max_principle_excess,
                    m.theta_min,
                    m.theta_max
                ),
            )
        }
        Assert::Evenness { tol } => below(a, m.evenness_defect_max, *tol, gated, "evenness defect"),
        Assert::UniquenessPair { tol } => {
            let d = distance.unwrap_or(f64::NAN);
            let conv = r.converged() && pair.is_some_and(|p| p.converged());
            let mut o = below(a, d, *tol, gated, "profile distance");
            o.passed &= conv;
            o
        }
        Assert::RhoTarget { value, tol } => {
            let err = r.state.rho.iter().map(|x| (x - value).abs()).fold(0.0, f64::max);
            below(a, err, *tol, gated, "max |rho - target|")
        }
        Assert::RhoMaxDecreasing => {
            let ok = m.rho_max_strictly_decreasing && r.steps > 0;
            outcome(a, r.state.rho_max(), ok, gated, format!("strictly decreasing: {ok} over {} steps", r.steps))
        }
        Assert::InitialRate { value, rel_tol } => {
            let err = r
                .initial_rate
                .iter()
                .map(|v| (v - value).abs() / value.abs())
                .fold(if r.initial_rate.is_empty() { f64::NAN } else { 0.0 }, f64::max);
            below(a, err, *rel_tol, gated, "relative rate error")
        }
        Assert::KleinConsistency { tol } => below(a, m.klein_mismatch_max, *tol, gated, "Klein mismatch"),
        Assert::KappaSpread { tol } => {
            let spread = geometry_fields(&r.state)
                .map(|f| (f.kappa_max() - f.kappa_min()) / f.kappa_max())
                .unwrap_or(f64::NAN);
            below(a, spread, *tol, gated, "kappa spread")
        }
        Assert::CStarSpread { tol } => below(a, r.residual.ratio_spread, *tol, gated, "c* spread"),
    }
}

/// Klein image of the initial shape: built from the exact Euclidean radial
/// function for Klein ellipsoids, otherwise projected from the hyperbolic
/// state.
pub fn initial_klein_state(problem: &FlowProblem) -> Option<KleinState> {
    match &problem.config.initial {
        InitialShape::KleinEllipsoid { e1, e2 } => {
            let r: Vec<f64> = problem
                .grid
                .theta()
                .iter()
                .map(|&t| functionals::ellipsoid_radius(*e1, *e2, t))
                .collect();
            KleinState::from_euclidean_radial(&problem.grid, &r).ok()
        }
        _ => functionals::klein_project(&problem.initial).ok(),
    }
}

fn evaluate(s: &Scenario, problem: &FlowProblem, clock: Instant) -> ScenarioReport {
    let k = initial_klein_state(problem);
    let umin = k
        .as_ref()
        .map(|k| k.uhat.iter().copied().fold(f64::INFINITY, f64::min))
        .unwrap_or(f64::NAN);
    let cfg = FunctionalConfig::new(0.5 * umin, 0.5 * problem.initial.rho_min(), 1e-12);
    let (q, j) = match (&k, &cfg) {
        (Some(k), Ok(cfg)) => (
            functionals::q_functional(k, &problem.data.f_tilde, problem.alpha(), &problem.grid, cfg)
                .unwrap_or(f64::NAN),
            functionals::j_functional(k, &problem.grid, cfg).unwrap_or(f64::NAN),
        ),
        _ => (f64::NAN, f64::NAN),
    };
    let uhat_max = k
        .as_ref()
        .map(|k| k.uhat.iter().copied().fold(f64::NEG_INFINITY, f64::max))
        .unwrap_or(f64::NAN);
    let ok = j.is_finite();
    let state = &problem.initial;
    let summary = Summary {
        schema_version: SCHEMA_VERSION,
        name: s.name.clone(),
        task: s.task,
        regime: problem.regime.to_string(),
        theorem_regime: problem.regime.is_theorem(),
        verdict: if ok { "evaluated".into() } else { "failed: functionals undefined".into() },
        expected_verdict: "evaluated".into(),
        passed: ok,
        failure_reasons: if ok { vec![] } else { vec!["functionals undefined on the initial shape".into()] },
        steps: 0,
        t_final: 0.0,
        wall_time_s: clock.elapsed().as_secs_f64(),
        residual_linf: f64::NAN,
        residual_l2: f64::NAN,
        c_star: f64::NAN,
        c_star_spread: f64::NAN,
        rho_min: state.rho_min(),
        rho_max: state.rho_max(),
        q_final: q,
        j_final: j,
        uhat_max,
        conserved_drift: None,
        uniqueness_distance: None,
        klein_mismatch_max: f64::NAN,
        asserts: vec![],
    };
    ScenarioReport { summary, result: None, pair_result: None, final_state: state.clone() }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ScenarioError + '_ {
    move |source| ScenarioError::Io { path: path.display().to_string(), source }
}

fn write_outputs(dir: &Path, problem: &FlowProblem, report: &ScenarioReport) -> Result<(), ScenarioError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    if let Some(r) = &report.result {
        write_trace(&dir.join("trace.csv"), r)?;
    }
    write_profile(&dir.join("profile_final.csv"), problem, &report.final_state, report.summary.c_star)?;
    let path = dir.join("summary.json");
    let text = serde_json::to_string_pretty(&report.summary).expect("summary serializes");
    fs::write(&path, text + "\n").map_err(io_err(&path))?;
    if let Some(p) = &report.pair_result {
        let sub = dir.join("pair");
        fs::create_dir_all(&sub).map_err(io_err(&sub))?;
        write_trace(&sub.join("trace.csv"), p)?;
        write_profile(&sub.join("profile_final.csv"), problem, &p.state, p.c_star)?;
    }
    Ok(())
}

fn write_trace(path: &Path, r: &FlowResult) -> Result<(), ScenarioError> {
    let file = fs::File::create(path).map_err(io_err(path))?;
    r.trace.write_csv(BufWriter::new(file)).map_err(io_err(path))
}

/// Writes `profile_final.csv`: theta, rho, r, u, uhat, K, Khat, kappa_1..n,
/// f_tilde, residual.
pub fn write_profile(path: &Path, problem: &FlowProblem, state: &RadialState, c_star: f64) -> Result<(), ScenarioError> {
    use std::io::Write;
    let n = problem.n();
    let mut header = vec!["theta", "rho", "r", "u", "uhat", "K", "Khat", "kappa_1"];
    if n == 2 {
        header.push("kappa_2");
    }
    header.extend(["f_tilde", "residual"]);
    let len = state.rho.len();
    let fields = geometry_fields(state).ok();
    let klein = fields.as_ref().map(|f| functionals::klein_project_fields(state, f));
    let c = if c_star.is_finite() { c_star } else { 1.0 };
    let res = fields
        .as_ref()
        .map(|f| functionals::residual_nodes(f, &problem.data.f_tilde, problem.alpha(), c))
        .unwrap_or_else(|| vec![f64::NAN; len]);
    let file = fs::File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    let mut lines = vec![header.join(",")];
    for j in 0..len {
        let mut row = vec![problem.grid.theta()[j], state.rho[j], state.rho[j].tanh()];
        match (&fields, &klein) {
            (Some(f), Some(k)) => {
                let g = &f.nodes[j];
                row.extend([g.u, k.uhat[j], g.gauss, k.khat[j]]);
                row.extend(&g.kappa[..n]);
            }
            _ => row.extend(std::iter::repeat_n(f64::NAN, 4 + n)),
        }
        row.extend([problem.data.f_tilde[j], res[j]]);
        lines.push(row.iter().map(|&v| fmt_f64(v)).collect::<Vec<_>>().join(","));
    }
    writeln!(w, "{}", lines.join("\n")).map_err(io_err(path))
}

/// Scenario parameters a sweep can vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepParam {
    #[serde(rename = "alpha")]
    Alpha,
    #[serde(rename = "N")]
    Nodes,
    #[serde(rename = "cfl")]
    Cfl,
    #[serde(rename = "f-amplitude")]
    FAmplitude,
    #[serde(rename = "e1")]
    E1,
}

impl SweepParam {
    pub fn label(self) -> &'static str {
        match self {
            SweepParam::Alpha => "alpha",
            SweepParam::Nodes => "N",
            SweepParam::Cfl => "cfl",
            SweepParam::FAmplitude => "f-amplitude",
            SweepParam::E1 => "e1",
        }
    }

    /// Copy of `base` with this parameter set to `value`.
    pub fn apply(self, base: &Scenario, value: f64) -> Result<Scenario, ScenarioError> {
        let mut s = base.clone();
        let p = &mut s.problem;
        match self {
            SweepParam::Alpha => p.alpha = value,
            SweepParam::Nodes => {
                if !(value >= 1.0 && value.fract() == 0.0) {
                    return Err(ScenarioError::Invalid(format!("N = {value} is not a positive integer")));
                }
                p.nodes = value as usize;
            }
            SweepParam::Cfl => p.controls.cfl = value,
            SweepParam::FAmplitude => p.data.set_amplitude(value),
            SweepParam::E1 => match &mut p.initial {
                InitialShape::KleinEllipsoid { e1, .. } => *e1 = value,
                _ => return Err(ScenarioError::Invalid("e1 sweeps need a klein_ellipsoid initial shape".into())),
            },
        }
        s.name = format!("{}-{}={}", base.name, self.label(), value);
        s.validate()?;
        Ok(s)
    }
}

impl FromStr for SweepParam {
    type Err = ScenarioError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "alpha" => Ok(SweepParam::Alpha),
            "N" | "nodes" => Ok(SweepParam::Nodes),
            "cfl" => Ok(SweepParam::Cfl),
            "f-amplitude" => Ok(SweepParam::FAmplitude),
            "e1" => Ok(SweepParam::E1),
            other => Err(ScenarioError::Invalid(format!(
                "unknown sweep parameter `{other}` (expected alpha, N, cfl, f-amplitude or e1)"
            ))),
        }
    }
}

/// One instance of a sweep.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub value: f64,
    pub outcome: Result<Summary, String>,
    pub final_rho: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepAggregate {
    pub param: String,
    pub values: Vec<f64>,
    pub failures: usize,
    /// Largest J over the instances.
    pub j_upper_bound: f64,
    /// Relative J change between consecutive instances.
    pub j_growth: Vec<f64>,
    pub uhat_max: Vec<f64>,
    /// Observed orders of the Klein mismatch between consecutive N.
    pub klein_orders: Vec<f64>,
    /// Largest node distance between any instance and the first one, when
    /// all grids agree.
    pub max_profile_distance: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct SweepReport {
    pub param: SweepParam,
    pub rows: Vec<SweepRow>,
    pub aggregate: SweepAggregate,
}

pub const SWEEP_COLUMNS: [&str; 16] = [
    "value",
    "verdict",
    "passed",
    "steps",
    "t_final",
    "residual_linf",
    "c_star",
    "rho_min",
    "rho_max",
    "Q",
    "J",
    "uhat_max",
    "conserved_drift",
    "klein_mismatch_max",
    "wall_time_s",
    "error",
];

/// Runs `base` once per value, concurrently; failures are recorded per
/// instance. With `out`, instance artifacts go to `out/<param>=<value>/`
/// and the aggregate to `out/sweep.csv` and `out/sweep_summary.json`.
pub fn sweep(base: &Scenario, param: SweepParam, values: &[f64], out: Option<&Path>) -> Result<SweepReport, ScenarioError> {
    let rows: Vec<SweepRow> = values
        .par_iter()
        .map(|&value| {
            let dir = out.map(|d| d.join(format!("{}={}", param.label(), value)));
            let run = param.apply(base, value).and_then(|s| run_scenario(&s, dir.as_deref()));
            match run {
                Ok(rep) => SweepRow {
                    value,
                    final_rho: rep.result.as_ref().map(|r| r.state.rho.clone()),
                    outcome: Ok(rep.summary),
                },
                Err(e) => SweepRow { value, outcome: Err(e.to_string()), final_rho: None },
            }
        })
        .collect();
    let aggregate = aggregate(param, &rows);
    if let Some(dir) = out {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        let path = dir.join("sweep.csv");
        fs::write(&path, sweep_csv(&rows)).map_err(io_err(&path))?;
        let path = dir.join("sweep_summary.json");
        let text = serde_json::to_string_pretty(&aggregate).expect("aggregate serializes");
        fs::write(&path, text + "\n").map_err(io_err(&path))?;
    }
    Ok(SweepReport { param, rows, aggregate })
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = SWEEP_COLUMNS.join(",") + "\n";
    for row in rows {
        let cells: Vec<String> = match &row.outcome {
            Ok(s) => vec![
                fmt_f64(row.value),
                s.verdict.replace(',', ";"),
                s.passed.to_string(),
                s.steps.to_string(),
                fmt_f64(s.t_final),
                fmt_f64(s.residual_linf),
                fmt_f64(s.c_star),
                fmt_f64(s.rho_min),
                fmt_f64(s.rho_max),
                fmt_f64(s.q_final),
                fmt_f64(s.j_final),
                fmt_f64(s.uhat_max),
                fmt_f64(s.conserved_drift.unwrap_or(f64::NAN)),
                fmt_f64(s.klein_mismatch_max),
                fmt_f64(s.wall_time_s),
                String::new(),
            ],
            Err(e) => {
                let mut v = vec![fmt_f64(row.value), "error".into(), "false".into()];
                v.extend(std::iter::repeat_n(String::new(), 12));
                v.push(format!("\"{}\"", e.replace('"', "'")));
                v
            }
        };
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn aggregate(param: SweepParam, rows: &[SweepRow]) -> SweepAggregate {
    let ok: Vec<(f64, &Summary)> = rows.iter().filter_map(|r| r.outcome.as_ref().ok().map(|s| (r.value, s))).collect();
    let j: Vec<f64> = ok.iter().map(|(_, s)| s.j_final).collect();
    let j_growth = j.windows(2).map(|w| (w[1] - w[0]) / w[0].abs()).collect();
    let klein_orders = if param == SweepParam::Nodes {
        ok.windows(2)
            .map(|w| (w[0].1.klein_mismatch_max / w[1].1.klein_mismatch_max).ln() / (w[1].0 / w[0].0).ln())
            .collect()
    } else {
        vec![]
    };
    let profiles: Vec<&Vec<f64>> = rows.iter().filter_map(|r| r.final_rho.as_ref()).collect();
    let max_profile_distance = match profiles.split_first() {
        Some((first, rest)) if rest.iter().all(|p| p.len() == first.len()) => Some(
            rest.iter()
                .flat_map(|p| p.iter().zip(first.iter()).map(|(a, b)| (a - b).abs()))
                .fold(0.0, f64::max),
        ),
        _ => None,
    };
    SweepAggregate {
        param: param.label().into(),
        values: rows.iter().map(|r| r.value).collect(),
        failures: rows.len() - ok.len(),
        j_upper_bound: j.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        j_growth,
        uhat_max: ok.iter().map(|(_, s)| s.uhat_max).collect(),
        klein_orders,
        max_profile_distance,
    }
}

/// Pass criterion of a sweep inside a suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "snake_case", deny_unknown_fields)]
pub enum SweepCheck {
    /// Last relative J growth at most `max_growth`, `max û` increasing
    /// towards 1.
    JBounded { max_growth: f64 },
    /// Observed Klein mismatch order at least `order` between consecutive
    /// N, unless both mismatches are below `floor`.
    MinOrder { order: f64, floor: f64 },
    /// Final profiles agree to `tol`.
    Agree { tol: f64 },
    /// Every instance passes its own scenario checks.
    AllPass,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteSweep {
    pub name: String,
    /// Scenario file, relative to the suite file.
    pub scenario: PathBuf,
    pub param: SweepParam,
    pub values: Vec<f64>,
    pub check: SweepCheck,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Suite {
    pub schema_version: u32,
    pub name: String,
    /// Scenario files, relative to the suite file.
    #[serde(default)]
    pub scenarios: Vec<PathBuf>,
    #[serde(default)]
    pub sweeps: Vec<SuiteSweep>,
}

/// A suite with every scenario loaded.
#[derive(Debug, Clone)]
pub struct LoadedSuite {
    pub name: String,
    pub scenarios: Vec<Scenario>,
    pub sweeps: Vec<(SuiteSweep, Scenario)>,
}

pub fn load_suite(path: impl AsRef<Path>) -> Result<LoadedSuite, ScenarioError> {
    let path = path.as_ref();
    let suite: Suite = parse(&read(path)?)?;
    if suite.schema_version != SCHEMA_VERSION {
        return Err(schema("schema_version", format!("unsupported version {}", suite.schema_version)));
    }
    let base = path.parent().unwrap_or(Path::new("."));
    let mut names = std::collections::BTreeSet::new();
    let mut scenarios = Vec::new();
    for (i, p) in suite.scenarios.iter().enumerate() {
        let s = load_scenario(base.join(p)).map_err(|e| schema(&format!("scenarios[{i}]"), e.to_string()))?;
        if !names.insert(s.name.clone()) {
            return Err(schema(&format!("scenarios[{i}]"), format!("duplicate scenario name `{}`", s.name)));
        }
        scenarios.push(s);
    }
    let mut sweeps = Vec::new();
    for (i, sw) in suite.sweeps.into_iter().enumerate() {
        let s = load_scenario(base.join(&sw.scenario))
            .map_err(|e| schema(&format!("sweeps[{i}].scenario"), e.to_string()))?;
        if !names.insert(sw.name.clone()) {
            return Err(schema(&format!("sweeps[{i}].name"), format!("duplicate name `{}`", sw.name)));
        }
        sweeps.push((sw, s));
    }
    Ok(LoadedSuite { name: suite.name, scenarios, sweeps })
}

/// Outcome of one suite entry.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteEntry {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

pub fn evaluate_sweep(check: &SweepCheck, report: &SweepReport) -> (bool, String) {
    let agg = &report.aggregate;
    if agg.failures > 0 {
        return (false, format!("{} instance(s) failed to run", agg.failures));
    }
    match check {
        SweepCheck::JBounded { max_growth } => {
            let last = agg.j_growth.last().copied().unwrap_or(f64::NAN);
            let rising = agg.uhat_max.windows(2).all(|w| w[1] > w[0]);
            let bounded = agg.j_upper_bound.is_finite();
            (
                bounded && rising && last <= *max_growth,
                format!(
                    "J bound {:.6}, growth {:?}, max uhat {:?} (allowed growth {max_growth})",
                    agg.j_upper_bound, agg.j_growth, agg.uhat_max
                ),
            )
        }
        SweepCheck::MinOrder { order, floor } => {
            let ok_rows: Vec<&Summary> = report.rows.iter().filter_map(|r| r.outcome.as_ref().ok()).collect();
            let pass = ok_rows.windows(2).zip(&agg.klein_orders).all(|(w, p)| {
                (w[0].klein_mismatch_max < *floor && w[1].klein_mismatch_max < *floor) || *p >= *order
            });
            let mism: Vec<f64> = ok_rows.iter().map(|s| s.klein_mismatch_max).collect();
            (pass, format!("Klein mismatch {mism:?}, orders {:?}", agg.klein_orders))
        }
        SweepCheck::Agree { tol } => {
            let d = agg.max_profile_distance.unwrap_or(f64::NAN);
            (d <= *tol, format!("max profile distance {d:.3e} (tolerance {tol:.1e})"))
        }
        SweepCheck::AllPass => {
            let failed: Vec<String> = report
                .rows
                .iter()
                .filter(|r| !r.outcome.as_ref().is_ok_and(|s| s.passed))
                .map(|r| format!("{}={}", report.param.label(), r.value))
                .collect();
            (failed.is_empty(), format!("failing instances: {failed:?}"))
        }
    }
}

/// Runs every scenario and sweep of a suite concurrently, writing artifacts
/// under `out/<entry name>/` when `out` is given.
pub fn verify(suite: &LoadedSuite, out: Option<&Path>) -> Vec<SuiteEntry> {
    let mut entries: Vec<SuiteEntry> = suite
        .scenarios
        .par_iter()
        .map(|s| {
            let dir = out.map(|d| d.join(&s.name));
            match run_scenario(s, dir.as_deref()) {
                Ok(rep) => SuiteEntry {
                    name: s.name.clone(),
                    passed: rep.passed(),
                    detail: if rep.passed() {
                        format!("{} in {} steps", rep.summary.verdict, rep.summary.steps)
                    } else {
                        rep.summary.failure_reasons.join("; ")
                    },
                },
                Err(e) => SuiteEntry { name: s.name.clone(), passed: false, detail: e.to_string() },
            }
        })
        .collect();
    let sweeps: Vec<SuiteEntry> = suite
        .sweeps
        .par_iter()
        .map(|(sw, s)| {
            let dir = out.map(|d| d.join(&sw.name));
            match sweep(s, sw.param, &sw.values, dir.as_deref()) {
                Ok(rep) => {
                    let (passed, detail) = evaluate_sweep(&sw.check, &rep);
                    SuiteEntry { name: sw.name.clone(), passed, detail }
                }
                Err(e) => SuiteEntry { name: sw.name.clone(), passed: false, detail: e.to_string() },
            }
        })
        .collect();
    entries.extend(sweeps);
    entries
}
