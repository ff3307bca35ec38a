//! Time integration of the scalar flow equation
//!
//! ```text
//! ∂ρ/∂t = −φ(ρ)^α f(θ) w K + η̃ φ(ρ)
//! ```
//!
//! with `η̃ = 1` (unnormalized) or `η̃ = η(t)` (normalized), by explicit Heun
//! steps under a parabolic step restriction, until the stationary residual
//! drops below tolerance.

use std::fmt;

use crate::error::{FlowError, GeometryError};
use crate::functionals::{
    self, klein_project_fields, FunctionalConfig, Residual,
};
use crate::geometry::{geometry_fields, inverse_h_max_eigen, GeometryFields, RadialState};
use crate::problem::{FlowMode, FlowProblem, Regime};
use crate::trace::{DiagnosticsTrace, TraceRow};

/// Runs whose maximal radius drops below this are stopped as shrinking.
pub const COLLAPSE_RADIUS: f64 = 1e-6;

/// Per-node time derivative of ρ.
pub fn rhs(state: &RadialState, problem: &FlowProblem, eta: f64) -> Result<Vec<f64>, FlowError> {
    let fields = geometry_fields(state)?;
    rhs_with_fields(&fields, problem, eta)
}

pub(crate) fn rhs_with_fields(
    fields: &GeometryFields,
    problem: &FlowProblem,
    eta: f64,
) -> Result<Vec<f64>, FlowError> {
    let alpha = problem.alpha();
    let scale = match problem.mode() {
        FlowMode::Unnormalized => 1.0,
        FlowMode::Normalized => eta,
    };
    fields
        .nodes
        .iter()
        .zip(&problem.data.f)
        .enumerate()
        .map(|(j, (g, f))| {
            if !(g.gauss > 0.0) {
                return Err(FlowError::CurvatureBreakdown { node: j, value: g.gauss });
            }
            Ok(-g.phi.powf(alpha) * f * g.w * g.gauss + scale * g.phi)
        })
        .collect()
}

/// Global term `η = ∫ (K/u) φ^{n+1} dθ / ∫ φ^{n+1−α} f⁻¹ dθ`.
pub fn eta_normalized(state: &RadialState, problem: &FlowProblem) -> Result<f64, FlowError> {
    let fields = geometry_fields(state)?;
    eta_from_fields(&fields, problem)
}

pub(crate) fn eta_from_fields(fields: &GeometryFields, problem: &FlowProblem) -> Result<f64, FlowError> {
    let grid = &problem.grid;
    let n1 = (problem.n() + 1) as i32;
    let alpha = problem.alpha();
    let num: Vec<f64> = fields.nodes.iter().map(|g| g.gauss / g.u * g.phi.powi(n1)).collect();
    let den: Vec<f64> = fields
        .nodes
        .iter()
        .zip(&problem.data.f_tilde)
        .map(|(g, ft)| g.phi.powf(n1 as f64 - alpha) * ft)
        .collect();
    let den = grid.integrate(&den);
    if !(den > 1e-300) {
        return Err(FlowError::DegenerateDenominator(den));
    }
    Ok(grid.integrate(&num) / den)
}

fn eta_for(fields: &GeometryFields, problem: &FlowProblem) -> Result<f64, FlowError> {
    match problem.mode() {
        FlowMode::Unnormalized => Ok(1.0),
        FlowMode::Normalized => eta_from_fields(fields, problem),
    }
}

/// Largest linearized diffusivity `φ^α f K λ_max(h⁻¹)` of the curvature
/// term with respect to the angular second derivatives of ρ.
pub fn diffusivity(fields: &GeometryFields, problem: &FlowProblem) -> f64 {
    let n = problem.n();
    let alpha = problem.alpha();
    fields
        .nodes
        .iter()
        .zip(&problem.data.f)
        .map(|(g, f)| g.phi.powf(alpha) * f * g.gauss * inverse_h_max_eigen(n, &g.h))
        .fold(0.0, f64::max)
}

/// Step size `cfl · Δθ² / D_max`.
pub fn stable_dt(fields: &GeometryFields, problem: &FlowProblem) -> f64 {
    let h = problem.grid.spacing();
    problem.controls().cfl * h * h / diffusivity(fields, problem)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport {
    pub dt: f64,
    pub halvings: u32,
    /// η at the start of the step (1 for the unnormalized flow).
    pub eta: f64,
}

/// One Heun step of fixed size, without admissibility checks.
pub fn step_with_dt(state: &RadialState, problem: &FlowProblem, dt: f64) -> Result<RadialState, FlowError> {
    let fields = geometry_fields(state)?;
    let eta = eta_for(&fields, problem)?;
    let k1 = rhs_with_fields(&fields, problem, eta)?;
    heun(state, &k1, problem, dt)
}

fn heun(state: &RadialState, k1: &[f64], problem: &FlowProblem, dt: f64) -> Result<RadialState, FlowError> {
    let predictor: Vec<f64> = state.rho.iter().zip(k1).map(|(r, k)| r + dt * k).collect();
    let pred = RadialState::new(state.grid.clone(), predictor, state.t + dt)?;
    let pf = geometry_fields(&pred)?;
    let eta2 = eta_for(&pf, problem)?;
    let k2 = rhs_with_fields(&pf, problem, eta2)?;
    let rho = state
        .rho
        .iter()
        .zip(k1.iter().zip(&k2))
        .map(|(r, (a, b))| r + 0.5 * dt * (a + b))
        .collect();
    Ok(RadialState::new(state.grid.clone(), rho, state.t + dt)?)
}

/// One adaptive step: the parabolic step size, halved on failure until the
/// new state is finite, positive and (if the old one was) convex.
pub fn step(state: &RadialState, problem: &FlowProblem) -> Result<(RadialState, StepReport), FlowError> {
    let fields = geometry_fields(state)?;
    let eta = eta_for(&fields, problem)?;
    let k1 = rhs_with_fields(&fields, problem, eta)?;
    let (next, _, report) = adaptive_step(state, &fields, &k1, eta, problem)?;
    Ok((next, report))
}

fn adaptive_step(
    state: &RadialState,
    fields: &GeometryFields,
    k1: &[f64],
    eta: f64,
    problem: &FlowProblem,
) -> Result<(RadialState, GeometryFields, StepReport), FlowError> {
    let was_convex = fields.kappa_min() > 0.0;
    let max_halvings = problem.controls().max_halvings;
    let mut dt = stable_dt(fields, problem);
    for halvings in 0..=max_halvings {
        if let Ok(next) = heun(state, k1, problem, dt) {
            if let Ok(nf) = geometry_fields(&next) {
                if !was_convex || nf.kappa_min() > 0.0 {
                    return Ok((next, nf, StepReport { dt, halvings, eta }));
                }
            }
        }
        if halvings < max_halvings {
            dt *= 0.5;
        }
    }
    Err(FlowError::StepFailure { halvings: max_halvings, dt })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    /// Residual below tolerance.
    Converged,
    /// `t_max` (or the step budget) reached without convergence.
    Timeout,
    /// Non-convergent run whose maximal radius decreased at every step.
    Shrinking,
    Failed(String),
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Converged => "converged",
            Verdict::Timeout => "timeout",
            Verdict::Shrinking => "shrinking",
            Verdict::Failed(_) => "failed",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Failed(why) => write!(f, "failed: {why}"),
            other => f.write_str(other.label()),
        }
    }
}

/// Runtime witnesses of the a-priori estimates. Positive `*_excess` values
/// are violations.
#[derive(Debug, Clone, PartialEq)]
pub struct Monitors {
    pub star_shaped: bool,
    pub convex_every_step: bool,
    /// `max_t (ρ_max − upper corridor)`.
    pub c0_upper_excess: f64,
    /// `max_t (lower corridor − ρ_min)`.
    pub c0_lower_excess: f64,
    pub c0_upper_bound: f64,
    pub c0_lower_bound: f64,
    /// `max_t (max|∇̄ρ| − sinh ρ_max sqrt(exp(4 ρ_max tanh ρ_min) − 1))`.
    pub gradient_excess: f64,
    /// `max_t` of (rhs at the argmax node − its comparison bound − tol).
    pub max_principle_excess: f64,
    /// Extremes of `Θ = φ^α f K` after the first 1% of steps.
    pub theta_min: f64,
    pub theta_max: f64,
    pub rho_max_strictly_decreasing: bool,
    pub evenness_defect_max: f64,
    /// Largest relative Klein curvature-law mismatch over the trace records.
    pub klein_mismatch_max: f64,
}

#[derive(Debug, Clone)]
pub struct FlowResult {
    pub state: RadialState,
    pub trace: DiagnosticsTrace,
    pub verdict: Verdict,
    pub regime: Regime,
    pub steps: usize,
    pub residual: Residual,
    /// Measured constant of the stationary equation (1 when unnormalized).
    pub c_star: f64,
    pub monitors: Monitors,
    pub functional_config: FunctionalConfig,
    pub initial_state: RadialState,
    /// Flow speed ∂ρ/∂t at t = 0.
    pub initial_rate: Vec<f64>,
}

impl FlowResult {
    pub fn converged(&self) -> bool {
        self.verdict == Verdict::Converged
    }

    /// Relative change of the conserved integral between the initial and the
    /// final state.
    pub fn conserved_drift(&self, problem: &FlowProblem) -> Result<f64, crate::error::FunctionalError> {
        let change = functionals::conserved_change(
            &self.initial_state,
            &self.state,
            &problem.data.f_tilde,
            problem.alpha(),
            1e-15,
        )?;
        let base = functionals::conserved_integral(
            &self.initial_state,
            &problem.data.f_tilde,
            problem.alpha(),
            &self.functional_config,
        )?;
        Ok(change.abs() / base.abs())
    }
}

/// Upper C⁰ corridor `max(ρ_max(0), ρ̄)` with `sinh^{α−1}(ρ̄) min f = 1`.
pub fn c0_upper_corridor(problem: &FlowProblem, rho_max0: f64) -> f64 {
    let a = problem.alpha();
    let rbar = problem.data.f_min().powf(-1.0 / (a - 1.0)).asinh();
    rho_max0.max(rbar)
}

/// Lower C⁰ corridor `min(ρ_min(0), ρ̲)` with
/// `sinh^{α−n−1}(ρ̲) coshⁿ(ρ̲) max f = 1` (when that has a root).
pub fn c0_lower_corridor(problem: &FlowProblem, rho_min0: f64) -> f64 {
    let n = problem.n() as f64;
    let a = problem.alpha();
    let fmax = problem.data.f_max();
    let g = |r: f64| r.sinh().powf(a - n - 1.0) * r.cosh().powf(n) * fmax - 1.0;
    // g is increasing for α ≥ n+1; g(0⁺) < 0 needed for a root.
    if a < n + 1.0 - 1e-12 || g(1e-12) >= 0.0 {
        return rho_min0.min(0.0);
    }
    let (mut lo, mut hi) = (1e-12_f64, 1.0_f64);
    while g(hi) < 0.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    rho_min0.min(lo)
}

fn gradient_bound(rho_min: f64, rho_max: f64) -> f64 {
    rho_max.sinh() * ((4.0 * rho_max * rho_min.tanh()).exp() - 1.0).sqrt()
}

struct RunMonitor<'a> {
    problem: &'a FlowProblem,
    m: Monitors,
    thetas: Vec<(f64, f64)>,
    last_rho_max: f64,
    c0_slack: f64,
}

impl<'a> RunMonitor<'a> {
    fn new(problem: &'a FlowProblem) -> Self {
        let s0 = &problem.initial;
        let upper = c0_upper_corridor(problem, s0.rho_max());
        let lower = c0_lower_corridor(problem, s0.rho_min());
        RunMonitor {
            problem,
            m: Monitors {
                star_shaped: true,
                convex_every_step: true,
                c0_upper_excess: f64::NEG_INFINITY,
                c0_lower_excess: f64::NEG_INFINITY,
                c0_upper_bound: upper,
                c0_lower_bound: lower,
                gradient_excess: f64::NEG_INFINITY,
                max_principle_excess: f64::NEG_INFINITY,
                theta_min: f64::NAN,
                theta_max: f64::NAN,
                rho_max_strictly_decreasing: true,
                evenness_defect_max: 0.0,
                klein_mismatch_max: 0.0,
            },
            thetas: Vec::new(),
            last_rho_max: s0.rho_max(),
            c0_slack: 10.0 * problem.controls().tol_rel,
        }
    }

    fn observe(&mut self, state: &RadialState, fields: &GeometryFields, k1: &[f64], eta: f64, first: bool) {
        let p = self.problem;
        let m = &mut self.m;
        m.star_shaped &= fields.u_min() > 0.0;
        m.convex_every_step &= fields.kappa_min() > 0.0;
        let (rmin, rmax) = (state.rho_min(), state.rho_max());
        m.c0_upper_excess = m.c0_upper_excess.max(rmax - m.c0_upper_bound - self.c0_slack);
        m.c0_lower_excess = m.c0_lower_excess.max(m.c0_lower_bound - rmin - self.c0_slack);
        if fields.kappa_min() > 0.0 {
            m.gradient_excess = m.gradient_excess.max(fields.grad_max() - gradient_bound(rmin, rmax));
        }
        // Comparison at the discrete maximum: rhs ≤ φ(η̃ − φ^{α−n−1} φ'ⁿ f).
        let j = state.argmax();
        let g = &fields.nodes[j];
        let n = p.n() as f64;
        let scale = if p.mode() == FlowMode::Normalized { eta } else { 1.0 };
        let bound = g.phi * (scale - g.phi.powf(p.alpha() - n - 1.0) * g.dphi.powf(n) * p.data.f[j]);
        // The discrete maximum sits up to Δθ/2 off the true one; allow the
        // resulting O(Δθ²) change of the curvature term.
        let h = p.grid.spacing();
        let curv_term = g.phi.powf(p.alpha()) * p.data.f[j] * g.w * g.gauss;
        let tol_fd = 1e-12 + h * h * curv_term * (1.0 + g.grad_norm() / g.phi).powi(2) * 10.0;
        m.max_principle_excess = m.max_principle_excess.max(k1[j] - bound - tol_fd);
        let theta = fields.theta_quantity(p.alpha(), &p.data.f);
        self.thetas.push((
            theta.iter().copied().fold(f64::INFINITY, f64::min),
            theta.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        ));
        if let Some(d) = state.evenness_defect() {
            m.evenness_defect_max = m.evenness_defect_max.max(d);
        }
        if !first {
            if !(rmax < self.last_rho_max) {
                m.rho_max_strictly_decreasing = false;
            }
            self.last_rho_max = rmax;
        }
    }

    fn finish(mut self) -> Monitors {
        let skip = self.thetas.len() / 100;
        let tail = &self.thetas[skip.min(self.thetas.len().saturating_sub(1))..];
        self.m.theta_min = tail.iter().map(|t| t.0).fold(f64::INFINITY, f64::min);
        self.m.theta_max = tail.iter().map(|t| t.1).fold(f64::NEG_INFINITY, f64::max);
        self.m
    }
}

fn trace_row(
    state: &RadialState,
    fields: &GeometryFields,
    problem: &FlowProblem,
    cfg: &FunctionalConfig,
    res: &Residual,
    eta: f64,
    dt: f64,
) -> (TraceRow, f64) {
    let k = klein_project_fields(state, fields);
    let q = functionals::q_functional(&k, &problem.data.f_tilde, problem.alpha(), &problem.grid, cfg)
        .unwrap_or(f64::NAN);
    let jv = functionals::j_functional(&k, &problem.grid, cfg).unwrap_or(f64::NAN);
    let conserved = functionals::conserved_integral(state, &problem.data.f_tilde, problem.alpha(), cfg)
        .unwrap_or(f64::NAN);
    let theta = fields.theta_quantity(problem.alpha(), &problem.data.f);
    let klein = functionals::klein_consistency(state).unwrap_or(f64::NAN);
    let row = TraceRow {
        t: state.t,
        dt,
        rho_min: state.rho_min(),
        rho_max: state.rho_max(),
        grad_max: fields.grad_max(),
        kappa_min: fields.kappa_min(),
        kappa_max: fields.kappa_max(),
        u_min: fields.u_min(),
        theta_min: theta.iter().copied().fold(f64::INFINITY, f64::min),
        theta_max: theta.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        residual_linf: res.linf,
        residual_l2: res.l2,
        q,
        j: jv,
        conserved,
        eta,
        c_star: res.c_star,
        evenness_defect: state.evenness_defect().unwrap_or(f64::NAN),
    };
    (row, klein)
}

/// Integrates the flow until convergence, timeout or failure. Math-domain
/// problems never panic; they end the run with a `Failed` verdict.
pub fn run(problem: &FlowProblem) -> FlowResult {
    let controls = problem.controls().clone();
    let mut state = problem.initial.clone();
    let cfg = FunctionalConfig::from_initial(&state)
        .or_else(|_| FunctionalConfig::new(0.25, 0.5 * state.rho_min(), 1e-12))
        .unwrap_or(FunctionalConfig { a: 0.25, b: 0.1, quad_tol: 1e-12 });
    let mut trace = DiagnosticsTrace::default();
    let mut monitor = RunMonitor::new(problem);
    let mut klein_max = 0.0_f64;
    let mut steps = 0usize;
    let mut last_dt = 0.0;
    let mut initial_rate = Vec::new();
    let mut last_res = Residual { linf: f64::NAN, l2: f64::NAN, c_star: f64::NAN, ratio_spread: f64::NAN };

    let failed = |state: RadialState, why: String, trace, steps, res, monitor: RunMonitor, klein: f64, rate| {
        let mut m = monitor.finish();
        m.klein_mismatch_max = klein;
        FlowResult {
            state,
            trace,
            verdict: Verdict::Failed(why),
            regime: problem.regime.clone(),
            steps,
            residual: res,
            c_star: f64::NAN,
            monitors: m,
            functional_config: cfg,
            initial_state: problem.initial.clone(),
            initial_rate: rate,
        }
    };

    let mut fields = match geometry_fields(&state) {
        Ok(f) => f,
        Err(e) => {
            return failed(state, e.to_string(), trace, 0, last_res, monitor, f64::NAN, initial_rate)
        }
    };

    let verdict = loop {
        let eta = match eta_for(&fields, problem) {
            Ok(v) => v,
            Err(e) => break Verdict::Failed(e.to_string()),
        };
        let k1 = match rhs_with_fields(&fields, problem, eta) {
            Ok(v) => v,
            Err(e) => break Verdict::Failed(e.to_string()),
        };
        if steps == 0 {
            initial_rate = k1.clone();
        }
        let res = functionals::residual(&fields, &problem.grid, &problem.data.f_tilde, problem.alpha(), problem.mode());
        last_res = res;
        monitor.observe(&state, &fields, &k1, eta, steps == 0);

        let converged = res.linf < controls.tol_rel;
        let timed_out = state.t >= controls.t_max || steps >= controls.max_steps;
        let collapsed = state.rho_max() < COLLAPSE_RADIUS;
        let stop = converged || timed_out || collapsed;
        if steps.is_multiple_of(controls.trace_stride) || stop {
            let (row, klein) = trace_row(&state, &fields, problem, &cfg, &res, eta, last_dt);
            klein_max = klein_max.max(klein);
            trace.rows.push(row);
        }
        if converged {
            break Verdict::Converged;
        }
        if timed_out || collapsed {
            let shrinking = monitor.m.rho_max_strictly_decreasing && steps > 0;
            break if shrinking { Verdict::Shrinking } else { Verdict::Timeout };
        }
        match adaptive_step(&state, &fields, &k1, eta, problem) {
            Ok((next, nf, report)) => {
                state = next;
                fields = nf;
                last_dt = report.dt;
                steps += 1;
            }
            Err(e) => break Verdict::Failed(e.to_string()),
        }
    };

    let mut m = monitor.finish();
    m.klein_mismatch_max = klein_max;
    let c_star = if verdict == Verdict::Converged || problem.mode() == FlowMode::Normalized {
        last_res.c_star
    } else {
        1.0
    };
    FlowResult {
        state,
        trace,
        verdict,
        regime: problem.regime.clone(),
        steps,
        residual: last_res,
        c_star,
        monitors: m,
        functional_config: cfg,
        initial_state: problem.initial.clone(),
        initial_rate,
    }
}

impl From<GeometryError> for Verdict {
    fn from(e: GeometryError) -> Self {
        Verdict::Failed(e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{DataFamily, InitialShape, NumericControls, ProblemConfig};

    fn problem(n: usize, nodes: usize, alpha: f64, mode: FlowMode, c: f64, initial: InitialShape) -> FlowProblem {
        FlowProblem::new(ProblemConfig {
            n,
            alpha,
            nodes,
            mode,
            data: DataFamily::Constant { c },
            initial,
            controls: NumericControls::default(),
        })
        .unwrap()
    }

    #[test]
    fn round_equilibrium_is_stationary() {
        let rho0 = 2.0_f64.acosh();
        let p = problem(1, 64, 2.0, FlowMode::Unnormalized, 2.0, InitialShape::Sphere { rho: rho0 });
        let r = rhs(&p.initial, &p, 1.0).unwrap();
        assert!(r.iter().all(|v| v.abs() < 1e-14), "{:?}", &r[..3]);
        let (next, rep) = step(&p.initial, &p).unwrap();
        for (a, b) in next.rho.iter().zip(&p.initial.rho) {
            assert!((a - b).abs() < 1e-14 * rep.dt.max(1.0));
        }
    }

    #[test]
    fn shrinking_and_expanding_rates() {
        let p = problem(1, 64, 2.0, FlowMode::Unnormalized, 0.5, InitialShape::Sphere { rho: 0.1 });
        let expect = 0.1_f64.sinh() * (1.0 - 2.0 * 0.1_f64.cosh());
        for v in rhs(&p.initial, &p, 1.0).unwrap() {
            assert!((v - expect).abs() < 1e-14);
            assert!(v < 0.0);
        }
        let p = problem(1, 64, 4.0, FlowMode::Unnormalized, 1.0, InitialShape::Sphere { rho: 0.1 });
        let expect = 0.1_f64.sinh() * (1.0 - 0.1_f64.sinh().powi(2) * 0.1_f64.cosh());
        for v in rhs(&p.initial, &p, 1.0).unwrap() {
            assert!((v - expect).abs() < 1e-14);
            assert!(v > 0.0);
        }
    }

    #[test]
    fn eta_for_spheres() {
        for (n, nodes, alpha) in [(1, 64, 2.5), (2, 65, 2.5), (2, 65, 3.0)] {
            let rho0 = 0.7_f64;
            let p = problem(n, nodes, alpha, FlowMode::Normalized, 1.0, InitialShape::Sphere { rho: rho0 });
            let eta = eta_normalized(&p.initial, &p).unwrap();
            let nf = n as f64;
            let expect = rho0.sinh().powf(alpha - nf - 1.0) * rho0.cosh().powf(nf);
            assert!((eta - expect).abs() < 1e-13 * expect, "n={n}: {eta} vs {expect}");
            if (alpha - nf - 1.0).abs() < 1e-12 {
                assert!(rhs(&p.initial, &p, eta).unwrap().iter().all(|v| v.abs() < 1e-13));
            }
            // Scaling f̃ by c divides η by c.
            let p2 = problem(n, nodes, alpha, FlowMode::Normalized, 2.0, InitialShape::Sphere { rho: rho0 });
            let eta2 = eta_normalized(&p2.initial, &p2).unwrap();
            assert!((eta2 - eta / 2.0).abs() < 1e-13 * eta);
        }
    }

    #[test]
    fn tiny_step_matches_euler() {
        let p = problem(1, 128, 3.0, FlowMode::Unnormalized, 2.0, InitialShape::Cosine { c0: 0.8, coeffs: vec![0.0, 0.1] });
        let dt = 1e-7;
        let next = step_with_dt(&p.initial, &p, dt).unwrap();
        let r = rhs(&p.initial, &p, 1.0).unwrap();
        for j in 0..128 {
            let euler = p.initial.rho[j] + dt * r[j];
            assert!((next.rho[j] - euler).abs() < 1e-11 * dt.max(1e-3), "node {j}");
        }
    }

    #[test]
    fn shrinking_sphere_decreases() {
        let p = problem(1, 64, 2.0, FlowMode::Unnormalized, 0.5, InitialShape::Sphere { rho: 0.2 });
        let (next, _) = step(&p.initial, &p).unwrap();
        assert!(next.rho_max() < p.initial.rho_max());
    }

    #[test]
    fn corridors() {
        let p = problem(1, 64, 2.0, FlowMode::Unnormalized, 2.0, InitialShape::Sphere { rho: 0.3 });
        // f = 1/2: ρ̄ = asinh 2, ρ̲ = acosh 2.
        assert!((c0_upper_corridor(&p, 0.3) - 2.0_f64.asinh()).abs() < 1e-14);
        assert!((c0_lower_corridor(&p, 3.0) - 2.0_f64.acosh()).abs() < 1e-12);
        assert_eq!(c0_lower_corridor(&p, 0.3), 0.3);
    }
}
