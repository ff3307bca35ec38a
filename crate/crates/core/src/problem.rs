//! Flow problem description: prescribed data, initial shape, numeric
//! controls, and the regime classification against the convergence theorems.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::FlowError;
use crate::geometry::RadialState;
use crate::grid::{Dim, SphereGrid};

const ALPHA_EPS: f64 = 1e-12;

/// Which flow is integrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowMode {
    /// `∂ρ/∂t = −φ^α f w K + φ`
    Unnormalized,
    /// `∂ρ/∂t = −φ^α f w K + η(t) φ`
    Normalized,
}

/// Family of the prescribed function f̃ (the flow speed uses `f = 1/f̃`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum DataFamily {
    /// `f̃ ≡ c`
    Constant { c: f64 },
    /// `f̃ = c0 + Σ_k a_k cos(2kθ)`, k = 1, 2, …
    EvenCosine { c0: f64, coeffs: Vec<f64> },
    /// `f̃ = c0 + Σ_k a_k cos(kθ)`, k = 1, 2, … (not even in general)
    Cosine { c0: f64, coeffs: Vec<f64> },
    /// `f̃ = Σ_k c_k P_{2k}(cos θ₁)`, k = 0, 1, …
    EvenLegendre { coeffs: Vec<f64> },
    /// `f̃ = base + amplitude (G(θ − center) + G(θ − center*))` with a
    /// Gaussian `G` of the given width and `center*` the antipodal center.
    GaussianPair { base: f64, amplitude: f64, center: f64, width: f64 },
}

impl DataFamily {
    /// f̃ at angle θ (colatitude on S²).
    pub fn eval(&self, dim: Dim, theta: f64) -> f64 {
        match self {
            DataFamily::Constant { c } => *c,
            DataFamily::EvenCosine { c0, coeffs } => {
                c0 + coeffs
                    .iter()
                    .enumerate()
                    .map(|(k, a)| a * (2.0 * (k + 1) as f64 * theta).cos())
                    .sum::<f64>()
            }
            DataFamily::Cosine { c0, coeffs } => {
                c0 + coeffs
                    .iter()
                    .enumerate()
                    .map(|(k, a)| a * ((k + 1) as f64 * theta).cos())
                    .sum::<f64>()
            }
            DataFamily::EvenLegendre { coeffs } => {
                let x = theta.cos();
                coeffs.iter().enumerate().map(|(k, c)| c * legendre(2 * k, x)).sum()
            }
            DataFamily::GaussianPair { base, amplitude, center, width } => {
                let (d1, d2) = match dim {
                    Dim::One => (
                        circle_distance(theta, *center),
                        circle_distance(theta, center + PI),
                    ),
                    Dim::Two => ((theta - center).abs(), (theta - (PI - center)).abs()),
                };
                let g = |d: f64| (-d * d / (2.0 * width * width)).exp();
                base + amplitude * (g(d1) + g(d2))
            }
        }
    }

    /// Whether the family is antipodally even by construction.
    pub fn is_even(&self) -> bool {
        match self {
            DataFamily::Cosine { coeffs, .. } => {
                coeffs.iter().enumerate().all(|(k, a)| k % 2 == 1 || *a == 0.0)
            }
            _ => true,
        }
    }

    /// Sets the leading amplitude parameter: `c` for constants, the first
    /// coefficient of series, the bump amplitude for Gaussian pairs.
    pub fn set_amplitude(&mut self, value: f64) {
        match self {
            DataFamily::Constant { c } => *c = value,
            DataFamily::EvenCosine { coeffs, .. } | DataFamily::Cosine { coeffs, .. } => {
                if coeffs.is_empty() {
                    coeffs.push(value);
                } else {
                    coeffs[0] = value;
                }
            }
            DataFamily::EvenLegendre { coeffs } => {
                while coeffs.len() < 2 {
                    coeffs.push(0.0);
                }
                coeffs[1] = value;
            }
            DataFamily::GaussianPair { amplitude, .. } => *amplitude = value,
        }
    }
}

fn circle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

/// Legendre polynomial by the three-term recurrence.
pub fn legendre(l: usize, x: f64) -> f64 {
    let (mut p0, mut p1) = (1.0, x);
    if l == 0 {
        return p0;
    }
    for k in 1..l {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// f̃ and f = 1/f̃ sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PrescribedData {
    pub family: DataFamily,
    pub f_tilde: Vec<f64>,
    pub f: Vec<f64>,
    pub even: bool,
}

impl PrescribedData {
    /// Samples the family; even families are sampled on one representative
    /// of each antipodal pair so the samples are exactly symmetric.
    pub fn sample(family: DataFamily, grid: &SphereGrid) -> Result<Self, FlowError> {
        let dim = grid.dim();
        let mut f_tilde: Vec<f64> = grid.theta().iter().map(|&t| family.eval(dim, t)).collect();
        if family.is_even() {
            for j in 0..grid.len() {
                if let Some(k) = grid.antipode(j) {
                    if k < j {
                        f_tilde[j] = f_tilde[k];
                    }
                }
            }
        }
        if let Some((j, v)) = f_tilde.iter().enumerate().find(|(_, v)| !(**v > 0.0 && v.is_finite())) {
            return Err(FlowError::InvalidProblem(format!(
                "prescribed f̃ must be positive: f̃ = {v} at node {j} (θ = {})",
                grid.theta()[j]
            )));
        }
        let even = match (0..grid.len()).map(|j| grid.antipode(j)).collect::<Option<Vec<_>>>() {
            Some(pairs) => pairs.iter().enumerate().all(|(j, &k)| f_tilde[j] == f_tilde[k]),
            None => false,
        };
        let f = f_tilde.iter().map(|v| 1.0 / v).collect();
        Ok(PrescribedData { family, f_tilde, f, even })
    }

    pub fn f_min(&self) -> f64 {
        self.f.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn f_max(&self) -> f64 {
        self.f.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Initial hypersurface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialShape {
    /// Geodesic sphere `ρ ≡ rho`.
    Sphere { rho: f64 },
    /// `ρ = c0 + Σ_k a_k cos(kθ)`, k = 1, 2, …
    Cosine { c0: f64, coeffs: Vec<f64> },
    /// Preimage of the Euclidean ellipse/ellipsoid with semi-axes `e1`
    /// (along θ = 0) and `e2` inside the Klein ball.
    KleinEllipsoid { e1: f64, e2: f64 },
}

impl InitialShape {
    pub fn eval(&self, theta: f64) -> f64 {
        match self {
            InitialShape::Sphere { rho } => *rho,
            InitialShape::Cosine { c0, coeffs } => {
                c0 + coeffs
                    .iter()
                    .enumerate()
                    .map(|(k, a)| a * ((k + 1) as f64 * theta).cos())
                    .sum::<f64>()
            }
            InitialShape::KleinEllipsoid { e1, e2 } => {
                crate::functionals::ellipsoid_radius(*e1, *e2, theta).atanh()
            }
        }
    }

    pub fn state(&self, grid: Arc<SphereGrid>) -> Result<RadialState, FlowError> {
        if let InitialShape::KleinEllipsoid { e1, e2 } = self {
            if !(*e1 > 0.0 && *e1 < 1.0 && *e2 > 0.0 && *e2 < 1.0) {
                return Err(FlowError::InvalidProblem(format!(
                    "Klein ellipsoid axes must lie in (0, 1), got ({e1}, {e2})"
                )));
            }
        }
        let mut rho: Vec<f64> = grid.theta().iter().map(|&t| self.eval(t)).collect();
        if self.is_even() {
            for j in 0..grid.len() {
                if let Some(k) = grid.antipode(j) {
                    if k < j {
                        rho[j] = rho[k];
                    }
                }
            }
        }
        Ok(RadialState::new(grid, rho, 0.0)?)
    }

    fn is_even(&self) -> bool {
        match self {
            InitialShape::Cosine { coeffs, .. } => {
                coeffs.iter().enumerate().all(|(k, a)| k % 2 == 1 || *a == 0.0)
            }
            _ => true,
        }
    }
}

/// Time-stepping and stopping controls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NumericControls {
    /// Safety factor on the parabolic step restriction, in (0, 1].
    pub cfl: f64,
    /// Convergence threshold on the normalized L∞ residual.
    pub tol_rel: f64,
    pub t_max: f64,
    pub max_halvings: u32,
    /// Steps between trace records.
    pub trace_stride: usize,
    pub max_steps: usize,
}

impl Default for NumericControls {
    fn default() -> Self {
        NumericControls {
            cfl: 0.2,
            tol_rel: 1e-8,
            t_max: 200.0,
            max_halvings: 30,
            trace_stride: 50,
            max_steps: 20_000_000,
        }
    }
}

/// Serializable problem description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub n: usize,
    pub alpha: f64,
    pub nodes: usize,
    pub mode: FlowMode,
    pub data: DataFamily,
    pub initial: InitialShape,
    #[serde(default)]
    pub controls: NumericControls,
}

/// Position of a problem relative to the convergence theorems.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Regime {
    /// Unnormalized flow, `α > n+1`.
    Supercritical,
    /// Unnormalized flow, `α = n+1` and `f < 1`.
    CriticalSmallF,
    /// Unnormalized flow, `α = n+1`, even `f`, even initial data and
    /// `∫ f⁻¹ > |Sⁿ|`.
    CriticalEven,
    /// Normalized flow, `2 < α ≤ n+1`, even `f` and even initial data.
    NormalizedEven,
    /// Outside every theorem; the reason is recorded.
    Exploratory(String),
}

impl Regime {
    pub fn is_theorem(&self) -> bool {
        !matches!(self, Regime::Exploratory(_))
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Regime::Supercritical => write!(f, "theorem (i: α>n+1)"),
            Regime::CriticalSmallF => write!(f, "theorem (ii′: α=n+1, f<1)"),
            Regime::CriticalEven => write!(f, "theorem (even: α=n+1, ∫f⁻¹>|Sⁿ|)"),
            Regime::NormalizedEven => write!(f, "theorem (normalized: 2<α≤n+1, f even)"),
            Regime::Exploratory(why) => write!(f, "exploratory ({why})"),
        }
    }
}

/// A fully resolved problem ready to integrate.
#[derive(Debug, Clone)]
pub struct FlowProblem {
    pub config: ProblemConfig,
    pub grid: Arc<SphereGrid>,
    pub data: PrescribedData,
    pub initial: RadialState,
    pub regime: Regime,
}

impl FlowProblem {
    pub fn new(config: ProblemConfig) -> Result<Self, FlowError> {
        let grid = Arc::new(
            SphereGrid::new(config.n, config.nodes)
                .map_err(|e| FlowError::InvalidProblem(e.to_string()))?,
        );
        Self::on_grid(config, grid)
    }

    /// Resolves a problem on an existing grid (which must match `n` and
    /// `nodes`).
    pub fn on_grid(config: ProblemConfig, grid: Arc<SphereGrid>) -> Result<Self, FlowError> {
        if grid.n() != config.n || grid.len() != config.nodes {
            return Err(FlowError::InvalidProblem("grid does not match n/nodes".into()));
        }
        let c = &config.controls;
        if !(c.cfl > 0.0 && c.cfl <= 1.0) {
            return Err(FlowError::InvalidProblem(format!("cfl = {} outside (0, 1]", c.cfl)));
        }
        if !(c.tol_rel > 0.0) {
            return Err(FlowError::InvalidProblem("tol_rel must be positive".into()));
        }
        if !(c.t_max >= 0.0) {
            return Err(FlowError::InvalidProblem("t_max must be non-negative".into()));
        }
        if c.trace_stride == 0 {
            return Err(FlowError::InvalidProblem("trace_stride must be at least 1".into()));
        }
        if !(config.alpha.is_finite() && config.alpha > 0.0) {
            return Err(FlowError::InvalidProblem(format!("alpha = {} must be positive", config.alpha)));
        }
        if config.mode == FlowMode::Normalized && config.alpha <= 2.0 {
            return Err(FlowError::InvalidProblem(format!(
                "normalized flow needs alpha > 2, got {}",
                config.alpha
            )));
        }
        let data = PrescribedData::sample(config.data.clone(), &grid)?;
        let initial = config.initial.state(grid.clone())?;
        let regime = classify(&config, &grid, &data, &initial);
        Ok(FlowProblem { config, grid, data, initial, regime })
    }

    pub fn n(&self) -> usize {
        self.config.n
    }

    pub fn alpha(&self) -> f64 {
        self.config.alpha
    }

    pub fn mode(&self) -> FlowMode {
        self.config.mode
    }

    pub fn controls(&self) -> &NumericControls {
        &self.config.controls
    }
}

fn classify(
    config: &ProblemConfig,
    grid: &SphereGrid,
    data: &PrescribedData,
    initial: &RadialState,
) -> Regime {
    let crit = config.n as f64 + 1.0;
    let alpha = config.alpha;
    let initial_even = initial.evenness_defect() == Some(0.0);
    match config.mode {
        FlowMode::Unnormalized => {
            if alpha > crit + ALPHA_EPS {
                Regime::Supercritical
            } else if (alpha - crit).abs() <= ALPHA_EPS {
                if data.f_max() < 1.0 {
                    Regime::CriticalSmallF
                } else if data.even
                    && initial_even
                    && grid.integrate(&data.f_tilde) > grid.dim().sphere_area()
                {
                    Regime::CriticalEven
                } else {
                    Regime::Exploratory("α=n+1 without f<1 or the even integral condition".into())
                }
            } else {
                Regime::Exploratory("α<n+1 for the unnormalized flow".into())
            }
        }
        FlowMode::Normalized => {
            if alpha > crit + ALPHA_EPS {
                Regime::Exploratory("α>n+1 for the normalized flow".into())
            } else if !data.even || !initial_even {
                Regime::Exploratory("normalized flow without even data".into())
            } else {
                Regime::NormalizedEven
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(n: usize, alpha: f64, mode: FlowMode, data: DataFamily) -> ProblemConfig {
        ProblemConfig {
            n,
            alpha,
            nodes: if n == 1 { 64 } else { 65 },
            mode,
            data,
            initial: InitialShape::Sphere { rho: 0.5 },
            controls: NumericControls::default(),
        }
    }

    #[test]
    fn regimes() {
        let p = FlowProblem::new(config(1, 2.0, FlowMode::Unnormalized, DataFamily::Constant { c: 2.0 })).unwrap();
        assert_eq!(p.regime, Regime::CriticalSmallF);
        assert_eq!(p.regime.to_string(), "theorem (ii′: α=n+1, f<1)");
        let p = FlowProblem::new(config(1, 3.0, FlowMode::Unnormalized, DataFamily::Constant { c: 0.5 })).unwrap();
        assert_eq!(p.regime, Regime::Supercritical);
        let p = FlowProblem::new(config(1, 2.0, FlowMode::Unnormalized, DataFamily::Constant { c: 0.5 })).unwrap();
        assert!(!p.regime.is_theorem());
        let p = FlowProblem::new(config(2, 2.5, FlowMode::Normalized, DataFamily::Constant { c: 1.0 })).unwrap();
        assert_eq!(p.regime, Regime::NormalizedEven);
        let p = FlowProblem::new(config(1, 2.5, FlowMode::Normalized, DataFamily::Constant { c: 1.0 })).unwrap();
        assert!(!p.regime.is_theorem());
        // Even Alexandrov case: f ≥ 1 somewhere but ∫ f̃ > |S¹|.
        let data = DataFamily::EvenCosine { c0: 1.2, coeffs: vec![0.5] };
        let p = FlowProblem::new(config(1, 2.0, FlowMode::Unnormalized, data)).unwrap();
        assert_eq!(p.regime, Regime::CriticalEven);
    }

    #[test]
    fn rejects_nonpositive_data() {
        let data = DataFamily::EvenCosine { c0: 1.0, coeffs: vec![-2.0] };
        let err = FlowProblem::new(config(1, 3.0, FlowMode::Unnormalized, data)).unwrap_err();
        assert!(matches!(err, FlowError::InvalidProblem(_)));
    }

    #[test]
    fn normalized_needs_alpha_above_two() {
        let err = FlowProblem::new(config(1, 2.0, FlowMode::Normalized, DataFamily::Constant { c: 1.0 }));
        assert!(err.is_err());
    }

    #[test]
    fn even_families_sample_symmetrically() {
        let g = SphereGrid::new(1, 128).unwrap();
        let fams = [
            DataFamily::EvenCosine { c0: 2.0, coeffs: vec![0.5, 0.1] },
            DataFamily::GaussianPair { base: 1.0, amplitude: 0.5, center: 0.7, width: 0.3 },
        ];
        for fam in fams {
            let d = PrescribedData::sample(fam, &g).unwrap();
            assert!(d.even);
        }
        let odd = PrescribedData::sample(DataFamily::Cosine { c0: 2.0, coeffs: vec![0.3] }, &g).unwrap();
        assert!(!odd.even);
        let g2 = SphereGrid::new(2, 65).unwrap();
        let d = PrescribedData::sample(DataFamily::EvenLegendre { coeffs: vec![2.0, 0.4] }, &g2).unwrap();
        assert!(d.even);
        assert!((d.f_tilde[0] - 2.4).abs() < 1e-15);
    }

    #[test]
    fn legendre_values() {
        assert_eq!(legendre(0, 0.3), 1.0);
        assert!((legendre(2, 0.3) - 0.5 * (3.0 * 0.09 - 1.0)).abs() < 1e-15);
        assert!((legendre(4, 1.0) - 1.0).abs() < 1e-15);
    }
}
