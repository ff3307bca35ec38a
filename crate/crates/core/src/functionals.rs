//! Klein-model projection and the integral quantities monitored along the
//! flows: the monotone functionals `Q` (unnormalized flow) and `J`
//! (normalized flow), the conserved integral `∫ Ω(ρ)/f dθ`, and the residual
//! of the stationary equation `φ^α K = c f̃ u`.
//!
//! Integrals over the Gauss-map sphere (`dσ`) are pulled back to the θ-grid
//! through `r^{n+1} dθ = (û / K̂) dσ`, so no inverse Gauss map is ever formed.

use crate::error::{FunctionalError, GridError};
use crate::flow::FlowResult;
use crate::problem::FlowMode;
use crate::geometry::{geometry_fields, GeometryFields, RadialState};
use crate::grid::{Dim, SphereGrid};
use crate::quadrature::{adaptive_simpson, cumulative_from};

/// Projection of a radial graph into the unit Klein ball.
#[derive(Debug, Clone)]
pub struct KleinState {
    pub dim: Dim,
    /// Euclidean radial function `r = tanh ρ`.
    pub r: Vec<f64>,
    /// Euclidean support function û.
    pub uhat: Vec<f64>,
    /// Euclidean Gauss curvature K̂.
    pub khat: Vec<f64>,
}

impl KleinState {
    pub fn n(&self) -> usize {
        self.dim.n()
    }

    /// Pull-back density `K̂ r^{n+1} / û` turning `dσ` into `dθ`.
    pub fn sigma_density(&self) -> Vec<f64> {
        let p = (self.n() + 1) as i32;
        self.r
            .iter()
            .zip(&self.uhat)
            .zip(&self.khat)
            .map(|((r, u), k)| k * r.powi(p) / u)
            .collect()
    }

    /// Klein image built directly from a Euclidean radial function `r(θ)`
    /// using the Euclidean radial-graph formulas.
    pub fn from_euclidean_radial(grid: &SphereGrid, r: &[f64]) -> Result<Self, FunctionalError> {
        let fields = euclidean_fields(grid, r)?;
        Ok(KleinState {
            dim: grid.dim(),
            r: r.to_vec(),
            uhat: fields.iter().map(|e| e.uhat).collect(),
            khat: fields.iter().map(|e| e.khat).collect(),
        })
    }

    /// Hyperbolic support function recovered from û.
    pub fn hyperbolic_support(&self) -> Vec<f64> {
        self.uhat.iter().map(|u| u / (1.0 - u * u).sqrt()).collect()
    }

    fn is_admissible(&self) -> bool {
        self.khat.iter().all(|&k| k > 0.0 && k.is_finite())
            && self.uhat.iter().all(|&u| u > 0.0 && u < 1.0)
    }
}

/// Curvature law between a hyperbolic hypersurface and its Klein image:
/// `K = K̂ ((1 − r²)/(1 − û²))^{(n+2)/2}`.
pub fn klein_curvature_factor(n: usize, r: f64, uhat: f64) -> f64 {
    ((1.0 - r * r) / (1.0 - uhat * uhat)).powf(0.5 * (n as f64 + 2.0))
}

pub fn klein_project(state: &RadialState) -> Result<KleinState, FunctionalError> {
    let fields = geometry_fields(state)?;
    Ok(klein_project_fields(state, &fields))
}

/// Projection reusing already computed geometry.
pub fn klein_project_fields(state: &RadialState, fields: &GeometryFields) -> KleinState {
    let n = fields.n();
    let mut r = Vec::with_capacity(fields.len());
    let mut uhat = Vec::with_capacity(fields.len());
    let mut khat = Vec::with_capacity(fields.len());
    for (rho, g) in state.rho.iter().zip(&fields.nodes) {
        let rj = rho.tanh();
        let uj = g.u / (1.0 + g.u * g.u).sqrt();
        r.push(rj);
        uhat.push(uj);
        khat.push(g.gauss / klein_curvature_factor(n, rj, uj));
    }
    KleinState { dim: fields.dim, r, uhat, khat }
}

#[derive(Debug, Clone, Copy)]
struct EuclideanNode {
    uhat: f64,
    khat: f64,
}

fn euclidean_fields(grid: &SphereGrid, r: &[f64]) -> Result<Vec<EuclideanNode>, FunctionalError> {
    if r.len() != grid.len() {
        return Err(GridError::Incompatible.into());
    }
    let d1 = grid.d1(r);
    let d2 = grid.d2(r);
    let n = grid.n();
    Ok((0..r.len())
        .map(|j| {
            let rj = r[j];
            let p = d1[j];
            let root = (rj * rj + p * p).sqrt();
            let uhat = rj * rj / root;
            // ĥ = (−r S + 2 p pᵀ + r² I)/root, ĝ = r² I + p pᵀ; diagonal in the frame.
            let h11 = (-rj * d2[j] + 2.0 * p * p + rj * rj) / root;
            let g11 = rj * rj + p * p;
            let mut khat = h11 / g11;
            if n == 2 {
                let s22 = grid.azimuthal_hessian(j, &d1, &d2);
                let h22 = (-rj * s22 + rj * rj) / root;
                khat *= h22 / (rj * rj);
            }
            EuclideanNode { uhat, khat }
        })
        .collect())
}

/// Largest relative mismatch between the intrinsic Gauss curvature and the
/// one obtained from the directly computed Euclidean image through the
/// curvature law. Both routes share only the grid stencils.
pub fn klein_consistency(state: &RadialState) -> Result<f64, FunctionalError> {
    let fields = geometry_fields(state)?;
    let r: Vec<f64> = state.rho.iter().map(|p| p.tanh()).collect();
    let euclid = euclidean_fields(&state.grid, &r)?;
    let n = state.grid.n();
    Ok(fields
        .nodes
        .iter()
        .zip(euclid.iter().zip(&r))
        .map(|(g, (e, &rj))| {
            let k = e.khat * klein_curvature_factor(n, rj, e.uhat);
            (k - g.gauss).abs() / g.gauss.abs()
        })
        .fold(0.0, f64::max))
}

/// Lower integration limits of the functionals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FunctionalConfig {
    /// Lower limit of the inner integrals of `Q` and `J`, in (0, 1).
    pub a: f64,
    /// Lower limit of `Ω(ρ) = ∫_b^ρ sinh^{n−α}`.
    pub b: f64,
    pub quad_tol: f64,
}

impl FunctionalConfig {
    pub fn new(a: f64, b: f64, quad_tol: f64) -> Result<Self, FunctionalError> {
        if !(a > 0.0 && a < 1.0) {
            return Err(FunctionalError::InvalidConfig(format!("a = {a} outside (0, 1)")));
        }
        if !(b > 0.0 && b.is_finite()) {
            return Err(FunctionalError::InvalidConfig(format!("b = {b} must be positive")));
        }
        if !(quad_tol > 0.0) {
            return Err(FunctionalError::InvalidConfig("quad_tol must be positive".into()));
        }
        Ok(FunctionalConfig { a, b, quad_tol })
    }

    /// Limits frozen from the initial state: `a = ½ min û`, `b = ½ min ρ`.
    pub fn from_initial(state: &RadialState) -> Result<Self, FunctionalError> {
        let k = klein_project(state)?;
        let umin = k.uhat.iter().copied().fold(f64::INFINITY, f64::min);
        Self::new(0.5 * umin, 0.5 * state.rho_min(), 1e-12)
    }
}

/// `s^{n−α} (1 − s²)^{−(n+2−α)/2}`, the integrand of the radial part of Q.
pub fn psi_radial_inverse_weight(n: usize, alpha: f64, s: f64) -> f64 {
    let nf = n as f64;
    s.powf(nf - alpha) * (1.0 - s * s).powf(-0.5 * (nf + 2.0 - alpha))
}

/// `varphi_support(s) = s⁻¹ (1 − s²)^{−(n+1)/2}`.
pub fn varphi_support(n: usize, s: f64) -> f64 {
    (1.0 - s * s).powf(-0.5 * (n as f64 + 1.0)) / s
}

/// Antiderivative of [`varphi_support`] (n = 1, 2).
fn varphi_antiderivative(n: usize, s: f64) -> f64 {
    let c = (1.0 - s * s).sqrt();
    match n {
        1 => s.ln() - c.ln(),
        _ => (s / (1.0 + c)).ln() + 1.0 / c,
    }
}

/// `∫_a^x varphi_support` for every `x` (closed form).
pub fn support_potential(n: usize, a: f64, xs: &[f64]) -> Vec<f64> {
    let base = varphi_antiderivative(n, a);
    xs.iter().map(|&x| varphi_antiderivative(n, x) - base).collect()
}

/// `Ψ(r) = ∫_a^r ψ(s)⁻¹ sⁿ ds` for every `r`.
pub fn radial_potential(
    n: usize,
    alpha: f64,
    a: f64,
    rs: &[f64],
    tol: f64,
) -> Result<Vec<f64>, FunctionalError> {
    if (alpha - (n as f64 + 1.0)).abs() < 1e-14 {
        // s⁻¹ (1 − s²)^{−1/2}
        let anti = |s: f64| (s / (1.0 + (1.0 - s * s).sqrt())).ln();
        let base = anti(a);
        return Ok(rs.iter().map(|&r| anti(r) - base).collect());
    }
    cumulative_from(&|s| psi_radial_inverse_weight(n, alpha, s), a, rs, tol)
}

/// `Q = ∫ Ψ(r) f⁻¹ dθ − ∫ Ω_a(û) dσ`; NaN when the projected state is not
/// strictly convex.
pub fn q_functional(
    k: &KleinState,
    f_tilde: &[f64],
    alpha: f64,
    grid: &SphereGrid,
    cfg: &FunctionalConfig,
) -> Result<f64, FunctionalError> {
    if !k.is_admissible() {
        return Ok(f64::NAN);
    }
    let n = k.n();
    let psi = radial_potential(n, alpha, cfg.a, &k.r, cfg.quad_tol)?;
    let omega = support_potential(n, cfg.a, &k.uhat);
    let dens = k.sigma_density();
    let field: Vec<f64> = (0..k.r.len())
        .map(|j| psi[j] * f_tilde[j] - omega[j] * dens[j])
        .collect();
    Ok(grid.integrate(&field))
}

/// `J = ∫ Ω_a(û) dσ`; NaN when the projected state is not strictly convex.
pub fn j_functional(
    k: &KleinState,
    grid: &SphereGrid,
    cfg: &FunctionalConfig,
) -> Result<f64, FunctionalError> {
    if !k.is_admissible() {
        return Ok(f64::NAN);
    }
    let omega = support_potential(k.n(), cfg.a, &k.uhat);
    let dens = k.sigma_density();
    let field: Vec<f64> = omega.iter().zip(&dens).map(|(o, d)| o * d).collect();
    Ok(grid.integrate(&field))
}

fn sinh_power_antiderivative(exponent: f64) -> Option<fn(f64) -> f64> {
    if (exponent + 1.0).abs() < 1e-14 {
        Some(|s: f64| (0.5 * s).tanh().ln())
    } else if exponent.abs() < 1e-14 {
        Some(|s: f64| s)
    } else if (exponent - 1.0).abs() < 1e-14 {
        Some(|s: f64| s.cosh())
    } else {
        None
    }
}

/// `Ω(ρ) = ∫_b^ρ sinh^{n−α}(s) ds` per node.
pub fn omega_potential(
    n: usize,
    alpha: f64,
    b: f64,
    rho: &[f64],
    tol: f64,
) -> Result<Vec<f64>, FunctionalError> {
    let e = n as f64 - alpha;
    if let Some(anti) = sinh_power_antiderivative(e) {
        let base = anti(b);
        return Ok(rho.iter().map(|&r| anti(r) - base).collect());
    }
    cumulative_from(&|s: f64| s.sinh().powf(e), b, rho, tol)
}

/// `∫ Ω(ρ)/f dθ`, constant along the normalized flow.
pub fn conserved_integral(
    state: &RadialState,
    f_tilde: &[f64],
    alpha: f64,
    cfg: &FunctionalConfig,
) -> Result<f64, FunctionalError> {
    let omega = omega_potential(state.grid.n(), alpha, cfg.b, &state.rho, cfg.quad_tol)?;
    let field: Vec<f64> = omega.iter().zip(f_tilde).map(|(o, f)| o * f).collect();
    Ok(state.grid.integrate(&field))
}

/// Change of the conserved integral between two states on the same grid,
/// integrating `sinh^{n−α}` only between the two radii at each node.
pub fn conserved_change(
    from: &RadialState,
    to: &RadialState,
    f_tilde: &[f64],
    alpha: f64,
    tol: f64,
) -> Result<f64, FunctionalError> {
    if from.grid.len() != to.grid.len() || from.grid.dim() != to.grid.dim() {
        return Err(GridError::Incompatible.into());
    }
    let e = from.grid.n() as f64 - alpha;
    let anti = sinh_power_antiderivative(e);
    let mut field = Vec::with_capacity(from.rho.len());
    for ((&r0, &r1), &ft) in from.rho.iter().zip(&to.rho).zip(f_tilde) {
        let d = match anti {
            Some(a) => a(r1) - a(r0),
            None => adaptive_simpson(&|s: f64| s.sinh().powf(e), r0, r1, tol)?,
        };
        field.push(d * ft);
    }
    Ok(from.grid.integrate(&field))
}

/// Residual of `φ^α K = c f̃ u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residual {
    /// `max_j |R_j| / max_j(f̃ u)`.
    pub linf: f64,
    /// `sqrt(∫ R² / |Sⁿ|) / max_j(f̃ u)`.
    pub l2: f64,
    /// `c` of the stationary equation (1 for the unnormalized flow).
    pub c_star: f64,
    /// Relative spread `(max − min)/mean` of the node ratio `φ^α K/(f̃ u)`.
    pub ratio_spread: f64,
}

pub fn residual(
    fields: &GeometryFields,
    grid: &SphereGrid,
    f_tilde: &[f64],
    alpha: f64,
    mode: FlowMode,
) -> Residual {
    let lhs: Vec<f64> = fields.nodes.iter().map(|g| g.phi.powf(alpha) * g.gauss).collect();
    let rhs: Vec<f64> = fields.nodes.iter().zip(f_tilde).map(|(g, f)| f * g.u).collect();
    let ratios: Vec<f64> = lhs.iter().zip(&rhs).map(|(l, r)| l / r).collect();
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let rmin = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let rmax = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let c_star = match mode {
        FlowMode::Unnormalized => 1.0,
        FlowMode::Normalized => mean,
    };
    let res = residual_nodes(fields, f_tilde, alpha, c_star);
    let linf = res.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let sq: Vec<f64> = res.iter().map(|v| v * v).collect();
    let l2 = (grid.integrate(&sq) / grid.dim().sphere_area()).sqrt();
    Residual { linf, l2, c_star, ratio_spread: (rmax - rmin) / mean.abs() }
}

/// Node residuals `(φ^α K − c f̃ u) / max_j(f̃ u)`.
pub fn residual_nodes(fields: &GeometryFields, f_tilde: &[f64], alpha: f64, c_star: f64) -> Vec<f64> {
    let rhs: Vec<f64> = fields.nodes.iter().zip(f_tilde).map(|(g, f)| f * g.u).collect();
    let scale = rhs.iter().copied().fold(0.0, f64::max);
    fields
        .nodes
        .iter()
        .zip(&rhs)
        .map(|(g, r)| (g.phi.powf(alpha) * g.gauss - c_star * r) / scale)
        .collect()
}

/// Largest node distance between the final profiles of two runs.
pub fn uniqueness_check(a: &FlowResult, b: &FlowResult) -> Result<f64, GridError> {
    let (sa, sb) = (&a.state, &b.state);
    if sa.grid.dim() != sb.grid.dim() || sa.grid.len() != sb.grid.len() {
        return Err(GridError::Incompatible);
    }
    Ok(sa.rho.iter().zip(&sb.rho).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}

/// Euclidean radial function of the rotation ellipsoid
/// `x₁²/e₁² + |x'|²/e₂² = 1` in the direction at angle θ from the x₁ axis.
pub fn ellipsoid_radius(e1: f64, e2: f64, theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    e1 * e2 / (e2 * e2 * c * c + e1 * e1 * s * s).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn grid(n: usize, nodes: usize) -> Arc<SphereGrid> {
        Arc::new(SphereGrid::new(n, nodes).unwrap())
    }

    #[test]
    fn projection_of_circle() {
        let g = grid(1, 64);
        let rho0 = 0.5_f64.atanh();
        let s = RadialState::geodesic_sphere(g, rho0).unwrap();
        let k = klein_project(&s).unwrap();
        for j in 0..64 {
            assert!((k.r[j] - 0.5).abs() < 1e-15);
            assert!((k.uhat[j] - 0.5).abs() < 1e-15);
            // Euclidean circle of radius r0 has curvature 1/r0.
            assert!((k.khat[j] - 2.0).abs() < 1e-14);
        }
        let direct = KleinState::from_euclidean_radial(&s.grid, &k.r).unwrap();
        assert!((direct.khat[0] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn support_round_trip() {
        let s = RadialState::from_fn(grid(1, 128), 0.0, |t| 0.9 + 0.2 * (2.0 * t).cos()).unwrap();
        let fields = geometry_fields(&s).unwrap();
        let k = klein_project_fields(&s, &fields);
        for (u, g) in k.hyperbolic_support().iter().zip(&fields.nodes) {
            assert!((u - g.u).abs() < 1e-14 * g.u);
        }
        for j in 0..128 {
            assert!(0.0 < k.uhat[j] && k.uhat[j] <= k.r[j] && k.r[j] < 1.0);
        }
    }

    #[test]
    fn empty_integrals_vanish() {
        let g = grid(1, 32);
        let k = KleinState {
            dim: Dim::One,
            r: vec![0.4; 32],
            uhat: vec![0.4; 32],
            khat: vec![2.5; 32],
        };
        let cfg = FunctionalConfig::new(0.4, 0.3, 1e-12).unwrap();
        assert_eq!(q_functional(&k, &vec![1.3; 32], 2.7, &g, &cfg).unwrap(), 0.0);
        assert_eq!(j_functional(&k, &g, &cfg).unwrap(), 0.0);
        let s = RadialState::geodesic_sphere(g, 0.3).unwrap();
        assert_eq!(conserved_integral(&s, &vec![1.0; 32], 2.5, &cfg).unwrap(), 0.0);
    }

    #[test]
    fn nonconvex_gives_nan() {
        let g = grid(1, 32);
        let mut khat = vec![2.0; 32];
        khat[5] = -0.1;
        let k = KleinState { dim: Dim::One, r: vec![0.5; 32], uhat: vec![0.5; 32], khat };
        let cfg = FunctionalConfig::new(0.2, 0.3, 1e-12).unwrap();
        assert!(q_functional(&k, &vec![1.0; 32], 2.0, &g, &cfg).unwrap().is_nan());
        assert!(j_functional(&k, &g, &cfg).unwrap().is_nan());
    }

    #[test]
    fn closed_forms_match_quadrature() {
        for n in [1, 2] {
            let xs = [0.3, 0.55, 0.9];
            let closed = support_potential(n, 0.2, &xs);
            for (x, c) in xs.iter().zip(&closed) {
                let q = adaptive_simpson(&|s| varphi_support(n, s), 0.2, *x, 1e-13).unwrap();
                assert!((q - c).abs() < 1e-11);
            }
        }
        let rs = [0.3, 0.7];
        let closed = radial_potential(1, 2.0, 0.2, &rs, 1e-12).unwrap();
        let quad = cumulative_from(&|s| psi_radial_inverse_weight(1, 2.0, s), 0.2, &rs, 1e-13).unwrap();
        for (c, q) in closed.iter().zip(&quad) {
            assert!((c - q).abs() < 1e-11);
        }
    }

    #[test]
    fn conserved_integral_closed_form() {
        let g = grid(1, 64);
        let (rho0, b) = (0.9_f64, 0.35_f64);
        let s = RadialState::geodesic_sphere(g, rho0).unwrap();
        let cfg = FunctionalConfig::new(0.3, b, 1e-12).unwrap();
        let v = conserved_integral(&s, &vec![1.0; 64], 2.0, &cfg).unwrap();
        let exact = 2.0 * PI * ((rho0 / 2.0).tanh() / (b / 2.0).tanh()).ln();
        assert!((v - exact).abs() < 1e-12);
    }

    #[test]
    fn conserved_change_matches_difference() {
        let g = grid(1, 64);
        let s0 = RadialState::from_fn(g.clone(), 0.0, |t| 0.8 + 0.05 * (2.0 * t).cos()).unwrap();
        let s1 = RadialState::from_fn(g, 1.0, |t| 0.82 + 0.03 * (2.0 * t).cos()).unwrap();
        let ft = vec![1.0; 64];
        let cfg = FunctionalConfig::new(0.3, 0.4, 1e-13).unwrap();
        let d = conserved_integral(&s1, &ft, 2.5, &cfg).unwrap()
            - conserved_integral(&s0, &ft, 2.5, &cfg).unwrap();
        let c = conserved_change(&s0, &s1, &ft, 2.5, 1e-13).unwrap();
        assert!((d - c).abs() < 1e-10, "{d} vs {c}");
    }

    #[test]
    fn residual_of_round_states() {
        let g = grid(1, 64);
        let s = RadialState::geodesic_sphere(g.clone(), 2.0_f64.acosh()).unwrap();
        let f = geometry_fields(&s).unwrap();
        let r = residual(&f, &g, &vec![2.0; 64], 2.0, FlowMode::Unnormalized);
        assert!(r.linf < 1e-14);
        assert_eq!(r.c_star, 1.0);
        let r4 = residual(&f, &g, &vec![4.0; 64], 2.0, FlowMode::Unnormalized);
        assert!((r4.linf - 0.5).abs() < 1e-14);
        let rn = residual(&f, &g, &vec![4.0; 64], 2.0, FlowMode::Normalized);
        assert!((rn.c_star - 0.5).abs() < 1e-14);
        assert!(rn.linf < 1e-14);
    }

    #[test]
    fn manufactured_data_has_zero_residual() {
        let g = grid(1, 128);
        let s = RadialState::from_fn(g.clone(), 0.0, |t| 1.0 + 0.1 * (3.0 * t).cos()).unwrap();
        let f = geometry_fields(&s).unwrap();
        let alpha = 3.5;
        let ft: Vec<f64> = f.nodes.iter().map(|n| n.phi.powf(alpha) * n.gauss / n.u).collect();
        let r = residual(&f, &g, &ft, alpha, FlowMode::Unnormalized);
        assert!(r.linf < 1e-14, "{}", r.linf);
    }

    #[test]
    fn ellipsoid_radius_axes() {
        assert!((ellipsoid_radius(0.9, 0.5, 0.0) - 0.9).abs() < 1e-15);
        assert!((ellipsoid_radius(0.9, 0.5, PI / 2.0) - 0.5).abs() < 1e-15);
    }
}
