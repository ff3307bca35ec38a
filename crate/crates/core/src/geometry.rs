//! Geometry of a radial graph `ρ(θ)` over Sⁿ in hyperbolic space.
//!
//! All tensors are expressed in an orthonormal frame of the round sphere:
//! on S¹ the single direction ∂θ, on axisymmetric S² the meridian direction
//! ∂θ₁ and the unit azimuthal direction `∂ϕ / sin θ₁`. With `p = ∇̄ρ` and
//! `S = ∇̄²ρ` in that frame,
//!
//! ```text
//! w    = sqrt(1 + |p|²/φ²)
//! u    = φ² / sqrt(φ² + |p|²)
//! g    = φ² I + p pᵀ
//! h    = (−φ S + 2φ' p pᵀ + φ²φ' I) / sqrt(φ² + |p|²)
//! W    = h g⁻¹,   K = det W,   H = tr W
//! ```
//!
//! with `φ = sinh ρ` and `φ' = cosh ρ`.

use std::sync::Arc;

use crate::error::GeometryError;
use crate::grid::{Dim, SphereGrid};

/// Small dense matrix; only the leading `n × n` block is meaningful.
pub type Mat2 = [[f64; 2]; 2];

/// Radial function sampled on a grid at flow time `t`.
#[derive(Debug, Clone)]
pub struct RadialState {
    pub grid: Arc<SphereGrid>,
    pub rho: Vec<f64>,
    pub t: f64,
}

impl RadialState {
    pub fn new(grid: Arc<SphereGrid>, rho: Vec<f64>, t: f64) -> Result<Self, GeometryError> {
        if rho.len() != grid.len() {
            return Err(GeometryError::LengthMismatch { expected: grid.len(), got: rho.len() });
        }
        if let Some((node, &value)) =
            rho.iter().enumerate().find(|(_, r)| !(r.is_finite() && **r > 0.0))
        {
            return Err(GeometryError::InvalidRadius { node, value });
        }
        Ok(RadialState { grid, rho, t })
    }

    /// State whose radial function is `profile(θ)` at every node.
    pub fn from_fn(
        grid: Arc<SphereGrid>,
        t: f64,
        profile: impl Fn(f64) -> f64,
    ) -> Result<Self, GeometryError> {
        let rho = grid.theta().iter().map(|&th| profile(th)).collect();
        Self::new(grid, rho, t)
    }

    /// Geodesic sphere of radius `rho0`.
    pub fn geodesic_sphere(grid: Arc<SphereGrid>, rho0: f64) -> Result<Self, GeometryError> {
        let len = grid.len();
        Self::new(grid, vec![rho0; len], 0.0)
    }

    pub fn rho_max(&self) -> f64 {
        self.rho.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn rho_min(&self) -> f64 {
        self.rho.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Node of the maximum; ties go to the lowest index.
    pub fn argmax(&self) -> usize {
        argmax(&self.rho)
    }

    /// Node of the minimum; ties go to the lowest index.
    pub fn argmin(&self) -> usize {
        argmin(&self.rho)
    }

    /// `max_j |ρ(θ_j) − ρ(−θ_j)|` over antipodal node pairs; `None` when the
    /// grid has no antipodal pairing.
    pub fn evenness_defect(&self) -> Option<f64> {
        let g = &self.grid;
        let mut worst = 0.0_f64;
        for j in 0..g.len() {
            let k = g.antipode(j)?;
            worst = worst.max((self.rho[j] - self.rho[k]).abs());
        }
        Some(worst)
    }
}

pub(crate) fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (j, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = j;
        }
    }
    best
}

pub(crate) fn argmin(v: &[f64]) -> usize {
    let mut best = 0;
    for (j, &x) in v.iter().enumerate() {
        if x < v[best] {
            best = j;
        }
    }
    best
}

/// Geometric quantities at one node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeGeometry {
    pub phi: f64,
    pub dphi: f64,
    /// Frame components of ∇̄ρ.
    pub grad: [f64; 2],
    pub w: f64,
    pub u: f64,
    pub g: Mat2,
    pub h: Mat2,
    pub weingarten: Mat2,
    /// Principal curvatures, ascending; only the first `n` are meaningful.
    pub kappa: [f64; 2],
    pub gauss: f64,
    pub mean: f64,
}

impl NodeGeometry {
    pub fn grad_norm(&self) -> f64 {
        self.grad[0].hypot(self.grad[1])
    }
}

/// Per-node geometry of a radial state.
#[derive(Debug, Clone)]
pub struct GeometryFields {
    pub dim: Dim,
    pub nodes: Vec<NodeGeometry>,
}

impl GeometryFields {
    pub fn n(&self) -> usize {
        self.dim.n()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn gauss(&self) -> Vec<f64> {
        self.nodes.iter().map(|g| g.gauss).collect()
    }

    pub fn support(&self) -> Vec<f64> {
        self.nodes.iter().map(|g| g.u).collect()
    }

    pub fn kappa_min(&self) -> f64 {
        let n = self.n();
        self.nodes
            .iter()
            .flat_map(|g| g.kappa[..n].iter().copied())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn kappa_max(&self) -> f64 {
        let n = self.n();
        self.nodes
            .iter()
            .flat_map(|g| g.kappa[..n].iter().copied())
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn u_min(&self) -> f64 {
        self.nodes.iter().map(|g| g.u).fold(f64::INFINITY, f64::min)
    }

    pub fn grad_max(&self) -> f64 {
        self.nodes.iter().map(|g| g.grad_norm()).fold(0.0, f64::max)
    }

    /// `Θ = φ^α f K` per node, with `f = 1/f̃`.
    pub fn theta_quantity(&self, alpha: f64, f: &[f64]) -> Vec<f64> {
        self.nodes
            .iter()
            .zip(f)
            .map(|(g, fj)| g.phi.powf(alpha) * fj * g.gauss)
            .collect()
    }
}

/// Computes every radial-graph quantity of `state`.
pub fn geometry_fields(state: &RadialState) -> Result<GeometryFields, GeometryError> {
    let grid = &state.grid;
    let rho = &state.rho;
    if rho.len() != grid.len() {
        return Err(GeometryError::LengthMismatch { expected: grid.len(), got: rho.len() });
    }
    let d1 = grid.d1(rho);
    let d2 = grid.d2(rho);
    let dim = grid.dim();
    let n = dim.n();
    let mut nodes = Vec::with_capacity(rho.len());
    for j in 0..rho.len() {
        let r = rho[j];
        if !(r.is_finite() && r > 0.0) {
            return Err(GeometryError::InvalidRadius { node: j, value: r });
        }
        let (grad, hess) = match dim {
            Dim::One => ([d1[j], 0.0], [[d2[j], 0.0], [0.0, 0.0]]),
            Dim::Two => (
                [d1[j], 0.0],
                [[d2[j], 0.0], [0.0, grid.azimuthal_hessian(j, &d1, &d2)]],
            ),
        };
        let node = node_geometry(n, r, grad, hess);
        if !(node.u > 0.0) {
            return Err(GeometryError::NotStarShaped { node: j, value: node.u });
        }
        nodes.push(node);
    }
    Ok(GeometryFields { dim, nodes })
}

/// Radial-graph geometry at a single point from `ρ`, `∇̄ρ` and `∇̄²ρ`.
pub fn node_geometry(n: usize, rho: f64, grad: [f64; 2], hess: Mat2) -> NodeGeometry {
    let phi = rho.sinh();
    let dphi = rho.cosh();
    let grad2: f64 = grad[..n].iter().map(|p| p * p).sum();
    let root = (phi * phi + grad2).sqrt();
    let w = root / phi;
    let u = phi * phi / root;

    let mut g = [[0.0; 2]; 2];
    let mut h = [[0.0; 2]; 2];
    let mut g_inv = [[0.0; 2]; 2];
    for i in 0..n {
        for k in 0..n {
            let delta = if i == k { 1.0 } else { 0.0 };
            let pp = grad[i] * grad[k];
            g[i][k] = phi * phi * delta + pp;
            h[i][k] = (-phi * hess[i][k] + 2.0 * dphi * pp + phi * phi * dphi * delta) / root;
            g_inv[i][k] = (delta - pp / (root * root)) / (phi * phi);
        }
    }
    let mut wm = [[0.0; 2]; 2];
    for i in 0..n {
        for jj in 0..n {
            wm[i][jj] = (0..n).map(|k| h[i][k] * g_inv[k][jj]).sum();
        }
    }
    let (kappa, gauss, mean) = match n {
        1 => ([wm[0][0], wm[0][0]], wm[0][0], wm[0][0]),
        _ => {
            let tr = wm[0][0] + wm[1][1];
            let det = wm[0][0] * wm[1][1] - wm[0][1] * wm[1][0];
            let half = 0.5 * tr;
            let disc = (half * half - det).max(0.0).sqrt();
            ([half - disc, half + disc], det, tr)
        }
    };
    NodeGeometry { phi, dphi, grad, w, u, g, h, weingarten: wm, kappa, gauss, mean }
}

/// Convexity verdict with its margin `min_j min_i κ_i(j)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Convexity {
    pub convex: bool,
    pub margin: f64,
}

pub fn check_convex(fields: &GeometryFields) -> Convexity {
    let margin = fields.kappa_min();
    Convexity { convex: margin > 0.0, margin }
}

/// Largest eigenvalue of `h⁻¹` (h symmetric positive definite in the frame).
pub(crate) fn inverse_h_max_eigen(n: usize, h: &Mat2) -> f64 {
    match n {
        1 => 1.0 / h[0][0],
        _ => {
            let tr = h[0][0] + h[1][1];
            let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
            let half = 0.5 * tr;
            let disc = (half * half - det).max(0.0).sqrt();
            1.0 / (half - disc)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize, nodes: usize) -> Arc<SphereGrid> {
        Arc::new(SphereGrid::new(n, nodes).unwrap())
    }

    #[test]
    fn geodesic_circle() {
        let rho0 = 1.0_f64.asinh();
        let s = RadialState::geodesic_sphere(grid(1, 64), rho0).unwrap();
        let f = geometry_fields(&s).unwrap();
        for g in &f.nodes {
            assert!((g.phi - 1.0).abs() < 1e-15);
            assert!((g.dphi - 2.0_f64.sqrt()).abs() < 1e-15);
            assert_eq!(g.w, 1.0);
            assert!((g.u - 1.0).abs() < 1e-15);
            assert!((g.gauss - 2.0_f64.sqrt()).abs() < 1e-14);
        }
        let c = check_convex(&f);
        assert!(c.convex);
        assert!((c.margin - 2.0_f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn geodesic_sphere_in_h3() {
        let rho0 = 0.7_f64;
        let s = RadialState::geodesic_sphere(grid(2, 33), rho0).unwrap();
        let f = geometry_fields(&s).unwrap();
        let coth = 1.0 / rho0.tanh();
        for g in &f.nodes {
            assert!((g.kappa[0] - coth).abs() < 1e-14);
            assert!((g.kappa[1] - coth).abs() < 1e-14);
            assert!((g.gauss - coth * coth).abs() < 1e-13);
            assert!((g.u - rho0.sinh()).abs() < 1e-15);
        }
        assert!((check_convex(&f).margin - coth).abs() < 1e-14);
    }

    #[test]
    fn support_times_w_is_phi() {
        let s = RadialState::from_fn(grid(1, 128), 0.0, |t| 1.0 + 0.3 * (2.0 * t).cos()).unwrap();
        let f = geometry_fields(&s).unwrap();
        for g in &f.nodes {
            assert!((g.u * g.w - g.phi).abs() <= 1e-14 * g.phi);
            assert!(g.w >= 1.0);
        }
        assert_eq!(f.gauss().len(), 128);
        assert_eq!(f.support().len(), 128);
    }

    #[test]
    fn gauss_and_mean_match_weingarten() {
        let s = RadialState::from_fn(grid(2, 65), 0.0, |t| 0.8 + 0.1 * (2.0 * t).cos()).unwrap();
        let f = geometry_fields(&s).unwrap();
        for g in &f.nodes {
            let w = g.weingarten;
            let det = w[0][0] * w[1][1] - w[0][1] * w[1][0];
            assert!((g.gauss - det).abs() < 1e-14 * det.abs().max(1.0));
            assert!((g.mean - (w[0][0] + w[1][1])).abs() < 1e-14 * g.mean.abs());
            assert!((g.kappa[0] * g.kappa[1] - g.gauss).abs() < 1e-12 * g.gauss);
            assert!(g.kappa[0] <= g.kappa[1]);
        }
    }

    #[test]
    fn strongly_perturbed_curve_is_not_convex() {
        let s = RadialState::from_fn(grid(1, 512), 0.0, |t| 1.0 + 0.9 * (2.0 * t).cos()).unwrap();
        let f = geometry_fields(&s).unwrap();
        let c = check_convex(&f);
        assert!(!c.convex);
        assert!(c.margin < 0.0);
    }

    #[test]
    fn rejects_nonpositive_radius() {
        let g = grid(1, 16);
        let mut rho = vec![1.0; 16];
        rho[3] = -0.1;
        assert!(matches!(
            RadialState::new(g, rho, 0.0),
            Err(GeometryError::InvalidRadius { node: 3, .. })
        ));
    }

    #[test]
    fn ties_break_to_lowest_index() {
        assert_eq!(argmax(&[1.0, 3.0, 3.0, 2.0]), 1);
        assert_eq!(argmin(&[2.0, 1.0, 3.0, 1.0]), 1);
    }
}
