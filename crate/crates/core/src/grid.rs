//! Discretization of S¹ and of axisymmetric S².
//!
//! On S¹ the nodes are periodic, `θ_j = 2πj/N`, with 4th-order central
//! differences and uniform trapezoid weights. On S² only axisymmetric fields
//! are represented: nodes sit at colatitudes `θ_j = πj/(N-1)` (both poles
//! included), derivatives use 4th-order central stencils with even reflection
//! across the poles, and quadrature uses Clenshaw–Curtis weights in `cos θ`
//! multiplied by the azimuthal factor 2π.

use std::f64::consts::PI;

use crate::error::GridError;

/// Smallest admissible node count.
pub const MIN_NODES: usize = 16;

/// Dimension of the base sphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Dim {
    /// The circle S¹ (curves in H²).
    One,
    /// Axisymmetric S² (rotation surfaces in H³).
    Two,
}

impl Dim {
    pub fn from_n(n: usize) -> Result<Self, GridError> {
        match n {
            1 => Ok(Dim::One),
            2 => Ok(Dim::Two),
            other => Err(GridError::UnsupportedDimension(other)),
        }
    }

    pub fn n(self) -> usize {
        match self {
            Dim::One => 1,
            Dim::Two => 2,
        }
    }

    /// Area of the unit sphere `|Sⁿ|`.
    pub fn sphere_area(self) -> f64 {
        match self {
            Dim::One => 2.0 * PI,
            Dim::Two => 4.0 * PI,
        }
    }
}

/// Nodes, spacing and quadrature for one of the supported spheres.
///
/// Immutable once built; share it behind an `Arc` across concurrent runs.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereGrid {
    dim: Dim,
    theta: Vec<f64>,
    weights: Vec<f64>,
    spacing: f64,
}

impl SphereGrid {
    /// Builds a grid. `n = 2` requires an odd node count so that the equator
    /// is a node.
    pub fn new(n: usize, nodes: usize) -> Result<Self, GridError> {
        let dim = Dim::from_n(n)?;
        if nodes < MIN_NODES {
            return Err(GridError::TooFewNodes { nodes, min: MIN_NODES });
        }
        match dim {
            Dim::One => {
                let spacing = 2.0 * PI / nodes as f64;
                let theta = (0..nodes).map(|j| j as f64 * spacing).collect();
                let weights = vec![spacing; nodes];
                Ok(SphereGrid { dim, theta, weights, spacing })
            }
            Dim::Two => {
                if nodes.is_multiple_of(2) {
                    return Err(GridError::EvenPolarNodes(nodes));
                }
                let m = nodes - 1;
                let spacing = PI / m as f64;
                let theta = (0..nodes).map(|j| j as f64 * spacing).collect();
                let weights = clenshaw_curtis(m)
                    .into_iter()
                    .map(|w| 2.0 * PI * w)
                    .collect();
                Ok(SphereGrid { dim, theta, weights, spacing })
            }
        }
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.dim.n()
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    /// Node angles: θ on S¹, colatitude θ₁ on S².
    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    /// Quadrature weights for the round measure; they sum to `|Sⁿ|`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Angular node spacing Δθ.
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Index of the antipodal node, when the grid contains it.
    ///
    /// On S¹ this needs an even node count; on S² every node has one
    /// (`θ₁ ↦ π − θ₁`).
    pub fn antipode(&self, j: usize) -> Option<usize> {
        let len = self.len();
        match self.dim {
            Dim::One if len.is_multiple_of(2) => Some((j + len / 2) % len),
            Dim::One => None,
            Dim::Two => Some(len - 1 - j),
        }
    }

    /// First angular derivative.
    pub fn d1(&self, field: &[f64]) -> Vec<f64> {
        assert_eq!(field.len(), self.len(), "field length must match grid");
        let h = self.spacing;
        let mut out: Vec<f64> = (0..self.len())
            .map(|j| {
                let at = |k: isize| self.sample(field, j, k);
                ((at(-2) - at(2)) + 8.0 * (at(1) - at(-1))) / (12.0 * h)
            })
            .collect();
        if self.dim == Dim::Two {
            let last = out.len() - 1;
            out[0] = 0.0;
            out[last] = 0.0;
        }
        out
    }

    /// Second angular derivative.
    pub fn d2(&self, field: &[f64]) -> Vec<f64> {
        assert_eq!(field.len(), self.len(), "field length must match grid");
        let h2 = self.spacing * self.spacing;
        (0..self.len())
            .map(|j| {
                let at = |k: isize| self.sample(field, j, k);
                let c = at(0);
                (16.0 * ((at(1) - c) + (at(-1) - c)) - ((at(2) - c) + (at(-2) - c))) / (12.0 * h2)
            })
            .collect()
    }

    /// Value at node `j + k`, wrapping periodically on S¹ and reflecting
    /// evenly across the poles on S².
    fn sample(&self, field: &[f64], j: usize, k: isize) -> f64 {
        let len = self.len() as isize;
        let idx = j as isize + k;
        let idx = match self.dim {
            Dim::One => idx.rem_euclid(len),
            Dim::Two => {
                let last = len - 1;
                if idx < 0 {
                    -idx
                } else if idx > last {
                    2 * last - idx
                } else {
                    idx
                }
            }
        };
        field[idx as usize]
    }

    /// Quadrature of a node field against the round measure of Sⁿ.
    pub fn integrate(&self, field: &[f64]) -> f64 {
        assert_eq!(field.len(), self.len(), "field length must match grid");
        self.weights.iter().zip(field).map(|(w, f)| w * f).sum()
    }

    /// Azimuthal Hessian component `cot θ₁ · f'` of an axisymmetric field on
    /// S², in the orthonormal frame. At both poles it equals the limit `f''`.
    pub(crate) fn azimuthal_hessian(&self, j: usize, d1: &[f64], d2: &[f64]) -> f64 {
        let last = self.len() - 1;
        if j == 0 || j == last {
            d2[j]
        } else {
            let t = self.theta[j];
            t.cos() * d1[j] / t.sin()
        }
    }
}

/// Clenshaw–Curtis weights on `x_j = cos(πj/m)`, `j = 0..=m`, for `∫_{-1}^{1}`.
fn clenshaw_curtis(m: usize) -> Vec<f64> {
    let mf = m as f64;
    (0..=m)
        .map(|j| {
            let c = if j == 0 || j == m { 1.0 } else { 2.0 };
            let mut s = 0.0;
            for k in 0..=m / 2 {
                let b = if k == 0 || (m.is_multiple_of(2) && 2 * k == m) { 1.0 } else { 2.0 };
                let term = b / (1.0 - 4.0 * (k * k) as f64)
                    * (2.0 * PI * (j * k) as f64 / mf).cos();
                s += term;
            }
            c / mf * s
        })
        .collect()
}
