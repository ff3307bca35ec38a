//! Oracles shared by the integration tests. Nothing here calls the library.

#![allow(dead_code)]

use std::f64::consts::PI;

pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, m: usize) -> f64 {
    let h = (b - a) / m as f64;
    let mut s = f(a) + f(b);
    for k in 1..m {
        s += if k % 2 == 1 { 4.0 } else { 2.0 } * f(a + k as f64 * h);
    }
    s * h / 3.0
}

/// 8th-order central first and second derivatives.
pub fn d8(f: &dyn Fn(f64) -> f64, t: f64, h: f64) -> (f64, f64) {
    const C1: [f64; 4] = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];
    const C2: [f64; 4] = [8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0];
    let mut d1 = 0.0;
    let mut d2 = -205.0 / 72.0 * f(t);
    for k in 0..4 {
        let s = (k + 1) as f64 * h;
        d1 += C1[k] * (f(t + s) - f(t - s));
        d2 += C2[k] * (f(t + s) + f(t - s));
    }
    (d1 / h, d2 / (h * h))
}

/// Geodesic curvature of the radial curve `ρ(θ)` in H², computed on the
/// hyperboloid `(cosh ρ, sinh ρ cos θ, sinh ρ sin θ)` with 8th-order
/// differences of step `h`.
pub fn hyperboloid_curvature(profile: &dyn Fn(f64) -> f64, t: f64, h: f64) -> f64 {
    let coord = |k: usize, s: f64| {
        let r = profile(s);
        [r.cosh(), r.sinh() * s.cos(), r.sinh() * s.sin()][k]
    };
    let mut d1 = [0.0; 3];
    let mut d2 = [0.0; 3];
    for k in 0..3 {
        (d1[k], d2[k]) = d8(&|s| coord(k, s), t, h);
    }
    let lor = |a: &[f64; 3], b: &[f64; 3]| -a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let p = [coord(0, t), coord(1, t), coord(2, t)];
    let c = [
        p[1] * d1[2] - p[2] * d1[1],
        p[2] * d1[0] - p[0] * d1[2],
        p[0] * d1[1] - p[1] * d1[0],
    ];
    let mut normal = [-c[0], c[1], c[2]];
    let r = profile(t);
    let radial = [r.sinh(), r.cosh() * t.cos(), r.cosh() * t.sin()];
    if lor(&normal, &radial) < 0.0 {
        normal = normal.map(|v| -v);
    }
    -lor(&d2, &normal) / (lor(&d1, &d1) * lor(&normal, &normal).sqrt())
}

/// J of the Klein rotation ellipsoid (e1, e2) in R³ with lower limit a,
/// integrated over the normal angle v with `û(v) = sqrt(e1² cos² v + e2² sin² v)`.
pub fn ellipsoid_j(e1: f64, e2: f64, a: f64) -> f64 {
    // Antiderivative of 1/(t(1 - t²)^{3/2}).
    let prim = |t: f64| {
        let s = (1.0 - t * t).sqrt();
        1.0 / s - s.atanh()
    };
    let m = 20_000;
    let h = 0.5 * PI / m as f64;
    let uhat = |v: f64| (e1 * e1 * v.cos().powi(2) + e2 * e2 * v.sin().powi(2)).sqrt();
    let mut total = 0.0;
    for k in 1..=m {
        let v = k as f64 * h;
        let w = if k == m { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
        total += w * (prim(uhat(v)) - prim(a)) * v.sin();
    }
    4.0 * PI * total * h / 3.0
}
