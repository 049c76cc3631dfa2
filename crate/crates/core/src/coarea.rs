//! Radial integration on P^n.
//!
//! For a function of the distance `r` to a fixed point,
//! `int_{P^n} f dV = int_0^{pi/sqrt2} f(r) A(r) dr` with the sphere area
//! `A(r) = c_n sin^{2n-2}(r/sqrt2) sin(sqrt2 r)`. Unit total volume forces
//! `c_n = n / sqrt 2`, and then `int log sin(r/sqrt2) A(r) dr = -1/(2n)`.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use crate::error::Result;
use crate::quadrature::{integrate, kronrod_nodes, Integral, Tolerance};

/// Sphere-area constant `c_n` under the unit-volume convention.
pub fn area_constant(n: usize) -> f64 {
    n as f64 / SQRT_2
}

/// Area of the geodesic sphere of radius `r` about any point.
pub fn sphere_area(n: usize, r: f64) -> f64 {
    let t = r / SQRT_2;
    area_constant(n) * t.sin().powi(2 * n as i32 - 2) * (SQRT_2 * r).sin()
}

/// `ln A(r)`, usable for radii far below the floating-point range of `A`.
pub fn ln_sphere_area(n: usize, r: f64) -> f64 {
    let t = r / SQRT_2;
    area_constant(n).ln() + (2 * n - 2) as f64 * t.sin().ln() + (SQRT_2 * r).sin().ln()
}

/// `alpha_n = 1 / (2n)`: minus the FS average of `G(., eta)`.
pub fn alpha(n: usize) -> f64 {
    1.0 / (2.0 * n as f64)
}

/// `int_0^{pi/sqrt2} f(r) A(r) dr`, computed in `u = sin(r/sqrt2)` where
/// `A(r) dr = 2 sqrt2 c_n u^{2n-1} du`.
pub fn radial_quadrature<F: Fn(f64) -> f64>(f: F, n: usize) -> Result<Integral> {
    radial_quadrature_with(f, n, Tolerance::default())
}

pub fn radial_quadrature_with<F: Fn(f64) -> f64>(f: F, n: usize, tol: Tolerance) -> Result<Integral> {
    let scale = 2.0 * SQRT_2 * area_constant(n);
    let k = 2 * n as i32 - 1;
    let r = integrate(|u: f64| f(SQRT_2 * u.asin()) * u.powi(k), 0.0, 1.0, tol)?;
    Ok(Integral { value: scale * r.value, abs_error: scale * r.abs_error, evaluations: r.evaluations })
}

/// `int_{P^n} G(., eta) dV` by radial quadrature.
pub fn mean_log_kernel(n: usize) -> Result<f64> {
    Ok(radial_quadrature(|r| (r / SQRT_2).sin().ln(), n)?.value)
}

/// Closed form `-c_n / (sqrt2 n^2) = -1/(2n)`.
pub fn mean_log_kernel_closed(n: usize) -> f64 {
    -area_constant(n) / (SQRT_2 * (n * n) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SobolevBound {
    Finite(f64),
    /// The endpoint exponent `2n - 1 - p` is `<= -1`.
    Infinite,
}

impl SobolevBound {
    pub fn value(self) -> f64 {
        match self {
            SobolevBound::Finite(v) => v,
            SobolevBound::Infinite => f64::INFINITY,
        }
    }
}

/// `int_0^{pi/2} sin^q t dt` for `q > -1`.
///
/// For `q < 0` the substitution `t = (pi/2) v^{1/(q+1)}` removes the endpoint
/// singularity: the integrand becomes `(pi/2)^{q+1}/(q+1) * sinc(t)^q`.
pub fn sine_power_integral(q: f64, tol: Tolerance) -> Result<f64> {
    assert!(q > -1.0);
    if q >= 0.0 {
        return Ok(integrate(|t: f64| t.sin().powf(q), 0.0, FRAC_PI_2, tol)?.value);
    }
    let beta = 1.0 / (q + 1.0);
    let pref = FRAC_PI_2.powf(q + 1.0) * beta;
    let r = integrate(
        |v: f64| {
            let t = FRAC_PI_2 * v.powf(beta);
            let sinc = if t == 0.0 { 1.0 } else { t.sin() / t };
            pref * sinc.powf(q)
        },
        0.0,
        1.0,
        tol,
    )?;
    Ok(r.value)
}

/// Gradient-integral bound `2 sqrt2 c_n int_0^{pi/2} sin^{2n-1-p} t dt`.
pub fn sobolev_bound(n: usize, p: f64) -> Result<SobolevBound> {
    let q = 2.0 * n as f64 - 1.0 - p;
    if q <= -1.0 {
        return Ok(SobolevBound::Infinite);
    }
    let i = sine_power_integral(q, Tolerance::default())?;
    Ok(SobolevBound::Finite(2.0 * SQRT_2 * area_constant(n) * i))
}

/// A fixed composite rule for the radial measure `A(r) dr`.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    pub n: usize,
    pub c_n: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl RadialProfile {
    /// Composite 15-point Kronrod rule on `panels` equal pieces of `u in [0, 1]`.
    pub fn new(n: usize, panels: usize) -> Self {
        let scale = 2.0 * SQRT_2 * area_constant(n);
        let mut nodes = Vec::with_capacity(15 * panels);
        let mut weights = Vec::with_capacity(15 * panels);
        for p in 0..panels {
            let a = p as f64 / panels as f64;
            let b = (p + 1) as f64 / panels as f64;
            for (u, w) in kronrod_nodes(a, b) {
                nodes.push(SQRT_2 * u.asin());
                weights.push(scale * u.powi(2 * n as i32 - 1) * w);
            }
        }
        RadialProfile { n, c_n: area_constant(n), nodes, weights }
    }

    pub fn area(&self, r: f64) -> f64 {
        sphere_area(self.n, r)
    }

    pub fn max_radius(&self) -> f64 {
        PI / SQRT_2
    }

    pub fn apply<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&r, &w)| w * f(r)).sum()
    }
}
