//! Riesz potentials `J(z) = sum_i w_i |z - w_i|^{-alpha}` and their `L^p` integrals.
//!
//! `riesz_lp_scan` splits the ball into a Voronoi cap of radius `R` around each
//! atom and a bulk remainder. Bulk points are drawn uniformly from the ball.
//! Cap points are drawn in log-polar coordinates `z = a + e^u theta` with `u`
//! jittered-stratified between `ln delta` and `ln R`; the integrand is
//! evaluated in log form so the innermost radii never under- or overflow.

use std::f64::consts::PI;

use super::ChartMeasure;
use crate::error::{Error, Result};
use crate::geometry::{norm_sq, C64};
use crate::reduce::{par_map, stratified_estimate, MeanEstimate};
use crate::refinement::{default_depth, Refinement, RefinementLevel};
use crate::sampling::{sphere_direction, stream, subseed};
use rand::Rng;

fn check_alpha(n: usize, alpha: f64) -> Result<()> {
    let max = 2.0 * n as f64;
    if !(alpha > 0.0 && alpha < max) {
        return Err(Error::AlphaOutOfRange { alpha, max });
    }
    Ok(())
}

/// `J_{nu, alpha}(z)`; `+inf` exactly at atoms.
pub fn riesz_potential(nu: &ChartMeasure, alpha: f64, z: &[C64]) -> Result<f64> {
    check_alpha(nu.dim(), alpha)?;
    if z.len() != nu.dim() {
        return Err(Error::DimensionMismatch { expected: nu.dim(), found: z.len() });
    }
    let mut acc = 0.0;
    for (w, weight) in nu.atoms() {
        let d2: f64 = z.iter().zip(w).map(|(a, b)| (a - b).norm_sqr()).sum();
        if d2 == 0.0 {
            return Ok(f64::INFINITY);
        }
        acc += weight * d2.powf(-alpha / 2.0);
    }
    Ok(acc)
}

/// Euclidean ball in C^n.
#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    pub center: Vec<C64>,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Vec<C64>, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidArgument(format!("ball radius must be positive, got {radius}")));
        }
        Ok(Ball { center, radius })
    }

    pub fn volume(&self) -> f64 {
        let n = self.center.len() as i32;
        let fact: f64 = (1..=n).map(|i| i as f64).product();
        PI.powi(n) * self.radius.powi(2 * n) / fact
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RieszOptions {
    pub seed: u64,
    pub samples: usize,
    /// Cap radius around each atom; defaults to half the ball radius.
    pub cap_radius: Option<f64>,
    /// `ln(R / delta)`; defaults to a depth where the excised part is negligible.
    pub log_depth: Option<f64>,
}

impl RieszOptions {
    pub fn new(seed: u64, samples: usize) -> Self {
        RieszOptions { seed, samples, cap_radius: None, log_depth: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub near_atom: f64,
    pub near_atom_se: f64,
    pub bulk: f64,
    pub bulk_se: f64,
    pub log_depth: f64,
}

fn unit_sphere_area(n: usize) -> f64 {
    // |S^{2n-1}| = 2 pi^n / (n-1)!
    let fact: f64 = (1..n).map(|i| i as f64).product();
    2.0 * PI.powi(n as i32) / fact
}

struct Setup<'a> {
    nu: &'a ChartMeasure,
    alpha: f64,
    p: f64,
    ball: &'a Ball,
    cap: f64,
}

impl Setup<'_> {
    fn bulk(&self, seed: u64, samples: usize) -> MeanEstimate {
        let n = self.nu.dim();
        let vals = par_map(samples, |i| {
            let mut rng = stream(seed, i as u64);
            let dir = sphere_direction(&mut rng, n);
            let r = self.ball.radius * rng.random::<f64>().powf(1.0 / (2 * n) as f64);
            let z: Vec<C64> = self.ball.center.iter().zip(&dir).map(|(c, d)| c + d * r).collect();
            let mut j = 0.0;
            for (w, weight) in self.nu.atoms() {
                let d2: f64 = z.iter().zip(w).map(|(a, b)| (a - b).norm_sqr()).sum();
                if d2 <= self.cap * self.cap {
                    return 0.0;
                }
                j += weight * d2.powf(-self.alpha / 2.0);
            }
            j.powf(self.p)
        });
        let est = MeanEstimate::from_values(&vals);
        let vol = self.ball.volume();
        MeanEstimate { mean: est.mean * vol, std_error: est.std_error * vol, count: est.count }
    }

    /// Cap integral around atom `a` over `R e^{-depth} < |z - a| < R`.
    fn cap(&self, a: usize, depth: f64, seed: u64, samples: usize) -> MeanEstimate {
        let n = self.nu.dim();
        let (center, wa) = &self.nu.atoms()[a];
        let offset: Vec<C64> = center.iter().zip(&self.ball.center).map(|(x, c)| x - c).collect();
        if norm_sq(&offset).sqrt() >= self.ball.radius + self.cap {
            return MeanEstimate { mean: 0.0, std_error: 0.0, count: samples };
        }
        let u_hi = self.cap.ln();
        let u_lo = u_hi - depth;
        let vals = par_map(samples, |i| {
            let mut rng = stream(seed, i as u64);
            let u = u_lo + (i as f64 + rng.random::<f64>()) / samples as f64 * depth;
            let r = u.exp();
            let dir = sphere_direction(&mut rng, n);
            let rel: Vec<C64> = offset.iter().zip(&dir).map(|(o, d)| o + d * r).collect();
            if norm_sq(&rel) >= self.ball.radius * self.ball.radius {
                return 0.0;
            }
            // contributions of the other atoms, which must be farther than r
            let mut rest = 0.0;
            for (b, (w, weight)) in self.nu.atoms().iter().enumerate() {
                if b == a {
                    continue;
                }
                let d2: f64 = center
                    .iter()
                    .zip(w)
                    .zip(&dir)
                    .map(|((x, y), d)| (x - y + d * r).norm_sqr())
                    .sum();
                if d2 <= r * r {
                    return 0.0;
                }
                rest += weight * d2.powf(-self.alpha / 2.0);
            }
            // ln J = -alpha u + ln(w_a + r^alpha rest)
            let ln_j = -self.alpha * u + (wa + (self.alpha * u).exp() * rest).ln();
            (self.p * ln_j + 2.0 * n as f64 * u).exp()
        });
        let est = stratified_estimate(&vals);
        let scale = unit_sphere_area(n) * depth;
        MeanEstimate { mean: est.mean * scale, std_error: est.std_error * scale, count: est.count }
    }

    fn caps(&self, depth: f64, seed: u64, samples: usize) -> (f64, f64) {
        let mut total = 0.0;
        let mut var = 0.0;
        for a in 0..self.nu.atoms().len() {
            let e = self.cap(a, depth, subseed(seed, 100 + a as u64), samples);
            total += e.mean;
            var += e.std_error * e.std_error;
        }
        (total, var.sqrt())
    }
}

fn setup<'a>(nu: &'a ChartMeasure, alpha: f64, p: f64, ball: &'a Ball, cap: Option<f64>) -> Result<Setup<'a>> {
    check_alpha(nu.dim(), alpha)?;
    if ball.center.len() != nu.dim() {
        return Err(Error::DimensionMismatch { expected: nu.dim(), found: ball.center.len() });
    }
    if !(p > 0.0) {
        return Err(Error::InvalidArgument(format!("exponent p must be positive, got {p}")));
    }
    let cap = cap.unwrap_or(ball.radius / 2.0);
    Ok(Setup { nu, alpha, p, ball, cap })
}

/// Monte Carlo estimate of `int_ball J_{nu,alpha}^p dLeb`.
pub fn riesz_lp_scan(nu: &ChartMeasure, alpha: f64, p: f64, ball: &Ball, opts: RieszOptions) -> Result<LpEstimate> {
    let s = setup(nu, alpha, p, ball, opts.cap_radius)?;
    let excess = 2.0 * nu.dim() as f64 - alpha * p;
    let depth = opts.log_depth.unwrap_or_else(|| default_depth(excess));
    let bulk = s.bulk(subseed(opts.seed, 1), opts.samples);
    let (near, near_se) = s.caps(depth, opts.seed, opts.samples);
    Ok(LpEstimate {
        estimate: bulk.mean + near,
        std_error: (bulk.std_error.powi(2) + near_se.powi(2)).sqrt(),
        near_atom: near,
        near_atom_se: near_se,
        bulk: bulk.mean,
        bulk_se: bulk.std_error,
        log_depth: depth,
    })
}

/// Near-atom contributions for each level of `schedule`.
pub fn riesz_refinement(
    nu: &ChartMeasure,
    alpha: f64,
    p: f64,
    ball: &Ball,
    opts: RieszOptions,
    schedule: &Refinement,
) -> Result<Vec<RefinementLevel>> {
    let s = setup(nu, alpha, p, ball, opts.cap_radius)?;
    let bulk = s.bulk(subseed(opts.seed, 1), opts.samples);
    Ok((0..schedule.levels)
        .map(|k| {
            let depth = schedule.depth(k);
            let (near, se) = s.caps(depth, opts.seed, opts.samples);
            RefinementLevel { level: k, log_depth: depth, near_atom: near, near_atom_se: se, total: near + bulk.mean }
        })
        .collect())
}
