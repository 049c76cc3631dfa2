//! Quick identity and property checks, runnable from the command line.

use std::f64::consts::{PI, SQRT_2};

use projlog::coarea::{mean_log_kernel, sobolev_bound, SobolevBound};
use projlog::geometry::wedge_sq;
use projlog::kernels::{chart_identity_residual, kernel_g, lemma_bounds_check};
use projlog::measures::{decompose, riesz_lp_scan, Ball, RieszOptions};
use projlog::monge_ampere::{
    ball_mass_profile, fs_hessian_det, ma_total_mass, prop25_expansion_check, smooth_wedge_density, BallOptions,
};
use projlog::potentials::{eval_G, FsPotential};
use projlog::sampling::{complex_gaussian, fs_uniform_point, stream, subseed};
use projlog::{AtomicMeasure, ChartMeasure, HomogeneousPoint, C64};
use rand::Rng;

use crate::report::{num, Table};
use crate::CliError;

pub struct Check {
    pub name: &'static str,
    pub about: &'static str,
    run: fn(u64, usize) -> projlog::Result<(f64, f64, bool)>,
}

pub const CHECKS: &[Check] = &[
    Check { name: "sin-distance", about: "G = log sin(d/sqrt2), n = 1..4", run: sin_distance },
    Check { name: "chart-identity", about: "G = N - rho in U_0, n = 1..3", run: chart_identity },
    Check { name: "kernel-bounds", about: "affine envelope bounds on N, n = 2", run: kernel_bounds },
    Check { name: "normalization", about: "mean of G(., eta) = -1/(2n) by quadrature, n = 1..6", run: normalization },
    Check { name: "normalization-mc", about: "Monte Carlo mean of G(., eta) within 3 SE, n = 1, 2", run: normalization_mc },
    Check { name: "sobolev-bound", about: "analytic bound finite iff p < 2n, n = 1..4", run: sobolev_threshold },
    Check { name: "polarization", about: "det(sum w_i H_i) expansion, n = 2, 3", run: polarization },
    Check { name: "wedge", about: "(dd^c rho)^n density against the closed form, n = 1..3", run: wedge },
    Check { name: "decomposition", about: "chart decomposition reassembles mu and G_mu", run: decomposition },
    Check { name: "mass", about: "total Monge-Ampere mass of a Dirac mass on P^1", run: mass },
    Check { name: "dirac-ball", about: "ball mass of a Dirac mass on P^1 against the closed form", run: dirac_ball },
    Check { name: "riesz-disc", about: "int_{|z|<1} |z|^{-1} = 2 pi", run: riesz_disc },
];

fn rng(seed: u64, tag: u64) -> impl Rng {
    stream(subseed(seed, 1000 + tag), 0)
}

fn point<R: Rng>(r: &mut R, n: usize) -> HomogeneousPoint {
    fs_uniform_point(r, n)
}

fn gaussian<R: Rng>(r: &mut R, n: usize, scale: f64) -> Vec<C64> {
    (0..n).map(|_| complex_gaussian(r) * scale).collect()
}

fn sin_distance(seed: u64, count: usize) -> projlog::Result<(f64, f64, bool)> {
    let mut r = rng(seed, 1);
    let mut worst = 0.0f64;
    for n in 1..=4 {
        for _ in 0..count {
            let (a, b) = (point(&mut r, n), point(&mut r, n));
            let inner: C64 = a.coords().iter().zip(b.coords()).map(|(x, y)| x * y.conj()).sum();
            let d = SQRT_2 * wedge_sq(a.coords(), b.coords()).sqrt().atan2(inner.norm());
            worst = worst.max((kernel_g(&a, &b)?.value() - (d / SQRT_2).sin().ln()).abs());
        }
    }
    Ok((worst, 1e-12, worst < 1e-12))
}

fn chart_identity(seed: u64, count: usize) -> projlog::Result<(f64, f64, bool)> {
    let mut r = rng(seed, 2);
    let mut worst = 0.0f64;
    for n in 1..=3 {
        for _ in 0..count {
            worst = worst.max(chart_identity_residual(&point(&mut r, n), &point(&mut r, n), 0)?);
        }
    }
    Ok((worst, 1e-12, worst < 1e-12))
}

fn kernel_bounds(seed: u64, count: usize) -> projlog::Result<(f64, f64, bool)> {
    let mut r = rng(seed, 3);
    let mut violations = 0usize;
    for _ in 0..count {
        let scale = r.random_range(0.01..10.0);
        let z = gaussian(&mut r, 2, scale);
        let w = gaussian(&mut r, 2, 1.0);
        let (lo, hi) = lemma_bounds_check(&z, &w)?;
        violations += (!lo) as usize + (!hi) as usize;
    }
    Ok((violations as f64, 0.0, violations == 0))
}

fn normalization(_: u64, _: usize) -> projlog::Result<(f64, f64, bool)> {
    let mut worst = 0.0f64;
    for n in 1..=6 {
        worst = worst.max((mean_log_kernel(n)? + 1.0 / (2.0 * n as f64)).abs());
    }
    Ok((worst, 1e-10, worst < 1e-10))
}

fn normalization_mc(seed: u64, count: usize) -> projlog::Result<(f64, f64, bool)> {
    let mut r = rng(seed, 4);
    let mut worst = 0.0f64;
    for n in 1..=2 {
        let eta = point(&mut r, n);
        let m = 50 * count;
        let vals: Vec<f64> =
            (0..m).map(|_| kernel_g(&point(&mut r, n), &eta).map(|g| g.value())).collect::<projlog::Result<_>>()?;
        let mean = vals.iter().sum::<f64>() / m as f64;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1) as f64;
        let z = (mean + 1.0 / (2.0 * n as f64)) / (var / m as f64).sqrt();
        worst = worst.max(z.abs());
    }
    Ok((worst, 3.0, worst < 3.0))
}

fn sobolev_threshold(_: u64, _: usize) -> projlog::Result<(f64, f64, bool)> {
    let mut mismatches = 0usize;
    for n in 1..=4usize {
        let c = 2.0 * n as f64;
        for p in [1.0, c - 1.0, c - 1e-3, c, c + 0.5] {
            let finite = matches!(sobolev_bound(n, p)?, SobolevBound::Finite(_));
            mismatches += (finite != (p < c)) as usize;
        }
    }
    Ok((mismatches as f64, 0.0, mismatches == 0))
}

fn polarization(seed: u64, _: usize) -> projlog::Result<(f64, f64, bool)> {
    let mut r = rng(seed, 5);
    let mut worst = 0.0f64;
    for trial in 0..20 {
        let n = 2 + trial % 2;
        let atoms = 1 + trial % 4;
        let raw: Vec<(Vec<C64>, f64)> =
            (0..atoms).map(|_| (gaussian(&mut r, n, 0.5), r.random_range(0.2..1.0))).collect();
        let total: f64 = raw.iter().map(|a| a.1).sum();
        let nu = ChartMeasure::new(0, raw.into_iter().map(|(w, x)| (w, x / total)).collect())?;
        let z = gaussian(&mut r, n, 1.5);
        worst = worst.max(prop25_expansion_check(&nu, &z, 1e-4, None)?.relative_residual());
    }
    Ok((worst, 1e-9, worst < 1e-9))
}

fn wedge(seed: u64, _: usize) -> projlog::Result<(f64, f64, bool)> {
    let mut r = rng(seed, 6);
    let mut worst = 0.0f64;
    for n in 1..=3 {
        let nu = ChartMeasure::dirac(0, gaussian(&mut r, n, 1.0));
        for _ in 0..10 {
            let z = gaussian(&mut r, n, 0.7);
            let d = smooth_wedge_density(&nu, &FsPotential(n), 0, &z, 1e-4)?;
            let exact = fs_hessian_det(&z);
            worst = worst.max((d - exact).abs() / exact.abs().max(1.0));
        }
    }
    Ok((worst, 1e-5, worst < 1e-5))
}

fn decomposition(seed: u64, _: usize) -> projlog::Result<(f64, f64, bool)> {
    let mut r = rng(seed, 7);
    let raw: Vec<(HomogeneousPoint, f64)> = (0..100).map(|_| (point(&mut r, 2), r.random_range(0.2..1.0))).collect();
    let mu = AtomicMeasure::normalized(raw)?;
    let dec = decompose(&mu);
    let mut worst = (dec.masses.iter().sum::<f64>() - 1.0).abs();
    for a in mu.atoms() {
        worst = worst.max((dec.reassembled_mass(&a.point) - a.weight).abs());
    }
    for _ in 0..20 {
        let zeta = point(&mut r, 2);
        let g = eval_G(&mu, &zeta)?;
        let mut split = 0.0;
        for (j, m) in &dec.components {
            split += dec.masses[*j] * eval_G(m, &zeta)?;
        }
        worst = worst.max((g - split).abs());
    }
    Ok((worst, 1e-12, worst < 1e-12))
}

fn mass(seed: u64, _: usize) -> projlog::Result<(f64, f64, bool)> {
    let mut r = rng(seed, 8);
    let mu = AtomicMeasure::dirac(point(&mut r, 1));
    let dev = (ma_total_mass(&mu, 128, 1e-3, 0.3)?.total_mass - 1.0).abs();
    Ok((dev, 0.01, dev < 0.01))
}

fn dirac_ball(seed: u64, _: usize) -> projlog::Result<(f64, f64, bool)> {
    let mut r = rng(seed, 9);
    let eta = point(&mut r, 1);
    let mu = AtomicMeasure::dirac(eta.clone());
    let (radius, eps) = (1.0, 0.1);
    let m = ball_mass_profile(&mu, &eta, &[radius], 1e-3, &[eps], BallOptions::default())?[0].total_mass;
    let t = radius / SQRT_2;
    let (s, c) = (t.sin().powi(2), t.cos().powi(2));
    let dev = (m - (s + s * c / (s + eps * eps))).abs();
    Ok((dev, 1e-4, dev < 1e-4))
}

fn riesz_disc(seed: u64, _: usize) -> projlog::Result<(f64, f64, bool)> {
    let c0 = C64::new(0.0, 0.0);
    let nu = ChartMeasure::dirac(0, vec![c0]);
    let ball = Ball::new(vec![c0], 1.0)?;
    let est = riesz_lp_scan(&nu, 1.0, 1.0, &ball, RieszOptions::new(subseed(seed, 10), 20_000))?.estimate;
    let rel = (est - 2.0 * PI).abs() / (2.0 * PI);
    Ok((rel, 0.01, rel < 0.01))
}

/// Run the named checks (all when `names` is empty); returns the table and the
/// number of failures.
pub fn run(names: &[String], seed: u64, count: usize) -> Result<(Table, usize), CliError> {
    let selected: Vec<&Check> = if names.is_empty() {
        CHECKS.iter().collect()
    } else {
        names
            .iter()
            .map(|n| {
                CHECKS.iter().find(|c| c.name == n).ok_or_else(|| {
                    let known: Vec<&str> = CHECKS.iter().map(|c| c.name).collect();
                    CliError::Input(format!("unknown check {n:?}; known: {}", known.join(", ")))
                })
            })
            .collect::<Result<_, _>>()?
    };
    let mut t = Table::new(["check", "value", "tolerance", "status", "description"]);
    let mut failures = 0;
    for c in selected {
        let (value, tol, pass) = (c.run)(seed, count)?;
        failures += (!pass) as usize;
        t.push(vec![
            c.name.to_string(),
            num(value),
            num(tol),
            if pass { "PASS" } else { "FAIL" }.to_string(),
            c.about.to_string(),
        ]);
    }
    Ok((t, failures))
}
