//! Library results against independent closed forms and Monte Carlo.

mod common;

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use common::*;
use nalgebra::DMatrix;
use projlog::coarea::{area_constant, radial_quadrature, sine_power_integral, sobolev_bound, RadialProfile};
use projlog::geometry::{
    chart_lift, fs_gradient_norm, fs_speed, geodesic_distance, to_chart, wedge_norm_sq, HomogeneousPoint, C64,
};
use projlog::kernels::{chart_identity_residual, kernel_g, kernel_n, kernel_n_eps};
use projlog::measures::{riesz_refinement, Ball, RieszOptions};
use projlog::monge_ampere::{
    ball_mass_profile, complex_hessian_fd, ma_density, ma_density_of, mixed_discriminant, prop25_expansion_check,
    BallOptions, HermitianMatrix,
};
use projlog::potentials::{fd_gradient, psh_lift_eps, FnField, FsPotential};
use projlog::quadrature::Tolerance;
use projlog::refinement::Refinement;
use projlog::sampling::sample_fs_uniform;
use projlog::{AtomicMeasure, ChartMeasure};
use rand::Rng;
use statrs::function::beta::beta;

fn point<R: Rng>(rng: &mut R, n: usize) -> HomogeneousPoint {
    HomogeneousPoint::new(&gaussian_vec(rng, n + 1)).unwrap()
}

#[test]
fn area_constant_from_quadrature() {
    for n in 1..=5 {
        // int_0^{pi/sqrt2} sin^{2n-2}(r/sqrt2) sin(sqrt2 r) dr, by composite Simpson
        let m = 20_000;
        let b = PI / SQRT_2;
        let f = |r: f64| (r / SQRT_2).sin().powi(2 * n as i32 - 2) * (SQRT_2 * r).sin();
        let hstep = b / m as f64;
        let mut s = f(0.0) + f(b);
        for i in 1..m {
            s += f(i as f64 * hstep) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        let integral = s * hstep / 3.0;
        assert!((area_constant(n) - 1.0 / integral).abs() < 1e-10);
    }
    assert!((area_constant(1) - 0.707_106_781_186_547_5).abs() < 1e-15);
    assert!((area_constant(2) - SQRT_2).abs() < 1e-15);
}

#[test]
fn substitution_identity_and_profile() {
    for n in 1..=6usize {
        // 2 sqrt2 c_n int_0^1 u^{2n-1} log u du = -2 sqrt2 c_n / (2n)^2
        let closed = -2.0 * SQRT_2 * area_constant(n) / (4.0 * (n * n) as f64);
        let q = radial_quadrature(|r| (r / SQRT_2).sin().ln(), n).unwrap().value;
        assert!((q - closed).abs() < 1e-10, "n={n}: {q} vs {closed}");
        let prof = RadialProfile::new(n, 64);
        assert!((prof.apply(|_| 1.0) - 1.0).abs() < 1e-10);
        assert_eq!(prof.area(0.0), 0.0);
        assert!(prof.area(prof.max_radius()).abs() < 1e-12);
    }
}

#[test]
fn mean_distance_matches_monte_carlo() {
    for n in 1..=2 {
        let q = radial_quadrature(|r| r, n).unwrap().value;
        let mut r = rng(500 + n as u64);
        let eta = point(&mut r, n);
        let count = 200_000;
        let d: Vec<f64> = (0..count).map(|_| fs_distance(point(&mut r, n).coords(), eta.coords())).collect();
        let mean = d.iter().sum::<f64>() / count as f64;
        let var = d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (count - 1) as f64;
        let se = (var / count as f64).sqrt();
        assert!((mean - q).abs() < 3.0 * se, "n={n}: {mean} vs {q} (se {se})");
    }
}

#[test]
fn sine_integrals_against_beta_function() {
    for q in [-0.9, -0.5, -0.1, 0.0, 0.5, 1.0, 2.0, 3.5, 7.0] {
        let lib = sine_power_integral(q, Tolerance::default()).unwrap();
        let oracle = 0.5 * beta((q + 1.0) / 2.0, 0.5);
        assert!((lib - oracle).abs() < 1e-9 * oracle, "q={q}: {lib} vs {oracle}");
    }
    // Wallis: int sin^{2n-1} = (2n-2)!! / (2n-1)!!
    for n in 1..=5usize {
        let mut w = 1.0;
        for k in 1..n {
            w *= (2 * k) as f64 / (2 * k + 1) as f64;
        }
        let b = sobolev_bound(n, 0.0).unwrap().value();
        assert!((b - 2.0 * SQRT_2 * area_constant(n) * w).abs() < 1e-9);
    }
    assert!((sobolev_bound(1, 1.0).unwrap().value() - PI).abs() < 1e-10);
    let _ = FRAC_PI_2;
}

#[test]
fn fs_sampler_passes_ks_test() {
    // for FS-uniform points u = sin^2(d(., e_0)/sqrt2) has CDF u^n
    for n in 1..=3 {
        let pts = sample_fs_uniform(77, 20_000, n);
        let e0 = HomogeneousPoint::basis(n, 0);
        let mut u: Vec<f64> = pts.iter().map(|p| (geodesic_distance(p, &e0).unwrap() / SQRT_2).sin().powi(2)).collect();
        u.sort_by(f64::total_cmp);
        let m = u.len() as f64;
        let d = u
            .iter()
            .enumerate()
            .map(|(i, x)| {
                let c = x.powi(n as i32);
                (c - i as f64 / m).abs().max(((i + 1) as f64 / m - c).abs())
            })
            .fold(0.0, f64::max);
        assert!(d < 1.63 / m.sqrt(), "n={n}: KS statistic {d}");
    }
}

#[test]
fn geodesic_derivative_and_arclength() {
    let mut r = rng(21);
    for n in 1..=3 {
        let eta = point(&mut r, n);
        // unit vector orthogonal to eta
        let mut u = gaussian_vec(&mut r, n + 1);
        let ip = dot(eta.coords(), &u);
        for (x, e) in u.iter_mut().zip(eta.coords()) {
            *x -= ip * e;
        }
        let un = nsq(&u).sqrt();
        u.iter_mut().for_each(|x| *x /= un);
        let gamma = |s: f64| -> Vec<C64> { eta.coords().iter().zip(&u).map(|(e, v)| e * s.cos() + v * s.sin()).collect() };
        let g_at = |rad: f64| kernel_g(&HomogeneousPoint::new(&gamma(rad / SQRT_2)).unwrap(), &eta).unwrap().value();
        for rad in [0.2, 0.7, 1.3, 2.0] {
            let h = 1e-4;
            let d = (g_at(rad + h) - g_at(rad - h)) / (2.0 * h);
            let expected = (rad / SQRT_2).tan().recip() / SQRT_2;
            assert!((d - expected).abs() < 1e-6, "n={n} r={rad}: {d} vs {expected}");
            // speed of s -> gamma(s) is sqrt 2, so r = sqrt2 s is arclength
            let s = rad / SQRT_2;
            let vel: Vec<C64> = eta.coords().iter().zip(&u).map(|(e, v)| -e * s.sin() + v * s.cos()).collect();
            assert!((fs_speed(&gamma(s), &vel) - SQRT_2).abs() < 1e-12);
            let dist = geodesic_distance(&HomogeneousPoint::new(&gamma(s)).unwrap(), &eta).unwrap();
            assert!((dist - rad).abs() < 1e-10);
        }
    }
}

#[test]
fn gradient_norm_of_single_atom_potential() {
    // |grad G(., eta)| = cot(d/sqrt2)/sqrt2 in the FS metric
    let mut r = rng(22);
    for n in 1..=3 {
        let eta = point(&mut r, n);
        let mu = AtomicMeasure::dirac(eta.clone());
        for _ in 0..20 {
            let zeta = point(&mut r, n);
            let k = zeta.best_chart();
            let z = to_chart(&zeta, k).unwrap().z;
            let field = FnField::new(n, |y: &[C64]| {
                projlog::potentials::eval_G(&mu, &HomogeneousPoint::new(&chart_lift(y, k)).unwrap()).unwrap()
            });
            let g = fd_gradient(&field, &z, 1e-5).unwrap();
            let d = geodesic_distance(&zeta, &eta).unwrap();
            let expected = (d / SQRT_2).tan().recip() / SQRT_2;
            let got = fs_gradient_norm(&z, &g);
            assert!((got - expected).abs() < 1e-6 * expected.max(1.0), "{got} vs {expected}");
            assert!(got <= (d / SQRT_2).tan().recip() + 1e-9);
        }
    }
}

#[test]
fn fd_gradient_matches_analytic_kernel_gradient() {
    let mut r = rng(23);
    for n in 1..=3 {
        for _ in 0..50 {
            let w = gaussian_vec(&mut r, n);
            let z = gaussian_vec(&mut r, n);
            if q_form(&z, &w) < 0.05 {
                continue;
            }
            let field = FnField::new(n, |y: &[C64]| kernel_n(y, &w).unwrap().value());
            let g = fd_gradient(&field, &z, 1e-4).unwrap();
            let a = n_gradient(&z, &w);
            for (x, y) in g.iter().zip(&a) {
                assert!((x - y).abs() < 1e-6, "{x} vs {y}");
            }
        }
    }
}

#[test]
fn fd_hessian_matches_analytic_kernel_hessian() {
    let mut r = rng(24);
    for n in 1..=3 {
        for _ in 0..30 {
            let w = gaussian_vec(&mut r, n);
            let z: Vec<C64> = w.iter().zip(gaussian_vec(&mut r, n)).map(|(a, b)| a + b * 2.0).collect();
            if q_form(&z, &w) < 0.5 {
                continue;
            }
            let field = FnField::new(n, |y: &[C64]| kernel_n(y, &w).unwrap().value());
            let h = complex_hessian_fd(&field, &z, 1e-3).unwrap();
            let a = n_hessian(&z, &w);
            for j in 0..n {
                for k in 0..n {
                    assert!((h.matrix()[(j, k)] - a[j][k]).norm() < 1e-5);
                }
            }
            // N(., w) is psh: the Hessian is PSD (and vanishes for n = 1)
            assert!(h.min_eigenvalue() >= -1e-6);
        }
    }
}

#[test]
fn fs_hessian_at_origin() {
    for n in 1..=3 {
        let z = vec![C64::new(0.0, 0.0); n];
        let h = complex_hessian_fd(&FsPotential(n), &z, 1e-3).unwrap();
        assert!((h.det() - 0.5f64.powi(n as i32)).abs() < 1e-6);
        // phi = rho + const has density exactly 1 relative to omega^n
        let shifted = FnField::new(n, |y: &[C64]| projlog::geometry::fs_potential(y) + 3.0);
        let d = ma_density_of(&shifted, &gaussian_vec(&mut rng(n as u64), n), 1e-3).unwrap();
        assert!((d.density - 1.0).abs() < 1e-5);
    }
}

#[test]
fn smoothed_lifts_are_psh() {
    let mut r = rng(25);
    for n in 1..=3 {
        let mu = AtomicMeasure::empirical_fs(30 + n as u64, 5, n).unwrap();
        let phi = psh_lift_eps(&mu, 0, 0.05).unwrap();
        for _ in 0..30 {
            let z: Vec<C64> = gaussian_vec(&mut r, n);
            let h = complex_hessian_fd(&phi, &z, 1e-4).unwrap();
            let adj = h.matrix().adjoint();
            assert!((h.matrix() - adj).norm() <= 1e-9 * h.norm());
            assert!(h.min_eigenvalue() >= -1e-6 * h.norm(), "{}", h.min_eigenvalue());
        }
    }
}

#[test]
fn chart_identity_near_chart_floor() {
    let mut r = rng(26);
    for n in 1..=3 {
        for _ in 0..100 {
            let mut v = gaussian_vec(&mut r, n + 1);
            let tail = nsq(&v[1..]).sqrt();
            v[0] = C64::new(1e-6 * tail, 0.0);
            let a = HomogeneousPoint::new(&v).unwrap();
            let b = point(&mut r, n);
            assert!(chart_identity_residual(&a, &b, 0).unwrap() < 1e-9);
        }
    }
}

#[test]
fn wedge_consistency_in_chart() {
    let mut r = rng(27);
    for n in 1..=4 {
        for _ in 0..200 {
            let z = gaussian_vec(&mut r, n);
            let w = gaussian_vec(&mut r, n);
            let lz = chart_lift(&z, 0);
            let lw = chart_lift(&w, 0);
            let diff: f64 = z.iter().zip(&w).map(|(a, b)| (a - b).norm_sqr()).sum();
            let expected = diff + minors_sq(&z, &w);
            let raw = projlog::geometry::wedge_sq(&lz, &lw);
            assert!((raw - expected).abs() < 1e-12 * expected.max(1.0));
            // the normalized form divides out both norms
            let hz = HomogeneousPoint::new(&lz).unwrap();
            let hw = HomogeneousPoint::new(&lw).unwrap();
            let scaled = wedge_norm_sq(&hz, &hw).unwrap() * (1.0 + nsq(&z)) * (1.0 + nsq(&w));
            assert!((scaled - expected).abs() < 1e-12 * expected.max(1.0));
        }
    }
}

#[test]
fn regularized_kernel_increment_bound() {
    let mut r = rng(28);
    for _ in 0..300 {
        let z = gaussian_vec(&mut r, 2);
        let w = gaussian_vec(&mut r, 2);
        let ratio = projlog::kernels::kernel_n_ratio(&z, &w);
        let exact = kernel_n(&z, &w).unwrap().value();
        for eps in [1e-1, 1e-2, 1e-3] {
            let reg = kernel_n_eps(&z, &w, eps).unwrap();
            assert!(reg >= exact);
            assert!(reg - exact <= eps * eps / (2.0 * ratio) + 1e-15);
        }
    }
    let z = [C64::new(0.3, 0.1)];
    assert!((kernel_n_eps(&z, &z, 0.2).unwrap() - 0.2f64.ln()).abs() < 1e-15);
}

#[test]
fn expansion_residuals_two_and_three_atoms() {
    let mut r = rng(29);
    for (atoms, n, tol) in [(2usize, 2usize, 1e-10), (3, 3, 1e-9)] {
        let ws: Vec<(Vec<C64>, f64)> = (0..atoms).map(|_| (gaussian_vec(&mut r, n), 1.0 / atoms as f64)).collect();
        let nu = ChartMeasure::new(0, ws).unwrap();
        for _ in 0..100 {
            let z: Vec<C64> = gaussian_vec(&mut r, n).into_iter().map(|c| c * 2.0).collect();
            let rep = prop25_expansion_check(&nu, &z, 1e-4, None).unwrap();
            assert!(rep.relative_residual() < tol, "{rep:?}");
        }
    }
}

#[test]
fn polarization_coefficients() {
    // det(sum_i t_i A_i) = sum over tuples of prod t D(A_tuple) for arbitrary t
    let mut r = rng(30);
    for n in 1..=3usize {
        for _ in 0..10 {
            let k: usize = 3;
            let mats: Vec<Mat> = (0..k).map(|_| random_hermitian(&mut r, n)).collect();
            let hs: Vec<HermitianMatrix> = mats
                .iter()
                .map(|m| HermitianMatrix::new(DMatrix::from_fn(n, n, |i, j| m[i][j])).unwrap())
                .collect();
            let t: Vec<f64> = (0..k).map(|_| r.random_range(-2.0..2.0)).collect();
            let mut sum: Mat = vec![vec![C64::new(0.0, 0.0); n]; n];
            for (m, ti) in mats.iter().zip(&t) {
                sum = mat_add(&sum, &mat_scale(m, *ti));
            }
            let lhs = det(&sum).re;
            let mut rhs = 0.0;
            for idx in 0..k.pow(n as u32) {
                let tuple: Vec<usize> = (0..n).map(|d| idx / k.pow(d as u32) % k).collect();
                let refs: Vec<&HermitianMatrix> = tuple.iter().map(|&i| &hs[i]).collect();
                rhs += tuple.iter().map(|&i| t[i]).product::<f64>() * mixed_discriminant(&refs).unwrap();
            }
            assert!((lhs - rhs).abs() < 1e-10 * lhs.abs().max(1.0), "{lhs} vs {rhs}");
            // D(A, ..., A) = det A
            let same: Vec<&HermitianMatrix> = (0..n).map(|_| &hs[0]).collect();
            assert!((mixed_discriminant(&same).unwrap() - det(&mats[0]).re).abs() < 1e-10);
        }
    }
}

#[test]
fn mixed_discriminant_of_psd_is_nonnegative() {
    let mut r = rng(31);
    for n in 1..=3usize {
        for _ in 0..50 {
            let mats: Vec<HermitianMatrix> = (0..n)
                .map(|_| {
                    let g = DMatrix::from_fn(n, n, |_, _| gaussian_vec(&mut r, 1)[0]);
                    HermitianMatrix::new(&g * g.adjoint()).unwrap()
                })
                .collect();
            let refs: Vec<&HermitianMatrix> = mats.iter().collect();
            assert!(mixed_discriminant(&refs).unwrap() >= -1e-12);
        }
    }
}

#[test]
fn exact_dirac_density_off_atom() {
    let mu = AtomicMeasure::dirac(HomogeneousPoint::basis(1, 0));
    let mut r = rng(32);
    // second-order stencils carry an h^2 / |z|^4 truncation error on log|z|, so
    // stay on the outer part of the unit disc
    for _ in 0..20 {
        let z = [C64::from_polar(r.random_range(0.5..1.0), r.random_range(0.0..6.3))];
        assert!(ma_density(&mu, 0, &z, 1e-4, 0.0).unwrap().density.abs() < 1e-6);
    }
}

#[test]
fn smoothed_density_integrates_to_one_n1() {
    // radial profile over all of P^1 recovers the unit mass
    let mu = AtomicMeasure::dirac(HomogeneousPoint::basis(1, 0));
    let diam = PI / SQRT_2;
    let rep = ball_mass_profile(&mu, &HomogeneousPoint::basis(1, 0), &[diam], 1e-4, &[0.1], BallOptions::default()).unwrap();
    assert!((rep[0].total_mass - 1.0).abs() < 1e-6, "{:?}", rep[0]);
}

#[test]
fn antipodal_ball_mass_vanishes() {
    let eta = HomogeneousPoint::basis(1, 0);
    let anti = HomogeneousPoint::basis(1, 1);
    let mu = AtomicMeasure::dirac(eta);
    let rep = ball_mass_profile(&mu, &anti, &[0.4, 0.1, 0.01], 1e-4, &[0.1, 0.01], BallOptions::default()).unwrap();
    for eps_rep in &rep {
        let masses: Vec<f64> = eps_rep.ball_profile.iter().map(|b| b.mass).collect();
        assert!(masses.windows(2).all(|w| w[0] <= w[1]));
        assert!(masses[0] < 1e-3, "{masses:?}");
        // for n = 1 only the smooth omega-part survives near the antipode
        for b in &eps_rep.ball_profile {
            assert!(b.ratio < 0.1);
        }
    }
}

#[test]
fn two_atom_riesz_diverges_at_threshold() {
    let c0 = C64::new(0.0, 0.0);
    let nu = ChartMeasure::new(0, vec![(vec![c0, c0], 0.5), (vec![C64::new(0.5, 0.0), C64::new(0.0, 0.2)], 0.5)]).unwrap();
    let ball = Ball::new(vec![c0, c0], 1.5).unwrap();
    let levels = riesz_refinement(&nu, 2.0, 2.0, &ball, RieszOptions::new(64, 4_000), &Refinement::default()).unwrap();
    // the excised part grows linearly in the log-depth once it dominates the finite remainder
    let last = levels[3].near_atom / levels[2].near_atom;
    assert!(last > 10.0, "{levels:?}");
    let below = riesz_refinement(&nu, 2.0, 1.5, &ball, RieszOptions::new(64, 4_000), &Refinement::default()).unwrap();
    let se = (below[3].near_atom_se.powi(2) + below[2].near_atom_se.powi(2)).sqrt();
    assert!((below[3].near_atom - below[2].near_atom).abs() < 3.0 * se, "{below:?}");
}
