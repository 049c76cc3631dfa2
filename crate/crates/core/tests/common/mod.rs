//! Test-side oracles, written independently of the library internals.
#![allow(dead_code)]

use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

pub fn gaussian_vec<R: Rng>(rng: &mut R, len: usize) -> Vec<C> {
    (0..len)
        .map(|_| C::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect()
}

pub fn dot(a: &[C], b: &[C]) -> C {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn nsq(a: &[C]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum()
}

/// Sum of squared 2x2 minors, looping the other way round from the library.
pub fn minors_sq(a: &[C], b: &[C]) -> f64 {
    let mut s = 0.0;
    for j in (0..a.len()).rev() {
        for i in (0..j).rev() {
            s += (a[i] * b[j] - a[j] * b[i]).norm_sqr();
        }
    }
    s
}

/// FS distance through `atan2(|a ^ b|, |<a, b>|)`, accurate at both ends.
pub fn fs_distance(a: &[C], b: &[C]) -> f64 {
    std::f64::consts::SQRT_2 * minors_sq(a, b).sqrt().atan2(dot(a, b).norm())
}

/// `N(z, w)` from the Lagrange-identity form of the ratio.
pub fn n_kernel(z: &[C], w: &[C]) -> f64 {
    0.5 * q_form(z, w).ln() - 0.5 * (1.0 + nsq(w)).ln()
}

/// `Q(z) = |z - w|^2 + |z|^2 |w|^2 - |<w, z>|^2`.
pub fn q_form(z: &[C], w: &[C]) -> f64 {
    let diff: f64 = z.iter().zip(w).map(|(a, b)| (a - b).norm_sqr()).sum();
    diff + nsq(z) * nsq(w) - dot(w, z).norm_sqr()
}

/// `dQ/dz_j = conj(z_j - w_j) + conj(z_j)|w|^2 - conj(w_j) conj(s)` with `s = sum z_i conj(w_i)`.
fn q_dz(z: &[C], w: &[C]) -> Vec<C> {
    let s: C = z.iter().zip(w).map(|(a, b)| a * b.conj()).sum();
    let ww = nsq(w);
    (0..z.len())
        .map(|j| (z[j] - w[j]).conj() + z[j].conj() * ww - w[j].conj() * s.conj())
        .collect()
}

/// Analytic real gradient `(d/dx_1, d/dy_1, ...)` of `N(., w)`.
pub fn n_gradient(z: &[C], w: &[C]) -> Vec<f64> {
    let q = q_form(z, w);
    let dz = q_dz(z, w);
    let mut g = Vec::new();
    for d in dz {
        let f_z = d * (0.5 / q);
        g.push(2.0 * f_z.re);
        g.push(-2.0 * f_z.im);
    }
    g
}

pub type Mat = Vec<Vec<C>>;

/// Analytic `d^2 N / dz_j dzbar_k = (Q_{j kbar} / Q - Q_j Q_kbar / Q^2) / 2`.
pub fn n_hessian(z: &[C], w: &[C]) -> Mat {
    let n = z.len();
    let q = q_form(z, w);
    let dz = q_dz(z, w);
    let ww = nsq(w);
    (0..n)
        .map(|j| {
            (0..n)
                .map(|k| {
                    let delta = if j == k { 1.0 + ww } else { 0.0 };
                    let qjk = C::new(delta, 0.0) - w[j].conj() * w[k];
                    (qjk / q - dz[j] * dz[k].conj() / (q * q)) * 0.5
                })
                .collect()
        })
        .collect()
}

/// Analytic complex Hessian of `log(1 + |z|^2) / 2`.
pub fn fs_hessian(z: &[C]) -> Mat {
    let n = z.len();
    let s = 1.0 + nsq(z);
    (0..n)
        .map(|j| {
            (0..n)
                .map(|k| {
                    let d = if j == k { 1.0 / s } else { 0.0 };
                    (C::new(d, 0.0) - z[j].conj() * z[k] / (s * s)) * 0.5
                })
                .collect()
        })
        .collect()
}

pub fn mat_add(a: &Mat, b: &Mat) -> Mat {
    a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect()).collect()
}

pub fn mat_scale(a: &Mat, t: f64) -> Mat {
    a.iter().map(|r| r.iter().map(|x| x * t).collect()).collect()
}

/// Determinant by cofactor expansion (small matrices only).
pub fn det(a: &Mat) -> C {
    let n = a.len();
    if n == 1 {
        return a[0][0];
    }
    let mut acc = C::new(0.0, 0.0);
    for col in 0..n {
        let minor: Mat = a[1..]
            .iter()
            .map(|r| r.iter().enumerate().filter(|(c, _)| *c != col).map(|(_, x)| *x).collect())
            .collect();
        let sign = if col % 2 == 0 { 1.0 } else { -1.0 };
        acc += a[0][col] * det(&minor) * sign;
    }
    acc
}

/// Mixed discriminant by polarization:
/// `D(A_1..A_n) = (1/n!) sum_{S subset} (-1)^{n-|S|} det(sum_{i in S} A_i)`.
pub fn mixed_discriminant_polar(mats: &[Mat]) -> f64 {
    let n = mats.len();
    let zero: Mat = vec![vec![C::new(0.0, 0.0); n]; n];
    let mut acc = 0.0;
    for mask in 1u32..(1 << n) {
        let mut s = zero.clone();
        for (i, m) in mats.iter().enumerate() {
            if mask & (1 << i) != 0 {
                s = mat_add(&s, m);
            }
        }
        let sign = if (n as u32 - mask.count_ones()) % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * det(&s).re;
    }
    let fact: f64 = (1..=n).map(|i| i as f64).product();
    acc / fact
}

pub fn random_hermitian<R: Rng>(rng: &mut R, n: usize) -> Mat {
    let g: Vec<Vec<C>> = (0..n).map(|_| gaussian_vec(rng, n)).collect();
    (0..n)
        .map(|i| (0..n).map(|j| (g[i][j] + g[j][i].conj()) * 0.5).collect())
        .collect()
}
