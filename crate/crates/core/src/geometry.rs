//! Homogeneous coordinates, the standard affine atlas and Fubini-Study geometry
//! on complex projective space.
//!
//! Conventions used throughout the crate:
//! - the FS distance is `d = sqrt(2) * asin(|zeta ^ eta| / (|zeta| |eta|))`, so
//!   `diam P^n = pi / sqrt(2)`;
//! - the FS volume form has total mass 1;
//! - chart coordinates of `U_k` are `z_j = zeta_j / zeta_k` for `j != k`, in
//!   increasing `j`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Default lower bound on `|zeta_k| / |zeta|` for `to_chart`.
pub const CHART_FLOOR: f64 = 1e-10;
/// Componentwise tolerance for equality of canonical forms.
pub const POINT_EQ_TOL: f64 = 1e-12;
/// Slack allowed on closed identities and bounds.
pub const IDENTITY_SLACK: f64 = 1e-12;

/// A point of P^n in canonical form.
///
/// Canonical form: unit Euclidean norm, and the first component of largest
/// modulus is real and positive.
#[derive(Debug, Clone, PartialEq)]
pub struct HomogeneousPoint {
    coords: Vec<C64>,
}

/// Squared Euclidean norm of a complex vector.
pub fn norm_sq(v: &[C64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum()
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Project a nonzero vector of C^{n+1} to its canonical representative.
pub fn normalize(raw: &[C64]) -> Result<HomogeneousPoint> {
    if raw.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "homogeneous coordinates need at least 2 components, got {}",
            raw.len()
        )));
    }
    if raw.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::InvalidArgument("non-finite homogeneous coordinate".into()));
    }
    let scale = raw.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return Err(Error::ZeroVector);
    }
    // rescale first so tiny or huge inputs do not under/overflow in the norm
    let scaled: Vec<C64> = raw.iter().map(|c| c / scale).collect();
    let norm = norm_sq(&scaled).sqrt();
    let moduli: Vec<f64> = scaled.iter().map(|c| c.norm()).collect();
    let max = moduli.iter().cloned().fold(0.0, f64::max);
    // near-ties resolve to the first index so that rescaled inputs agree
    let pivot = moduli
        .iter()
        .position(|&m| m >= max * (1.0 - 1e-12))
        .expect("max is attained");
    let phase = scaled[pivot].conj() / moduli[pivot];
    let mut coords: Vec<C64> = scaled.iter().map(|c| c * phase / norm).collect();
    coords[pivot] = C64::new(coords[pivot].norm(), 0.0);
    Ok(HomogeneousPoint { coords })
}

impl HomogeneousPoint {
    pub fn new(raw: &[C64]) -> Result<Self> {
        normalize(raw)
    }

    /// The coordinate vector `e_k` of C^{n+1}.
    pub fn basis(n: usize, k: usize) -> Self {
        let mut coords = vec![C64::new(0.0, 0.0); n + 1];
        coords[k] = C64::new(1.0, 0.0);
        HomogeneousPoint { coords }
    }

    pub fn from_real(raw: &[f64]) -> Result<Self> {
        let c: Vec<C64> = raw.iter().map(|&x| C64::new(x, 0.0)).collect();
        normalize(&c)
    }

    pub fn coords(&self) -> &[C64] {
        &self.coords
    }

    /// Projective dimension n (the vector has n + 1 components).
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    /// Equality in P^n: canonical forms agree componentwise within `POINT_EQ_TOL`.
    pub fn approx_eq(&self, other: &Self) -> bool {
        self.coords.len() == other.coords.len()
            && self
                .coords
                .iter()
                .zip(&other.coords)
                .all(|(a, b)| (a - b).norm() <= POINT_EQ_TOL)
    }

    /// `|zeta_k|^2 / |zeta|^2`.
    pub fn chart_weight(&self, k: usize) -> f64 {
        self.coords[k].norm_sqr()
    }

    /// Index of the largest-modulus coordinate: the best-conditioned chart.
    pub fn best_chart(&self) -> usize {
        best_chart(&self.coords)
    }

    pub fn apply(&self, u: &Unitary) -> HomogeneousPoint {
        normalize(&u.apply(&self.coords)).expect("unitary maps nonzero to nonzero")
    }
}

pub fn best_chart(v: &[C64]) -> usize {
    let mut best = 0;
    for (i, c) in v.iter().enumerate() {
        if c.norm_sqr() > v[best].norm_sqr() {
            best = i;
        }
    }
    best
}

impl Serialize for HomogeneousPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = self.coords.iter().map(|c| [c.re, c.im]).collect();
        pairs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for HomogeneousPoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(d)?;
        let raw: Vec<C64> = pairs.iter().map(|p| C64::new(p[0], p[1])).collect();
        normalize(&raw).map_err(serde::de::Error::custom)
    }
}

/// `sum_{i<j} |a_i b_j - a_j b_i|^2` for arbitrary (unnormalized) vectors.
pub fn wedge_sq(a: &[C64], b: &[C64]) -> f64 {
    let mut acc = 0.0;
    for i in 0..a.len() {
        for j in (i + 1)..a.len() {
            acc += (a[i] * b[j] - a[j] * b[i]).norm_sqr();
        }
    }
    acc
}

/// `|zeta ^ eta|^2` for two points of the same P^n.
pub fn wedge_norm_sq(zeta: &HomogeneousPoint, eta: &HomogeneousPoint) -> Result<f64> {
    check_dim(zeta.coords.len(), eta.coords.len())?;
    Ok(wedge_sq(&zeta.coords, &eta.coords))
}

/// `sin^2(d / sqrt 2)` for arbitrary representatives.
pub fn sin_sq_half_distance(a: &[C64], b: &[C64]) -> f64 {
    (wedge_sq(a, b) / (norm_sq(a) * norm_sq(b))).min(1.0)
}

/// Fubini-Study geodesic distance, in `[0, pi / sqrt 2]`.
pub fn geodesic_distance(zeta: &HomogeneousPoint, eta: &HomogeneousPoint) -> Result<f64> {
    check_dim(zeta.coords.len(), eta.coords.len())?;
    Ok(distance_raw(&zeta.coords, &eta.coords))
}

pub fn distance_raw(a: &[C64], b: &[C64]) -> f64 {
    std::f64::consts::SQRT_2 * sin_sq_half_distance(a, b).sqrt().asin()
}

/// FS volume of a geodesic ball of radius `r`: `sin^{2n}(r / sqrt 2)`.
pub fn ball_volume(n: usize, r: f64) -> f64 {
    let t = (r / std::f64::consts::SQRT_2).min(PI / 2.0);
    t.sin().powi(2 * n as i32)
}

/// A point in the affine chart `U_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffinePoint {
    pub chart: usize,
    pub z: Vec<C64>,
}

impl AffinePoint {
    pub fn new(chart: usize, z: Vec<C64>) -> Result<Self> {
        if chart > z.len() {
            return Err(Error::InvalidArgument(format!(
                "chart {chart} out of range for n = {}",
                z.len()
            )));
        }
        if z.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidArgument("non-finite chart coordinate".into()));
        }
        Ok(AffinePoint { chart, z })
    }
}

pub fn to_chart(zeta: &HomogeneousPoint, k: usize) -> Result<AffinePoint> {
    to_chart_with_floor(zeta, k, CHART_FLOOR)
}

pub fn to_chart_with_floor(zeta: &HomogeneousPoint, k: usize, floor: f64) -> Result<AffinePoint> {
    let c = zeta.coords();
    if k >= c.len() {
        return Err(Error::InvalidArgument(format!("chart {k} out of range for n = {}", zeta.dim())));
    }
    // canonical points have unit norm
    if c[k].norm() <= floor {
        return Err(Error::ChartUndefined { chart: k });
    }
    let pivot = c[k];
    let z = c
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != k)
        .map(|(_, v)| v / pivot)
        .collect();
    Ok(AffinePoint { chart: k, z })
}

/// Homogeneous representative `(z_0, .., 1, .., z_{n-1})` with 1 in slot `k`.
pub fn chart_lift(z: &[C64], k: usize) -> Vec<C64> {
    let mut v = Vec::with_capacity(z.len() + 1);
    v.extend_from_slice(&z[..k]);
    v.push(C64::new(1.0, 0.0));
    v.extend_from_slice(&z[k..]);
    v
}

pub fn from_chart(a: &AffinePoint) -> HomogeneousPoint {
    normalize(&chart_lift(&a.z, a.chart)).expect("chart lift is nonzero")
}

/// Local Kahler potential of the FS form: `rho(z) = log(1 + |z|^2) / 2`.
pub fn fs_potential(z: &[C64]) -> f64 {
    0.5 * norm_sq(z).ln_1p()
}

/// FS volume density with respect to Lebesgue measure on the chart:
/// `n! / pi^n * (1 + |z|^2)^{-(n+1)}`, normalized so P^n has unit volume.
pub fn fs_volume_density(z: &[C64]) -> f64 {
    let n = z.len();
    let fact: f64 = (1..=n).map(|i| i as f64).product();
    fact / PI.powi(n as i32) * (1.0 + norm_sq(z)).powi(-(n as i32 + 1))
}

/// Riemannian FS norm of a gradient given in real chart coordinates
/// ordered `(Re z_1, Im z_1, Re z_2, ...)`.
///
/// With `a_j = df/dz_j`, the squared norm is `2 a* S^{-1} a` where
/// `S^{-1} = (1 + |z|^2)(I + z z*)`.
pub fn fs_gradient_norm(z: &[C64], real_grad: &[f64]) -> f64 {
    let n = z.len();
    assert_eq!(real_grad.len(), 2 * n);
    // conj(df/dz_j) = (f_x + i f_y) / 2
    let a: Vec<C64> = (0..n)
        .map(|j| C64::new(real_grad[2 * j], real_grad[2 * j + 1]) * 0.5)
        .collect();
    let s = 1.0 + norm_sq(z);
    let za: C64 = z.iter().zip(&a).map(|(zi, ai)| zi.conj() * ai).sum();
    let q = (norm_sq(&a) + za.norm_sqr()) * s;
    (2.0 * q).sqrt()
}

/// Speed of a curve through `zeta` with velocity `v` in homogeneous
/// coordinates (only the horizontal part of `v` counts).
pub fn fs_speed(zeta: &[C64], v: &[C64]) -> f64 {
    let n2 = norm_sq(zeta);
    let ip: C64 = zeta.iter().zip(v).map(|(a, b)| a.conj() * b).sum();
    let horiz = (n2 * norm_sq(v) - ip.norm_sqr()).max(0.0) / (n2 * n2);
    (2.0 * horiz).sqrt()
}

/// Unitary transformation of C^{n+1}.
#[derive(Debug, Clone)]
pub struct Unitary(DMatrix<C64>);

impl Unitary {
    pub fn identity(dim: usize) -> Self {
        Unitary(DMatrix::identity(dim, dim))
    }

    pub fn from_matrix(m: DMatrix<C64>) -> Self {
        Unitary(m)
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let m = &self.0;
        (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| m[(i, j)] * v[j]).sum())
            .collect()
    }

    /// A Householder reflection mapping the unit vector `eta` onto the line of `e_0`.
    pub fn to_basepoint(eta: &HomogeneousPoint) -> Self {
        let x = eta.coords();
        let dim = x.len();
        let x0 = x[0];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { C64::new(1.0, 0.0) };
        let mut v: Vec<C64> = x.to_vec();
        v[0] += phase; // |x| = 1
        let vv = norm_sq(&v);
        if vv == 0.0 {
            return Unitary::identity(dim);
        }
        let m = DMatrix::from_fn(dim, dim, |i, j| {
            let id = if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
            id - v[i] * v[j].conj() * (2.0 / vv)
        });
        Unitary(m)
    }

    /// Haar-random unitary from the QR factorization of a complex Ginibre matrix.
    pub fn random<R: rand::Rng + ?Sized>(rng: &mut R, dim: usize) -> Self {
        use rand_distr::{Distribution, StandardNormal};
        let g = DMatrix::from_fn(dim, dim, |_, _| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            C64::new(re, im)
        });
        let qr = g.qr();
        let q = qr.q();
        let r = qr.r();
        // fix the phases so the distribution is Haar
        let d = DMatrix::from_fn(dim, dim, |i, j| {
            if i == j {
                let rii = r[(i, i)];
                if rii.norm() > 0.0 { rii / rii.norm() } else { C64::new(1.0, 0.0) }
            } else {
                C64::new(0.0, 0.0)
            }
        });
        Unitary(q * d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use std::f64::consts::SQRT_2;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn normalize_examples() {
        let p = normalize(&[c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!(p.approx_eq(&HomogeneousPoint::basis(2, 0)));
        let q = normalize(&[c(0.0, 0.0), c(0.0, 1.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(q.coords()[1], c(1.0, 0.0));
        let r = normalize(&[c(1.0, 1.0), c(0.0, 0.0)]).unwrap();
        assert!((r.coords()[0] - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn normalize_rejects_zero() {
        assert_eq!(normalize(&[c(0.0, 0.0), c(0.0, 0.0)]), Err(Error::ZeroVector));
    }

    #[test]
    fn normalize_is_scale_invariant() {
        let raw = [c(0.3, -0.2), c(-1.1, 0.4), c(0.5, 0.5)];
        let lam = c(-2.7, 0.9);
        let scaled: Vec<C64> = raw.iter().map(|z| z * lam).collect();
        assert!(normalize(&raw).unwrap().approx_eq(&normalize(&scaled).unwrap()));
    }

    #[test]
    fn wedge_examples() {
        let e0 = HomogeneousPoint::basis(2, 0);
        let e1 = HomogeneousPoint::basis(2, 1);
        assert_eq!(wedge_norm_sq(&e0, &e1).unwrap(), 1.0);
        assert_eq!(wedge_norm_sq(&e0, &e0).unwrap(), 0.0);
        let a = HomogeneousPoint::from_real(&[1.0, 1.0]).unwrap();
        let b = HomogeneousPoint::from_real(&[1.0, -1.0]).unwrap();
        assert!((wedge_norm_sq(&a, &b).unwrap() - 1.0).abs() < 1e-15);
        let bad = HomogeneousPoint::basis(1, 0);
        assert!(matches!(wedge_norm_sq(&e0, &bad), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn distance_examples() {
        let e0 = HomogeneousPoint::basis(1, 0);
        let e1 = HomogeneousPoint::basis(1, 1);
        assert_eq!(geodesic_distance(&e0, &e0).unwrap(), 0.0);
        assert!((geodesic_distance(&e0, &e1).unwrap() - PI / SQRT_2).abs() < 1e-15);
        let th: f64 = 0.3;
        let eta = HomogeneousPoint::from_real(&[th.cos(), th.sin()]).unwrap();
        assert!((geodesic_distance(&e0, &eta).unwrap() - SQRT_2 * th).abs() < 1e-14);
    }

    #[test]
    fn chart_examples() {
        let p = HomogeneousPoint::from_real(&[2.0, 4.0]).unwrap();
        let a = to_chart(&p, 0).unwrap();
        assert!((a.z[0] - c(2.0, 0.0)).norm() < 1e-15);
        let e1 = from_chart(&AffinePoint::new(1, vec![c(0.0, 0.0), c(0.0, 0.0)]).unwrap());
        assert!(e1.approx_eq(&HomogeneousPoint::basis(2, 1)));
        let e0 = HomogeneousPoint::basis(2, 0);
        assert_eq!(to_chart(&e0, 1), Err(Error::ChartUndefined { chart: 1 }));
    }

    #[test]
    fn chart_round_trip_random() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let u = Unitary::random(&mut rng, 4);
            let p = HomogeneousPoint::basis(3, 0).apply(&u);
            let k = p.best_chart();
            let back = from_chart(&to_chart(&p, k).unwrap());
            for (x, y) in back.coords().iter().zip(p.coords()) {
                assert!((x - y).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn fs_potential_examples() {
        assert_eq!(fs_potential(&[c(0.0, 0.0)]), 0.0);
        assert!((fs_potential(&[c(0.6, 0.8)]) - 0.5 * 2f64.ln()).abs() < 1e-15);
        assert!((fs_potential(&[c(1.0, 0.0), c(1.0, 0.0)]) - 0.5 * 3f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn householder_hits_basepoint() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let eta = HomogeneousPoint::basis(2, 1).apply(&Unitary::random(&mut rng, 3));
            let u = Unitary::to_basepoint(&eta);
            assert!(eta.apply(&u).approx_eq(&HomogeneousPoint::basis(2, 0)));
        }
    }

    #[test]
    fn volume_density_integrates_to_one_n1() {
        // radial: 2 pi int_0^inf s f(s) ds
        let r = crate::quadrature::integrate(
            |t: f64| {
                let s = t / (1.0 - t);
                2.0 * PI * s * fs_volume_density(&[c(s, 0.0)]) / (1.0 - t).powi(2)
            },
            0.0,
            1.0,
            Default::default(),
        )
        .unwrap();
        assert!((r.value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn gradient_norm_at_origin() {
        // metric at 0 is 2|dz|^2, so |grad Re z| = 1/sqrt 2
        let g = fs_gradient_norm(&[c(0.0, 0.0)], &[1.0, 0.0]);
        assert!((g - 1.0 / SQRT_2).abs() < 1e-15);
    }
}
