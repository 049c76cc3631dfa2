//! Complex Hessians, Monge-Ampere densities and mixed discriminants.

mod mass;

pub use mass::{ball_mass_profile, ma_total_mass, BallMass, BallOptions, GridSpec, MassReport};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::geometry::{chart_lift, norm_sq, to_chart_with_floor, CHART_FLOOR, C64};
use crate::kernels::kernel_n_ratio;
use crate::measures::{AtomicMeasure, ChartMeasure};
use crate::potentials::{g_sum, ChartField, FnField, PotentialField};
use crate::potentials::shifted;
use crate::reduce::{par_map, par_sum, MeanEstimate};
use crate::sampling::stream;
use rand::Rng;

/// Densities below `-NEGATIVE_TOL * scale` are errors; smaller negatives are clipped.
pub const NEGATIVE_TOL: f64 = 1e-6;

/// Hermitian `n x n` matrix, e.g. `d^2 f / dz_j dzbar_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(DMatrix<C64>);

impl HermitianMatrix {
    /// Accepts `m` if `|m - m*| <= 1e-9 |m|` and stores its Hermitian part.
    pub fn new(m: DMatrix<C64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch { expected: m.nrows(), found: m.ncols() });
        }
        let adj = m.adjoint();
        let skew = (&m - &adj).norm();
        if skew > 1e-9 * m.norm() {
            return Err(Error::InvalidArgument(format!("matrix is not Hermitian (skew part {skew:.3e})")));
        }
        Ok(HermitianMatrix((&m + &adj) * C64::new(0.5, 0.0)))
    }

    pub fn identity(n: usize) -> Self {
        HermitianMatrix(DMatrix::identity(n, n))
    }

    pub fn from_real_diagonal(d: &[f64]) -> Self {
        HermitianMatrix(DMatrix::from_fn(d.len(), d.len(), |i, j| {
            if i == j { C64::new(d[i], 0.0) } else { C64::new(0.0, 0.0) }
        }))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn det(&self) -> f64 {
        self.0.clone().determinant().re
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.0.clone().symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn scaled(&self, t: f64) -> Self {
        HermitianMatrix(&self.0 * C64::new(t, 0.0))
    }

    pub fn add(&self, other: &Self) -> Self {
        HermitianMatrix(&self.0 + &other.0)
    }
}

/// Complex Hessian `d^2 f / dz_j dzbar_k` from a central-difference real Hessian.
pub fn complex_hessian_fd(field: &dyn ChartField, z: &[C64], h: f64) -> Result<HermitianMatrix> {
    let n = z.len();
    if n != field.dim() {
        return Err(Error::DimensionMismatch { expected: field.dim(), found: n });
    }
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!("step must be positive, got {h}")));
    }
    let m = 2 * n;
    let eval = |v: &[C64]| -> Result<f64> {
        let f = field.value(v);
        if f.is_finite() { Ok(f) } else { Err(Error::SingularStencil) }
    };
    let f0 = eval(z)?;
    let mut r = vec![vec![0.0; m]; m];
    for i in 0..m {
        let fp = eval(&shifted(z, i, h))?;
        let fm = eval(&shifted(z, i, -h))?;
        r[i][i] = (fp - 2.0 * f0 + fm) / (h * h);
        for j in i + 1..m {
            let zp = shifted(z, i, h);
            let zm = shifted(z, i, -h);
            let fpp = eval(&shifted(&zp, j, h))?;
            let fpm = eval(&shifted(&zp, j, -h))?;
            let fmp = eval(&shifted(&zm, j, h))?;
            let fmm = eval(&shifted(&zm, j, -h))?;
            let v = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
            r[i][j] = v;
            r[j][i] = v;
        }
    }
    // d_j dbar_k = ((d_xj d_xk + d_yj d_yk) + i (d_xj d_yk - d_yj d_xk)) / 4
    let mat = DMatrix::from_fn(n, n, |j, k| {
        let (xj, yj, xk, yk) = (2 * j, 2 * j + 1, 2 * k, 2 * k + 1);
        C64::new(r[xj][xk] + r[yj][yk], r[xj][yk] - r[yj][xk]) * 0.25
    });
    Ok(HermitianMatrix(mat))
}

/// `det` of the complex Hessian of `rho = log(1 + |z|^2) / 2`: `2^{-n} (1 + |z|^2)^{-(n+1)}`.
pub fn fs_hessian_det(z: &[C64]) -> f64 {
    let n = z.len() as i32;
    0.5f64.powi(n) * (1.0 + norm_sq(z)).powi(-(n + 1))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityValue {
    pub density: f64,
    /// A small negative FD value was clipped to zero.
    pub clipped: bool,
}

/// `det H_phi / det H_rho` at `z` for a locally psh `phi`.
pub fn ma_density_of(field: &dyn ChartField, z: &[C64], h: f64) -> Result<DensityValue> {
    let hess = complex_hessian_fd(field, z, h)?;
    let ref_det = fs_hessian_det(z);
    let d = hess.det() / ref_det;
    if d >= 0.0 {
        return Ok(DensityValue { density: d, clipped: false });
    }
    let scale = hess.norm().powi(z.len() as i32) / ref_det;
    if d < -NEGATIVE_TOL * scale.max(1.0) {
        return Err(Error::NegativeDensity { value: d });
    }
    Ok(DensityValue { density: 0.0, clipped: true })
}

/// Density of `(omega + dd^c G_mu^eps)^n` relative to the unit FS volume, at
/// `z` in chart `k`. For `eps = 0` the point must stay `10 h` away from atoms.
pub fn ma_density(mu: &AtomicMeasure, k: usize, z: &[C64], h: f64, eps: f64) -> Result<DensityValue> {
    let n = mu.dim();
    if k > n {
        return Err(Error::ChartUndefined { chart: k });
    }
    if z.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: z.len() });
    }
    if eps < 0.0 || eps.is_nan() {
        return Err(Error::NonpositiveEpsilon(eps));
    }
    if eps == 0.0 {
        for a in mu.atoms() {
            if let Ok(w) = to_chart_with_floor(&a.point, k, CHART_FLOOR) {
                let d2: f64 = z.iter().zip(&w.z).map(|(x, y)| (x - y).norm_sqr()).sum();
                if d2.sqrt() <= 10.0 * h {
                    return Err(Error::SingularStencil);
                }
            }
        }
    }
    let field = FnField::new(n, |v: &[C64]| g_sum(mu, &chart_lift(v, k), eps) + crate::geometry::fs_potential(v));
    ma_density_of(&field, z, h)
}

fn kernel_n_field(n: usize, w: &[C64]) -> impl ChartField + '_ {
    FnField::new(n, move |z: &[C64]| {
        let r = kernel_n_ratio(z, w);
        if r > 0.0 { 0.5 * r.ln() } else { f64::NEG_INFINITY }
    })
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Mixed discriminant `D(A_1, ..., A_n) = (1/n!) sum_sigma det[A_sigma(1)^(1) | ... ]`,
/// where column `j` is taken from `A_sigma(j)`; `D(A, ..., A) = det A`.
pub fn mixed_discriminant(mats: &[&HermitianMatrix]) -> Result<f64> {
    let n = mats.len();
    for a in mats {
        if a.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, found: a.dim() });
        }
    }
    if n == 0 {
        return Ok(1.0);
    }
    let perms = permutations(n);
    let mut acc = 0.0;
    for p in &perms {
        let m = DMatrix::from_fn(n, n, |i, j| mats[p[j]].0[(i, j)]);
        acc += m.determinant().re;
    }
    Ok(acc / perms.len() as f64)
}

/// Tuple sampling used once the full expansion exceeds [`PROP25_TERM_CAP`].
#[derive(Debug, Clone, Copy)]
pub struct TupleSampling {
    pub seed: u64,
    pub samples: usize,
}

pub const PROP25_TERM_CAP: u128 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prop25Report {
    /// `det(sum_i w_i H_i)`.
    pub lhs: f64,
    /// `sum over tuples of w_{i_1}...w_{i_n} D(H_{i_1}, ..., H_{i_n})`.
    pub rhs: f64,
    pub residual: f64,
    /// Sum of absolute term magnitudes; residuals are judged relative to it.
    pub scale: f64,
    pub terms: u128,
    /// Standard error of `rhs` when tuples were sampled.
    pub sampled_se: Option<f64>,
}

impl Prop25Report {
    pub fn relative_residual(&self) -> f64 {
        if self.scale > 0.0 { self.residual / self.scale } else { self.residual }
    }
}

/// Compare `det(sum_i w_i H_i)` with its multilinear expansion, where `H_i` is the
/// FD Hessian of `N(., w_i)` at `z`.
pub fn prop25_expansion_check(
    nu: &ChartMeasure,
    z: &[C64],
    h: f64,
    sampling: Option<TupleSampling>,
) -> Result<Prop25Report> {
    let n = nu.dim();
    if z.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: z.len() });
    }
    let hs: Vec<HermitianMatrix> = nu
        .atoms()
        .iter()
        .map(|(w, _)| complex_hessian_fd(&kernel_n_field(n, w), z, h))
        .collect::<Result<_>>()?;
    let weights: Vec<f64> = nu.atoms().iter().map(|a| a.1).collect();
    let mut sum = HermitianMatrix(DMatrix::zeros(n, n));
    for (hm, w) in hs.iter().zip(&weights) {
        sum = sum.add(&hm.scaled(*w));
    }
    let lhs = sum.det();
    let atoms = hs.len();
    let terms = (atoms as u128).pow(n as u32);

    let term = |tuple: &[usize]| -> (f64, f64) {
        let mats: Vec<&HermitianMatrix> = tuple.iter().map(|&i| &hs[i]).collect();
        let d = mixed_discriminant(&mats).expect("dimensions checked");
        (tuple.iter().map(|&i| weights[i]).product(), d)
    };
    let decode = |mut idx: usize| -> Vec<usize> {
        (0..n)
            .map(|_| {
                let d = idx % atoms;
                idx /= atoms;
                d
            })
            .collect()
    };

    if terms <= PROP25_TERM_CAP {
        let count = terms as usize;
        let rhs = par_sum(count, |i| {
            let (w, d) = term(&decode(i));
            w * d
        });
        let scale = par_sum(count, |i| {
            let (w, d) = term(&decode(i));
            (w * d).abs()
        });
        return Ok(Prop25Report { lhs, rhs, residual: (lhs - rhs).abs(), scale, terms, sampled_se: None });
    }
    let Some(s) = sampling else {
        return Err(Error::CombinatorialBlowup { terms, cap: PROP25_TERM_CAP });
    };
    // draw tuples with probability prod w_i, so the estimator is the plain mean of D
    let cumulative: Vec<f64> = weights
        .iter()
        .scan(0.0, |acc, w| {
            *acc += w;
            Some(*acc)
        })
        .collect();
    let vals: Vec<(f64, f64)> = par_map(s.samples, |i| {
        let mut rng = stream(s.seed, i as u64);
        let tuple: Vec<usize> = (0..n)
            .map(|_| {
                let u: f64 = rng.random::<f64>() * cumulative[atoms - 1];
                cumulative.partition_point(|c| *c <= u).min(atoms - 1)
            })
            .collect();
        let (_, d) = term(&tuple);
        (d, d.abs())
    });
    let est = MeanEstimate::from_values(&vals.iter().map(|v| v.0).collect::<Vec<_>>());
    let scale = MeanEstimate::from_values(&vals.iter().map(|v| v.1).collect::<Vec<_>>()).mean;
    Ok(Prop25Report {
        lhs,
        rhs: est.mean,
        residual: (lhs - est.mean).abs(),
        scale,
        terms,
        sampled_se: Some(est.std_error),
    })
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Lebesgue density of `(dd^c V_nu)^m ^ (dd^c psi)^{n-m}`:
/// `C(n, m) D(H_V, ..., H_V, H_psi, ..., H_psi)` with `m` copies of `H_V`.
pub fn smooth_wedge_density(nu: &ChartMeasure, psi: &dyn ChartField, m: usize, z: &[C64], h: f64) -> Result<f64> {
    let n = nu.dim();
    if m > n {
        return Err(Error::InvalidArgument(format!("wedge exponent m = {m} exceeds n = {n}")));
    }
    if psi.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: psi.dim() });
    }
    let v = PotentialField::Affine { measure: nu.clone(), eps: 0.0 };
    let hv = complex_hessian_fd(&v, z, h)?;
    let hp = complex_hessian_fd(psi, z, h)?;
    let mats: Vec<&HermitianMatrix> = (0..n).map(|i| if i < m { &hv } else { &hp }).collect();
    let d = binomial(n, m) * mixed_discriminant(&mats)?;
    if d >= 0.0 {
        return Ok(d);
    }
    let scale = hv.norm().max(hp.norm()).powi(n as i32);
    if d < -NEGATIVE_TOL * scale.max(1.0) {
        return Err(Error::NegativeDensity { value: d });
    }
    Ok(0.0)
}
