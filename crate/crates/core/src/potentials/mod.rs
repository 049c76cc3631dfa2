//! Potentials `G_mu`, `V_nu`, their regularizations and chart lifts.

mod sobolev;

pub use sobolev::{sobolev_refinement, sobolev_scan, SobolevEstimate, SobolevOptions};

use crate::error::{Error, Result};
use crate::geometry::{chart_lift, fs_potential, to_chart, HomogeneousPoint, C64};
use crate::kernels::{kernel_g_raw, kernel_g_smoothed_raw, kernel_n_ratio, KernelValue};
use crate::measures::{AtomicMeasure, ChartMeasure};

/// A scalar field on an affine chart `C^n`; `-inf` marks singular points.
pub trait ChartField: Sync {
    fn dim(&self) -> usize;
    fn value(&self, z: &[C64]) -> f64;
}

/// Wraps a closure as a [`ChartField`].
pub struct FnField<F> {
    n: usize,
    f: F,
}

impl<F: Fn(&[C64]) -> f64 + Sync> FnField<F> {
    pub fn new(n: usize, f: F) -> Self {
        FnField { n, f }
    }
}

impl<F: Fn(&[C64]) -> f64 + Sync> ChartField for FnField<F> {
    fn dim(&self) -> usize {
        self.n
    }
    fn value(&self, z: &[C64]) -> f64 {
        (self.f)(z)
    }
}

/// The FS potential `rho = log(1 + |z|^2) / 2` as a field.
pub struct FsPotential(pub usize);

impl ChartField for FsPotential {
    fn dim(&self) -> usize {
        self.0
    }
    fn value(&self, z: &[C64]) -> f64 {
        fs_potential(z)
    }
}

#[derive(Debug, Clone)]
pub enum PotentialField {
    /// `G_mu` (or its smoothing for `eps > 0`), read through chart 0 as a chart field.
    Projective { measure: AtomicMeasure, eps: f64 },
    /// `V_nu` (or `V_nu^eps` for `eps > 0`).
    Affine { measure: ChartMeasure, eps: f64 },
    /// `phi = G_mu o chart + rho`, locally psh in chart `chart`.
    Lift { measure: AtomicMeasure, eps: f64, chart: usize },
}

impl PotentialField {
    pub fn eps(&self) -> f64 {
        match self {
            PotentialField::Projective { eps, .. }
            | PotentialField::Affine { eps, .. }
            | PotentialField::Lift { eps, .. } => *eps,
        }
    }

    /// Evaluate at a point of P^n (projective and lifted kinds only).
    pub fn at_point(&self, zeta: &HomogeneousPoint) -> Result<f64> {
        match self {
            PotentialField::Projective { measure, eps } => g_any(measure, zeta.coords(), *eps),
            PotentialField::Lift { chart, .. } => Ok(self.value(&to_chart(zeta, *chart)?.z)),
            PotentialField::Affine { .. } => {
                Err(Error::InvalidArgument("affine potentials are evaluated in chart coordinates".into()))
            }
        }
    }
}

impl ChartField for PotentialField {
    fn dim(&self) -> usize {
        match self {
            PotentialField::Projective { measure, .. } | PotentialField::Lift { measure, .. } => measure.dim(),
            PotentialField::Affine { measure, .. } => measure.dim(),
        }
    }

    fn value(&self, z: &[C64]) -> f64 {
        match self {
            PotentialField::Projective { measure, eps } => g_sum(measure, &chart_lift(z, 0), *eps),
            PotentialField::Affine { measure, eps } => v_sum(measure, z, *eps),
            PotentialField::Lift { measure, eps, chart } => g_sum(measure, &chart_lift(z, *chart), *eps) + fs_potential(z),
        }
    }
}

pub(crate) fn g_sum(mu: &AtomicMeasure, v: &[C64], eps: f64) -> f64 {
    let mut acc = 0.0;
    for a in mu.atoms() {
        let g = if eps > 0.0 {
            kernel_g_smoothed_raw(v, a.point.coords(), eps)
        } else {
            match kernel_g_raw(v, a.point.coords()) {
                KernelValue::Finite(g) => g,
                KernelValue::Singular => return f64::NEG_INFINITY,
            }
        };
        acc += a.weight * g;
    }
    acc
}

pub(crate) fn v_sum(nu: &ChartMeasure, z: &[C64], eps: f64) -> f64 {
    let mut acc = 0.0;
    for (w, weight) in nu.atoms() {
        let r = kernel_n_ratio(z, w) + eps * eps;
        if r == 0.0 {
            return f64::NEG_INFINITY;
        }
        acc += weight * 0.5 * r.ln();
    }
    acc
}

fn g_any(mu: &AtomicMeasure, v: &[C64], eps: f64) -> Result<f64> {
    if v.len() != mu.dim() + 1 {
        return Err(Error::DimensionMismatch { expected: mu.dim() + 1, found: v.len() });
    }
    Ok(g_sum(mu, v, eps))
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 {
        Ok(())
    } else {
        Err(Error::NonpositiveEpsilon(eps))
    }
}

/// `G_mu(zeta) = sum_i w_i G(zeta, eta_i)`; `-inf` exactly at atoms.
#[allow(non_snake_case)]
pub fn eval_G(mu: &AtomicMeasure, zeta: &HomogeneousPoint) -> Result<f64> {
    g_any(mu, zeta.coords(), 0.0)
}

/// Smoothed potential `sum_i w_i log(sin^2(d_i / sqrt 2) + eps^2) / 2`.
#[allow(non_snake_case)]
pub fn eval_G_eps(mu: &AtomicMeasure, zeta: &HomogeneousPoint, eps: f64) -> Result<f64> {
    check_eps(eps)?;
    g_any(mu, zeta.coords(), eps)
}

#[allow(non_snake_case)]
pub fn eval_V(nu: &ChartMeasure, z: &[C64]) -> Result<f64> {
    if z.len() != nu.dim() {
        return Err(Error::DimensionMismatch { expected: nu.dim(), found: z.len() });
    }
    Ok(v_sum(nu, z, 0.0))
}

#[allow(non_snake_case)]
pub fn eval_V_eps(nu: &ChartMeasure, z: &[C64], eps: f64) -> Result<f64> {
    check_eps(eps)?;
    if z.len() != nu.dim() {
        return Err(Error::DimensionMismatch { expected: nu.dim(), found: z.len() });
    }
    Ok(v_sum(nu, z, eps))
}

/// The local psh function `G_mu o chart_k + rho` on `U_k`.
pub fn psh_lift(mu: &AtomicMeasure, k: usize) -> Result<PotentialField> {
    psh_lift_eps(mu, k, 0.0)
}

/// [`psh_lift`] built from the smoothed kernel (`eps = 0` gives the exact lift).
pub fn psh_lift_eps(mu: &AtomicMeasure, k: usize, eps: f64) -> Result<PotentialField> {
    if k > mu.dim() {
        return Err(Error::ChartUndefined { chart: k });
    }
    if eps < 0.0 || eps.is_nan() {
        return Err(Error::NonpositiveEpsilon(eps));
    }
    Ok(PotentialField::Lift { measure: mu.clone(), eps, chart: k })
}

/// `z` with real coordinate `idx` (ordered `Re z_1, Im z_1, ...`) shifted by `d`.
pub fn shifted(z: &[C64], idx: usize, d: f64) -> Vec<C64> {
    let mut out = z.to_vec();
    if idx % 2 == 0 {
        out[idx / 2].re += d;
    } else {
        out[idx / 2].im += d;
    }
    out
}

fn central_gradient(field: &dyn ChartField, z: &[C64], h: f64) -> Result<(Vec<f64>, f64, f64)> {
    let m = 2 * z.len();
    let mut grad = Vec::with_capacity(m);
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for i in 0..m {
        let fp = field.value(&shifted(z, i, h));
        let fm = field.value(&shifted(z, i, -h));
        if !fp.is_finite() || !fm.is_finite() {
            return Err(Error::SingularStencil);
        }
        for v in [fp.abs(), fm.abs()] {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        grad.push((fp - fm) / (2.0 * h));
    }
    Ok((grad, lo, hi))
}

/// Central-difference gradient in real coordinates `(Re z_1, Im z_1, ...)`.
///
/// Falls back to one Richardson step when the stencil values span more than
/// six orders of magnitude.
pub fn fd_gradient(field: &dyn ChartField, z: &[C64], h: f64) -> Result<Vec<f64>> {
    if z.len() != field.dim() {
        return Err(Error::DimensionMismatch { expected: field.dim(), found: z.len() });
    }
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!("step must be positive, got {h}")));
    }
    let (g1, lo, hi) = central_gradient(field, z, h)?;
    if lo > 0.0 && hi / lo <= 1e6 || lo == 0.0 && hi == 0.0 {
        return Ok(g1);
    }
    let (g2, _, _) = central_gradient(field, z, h / 2.0)?;
    Ok(g1.iter().zip(&g2).map(|(a, b)| (4.0 * b - a) / 3.0).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::kernel_g;
    use crate::measures::decompose;
    use crate::sampling::{fs_uniform_point, stream};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn g_orthogonal_atoms() {
        let mu = AtomicMeasure::uniform(vec![HomogeneousPoint::basis(2, 0), HomogeneousPoint::basis(2, 1)]).unwrap();
        assert_eq!(eval_G(&mu, &HomogeneousPoint::basis(2, 2)).unwrap(), 0.0);
        assert_eq!(eval_G(&mu, &HomogeneousPoint::basis(2, 0)).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn g_single_atom_and_decomposition() {
        let mut rng = stream(3, 0);
        let eta = fs_uniform_point(&mut rng, 2);
        let mu = AtomicMeasure::dirac(eta.clone());
        let zeta = fs_uniform_point(&mut rng, 2);
        assert_eq!(eval_G(&mu, &zeta).unwrap(), kernel_g(&zeta, &eta).unwrap().value());

        let mu = AtomicMeasure::empirical_fs(11, 30, 2).unwrap();
        let dec = decompose(&mu);
        let split: f64 = dec.components.iter().map(|(j, m)| dec.masses[*j] * eval_G(m, &zeta).unwrap()).sum();
        assert!((split - eval_G(&mu, &zeta).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn lift_matches_affine_potential() {
        let w = vec![c(0.3, -0.2), c(0.1, 0.5)];
        let mu = AtomicMeasure::dirac(HomogeneousPoint::new(&chart_lift(&w, 0)).unwrap());
        let nu = mu.in_chart(0).unwrap();
        let phi = psh_lift(&mu, 0).unwrap();
        for z in [[c(1.0, 2.0), c(-0.5, 0.0)], [c(0.0, 0.1), c(0.2, 0.2)]] {
            assert!((phi.value(&z) - eval_V(&nu, &z).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn v_of_dirac_at_origin() {
        let nu = ChartMeasure::dirac(0, vec![c(0.0, 0.0)]);
        let z = [c(0.6, 0.8)];
        assert!(eval_V(&nu, &z).unwrap().abs() < 1e-15);
        let e = eval_V_eps(&nu, &z, 0.1).unwrap();
        assert!(e > 0.0 && e <= 0.01 / 2.0);
        assert!(matches!(eval_V_eps(&nu, &z, 0.0), Err(Error::NonpositiveEpsilon(_))));
    }

    #[test]
    fn gradient_examples() {
        let g = fd_gradient(&FsPotential(2), &[c(0.0, 0.0), c(0.0, 0.0)], 1e-4).unwrap();
        assert!(g.iter().all(|x| x.abs() < 1e-12));
        let log_abs = FnField::new(1, |z: &[C64]| z[0].norm().ln());
        let g = fd_gradient(&log_abs, &[c(1.0, 0.0)], 1e-4).unwrap();
        assert!((g[0] - 1.0).abs() < 1e-7 && g[1].abs() < 1e-12);
        let bad = FnField::new(1, |z: &[C64]| if z[0].re > 0.0 { f64::NEG_INFINITY } else { 0.0 });
        assert_eq!(fd_gradient(&bad, &[c(0.0, 0.0)], 1e-3), Err(Error::SingularStencil));
    }
}
