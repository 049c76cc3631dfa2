//! The projective logarithmic kernel `G(zeta, eta) = log(|zeta ^ eta| / (|zeta||eta|))`,
//! its affine form `N(z, w)` and their regularizations.

use crate::geometry::{
    fs_potential, norm_sq, sin_sq_half_distance, to_chart, wedge_sq, HomogeneousPoint, C64,
    IDENTITY_SLACK,
};
use crate::error::{Error, Result};

/// A kernel value on `[-inf, inf)`; the diagonal is flagged, never a float `-inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelValue {
    Finite(f64),
    Singular,
}

impl KernelValue {
    fn from_log_arg(half_log_of: f64) -> Self {
        if half_log_of == 0.0 {
            KernelValue::Singular
        } else {
            KernelValue::Finite(0.5 * half_log_of.ln())
        }
    }

    /// The value as an extended real (`-inf` when singular).
    pub fn value(self) -> f64 {
        match self {
            KernelValue::Finite(v) => v,
            KernelValue::Singular => f64::NEG_INFINITY,
        }
    }

    pub fn is_singular(self) -> bool {
        matches!(self, KernelValue::Singular)
    }
}

fn same_len(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch { expected: a, found: b });
    }
    Ok(())
}

/// `G(zeta, eta)`; `<= 0`, singular exactly when the wedge vanishes.
pub fn kernel_g(zeta: &HomogeneousPoint, eta: &HomogeneousPoint) -> Result<KernelValue> {
    same_len(zeta.coords().len(), eta.coords().len())?;
    Ok(kernel_g_raw(zeta.coords(), eta.coords()))
}

/// `G` on arbitrary representatives.
pub fn kernel_g_raw(a: &[C64], b: &[C64]) -> KernelValue {
    let w = wedge_sq(a, b);
    if w == 0.0 {
        return KernelValue::Singular;
    }
    KernelValue::Finite(0.5 * (w / (norm_sq(a) * norm_sq(b))).min(1.0).ln())
}

/// Smoothed projective kernel `G_eps = log(sin^2(d / sqrt 2) + eps^2) / 2`.
///
/// Chart-independent and omega-plurisubharmonic for every `eps > 0`, and
/// decreasing to `G` as `eps -> 0`.
pub fn kernel_g_smoothed_raw(a: &[C64], b: &[C64], eps: f64) -> f64 {
    0.5 * (sin_sq_half_distance(a, b) + eps * eps).ln()
}

/// `|z ^ w|^2 = sum_{i<j} |z_i w_j - z_j w_i|^2` on C^n.
pub fn affine_wedge_norm_sq(z: &[C64], w: &[C64]) -> Result<f64> {
    same_len(z.len(), w.len())?;
    Ok(wedge_sq(z, w))
}

/// The argument of the log in `N`: `(|z-w|^2 + |z ^ w|^2) / (1 + |w|^2)`.
pub fn kernel_n_ratio(z: &[C64], w: &[C64]) -> f64 {
    let diff: f64 = z.iter().zip(w).map(|(a, b)| (a - b).norm_sqr()).sum();
    (diff + wedge_sq(z, w)) / (1.0 + norm_sq(w))
}

/// `N(z, w) = log ratio / 2`.
pub fn kernel_n(z: &[C64], w: &[C64]) -> Result<KernelValue> {
    same_len(z.len(), w.len())?;
    Ok(KernelValue::from_log_arg(kernel_n_ratio(z, w)))
}

/// The regularized affine kernel `log(ratio + eps^2) / 2`.
pub fn kernel_n_eps(z: &[C64], w: &[C64], eps: f64) -> Result<f64> {
    same_len(z.len(), w.len())?;
    if eps <= 0.0 || eps.is_nan() {
        return Err(Error::NonpositiveEpsilon(eps));
    }
    Ok(0.5 * (kernel_n_ratio(z, w) + eps * eps).ln())
}

/// `|G(zeta, eta) - (N(z, w) - rho(z))|` in chart `k`; 0 when both sides are singular.
pub fn chart_identity_residual(zeta: &HomogeneousPoint, eta: &HomogeneousPoint, k: usize) -> Result<f64> {
    let g = kernel_g(zeta, eta)?;
    let z = to_chart(zeta, k)?.z;
    let w = to_chart(eta, k)?.z;
    let n = kernel_n(&z, &w)?;
    Ok(match (g, n) {
        (KernelValue::Singular, KernelValue::Singular) => 0.0,
        (KernelValue::Finite(g), KernelValue::Finite(n)) => (g - (n - fs_potential(&z))).abs(),
        _ => f64::INFINITY,
    })
}

/// Lower and upper envelope test
/// `log(|z-w|^2/(1+|w|^2))/2 <= N(z,w) <= log(1+|z|^2)/2`, with slack.
pub fn lemma_bounds_check(z: &[C64], w: &[C64]) -> Result<(bool, bool)> {
    let n = kernel_n(z, w)?.value();
    let diff: f64 = z.iter().zip(w).map(|(a, b)| (a - b).norm_sqr()).sum();
    let lower = 0.5 * (diff / (1.0 + norm_sq(w))).ln();
    let upper = fs_potential(z);
    let lower_ok = if lower == f64::NEG_INFINITY { true } else { lower <= n + IDENTITY_SLACK };
    let upper_ok = n <= upper + IDENTITY_SLACK;
    Ok((lower_ok, upper_ok))
}
