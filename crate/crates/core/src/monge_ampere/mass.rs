//! Total mass and ball-mass profiles of `(omega + dd^c G_mu^eps)^n`.

use std::f64::consts::{PI, SQRT_2};

use super::{ma_density_of, DensityValue};
use crate::coarea::area_constant;
use crate::error::{Error, Result};
use crate::geometry::{
    ball_volume, best_chart, chart_lift, fs_potential, fs_volume_density, sin_sq_half_distance, to_chart,
    HomogeneousPoint, Unitary, C64,
};
use crate::measures::{partition_of_unity_raw, AtomicMeasure};
use crate::potentials::{g_sum, FnField};
use crate::quadrature::kronrod_nodes;
use crate::reduce::par_sum_array;
use crate::sampling::{sphere_direction, stream};

/// Relative FS-volume mismatch of the chart grids tolerated by [`ma_total_mass`].
pub const GRID_VOLUME_TOL: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub points_per_axis: usize,
    /// Each chart grid covers `[-half_width, half_width]^{2n}`.
    pub half_width: f64,
    pub charts: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallMass {
    pub radius: f64,
    pub mass: f64,
    /// `mass / vol_FS(B_r)`.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MassReport {
    pub eps: f64,
    pub total_mass: f64,
    /// Increasing in radius.
    pub ball_profile: Vec<BallMass>,
    pub grid: Option<GridSpec>,
    /// Mass attributed to the innermost ball that the quadrature does not resolve.
    pub excised_singular_mass: f64,
    pub negative_clips: usize,
    /// FS volume seen by the quadrature (1 for an exact rule).
    pub volume: f64,
}

fn lift_field(mu: &AtomicMeasure, k: usize, eps: f64) -> FnField<impl Fn(&[C64]) -> f64 + Sync + '_> {
    FnField::new(mu.dim(), move |v: &[C64]| g_sum(mu, &chart_lift(v, k), eps) + fs_potential(v))
}

/// Integrate the MA density over P^n with one midpoint grid per chart, weighted
/// by the partition of unity.
pub fn ma_total_mass(mu: &AtomicMeasure, points_per_axis: usize, h: f64, eps: f64) -> Result<MassReport> {
    if !(eps > 0.0) {
        return Err(Error::NonpositiveEpsilon(eps));
    }
    if points_per_axis == 0 {
        return Err(Error::InvalidArgument("grid needs at least one point per axis".into()));
    }
    let n = mu.dim();
    let dims = 2 * n;
    // chi_k vanishes unless |z|^2 < 2n + 1
    let half = ((2 * n + 1) as f64).sqrt();
    let step = 2.0 * half / points_per_axis as f64;
    let cell = step.powi(dims as i32);
    let cells = (points_per_axis as u128).pow(dims as u32);
    if cells > 1u128 << 40 {
        return Err(Error::InvalidArgument(format!("grid of {cells} cells per chart is too large")));
    }
    let mut acc = [0.0; 4];
    for k in 0..=n {
        let field = lift_field(mu, k, eps);
        let part = par_sum_array::<4, _>(cells as usize, |idx| {
            let mut rest = idx;
            let mut z = vec![C64::new(0.0, 0.0); n];
            for d in 0..dims {
                let x = -half + ((rest % points_per_axis) as f64 + 0.5) * step;
                rest /= points_per_axis;
                if d % 2 == 0 {
                    z[d / 2].re = x;
                } else {
                    z[d / 2].im = x;
                }
            }
            let chi = partition_of_unity_raw(&chart_lift(&z, k))[k];
            if chi == 0.0 {
                return [0.0; 4];
            }
            let w = chi * fs_volume_density(&z) * cell;
            match ma_density_of(&field, &z, h) {
                Ok(DensityValue { density, clipped }) => [w * density, w, clipped as u8 as f64, 0.0],
                Err(Error::NegativeDensity { value }) => [0.0, w, 0.0, value.min(-f64::MIN_POSITIVE)],
                Err(_) => [f64::NAN, w, 0.0, 0.0],
            }
        });
        for (a, p) in acc.iter_mut().zip(part) {
            *a += p;
        }
    }
    let [mass, volume, clips, negative] = acc;
    if negative < 0.0 {
        return Err(Error::NegativeDensity { value: negative });
    }
    if !mass.is_finite() {
        return Err(Error::SingularStencil);
    }
    let mismatch = (volume - 1.0).abs();
    if mismatch > GRID_VOLUME_TOL {
        return Err(Error::GridTooCoarse { mismatch });
    }
    Ok(MassReport {
        eps,
        total_mass: mass,
        ball_profile: Vec::new(),
        grid: Some(GridSpec { points_per_axis, half_width: half, charts: n + 1 }),
        excised_singular_mass: 0.0,
        negative_clips: clips as usize,
        volume,
    })
}

/// Quadrature layout for [`ball_mass_profile`].
#[derive(Debug, Clone, Copy)]
pub struct BallOptions {
    /// Radial Gauss-Kronrod panels per decade of geodesic radius.
    pub panels_per_decade: usize,
    /// Points per circle (`n = 1`, `n = 2`) or Monte Carlo directions (`n >= 3`).
    pub angular: usize,
    pub seed: u64,
}

impl Default for BallOptions {
    fn default() -> Self {
        BallOptions { panels_per_decade: 8, angular: 8, seed: 0 }
    }
}

/// Unit directions in C^n with equal weights approximating the uniform measure.
fn directions(n: usize, opts: &BallOptions) -> Vec<Vec<C64>> {
    let m = opts.angular.max(1);
    let circle = |j: usize| C64::from_polar(1.0, 2.0 * PI * (j as f64 + 0.5) / m as f64);
    match n {
        1 => (0..m).map(|j| vec![circle(j)]).collect(),
        2 => {
            // Hopf coordinates: |v_1|^2 is uniform on [0, 1]
            let mut out = Vec::with_capacity(m * m * m);
            for a in 0..m {
                let u = (a as f64 + 0.5) / m as f64;
                for j in 0..m {
                    for l in 0..m {
                        out.push(vec![circle(j) * u.sqrt(), circle(l) * (1.0 - u).sqrt()]);
                    }
                }
            }
            out
        }
        _ => (0..m.pow(3)).map(|i| sphere_direction(&mut stream(opts.seed, i as u64), n)).collect(),
    }
}

/// Mass of geodesic balls `B_r(center)` under `(omega + dd^c G_mu^eps)^n` for
/// each `eps`, integrated in geodesic polar coordinates about `center`.
pub fn ball_mass_profile(
    mu: &AtomicMeasure,
    center: &HomogeneousPoint,
    radii: &[f64],
    h: f64,
    eps_list: &[f64],
    opts: BallOptions,
) -> Result<Vec<MassReport>> {
    let n = mu.dim();
    if center.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: center.dim() });
    }
    if radii.is_empty() || radii.windows(2).any(|w| w[1] >= w[0]) || radii.iter().any(|r| !(*r > 0.0)) {
        return Err(Error::InvalidArgument("radii must be positive and strictly decreasing".into()));
    }
    if eps_list.is_empty() || eps_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument("eps list must be strictly decreasing".into()));
    }
    if let Some(e) = eps_list.iter().find(|e| !(**e > 0.0)) {
        return Err(Error::NonpositiveEpsilon(*e));
    }
    let frame = Unitary::to_basepoint(center);
    let rotated = mu.apply(&frame);
    let dirs = directions(n, &opts);
    let r_max = PI / SQRT_2;
    let c_n = area_constant(n);
    let mut ascending: Vec<f64> = radii.iter().map(|r| r.min(r_max)).collect();
    ascending.reverse();
    ascending.dedup();

    eps_list
        .iter()
        .map(|&eps| {
            let r0 = ascending[0].min(eps) * 1e-3;
            let top = *ascending.last().expect("nonempty");
            let decades = (top / r0).log10();
            let panels = ((decades * opts.panels_per_decade as f64).ceil() as usize).max(1);
            let mut cuts: Vec<f64> = (0..=panels).map(|i| r0 * (top / r0).powf(i as f64 / panels as f64)).collect();
            cuts.extend(ascending.iter().copied());
            cuts.sort_by(f64::total_cmp);
            cuts.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * b.abs());

            let density = |p: &[C64]| -> Result<DensityValue> {
                let k = best_chart(p);
                let zeta = HomogeneousPoint::new(p)?;
                let z = to_chart(&zeta, k)?.z;
                let near = rotated
                    .atoms()
                    .iter()
                    .map(|a| sin_sq_half_distance(p, a.point.coords()).sqrt().asin() * SQRT_2)
                    .fold(f64::INFINITY, f64::min);
                ma_density_of(&lift_field(&rotated, k, eps), &z, h * (near + eps).min(1.0))
            };

            let nodes: Vec<(usize, f64, f64)> = cuts
                .windows(2)
                .enumerate()
                .flat_map(|(i, w)| kronrod_nodes(w[0], w[1]).map(move |(r, wt)| (i, r, wt)))
                .collect();
            let per_node = nodes.len();
            let nd = dirs.len();
            // [value, clip count, hard-negative marker] per (node, direction)
            let vals: Vec<[f64; 3]> = crate::reduce::par_map(per_node, |i| {
                let (_, r, wt) = nodes[i];
                let t = r / SQRT_2;
                let s = t.tan();
                let area = c_n * t.sin().powi(2 * n as i32 - 2) * (2.0 * t).sin();
                let mut out = [0.0; 3];
                let mut col = Vec::with_capacity(nd);
                for d in &dirs {
                    let y: Vec<C64> = d.iter().map(|c| c * s).collect();
                    match density(&chart_lift(&y, 0)) {
                        Ok(v) => {
                            col.push(v.density);
                            out[1] += v.clipped as u8 as f64;
                        }
                        Err(Error::NegativeDensity { value }) => {
                            out[2] = out[2].min(value);
                            col.push(0.0);
                        }
                        Err(_) => col.push(f64::NAN),
                    }
                }
                out[0] = wt * area * crate::reduce::pairwise_sum(&col) / nd as f64;
                out
            });
            if let Some(bad) = vals.iter().map(|v| v[2]).find(|v| *v < 0.0) {
                return Err(Error::NegativeDensity { value: bad });
            }
            if vals.iter().any(|v| !v[0].is_finite()) {
                return Err(Error::SingularStencil);
            }
            let clips = vals.iter().map(|v| v[1]).sum::<f64>() as usize;
            let center_density = density(&chart_lift(&vec![C64::new(0.0, 0.0); n], 0))?.density;
            let excised = center_density * ball_volume(n, r0);

            let mut panel_mass = vec![0.0; cuts.len() - 1];
            for ((panel, _, _), v) in nodes.iter().zip(&vals) {
                panel_mass[*panel] += v[0];
            }
            let mut profile = Vec::with_capacity(ascending.len());
            let mut cum = excised;
            let mut next = 0;
            for (i, m) in panel_mass.iter().enumerate() {
                cum += m;
                while next < ascending.len() && (cuts[i + 1] - ascending[next]).abs() <= 1e-14 * ascending[next] {
                    let radius = ascending[next];
                    profile.push(BallMass { radius, mass: cum, ratio: cum / ball_volume(n, radius) });
                    next += 1;
                }
            }
            debug_assert_eq!(profile.len(), ascending.len());
            Ok(MassReport {
                eps,
                total_mass: profile.last().map_or(0.0, |b| b.mass),
                ball_profile: profile,
                grid: None,
                excised_singular_mass: excised,
                negative_clips: clips,
                volume: crate::geometry::ball_volume(n, top),
            })
        })
        .collect()
}
