//! Atomic probability measures on P^n, the partition-of-unity decomposition
//! into chart-supported pieces, and Riesz potentials.

mod riesz;

pub use riesz::{riesz_lp_scan, riesz_potential, riesz_refinement, Ball, LpEstimate, RieszOptions};

use crate::error::{Error, Result};
use crate::geometry::{to_chart, HomogeneousPoint, Unitary, C64};

/// Tolerance on `sum weights = 1`.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub point: HomogeneousPoint,
    pub weight: f64,
}

/// A finite convex combination of Dirac masses.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicMeasure {
    n: usize,
    atoms: Vec<Atom>,
    /// Marks an empirical approximant of an atomless measure.
    pub atomless_intent: bool,
}

impl AtomicMeasure {
    /// Validate weights and merge atoms with equal canonical forms.
    pub fn new(n: usize, atoms: Vec<(HomogeneousPoint, f64)>) -> Result<Self> {
        validate(n, atoms)
    }

    pub fn dirac(point: HomogeneousPoint) -> Self {
        AtomicMeasure { n: point.dim(), atoms: vec![Atom { point, weight: 1.0 }], atomless_intent: false }
    }

    /// Equal weights `1/N`.
    pub fn uniform(points: Vec<HomogeneousPoint>) -> Result<Self> {
        let n = points.first().ok_or(Error::EmptyMeasure)?.dim();
        let w = 1.0 / points.len() as f64;
        validate(n, points.into_iter().map(|p| (p, w)).collect())
    }

    /// Rescale positive weights to a probability vector.
    pub fn normalized(atoms: Vec<(HomogeneousPoint, f64)>) -> Result<Self> {
        let n = atoms.first().ok_or(Error::EmptyMeasure)?.0.dim();
        for (i, (_, w)) in atoms.iter().enumerate() {
            if !(*w > 0.0) || !w.is_finite() {
                return Err(Error::NegativeWeight { index: i, weight: *w });
            }
        }
        let total: f64 = atoms.iter().map(|(_, w)| w).sum();
        validate(n, atoms.into_iter().map(|(p, w)| (p, w / total)).collect())
    }

    /// Empirical measure of `count` FS-uniform points, flagged atomless-intent.
    pub fn empirical_fs(seed: u64, count: usize, n: usize) -> Result<Self> {
        let mut m = Self::uniform(crate::sampling::sample_fs_uniform(seed, count, n))?;
        m.atomless_intent = true;
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Largest single-point mass.
    pub fn max_atom_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).fold(0.0, f64::max)
    }

    /// `t mu + (1 - t) other`.
    pub fn mix(&self, t: f64, other: &AtomicMeasure) -> Result<Self> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidArgument(format!("mixing parameter {t} outside [0, 1]")));
        }
        let mut atoms: Vec<(HomogeneousPoint, f64)> =
            self.atoms.iter().map(|a| (a.point.clone(), t * a.weight)).collect();
        atoms.extend(other.atoms.iter().map(|a| (a.point.clone(), (1.0 - t) * a.weight)));
        atoms.retain(|(_, w)| *w > 0.0);
        validate(self.n, atoms)
    }

    /// Push forward by a unitary map of C^{n+1}.
    pub fn apply(&self, u: &Unitary) -> Self {
        AtomicMeasure {
            n: self.n,
            atoms: self.atoms.iter().map(|a| Atom { point: a.point.apply(u), weight: a.weight }).collect(),
            atomless_intent: self.atomless_intent,
        }
    }

    /// Express the measure in chart `k`; every atom must lie in `U_k`.
    pub fn in_chart(&self, k: usize) -> Result<ChartMeasure> {
        let atoms = self
            .atoms
            .iter()
            .map(|a| Ok((to_chart(&a.point, k)?.z, a.weight)))
            .collect::<Result<Vec<_>>>()?;
        ChartMeasure::new(k, atoms)
    }

    /// Weight carried by `point` (0 if it is not an atom).
    pub fn mass_at(&self, point: &HomogeneousPoint) -> f64 {
        self.atoms.iter().filter(|a| a.point.approx_eq(point)).map(|a| a.weight).sum()
    }
}

/// Enforce the measure invariants, merging duplicate atoms.
pub fn validate(n: usize, atoms: Vec<(HomogeneousPoint, f64)>) -> Result<AtomicMeasure> {
    if atoms.is_empty() {
        return Err(Error::EmptyMeasure);
    }
    let mut merged: Vec<Atom> = Vec::with_capacity(atoms.len());
    for (i, (point, weight)) in atoms.into_iter().enumerate() {
        if !(weight > 0.0) || !weight.is_finite() {
            return Err(Error::NegativeWeight { index: i, weight });
        }
        if point.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, found: point.dim() });
        }
        match merged.iter_mut().find(|a| a.point.approx_eq(&point)) {
            Some(a) => a.weight += weight,
            None => merged.push(Atom { point, weight }),
        }
    }
    let sum: f64 = merged.iter().map(|a| a.weight).sum();
    if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(Error::WeightSumMismatch { sum });
    }
    Ok(AtomicMeasure { n, atoms: merged, atomless_intent: false })
}

/// An atomic probability measure written in the affine coordinates of one chart.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartMeasure {
    pub chart: usize,
    atoms: Vec<(Vec<C64>, f64)>,
}

impl ChartMeasure {
    pub fn new(chart: usize, atoms: Vec<(Vec<C64>, f64)>) -> Result<Self> {
        let dim = atoms.first().ok_or(Error::EmptyMeasure)?.0.len();
        for (i, (z, w)) in atoms.iter().enumerate() {
            if !(*w > 0.0) || !w.is_finite() {
                return Err(Error::NegativeWeight { index: i, weight: *w });
            }
            if z.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: z.len() });
            }
        }
        let sum: f64 = atoms.iter().map(|(_, w)| w).sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::WeightSumMismatch { sum });
        }
        Ok(ChartMeasure { chart, atoms })
    }

    pub fn dirac(chart: usize, z: Vec<C64>) -> Self {
        ChartMeasure { chart, atoms: vec![(z, 1.0)] }
    }

    pub fn dim(&self) -> usize {
        self.atoms[0].0.len()
    }

    pub fn atoms(&self) -> &[(Vec<C64>, f64)] {
        &self.atoms
    }
}

/// Support threshold `1 / (2(n+1))` of the chart bumps.
pub fn support_threshold(n: usize) -> f64 {
    1.0 / (2.0 * (n as f64 + 1.0))
}

fn smooth_step(x: f64) -> f64 {
    // C-infinity transition from 0 (x <= 0) to 1 (x >= 1)
    let f = |s: f64| if s > 0.0 { (-1.0 / s).exp() } else { 0.0 };
    let a = f(x);
    let b = f(1.0 - x);
    a / (a + b)
}

/// Bump on `t = |zeta_j|^2/|zeta|^2`: 0 for `t <= 1/(2(n+1))`, 1 for `t >= 1/(n+1)`.
pub fn chart_bump(n: usize, t: f64) -> f64 {
    let lo = support_threshold(n);
    let hi = 2.0 * lo;
    smooth_step((t - lo) / (hi - lo))
}

/// Smooth partition of unity `chi_j = beta(t_j) / sum_k beta(t_k)` subordinate to the atlas.
pub fn partition_of_unity(zeta: &HomogeneousPoint) -> Vec<f64> {
    partition_of_unity_raw(zeta.coords())
}

pub fn partition_of_unity_raw(v: &[C64]) -> Vec<f64> {
    let n = v.len() - 1;
    let total = crate::geometry::norm_sq(v);
    let bumps: Vec<f64> = v.iter().map(|c| chart_bump(n, c.norm_sqr() / total)).collect();
    let s: f64 = bumps.iter().sum();
    bumps.into_iter().map(|b| b / s).collect()
}

/// `mu = sum_{j in J} m_j mu_j` with `m_j = int chi_j dmu`.
#[derive(Debug, Clone)]
pub struct Decomposition {
    /// `m_j` for every chart `j = 0..=n` (zero outside `J`).
    pub masses: Vec<f64>,
    /// `(j, mu_j)` for `j in J`.
    pub components: Vec<(usize, AtomicMeasure)>,
}

impl Decomposition {
    /// Reassembled weight `sum_j m_j mu_j({point})`.
    pub fn reassembled_mass(&self, point: &HomogeneousPoint) -> f64 {
        self.components.iter().map(|(j, mu)| self.masses[*j] * mu.mass_at(point)).sum()
    }
}

pub fn decompose(mu: &AtomicMeasure) -> Decomposition {
    let n = mu.dim();
    let chis: Vec<Vec<f64>> = mu.atoms().iter().map(|a| partition_of_unity(&a.point)).collect();
    let mut masses = vec![0.0; n + 1];
    for (a, chi) in mu.atoms().iter().zip(&chis) {
        for j in 0..=n {
            masses[j] += a.weight * chi[j];
        }
    }
    let mut components = Vec::new();
    for j in 0..=n {
        if masses[j] == 0.0 {
            continue;
        }
        let atoms: Vec<Atom> = mu
            .atoms()
            .iter()
            .zip(&chis)
            .filter(|(_, chi)| chi[j] > 0.0)
            .map(|(a, chi)| Atom { point: a.point.clone(), weight: a.weight * chi[j] / masses[j] })
            .collect();
        components.push((j, AtomicMeasure { n, atoms, atomless_intent: mu.atomless_intent }));
    }
    Decomposition { masses, components }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(v: &[f64]) -> HomogeneousPoint {
        HomogeneousPoint::from_real(v).unwrap()
    }

    #[test]
    fn validate_examples() {
        let m = AtomicMeasure::new(2, vec![(pt(&[1.0, 0.0, 0.0]), 1.0)]).unwrap();
        assert_eq!(m.len(), 1);
        let m = AtomicMeasure::new(2, vec![(pt(&[1.0, 2.0, 0.0]), 0.5), (pt(&[-2.0, -4.0, 0.0]), 0.5)]).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m.atoms()[0].weight, 1.0);
        let e = AtomicMeasure::new(1, vec![(pt(&[1.0, 0.0]), 0.4), (pt(&[0.0, 1.0]), 0.5)]);
        assert!(matches!(e, Err(Error::WeightSumMismatch { .. })));
        assert_eq!(AtomicMeasure::new(1, vec![]), Err(Error::EmptyMeasure));
        let e = AtomicMeasure::new(1, vec![(pt(&[1.0, 0.0]), 2.0), (pt(&[0.0, 1.0]), -1.0)]);
        assert_eq!(e, Err(Error::NegativeWeight { index: 1, weight: -1.0 }));
    }

    #[test]
    fn partition_examples() {
        let chi = partition_of_unity(&HomogeneousPoint::basis(3, 2));
        assert_eq!(chi, vec![0.0, 0.0, 1.0, 0.0]);
        for n in 1..=4 {
            let chi = partition_of_unity(&pt(&vec![1.0; n + 1]));
            for c in chi {
                assert!((c - 1.0 / (n as f64 + 1.0)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn partition_support() {
        // t_0 = 1/7 < 1/6 for n = 2
        let p = pt(&[1.0, 2.0, 1.0]);
        assert_eq!(partition_of_unity(&p)[0], 0.0);
    }

    #[test]
    fn decompose_examples() {
        let d = decompose(&AtomicMeasure::dirac(HomogeneousPoint::basis(2, 0)));
        assert_eq!(d.masses, vec![1.0, 0.0, 0.0]);
        assert_eq!(d.components.len(), 1);
        let mu = AtomicMeasure::uniform(vec![HomogeneousPoint::basis(2, 0), HomogeneousPoint::basis(2, 1)]).unwrap();
        let d = decompose(&mu);
        assert_eq!(d.masses, vec![0.5, 0.5, 0.0]);
        assert!(d.components.iter().all(|(_, c)| c.len() == 1));
    }

    #[test]
    fn chart_measure_requires_chart() {
        let mu = AtomicMeasure::dirac(HomogeneousPoint::basis(1, 1));
        assert_eq!(mu.in_chart(0), Err(Error::ChartUndefined { chart: 0 }));
    }
}
