//! Log-depth refinement schedule for near-atom integrals.
//!
//! At the critical exponent the integrals diverge logarithmically: excising a
//! ball of radius `delta` around an atom leaves a near-atom contribution
//! `~ K ln(R / delta)`. Level `k` excises `delta_k = R exp(-base_depth * growth^k)`,
//! so the log-depth grows geometrically and so does a divergent contribution,
//! while a convergent one settles.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Refinement {
    pub base_depth: f64,
    pub growth: f64,
    pub levels: usize,
}

impl Default for Refinement {
    fn default() -> Self {
        // deepest level: 0.2 * 12^3 = 345.6, keeps |y|^2 inside normal f64 range
        Refinement { base_depth: 0.2, growth: 12.0, levels: 4 }
    }
}

impl Refinement {
    /// `ln(R / delta_k)`.
    pub fn depth(&self, level: usize) -> f64 {
        self.base_depth * self.growth.powi(level as i32)
    }
}

/// Log-depth used by a plain scan at exponent excess `e`: deep enough that the
/// excised remainder `~ exp(-e * depth)` is below `1e-13`.
pub fn default_depth(excess: f64) -> f64 {
    if excess <= 0.0 {
        MAX_DEPTH
    } else {
        (30.0 / excess).min(MAX_DEPTH)
    }
}

pub const MAX_DEPTH: f64 = 300.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefinementLevel {
    pub level: usize,
    pub log_depth: f64,
    /// Integral over the caps `delta_k < dist < R` around the atoms.
    pub near_atom: f64,
    pub near_atom_se: f64,
    /// `near_atom` plus the bulk contribution.
    pub total: f64,
}
